//! JSON algebra programs for `grassmann eval`.
//!
//! A program is a list of operations run in order against a set of named
//! elements and a current value `_`:
//!
//! ```json
//! [
//!   {"op": "load", "name": "z", "value": {"terms": [{"gens": [], "re": 2, "im": 0},
//!                                                   {"gens": [1, 2], "re": 1, "im": 0}]}},
//!   {"op": "invert"}
//! ]
//! ```
//!
//! Unary operations act on `arg` (default `_`), binary ones on `args`; every
//! operation may `store` its result under a name. The final current value is the
//! program's result.

use std::collections::HashMap;

use grassmann_fock::distribution::{weighted_norm, WeightSystem};
use grassmann_fock::fock::berezin_integral;
use grassmann_fock::index::MultiIndex;
use grassmann_fock::{ConjugationId, Error, GrassmannElement};
use serde::{Deserialize, Serialize};

const CURRENT: &str = "_";

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    Load { name: String, value: GrassmannElement },
    Multiply { args: [String; 2], store: Option<String> },
    Add { args: [String; 2], store: Option<String> },
    Conjugate { k: u8, arg: Option<String>, store: Option<String> },
    Invert { arg: Option<String>, store: Option<String> },
    Berezin { gens: Vec<u32>, arg: Option<String>, store: Option<String> },
    Norm { p: u32, arg: Option<String> },
    WeightedNorm { p: i32, arg: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Value {
    Element(GrassmannElement),
    Number(f64),
}

/// Why a program stopped.
#[derive(Debug)]
pub enum ProgramError {
    /// The program itself is malformed (unknown name, number where an element is needed, ...).
    Malformed(String),
    /// An algebra precondition failed.
    Algebra(Error),
}

impl From<Error> for ProgramError {
    fn from(e: Error) -> Self {
        ProgramError::Algebra(e)
    }
}

pub fn parse(text: &str) -> Result<Vec<Op>, ProgramError> {
    serde_json::from_str(text).map_err(|e| ProgramError::Malformed(format!("program does not parse: {e}")))
}

struct Machine<'w> {
    env: HashMap<String, Value>,
    weights: &'w WeightSystem,
}

impl Machine<'_> {
    fn element(&self, name: &str) -> Result<&GrassmannElement, ProgramError> {
        match self.env.get(name) {
            Some(Value::Element(z)) => Ok(z),
            Some(Value::Number(_)) => Err(ProgramError::Malformed(format!("`{name}` is a number, not an element"))),
            None if name == CURRENT => Err(ProgramError::Malformed("no current value yet".into())),
            None => Err(ProgramError::Malformed(format!("unknown element `{name}`"))),
        }
    }

    fn check_budget(&self, z: &GrassmannElement) -> Result<(), ProgramError> {
        let top = z.max_generator();
        if top > self.weights.g_max() {
            return Err(Error::TruncationOverflow { generator: top, limit: self.weights.g_max() }.into());
        }
        Ok(())
    }

    fn set(&mut self, value: Value, store: Option<String>) {
        if let Some(name) = store {
            self.env.insert(name, value.clone());
        }
        self.env.insert(CURRENT.into(), value);
    }

    fn step(&mut self, op: Op) -> Result<(), ProgramError> {
        let arg = |a: &Option<String>| a.clone().unwrap_or_else(|| CURRENT.into());
        match op {
            Op::Load { name, value } => {
                self.check_budget(&value)?;
                let v = Value::Element(value);
                self.env.insert(name, v.clone());
                self.env.insert(CURRENT.into(), v);
            }
            Op::Multiply { args, store } => {
                let z = self.element(&args[0])?.multiply(self.element(&args[1])?);
                self.set(Value::Element(z), store);
            }
            Op::Add { args, store } => {
                let z = self.element(&args[0])? + self.element(&args[1])?;
                self.set(Value::Element(z), store);
            }
            Op::Conjugate { k, arg: a, store } => {
                let c = ConjugationId::from_number(k)
                    .ok_or_else(|| ProgramError::Malformed(format!("conjugation number must be 0..=7, got {k}")))?;
                let z = self.element(&arg(&a))?.conjugate(c);
                self.set(Value::Element(z), store);
            }
            Op::Invert { arg: a, store } => {
                let z = self.element(&arg(&a))?.invert()?;
                self.set(Value::Element(z), store);
            }
            Op::Berezin { gens, arg: a, store } => {
                let alpha = MultiIndex::from_generators(gens.iter().copied())?;
                let z = berezin_integral(alpha, self.element(&arg(&a))?);
                self.set(Value::Element(z), store);
            }
            Op::Norm { p, arg: a } => {
                if p == 0 {
                    return Err(ProgramError::Malformed("norm order p must be at least 1".into()));
                }
                let x = self.element(&arg(&a))?.p_norm(p);
                self.set(Value::Number(x), None);
            }
            Op::WeightedNorm { p, arg: a } => {
                let x = weighted_norm(self.element(&arg(&a))?, p, self.weights);
                self.set(Value::Number(x), None);
            }
        }
        Ok(())
    }
}

/// Runs `ops` and returns the final current value.
pub fn run(ops: Vec<Op>, weights: &WeightSystem) -> Result<Value, ProgramError> {
    let mut m = Machine { env: HashMap::new(), weights };
    for op in ops {
        m.step(op)?;
    }
    m.env.remove(CURRENT).ok_or_else(|| ProgramError::Malformed("empty program".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn eval(text: &str) -> Result<Value, ProgramError> {
        run(parse(text)?, &WeightSystem::default())
    }

    #[test]
    fn invert_worked_example() {
        let v = eval(
            r#"[{"op":"load","name":"z","value":{"terms":[{"gens":[],"re":2,"im":0},{"gens":[1,2],"re":1,"im":0}]}},
                {"op":"invert"}]"#,
        )
        .unwrap();
        let expected = GrassmannElement::from_terms([
            (MultiIndex::EMPTY, Complex64::new(0.5, 0.0)),
            (MultiIndex::from_generators([1, 2]).unwrap(), Complex64::new(-0.25, 0.0)),
        ]);
        assert_eq!(v, Value::Element(expected));
    }

    #[test]
    fn stores_and_norms() {
        let v = eval(
            r#"[{"op":"load","name":"a","value":{"terms":[{"gens":[1],"re":3,"im":0}]}},
                {"op":"load","name":"b","value":{"terms":[{"gens":[2],"re":4,"im":0}]}},
                {"op":"add","args":["a","b"],"store":"c"},
                {"op":"norm","p":2,"arg":"c"}]"#,
        )
        .unwrap();
        assert_eq!(v, Value::Number(5.0));
    }

    #[test]
    fn errors_are_classified() {
        let singular = r#"[{"op":"load","name":"s","value":{"terms":[{"gens":[1],"re":1,"im":0}]}},{"op":"invert"}]"#;
        assert!(matches!(eval(singular), Err(ProgramError::Algebra(Error::NotInvertible { .. }))));
        assert!(matches!(eval(r#"[{"op":"invert","arg":"nope"}]"#), Err(ProgramError::Malformed(_))));
        assert!(matches!(eval(r#"[{"op":"frobnicate"}]"#), Err(ProgramError::Malformed(_))));
        assert!(matches!(eval("[]"), Err(ProgramError::Malformed(_))));
        let number = r#"[{"op":"load","name":"a","value":{"terms":[]}},{"op":"norm","p":1},{"op":"invert"}]"#;
        assert!(matches!(eval(number), Err(ProgramError::Malformed(_))));
    }
}
