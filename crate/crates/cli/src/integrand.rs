//! Element-valued integrands `Y(t)` for `grassmann integrate`.
//!
//! Either a single element (constant in `t`) or a piecewise-constant function:
//!
//! ```json
//! {"pieces": [{"from": 0.0, "value": {"terms": [...]}},
//!             {"from": 1.0, "value": {"terms": [...]}}]}
//! ```
//!
//! Each piece holds from its `from` time up to the next piece's; before the first
//! piece the integrand is zero.

use grassmann_fock::GrassmannElement;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Piece {
    from: f64,
    value: GrassmannElement,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Spec {
    Piecewise { pieces: Vec<Piece> },
    Constant(GrassmannElement),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integrand {
    /// `(from, value)` with strictly increasing `from`.
    pieces: Vec<(f64, GrassmannElement)>,
}

impl Integrand {
    pub fn parse(text: &str) -> Result<Self, String> {
        let spec: Spec = serde_json::from_str(text).map_err(|e| format!("integrand does not parse: {e}"))?;
        let pieces = match spec {
            Spec::Constant(z) => vec![(f64::NEG_INFINITY, z)],
            Spec::Piecewise { pieces } => {
                if pieces.is_empty() {
                    return Err("integrand has no pieces".into());
                }
                if pieces.iter().any(|p| !p.from.is_finite()) || !pieces.windows(2).all(|w| w[0].from < w[1].from) {
                    return Err("piece start times must be finite and strictly increasing".into());
                }
                pieces.into_iter().map(|p| (p.from, p.value)).collect()
            }
        };
        Ok(Integrand { pieces })
    }

    pub fn eval(&self, t: f64) -> GrassmannElement {
        match self.pieces.partition_point(|(from, _)| *from <= t) {
            0 => GrassmannElement::zero(),
            k => self.pieces[k - 1].1.clone(),
        }
    }

    pub fn max_generator(&self) -> u32 {
        self.pieces.iter().map(|(_, z)| z.max_generator()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_piecewise() {
        let one = r#"{"terms":[{"gens":[],"re":1,"im":0}]}"#;
        let c = Integrand::parse(one).unwrap();
        assert_eq!(c.eval(-5.0), GrassmannElement::one());
        let p = Integrand::parse(&format!(
            r#"{{"pieces":[{{"from":0,"value":{one}}},{{"from":1,"value":{{"terms":[]}}}}]}}"#
        ))
        .unwrap();
        assert!(p.eval(-0.1).is_zero());
        assert_eq!(p.eval(0.0), GrassmannElement::one());
        assert_eq!(p.eval(0.99), GrassmannElement::one());
        assert!(p.eval(1.0).is_zero());
    }

    #[test]
    fn rejects_bad_pieces() {
        assert!(Integrand::parse(r#"{"pieces":[]}"#).is_err());
        assert!(Integrand::parse(r#"{"pieces":[{"from":1,"value":{"terms":[]}},{"from":0,"value":{"terms":[]}}]}"#)
            .is_err());
        assert!(Integrand::parse("[1,2]").is_err());
    }
}
