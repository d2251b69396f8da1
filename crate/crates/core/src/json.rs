//! JSON wire format for elements:
//! `{"terms":[{"gens":[1,3],"re":0.5,"im":-1.0}, ...]}`.
//!
//! Generators inside a term are listed ascending; an index may appear at most once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::element::GrassmannElement;
use crate::error::{Error, Result};
use crate::index::MultiIndex;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermRecord {
    pub gens: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ElementRecord {
    pub terms: Vec<TermRecord>,
}

impl From<&GrassmannElement> for ElementRecord {
    fn from(z: &GrassmannElement) -> Self {
        ElementRecord {
            terms: z
                .terms()
                .iter()
                .map(|(i, c)| TermRecord { gens: i.generators().collect(), re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl TryFrom<ElementRecord> for GrassmannElement {
    type Error = Error;

    fn try_from(rec: ElementRecord) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut terms = Vec::with_capacity(rec.terms.len());
        for t in rec.terms {
            if !t.gens.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Format(format!("generators {:?} are not strictly ascending", t.gens)));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Format("non-finite coefficient".into()));
            }
            let index = MultiIndex::from_generators(t.gens.iter().copied())?;
            if !seen.insert(index) {
                return Err(Error::Format(format!("index {index:?} listed twice")));
            }
            terms.push((index, Complex64::new(t.re, t.im)));
        }
        Ok(GrassmannElement::from_terms(terms))
    }
}

impl GrassmannElement {
    pub fn to_json(&self) -> Result<String> {
        if self.terms().iter().any(|(_, c)| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Format("cannot serialize non-finite coefficient".into()));
        }
        serde_json::to_string(&ElementRecord::from(self)).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: ElementRecord = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        rec.try_into()
    }
}

impl Serialize for GrassmannElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GrassmannElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = ElementRecord::deserialize(d)?;
        GrassmannElement::try_from(rec).map_err(serde::de::Error::custom)
    }
}
