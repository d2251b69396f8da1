//! The eight conjugations of a supernumber.
//!
//! Three commuting involutions generate the group:
//! `D1` reverses generator order and negates generators, `D2` conjugates the
//! complex coefficients, `D3` flips the sign of odd terms. The remaining four are
//! their compositions. Each conjugation is stored as a 3-bit mask, so composition
//! is XOR and the group is `(Z/2)^3`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::index::MultiIndex;

const REVERSE: u8 = 0b001;
const COMPLEX: u8 = 0b010;
const GRADE: u8 = 0b100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConjugationId {
    Identity,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
}

impl ConjugationId {
    pub const ALL: [ConjugationId; 8] = [
        ConjugationId::Identity,
        ConjugationId::D1,
        ConjugationId::D2,
        ConjugationId::D3,
        ConjugationId::D4,
        ConjugationId::D5,
        ConjugationId::D6,
        ConjugationId::D7,
    ];

    fn mask(self) -> u8 {
        match self {
            ConjugationId::Identity => 0,
            ConjugationId::D1 => REVERSE,
            ConjugationId::D2 => COMPLEX,
            ConjugationId::D3 => GRADE,
            ConjugationId::D4 => REVERSE | COMPLEX,
            ConjugationId::D5 => COMPLEX | GRADE,
            ConjugationId::D6 => GRADE | REVERSE,
            ConjugationId::D7 => REVERSE | COMPLEX | GRADE,
        }
    }

    fn from_mask(mask: u8) -> Self {
        match mask & 0b111 {
            0 => ConjugationId::Identity,
            REVERSE => ConjugationId::D1,
            COMPLEX => ConjugationId::D2,
            GRADE => ConjugationId::D3,
            m if m == REVERSE | COMPLEX => ConjugationId::D4,
            m if m == COMPLEX | GRADE => ConjugationId::D5,
            m if m == GRADE | REVERSE => ConjugationId::D6,
            _ => ConjugationId::D7,
        }
    }

    /// Numeric label: 0 for the identity, `k` for `Dk`.
    pub fn number(self) -> u8 {
        ConjugationId::ALL.iter().position(|&c| c == self).unwrap() as u8
    }

    pub fn from_number(k: u8) -> Option<Self> {
        ConjugationId::ALL.get(k as usize).copied()
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(self, other: ConjugationId) -> ConjugationId {
        ConjugationId::from_mask(self.mask() ^ other.mask())
    }

    pub fn conjugates_coefficients(self) -> bool {
        self.mask() & COMPLEX != 0
    }

    /// True when the map reverses products: `(zw)† = w† z†`.
    pub fn is_antihomomorphism(self) -> bool {
        self.mask() & REVERSE != 0
    }

    /// Sign picked up by the basis monomial `i_α`.
    pub fn basis_sign(self, alpha: MultiIndex) -> f64 {
        let mask = self.mask();
        let len = alpha.len();
        let mut flips = 0;
        if mask & REVERSE != 0 {
            flips += len + alpha.reversal_count();
        }
        if mask & GRADE != 0 {
            flips += len;
        }
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for ConjugationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjugationId::Identity => write!(f, "I"),
            other => write!(f, "D{}", other.number()),
        }
    }
}

impl FromStr for ConjugationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches(['D', 'd']);
        if s.trim().eq_ignore_ascii_case("i") {
            return Ok(ConjugationId::Identity);
        }
        t.parse::<u8>()
            .ok()
            .and_then(ConjugationId::from_number)
            .ok_or_else(|| Error::Format(format!("unknown conjugation {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_matches_listed_definitions() {
        use ConjugationId::*;
        assert_eq!(D2.compose(D1), D4);
        assert_eq!(D3.compose(D2), D5);
        assert_eq!(D1.compose(D3), D6);
        assert_eq!(D3.compose(D2.compose(D1)), D7);
        for c in ConjugationId::ALL {
            assert_eq!(c.compose(c), Identity);
            assert_eq!(c.compose(Identity), c);
        }
    }

    #[test]
    fn basis_signs() {
        let i12 = MultiIndex::from_generators([1, 2]).unwrap();
        let i1 = MultiIndex::from_generators([1]).unwrap();
        assert_eq!(ConjugationId::D1.basis_sign(i12), -1.0);
        assert_eq!(ConjugationId::D1.basis_sign(i1), -1.0);
        assert_eq!(ConjugationId::D7.basis_sign(i1), 1.0);
        assert_eq!(ConjugationId::D7.basis_sign(i12), -1.0);
        assert_eq!(ConjugationId::D3.basis_sign(i12), 1.0);
    }

    #[test]
    fn parse_labels() {
        assert_eq!("7".parse::<ConjugationId>().unwrap(), ConjugationId::D7);
        assert_eq!("D3".parse::<ConjugationId>().unwrap(), ConjugationId::D3);
        assert_eq!("I".parse::<ConjugationId>().unwrap(), ConjugationId::Identity);
        assert!("9".parse::<ConjugationId>().is_err());
        assert_eq!(ConjugationId::D5.to_string(), "D5");
    }
}
