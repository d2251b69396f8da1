//! Operators on the Fock space spanned by the basis monomials.
//!
//! `M_f` is left multiplication, `M*_f` its adjoint under
//! `⟨z, w⟩ = Σ z_α conj(w_α)` (the left derivative), and `T_f = M_f + M*_f`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::element::GrassmannElement;
use crate::error::{Error, Result};
use crate::index::{swap_parity, MultiIndex};

/// Largest generator count accepted by [`operator_matrix`].
pub const MAX_MATRIX_GENERATORS: u32 = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorExpr {
    LeftMul(GrassmannElement),
    LeftDeriv(GrassmannElement),
    T(GrassmannElement),
}

impl OperatorExpr {
    pub fn apply(&self, g: &GrassmannElement) -> GrassmannElement {
        match self {
            OperatorExpr::LeftMul(f) => left_multiply(f, g),
            OperatorExpr::LeftDeriv(f) => left_derivative(f, g),
            OperatorExpr::T(f) => t_apply(f, g),
        }
    }
}

/// `M_f g = f g`.
pub fn left_multiply(f: &GrassmannElement, g: &GrassmannElement) -> GrassmannElement {
    f.multiply(g)
}

/// `M*_{i_α} i_β`: nonzero only for `α ⊆ β`, where it equals `(-1)^{σ(α, β∖α)} i_{β∖α}`.
#[inline]
pub fn basis_derivative(alpha: MultiIndex, beta: MultiIndex) -> Option<(bool, MultiIndex)> {
    if !alpha.is_subset_of(beta) {
        return None;
    }
    let rest = beta.difference(alpha);
    Some((swap_parity(alpha, rest), rest))
}

/// `M*_f g = Σ_α conj(f_α) M*_{i_α} g`.
pub fn left_derivative(f: &GrassmannElement, g: &GrassmannElement) -> GrassmannElement {
    let mut acc = Vec::new();
    for &(a, fa) in f.terms() {
        let fa = fa.conj();
        for &(b, gb) in g.terms() {
            if let Some((negative, rest)) = basis_derivative(a, b) {
                let c = fa * gb;
                acc.push((rest, if negative { -c } else { c }));
            }
        }
    }
    GrassmannElement::from_terms(acc)
}

/// Single-generator left derivative `M*_{i_n}`.
pub fn generator_derivative(n: u32, g: &GrassmannElement) -> Result<GrassmannElement> {
    let a = MultiIndex::generator(n)?;
    let terms = g
        .terms()
        .iter()
        .filter_map(|&(b, gb)| basis_derivative(a, b).map(|(neg, rest)| (rest, if neg { -gb } else { gb })));
    Ok(GrassmannElement::from_terms(terms))
}

/// `∫ di_α f = M*_{i_{a_t}} ⋯ M*_{i_{a_1}} f`: derivatives are applied in ascending
/// generator order, so the full product of the support picks out the top coefficient.
pub fn berezin_integral(alpha: MultiIndex, f: &GrassmannElement) -> GrassmannElement {
    alpha
        .generators()
        .fold(f.clone(), |acc, n| generator_derivative(n, &acc).expect("generator ids come from a valid index"))
}

/// `T_f g = f g + M*_f g`.
pub fn t_apply(f: &GrassmannElement, g: &GrassmannElement) -> GrassmannElement {
    &left_multiply(f, g) + &left_derivative(f, g)
}

/// Dense operator matrix in the basis `{i_α}` ordered by bit pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    /// row-major
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn conjugate_transpose(&self) -> OperatorMatrix {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        OperatorMatrix { dim: n, entries }
    }

    /// Row-major CSV, one matrix row per line, `re+imj` cells (17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            for c in 0..self.dim {
                if c > 0 {
                    out.push(',');
                }
                let z = self.get(r, c);
                let _ = write!(out, "{:.16e}{:+.16e}j", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

/// Matrix of `op` restricted to `Λ_n`; entry `(row, col)` is `⟨op i_col, i_row⟩`.
pub fn operator_matrix(op: &OperatorExpr, n: u32) -> Result<OperatorMatrix> {
    if n > MAX_MATRIX_GENERATORS {
        return Err(Error::DimensionTooLarge(n));
    }
    let dim = 1usize << n;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let basis = GrassmannElement::monomial(MultiIndex::from_bits(col as u64), Complex64::new(1.0, 0.0));
        for &(i, c) in op.apply(&basis).terms() {
            let row = i.bits() as usize;
            // images outside Λ_n are dropped (only possible when f itself is not in Λ_n)
            if row < dim {
                entries[row * dim + col] = c;
            }
        }
    }
    Ok(OperatorMatrix { dim, entries })
}
