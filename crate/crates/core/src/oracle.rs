//! Slow, deliberately naive reference implementations.
//!
//! Nothing here reuses the main modules' arithmetic: signs come from an explicit
//! bubble sort and integrals from a fixed 5-point Gauss–Legendre rule, so the
//! tests that compare against these functions compare two independent routes.

use crate::error::{Error, Result};
use crate::index::{MultiIndex, SignedIndex};

/// A raw generator word such as `i3 i1 i2`, unsorted and possibly repeating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqIndex {
    pub gens: Vec<u32>,
}

impl SeqIndex {
    pub fn new(gens: impl Into<Vec<u32>>) -> Self {
        SeqIndex { gens: gens.into() }
    }
}

/// Sorts the word with adjacent swaps, each contributing a factor `-1`.
/// A repeated generator makes the product vanish.
pub fn naive_sign_sort(s: &SeqIndex) -> SignedIndex {
    let mut g = s.gens.clone();
    let mut swaps = 0usize;
    for i in 0..g.len() {
        for j in 0..g.len().saturating_sub(1 + i) {
            if g[j] > g[j + 1] {
                g.swap(j, j + 1);
                swaps += 1;
            }
        }
    }
    if g.windows(2).any(|w| w[0] == w[1]) {
        return SignedIndex::Zero;
    }
    let mut bits = 0u64;
    for &n in &g {
        if n == 0 || n > 64 {
            return SignedIndex::Zero;
        }
        bits |= 1u64 << (n - 1);
    }
    SignedIndex::Term { negative: swaps % 2 == 1, index: MultiIndex::from_bits(bits) }
}

/// Product of two basis monomials computed by concatenating their generator lists.
pub fn naive_product(alpha: &[u32], beta: &[u32]) -> SignedIndex {
    let mut word = alpha.to_vec();
    word.extend_from_slice(beta);
    naive_sign_sort(&SeqIndex { gens: word })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// `|Q_n - Q_{2n}|`
    pub error_estimate: f64,
}

const GL5_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn composite_gl5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> Result<f64> {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        let mut panel = 0.0;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            let u = mid + 0.5 * h * x;
            let v = f(u);
            if !v.is_finite() {
                return Err(Error::NonFinite(u));
            }
            panel += w * v;
        }
        total += 0.5 * h * panel;
    }
    Ok(total)
}

/// Composite 5-point Gauss–Legendre on `n` equal panels of `[a, b]`; the error
/// estimate compares against the same rule on `2n` panels (whose value is returned).
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<QuadratureResult> {
    let n = n.max(1);
    let coarse = composite_gl5(&f, a, b, n)?;
    let fine = composite_gl5(&f, a, b, 2 * n)?;
    Ok(QuadratureResult { value: fine, error_estimate: (fine - coarse).abs() })
}
