//! Weighted norms `‖·‖_{H_{-p}}` and the algebra estimates built on them.
//!
//! Weights are `c_α = exp(Σ_{a∈α} φ(a))` with `φ(0) = 0` and `φ` increasing, so
//! `c_∅ = 1` and `c_α c_β = c_{α∪β}` for disjoint indices. The norm carries a
//! square root: `‖f‖_{H_{-p}} = (Σ |f_α|² c_α^{-2p})^{1/2}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::element::{GrassmannElement, DEFAULT_INVERT_EPSILON};
use crate::error::{Error, Result};
use crate::index::{MultiIndex, MAX_GENERATORS};

/// Default cap on power-series terms.
pub const DEFAULT_SERIES_CAP: usize = 64;
/// Increment size (in `H_{-p-2}`) below which a power series is considered settled.
pub const SERIES_TOLERANCE: f64 = 1e-12;
/// Relative slack used by the inequality checks.
pub const RELATIVE_SLACK: f64 = 1e-9;

/// The growth function `φ` on generator ids.
#[derive(Clone, Debug, PartialEq)]
pub enum Phi {
    /// `φ(n) = λ n`.
    Linear { lambda: f64 },
    /// `φ(n) = values[n - 1]`, extended linearly past the table with the last slope.
    Table(Arc<Vec<f64>>),
}

impl Phi {
    pub fn eval(&self, n: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            Phi::Linear { lambda } => lambda * n as f64,
            Phi::Table(v) => {
                let k = n as usize;
                if k <= v.len() {
                    v[k - 1]
                } else {
                    let last = v[v.len() - 1];
                    let prev = if v.len() >= 2 { v[v.len() - 2] } else { 0.0 };
                    last + (last - prev) * (k - v.len()) as f64
                }
            }
        }
    }
}

/// Configuration block `{"phi":"linear","lambda":1.0,"G_max":64}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    #[serde(default = "default_phi")]
    pub phi: String,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(rename = "G_max", default = "default_gmax")]
    pub g_max: u32,
    /// Only for `"phi":"table"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn default_phi() -> String {
    "linear".into()
}
fn default_lambda() -> f64 {
    1.0
}
fn default_gmax() -> u32 {
    MAX_GENERATORS
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig { phi: default_phi(), lambda: default_lambda(), g_max: default_gmax(), values: None }
    }
}

#[derive(Clone, PartialEq)]
pub struct WeightSystem {
    phi: Phi,
    /// `inf_n φ(n)/n` over the generator budget.
    xi: f64,
    g_max: u32,
    /// `φ(1..=g_max)`, cached.
    phi_values: Vec<f64>,
}

impl fmt::Debug for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSystem")
            .field("phi", &self.phi)
            .field("xi", &self.xi)
            .field("g_max", &self.g_max)
            .finish()
    }
}

impl Default for WeightSystem {
    fn default() -> Self {
        WeightSystem::linear(1.0, MAX_GENERATORS).unwrap()
    }
}

impl WeightSystem {
    pub fn new(phi: Phi, g_max: u32) -> Result<Self> {
        if g_max == 0 || g_max > MAX_GENERATORS {
            return Err(Error::InvalidWeights(format!("G_max must be in 1..=64, got {g_max}")));
        }
        let phi_values: Vec<f64> = (1..=g_max).map(|n| phi.eval(n)).collect();
        let mut prev = 0.0;
        for (k, &v) in phi_values.iter().enumerate() {
            if !v.is_finite() || v <= prev {
                return Err(Error::InvalidWeights(format!(
                    "phi must be strictly increasing from phi(0) = 0; phi({}) = {v}",
                    k + 1
                )));
            }
            prev = v;
        }
        let xi = phi_values.iter().enumerate().map(|(k, v)| v / (k + 1) as f64).fold(f64::INFINITY, f64::min);
        Ok(WeightSystem { phi, xi, g_max, phi_values })
    }

    pub fn linear(lambda: f64, g_max: u32) -> Result<Self> {
        Self::new(Phi::Linear { lambda }, g_max)
    }

    pub fn from_config(cfg: &WeightConfig) -> Result<Self> {
        match cfg.phi.as_str() {
            "linear" => Self::linear(cfg.lambda, cfg.g_max),
            "table" => {
                let v = cfg.values.clone().ok_or_else(|| Error::InvalidWeights("table phi needs \"values\"".into()))?;
                if v.is_empty() {
                    return Err(Error::InvalidWeights("empty phi table".into()));
                }
                Self::new(Phi::Table(Arc::new(v)), cfg.g_max)
            }
            other => Err(Error::InvalidWeights(format!("unknown phi {other:?}"))),
        }
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    /// Growth rate `ξ` with `φ(n) >= ξ n` on the generator budget.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    /// `Σ_{a∈α} φ(a)`, i.e. `ln c_α`.
    pub fn log_weight(&self, alpha: MultiIndex) -> f64 {
        alpha
            .generators()
            .map(|n| if n <= self.g_max { self.phi_values[n as usize - 1] } else { self.phi.eval(n) })
            .sum()
    }

    pub fn weight(&self, alpha: MultiIndex) -> f64 {
        self.log_weight(alpha).exp()
    }

    /// `ln(2) / (2d)`: the growth rate `ξ` must exceed this for the order-`d` weight sum to converge.
    pub fn growth_threshold(d: u32) -> f64 {
        std::f64::consts::LN_2 / (2.0 * d as f64)
    }

    pub fn check_growth(&self, d: u32) -> Result<()> {
        let threshold = Self::growth_threshold(d);
        if d == 0 || self.xi <= threshold {
            return Err(Error::BoundDiverges { xi: self.xi, d, threshold });
        }
        Ok(())
    }

    /// `Σ_{α ⊆ {1..G}} c_α^{-2d} = Π_{n=1}^{G} (1 + e^{-2d φ(n)})`.
    pub fn weight_sum(&self, d: u32, generators: u32) -> f64 {
        (1..=generators.min(self.g_max))
            .map(|n| 1.0 + (-2.0 * d as f64 * self.phi_values[n as usize - 1]).exp())
            .product()
    }
}

/// `‖f‖_{H_{-p}} = (Σ |f_α|² c_α^{-2p})^{1/2}`; negative `p` gives the `H_{|p|}` norm.
pub fn weighted_norm(f: &GrassmannElement, p: i32, w: &WeightSystem) -> f64 {
    if p == 0 {
        return f.p_norm(2);
    }
    f.terms().iter().map(|&(i, c)| c.norm_sqr() * (-2.0 * p as f64 * w.log_weight(i)).exp()).sum::<f64>().sqrt()
}

/// Norms along `p_sequence`; for `c_α > 1` off the body they decrease towards `|f_0|`.
pub fn norm_limit_check(f: &GrassmannElement, w: &WeightSystem, p_sequence: &[i32]) -> Vec<f64> {
    p_sequence.iter().map(|&p| weighted_norm(f, p, w)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    /// Exact weight sum over the generator budget.
    Truncated,
    /// Geometric tail bound `1 + 1/(e^{2dξ} - 2)`, valid for every generator count.
    TailBounded,
}

/// Våge constant `C_d = (Σ_α c_α^{-2d})^{1/2}`.
pub fn vage_constant(d: u32, w: &WeightSystem, mode: ConstantMode) -> Result<f64> {
    w.check_growth(d)?;
    let sum = match mode {
        ConstantMode::Truncated => w.weight_sum(d, w.g_max()),
        ConstantMode::TailBounded => tail_bound(d, w.xi()),
    };
    Ok(sum.sqrt())
}

/// `1 + 1/(e^{2dξ} - 2)`; infinite when `e^{2dξ} <= 2`.
pub fn tail_bound(d: u32, xi: f64) -> f64 {
    let q = (2.0 * d as f64 * xi).exp();
    if q <= 2.0 {
        f64::INFINITY
    } else {
        1.0 + 1.0 / (q - 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VageReport {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub holds: bool,
}

impl VageReport {
    fn new(lhs: f64, constant: f64, a: f64, b: f64) -> Self {
        let rhs = constant * a * b;
        VageReport { lhs, rhs, constant, holds: lhs <= rhs + RELATIVE_SLACK * rhs }
    }

    /// `rhs - lhs` relative to `rhs` (negative on violation).
    pub fn margin(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            (self.rhs - self.lhs) / self.rhs
        }
    }
}

fn check_orders(p: i32, q: i32) -> Result<u32> {
    if p <= q {
        return Err(Error::InvalidOrder { p, q });
    }
    Ok((p - q) as u32)
}

/// `‖fg‖_{-p} <= C_{p-q} ‖f‖_{-q} ‖g‖_{-p}` with the truncated constant.
pub fn check_vage(f: &GrassmannElement, g: &GrassmannElement, p: i32, q: i32, w: &WeightSystem) -> Result<VageReport> {
    let d = check_orders(p, q)?;
    let c = vage_constant(d, w, ConstantMode::Truncated)?;
    let lhs = weighted_norm(&f.multiply(g), p, w);
    Ok(VageReport::new(lhs, c, weighted_norm(f, q, w), weighted_norm(g, p, w)))
}

/// Swapped variant: `‖fg‖_{-p} <= C_{p-q} ‖f‖_{-p} ‖g‖_{-q}`.
pub fn check_vage_swapped(
    f: &GrassmannElement,
    g: &GrassmannElement,
    p: i32,
    q: i32,
    w: &WeightSystem,
) -> Result<VageReport> {
    let d = check_orders(p, q)?;
    let c = vage_constant(d, w, ConstantMode::Truncated)?;
    let lhs = weighted_norm(&f.multiply(g), p, w);
    Ok(VageReport::new(lhs, c, weighted_norm(f, p, w), weighted_norm(g, q, w)))
}

/// A power series `F(λ) = Σ a_n λ^n` with radius of convergence `radius`.
#[derive(Clone)]
pub struct PowerSeries {
    coeff: Arc<dyn Fn(usize) -> Complex64 + Send + Sync>,
    radius: f64,
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeries").field("radius", &self.radius).finish_non_exhaustive()
    }
}

impl PowerSeries {
    pub fn new<F: Fn(usize) -> Complex64 + Send + Sync + 'static>(coeff: F, radius: f64) -> Self {
        PowerSeries { coeff: Arc::new(coeff), radius }
    }

    /// Finite coefficient list (a polynomial, infinite radius).
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(move |n| coeffs.get(n).copied().unwrap_or_default(), f64::INFINITY)
    }

    /// `Σ λ^n`, radius 1.
    pub fn geometric() -> Self {
        Self::new(|_| Complex64::new(1.0, 0.0), 1.0)
    }

    /// `Σ λ^n / n!`, infinite radius.
    pub fn exp() -> Self {
        Self::new(|n| Complex64::new((1..=n).fold(1.0, |acc, k| acc / k as f64), 0.0), f64::INFINITY)
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        (self.coeff)(n)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Evaluates `F(f)` in `H_{-p-2}`.
///
/// Requires `|f_0| < R / C_2`. Summation stops when the power `f^n` vanishes
/// (nilpotent soul, zero body) or when two consecutive increments fall below
/// [`SERIES_TOLERANCE`] in the `H_{-p-2}` norm.
pub fn power_series_eval(
    series: &PowerSeries,
    f: &GrassmannElement,
    p: i32,
    w: &WeightSystem,
) -> Result<GrassmannElement> {
    power_series_eval_capped(series, f, p, w, DEFAULT_SERIES_CAP)
}

pub fn power_series_eval_capped(
    series: &PowerSeries,
    f: &GrassmannElement,
    p: i32,
    w: &WeightSystem,
    cap: usize,
) -> Result<GrassmannElement> {
    let c2 = vage_constant(2, w, ConstantMode::Truncated)?;
    let limit = series.radius() / c2;
    let body_abs = f.body().norm();
    if !(body_abs < limit) {
        return Err(Error::ConvergencePreconditionFailed { body_abs, limit });
    }
    let mut sum = GrassmannElement::scalar(series.coeff(0));
    let mut power = GrassmannElement::one();
    let mut small_run = 0;
    for n in 1..=cap {
        power = power.multiply(f);
        if power.is_zero() {
            return Ok(sum);
        }
        let increment = power.scale(series.coeff(n));
        sum = sum + &increment;
        if weighted_norm(&increment, p + 2, w) < SERIES_TOLERANCE {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::CapExceeded { cap })
}

/// Inverse in the distribution algebra: scale the body to 1, then sum the
/// geometric series `Σ (1 - f/f_0)^n`.
pub fn invert_distribution(f: &GrassmannElement, p: i32, w: &WeightSystem) -> Result<GrassmannElement> {
    let body = f.body();
    if body.norm() <= DEFAULT_INVERT_EPSILON {
        return Err(Error::NotInvertible { body_abs: body.norm(), epsilon: DEFAULT_INVERT_EPSILON });
    }
    let normalized = f.scale(body.inv());
    let one = Complex64::new(1.0, 0.0);
    let shifted = GrassmannElement::linear_combine(one, &GrassmannElement::one(), -one, &normalized);
    let g = power_series_eval(&PowerSeries::geometric(), &shifted, p, w)?;
    Ok(g.scale(body.inv()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mono(g: &[u32], x: f64) -> GrassmannElement {
        GrassmannElement::monomial(MultiIndex::from_generators(g.iter().copied()).unwrap(), c(x))
    }

    #[test]
    fn norm_examples() {
        let w = WeightSystem::default();
        let a = MultiIndex::from_generators([2, 5]).unwrap();
        let ia = GrassmannElement::monomial(a, c(1.0));
        for p in [-2, -1, 0, 1, 3] {
            assert_relative_eq!(weighted_norm(&ia, p, &w), w.weight(a).powi(-p), max_relative = 1e-14);
        }
        let f = &mono(&[], 3.0) + &mono(&[1], 4.0);
        assert_eq!(weighted_norm(&f, 0, &w), 5.0);
        assert_relative_eq!(weighted_norm(&f, 1, &w), (9.0 + 16.0 * (-2.0f64).exp()).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(weighted_norm(&f, 1, &w), 3.341461436525312, max_relative = 1e-14);
    }

    #[test]
    fn weights_are_multiplicative() {
        let w = WeightSystem::linear(0.7, 64).unwrap();
        let a = MultiIndex::from_generators([1, 4]).unwrap();
        let b = MultiIndex::from_generators([2, 64]).unwrap();
        assert_relative_eq!(w.weight(a) * w.weight(b), w.weight(a.union(b)), max_relative = 1e-14);
        assert_eq!(w.weight(MultiIndex::EMPTY), 1.0);
    }

    #[test]
    fn limit_examples() {
        let w = WeightSystem::default();
        let ps = [1, 2, 4, 8, 16, 32, 64];
        let f = &mono(&[], 5.0) + &mono(&[1], 1.0);
        let v = norm_limit_check(&f, &w, &ps);
        assert!((v.last().unwrap() - 5.0).abs() < 1e-12);
        let soul = &mono(&[1], 1.0) + &mono(&[2, 3], -2.0);
        assert!(*norm_limit_check(&soul, &w, &ps).last().unwrap() < 1e-20);

        let f = &mono(&[], 2.0) + &mono(&[1, 2], 3.0);
        let v = norm_limit_check(&f, &w, &[1, 2, 4, 8]);
        let expect: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|p| (4.0 + 9.0 * (-6.0 * p).exp()).sqrt()).collect();
        for (a, b) in v.iter().zip(&expect) {
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
        assert!(v.windows(2).all(|x| x[1] < x[0]));
        assert!((v[3] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_examples() {
        // e^{2dξ} = 3
        let d = 1;
        let xi = 3f64.ln() / 2.0;
        let w = WeightSystem::linear(xi, 64).unwrap();
        assert_relative_eq!(
            vage_constant(d, &w, ConstantMode::TailBounded).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-14
        );

        let w = WeightSystem::linear(1.0, 10).unwrap();
        let brute: f64 = (1..=10).map(|n| 1.0 + (-2.0 * n as f64).exp()).product();
        let c = vage_constant(1, &w, ConstantMode::Truncated).unwrap();
        assert_relative_eq!(c, brute.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(c, 1.0767753281576316, max_relative = 1e-14);
        assert!(c <= vage_constant(1, &w, ConstantMode::TailBounded).unwrap());

        let w = WeightSystem::linear(std::f64::consts::LN_2 / 2.0, 64).unwrap();
        assert!(matches!(vage_constant(1, &w, ConstantMode::Truncated), Err(Error::BoundDiverges { .. })));
        assert!(matches!(vage_constant(1, &w, ConstantMode::TailBounded), Err(Error::BoundDiverges { .. })));
        assert!(vage_constant(2, &w, ConstantMode::Truncated).is_ok());
    }

    #[test]
    fn vage_examples() {
        let w = WeightSystem::default();
        let g = &mono(&[], 0.3) + &mono(&[2, 3], -1.5);
        let r = check_vage(&GrassmannElement::one(), &g, 2, 1, &w).unwrap();
        assert_relative_eq!(r.lhs, weighted_norm(&g, 2, &w), max_relative = 1e-15);
        assert!(r.holds && r.constant >= 1.0);
        let i1 = mono(&[1], 1.0);
        let r = check_vage(&i1, &i1, 1, 0, &w).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
        assert!(matches!(check_vage(&i1, &i1, 1, 1, &w), Err(Error::InvalidOrder { p: 1, q: 1 })));
        assert!(check_vage_swapped(&i1, &g, 0, 1, &w).is_err());
    }

    #[test]
    fn series_examples() {
        let w = WeightSystem::default();
        let z = &mono(&[], 1.0) + &mono(&[1, 2], 0.1);
        let f = &GrassmannElement::one() - &z;
        let inv = power_series_eval(&PowerSeries::geometric(), &f, 0, &w).unwrap();
        assert!(inv.max_abs_diff(&(&mono(&[], 1.0) + &mono(&[1, 2], -0.1))) < 1e-15);

        let e0 = power_series_eval(&PowerSeries::exp(), &GrassmannElement::zero(), 0, &w).unwrap();
        assert_eq!(e0, GrassmannElement::one());
        let e = power_series_eval(&PowerSeries::exp(), &mono(&[1, 2], 1.0), 0, &w).unwrap();
        assert_eq!(e, &mono(&[], 1.0) + &mono(&[1, 2], 1.0));

        // exp(0.5 + i1): e^{0.5} (1 + i1)
        let f = &mono(&[], 0.5) + &mono(&[1], 1.0);
        let e = power_series_eval(&PowerSeries::exp(), &f, 1, &w).unwrap();
        let expect = (&mono(&[], 1.0) + &mono(&[1], 1.0)).scale(c(0.5f64.exp()));
        assert!(e.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn series_errors() {
        let w = WeightSystem::default();
        let f = &mono(&[], 0.995) + &mono(&[1], 1.0);
        assert!(matches!(
            power_series_eval(&PowerSeries::geometric(), &f, 0, &w),
            Err(Error::ConvergencePreconditionFailed { .. })
        ));
        let f = mono(&[], 0.5);
        assert!(matches!(
            power_series_eval_capped(&PowerSeries::geometric(), &f, 0, &w, 5),
            Err(Error::CapExceeded { cap: 5 })
        ));
    }

    #[test]
    fn distribution_inverse_examples() {
        let w = WeightSystem::default();
        let f = &mono(&[], 1.0) + &mono(&[1], 1.0);
        assert_eq!(invert_distribution(&f, 0, &w).unwrap(), &mono(&[], 1.0) - &mono(&[1], 1.0));
        let f = &mono(&[], 2.0) + &mono(&[1, 2], 1.0);
        let g = invert_distribution(&f, 1, &w).unwrap();
        assert!(g.max_abs_diff(&f.invert().unwrap()) < 1e-15);
        assert!((&g - &(&mono(&[], 0.5) + &mono(&[1, 2], -0.25))).p_norm(2) < 1e-10);
        assert!(matches!(invert_distribution(&mono(&[3], 1.0), 0, &w), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn config_parsing() {
        let cfg: WeightConfig = serde_json::from_str(r#"{"phi":"linear","lambda":1.0,"G_max":64}"#).unwrap();
        assert_eq!(WeightSystem::from_config(&cfg).unwrap(), WeightSystem::default());
        let cfg: WeightConfig = serde_json::from_str(r#"{"phi":"table","values":[1.0,3.0,4.0],"G_max":8}"#).unwrap();
        let w = WeightSystem::from_config(&cfg).unwrap();
        assert_eq!(w.phi().eval(5), 6.0);
        assert_eq!(w.xi(), 1.0);
        let bad: WeightConfig = serde_json::from_str(r#"{"phi":"table","values":[1.0,0.5],"G_max":4}"#).unwrap();
        assert!(WeightSystem::from_config(&bad).is_err());
        assert!(WeightSystem::linear(-1.0, 8).is_err());
        assert!(WeightSystem::linear(1.0, 65).is_err());
    }
}
