//! Empirical envelopes for `|S_m ξ_n(t)|` and its Lipschitz quotients:
//!
//! ```text
//! |S_m ξ_n(t)|                  ≤ D1 n^{(N+1)/2} + D2
//! |S_m ξ_n(t) - S_m ξ_n(s)|     ≤ |t - s| (D3 n^{(N+2)/2} + D4)
//! ```
//!
//! with `n ≥ 1` the generator index (Hermite degree `n - 1`) and `N` taken from
//! the density's growth parameters.

use serde::Serialize;

use super::model::ProcessModel;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeBoundParams {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// Largest `sample - bound` over both envelopes; never positive.
    pub max_violation: f64,
    /// Log-log slope of `max_t |S_m ξ_n(t)|` against `n` over the upper half of the range.
    pub fitted_exponent: f64,
    /// `(N + 1)/2`, the exponent the value envelope allows.
    pub exponent_bound: f64,
    pub grid_points: usize,
    pub n_max: usize,
}

impl DerivativeBoundParams {
    pub fn exponent_consistent(&self) -> bool {
        self.fitted_exponent <= self.exponent_bound
    }
}

/// Least-squares `y ≈ a x + b` with `a, b ≥ 0`, then `b` raised until every point lies below.
fn envelope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx = x.iter().map(|v| v * v).sum::<f64>();
    let sxy = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let det = n * sxx - sx * sx;
    let (mut a, mut b) =
        if det.abs() > 0.0 { ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det) } else { (0.0, sy / n) };
    if a < 0.0 {
        a = 0.0;
        b = sy / n;
    }
    if b < 0.0 {
        b = 0.0;
        a = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
    }
    let worst = x.iter().zip(y).map(|(xi, yi)| yi - (a * xi + b)).fold(f64::NEG_INFINITY, f64::max);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > 0.0 {
        b += worst + 4.0 * f64::EPSILON * scale;
    }
    (a, b)
}

fn max_excess(x: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    x.iter().zip(y).map(|(xi, yi)| yi - (a * xi + b)).fold(f64::NEG_INFINITY, f64::max)
}

/// Default sampling grid: 81 equally spaced times on `[0, t_max]`.
pub fn default_bound_grid(model: &ProcessModel) -> Vec<f64> {
    let tm = model.t_max();
    (0..=80).map(|k| tm * k as f64 / 80.0).collect()
}

/// Samples `S_m ξ_n` on `grid` (ascending, at least two points) and fits both envelopes.
pub fn fit_bound_params(model: &ProcessModel, grid: &[f64]) -> Result<DerivativeBoundParams> {
    if grid.len() < 2 || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("bound grid needs at least two strictly increasing times".into()));
    }
    let n_max = model.n_max();
    let table = model.sm_coeffs_many(grid, n_max)?;
    let big_n = model.density().growth_params().n;
    let e_value = (big_n as f64 + 1.0) / 2.0;
    let e_lip = (big_n as f64 + 2.0) / 2.0;

    let mut peak = vec![0.0f64; n_max];
    let mut lip = vec![0.0f64; n_max];
    for (j, row) in table.iter().enumerate() {
        for n in 0..n_max {
            peak[n] = peak[n].max(row[n].abs());
            if j > 0 {
                let q = (row[n] - table[j - 1][n]).abs() / (grid[j] - grid[j - 1]);
                lip[n] = lip[n].max(q);
            }
        }
    }
    let index = |e: f64| -> Vec<f64> { (1..=n_max).map(|n| (n as f64).powf(e)).collect() };
    let (xv, xl) = (index(e_value), index(e_lip));
    let (d1, d2) = envelope(&xv, &peak);
    let (d3, d4) = envelope(&xl, &lip);
    let max_violation = max_excess(&xv, &peak, d1, d2).max(max_excess(&xl, &lip, d3, d4));

    let lo = (n_max / 2).max(1);
    let pts: Vec<(f64, f64)> =
        (lo..=n_max).filter(|&n| peak[n - 1] > 0.0).map(|n| ((n as f64).ln(), peak[n - 1].ln())).collect();
    let fitted_exponent = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    Ok(DerivativeBoundParams {
        d1,
        d2,
        d3,
        d4,
        n: big_n,
        max_violation,
        fitted_exponent,
        exponent_bound: e_value,
        grid_points: grid.len(),
        n_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::density::SpectralDensity;
    use crate::process::hermite::PI_POW_NEG_QUARTER;
    use crate::process::model::ModelConfig;

    fn fit(d: SpectralDensity, n_max: usize) -> DerivativeBoundParams {
        let m = ProcessModel::new(ModelConfig { nodes: 4096, ..ModelConfig::new(d).with_n_max(n_max) }).unwrap();
        fit_bound_params(&m, &default_bound_grid(&m)).unwrap()
    }

    #[test]
    fn constant_density_envelope() {
        let p = fit(SpectralDensity::Constant, 120);
        assert_eq!(p.n, 0);
        assert!(p.max_violation <= 0.0);
        assert!(p.d1.is_finite() && p.d2.is_finite() && p.d3.is_finite() && p.d4.is_finite());
        // n = 1 carries ξ_0, whose peak is π^{-1/4} at t = 0
        assert!(p.d1 + p.d2 >= PI_POW_NEG_QUARTER);
        assert!(p.exponent_consistent(), "{p:?}");
    }

    #[test]
    fn rough_power_law_exponent() {
        let p = fit(SpectralDensity::power_law(0.3).unwrap(), 120);
        assert_eq!(p.n, 1);
        assert_eq!(p.exponent_bound, 1.0);
        assert!(p.max_violation <= 0.0);
        assert!(p.exponent_consistent(), "{p:?}");
    }

    #[test]
    fn envelope_dominates() {
        let x: Vec<f64> = (1..=10).map(|n| n as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 1.7).sin().abs() + 0.1 * v).collect();
        let (a, b) = envelope(&x, &y);
        assert!(a >= 0.0 && b >= 0.0);
        assert!(max_excess(&x, &y, a, b) <= 0.0);
        assert!(fit_bound_params(
            &ProcessModel::new(ModelConfig {
                nodes: 1024,
                ..ModelConfig::new(SpectralDensity::Constant).with_n_max(4)
            })
            .unwrap(),
            &[1.0]
        )
        .is_err());
    }
}
