//! Covariance of the process: the Hermite series `Σ_n f_n(t) f_n(s)`, a direct
//! quadrature of the spectral kernel, and the fractional Brownian closed form.

use std::fmt::Write as _;

use serde::Serialize;

use super::density::SpectralDensity;
use super::model::ProcessModel;
use super::quadrature::{adaptive_gk15, gk15};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Below this magnitude the oracle value is treated as zero and errors are absolute.
pub const RELATIVE_FLOOR: f64 = 1e-14;
/// Start of the analytic tail in [`covariance_oracle`].
const TAIL_START: f64 = 1000.0;

/// `Σ_{n < n_max} f_n(t) f_n(s)`.
pub fn covariance_series(model: &ProcessModel, t: f64, s: f64) -> Result<f64> {
    let f = model.f_coeffs_many(&[t, s], model.n_max())?;
    Ok(dot(&f[0], &f[1]))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(1/2π) ∫_ℝ (e^{iut} - 1)(e^{-ius} - 1) u^{-2} m(u) du`.
///
/// The imaginary part is odd in `u` and cancels identically; the real part is
/// `(1/π) ∫_0^∞ [2sin²(ut/2) + 2sin²(us/2) - 2sin²(u(t-s)/2)] m(u) u^{-2} du`,
/// integrated adaptively on `[0, 1]`, on unit panels up to `u = 1000`, and
/// analytically beyond, where `m` is a pure power.
pub fn covariance_oracle(density: &SpectralDensity, t: f64, s: f64) -> Result<f64> {
    density.validate()?;
    if !(t.is_finite() && s.is_finite()) {
        return Err(Error::IntegralDiverges(format!("non-finite time ({t}, {s})")));
    }
    if t == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let (tail_from, c, kappa) = density.power_tail();
    // m(u)/u² must be integrable at infinity
    if kappa >= 1.0 {
        return Err(Error::IntegralDiverges(format!("m(u) grows like u^{kappa} at infinity")));
    }
    let d = t - s;
    let integrand = |u: f64| {
        let a = (0.5 * u * t).sin();
        let b = (0.5 * u * s).sin();
        let e = (0.5 * u * d).sin();
        2.0 * (a * a + b * b - e * e) * density.eval(u) / (u * u)
    };
    let mut total = adaptive_gk15(&integrand, 0.0, 1.0, 1e-15, 60)?;
    let upper = TAIL_START.max(tail_from.ceil());
    let mut k = 1.0;
    while k < upper {
        let (v, e) = gk15(&integrand, k, k + 1.0);
        total += if e < 1e-15 { v } else { adaptive_gk15(&integrand, k, k + 1.0, 1e-15, 30)? };
        k += 1.0;
    }
    total += c * power_tail(upper, kappa, t, s);
    let value = total / std::f64::consts::PI;
    if !value.is_finite() {
        return Err(Error::IntegralDiverges(format!("kernel quadrature is non-finite at ({t}, {s})")));
    }
    Ok(value)
}

/// `∫_U^∞ (1 - cos ut - cos us + cos u(t-s)) u^{κ-2} du` for `κ < 1`.
fn power_tail(upper: f64, kappa: f64, t: f64, s: f64) -> f64 {
    let mu = 2.0 - kappa;
    // ∫_U^∞ u^{-μ} du
    let flat = upper.powf(1.0 - mu) / (mu - 1.0);
    // ∫_U^∞ cos(au) u^{-μ} du by three integrations by parts
    let oscillating = |a: f64| -> f64 {
        let a = a.abs();
        if a == 0.0 {
            return flat;
        }
        let (sn, cs) = (a * upper).sin_cos();
        -sn * upper.powf(-mu) / a
            + mu * cs * upper.powf(-mu - 1.0) / (a * a)
            + mu * (mu + 1.0) * sn * upper.powf(-mu - 2.0) / (a * a * a)
    };
    flat - oscillating(t) - oscillating(s) + oscillating(t - s)
}

/// `γ_H = cos(πH) Γ(2 - 2H) / ((1 - 2H) H)`, continued by `γ_{1/2} = π`.
pub fn gamma_h(h: f64) -> f64 {
    if (h - 0.5).abs() < 1e-9 {
        return std::f64::consts::PI;
    }
    (std::f64::consts::PI * h).cos() * libm::tgamma(2.0 - 2.0 * h) / ((1.0 - 2.0 * h) * h)
}

/// `γ_H (|t|^{2H} + |s|^{2H} - |t - s|^{2H})`.
pub fn fbm_closed_form(t: f64, s: f64, h: f64) -> f64 {
    let e = 2.0 * h;
    gamma_h(h) * (t.abs().powf(e) + s.abs().powf(e) - (t - s).abs().powf(e))
}

/// `|a - b| / |b|`, or `|a - b|` when `b` is essentially zero.
pub fn relative_error(value: f64, reference: f64) -> f64 {
    let diff = (value - reference).abs();
    if reference.abs() < RELATIVE_FLOOR {
        diff
    } else {
        diff / reference.abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceRow {
    pub t: f64,
    pub s: f64,
    pub k_series: f64,
    pub k_oracle: f64,
    /// `None` for densities without a closed form.
    pub k_closed_form: Option<f64>,
    pub rel_err: f64,
}

impl CovarianceRow {
    /// `K_oracle / K_closed_form`.
    pub fn scale(&self) -> Option<f64> {
        match self.k_closed_form {
            Some(c) if c.abs() > RELATIVE_FLOOR => Some(self.k_oracle / c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceGrid {
    pub rows: Vec<CovarianceRow>,
}

impl CovarianceGrid {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_err).fold(0.0, f64::max)
    }

    pub fn max_abs_err(&self) -> f64 {
        self.rows.iter().map(|r| (r.k_series - r.k_oracle).abs()).fold(0.0, f64::max)
    }

    /// Mean oracle/closed-form ratio and its largest relative spread.
    pub fn fitted_scale(&self) -> Option<(f64, f64)> {
        let scales: Vec<f64> = self.rows.iter().filter_map(CovarianceRow::scale).collect();
        if scales.is_empty() {
            return None;
        }
        let mean = scales.iter().sum::<f64>() / scales.len() as f64;
        let spread = scales.iter().map(|s| ((s - mean) / mean).abs()).fold(0.0, f64::max);
        Some((mean, spread))
    }

    /// `t,s,K_series,K_oracle,K_closed_form,rel_err` with 17 significant digits,
    /// followed by a `max` summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,s,K_series,K_oracle,K_closed_form,rel_err\n");
        let num = |x: f64| format!("{x:.16e}");
        for r in &self.rows {
            let closed = r.k_closed_form.map(num).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                num(r.t),
                num(r.s),
                num(r.k_series),
                num(r.k_oracle),
                closed,
                num(r.rel_err)
            );
        }
        let _ = writeln!(out, "max,,,,,{}", num(self.max_rel_err()));
        out
    }
}

/// Series, oracle and closed form on every `(t, s)` pair of the two grids.
pub fn covariance_grid(model: &ProcessModel, ts: &[f64], ss: &[f64]) -> Result<CovarianceGrid> {
    let mut times: Vec<f64> = ts.iter().chain(ss).copied().collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let coeffs = model.f_coeffs_many(&times, model.n_max())?;
    let lookup = |x: f64| &coeffs[times.binary_search_by(|p| p.total_cmp(&x)).expect("time is in the merged grid")];
    let pairs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| ss.iter().map(move |&s| (t, s))).collect();
    let density = model.density();
    let hurst = density.hurst();
    let exec: Execution = model.execution();
    let rows = exec.map_slice(&pairs, |&(t, s)| -> Result<CovarianceRow> {
        let k_series = dot(lookup(t), lookup(s));
        let k_oracle = covariance_oracle(density, t, s)?;
        Ok(CovarianceRow {
            t,
            s,
            k_series,
            k_oracle,
            k_closed_form: hurst.map(|h| fbm_closed_form(t, s, h)),
            rel_err: relative_error(k_series, k_oracle),
        })
    });
    Ok(CovarianceGrid { rows: rows.into_iter().collect::<Result<_>>()? })
}
