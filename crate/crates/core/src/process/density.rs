//! Spectral densities `m(u)` and their growth parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An even spectral density on the real line, described on `u ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralDensity {
    /// `m(u) = |u|^{1-2H}`, the fractional Brownian motion density.
    PowerLaw {
        #[serde(rename = "H")]
        h: f64,
    },
    /// `m ≡ 1` (Brownian motion).
    Constant,
    /// Piecewise-linear through `(u, m)` knots on `u ≥ 0`, held at the last value beyond.
    Tabulated { grid: Vec<(f64, f64)> },
}

/// Constants in `m(u) ≤ K|u|^{-b}` for `|u| ≤ 1` and `m(u) ≤ K|u|^{2N}` for `|u| > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub b: f64,
    #[serde(rename = "N")]
    pub n: u32,
}

impl SpectralDensity {
    pub fn power_law(h: f64) -> Result<Self> {
        let d = SpectralDensity::PowerLaw { h };
        d.validate()?;
        Ok(d)
    }

    pub fn tabulated(grid: Vec<(f64, f64)>) -> Result<Self> {
        let d = SpectralDensity::Tabulated { grid };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralDensity::PowerLaw { h } => {
                if !(*h > 0.0 && *h < 1.0) {
                    return Err(Error::InvalidDensity(format!("Hurst index must lie in (0, 1), got {h}")));
                }
            }
            SpectralDensity::Constant => {}
            SpectralDensity::Tabulated { grid } => {
                if grid.len() < 2 {
                    return Err(Error::InvalidDensity("tabulated density needs at least two knots".into()));
                }
                if grid[0].0 != 0.0 {
                    return Err(Error::InvalidDensity("tabulated density must start at u = 0".into()));
                }
                if !grid.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(Error::InvalidDensity("knots must be strictly increasing in u".into()));
                }
                if grid.iter().any(|&(u, m)| !u.is_finite() || !m.is_finite() || m < 0.0) {
                    return Err(Error::InvalidDensity("knot values must be finite and non-negative".into()));
                }
            }
        }
        Ok(())
    }

    /// `m(u)`; even in `u`.
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.abs();
        match self {
            SpectralDensity::PowerLaw { h } => u.powf(1.0 - 2.0 * h),
            SpectralDensity::Constant => 1.0,
            SpectralDensity::Tabulated { grid } => {
                let last = grid[grid.len() - 1];
                if u >= last.0 {
                    return last.1;
                }
                let k = grid.partition_point(|&(x, _)| x <= u);
                let (u0, m0) = grid[k - 1];
                let (u1, m1) = grid[k];
                m0 + (m1 - m0) * (u - u0) / (u1 - u0)
            }
        }
    }

    /// `sqrt(m(u))`.
    pub fn sqrt_eval(&self, u: f64) -> f64 {
        match self {
            SpectralDensity::PowerLaw { h } => u.abs().powf(0.5 - h),
            _ => self.eval(u).sqrt(),
        }
    }

    pub fn growth_params(&self) -> GrowthParams {
        match self {
            SpectralDensity::PowerLaw { h } => {
                GrowthParams { k: 1.0, b: (2.0 * h - 1.0).max(0.0), n: if *h >= 0.5 { 0 } else { 1 } }
            }
            SpectralDensity::Constant => GrowthParams { k: 1.0, b: 0.0, n: 0 },
            SpectralDensity::Tabulated { grid } => {
                GrowthParams { k: grid.iter().map(|&(_, m)| m).fold(0.0, f64::max), b: 0.0, n: 0 }
            }
        }
    }

    /// Beyond this point the density is exactly `c·u^κ`; returns `(start, c, κ)`.
    pub fn power_tail(&self) -> (f64, f64, f64) {
        match self {
            SpectralDensity::PowerLaw { h } => (0.0, 1.0, 1.0 - 2.0 * h),
            SpectralDensity::Constant => (0.0, 1.0, 0.0),
            SpectralDensity::Tabulated { grid } => {
                let last = grid[grid.len() - 1];
                (last.0, last.1, 0.0)
            }
        }
    }

    /// Hurst index of the matching fractional Brownian motion, if any.
    pub fn hurst(&self) -> Option<f64> {
        match self {
            SpectralDensity::PowerLaw { h } => Some(*h),
            SpectralDensity::Constant => Some(0.5),
            SpectralDensity::Tabulated { .. } => None,
        }
    }
}
