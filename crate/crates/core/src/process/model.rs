//! `S_m` on Hermite functions, the coefficient functions `f_n(t)`, and the
//! operator-valued process `X_m(t) = T_{f_m(t)}` with derivative `W_m(t)`.
//!
//! With the transform convention `f̂(u) = ∫ f(x) e^{-iux} dx`, `ξ̂_n = sqrt(2π)(-i)^n ξ_n`,
//! so by parity
//!
//! ```text
//! S_m ξ_n(x) = sqrt(2/π) s_n ∫_0^∞ sqrt(m(u)) ξ_n(u) {cos(ux) | sin(ux)} du
//! f_n(t)     = sqrt(2/π) s_n ∫_0^∞ sqrt(m(u)) ξ_n(u) {sin(ut)/u | (1 - cos(ut))/u} du
//! ```
//!
//! (cosine branch for even `n`, sine branch for odd `n`, `s_n = (-1)^{⌊n/2⌋}`).
//! Coefficient `n` of a vector returned here is attached to generator `i_{n+1}`.

use serde::{Deserialize, Serialize};

use super::density::SpectralDensity;
use super::hermite::{hermite_table, HermiteSweep};
use super::quadrature::SpectralMesh;
use crate::element::GrassmannElement;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::t_apply;
use crate::index::{MultiIndex, MAX_GENERATORS};

pub const DEFAULT_N_MAX: usize = 400;
pub const DEFAULT_HALF_WIDTH: f64 = 40.0;
pub const DEFAULT_NODES: usize = 1 << 14;
pub const DEFAULT_T_MAX: f64 = 4.0;
/// Allowed deviation of the `m ≡ 1` self-test from `ξ_n`.
pub const SELF_TEST_TOLERANCE: f64 = 1e-6;
/// Margin kept between the largest Hermite turning point and the end of the mesh.
const TURNING_POINT_MARGIN: f64 = 10.0;
const NODE_CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub density: SpectralDensity,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Half-width of the frequency window.
    #[serde(rename = "U", default = "default_half_width")]
    pub half_width: f64,
    /// Number of frequency nodes.
    #[serde(rename = "M", default = "default_nodes")]
    pub nodes: usize,
    /// Largest admissible `|t|`.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}
fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH
}
fn default_nodes() -> usize {
    DEFAULT_NODES
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}

impl ModelConfig {
    pub fn new(density: SpectralDensity) -> Self {
        ModelConfig {
            density,
            n_max: DEFAULT_N_MAX,
            half_width: DEFAULT_HALF_WIDTH,
            nodes: DEFAULT_NODES,
            t_max: DEFAULT_T_MAX,
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// Which trigonometric kernel multiplies `sqrt(m(u)) ξ_n(u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    /// `cos(ux)`, `sin(ux)`: values of `S_m ξ_n`.
    Value,
    /// `sin(ut)/u`, `(1 - cos ut)/u`: integrals `∫_0^t S_m ξ_n`.
    Primitive,
}

#[derive(Clone, Debug)]
pub struct ProcessModel {
    config: ModelConfig,
    upper: f64,
    mesh: SpectralMesh,
    /// `sqrt(2/π) · w_k · sqrt(m(u_k))`
    weighted: Vec<f64>,
    exec: Execution,
}

impl ProcessModel {
    pub fn new(config: ModelConfig) -> Result<Self> {
        Self::with_execution(config, Execution::default())
    }

    /// Builds the frequency mesh and runs the `m ≡ 1` self-test on it.
    pub fn with_execution(config: ModelConfig, exec: Execution) -> Result<Self> {
        config.density.validate()?;
        if config.n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be positive".into()));
        }
        if !(config.t_max.is_finite() && config.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max must be positive, got {}", config.t_max)));
        }
        // ξ_n lives inside |u| < sqrt(2n + 1); keep the mesh well past the last turning point
        let turning = (2.0 * config.n_max as f64 + 1.0).sqrt();
        let upper = config.half_width.max(turning + TURNING_POINT_MARGIN);
        let mesh = SpectralMesh::new(upper, config.nodes)?;
        let scale = (2.0 / std::f64::consts::PI).sqrt();
        let weighted =
            mesh.nodes.iter().zip(&mesh.weights).map(|(&u, &w)| scale * w * config.density.sqrt_eval(u)).collect();
        let model = ProcessModel { config, upper, mesh, weighted, exec };
        let deviation = model.self_test()?;
        if !(deviation <= SELF_TEST_TOLERANCE) {
            return Err(Error::QuadratureUnderResolved { deviation, tolerance: SELF_TEST_TOLERANCE });
        }
        Ok(model)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn density(&self) -> &SpectralDensity {
        &self.config.density
    }

    pub fn n_max(&self) -> usize {
        self.config.n_max
    }

    pub fn t_max(&self) -> f64 {
        self.config.t_max
    }

    /// Frequency window actually used (the configured `U`, widened if needed).
    pub fn half_width(&self) -> f64 {
        self.upper
    }

    pub fn node_count(&self) -> usize {
        self.mesh.len()
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn set_execution(&mut self, exec: Execution) {
        self.exec = exec;
    }

    /// Generators available to the operator side: `i_1 … i_L`, `L = min(n_max, 64)`.
    pub fn operator_generators(&self) -> u32 {
        self.config.n_max.min(MAX_GENERATORS as usize) as u32
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t.abs() > self.config.t_max * (1.0 + 1e-12) {
            return Err(Error::GridExceeded { t, t_max: self.config.t_max });
        }
        Ok(())
    }

    /// Largest deviation of the unweighted inversion integral from `ξ_n(x)` over all
    /// `n < n_max` at a handful of points in the time window.
    pub fn self_test(&self) -> Result<f64> {
        let tm = self.config.t_max;
        let points = [0.0, 0.37 * tm, 0.5 * tm, tm];
        let scale = (2.0 / std::f64::consts::PI).sqrt();
        let plain: Vec<f64> = self.mesh.weights.iter().map(|w| scale * w).collect();
        let sums = self.spectral_sums(&plain, &points, self.config.n_max, Kernel::Value);
        let mut worst = 0.0f64;
        for (j, &x) in points.iter().enumerate() {
            let exact = hermite_table(self.config.n_max, x);
            for (n, e) in exact.iter().enumerate() {
                let d = (sums[j][n] - e).abs();
                if !d.is_finite() {
                    return Err(Error::QuadratureUnderResolved {
                        deviation: f64::INFINITY,
                        tolerance: SELF_TEST_TOLERANCE,
                    });
                }
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }

    /// For each point, `Σ_k w_k ξ_n(u_k) K(u_k, point)` with the sign `s_n` applied,
    /// for `n < count`. Returned as one vector per point.
    fn spectral_sums(&self, weights: &[f64], points: &[f64], count: usize, kernel: Kernel) -> Vec<Vec<f64>> {
        let np = points.len();
        let nodes = &self.mesh.nodes;
        let flat = self.exec.chunked_fold(
            nodes.len(),
            NODE_CHUNK,
            || vec![0.0f64; count * np],
            |acc, k| {
                let u = nodes[k];
                let w = weights[k];
                let mut even = Vec::with_capacity(np);
                let mut odd = Vec::with_capacity(np);
                for &x in points {
                    let (s, c) = (u * x).sin_cos();
                    match kernel {
                        Kernel::Value => {
                            even.push(w * c);
                            odd.push(w * s);
                        }
                        Kernel::Primitive => {
                            let half = (0.5 * u * x).sin();
                            even.push(w * s / u);
                            odd.push(w * 2.0 * half * half / u);
                        }
                    }
                }
                let mut sweep = HermiteSweep::new(u);
                for n in 0..count {
                    let xi = sweep.next_value();
                    if xi == 0.0 {
                        continue;
                    }
                    let row = if n % 2 == 0 { &even } else { &odd };
                    let dst = &mut acc[n * np..(n + 1) * np];
                    for (d, r) in dst.iter_mut().zip(row) {
                        *d += xi * r;
                    }
                }
            },
            |total, part| {
                for (t, p) in total.iter_mut().zip(part) {
                    *t += p;
                }
            },
        );
        (0..np)
            .map(|j| {
                (0..count)
                    .map(|n| {
                        let v = flat[n * np + j];
                        if (n / 2) % 2 == 0 {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `(S_m ξ_n)(x)` for `n < count`, at several points.
    pub fn sm_coeffs_many(&self, xs: &[f64], count: usize) -> Result<Vec<Vec<f64>>> {
        for &x in xs {
            self.check_time(x)?;
        }
        Ok(self.spectral_sums(&self.weighted, xs, count, Kernel::Value))
    }

    /// `(S_m ξ_n)(x)` for `n < n_max`.
    pub fn sm_coeffs(&self, x: f64) -> Result<Vec<f64>> {
        Ok(self.sm_coeffs_many(&[x], self.config.n_max)?.remove(0))
    }

    /// `(S_m ξ_n)(x)`.
    pub fn apply_sm(&self, n: usize, x: f64) -> Result<f64> {
        if n >= self.config.n_max {
            return Err(Error::InvalidParameter(format!(
                "Hermite index {n} is not below n_max = {}",
                self.config.n_max
            )));
        }
        Ok(self.sm_coeffs_many(&[x], n + 1)?[0][n])
    }

    /// `f_n(t) = ∫_0^t (S_m ξ_n)(u) du` for `n < count`, at several times.
    pub fn f_coeffs_many(&self, ts: &[f64], count: usize) -> Result<Vec<Vec<f64>>> {
        for &t in ts {
            self.check_time(t)?;
        }
        Ok(self.spectral_sums(&self.weighted, ts, count, Kernel::Primitive))
    }

    /// `f_n(t)` for `n < n_max`.
    pub fn f_coeffs(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.f_coeffs_many(&[t], self.config.n_max)?.remove(0))
    }

    fn to_element(coeffs: &[f64]) -> GrassmannElement {
        GrassmannElement::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| (MultiIndex::from_bits(1u64 << n), num_complex::Complex64::new(c, 0.0))),
        )
    }

    /// `f_m(t) = Σ_{n ≤ L} f_{n-1}(t) i_n`, truncated to the operator generators.
    pub fn f_element(&self, t: f64) -> Result<GrassmannElement> {
        let c = self.f_coeffs_many(&[t], self.operator_generators() as usize)?;
        Ok(Self::to_element(&c[0]))
    }

    /// `df_m/dt = Σ_{n ≤ L} (S_m ξ_{n-1})(t) i_n`.
    pub fn df_element(&self, t: f64) -> Result<GrassmannElement> {
        let c = self.sm_coeffs_many(&[t], self.operator_generators() as usize)?;
        Ok(Self::to_element(&c[0]))
    }

    /// `df_m/dt` at several times, one sweep over the mesh.
    pub fn df_elements(&self, ts: &[f64]) -> Result<Vec<GrassmannElement>> {
        let c = self.sm_coeffs_many(ts, self.operator_generators() as usize)?;
        Ok(c.iter().map(|v| Self::to_element(v)).collect())
    }

    pub fn check_support(&self, g: &GrassmannElement) -> Result<()> {
        let limit = self.operator_generators();
        let top = g.max_generator();
        if top > limit {
            return Err(Error::TruncationOverflow { generator: top, limit });
        }
        Ok(())
    }

    /// `X_m(t) g = T_{f_m(t)} g`.
    pub fn x_apply(&self, t: f64, g: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_support(g)?;
        Ok(t_apply(&self.f_element(t)?, g))
    }

    /// `W_m(t) g = T_{df_m/dt} g`.
    pub fn w_apply(&self, t: f64, g: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_support(g)?;
        Ok(t_apply(&self.df_element(t)?, g))
    }
}
