//! Riemann-sum approximation of `∫_a^b Y(t) W_m(t) g dt`.

use serde::Serialize;

use super::model::ProcessModel;
use crate::distribution::{weighted_norm, WeightSystem};
use crate::element::GrassmannElement;
use crate::error::{Error, Result};

/// Midpoint rule `Σ_k Y(t_k) W_m(t_k) g Δt` with `t_k = a + (k + 1/2)Δt`.
pub fn pettis_integral<Y>(
    model: &ProcessModel,
    y: Y,
    g: &GrassmannElement,
    a: f64,
    b: f64,
    steps: usize,
) -> Result<GrassmannElement>
where
    Y: Fn(f64) -> GrassmannElement + Sync,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    model.check_support(g)?;
    if a == b {
        return Ok(GrassmannElement::zero());
    }
    let dt = (b - a) / steps as f64;
    let times: Vec<f64> = (0..steps).map(|k| a + (k as f64 + 0.5) * dt).collect();
    let derivatives = model.df_elements(&times)?;
    let exec = model.execution();
    let terms = exec.map_range(steps, |k| {
        let wg = crate::fock::t_apply(&derivatives[k], g);
        y(times[k]).multiply(&wg)
    });
    let sum = terms.iter().fold(GrassmannElement::zero(), |acc, z| &acc + z);
    Ok(sum.scale(num_complex::Complex64::new(dt, 0.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub steps: usize,
    /// `H_{-p}` norm of the change from the previous row (absent for the first row).
    pub increment: Option<f64>,
    /// `H_{-p}` distance to a reference value, when one is supplied.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralReport {
    pub value: GrassmannElement,
    pub table: Vec<ConvergenceRow>,
}

/// Runs the midpoint rule at `steps/4`, `steps/2` and `steps`, recording the
/// successive increments and, if given, the distance to `reference`.
pub fn pettis_convergence<Y>(
    model: &ProcessModel,
    y: Y,
    g: &GrassmannElement,
    (a, b): (f64, f64),
    steps: usize,
    norm: (i32, &WeightSystem),
    reference: Option<&GrassmannElement>,
) -> Result<IntegralReport>
where
    Y: Fn(f64) -> GrassmannElement + Sync,
{
    let (p, weights) = norm;
    let mut ladder = vec![(steps / 4).max(1), (steps / 2).max(1), steps.max(1)];
    ladder.dedup();
    let mut table = Vec::new();
    let mut previous: Option<GrassmannElement> = None;
    for &n in &ladder {
        let v = pettis_integral(model, &y, g, a, b, n)?;
        let increment = previous.as_ref().map(|prev| weighted_norm(&(&v - prev), p, weights));
        let error = reference.map(|r| weighted_norm(&(&v - r), p, weights));
        table.push(ConvergenceRow { steps: n, increment, error });
        previous = Some(v);
    }
    Ok(IntegralReport { value: previous.expect("ladder is non-empty"), table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::process::density::SpectralDensity;
    use crate::process::hermite::hermite_xi;
    use crate::process::model::ModelConfig;
    use num_complex::Complex64;

    fn model(d: SpectralDensity) -> ProcessModel {
        ProcessModel::new(ModelConfig { nodes: 4096, ..ModelConfig::new(d).with_n_max(12) }).unwrap()
    }

    #[test]
    fn unit_integrand_recovers_increment() {
        let m = model(SpectralDensity::power_law(0.7).unwrap());
        let one = GrassmannElement::one();
        let v = pettis_integral(&m, |_| GrassmannElement::one(), &one, 0.5, 1.5, 256).unwrap();
        let exact = &m.f_element(1.5).unwrap() - &m.f_element(0.5).unwrap();
        assert!(v.max_abs_diff(&exact) < 1e-5, "{}", v.max_abs_diff(&exact));
        assert!(pettis_integral(&m, |_| GrassmannElement::zero(), &one, 0.0, 1.0, 16).unwrap().is_zero());
        assert!(pettis_integral(&m, |_| GrassmannElement::one(), &one, 1.0, 1.0, 16).unwrap().is_zero());
        assert!(pettis_integral(&m, |_| GrassmannElement::one(), &one, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn linear_integrand_against_per_coefficient_quadrature() {
        let m = model(SpectralDensity::Constant);
        let one = GrassmannElement::one();
        let v = pettis_integral(&m, GrassmannElement::real, &one, 0.0, 2.0, 512).unwrap();
        for n in 0..12usize {
            let direct = oracle::quadrature(|t| t * hermite_xi(n, t), 0.0, 2.0, 100).unwrap().value;
            let c = v.coefficient(crate::index::MultiIndex::from_bits(1 << n));
            assert!((c - Complex64::new(direct, 0.0)).norm() < 1e-5, "n={n}");
        }
    }

    #[test]
    fn convergence_table_shrinks() {
        let m = model(SpectralDensity::power_law(0.3).unwrap());
        let w = WeightSystem::linear(1.0, 64).unwrap();
        let one = GrassmannElement::one();
        let exact = &m.f_element(2.0).unwrap() - &m.f_element(0.0).unwrap();
        let r =
            pettis_convergence(&m, |_| GrassmannElement::one(), &one, (0.0, 2.0), 256, (1, &w), Some(&exact)).unwrap();
        assert_eq!(r.table.iter().map(|row| row.steps).collect::<Vec<_>>(), vec![64, 128, 256]);
        let e: Vec<f64> = r.table.iter().map(|row| row.error.unwrap()).collect();
        assert!(e[0] > 2.0 * e[1] && e[1] > 2.0 * e[2], "{e:?}");
        assert!(r.table[2].increment.unwrap() < r.table[1].increment.unwrap() / 2.0);
    }
}
