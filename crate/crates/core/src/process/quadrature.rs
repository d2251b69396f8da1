//! Quadrature building blocks for the spectral integrals.
//!
//! - [`gauss_legendre`]: `n`-point rule on `[-1, 1]` via Newton on `P_n`.
//! - [`SpectralMesh`]: composite 16-point panels on `[0, U]`, with the first
//!   panel split geometrically toward `u = 0` where `sqrt(m(u))` may be singular.
//! - [`adaptive_gk15`]: adaptive Gauss–Kronrod (7, 15) for the kernel oracle.

use crate::error::{Error, Result};

/// Points per composite panel.
pub const PANEL_ORDER: usize = 16;
/// Ratio between consecutive graded sub-panels near the origin.
pub const GRADING_RATIO: f64 = 0.15;
/// Number of graded sub-panels near the origin.
pub const GRADING_LEVELS: usize = 20;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Quadrature nodes on `[0, U]` for integrands of the form `u^a · smooth(u)`, `a > -1`.
#[derive(Clone, Debug)]
pub struct SpectralMesh {
    pub upper: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralMesh {
    /// About `count` nodes: `count / 16` equal panels, the first of which is replaced by
    /// geometrically shrinking panels `[hσ^{k+1}, hσ^k]` plus a final `[0, hσ^L]`.
    pub fn new(upper: f64, count: usize) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) {
            return Err(Error::InvalidParameter(format!("quadrature half-width U must be positive, got {upper}")));
        }
        if count < 2 * PANEL_ORDER {
            return Err(Error::InvalidParameter(format!(
                "quadrature node count M must be at least {}, got {count}",
                2 * PANEL_ORDER
            )));
        }
        let panels = count.div_ceil(PANEL_ORDER);
        let h = upper / panels as f64;
        let (x, w) = gauss_legendre(PANEL_ORDER);
        let mut nodes = Vec::with_capacity((panels + GRADING_LEVELS + 1) * PANEL_ORDER);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut push_panel = |lo: f64, hi: f64| {
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        };
        let innermost = h * GRADING_RATIO.powi(GRADING_LEVELS as i32);
        push_panel(0.0, innermost);
        for k in (0..GRADING_LEVELS).rev() {
            push_panel(h * GRADING_RATIO.powi(k as i32 + 1), h * GRADING_RATIO.powi(k as i32));
        }
        for k in 1..panels {
            push_panel(k as f64 * h, (k + 1) as f64 * h);
        }
        Ok(SpectralMesh { upper, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * f(u)).sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One (7, 15) Gauss–Kronrod panel: `(kronrod value, |kronrod - gauss|)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection with (7, 15) Gauss–Kronrod panels until each panel's
/// estimated error is below its share of `tol` or `max_depth` is reached.
pub fn adaptive_gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> f64 {
        let (v, e) = whole;
        if e <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        let left = gk15(f, a, m);
        let right = gk15(f, m, b);
        rec(f, a, m, left, 0.5 * tol, depth - 1) + rec(f, m, b, right, 0.5 * tol, depth - 1)
    }
    let v = rec(f, a, b, gk15(f, a, b), tol, max_depth);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::IntegralDiverges(format!("non-finite value on [{a}, {b}]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rules_integrate_polynomials() {
        for n in [1usize, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..(2 * n) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn sixteen_point_nodes() {
        let (x, w) = gauss_legendre(16);
        assert!((x[15] - 0.989_400_934_991_649_9).abs() < 1e-15);
        assert!((w[15] - 0.027_152_459_411_754_1).abs() < 1e-15);
    }

    #[test]
    fn mesh_handles_endpoint_singularity() {
        let mesh = SpectralMesh::new(40.0, 1024).unwrap();
        // ∫_0^40 u^{-1/2} = 2 sqrt(40)
        let v = mesh.integrate(|u| u.powf(-0.5));
        assert!((v - 2.0 * 40f64.sqrt()).abs() < 1e-7, "{v}");
        let v = mesh.integrate(|u| u.powf(-0.2) * (-u * u / 2.0).exp());
        let exact = 2f64.powf(-0.6) * libm::tgamma(0.4);
        assert!((v - exact).abs() < 1e-12, "{v} {exact}");
        assert!(mesh.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(mesh.nodes[0] > 0.0);
    }

    #[test]
    fn mesh_rejects_bad_parameters() {
        assert!(SpectralMesh::new(0.0, 1024).is_err());
        assert!(SpectralMesh::new(10.0, 8).is_err());
    }

    #[test]
    fn adaptive_kronrod() {
        let v = adaptive_gk15(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-14, 50).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-13);
        let v = adaptive_gk15(&|x: f64| (7.0 * x).cos(), 0.0, 3.0, 1e-14, 50).unwrap();
        assert!((v - (21f64).sin() / 7.0).abs() < 1e-14);
        assert!(adaptive_gk15(&|_| f64::NAN, 0.0, 1.0, 1e-10, 4).is_err());
    }
}
