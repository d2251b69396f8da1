//! Randomized invariant suites.
//!
//! Every invariant draws its samples from a ChaCha stream keyed by
//! `(seed, invariant, sample)`, so reports are reproducible and independent of
//! how the samples are spread over threads.
//!
//! A margin is positive when the invariant holds with room to spare: `rhs - lhs`
//! relative to `rhs` for inequalities, `tolerance - error` for identities. A
//! sample violates the invariant when its margin is negative (inequalities get
//! the usual relative slack).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conjugation::ConjugationId;
use crate::distribution::{
    check_vage, check_vage_swapped, invert_distribution, vage_constant, weighted_norm, ConstantMode, WeightSystem,
    RELATIVE_SLACK,
};
use crate::element::GrassmannElement;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{berezin_integral, left_derivative, left_multiply, operator_matrix, t_apply, OperatorExpr};
use crate::index::{index_product, MultiIndex};
use crate::oracle::{naive_sign_sort, SeqIndex};

/// Generators used by random samples (`Λ_10`).
pub const SAMPLE_GENERATORS: u32 = 10;
/// Largest number of terms in a random sample.
pub const SAMPLE_MAX_TERMS: usize = 64;
/// Tolerance for floating-point identities, relative to the size of the operands.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Algebra,
    Conjugations,
    Norms,
    Vage,
    Operators,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 5] =
        [Suite::Algebra, Suite::Conjugations, Suite::Norms, Suite::Vage, Suite::Operators];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Conjugations => "conjugations",
            Suite::Norms => "norms",
            Suite::Vage => "vage",
            Suite::Operators => "operators",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All]
            .into_iter()
            .chain(Suite::INDIVIDUAL)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub weights: WeightSystem,
    pub exec: Execution,
}

impl SuiteConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        SuiteConfig { seed, samples, weights: WeightSystem::default(), exec: Execution::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantResult {
    pub suite: Suite,
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub invariants: Vec<InvariantResult>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Outcome of one sample: its margin, and whether it counts as a violation.
#[derive(Clone, Copy, Debug)]
struct Sample {
    margin: f64,
    violated: bool,
}

impl Sample {
    /// Inequality `lhs <= rhs` with relative slack.
    fn bound(lhs: f64, rhs: f64) -> Self {
        let margin = if rhs > 0.0 {
            (rhs - lhs) / rhs
        } else if lhs <= 0.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        Sample { margin, violated: !(margin >= -RELATIVE_SLACK) }
    }

    /// Identity with absolute error `err` against tolerance `tol`.
    fn identity(err: f64, tol: f64) -> Self {
        let margin = tol - err;
        Sample { margin, violated: !(margin >= 0.0) }
    }

    fn exact(ok: bool) -> Self {
        Sample { margin: if ok { 0.0 } else { -1.0 }, violated: !ok }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn sample_rng(seed: u64, invariant: &str, k: usize) -> ChaCha8Rng {
    let tag = invariant.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(tag ^ splitmix(k as u64))))
}

fn run_invariant<F>(cfg: &SuiteConfig, suite: Suite, name: &'static str, samples: usize, check: F) -> InvariantResult
where
    F: Fn(&mut ChaCha8Rng, usize) -> Sample + Sync + Send,
{
    let seed = cfg.seed;
    let (violations, worst) = cfg.exec.chunked_fold(
        samples,
        64,
        || (0usize, f64::INFINITY),
        |acc, k| {
            let mut rng = sample_rng(seed, name, k);
            let s = check(&mut rng, k);
            acc.0 += s.violated as usize;
            acc.1 = acc.1.min(s.margin);
        },
        |acc, part| {
            acc.0 += part.0;
            acc.1 = acc.1.min(part.1);
        },
    );
    let worst_margin = if samples == 0 { 0.0 } else { worst };
    InvariantResult { suite, name, samples, violations, worst_margin, passed: violations == 0 }
}

// ---------------------------------------------------------------------------
// random samples

fn coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Sparse element of `Λ_n` with `1..=max_terms` random terms.
pub fn random_element(rng: &mut ChaCha8Rng, n: u32, max_terms: usize) -> GrassmannElement {
    let count = rng.gen_range(1..=max_terms);
    let span = 1u64 << n;
    GrassmannElement::from_terms((0..count).map(|_| (MultiIndex::from_bits(rng.gen_range(0..span)), coeff(rng))))
}

fn random_filtered(rng: &mut ChaCha8Rng, n: u32, keep: impl Fn(MultiIndex) -> bool) -> GrassmannElement {
    loop {
        let z = random_element(rng, n, SAMPLE_MAX_TERMS);
        let kept = GrassmannElement::from_terms(z.terms().iter().copied().filter(|&(i, _)| keep(i)));
        if !kept.is_zero() {
            return kept;
        }
    }
}

fn random_odd(rng: &mut ChaCha8Rng, n: u32) -> GrassmannElement {
    random_filtered(rng, n, |i| i.len() % 2 == 1)
}

fn random_soul(rng: &mut ChaCha8Rng, n: u32) -> GrassmannElement {
    random_filtered(rng, n, |i| !i.is_empty())
}

fn random_invertible(rng: &mut ChaCha8Rng, n: u32) -> GrassmannElement {
    let soul = random_soul(rng, n);
    let r = rng.gen_range(0.5..2.0);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    &GrassmannElement::scalar(Complex64::from_polar(r, theta)) + &soul
}

fn scale_of(zs: &[&GrassmannElement]) -> f64 {
    zs.iter().map(|z| z.p_norm(1)).product::<f64>().max(1.0)
}

fn n_gen() -> u32 {
    SAMPLE_GENERATORS
}

fn pick(rng: &mut ChaCha8Rng) -> GrassmannElement {
    random_element(rng, n_gen(), SAMPLE_MAX_TERMS)
}

// ---------------------------------------------------------------------------
// suites

fn algebra(cfg: &SuiteConfig) -> Vec<InvariantResult> {
    let s = Suite::Algebra;
    let n = cfg.samples;
    let mut out = vec![
        run_invariant(cfg, s, "associativity", n, |rng, _| {
            let (z, w, r) = (pick(rng), pick(rng), pick(rng));
            let err = z.multiply(&w).multiply(&r).max_abs_diff(&z.multiply(&w.multiply(&r)));
            Sample::identity(err, IDENTITY_TOLERANCE * scale_of(&[&z, &w, &r]))
        }),
        run_invariant(cfg, s, "distributivity", n, |rng, _| {
            let (z, w, r) = (pick(rng), pick(rng), pick(rng));
            let err = z.multiply(&(&w + &r)).max_abs_diff(&(&z.multiply(&w) + &z.multiply(&r)));
            Sample::identity(err, IDENTITY_TOLERANCE * scale_of(&[&z, &(&w + &r)]))
        }),
        run_invariant(cfg, s, "anticommutation", n, |rng, _| {
            let a = rng.gen_range(1..=64);
            let b = rng.gen_range(1..=64);
            let (ia, ib) = (GrassmannElement::generator(a).unwrap(), GrassmannElement::generator(b).unwrap());
            Sample::exact((&ia.multiply(&ib) + &ib.multiply(&ia)).is_zero())
        }),
        run_invariant(cfg, s, "sign_oracle", n, |rng, _| {
            let a = MultiIndex::from_bits(rng.gen_range(0..256));
            let b = MultiIndex::from_bits(rng.gen_range(0..256));
            let mut word: Vec<u32> = a.generators().collect();
            word.extend(b.generators());
            Sample::exact(naive_sign_sort(&SeqIndex::new(word)) == index_product(a, b))
        }),
        run_invariant(cfg, s, "odd_square_zero", n, |rng, _| {
            let v = random_odd(rng, n_gen());
            Sample::exact(v.multiply(&v).is_zero())
        }),
        run_invariant(cfg, s, "soul_nilpotency", n, |rng, _| {
            let g = rng.gen_range(1..=6);
            let product = (0..=g).fold(GrassmannElement::one(), |acc, _| acc.multiply(&random_soul(rng, g)));
            Sample::exact(product.is_zero())
        }),
        run_invariant(cfg, s, "inverse_identity", n, |rng, _| {
            let z = random_invertible(rng, n_gen());
            let inv = z.invert().expect("body is bounded away from zero");
            let err = z.multiply(&inv).max_abs_diff(&GrassmannElement::one());
            Sample::identity(err, 1e-9 * scale_of(&[&z, &inv]))
        }),
    ];
    for p in 1u32..=3 {
        let name = ["norm_inequality_p1", "norm_inequality_p2", "norm_inequality_p3"][p as usize - 1];
        out.push(run_invariant(cfg, s, name, n, move |rng, _| {
            let (z, w) = (pick(rng), pick(rng));
            norm_inequality(&z, &w, p)
        }));
    }
    out
}

/// `‖zw‖_1 <= ‖z‖_1‖w‖_1`, and for `p > 1` both
/// `‖zw‖_p^p <= ‖z‖_1^p ‖w‖_{2^{p-1}} Π_{k<p} ‖w‖_{2^k}` and the `z ↔ w` variant.
pub fn norm_inequality_margin(z: &GrassmannElement, w: &GrassmannElement, p: u32) -> (f64, f64) {
    let zw = z.multiply(w);
    if p == 1 {
        return (zw.p_norm(1), z.p_norm(1) * w.p_norm(1));
    }
    let lhs = zw.p_norm(p).powi(p as i32);
    let side = |a: &GrassmannElement, b: &GrassmannElement| {
        let mut r = a.p_norm(1).powi(p as i32) * b.p_norm(1 << (p - 1));
        for k in 1..p {
            r *= b.p_norm(1 << k);
        }
        r
    };
    (lhs, side(z, w).min(side(w, z)))
}

fn norm_inequality(z: &GrassmannElement, w: &GrassmannElement, p: u32) -> Sample {
    let (lhs, rhs) = norm_inequality_margin(z, w, p);
    Sample::bound(lhs, rhs)
}

fn conjugations(cfg: &SuiteConfig) -> Vec<InvariantResult> {
    let s = Suite::Conjugations;
    let n = cfg.samples;
    vec![
        run_invariant(cfg, s, "involution", n, |rng, _| {
            let z = pick(rng);
            Sample::exact(ConjugationId::ALL.iter().all(|&c| z.conjugate(c).conjugate(c) == z))
        }),
        run_invariant(cfg, s, "product_law", n, |rng, _| {
            let (z, w) = (pick(rng), pick(rng));
            let zw = z.multiply(&w);
            let worst = ConjugationId::ALL
                .iter()
                .map(|&c| {
                    let expect = if c.is_antihomomorphism() {
                        w.conjugate(c).multiply(&z.conjugate(c))
                    } else {
                        z.conjugate(c).multiply(&w.conjugate(c))
                    };
                    zw.conjugate(c).max_abs_diff(&expect)
                })
                .fold(0.0, f64::max);
            Sample::identity(worst, IDENTITY_TOLERANCE * scale_of(&[&z, &w]))
        }),
        run_invariant(cfg, s, "group_table", 64, |rng, k| {
            let (a, b) = (ConjugationId::ALL[k / 8], ConjugationId::ALL[k % 8]);
            let z = pick(rng);
            let composed = a.compose(b);
            let table_ok =
                composed == b.compose(a) && a.compose(a) == ConjugationId::Identity && composed.compose(b) == a;
            Sample::exact(table_ok && z.conjugate(a).conjugate(b) == z.conjugate(composed))
        }),
        run_invariant(cfg, s, "grade_conjugate_commutes", n, |rng, _| {
            let z = pick(rng);
            let zc = z.conjugate(ConjugationId::D3);
            let err = z.multiply(&zc).max_abs_diff(&zc.multiply(&z));
            Sample::identity(err, IDENTITY_TOLERANCE * scale_of(&[&z, &z]))
        }),
        run_invariant(cfg, s, "inner_product_conjugation", n, |rng, _| {
            let (z, w) = (pick(rng), pick(rng));
            let lhs = w.inner_product(&z);
            let rhs = z.conjugate(ConjugationId::D2).inner_product(&w.conjugate(ConjugationId::D2));
            Sample::identity((lhs - rhs).norm(), IDENTITY_TOLERANCE * scale_of(&[&z, &w]))
        }),
    ]
}

fn norms(cfg: &SuiteConfig) -> Result<Vec<InvariantResult>> {
    let s = Suite::Norms;
    let n = cfg.samples;
    let w = &cfg.weights;
    let c2 = vage_constant(2, w, ConstantMode::Truncated)?;
    let g_cap = w.g_max().min(15);
    Ok(vec![
        run_invariant(cfg, s, "weight_sum_product", g_cap as usize, |_, k| {
            let g = k as u32 + 1;
            let direct: f64 = (0u64..1 << g).map(|b| w.weight(MultiIndex::from_bits(b)).powi(-2)).sum();
            let product = w.weight_sum(1, g);
            Sample::identity((direct - product).abs() / product, IDENTITY_TOLERANCE)
        }),
        run_invariant(cfg, s, "norm_monotone_in_p", n, |rng, _| {
            let f = pick(rng);
            let p = rng.gen_range(-3..6);
            Sample::bound(weighted_norm(&f, p + 1, w), weighted_norm(&f, p, w))
        }),
        run_invariant(cfg, s, "body_limit", n, |rng, _| {
            let f = pick(rng);
            let err = (weighted_norm(&f, 40, w) - f.body().norm()).abs();
            Sample::identity(err, IDENTITY_TOLERANCE * f.p_norm(1).max(1.0))
        }),
        run_invariant(cfg, s, "power_bound", n, |rng, _| {
            let f = pick(rng);
            let p = rng.gen_range(0..3);
            let k = rng.gen_range(1..=6);
            let lhs = weighted_norm(&f.pow(k), p + 2, w);
            let rhs = c2.powi(k as i32 - 1) * weighted_norm(&f, p, w).powi(k as i32);
            Sample::bound(lhs, rhs)
        }),
        run_invariant(cfg, s, "distribution_inverse", n, |rng, _| {
            let f = random_invertible(rng, n_gen());
            match invert_distribution(&f, 1, w) {
                Ok(g) => {
                    // the series is summed to tolerance in H_{-p-2}, so the residual is measured there
                    let residual = &f.multiply(&g) - &GrassmannElement::one();
                    Sample::identity(weighted_norm(&residual, 3, w), 1e-10 * scale_of(&[&f, &g]))
                }
                Err(_) => Sample::exact(false),
            }
        }),
    ])
}

const VAGE_ORDERS: [(i32, i32); 3] = [(1, 0), (2, 1), (3, 1)];

fn vage(cfg: &SuiteConfig) -> Result<Vec<InvariantResult>> {
    let s = Suite::Vage;
    let w = &cfg.weights;
    for (p, q) in VAGE_ORDERS {
        w.check_growth((p - q) as u32)?;
    }
    let names = [["vage_1_0", "vage_2_1", "vage_3_1"], ["vage_swapped_1_0", "vage_swapped_2_1", "vage_swapped_3_1"]];
    let mut out = Vec::new();
    for (swapped, row) in names.iter().enumerate() {
        for (&(p, q), &name) in VAGE_ORDERS.iter().zip(row) {
            out.push(run_invariant(cfg, s, name, cfg.samples, move |rng, _| {
                let (f, g) = (pick(rng), pick(rng));
                let r = if swapped == 1 { check_vage_swapped(&f, &g, p, q, w) } else { check_vage(&f, &g, p, q, w) };
                let r = r.expect("orders and growth were validated");
                Sample::bound(r.lhs, r.rhs)
            }));
        }
    }
    Ok(out)
}

fn operators(cfg: &SuiteConfig) -> Result<Vec<InvariantResult>> {
    let s = Suite::Operators;
    let n = cfg.samples;
    let w = &cfg.weights;
    let (p, q) = (2, 1);
    let c = vage_constant((p - q) as u32, w, ConstantMode::Truncated)?;
    let small = |rng: &mut ChaCha8Rng| random_element(rng, 8, 32);
    Ok(vec![
        run_invariant(cfg, s, "adjointness", n, move |rng, _| {
            let (f, g, h) = (small(rng), small(rng), small(rng));
            let lhs = left_derivative(&f, &g).inner_product(&h);
            let rhs = g.inner_product(&left_multiply(&f, &h));
            Sample::identity((lhs - rhs).norm(), IDENTITY_TOLERANCE * scale_of(&[&f, &g, &h]))
        }),
        run_invariant(cfg, s, "matrix_transpose", n.min(200), |rng, _| {
            let dim = rng.gen_range(1..=6);
            let f = random_element(rng, dim, 16);
            let m = operator_matrix(&OperatorExpr::LeftMul(f.clone()), dim).expect("dimension is small");
            let d = operator_matrix(&OperatorExpr::LeftDeriv(f), dim).expect("dimension is small");
            Sample::exact(m.conjugate_transpose() == d)
        }),
        run_invariant(cfg, s, "berezin_annihilation", n, |rng, _| {
            let gen = rng.gen_range(1..=n_gen());
            let f = random_filtered(rng, n_gen(), |i| !i.contains(gen));
            Sample::exact(berezin_integral(MultiIndex::generator(gen).unwrap(), &f).is_zero())
        }),
        run_invariant(cfg, s, "t_isometry_on_souls", n, |rng, _| {
            let (f, g) = (random_soul(rng, n_gen()), random_soul(rng, n_gen()));
            let one = GrassmannElement::one();
            let lhs = t_apply(&f, &one).inner_product(&t_apply(&g, &one));
            Sample::identity((lhs - f.inner_product(&g)).norm(), IDENTITY_TOLERANCE * scale_of(&[&f, &g]))
        }),
        run_invariant(cfg, s, "t_operator_bound", n, move |rng, _| {
            let (f, g) = (pick(rng), pick(rng));
            let lhs = weighted_norm(&t_apply(&f, &g), p, w);
            Sample::bound(lhs, 2.0 * c * weighted_norm(&f, q, w) * weighted_norm(&g, -p, w))
        }),
    ])
}

/// Runs one suite (or all of them). Fails before sampling when the weight system
/// violates a precondition of the inequalities being checked.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let wanted: Vec<Suite> = if suite == Suite::All { Suite::INDIVIDUAL.to_vec() } else { vec![suite] };
    let mut invariants = Vec::new();
    for s in wanted {
        invariants.extend(match s {
            Suite::Algebra => algebra(cfg),
            Suite::Conjugations => conjugations(cfg),
            Suite::Norms => norms(cfg)?,
            Suite::Vage => vage(cfg)?,
            Suite::Operators => operators(cfg)?,
            Suite::All => unreachable!(),
        });
    }
    let passed = invariants.iter().all(|r| r.passed);
    Ok(SuiteReport { suite, seed: cfg.seed, samples: cfg.samples, passed, invariants })
}
