//! Supernumbers: finitely supported complex combinations of basis monomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::conjugation::ConjugationId;
use crate::error::{Error, Result};
use crate::index::{index_product, swap_parity, MultiIndex, SignedIndex};

/// Default tolerance on `|body|` below which an element is treated as singular.
pub const DEFAULT_INVERT_EPSILON: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// An element of the truncated Grassmann algebra.
///
/// Terms are kept sorted by index with no duplicate indices and no exact zeros.
#[derive(Clone, PartialEq, Default)]
pub struct GrassmannElement {
    terms: Vec<(MultiIndex, Complex64)>,
}

impl GrassmannElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::monomial(MultiIndex::EMPTY, c)
    }

    pub fn real(x: f64) -> Self {
        Self::scalar(Complex64::new(x, 0.0))
    }

    pub fn monomial(index: MultiIndex, c: Complex64) -> Self {
        let mut terms = Vec::new();
        if c != ZERO {
            terms.push((index, c));
        }
        GrassmannElement { terms }
    }

    /// The generator `i_n` with unit coefficient.
    pub fn generator(n: u32) -> Result<Self> {
        Ok(Self::monomial(MultiIndex::generator(n)?, Complex64::new(1.0, 0.0)))
    }

    /// Collects terms, summing coefficients that share an index.
    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Complex64)>>(terms: I) -> Self {
        let mut v: Vec<_> = terms.into_iter().collect();
        Self::normalize(&mut v);
        GrassmannElement { terms: v }
    }

    /// Dense constructor for `Λ_n`: `coeffs[bits]` is the coefficient of the
    /// monomial whose bit pattern is `bits`.
    pub fn from_dense(coeffs: &[Complex64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(b, c)| (MultiIndex::from_bits(b as u64), *c))
            .collect();
        GrassmannElement { terms }
    }

    fn normalize(v: &mut Vec<(MultiIndex, Complex64)>) {
        v.sort_unstable_by_key(|(i, _)| *i);
        let mut out: Vec<(MultiIndex, Complex64)> = Vec::with_capacity(v.len());
        for &(i, c) in v.iter() {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| *c != ZERO);
        *v = out;
    }

    pub fn terms(&self) -> &[(MultiIndex, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`is_zero`](Self::is_zero): no stored terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: MultiIndex) -> Complex64 {
        match self.terms.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(k) => self.terms[k].1,
            Err(_) => ZERO,
        }
    }

    /// The scalar part `z_B`.
    pub fn body(&self) -> Complex64 {
        self.coefficient(MultiIndex::EMPTY)
    }

    /// `z - z_B`.
    pub fn soul(&self) -> GrassmannElement {
        GrassmannElement { terms: self.terms.iter().copied().filter(|(i, _)| !i.is_empty()).collect() }
    }

    /// Largest generator id in the support, 0 for scalars.
    pub fn max_generator(&self) -> u32 {
        self.terms.iter().map(|(i, _)| i.max_generator()).max().unwrap_or(0)
    }

    /// Union of all generators appearing in the support.
    pub fn support_generators(&self) -> MultiIndex {
        self.terms.iter().fold(MultiIndex::EMPTY, |acc, (i, _)| acc.union(*i))
    }

    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(i, _)| i.len() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|(i, _)| i.len() % 2 == 1)
    }

    pub fn map_coefficients<F: Fn(MultiIndex, Complex64) -> Complex64>(&self, f: F) -> Self {
        let mut terms: Vec<_> = self.terms.iter().map(|&(i, c)| (i, f(i, c))).collect();
        terms.retain(|(_, c)| *c != ZERO);
        GrassmannElement { terms }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map_coefficients(|_, c| a * c)
    }

    /// Drops every coefficient with magnitude at or below `threshold`.
    pub fn prune(&self, threshold: f64) -> Self {
        GrassmannElement { terms: self.terms.iter().copied().filter(|(_, c)| c.norm() > threshold).collect() }
    }

    /// `a z + b w`.
    pub fn linear_combine(a: Complex64, z: &Self, b: Complex64, w: &Self) -> Self {
        let mut out = Vec::with_capacity(z.len() + w.len());
        let (mut p, mut q) = (0, 0);
        while p < z.terms.len() || q < w.terms.len() {
            let next = match (z.terms.get(p), w.terms.get(q)) {
                (Some(&(i, c)), Some(&(j, _))) if i < j => {
                    p += 1;
                    (i, a * c)
                }
                (Some(&(i, _)), Some(&(j, d))) if j < i => {
                    q += 1;
                    (j, b * d)
                }
                (Some(&(i, c)), Some(&(_, d))) => {
                    p += 1;
                    q += 1;
                    (i, a * c + b * d)
                }
                (Some(&(i, c)), None) => {
                    p += 1;
                    (i, a * c)
                }
                (None, Some(&(j, d))) => {
                    q += 1;
                    (j, b * d)
                }
                (None, None) => unreachable!(),
            };
            if next.1 != ZERO {
                out.push(next);
            }
        }
        GrassmannElement { terms: out }
    }

    /// The Grassmann product `zw`.
    ///
    /// The contributions `z_α w_β i_α i_β` and `z_β w_α i_β i_α` land on the same
    /// monomial; they are added to each other before anything else so that
    /// cancellations required by the algebra (for example `v² = 0` for odd `v`)
    /// come out as exact zeros rather than rounding residue.
    pub fn multiply(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let signed = |c: Complex64, negative: bool| if negative { -c } else { c };
        let mut acc = Vec::with_capacity(self.len() * other.len() / 2 + 1);
        for &(a, za) in &self.terms {
            for &(b, wb) in &other.terms {
                let SignedIndex::Term { negative, index } = index_product(a, b) else {
                    continue;
                };
                let c = signed(za * wb, negative);
                let partner = if a == b { None } else { self.find(b).zip(other.find(a)) };
                match partner {
                    Some((zb, wa)) if a < b => acc.push((index, c + signed(zb * wa, swap_parity(b, a)))),
                    Some(_) => {}
                    None => acc.push((index, c)),
                }
            }
        }
        Self::normalize(&mut acc);
        GrassmannElement { terms: acc }
    }

    fn find(&self, index: MultiIndex) -> Option<Complex64> {
        self.terms.binary_search_by(|(i, _)| i.cmp(&index)).ok().map(|k| self.terms[k].1)
    }

    /// `z^n` by repeated squaring.
    pub fn pow(&self, mut n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.multiply(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.multiply(&base);
            }
        }
        result
    }

    pub fn conjugate(&self, c: ConjugationId) -> Self {
        let conj = c.conjugates_coefficients();
        self.map_coefficients(|i, z| {
            let z = if conj { z.conj() } else { z };
            z * c.basis_sign(i)
        })
    }

    /// `(even, odd)` parts; the body goes to the even part.
    pub fn grade_split(&self) -> (Self, Self) {
        let (even, odd): (Vec<_>, Vec<_>) = self.terms.iter().partition(|(i, _)| i.len() % 2 == 0);
        (GrassmannElement { terms: even }, GrassmannElement { terms: odd })
    }

    /// `(Σ |z_α|^p)^{1/p}` for integer `p >= 1`.
    pub fn p_norm(&self, p: u32) -> f64 {
        assert!(p >= 1, "p-norm needs p >= 1");
        match p {
            1 => self.terms.iter().map(|(_, c)| c.norm()).sum(),
            2 => self.terms.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt(),
            _ => {
                let scale = self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
                if scale == 0.0 {
                    return 0.0;
                }
                let s: f64 = self.terms.iter().map(|(_, c)| (c.norm() / scale).powi(p as i32)).sum();
                scale * s.powf(1.0 / p as f64)
            }
        }
    }

    /// `⟨z, w⟩ = Σ z_α conj(w_α)`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        let (mut p, mut q) = (0, 0);
        let mut acc = ZERO;
        while p < self.terms.len() && q < other.terms.len() {
            let (i, c) = self.terms[p];
            let (j, d) = other.terms[q];
            if i < j {
                p += 1;
            } else if j < i {
                q += 1;
            } else {
                acc += c * d.conj();
                p += 1;
                q += 1;
            }
        }
        acc
    }

    pub fn invert(&self) -> Result<Self> {
        self.invert_with(DEFAULT_INVERT_EPSILON)
    }

    /// Inverse through the terminating Neumann series
    /// `z^{-1} = z_B^{-1} Σ_k (-z_S / z_B)^k`.
    pub fn invert_with(&self, epsilon: f64) -> Result<Self> {
        let body = self.body();
        if body.norm() <= epsilon {
            return Err(Error::NotInvertible { body_abs: body.norm(), epsilon });
        }
        let inv_body = body.inv();
        let step = self.soul().scale(-inv_body);
        let mut sum = Self::one();
        let mut power = Self::one();
        // the soul is nilpotent, so the powers run out after at most
        // (number of generators in the support) steps
        loop {
            power = power.multiply(&step);
            if power.is_zero() {
                break;
            }
            sum = sum + &power;
        }
        Ok(sum.scale(inv_body))
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if !i.is_empty() {
                write!(f, "·{i}")?;
            }
        }
        Ok(())
    }
}

impl Add<&GrassmannElement> for GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        let one = Complex64::new(1.0, 0.0);
        GrassmannElement::linear_combine(one, &self, one, rhs)
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        let one = Complex64::new(1.0, 0.0);
        GrassmannElement::linear_combine(one, self, one, rhs)
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        GrassmannElement::linear_combine(Complex64::new(1.0, 0.0), self, Complex64::new(-1.0, 0.0), rhs)
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.multiply(rhs)
    }
}
