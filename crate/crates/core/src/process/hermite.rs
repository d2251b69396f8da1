//! Orthonormal Hermite functions
//! `ξ_n(x) = (2^n n! √π)^{-1/2} H_n(x) e^{-x²/2}`.
//!
//! Values come from the normalized three-term recurrence
//! `ξ_{n+1} = sqrt(2/(n+1)) x ξ_n - sqrt(n/(n+1)) ξ_{n-1}`, run on a rescaled
//! copy so that `e^{-x²/2}` never underflows before the polynomial part grows.

/// `π^{-1/4}`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

const RESCALE_THRESHOLD: f64 = 1e150;
const RESCALE_LOG: f64 = 345.387_763_949_107_0; // ln(1e150)

/// Streams `ξ_0(x), ξ_1(x), …`.
#[derive(Clone, Debug)]
pub struct HermiteSweep {
    x: f64,
    n: usize,
    prev: f64,
    cur: f64,
    log_scale: f64,
    scale: f64,
}

impl HermiteSweep {
    pub fn new(x: f64) -> Self {
        let log_scale = -0.5 * x * x;
        HermiteSweep { x, n: 0, prev: 0.0, cur: PI_POW_NEG_QUARTER, log_scale, scale: log_scale.exp() }
    }

    /// Degree of the value returned by the next call to [`HermiteSweep::next_value`].
    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn next_value(&mut self) -> f64 {
        let value = self.cur * self.scale;
        let n = self.n as f64;
        let next = (2.0 / (n + 1.0)).sqrt() * self.x * self.cur - (n / (n + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        if self.cur.abs() > RESCALE_THRESHOLD {
            self.cur /= RESCALE_THRESHOLD;
            self.prev /= RESCALE_THRESHOLD;
            self.log_scale += RESCALE_LOG;
            self.scale = self.log_scale.exp();
        }
        value
    }
}

impl Iterator for HermiteSweep {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_value())
    }
}

/// `ξ_n(x)`.
pub fn hermite_xi(n: usize, x: f64) -> f64 {
    let mut sweep = HermiteSweep::new(x);
    for _ in 0..n {
        sweep.next_value();
    }
    sweep.next_value()
}

/// `ξ_0(x), …, ξ_{count-1}(x)`.
pub fn hermite_table(count: usize, x: f64) -> Vec<f64> {
    HermiteSweep::new(x).take(count).collect()
}
