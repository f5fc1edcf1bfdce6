//! Bernoulli numbers, the binary entropy function, and the coefficients
//! `α_m` linking charge cumulants to entropy.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

/// Highest index kept in the shared memo table.
pub const BERNOULLI_MEMO_MAX: usize = 32;

/// Exact Bernoulli numbers `B_0 ..= B_max` (convention `B_1 = -1/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    values: Vec<BigRational>,
}

impl BernoulliTable {
    /// Runs the recurrence `Σ_{k=0}^{m} C(m+1, k) B_k = 0`, `B_0 = 1`, in
    /// exact rational arithmetic.
    pub fn new(max: usize) -> Self {
        let mut values: Vec<BigRational> = Vec::with_capacity(max + 1);
        values.push(BigRational::from_integer(BigInt::from(1)));
        for m in 1..=max {
            if m >= 3 && m % 2 == 1 {
                values.push(BigRational::zero());
                continue;
            }
            // binom(m+1, k) built incrementally.
            let mut binom = BigInt::from(1);
            let mut acc = BigRational::zero();
            for (k, b) in values.iter().enumerate() {
                if k > 0 {
                    binom = binom * BigInt::from(m + 2 - k) / BigInt::from(k);
                }
                acc += BigRational::from_integer(binom.clone()) * b;
            }
            values.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        Self { values }
    }

    pub fn max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, m: usize) -> Option<&BigRational> {
        self.values.get(m)
    }

    pub fn to_f64(&self, m: usize) -> Option<f64> {
        self.get(m).and_then(|b| b.to_f64())
    }
}

fn memo() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| BernoulliTable::new(BERNOULLI_MEMO_MAX))
}

/// Exact `B_m`. Indices past the memo table are computed on demand.
pub fn bernoulli(m: usize) -> BigRational {
    match memo().get(m) {
        Some(b) => b.clone(),
        None => BernoulliTable::new(m).values.swap_remove(m),
    }
}

pub fn bernoulli_f64(m: usize) -> f64 {
    memo()
        .to_f64(m)
        .unwrap_or_else(|| bernoulli(m).to_f64().unwrap_or(f64::NAN))
}

const ENTROPY_DOMAIN_TOL: f64 = 1e-12;

/// `-z ln z - (1-z) ln(1-z)` in nats, with `0 ln 0 = 0`.
pub fn binary_entropy(z: f64) -> Result<f64> {
    if !(-ENTROPY_DOMAIN_TOL..=1.0 + ENTROPY_DOMAIN_TOL).contains(&z) || z.is_nan() {
        return Err(Error::domain(format!("binary entropy needs z in [0, 1], got {z}")));
    }
    Ok(binary_entropy_unchecked(z.clamp(0.0, 1.0)))
}

pub(crate) fn binary_entropy_unchecked(z: f64) -> f64 {
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    -xlogx(z) - xlogx(1.0 - z)
}

/// `(2π)^m |B_m|` for even `m`, zero for odd `m`.
pub fn alpha_closed_form(m: usize) -> f64 {
    if m == 0 || m % 2 == 1 {
        return 0.0;
    }
    (2.0 * PI).powi(m as i32) * bernoulli_f64(m).abs()
}

/// `α_m / m!`, the weight of `C_m` in the entropy series.
pub fn series_weight(m: usize) -> f64 {
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    alpha_closed_form(m) / fact
}

/// Result of the direct integral for `α_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaIntegral {
    pub value: f64,
    pub abs_error: f64,
    /// Half-width of the `u` range actually integrated.
    pub cutoff: f64,
}

const ALPHA_MIN_CUTOFF: f64 = 21.0;

/// `α_m = ((-2)^m / π) ∫ u sech²u Im(iπ/2 + u)^m du` by adaptive quadrature.
///
/// The range starts at `|u| ≤ 21` and is widened until the envelope
/// `(2^m/π) |u| (|u| + π/2)^m · 4e^{-2|u|}` of the discarded tail falls
/// below `1e-12` of `m!`, the scale of `α_m`: for `m ≳ 10`
/// the polynomial growth outruns `sech²` at 21.
pub fn alpha_via_integral(m: usize) -> Result<f64> {
    alpha_via_integral_detailed(m).map(|r| r.value)
}

pub fn alpha_via_integral_detailed(m: usize) -> Result<AlphaIntegral> {
    if m < 2 {
        return Err(Error::domain(format!("alpha integral needs m >= 2, got {m}")));
    }
    let prefactor = (-2.0f64).powi(m as i32) / PI;
    let half_pi = Complex64::new(0.0, PI / 2.0);
    let integrand = |u: f64| {
        let c = u.cosh();
        u / (c * c) * (half_pi + u).powi(m as i32).im
    };

    let scale: f64 = (1..=m).map(|k| k as f64).product::<f64>().max(1.0);
    let log_tail = |u: f64| {
        (2.0f64.powi(m as i32) / PI).ln() + 4.0f64.ln() + u.ln() + m as f64 * (u + PI / 2.0).ln()
            - 2.0 * u
    };
    let mut cutoff = ALPHA_MIN_CUTOFF;
    while log_tail(cutoff) > (1e-12 * scale).ln() {
        cutoff += 1.0;
    }

    let tol = Tolerance {
        abs: 1e-10,
        rel: 1e-13,
        max_subdivisions: 4000,
    };
    // Split at the origin and at the integrand's bulk so each panel is smooth.
    let knots = [-cutoff, -cutoff / 2.0, 0.0, cutoff / 2.0, cutoff];
    let mut value = 0.0;
    let mut abs_error = 0.0;
    for w in knots.windows(2) {
        let r = quad::integrate(integrand, w[0], w[1], tol)?;
        value += r.value;
        abs_error += r.abs_error;
    }
    Ok(AlphaIntegral {
        value: prefactor * value,
        abs_error: prefactor.abs() * abs_error,
        cutoff,
    })
}
