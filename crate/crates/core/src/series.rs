//! Truncated formal power series.
//!
//! A [`FormalSeries`] holds the coefficients `a_0 .. a_N` of
//! `f(x) = Σ a_k x^k` for a fixed maximum order `N`. Every operation is
//! exact up to order `N`: terms beyond it are dropped and never folded
//! back into lower orders. Operands must share the same maximum order.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex64;
use num_traits::Num;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 20;

/// Scalar field for series coefficients.
pub trait Coeff:
    Copy + Debug + PartialEq + Num + Neg<Output = Self> + From<f64> + Send + Sync + 'static
{
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn asin(self) -> Self;
    fn modulus(self) -> f64;
}

impl Coeff for f64 {
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Coeff for Complex64 {
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn asin(self) -> Self {
        Complex64::asin(self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<T: Coeff = f64> {
    coeffs: Vec<T>,
}

impl<T: Coeff> FormalSeries<T> {
    /// Builds a series from leading coefficients. Missing orders are zero;
    /// coefficients past `max_order` are discarded.
    pub fn new(coeffs: impl IntoIterator<Item = T>, max_order: usize) -> Result<Self> {
        check_order(max_order)?;
        let mut c: Vec<T> = coeffs.into_iter().take(max_order + 1).collect();
        c.resize(max_order + 1, T::zero());
        Ok(Self { coeffs: c })
    }

    pub fn zero(max_order: usize) -> Result<Self> {
        Self::new(std::iter::empty(), max_order)
    }

    pub fn constant(value: T, max_order: usize) -> Result<Self> {
        Self::new([value], max_order)
    }

    /// The expansion variable `x` itself.
    pub fn variable(max_order: usize) -> Result<Self> {
        Self::new([T::zero(), T::one()], max_order)
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero past the maximum order.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> FormalSeries<U> {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.max_order() != other.max_order() {
            return Err(Error::OrderMismatch {
                left: self.max_order(),
                right: other.max_order(),
            });
        }
        Ok(())
    }

    fn with_coeffs(&self, coeffs: Vec<T>) -> Self {
        debug_assert_eq!(coeffs.len(), self.coeffs.len());
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        ))
    }

    pub fn scale(&self, factor: T) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|&a| a * factor).collect())
    }

    pub fn add_constant(&self, value: T) -> Self {
        let mut c = self.coeffs.clone();
        c[0] = c[0] + value;
        self.with_coeffs(c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let n = self.max_order();
        let mut out = vec![T::zero(); n + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (j, &b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Ok(self.with_coeffs(out))
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == T::zero() {
            return Err(Error::Series("reciprocal of a series with zero constant term".into()));
        }
        let n = self.max_order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = T::one() / a0;
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j] * g[k - j];
            }
            g[k] = -acc / a0;
        }
        Ok(self.with_coeffs(g))
    }

    /// Term-wise derivative; the top coefficient becomes zero.
    pub fn derivative(&self) -> Self {
        let n = self.max_order();
        let mut d = vec![T::zero(); n + 1];
        for k in 1..=n {
            d[k - 1] = self.coeffs[k] * T::from(k as f64);
        }
        self.with_coeffs(d)
    }

    /// Antiderivative with the given constant term. The input's top
    /// coefficient would land past the maximum order and is dropped.
    pub fn integral(&self, constant: T) -> Self {
        let n = self.max_order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = constant;
        for k in 1..=n {
            g[k] = self.coeffs[k - 1] / T::from(k as f64);
        }
        self.with_coeffs(g)
    }

    pub fn exp(&self) -> Self {
        let n = self.max_order();
        let a = &self.coeffs;
        let mut g = vec![T::zero(); n + 1];
        g[0] = a[0].exp();
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                acc = acc + T::from(j as f64) * a[j] * g[k - j];
            }
            g[k] = acc / T::from(k as f64);
        }
        self.with_coeffs(g)
    }

    /// Natural logarithm; needs a nonzero constant term.
    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        let a0 = a[0];
        if a0 == T::zero() {
            return Err(Error::Series("logarithm of a series with zero constant term".into()));
        }
        let n = self.max_order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = a0.ln();
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..k {
                acc = acc + T::from(j as f64) * g[j] * a[k - j];
            }
            g[k] = (a[k] - acc / T::from(k as f64)) / a0;
        }
        Ok(self.with_coeffs(g))
    }

    /// `(sin f, cos f)` from the coupled recurrences `s' = c f'`, `c' = -s f'`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.max_order();
        let a = &self.coeffs;
        let mut s = vec![T::zero(); n + 1];
        let mut c = vec![T::zero(); n + 1];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..=n {
            let mut sa = T::zero();
            let mut ca = T::zero();
            for j in 1..=k {
                let ja = T::from(j as f64) * a[j];
                sa = sa + ja * c[k - j];
                ca = ca + ja * s[k - j];
            }
            let kk = T::from(k as f64);
            s[k] = sa / kk;
            c[k] = -ca / kk;
        }
        (self.with_coeffs(s), self.with_coeffs(c))
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// Principal square root; needs a nonzero constant term.
    pub fn sqrt(&self) -> Result<Self> {
        let a = &self.coeffs;
        if a[0] == T::zero() {
            return Err(Error::Series("square root of a series with zero constant term".into()));
        }
        let n = self.max_order();
        let mut g = vec![T::zero(); n + 1];
        g[0] = a[0].sqrt();
        let two_g0 = T::from(2.0) * g[0];
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..k {
                acc = acc + g[j] * g[k - j];
            }
            g[k] = (a[k] - acc) / two_g0;
        }
        Ok(self.with_coeffs(g))
    }

    /// Inverse sine via `asin(f)' = f' / sqrt(1 - f²)`; the constant term
    /// must stay off the branch points ±1.
    pub fn asin(&self) -> Result<Self> {
        let one_minus_sq = self.mul(self)?.scale(-T::one()).add_constant(T::one());
        if one_minus_sq.coeffs[0] == T::zero() {
            return Err(Error::Series("arcsin expanded at a branch point".into()));
        }
        let integrand = self.derivative().mul(&one_minus_sq.sqrt()?.recip()?)?;
        Ok(integrand.integral(self.coeffs[0].asin()))
    }

    /// `self ∘ inner`, i.e. `Σ a_k inner(x)^k`. The inner series must have a
    /// zero constant term so every order stays finite.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.same_order(inner)?;
        if inner.coeffs[0] != T::zero() {
            return Err(Error::Series(
                "composition requires an inner series with zero constant term".into(),
            ));
        }
        let n = self.max_order();
        let mut acc = Self::constant(self.coeffs[n], n)?;
        for k in (0..n).rev() {
            acc = acc.mul(inner)?.add_constant(self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Evaluates the truncated polynomial at `x`.
    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }
}

impl FormalSeries<f64> {
    pub fn to_complex(&self) -> FormalSeries<Complex64> {
        self.map(|c| Complex64::new(c, 0.0))
    }
}

fn check_order(max_order: usize) -> Result<()> {
    if max_order < 2 {
        return Err(Error::Series(format!("max_order must be at least 2, got {max_order}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    #[test]
    fn exp_of_variable_is_inverse_factorials() {
        let e = FormalSeries::<f64>::variable(12).unwrap().exp();
        for k in 0..=12 {
            assert_abs_diff_eq!(e.coeff(k), 1.0 / factorial(k), epsilon = 1e-15);
        }
    }

    #[test]
    fn log_one_plus_x() {
        let s = FormalSeries::<f64>::variable(10).unwrap().add_constant(1.0);
        let l = s.ln().unwrap();
        assert_eq!(l.coeff(0), 0.0);
        for k in 1..=10 {
            let expect = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            assert_abs_diff_eq!(l.coeff(k), expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn asin_of_sin_is_identity() {
        let x = FormalSeries::<f64>::variable(15).unwrap();
        let back = x.sin().asin().unwrap();
        for k in 0..=15 {
            let expect = if k == 1 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(back.coeff(k), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let s = FormalSeries::new([4.0, 1.0, -2.0, 0.5], 8).unwrap();
        let r = s.sqrt().unwrap();
        let sq = r.mul(&r).unwrap();
        for k in 0..=8 {
            assert_abs_diff_eq!(sq.coeff(k), s.coeff(k), epsilon = 1e-14);
        }
    }

    #[test]
    fn truncation_never_leaks_into_lower_orders() {
        // (1 + x^3)^2 at order 4 keeps 1 + 2x^3 and drops x^6.
        let s = FormalSeries::new([1.0, 0.0, 0.0, 1.0], 4).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.coeffs(), &[1.0, 0.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let a = FormalSeries::<f64>::variable(4).unwrap();
        let b = FormalSeries::<f64>::variable(6).unwrap();
        assert_eq!(a.add(&b), Err(Error::OrderMismatch { left: 4, right: 6 }));
        assert!(a.mul(&b).is_err());
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn compose_rejects_constant_inner_term() {
        let f = FormalSeries::<f64>::variable(4).unwrap().exp();
        let g = FormalSeries::constant(1.0, 4).unwrap();
        assert!(matches!(f.compose(&g), Err(Error::Series(_))));
    }

    #[test]
    fn log_of_zero_constant_is_an_error() {
        let x = FormalSeries::<f64>::variable(4).unwrap();
        assert!(x.ln().is_err());
        assert!(x.recip().is_err());
    }

    #[test]
    fn complex_exponential_has_alternating_parts() {
        let ix = FormalSeries::<Complex64>::variable(8)
            .unwrap()
            .scale(Complex64::i());
        let e = ix.exp();
        for k in 0..=8 {
            let c = e.coeff(k);
            if k % 2 == 0 {
                assert_eq!(c.im, 0.0);
            } else {
                assert_eq!(c.re, 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn log_after_exp_round_trips(coeffs in proptest::collection::vec(-1.0f64..1.0, 1..12)) {
            let mut c = vec![0.0];
            c.extend(coeffs);
            let f = FormalSeries::new(c, 12).unwrap();
            let back = f.exp().ln().unwrap();
            for k in 0..=12 {
                prop_assert!((back.coeff(k) - f.coeff(k)).abs() <= 1e-12);
            }
        }

        #[test]
        fn log1p_composed_with_expm1_is_identity(order in 2usize..=20) {
            let x = FormalSeries::<f64>::variable(order).unwrap();
            let expm1 = x.exp().add_constant(-1.0);
            let log1p = x.add_constant(1.0).ln().unwrap();
            let id = log1p.compose(&expm1).unwrap();
            for k in 0..=order {
                let expect = if k == 1 { 1.0 } else { 0.0 };
                prop_assert!((id.coeff(k) - expect).abs() <= 1e-12);
            }
        }
    }
}
