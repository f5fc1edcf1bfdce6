//! Entanglement entropy as a weighted sum of even charge cumulants.
//!
//! `S = Σ_{m even} (2π)^m |B_m| C_m / m!`. The weight of `C_4` is
//! `π⁴/45`; a `π⁴/15` value that circulates for this coefficient is
//! inconsistent with both the general Bernoulli formula and the direct
//! `α_4` integral (see [`crate::special::alpha_via_integral`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::series_weight;

pub const DEFAULT_TRUNCATION: usize = 8;

const VARIANCE_TOL: f64 = 1e-12;

/// Truncated cumulants `C_1 ..= C_M` of the transmitted charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CountingStatistics {
    cumulants: Vec<f64>,
}

impl CountingStatistics {
    /// `cumulants[0]` is `C_1`. Requires at least `C_1, C_2` and `C_2 ≥ 0`.
    pub fn new(cumulants: Vec<f64>) -> Result<Self> {
        if cumulants.len() < 2 {
            return Err(Error::domain("counting statistics need at least C1 and C2"));
        }
        if let Some(bad) = cumulants.iter().position(|c| !c.is_finite()) {
            return Err(Error::domain(format!("cumulant C{} is not finite", bad + 1)));
        }
        if cumulants[1] < -VARIANCE_TOL {
            return Err(Error::domain(format!(
                "variance C2 must be non-negative, got {}",
                cumulants[1]
            )));
        }
        Ok(Self { cumulants })
    }

    /// Only `C_2` nonzero.
    pub fn gaussian(c2: f64, max_order: usize) -> Result<Self> {
        let mut c = vec![0.0; max_order.max(2)];
        c[1] = c2;
        Self::new(c)
    }

    pub fn max_order(&self) -> usize {
        self.cumulants.len()
    }

    pub fn cumulants(&self) -> &[f64] {
        &self.cumulants
    }

    /// `C_m`, 1-based; zero past the truncation order.
    pub fn get(&self, m: usize) -> f64 {
        if m == 0 {
            return 0.0;
        }
        self.cumulants.get(m - 1).copied().unwrap_or(0.0)
    }

    /// Cumulants of a sum of independent charges add.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        if self.max_order() != other.max_order() {
            return Err(Error::OrderMismatch {
                left: self.max_order(),
                right: other.max_order(),
            });
        }
        Self::new(
            self.cumulants
                .iter()
                .zip(&other.cumulants)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn without_odd(&self) -> Self {
        let cumulants = self
            .cumulants
            .iter()
            .enumerate()
            .map(|(i, &c)| if (i + 1) % 2 == 1 { 0.0 } else { c })
            .collect();
        Self { cumulants }
    }
}

impl TryFrom<Vec<f64>> for CountingStatistics {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CountingStatistics> for Vec<f64> {
    fn from(c: CountingStatistics) -> Self {
        c.cumulants
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Nats.
    pub value: f64,
    /// Running totals after orders 2, 4, ..., `truncation_order`.
    pub partial_sums: Vec<f64>,
    pub truncation_order: usize,
}

pub fn entropy_from_cumulants(c: &CountingStatistics, truncation_order: usize) -> Result<EntropyEstimate> {
    if truncation_order < 2 || truncation_order % 2 == 1 {
        return Err(Error::domain(format!(
            "truncation order must be an even integer >= 2, got {truncation_order}"
        )));
    }
    if truncation_order > c.max_order() {
        return Err(Error::domain(format!(
            "truncation order {truncation_order} exceeds the {} available cumulants",
            c.max_order()
        )));
    }
    let mut total = 0.0;
    let partial_sums: Vec<f64> = (2..=truncation_order)
        .step_by(2)
        .map(|m| {
            total += series_weight(m) * c.get(m);
            total
        })
        .collect();
    Ok(EntropyEstimate {
        value: total,
        partial_sums,
        truncation_order,
    })
}

/// `π²/3 · C_2`: the whole series when the statistics are gaussian.
pub fn entropy_gaussian(c2: f64) -> Result<f64> {
    if !(c2 >= 0.0) {
        return Err(Error::domain(format!("variance must be non-negative, got {c2}")));
    }
    Ok(PI * PI / 3.0 * c2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(m, α_m C_m / m!)` for every even order available.
    pub increments: Vec<(usize, f64)>,
    /// False when some nonzero increment is at least as large as the one
    /// before it.
    pub converged: bool,
}

pub fn series_convergence_report(c: &CountingStatistics) -> Result<ConvergenceReport> {
    if c.max_order() < 4 {
        return Err(Error::domain("convergence report needs at least four cumulants"));
    }
    let increments: Vec<(usize, f64)> = (2..=c.max_order())
        .step_by(2)
        .map(|m| (m, series_weight(m) * c.get(m)))
        .collect();
    let converged = increments
        .windows(2)
        .all(|w| !(w[1].1.abs() >= w[0].1.abs() && w[1].1 != 0.0));
    Ok(ConvergenceReport {
        increments,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Cumulants of a single Bernoulli(z) variable, from the recursion
    // κ_{m+1} = z(1-z) dκ_m/dz, written out by hand.
    fn bernoulli_cumulants(z: f64) -> Vec<f64> {
        let v = z * (1.0 - z);
        vec![
            z,
            v,
            v * (1.0 - 2.0 * z),
            v * (1.0 - 6.0 * v),
            v * (1.0 - 2.0 * z) * (1.0 - 12.0 * v),
            v * (1.0 - 30.0 * v + 120.0 * v * v),
        ]
    }

    #[test]
    fn single_log_unit_gives_one_third() {
        let c = CountingStatistics::gaussian(1.0 / (PI * PI), 2).unwrap();
        let s = entropy_from_cumulants(&c, 2).unwrap();
        assert_relative_eq!(s.value, 1.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_cumulants_zero_entropy() {
        let c = CountingStatistics::new(vec![0.0; 8]).unwrap();
        assert_eq!(entropy_from_cumulants(&c, 8).unwrap().value, 0.0);
    }

    #[test]
    fn bernoulli_level_at_tenth() {
        let c = CountingStatistics::new(bernoulli_cumulants(0.1)[..4].to_vec()).unwrap();
        assert_relative_eq!(c.get(2), 0.09, max_relative = 1e-14);
        assert_relative_eq!(c.get(4), 0.0414, max_relative = 1e-12);
        let s = entropy_from_cumulants(&c, 4).unwrap();
        let expect = PI.powi(2) / 3.0 * 0.09 + PI.powi(4) / 45.0 * 0.0414;
        assert_relative_eq!(s.value, expect, max_relative = 1e-14);
        assert!((s.value - 0.385_704).abs() < 5e-6);
        assert_eq!(s.partial_sums.len(), 2);
        assert_eq!(*s.partial_sums.last().unwrap(), s.value);
    }

    #[test]
    fn gaussian_closed_form() {
        assert_eq!(entropy_gaussian(0.0).unwrap(), 0.0);
        assert_relative_eq!(entropy_gaussian(1.0 / (PI * PI)).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert!((entropy_gaussian(0.35063).unwrap() - 1.15352).abs() < 1e-5);
        assert!(entropy_gaussian(-0.1).is_err());
    }

    #[test]
    fn truncation_order_validation() {
        let c = CountingStatistics::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(entropy_from_cumulants(&c, 3).is_err());
        assert!(entropy_from_cumulants(&c, 6).is_err());
        assert!(entropy_from_cumulants(&c, 0).is_err());
        assert!(entropy_from_cumulants(&c, 4).is_ok());
    }

    #[test]
    fn negative_variance_is_rejected() {
        assert!(CountingStatistics::new(vec![0.0, -0.5]).is_err());
        assert!(CountingStatistics::new(vec![0.0]).is_err());
        assert!(CountingStatistics::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn report_gaussian_converges() {
        let c = CountingStatistics::gaussian(0.3, 8).unwrap();
        let r = series_convergence_report(&c).unwrap();
        assert!(r.converged);
        assert!(r.increments[1..].iter().all(|&(_, d)| d == 0.0));
    }

    #[test]
    fn report_half_filled_level_diverges() {
        let c = CountingStatistics::new(bernoulli_cumulants(0.5)).unwrap();
        assert_eq!(c.get(4), -0.125);
        assert_eq!(c.get(6), 0.25);
        let r = series_convergence_report(&c).unwrap();
        let mags: Vec<f64> = r.increments.iter().map(|&(_, d)| d.abs()).collect();
        assert!((mags[0] - 0.8225).abs() < 1e-4);
        assert!((mags[1] - 0.2706).abs() < 1e-4);
        assert!((mags[2] - 0.5087).abs() < 1e-4);
        assert!(!r.converged);
    }

    #[test]
    fn report_small_level_converges() {
        let c = CountingStatistics::new(bernoulli_cumulants(0.01)).unwrap();
        let r = series_convergence_report(&c).unwrap();
        assert!(r.converged, "{r:?}");
    }

    #[test]
    fn report_needs_four_orders() {
        let c = CountingStatistics::gaussian(0.3, 2).unwrap();
        assert!(series_convergence_report(&c).is_err());
    }

    #[test]
    fn serde_validates() {
        let c: CountingStatistics = serde_json::from_str("[0.0, 0.5, 0.0, 0.1]").unwrap();
        assert_eq!(c.get(4), 0.1);
        assert!(serde_json::from_str::<CountingStatistics>("[0.0, -1.0]").is_err());
    }

    proptest::proptest! {
        #[test]
        fn gaussian_series_equals_closed_form(c2 in 0.0f64..50.0, order in 1usize..=8) {
            let c = CountingStatistics::gaussian(c2, 2 * order).unwrap();
            let s = entropy_from_cumulants(&c, 2 * order).unwrap().value;
            let g = entropy_gaussian(c2).unwrap();
            proptest::prop_assert!((s - g).abs() <= 1e-14 * g.max(1e-300));
        }

        #[test]
        fn odd_cumulants_never_matter(c in proptest::collection::vec(-2.0f64..2.0, 8)) {
            let mut c = c;
            c[1] = c[1].abs();
            let full = CountingStatistics::new(c).unwrap();
            let a = entropy_from_cumulants(&full, 8).unwrap();
            let b = entropy_from_cumulants(&full.without_odd(), 8).unwrap();
            proptest::prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
            proptest::prop_assert_eq!(a.partial_sums, b.partial_sums);
        }
    }
}
