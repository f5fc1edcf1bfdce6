//! Analytic generating functions `log χ(λ)` for the switched contact.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::CountingStatistics;
use crate::error::{Error, Result};
use crate::series::FormalSeries;

pub const MAX_MODEL_ORDER: usize = 20;

const LEVEL_CLAMP_TOL: f64 = 1e-10;
const IMAG_RESIDUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FcsModel {
    /// Perfect transmission: `log χ = -λ² G / 4π²`.
    Gaussian { g: f64 },
    /// Transmission `D` in the open state: `λ → λ*(λ, D)`.
    ImperfectTransmission { g: f64, d: f64 },
    /// Independent two-outcome levels `z_j`, shifted by a deterministic
    /// charge `charge_offset` (only `C_1` feels it).
    BernoulliSet { levels: Vec<f64>, charge_offset: f64 },
}

impl FcsModel {
    pub fn gaussian(g: f64) -> Result<Self> {
        check_g(g)?;
        Ok(Self::Gaussian { g })
    }

    pub fn imperfect(g: f64, d: f64) -> Result<Self> {
        check_g(g)?;
        check_transmission(d)?;
        Ok(Self::ImperfectTransmission { g, d })
    }

    /// Levels within `1e-10` of `[0, 1]` are clamped onto it.
    pub fn bernoulli_set(levels: Vec<f64>, charge_offset: f64) -> Result<Self> {
        let levels = levels
            .into_iter()
            .map(|z| {
                if (-LEVEL_CLAMP_TOL..=1.0 + LEVEL_CLAMP_TOL).contains(&z) {
                    Ok(z.clamp(0.0, 1.0))
                } else {
                    Err(Error::domain(format!("level {z} outside [0, 1]")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::BernoulliSet {
            levels,
            charge_offset,
        })
    }
}

fn check_g(g: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::domain(format!("G must be finite and non-negative, got {g}")));
    }
    Ok(())
}

pub(crate) fn check_transmission(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::domain(format!("transmission must lie in [0, 1], got {d}")));
    }
    Ok(())
}

/// `λ* = 2 asin(√D sin(λ/2))`, so that `sin(λ*/2) = √D sin(λ/2)`.
pub fn lambda_star(lambda: f64, d: f64) -> f64 {
    2.0 * (d.sqrt() * (lambda / 2.0).sin()).clamp(-1.0, 1.0).asin()
}

/// [`lambda_star`] continued to complex `λ` on the principal branch.
pub fn lambda_star_complex(lambda: Complex64, d: f64) -> Complex64 {
    2.0 * (d.sqrt() * (lambda / 2.0).sin()).asin()
}

pub fn log_chi(model: &FcsModel, lambda: f64) -> Complex64 {
    match model {
        FcsModel::ImperfectTransmission { g, d } => {
            let ls = lambda_star(lambda, *d);
            Complex64::new(-ls * ls * g / (4.0 * PI * PI), 0.0)
        }
        _ => log_chi_complex(model, Complex64::new(lambda, 0.0)),
    }
}

/// `log χ` at complex counting field, as needed for the spectral
/// density. Branches are principal.
pub fn log_chi_complex(model: &FcsModel, lambda: Complex64) -> Complex64 {
    match model {
        FcsModel::Gaussian { g } => -lambda * lambda * (*g / (4.0 * PI * PI)),
        FcsModel::ImperfectTransmission { g, d } => {
            let ls = lambda_star_complex(lambda, *d);
            -ls * ls * (*g / (4.0 * PI * PI))
        }
        FcsModel::BernoulliSet {
            levels,
            charge_offset,
        } => {
            let phase = (Complex64::i() * lambda).exp();
            let sum: Complex64 = levels
                .iter()
                .map(|&z| (1.0 - z + z * phase).ln())
                .sum();
            sum - Complex64::i() * lambda * *charge_offset
        }
    }
}

/// Power series of `log χ(λ)` in `λ` up to `max_order`.
pub fn log_chi_series(model: &FcsModel, max_order: usize) -> Result<FormalSeries<Complex64>> {
    match model {
        FcsModel::Gaussian { g } | FcsModel::ImperfectTransmission { g, d: 1.0 } => {
            let mut c = vec![0.0; 3];
            c[2] = -g / (4.0 * PI * PI);
            Ok(FormalSeries::new(c, max_order)?.to_complex())
        }
        FcsModel::ImperfectTransmission { g, d } => {
            let x = FormalSeries::<f64>::variable(max_order)?;
            let ls = x.scale(0.5).sin().scale(d.sqrt()).asin()?.scale(2.0);
            Ok(ls.mul(&ls)?.scale(-g / (4.0 * PI * PI)).to_complex())
        }
        FcsModel::BernoulliSet {
            levels,
            charge_offset,
        } => {
            let i = Complex64::i();
            let phase = FormalSeries::<Complex64>::variable(max_order)?.scale(i).exp();
            let mut total = FormalSeries::<Complex64>::zero(max_order)?;
            for &z in levels {
                total = total.add(&bernoulli_level_series(&phase, z)?)?;
            }
            let shift = FormalSeries::new([Complex64::new(0.0, 0.0), -i * *charge_offset], max_order)?;
            total.add(&shift)
        }
    }
}

/// `log(1 - z + z e^{iλ})` given the series of `e^{iλ}`.
pub(crate) fn bernoulli_level_series(
    phase: &FormalSeries<Complex64>,
    z: f64,
) -> Result<FormalSeries<Complex64>> {
    phase
        .scale(Complex64::new(z, 0.0))
        .add_constant(Complex64::new(1.0 - z, 0.0))
        .ln()
}

/// `C_m = m! a_m / i^m` from the series `Σ a_m λ^m` of `log χ`.
pub fn cumulants_from_log_series(s: &FormalSeries<Complex64>) -> Result<CountingStatistics> {
    if s.coeff(0).norm() > IMAG_RESIDUE_TOL {
        return Err(Error::Series(format!(
            "log χ must vanish at λ = 0, constant term is {}",
            s.coeff(0)
        )));
    }
    let mut factorial = 1.0;
    // (-i)^m cycles 1, -i, -1, i.
    let mut minus_i_pow = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(s.max_order());
    for m in 1..=s.max_order() {
        factorial *= m as f64;
        minus_i_pow *= -Complex64::i();
        let c = s.coeff(m) * minus_i_pow * factorial;
        if c.im.abs() > IMAG_RESIDUE_TOL * c.re.abs().max(1.0) {
            return Err(Error::Series(format!(
                "cumulant C{m} has imaginary residue {:.3e}",
                c.im
            )));
        }
        out.push(c.re);
    }
    CountingStatistics::new(out)
}

pub fn model_cumulants(model: &FcsModel, max_order: usize) -> Result<CountingStatistics> {
    if max_order > MAX_MODEL_ORDER {
        return Err(Error::domain(format!(
            "model cumulants are limited to order {MAX_MODEL_ORDER}, got {max_order}"
        )));
    }
    cumulants_from_log_series(&log_chi_series(model, max_order)?)
}
