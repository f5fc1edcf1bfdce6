//! Abrupt on/off switching protocols and their gaussian charge statistics.
//!
//! Times here are SI seconds. The lattice simulator uses its own
//! [`crate::lattice::Protocol`] in natural units; there is no implicit
//! conversion between the two.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Open intervals `(t0_i, t1_i)` of the contact plus the switching cutoff `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct SwitchingSchedule {
    intervals: Vec<(f64, f64)>,
    tau: f64,
}

#[derive(Deserialize)]
struct RawSchedule {
    intervals: Vec<(f64, f64)>,
    tau: f64,
}

impl TryFrom<RawSchedule> for SwitchingSchedule {
    type Error = Error;
    fn try_from(raw: RawSchedule) -> Result<Self> {
        Self::new(raw.intervals, raw.tau)
    }
}

impl SwitchingSchedule {
    pub fn new(intervals: Vec<(f64, f64)>, tau: f64) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Schedule("at least one interval is required".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Schedule(format!("cutoff tau must be positive, got {tau}")));
        }
        let mut prev_end = f64::NEG_INFINITY;
        for (i, &(t0, t1)) in intervals.iter().enumerate() {
            if !(t0.is_finite() && t1.is_finite()) {
                return Err(Error::Schedule(format!("interval {i} has non-finite times")));
            }
            if t0 <= prev_end {
                return Err(Error::Schedule(format!(
                    "interval {i} starts at {t0}, not after the previous end {prev_end}"
                )));
            }
            if t1 <= t0 {
                return Err(Error::Schedule(format!("interval {i} is empty: ({t0}, {t1})")));
            }
            if t1 - t0 <= tau {
                return Err(Error::Schedule(format!(
                    "interval {i} is shorter than the cutoff tau = {tau}"
                )));
            }
            if prev_end.is_finite() && t0 - prev_end <= tau {
                return Err(Error::Schedule(format!(
                    "gap before interval {i} is shorter than the cutoff tau = {tau}"
                )));
            }
            prev_end = t1;
        }
        Ok(Self { intervals, tau })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The logarithmic double sum over switching times,
    ///
    /// `G = Σ_ij ln|t1_i - t0_j| - ln|t0_i - t0_j| + ln|t1_i - t0_j| - ln|t1_i - t1_j|`,
    ///
    /// with the `i = j` denominators replaced by `tau`. Cross-term ratios
    /// can be negative for signed differences; their magnitudes are used so
    /// `G` stays real.
    pub fn g_factor(&self) -> f64 {
        let ln_tau = self.tau.ln();
        let mut g = 0.0;
        for (i, &(a0, a1)) in self.intervals.iter().enumerate() {
            for (j, &(b0, b1)) in self.intervals.iter().enumerate() {
                let cross = 2.0 * (a1 - b0).abs().ln();
                let (d0, d1) = if i == j {
                    (ln_tau, ln_tau)
                } else {
                    ((a0 - b0).abs().ln(), (a1 - b1).abs().ln())
                };
                g += cross - d0 - d1;
            }
        }
        g
    }

    /// `C_2 = G / 2π²`.
    pub fn c2(&self) -> f64 {
        self.g_factor() / (2.0 * PI * PI)
    }

    pub fn translated(&self, dt: f64) -> Result<Self> {
        Self::new(
            self.intervals.iter().map(|&(a, b)| (a + dt, b + dt)).collect(),
            self.tau,
        )
    }
}

pub fn g_factor(s: &SwitchingSchedule) -> f64 {
    s.g_factor()
}

pub fn c2_from_schedule(s: &SwitchingSchedule) -> f64 {
    s.c2()
}

/// `N` identical pulses of width `w` repeated at frequency `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTrain {
    /// Hz.
    pub frequency: f64,
    /// Seconds.
    pub pulse_width: f64,
    /// Seconds.
    pub tau: f64,
    pub cycles: usize,
}

impl PulseTrain {
    pub fn new(frequency: f64, pulse_width: f64, tau: f64, cycles: usize) -> Result<Self> {
        if cycles == 0 {
            return Err(Error::Schedule("pulse train needs at least one cycle".into()));
        }
        let log_arg = log_argument(frequency, pulse_width, tau)?;
        if log_arg <= 0.0 {
            return Err(Error::Schedule(format!(
                "sin(πνw) = {:.6e} does not exceed πντ = {:.6e}",
                (PI * frequency * pulse_width).sin(),
                PI * frequency * tau
            )));
        }
        Ok(Self {
            frequency,
            pulse_width,
            tau,
            cycles,
        })
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    /// Large-`N` asymptote `C_2 = (N/π²) ln(sin πνw / πντ)`.
    pub fn c2(&self) -> f64 {
        let l = log_argument(self.frequency, self.pulse_width, self.tau)
            .expect("validated at construction");
        self.cycles as f64 / (PI * PI) * l
    }

    /// The train spelled out as explicit intervals `(kT, kT + w)`.
    pub fn to_schedule(&self) -> Result<SwitchingSchedule> {
        let t = self.period();
        SwitchingSchedule::new(
            (0..self.cycles)
                .map(|k| {
                    let start = k as f64 * t;
                    (start, start + self.pulse_width)
                })
                .collect(),
            self.tau,
        )
    }
}

pub fn pulse_train_c2(p: &PulseTrain) -> f64 {
    p.c2()
}

const BOUNDARY_TOL: f64 = 1e-12;

/// `ln(sin πνw / πντ)`, checked for `0 < w < 1/ν` and a non-negative value
/// (the boundary itself, within `1e-12`, maps to exactly 0).
pub fn log_argument(frequency: f64, pulse_width: f64, tau: f64) -> Result<f64> {
    if !(frequency > 0.0 && frequency.is_finite()) {
        return Err(Error::Schedule(format!("frequency must be positive, got {frequency}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Schedule(format!("cutoff tau must be positive, got {tau}")));
    }
    let period = 1.0 / frequency;
    if !(pulse_width > 0.0 && pulse_width < period) {
        return Err(Error::Schedule(format!(
            "pulse width {pulse_width} must lie strictly inside (0, {period})"
        )));
    }
    let ratio = (PI * frequency * pulse_width).sin() / (PI * frequency * tau);
    let l = ratio.ln();
    if l < -BOUNDARY_TOL {
        return Err(Error::Schedule(format!(
            "sin(πνw)/(πντ) = {ratio:.6e} is below 1; the pulse is shorter than the cutoff allows"
        )));
    }
    Ok(l.max(0.0))
}

/// Low-frequency current noise `S_2 = (e²ν/π²) ln(sin πνw / πντ)` in A²/Hz.
pub fn noise_power(frequency: f64, pulse_width: f64, tau: f64) -> Result<f64> {
    let l = log_argument(frequency, pulse_width, tau)?;
    Ok(ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * frequency / (PI * PI) * l)
}

/// Entropy production rate `(ν/3) ln(sin πνw / πντ)` in nats/s.
pub fn entropy_rate(frequency: f64, pulse_width: f64, tau: f64) -> Result<f64> {
    let l = log_argument(frequency, pulse_width, tau)?;
    Ok(frequency / 3.0 * l)
}

/// `T_eff = (hν / π² k_B) ln(sin πνw / πντ)` in kelvin.
pub fn effective_temperature(frequency: f64, pulse_width: f64, tau: f64) -> Result<f64> {
    let l = log_argument(frequency, pulse_width, tau)?;
    Ok(PLANCK * frequency / (PI * PI * BOLTZMANN) * l)
}

/// `hν / k_B` in kelvin.
pub fn quantum_temperature(frequency: f64) -> f64 {
    PLANCK * frequency / BOLTZMANN
}
