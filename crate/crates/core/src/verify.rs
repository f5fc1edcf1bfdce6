//! The acceptance suite: every check compares a computed number with a
//! pinned expectation and records both, so a report can be printed even
//! when something fails.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::entropy::{entropy_from_cumulants, CountingStatistics};
use crate::lattice::{
    bond_transmission, chi_from_levels, eigenvalue_histogram, fcs_determinant, log_grid, log_slope_fit,
    LatticeConfig, Protocol, Simulator,
};
use crate::schedule::{effective_temperature, entropy_rate, noise_power, quantum_temperature, PulseTrain};
use crate::special::{alpha_closed_form, alpha_via_integral, series_weight};
use crate::spectral::{mu_imperfect, rescaling_factor, support_edges};

/// Regression constant for `F(0.5)` from a 30-digit reference quadrature.
pub const RESCALING_AT_HALF: f64 = 0.589_644_559_352_492_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Analytic checks only; a few seconds.
    Quick,
    /// Adds the lattice simulations.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub passed: bool,
    /// Extra diagnostic lines.
    pub notes: Vec<String>,
}

impl Check {
    fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            expected: String::new(),
            observed: String::new(),
            tolerance: String::new(),
            passed: false,
            notes: vec![],
        }
    }

    fn failed(id: u8, name: &'static str, err: crate::Error) -> Self {
        let mut c = Self::new(id, name);
        c.observed = format!("error: {err}");
        c
    }

    /// One line: `[PASS] 3 name | expected ... | observed ... | tol ...`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} | expected {} | observed {} | tolerance {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.expected,
            self.observed,
            self.tolerance
        )
    }
}

/// A place where the literature value and the value used here differ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub topic: &'static str,
    pub printed: String,
    pub adopted: String,
    pub comment: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<Check>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{}", c.line());
            for n in &c.notes {
                let _ = writeln!(out, "       {n}");
            }
        }
        let _ = writeln!(out, "\nDocumented discrepancies:");
        for d in &self.discrepancies {
            let _ = writeln!(
                out,
                "  {}: printed {} | used {} ({})",
                d.topic, d.printed, d.adopted, d.comment
            );
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "\n{passed}/{} checks passed", self.checks.len());
        out
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `C_2 = x` alone gives `S = π²/3 · x`.
pub fn gaussian_identity() -> Check {
    let mut c = Check::new(1, "gaussian identity S = pi^2/3 C2");
    let mut worst: f64 = 0.0;
    for x in [0.01, 0.1, 1.0, 10.0] {
        let stats = match CountingStatistics::gaussian(x, 8) {
            Ok(s) => s,
            Err(e) => return Check::failed(1, c.name, e),
        };
        for order in [2, 4, 8] {
            match entropy_from_cumulants(&stats, order) {
                Ok(s) => worst = worst.max(rel(s.value, PI * PI / 3.0 * x)),
                Err(e) => return Check::failed(1, c.name, e),
            }
        }
    }
    c.expected = "pi^2/3 * x for x in {0.01, 0.1, 1, 10}".into();
    c.observed = format!("max rel err {worst:.2e}");
    c.tolerance = "1e-12 rel".into();
    c.passed = worst <= 1e-12;
    c
}

/// The integral form of `α_m` agrees with `(2π)^m |B_m|`.
pub fn coefficient_audit() -> Check {
    let mut c = Check::new(2, "entropy-series coefficients");
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut fourth = f64::NAN;
    for m in [2, 4, 6, 8, 10, 12] {
        let integral = match alpha_via_integral(m) {
            Ok(v) => v,
            Err(e) => return Check::failed(2, c.name, e),
        };
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        worst = worst.max(rel(integral / fact, alpha_closed_form(m) / fact));
        if m == 4 {
            fourth = integral / fact;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let target = PI.powi(4) / 45.0;
    c.expected = format!("integral = (2pi)^m|B_m| for m = 2..12; weight_4 = pi^4/45 = {target:.6}");
    c.observed = format!("max rel err {worst:.2e}; weight_4 = {fourth:.6}; {:.1} ms", elapsed * 1e3);
    c.tolerance = "1e-6 rel, runtime < 1 s".into();
    c.passed = worst <= 1e-6 && rel(fourth, target) <= 1e-6 && elapsed < 1.0;
    c.notes.push(format!(
        "literature weight pi^4/15 = {:.6} is three times the value above",
        PI.powi(4) / 15.0
    ));
    c
}

/// Observables of the `L = 200` perfect-bond single switch at the fit times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRun {
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    pub c2: Vec<f64>,
    pub c4: Vec<f64>,
    /// Entropy series truncated at order 8.
    pub series8: Vec<f64>,
    /// The same series truncated at order 4.
    pub series4: Vec<f64>,
}

pub const SCALING_SITES: usize = 200;
pub const FIT_POINTS: usize = 9;

pub fn scaling_run() -> crate::Result<ScalingRun> {
    let (t_lo, t_hi) = (10.0, 50.0);
    let cfg = LatticeConfig::new(SCALING_SITES, 1.0, 1.0, Protocol::single(t_hi)?)?;
    let sim = Simulator::new(cfg)?;
    let times = log_grid(t_lo, t_hi, FIT_POINTS);
    let mut run = ScalingRun {
        times: times.clone(),
        entropy: vec![],
        c2: vec![],
        c4: vec![],
        series8: vec![],
        series4: vec![],
    };
    for t in times {
        let snap = sim.snapshot(t, 8)?;
        let series = entropy_from_cumulants(&snap.cumulants, 8)?;
        run.entropy.push(snap.entropy);
        run.c2.push(snap.cumulants.get(2));
        run.c4.push(snap.cumulants.get(4));
        run.series8.push(series.value);
        run.series4.push(series.partial_sums[1]);
    }
    Ok(run)
}

pub fn entropy_scaling(run: &ScalingRun) -> Check {
    let mut c = Check::new(3, "lattice S slope vs ln t (L=200, Jc=J, t in [10,50]/J)");
    let target = 1.0 / 3.0;
    match log_slope_fit(&run.times, &run.entropy) {
        Ok((slope, intercept)) => {
            c.expected = format!("{target:.5}");
            c.observed = format!("{slope:.5} (intercept {intercept:.4})");
            c.tolerance = "10% rel".into();
            c.passed = rel(slope, target) <= 0.10;
        }
        Err(e) => return Check::failed(3, c.name, e),
    }
    c
}

pub fn variance_scaling(run: &ScalingRun) -> Check {
    let mut c = Check::new(4, "lattice C2 slope vs ln t");
    let target = 1.0 / (PI * PI);
    match log_slope_fit(&run.times, &run.c2) {
        Ok((slope, intercept)) => {
            c.expected = format!("{target:.5}");
            c.observed = format!("{slope:.5} (intercept {intercept:.4})");
            c.tolerance = "10% rel".into();
            c.passed = rel(slope, target) <= 0.10;
        }
        Err(e) => return Check::failed(4, c.name, e),
    }
    let ratio = run
        .c4
        .iter()
        .zip(&run.c2)
        .fold(0.0f64, |m, (c4, c2)| m.max((c4 / c2).abs()));
    c.notes.push(format!("max |C4/C2| over the window: {ratio:.3e}"));
    c
}

/// `det(1 - n + n U† e^{iλP} U e^{-iλP})` against the spectral product.
pub fn identity_chain() -> Check {
    let mut c = Check::new(5, "determinant vs spectrum generating function (L=40)");
    let l = 40;
    let protocols = [vec![(0.0, 15.0)], vec![(0.5, 6.0), (8.0, 14.5)]];
    let mut worst: f64 = 0.0;
    for intervals in &protocols {
        for r in [1.0, 0.7] {
            let result = (|| -> crate::Result<f64> {
                let cfg = LatticeConfig::new(l, 1.0, r, Protocol::new(intervals.clone())?)?;
                let t = cfg.protocol.end_time() + 1.0;
                let sim = Simulator::new(cfg)?;
                let n = sim.projector();
                let (u, _) = sim.evolution_operator(t)?;
                let (m, _) = sim.correlation(t)?;
                let levels = m.eigenvalues()?;
                let offset = sim.charge_offset();
                let mut dev: f64 = 0.0;
                for k in 0..41 {
                    let lambda = -PI + 2.0 * PI * k as f64 / 40.0;
                    let det = fcs_determinant(&n, &u, l, lambda)?;
                    let product = chi_from_levels(&levels, offset, lambda);
                    dev = dev.max((det - product).norm() / det.norm());
                }
                Ok(dev)
            })();
            match result {
                Ok(d) => worst = worst.max(d),
                Err(e) => return Check::failed(5, c.name, e),
            }
        }
    }
    c.expected = "agreement on 41 lambda points, 2 protocols x r in {1, 0.7}".into();
    c.observed = format!("max rel dev {worst:.2e}");
    c.tolerance = "1e-10 rel".into();
    c.passed = worst <= 1e-10;
    c
}

pub fn noise_closure(run: &ScalingRun) -> Check {
    let mut c = Check::new(6, "order-8 series entropy vs eigenvalue entropy");
    let devs: Vec<f64> = run.series8.iter().zip(&run.entropy).map(|(s, e)| rel(*s, *e)).collect();
    let worst = devs.iter().fold(0.0f64, |m, &d| m.max(d));
    c.expected = "series within 5% of eigenvalue entropy at every fit time".into();
    c.observed = format!("max rel dev {worst:.3}");
    c.tolerance = "5% rel".into();
    c.passed = worst <= 0.05;
    let worst4 = run
        .series4
        .iter()
        .zip(&run.entropy)
        .fold(0.0f64, |m, (s, e)| m.max(rel(*s, *e)));
    c.notes.push(format!(
        "order-4 truncation deviates by at most {worst4:.3}; order 8 picks up C8 ~ {:.2} with weight {:.3}",
        run.series8
            .iter()
            .zip(&run.series4)
            .map(|(a, b)| a - b)
            .fold(0.0f64, |m, x| m.max(x.abs()))
            / series_weight(8),
        series_weight(8)
    ));
    c
}

/// Eigenvalue-free band for a weak bond, and the density's zero set.
pub fn transmission_gap() -> Check {
    let mut c = Check::new(7, "gap of the spectrum at r=0.5 (D=0.64)");
    let result = (|| -> crate::Result<(usize, f64, f64, f64)> {
        let d = bond_transmission(0.5)?;
        let (lo, hi) = support_edges(d)?;
        let cfg = LatticeConfig::new(SCALING_SITES, 1.0, 0.5, Protocol::single(90.0)?)?;
        let sim = Simulator::new(cfg)?;
        let snap = sim.snapshot(90.0, 2)?;
        let inside = snap
            .eigenvalues
            .iter()
            .filter(|&&z| z > lo + 0.05 && z < hi - 0.05)
            .count();
        let hist = eigenvalue_histogram(&snap.eigenvalues, 40)?;
        if hist.interior_count == 0 {
            return Err(crate::Error::Integrity("no interior eigenvalues at all".into()));
        }
        // Zero set of the closed-form density on a 1e-5 grid.
        let step = 1e-5;
        let zeros: Vec<f64> = (1..100_000)
            .map(|k| k as f64 * step)
            .filter(|&z| mu_imperfect(1.0, d, z).map(|m| m == 0.0).unwrap_or(false))
            .collect();
        let first = *zeros.first().unwrap_or(&f64::NAN);
        let last = *zeros.last().unwrap_or(&f64::NAN);
        Ok((inside, d, (first - lo).abs(), (last - hi).abs()))
    })();
    match result {
        Ok((inside, d, e_lo, e_hi)) => {
            let edge_err = e_lo.max(e_hi);
            c.expected = "0 levels in (0.25, 0.75); density edges at (0.2, 0.8)".into();
            c.observed = format!("{inside} levels; D = {d:.4}; edge error {edge_err:.1e}");
            c.tolerance = "exact count, 1e-4 on edges".into();
            c.passed = inside == 0 && edge_err <= 1e-4 && (d - 0.64).abs() < 1e-12;
        }
        Err(e) => return Check::failed(7, c.name, e),
    }
    c
}

pub fn rescaling() -> Check {
    let mut c = Check::new(8, "rescaling factor F(D)");
    let grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
    let f: crate::Result<Vec<f64>> = grid.iter().map(|&d| rescaling_factor(d)).collect();
    let f = match f {
        Ok(v) => v,
        Err(e) => return Check::failed(8, c.name, e),
    };
    let unit = *f.last().expect("grid ends at 1");
    let increasing = f.windows(2).all(|w| w[1] > w[0]);
    let above = grid.iter().zip(&f).filter(|(d, _)| **d <= 0.5 + 1e-12).all(|(d, fd)| fd > d);
    let half = f[9];
    c.expected = format!("F(1) = 1, increasing, F(D) > D for D <= 0.5, F(0.5) = {RESCALING_AT_HALF:.10}");
    c.observed = format!(
        "F(1) = {unit}, increasing = {increasing}, above = {above}, F(0.5) = {half:.10}"
    );
    c.tolerance = "exact, exact, exact, 1e-6".into();
    c.passed = unit == 1.0 && increasing && above && (half - RESCALING_AT_HALF).abs() <= 1e-6;
    c
}

pub const NU: f64 = 500e6;
pub const TAU: f64 = 20e-12;

pub fn pulse_train() -> Check {
    let mut c = Check::new(9, "50 explicit pulses vs N/pi^2 ln(sin(pi nu w)/(pi nu tau))");
    let result = (|| -> crate::Result<(f64, f64)> {
        let p = PulseTrain::new(NU, 0.5 / NU, TAU, 50)?;
        Ok((p.to_schedule()?.c2(), p.c2()))
    })();
    match result {
        Ok((explicit, asymptote)) => {
            let dev = rel(explicit, asymptote);
            c.expected = format!("{asymptote:.6}");
            c.observed = format!("{explicit:.6} ({:.2}% off)", 100.0 * dev);
            c.tolerance = "5% rel".into();
            c.passed = dev <= 0.05;
        }
        Err(e) => return Check::failed(9, c.name, e),
    }
    c
}

pub fn experimental_numbers() -> Check {
    let mut c = Check::new(10, "nu = 500 MHz, tau = 20 ps, w = T/2");
    let w = 0.5 / NU;
    let result = (|| -> crate::Result<(f64, f64, f64)> {
        Ok((noise_power(NU, w, TAU)?, entropy_rate(NU, w, TAU)?, effective_temperature(NU, w, TAU)?))
    })();
    match result {
        Ok((s2, rate, temp)) => {
            let devs = [rel(s2, 4.50e-30), rel(rate, 5.77e8), rel(temp, 8.41e-3)];
            c.expected = "S2 = 4.50e-30 A^2/Hz, rate = 5.77e8 nats/s, T_eff = 8.41 mK".into();
            c.observed = format!("S2 = {s2:.3e}, rate = {rate:.3e}, T_eff = {:.3} mK", temp * 1e3);
            c.tolerance = "1% rel each".into();
            c.passed = devs.iter().all(|&d| d <= 0.01);
            c.notes.push(format!(
                "quoted ~25 mK vs h nu/k_B = {:.1} mK vs formula {:.2} mK: unresolved",
                quantum_temperature(NU) * 1e3,
                temp * 1e3
            ));
        }
        Err(e) => return Check::failed(10, c.name, e),
    }
    c
}

pub fn discrepancies() -> Vec<Discrepancy> {
    vec![
        Discrepancy {
            topic: "weight of C4 in the entropy series",
            printed: format!("pi^4/15 = {:.6}", PI.powi(4) / 15.0),
            adopted: format!("pi^4/45 = {:.6}", PI.powi(4) / 45.0),
            comment: "general (2pi)^m|B_m|/m! formula and the direct integral both give pi^4/45",
        },
        Discrepancy {
            topic: "prefactor of the imperfect-transmission density",
            printed: "G/pi^2".into(),
            adopted: "G/(2 pi^2)".into(),
            comment: "only the halved prefactor reproduces S = pi^2/3 C2 at D = 1; F(D) is unaffected",
        },
        Discrepancy {
            topic: "effective temperature at nu = 500 MHz",
            printed: "~25 mK".into(),
            adopted: format!(
                "formula {:.2} mK (h nu/k_B = {:.1} mK)",
                effective_temperature(NU, 0.5 / NU, TAU).unwrap_or(f64::NAN) * 1e3,
                quantum_temperature(NU) * 1e3
            ),
            comment: "unresolved; both printed",
        },
    ]
}

pub fn run(level: Level) -> Report {
    let mut checks = vec![gaussian_identity(), coefficient_audit()];
    if level == Level::Full {
        match scaling_run() {
            Ok(run) => {
                checks.push(entropy_scaling(&run));
                checks.push(variance_scaling(&run));
                checks.push(identity_chain());
                checks.push(noise_closure(&run));
            }
            Err(e) => {
                checks.push(Check::failed(3, "lattice S slope vs ln t", e.clone()));
                checks.push(Check::failed(4, "lattice C2 slope vs ln t", e.clone()));
                checks.push(identity_chain());
                checks.push(Check::failed(6, "order-8 series entropy vs eigenvalue entropy", e));
            }
        }
        checks.push(transmission_gap());
    }
    checks.push(rescaling());
    checks.push(pulse_train());
    checks.push(experimental_numbers());
    Report {
        level,
        checks,
        discrepancies: discrepancies(),
    }
}
