use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use fcs_entropy::lattice::{LatticeConfig, Simulator};
use fcs_entropy::schedule::{effective_temperature, log_argument, noise_power};
use fcs_entropy::spectral::{entropy_imperfect, mu_imperfect, rescaling_factor, support_edges};
use fcs_entropy::verify::{self, Level, Report};
use fcs_entropy::{
    entropy_from_cumulants, model_cumulants, series_convergence_report, CountingStatistics, FcsModel,
    Normalization, SwitchingSchedule,
};

use crate::table::{Output, Table};

/// Either an explicit list or `count` evenly spaced points on `[start, stop]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self, field: &str) -> Result<Vec<f64>> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (*n - 1) as f64)
                    .collect(),
            },
        };
        if v.is_empty() {
            bail!("{field}: grid is empty");
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
            bail!("{field}: grid must be finite and strictly increasing");
        }
        Ok(v)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Hz.
    pub frequency: f64,
    /// Seconds.
    pub tau: f64,
    /// Seconds.
    pub pulse_width: Grid,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let period = 1.0 / 500e6;
        Self {
            frequency: 500e6,
            tau: 20e-12,
            pulse_width: Grid::Range {
                start: 0.025 * period,
                stop: 0.975 * period,
                count: 39,
            },
        }
    }
}

pub fn noise(cfg: &NoiseConfig) -> Result<Output> {
    let widths = cfg.pulse_width.values("pulse_width")?;
    let mut t = Table::new(vec!["w", "S2", "C2_per_cycle", "entropy_per_cycle", "T_eff"]);
    for w in widths {
        let l = log_argument(cfg.frequency, w, cfg.tau).with_context(|| format!("pulse_width = {w}"))?;
        t.push(vec![
            w.into(),
            noise_power(cfg.frequency, w, cfg.tau)?.into(),
            (l / (PI * PI)).into(),
            (l / 3.0).into(),
            effective_temperature(cfg.frequency, w, cfg.tau)?.into(),
        ]);
    }
    let mut out = Output::single(t);
    out.meta.insert("frequency".into(), json!(cfg.frequency));
    out.meta.insert("tau".into(), json!(cfg.tau));
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    pub g: f64,
    pub transmission: Grid,
    /// Midpoint samples of `μ(z)` per transmission; 0 disables the dump.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    200
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            transmission: Grid::Range {
                start: 0.05,
                stop: 1.0,
                count: 20,
            },
            samples: default_samples(),
        }
    }
}

pub fn spectral(cfg: &SpectralConfig) -> Result<Output> {
    if !(cfg.g > 0.0 && cfg.g.is_finite()) {
        bail!("g: must be positive, got {}", cfg.g);
    }
    let ds = cfg.transmission.values("transmission")?;
    if let Some(d) = ds.iter().find(|&&d| !(d > 0.0 && d <= 1.0)) {
        bail!("transmission: {d} is outside (0, 1]");
    }
    struct Row {
        edges: (f64, f64),
        entropy: Result<f64, String>,
        factor: Result<f64, String>,
        density: Vec<(f64, f64)>,
    }
    let rows: Vec<Row> = ds
        .par_iter()
        .map(|&d| Row {
            edges: support_edges(d).expect("checked above"),
            entropy: entropy_imperfect(cfg.g, d, Normalization::Calibrated).map_err(|e| e.to_string()),
            factor: rescaling_factor(d).map_err(|e| e.to_string()),
            density: (0..cfg.samples)
                .map(|k| {
                    let z = (k as f64 + 0.5) / cfg.samples as f64;
                    (z, mu_imperfect(cfg.g, d, z).expect("z inside (0, 1)"))
                })
                .collect(),
        })
        .collect();

    let mut summary = Table::new(vec!["D", "z_minus", "z_plus", "S", "F", "status"]);
    let mut density = Table::new(vec!["D", "z", "mu"]);
    for (d, row) in ds.iter().zip(rows) {
        let status = match (&row.entropy, &row.factor) {
            (Ok(_), Ok(_)) => "ok".to_owned(),
            (Err(e), _) | (_, Err(e)) => e.clone(),
        };
        summary.push(vec![
            (*d).into(),
            row.edges.0.into(),
            row.edges.1.into(),
            row.entropy.unwrap_or(f64::NAN).into(),
            row.factor.unwrap_or(f64::NAN).into(),
            status.into(),
        ]);
        for (z, mu) in row.density {
            density.push(vec![(*d).into(), z.into(), mu.into()]);
        }
    }
    let mut out = Output::single(summary);
    if cfg.samples > 0 {
        out.extras.push(("density", density));
    }
    out.meta.insert("g".into(), json!(cfg.g));
    out.meta.insert("normalization".into(), json!(Normalization::Calibrated.note()));
    Ok(out)
}

pub fn schedule(s: &SwitchingSchedule) -> Result<Output> {
    let mut t = Table::new(vec!["intervals", "tau", "G", "C2", "S_gaussian"]);
    let c2 = s.c2();
    t.push(vec![
        s.intervals().len().into(),
        s.tau().into(),
        s.g_factor().into(),
        c2.into(),
        (PI * PI / 3.0 * c2).into(),
    ]);
    Ok(Output::single(t))
}

#[derive(Debug, Deserialize)]
pub struct LatticeRun {
    #[serde(flatten)]
    pub system: LatticeConfig,
    /// Natural time units.
    pub times: Grid,
    #[serde(default)]
    pub dump_eigenvalues: bool,
}

const LATTICE_ORDER: usize = 6;

pub fn lattice(run: &LatticeRun) -> Result<Output> {
    let times = run.times.values("times")?;
    if times[0] < 0.0 {
        bail!("times: must be non-negative");
    }
    let sim = Simulator::new(run.system.clone())?;
    let snaps: Vec<_> = times
        .par_iter()
        .map(|&t| sim.snapshot(t, LATTICE_ORDER))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(vec!["t", "S", "C1", "C2", "C4", "C6", "interior_levels", "beyond_horizon"]);
    let mut eig = Table::new(vec!["t", "index", "z"]);
    let mut flagged = 0;
    for s in &snaps {
        let interior = s.eigenvalues.iter().filter(|&&z| z > 1e-6 && z < 1.0 - 1e-6).count();
        flagged += usize::from(s.beyond_horizon);
        t.push(vec![
            s.t.into(),
            s.entropy.into(),
            s.cumulants.get(1).into(),
            s.cumulants.get(2).into(),
            s.cumulants.get(4).into(),
            s.cumulants.get(6).into(),
            interior.into(),
            s.beyond_horizon.into(),
        ]);
        if run.dump_eigenvalues {
            for (i, z) in s.eigenvalues.iter().enumerate() {
                eig.push(vec![s.t.into(), i.into(), (*z).into()]);
            }
        }
    }
    if flagged > 0 {
        eprintln!(
            "warning: {flagged} time point(s) at or beyond the reflection horizon t = {}",
            run.system.horizon()
        );
    }
    let mut out = Output::single(t);
    if run.dump_eigenvalues {
        out.extras.push(("eigenvalues", eig));
    }
    out.meta.insert("horizon".into(), json!(run.system.horizon()));
    out.meta.insert("charge_offset".into(), json!(sim.charge_offset()));
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    /// `[C_1, C_2, ...]`.
    #[serde(default)]
    pub cumulants: Option<Vec<f64>>,
    #[serde(default)]
    pub model: Option<FcsModel>,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    8
}

pub fn entropy(cfg: &EntropyConfig) -> Result<Output> {
    let stats = match (&cfg.cumulants, &cfg.model) {
        (Some(c), None) => CountingStatistics::new(c.clone())?,
        (None, Some(m)) => model_cumulants(m, cfg.order.max(4))?,
        _ => bail!("entropy config needs exactly one of `cumulants` or `model`"),
    };
    let est = entropy_from_cumulants(&stats, cfg.order)?;
    let mut t = Table::new(vec!["order", "weight", "cumulant", "partial_sum"]);
    for (k, sum) in est.partial_sums.iter().enumerate() {
        let m = 2 * (k + 1);
        t.push(vec![
            m.into(),
            fcs_entropy::special::series_weight(m).into(),
            stats.get(m).into(),
            (*sum).into(),
        ]);
    }
    let mut out = Output::single(t);
    out.meta.insert("entropy".into(), json!(est.value));
    if stats.max_order() >= 4 {
        let report = series_convergence_report(&stats)?;
        out.meta.insert("converged".into(), json!(report.converged));
    }
    Ok(out)
}

pub fn verify_report(level: Level) -> Report {
    verify::run(level)
}

pub fn verify_table(report: &Report) -> Output {
    let mut t = Table::new(vec!["id", "check", "expected", "observed", "tolerance", "passed"]);
    for c in &report.checks {
        t.push(vec![
            (c.id as usize).into(),
            c.name.into(),
            c.expected.clone().into(),
            c.observed.clone().into(),
            c.tolerance.clone().into(),
            c.passed.into(),
        ]);
    }
    let mut out = Output::single(t);
    let disc: Vec<Value> = report
        .discrepancies
        .iter()
        .map(|d| serde_json::to_value(d).unwrap_or(Value::Null))
        .collect();
    out.meta.insert("discrepancies".into(), Value::Array(disc));
    out.meta.insert("all_passed".into(), json!(report.all_passed()));
    out
}

pub fn to_json(out: &Output) -> Value {
    let mut doc = Map::new();
    for (k, v) in &out.meta {
        doc.insert(k.clone(), v.clone());
    }
    doc.insert("rows".into(), out.main.to_json());
    for (name, table) in &out.extras {
        doc.insert((*name).into(), table.to_json());
    }
    Value::Object(doc)
}
