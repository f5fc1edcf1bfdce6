//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function wraps a plain Rust function returning
//! `Result<_, String>` so the numerics can be tested natively.

use wasm_bindgen::prelude::*;

use fcs_entropy::lattice::{log_grid, log_slope_fit, LatticeConfig, Protocol, Simulator};
use fcs_entropy::schedule::{effective_temperature, noise_power};
use fcs_entropy::spectral::{entropy_imperfect, mu_imperfect, rescaling_factor, support_edges};
use fcs_entropy::Normalization;

/// Largest lead the page may request; a 2L × 2L eigendecomposition per
/// Hamiltonian stays interactive up to here.
pub const MAX_SITES: usize = 200;

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
    y2: Vec<f64>,
    slope: f64,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }
    /// Secondary series on the same abscissa.
    #[wasm_bindgen(getter)]
    pub fn y2(&self) -> Vec<f64> {
        self.y2.clone()
    }
    /// Fitted slope against `ln x`, NaN when not computed.
    #[wasm_bindgen(getter)]
    pub fn slope(&self) -> f64 {
        self.slope
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    z: Vec<f64>,
    mu: Vec<f64>,
    z_minus: f64,
    z_plus: f64,
    entropy: f64,
    factor: f64,
}

#[wasm_bindgen]
impl Spectrum {
    #[wasm_bindgen(getter)]
    pub fn z(&self) -> Vec<f64> {
        self.z.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mu(&self) -> Vec<f64> {
        self.mu.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn z_minus(&self) -> f64 {
        self.z_minus
    }
    #[wasm_bindgen(getter)]
    pub fn z_plus(&self) -> f64 {
        self.z_plus
    }
    #[wasm_bindgen(getter)]
    pub fn entropy(&self) -> f64 {
        self.entropy
    }
    #[wasm_bindgen(getter)]
    pub fn factor(&self) -> f64 {
        self.factor
    }
}

/// Noise power (A²/Hz) and effective temperature (mK) against `w/T`.
/// Widths below the cutoff boundary are skipped.
pub fn noise_curve_inner(frequency_mhz: f64, tau_ps: f64, points: usize) -> Result<Curve, String> {
    if points < 2 {
        return Err("need at least two points".into());
    }
    if !(frequency_mhz > 0.0 && tau_ps > 0.0) {
        return Err("frequency and cutoff must be positive".into());
    }
    let nu = frequency_mhz * 1e6;
    let tau = tau_ps * 1e-12;
    let mut curve = Curve {
        x: vec![],
        y: vec![],
        y2: vec![],
        slope: f64::NAN,
    };
    for k in 1..=points {
        let frac = k as f64 / (points + 1) as f64;
        let w = frac / nu;
        // Widths under the cutoff boundary are not valid pulses.
        if let (Ok(s2), Ok(t)) = (noise_power(nu, w, tau), effective_temperature(nu, w, tau)) {
            curve.x.push(frac);
            curve.y.push(s2);
            curve.y2.push(t * 1e3);
        }
    }
    if curve.x.is_empty() {
        return Err("no pulse width satisfies sin(pi nu w) >= pi nu tau".into());
    }
    Ok(curve)
}

/// Closed-form density (calibrated normalization) with its gap and entropy.
pub fn spectral_density_inner(d: f64, g: f64, samples: usize) -> Result<Spectrum, String> {
    if samples < 2 {
        return Err("need at least two samples".into());
    }
    let (z_minus, z_plus) = support_edges(d).map_err(|e| e.to_string())?;
    let mut z = Vec::with_capacity(samples);
    let mut mu = Vec::with_capacity(samples);
    for k in 0..samples {
        let zk = (k as f64 + 0.5) / samples as f64;
        z.push(zk);
        mu.push(mu_imperfect(g, d, zk).map_err(|e| e.to_string())?);
    }
    Ok(Spectrum {
        z,
        mu,
        z_minus,
        z_plus,
        entropy: entropy_imperfect(g, d, Normalization::Calibrated).map_err(|e| e.to_string())?,
        factor: rescaling_factor(d).map_err(|e| e.to_string())?,
    })
}

/// Lattice entropy (`y`) and variance (`y2`) after a single connection of
/// growing duration, with the fitted slope of `S` against `ln t`.
pub fn lattice_entropy_inner(sites: usize, bond_ratio: f64, t_max: f64, points: usize) -> Result<Curve, String> {
    if sites > MAX_SITES {
        return Err(format!("at most {MAX_SITES} sites per lead in the browser"));
    }
    if points < 2 {
        return Err("need at least two points".into());
    }
    if !(t_max > 1.0) {
        return Err("t_max must exceed 1".into());
    }
    let cfg = LatticeConfig::new(sites, 1.0, bond_ratio, Protocol::single(t_max).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let sim = Simulator::new(cfg).map_err(|e| e.to_string())?;
    let times = log_grid(1.0, t_max, points);
    let mut curve = Curve {
        x: times.clone(),
        y: vec![],
        y2: vec![],
        slope: f64::NAN,
    };
    for &t in &times {
        let snap = sim.snapshot(t, 2).map_err(|e| e.to_string())?;
        curve.y.push(snap.entropy);
        curve.y2.push(snap.cumulants.get(2));
    }
    // Fit only past the lattice transient.
    let late: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= 0.2 * t_max).collect();
    if late.len() >= 2 {
        let ts: Vec<f64> = late.iter().map(|&i| times[i]).collect();
        let ss: Vec<f64> = late.iter().map(|&i| curve.y[i]).collect();
        curve.slope = log_slope_fit(&ts, &ss).map_err(|e| e.to_string())?.0;
    }
    Ok(curve)
}

#[wasm_bindgen]
pub fn noise_curve(frequency_mhz: f64, tau_ps: f64, points: usize) -> Result<Curve, JsError> {
    noise_curve_inner(frequency_mhz, tau_ps, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectral_density(d: f64, g: f64, samples: usize) -> Result<Spectrum, JsError> {
    spectral_density_inner(d, g, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lattice_entropy(sites: usize, bond_ratio: f64, t_max: f64, points: usize) -> Result<Curve, JsError> {
    lattice_entropy_inner(sites, bond_ratio, t_max, points).map_err(|e| JsError::new(&e))
}
