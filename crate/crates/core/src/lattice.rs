//! Exact free-fermion simulation of two tight-binding leads joined by a
//! switchable bond.
//!
//! Sites `0..L` form the left lead and `L..2L` the right lead; the bond
//! between sites `L-1` and `L` has strength `bond` while the protocol is
//! on and zero otherwise. The initial state is the half-filled ground
//! state of the disconnected leads, so the initial entanglement is zero.
//! Natural units: `ħ = 1`, lattice spacing 1, Fermi velocity `2J`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::CountingStatistics;
use crate::error::{Error, Result};
use crate::models::{model_cumulants, FcsModel};
use crate::special::binary_entropy_unchecked;

const HERMITIAN_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-10;
const INTERIOR_DELTA: f64 = 1e-6;

/// On-intervals of the bond in natural time units. May be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProtocol")]
pub struct Protocol {
    intervals: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawProtocol {
    intervals: Vec<(f64, f64)>,
}

impl TryFrom<RawProtocol> for Protocol {
    type Error = Error;
    fn try_from(raw: RawProtocol) -> Result<Self> {
        Self::new(raw.intervals)
    }
}

impl Protocol {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev = 0.0;
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) || a < prev || b <= a || (i > 0 && a <= prev) {
                return Err(Error::config(
                    "protocol",
                    format!("interval {i} ({a}, {b}) must be non-empty, start at t >= 0 and follow the previous one"),
                ));
            }
            prev = b;
        }
        Ok(Self { intervals })
    }

    pub fn never() -> Self {
        Self { intervals: vec![] }
    }

    /// Bond on during `(0, duration)`.
    pub fn single(duration: f64) -> Result<Self> {
        Self::new(vec![(0.0, duration)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn end_time(&self) -> f64 {
        self.intervals.last().map_or(0.0, |&(_, b)| b)
    }

    /// `(bond_on, duration)` pieces covering `[0, t]`.
    pub fn segments(&self, t: f64) -> Vec<(bool, f64)> {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(a, b) in &self.intervals {
            if cursor >= t {
                break;
            }
            let off_end = a.min(t);
            if off_end > cursor {
                out.push((false, off_end - cursor));
            }
            let on_start = a.max(cursor);
            let on_end = b.min(t);
            if on_end > on_start {
                out.push((true, on_end - on_start));
            }
            cursor = b.max(cursor);
        }
        if t > cursor {
            out.push((false, t - cursor));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLatticeConfig")]
pub struct LatticeConfig {
    pub sites_per_lead: usize,
    pub hopping: f64,
    pub bond: f64,
    pub protocol: Protocol,
}

#[derive(Deserialize)]
struct RawLatticeConfig {
    sites_per_lead: usize,
    #[serde(default = "unit_hopping")]
    hopping: f64,
    bond: f64,
    protocol: Protocol,
}

fn unit_hopping() -> f64 {
    1.0
}

impl TryFrom<RawLatticeConfig> for LatticeConfig {
    type Error = Error;
    fn try_from(raw: RawLatticeConfig) -> Result<Self> {
        Self::new(raw.sites_per_lead, raw.hopping, raw.bond, raw.protocol)
    }
}

impl LatticeConfig {
    pub fn new(sites_per_lead: usize, hopping: f64, bond: f64, protocol: Protocol) -> Result<Self> {
        if sites_per_lead < 2 || sites_per_lead % 2 == 1 {
            return Err(Error::config(
                "sites_per_lead",
                format!("must be an even integer >= 2, got {sites_per_lead}"),
            ));
        }
        if !(hopping > 0.0 && hopping.is_finite()) {
            return Err(Error::config("hopping", format!("must be positive, got {hopping}")));
        }
        if !(0.0..=hopping).contains(&bond) {
            return Err(Error::config(
                "bond",
                format!("must lie in [0, hopping = {hopping}], got {bond}"),
            ));
        }
        let cfg = Self {
            sites_per_lead,
            hopping,
            bond,
            protocol,
        };
        if cfg.protocol.end_time() >= cfg.horizon() {
            return Err(Error::config(
                "protocol",
                format!(
                    "ends at {} but reflections from the outer edges return at L/v_F = {}",
                    cfg.protocol.end_time(),
                    cfg.horizon()
                ),
            ));
        }
        Ok(cfg)
    }

    pub fn fermi_velocity(&self) -> f64 {
        2.0 * self.hopping
    }

    /// `L / v_F`: the time after which edge reflections reach the junction.
    pub fn horizon(&self) -> f64 {
        self.sites_per_lead as f64 / self.fermi_velocity()
    }

    pub fn bond_ratio(&self) -> f64 {
        self.bond / self.hopping
    }
}

/// Single-particle Hamiltonian of both leads with junction hopping `bond`.
pub fn hamiltonian(sites_per_lead: usize, hopping: f64, bond: f64) -> DMatrix<f64> {
    let n = 2 * sites_per_lead;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        let t = if i == sites_per_lead - 1 { bond } else { hopping };
        h[(i, i + 1)] = -t;
        h[(i + 1, i)] = -t;
    }
    h
}

/// Occupied single-particle orbitals (columns) of the disconnected leads
/// at half filling; `n = Φ Φᵀ`.
fn occupied_orbitals(sites_per_lead: usize, hopping: f64) -> Result<DMatrix<f64>> {
    let l = sites_per_lead;
    let lead = hamiltonian(l, hopping, 0.0).view((0, 0), (l, l)).into_owned();
    let eig = SymmetricEigen::try_new(lead, f64::EPSILON, 0)
        .ok_or_else(|| Error::LinearAlgebra("lead eigendecomposition failed".into()))?;
    let occupied: Vec<usize> = (0..l).filter(|&k| eig.eigenvalues[k] < 0.0).collect();
    if occupied.len() != l / 2 {
        return Err(Error::Integrity(format!(
            "expected {} negative-energy modes per lead, found {}",
            l / 2,
            occupied.len()
        )));
    }
    let mut phi = DMatrix::zeros(2 * l, l);
    for (col, &k) in occupied.iter().enumerate() {
        for i in 0..l {
            let v = eig.eigenvectors[(i, k)];
            phi[(i, col)] = v;
            phi[(l + i, l / 2 + col)] = v;
        }
    }
    Ok(phi)
}

/// Fermi projector of the disconnected leads, trace `L`.
pub fn ground_state_projector(sites_per_lead: usize, hopping: f64) -> Result<DMatrix<f64>> {
    let phi = occupied_orbitals(sites_per_lead, hopping)?;
    Ok(&phi * phi.transpose())
}

#[derive(Debug, Clone)]
struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Propagator {
    fn new(h: DMatrix<f64>) -> Result<Self> {
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
            .ok_or_else(|| Error::LinearAlgebra("hamiltonian eigendecomposition failed".into()))?;
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// `exp(-i H dt) (re + i im)`, all in real arithmetic.
    fn apply(&self, dt: f64, re: &DMatrix<f64>, im: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let vt = self.vectors.transpose();
        let mut p = &vt * re;
        let mut q = &vt * im;
        for (k, &e) in self.energies.iter().enumerate() {
            let (s, c) = (e * dt).sin_cos();
            let mut pr = p.row_mut(k);
            let mut qr = q.row_mut(k);
            for j in 0..pr.len() {
                let (a, b) = (pr[j], qr[j]);
                pr[j] = c * a + s * b;
                qr[j] = c * b - s * a;
            }
        }
        (&self.vectors * p, &self.vectors * q)
    }
}

/// Hermitian correlation matrix `M = P_L n_U P_L` restricted to the left lead.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Integrity("correlation matrix must be square".into()));
        }
        let dev = (&entries - entries.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if dev > HERMITIAN_TOL {
            return Err(Error::Integrity(format!(
                "correlation matrix deviates from Hermitian by {dev:.3e}"
            )));
        }
        Ok(Self { entries })
    }

    /// Upper-left `sites_per_lead` block of an evolved projector.
    pub fn from_projector(n_u: &DMatrix<Complex64>, sites_per_lead: usize) -> Result<Self> {
        Self::new(n_u.view((0, 0), (sites_per_lead, sites_per_lead)).into_owned())
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Ascending eigenvalues, clamped onto `[0, 1]`. Violations larger than
    /// `1e-10` abort.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::try_new(self.entries.clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::LinearAlgebra("correlation eigendecomposition failed".into()))?;
        let mut z: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        check_and_clamp(&mut z)?;
        z.sort_by(f64::total_cmp);
        Ok(z)
    }

    /// Real symmetric embedding `[[A, -B], [B, A]]` of `M = A + iB`; each
    /// eigenvalue of `M` appears twice in it.
    fn real_embedding(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut r = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                r[(i, j)] = z.re;
                r[(n + i, n + j)] = z.re;
                r[(i, n + j)] = -z.im;
                r[(n + i, j)] = z.im;
            }
        }
        r
    }
}

fn check_and_clamp(z: &mut [f64]) -> Result<()> {
    for v in z.iter_mut() {
        if !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(v) {
            return Err(Error::Integrity(format!("eigenvalue {v} outside [0, 1]")));
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(())
}

/// `S = Σ_j h(z_j)` over the spectrum of `M`, in nats.
pub fn entropy_eig(m: &CorrelationMatrix) -> Result<f64> {
    Ok(entropy_of_levels(&m.eigenvalues()?))
}

pub fn entropy_of_levels(levels: &[f64]) -> f64 {
    levels.iter().map(|&z| binary_entropy_unchecked(z)).sum()
}

/// `-Tr[M ln M + (1-M) ln(1-M)]` with the matrix function built as
/// `V f(Λ) Vᵀ` on the real embedding and traced, halved for the doubling.
pub fn entropy_matrix_function(m: &CorrelationMatrix) -> Result<f64> {
    let eig = SymmetricEigen::try_new(m.real_embedding(), f64::EPSILON, 0)
        .ok_or_else(|| Error::LinearAlgebra("embedding eigendecomposition failed".into()))?;
    let mut z: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    check_and_clamp(&mut z)?;
    let f = DMatrix::from_diagonal(&DVector::from_iterator(
        z.len(),
        z.iter().map(|&x| binary_entropy_unchecked(x)),
    ));
    let func = &eig.eigenvectors * f * eig.eigenvectors.transpose();
    Ok(0.5 * func.trace())
}

/// `χ(λ) = det(1 - n + n U† e^{iλP_L} U e^{-iλP_L})` by LU factorization.
pub fn fcs_determinant(
    n: &DMatrix<f64>,
    u: &DMatrix<Complex64>,
    sites_per_lead: usize,
    lambda: f64,
) -> Result<Complex64> {
    let dim = n.nrows();
    if u.shape() != (dim, dim) || sites_per_lead > dim {
        return Err(Error::domain("projector and evolution operator shapes disagree"));
    }
    let phase = Complex64::from_polar(1.0, lambda);
    let nc = n.map(|x| Complex64::new(x, 0.0));
    // e^{iλP_L} U: scale the first L rows.
    let mut eu = u.clone();
    for i in 0..sites_per_lead {
        let mut row = eu.row_mut(i);
        row *= phase;
    }
    let mut r = u.adjoint() * eu;
    // · e^{-iλP_L}: scale the first L columns.
    for j in 0..sites_per_lead {
        let mut col = r.column_mut(j);
        col *= phase.conj();
    }
    let a = DMatrix::<Complex64>::identity(dim, dim) - &nc + &nc * r;
    Ok(a.lu().determinant())
}

/// `χ(λ) = e^{-iλ·offset} Π_j (1 - z_j + z_j e^{iλ})`.
pub fn chi_from_levels(levels: &[f64], charge_offset: f64, lambda: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, lambda);
    levels
        .iter()
        .map(|&z| (1.0 - z) + z * phase)
        .product::<Complex64>()
        * Complex64::from_polar(1.0, -lambda * charge_offset)
}

pub fn chi_from_m(m: &CorrelationMatrix, charge_offset: f64, lambda: f64) -> Result<Complex64> {
    Ok(chi_from_levels(&m.eigenvalues()?, charge_offset, lambda))
}

/// Cumulants from the spectrum: each level contributes the cumulants of a
/// two-outcome variable, and `C_1 = Tr M - offset`.
pub fn cumulants_from_levels(levels: &[f64], charge_offset: f64, max_order: usize) -> Result<CountingStatistics> {
    model_cumulants(
        &FcsModel::bernoulli_set(levels.to_vec(), charge_offset)?,
        max_order,
    )
}

pub fn cumulants_from_m(m: &CorrelationMatrix, charge_offset: f64, max_order: usize) -> Result<CountingStatistics> {
    cumulants_from_levels(&m.eigenvalues()?, charge_offset, max_order)
}

/// Fermi-level transmission `4r²/(1+r²)²` of a single bond of relative
/// strength `r` between two semi-infinite chains.
pub fn bond_transmission(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("bond ratio must lie in [0, 1], got {r}")));
    }
    let s = 1.0 + r * r;
    Ok(4.0 * r * r / (s * s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Counts per unit `z`.
    pub density: Vec<f64>,
    pub interior_count: usize,
}

/// Histogram of the levels inside `(1e-6, 1 - 1e-6)` on `bins` equal bins.
pub fn eigenvalue_histogram(levels: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 20 {
        return Err(Error::domain(format!("histogram needs at least 20 bins, got {bins}")));
    }
    let width = 1.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut interior_count = 0;
    for &z in levels {
        if z > INTERIOR_DELTA && z < 1.0 - INTERIOR_DELTA {
            counts[((z / width) as usize).min(bins - 1)] += 1;
            interior_count += 1;
        }
    }
    Ok(Histogram {
        edges: (0..=bins).map(|k| k as f64 * width).collect(),
        density: counts.iter().map(|&c| c as f64 / width).collect(),
        interior_count,
    })
}

/// `U n U†` for the configured protocol at time `t`.
#[derive(Debug, Clone)]
pub struct EvolvedProjector {
    pub n_u: DMatrix<Complex64>,
    pub beyond_horizon: bool,
}

pub fn evolve_projector(n: &DMatrix<f64>, config: &LatticeConfig, t: f64) -> Result<EvolvedProjector> {
    let sim = Simulator::new(config.clone())?;
    let (u, beyond_horizon) = sim.evolution_operator(t)?;
    let nc = n.map(|x| Complex64::new(x, 0.0));
    Ok(EvolvedProjector {
        n_u: &u * nc * u.adjoint(),
        beyond_horizon,
    })
}

/// Observables at one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub eigenvalues: Vec<f64>,
    pub entropy: f64,
    pub cumulants: CountingStatistics,
    pub beyond_horizon: bool,
}

/// Precomputed spectra of the on/off Hamiltonians for one configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: LatticeConfig,
    off: Propagator,
    on: Propagator,
    orbitals: DMatrix<f64>,
}

impl Simulator {
    pub fn new(config: LatticeConfig) -> Result<Self> {
        let l = config.sites_per_lead;
        let off = Propagator::new(hamiltonian(l, config.hopping, 0.0))?;
        let on = Propagator::new(hamiltonian(l, config.hopping, config.bond))?;
        let orbitals = occupied_orbitals(l, config.hopping)?;
        Ok(Self {
            config,
            off,
            on,
            orbitals,
        })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    /// Initial Fermi projector `n`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.orbitals * self.orbitals.transpose()
    }

    /// `Tr(n P_L)`, the initial left-lead occupation.
    pub fn charge_offset(&self) -> f64 {
        let l = self.config.sites_per_lead;
        self.orbitals.rows(0, l).iter().map(|x| x * x).sum()
    }

    fn evolve(&self, t: f64, re: DMatrix<f64>, im: DMatrix<f64>, skip_leading_off: bool) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut state = (re, im);
        let mut touched = !skip_leading_off;
        for (on, dt) in self.config.protocol.segments(t) {
            if !on && !touched {
                // Orbitals are eigenstates of the disconnected leads; only
                // their phases change, leaving n invariant.
                continue;
            }
            touched = true;
            let prop = if on { &self.on } else { &self.off };
            state = prop.apply(dt, &state.0, &state.1);
        }
        state
    }

    fn check_time(&self, t: f64) -> Result<bool> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("time must be non-negative, got {t}")));
        }
        Ok(t >= self.config.horizon())
    }

    /// Single-particle evolution operator `U(t)` and the beyond-horizon flag.
    pub fn evolution_operator(&self, t: f64) -> Result<(DMatrix<Complex64>, bool)> {
        let flag = self.check_time(t)?;
        let dim = 2 * self.config.sites_per_lead;
        let (re, im) = self.evolve(t, DMatrix::identity(dim, dim), DMatrix::zeros(dim, dim), false);
        Ok((
            DMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[(i, j)], im[(i, j)])),
            flag,
        ))
    }

    /// `M(t)` built from the evolved occupied orbitals.
    pub fn correlation(&self, t: f64) -> Result<(CorrelationMatrix, bool)> {
        let flag = self.check_time(t)?;
        let l = self.config.sites_per_lead;
        let (re, im) = self.evolve(t, self.orbitals.clone(), DMatrix::zeros(2 * l, l), true);
        let a = re.rows(0, l);
        let b = im.rows(0, l);
        let real = a * a.transpose() + b * b.transpose();
        let imag = b * a.transpose() - a * b.transpose();
        let m = DMatrix::from_fn(l, l, |i, j| {
            // Symmetrize away gemm rounding.
            let re = 0.5 * (real[(i, j)] + real[(j, i)]);
            let im = 0.5 * (imag[(i, j)] - imag[(j, i)]);
            Complex64::new(re, im)
        });
        Ok((CorrelationMatrix::new(m)?, flag))
    }

    pub fn snapshot(&self, t: f64, max_order: usize) -> Result<Snapshot> {
        let (m, beyond_horizon) = self.correlation(t)?;
        let eigenvalues = m.eigenvalues()?;
        let cumulants = cumulants_from_levels(&eigenvalues, self.charge_offset(), max_order)?;
        Ok(Snapshot {
            t,
            entropy: entropy_of_levels(&eigenvalues),
            eigenvalues,
            cumulants,
            beyond_horizon,
        })
    }
}

/// Least-squares `y = slope · ln t + intercept`.
pub fn log_slope_fit(times: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::domain("log fit needs at least two paired points"));
    }
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::domain("log fit needs positive times"));
    }
    let n = times.len() as f64;
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("log fit needs distinct times"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// `count` logarithmically spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs<T: Copy>(m: &DMatrix<T>, f: impl Fn(T) -> f64) -> f64 {
        m.iter().fold(0.0, |acc, &x| acc.max(f(x)))
    }

    #[test]
    fn two_site_leads() {
        let n = ground_state_projector(2, 1.0).unwrap();
        assert!((n.trace() - 2.0).abs() < 1e-14);
        // Each lead fills its bonding orbital (1, 1)/√2.
        for (i, j) in [(0, 0), (0, 1), (1, 1), (2, 3), (3, 3)] {
            assert!((n[(i, j)] - 0.5).abs() < 1e-14);
        }
        assert_eq!(n[(1, 2)], 0.0);
    }

    #[test]
    fn projector_trace_is_half_filling() {
        for l in [4, 10, 40] {
            let n = ground_state_projector(l, 1.3).unwrap();
            assert!((n.trace() - l as f64).abs() < 1e-10);
            assert!(max_abs(&(&n * &n - &n), |x| x.abs()) < 1e-12);
        }
    }

    #[test]
    fn initial_correlation_is_pure() {
        let cfg = LatticeConfig::new(20, 1.0, 1.0, Protocol::never()).unwrap();
        let sim = Simulator::new(cfg).unwrap();
        let (m, _) = sim.correlation(0.0).unwrap();
        for z in m.eigenvalues().unwrap() {
            assert!(z < 1e-12 || z > 1.0 - 1e-12);
        }
        assert!(entropy_eig(&m).unwrap() < 1e-10);
    }

    #[test]
    fn config_validation() {
        let p = Protocol::single(5.0).unwrap();
        assert!(LatticeConfig::new(21, 1.0, 1.0, p.clone()).is_err());
        assert!(LatticeConfig::new(20, 0.0, 0.0, p.clone()).is_err());
        assert!(LatticeConfig::new(20, 1.0, 1.5, p.clone()).is_err());
        // Horizon L / 2J = 10.
        assert!(LatticeConfig::new(20, 1.0, 1.0, Protocol::single(10.0).unwrap()).is_err());
        assert!(LatticeConfig::new(20, 1.0, 1.0, p).is_ok());
        let err = LatticeConfig::new(20, 1.0, 2.0, Protocol::never()).unwrap_err();
        assert!(matches!(err, Error::Config { field: "bond", .. }));
    }

    #[test]
    fn protocol_validation_and_segments() {
        assert!(Protocol::new(vec![(-1.0, 2.0)]).is_err());
        assert!(Protocol::new(vec![(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(Protocol::new(vec![(2.0, 2.0)]).is_err());
        let p = Protocol::new(vec![(1.0, 3.0), (5.0, 6.0)]).unwrap();
        assert_eq!(p.segments(2.0), vec![(false, 1.0), (true, 1.0)]);
        assert_eq!(
            p.segments(8.0),
            vec![(false, 1.0), (true, 2.0), (false, 2.0), (true, 1.0), (false, 2.0)]
        );
        assert_eq!(Protocol::never().segments(3.0), vec![(false, 3.0)]);
    }

    #[test]
    fn config_json() {
        let c: LatticeConfig = serde_json::from_str(
            r#"{"sites_per_lead": 40, "bond": 0.5, "protocol": {"intervals": [[0, 12]]}}"#,
        )
        .unwrap();
        assert_eq!(c.hopping, 1.0);
        assert!(serde_json::from_str::<LatticeConfig>(
            r#"{"sites_per_lead": 41, "bond": 0.5, "protocol": {"intervals": []}}"#
        )
        .is_err());
    }

    #[test]
    fn never_connected_leaves_projector_unchanged() {
        let cfg = LatticeConfig::new(10, 1.0, 1.0, Protocol::never()).unwrap();
        let n = ground_state_projector(10, 1.0).unwrap();
        let ev = evolve_projector(&n, &cfg, 3.0).unwrap();
        let diff = ev.n_u - n.map(|x| Complex64::new(x, 0.0));
        assert!(max_abs(&diff, |z| z.norm()) < 1e-12);
    }

    #[test]
    fn evolution_preserves_idempotence_and_charge() {
        let cfg = LatticeConfig::new(20, 1.0, 0.7, Protocol::new(vec![(0.5, 3.0), (4.0, 7.5)]).unwrap()).unwrap();
        let n = ground_state_projector(20, 1.0).unwrap();
        let ev = evolve_projector(&n, &cfg, 8.0).unwrap();
        let idem = &ev.n_u * &ev.n_u - &ev.n_u;
        assert!(max_abs(&idem, |z| z.norm()) <= 1e-10);
        assert!((ev.n_u.trace().re - n.trace()).abs() <= 1e-10);
        assert!(!ev.beyond_horizon);
        assert!(evolve_projector(&n, &cfg, 10.5).unwrap().beyond_horizon);
    }

    #[test]
    fn connection_generates_mixed_levels() {
        let cfg = LatticeConfig::new(40, 1.0, 1.0, Protocol::single(15.0).unwrap()).unwrap();
        let sim = Simulator::new(cfg).unwrap();
        let (m, _) = sim.correlation(15.0).unwrap();
        let interior = m.eigenvalues().unwrap().into_iter().filter(|&z| z > 0.01 && z < 0.99).count();
        assert!(interior > 0);
    }

    #[test]
    fn orbital_route_matches_full_propagator() {
        let cfg = LatticeConfig::new(16, 1.0, 0.8, Protocol::new(vec![(0.3, 2.0), (3.0, 5.0)]).unwrap()).unwrap();
        let sim = Simulator::new(cfg.clone()).unwrap();
        let (m, _) = sim.correlation(6.0).unwrap();
        let n = sim.projector();
        let ev = evolve_projector(&n, &cfg, 6.0).unwrap();
        let m2 = CorrelationMatrix::from_projector(&ev.n_u, 16).unwrap();
        assert!(max_abs(&(m.entries() - m2.entries()), |z| z.norm()) < 1e-12);
    }

    #[test]
    fn entropy_edge_cases() {
        let zero = CorrelationMatrix::new(DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(entropy_eig(&zero).unwrap(), 0.0);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]));
        let m = CorrelationMatrix::new(diag).unwrap();
        assert!((entropy_eig(&m).unwrap() - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bad_spectrum_is_rejected() {
        let m = CorrelationMatrix::new(DMatrix::from_element(1, 1, Complex64::new(1.1, 0.0))).unwrap();
        assert!(matches!(m.eigenvalues(), Err(Error::Integrity(_))));
        let nonherm = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.1),
            Complex64::new(0.1, 0.1),
            Complex64::new(0.5, 0.0),
        ]);
        assert!(CorrelationMatrix::new(nonherm).is_err());
    }

    #[test]
    fn entropy_two_code_paths_agree() {
        let cfg = LatticeConfig::new(20, 1.0, 0.7, Protocol::new(vec![(0.0, 4.0), (5.0, 8.0)]).unwrap()).unwrap();
        let sim = Simulator::new(cfg).unwrap();
        let (m, _) = sim.correlation(9.0).unwrap();
        let a = entropy_eig(&m).unwrap();
        let b = entropy_matrix_function(&m).unwrap();
        assert!(a > 0.1);
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }

    #[test]
    fn determinant_special_values() {
        let cfg = LatticeConfig::new(10, 1.0, 1.0, Protocol::single(3.0).unwrap()).unwrap();
        let sim = Simulator::new(cfg).unwrap();
        let n = sim.projector();
        let (u, _) = sim.evolution_operator(3.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!((fcs_determinant(&n, &u, 10, 0.0).unwrap() - one).norm() < 1e-12);
        assert!((fcs_determinant(&n, &u, 10, 2.0 * std::f64::consts::PI).unwrap() - one).norm() < 1e-12);
        let id = DMatrix::<Complex64>::identity(20, 20);
        for l in [-2.0, 0.7, 3.0] {
            assert!((fcs_determinant(&n, &id, 10, l).unwrap() - one).norm() < 1e-12);
        }
    }

    #[test]
    fn chi_from_projector_levels_has_unit_modulus() {
        let levels = [0.0, 1.0, 1.0, 0.0];
        for l in [-3.0, -1.0, 0.5, 2.9] {
            assert!((chi_from_levels(&levels, 2.0, l).norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(chi_from_levels(&[0.3, 0.6], 1.0, 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn determinant_matches_levels_small_chain() {
        let cfg = LatticeConfig::new(12, 1.0, 0.6, Protocol::new(vec![(0.2, 2.2), (3.0, 4.0)]).unwrap()).unwrap();
        let sim = Simulator::new(cfg).unwrap();
        let n = sim.projector();
        let (u, _) = sim.evolution_operator(5.0).unwrap();
        let (m, _) = sim.correlation(5.0).unwrap();
        let offset = sim.charge_offset();
        assert!((offset - 6.0).abs() < 1e-12);
        for k in -10..=10 {
            let l = std::f64::consts::PI * k as f64 / 10.0;
            let a = fcs_determinant(&n, &u, 12, l).unwrap();
            let b = chi_from_m(&m, offset, l).unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-300), "λ={l}: {a} vs {b}");
        }
    }

    #[test]
    fn projector_has_no_higher_cumulants() {
        let c = cumulants_from_levels(&[0.0, 1.0, 1.0, 0.0, 1.0], 3.0, 8).unwrap();
        assert_eq!(c.get(1), 0.0);
        for m in 2..=8 {
            assert_eq!(c.get(m), 0.0);
        }
    }

    #[test]
    fn bond_transmission_values() {
        assert_eq!(bond_transmission(1.0).unwrap(), 1.0);
        assert_eq!(bond_transmission(0.0).unwrap(), 0.0);
        assert!((bond_transmission(0.5).unwrap() - 0.64).abs() < 1e-15);
        assert!(bond_transmission(1.2).is_err());
    }

    #[test]
    fn histogram_basics() {
        assert!(eigenvalue_histogram(&[0.5], 10).is_err());
        let h = eigenvalue_histogram(&[0.0, 1.0, 1e-8], 20).unwrap();
        assert_eq!(h.interior_count, 0);
        assert!(h.density.iter().all(|&d| d == 0.0));
        let h = eigenvalue_histogram(&[0.12, 0.13, 0.9], 20).unwrap();
        assert_eq!(h.interior_count, 3);
        assert_eq!(h.density[2], 40.0);
        assert_eq!(h.edges.len(), 21);
    }

    #[test]
    fn log_fit_recovers_slope() {
        let ts = log_grid(2.0, 50.0, 7);
        let ys: Vec<f64> = ts.iter().map(|t| 0.25 * t.ln() + 1.5).collect();
        let (s, c) = log_slope_fit(&ts, &ys).unwrap();
        assert!((s - 0.25).abs() < 1e-13 && (c - 1.5).abs() < 1e-12);
        assert!(log_slope_fit(&[1.0], &[1.0]).is_err());
    }
}
