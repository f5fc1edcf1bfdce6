//! Spectral density `μ(z)` of the reduced correlation matrix and the
//! entropy integral `S = ∫₀¹ μ(z) h(z) dz`.
//!
//! Point masses at `z = 0` and `z = 1` are not represented: `h` vanishes
//! there.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::special::binary_entropy_unchecked;

/// Prefactor convention for the imperfect-transmission density.
///
/// [`Normalization::Calibrated`] uses `G/2π²`, the value for which the
/// unit-transmission density reduces to `C_2/(z(1-z))` and reproduces
/// `S = π²/3 · C_2`; it is also what the analytic continuation of
/// `log χ` gives and what lattice eigenvalue counts follow.
/// [`Normalization::AsPrinted`] keeps the `G/π²` prefactor found in the
/// literature formula, twice the calibrated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    Calibrated,
    AsPrinted,
}

impl Normalization {
    pub fn prefactor(self, g: f64) -> f64 {
        match self {
            Normalization::Calibrated => g / (2.0 * PI * PI),
            Normalization::AsPrinted => g / (PI * PI),
        }
    }

    pub fn note(self) -> &'static str {
        match self {
            Normalization::Calibrated => "calibrated: prefactor G/2pi^2 (half the printed G/pi^2)",
            Normalization::AsPrinted => "as printed: prefactor G/pi^2",
        }
    }
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density on `(0, 1)`, optionally vanishing on a declared gap.
#[derive(Clone)]
pub struct SpectralMeasure {
    density: Density,
    support_gap: Option<(f64, f64)>,
    normalization_note: String,
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralMeasure")
            .field("support_gap", &self.support_gap)
            .field("normalization_note", &self.normalization_note)
            .finish_non_exhaustive()
    }
}

impl SpectralMeasure {
    pub fn from_fn<F>(density: F, support_gap: Option<(f64, f64)>, note: impl Into<String>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Some((lo, hi)) = support_gap {
            if !(0.0 < lo && lo <= hi && hi < 1.0) {
                return Err(Error::domain(format!("support gap ({lo}, {hi}) must lie inside (0, 1)")));
            }
        }
        Ok(Self {
            density: Arc::new(density),
            support_gap,
            normalization_note: note.into(),
        })
    }

    /// `C_2 / (z(1-z))`, the density of gaussian statistics.
    pub fn gaussian(c2: f64) -> Result<Self> {
        if !(c2 >= 0.0) {
            return Err(Error::domain(format!("variance must be non-negative, got {c2}")));
        }
        Self::from_fn(move |z| c2 / (z * (1.0 - z)), None, "gaussian: C2/(z(1-z))")
    }

    /// Closed-form density at transmission `d`, gap `(z-, z+)` declared.
    pub fn imperfect(g: f64, d: f64, norm: Normalization) -> Result<Self> {
        check_g(g)?;
        let (lo, hi) = support_edges(d)?;
        let gap = (hi > lo).then_some((lo, hi));
        let prefactor = norm.prefactor(g);
        Self::from_fn(move |z| prefactor * mu_shape(d, z), gap, norm.note())
    }

    pub fn density(&self, z: f64) -> f64 {
        if let Some((lo, hi)) = self.support_gap {
            if z > lo && z < hi {
                return 0.0;
            }
        }
        (self.density)(z)
    }

    pub fn support_gap(&self) -> Option<(f64, f64)> {
        self.support_gap
    }

    pub fn normalization_note(&self) -> &str {
        &self.normalization_note
    }

    /// `n` midpoint samples `(z, μ(z))` across `(0, 1)`.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let z = (k as f64 + 0.5) / n as f64;
                (z, self.density(z))
            })
            .collect()
    }
}

fn check_g(g: f64) -> Result<()> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::domain(format!("G must be positive, got {g}")));
    }
    Ok(())
}

fn check_open_transmission(d: f64) -> Result<()> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::domain(format!("transmission must lie in (0, 1], got {d}")));
    }
    Ok(())
}

/// `D/(z(1-z)) · Re[|1-2z| / sqrt(D² - 4Dz(1-z))]`, the density per unit
/// prefactor. Zero inside the gap, where the radicand is negative.
fn mu_shape(d: f64, z: f64) -> f64 {
    let v = z * (1.0 - z);
    if d == 1.0 {
        // Radicand (1-2z)², ratio 1 (including the z = 1/2 limit).
        return 1.0 / v;
    }
    // D² - 4Dz(1-z) = 4D (z - z-)(z - z+), factored to keep precision
    // next to the gap edges.
    let r = (1.0 - d).sqrt();
    let (lo, hi) = (0.5 * (1.0 - r), 0.5 * (1.0 + r));
    let radicand = 4.0 * d * (z - lo) * (z - hi);
    if radicand <= 0.0 {
        return 0.0;
    }
    d / v * (1.0 - 2.0 * z).abs() / radicand.sqrt()
}

/// Density for transmission `d` with the calibrated `G/2π²` prefactor.
pub fn mu_imperfect(g: f64, d: f64, z: f64) -> Result<f64> {
    mu_imperfect_with(g, d, z, Normalization::Calibrated)
}

pub fn mu_imperfect_with(g: f64, d: f64, z: f64, norm: Normalization) -> Result<f64> {
    check_g(g)?;
    check_open_transmission(d)?;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(format!("z must lie strictly inside (0, 1), got {z}")));
    }
    Ok(norm.prefactor(g) * mu_shape(d, z))
}

/// `z± = (1 ± sqrt(1-D)) / 2`.
pub fn support_edges(d: f64) -> Result<(f64, f64)> {
    check_open_transmission(d)?;
    let r = (1.0 - d).sqrt();
    Ok((0.5 * (1.0 - r), 0.5 * (1.0 + r)))
}

fn entropy_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-11,
        rel: 1e-12,
        max_subdivisions: 4000,
    }
}

/// `∫ f` over `[a, b]` where `f` may have a log singularity at `a` and
/// an inverse-square-root singularity at `b`. Splits at the midpoint,
/// maps the left half with `z = a + (m-a)e^{-s}` and the right half with
/// `z = b - v²`.
fn integrate_log_left_sqrt_right<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64> {
    let half = 0.5 * (b - a);
    // s up to 700 reaches the bottom of the double range.
    let left = quad::integrate(
        |s: f64| {
            let e = (-s).exp();
            let z = a + half * e;
            if z <= a {
                0.0
            } else {
                f(z) * half * e
            }
        },
        0.0,
        700.0,
        entropy_tolerance(),
    )?;
    let right = quad::integrate(
        |v: f64| {
            let z = b - v * v;
            if z >= b {
                0.0
            } else {
                2.0 * v * f(z)
            }
        },
        0.0,
        half.sqrt(),
        entropy_tolerance(),
    )?;
    Ok(left.value + right.value)
}

/// `S = ∫₀¹ μ(z) h(z) dz` with `h` the binary entropy. The range is split
/// at the gap edges (or at 1/2), and each piece uses endpoint substitutions
/// for the log singularity at 0 or 1 and a possible inverse-square-root
/// edge.
pub fn entropy_from_measure(m: &SpectralMeasure) -> Result<f64> {
    let (lo, hi) = m.support_gap.unwrap_or((0.5, 0.5));
    // Both halves are parameterized by the distance `y` to their outer
    // endpoint so `h(y)` keeps full precision as `y → 0`.
    let weighted = |z: f64, y: f64| {
        if y <= 0.0 || !(z > 0.0 && z < 1.0) {
            return 0.0;
        }
        let mu = m.density(z);
        if mu == 0.0 || !mu.is_finite() {
            0.0
        } else {
            mu * binary_entropy_unchecked(y)
        }
    };
    let left = integrate_log_left_sqrt_right(&|y: f64| weighted(y, y), 0.0, lo)?;
    let right = integrate_log_left_sqrt_right(&|y: f64| weighted(1.0 - y, y), 0.0, 1.0 - hi)?;
    Ok(left + right)
}

/// Density recovered from the generating function,
/// `μ(z) = (1/π) |Im ∂_z log χ(λ(z - i0))|`, `λ(z) = π - i ln(1/z - 1)`.
///
/// `chi_log` must accept complex counting fields. The `-i0` is realized
/// as a small negative imaginary shift and the derivative by a central
/// difference along the real axis.
pub fn mu_from_chi<F>(chi_log: F, z: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(format!("z must lie strictly inside (0, 1), got {z}")));
    }
    let scale = z.min(1.0 - z);
    let eps = 1e-9 * scale;
    let h = 1e-5 * scale;
    let lambda = |x: f64| {
        let zc = Complex64::new(x, -eps);
        Complex64::new(PI, 0.0) - Complex64::i() * (1.0 / zc - 1.0).ln()
    };
    let d = (chi_log(lambda(z + h)) - chi_log(lambda(z - h))) / (2.0 * h);
    Ok(d.im.abs() / PI)
}

/// `S(D)/S(1)` for the closed-form density; independent of `G`.
pub fn rescaling_factor(d: f64) -> Result<f64> {
    check_open_transmission(d)?;
    let unit = |dd: f64| -> Result<f64> {
        let (lo, hi) = support_edges(dd)?;
        let gap = (hi > lo).then_some((lo, hi));
        let m = SpectralMeasure::from_fn(move |z| mu_shape(dd, z), gap, "unit prefactor")?;
        entropy_from_measure(&m)
    };
    if d == 1.0 {
        return Ok(1.0);
    }
    Ok(unit(d)? / unit(1.0)?)
}

/// [`rescaling_factor`] for an explicit `G`. The prefactor multiplies both
/// entropies and is factored out before the ratio is taken.
pub fn rescaling_factor_for(g: f64, d: f64) -> Result<f64> {
    check_g(g)?;
    rescaling_factor(d)
}

/// `S(D)` for the closed-form density at the given normalization.
pub fn entropy_imperfect(g: f64, d: f64, norm: Normalization) -> Result<f64> {
    entropy_from_measure(&SpectralMeasure::imperfect(g, d, norm)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{log_chi_complex, FcsModel};
    use approx::assert_relative_eq;

    #[test]
    fn unit_transmission_density_is_gaussian_shape() {
        let g = 3.0;
        for z in [0.01, 0.2, 0.45, 0.5, 0.55, 0.93] {
            let mu = mu_imperfect(g, 1.0, z).unwrap();
            assert_relative_eq!(mu, g / (2.0 * PI * PI) / (z * (1.0 - z)), max_relative = 1e-13);
        }
    }

    #[test]
    fn density_vanishes_inside_gap() {
        assert_eq!(mu_imperfect(1.0, 0.75, 0.5).unwrap(), 0.0);
        assert_eq!(mu_imperfect(1.0, 0.75, 0.3).unwrap(), 0.0);
        assert!(mu_imperfect(1.0, 0.75, 0.2).unwrap() > 0.0);
    }

    #[test]
    fn density_edge_diverges_as_inverse_sqrt() {
        let (_, hi) = support_edges(0.75).unwrap();
        let a = mu_imperfect(1.0, 0.75, hi + 1e-6).unwrap();
        let b = mu_imperfect(1.0, 0.75, hi + 4e-6).unwrap();
        // Quadrupling the distance halves the density.
        assert!((a / b - 2.0).abs() < 1e-3);
    }

    #[test]
    fn density_domain() {
        assert!(mu_imperfect(1.0, 0.5, 0.0).is_err());
        assert!(mu_imperfect(1.0, 0.5, 1.0).is_err());
        assert!(mu_imperfect(1.0, 0.0, 0.3).is_err());
        assert!(mu_imperfect(-1.0, 0.5, 0.3).is_err());
    }

    #[test]
    fn printed_normalization_is_double() {
        let a = mu_imperfect_with(2.0, 0.6, 0.1, Normalization::Calibrated).unwrap();
        let b = mu_imperfect_with(2.0, 0.6, 0.1, Normalization::AsPrinted).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-15);
    }

    #[test]
    fn edges() {
        assert_eq!(support_edges(0.75).unwrap(), (0.25, 0.75));
        assert_eq!(support_edges(1.0).unwrap(), (0.5, 0.5));
        let d = 1e-6;
        let (lo, hi) = support_edges(d).unwrap();
        assert!((lo - d / 4.0).abs() < 1e-11);
        assert!((hi - (1.0 - d / 4.0)).abs() < 1e-11);
        let (lo, hi) = support_edges(0.64).unwrap();
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 0.8).abs() < 1e-15);
    }

    #[test]
    fn gaussian_measure_entropy() {
        for c2 in [0.1, 1.0, 10.0] {
            let s = entropy_from_measure(&SpectralMeasure::gaussian(c2).unwrap()).unwrap();
            assert!((s / c2 - PI * PI / 3.0).abs() < 1e-7, "c2={c2}: {}", s / c2);
        }
    }

    #[test]
    fn zero_measure_entropy() {
        let m = SpectralMeasure::from_fn(|_| 0.0, None, "zero").unwrap();
        assert_eq!(entropy_from_measure(&m).unwrap(), 0.0);
    }

    #[test]
    fn narrow_bump_at_half_gives_ln2() {
        let width: f64 = 1e-3;
        let norm = 1.0 / (width * (2.0 * PI).sqrt());
        let m = SpectralMeasure::from_fn(
            move |z| norm * (-(z - 0.5).powi(2) / (2.0 * width * width)).exp(),
            None,
            "bump",
        )
        .unwrap();
        let s = entropy_from_measure(&m).unwrap();
        // h''(1/2) = -4, so the bump shifts the value by -2 width².
        assert!((s - 2.0f64.ln()).abs() < 3.0 * width * width);
    }

    #[test]
    fn calibrated_unit_transmission_entropy_is_g_over_six() {
        let g = 4.2;
        let s = entropy_imperfect(g, 1.0, Normalization::Calibrated).unwrap();
        assert!((s - g / 6.0).abs() < 1e-8);
    }

    #[test]
    fn mu_from_gaussian_chi() {
        let c2 = 0.7;
        for z in [0.05, 0.3, 0.5, 0.81] {
            let mu = mu_from_chi(|l| -l * l * (c2 / 2.0), z).unwrap();
            assert_relative_eq!(mu, c2 / (z * (1.0 - z)), max_relative = 1e-6);
        }
    }

    #[test]
    fn mu_from_single_level_vanishes_away_from_it() {
        let m = FcsModel::bernoulli_set(vec![0.3], 0.0).unwrap();
        for z in [0.1, 0.5, 0.9] {
            let mu = mu_from_chi(|l| log_chi_complex(&m, l), z).unwrap();
            assert!(mu < 1e-6, "z={z}: {mu}");
        }
    }

    #[test]
    fn mu_from_imperfect_chi_matches_calibrated_formula() {
        let (g, d) = (5.0, 0.64);
        let m = FcsModel::imperfect(g, d).unwrap();
        for z in [0.03, 0.1, 0.15, 0.85, 0.95] {
            let from_chi = mu_from_chi(|l| log_chi_complex(&m, l), z).unwrap();
            let closed = mu_imperfect(g, d, z).unwrap();
            assert_relative_eq!(from_chi, closed, max_relative = 1e-5);
        }
        for z in [0.3, 0.5, 0.7] {
            assert!(mu_from_chi(|l| log_chi_complex(&m, l), z).unwrap() < 1e-6);
        }
    }

    #[test]
    fn rescaling_reference_values() {
        assert_eq!(rescaling_factor(1.0).unwrap(), 1.0);
        // Frozen from a 30-digit quadrature of the closed-form density.
        assert!((rescaling_factor(0.5).unwrap() - 0.589_644_559_352_492_5).abs() < 1e-6);
        assert!(rescaling_factor(1e-6).unwrap() < 1e-4);
        assert!(rescaling_factor(0.0).is_err());
    }

    #[test]
    fn rescaling_is_increasing_and_above_gaussian_ratio() {
        let grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
        let f: Vec<f64> = grid.iter().map(|&d| rescaling_factor(d).unwrap()).collect();
        for w in f.windows(2) {
            assert!(w[1] > w[0]);
        }
        for (&d, &fd) in grid.iter().zip(&f) {
            if d <= 0.5 {
                assert!(fd > d);
            }
        }
    }

    #[test]
    fn rescaling_is_g_independent() {
        for d in [0.2, 0.5, 0.9] {
            assert_eq!(
                rescaling_factor_for(1.0, d).unwrap().to_bits(),
                rescaling_factor_for(17.3, d).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn gap_matches_zero_set() {
        for d in [0.3, 0.64, 0.75, 0.95] {
            let (lo, hi) = support_edges(d).unwrap();
            let step = 1e-4;
            let zs: Vec<f64> = (1..10_000).map(|k| k as f64 * step).collect();
            let zero: Vec<f64> = zs
                .iter()
                .copied()
                .filter(|&z| mu_imperfect(1.0, d, z).unwrap() == 0.0)
                .collect();
            let first = zero.first().unwrap();
            let last = zero.last().unwrap();
            assert!((first - lo).abs() <= step, "D={d}: {first} vs {lo}");
            assert!((last - hi).abs() <= step, "D={d}: {last} vs {hi}");
        }
    }

    proptest::proptest! {
        #[test]
        fn density_is_symmetric(d in 0.01f64..=1.0, z in 0.001f64..0.999) {
            let (lo, hi) = support_edges(d).unwrap();
            proptest::prop_assume!((z - lo).abs() > 1e-6 && (z - hi).abs() > 1e-6);
            let a = mu_imperfect(2.0, d, z).unwrap();
            let b = mu_imperfect(2.0, d, 1.0 - z).unwrap();
            proptest::prop_assert!((a - b).abs() <= 1e-9 * a.max(b).max(1.0));
        }
    }
}
