//! On-shell plane waves and the translation × reflection form of the Dirac operator.
//!
//! Natural units (ħ = c = 1). A plane wave is ψ(x) = u·exp(−i Σ_n K_n x_n), so
//! i∂_n ψ = K_n ψ on every axis and the free equation reads
//! (K₀γ₀ − K₁γ₁ − K₂γ₂ − K₃γ₃)u = K_M u.
//!
//! The operator T̂_n = K_n⁻¹ i∂_n leaves a plane wave unchanged, which is the
//! same as shifting its argument by ΔX_n = 2π/K_n. Composing T̂_n with the
//! reflection R̂_n = γ_n gives a glide reflection; summing the glides with the
//! K_n weights reproduces the Dirac operator.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{GammaSet, Matrix4c, SIGNATURE};
use crate::error::{Error, Result};

pub type Spinor = Vector4<Complex64>;

/// Relative tolerance of the on-shell test.
pub const ON_SHELL_TOL: f64 = 1e-12;
/// Number of spacetime probe points used by residual checks.
pub const PROBE_COUNT: usize = 16;
/// Seed used when no seed is supplied.
pub const DEFAULT_SEED: u64 = 42;

/// Wave four-vector (K₀, K₁, K₂, K₃) with mass wave number K_M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourMomentum {
    k: [f64; 4],
    k_m: f64,
}

impl FourMomentum {
    pub fn new(k: [f64; 4], k_m: f64) -> Result<Self> {
        if !(k_m.is_finite() && k_m >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be finite and >= 0, got {k_m}"),
            });
        }
        if k.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "momentum",
                reason: "components must be finite".into(),
            });
        }
        Ok(FourMomentum { k, k_m })
    }

    /// Positive-energy on-shell momentum with K₀ fixed by the dispersion relation.
    pub fn on_shell(spatial: [f64; 3], k_m: f64) -> Result<Self> {
        let p2: f64 = spatial.iter().map(|c| c * c).sum();
        let k0 = (p2 + k_m * k_m).sqrt();
        FourMomentum::new([k0, spatial[0], spatial[1], spatial[2]], k_m)
    }

    pub fn components(&self) -> [f64; 4] {
        self.k
    }

    pub fn component(&self, axis: usize) -> f64 {
        self.k[axis]
    }

    pub fn energy(&self) -> f64 {
        self.k[0]
    }

    pub fn mass(&self) -> f64 {
        self.k_m
    }

    fn scale2(&self) -> f64 {
        if self.k_m > 0.0 {
            self.k_m * self.k_m
        } else {
            self.k[0] * self.k[0]
        }
    }

    pub fn is_on_shell(&self) -> bool {
        dispersion_residual(self).abs() <= ON_SHELL_TOL * self.scale2()
    }

    fn require_on_shell(&self) -> Result<()> {
        if self.is_on_shell() && self.k[0] > 0.0 {
            Ok(())
        } else {
            Err(Error::OffShell {
                residual: dispersion_residual(self),
            })
        }
    }
}

/// K₀² − K₁² − K₂² − K₃² − K_M².
pub fn dispersion_residual(k: &FourMomentum) -> f64 {
    let [k0, k1, k2, k3] = k.k;
    k0 * k0 - k1 * k1 - k2 * k2 - k3 * k3 - k.k_m * k.k_m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinBranch {
    Up,
    Down,
}

impl SpinBranch {
    fn standard_seed(self) -> usize {
        match self {
            SpinBranch::Up => 0,
            SpinBranch::Down => 1,
        }
    }
}

impl fmt::Display for SpinBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinBranch::Up => "spin-up",
            SpinBranch::Down => "spin-down",
        })
    }
}

impl FromStr for SpinBranch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "spin-up" => Ok(SpinBranch::Up),
            "down" | "spin-down" => Ok(SpinBranch::Down),
            other => Err(Error::InvalidParameter {
                name: "branch",
                reason: format!("expected `up` or `down`, got `{other}`"),
            }),
        }
    }
}

/// Unit-norm four-component spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracSpinor(Spinor);

impl DiracSpinor {
    /// Normalizes `u`; `None` for the zero vector.
    pub fn normalized(u: Spinor) -> Option<Self> {
        let norm = u.norm();
        (norm > 0.0).then(|| DiracSpinor(u / Complex64::new(norm, 0.0)))
    }

    pub fn as_vector(&self) -> &Spinor {
        &self.0
    }

    pub fn into_vector(self) -> Spinor {
        self.0
    }
}

/// K₀γ₀ − K₁γ₁ − K₂γ₂ − K₃γ₃.
pub fn momentum_operator(k: &FourMomentum, g: &GammaSet) -> Matrix4c {
    (0..4).fold(Matrix4c::zeros(), |acc, n| {
        acc + g.gamma(n) * Complex64::new(SIGNATURE[n] * k.k[n], 0.0)
    })
}

/// ‖(K₀γ₀ − K·γ − K_M)u‖ evaluated directly in momentum space.
pub fn dirac_residual(k: &FourMomentum, g: &GammaSet, u: &Spinor) -> f64 {
    (momentum_operator(k, g) * u - u * Complex64::new(k.k_m, 0.0)).norm()
}

/// Positive-energy solution of the momentum-space Dirac equation.
///
/// Projects the rest-frame spinor of the chosen branch with (K̸ + K_M), which
/// maps onto the null space of K̸ − K_M on shell. The down branch is
/// orthogonalized against the up branch.
pub fn plane_wave_spinor(k: &FourMomentum, g: &GammaSet, branch: SpinBranch) -> Result<DiracSpinor> {
    k.require_on_shell()?;
    let projector = momentum_operator(k, g) + Matrix4c::identity() * Complex64::new(k.k_m, 0.0);
    let seed = |index: usize| {
        let mut e = Spinor::zeros();
        e[index] = Complex64::new(1.0, 0.0);
        projector * (g.from_standard() * e)
    };
    let up = DiracSpinor::normalized(seed(SpinBranch::Up.standard_seed())).ok_or(Error::OffShell {
        residual: dispersion_residual(k),
    })?;
    match branch {
        SpinBranch::Up => Ok(up),
        SpinBranch::Down => {
            let raw = seed(SpinBranch::Down.standard_seed());
            let overlap = up.0.dotc(&raw);
            DiracSpinor::normalized(raw - up.0 * overlap).ok_or(Error::OffShell {
                residual: dispersion_residual(k),
            })
        }
    }
}

/// ψ(x) = amplitude · exp(−i Σ_n K_n x_n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveField {
    pub amplitude: Spinor,
    pub momentum: FourMomentum,
}

impl PlaneWaveField {
    pub fn new(spinor: DiracSpinor, momentum: FourMomentum) -> Self {
        PlaneWaveField {
            amplitude: spinor.into_vector(),
            momentum,
        }
    }

    pub fn phase(&self, x: &[f64; 4]) -> Complex64 {
        let arg: f64 = self.momentum.k.iter().zip(x).map(|(k, x)| k * x).sum();
        Complex64::from_polar(1.0, -arg)
    }

    pub fn evaluate(&self, x: &[f64; 4]) -> Spinor {
        self.amplitude * self.phase(x)
    }

    fn with_amplitude(&self, amplitude: Spinor) -> Self {
        PlaneWaveField {
            amplitude,
            momentum: self.momentum,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.with_amplitude(self.amplitude * Complex64::new(factor, 0.0))
    }

    /// Sum of two fields sharing the same momentum.
    pub fn add(&self, other: &PlaneWaveField) -> Self {
        debug_assert_eq!(self.momentum, other.momentum);
        self.with_amplitude(self.amplitude + other.amplitude)
    }
}

/// Deterministic spacetime probe points in [−2π/K_M, 2π/K_M]⁴.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub seed: u64,
    pub points: Vec<[f64; 4]>,
}

impl ProbeSet {
    pub fn new(seed: u64, k_m: f64) -> Self {
        let half_width = if k_m > 0.0 { 2.0 * PI / k_m } else { 2.0 * PI };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..PROBE_COUNT)
            .map(|_| std::array::from_fn(|_| rng.random_range(-half_width..=half_width)))
            .collect();
        ProbeSet { seed, points }
    }

    fn max_deviation(&self, lhs: impl Fn(&[f64; 4]) -> Spinor, rhs: impl Fn(&[f64; 4]) -> Spinor) -> f64 {
        self.points
            .iter()
            .map(|x| (lhs(x) - rhs(x)).norm())
            .fold(0.0, f64::max)
    }
}

fn check_axis(axis: usize) -> Result<()> {
    if axis < 4 {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: axis, bound: 4 })
    }
}

/// i∂_axis applied analytically: multiplies the amplitude by K_axis.
pub fn i_partial(f: &PlaneWaveField, axis: usize) -> Result<PlaneWaveField> {
    check_axis(axis)?;
    Ok(f.scaled(f.momentum.k[axis]))
}

/// Shift ΔX_axis = 2π/K_axis.
pub fn translation_distance(k: &FourMomentum, axis: usize) -> Result<f64> {
    check_axis(axis)?;
    let k_axis = k.k[axis];
    if k_axis == 0.0 {
        Err(Error::TranslationUndefined { axis })
    } else {
        Ok(2.0 * PI / k_axis)
    }
}

/// T̂_axis = K_axis⁻¹ i∂_axis, together with the worst deviation of T̂ψ(x)
/// from ψ(x + ΔX_axis) over the probe set.
pub fn translation_apply(
    f: &PlaneWaveField,
    axis: usize,
    probes: &ProbeSet,
) -> Result<(PlaneWaveField, f64)> {
    let shift = translation_distance(&f.momentum, axis)?;
    let translated = i_partial(f, axis)?.scaled(1.0 / f.momentum.k[axis]);
    let residual = probes.max_deviation(
        |x| translated.evaluate(x),
        |x| {
            let mut shifted = *x;
            shifted[axis] += shift;
            f.evaluate(&shifted)
        },
    );
    Ok((translated, residual))
}

/// T̂_axis R̂_axis ψ: reflect the spinor with γ_axis, then translate.
pub fn glide_reflection_apply(f: &PlaneWaveField, axis: usize, g: &GammaSet) -> Result<PlaneWaveField> {
    translation_distance(&f.momentum, axis)?;
    let reflected = f.with_amplitude(g.gamma(axis) * f.amplitude);
    Ok(i_partial(&reflected, axis)?.scaled(1.0 / f.momentum.k[axis]))
}

/// Σ_n η_nn K_n T̂_n R̂_n ψ. Axes with K_n = 0 use K_n T̂_n = i∂_n and vanish.
pub fn glide_sum(f: &PlaneWaveField, g: &GammaSet) -> Result<PlaneWaveField> {
    let mut total = f.with_amplitude(Spinor::zeros());
    for n in 0..4 {
        let k_n = f.momentum.k[n];
        let term = if k_n == 0.0 {
            let reflected = f.with_amplitude(g.gamma(n) * f.amplitude);
            i_partial(&reflected, n)?
        } else {
            glide_reflection_apply(f, n, g)?.scaled(k_n)
        };
        total = total.add(&term.scaled(SIGNATURE[n]));
    }
    Ok(total)
}

/// max over probes of ‖(Σ η K_n T̂_n R̂_n)ψ − K_M ψ‖ for the on-shell plane wave.
pub fn glide_sum_residual(
    k: &FourMomentum,
    g: &GammaSet,
    branch: SpinBranch,
    probes: &ProbeSet,
) -> Result<f64> {
    let u = plane_wave_spinor(k, g, branch)?;
    let field = PlaneWaveField::new(u, *k);
    let lhs = glide_sum(&field, g)?;
    let rhs = field.scaled(k.k_m);
    Ok(probes.max_deviation(|x| lhs.evaluate(x), |x| rhs.evaluate(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Representation;

    fn standard() -> GammaSet {
        GammaSet::new(Representation::Standard)
    }

    fn basis(i: usize) -> Spinor {
        let mut e = Spinor::zeros();
        e[i] = Complex64::new(1.0, 0.0);
        e
    }

    #[test]
    fn dispersion_examples() {
        let m = 1.7;
        let rest = FourMomentum::new([m, 0.0, 0.0, 0.0], m).unwrap();
        assert_eq!(dispersion_residual(&rest), 0.0);
        let boosted = FourMomentum::new([2f64.sqrt() * m, m, 0.0, 0.0], m).unwrap();
        assert!(dispersion_residual(&boosted).abs() < 1e-14);
        let off = FourMomentum::new([m, m, 0.0, 0.0], m).unwrap();
        assert!((dispersion_residual(&off) + m * m).abs() < 1e-14);
        assert!(!off.is_on_shell());
    }

    #[test]
    fn rest_frame_spinors_are_upper_basis_vectors() {
        let g = standard();
        let k = FourMomentum::on_shell([0.0; 3], 1.0).unwrap();
        let up = plane_wave_spinor(&k, &g, SpinBranch::Up).unwrap();
        let down = plane_wave_spinor(&k, &g, SpinBranch::Down).unwrap();
        assert!((up.as_vector() - basis(0)).norm() < 1e-15);
        assert!((down.as_vector() - basis(1)).norm() < 1e-15);
        assert!(up.as_vector().dotc(down.as_vector()).norm() < 1e-15);
    }

    #[test]
    fn boosted_spinor_solves_the_equation() {
        let m = 1.0;
        let k = FourMomentum::new([2f64.sqrt() * m, m, 0.0, 0.0], m).unwrap();
        for rep in Representation::ALL {
            let g = GammaSet::new(rep);
            for branch in [SpinBranch::Up, SpinBranch::Down] {
                let u = plane_wave_spinor(&k, &g, branch).unwrap();
                assert!(dirac_residual(&k, &g, u.as_vector()) < 1e-12 * m);
                assert!((u.as_vector().norm() - 1.0).abs() < 1e-12);
            }
            let up = plane_wave_spinor(&k, &g, SpinBranch::Up).unwrap();
            let down = plane_wave_spinor(&k, &g, SpinBranch::Down).unwrap();
            assert!(up.as_vector().dotc(down.as_vector()).norm() < 1e-12);
        }
    }

    #[test]
    fn off_shell_spinor_is_rejected() {
        let k = FourMomentum::new([1.0, 1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            plane_wave_spinor(&k, &standard(), SpinBranch::Up),
            Err(Error::OffShell { .. })
        ));
        let probes = ProbeSet::new(DEFAULT_SEED, 1.0);
        assert!(glide_sum_residual(&k, &standard(), SpinBranch::Up, &probes).is_err());
    }

    #[test]
    fn field_at_origin_is_the_bare_spinor() {
        let k = FourMomentum::on_shell([0.3, -0.2, 0.9], 1.0).unwrap();
        let u = plane_wave_spinor(&k, &standard(), SpinBranch::Down).unwrap();
        let f = PlaneWaveField::new(u, k);
        assert_eq!(f.evaluate(&[0.0; 4]), *u.as_vector());
    }

    #[test]
    fn translation_examples() {
        let probes = ProbeSet::new(DEFAULT_SEED, 1.0);
        let two_pi = 2.0 * PI;
        let k = FourMomentum::on_shell([two_pi, 0.0, 0.0], 1.0).unwrap();
        assert!((translation_distance(&k, 1).unwrap() - 1.0).abs() < 1e-15);
        let f = PlaneWaveField::new(plane_wave_spinor(&k, &standard(), SpinBranch::Up).unwrap(), k);
        let (_, residual) = translation_apply(&f, 1, &probes).unwrap();
        assert!(residual < 1e-12, "{residual}");

        let rest = FourMomentum::on_shell([0.0; 3], 1.0).unwrap();
        assert!((translation_distance(&rest, 0).unwrap() - two_pi).abs() < 1e-15);
        let f = PlaneWaveField::new(plane_wave_spinor(&rest, &standard(), SpinBranch::Up).unwrap(), rest);
        let (_, residual) = translation_apply(&f, 0, &probes).unwrap();
        assert!(residual < 1e-12);
        assert_eq!(
            translation_apply(&f, 2, &probes).unwrap_err(),
            Error::TranslationUndefined { axis: 2 }
        );
    }

    #[test]
    fn rest_frame_time_glide_is_gamma0() {
        let g = standard();
        let k = FourMomentum::on_shell([0.0; 3], 1.0).unwrap();
        let f = PlaneWaveField::new(plane_wave_spinor(&k, &g, SpinBranch::Up).unwrap(), k);
        let glided = glide_reflection_apply(&f, 0, &g).unwrap();
        assert!((glided.amplitude - g.gamma(0) * f.amplitude).norm() < 1e-15);
        assert!(glide_reflection_apply(&f, 3, &g).is_err());
    }

    #[test]
    fn spatial_glides_have_period_four() {
        let g = standard();
        let k = FourMomentum::on_shell([0.4, -1.1, 0.7], 1.0).unwrap();
        let u = plane_wave_spinor(&k, &g, SpinBranch::Up).unwrap();
        let f = PlaneWaveField::new(u, k);
        for axis in 1..4 {
            let twice = glide_reflection_apply(&glide_reflection_apply(&f, axis, &g).unwrap(), axis, &g).unwrap();
            assert!((twice.amplitude + f.amplitude).norm() < 1e-12);
            let four = glide_reflection_apply(&glide_reflection_apply(&twice, axis, &g).unwrap(), axis, &g).unwrap();
            assert!((four.amplitude - f.amplitude).norm() < 1e-12);
        }
    }

    #[test]
    fn glide_sum_rest_frame() {
        let probes = ProbeSet::new(DEFAULT_SEED, 1.0);
        let k = FourMomentum::on_shell([0.0; 3], 1.0).unwrap();
        let r = glide_sum_residual(&k, &standard(), SpinBranch::Up, &probes).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn probe_set_is_deterministic_and_bounded() {
        let a = ProbeSet::new(7, 2.0);
        let b = ProbeSet::new(7, 2.0);
        assert_eq!(a, b);
        assert_eq!(a.points.len(), PROBE_COUNT);
        let bound = PI;
        assert!(a.points.iter().flatten().all(|c| c.abs() <= bound));
        assert_ne!(a, ProbeSet::new(8, 2.0));
    }

    #[test]
    fn negative_mass_is_rejected() {
        assert!(FourMomentum::on_shell([0.0; 3], -1.0).is_err());
    }
}
