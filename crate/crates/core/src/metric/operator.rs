use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::grid::{Boundary, GridDimension, GridSpec};
use super::profile::RadialProfile;
use super::MetricModel;
use crate::error::{require_positive, Error, Result};
use crate::linalg::SymTridiagonal;

/// Grid values the stencils can act on: `f64` for eigen solves, `Complex64`
/// for plane waves and Hermiticity checks.
pub trait Amplitude:
    Copy + Debug + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn conj_mul(self, other: Self) -> Complex64;
}

impl Amplitude for f64 {
    fn conj_mul(self, other: Self) -> Complex64 {
        Complex64::new(self * other, 0.0)
    }
}

impl Amplitude for Complex64 {
    fn conj_mul(self, other: Self) -> Complex64 {
        self.conj() * other
    }
}

/// ⟨a|b⟩ with the grid volume element.
pub fn inner_product<T: Amplitude>(grid: &GridSpec, a: &[T], b: &[T]) -> Complex64 {
    let sum: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj_mul(*y)).sum();
    sum * grid.volume_element()
}

/// How a momentum polynomial A and a radial profile v are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// ½(A·v + v·A); Hermitian.
    #[default]
    Symmetrized,
    /// A·v applied right to left.
    Literal,
}

fn neighbour(grid: &GridSpec, ijk: [usize; 3], axis: usize, forward: bool) -> Option<usize> {
    let n = grid.points;
    let mut next = ijk;
    let i = ijk[axis];
    next[axis] = match (forward, grid.boundary) {
        (true, _) if i + 1 < n => i + 1,
        (false, _) if i > 0 => i - 1,
        (true, Boundary::Periodic) => 0,
        (false, Boundary::Periodic) => n - 1,
        _ => return None,
    };
    Some(grid.flatten(next))
}

fn laplacian<T: Amplitude>(grid: &GridSpec, psi: &[T]) -> Vec<T> {
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let at = |idx: Option<usize>| idx.map_or(T::zero(), |i| psi[i]);
    match grid.dimension {
        GridDimension::Radial1d => (0..psi.len())
            .map(|i| {
                let left = if i > 0 { psi[i - 1] } else { T::zero() };
                let right = at((i + 1 < psi.len()).then_some(i + 1));
                (left + right - psi[i] * 2.0) * inv_h2
            })
            .collect(),
        GridDimension::Cartesian3d => (0..psi.len())
            .map(|idx| {
                let ijk = grid.unflatten(idx);
                let mut acc = psi[idx] * -6.0;
                for axis in 0..3 {
                    acc += at(neighbour(grid, ijk, axis, true));
                    acc += at(neighbour(grid, ijk, axis, false));
                }
                acc * inv_h2
            })
            .collect(),
    }
}

/// Central first difference along a cartesian axis.
fn derivative<T: Amplitude>(grid: &GridSpec, psi: &[T], axis: usize) -> Vec<T> {
    let scale = 0.5 / grid.spacing();
    let at = |idx: Option<usize>| idx.map_or(T::zero(), |i| psi[i]);
    (0..psi.len())
        .map(|idx| {
            let ijk = grid.unflatten(idx);
            (at(neighbour(grid, ijk, axis, true)) - at(neighbour(grid, ijk, axis, false))) * scale
        })
        .collect()
}

/// P² = −∇².
fn momentum_squared<T: Amplitude>(grid: &GridSpec, psi: &[T]) -> Vec<T> {
    laplacian(grid, psi).into_iter().map(|x| x * -1.0).collect()
}

/// PxPy + PxPz + PyPz = −(∂x∂y + ∂x∂z + ∂y∂z).
fn cross_momentum<T: Amplitude>(grid: &GridSpec, psi: &[T]) -> Vec<T> {
    let dx = derivative(grid, psi, 0);
    let dy = derivative(grid, psi, 1);
    let dxy = derivative(grid, &dx, 1);
    let dxz = derivative(grid, &dx, 2);
    let dyz = derivative(grid, &dy, 2);
    dxy.iter()
        .zip(&dxz)
        .zip(&dyz)
        .map(|((a, b), c)| (*a + *b + *c) * -1.0)
        .collect()
}

fn multiply<T: Amplitude>(v: &[f64], psi: &[T]) -> Vec<T> {
    v.iter().zip(psi).map(|(v, p)| *p * *v).collect()
}

fn ordered<T: Amplitude>(
    ordering: Ordering,
    v: &[f64],
    psi: &[T],
    op: impl Fn(&[T]) -> Vec<T>,
) -> Vec<T> {
    let a_of_v = op(&multiply(v, psi));
    match ordering {
        Ordering::Literal => a_of_v,
        Ordering::Symmetrized => {
            let v_of_a = multiply(v, &op(psi));
            a_of_v.iter().zip(&v_of_a).map(|(a, b)| (*a + *b) * 0.5).collect()
        }
    }
}

fn sample(profile: &RadialProfile, grid: &GridSpec) -> Option<Vec<f64>> {
    if profile.is_zero() {
        return None;
    }
    let r_min = grid.core_radius();
    Some(grid.radii().into_iter().map(|r| profile.value_capped(r, r_min)).collect())
}

/// V_eff on a grid, with the profiles sampled once.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotential {
    grid: GridSpec,
    ordering: Ordering,
    v1: Option<Vec<f64>>,
    v2: Option<Vec<f64>>,
    v3: Option<Vec<f64>>,
}

impl EffectivePotential {
    pub fn new(model: &MetricModel, grid: &GridSpec, ordering: Ordering) -> Result<Self> {
        grid.validate()?;
        model.validate()?;
        if grid.dimension == GridDimension::Radial1d && !model.v3.is_zero() {
            return Err(Error::CrossTermNeedsCartesian);
        }
        Ok(EffectivePotential {
            grid: *grid,
            ordering,
            v1: sample(&model.v1, grid),
            v2: sample(&model.v2, grid),
            v3: sample(&model.v3, grid),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    /// Sampled v1 (zero profile gives `None`).
    pub fn v1(&self) -> Option<&[f64]> {
        self.v1.as_deref()
    }

    pub fn apply<T: Amplitude>(&self, psi: &[T], energy: f64, mass: f64) -> Result<Vec<T>> {
        if psi.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                got: psi.len(),
            });
        }
        require_positive("mass", mass)?;
        let mut out = vec![T::zero(); psi.len()];
        let mut accumulate = |term: Vec<T>, factor: f64| {
            for (o, t) in out.iter_mut().zip(term) {
                *o += t * factor;
            }
        };
        if let Some(v1) = &self.v1 {
            accumulate(multiply(v1, psi), energy);
        }
        if let Some(v2) = &self.v2 {
            let grid = self.grid;
            accumulate(
                ordered(self.ordering, v2, psi, |p| momentum_squared(&grid, p)),
                0.5 / mass,
            );
        }
        if let Some(v3) = &self.v3 {
            let grid = self.grid;
            accumulate(
                ordered(self.ordering, v3, psi, |p| cross_momentum(&grid, p)),
                1.0 / mass,
            );
        }
        Ok(out)
    }
}

/// V̂_eff ψ for one wavefunction.
pub fn effective_potential_apply<T: Amplitude>(
    model: &MetricModel,
    grid: &GridSpec,
    ordering: Ordering,
    psi: &[T],
    energy: f64,
    mass: f64,
) -> Result<Vec<T>> {
    EffectivePotential::new(model, grid, ordering)?.apply(psi, energy, mass)
}

/// H(E) = P²/2m + V_base(r) + V̂_eff(r, E, P̂), matrix free.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    potential: EffectivePotential,
    base: Option<Vec<f64>>,
    energy: f64,
    mass: f64,
}

impl EffectiveHamiltonian {
    pub fn new(
        model: &MetricModel,
        grid: &GridSpec,
        base_potential: Option<&RadialProfile>,
        energy: f64,
        mass: f64,
        ordering: Ordering,
    ) -> Result<Self> {
        require_positive("mass", mass)?;
        if let Some(base) = base_potential {
            base.validate()?;
        }
        Ok(EffectiveHamiltonian {
            potential: EffectivePotential::new(model, grid, ordering)?,
            base: base_potential.and_then(|b| sample(b, grid)),
            energy,
            mass,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.potential.grid
    }

    pub fn dim(&self) -> usize {
        self.potential.grid.len()
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &EffectivePotential {
        &self.potential
    }

    /// The same operator at a different energy argument.
    pub fn at_energy(&self, energy: f64) -> Self {
        EffectiveHamiltonian {
            energy,
            ..self.clone()
        }
    }

    pub fn apply<T: Amplitude>(&self, psi: &[T]) -> Result<Vec<T>> {
        let mut out = self.potential.apply(psi, self.energy, self.mass)?;
        let kinetic = momentum_squared(&self.potential.grid, psi);
        let half_inv_mass = 0.5 / self.mass;
        for (o, k) in out.iter_mut().zip(kinetic) {
            *o += k * half_inv_mass;
        }
        if let Some(base) = &self.base {
            for ((o, v), p) in out.iter_mut().zip(base).zip(psi) {
                *o += *p * *v;
            }
        }
        Ok(out)
    }

    /// Radial symmetrized operators are tridiagonal; recover the bands by
    /// applying the operator to three interleaved comb vectors.
    pub fn tridiagonal(&self) -> Result<SymTridiagonal> {
        if self.potential.grid.dimension != GridDimension::Radial1d {
            return Err(Error::InvalidGrid("tridiagonal form needs a radial grid".into()));
        }
        if self.potential.ordering != Ordering::Symmetrized {
            return Err(Error::NonHermitianOrdering);
        }
        let n = self.dim();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for phase in 0..3 {
            let comb: Vec<f64> = (0..n).map(|i| if i % 3 == phase { 1.0 } else { 0.0 }).collect();
            let image = self.apply(&comb)?;
            for j in (phase..n).step_by(3) {
                diag[j] = image[j];
                if j + 1 < n {
                    off[j] = image[j + 1];
                }
            }
        }
        Ok(SymTridiagonal::new(diag, off))
    }
}

/// Free-function form of [`EffectiveHamiltonian::new`] in symmetrized ordering.
pub fn effective_hamiltonian(
    model: &MetricModel,
    grid: &GridSpec,
    base_potential: Option<&RadialProfile>,
    energy: f64,
    mass: f64,
) -> Result<EffectiveHamiltonian> {
    EffectiveHamiltonian::new(model, grid, base_potential, energy, mass, Ordering::Symmetrized)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_table(c: f64, reach: f64) -> RadialProfile {
        RadialProfile::tabulated(vec![0.0, reach, reach + 1.0], vec![c, c, 0.0]).unwrap()
    }

    #[test]
    fn flat_model_gives_zero() {
        let grid = GridSpec::cartesian(3.0, 16, Boundary::Dirichlet).unwrap();
        let psi: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let out = effective_potential_apply(&MetricModel::flat(), &grid, Ordering::Symmetrized, &psi, 2.5, 1.0)
            .unwrap();
        assert!(out.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn constant_v1_scales_by_energy() {
        let grid = GridSpec::radial(10.0, 40).unwrap();
        let model = MetricModel::v1_only(constant_table(0.3, 20.0));
        let psi: Vec<f64> = (0..grid.len()).map(|i| 1.0 + i as f64).collect();
        let energy = -0.7;
        let out = effective_potential_apply(&model, &grid, Ordering::Literal, &psi, energy, 2.0).unwrap();
        for (o, p) in out.iter().zip(&psi) {
            assert!((o - energy * 0.3 * p).abs() < 1e-14);
        }
    }

    #[test]
    fn v3_on_radial_grid_is_rejected() {
        let grid = GridSpec::radial(10.0, 40).unwrap();
        let model = MetricModel::new(
            RadialProfile::Zero,
            RadialProfile::Zero,
            RadialProfile::gaussian(0.1, 1.0).unwrap(),
        );
        assert_eq!(
            EffectivePotential::new(&model, &grid, Ordering::Symmetrized).unwrap_err(),
            Error::CrossTermNeedsCartesian
        );
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let grid = GridSpec::radial(10.0, 40).unwrap();
        let err = effective_potential_apply(&MetricModel::flat(), &grid, Ordering::Symmetrized, &[0.0; 3], 0.0, 1.0)
            .unwrap_err();
        assert_eq!(err, Error::ShapeMismatch { expected: 40, got: 3 });
    }

    #[test]
    fn tridiagonal_matches_matrix_free_application() {
        let grid = GridSpec::radial(12.0, 30).unwrap();
        let model = MetricModel::new(
            RadialProfile::yukawa(-0.2, 0.5).unwrap(),
            RadialProfile::gaussian(0.3, 2.0).unwrap(),
            RadialProfile::Zero,
        );
        let base = RadialProfile::yukawa(-1.0, 0.3).unwrap();
        let h = EffectiveHamiltonian::new(&model, &grid, Some(&base), 0.4, 1.3, Ordering::Symmetrized).unwrap();
        let t = h.tridiagonal().unwrap();
        let x: Vec<f64> = (0..grid.len()).map(|i| ((i * i) as f64 * 0.11).cos()).collect();
        let direct = h.apply(&x).unwrap();
        let banded = t.apply(&x);
        for (a, b) in direct.iter().zip(&banded) {
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn literal_ordering_has_no_tridiagonal_form() {
        let grid = GridSpec::radial(12.0, 30).unwrap();
        let h = EffectiveHamiltonian::new(&MetricModel::flat(), &grid, None, 0.0, 1.0, Ordering::Literal).unwrap();
        assert_eq!(h.tridiagonal().unwrap_err(), Error::NonHermitianOrdering);
    }
}
