//! The energy-dependent problem H(E)ψ = Eψ.
//!
//! H(E) = P²/2m + V_base + V̂_eff(E) depends on its own eigenvalue through
//! the E·v1 term, so each state is found by iterating
//! e_{k+1} = λ_j(H(e_k)) from e_0 = λ_j(H(0)).

use serde::{Deserialize, Serialize};

use super::{Diagnostics, EnergyOrigin, SpectrumResult, EIGEN_RESIDUAL_TOL};
use crate::error::{require_positive, Error, Result};
use crate::linalg::{lanczos_smallest, LanczosOptions};
use crate::metric::{
    inner_product, Amplitude, EffectiveHamiltonian, GridDimension, GridSpec, MetricModel, Ordering,
    RadialProfile,
};

/// Which energy is fed to the E·v1 term for a Schrödinger eigenvalue e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyReference {
    /// E = m + e, the total energy.
    #[default]
    Total,
    /// E = e.
    Binding,
}

impl EnergyReference {
    pub fn argument(self, eigenvalue: f64, mass: f64) -> f64 {
        match self {
            EnergyReference::Total => mass + eigenvalue,
            EnergyReference::Binding => eigenvalue,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            EnergyReference::Total => "E in E*v1 is the total energy mass + e; energies are binding-referenced",
            EnergyReference::Binding => "E in E*v1 is the binding eigenvalue e; energies are binding-referenced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerOptions {
    pub ordering: Ordering,
    pub energy_reference: EnergyReference,
    /// Fixed-point stopping tolerance in units of the mass.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Start vectors for the iterative 3D eigensolver.
    pub seed: u64,
}

impl Default for SchrodingerOptions {
    fn default() -> Self {
        SchrodingerOptions {
            ordering: Ordering::Symmetrized,
            energy_reference: EnergyReference::Total,
            tolerance: 1e-10,
            max_iterations: 200,
            seed: 42,
        }
    }
}

struct Problem {
    hamiltonian: EffectiveHamiltonian,
    options: SchrodingerOptions,
}

impl Problem {
    fn at(&self, eigenvalue: f64) -> EffectiveHamiltonian {
        let mass = self.hamiltonian.mass();
        self.hamiltonian
            .at_energy(self.options.energy_reference.argument(eigenvalue, mass))
    }

    fn eigenvalue(&self, eigenvalue: f64, index: usize) -> Result<f64> {
        Ok(self.eigenpair(eigenvalue, index)?.0)
    }

    /// λ_index of H(eigenvalue) with its normalized state.
    fn eigenpair(&self, eigenvalue: f64, index: usize) -> Result<(f64, Vec<f64>)> {
        let h = self.at(eigenvalue);
        match h.grid().dimension {
            GridDimension::Radial1d => {
                let t = h.tridiagonal()?;
                let lambda = t.eigenvalue(index);
                Ok((lambda, t.eigenvector(lambda)))
            }
            GridDimension::Cartesian3d => {
                let options = LanczosOptions {
                    seed: self.options.seed,
                    ..LanczosOptions::default()
                };
                let apply = |x: &[f64]| h.apply(x).expect("vector length matches the grid");
                let mut pairs = lanczos_smallest(apply, h.dim(), index + 1, &options)?;
                let pair = pairs.swap_remove(index);
                Ok((pair.value, pair.vector))
            }
        }
    }
}

fn normalize(grid: &GridSpec, mut psi: Vec<f64>) -> Vec<f64> {
    let norm = inner_product(grid, &psi, &psi).re.sqrt();
    psi.iter_mut().for_each(|x| *x /= norm);
    psi
}

fn relative_residual(h: &EffectiveHamiltonian, psi: &[f64], energy: f64) -> Result<f64> {
    let image = h.apply(psi)?;
    let num: f64 = image.iter().zip(psi).map(|(a, b)| (a - energy * b).powi(2)).sum();
    let den: f64 = psi.iter().map(|x| x * x).sum();
    Ok((num / den).sqrt())
}

/// Lowest `count` solutions of H(E)ψ = Eψ, energies measured from the rest energy.
///
/// States whose fixed point does not settle within `max_iterations`, or whose
/// final residual exceeds [`EIGEN_RESIDUAL_TOL`], are returned with
/// `diagnostics.converged = false` and a warning naming the state.
pub fn schrodinger_bound_states(
    model: &MetricModel,
    grid: &GridSpec,
    mass: f64,
    count: usize,
    base_potential: Option<&RadialProfile>,
    options: &SchrodingerOptions,
) -> Result<SpectrumResult> {
    require_positive("mass", mass)?;
    if options.ordering != Ordering::Symmetrized {
        return Err(Error::NonHermitianOrdering);
    }
    if count == 0 || count > grid.len() {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: format!("must be between 1 and {}", grid.len()),
        });
    }
    let problem = Problem {
        hamiltonian: EffectiveHamiltonian::new(model, grid, base_potential, 0.0, mass, options.ordering)?,
        options: *options,
    };

    let mut diagnostics = Diagnostics::new(*grid, EnergyOrigin::Binding);
    diagnostics.energy_argument = Some(options.energy_reference.describe().into());
    let tolerance = options.tolerance * mass;
    let mut energies = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);

    for index in 0..count {
        let mut e = problem.eigenvalue(0.0, index)?;
        let mut history = vec![e];
        let mut settled = false;
        for _ in 0..options.max_iterations {
            let next = problem.eigenvalue(e, index)?;
            history.push(next);
            let step = (next - e).abs();
            e = next;
            if !e.is_finite() {
                break;
            }
            if step < tolerance {
                settled = true;
                break;
            }
        }
        if !settled {
            diagnostics.converged = false;
            diagnostics.warnings.push(format!(
                "state {index}: fixed point did not converge in {} iterations (last energy {e:e})",
                options.max_iterations
            ));
        }
        let (lambda, psi) = problem.eigenpair(e, index)?;
        let psi = normalize(grid, psi);
        let residual = relative_residual(&problem.at(lambda), &psi, lambda)?;
        if !(residual < EIGEN_RESIDUAL_TOL) {
            diagnostics.converged = false;
            diagnostics
                .warnings
                .push(format!("state {index}: residual {residual:.3e} exceeds {EIGEN_RESIDUAL_TOL:e}"));
        }
        diagnostics.iterations.push(history.len() - 1);
        diagnostics.residuals.push(residual);
        diagnostics.histories.push(history);
        energies.push(lambda);
        states.push(psi);
    }

    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    permute(&mut energies, &order);
    permute(&mut states, &order);
    permute(&mut diagnostics.iterations, &order);
    permute(&mut diagnostics.residuals, &order);
    permute(&mut diagnostics.histories, &order);

    Ok(SpectrumResult {
        labels: (0..count).map(|i| format!("state {i}")).collect(),
        energies,
        states: Some(states),
        diagnostics,
    })
}

fn permute<T>(v: &mut Vec<T>, order: &[usize]) {
    let mut slots: Vec<Option<T>> = std::mem::take(v).into_iter().map(Some).collect();
    *v = order.iter().map(|&i| slots[i].take().expect("order is a permutation")).collect();
}

/// ⟨ψ|Ŵψ⟩ on `grid`, for a normalized ψ.
pub fn perturbation_first_order<T: Amplitude>(
    grid: &GridSpec,
    state: &[T],
    perturbation: impl Fn(&[T]) -> Vec<T>,
) -> Result<f64> {
    if state.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            got: state.len(),
        });
    }
    let image = perturbation(state);
    if image.len() != state.len() {
        return Err(Error::ShapeMismatch {
            expected: state.len(),
            got: image.len(),
        });
    }
    Ok(inner_product(grid, state, &image).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Boundary;
    use nalgebra::DMatrix;

    fn dense_radial_levels(grid: &GridSpec, base: &RadialProfile, mass: f64, count: usize) -> Vec<f64> {
        let n = grid.len();
        let h = grid.spacing();
        let t = 1.0 / (2.0 * mass * h * h);
        let core = grid.core_radius();
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0 * t + base.value_capped(grid.radius(i), core);
            if i + 1 < n {
                a[(i, i + 1)] = -t;
                a[(i + 1, i)] = -t;
            }
        }
        let mut values: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values.truncate(count);
        values
    }

    #[test]
    fn flat_model_matches_plain_radial_solve() {
        let grid = GridSpec::radial(30.0, 400).unwrap();
        let base = RadialProfile::yukawa(-2.0, 0.5).unwrap();
        let result = schrodinger_bound_states(
            &MetricModel::flat(),
            &grid,
            1.0,
            3,
            Some(&base),
            &SchrodingerOptions::default(),
        )
        .unwrap();
        let oracle = dense_radial_levels(&grid, &base, 1.0, 3);
        assert!(oracle[0] < 0.0);
        for (e, o) in result.energies.iter().zip(&oracle) {
            assert!((e - o).abs() < 1e-8, "{e} vs {o}");
        }
        assert!(result.diagnostics.converged);
        assert!(result.diagnostics.iterations.iter().all(|&k| k == 1));
    }

    #[test]
    fn fixed_point_is_an_eigenpair_of_its_own_operator() {
        let grid = GridSpec::radial(30.0, 600).unwrap();
        let base = RadialProfile::yukawa(-2.0, 0.5).unwrap();
        let model = MetricModel::v1_only(RadialProfile::gaussian(-0.1, 2.0).unwrap());
        let result = schrodinger_bound_states(&model, &grid, 1.0, 2, Some(&base), &SchrodingerOptions::default())
            .unwrap();
        assert!(result.diagnostics.converged, "{:?}", result.diagnostics.warnings);
        assert!(result.energies.windows(2).all(|w| w[0] <= w[1]));
        for r in &result.diagnostics.residuals {
            assert!(*r < EIGEN_RESIDUAL_TOL);
        }
        for history in &result.diagnostics.histories {
            assert!(history.len() > 2);
        }
    }

    #[test]
    fn first_order_shift_with_small_v1() {
        let grid = GridSpec::radial(30.0, 800).unwrap();
        let base = RadialProfile::yukawa(-2.0, 0.5).unwrap();
        let v1 = RadialProfile::gaussian(-1.0, 2.0).unwrap();
        let options = SchrodingerOptions::default();
        let flat =
            schrodinger_bound_states(&MetricModel::flat(), &grid, 1.0, 1, Some(&base), &options).unwrap();
        let psi = &flat.states.as_ref().unwrap()[0];
        let e0 = flat.energies[0];
        let core = grid.core_radius();
        let sampled: Vec<f64> = grid.radii().iter().map(|&r| v1.value_capped(r, core)).collect();
        let expectation =
            perturbation_first_order(&grid, psi, |p| p.iter().zip(&sampled).map(|(a, b)| a * b).collect())
                .unwrap();
        let argument = options.energy_reference.argument(e0, 1.0);
        let mut errors = Vec::new();
        for eps in [1e-3, 2e-3] {
            let model = MetricModel::v1_only(v1.scaled(eps));
            let e = schrodinger_bound_states(&model, &grid, 1.0, 1, Some(&base), &options).unwrap().energies[0];
            errors.push((e - e0 - eps * argument * expectation).abs());
        }
        // second-order remainder: doubling ε quadruples the error
        let ratio = errors[1] / errors[0];
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn negative_v1_term_lowers_ground_state_at_fixed_argument() {
        let grid = GridSpec::radial(20.0, 300).unwrap();
        let base = RadialProfile::yukawa(-2.0, 0.5).unwrap();
        let v1 = RadialProfile::gaussian(-0.3, 1.5).unwrap();
        for energy in [0.2, 1.0, 3.0] {
            let flat = EffectiveHamiltonian::new(&MetricModel::flat(), &grid, Some(&base), energy, 1.0, Ordering::Symmetrized)
                .unwrap();
            let bent = EffectiveHamiltonian::new(&MetricModel::v1_only(v1.clone()), &grid, Some(&base), energy, 1.0, Ordering::Symmetrized)
                .unwrap();
            let e_flat = flat.tridiagonal().unwrap().eigenvalue(0);
            let e_bent = bent.tridiagonal().unwrap().eigenvalue(0);
            assert!(e_bent <= e_flat);
        }
    }

    #[test]
    fn constant_v2_scales_periodic_spectrum() {
        let grid = GridSpec::cartesian(std::f64::consts::PI, 16, Boundary::Periodic).unwrap();
        let c2 = 0.25;
        let table = RadialProfile::tabulated(vec![0.0, 10.0, 11.0], vec![c2, c2, 0.0]).unwrap();
        let model = MetricModel::new(RadialProfile::Zero, table, RadialProfile::Zero);
        let options = SchrodingerOptions::default();
        let flat = schrodinger_bound_states(&MetricModel::flat(), &grid, 1.0, 7, None, &options).unwrap();
        let bent = schrodinger_bound_states(&model, &grid, 1.0, 7, None, &options).unwrap();
        assert!(flat.energies[0].abs() < 1e-9);
        for (f, b) in flat.energies.iter().zip(&bent.energies) {
            assert!((b - (1.0 + c2) * f).abs() < 1e-8, "{b} vs {f}");
        }
        // the six lowest nonzero modes are the degenerate |k| = 1 shell
        let h = grid.spacing();
        let shell = (2.0 - 2.0 * h.cos()) / (h * h) / 2.0;
        for e in &flat.energies[1..7] {
            assert!((e - shell).abs() < 1e-8);
        }
    }

    #[test]
    fn literal_ordering_is_rejected() {
        let grid = GridSpec::radial(10.0, 50).unwrap();
        let options = SchrodingerOptions {
            ordering: Ordering::Literal,
            ..SchrodingerOptions::default()
        };
        let err = schrodinger_bound_states(&MetricModel::flat(), &grid, 1.0, 1, None, &options).unwrap_err();
        assert_eq!(err, Error::NonHermitianOrdering);
    }

    #[test]
    fn runaway_fixed_point_is_flagged() {
        let grid = GridSpec::radial(20.0, 200).unwrap();
        let base = RadialProfile::yukawa(-2.0, 0.5).unwrap();
        let model = MetricModel::v1_only(RadialProfile::gaussian(-3.0, 2.0).unwrap());
        let options = SchrodingerOptions {
            energy_reference: EnergyReference::Binding,
            max_iterations: 20,
            ..SchrodingerOptions::default()
        };
        let result = schrodinger_bound_states(&model, &grid, 1.0, 1, Some(&base), &options).unwrap();
        assert!(!result.diagnostics.converged);
        assert!(!result.diagnostics.warnings.is_empty());
    }

    #[test]
    fn perturbation_trivial_operators() {
        let grid = GridSpec::radial(10.0, 100).unwrap();
        let psi = normalize(&grid, grid.radii().iter().map(|r| (r * 0.3).sin()).collect());
        let one = perturbation_first_order(&grid, &psi, |p| p.to_vec()).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let zero = perturbation_first_order(&grid, &psi, |p| vec![0.0; p.len()]).unwrap();
        assert_eq!(zero, 0.0);
        let bad = perturbation_first_order(&grid, &psi[..5], |p| p.to_vec()).unwrap_err();
        assert_eq!(bad, Error::ShapeMismatch { expected: 100, got: 5 });
    }

    #[test]
    fn box_ground_state_quadrature() {
        // particle in [0, L]: ⟨r⟩ = L/2 and ⟨r²⟩ = L²(1/3 − 1/(2π²))
        let l = 10.0;
        let grid = GridSpec::radial(l, 2000).unwrap();
        let result =
            schrodinger_bound_states(&MetricModel::flat(), &grid, 1.0, 1, None, &SchrodingerOptions::default())
                .unwrap();
        let psi = &result.states.as_ref().unwrap()[0];
        let radii = grid.radii();
        let mean = perturbation_first_order(&grid, psi, |p| p.iter().zip(&radii).map(|(a, r)| a * r).collect())
            .unwrap();
        let square =
            perturbation_first_order(&grid, psi, |p| p.iter().zip(&radii).map(|(a, r)| a * r * r).collect())
                .unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((mean - l / 2.0).abs() < 1e-9);
        assert!((square - l * l * (1.0 / 3.0 - 0.5 / pi2)).abs() < 1e-4);
    }
}
