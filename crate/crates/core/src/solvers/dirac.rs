//! Radial Dirac equation on a uniform grid.
//!
//! With ψ = (G(r)/r · Ω_κ, i F(r)/r · Ω_−κ) the bound states solve
//!
//! ```text
//! G' = −(κ/r) G + (E − U + m) F
//! F' =  (κ/r) F − (E − U − m) G
//! ```
//!
//! where U(r, E) = V(r) + E·w(r). The optional w term carries a g00
//! distortion of the time-translation part. The system is integrated
//! outward with the second-order box scheme
//! (I − h/2·A_{i+1}) y_{i+1} = (I + h/2·A_i) y_i, and eigenvalues are
//! bracketed by counting sign changes of G and bisecting on G(r_max) = 0.

use serde::Serialize;

use super::{Diagnostics, EnergyOrigin, SpectrumResult};
use crate::error::{require_positive, Error, Result};
use crate::metric::{GridDimension, GridSpec};

/// Relative accuracy target for grid energies against the closed form.
pub const COULOMB_REL_TOL: f64 = 1e-6;
/// r_max·αZ·m/n² must exceed this for the n-th level to fit in the box.
pub const BOX_GUARD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoulombProblem {
    /// αZ.
    pub coupling: f64,
    pub mass: f64,
    pub kappa: i32,
}

impl CoulombProblem {
    pub fn new(coupling: f64, mass: f64, kappa: i32) -> Result<Self> {
        let p = CoulombProblem { coupling, mass, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling > 0.0 && self.coupling < 1.0) {
            return Err(Error::Supercritical(self.coupling));
        }
        require_positive("mass", self.mass)?;
        if self.kappa == 0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "kappa must be non-zero".into(),
            });
        }
        Ok(())
    }

    /// Principal quantum number of the `index`-th level in this κ channel.
    pub fn principal(&self, index: usize) -> u32 {
        principal_number(self.kappa, index)
    }
}

pub fn principal_number(kappa: i32, index: usize) -> u32 {
    let offset = if kappa < 0 { kappa.unsigned_abs() } else { kappa as u32 + 1 };
    index as u32 + offset
}

/// Closed-form Dirac–Coulomb level, rest energy included.
pub fn sommerfeld_energy(coupling: f64, n: u32, kappa: i32, mass: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&coupling) {
        return Err(Error::Supercritical(coupling));
    }
    require_positive("mass", mass)?;
    let k = kappa.unsigned_abs();
    if n == 0 || kappa == 0 || k > n || (kappa > 0 && k == n) {
        return Err(Error::InvalidQuantumNumbers { n, kappa });
    }
    let gamma = ((k * k) as f64 - coupling * coupling).sqrt();
    let denom = (n - k) as f64 + gamma;
    Ok(mass / (1.0 + (coupling / denom).powi(2)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    /// Sign changes of G on (0, r_max].
    pub nodes: usize,
    /// G(r_max) / max|G|.
    pub end: f64,
}

/// Shooting solver for one κ channel on a uniform radial grid.
#[derive(Debug, Clone)]
pub struct RadialDiracSolver {
    mass: f64,
    kappa: i32,
    step: f64,
    /// V at r_i = i·h, i = 0..=N+1 (index 0 unused).
    potential: Vec<f64>,
    energy_weight: Option<Vec<f64>>,
    coulomb_charge: f64,
}

impl RadialDiracSolver {
    /// Samples `potential` on the nodes of a radial grid plus the outer wall.
    ///
    /// `coulomb_charge` is lim_{r→0} −r·V(r); it fixes the r^γ start of the
    /// regular solution and is 0 for finite potentials.
    pub fn new(
        grid: &GridSpec,
        mass: f64,
        kappa: i32,
        potential: impl Fn(f64) -> f64,
        coulomb_charge: f64,
    ) -> Result<Self> {
        grid.validate()?;
        if grid.dimension != GridDimension::Radial1d {
            return Err(Error::InvalidGrid("radial Dirac solver needs a radial-1d grid".into()));
        }
        require_positive("mass", mass)?;
        if kappa == 0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "kappa must be non-zero".into(),
            });
        }
        if !(0.0..(kappa.unsigned_abs() as f64)).contains(&coulomb_charge) {
            return Err(Error::Supercritical(coulomb_charge));
        }
        let step = grid.spacing();
        let nodes = grid.points + 2;
        let potential = (0..nodes)
            .map(|i| if i == 0 { 0.0 } else { potential(i as f64 * step) })
            .collect();
        Ok(RadialDiracSolver {
            mass,
            kappa,
            step,
            potential,
            energy_weight: None,
            coulomb_charge,
        })
    }

    /// Adds E·w(r) to the potential.
    pub fn with_energy_weight(mut self, weight: impl Fn(f64) -> f64) -> Self {
        let step = self.step;
        self.energy_weight = Some(
            (0..self.potential.len())
                .map(|i| if i == 0 { 0.0 } else { weight(i as f64 * step) })
                .collect(),
        );
        self
    }

    fn total_potential(&self, i: usize, energy: f64) -> f64 {
        let w = self.energy_weight.as_ref().map_or(0.0, |w| w[i]);
        self.potential[i] + energy * w
    }

    fn start(&self, energy: f64) -> [f64; 2] {
        let h = self.step;
        let k = self.kappa as f64;
        if self.coulomb_charge > 0.0 {
            let gamma = (k * k - self.coulomb_charge * self.coulomb_charge).sqrt();
            let g = h.powf(gamma);
            [g, g * (gamma + k) / self.coulomb_charge]
        } else {
            let u = self.total_potential(1, energy);
            let l = k.abs();
            if self.kappa < 0 {
                [h.powf(l), -(energy - u - self.mass) / (2.0 * l + 1.0) * h.powf(l + 1.0)]
            } else {
                [(energy - u + self.mass) / (2.0 * l + 1.0) * h.powf(l + 1.0), h.powf(l)]
            }
        }
    }

    fn coefficients(&self, i: usize, energy: f64) -> [[f64; 2]; 2] {
        let r = i as f64 * self.step;
        let k = self.kappa as f64;
        let u = self.total_potential(i, energy);
        [[-k / r, energy - u + self.mass], [-(energy - u - self.mass), k / r]]
    }

    /// One box-scheme step y_{i+1} = T y_i.
    fn transfer(&self, i: usize, energy: f64) -> [[f64; 2]; 2] {
        let half = 0.5 * self.step;
        let a0 = self.coefficients(i, energy);
        let a1 = self.coefficients(i + 1, energy);
        let p = [
            [1.0 + half * a0[0][0], half * a0[0][1]],
            [half * a0[1][0], 1.0 + half * a0[1][1]],
        ];
        let m = [
            [1.0 - half * a1[0][0], -half * a1[0][1]],
            [-half * a1[1][0], 1.0 - half * a1[1][1]],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let mut t = [[0.0; 2]; 2];
        for (r, row) in t.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = inv[r][0] * p[0][c] + inv[r][1] * p[1][c];
            }
        }
        t
    }

    fn steps(&self) -> std::ops::Range<usize> {
        1..self.potential.len() - 1
    }

    /// Integrate from r = h to r_max at trial energy `energy`.
    pub fn shoot(&self, energy: f64) -> Shot {
        let [mut g, mut f] = self.start(energy);
        let mut g_max = g.abs();
        let mut nodes = 0;
        for i in self.steps() {
            let t = self.transfer(i, energy);
            let g_next = t[0][0] * g + t[0][1] * f;
            let f_next = t[1][0] * g + t[1][1] * f;
            if g_next * g < 0.0 {
                nodes += 1;
            }
            g = g_next;
            f = f_next;
            g_max = g_max.max(g.abs());
            if g_max > 1e100 {
                g /= g_max;
                f /= g_max;
                g_max = 1.0;
            }
        }
        Shot {
            nodes,
            end: if g_max > 0.0 { g / g_max } else { 0.0 },
        }
    }

    /// True when some step has real eigenvalues with a negative dominant one,
    /// which flips the sign of the growing solution on every step.
    fn has_spurious_steps(&self, energy: f64) -> bool {
        self.steps().any(|i| {
            let t = self.transfer(i, energy);
            let trace = t[0][0] + t[1][1];
            let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            trace < 0.0 && trace * trace >= 4.0 * det
        })
    }

    /// Lowest non-negative energy at which no step flips the sign of the
    /// growing solution. Node counts below it are not meaningful.
    pub fn energy_floor(&self) -> f64 {
        if !self.has_spurious_steps(0.0) {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, self.mass);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.has_spurious_steps(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// The `index`-th positive-energy bound state below the threshold m.
    pub fn eigenvalue(&self, index: usize) -> Result<(f64, Shot)> {
        let mut lo = self.energy_floor();
        let mut hi = self.mass;
        if self.shoot(hi).nodes <= index {
            return Err(Error::NoBoundState(format!(
                "kappa = {} has fewer than {} levels below threshold in this box",
                self.kappa,
                index + 1
            )));
        }
        if self.shoot(lo).nodes > index {
            return Err(Error::GridTooCoarse(format!(
                "level {index} lies below the resolvable energy {lo:.6e}; refine the grid"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.shoot(mid).nodes > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let energy = 0.5 * (lo + hi);
        Ok((energy, self.shoot(energy)))
    }
}

fn coulomb_solver(problem: &CoulombProblem, grid: &GridSpec) -> Result<RadialDiracSolver> {
    let coupling = problem.coupling;
    RadialDiracSolver::new(grid, problem.mass, problem.kappa, |r| -coupling / r, coupling)
}

/// Lowest `count` levels of the Dirac–Coulomb problem in one κ channel.
///
/// Each level carries a Richardson estimate of its discretization error from
/// a second solve at twice the spacing; levels whose estimate exceeds
/// [`COULOMB_REL_TOL`], or boxes that fail [`BOX_GUARD`], are flagged as
/// not converged.
pub fn radial_coulomb_dirac_spectrum(
    problem: &CoulombProblem,
    grid: &GridSpec,
    count: usize,
) -> Result<SpectrumResult> {
    problem.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "must be at least 1".into(),
        });
    }
    let solver = coulomb_solver(problem, grid)?;
    let coarse_points = (grid.points + 1) / 2 - 1;
    let coarse = if coarse_points >= crate::metric::MIN_POINTS {
        Some(coulomb_solver(problem, &grid.with_points(coarse_points))?)
    } else {
        None
    };

    let mut diagnostics = Diagnostics::new(*grid, EnergyOrigin::Total);
    let n_max = problem.principal(count - 1);
    let guard = grid.extent * problem.coupling * problem.mass / (n_max as f64).powi(2);
    if guard <= BOX_GUARD {
        diagnostics.converged = false;
        diagnostics.warnings.push(format!(
            "r_max*coupling*mass/n^2 = {guard:.3} <= {BOX_GUARD}: box too small for n = {n_max}"
        ));
    }

    let mut energies = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for index in 0..count {
        let (energy, shot) = solver.eigenvalue(index)?;
        energies.push(energy);
        labels.push(format!("n={} kappa={}", problem.principal(index), problem.kappa));
        diagnostics.iterations.push(1);
        diagnostics.residuals.push(shot.end.abs());
        let estimate = match &coarse {
            Some(c) => c
                .eigenvalue(index)
                .map(|(e2, _)| (energy - e2).abs() / 3.0)
                .unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        };
        if !(estimate <= COULOMB_REL_TOL * energy.abs()) {
            diagnostics.converged = false;
            diagnostics.warnings.push(format!(
                "level {} grid error estimate {estimate:.3e} exceeds {COULOMB_REL_TOL:e} relative",
                labels[index]
            ));
        }
        diagnostics.error_estimates.push(estimate);
    }

    Ok(SpectrumResult {
        energies,
        labels,
        states: None,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Series of the closed form in (αZ)², summed to fourth order.
    fn sommerfeld_series(coupling: f64, n: u32, kappa: i32) -> f64 {
        let a2 = coupling * coupling;
        let n = n as f64;
        let j_half = kappa.unsigned_abs() as f64;
        1.0 - a2 / (2.0 * n * n) - a2 * a2 / (2.0 * n.powi(4)) * (n / j_half - 0.75)
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(sommerfeld_energy(0.0, 3, -2, 2.0).unwrap(), 2.0);
        let a: f64 = 0.3;
        let ground = sommerfeld_energy(a, 1, -1, 1.0).unwrap();
        assert!((ground - (1.0 - a * a).sqrt()).abs() < 1e-15);
        let s = sommerfeld_energy(a, 2, -1, 1.0).unwrap();
        let p = sommerfeld_energy(a, 2, 1, 1.0).unwrap();
        let p32 = sommerfeld_energy(a, 2, -2, 1.0).unwrap();
        // 2s1/2 and 2p1/2 share |κ|; 2p3/2 is split off by fine structure
        assert!((s - p).abs() < 1e-15);
        assert!((p32 - s).abs() > 1e-4);
    }

    #[test]
    fn closed_form_matches_series() {
        let a: f64 = 1e-2;
        for (n, kappa) in [(1, -1), (2, -1), (2, 1), (2, -2), (3, 2), (3, -3)] {
            let exact = sommerfeld_energy(a, n, kappa, 1.0).unwrap();
            let series = sommerfeld_series(a, n, kappa);
            // the remainder is O(a⁶) ≈ 1e-12, well under the a⁴ term
            assert!((exact - series).abs() < 1e-11, "n={n} kappa={kappa}");
            let bohr = -a * a / (2.0 * (n * n) as f64);
            assert!((exact - 1.0 - bohr).abs() < a.powi(4));
        }
    }

    #[test]
    fn invalid_quantum_numbers() {
        assert!(sommerfeld_energy(0.1, 1, 1, 1.0).is_err());
        assert!(sommerfeld_energy(0.1, 2, -3, 1.0).is_err());
        assert!(sommerfeld_energy(0.1, 0, -1, 1.0).is_err());
        assert_eq!(sommerfeld_energy(1.2, 1, -1, 1.0).unwrap_err(), Error::Supercritical(1.2));
    }

    #[test]
    fn principal_numbers() {
        assert_eq!(principal_number(-1, 0), 1);
        assert_eq!(principal_number(1, 0), 2);
        assert_eq!(principal_number(-2, 1), 3);
        assert_eq!(principal_number(2, 0), 3);
    }

    #[test]
    fn supercritical_problem_is_rejected() {
        assert_eq!(CoulombProblem::new(1.2, 1.0, -1).unwrap_err(), Error::Supercritical(1.2));
        assert!(CoulombProblem::new(0.5, 1.0, 0).is_err());
    }

    #[test]
    fn strong_coupling_levels() {
        let problem = CoulombProblem::new(0.5, 1.0, -1).unwrap();
        let grid = GridSpec::radial(200.0, 8000).unwrap();
        let result = radial_coulomb_dirac_spectrum(&problem, &grid, 2).unwrap();
        for (index, energy) in result.energies.iter().enumerate() {
            let exact = sommerfeld_energy(0.5, problem.principal(index), -1, 1.0).unwrap();
            assert!(((energy - exact) / exact).abs() < COULOMB_REL_TOL, "{energy} vs {exact}");
        }
        assert!(result.diagnostics.converged, "{:?}", result.diagnostics.warnings);
    }

    #[test]
    fn coarse_grid_is_flagged_but_close() {
        let problem = CoulombProblem::new(0.5, 1.0, -1).unwrap();
        let grid = GridSpec::radial(10.0, 16).unwrap();
        let result = radial_coulomb_dirac_spectrum(&problem, &grid, 1).unwrap();
        let exact = sommerfeld_energy(0.5, 1, -1, 1.0).unwrap();
        assert!(!result.diagnostics.converged);
        assert!(!result.diagnostics.warnings.is_empty());
        assert!(((result.energies[0] - exact) / exact).abs() < 1e-3);
    }

    #[test]
    fn finite_well_has_fewer_levels_than_requested() {
        let grid = GridSpec::radial(50.0, 1000).unwrap();
        let solver = RadialDiracSolver::new(&grid, 1.0, -1, |r| if r < 1.0 { -0.05 } else { 0.0 }, 0.0).unwrap();
        assert!(matches!(solver.eigenvalue(0), Err(Error::NoBoundState(_))));
    }
}
