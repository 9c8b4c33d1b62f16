//! Bound-state solvers.
//!
//! * [`dirac`]: the radial Dirac equation by shooting, checked against the
//!   closed-form Dirac–Coulomb levels.
//! * [`schrodinger`]: the energy-dependent Schrödinger problem H(E)ψ = Eψ
//!   with the effective potential, solved by fixed-point iteration on E.
//! * [`nr_limit`]: compares the two for a time-time metric distortion.

pub mod dirac;
pub mod nr_limit;
pub mod schrodinger;

use serde::Serialize;

use crate::metric::GridSpec;

pub use dirac::{
    radial_coulomb_dirac_spectrum, sommerfeld_energy, CoulombProblem, RadialDiracSolver,
};
pub use nr_limit::{nr_limit_check, NrLimitReport, NrLimitSetup};
pub use schrodinger::{
    perturbation_first_order, schrodinger_bound_states, EnergyReference, SchrodingerOptions,
};

/// Residual bound every reported eigenpair must meet, relative to ‖ψ‖.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Where energies are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyOrigin {
    /// Total relativistic energy, rest energy included.
    Total,
    /// Measured from the rest energy (Schrödinger eigenvalues).
    Binding,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub grid: GridSpec,
    pub energy_origin: EnergyOrigin,
    /// Solver-specific note on how the energy argument of H(E) was referenced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_argument: Option<String>,
    pub iterations: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Fixed-point energy sequence per state (empty for linear problems).
    pub histories: Vec<Vec<f64>>,
    /// Per-state estimate of the discretization error, when available.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub error_estimates: Vec<f64>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn new(grid: GridSpec, energy_origin: EnergyOrigin) -> Self {
        Diagnostics {
            grid,
            energy_origin,
            energy_argument: None,
            iterations: Vec::new(),
            residuals: Vec::new(),
            histories: Vec::new(),
            error_estimates: Vec::new(),
            converged: true,
            warnings: Vec::new(),
        }
    }
}

/// Ordered bound-state energies with solver diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    /// Labels such as `n=2 kappa=-1`, one per energy.
    pub labels: Vec<String>,
    #[serde(skip)]
    pub states: Option<Vec<Vec<f64>>>,
    pub diagnostics: Diagnostics,
}
