//! Dirac vs Schrödinger ground-state shifts for a g00 distortion εv1.
//!
//! The Dirac side puts εv1 where the hydrogen equation puts the Coulomb
//! potential, as an energy-proportional term E·εv1 in the time-translation
//! part. The Schrödinger side uses V_eff = E·εv1. Both shifts agree to first
//! order in ε, so their difference should fall off at least as ε².

use serde::{Deserialize, Serialize};

use super::dirac::RadialDiracSolver;
use super::schrodinger::{schrodinger_bound_states, EnergyReference, SchrodingerOptions};
use crate::error::{require_positive, Error, Result};
use crate::metric::{GridDimension, GridSpec, MetricModel, RadialProfile};

/// Smallest fitted exponent accepted as first-order agreement.
pub const REQUIRED_EXPONENT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NrLimitSetup {
    pub mass: f64,
    /// Binding potential shared by both sides.
    pub base_potential: RadialProfile,
    /// Distortion family; only v1 may be non-zero.
    pub model: MetricModel,
    pub grid: GridSpec,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub energy_reference: EnergyReference,
}

impl NrLimitSetup {
    pub fn validate(&self) -> Result<()> {
        require_positive("mass", self.mass)?;
        self.base_potential.validate()?;
        self.model.validate()?;
        self.grid.validate()?;
        if !self.model.v2.is_zero() || !self.model.v3.is_zero() {
            return Err(Error::InvalidParameter {
                name: "model",
                reason: "only the v1 channel has a radial Dirac counterpart; v2 and v3 must be zero".into(),
            });
        }
        if self.grid.dimension != GridDimension::Radial1d {
            return Err(Error::InvalidGrid("the comparison runs on a radial-1d grid".into()));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilons",
                reason: "need at least one finite, non-negative amplitude".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NrLimitReport {
    pub epsilons: Vec<f64>,
    /// Unperturbed Dirac energy minus the mass.
    pub dirac_binding: f64,
    /// Unperturbed Schrödinger eigenvalue.
    pub schrodinger_binding: f64,
    pub dirac_shifts: Vec<f64>,
    pub schrodinger_shifts: Vec<f64>,
    pub discrepancies: Vec<f64>,
    /// Least-squares slope of log(discrepancy) against log(ε), when at least
    /// two non-zero amplitudes give non-zero discrepancies.
    pub exponent: Option<f64>,
    pub signs_agree: bool,
    pub passed: bool,
    pub warnings: Vec<String>,
}

fn dirac_ground_state(setup: &NrLimitSetup, eps: f64) -> Result<f64> {
    let grid = &setup.grid;
    let core = grid.core_radius();
    let base = &setup.base_potential;
    let v1 = &setup.model.v1;
    let solver = RadialDiracSolver::new(grid, setup.mass, -1, |r| base.value_capped(r, core), 0.0)?
        .with_energy_weight(|r| eps * v1.value_capped(r, core));
    Ok(solver.eigenvalue(0)?.0)
}

fn schrodinger_ground_state(setup: &NrLimitSetup, eps: f64, warnings: &mut Vec<String>) -> Result<f64> {
    let options = SchrodingerOptions {
        energy_reference: setup.energy_reference,
        ..SchrodingerOptions::default()
    };
    let result = schrodinger_bound_states(
        &setup.model.scaled(eps),
        &setup.grid,
        setup.mass,
        1,
        Some(&setup.base_potential),
        &options,
    )?;
    if !result.diagnostics.converged {
        warnings.extend(result.diagnostics.warnings.iter().map(|w| format!("eps = {eps}: {w}")));
    }
    let e = result.energies[0];
    if e >= 0.0 {
        return Err(Error::NoBoundState(format!(
            "Schrödinger ground state at eps = {eps} is not bound (e = {e:e})"
        )));
    }
    Ok(e)
}

fn fit_exponent(epsilons: &[f64], discrepancies: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(discrepancies)
        .filter(|(e, d)| **e > 0.0 && **d > 0.0)
        .map(|(e, d)| (e.ln(), d.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs both solvers for every ε and fits the discrepancy exponent.
pub fn nr_limit_check(setup: &NrLimitSetup) -> Result<NrLimitReport> {
    setup.validate()?;
    let mut warnings = Vec::new();
    let dirac_zero = dirac_ground_state(setup, 0.0)?;
    let schrodinger_zero = schrodinger_ground_state(setup, 0.0, &mut warnings)?;

    let mut dirac_shifts = Vec::with_capacity(setup.epsilons.len());
    let mut schrodinger_shifts = Vec::with_capacity(setup.epsilons.len());
    for &eps in &setup.epsilons {
        dirac_shifts.push(dirac_ground_state(setup, eps)? - dirac_zero);
        schrodinger_shifts.push(schrodinger_ground_state(setup, eps, &mut warnings)? - schrodinger_zero);
    }
    let discrepancies: Vec<f64> = dirac_shifts
        .iter()
        .zip(&schrodinger_shifts)
        .map(|(d, s)| (d - s).abs())
        .collect();
    let exponent = fit_exponent(&setup.epsilons, &discrepancies);
    let signs_agree = setup
        .epsilons
        .iter()
        .zip(dirac_shifts.iter().zip(&schrodinger_shifts))
        .filter(|(e, _)| **e > 0.0)
        .all(|(_, (d, s))| d * s > 0.0);
    if exponent.is_none() {
        warnings.push("fewer than two non-zero discrepancies; exponent not fitted".into());
    }
    let passed = signs_agree && exponent.is_some_and(|p| p >= REQUIRED_EXPONENT);

    Ok(NrLimitReport {
        epsilons: setup.epsilons.clone(),
        dirac_binding: dirac_zero - setup.mass,
        schrodinger_binding: schrodinger_zero,
        dirac_shifts,
        schrodinger_shifts,
        discrepancies,
        exponent,
        signs_agree,
        passed,
        warnings,
    })
}
