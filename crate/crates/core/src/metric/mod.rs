//! Radially distorted metric and the effective potential it induces.
//!
//! The metric keeps the time–space blocks decoupled and lets three radial
//! profiles deform it:
//!
//! ```text
//! g00 = 1 − v1(r)      gii = −(1 − v2(r))      gij = −v3(r)  (i ≠ j, spatial)
//! ```
//!
//! so that zero profiles give back diag(1, −1, −1, −1). The
//! alternative `gij = 1 − v3(r)` is available through
//! [`OffDiagonalConvention::OneMinus`].
//!
//! In the Schrödinger limit the distortion shows up as
//!
//! ```text
//! V_eff = E·v1 + (1/2m)·P²·v2 + (1/m)·(PxPy + PxPz + PyPz)·v3
//! ```
//!
//! with P = −i∇ on a finite-difference grid.

mod grid;
mod operator;
mod profile;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

pub use grid::{Boundary, GridDimension, GridSpec, MIN_POINTS};
pub use operator::{
    effective_hamiltonian, effective_potential_apply, inner_product, Amplitude, EffectiveHamiltonian,
    EffectivePotential, Ordering,
};
pub use profile::{RadialProfile, TABLE_TAIL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffDiagonalConvention {
    /// g_ij = −v3(r); vanishes in the flat limit.
    #[default]
    FlatConsistent,
    /// g_ij = 1 − v3(r); not flat when v3 = 0.
    OneMinus,
}

/// Three radial distortion profiles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricModel {
    #[serde(default)]
    pub v1: RadialProfile,
    #[serde(default)]
    pub v2: RadialProfile,
    #[serde(default)]
    pub v3: RadialProfile,
    #[serde(default)]
    pub convention: OffDiagonalConvention,
}

impl MetricModel {
    pub fn flat() -> Self {
        MetricModel::default()
    }

    pub fn new(v1: RadialProfile, v2: RadialProfile, v3: RadialProfile) -> Self {
        MetricModel {
            v1,
            v2,
            v3,
            convention: OffDiagonalConvention::FlatConsistent,
        }
    }

    pub fn v1_only(v1: RadialProfile) -> Self {
        MetricModel::new(v1, RadialProfile::Zero, RadialProfile::Zero)
    }

    pub fn with_convention(mut self, convention: OffDiagonalConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        self.v1.validate()?;
        self.v2.validate()?;
        self.v3.validate()
    }

    pub fn is_flat(&self) -> bool {
        self.v1.is_zero() && self.v2.is_zero() && self.v3.is_zero()
    }

    /// Every profile multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        MetricModel {
            v1: self.v1.scaled(factor),
            v2: self.v2.scaled(factor),
            v3: self.v3.scaled(factor),
            convention: self.convention,
        }
    }

    /// g_ln at spacetime point x = (x0, x1, x2, x3).
    pub fn metric_tensor(&self, x: [f64; 4]) -> Matrix4<f64> {
        self.metric_at_radius((x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt())
    }

    /// g_ln at any point with spatial radius `r`.
    pub fn metric_at_radius(&self, r: f64) -> Matrix4<f64> {
        let (v1, v2, v3) = (self.v1.value(r), self.v2.value(r), self.v3.value(r));
        let off = match self.convention {
            OffDiagonalConvention::FlatConsistent => -v3,
            OffDiagonalConvention::OneMinus => 1.0 - v3,
        };
        Matrix4::from_fn(|l, n| match (l, n) {
            (0, 0) => 1.0 - v1,
            (0, _) | (_, 0) => 0.0,
            (l, n) if l == n => -(1.0 - v2),
            _ => off,
        })
    }
}

/// Free-function form of [`MetricModel::metric_tensor`].
pub fn metric_tensor(model: &MetricModel, x: [f64; 4]) -> Matrix4<f64> {
    model.metric_tensor(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minkowski() -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0))
    }

    #[test]
    fn flat_model_is_minkowski() {
        let m = MetricModel::flat();
        for x in [[0.0, 0.0, 0.0, 0.0], [1.0, -2.0, 0.5, 3.0]] {
            assert_eq!(m.metric_tensor(x), minkowski());
        }
    }

    #[test]
    fn yukawa_decays_to_minkowski() {
        let m = MetricModel::v1_only(RadialProfile::yukawa(0.8, 1.0).unwrap());
        let g = m.metric_tensor([0.0, 60.0, 0.0, 0.0]);
        assert!((g - minkowski()).abs().max() < 1e-10);
    }

    #[test]
    fn direct_substitution() {
        let r0 = 1.5;
        let table = RadialProfile::tabulated(vec![0.0, 3.0, 4.0], vec![0.1, 0.1, 0.0]).unwrap();
        let m = MetricModel::v1_only(table);
        let g = m.metric_tensor([0.0, 0.0, r0, 0.0]);
        assert!((g[(0, 0)] - 0.9).abs() < 1e-15);
        assert_eq!(g[(1, 1)], -1.0);
    }

    #[test]
    fn off_diagonal_conventions() {
        let v3 = RadialProfile::gaussian(0.2, 1.0).unwrap();
        let model = MetricModel::new(RadialProfile::Zero, RadialProfile::Zero, v3.clone());
        let x = [0.0, 0.3, 0.4, 0.0];
        let v = v3.value(0.5);
        let g = model.metric_tensor(x);
        assert!((g[(1, 2)] + v).abs() < 1e-15);
        assert_eq!(g[(1, 2)], g[(2, 1)]);
        assert_eq!(g[(0, 2)], 0.0);
        let one_minus = model.with_convention(OffDiagonalConvention::OneMinus).metric_tensor(x);
        assert!((one_minus[(2, 3)] - (1.0 - v)).abs() < 1e-15);
        // the one-minus form does not reduce to Minkowski when v3 = 0
        let flat_one_minus = MetricModel::flat().with_convention(OffDiagonalConvention::OneMinus);
        assert_eq!(flat_one_minus.metric_tensor(x)[(1, 3)], 1.0);
    }
}
