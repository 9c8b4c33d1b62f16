use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tabulated profiles must return to zero within this tolerance at their last node.
pub const TABLE_TAIL_TOL: f64 = 1e-10;

/// A dimensionless radial function v(r) that decays at large r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RadialProfile {
    Zero,
    /// g·exp(−μr)/(μr).
    Yukawa { strength: f64, range: f64 },
    /// g·exp(−r²/(2σ²)).
    Gaussian { strength: f64, width: f64 },
    /// Piecewise-linear interpolation; zero beyond the last node.
    Tabulated { r: Vec<f64>, values: Vec<f64> },
}

impl Default for RadialProfile {
    fn default() -> Self {
        RadialProfile::Zero
    }
}

impl RadialProfile {
    pub fn yukawa(strength: f64, range: f64) -> Result<Self> {
        let p = RadialProfile::Yukawa { strength, range };
        p.validate()?;
        Ok(p)
    }

    pub fn gaussian(strength: f64, width: f64) -> Result<Self> {
        let p = RadialProfile::Gaussian { strength, width };
        p.validate()?;
        Ok(p)
    }

    pub fn tabulated(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = RadialProfile::Tabulated { r, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        match self {
            RadialProfile::Zero => Ok(()),
            RadialProfile::Yukawa { strength, range } => {
                if !strength.is_finite() {
                    return bad(format!("yukawa strength must be finite, got {strength}"));
                }
                if !(range.is_finite() && *range > 0.0) {
                    return bad(format!("yukawa range must be > 0, got {range}"));
                }
                Ok(())
            }
            RadialProfile::Gaussian { strength, width } => {
                if !strength.is_finite() {
                    return bad(format!("gaussian strength must be finite, got {strength}"));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return bad(format!("gaussian width must be > 0, got {width}"));
                }
                Ok(())
            }
            RadialProfile::Tabulated { r, values } => {
                if r.len() != values.len() {
                    return bad(format!("table has {} radii but {} values", r.len(), values.len()));
                }
                if r.len() < 2 {
                    return bad("table needs at least two nodes".into());
                }
                if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("table radii must be non-negative and strictly increasing".into());
                }
                if values.iter().chain(r).any(|v| !v.is_finite()) {
                    return bad("table entries must be finite".into());
                }
                let tail = *values.last().expect("non-empty");
                if tail.abs() > TABLE_TAIL_TOL {
                    return bad(format!("table must end at zero, last value is {tail}"));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RadialProfile::Zero => true,
            RadialProfile::Yukawa { strength, .. } | RadialProfile::Gaussian { strength, .. } => {
                *strength == 0.0
            }
            RadialProfile::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// v(r). A Yukawa profile diverges at r = 0; grid code samples through
    /// [`RadialProfile::value_capped`] instead.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Yukawa { strength, range } => {
                let x = range * r;
                strength * (-x).exp() / x
            }
            RadialProfile::Gaussian { strength, width } => {
                strength * (-(r * r) / (2.0 * width * width)).exp()
            }
            RadialProfile::Tabulated { r: nodes, values } => interpolate(nodes, values, r),
        }
    }

    /// v(max(r, r_min)).
    pub fn value_capped(&self, r: f64, r_min: f64) -> f64 {
        self.value(r.max(r_min))
    }

    /// The same shape with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> RadialProfile {
        match self {
            RadialProfile::Zero => RadialProfile::Zero,
            RadialProfile::Yukawa { strength, range } => RadialProfile::Yukawa {
                strength: strength * factor,
                range: *range,
            },
            RadialProfile::Gaussian { strength, width } => RadialProfile::Gaussian {
                strength: strength * factor,
                width: *width,
            },
            RadialProfile::Tabulated { r, values } => RadialProfile::Tabulated {
                r: r.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }
}

fn interpolate(nodes: &[f64], values: &[f64], r: f64) -> f64 {
    let last = nodes.len() - 1;
    if r <= nodes[0] {
        return values[0];
    }
    if r >= nodes[last] {
        return 0.0;
    }
    let hi = nodes.partition_point(|&x| x <= r);
    let lo = hi - 1;
    let t = (r - nodes[lo]) / (nodes[hi] - nodes[lo]);
    values[lo] + t * (values[hi] - values[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yukawa_formula_and_decay() {
        let p = RadialProfile::yukawa(-0.3, 0.7).unwrap();
        let r = 1.3;
        let expected = -0.3 * (-0.7f64 * r).exp() / (0.7 * r);
        assert!((p.value(r) - expected).abs() < 1e-15);
        assert!(p.value(200.0).abs() < 1e-10);
        assert!(p.value_capped(0.0, 0.05).is_finite());
        assert_eq!(p.value_capped(0.0, 0.05), p.value(0.05));
    }

    #[test]
    fn gaussian_peak_and_decay() {
        let p = RadialProfile::gaussian(0.5, 2.0).unwrap();
        assert_eq!(p.value(0.0), 0.5);
        assert!(p.value(30.0).abs() < 1e-10);
    }

    #[test]
    fn tabulated_interpolates_and_vanishes_outside() {
        let p = RadialProfile::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert_eq!(p.value(0.5), 0.75);
        assert_eq!(p.value(1.0), 0.5);
        assert_eq!(p.value(5.0), 0.0);
    }

    #[test]
    fn tabulated_must_end_at_zero() {
        assert!(matches!(
            RadialProfile::tabulated(vec![0.0, 1.0], vec![1.0, 1e-6]),
            Err(Error::InvalidProfile(_))
        ));
        assert!(RadialProfile::tabulated(vec![0.0, 1.0], vec![1.0, 1e-11]).is_ok());
        assert!(RadialProfile::tabulated(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(RadialProfile::tabulated(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(RadialProfile::yukawa(1.0, 0.0).is_err());
        assert!(RadialProfile::gaussian(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn scaling_is_linear() {
        let p = RadialProfile::yukawa(-0.1, 0.02).unwrap();
        let q = p.scaled(0.04);
        assert!((q.value(3.0) - 0.04 * p.value(3.0)).abs() < 1e-15 * p.value(3.0).abs());
        assert!(RadialProfile::Zero.scaled(3.0).is_zero());
        assert!(p.scaled(0.0).is_zero());
    }
}
