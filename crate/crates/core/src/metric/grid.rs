use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridDimension {
    /// s-wave radial line for u(r) = r·R(r).
    #[serde(rename = "radial-1d")]
    Radial1d,
    #[serde(rename = "cartesian-3d")]
    Cartesian3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Dirichlet,
    Periodic,
}

impl FromStr for GridDimension {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial-1d" | "radial" => Ok(GridDimension::Radial1d),
            "cartesian-3d" | "cartesian" => Ok(GridDimension::Cartesian3d),
            _ => Err(Error::InvalidGrid(format!("unknown dimension `{s}`"))),
        }
    }
}

impl fmt::Display for GridDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridDimension::Radial1d => "radial-1d",
            GridDimension::Cartesian3d => "cartesian-3d",
        })
    }
}

/// Uniform grid in units of 1/K_M.
///
/// Radial: interior nodes r_i = (i+1)h, i < N, with h = extent/(N+1); u vanishes
/// at r = 0 and r = extent. Cartesian Dirichlet: x_i = −L + (i+1)h with
/// h = 2L/(N+1). Cartesian periodic: x_i = −L + ih with h = 2L/N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: GridDimension,
    pub extent: f64,
    pub points: usize,
    #[serde(default)]
    pub boundary: Boundary,
    /// Radius below which singular profiles are frozen. Defaults to h/2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
}

impl GridSpec {
    pub fn radial(extent: f64, points: usize) -> Result<Self> {
        let g = GridSpec {
            dimension: GridDimension::Radial1d,
            extent,
            points,
            boundary: Boundary::Dirichlet,
            r_min: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn cartesian(half_width: f64, points: usize, boundary: Boundary) -> Result<Self> {
        let g = GridSpec {
            dimension: GridDimension::Cartesian3d,
            extent: half_width,
            points,
            boundary,
            r_min: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_r_min(mut self, r_min: f64) -> Self {
        self.r_min = Some(r_min);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.extent.is_finite() && self.extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be > 0, got {}", self.extent)));
        }
        if self.points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be >= {MIN_POINTS}, got {}",
                self.points
            )));
        }
        if self.dimension == GridDimension::Radial1d && self.boundary == Boundary::Periodic {
            return Err(Error::InvalidGrid("radial grids are Dirichlet only".into()));
        }
        if let Some(r_min) = self.r_min {
            if !(r_min.is_finite() && r_min > 0.0) {
                return Err(Error::InvalidGrid(format!("r_min must be > 0, got {r_min}")));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        match (self.dimension, self.boundary) {
            (GridDimension::Radial1d, _) => self.extent / (self.points as f64 + 1.0),
            (GridDimension::Cartesian3d, Boundary::Dirichlet) => {
                2.0 * self.extent / (self.points as f64 + 1.0)
            }
            (GridDimension::Cartesian3d, Boundary::Periodic) => 2.0 * self.extent / self.points as f64,
        }
    }

    /// Total number of unknowns.
    pub fn len(&self) -> usize {
        match self.dimension {
            GridDimension::Radial1d => self.points,
            GridDimension::Cartesian3d => self.points.pow(3),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn volume_element(&self) -> f64 {
        let h = self.spacing();
        match self.dimension {
            GridDimension::Radial1d => h,
            GridDimension::Cartesian3d => h * h * h,
        }
    }

    pub fn core_radius(&self) -> f64 {
        self.r_min.unwrap_or(0.5 * self.spacing())
    }

    /// Coordinate of node `i` along one axis.
    pub fn axis_coordinate(&self, i: usize) -> f64 {
        let h = self.spacing();
        match (self.dimension, self.boundary) {
            (GridDimension::Radial1d, _) => (i as f64 + 1.0) * h,
            (GridDimension::Cartesian3d, Boundary::Dirichlet) => -self.extent + (i as f64 + 1.0) * h,
            (GridDimension::Cartesian3d, Boundary::Periodic) => -self.extent + i as f64 * h,
        }
    }

    /// (i, j, k) of a flat cartesian index.
    pub fn unflatten(&self, index: usize) -> [usize; 3] {
        let n = self.points;
        [index / (n * n), (index / n) % n, index % n]
    }

    pub fn flatten(&self, ijk: [usize; 3]) -> usize {
        let n = self.points;
        (ijk[0] * n + ijk[1]) * n + ijk[2]
    }

    /// Position of a node; radial grids report (r, 0, 0).
    pub fn position(&self, index: usize) -> [f64; 3] {
        match self.dimension {
            GridDimension::Radial1d => [self.axis_coordinate(index), 0.0, 0.0],
            GridDimension::Cartesian3d => self.unflatten(index).map(|i| self.axis_coordinate(i)),
        }
    }

    pub fn radius(&self, index: usize) -> f64 {
        let [x, y, z] = self.position(index);
        (x * x + y * y + z * z).sqrt()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.radius(i)).collect()
    }

    /// The same box with `points` replaced, keeping the boundary nodes fixed.
    pub fn with_points(&self, points: usize) -> Self {
        GridSpec { points, ..*self }
    }
}
