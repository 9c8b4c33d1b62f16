//! Dirac operators built from translations and reflections, a radially
//! distorted metric with its Schrödinger-limit effective potential, and
//! bound-state solvers that tie the two together.
//!
//! Natural units throughout: ħ = c = 1, lengths in 1/K_M.

pub mod cli;
pub mod clifford;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod planewave;
pub mod solvers;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/clifford.md")]
    mod clifford {}
    #[doc = include_str!("../../../book/src/plane-waves.md")]
    mod plane_waves {}
    #[doc = include_str!("../../../book/src/metric.md")]
    mod metric {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
