//! Numerical laboratory for conformal metrics on singular spaces, minimal-cone
//! spectral data and discrete potential theory.
//!
//! The crate is organised in four layers:
//!
//! * [`metric`] builds sampled spaces, attaches conformal densities and
//!   measures path metrics, Gromov hyperbolicity, uniformity and chains of
//!   nested neighbourhoods toward boundary points.
//! * [`cone`] holds the closed-form geometry of Lawson cones and exports
//!   cone meshes as sampled spaces.
//! * [`spectral`] separates variables on cones: link eigenvalues, indicial
//!   exponents, fixed-point solutions and the scaling action.
//! * [`potential`] discretizes elliptic operators on model domains and runs
//!   Green, Martin, boundary Harnack and criticality experiments.

pub mod cone;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod potential;
pub mod spectral;

pub use error::{Error, Result};
