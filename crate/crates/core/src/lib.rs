//! Poroelastic chemotaxis model of feather-primordia patterning.
//!
//! The crate is split into five areas:
//!
//! * [`model`]: parameters, Hill functions, priming wave and the homogeneous steady state.
//! * [`stability`]: system matrix, characteristic polynomial, dispersion relations,
//!   patterning conditions and parameter-space sweeps.
//! * [`sim`]: a 2D structured-grid simulator of the coupled system.
//! * [`growth`]: finite-strain growth kinematics and constitutive algebra.
//! * [`io`]: configuration parsing and text output helpers.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod growth;
pub mod io;
pub mod model;
pub mod roots;
pub mod rng;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
pub use model::{ParameterSet, SteadyState};
