//! Model parameters, coefficient functions and the homogeneous steady state.

mod functions;
mod params;
mod steady;

pub use functions::{active_stress, active_stress_slope, hill, hill_derivative, lame_from_e_nu, priming_wave};
pub use params::{ParameterSet, PARAMETER_NAMES};
pub use steady::{epithelium_equilibrium, SteadyState};
