//! Linear stability of the homogeneous steady state.
//!
//! A plane wave `exp(phi t + i k.x)` solves the linearised system iff
//! `det M(k, phi) = 0`. The determinant factors as
//! `B(phi; k^2)^(d-1) * P(phi; k^2)` where `B = rho phi^2 + mu k^2` carries
//! transverse elastic waves and `P = P1 + P2 P3` is the degree-7
//! characteristic polynomial assembled in [`CharPoly`].

mod charpoly;
mod conditions;
mod dispersion;
mod matrix;
mod pattern;
mod planewave;

pub use charpoly::CharPoly;
pub use conditions::{
    coupled_conditions, coupled_theta, critical_parameter, critical_wavenumber, homogeneous_cubic,
    routh_hurwitz_cubic, uncoupled_conditions, CoupledConditions, CriticalParameter, Mode,
    ReducedQuadratic, RouthHurwitz, ThetaCoeffs, UncoupledConditions, DEFAULT_K2_MAX,
};
pub use dispersion::{dispersion, log_k2_grid, DispersionOptions, DispersionPoint};
pub use matrix::{assemble_system_matrix, WaveProbe};
pub use pattern::{pattern_space, AxisSpec, CellFlags, PatternSpaceGrid};
pub use planewave::{planewave_residual_oracle, PlaneWaveResidual};
