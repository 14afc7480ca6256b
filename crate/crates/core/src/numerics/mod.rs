//! Floating-point corroboration: generalized trigonometric functions, the
//! displacement map in generalized polar coordinates, and the first
//! multiplier. Nothing here feeds back into the exact verdicts.

pub mod displacement;
pub mod gentrig;
pub mod ode;

pub use displacement::{
    displacement, geometric_grid, v1_check, DisplacementResult, DisplacementSample, PolarSystem, V1Estimate,
};
pub use gentrig::{closed_form, gen_trig, period, GenTrig};
pub use ode::{integrate, OdeOptions, OdeStats};
