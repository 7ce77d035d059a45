//! Mission planning for spring-launched, spin-stabilized pit-exploration
//! microbots: closed-form ballistics, precession-throttled soft landing, and
//! a rigid-body simulator that checks both.

pub mod attitude;
pub mod ballistics;
pub mod error;
pub mod planner;
pub mod simulator;

pub use error::{Error, Result};
