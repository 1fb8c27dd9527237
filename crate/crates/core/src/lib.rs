//! Free-field realization of the deformed W-superalgebra of type A(M,N),
//! with exact verification of its parameter tables and quadratic relations.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: big rationals, exponent lattices, series, rational functions;
//! * [`superdynkin`]: fundamental systems, odd reflections, the extended matrix;
//! * [`freefield`]: the parameter tables and their contraction identities;
//! * [`wcurrents`]: structure functions, W-currents and pair kernels;
//! * [`relcheck`]: fusion, exchange and quadratic relation checks;
//! * [`fockoracle`]: a brute-force truncated Fock space cross-check;
//! * [`qpoisson`]: the classical-limit structure constants.

pub mod error;
pub mod exactnum;
pub mod exec;
pub mod fockoracle;
pub mod freefield;
pub mod prodform;
pub mod qpoisson;
pub mod relcheck;
pub mod report;
pub mod superdynkin;
pub mod wcurrents;

pub use error::{Result, WsError};
