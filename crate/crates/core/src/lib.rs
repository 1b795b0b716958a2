//! Numerical laboratory for almost periods of quasiperiodic signals.
//!
//! * [`signal`]: trigonometric polynomials and their closed-form translation
//!   distance.
//! * [`almost_periods`]: certified scans of eps-almost-period sets, inclusion
//!   lengths and growth-exponent fits.
//! * [`diophantine`]: continued fractions, badness scores, simultaneous
//!   denominators and a Kronecker solver.
//! * [`dimension`]: the torus model of the hull, covering numbers and
//!   dimension fits.

pub mod almost_periods;
pub mod dimension;
pub mod diophantine;
pub mod error;
pub mod real;
pub mod regression;
pub mod signal;

pub use error::{Error, Limits, Result};
pub use real::Real;
pub use signal::{parse_real_expr, parse_signal, Exponent, Preset, QuasiperiodicSignal, Term};
