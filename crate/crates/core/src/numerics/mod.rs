//! Shared numerical routines: root bracketing, golden-section search,
//! Gauss–Hermite quadrature, damped least squares.

pub mod brent;
pub mod golden;
pub mod hermite;
pub mod leastsq;
pub mod stats;
