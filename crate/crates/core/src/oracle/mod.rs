//! Ground truth for the closed forms: adaptive quadrature of the defining
//! integrals and seeded Monte Carlo over channel realizations.

pub mod integrals;
pub mod mc;
pub mod quad;
