//! k-Hessian eigenvalues of the unit ball.
//!
//! * [`radial`]: radial Hessian spectra, `σ_k`, admissibility and the radial
//!   Rayleigh quotient.
//! * [`quadrature`]: adaptive Gauss–Legendre integration on `(0, 1)`.
//! * [`bounds`]: exact rational evaluation of the closed-form eigenvalue
//!   bounds.
//! * [`eigensolver`]: normalized fixed-point iteration for the principal
//!   radial eigenpair, with residual diagnostics and parallel sweeps.
//! * [`bessel`]: the `k = 1` reference eigenvalue `j²_{n/2−1}`.
//! * [`gap`]: the gap constant and sup-norm distance to the cone.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod bessel;
pub mod bounds;
pub mod eigensolver;
pub mod error;
pub mod gap;
pub mod parallel;
pub mod quadrature;
pub mod radial;
pub mod rational;

pub use bessel::laplace_reference;
pub use bounds::BoundsReport;
pub use eigensolver::{solve, sweep, sweep_sequential, EigenResult, SolverConfig};
pub use error::{Error, Result};
pub use gap::GapRecord;
pub use radial::{HessianOrder, RadialFunction, RadialGrid, RadialProfile};
pub use rational::ExactRational;
