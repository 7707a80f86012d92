//! Quantum Brownian motion of a free particle with linear damping.
//!
//! A particle of mass m, damped at rate gamma = eta / m and driven by an
//! external force F(t), is described by an explicitly time-dependent
//! Hamiltonian: the kinetic term carries a factor exp(-gamma t) and the force
//! coupling a factor exp(+gamma t). The expectation value of position then
//! obeys the classical Langevin equation m x'' + eta x' = F(t) exactly, while
//! the wave packet keeps a path-independent width.
//!
//! The crate provides:
//!
//! - closed-form kernels (plane waves, two-time propagator, evolved Gaussian
//!   packets) built on cumulative integrals of the force path ([`kernels`]),
//! - a split-operator spectral solver for the same equation ([`solver`]),
//! - an exact-flow integrator for the classical Langevin equation
//!   ([`langevin`]),
//! - white-noise force paths with reproducible per-path seeding ([`noise`]),
//! - ensemble statistics separating the quantum width from the classical
//!   scatter of packet centers ([`ensemble`]),
//! - an end-to-end verification suite pinning the analytic limits
//!   ([`verify`]).
//!
//! Units: hbar = 1 throughout. Time grids start at t = 0.

pub mod ensemble;
pub mod error;
pub mod kernels;
pub mod langevin;
pub mod noise;
pub mod solver;
mod stats;
pub mod types;
pub mod verify;

pub use error::CkError;
