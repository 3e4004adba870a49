//! Composition integrators with complex coefficients and projection on the
//! real axis.
//!
//! A [`FlowMap`] is the unit everything composes: it maps a complex state and
//! a complex step to a new state. Double-jump compositions with conjugate
//! coefficients, followed by taking the real part of the output, give methods
//! that are symmetric and symplectic up to orders well beyond their
//! convergence order when the basic method is symmetric and symplectic.
//!
//! The crate is organised as
//!
//! - [`composition`]: coefficients, combinators, real projection and the
//!   recursive family,
//! - [`problems`]: harmonic oscillator, Kepler, Fisher and complex
//!   Ginzburg–Landau test systems as exact split flows,
//! - [`spectral`]: periodic grid, FFT pair and diagonal propagators,
//! - [`diagnostics`]: trajectories, convergence and defect measurements,
//! - [`exec`]: data-parallel sweep helper with a sequential fallback.

pub mod composition;
pub mod diagnostics;
mod error;
pub mod exec;
mod flow;
pub mod problems;
pub mod spectral;

pub use error::{Error, Result};
pub use flow::{FlowMap, MethodMeta, OrderBound, C64};
