//! Tumor–immune competition model with two response delays and periodic
//! chemotherapy.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole analysis
//! pipeline of the model
//!
//! ```text
//! T' = T (f(t,T) - γ E)
//! E' = σ + E (p h(T(t-τ1)) - m h(T(t-τ2)) - η),     h(s) = s / (g + a s)
//! ```
//!
//! with Richards-type relative growth `f(t,T) = r (1 - β b(t) - T^β)`:
//!
//! - [`model`]: parameters, rescaling, growth/response functions and the vector field.
//! - [`equilibria`]: the `h_μ(T) = h0` root structure, fold constants and equilibria.
//! - [`linear`]: linearizations, characteristic functions, stability verdicts,
//!   the equal-delay Hopf delay and argument-principle root counting.
//! - [`switching`]: stability switching curves in the `(τ1, τ2)` plane.
//! - [`dde`]: fixed-step method-of-steps integration with dense output.
//! - [`periodic`]: nonresonance and shooting continuation of periodic orbits.
#![no_std]
// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dde;
pub mod equilibria;
mod error;
pub mod linear;
pub mod math;
pub mod model;
pub mod periodic;
pub mod roots;
pub mod switching;

pub use error::{Error, Result};
pub use math::Mat2;
pub use model::{ChemoForcing, Model, ModelParams, ScaledParams, State};
pub use num_complex::Complex64;
