//! Point counting and zeta functions for curves over finite fields.
//!
//! The crate is organized around parametrized families: a family description
//! fixes the shape of a curve (short Weierstrass cubic, genus-2 hyperelliptic
//! model, or plane projective form), a specialization picks a field and
//! parameter values, discriminant gates sort members into smooth and
//! degenerate, and the counting/zeta layers work uniformly on everything the
//! gates admit.
//!
//! Layering, bottom up: [`ff`] (finite fields) -> [`upoly`] (univariate
//! polynomials, resultants) -> [`zeta`] (numerator arithmetic and Weil
//! checks) -> [`ecurve`] / [`hyperell`] / [`planecurve`] (the three curve
//! shapes) -> [`family`] (descriptions, gates, specialization).

pub mod ecurve;
pub mod error;
pub mod family;
pub mod ff;
pub mod hyperell;
pub mod planecurve;
pub mod upoly;
pub mod zeta;

pub use error::{Error, Result};
