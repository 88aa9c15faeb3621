//! Fractional quantum numbers from hyperbolic 2-orbifolds.
//!
//! The crate covers three layers:
//!
//! * exact arithmetic on orbifold signatures ([`orbifold`], [`search`]);
//! * Fuchsian groups as matrix groups acting on the Poincaré disk
//!   ([`hyperbolic`], [`fuchsian`]);
//! * the twisted group algebra on a finite Cayley ball, with Harper
//!   operators, Fermi projections and the two Hall-conductance cocycles
//!   ([`algebra`], [`comparison`]).

// `!(x < limit)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod comparison;
pub mod conductance;
pub mod error;
pub mod fuchsian;
pub mod hyperbolic;
pub mod orbifold;
pub mod rational;
pub mod search;
pub mod spectral;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use orbifold::{GeometryClass, OrbifoldSignature};
pub use rational::Rational;
