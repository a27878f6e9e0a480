//! Peanut harmonics in flat-ring cyclide coordinates.
//!
//! The crate provides Jacobian elliptic functions, the Lamé–Wangerin
//! eigenfunctions of the modified Lamé equation, flat-ring coordinate
//! geometry, internal and external peanut harmonics, the expansion of
//! `1/‖r − r*‖` in those harmonics, and executable checks of the associated
//! addition theorem, integral identities and limit laws.

pub mod cheb;
pub mod elliptic;
pub mod error;
pub mod flatring;
pub mod harmonics;
pub mod lame;
pub mod ode;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub mod limits;
