//! Exact arithmetic for the generalized Thompson groups F_{n,inf}: n-adic
//! rationals, piecewise-linear maps, membership and factorization, explicit
//! constructions, order-two elements of the extension by a flip, and the
//! theta/rho words used to test exotic involutions.

pub mod construct;
pub mod error;
pub mod involutions;
pub mod nadic;
pub mod plmap;
pub mod rational;
pub mod suites;
pub mod thompson;
pub mod words;

pub use error::{Error, Result};
pub use nadic::{NAdic, Residue};
pub use plmap::{Affine, HalfLineMap, PlMap, Side};
pub use rational::Rational;
pub use words::{Letter, Word};
