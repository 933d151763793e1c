//! Convex-analysis toolkit for valuations on super-coercive convex functions.
//!
//! The crate is organised around exact piecewise-linear radial profiles
//! ([`profile`]), the factorial embedding `g_k` and related constructions
//! ([`embed`]), closed-form and quadrature evaluation of the three valuation
//! components on radial functions ([`radial`]), a grid-based numeric oracle
//! in one and two dimensions ([`grid`]) and the property harness
//! ([`valuation`]).

pub mod embed;
pub mod grid;
pub mod io;
pub mod error;
pub mod profile;
pub mod quadrature;
pub mod radial;
pub mod scalar;
pub mod valuation;
pub mod zeta;

pub use error::{Error, Result};
pub use profile::{Knot, PLProfile};
pub use scalar::{Bound, Ext, Rational, Scalar};
pub use zeta::ScalarZeta;
