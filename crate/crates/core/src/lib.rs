//! Flexible 3x3 Kokotsakis meshes through the algebra of Bricard equations.
//!
//! The pipeline: angles or coefficients of four spherical quads
//! ([`bricard`]), classification of the two couplings ([`coupling`]),
//! structured factorization of their resultants ([`factorizer`]), the
//! shared-factor flexibility test and constructors ([`matching`]), and
//! numeric tracing plus spherical-linkage embedding ([`trace`], [`embed`]).

pub mod bricard;
pub mod construct;
pub mod coupling;
pub mod document;
pub mod embed;
pub mod factorizer;
pub mod golden;
pub mod matching;
pub mod mobius;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod trace;
pub mod verify;

pub use mobius::{mobius_compose, mobius_is_scalar, Mobius, ProjReal};
pub use poly::{
    poly_divide_exact, proportional, ratio_chain_holds, sylvester_resultant, BiPoly, Parity,
    PolyError, UniPoly, Var,
};
pub use scalar::{Scalar, Tolerance};
