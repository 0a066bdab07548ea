//! Exact formal Laurent distribution calculus in several variables.
//!
//! The crate provides the substrate the algebraic layers compute in: sparse
//! grids of exact coefficients with tracked support and exactness windows,
//! binomial expansions with explicit direction conventions, formal delta
//! functions materialized onto windows, and windowed equality with witnesses.
//! No floating point appears anywhere.

pub mod dist;
pub mod error;
pub mod expand;
pub mod scalar;
pub mod vars;
pub mod window;

pub use dist::{FormalDistribution, SupportTag};
pub use error::{EqOutcome, FormalError, Witness};
pub use expand::{delta, delta_inv, iota_expand, substitute_shift, Atom, LinearForm};
pub use scalar::{binom_scalar, binomial, factorial, Scalar};
pub use vars::Vars;
pub use window::{Ext, Span, Window};
