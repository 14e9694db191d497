//! State-monad algebras in finite sets.
//!
//! The crate computes with the state monad `T = (S × −)^S` over a finite set
//! `S`, entirely in the skeletal category of finite sets:
//!
//! - [`finset`]: objects, morphisms as tables, products, exponentials, image
//!   factorization.
//! - [`state_monad`]: `η`, `μ`, `θ`, `γ` as tables and as pointwise maps.
//! - [`algebra`]: algebra laws, morphisms, and enumeration of all algebra
//!   structures on a carrier.
//! - [`monadicity`]: the comparison functor `K`, its inverse `L`, and a full
//!   verification report.
//! - [`equational`]: lookup/update terms, rewriting, denotations, and the
//!   translation between algebras and models of the equations.

pub mod algebra;
pub mod equational;
pub mod error;
pub mod finset;
pub mod monadicity;
pub mod state_monad;

pub use algebra::{
    check_algebra, check_morphism, enumerate_algebras, free_algebra, AlgebraMorphism,
    AlgebraRecord, Method, TAlgebra, DEFAULT_CEILING,
};
pub use error::{Error, Result};
pub use finset::{compose, FinSet, Morphism};
pub use state_monad::{StateMonadCtx, TCodec};
