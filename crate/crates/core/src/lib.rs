//! Moment and norm bounds for polynomial random matrices.
//!
//! A [`PolyMatrix`] is a matrix-valued polynomial in independent scalar
//! variables. The crate builds its partial-derivative block matrices, evaluates
//! recursive moment bounds on `E‖F(x) − EF‖`, and checks every bound against
//! seeded Monte Carlo estimates.

pub mod blocks;
pub mod bounds;
pub mod cli;
pub mod corpus;
pub mod dist;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod melon;
pub mod numerics;
pub mod polymatrix;
pub mod sampling;
pub mod suite;

pub use dist::Distribution;
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use polymatrix::PolyMatrix;
