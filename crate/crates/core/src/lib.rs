//! Exact tools for totally unimodular matrices: certification, network
//! matrices, sums, extremal families, unimodular 0/1-polytopes and
//! column-maximal search.

pub mod certify;
pub mod compose;
pub mod families;
pub mod graphical;
pub mod lattice;
pub mod lp;
pub mod matrix;
pub mod polytope;
pub mod sample;
pub mod search;

pub use certify::{certify_tu, is_totally_unimodular, Functional, TuMethod, TuVerdict};
pub use matrix::{parse_matrix, IndexSet, IntMatrix, MatrixError, ParseError};
