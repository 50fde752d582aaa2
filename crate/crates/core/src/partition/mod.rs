//! Piece decompositions of tour orders and the forests of xi-trees that
//! certify `L(S) >= (r/12)|S|` or `L(S) >= (r/96)|S|`.
//!
//! Both bounds rest on a word-length property of `(xi, r)` that the forest
//! builder does not check; [`verify_forest`] re-checks the structure and, in
//! free groups, the pairwise distances the property is supposed to give.

mod forest;
mod pieces;
mod verify;

pub use forest::{build_forest, build_forest_p, build_forest_p10, Census, ForestMode, ForestVertex, STree, TreeForest};
pub use pieces::{decompose_pieces, PieceDecomposition};
pub use verify::{verify_forest, Check, VerificationReport};
