//! Related sets, revisions, tour lengths `L(S)` and `L'(S)`, spanning-tree
//! bounds and the experiments built on them.

mod experiment;
mod folner;
mod related;
mod tsp;

pub use experiment::{
    box_points, sample_related_set, ts_lambda_experiment, ExperimentConfig, ExperimentReport, SampleOutcome, Sampler,
    Violation,
};
pub use folner::{folner_traversal_demo, k_boundary, spanning_tree_traversal, xi_boundary, FolnerReport};
pub use related::{is_xi_related, revise, RelatedSet};
pub use tsp::{
    distance_matrix, heuristic_matrix, l_prime, l_prime_matrix, mst_bounds, mst_matrix, tsp_exact, tsp_exact_matrix,
    tsp_heuristic, ClosedPath, MstBounds, Tour, TourKind, DEFAULT_EXACT_CAP, MAX_EXACT_CAP,
};
