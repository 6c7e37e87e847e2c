//! Witnesses for structural parameters and their verifiers.

mod cover;
mod layout;
mod td;
mod tremaux;

pub use cover::{
    is_sparse, min_fvs, min_sparse_fvs, min_vertex_cover, sparsify_fvs, verify_fvs, verify_vertex_cover,
    violating_pairs,
};
pub use layout::{
    bandwidth_layout_from_pd, cuthill_mckee, exact_bandwidth, exact_cutwidth, layout_bandwidth, layout_cutwidth, pd_bandwidth_bound,
    LinearLayout,
};
pub use td::{
    annotate, check_td, make_nice, path_decomposition, tree_decomposition, verify_annotated, verify_pd, verify_td,
    AnnotatedTD, NodeKind, Optimality, PathDecomposition, PdStrategy, TdStrategy, TreeDecomposition, EXACT_LIMIT,
};
pub use tremaux::{check_almost_paths, treedepth_witness_from_fvs, verify_tremaux, AlmostPaths, TremauxTree};
