//! Dense-group detection and maximal half-isolated biclique enumeration on
//! bipartite graphs.
//!
//! The pipeline: score every target by how suspicious its audience is
//! ([`basket`]), order each target's audience globally and fold the
//! resulting baskets into a prefix tree ([`stree`]), then either
//!
//! * enumerate every maximal biclique with an internally-contained side
//!   exactly, by mining both the tree and its transpose ([`mhibp`]), or
//! * draw a depth/score boundary through the tree and rank accounts by the
//!   score mass of their selected nodes ([`detector`]), optionally across
//!   several attribute trees at once ([`sforest`]).
//!
//! [`synth`] plants seeded synchronized groups in random backgrounds and
//! [`eval`] measures how well a ranking recovers them.

pub mod basket;
pub mod detector;
pub mod error;
pub mod eval;
pub mod graph;
pub mod mhibp;
pub mod sforest;
pub mod stree;
pub mod synth;

pub use basket::{
    basket_mass, build_baskets, build_baskets_with, Basket, GOrder, Mode, OrderingRule,
};
pub use detector::{
    default_depth, default_thickness, detect, resolve_params, s_scores, select_suspicious,
    BoundaryOverrides, BoundaryParams, SuspiciousSet, SuspiciousnessRanking,
};
pub use error::{Error, Result};
pub use graph::{
    ingest, read_edge_list, BipartiteGraph, GraphBuilder, SourceId, TargetId,
};
pub use mhibp::{brute_force_mhi, solve_mhibp, solve_mhibp_with, Biclique, BicliqueSet};
pub use sforest::{
    build_forest, combined_score, forest_scores, read_mode_sidecar, DimensionSpec, KDataset,
    SForest,
};
pub use stree::{build_stree, NodeClass, NodeIdx, STree, STreeNode};
pub use synth::{
    add_camouflage, gen_background, gen_kdataset, inject_group, read_labels, write_labels,
    CamouflageKind, InjectionSpec, LabeledGraph,
};
pub use eval::{auc, best_f1, join};
