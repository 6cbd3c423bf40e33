//! Unions of convex polyhedra indexed by an AABB tree, and the boolean
//! operations on them that use the index to skip disjoint pairs.

mod aabb_tree;
mod iuop;

pub use aabb_tree::AabbTree;
pub use iuop::{
    iuop_diff, iuop_intersect, iuop_intersect_with_stats, iuop_union, simplify, IndexedUnion, OpStats,
};
pub(crate) use iuop::{diff_raw, intersect_raw};
