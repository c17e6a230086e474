//! Point-set embedding of balanced binary trees inside simple polygons.
//!
//! The pipeline computes the straight skeleton of the polygon, splits its
//! faces into convex subfaces, cuts the subface cycle so that each side holds
//! exactly as many points as the corresponding subtree, and recurses with
//! backbone paths that double as the polyline edges of the drawing.

pub mod embed;
pub mod emit;
pub mod error;
pub mod geometry;
pub mod skeleton;
pub mod sss;

pub use error::{Error, Result};
pub use geometry::{
    is_convex, is_monotone, orientation, point_location, segment_intersection, signed_area,
    Direction, Intersection, Location, Orientation, Point, PointSet, Polyline, Segment,
    SimplePolygon, Tolerance,
};
pub use skeleton::{compute_straight_skeleton, ArcKind, NodeKind, StraightSkeleton};
pub mod io;
pub mod render;
pub mod tree;
pub mod validate;

pub use embed::{embed, Embedding};
pub use emit::{
    embedding_json, parse_embedding, partition_json, report_json, skeleton_json, sss_json,
};
pub use io::{generate_instance, parse_instance, Instance, TreeSpec};
pub use render::{emit_svg, Artifacts, Layers, RenderSpec};
pub use sss::{
    arc_weights, count_points, divide_subface, middle_point, open_cycle, partition, radial_order,
    split_reflex_vertices, Cell, EdgeTag, PartitionResult, SplitSkeleton, Subface, Sweep,
};
pub use tree::{build_balanced_tree, BalancedBinaryTree};
pub use validate::{
    brute_force_crossings, check_faces, check_skeleton_counts, validate_embedding,
    validate_embedding_eps, validation_eps, Check, ValidationReport,
};
