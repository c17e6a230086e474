//! Instance files and the seeded instance generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    locate_in_ring, orientation_eps, Location, Orientation, Point, PointSet, SimplePolygon,
    Tolerance,
};
use crate::tree::{BalancedBinaryTree, NestedTree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeSpec {
    Balanced { balanced: usize },
    Nested(NestedTree),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct InstanceFile {
    polygon: Vec<[f64; 2]>,
    points: Vec<[f64; 2]>,
    tree: TreeSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub polygon: SimplePolygon,
    pub points: PointSet,
    pub tree_spec: TreeSpec,
    pub tree: BalancedBinaryTree,
}

impl Instance {
    pub fn new(polygon: SimplePolygon, points: PointSet, tree_spec: TreeSpec) -> Result<Self> {
        let tree = match &tree_spec {
            TreeSpec::Balanced { balanced } => BalancedBinaryTree::balanced(*balanced),
            TreeSpec::Nested(t) => BalancedBinaryTree::from_nested(t)?,
        };
        if tree.len() != points.len() {
            return Err(Error::Validation(format!(
                "tree has {} nodes but {} points were given",
                tree.len(),
                points.len()
            )));
        }
        let eps = polygon.tolerance().eps;
        for (i, p) in points.points().iter().enumerate() {
            if locate_in_ring(*p, polygon.vertices(), eps) == Location::Outside {
                return Err(Error::Validation(format!(
                    "point {i} ({}, {}) lies outside the polygon",
                    p.x, p.y
                )));
            }
        }
        Ok(Instance {
            polygon,
            points,
            tree_spec,
            tree,
        })
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            polygon: self.polygon.vertices().iter().map(|&p| p.into()).collect(),
            points: self.points.points().iter().map(|&p| p.into()).collect(),
            tree: self.tree_spec.clone(),
        };
        serde_json::to_string_pretty(&file).expect("instance serializes")
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::for_points(self.polygon.vertices().iter().chain(self.points.points()))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let polygon = SimplePolygon::new(file.polygon.into_iter().map(Point::from).collect())?;
    let points = PointSet::new(file.points.into_iter().map(Point::from).collect())?;
    Instance::new(polygon, points, file.tree)
}

/// Deterministic random instance: a star-shaped or perturbed convex polygon
/// with `m` vertices and `n` points sampled strictly inside it.
pub fn generate_instance(m: usize, n: usize, seed: u64) -> Result<Instance> {
    if m < 3 {
        return Err(Error::GenerationFailure("m must be at least 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polygon = (0..64)
        .find_map(|_| random_polygon(&mut rng, m))
        .ok_or_else(|| Error::GenerationFailure(format!("no usable {m}-gon after 64 attempts")))?;
    let points = sample_points(&mut rng, &polygon, n)?;
    Instance::new(polygon, points, TreeSpec::Balanced { balanced: n })
}

const RADIUS: f64 = 100.0;

fn random_polygon(rng: &mut ChaCha8Rng, m: usize) -> Option<SimplePolygon> {
    let star = rng.gen_bool(0.7);
    let tau = std::f64::consts::TAU;
    let vs: Vec<Point> = (0..m)
        .map(|i| {
            let theta = tau * (i as f64 + rng.gen_range(-0.35..0.35)) / m as f64;
            let r = if star {
                rng.gen_range(0.35..1.0)
            } else {
                rng.gen_range(0.85..1.0)
            } * RADIUS;
            Point::new(RADIUS + r * theta.cos(), RADIUS + r * theta.sin())
        })
        .collect();
    // Reject near-straight corners and near-parallel adjacent edges; they
    // produce near-simultaneous skeleton events.
    let eps = Tolerance::for_points(&vs).eps;
    for i in 0..m {
        let a = vs[(i + m - 1) % m];
        let b = vs[i];
        let c = vs[(i + 1) % m];
        let u = (b - a).normalized();
        let v = (c - b).normalized();
        if u.cross(v).abs() < 0.02 || orientation_eps(a, b, c, eps) == Orientation::Collinear {
            return None;
        }
    }
    SimplePolygon::new(vs).ok()
}

fn sample_points(rng: &mut ChaCha8Rng, polygon: &SimplePolygon, n: usize) -> Result<PointSet> {
    let (mut lo, mut hi) = (
        Point::new(f64::MAX, f64::MAX),
        Point::new(f64::MIN, f64::MIN),
    );
    for p in polygon.vertices() {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let margin = 1e-4 * RADIUS;
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    let budget = 2000 * (n + 1);
    for _ in 0..budget {
        if pts.len() == n {
            break;
        }
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if locate_in_ring(p, polygon.vertices(), 0.0) != Location::Inside {
            continue;
        }
        if polygon.edges().any(|e| e.dist_to(p) <= margin)
            || pts.iter().any(|q| q.dist(p) <= margin)
        {
            continue;
        }
        pts.push(p);
    }
    if pts.len() < n {
        return Err(Error::GenerationFailure(format!(
            "placed only {} of {n} points",
            pts.len()
        )));
    }
    PointSet::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance_parses() {
        let text =
            r#"{"polygon": [[0,0],[4,0],[0,3]], "points": [[1,1]], "tree": {"balanced": 1}}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.tree.len(), 1);
    }

    #[test]
    fn nested_tree_parses() {
        let text = r#"{"polygon": [[0,0],[4,0],[0,3]], "points": [[1,1],[0.5,0.5]],
                       "tree": {"left": {}, "right": null}}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.tree.len(), 2);
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let text =
            r#"{"polygon": [[0,0],[4,0],[0,3]], "points": [[1,1]], "tree": {"balanced": 2}}"#;
        assert!(matches!(parse_instance(text), Err(Error::Validation(_))));
    }

    #[test]
    fn self_intersecting_polygon_names_edges() {
        let text =
            r#"{"polygon": [[0,0],[1,1],[1,0],[0,1]], "points": [], "tree": {"balanced": 0}}"#;
        match parse_instance(text) {
            Err(Error::Validation(msg)) => {
                assert!(msg.contains("edge 0") && msg.contains("edge 2"), "{msg}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn outside_point_is_rejected() {
        let text =
            r#"{"polygon": [[0,0],[4,0],[0,3]], "points": [[5,5]], "tree": {"balanced": 1}}"#;
        match parse_instance(text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("point 0"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            parse_instance("{\"polygon\": ["),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        for seed in 0..20 {
            let a = generate_instance(12, 9, seed).unwrap();
            let b = generate_instance(12, 9, seed).unwrap();
            assert_eq!(a, b);
            let eps = a.polygon.tolerance().eps;
            for p in a.points.points() {
                assert_eq!(
                    locate_in_ring(*p, a.polygon.vertices(), eps),
                    Location::Inside
                );
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let a = generate_instance(7, 5, 3).unwrap();
        assert_eq!(parse_instance(&a.to_json()).unwrap(), a);
    }
}
