//! Independent checks of skeleton structure and of finished embeddings.
//! Nothing here reuses the construction code beyond basic geometry.

use serde::Serialize;

use crate::embed::Embedding;
use crate::geometry::ring_is_monotone;
use crate::geometry::{
    locate_in_ring, orientation_eps, ring_area, segment_intersection_eps, Direction, Intersection,
    Location, Orientation, Point, PointSet, Polyline, Segment, SimplePolygon, Tolerance,
};
use crate::skeleton::{NodeKind, StraightSkeleton};
use crate::tree::BalancedBinaryTree;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkeletonCounts {
    pub faces: usize,
    pub dummy_nodes: usize,
    pub arcs: usize,
    /// Sum of (degree − 2) over dummy nodes; m − 2 for any skeleton.
    pub excess_degree: usize,
}

/// Checks the structural counts: m faces, a tree on m + D nodes, and total
/// dummy excess degree m − 2 (a merged node of degree d counts d − 2 times).
pub fn check_skeleton_counts(ss: &StraightSkeleton) -> Result<SkeletonCounts, String> {
    let m = ss.polygon.len();
    let dummies: Vec<usize> = ss
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Dummy)
        .map(|n| n.id)
        .collect();
    let excess: usize = dummies
        .iter()
        .map(|&d| ss.node_degree(d).saturating_sub(2))
        .sum();
    let counts = SkeletonCounts {
        faces: ss.faces.len(),
        dummy_nodes: dummies.len(),
        arcs: ss.arcs.len(),
        excess_degree: excess,
    };
    if counts.faces != m {
        return Err(format!("{} faces for {m} edges", counts.faces));
    }
    if counts.arcs + 1 != m + counts.dummy_nodes {
        return Err(format!(
            "{} arcs on {} nodes is not a tree",
            counts.arcs,
            m + counts.dummy_nodes
        ));
    }
    if excess != m - 2 {
        return Err(format!("dummy excess degree {excess}, expected {}", m - 2));
    }
    if !ss.degenerate && (counts.dummy_nodes != m - 2 || counts.arcs != 2 * m - 3) {
        return Err(format!(
            "{} dummy nodes and {} arcs in a non-degenerate skeleton",
            counts.dummy_nodes, counts.arcs
        ));
    }
    for i in 0..m {
        if ss.node_degree(i) != 1 {
            return Err(format!(
                "polygon vertex {i} has degree {}",
                ss.node_degree(i)
            ));
        }
    }
    Ok(counts)
}

/// Every face is monotone along its edge and the face areas sum to the
/// polygon area.
pub fn check_faces(ss: &StraightSkeleton, rel: f64) -> Result<(), String> {
    let t = ss.polygon.tolerance();
    for f in &ss.faces {
        let e = ss.polygon.edge(f.boundary_edge);
        let d = Direction::from_vec(e.dir()).ok_or("zero-length edge")?;
        if !ring_is_monotone(&f.vertices, d, t.eps * 10.0) {
            return Err(format!("face {} is not monotone along its edge", f.id));
        }
    }
    let total: f64 = ss.faces.iter().map(|f| ring_area(&f.vertices)).sum();
    let area = ss.polygon.signed_area();
    if (total - area).abs() > rel * area.abs() {
        return Err(format!("face areas sum to {total}, polygon area is {area}"));
    }
    Ok(())
}

/// One named check of a report; a failed check carries a non-empty detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checks: Vec<Check>,
    /// Notes on degenerate input that do not fail the report.
    pub degenerate_flags: Vec<String>,
    pub bijection: bool,
    pub containment: bool,
    pub crossings: usize,
    pub points_on_edges: usize,
    pub graph_matches: bool,
    pub max_bends: usize,
    pub total_bends: usize,
    pub bend_budget: usize,
    pub messages: Vec<String>,
}

/// Pairs (i, j), i < j, of routes that meet anywhere other than at an
/// endpoint they share.
pub fn brute_force_crossings(
    routes: &[(Point, Point, &Polyline)],
    eps: f64,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            if routes_cross(routes[i], routes[j], eps) {
                out.push((i, j));
            }
        }
    }
    out
}

fn routes_cross(a: (Point, Point, &Polyline), b: (Point, Point, &Polyline), eps: f64) -> bool {
    a.2.segments()
        .any(|s| b.2.segments().any(|t| segments_conflict(&s, &t, a, b, eps)))
}

fn segments_conflict(
    s: &Segment,
    t: &Segment,
    a: (Point, Point, &Polyline),
    b: (Point, Point, &Polyline),
    eps: f64,
) -> bool {
    match segment_intersection_eps(s, t, eps) {
        Intersection::None => false,
        Intersection::Point(x) => ![a.0, a.1].into_iter().any(|p| {
            (p.approx_eq(b.0, eps) || p.approx_eq(b.1, eps)) && p.approx_eq(x, eps * 10.0)
        }),
        Intersection::Overlap(_) => true,
    }
}

/// Same result as [`brute_force_crossings`], pruned by a sweep over the
/// segments' x-extents.
pub fn sweep_crossings(routes: &[(Point, Point, &Polyline)], eps: f64) -> Vec<(usize, usize)> {
    let mut segs: Vec<(f64, f64, usize, Segment)> = Vec::new();
    for (i, r) in routes.iter().enumerate() {
        for s in r.2.segments() {
            segs.push((s.a.x.min(s.b.x) - eps, s.a.x.max(s.b.x) + eps, i, s));
        }
    }
    segs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut pairs = std::collections::BTreeSet::new();
    for (k, &(_, hi, i, s)) in segs.iter().enumerate() {
        for &(lo2, _, j, t) in &segs[k + 1..] {
            if lo2 > hi {
                break;
            }
            if i == j || pairs.contains(&(i.min(j), i.max(j))) {
                continue;
            }
            let (ylo, yhi) = (s.a.y.min(s.b.y), s.a.y.max(s.b.y));
            if t.a.y.max(t.b.y) < ylo - eps || t.a.y.min(t.b.y) > yhi + eps {
                continue;
            }
            if segments_conflict(&s, &t, routes[i], routes[j], eps) {
                pairs.insert((i.min(j), i.max(j)));
            }
        }
    }
    pairs.into_iter().collect()
}

fn properly_crosses(s: &Segment, e: &Segment, eps: f64) -> bool {
    let o1 = orientation_eps(s.a, s.b, e.a, eps);
    let o2 = orientation_eps(s.a, s.b, e.b, eps);
    let o3 = orientation_eps(e.a, e.b, s.a, eps);
    let o4 = orientation_eps(e.a, e.b, s.b, eps);
    let opposite = |x: Orientation, y: Orientation| {
        matches!(
            (x, y),
            (Orientation::Ccw, Orientation::Cw) | (Orientation::Cw, Orientation::Ccw)
        )
    };
    opposite(o1, o2) && opposite(o3, o4)
}

/// Default absolute tolerance of the embedding checks.
pub fn validation_eps(polygon: &SimplePolygon, pts: &PointSet) -> f64 {
    Tolerance::for_points(polygon.vertices().iter().chain(pts.points())).eps * 10.0
}

/// Checks a finished embedding against the instance.
pub fn validate_embedding(
    polygon: &SimplePolygon,
    pts: &PointSet,
    tree: &BalancedBinaryTree,
    emb: &Embedding,
    bend_budget: usize,
) -> ValidationReport {
    validate_embedding_eps(
        polygon,
        pts,
        tree,
        emb,
        bend_budget,
        validation_eps(polygon, pts),
    )
}

/// [`validate_embedding`] with an explicit absolute tolerance.
pub fn validate_embedding_eps(
    polygon: &SimplePolygon,
    pts: &PointSet,
    tree: &BalancedBinaryTree,
    emb: &Embedding,
    bend_budget: usize,
    eps: f64,
) -> ValidationReport {
    let mut messages = Vec::new();
    let n = tree.len();

    let mut seen = vec![false; pts.len()];
    let mut bijection = emb.node_point.len() == n && pts.len() == n;
    for (v, &p) in emb.node_point.iter().enumerate() {
        if p >= pts.len() || seen[p] {
            bijection = false;
            messages.push(format!("node {v} maps to invalid or repeated point {p}"));
        } else {
            seen[p] = true;
        }
    }
    if !bijection && messages.is_empty() {
        messages.push(format!(
            "{} nodes mapped for {n} nodes and {} points",
            emb.node_point.len(),
            pts.len()
        ));
    }
    let point_of = |v: usize| {
        emb.node_point
            .get(v)
            .filter(|&&p| p < pts.len())
            .map(|&p| pts.get(p))
    };

    let mut want = tree.edges();
    want.sort_unstable();
    let mut got: Vec<(usize, usize)> = emb.edges.iter().map(|e| (e.parent, e.child)).collect();
    got.sort_unstable();
    let mut graph_matches = want == got;
    if !graph_matches {
        messages.push("edge set differs from the tree".into());
    }
    for e in &emb.edges {
        let (Some(a), Some(b)) = (point_of(e.parent), point_of(e.child)) else {
            graph_matches = false;
            continue;
        };
        let vs = &e.route.vertices;
        if vs.len() < 2 || !vs[0].approx_eq(a, eps) || !vs[vs.len() - 1].approx_eq(b, eps) {
            graph_matches = false;
            messages.push(format!(
                "route of edge ({}, {}) does not join its endpoints",
                e.parent, e.child
            ));
        }
    }

    let mut containment = true;
    for e in &emb.edges {
        let mut bad = e
            .route
            .vertices
            .iter()
            .copied()
            .chain(e.route.segments().map(|s| s.midpoint()))
            .any(|p| locate_in_ring(p, polygon.vertices(), eps) == Location::Outside);
        bad |= e
            .route
            .segments()
            .any(|s| polygon.edges().any(|pe| properly_crosses(&s, &pe, eps)));
        if bad {
            containment = false;
            messages.push(format!(
                "route of edge ({}, {}) leaves the polygon",
                e.parent, e.child
            ));
        }
    }

    let ends: Vec<(Point, Point, &Polyline)> = emb
        .edges
        .iter()
        .filter_map(|e| Some((point_of(e.parent)?, point_of(e.child)?, &e.route)))
        .collect();
    let pairs = sweep_crossings(&ends, eps);
    for &(i, j) in pairs.iter().take(10) {
        let (a, b) = (&emb.edges[i], &emb.edges[j]);
        messages.push(format!(
            "edges ({}, {}) and ({}, {}) cross",
            a.parent, a.child, b.parent, b.child
        ));
    }

    let mut points_on_edges = 0;
    for e in &emb.edges {
        let own = [
            emb.node_point.get(e.parent).copied(),
            emb.node_point.get(e.child).copied(),
        ];
        for (i, p) in pts.points().iter().enumerate() {
            if own.contains(&Some(i)) {
                continue;
            }
            if e.route.segments().any(|s| s.dist_to(*p) <= eps) {
                points_on_edges += 1;
                messages.push(format!(
                    "point {i} lies on the route of edge ({}, {})",
                    e.parent, e.child
                ));
            }
        }
    }

    let max_bends = emb
        .edges
        .iter()
        .map(|e| e.route.bends(eps))
        .max()
        .unwrap_or(0);
    let total_bends = emb.edges.iter().map(|e| e.route.bends(eps)).sum();
    if max_bends > bend_budget {
        messages.push(format!(
            "an edge has {max_bends} bends, budget is {bend_budget}"
        ));
    }
    let detail = |ok: bool, bad: String| if ok { String::new() } else { bad };
    let checks = vec![
        Check::new(
            "bijection",
            bijection,
            detail(bijection, "nodes do not map one-to-one onto points".into()),
        ),
        Check::new(
            "containment",
            containment,
            detail(containment, "a route leaves the polygon".into()),
        ),
        Check::new(
            "crossings",
            pairs.is_empty(),
            detail(
                pairs.is_empty(),
                format!("{} crossing route pairs", pairs.len()),
            ),
        ),
        Check::new(
            "points_on_routes",
            points_on_edges == 0,
            detail(
                points_on_edges == 0,
                format!("{points_on_edges} points lie on foreign routes"),
            ),
        ),
        Check::new(
            "bends",
            max_bends <= bend_budget,
            detail(
                max_bends <= bend_budget,
                format!("{max_bends} bends exceed the budget {bend_budget}"),
            ),
        ),
        Check::new(
            "graph",
            graph_matches,
            detail(graph_matches, "routed graph differs from the tree".into()),
        ),
    ];
    let valid = checks.iter().all(|c| c.pass);
    ValidationReport {
        valid,
        checks,
        degenerate_flags: Vec::new(),
        bijection,
        containment,
        crossings: pairs.len(),
        points_on_edges,
        graph_matches,
        max_bends,
        total_bends,
        bend_budget,
        messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EmbeddedEdge;
    use crate::skeleton::compute_straight_skeleton;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square() -> SimplePolygon {
        SimplePolygon::new(vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)]).unwrap()
    }

    fn emb(node_point: Vec<usize>, edges: Vec<(usize, usize, Vec<Point>)>) -> Embedding {
        Embedding {
            node_point,
            edges: edges
                .into_iter()
                .map(|(parent, child, vs)| EmbeddedEdge {
                    parent,
                    child,
                    route: Polyline::new(vs),
                })
                .collect(),
            partition: None,
            backbones: Vec::new(),
        }
    }

    #[test]
    fn skeleton_counts_hold() {
        for v in [
            vec![p(0., 0.), p(4., 0.), p(0., 3.)],
            vec![p(0., 0.), p(4., 0.), p(4., 2.), p(0., 2.)],
            vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)],
        ] {
            let ss = compute_straight_skeleton(&SimplePolygon::new(v).unwrap()).unwrap();
            check_skeleton_counts(&ss).unwrap();
            check_faces(&ss, 1e-9).unwrap();
        }
    }

    #[test]
    fn straight_three_node_drawing_is_valid() {
        let pts = PointSet::new(vec![p(5., 5.), p(2., 5.), p(8., 5.)]).unwrap();
        let t = BalancedBinaryTree::balanced(3);
        let e = emb(
            vec![0, 1, 2],
            vec![
                (0, 1, vec![p(5., 5.), p(2., 5.)]),
                (0, 2, vec![p(5., 5.), p(8., 5.)]),
            ],
        );
        let r = validate_embedding(&square(), &pts, &t, &e, 0);
        assert!(r.valid, "{:?}", r.messages);
    }

    #[test]
    fn crossing_is_reported() {
        let pts =
            PointSet::new(vec![p(5., 5.), p(2., 2.), p(8., 8.), p(2., 8.), p(8., 2.)]).unwrap();
        let t = BalancedBinaryTree::balanced(5);
        let [a, b] = [t.left(0).unwrap(), t.right(0).unwrap()];
        let (la, lb) = (t.left(a).unwrap(), t.left(b).unwrap());
        // Routes 1→3 and 2→4 cross at the center region.
        let e = emb(
            vec![0, 1, 3, 2, 4],
            vec![
                (0, a, vec![p(5., 5.), p(5., 1.), p(2., 2.)]),
                (a, la, vec![p(2., 2.), p(2., 8.)]),
                (0, b, vec![p(5., 5.), p(5., 9.), p(8., 8.)]),
                (b, lb, vec![p(8., 8.), p(8., 2.)]),
            ],
        );
        let r = validate_embedding(&square(), &pts, &t, &e, 4);
        assert!(r.bijection && r.graph_matches && r.containment);
        assert_eq!(r.crossings, 0);
        let bad = emb(
            vec![0, 1, 3, 2, 4],
            vec![
                (0, a, vec![p(5., 5.), p(2., 2.)]),
                (a, la, vec![p(2., 2.), p(2., 8.)]),
                (0, b, vec![p(5., 5.), p(8., 8.)]),
                (b, lb, vec![p(8., 8.), p(1., 5.), p(8., 2.)]),
            ],
        );
        let r = validate_embedding(&square(), &pts, &t, &bad, 4);
        assert!(!r.valid);
        assert!(r.crossings > 0);
    }

    #[test]
    fn sweep_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let lines: Vec<Polyline> = (0..12)
                .map(|_| {
                    Polyline::new(
                        (0..3)
                            .map(|_| p(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
                            .collect(),
                    )
                })
                .collect();
            let routes: Vec<(Point, Point, &Polyline)> = lines
                .iter()
                .map(|l| (l.vertices[0], l.vertices[2], l))
                .collect();
            assert_eq!(
                sweep_crossings(&routes, 1e-9),
                brute_force_crossings(&routes, 1e-9)
            );
        }
    }

    #[test]
    fn leaving_polygon_and_repeats_are_reported() {
        let pts = PointSet::new(vec![p(5., 5.), p(2., 5.)]).unwrap();
        let t = BalancedBinaryTree::balanced(2);
        let e = emb(
            vec![0, 1],
            vec![(0, 1, vec![p(5., 5.), p(5., 12.), p(2., 5.)])],
        );
        let r = validate_embedding(&square(), &pts, &t, &e, 4);
        assert!(!r.containment);
        let e = emb(vec![0, 0], vec![(0, 1, vec![p(5., 5.), p(5., 5.)])]);
        assert!(!validate_embedding(&square(), &pts, &t, &e, 4).bijection);
    }
}
