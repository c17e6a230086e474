//! Recursive embedding: each subtree owns a chain of convex cells; a backbone
//! through the chain splits it into a U-shaped chain of pieces, and the
//! child's point is picked by a corner sweep so that both grandchild chains
//! stay connected and the new edge runs between them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{signed_dist, Point, PointSet, Polyline, Segment, SimplePolygon, Tolerance};
use crate::sss::{
    common_border, divide_subface, incidence_tol, partition, Cell, EdgeTag, PartitionResult, Sweep,
};
use crate::tree::BalancedBinaryTree;

/// Which side of the backbone is walked first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    L,
    R,
}

/// Portal offsets tried, as fractions of the portal length, when a step
/// runs into a degenerate configuration.
pub const PERTURBATIONS: [f64; 7] = [0.0, 0.125, -0.125, 0.25, -0.25, 0.375, -0.375];

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddedEdge {
    pub parent: usize,
    pub child: usize,
    pub route: Polyline,
}

#[derive(Debug, Clone, Serialize)]
pub struct Embedding {
    /// Point id of each tree node.
    pub node_point: Vec<usize>,
    pub edges: Vec<EmbeddedEdge>,
    #[serde(skip)]
    pub partition: Option<PartitionResult>,
    #[serde(skip)]
    pub backbones: Vec<Polyline>,
}

impl Embedding {
    pub fn max_bends(&self, eps: f64) -> usize {
        self.edges
            .iter()
            .map(|e| e.route.bends(eps))
            .max()
            .unwrap_or(0)
    }

    pub fn total_bends(&self, eps: f64) -> usize {
        self.edges.iter().map(|e| e.route.bends(eps)).sum()
    }
}

/// Backbone through a chain and the pieces it cuts the cells into.
#[derive(Debug, Clone)]
pub struct Backbone {
    /// b_0 (chain start), one point per portal, then the end point.
    pub points: Vec<Point>,
    pub right: Vec<Cell>,
    pub left: Vec<Cell>,
}

/// Joins the two sides into one U-shaped chain: the first side outward,
/// then the other side back.
pub fn concatenate<T: Clone>(left: &[T], right: &[T], sid: Side) -> Vec<T> {
    let (first, second) = match sid {
        Side::R => (right, left),
        Side::L => (left, right),
    };
    first
        .iter()
        .cloned()
        .chain(second.iter().rev().cloned())
        .collect()
}

/// Polyline through the given vertices with repeated and collinear
/// vertices merged.
pub fn route_edge(vertices: Vec<Point>, eps: f64) -> Polyline {
    Polyline::new(vertices).simplified(eps)
}

struct Ctx<'a> {
    pts: &'a PointSet,
    tree: &'a BalancedBinaryTree,
    tol: f64,
    next_id: usize,
    node_point: Vec<usize>,
    edges: Vec<EmbeddedEdge>,
    backbones: Vec<Polyline>,
}

/// Builds the backbone of `chain` starting at `start`, shifting every portal
/// point by `delta` portal lengths from the portal midpoint.
pub fn build_backbone(
    chain: &[Cell],
    start: Point,
    guard: &[Point],
    delta: f64,
    pts: &PointSet,
    tol: f64,
) -> Result<Backbone> {
    let mut portals = Vec::with_capacity(chain.len().saturating_sub(1));
    for w in chain.windows(2) {
        let portal = common_border(&w[0].face.region, &w[1].face.region, tol).ok_or_else(|| {
            Error::NumericFailure(format!(
                "cells {} and {} share no border",
                w[0].face.id, w[1].face.id
            ))
        })?;
        portals.push(portal);
    }
    let mut points = pull_string(start, &portals, delta, tol);
    // End point: continue straight into the last cell, or aim through its
    // centroid when there is no incoming direction.
    let last = chain.last().expect("non-empty chain");
    let from = *points.last().expect("start");
    let aim = if points.len() >= 2 {
        from + (from - points[points.len() - 2])
    } else {
        crate::geometry::ring_centroid(&last.face.region)
    };
    if aim.dist(from) <= tol {
        return Err(Error::DegenerateInput(
            "backbone end cannot be placed".into(),
        ));
    }
    let chord = crate::sss::clip_line_to_ring(&last.face.region, from, aim)
        .ok_or_else(|| Error::NumericFailure("backbone ray misses the last cell".into()))?;
    let end = if (chord.b - from).dot(aim - from) > 0.0 {
        chord.b
    } else {
        chord.a
    };
    points.push(end);

    let mut right = Vec::with_capacity(chain.len());
    let mut left = Vec::with_capacity(chain.len());
    for (j, cell) in chain.iter().enumerate() {
        let (a, b) = (points[j], points[j + 1]);
        if a.dist(b) <= tol {
            return Err(Error::DegenerateInput("backbone points coincide".into()));
        }
        // A chord grazing the incoming route would touch it.
        let chord = Segment::new(a, b);
        if guard
            .iter()
            .any(|&v| v.dist(a) > tol && v.dist(b) > tol && chord.dist_to(v) <= 2.0 * tol)
        {
            return Err(Error::DegenerateInput(format!(
                "backbone grazes the incoming route in cell {}",
                cell.face.id
            )));
        }
        let (l, r) = cell.face.split(a, b, EdgeTag::Backbone, (0, 0), tol);
        let (Some(l), Some(r)) = (l, r) else {
            return Err(Error::DegenerateInput(format!(
                "backbone runs along the border of cell {}",
                cell.face.id
            )));
        };
        let mut lp = Vec::new();
        let mut rp = Vec::new();
        for &id in &cell.points {
            let s = signed_dist(a, b, pts.get(id));
            if s.abs() <= tol {
                return Err(Error::DegenerateInput(format!(
                    "point {id} lies on the backbone"
                )));
            }
            if s > 0.0 {
                lp.push(id);
            } else {
                rp.push(id);
            }
        }
        left.push(Cell {
            face: l,
            points: lp,
        });
        right.push(Cell {
            face: r,
            points: rp,
        });
    }
    Ok(Backbone {
        points,
        right,
        left,
    })
}

/// Share of each portal kept clear at both ends when straightening.
const PORTAL_MARGIN: f64 = 0.1;

/// Backbone points b_0..b_{k-1}: each portal is crossed at its shifted
/// midpoint unless a straight run from an earlier backbone point reaches a
/// later portal's midpoint through the interiors of the portals in between.
fn pull_string(start: Point, portals: &[Segment], delta: f64, tol: f64) -> Vec<Point> {
    let target = |s: &Segment| s.a.lerp(s.b, 0.5 + delta);
    let mut points = vec![start];
    let mut cur = start;
    let mut j = 0;
    while j < portals.len() {
        let mut best = j;
        let mut crossings: Vec<Point> = Vec::new();
        for l in j + 1..portals.len() {
            match crossings_through(cur, target(&portals[l]), &portals[j..l], tol) {
                Some(xs) => {
                    best = l;
                    crossings = xs;
                }
                None => break,
            }
        }
        points.extend(crossings);
        cur = target(&portals[best]);
        points.push(cur);
        j = best + 1;
    }
    points
}

/// Where the segment a→b meets each portal, when it crosses all of them in
/// order and away from their ends.
fn crossings_through(a: Point, b: Point, portals: &[Segment], tol: f64) -> Option<Vec<Point>> {
    let d = b - a;
    let mut last = 0.0;
    let mut out = Vec::with_capacity(portals.len());
    for p in portals {
        let u = p.dir();
        let den = d.cross(u);
        if den.abs() <= tol * d.norm().max(1.0) {
            return None;
        }
        let w = p.a - a;
        let t = w.cross(u) / den;
        let s = w.cross(d) / den;
        if !(PORTAL_MARGIN..=1.0 - PORTAL_MARGIN).contains(&s)
            || t * d.norm() <= last * d.norm() + tol
            || t >= 1.0
        {
            return None;
        }
        last = t;
        out.push(a + d * t);
    }
    Some(out)
}

/// Sweep about `pivot`, a corner of `ring`, starting from the ring edge that
/// lies on the line a→b when `from_chord` is set and from the other edge at
/// the corner otherwise.
fn corner_sweep(ring: &[Point], pivot: Point, a: Point, b: Point, from_chord: bool) -> Sweep {
    let n = ring.len();
    let i = (0..n)
        .min_by(|&x, &y| ring[x].dist(pivot).total_cmp(&ring[y].dist(pivot)))
        .expect("ring");
    let out = (ring[(i + 1) % n] - pivot).normalized();
    let back = (ring[(i + n - 1) % n] - pivot).normalized();
    let chord = (b - a).normalized();
    let out_on_chord = out.cross(chord).abs() <= back.cross(chord).abs();
    // A CCW ring's interior lies counter-clockwise from `out` to `back`.
    if out_on_chord == from_chord {
        Sweep::Pivot {
            center: pivot,
            start: out,
            ccw: true,
        }
    } else {
        Sweep::Pivot {
            center: pivot,
            start: back,
            ccw: false,
        }
    }
}

struct Step {
    t: usize,
    route: Vec<Point>,
    a: Vec<Cell>,
    b: Vec<Cell>,
    backbone: Vec<Point>,
}

/// One embedding step for a child whose subtree owns the points of `chain`.
fn step(
    ctx: &mut Ctx,
    chain: &[Cell],
    start: Point,
    guard: &[Point],
    left_size: usize,
    sid: Side,
    delta: f64,
) -> Result<Step> {
    let tol = ctx.tol;
    let bb = build_backbone(chain, start, guard, delta, ctx.pts, tol)?;
    let k = chain.len();
    // U-order entries: (piece, is_first_side, cell index).
    let first = match sid {
        Side::R => &bb.right,
        Side::L => &bb.left,
    };
    let second = match sid {
        Side::R => &bb.left,
        Side::L => &bb.right,
    };
    let mut order: Vec<(&Cell, bool, usize)> = first
        .iter()
        .enumerate()
        .map(|(j, c)| (c, true, j))
        .collect();
    order.extend(second.iter().enumerate().rev().map(|(j, c)| (c, false, j)));

    let mut sum = 0;
    let mut idx = 0;
    while idx < order.len() && sum + order[idx].0.points.len() <= left_size {
        sum += order[idx].0.points.len();
        idx += 1;
    }
    if idx == order.len() {
        return Err(Error::InsufficientPoints {
            have: sum,
            need: left_size + 1,
        });
    }
    let (cf, on_first, j) = order[idx];
    // Pivot and which corner edge the swept-first part must contain.
    let (pivot, from_chord, through) = if on_first {
        (bb.points[j], false, j)
    } else if j + 1 < k {
        (bb.points[j + 1], false, j + 1)
    } else {
        (bb.points[j], true, j)
    };
    let sweep = corner_sweep(
        &cf.face.region,
        pivot,
        bb.points[j],
        bb.points[j + 1],
        from_chord,
    );
    let ids = (ctx.next_id, ctx.next_id + 1);
    ctx.next_id += 2;
    let div = divide_subface(
        &cf.face,
        &cf.points,
        ctx.pts,
        &sweep,
        left_size - sum + 1,
        ids,
        tol,
    )
    .map_err(|e| Error::DegenerateInput(e.to_string()))?;
    let tp = ctx.pts.get(div.q);
    if tp.dist(pivot) <= tol {
        return Err(Error::DegenerateInput(
            "chosen point coincides with the pivot".into(),
        ));
    }
    for &id in cf.points.iter().filter(|&&id| id != div.q) {
        if signed_dist(pivot, tp, ctx.pts.get(id)).abs() <= tol {
            return Err(Error::DegenerateInput(format!(
                "point {id} is collinear with the dividing cut"
            )));
        }
    }
    let mut route: Vec<Point> = bb.points[..=through].to_vec();
    route.push(tp);

    let mut a: Vec<Cell> = order[..idx].iter().map(|(c, _, _)| (*c).clone()).collect();
    a.push(Cell {
        face: div.behind,
        points: div.behind_points,
    });
    a.reverse();
    let mut b = vec![Cell {
        face: div.ahead,
        points: div.ahead_points,
    }];
    b.extend(order[idx + 1..].iter().map(|(c, _, _)| (*c).clone()));
    trim(&mut a);
    trim(&mut b);
    merge_convex(&mut a, tp, tol);
    merge_convex(&mut b, tp, tol);
    Ok(Step {
        t: div.q,
        route,
        a,
        b,
        backbone: bb.points,
    })
}

/// Merges neighbouring cells whose union is convex, keeping `start` on the
/// first cell's border.
fn merge_convex(chain: &mut Vec<Cell>, start: Point, tol: f64) {
    let mut i = 0;
    while i + 1 < chain.len() {
        let (a, b) = (&chain[i], &chain[i + 1]);
        let both: Vec<Point> = a
            .face
            .region
            .iter()
            .chain(&b.face.region)
            .copied()
            .collect();
        let hull = crate::geometry::convex_hull(&both);
        let sum = a.face.area() + b.face.area();
        let convex =
            hull.len() >= 3 && (crate::geometry::ring_area(&hull) - sum).abs() <= 1e-9 * sum;
        let keeps_start =
            i > 0 || crate::geometry::ring_edges(&hull).any(|e| e.dist_to(start) <= tol);
        if !(convex && keeps_start) {
            i += 1;
            continue;
        }
        // The chain must enter and leave the merged cell through borders on
        // different lines, or its backbone would run along the cell border.
        let entry = if i == 0 {
            Some(Segment::new(start, start))
        } else {
            common_border(&chain[i - 1].face.region, &hull, tol)
        };
        let exit = chain
            .get(i + 2)
            .and_then(|c| common_border(&hull, &c.face.region, tol));
        let same_line = match (entry, exit) {
            (Some(p), Some(q)) => {
                signed_dist(q.a, q.b, p.a).abs() <= tol && signed_dist(q.a, q.b, p.b).abs() <= tol
            }
            _ => false,
        };
        if same_line {
            i += 1;
            continue;
        }
        let tags = crate::geometry::ring_edges(&hull)
            .map(|e| {
                let m = e.midpoint();
                let near = |c: &Cell| {
                    crate::geometry::ring_edges(&c.face.region)
                        .map(|x| x.dist_to(m))
                        .fold(f64::INFINITY, f64::min)
                };
                if near(a) <= near(b) {
                    a.face.tag_of(m, tol)
                } else {
                    b.face.tag_of(m, tol)
                }
            })
            .collect();
        let mut points = a.points.clone();
        points.extend(&b.points);
        let face = crate::sss::Subface {
            id: a.face.id.min(b.face.id),
            region: hull,
            parent_face: a.face.parent_face,
            edge_tags: tags,
        };
        chain[i] = Cell { face, points };
        chain.remove(i + 1);
    }
}

/// Drops trailing cells without points, keeping the first cell.
fn trim(chain: &mut Vec<Cell>) {
    while chain.len() > 1 && chain.last().is_some_and(|c| c.points.is_empty()) {
        chain.pop();
    }
}

fn embed_child(
    ctx: &mut Ctx,
    parent: usize,
    child: Option<usize>,
    chain: Vec<Cell>,
    sid: Side,
    guard: &[Point],
) -> Result<()> {
    let Some(c) = child else {
        return Ok(());
    };
    let start = ctx.pts.get(ctx.node_point[parent]);
    let have: usize = chain.iter().map(|x| x.points.len()).sum();
    let need = ctx.tree.subtree_size(Some(c));
    if have != need {
        return Err(Error::CountMismatch {
            points: have,
            nodes: need,
        });
    }
    let left_size = ctx.tree.subtree_size(ctx.tree.left(c));
    let mut last_err = None;
    let mut done = None;
    for &delta in &PERTURBATIONS {
        match step(ctx, &chain, start, guard, left_size, sid, delta) {
            Ok(s) => {
                if delta != 0.0 {
                    log::info!("node {c}: backbone portals shifted by {delta}");
                }
                done = Some(s);
                break;
            }
            Err(e @ Error::DegenerateInput(_)) | Err(e @ Error::NumericFailure(_)) => {
                last_err = Some(e)
            }
            Err(e) => return Err(e),
        }
    }
    let Some(s) = done else {
        log::warn!("node {c}: every backbone perturbation failed");
        return Err(Error::PerturbationFailure(format!(
            "node {c}: {}",
            last_err.map(|e| e.to_string()).unwrap_or_default()
        )));
    };
    ctx.node_point[c] = s.t;
    let eps = ctx.tol * 1e-2;
    let route = route_edge(s.route, eps);
    let guard = route.vertices.clone();
    ctx.edges.push(EmbeddedEdge {
        parent,
        child: c,
        route,
    });
    ctx.backbones.push(Polyline::new(s.backbone));
    let (l, r) = (ctx.tree.left(c), ctx.tree.right(c));
    embed_child(ctx, c, l, s.a, Side::R, &guard)?;
    embed_child(ctx, c, r, s.b, Side::L, &guard)
}

/// Embeds `tree` on `pts` inside `polygon`: tree nodes go to distinct points
/// and edges become non-crossing polylines inside the polygon.
pub fn embed(
    polygon: &SimplePolygon,
    pts: &PointSet,
    tree: &BalancedBinaryTree,
) -> Result<Embedding> {
    if tree.len() != pts.len() {
        return Err(Error::CountMismatch {
            points: pts.len(),
            nodes: tree.len(),
        });
    }
    let Some(root) = tree.root() else {
        return Ok(Embedding {
            node_point: Vec::new(),
            edges: Vec::new(),
            partition: None,
            backbones: Vec::new(),
        });
    };
    let tol = incidence_tol(Tolerance::for_points(
        polygon.vertices().iter().chain(pts.points()),
    ));
    let part = partition(polygon, pts, tree)?;
    let mut ctx = Ctx {
        pts,
        tree,
        tol,
        next_id: part.sss.subfaces.len() + 4,
        node_point: vec![usize::MAX; tree.len()],
        edges: Vec::with_capacity(tree.len().saturating_sub(1)),
        backbones: Vec::new(),
    };
    ctx.node_point[root] = part.q;
    let (mut scl, mut scr) = (part.scl.clone(), part.scr.clone());
    trim(&mut scl);
    trim(&mut scr);
    embed_child(&mut ctx, root, tree.left(root), scl, Side::L, &[])?;
    embed_child(&mut ctx, root, tree.right(root), scr, Side::R, &[])?;
    ctx.edges.sort_by_key(|e| (e.parent, e.child));
    Ok(Embedding {
        node_point: ctx.node_point,
        edges: ctx.edges,
        partition: Some(part),
        backbones: ctx.backbones,
    })
}

/// Straight segment list of a route, for crossing tests.
pub fn route_segments(route: &Polyline) -> Vec<Segment> {
    route.segments().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn concatenate_orders_sides() {
        assert_eq!(concatenate(&[1, 2], &[3, 4], Side::R), vec![3, 4, 2, 1]);
        assert_eq!(concatenate(&[1, 2], &[3, 4], Side::L), vec![1, 2, 4, 3]);
    }

    #[test]
    fn route_merges_collinear_vertices() {
        let r = route_edge(vec![p(0., 0.), p(1., 0.), p(2., 0.), p(2., 1.)], 1e-12);
        assert_eq!(r.vertices.len(), 3);
        assert_eq!(r.bends(1e-12), 1);
    }

    #[test]
    fn small_trees_in_square() {
        let sq = SimplePolygon::new(vec![p(0., 0.), p(10., 0.), p(10., 10.), p(0., 10.)]).unwrap();
        let all = [
            p(2., 3.),
            p(7., 2.),
            p(8., 7.),
            p(3., 8.),
            p(5., 4.),
            p(6., 6.5),
            p(1.5, 6.),
        ];
        for n in 1..=all.len() {
            let pts = PointSet::new(all[..n].to_vec()).unwrap();
            let t = BalancedBinaryTree::balanced(n);
            let e = embed(&sq, &pts, &t).unwrap();
            let mut used = e.node_point.clone();
            used.sort();
            assert_eq!(used, (0..n).collect::<Vec<_>>());
            assert_eq!(e.edges.len(), n - 1);
        }
    }
}
