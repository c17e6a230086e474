//! Split straight skeleton, arc weights, the subface cycle and the
//! count-driven partition of a polygon into two point-balanced halves.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    clip_ring, locate_in_ring, ring_area, ring_centroid, ring_edges, ring_is_convex,
    ring_is_monotone, signed_dist, Direction, Location, Point, PointSet, Polyline, Segment,
    SimplePolygon, Tolerance,
};
use crate::skeleton::{compute_straight_skeleton, ArcKind, StraightSkeleton};
use crate::tree::BalancedBinaryTree;

/// Geometric tolerance used for incidence tests between cells. Coarser than
/// the predicate tolerance because cells are produced by repeated clipping.
pub(crate) fn incidence_tol(t: Tolerance) -> f64 {
    t.eps * 10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeTag {
    Boundary,
    Bcd,
    InternalDummy,
    Splitting,
    Opening,
    Dividing,
    Backbone,
}

/// A convex cell. `edge_tags[i]` describes the edge from `region[i]` to
/// `region[i + 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct Subface {
    pub id: usize,
    pub region: Vec<Point>,
    pub parent_face: usize,
    pub edge_tags: Vec<EdgeTag>,
}

impl Subface {
    pub fn area(&self) -> f64 {
        ring_area(&self.region)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Segment, EdgeTag)> + '_ {
        ring_edges(&self.region).zip(self.edge_tags.iter().copied())
    }

    pub fn polygon(&self) -> SimplePolygon {
        SimplePolygon::from_ccw_unchecked(self.region.clone())
    }

    /// Splits along the line a→b; returns (left, right), dropping empty sides.
    /// New edges on the line get `tag`, the rest inherit from the edge they
    /// came from.
    pub fn split(
        &self,
        a: Point,
        b: Point,
        tag: EdgeTag,
        ids: (usize, usize),
        tol: f64,
    ) -> (Option<Subface>, Option<Subface>) {
        let make = |keep_left: bool, id: usize| {
            let ring = clip_ring(&self.region, a, b, keep_left, tol * 1e-3);
            if ring.len() < 3 || ring_area(&ring) <= tol * tol {
                return None;
            }
            let tags = ring_edges(&ring)
                .map(|e| {
                    if signed_dist(a, b, e.a).abs() <= tol && signed_dist(a, b, e.b).abs() <= tol {
                        tag
                    } else {
                        self.tag_of(e.midpoint(), tol)
                    }
                })
                .collect();
            Some(Subface {
                id,
                region: ring,
                parent_face: self.parent_face,
                edge_tags: tags,
            })
        };
        (make(true, ids.0), make(false, ids.1))
    }

    pub(crate) fn tag_of(&self, p: Point, tol: f64) -> EdgeTag {
        self.edges()
            .min_by(|(x, _), (y, _)| x.dist_to(p).total_cmp(&y.dist_to(p)))
            .map(|(s, t)| {
                if s.dist_to(p) <= tol * 1e3 {
                    t
                } else {
                    EdgeTag::InternalDummy
                }
            })
            .unwrap_or(EdgeTag::InternalDummy)
    }

    pub fn locate(&self, p: Point, tol: f64) -> Location {
        locate_in_ring(p, &self.region, tol)
    }
}

/// Longest segment shared by an edge of `a` and an oppositely directed,
/// collinear edge of `b`.
pub fn common_border(a: &[Point], b: &[Point], tol: f64) -> Option<Segment> {
    let mut best: Option<Segment> = None;
    for ea in ring_edges(a) {
        let la = ea.len();
        if la <= tol {
            continue;
        }
        let u = ea.dir() * (1.0 / la);
        for eb in ring_edges(b) {
            if eb.dir().dot(u) >= 0.0 {
                continue;
            }
            if signed_dist(ea.a, ea.b, eb.a).abs() > tol
                || signed_dist(ea.a, ea.b, eb.b).abs() > tol
            {
                continue;
            }
            let (mut t0, mut t1) = ((eb.a - ea.a).dot(u), (eb.b - ea.a).dot(u));
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            let lo = t0.max(0.0);
            let hi = t1.min(la);
            if hi - lo <= tol {
                continue;
            }
            let seg = Segment::new(ea.a + u * lo, ea.a + u * hi);
            if best.is_none_or(|s| s.len() < seg.len()) {
                best = Some(seg);
            }
        }
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSkeleton {
    pub base: StraightSkeleton,
    pub splitting_segments: Vec<Segment>,
    pub subfaces: Vec<Subface>,
    /// Subface ids of each face, ordered along the face's boundary edge.
    pub face_subfaces: Vec<Vec<usize>>,
    /// Shared-edge adjacency between subfaces.
    pub neighbors: Vec<Vec<usize>>,
    #[serde(skip)]
    pub(crate) tol: f64,
}

impl SplitSkeleton {
    pub fn tolerance(&self) -> f64 {
        self.tol
    }
}

fn slab_ring(face: &[Point], d: Point, lo: Option<f64>, hi: Option<f64>, eps: f64) -> Vec<Point> {
    let mut ring = face.to_vec();
    let along = d.perp();
    if let Some(s) = lo {
        let p0 = d * s;
        ring = clip_ring(&ring, p0, p0 + along, false, eps);
    }
    if let Some(s) = hi {
        let p0 = d * s;
        ring = clip_ring(&ring, p0, p0 + along, true, eps);
    }
    ring
}

/// Chord of a monotone face on the line `d·x = s`.
fn face_chord(face: &[Point], d: Point, s: f64) -> Option<Segment> {
    let along = d.perp();
    let mut ts: Vec<f64> = Vec::new();
    for e in ring_edges(face) {
        let (pa, pb) = (e.a.dot(d) - s, e.b.dot(d) - s);
        if (pa <= 0.0 && pb >= 0.0) || (pa >= 0.0 && pb <= 0.0) {
            let p = if (pa - pb).abs() < f64::MIN_POSITIVE {
                e.a
            } else {
                e.a.lerp(e.b, pa / (pa - pb))
            };
            ts.push(p.dot(along));
        }
    }
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo < hi).then(|| Segment::new(d * s + along * lo, d * s + along * hi))
}

/// Cuts every reflex vertex of every face with a segment perpendicular to
/// the face's boundary edge, leaving convex subfaces.
pub fn split_reflex_vertices(ss: &StraightSkeleton) -> Result<SplitSkeleton> {
    let tol_t = ss.polygon.tolerance();
    let eps = tol_t.eps;
    let tol = incidence_tol(tol_t);
    let mut subfaces = Vec::new();
    let mut face_subfaces = Vec::with_capacity(ss.faces.len());
    let mut splitting_segments = Vec::new();
    for face in &ss.faces {
        let dir = ss.edge_direction(face.boundary_edge);
        let d = dir.vec();
        if !ring_is_monotone(&face.vertices, dir, tol) {
            return Err(Error::NonMonotoneFace { face: face.id });
        }
        let vs = &face.vertices;
        let k = vs.len();
        let proj: Vec<f64> = vs.iter().map(|p| p.dot(d)).collect();
        let (fmin, fmax) = proj
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        let mut cuts: Vec<f64> = (0..k)
            .filter(|&i| {
                let (a, b, c) = (vs[(i + k - 1) % k], vs[i], vs[(i + 1) % k]);
                (b - a).cross(c - b) < -eps * (b - a).norm().max((c - b).norm())
            })
            .map(|i| proj[i])
            .filter(|&s| s > fmin + tol && s < fmax - tol)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);
        for &s in &cuts {
            match face_chord(vs, d, s) {
                Some(seg) => splitting_segments.push(seg),
                None => return Err(Error::NonMonotoneFace { face: face.id }),
            }
        }
        let mut ids = Vec::with_capacity(cuts.len() + 1);
        for slab in 0..=cuts.len() {
            let lo = slab.checked_sub(1).map(|i| cuts[i]);
            let hi = cuts.get(slab).copied();
            let ring = slab_ring(vs, d, lo, hi, eps);
            if ring.len() < 3 {
                continue;
            }
            let tags = ring_edges(&ring)
                .map(|e| classify_face_edge(ss, face.id, &cuts, d, e, tol))
                .collect();
            let id = subfaces.len();
            subfaces.push(Subface {
                id,
                region: ring,
                parent_face: face.id,
                edge_tags: tags,
            });
            ids.push(id);
        }
        face_subfaces.push(ids);
    }
    let neighbors = adjacency(&subfaces, tol);
    Ok(SplitSkeleton {
        base: ss.clone(),
        splitting_segments,
        subfaces,
        face_subfaces,
        neighbors,
        tol,
    })
}

fn classify_face_edge(
    ss: &StraightSkeleton,
    face: usize,
    cuts: &[f64],
    d: Point,
    e: Segment,
    tol: f64,
) -> EdgeTag {
    if cuts
        .iter()
        .any(|&s| (e.a.dot(d) - s).abs() <= tol && (e.b.dot(d) - s).abs() <= tol)
    {
        return EdgeTag::Splitting;
    }
    let be = ss.polygon.edge(ss.faces[face].boundary_edge);
    if be.dist_to(e.a) <= tol && be.dist_to(e.b) <= tol {
        return EdgeTag::Boundary;
    }
    let mid = e.midpoint();
    ss.faces[face]
        .incident_arcs
        .iter()
        .map(|&a| {
            let (p, q) = ss.arc_segment(a);
            (Segment::new(p, q).dist_to(mid), ss.arcs[a].kind)
        })
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, k)| {
            if k == ArcKind::Bcd {
                EdgeTag::Bcd
            } else {
                EdgeTag::InternalDummy
            }
        })
        .unwrap_or(EdgeTag::InternalDummy)
}

fn adjacency(cells: &[Subface], tol: f64) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); cells.len()];
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if common_border(&cells[i].region, &cells[j].region, tol).is_some() {
                out[i].push(j);
                out[j].push(i);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcWeight {
    pub arc: usize,
    /// Canonical reading direction: smaller node id to larger node id.
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Weight of each arc (i, j): total area of the faces around j minus the
/// total area of the faces around i, read from the smaller node id.
pub fn arc_weights(ss: &StraightSkeleton) -> Vec<ArcWeight> {
    let areas = ss.face_areas();
    let around = |node: usize| -> f64 { ss.faces_of_node(node).iter().map(|&f| areas[f]).sum() };
    ss.arcs
        .iter()
        .map(|a| {
            let (from, to) = (
                a.endpoints.0.min(a.endpoints.1),
                a.endpoints.0.max(a.endpoints.1),
            );
            ArcWeight {
                arc: a.id,
                from,
                to,
                weight: around(to) - around(from),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiddlePoint {
    pub point: Point,
    /// Starting face: the smallest face id incident to `point`.
    pub face: usize,
    /// The middle arc, when the point is the midpoint of a single arc.
    pub arc: Option<usize>,
    /// The shared node, when tied middle arcs meet in one node.
    pub node: Option<usize>,
}

/// Midpoint of the arc with the smallest positive |weight|. Ties resolve to
/// the node shared by all tied arcs, else to the tied arc with the smallest id.
pub fn middle_point(ss: &StraightSkeleton) -> Result<MiddlePoint> {
    if ss.arcs.is_empty() {
        return Err(Error::DegenerateInput("skeleton has no arcs".into()));
    }
    let weights = arc_weights(ss);
    let total = ss.polygon.signed_area().abs();
    let wtol = 1e-9 * (1.0 + total);
    let positive: Vec<&ArcWeight> = weights.iter().filter(|w| w.weight.abs() > wtol).collect();
    let pool: Vec<&ArcWeight> = if positive.is_empty() {
        weights.iter().collect()
    } else {
        positive
    };
    let best = pool
        .iter()
        .map(|w| w.weight.abs())
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<&ArcWeight> = pool
        .into_iter()
        .filter(|w| (w.weight.abs() - best).abs() <= wtol)
        .collect();
    if tied.len() > 1 {
        let first = ss.arcs[tied[0].arc].endpoints;
        for cand in [first.0, first.1] {
            let shared = tied.iter().all(|w| {
                let e = ss.arcs[w.arc].endpoints;
                e.0 == cand || e.1 == cand
            });
            if shared {
                let faces = ss.faces_of_node(cand);
                return Ok(MiddlePoint {
                    point: ss.nodes[cand].position,
                    face: faces.first().copied().unwrap_or(0),
                    arc: None,
                    node: Some(cand),
                });
            }
        }
    }
    let arc = tied.iter().map(|w| w.arc).min().expect("non-empty tie set");
    let (p, q) = ss.arc_segment(arc);
    let f = ss.arcs[arc].faces;
    Ok(MiddlePoint {
        point: p.midpoint(q),
        face: f.0.min(f.1),
        arc: Some(arc),
        node: None,
    })
}

/// Subfaces in boundary order, opened at the cut through the middle point.
#[derive(Debug, Clone, Serialize)]
pub struct SubfaceCycle {
    /// `cells[0]` is f(t), the last entry is f(m).
    pub cells: Vec<Subface>,
    /// The opening cut, when it split a subface.
    pub opening: Option<Segment>,
}

impl SubfaceCycle {
    pub fn ids(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.id).collect()
    }
}

/// Passes a cut through `ms` perpendicular to the boundary edge of face
/// `sf` and lists all subfaces counter-clockwise from the part ahead of the
/// cut (f(t)) around to the part behind it (f(m)).
pub fn open_cycle(sss: &SplitSkeleton, ms: Point, sf: usize) -> SubfaceCycle {
    let m = sss.face_subfaces.len();
    let tol = sss.tol;
    let d = sss.base.edge_direction(sf).vec();
    let s = ms.dot(d);
    let mut next_id = sss.subfaces.len();
    let mut ring: Vec<Subface> = Vec::with_capacity(sss.subfaces.len() + 1);
    let mut start = None;
    let mut opening = None;
    for k in 0..m {
        let f = (sf + k) % m;
        for &id in &sss.face_subfaces[f] {
            let cell = &sss.subfaces[id];
            if f == sf && start.is_none() {
                let (lo, hi) = proj_range(&cell.region, d);
                if s > lo + tol && s < hi - tol {
                    let p0 = d * s;
                    let (behind, ahead) = cell.split(
                        p0,
                        p0 + d.perp(),
                        EdgeTag::Opening,
                        (next_id, next_id + 1),
                        tol,
                    );
                    next_id += 2;
                    if let (Some(behind), Some(ahead)) = (behind, ahead) {
                        opening = face_chord(&cell.region, d, s);
                        ring.push(behind);
                        start = Some(ring.len());
                        ring.push(ahead);
                        continue;
                    }
                }
                if s <= lo + tol {
                    start = Some(ring.len());
                }
            }
            ring.push(cell.clone());
        }
        if f == sf && start.is_none() {
            // The cut passes at or beyond the far end of the face.
            start = Some(ring.len() % sss.subfaces.len().max(1));
        }
    }
    let start = start.unwrap_or(0) % ring.len();
    ring.rotate_left(start);
    SubfaceCycle {
        cells: ring,
        opening,
    }
}

fn proj_range(ring: &[Point], d: Point) -> (f64, f64) {
    ring.iter()
        .map(|p| p.dot(d))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        })
}

/// Number of points of `pts` inside or on the boundary of `region`.
pub fn count_points(region: &SimplePolygon, pts: &PointSet) -> usize {
    let eps = region.tolerance().eps;
    pts.points()
        .iter()
        .filter(|p| locate_in_ring(**p, region.vertices(), eps) != Location::Outside)
        .count()
}

/// Assigns every point to the containing cell with the smallest subface id;
/// points lost to rounding go to the nearest cell.
pub fn assign_points(
    cells: &[Subface],
    pts: &PointSet,
    ids: &[usize],
    tol: f64,
) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); cells.len()];
    let mut by_id: Vec<usize> = (0..cells.len()).collect();
    by_id.sort_by_key(|&i| cells[i].id);
    for &pid in ids {
        let p = pts.get(pid);
        let hit = by_id
            .iter()
            .copied()
            .find(|&i| cells[i].locate(p, tol) != Location::Outside);
        let slot = hit.unwrap_or_else(|| {
            by_id
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    ring_dist(&cells[a].region, p).total_cmp(&ring_dist(&cells[b].region, p))
                })
                .expect("at least one cell")
        });
        out[slot].push(pid);
    }
    out
}

fn ring_dist(ring: &[Point], p: Point) -> f64 {
    ring_edges(ring)
        .map(|e| e.dist_to(p))
        .fold(f64::INFINITY, f64::min)
}

/// Sorts points by polar angle about `center`, measured from `start` in the
/// counter-clockwise (or clockwise) sense; equal angles by distance.
pub fn radial_order(pts: &[Point], center: Point, start: Direction, ccw: bool) -> Vec<usize> {
    let s = start.vec();
    let key = |p: Point| {
        let v = p - center;
        let mut a = s.cross(v).atan2(s.dot(v));
        if !ccw {
            a = -a;
        }
        if a < 0.0 {
            a += std::f64::consts::TAU;
        }
        (a, v.norm())
    };
    sort_by_key_with_ties(pts.iter().map(|&p| key(p)).collect())
}

fn sort_by_key_with_ties(keys: Vec<(f64, f64)>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| {
        keys[a]
            .0
            .total_cmp(&keys[b].0)
            .then(keys[a].1.total_cmp(&keys[b].1))
    });
    // Group nearly equal primary keys and order each group by the secondary.
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && keys[idx[j]].0 - keys[idx[j - 1]].0 <= 1e-12 {
            j += 1;
        }
        idx[i..j].sort_by(|&a, &b| keys[a].1.total_cmp(&keys[b].1));
        i = j;
    }
    idx
}

/// How a cell is swept when looking for a dividing line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Sweep {
    /// Lines through `center`, rotating from `start` in the given sense.
    Pivot {
        center: Point,
        start: Point,
        ccw: bool,
    },
    /// Lines with direction `along`, advancing along `normal`.
    Parallel { normal: Point, along: Point },
}

impl Sweep {
    /// Sweep that starts on the line of `prev` and ends on the line of
    /// `next`, for a convex cell having both segments on its boundary.
    pub fn between(prev: Segment, next: Segment, cell: &[Point], tol: f64) -> Sweep {
        let c = ring_centroid(cell);
        let dp = prev.dir().normalized();
        let dn = next.dir().normalized();
        if dp.cross(dn).abs() < 1e-9 {
            let gap = signed_dist(prev.a, prev.b, next.midpoint());
            if gap.abs() > tol {
                // Parallel borders: sweep lines parallel to them.
                let mut normal = dp.perp();
                if normal.dot(next.midpoint() - prev.midpoint()) < 0.0 {
                    normal = -normal;
                }
                return Sweep::Parallel { normal, along: dp };
            }
            // Both borders on one line: pivot between them.
            let (pa, pb) = (prev.a.dot(dp), prev.b.dot(dp));
            let (na, nb) = (next.a.dot(dp), next.b.dot(dp));
            let pmid = 0.5 * (pa + pb);
            let nmid = 0.5 * (na + nb);
            let (edge_p, edge_n) = if pmid < nmid {
                (pa.max(pb), na.min(nb))
            } else {
                (pa.min(pb), na.max(nb))
            };
            let t = 0.5 * (edge_p + edge_n);
            let base = prev.a + dp * (t - prev.a.dot(dp));
            let start = if pmid < nmid { -dp } else { dp };
            let ccw = start.cross(c - base) > 0.0;
            return Sweep::Pivot {
                center: base,
                start,
                ccw,
            };
        }
        let center =
            crate::geometry::line_intersection(prev.a, dp, next.a, dn).expect("non-parallel");
        // Ray along prev's line pointing towards prev, from the apex.
        let start = if (prev.midpoint() - center).dot(dp) >= 0.0 {
            dp
        } else {
            -dp
        };
        let toward_next = if (next.midpoint() - center).dot(dn) >= 0.0 {
            dn
        } else {
            -dn
        };
        let ccw = start.cross(toward_next) > 0.0;
        Sweep::Pivot { center, start, ccw }
    }

    fn key(&self, p: Point) -> (f64, f64) {
        match *self {
            Sweep::Pivot { center, start, ccw } => {
                let v = p - center;
                if v.norm() <= 1e-12 * (1.0 + center.norm()) {
                    return (0.0, 0.0);
                }
                let mut a = start.cross(v).atan2(start.dot(v));
                if !ccw {
                    a = -a;
                }
                if a < -1e-12 {
                    a += std::f64::consts::TAU;
                }
                (a, v.norm())
            }
            Sweep::Parallel { normal, along } => (p.dot(normal), p.dot(along)),
        }
    }

    /// Points ordered by the sweep.
    pub fn order(&self, pts: &[Point]) -> Vec<usize> {
        sort_by_key_with_ties(pts.iter().map(|&p| self.key(p)).collect())
    }

    /// The sweep line through `q`, directed so that the swept-over part lies
    /// on its right.
    fn line_through(&self, q: Point) -> (Point, Point) {
        match *self {
            Sweep::Pivot { center, ccw, .. } => {
                if ccw {
                    (center, q)
                } else {
                    (q, center)
                }
            }
            Sweep::Parallel { normal, along } => {
                // Right side of a→b is where perp(b−a) is negative.
                let dir = if along.perp().dot(normal) > 0.0 {
                    along
                } else {
                    -along
                };
                (q, q + dir)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Division {
    /// Part swept before the line: holds `k − 1` points.
    pub behind: Subface,
    pub behind_points: Vec<usize>,
    /// Remaining part.
    pub ahead: Subface,
    pub ahead_points: Vec<usize>,
    /// Point on the dividing line.
    pub q: usize,
    pub cut: Segment,
}

/// Divides a convex cell through its `k`-th point in sweep order.
pub fn divide_subface(
    cell: &Subface,
    owned: &[usize],
    pts: &PointSet,
    sweep: &Sweep,
    k: usize,
    ids: (usize, usize),
    tol: f64,
) -> Result<Division> {
    if k == 0 || owned.len() < k {
        return Err(Error::InsufficientPoints {
            have: owned.len(),
            need: k.max(1),
        });
    }
    let coords: Vec<Point> = owned.iter().map(|&i| pts.get(i)).collect();
    let order = sweep.order(&coords);
    let q = owned[order[k - 1]];
    let qp = pts.get(q);
    let (mut a, mut b) = sweep.line_through(qp);
    if let Sweep::Pivot { center, start, ccw } = *sweep {
        if qp.dist(center) <= tol {
            // q sits on the pivot: cut halfway towards the next swept point,
            // or through the middle of the cell when nothing follows.
            let next = order.get(k).map(|&i| coords[i]);
            let stop = next.map_or_else(|| far_angle(sweep, &cell.region, tol), |p| sweep.key(p).0);
            let half = if ccw { 0.5 * stop } else { -0.5 * stop };
            let (sn, cs) = half.sin_cos();
            let dir = Point::new(start.x * cs - start.y * sn, start.x * sn + start.y * cs);
            (a, b) = if ccw {
                (center, center + dir)
            } else {
                (center + dir, center)
            };
        }
    }
    let (left, right) = cell.split(a, b, EdgeTag::Dividing, (ids.1, ids.0), tol);
    let (Some(ahead), Some(behind)) = (left, right) else {
        return Err(Error::DegenerateInput(format!(
            "point {q} sits on a corner of cell {} and no cut through it splits the cell",
            cell.id
        )));
    };
    let cut = clip_line_to_ring(&cell.region, a, b).unwrap_or(Segment::new(a, b));
    Ok(Division {
        behind,
        behind_points: order[..k - 1].iter().map(|&i| owned[i]).collect(),
        ahead,
        ahead_points: order[k..].iter().map(|&i| owned[i]).collect(),
        q,
        cut,
    })
}

fn far_angle(sweep: &Sweep, ring: &[Point], tol: f64) -> f64 {
    let center = match *sweep {
        Sweep::Pivot { center, .. } => center,
        Sweep::Parallel { .. } => return 0.0,
    };
    ring.iter()
        .filter(|p| p.dist(center) > tol)
        .map(|&p| sweep.key(p).0)
        .fold(0.0, f64::max)
}

/// The chord of a convex ring on the line a→b.
pub fn clip_line_to_ring(ring: &[Point], a: Point, b: Point) -> Option<Segment> {
    let u = (b - a).normalized();
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    // Each CCW edge is a half-plane constraint: cross(edge, x − e.a) ≥ 0.
    for e in ring_edges(ring) {
        let ed = e.dir();
        let den = ed.cross(u);
        let num = ed.cross(a - e.a);
        if den.abs() < 1e-300 {
            if num < -1e-9 * ed.norm() * (1.0 + (a - e.a).norm()) {
                return None;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
    }
    (lo < hi && lo.is_finite() && hi.is_finite()).then(|| Segment::new(a + u * lo, a + u * hi))
}

/// A convex cell together with the ids of the points it owns.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub face: Subface,
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionResult {
    pub skeleton: StraightSkeleton,
    pub sss: SplitSkeleton,
    pub middle: MiddlePoint,
    pub cycle: SubfaceCycle,
    /// Left part, listed from the dividing cut back to f(t).
    pub scl: Vec<Cell>,
    /// Right part, listed from the dividing cut on to f(m).
    pub scr: Vec<Cell>,
    pub q: usize,
    pub dividing: Segment,
    /// Sweep used on the divided subface.
    pub sweep: Sweep,
    /// Interface between the two parts, when it chains into one polyline.
    pub chain: Option<Polyline>,
}

impl PartitionResult {
    pub fn left_count(&self) -> usize {
        self.scl.iter().map(|c| c.points.len()).sum()
    }

    pub fn right_count(&self) -> usize {
        self.scr.iter().map(|c| c.points.len()).sum()
    }

    pub fn left_area(&self) -> f64 {
        self.scl.iter().map(|c| c.face.area()).sum()
    }

    pub fn right_area(&self) -> f64 {
        self.scr.iter().map(|c| c.face.area()).sum()
    }
}

/// Splits the polygon into two parts holding exactly |left subtree| and
/// |right subtree| points; the remaining point lies on the dividing cut.
pub fn partition(
    polygon: &SimplePolygon,
    pts: &PointSet,
    tree: &BalancedBinaryTree,
) -> Result<PartitionResult> {
    if tree.len() != pts.len() || tree.is_empty() {
        return Err(Error::CountMismatch {
            points: pts.len(),
            nodes: tree.len(),
        });
    }
    let tol = incidence_tol(Tolerance::for_points(
        polygon.vertices().iter().chain(pts.points()),
    ));
    let skeleton = compute_straight_skeleton(polygon)?;
    let middle = middle_point(&skeleton)?;
    let mut sss = split_reflex_vertices(&skeleton)?;
    sss.tol = tol;
    let cycle = open_cycle(&sss, middle.point, middle.face);
    let all: Vec<usize> = (0..pts.len()).collect();
    let owned = assign_points(&cycle.cells, pts, &all, tol);
    let root = tree.root().expect("non-empty tree");
    let s1 = tree.subtree_size(tree.left(root));

    let n = cycle.cells.len();
    let mut sum = 0;
    let mut i = 0;
    while i < n && sum + owned[i].len() <= s1 {
        sum += owned[i].len();
        i += 1;
    }
    if i == n {
        return Err(Error::InsufficientPoints {
            have: sum,
            need: s1 + 1,
        });
    }
    let cf = &cycle.cells[i];
    let prev = &cycle.cells[(i + n - 1) % n];
    let next = &cycle.cells[(i + 1) % n];
    let pb = common_border(&prev.region, &cf.region, tol);
    let nb = common_border(&cf.region, &next.region, tol);
    let (Some(pb), Some(nb)) = (pb, nb) else {
        return Err(Error::NumericFailure(format!(
            "subface {} is not adjacent to its cycle neighbours",
            cf.id
        )));
    };
    let sweep = Sweep::between(pb, nb, &cf.region, tol);
    let base_id = sss.subfaces.len() + 2;
    let div = divide_subface(
        cf,
        &owned[i],
        pts,
        &sweep,
        s1 - sum + 1,
        (base_id, base_id + 1),
        tol,
    )?;

    let mut scl = vec![Cell {
        face: div.behind.clone(),
        points: div.behind_points.clone(),
    }];
    for j in (0..i).rev() {
        scl.push(Cell {
            face: cycle.cells[j].clone(),
            points: owned[j].clone(),
        });
    }
    let mut scr = vec![Cell {
        face: div.ahead.clone(),
        points: div.ahead_points.clone(),
    }];
    for (face, points) in cycle.cells.iter().zip(&owned).skip(i + 1) {
        scr.push(Cell {
            face: face.clone(),
            points: points.clone(),
        });
    }
    let chain = interface_chain(&scl, &scr, tol);
    Ok(PartitionResult {
        skeleton,
        sss,
        middle,
        cycle,
        scl,
        scr,
        q: div.q,
        dividing: div.cut,
        sweep,
        chain,
    })
}

/// Chains the borders shared between the two cell lists into one polyline,
/// open or closed.
pub fn interface_chain(a: &[Cell], b: &[Cell], tol: f64) -> Option<Polyline> {
    let mut segs: Vec<Segment> = Vec::new();
    for x in a {
        for y in b {
            for s in shared_segments(&x.face.region, &y.face.region, tol) {
                segs.push(s);
            }
        }
    }
    if segs.is_empty() {
        return None;
    }
    // Cluster endpoints.
    let mut pts: Vec<Point> = Vec::new();
    let id_of = |p: Point, pts: &mut Vec<Point>| -> usize {
        if let Some(i) = pts.iter().position(|q| q.dist(p) <= tol * 10.0) {
            i
        } else {
            pts.push(p);
            pts.len() - 1
        }
    };
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for s in &segs {
        let u = id_of(s.a, &mut pts);
        let v = id_of(s.b, &mut pts);
        if u != v && !edges.contains(&(u, v)) && !edges.contains(&(v, u)) {
            edges.push((u, v));
        }
    }
    let mut deg = vec![0usize; pts.len()];
    for &(u, v) in &edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    if deg.iter().any(|&d| d > 2) {
        return None;
    }
    // An open path runs between two degree-one ends; when one part encloses
    // the other the interface is a closed loop.
    let start = (0..pts.len()).find(|&i| deg[i] == 1).unwrap_or(0);
    let mut used = vec![false; edges.len()];
    let mut path = vec![start];
    let mut cur = start;
    while let Some((k, nxt)) = edges.iter().enumerate().find_map(|(k, &(u, v))| {
        if used[k] {
            None
        } else if u == cur {
            Some((k, v))
        } else if v == cur {
            Some((k, u))
        } else {
            None
        }
    }) {
        used[k] = true;
        path.push(nxt);
        cur = nxt;
    }
    if used.iter().any(|u| !u) {
        return None;
    }
    Some(Polyline::new(path.into_iter().map(|i| pts[i]).collect()).simplified(tol))
}

/// All overlaps between oppositely directed collinear edges of two rings.
fn shared_segments(a: &[Point], b: &[Point], tol: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for ea in ring_edges(a) {
        let la = ea.len();
        if la <= tol {
            continue;
        }
        let u = ea.dir() * (1.0 / la);
        for eb in ring_edges(b) {
            if eb.dir().dot(u) >= 0.0
                || signed_dist(ea.a, ea.b, eb.a).abs() > tol
                || signed_dist(ea.a, ea.b, eb.b).abs() > tol
            {
                continue;
            }
            let (mut t0, mut t1) = ((eb.a - ea.a).dot(u), (eb.b - ea.a).dot(u));
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            let (lo, hi) = (t0.max(0.0), t1.min(la));
            if hi - lo > tol {
                out.push(Segment::new(ea.a + u * lo, ea.a + u * hi));
            }
        }
    }
    out
}

/// True iff every subface is convex.
pub fn all_convex(cells: &[Subface], tol: f64) -> bool {
    cells.iter().all(|c| ring_is_convex(&c.region, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn poly(v: &[(f64, f64)]) -> SimplePolygon {
        SimplePolygon::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn triangle_weights_and_middle_point() {
        let ss = compute_straight_skeleton(&poly(&[(0., 0.), (4., 0.), (0., 3.)])).unwrap();
        let w = arc_weights(&ss);
        let by_vertex = |v: usize| w.iter().find(|a| a.from == v).unwrap().weight;
        assert_abs_diff_eq!(by_vertex(0), 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(by_vertex(1), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(by_vertex(2), 2.0, epsilon = 1e-12);
        let mp = middle_point(&ss).unwrap();
        assert!(mp.point.approx_eq(p(2.5, 0.5), 1e-12));
    }

    #[test]
    fn rectangle_ridge_weight_is_zero() {
        let ss =
            compute_straight_skeleton(&poly(&[(0., 0.), (4., 0.), (4., 2.), (0., 2.)])).unwrap();
        let w = arc_weights(&ss);
        let ridge = ss
            .arcs
            .iter()
            .find(|a| a.kind == ArcKind::Internal)
            .unwrap()
            .id;
        assert_abs_diff_eq!(w[ridge].weight, 0.0, epsilon = 1e-12);
        for a in w.iter().filter(|a| a.arc != ridge) {
            assert_abs_diff_eq!(a.weight, 3.0, epsilon = 1e-12);
        }
        // Four tied corner arcs share no single node: smallest arc id wins.
        let mp = middle_point(&ss).unwrap();
        let smallest = ss
            .arcs
            .iter()
            .filter(|a| a.kind == ArcKind::Bcd)
            .map(|a| a.id)
            .min()
            .unwrap();
        let (a, b) = ss.arc_segment(smallest);
        assert!(mp.point.approx_eq(a.midpoint(b), 1e-12));
        assert_eq!(mp.arc, Some(smallest));
    }

    #[test]
    fn square_middle_point_is_center() {
        let ss =
            compute_straight_skeleton(&poly(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)])).unwrap();
        let mp = middle_point(&ss).unwrap();
        assert!(mp.point.approx_eq(p(0.5, 0.5), 1e-12));
        assert_eq!(mp.face, 0);
    }

    #[test]
    fn reversing_arc_negates_weight() {
        let ss =
            compute_straight_skeleton(&poly(&[(0., 0.), (4., 0.), (4., 2.), (0., 2.)])).unwrap();
        let areas = ss.face_areas();
        let around = |n: usize| -> f64 { ss.faces_of_node(n).iter().map(|&f| areas[f]).sum() };
        for w in arc_weights(&ss) {
            assert_abs_diff_eq!(around(w.from) - around(w.to), -w.weight, epsilon = 1e-12);
        }
    }

    #[test]
    fn convex_polygon_needs_no_splitting() {
        let ss =
            compute_straight_skeleton(&poly(&[(0., 0.), (4., 0.), (5., 2.), (2., 4.), (-1., 2.)]))
                .unwrap();
        let sss = split_reflex_vertices(&ss).unwrap();
        assert!(sss.splitting_segments.is_empty());
        assert_eq!(sss.subfaces.len(), 5);
    }

    #[test]
    fn reflex_face_vertex_is_split() {
        // This generated 10-gon has faces with reflex corners.
        let pl = crate::io::generate_instance(10, 1, 1).unwrap().polygon;
        let ss = compute_straight_skeleton(&pl).unwrap();
        let sss = split_reflex_vertices(&ss).unwrap();
        assert!(!sss.splitting_segments.is_empty());
        assert!(all_convex(&sss.subfaces, sss.tol));
        let total: f64 = sss.subfaces.iter().map(Subface::area).sum();
        assert_abs_diff_eq!(total, ss.polygon.signed_area(), epsilon = 1e-9);
        for seg in &sss.splitting_segments {
            // Every split is perpendicular to some polygon edge.
            let perp = (0..10).any(|e| {
                ss.polygon
                    .edge(e)
                    .dir()
                    .normalized()
                    .dot(seg.dir().normalized())
                    .abs()
                    < 1e-9
            });
            assert!(perp);
        }
    }

    #[test]
    fn radial_order_examples() {
        let x = Direction::new(1., 0.).unwrap();
        let o = radial_order(&[p(1., 0.), p(0., 1.), p(-1., 0.)], p(0., 0.), x, true);
        assert_eq!(o, vec![0, 1, 2]);
        let o = radial_order(&[p(2., 0.), p(1., 0.)], p(0., 0.), x, true);
        assert_eq!(o, vec![1, 0]);
    }

    #[test]
    fn divide_square_cell() {
        let cell = Subface {
            id: 0,
            region: vec![p(0., 0.), p(2., 0.), p(2., 2.), p(0., 2.)],
            parent_face: 0,
            edge_tags: vec![EdgeTag::Boundary; 4],
        };
        let pts = PointSet::new(vec![p(1., 0.5), p(1., 1.), p(1., 1.5)]).unwrap();
        let sweep = Sweep::Pivot {
            center: p(0., 1.),
            start: p(0., -1.),
            ccw: true,
        };
        let d = divide_subface(&cell, &[0, 1, 2], &pts, &sweep, 2, (1, 2), 1e-9).unwrap();
        assert_eq!(d.q, 1);
        assert_eq!(d.behind_points, vec![0]);
        assert_eq!(d.ahead_points, vec![2]);
        assert_abs_diff_eq!(d.behind.area(), 2.0, epsilon = 1e-12);
        assert!(d.behind.region.iter().all(|v| v.y <= 1.0 + 1e-12));
        assert_eq!(d.behind_points.len() + d.ahead_points.len() + 1, 3);

        let first = divide_subface(&cell, &[0, 1, 2], &pts, &sweep, 1, (1, 2), 1e-9).unwrap();
        assert!(first.behind_points.is_empty());
        assert!(matches!(
            divide_subface(&cell, &[0], &pts, &sweep, 2, (1, 2), 1e-9),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn assignment_prefers_smallest_id() {
        let a = Subface {
            id: 5,
            region: vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)],
            parent_face: 0,
            edge_tags: vec![EdgeTag::Boundary; 4],
        };
        let b = Subface {
            id: 3,
            region: vec![p(1., 0.), p(2., 0.), p(2., 1.), p(1., 1.)],
            parent_face: 0,
            edge_tags: vec![EdgeTag::Boundary; 4],
        };
        let pts = PointSet::new(vec![p(1., 0.5)]).unwrap();
        let got = assign_points(&[a, b], &pts, &[0], 1e-9);
        assert!(got[0].is_empty());
        assert_eq!(got[1], vec![0]);
    }

    #[test]
    fn square_with_three_points_partitions() {
        let sq = poly(&[(0., 0.), (10., 0.), (10., 10.), (0., 10.)]);
        let pts = PointSet::new(vec![p(2., 5.), p(5., 5.), p(8., 5.)]).unwrap();
        let t = BalancedBinaryTree::balanced(3);
        let r = partition(&sq, &pts, &t).unwrap();
        assert_eq!(r.left_count(), 1);
        assert_eq!(r.right_count(), 1);
        assert_abs_diff_eq!(r.left_area() + r.right_area(), 100.0, epsilon = 1e-9);
    }
}
