//! Straight skeleton by simulating the shrinking wavefront.
//!
//! The wavefront is kept as a set of cyclic vertex lists. Each wavefront
//! vertex is the intersection of the offset lines of two input edges, so
//! every event point is the concurrency point of three offset lines and is
//! solved directly from the input edges rather than by moving vertices.
//! At each step every candidate edge event and split event of the live
//! wavefront is recomputed and the earliest one is applied.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ring_area, Direction, Point, SimplePolygon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeKind {
    PolygonVertex,
    Dummy,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonNode {
    pub id: usize,
    pub position: Point,
    pub kind: NodeKind,
    /// Wavefront time (offset distance) at which the node was created.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ArcKind {
    Bcd,
    Internal,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonArc {
    pub id: usize,
    pub endpoints: (usize, usize),
    pub kind: ArcKind,
    /// The two polygon edges (equivalently faces) this arc separates.
    pub faces: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonFace {
    pub id: usize,
    pub boundary_edge: usize,
    /// Node ids around the face, counter-clockwise, starting with the tail
    /// of the boundary edge.
    pub node_ids: Vec<usize>,
    pub vertices: Vec<Point>,
    pub incident_arcs: Vec<usize>,
}

impl SkeletonFace {
    pub fn area(&self) -> f64 {
        ring_area(&self.vertices)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StraightSkeleton {
    pub polygon: SimplePolygon,
    pub nodes: Vec<SkeletonNode>,
    pub arcs: Vec<SkeletonArc>,
    pub faces: Vec<SkeletonFace>,
    /// Set when simultaneous events were merged into a higher-degree node.
    pub degenerate: bool,
}

impl StraightSkeleton {
    pub fn dummy_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Dummy)
            .count()
    }

    /// Face whose boundary edge is polygon edge `e`. Face ids equal edge ids.
    pub fn face_of_edge(&self, e: usize) -> &SkeletonFace {
        &self.faces[e]
    }

    pub fn face_areas(&self) -> Vec<f64> {
        self.faces.iter().map(SkeletonFace::area).collect()
    }

    pub fn node_degree(&self, node: usize) -> usize {
        self.arcs
            .iter()
            .filter(|a| a.endpoints.0 == node || a.endpoints.1 == node)
            .count()
    }

    /// Faces having `node` on their boundary, ascending.
    pub fn faces_of_node(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .faces
            .iter()
            .filter(|f| f.node_ids.contains(&node))
            .map(|f| f.id)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn neighbor_nodes(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .arcs
            .iter()
            .filter_map(|a| match a.endpoints {
                (u, v) if u == node => Some(v),
                (u, v) if v == node => Some(u),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn arc_segment(&self, arc: usize) -> (Point, Point) {
        let (u, v) = self.arcs[arc].endpoints;
        (self.nodes[u].position, self.nodes[v].position)
    }

    /// Unit direction of polygon edge `e`, counter-clockwise.
    pub fn edge_direction(&self, e: usize) -> Direction {
        Direction::from_vec(self.polygon.edge(e).dir()).expect("non-degenerate edge")
    }
}

pub fn face_of_edge(ss: &StraightSkeleton, e: usize) -> &SkeletonFace {
    ss.face_of_edge(e)
}

pub fn face_areas(ss: &StraightSkeleton) -> Vec<f64> {
    ss.face_areas()
}

/// Offset line of an input edge: `normal · X = offset + t` at time `t`.
#[derive(Debug, Clone, Copy)]
struct EdgeLine {
    normal: Point,
    offset: f64,
    dir: Point,
}

#[derive(Debug, Clone, Copy)]
struct WVertex {
    node: usize,
    left: usize,
    right: usize,
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    /// Wavefront edge starting at vertex `i` collapses.
    Edge { i: usize },
    /// Reflex vertex `v` hits the wavefront edge starting at vertex `j`.
    Split { v: usize, j: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    at: Point,
    lav: usize,
    kind: EventKind,
}

struct Builder {
    lines: Vec<EdgeLine>,
    nodes: Vec<SkeletonNode>,
    arcs: Vec<SkeletonArc>,
    degenerate: bool,
    eps: f64,
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl Builder {
    /// Point and time where the offset lines of edges `a`, `b`, `c` concur.
    fn concurrency(&self, a: usize, b: usize, c: usize) -> Option<(Point, f64)> {
        let rows = [self.lines[a], self.lines[b], self.lines[c]];
        let m = rows.map(|l| [l.normal.x, l.normal.y, -1.0]);
        let rhs = rows.map(|l| l.offset);
        let d = det3(m);
        // Rows are unit normals; the determinant is dimensionless.
        if d.abs() < 1e-12 {
            return None;
        }
        let col = |k: usize| {
            let mut mm = m;
            for r in 0..3 {
                mm[r][k] = rhs[r];
            }
            det3(mm) / d
        };
        let (x, y, t) = (col(0), col(1), col(2));
        let p = Point::new(x, y);
        (p.is_finite() && t.is_finite()).then_some((p, t))
    }

    /// Position at time `t` of the wavefront vertex between edges `a` and `b`.
    fn vertex_at(&self, a: usize, b: usize, t: f64) -> Option<Point> {
        let (la, lb) = (self.lines[a], self.lines[b]);
        let det = la.normal.cross(lb.normal);
        if det.abs() < 1e-12 {
            return None;
        }
        let (ca, cb) = (la.offset + t, lb.offset + t);
        let x = (ca * lb.normal.y - cb * la.normal.y) / det;
        let y = (la.normal.x * cb - lb.normal.x * ca) / det;
        Some(Point::new(x, y))
    }

    /// Position at time `t` of a wavefront vertex. A vertex between two
    /// collinear edges moves along their common normal.
    fn pos(&self, v: &WVertex, t: f64) -> Option<Point> {
        if let Some(p) = self.vertex_at(v.left, v.right, t) {
            return Some(p);
        }
        let (la, lb) = (self.lines[v.left], self.lines[v.right]);
        let node = &self.nodes[v.node];
        if la.normal.dot(lb.normal) > 0.0 {
            return Some(node.position + la.normal * (t - node.time));
        }
        // Between opposite edges the vertex is only known where it was made.
        ((t - node.time).abs() <= self.eps).then_some(node.position)
    }

    /// Collapse of the edge between `u` and `w` from their trajectories, for
    /// when the three offset lines have no single concurrency point.
    fn collapse_by_motion(&self, u: &WVertex, w: &WVertex, now: f64) -> Option<(Point, f64)> {
        let (pu, pw) = (self.pos(u, now)?, self.pos(w, now)?);
        let d = self.lines[u.right].dir;
        // A vertex between opposite edges slides along them at once.
        if (self.is_antiparallel(u) || self.is_antiparallel(w))
            && (pw - pu).dot(d) >= -10.0 * self.eps
        {
            let at = if self.is_antiparallel(u) { pw } else { pu };
            return Some((at, now));
        }
        let (vu, vw) = (self.pos(u, now + 1.0)? - pu, self.pos(w, now + 1.0)? - pw);
        let gap = (pw - pu).dot(d);
        if gap <= 10.0 * self.eps {
            return Some((pu.lerp(pw, 0.5), now));
        }
        let rate = (vw - vu).dot(d);
        if rate >= 0.0 {
            return None;
        }
        let t = now - gap / rate;
        Some((pu + vu * (t - now), t))
    }

    /// For an edge event next to a vertex whose edges are opposite and
    /// parallel, the distance that vertex travels to the event point.
    fn antiparallel_reach(&self, lav: &[WVertex], ev: &Event) -> Option<f64> {
        let EventKind::Edge { i } = ev.kind else {
            return None;
        };
        let n = lav.len();
        [lav[i], lav[(i + 1) % n]]
            .iter()
            .filter(|v| self.is_antiparallel(v))
            .map(|v| self.nodes[v.node].position.dist(ev.at))
            .min_by(f64::total_cmp)
    }

    /// Vertex positions at time `t` when the wavefront has shrunk to a
    /// segment or a point.
    fn flat_at(&self, lav: &[WVertex], t: f64) -> Option<Vec<Point>> {
        let ps: Vec<Point> = lav.iter().map(|v| self.pos(v, t)).collect::<Option<_>>()?;
        let tol = 100.0 * self.eps;
        let (mut a, mut b, mut far) = (ps[0], ps[0], 0.0);
        for &p in &ps {
            for &q in &ps {
                if p.dist(q) > far {
                    (a, b, far) = (p, q, p.dist(q));
                }
            }
        }
        if far <= tol {
            return Some(ps);
        }
        let d = (b - a) * (1.0 / far);
        ps.iter()
            .all(|&p| (p - a).cross(d).abs() <= tol)
            .then_some(ps)
    }

    /// Replaces a flat wavefront by ridge arcs along its segment. Each piece
    /// of the segment separates the two wavefront edges that cover it.
    fn collapse_flat(&mut self, lav: &[WVertex], t: f64) {
        let Some(ps) = self.flat_at(lav, t) else {
            return;
        };
        let n = lav.len();
        let tol = 100.0 * self.eps;
        // Distinct positions and the node standing at each.
        let mut spots: Vec<(Point, usize)> = Vec::new();
        let mut spot_of = Vec::with_capacity(n);
        for (v, &p) in lav.iter().zip(&ps) {
            let k = match spots.iter().position(|s| s.0.dist(p) <= tol) {
                Some(k) => k,
                None => {
                    let node = if self.nodes[v.node].position.dist(p) <= tol {
                        v.node
                    } else {
                        self.node_at(p, t)
                    };
                    spots.push((p, node));
                    spots.len() - 1
                }
            };
            spot_of.push(k);
        }
        for (v, &k) in lav.iter().zip(&spot_of) {
            self.add_arc(v.node, spots[k].1, (v.left, v.right));
        }
        if spots.len() < 2 {
            return;
        }
        let origin = spots[0].0;
        let far = spots
            .iter()
            .map(|s| s.0)
            .max_by(|x, y| x.dist(origin).total_cmp(&y.dist(origin)))
            .unwrap_or(origin);
        let d = (far - origin) * (1.0 / far.dist(origin));
        let at = |p: Point| (p - origin).dot(d);
        let mut order: Vec<usize> = (0..spots.len()).collect();
        order.sort_by(|&x, &y| at(spots[x].0).total_cmp(&at(spots[y].0)));
        for w in order.windows(2) {
            let mid = 0.5 * (at(spots[w[0]].0) + at(spots[w[1]].0));
            let cover: Vec<usize> = (0..n)
                .filter(|&i| {
                    let (s0, s1) = (at(ps[i]), at(ps[(i + 1) % n]));
                    s0.min(s1) < mid && mid < s0.max(s1)
                })
                .map(|i| lav[i].right)
                .collect();
            if cover.len() != 2 {
                self.degenerate = true;
            }
            if cover.len() >= 2 {
                self.add_arc(spots[w[0]].1, spots[w[1]].1, (cover[0], cover[1]));
            }
        }
    }

    fn is_antiparallel(&self, v: &WVertex) -> bool {
        self.lines[v.left].normal.dot(self.lines[v.right].normal) < -1.0 + 1e-9
    }

    fn is_reflex(&self, v: &WVertex) -> bool {
        self.lines[v.left].dir.cross(self.lines[v.right].dir) < 0.0
    }

    fn node_at(&mut self, at: Point, time: f64) -> usize {
        let merge = 10.0 * self.eps;
        if let Some(n) = self.nodes.iter().find(|n| {
            n.kind == NodeKind::Dummy
                && n.position.dist(at) <= merge
                && (n.time - time).abs() <= merge
        }) {
            self.degenerate = true;
            return n.id;
        }
        let id = self.nodes.len();
        self.nodes.push(SkeletonNode {
            id,
            position: at,
            kind: NodeKind::Dummy,
            time,
        });
        id
    }

    fn add_arc(&mut self, u: usize, v: usize, faces: (usize, usize)) {
        if u == v {
            return;
        }
        let key = (u.min(v), u.max(v));
        if self.arcs.iter().any(|a| {
            (
                a.endpoints.0.min(a.endpoints.1),
                a.endpoints.0.max(a.endpoints.1),
            ) == key
        }) {
            self.degenerate = true;
            return;
        }
        let kind = if self.nodes[u].kind == NodeKind::PolygonVertex
            || self.nodes[v].kind == NodeKind::PolygonVertex
        {
            ArcKind::Bcd
        } else {
            ArcKind::Internal
        };
        let id = self.arcs.len();
        self.arcs.push(SkeletonArc {
            id,
            endpoints: (u, v),
            kind,
            faces,
        });
    }

    fn events(&self, lavs: &[Vec<WVertex>], now: f64) -> Vec<Event> {
        let mut out = Vec::new();
        let tol = self.eps;
        for (li, lav) in lavs.iter().enumerate() {
            let n = lav.len();
            for i in 0..n {
                let u = lav[i];
                let w = lav[(i + 1) % n];
                let hit = self
                    .concurrency(u.left, u.right, w.right)
                    .or_else(|| self.collapse_by_motion(&u, &w, now));
                // The three lines can concur away from the edge itself. A vertex
                // between opposite edges slides, so it has no fixed track.
                let reached = |(at, time): &(Point, f64)| {
                    [u, w]
                        .iter()
                        .filter(|v| !self.is_antiparallel(v))
                        .all(|v| self.pos(v, *time).is_none_or(|p| p.dist(*at) <= 1e3 * tol))
                };
                if let Some((at, time)) = hit.filter(reached) {
                    if time >= now - tol {
                        out.push(Event {
                            time: time.max(now),
                            at,
                            lav: li,
                            kind: EventKind::Edge { i },
                        });
                    }
                }
            }
            for vi in 0..n {
                let v = lav[vi];
                if !self.is_reflex(&v) {
                    continue;
                }
                for j in 0..n {
                    let u = lav[j];
                    let w = lav[(j + 1) % n];
                    let e = u.right;
                    if e == v.left || e == v.right || j == vi || (j + 1) % n == vi {
                        continue;
                    }
                    let Some((at, time)) = self.concurrency(v.left, v.right, e) else {
                        continue;
                    };
                    if time < now - tol {
                        continue;
                    }
                    let (Some(pu), Some(pw)) = (self.pos(&u, time), self.pos(&w, time)) else {
                        continue;
                    };
                    let d = self.lines[e].dir;
                    let (su, sw, sx) = (pu.dot(d), pw.dot(d), at.dot(d));
                    if su + tol < sx && sx < sw - tol {
                        out.push(Event {
                            time: time.max(now),
                            at,
                            lav: li,
                            kind: EventKind::Split { v: vi, j },
                        });
                    }
                }
            }
        }
        out
    }
}

/// Computes the straight skeleton of a simple polygon.
pub fn compute_straight_skeleton(polygon: &SimplePolygon) -> Result<StraightSkeleton> {
    let m = polygon.len();
    if m < 3 {
        return Err(Error::DegenerateInput(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    let eps = polygon.tolerance().eps;
    let mut lines = Vec::with_capacity(m);
    for i in 0..m {
        let seg = polygon.edge(i);
        let len = seg.len();
        if len <= eps {
            return Err(Error::DegenerateInput(format!("zero-length edge {i}")));
        }
        let dir = seg.dir() * (1.0 / len);
        let normal = dir.perp();
        lines.push(EdgeLine {
            normal,
            offset: normal.dot(seg.a),
            dir,
        });
    }
    for i in 0..m {
        if polygon.vertex(i).approx_eq(polygon.vertex(i + 2), eps) && m > 3 {
            return Err(Error::DegenerateInput(format!(
                "repeated vertex near {}",
                (i + 1) % m
            )));
        }
    }
    let nodes = (0..m)
        .map(|i| SkeletonNode {
            id: i,
            position: polygon.vertex(i),
            kind: NodeKind::PolygonVertex,
            time: 0.0,
        })
        .collect();
    let mut b = Builder {
        lines,
        nodes,
        arcs: Vec::new(),
        degenerate: false,
        eps,
    };

    let mut lavs: Vec<Vec<WVertex>> = vec![(0..m)
        .map(|i| WVertex {
            node: i,
            left: (i + m - 1) % m,
            right: i,
        })
        .collect()];
    let mut now = 0.0f64;
    let max_steps = 8 * m + 16;
    let mut steps = 0;
    while !lavs.is_empty() {
        steps += 1;
        if steps > max_steps {
            return Err(Error::NumericFailure("wavefront did not converge".into()));
        }
        // Trivial leftovers first.
        if let Some(li) = lavs.iter().position(|l| l.len() <= 2) {
            let lav = lavs.swap_remove(li);
            if lav.len() == 2 {
                b.add_arc(lav[0].node, lav[1].node, (lav[0].left, lav[0].right));
            }
            continue;
        }
        if let Some(li) = lavs.iter().position(|l| b.flat_at(l, now).is_some()) {
            let lav = lavs.swap_remove(li);
            b.collapse_flat(&lav, now);
            continue;
        }
        let events = b.events(&lavs, now);
        let Some(mut ev) = events.iter().copied().min_by(|x, y| {
            x.time
                .total_cmp(&y.time)
                .then_with(|| rank(x).cmp(&rank(y)))
        }) else {
            return Err(Error::NumericFailure(
                "event queue stalled with live wavefront".into(),
            ));
        };
        // A vertex between two coinciding opposite edges sweeps along them
        // and meets the nearest collapse first.
        let window = ev.time + 10.0 * eps;
        if let Some(near) = events
            .iter()
            .filter(|x| x.time <= window)
            .filter_map(|x| b.antiparallel_reach(&lavs[x.lav], x).map(|d| (d, x)))
            .min_by(|x, y| x.0.total_cmp(&y.0).then_with(|| rank(x.1).cmp(&rank(y.1))))
        {
            ev = *near.1;
        }
        now = ev.time;
        let lav = lavs.swap_remove(ev.lav);
        let n = lav.len();
        match ev.kind {
            EventKind::Edge { i } => {
                let node = b.node_at(ev.at, ev.time);
                if n == 3 {
                    for v in &lav {
                        b.add_arc(v.node, node, (v.left, v.right));
                    }
                    continue;
                }
                let u = lav[i];
                let w = lav[(i + 1) % n];
                b.add_arc(u.node, node, (u.left, u.right));
                b.add_arc(w.node, node, (w.left, w.right));
                let z = WVertex {
                    node,
                    left: u.left,
                    right: w.right,
                };
                let mut next = Vec::with_capacity(n - 1);
                next.push(z);
                for k in 2..n {
                    next.push(lav[(i + k) % n]);
                }
                lavs.push(next);
            }
            EventKind::Split { v: vi, j } => {
                let node = b.node_at(ev.at, ev.time);
                let v = lav[vi];
                let e = lav[j].right;
                b.add_arc(v.node, node, (v.left, v.right));
                let v1 = WVertex {
                    node,
                    left: v.left,
                    right: e,
                };
                let v2 = WVertex {
                    node,
                    left: e,
                    right: v.right,
                };
                // v1 → w … prev(v)
                let mut first = vec![v1];
                let mut k = (j + 1) % n;
                while k != vi {
                    first.push(lav[k]);
                    k = (k + 1) % n;
                }
                // v2 → next(v) … u
                let mut second = vec![v2];
                let mut k = (vi + 1) % n;
                while k != (j + 1) % n {
                    second.push(lav[k]);
                    k = (k + 1) % n;
                }
                lavs.push(first);
                lavs.push(second);
            }
        }
    }

    let faces = build_faces(polygon, &b.nodes, &b.arcs)?;
    let degenerate = b.degenerate
        || (m..b.nodes.len()).any(|id| {
            b.arcs
                .iter()
                .filter(|a| a.endpoints.0 == id || a.endpoints.1 == id)
                .count()
                > 3
        });
    Ok(StraightSkeleton {
        polygon: polygon.clone(),
        nodes: b.nodes,
        arcs: b.arcs,
        faces,
        degenerate,
    })
}

fn rank(e: &Event) -> (u8, usize, usize) {
    match e.kind {
        EventKind::Edge { i } => (0, e.lav, i),
        EventKind::Split { v, j } => (1, e.lav, v * 1000 + j),
    }
}

/// Walks each face from the head of its boundary edge back to its tail
/// through the arcs that separate it from other faces.
fn build_faces(
    polygon: &SimplePolygon,
    nodes: &[SkeletonNode],
    arcs: &[SkeletonArc],
) -> Result<Vec<SkeletonFace>> {
    let m = polygon.len();
    let mut faces = Vec::with_capacity(m);
    for e in 0..m {
        let mine: Vec<usize> = arcs
            .iter()
            .filter(|a| a.faces.0 == e || a.faces.1 == e)
            .map(|a| a.id)
            .collect();
        let start = (e + 1) % m;
        let goal = e;
        let mut used = vec![false; mine.len()];
        let mut node_ids = vec![e, start];
        let mut cur = start;
        while cur != goal {
            let step = mine.iter().enumerate().find_map(|(k, &a)| {
                if used[k] {
                    return None;
                }
                match arcs[a].endpoints {
                    (u, v) if u == cur => Some((k, v)),
                    (u, v) if v == cur => Some((k, u)),
                    _ => None,
                }
            });
            let Some((k, nxt)) = step else {
                return Err(Error::NumericFailure(format!(
                    "face {e} boundary is not closed"
                )));
            };
            used[k] = true;
            if nxt != goal {
                node_ids.push(nxt);
            }
            cur = nxt;
        }
        let vertices = node_ids.iter().map(|&id| nodes[id].position).collect();
        faces.push(SkeletonFace {
            id: e,
            boundary_edge: e,
            node_ids,
            vertices,
            incident_arcs: mine,
        });
    }
    Ok(faces)
}
