//! Planar primitives and tolerance-aware predicates.
//!
//! Every predicate compares against an absolute length tolerance `eps`.
//! Pipelines derive it once per instance from the bounding-box diameter via
//! [`Tolerance::for_points`]; the convenience wrappers without an `eps`
//! argument derive a local one from their own inputs.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance factor applied to the instance diameter.
pub const REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn midpoint(self, o: Point) -> Point {
        self.lerp(o, 0.5)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn approx_eq(self, o: Point, eps: f64) -> bool {
        self.dist(o) <= eps
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Absolute length tolerance for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Tolerance {
    pub fn new(eps: f64) -> Self {
        Tolerance { eps }
    }

    /// `REL_EPS * (1 + diameter)` of the bounding box of `pts`.
    pub fn for_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Self {
        Self::with_factor(pts, REL_EPS)
    }

    pub fn with_factor<'a>(pts: impl IntoIterator<Item = &'a Point>, factor: f64) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let diam = if lo.x.is_finite() { hi.dist(lo) } else { 0.0 };
        Tolerance {
            eps: factor * (1.0 + diam),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Ccw,
    Cw,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

fn local_eps(pts: &[Point]) -> f64 {
    let scale = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| a.dist(*b)))
        .fold(0.0, f64::max);
    REL_EPS * (1.0 + scale)
}

/// Orientation of the turn p→q→r. COLLINEAR wins when the cross product is
/// within `eps` times the longer of the two arms.
pub fn orientation_eps(p: Point, q: Point, r: Point, eps: f64) -> Orientation {
    let u = q - p;
    let v = r - p;
    let c = u.cross(v);
    let scale = u.norm().max(v.norm());
    if c.abs() <= eps * scale {
        Orientation::Collinear
    } else if c > 0.0 {
        Orientation::Ccw
    } else {
        Orientation::Cw
    }
}

pub fn orientation(p: Point, q: Point, r: Point) -> Orientation {
    orientation_eps(p, q, r, local_eps(&[p, q, r]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    pub fn midpoint(&self) -> Point {
        self.a.midpoint(self.b)
    }

    pub fn dir(&self) -> Point {
        self.b - self.a
    }

    /// Distance from `p` to the closed segment.
    pub fn dist_to(&self, p: Point) -> f64 {
        let d = self.dir();
        let l2 = d.dot(d);
        if l2 == 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / l2).clamp(0.0, 1.0);
        p.dist(self.a + d * t)
    }

    pub fn contains_eps(&self, p: Point, eps: f64) -> bool {
        self.dist_to(p) <= eps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Intersection {
    None,
    Point(Point),
    Overlap(Segment),
}

/// Classifies the intersection of two closed segments.
pub fn segment_intersection_eps(s1: &Segment, s2: &Segment, eps: f64) -> Intersection {
    let (a, b, c, d) = (s1.a, s1.b, s2.a, s2.b);
    let o1 = orientation_eps(a, b, c, eps);
    let o2 = orientation_eps(a, b, d, eps);
    let o3 = orientation_eps(c, d, a, eps);
    let o4 = orientation_eps(c, d, b, eps);

    if o1 == Orientation::Collinear && o2 == Orientation::Collinear {
        // Both of s2's endpoints lie on the line through s1.
        let (base, dir) = if s1.len() >= s2.len() {
            (a, b - a)
        } else {
            (c, d - c)
        };
        let l2 = dir.dot(dir);
        if l2 == 0.0 {
            return if a.approx_eq(c, eps) {
                Intersection::Point(a)
            } else {
                Intersection::None
            };
        }
        let param = |p: Point| (p - base).dot(dir) / l2;
        let (mut t0, mut t1) = (param(a), param(b));
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        let (mut u0, mut u1) = (param(c), param(d));
        if u0 > u1 {
            std::mem::swap(&mut u0, &mut u1);
        }
        let lo = t0.max(u0);
        let hi = t1.min(u1);
        let len = l2.sqrt();
        if (hi - lo) * len < -eps {
            return Intersection::None;
        }
        let plo = base + dir * lo;
        let phi = base + dir * hi;
        // Prefer exact endpoints when they coincide with the computed values.
        let snap = |p: Point| {
            [a, b, c, d]
                .into_iter()
                .find(|e| e.approx_eq(p, eps))
                .unwrap_or(p)
        };
        if (hi - lo) * len <= eps {
            return Intersection::Point(snap(plo.midpoint(phi)));
        }
        return Intersection::Overlap(Segment::new(snap(plo), snap(phi)));
    }

    let straddle12 = o1 != o2 || o1 == Orientation::Collinear || o2 == Orientation::Collinear;
    let straddle34 = o3 != o4 || o3 == Orientation::Collinear || o4 == Orientation::Collinear;
    if !(straddle12 && straddle34) {
        return Intersection::None;
    }
    // Touching cases: an endpoint on the other segment.
    for (p, o, seg) in [(c, o1, s1), (d, o2, s1), (a, o3, s2), (b, o4, s2)] {
        if o == Orientation::Collinear {
            if seg.contains_eps(p, eps) {
                return Intersection::Point(p);
            }
            return Intersection::None;
        }
    }
    if o1 == o2 || o3 == o4 {
        return Intersection::None;
    }
    match line_intersection(a, b - a, c, d - c) {
        Some(p) => Intersection::Point(p),
        None => Intersection::None,
    }
}

pub fn segment_intersection(s1: &Segment, s2: &Segment) -> Intersection {
    segment_intersection_eps(s1, s2, local_eps(&[s1.a, s1.b, s2.a, s2.b]))
}

/// Intersection of the lines `p + s·u` and `q + t·v`; `None` when parallel.
pub fn line_intersection(p: Point, u: Point, q: Point, v: Point) -> Option<Point> {
    let den = u.cross(v);
    if den.abs() <= 1e-300 || !den.is_finite() {
        return None;
    }
    let s = (q - p).cross(v) / den;
    let x = p + u * s;
    x.is_finite().then_some(x)
}

/// Signed distance of `p` from the directed line a→b, positive on the left.
pub fn signed_dist(a: Point, b: Point, p: Point) -> f64 {
    let d = b - a;
    let n = d.norm();
    if n == 0.0 {
        return p.dist(a);
    }
    d.cross(p - a) / n
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Self {
        Polyline { vertices }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn len(&self) -> f64 {
        self.segments().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 2
    }

    /// Drops repeated vertices and interior vertices that are collinear with
    /// their neighbours and lie between them.
    pub fn simplified(&self, eps: f64) -> Polyline {
        let mut out: Vec<Point> = Vec::with_capacity(self.vertices.len());
        for &p in &self.vertices {
            if out.last().is_some_and(|l: &Point| l.approx_eq(p, eps)) {
                continue;
            }
            while out.len() >= 2 {
                let a = out[out.len() - 2];
                let b = out[out.len() - 1];
                let straight = orientation_eps(a, b, p, eps) == Orientation::Collinear
                    && (b - a).dot(p - b) > 0.0;
                if straight {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        Polyline::new(out)
    }

    /// Interior vertices at which the direction changes.
    pub fn bends(&self, eps: f64) -> usize {
        self.simplified(eps).vertices.len().saturating_sub(2)
    }
}

/// Unit direction vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    dx: f64,
    dy: f64,
}

impl Direction {
    pub fn new(dx: f64, dy: f64) -> Option<Self> {
        let n = dx.hypot(dy);
        (n > 0.0 && n.is_finite()).then(|| Direction {
            dx: dx / n,
            dy: dy / n,
        })
    }

    pub fn from_vec(v: Point) -> Option<Self> {
        Self::new(v.x, v.y)
    }

    pub fn vec(self) -> Point {
        Point::new(self.dx, self.dy)
    }

    pub fn dx(self) -> f64 {
        self.dx
    }

    pub fn dy(self) -> f64 {
        self.dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Shoelace area of a vertex ring; positive for counter-clockwise order.
pub fn ring_area(vs: &[Point]) -> f64 {
    let n = vs.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += vs[i].cross(vs[(i + 1) % n]);
    }
    0.5 * s
}

pub fn ring_centroid(vs: &[Point]) -> Point {
    let a = ring_area(vs);
    if a.abs() <= f64::MIN_POSITIVE {
        let n = vs.len().max(1) as f64;
        let s = vs.iter().fold(Point::new(0.0, 0.0), |acc, p| acc + *p);
        return s * (1.0 / n);
    }
    let n = vs.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = vs[i];
        let q = vs[(i + 1) % n];
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

pub fn ring_edges(vs: &[Point]) -> impl Iterator<Item = Segment> + '_ {
    let n = vs.len();
    (0..n).map(move |i| Segment::new(vs[i], vs[(i + 1) % n]))
}

/// Ray-crossing point location against a vertex ring.
pub fn locate_in_ring(p: Point, vs: &[Point], eps: f64) -> Location {
    if ring_edges(vs).any(|e| e.contains_eps(p, eps)) {
        return Location::Boundary;
    }
    let mut inside = false;
    let n = vs.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vs[i], vs[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

pub fn ring_is_convex(vs: &[Point], eps: f64) -> bool {
    let n = vs.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| orientation_eps(vs[i], vs[(i + 1) % n], vs[(i + 2) % n], eps) != Orientation::Cw)
}

/// True iff the ring's projection onto `d` rises and falls exactly once.
pub fn ring_is_monotone(vs: &[Point], d: Direction, eps: f64) -> bool {
    let dv = d.vec();
    let proj: Vec<f64> = vs.iter().map(|p| p.dot(dv)).collect();
    let n = proj.len();
    let mut signs = Vec::with_capacity(n);
    for i in 0..n {
        let diff = proj[(i + 1) % n] - proj[i];
        if diff > eps {
            signs.push(1i8);
        } else if diff < -eps {
            signs.push(-1i8);
        }
    }
    if signs.is_empty() {
        return true;
    }
    let changes = (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count();
    changes <= 2
}

/// Convex hull in CCW order without collinear vertices (monotone chain).
pub fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut v = pts.to_vec();
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    v.dedup();
    if v.len() < 3 {
        return v;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * v.len());
    for pass in 0..2 {
        let base = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(v.iter())
        } else {
            Box::new(v.iter().rev())
        };
        for &p in iter {
            while hull.len() >= base + 2
                && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(p - hull[hull.len() - 2])
                    <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Removes repeated points and straight (180°) vertices from a ring.
pub fn clean_ring(vs: &[Point], eps: f64) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(vs.len());
    for &p in vs {
        if out.last().is_some_and(|l: &Point| l.approx_eq(p, eps)) {
            continue;
        }
        out.push(p);
    }
    while out.len() > 1 && out[0].approx_eq(out[out.len() - 1], eps) {
        out.pop();
    }
    let mut changed = true;
    while changed && out.len() >= 3 {
        changed = false;
        let n = out.len();
        for i in 0..n {
            let a = out[(i + n - 1) % n];
            let b = out[i];
            let c = out[(i + 1) % n];
            if orientation_eps(a, b, c, eps) == Orientation::Collinear && (b - a).dot(c - b) >= 0.0
            {
                out.remove(i);
                changed = true;
                break;
            }
        }
    }
    out
}

/// Keeps the part of the ring on the requested side of the directed line
/// a→b (Sutherland–Hodgman). Exact for convex input and for monotone input
/// clipped perpendicular to its monotonicity direction.
pub fn clip_ring(vs: &[Point], a: Point, b: Point, keep_left: bool, eps: f64) -> Vec<Point> {
    let side = |p: Point| {
        let s = signed_dist(a, b, p);
        if keep_left {
            s
        } else {
            -s
        }
    };
    let n = vs.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let p = vs[i];
        let q = vs[(i + 1) % n];
        let sp = side(p);
        let sq = side(q);
        let p_in = sp >= -eps;
        let q_in = sq >= -eps;
        if p_in {
            out.push(p);
        }
        let crosses = (sp > eps && sq < -eps) || (sp < -eps && sq > eps);
        if crosses {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        } else if p_in != q_in {
            // One endpoint is within eps of the line; it is already emitted
            // when inside, nothing to add otherwise.
        }
    }
    clean_ring(&out, eps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
}

impl SimplePolygon {
    /// Validates simplicity and normalizes the orientation to CCW.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Validation(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::Validation(format!(
                "polygon vertex {i} is not finite"
            )));
        }
        let eps = Tolerance::for_points(&vertices).eps;
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].approx_eq(vertices[(i + 1) % n], eps) {
                return Err(Error::DegenerateInput(format!(
                    "zero-length edge {i} between vertices {i} and {}",
                    (i + 1) % n
                )));
            }
        }
        if let Some((i, j)) = first_self_intersection(&vertices, eps) {
            return Err(Error::Validation(format!(
                "polygon is not simple: edge {i} intersects edge {j}"
            )));
        }
        let area = ring_area(&vertices);
        if area.abs() <= eps * eps {
            return Err(Error::Validation("polygon has zero area".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(SimplePolygon { vertices })
    }

    /// Wraps a ring already known to be simple and CCW.
    pub(crate) fn from_ccw_unchecked(vertices: Vec<Point>) -> Self {
        SimplePolygon { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge i runs from vertex i to vertex i+1.
    pub fn edge(&self, i: usize) -> Segment {
        Segment::new(self.vertex(i), self.vertex(i + 1))
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        ring_edges(&self.vertices)
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::for_points(&self.vertices)
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(self)
    }

    pub fn is_reflex(&self, i: usize) -> bool {
        let n = self.len();
        orientation_eps(
            self.vertex(i + n - 1),
            self.vertex(i),
            self.vertex(i + 1),
            self.tolerance().eps,
        ) == Orientation::Cw
    }
}

/// Index pair of the first two non-adjacent edges that intersect.
pub fn first_self_intersection(vs: &[Point], eps: f64) -> Option<(usize, usize)> {
    let n = vs.len();
    let edges: Vec<Segment> = ring_edges(vs).collect();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let hit = segment_intersection_eps(&edges[i], &edges[j], eps);
            if adjacent {
                // Adjacent edges may only share their common vertex.
                if matches!(hit, Intersection::Overlap(_)) {
                    return Some((i, j));
                }
                continue;
            }
            if !matches!(hit, Intersection::None) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn signed_area(p: &SimplePolygon) -> f64 {
    ring_area(&p.vertices)
}

pub fn point_location(p: Point, poly: &SimplePolygon) -> Location {
    locate_in_ring(p, &poly.vertices, poly.tolerance().eps)
}

pub fn is_monotone(poly: &SimplePolygon, d: Direction) -> bool {
    ring_is_monotone(&poly.vertices, d, poly.tolerance().eps)
}

pub fn is_convex(poly: &SimplePolygon) -> bool {
    ring_is_convex(&poly.vertices, poly.tolerance().eps)
}

/// Points with stable ids; membership in a polygon is checked by callers
/// that know the polygon (see `io::Instance`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::Validation(format!("point {i} is not finite")));
        }
        let eps = Tolerance::for_points(&points).eps;
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x));
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                if points[j].x - points[i].x > eps {
                    break;
                }
                if points[i].approx_eq(points[j], eps) {
                    return Err(Error::Validation(format!(
                        "points {} and {} coincide",
                        i.min(j),
                        i.max(j)
                    )));
                }
            }
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, id: usize) -> Point {
        self.points[id]
    }
}
