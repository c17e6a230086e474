//! Layered SVG rendering of pipeline artifacts.

use std::fmt::Write;

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet, SimplePolygon};
use crate::skeleton::StraightSkeleton;
use crate::sss::{PartitionResult, SplitSkeleton};

/// Optional layers. The polygon outline and the points are always drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub skeleton: bool,
    pub sss: bool,
    pub backbone: bool,
    pub embedding: bool,
}

impl Layers {
    pub const ALL: Layers = Layers {
        skeleton: true,
        sss: true,
        backbone: true,
        embedding: true,
    };
    pub const NONE: Layers = Layers {
        skeleton: false,
        sss: false,
        backbone: false,
        embedding: false,
    };

    /// Parses a comma-separated list such as `skeleton,embedding`; `all` and
    /// `none` are accepted.
    pub fn parse(text: &str) -> Result<Layers> {
        let mut out = Layers::NONE;
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "all" => out = Layers::ALL,
                "none" => out = Layers::NONE,
                "skeleton" => out.skeleton = true,
                "sss" => out.sss = true,
                "backbone" => out.backbone = true,
                "embedding" => out.embedding = true,
                other => return Err(Error::Parse(format!("unknown layer '{other}'"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub polygon_stroke: f64,
    pub skeleton_stroke: f64,
    pub sss_stroke: f64,
    pub backbone_stroke: f64,
    pub edge_stroke: f64,
    pub point_radius: f64,
    pub layers: Layers,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 800.0,
            height: 800.0,
            margin: 20.0,
            polygon_stroke: 2.0,
            skeleton_stroke: 1.0,
            sss_stroke: 1.0,
            backbone_stroke: 0.75,
            edge_stroke: 1.5,
            point_radius: 3.0,
            layers: Layers::ALL,
        }
    }
}

impl RenderSpec {
    pub fn check(&self) -> Result<()> {
        let sizes = [
            self.width,
            self.height,
            self.polygon_stroke,
            self.skeleton_stroke,
            self.sss_stroke,
        ];
        let more = [self.backbone_stroke, self.edge_stroke, self.point_radius];
        if sizes
            .iter()
            .chain(&more)
            .any(|v| !(v.is_finite() && *v > 0.0))
            || self.margin.is_nan()
            || self.margin < 0.0
        {
            return Err(Error::Validation("render sizes must be positive".into()));
        }
        if 2.0 * self.margin >= self.width.min(self.height) {
            return Err(Error::Validation("margin leaves no drawing area".into()));
        }
        Ok(())
    }
}

/// Whatever the pipeline has produced so far; absent stages are skipped.
#[derive(Debug, Clone, Copy)]
pub struct Artifacts<'a> {
    pub polygon: &'a SimplePolygon,
    pub points: Option<&'a PointSet>,
    pub skeleton: Option<&'a StraightSkeleton>,
    pub sss: Option<&'a SplitSkeleton>,
    pub partition: Option<&'a PartitionResult>,
    pub embedding: Option<&'a Embedding>,
}

impl<'a> Artifacts<'a> {
    pub fn new(polygon: &'a SimplePolygon) -> Self {
        Artifacts {
            polygon,
            points: None,
            skeleton: None,
            sss: None,
            partition: None,
            embedding: None,
        }
    }
}

/// Maps instance coordinates onto the canvas, y pointing up.
struct View {
    min: Point,
    scale: f64,
    height: f64,
    margin: f64,
}

impl View {
    fn new(poly: &SimplePolygon, spec: &RenderSpec) -> Self {
        let vs = poly.vertices();
        let (mut lo, mut hi) = (vs[0], vs[0]);
        for p in vs {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let w = (hi.x - lo.x).max(f64::MIN_POSITIVE);
        let h = (hi.y - lo.y).max(f64::MIN_POSITIVE);
        let scale =
            ((spec.width - 2.0 * spec.margin) / w).min((spec.height - 2.0 * spec.margin) / h);
        View {
            min: lo,
            scale,
            height: spec.height,
            margin: spec.margin,
        }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        let x = self.margin + (p.x - self.min.x) * self.scale;
        let y = self.height - self.margin - (p.y - self.min.y) * self.scale;
        (x, y)
    }

    fn coords(&self, ps: &[Point]) -> String {
        let mut s = String::new();
        for (i, &p) in ps.iter().enumerate() {
            let (x, y) = self.map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s
    }

    fn line(&self, out: &mut String, a: Point, b: Point) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let _ = writeln!(
            out,
            r#"    <line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
        );
    }
}

/// SVG 1.1 document with one group per layer. Output depends only on the
/// inputs.
pub fn emit_svg(art: &Artifacts, spec: &RenderSpec) -> String {
    let v = View::new(art.polygon, spec);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = spec.width,
        h = spec.height
    );
    let _ = writeln!(
        out,
        r##"  <g id="polygon" fill="#f4f1ea" stroke="#222222" stroke-width="{}">"##,
        spec.polygon_stroke
    );
    let _ = writeln!(
        out,
        r#"    <polygon points="{}"/>"#,
        v.coords(art.polygon.vertices())
    );
    out.push_str("  </g>\n");

    let part = art
        .partition
        .or(art.embedding.and_then(|e| e.partition.as_ref()));
    let skeleton = art
        .skeleton
        .or(art.sss.map(|s| &s.base))
        .or(part.map(|p| &p.skeleton));
    if let (true, Some(ss)) = (spec.layers.skeleton, skeleton) {
        let _ = writeln!(
            out,
            r##"  <g id="skeleton" stroke="#3366cc" stroke-width="{}" stroke-dasharray="4 3">"##,
            spec.skeleton_stroke
        );
        for a in &ss.arcs {
            let (p, q) = ss.arc_segment(a.id);
            v.line(&mut out, p, q);
        }
        out.push_str("  </g>\n");
    }

    let sss = art.sss.or(part.map(|p| &p.sss));
    if let (true, Some(sss)) = (spec.layers.sss, sss) {
        let _ = writeln!(
            out,
            r##"  <g id="sss" stroke="#cc6633" stroke-width="{}">"##,
            spec.sss_stroke
        );
        for s in &sss.splitting_segments {
            v.line(&mut out, s.a, s.b);
        }
        if let Some(p) = part {
            v.line(&mut out, p.dividing.a, p.dividing.b);
        }
        out.push_str("  </g>\n");
    }

    if let (true, Some(e)) = (spec.layers.backbone, art.embedding) {
        let _ = writeln!(
            out,
            r##"  <g id="backbone" fill="none" stroke="#999999" stroke-width="{}">"##,
            spec.backbone_stroke
        );
        for b in &e.backbones {
            let _ = writeln!(out, r#"    <polyline points="{}"/>"#, v.coords(&b.vertices));
        }
        out.push_str("  </g>\n");
    }

    if let (true, Some(e)) = (spec.layers.embedding, art.embedding) {
        let _ = writeln!(
            out,
            r##"  <g id="embedding" fill="none" stroke="#118844" stroke-width="{}" stroke-linejoin="round">"##,
            spec.edge_stroke
        );
        for edge in &e.edges {
            let _ = writeln!(
                out,
                r#"    <polyline points="{}"/>"#,
                v.coords(&edge.route.vertices)
            );
        }
        out.push_str("  </g>\n");
    }

    if let Some(pts) = art.points {
        let _ = writeln!(out, r##"  <g id="points" fill="#111111">"##);
        let root = part.map(|p| p.q);
        for (i, &p) in pts.points().iter().enumerate() {
            let (x, y) = v.map(p);
            let fill = if Some(i) == root {
                r##" fill="#cc2222""##
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"    <circle cx="{x:.3}" cy="{y:.3}" r="{}"{fill}/>"#,
                spec.point_radius
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed;
    use crate::skeleton::compute_straight_skeleton;
    use crate::tree::BalancedBinaryTree;

    fn rect() -> SimplePolygon {
        SimplePolygon::new(vec![
            Point::new(0., 0.),
            Point::new(4., 0.),
            Point::new(4., 2.),
            Point::new(0., 2.),
        ])
        .unwrap()
    }

    #[test]
    fn rectangle_skeleton_layer_has_five_dashed_arcs() {
        let poly = rect();
        let ss = compute_straight_skeleton(&poly).unwrap();
        let art = Artifacts {
            skeleton: Some(&ss),
            ..Artifacts::new(&poly)
        };
        let svg = emit_svg(&art, &RenderSpec::default());
        let group = svg
            .split(r#"<g id="skeleton""#)
            .nth(1)
            .unwrap()
            .split("</g>")
            .next()
            .unwrap();
        assert!(group.contains("stroke-dasharray"));
        assert_eq!(group.matches("<line").count(), 5);
    }

    #[test]
    fn single_node_embedding_draws_polygon_and_one_point() {
        let poly = rect();
        let pts = PointSet::new(vec![Point::new(1.5, 0.7)]).unwrap();
        let e = embed(&poly, &pts, &BalancedBinaryTree::balanced(1)).unwrap();
        let art = Artifacts {
            points: Some(&pts),
            embedding: Some(&e),
            ..Artifacts::new(&poly)
        };
        let svg = emit_svg(&art, &RenderSpec::default());
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 0);
    }

    #[test]
    fn rendering_is_deterministic() {
        let poly = rect();
        let ss = compute_straight_skeleton(&poly).unwrap();
        let art = Artifacts {
            skeleton: Some(&ss),
            ..Artifacts::new(&poly)
        };
        assert_eq!(
            emit_svg(&art, &RenderSpec::default()),
            emit_svg(&art, &RenderSpec::default())
        );
    }

    #[test]
    fn layer_names_parse() {
        assert_eq!(
            Layers::parse("skeleton, embedding").unwrap(),
            Layers {
                skeleton: true,
                embedding: true,
                ..Layers::NONE
            }
        );
        assert_eq!(Layers::parse("all").unwrap(), Layers::ALL);
        assert!(Layers::parse("bogus").is_err());
    }
}
