//! JSON views of each pipeline stage. Coordinates are `[x, y]` pairs as in
//! instance files.

use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddedEdge, Embedding};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline};
use crate::skeleton::{ArcKind, NodeKind, StraightSkeleton};
use crate::sss::{Cell, EdgeTag, PartitionResult, SplitSkeleton};
use crate::validate::ValidationReport;

type Xy = [f64; 2];

fn xy(p: Point) -> Xy {
    [p.x, p.y]
}

fn ring(ps: &[Point]) -> Vec<Xy> {
    ps.iter().copied().map(xy).collect()
}

#[derive(Serialize)]
struct NodeView {
    id: usize,
    kind: NodeKind,
    point: Xy,
    time: f64,
}

#[derive(Serialize)]
struct ArcView {
    id: usize,
    kind: ArcKind,
    from: usize,
    to: usize,
    faces: [usize; 2],
}

#[derive(Serialize)]
struct FaceView {
    id: usize,
    boundary_edge: usize,
    node_ids: Vec<usize>,
    vertices: Vec<Xy>,
}

#[derive(Serialize)]
struct SkeletonView {
    degenerate: bool,
    nodes: Vec<NodeView>,
    arcs: Vec<ArcView>,
    faces: Vec<FaceView>,
}

fn skeleton_view(ss: &StraightSkeleton) -> SkeletonView {
    SkeletonView {
        degenerate: ss.degenerate,
        nodes: ss
            .nodes
            .iter()
            .map(|n| NodeView {
                id: n.id,
                kind: n.kind,
                point: xy(n.position),
                time: n.time,
            })
            .collect(),
        arcs: ss
            .arcs
            .iter()
            .map(|a| ArcView {
                id: a.id,
                kind: a.kind,
                from: a.endpoints.0,
                to: a.endpoints.1,
                faces: [a.faces.0, a.faces.1],
            })
            .collect(),
        faces: ss
            .faces
            .iter()
            .map(|f| FaceView {
                id: f.id,
                boundary_edge: f.boundary_edge,
                node_ids: f.node_ids.clone(),
                vertices: ring(&f.vertices),
            })
            .collect(),
    }
}

/// Nodes, arcs with their kind, and faces with their vertex lists.
pub fn skeleton_json(ss: &StraightSkeleton) -> String {
    to_json(&skeleton_view(ss))
}

#[derive(Serialize)]
struct SubfaceView {
    id: usize,
    parent_face: usize,
    region: Vec<Xy>,
    edge_tags: Vec<EdgeTag>,
}

#[derive(Serialize)]
struct SssView {
    splitting_segments: Vec<[Xy; 2]>,
    subfaces: Vec<SubfaceView>,
    face_subfaces: Vec<Vec<usize>>,
}

/// Splitting segments and the convex subfaces with edge tags.
pub fn sss_json(sss: &SplitSkeleton) -> String {
    let view = SssView {
        splitting_segments: sss
            .splitting_segments
            .iter()
            .map(|s| [xy(s.a), xy(s.b)])
            .collect(),
        subfaces: sss
            .subfaces
            .iter()
            .map(|f| SubfaceView {
                id: f.id,
                parent_face: f.parent_face,
                region: ring(&f.region),
                edge_tags: f.edge_tags.clone(),
            })
            .collect(),
        face_subfaces: sss.face_subfaces.clone(),
    };
    to_json(&view)
}

#[derive(Serialize)]
struct CellView {
    id: usize,
    region: Vec<Xy>,
    edge_tags: Vec<EdgeTag>,
    points: Vec<usize>,
}

fn cells(cs: &[Cell]) -> Vec<CellView> {
    cs.iter()
        .map(|c| CellView {
            id: c.face.id,
            region: ring(&c.face.region),
            edge_tags: c.face.edge_tags.clone(),
            points: c.points.clone(),
        })
        .collect()
}

#[derive(Serialize)]
struct PartitionView {
    q: usize,
    middle_point: Xy,
    dividing: [Xy; 2],
    left: Vec<CellView>,
    right: Vec<CellView>,
    left_count: usize,
    right_count: usize,
    chain: Option<Vec<Xy>>,
}

/// Both parts as tagged cells with their points, the dividing cut, the
/// interface chain and the root point q.
pub fn partition_json(p: &PartitionResult) -> String {
    let view = PartitionView {
        q: p.q,
        middle_point: xy(p.middle.point),
        dividing: [xy(p.dividing.a), xy(p.dividing.b)],
        left: cells(&p.scl),
        right: cells(&p.scr),
        left_count: p.left_count(),
        right_count: p.right_count(),
        chain: p.chain.as_ref().map(|c| ring(&c.vertices)),
    };
    to_json(&view)
}

#[derive(Serialize, Deserialize)]
struct EdgeView {
    parent: usize,
    child: usize,
    route: Vec<Xy>,
    #[serde(default)]
    bends: usize,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingView {
    node_point: Vec<usize>,
    edges: Vec<EdgeView>,
    #[serde(default)]
    max_bends: usize,
    #[serde(default)]
    total_bends: usize,
}

/// Point of each node and the route of each edge with its bend count.
pub fn embedding_json(e: &Embedding, eps: f64) -> String {
    let route = |r: &Polyline| ring(&r.vertices);
    let view = EmbeddingView {
        node_point: e.node_point.clone(),
        edges: e
            .edges
            .iter()
            .map(|x| EdgeView {
                parent: x.parent,
                child: x.child,
                route: route(&x.route),
                bends: x.route.bends(eps),
            })
            .collect(),
        max_bends: e.max_bends(eps),
        total_bends: e.total_bends(eps),
    };
    to_json(&view)
}

/// Reads an embedding written by [`embedding_json`]; bend counts in the file
/// are ignored.
pub fn parse_embedding(text: &str) -> Result<Embedding> {
    let view: EmbeddingView =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let edges = view
        .edges
        .into_iter()
        .map(|e| EmbeddedEdge {
            parent: e.parent,
            child: e.child,
            route: Polyline::new(e.route.into_iter().map(Point::from).collect()),
        })
        .collect();
    Ok(Embedding {
        node_point: view.node_point,
        edges,
        partition: None,
        backbones: Vec::new(),
    })
}

pub fn report_json(r: &ValidationReport) -> String {
    to_json(r)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("views serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SimplePolygon;
    use crate::skeleton::compute_straight_skeleton;

    #[test]
    fn rectangle_skeleton_json_lists_five_arcs() {
        let poly = SimplePolygon::new(vec![
            Point::new(0., 0.),
            Point::new(4., 0.),
            Point::new(4., 2.),
            Point::new(0., 2.),
        ])
        .unwrap();
        let ss = compute_straight_skeleton(&poly).unwrap();
        let v: serde_json::Value = serde_json::from_str(&skeleton_json(&ss)).unwrap();
        assert_eq!(v["arcs"].as_array().unwrap().len(), 5);
        assert_eq!(v["faces"].as_array().unwrap().len(), 4);
        assert_eq!(v["nodes"][0]["kind"], "POLYGON_VERTEX");
    }

    #[test]
    fn embedding_json_round_trips() {
        let inst = crate::io::generate_instance(7, 12, 3).unwrap();
        let e = crate::embed::embed(&inst.polygon, &inst.points, &inst.tree).unwrap();
        let text = embedding_json(&e, 1e-9);
        let back = parse_embedding(&text).unwrap();
        assert_eq!(back.node_point, e.node_point);
        assert_eq!(embedding_json(&back, 1e-9), text);
    }
}
