//! JSON interchange formats. Graphs are `{"n": int, "edges": [[u,v],...]}`
//! with `u < v` sorted lexicographically; hosts are kind-tagged descriptors;
//! host vertices are encoded per kind (coordinate tuples, lamp strings with
//! a marker position, layered pairs, indices).

use crate::bounds::CutPullbackTrace;
use crate::error::{Error, Result};
use crate::geometry::{ModelSpace, PolylinePath, ThickEmbedding};
use crate::graphs::Graph;
use crate::hosts::{self, HostHandle, HostVertex};
use crate::wiring::{Walk, Wiring};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::Json(format!("missing field '{name}' in {v}")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::Json(format!("{what} must be a nonnegative integer, got {v}")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::Json(format!("{what} must be an integer, got {v}")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Json(format!("{what} must be a number, got {v}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Json(format!("{what} must be an array, got {v}")))
}

pub fn graph_to_value(g: &Graph) -> Value {
    json!({
        "n": g.vertex_count(),
        "edges": g.edges().iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>(),
    })
}

pub fn graph_from_value(v: &Value) -> Result<Graph> {
    let n = as_u64(field(v, "n")?, "n")? as usize;
    let mut edges = Vec::new();
    for e in as_array(field(v, "edges")?, "edges")? {
        let pair = as_array(e, "edge")?;
        if pair.len() != 2 {
            return Err(Error::Json(format!("edge must be a pair, got {e}")));
        }
        edges.push((
            as_u64(&pair[0], "endpoint")? as u32,
            as_u64(&pair[1], "endpoint")? as u32,
        ));
    }
    Graph::new(n, &edges)
}

pub fn host_to_value(h: &HostHandle) -> Value {
    match h {
        HostHandle::Grid { dim, side } => json!({"kind": "grid", "n": dim, "r": side}),
        HostHandle::Lamplighter { k } => json!({"kind": "lamplighter", "k": k}),
        HostHandle::Z2Box { side } => json!({"kind": "z2box", "m": side}),
        HostHandle::Thickened { base, t } => {
            json!({"kind": "thickened", "base": host_to_value(base), "t": t})
        }
        HostHandle::Explicit(_) => {
            let g = h.explicit_graph().unwrap();
            json!({"kind": "explicit", "graph": graph_to_value(g)})
        }
    }
}

pub fn host_from_value(v: &Value) -> Result<HostHandle> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Json("host kind must be a string".into()))?;
    match kind {
        "grid" => hosts::grid(
            as_u64(field(v, "n")?, "n")? as usize,
            as_i64(field(v, "r")?, "r")?,
        ),
        "lamplighter" => hosts::lamplighter_ball(as_u64(field(v, "k")?, "k")? as usize),
        "z2box" => hosts::z2_box(as_i64(field(v, "m")?, "m")?),
        "thickened" => hosts::thicken(
            host_from_value(field(v, "base")?)?,
            as_u64(field(v, "t")?, "t")? as u32,
        ),
        "explicit" => Ok(hosts::explicit(graph_from_value(field(v, "graph")?)?)),
        other => Err(Error::Json(format!("unknown host kind '{other}'"))),
    }
}

pub fn host_vertex_to_value(hv: &HostVertex) -> Value {
    match hv {
        HostVertex::Grid(coords) => Value::Array(coords.iter().map(|&c| json!(c)).collect()),
        HostVertex::Lamp { lamps, pos } => {
            let bits: String = lamps.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
            json!({"lamps": bits, "pos": pos})
        }
        HostVertex::Thick { base, layer } => {
            json!({"base": host_vertex_to_value(base), "layer": layer})
        }
        HostVertex::Explicit(i) => json!(i),
    }
}

pub fn host_vertex_from_value(v: &Value) -> Result<HostVertex> {
    match v {
        Value::Number(_) => Ok(HostVertex::Explicit(as_u64(v, "vertex index")? as u32)),
        Value::Array(coords) => {
            let mut out = Vec::with_capacity(coords.len());
            for c in coords {
                out.push(as_i64(c, "coordinate")? as i32);
            }
            Ok(HostVertex::grid(&out))
        }
        Value::Object(map) => {
            if map.contains_key("lamps") {
                let bits = map["lamps"]
                    .as_str()
                    .ok_or_else(|| Error::Json("lamps must be a 0/1 string".into()))?;
                let lamps: Vec<u8> = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0u8),
                        '1' => Ok(1u8),
                        other => Err(Error::Json(format!("bad lamp digit '{other}'"))),
                    })
                    .collect::<Result<_>>()?;
                let pos = as_u64(field(v, "pos")?, "pos")? as u16;
                Ok(HostVertex::lamp(&lamps, pos))
            } else if map.contains_key("base") {
                Ok(HostVertex::thick(
                    host_vertex_from_value(&map["base"])?,
                    as_u64(field(v, "layer")?, "layer")? as u32,
                ))
            } else {
                Err(Error::Json(format!("unrecognized host vertex {v}")))
            }
        }
        other => Err(Error::Json(format!("unrecognized host vertex {other}"))),
    }
}

fn edge_key(u: u32, v: u32) -> String {
    format!("{u}-{v}")
}

fn parse_edge_key(key: &str) -> Result<(u32, u32)> {
    let (u, v) = key
        .split_once('-')
        .ok_or_else(|| Error::Json(format!("bad edge key '{key}'")))?;
    Ok((
        u.parse().map_err(|_| Error::Json(format!("bad edge key '{key}'")))?,
        v.parse().map_err(|_| Error::Json(format!("bad edge key '{key}'")))?,
    ))
}

pub fn wiring_to_value(w: &Wiring) -> Value {
    let mut walks = Map::new();
    for (&(u, v), walk) in &w.edge_walks {
        walks.insert(
            edge_key(u, v),
            Value::Array(walk.vertices().iter().map(host_vertex_to_value).collect()),
        );
    }
    json!({
        "domain": graph_to_value(&w.domain),
        "host": host_to_value(&w.host),
        "vertex_map": w.vertex_map.iter().map(host_vertex_to_value).collect::<Vec<_>>(),
        "walks": Value::Object(walks),
    })
}

pub fn wiring_from_value(v: &Value) -> Result<Wiring> {
    let domain = graph_from_value(field(v, "domain")?)?;
    let host = host_from_value(field(v, "host")?)?;
    let vertex_map = as_array(field(v, "vertex_map")?, "vertex_map")?
        .iter()
        .map(host_vertex_from_value)
        .collect::<Result<Vec<_>>>()?;
    let mut edge_walks = BTreeMap::new();
    let walks = field(v, "walks")?
        .as_object()
        .ok_or_else(|| Error::Json("walks must be an object".into()))?;
    for (key, val) in walks {
        let (u, vv) = parse_edge_key(key)?;
        let vertices = as_array(val, "walk")?
            .iter()
            .map(host_vertex_from_value)
            .collect::<Result<Vec<_>>>()?;
        edge_walks.insert((u, vv), Walk::new(vertices)?);
    }
    Wiring::new(domain, host, vertex_map, edge_walks)
}

pub fn space_to_value(s: &ModelSpace) -> Value {
    match s {
        ModelSpace::EuclideanL2(n) => json!({"kind": "euclidean_l2", "dim": n}),
        ModelSpace::EuclideanLinf(n) => json!({"kind": "euclidean_linf", "dim": n}),
        ModelSpace::HalfSpace(n) => json!({"kind": "half_space", "dim": n}),
        ModelSpace::ProductL2(fs) => {
            json!({"kind": "product_l2", "factors": fs.iter().map(space_to_value).collect::<Vec<_>>()})
        }
        ModelSpace::ProductMax(fs) => {
            json!({"kind": "product_max", "factors": fs.iter().map(space_to_value).collect::<Vec<_>>()})
        }
    }
}

pub fn space_from_value(v: &Value) -> Result<ModelSpace> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Json("space kind must be a string".into()))?;
    let factors = |v: &Value| -> Result<Vec<ModelSpace>> {
        as_array(field(v, "factors")?, "factors")?
            .iter()
            .map(space_from_value)
            .collect()
    };
    Ok(match kind {
        "euclidean_l2" => ModelSpace::EuclideanL2(as_u64(field(v, "dim")?, "dim")? as usize),
        "euclidean_linf" => ModelSpace::EuclideanLinf(as_u64(field(v, "dim")?, "dim")? as usize),
        "half_space" => ModelSpace::HalfSpace(as_u64(field(v, "dim")?, "dim")? as usize),
        "product_l2" => ModelSpace::ProductL2(factors(v)?),
        "product_max" => ModelSpace::ProductMax(factors(v)?),
        other => return Err(Error::Json(format!("unknown space kind '{other}'"))),
    })
}

fn point_to_value(p: &[f64]) -> Value {
    Value::Array(p.iter().map(|&c| json!(c)).collect())
}

fn point_from_value(v: &Value) -> Result<Vec<f64>> {
    as_array(v, "point")?.iter().map(|c| as_f64(c, "coordinate")).collect()
}

pub fn embedding_to_value(e: &ThickEmbedding) -> Value {
    let mut paths = Map::new();
    for (&(u, v), path) in &e.edge_paths {
        paths.insert(
            edge_key(u, v),
            Value::Array(path.points.iter().map(|p| point_to_value(p)).collect()),
        );
    }
    json!({
        "space": space_to_value(&e.space),
        "graph": graph_to_value(&e.graph),
        "vertices": e.vertex_points.iter().map(|p| point_to_value(p)).collect::<Vec<_>>(),
        "paths": Value::Object(paths),
    })
}

pub fn embedding_from_value(v: &Value) -> Result<ThickEmbedding> {
    let space = space_from_value(field(v, "space")?)?;
    let graph = graph_from_value(field(v, "graph")?)?;
    let vertex_points = as_array(field(v, "vertices")?, "vertices")?
        .iter()
        .map(point_from_value)
        .collect::<Result<Vec<_>>>()?;
    let mut edge_paths = BTreeMap::new();
    let paths = field(v, "paths")?
        .as_object()
        .ok_or_else(|| Error::Json("paths must be an object".into()))?;
    for (key, val) in paths {
        let (u, vv) = parse_edge_key(key)?;
        let points = as_array(val, "path")?
            .iter()
            .map(point_from_value)
            .collect::<Result<Vec<_>>>()?;
        edge_paths.insert((u, vv), PolylinePath::new(points));
    }
    ThickEmbedding::new(graph, space, vertex_points, edge_paths)
}

pub fn trace_to_value(t: &CutPullbackTrace) -> Value {
    json!({
        "levels": t.levels.iter().map(|l| json!({
            "subgraph_size": l.subgraph_size,
            "cut": l.cut.iter().map(host_vertex_to_value).collect::<Vec<_>>(),
            "is_minimum": l.is_minimum,
        })).collect::<Vec<_>>(),
        "union_cut": t.union_cut.iter().map(host_vertex_to_value).collect::<Vec<_>>(),
        "domain_cut": t.domain_cut,
        "host_max_degree": t.host_max_degree,
        "k": t.k,
        "lhs": t.lhs,
        "rhs": t.rhs,
        "all_cuts_minimum": t.all_cuts_minimum,
        "domain_is_cut": t.domain_is_cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{diagonal_wiring_z2, lamplighter_wiring};
    use crate::geometry::{complete_h2_slab_embedding, complete_slab_embedding, slab_to_h3};
    use crate::wiring::verify_coarse_wiring;
    use proptest::prelude::*;

    #[test]
    fn graph_round_trip_shape() {
        let g = Graph::new(4, &[(2, 1), (0, 3)]).unwrap();
        let v = graph_to_value(&g);
        assert_eq!(v["edges"][0], json!([0, 3]));
        let back = graph_from_value(&v).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn wiring_round_trip_identical_report() {
        for w in [
            diagonal_wiring_z2(&Graph::complete(4)).unwrap(),
            lamplighter_wiring(&Graph::cycle(5)).unwrap(),
        ] {
            let v = wiring_to_value(&w);
            let back = wiring_from_value(&v).unwrap();
            assert_eq!(
                verify_coarse_wiring(&w).unwrap(),
                verify_coarse_wiring(&back).unwrap()
            );
            assert_eq!(wiring_to_value(&back), v);
        }
    }

    #[test]
    fn embedding_round_trip_is_lossless() {
        for e in [
            complete_slab_embedding(4).unwrap(),
            slab_to_h3(&complete_slab_embedding(3).unwrap()).unwrap(),
            complete_h2_slab_embedding(3).unwrap(),
        ] {
            let v = embedding_to_value(&e);
            let back = embedding_from_value(&v).unwrap();
            assert_eq!(back, e);
        }
    }

    #[test]
    fn host_vertex_encodings() {
        let cases = vec![
            HostVertex::grid(&[3, 0, 7]),
            HostVertex::lamp(&[0, 1, 1, 0], 2),
            HostVertex::thick(HostVertex::grid(&[1, 2]), 4),
            HostVertex::Explicit(9),
        ];
        for hv in cases {
            let v = host_vertex_to_value(&hv);
            assert_eq!(host_vertex_from_value(&v).unwrap(), hv);
        }
        let lamp = host_vertex_to_value(&HostVertex::lamp(&[0, 1], 1));
        assert_eq!(lamp["lamps"], json!("01"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(graph_from_value(&json!({"n": 2, "edges": [[0, 0]]})).is_err());
        assert!(host_from_value(&json!({"kind": "weird"})).is_err());
        assert!(host_vertex_from_value(&json!({"what": 1})).is_err());
    }

    proptest! {
        #[test]
        fn graph_json_round_trips(n in 1usize..12, edges in proptest::collection::vec((0u32..12, 0u32..12), 0..30)) {
            let filtered: Vec<(u32, u32)> = edges
                .into_iter()
                .filter(|&(u, v)| u != v && (u as usize) < n && (v as usize) < n)
                .collect();
            let g = Graph::new(n, &filtered).unwrap();
            let v = graph_to_value(&g);
            prop_assert_eq!(graph_from_value(&v).unwrap(), g);
        }

        #[test]
        fn host_descriptor_round_trips(dim in 1usize..5, side in 1i64..50, k in 1usize..6, t in 1u32..5) {
            let hosts = vec![
                hosts::grid(dim, side).unwrap(),
                hosts::lamplighter_ball(k).unwrap(),
                hosts::z2_box(side).unwrap(),
                hosts::thicken(hosts::grid(dim, side).unwrap(), t).unwrap(),
            ];
            for h in hosts {
                let v = host_to_value(&h);
                let back = host_from_value(&v).unwrap();
                prop_assert_eq!(host_to_value(&back), v);
            }
        }
    }
}
