//! The coarse-wiring calculus: wirings as vertex maps plus edge walks,
//! verification of multiplicities, volume and diameter, composition,
//! injectivization into thickenings, and wirings induced by regular maps.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::hosts::{thicken, HostHandle, HostVertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// A walk in a host graph: a nonempty vertex sequence with consecutive
/// entries adjacent. A single-vertex sequence is the trivial walk; stationary
/// steps are forbidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    vertices: Vec<HostVertex>,
}

impl Walk {
    pub fn new(vertices: Vec<HostVertex>) -> Result<Walk> {
        if vertices.is_empty() {
            return Err(Error::structural("walk must be nonempty"));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::structural("walk has a stationary step"));
        }
        Ok(Walk { vertices })
    }

    pub fn trivial(v: HostVertex) -> Walk {
        Walk { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[HostVertex] {
        &self.vertices
    }

    pub fn first(&self) -> &HostVertex {
        self.vertices.first().unwrap()
    }

    pub fn last(&self) -> &HostVertex {
        self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn reversed(&self) -> Walk {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Walk { vertices }
    }
}

/// A wiring of a finite graph into a host: vertices map to host vertices,
/// each edge maps to a walk between the images of its endpoints.
#[derive(Debug, Clone)]
pub struct Wiring {
    pub domain: Graph,
    pub host: HostHandle,
    pub vertex_map: Vec<HostVertex>,
    pub edge_walks: BTreeMap<(u32, u32), Walk>,
}

impl Wiring {
    /// Builds and structurally validates a wiring. Walks are normalized to
    /// start at the image of the smaller endpoint.
    pub fn new(
        domain: Graph,
        host: HostHandle,
        vertex_map: Vec<HostVertex>,
        edge_walks: BTreeMap<(u32, u32), Walk>,
    ) -> Result<Wiring> {
        let mut w = Wiring {
            domain,
            host,
            vertex_map,
            edge_walks,
        };
        w.normalize()?;
        w.validate()?;
        Ok(w)
    }

    /// Orients each walk to start at the image of its edge's smaller
    /// endpoint. Idempotent.
    pub fn normalize(&mut self) -> Result<()> {
        for (&(u, v), walk) in self.edge_walks.iter_mut() {
            let iu = self
                .vertex_map
                .get(u as usize)
                .ok_or_else(|| Error::structural(format!("no image for vertex {u}")))?;
            let iv = self
                .vertex_map
                .get(v as usize)
                .ok_or_else(|| Error::structural(format!("no image for vertex {v}")))?;
            if walk.first() == iu && walk.last() == iv {
                continue;
            }
            if walk.first() == iv && walk.last() == iu {
                *walk = walk.reversed();
                continue;
            }
            return Err(Error::structural(format!(
                "walk for edge ({u},{v}) does not connect the endpoint images"
            )));
        }
        Ok(())
    }

    /// Structural checks: every image vertex lies in the host, every edge has
    /// a walk with matching endpoints, and consecutive walk entries are
    /// host-adjacent.
    pub fn validate(&self) -> Result<()> {
        if self.vertex_map.len() != self.domain.vertex_count() {
            return Err(Error::structural(format!(
                "vertex map has {} entries for {} vertices",
                self.vertex_map.len(),
                self.domain.vertex_count()
            )));
        }
        for (v, image) in self.vertex_map.iter().enumerate() {
            if !self.host.contains(image) {
                return Err(Error::structural(format!(
                    "image of vertex {v} is not a host vertex"
                )));
            }
        }
        for &(u, v) in self.domain.edges() {
            let walk = self
                .edge_walks
                .get(&(u, v))
                .ok_or_else(|| Error::structural(format!("edge ({u},{v}) has no walk")))?;
            let iu = &self.vertex_map[u as usize];
            let iv = &self.vertex_map[v as usize];
            let fwd = walk.first() == iu && walk.last() == iv;
            let rev = walk.first() == iv && walk.last() == iu;
            if !fwd && !rev {
                return Err(Error::structural(format!(
                    "walk for edge ({u},{v}) does not connect the endpoint images"
                )));
            }
            if walk.len() == 1 && iu != iv {
                return Err(Error::structural(format!(
                    "trivial walk for edge ({u},{v}) with distinct endpoint images"
                )));
            }
            for pair in walk.vertices().windows(2) {
                if !self.host.adjacent(&pair[0], &pair[1]) {
                    return Err(Error::structural(format!(
                        "walk for edge ({u},{v}) steps across a non-edge of the host"
                    )));
                }
            }
        }
        for &(u, v) in self.edge_walks.keys() {
            if !self.domain.has_edge(u, v) {
                return Err(Error::structural(format!(
                    "walk recorded for non-edge ({u},{v})"
                )));
            }
        }
        Ok(())
    }

    /// Distinct host vertices in the image: all vertex images plus all walk
    /// vertices, sorted.
    pub fn image_vertices(&self) -> Vec<HostVertex> {
        let mut set: HashSet<&HostVertex> = self.vertex_map.iter().collect();
        for walk in self.edge_walks.values() {
            set.extend(walk.vertices());
        }
        let mut out: Vec<HostVertex> = set.into_iter().cloned().collect();
        out.sort();
        out
    }

    /// The image subgraph: image vertices plus exactly the host edges
    /// traversed by walks. Returns the graph with its sorted host-vertex
    /// index.
    pub fn image_subgraph(&self) -> Result<(Graph, Vec<HostVertex>)> {
        let verts = self.image_vertices();
        let index: BTreeMap<&HostVertex, u32> =
            verts.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let mut edges = BTreeSet::new();
        for walk in self.edge_walks.values() {
            for pair in walk.vertices().windows(2) {
                let a = index[&pair[0]];
                let b = index[&pair[1]];
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let edges: Vec<(u32, u32)> = edges.into_iter().collect();
        Ok((Graph::new(verts.len(), &edges)?, verts))
    }
}

/// Measurements of a verified coarse wiring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiringReport {
    /// Largest preimage of a host vertex under the vertex map.
    pub max_vertex_multiplicity: usize,
    /// Largest number of distinct domain edges whose walks traverse a single
    /// host edge. A walk crossing the same host edge twice counts once.
    pub max_edge_multiplicity: usize,
    /// Minimal k for which this is a coarse k-wiring.
    pub k: usize,
    /// Number of distinct vertices in the image subgraph.
    pub volume: usize,
    /// Max over image-vertex pairs of shortest-path distance in the host
    /// (not in the image subgraph). `None` when some pair is unreachable.
    pub diameter: Option<u64>,
    /// Set when the host admits no path between some image vertices.
    pub disconnected: bool,
}

/// Verifies a wiring structurally and reports its exact minimal `k`,
/// volume, and diameter.
pub fn verify_coarse_wiring(w: &Wiring) -> Result<WiringReport> {
    w.validate()?;

    let mut vertex_counts: HashMap<&HostVertex, usize> = HashMap::new();
    for image in &w.vertex_map {
        *vertex_counts.entry(image).or_insert(0) += 1;
    }
    let max_vertex_multiplicity = vertex_counts.values().copied().max().unwrap_or(0);

    let mut edge_counts: HashMap<(&HostVertex, &HostVertex), usize> = HashMap::new();
    let mut walk_edges: HashSet<(&HostVertex, &HostVertex)> = HashSet::new();
    for walk in w.edge_walks.values() {
        walk_edges.clear();
        for pair in walk.vertices().windows(2) {
            let key = if pair[0] <= pair[1] {
                (&pair[0], &pair[1])
            } else {
                (&pair[1], &pair[0])
            };
            walk_edges.insert(key);
        }
        for key in walk_edges.drain() {
            *edge_counts.entry(key).or_insert(0) += 1;
        }
    }
    let max_edge_multiplicity = edge_counts.values().copied().max().unwrap_or(0);

    let image = w.image_vertices();
    let volume = image.len();
    let diameter = w.host.diameter_of(&image)?;

    Ok(WiringReport {
        max_vertex_multiplicity,
        max_edge_multiplicity,
        k: max_vertex_multiplicity.max(max_edge_multiplicity),
        volume,
        diameter,
        disconnected: diameter.is_none() && volume > 0,
    })
}

/// The identity wiring of a graph into itself (as an explicit host).
pub fn identity_wiring(g: &Graph) -> Wiring {
    let host = crate::hosts::explicit(g.clone());
    let vertex_map: Vec<HostVertex> = (0..g.vertex_count() as u32)
        .map(HostVertex::Explicit)
        .collect();
    let edge_walks = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (
                (u, v),
                Walk {
                    vertices: vec![HostVertex::Explicit(u), HostVertex::Explicit(v)],
                },
            )
        })
        .collect();
    Wiring {
        domain: g.clone(),
        host,
        vertex_map,
        edge_walks,
    }
}

/// Composes two wirings: `w1` of Γ into Y, `w2` of (a supergraph of) the
/// image of `w1` into Z. `w2_vertices[i]` names the Y-host vertex that
/// `w2`'s domain index `i` stands for.
pub fn compose(w1: &Wiring, w2: &Wiring, w2_vertices: &[HostVertex]) -> Result<Wiring> {
    if w2_vertices.len() != w2.domain.vertex_count() {
        return Err(Error::structural(
            "w2 vertex labels do not match its domain size",
        ));
    }
    let index: BTreeMap<&HostVertex, u32> = w2_vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v, i as u32))
        .collect();

    let lookup = |v: &HostVertex| -> Result<u32> {
        index
            .get(v)
            .copied()
            .ok_or_else(|| Error::structural("w2 is undefined on an image vertex of w1"))
    };

    let vertex_map: Vec<HostVertex> = w1
        .vertex_map
        .iter()
        .map(|v| Ok(w2.vertex_map[lookup(v)? as usize].clone()))
        .collect::<Result<_>>()?;

    let mut edge_walks = BTreeMap::new();
    for (&(u, v), walk) in &w1.edge_walks {
        let mut out: Vec<HostVertex> = vec![vertex_map[u as usize].clone()];
        for pair in walk.vertices().windows(2) {
            let a = lookup(&pair[0])?;
            let b = lookup(&pair[1])?;
            let (key, forward) = if a < b { ((a, b), true) } else { ((b, a), false) };
            let inner = w2
                .edge_walks
                .get(&key)
                .ok_or_else(|| Error::structural("w2 is undefined on an image edge of w1"))?;
            let seq: Vec<&HostVertex> = if forward {
                inner.vertices().iter().collect()
            } else {
                inner.vertices().iter().rev().collect()
            };
            for step in &seq[1..] {
                if out.last() != Some(step) {
                    out.push((*step).clone());
                }
            }
        }
        edge_walks.insert((u, v), Walk { vertices: out });
    }

    Wiring::new(w1.domain.clone(), w2.host.clone(), vertex_map, edge_walks)
}

/// Detailed injectivity check: the vertex map is injective, walks repeat no
/// vertex, and walk interiors avoid all vertex images and all other walks.
pub fn is_injective_wiring(w: &Wiring) -> bool {
    let mut images: HashSet<&HostVertex> = HashSet::new();
    for v in &w.vertex_map {
        if !images.insert(v) {
            return false;
        }
    }
    let mut interior_seen: HashSet<&HostVertex> = HashSet::new();
    for walk in w.edge_walks.values() {
        let verts = walk.vertices();
        if verts.len() == 1 {
            // a degenerate arc between coincident images is not injective
            return false;
        }
        let mut within: HashSet<&HostVertex> = HashSet::new();
        for x in verts {
            if !within.insert(x) {
                return false;
            }
        }
        for x in &verts[1..verts.len() - 1] {
            if images.contains(x) {
                return false;
            }
            if !interior_seen.insert(x) {
                return false;
            }
        }
    }
    // walk endpoints are vertex images by validity, and interiors avoid all
    // vertex images, so cross-walk contact can only happen at shared images.
    true
}

/// Rebuilds a coarse `k`-wiring of a graph with maximal degree at most `d`
/// as an injective wiring into the `T = k(d+1)`-thickening of the host.
///
/// Vertex copies occupy layers `1..=k`; the `i`-th prior interior occurrence
/// of a host vertex is lifted to layer `i + k + 1`.
pub fn make_injective(w: &Wiring, d: usize, k: usize) -> Result<Wiring> {
    let deg = w.domain.max_degree();
    if deg > d {
        return Err(Error::validation(format!(
            "domain max degree {deg} exceeds stated bound {d}"
        )));
    }
    let report = verify_coarse_wiring(w)?;
    if report.k > k {
        return Err(Error::validation(format!(
            "wiring is a coarse {}-wiring, stated bound k = {k} is too small",
            report.k
        )));
    }
    let t = (k * (d + 1)) as u32;
    let thick_host = thicken(w.host.clone(), t)?;

    // copy layers: preimages of each host vertex in domain-vertex order
    let mut copy_layer = vec![0u32; w.domain.vertex_count()];
    let mut seen: HashMap<&HostVertex, u32> = HashMap::new();
    for (v, image) in w.vertex_map.iter().enumerate() {
        let slot = seen.entry(image).or_insert(0);
        *slot += 1;
        copy_layer[v] = *slot;
    }

    let vertex_map: Vec<HostVertex> = w
        .vertex_map
        .iter()
        .zip(&copy_layer)
        .map(|(image, &l)| HostVertex::thick(image.clone(), l))
        .collect();

    let mut interior_count: HashMap<HostVertex, u32> = HashMap::new();
    let mut edge_walks = BTreeMap::new();
    for (&(u, v), walk) in &w.edge_walks {
        let iu = &w.vertex_map[u as usize];
        let iv = &w.vertex_map[v as usize];
        if iu == iv {
            // fiber edge between the two copies
            let lifted = vec![
                HostVertex::thick(iu.clone(), copy_layer[u as usize]),
                HostVertex::thick(iv.clone(), copy_layer[v as usize]),
            ];
            edge_walks.insert((u, v), Walk { vertices: lifted });
            continue;
        }
        let verts = walk.vertices();
        let mut lifted = Vec::with_capacity(verts.len());
        lifted.push(HostVertex::thick(verts[0].clone(), copy_layer[u as usize]));
        for x in &verts[1..verts.len() - 1] {
            let n = interior_count.entry(x.clone()).or_insert(0);
            let layer = *n + k as u32 + 1;
            if layer > t {
                return Err(Error::structural(format!(
                    "interior occurrences of {x:?} exceed the thickening T = {t}"
                )));
            }
            lifted.push(HostVertex::thick(x.clone(), layer));
            *n += 1;
        }
        lifted.push(HostVertex::thick(
            verts[verts.len() - 1].clone(),
            copy_layer[v as usize],
        ));
        edge_walks.insert((u, v), Walk { vertices: lifted });
    }

    Wiring::new(w.domain.clone(), thick_host, vertex_map, edge_walks)
}

/// Builds the wiring induced by a κ-regular vertex map: each edge is routed
/// along a shortest host path (lexicographic tie-break).
///
/// Per-instance regularity checks: adjacent vertices map at host distance at
/// most `2κ`, and no host vertex has more than `κ(1+Δ)` preimages.
pub fn wiring_from_regular_map(
    domain: &Graph,
    host: &HostHandle,
    map: &[HostVertex],
    kappa: usize,
) -> Result<Wiring> {
    if map.len() != domain.vertex_count() {
        return Err(Error::validation(format!(
            "map has {} entries for {} vertices",
            map.len(),
            domain.vertex_count()
        )));
    }
    for (v, image) in map.iter().enumerate() {
        if !host.contains(image) {
            return Err(Error::validation(format!(
                "image of vertex {v} is not a host vertex"
            )));
        }
    }
    let delta = domain.max_degree().max(host.degree_bound());

    let mut counts: HashMap<&HostVertex, usize> = HashMap::new();
    for image in map {
        *counts.entry(image).or_insert(0) += 1;
    }
    let bound = kappa * (1 + delta);
    if let Some((image, &c)) = counts.iter().find(|(_, &c)| c > bound) {
        return Err(Error::validation(format!(
            "map is {c}-to-one at {image:?}, exceeding κ(1+Δ) = {bound}"
        )));
    }

    let mut edge_walks = BTreeMap::new();
    for &(u, v) in domain.edges() {
        let iu = &map[u as usize];
        let iv = &map[v as usize];
        let dist = host.distance(iu, iv)?.ok_or_else(|| {
            Error::validation(format!(
                "images of edge ({u},{v}) lie in different host components"
            ))
        })?;
        if dist > 2 * kappa as u64 {
            return Err(Error::validation(format!(
                "edge ({u},{v}): images at host distance {dist} > 2κ = {}",
                2 * kappa
            )));
        }
        let path = if iu == iv {
            vec![iu.clone()]
        } else {
            host.shortest_path(iu, iv)?.expect("distance was finite")
        };
        edge_walks.insert((u, v), Walk { vertices: path });
    }

    let wiring = Wiring::new(domain.clone(), host.clone(), map.to_vec(), edge_walks)?;
    if delta > 0 {
        let report = verify_coarse_wiring(&wiring)?;
        let vol_bound = (2 * kappa + 1) * delta * domain.vertex_count();
        if 2 * report.volume > vol_bound {
            return Err(Error::structural(format!(
                "routed volume {} exceeds (κ+1/2)Δn = {}",
                report.volume,
                vol_bound as f64 / 2.0
            )));
        }
    }
    Ok(wiring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs;
    use crate::hosts;

    #[test]
    fn identity_wiring_reports() {
        for g in [Graph::complete(4), Graph::path(5), Graph::cycle(6)] {
            let w = identity_wiring(&g);
            let report = verify_coarse_wiring(&w).unwrap();
            assert_eq!(report.k, 1);
            assert_eq!(report.volume, g.vertex_count());
            assert_eq!(report.diameter, g.diameter().map(u64::from));
        }
    }

    #[test]
    fn skipping_a_non_edge_is_structural_error() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let host = hosts::grid(2, 3).unwrap();
        let vm = vec![HostVertex::grid(&[0, 0]), HostVertex::grid(&[2, 0])];
        let walk = Walk {
            vertices: vec![HostVertex::grid(&[0, 0]), HostVertex::grid(&[2, 0])],
        };
        let mut walks = BTreeMap::new();
        walks.insert((0, 1), walk);
        let err = Wiring::new(g, host, vm, walks).unwrap_err();
        assert!(err.to_string().contains("non-edge"));
    }

    #[test]
    fn endpoint_mismatch_is_structural_error() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let host = hosts::grid(1, 4).unwrap();
        let vm = vec![HostVertex::grid(&[0]), HostVertex::grid(&[3])];
        let walk = Walk {
            vertices: vec![HostVertex::grid(&[0]), HostVertex::grid(&[1])],
        };
        let mut walks = BTreeMap::new();
        walks.insert((0, 1), walk);
        assert!(Wiring::new(g, host, vm, walks).is_err());
    }

    fn diagonal_k3() -> Wiring {
        crate::construct::diagonal_wiring_z2(&Graph::complete(3)).unwrap()
    }

    #[test]
    fn diagonal_k3_measurements() {
        let w = diagonal_k3();
        let report = verify_coarse_wiring(&w).unwrap();
        assert_eq!(report.volume, 6);
        assert_eq!(report.max_edge_multiplicity, 2);
    }

    #[test]
    fn verify_is_idempotent_after_normalize() {
        let mut w = diagonal_k3();
        let before = verify_coarse_wiring(&w).unwrap();
        w.normalize().unwrap();
        w.normalize().unwrap();
        let after = verify_coarse_wiring(&w).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn compose_with_identity_of_image() {
        let w = diagonal_k3();
        let set: std::collections::BTreeSet<HostVertex> = w.image_vertices().into_iter().collect();
        let (image_graph, verts) = w.host.materialize(&set).unwrap();
        let id = identity_wiring(&image_graph);
        let composed = compose(&w, &id, &verts).unwrap();
        let r1 = verify_coarse_wiring(&w).unwrap();
        let r2 = verify_coarse_wiring(&composed).unwrap();
        assert_eq!(r1.k, r2.k);
        assert_eq!(r1.volume, r2.volume);
    }

    #[test]
    fn compose_missing_labels_errors() {
        let w = diagonal_k3();
        let set: std::collections::BTreeSet<HostVertex> = w.image_vertices().into_iter().collect();
        let (image_graph, verts) = w.host.materialize(&set).unwrap();
        let id = identity_wiring(&image_graph);
        let mut bad = verts.clone();
        bad[0] = HostVertex::grid(&[2, 0]);
        bad[1] = HostVertex::grid(&[2, 0]);
        assert!(compose(&w, &id, &bad).is_err());
    }

    /// Builds the halving regular-map wiring from the image of `w` (inside a
    /// plane box) into the half-size box, with its domain labels.
    fn halving_step(w: &Wiring) -> (Wiring, Vec<HostVertex>) {
        let set: std::collections::BTreeSet<HostVertex> = w.image_vertices().into_iter().collect();
        let (image_graph, verts) = w.host.materialize(&set).unwrap();
        let side = match &w.host {
            HostHandle::Z2Box { side } => *side,
            HostHandle::Grid { side, .. } => *side,
            _ => panic!("expected a box host"),
        };
        let half = hosts::z2_box((side + 1) / 2).unwrap();
        let map: Vec<HostVertex> = verts
            .iter()
            .map(|hv| match hv {
                HostVertex::Grid(c) => HostVertex::grid(&[c[0] / 2, c[1] / 2]),
                _ => unreachable!(),
            })
            .collect();
        let wiring = wiring_from_regular_map(&image_graph, &half, &map, 1).unwrap();
        (wiring, verts)
    }

    #[test]
    fn compose_bound_and_associativity() {
        let g = Graph::complete(4);
        let a = crate::construct::diagonal_wiring_z2(&g).unwrap();
        let (b, b_verts) = halving_step(&a);
        let ab = compose(&a, &b, &b_verts).unwrap();
        let (c, c_verts) = halving_step(&ab);

        let ra = verify_coarse_wiring(&a).unwrap();
        let rb = verify_coarse_wiring(&b).unwrap();
        let rc = verify_coarse_wiring(&c).unwrap();
        let rab = verify_coarse_wiring(&ab).unwrap();
        assert!(rab.k <= ra.k * rb.k);
        assert!(rab.volume <= rb.volume);

        let left = compose(&ab, &c, &c_verts).unwrap();
        let bc = compose(&b, &c, &c_verts).unwrap();
        let right = compose(&a, &bc, &b_verts).unwrap();
        let rl = verify_coarse_wiring(&left).unwrap();
        let rr = verify_coarse_wiring(&right).unwrap();
        assert_eq!(rl, rr);
        assert!(rl.k <= ra.k * rb.k * rc.k);
    }

    #[test]
    fn regular_map_halving() {
        let g4 = hosts::grid(2, 4).unwrap();
        let all = g4.enumerate_all(100).unwrap();
        let set: std::collections::BTreeSet<HostVertex> = all.iter().cloned().collect();
        let (domain, verts) = g4.materialize(&set).unwrap();
        let half = hosts::z2_box(2).unwrap();
        let map: Vec<HostVertex> = verts
            .iter()
            .map(|hv| match hv {
                HostVertex::Grid(c) => HostVertex::grid(&[c[0] / 2, c[1] / 2]),
                _ => unreachable!(),
            })
            .collect();
        let w = wiring_from_regular_map(&domain, &half, &map, 1).unwrap();
        for walk in w.edge_walks.values() {
            assert!(walk.len() <= 3); // at most 2κ+1 vertices per path
        }
        verify_coarse_wiring(&w).unwrap();

        let idw = wiring_from_regular_map(&domain, &g4, &verts, 1).unwrap();
        let r = verify_coarse_wiring(&idw).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.volume, 16);
    }

    #[test]
    fn regular_map_rejects_stretched_edges() {
        let domain = Graph::new(2, &[(0, 1)]).unwrap();
        let host = hosts::grid(1, 10).unwrap();
        let map = vec![HostVertex::grid(&[0]), HostVertex::grid(&[5])];
        let err = wiring_from_regular_map(&domain, &host, &map, 1).unwrap_err();
        assert!(err.to_string().contains("distance"));
    }

    #[test]
    fn make_injective_on_a_crowded_wiring() {
        // wire K_4 onto a 2-vertex path to force multiplicity
        let g = Graph::complete(4);
        let host = hosts::grid(1, 4).unwrap();
        let vm: Vec<HostVertex> = vec![
            HostVertex::grid(&[0]),
            HostVertex::grid(&[1]),
            HostVertex::grid(&[0]),
            HostVertex::grid(&[1]),
        ];
        let mut walks = BTreeMap::new();
        for &(u, v) in g.edges() {
            let iu = vm[u as usize].clone();
            let iv = vm[v as usize].clone();
            let walk = if iu == iv {
                Walk::trivial(iu)
            } else {
                Walk {
                    vertices: vec![iu, iv],
                }
            };
            walks.insert((u, v), walk);
        }
        let w = Wiring::new(g, host, vm, walks).unwrap();
        let report = verify_coarse_wiring(&w).unwrap();
        assert!(!is_injective_wiring(&w));

        let inj = make_injective(&w, 3, report.k).unwrap();
        assert!(is_injective_wiring(&inj));
        let inj_report = verify_coarse_wiring(&inj).unwrap();
        let t = report.k * 4;
        assert!(inj_report.volume <= t * report.volume);
        assert!(inj_report.diameter.unwrap() <= report.diameter.unwrap() + 2);
    }

    #[test]
    fn make_injective_keeps_injective_wirings_injective() {
        let g = Graph::cycle(5);
        let w = identity_wiring(&g);
        let inj = make_injective(&w, 2, 1).unwrap();
        assert!(is_injective_wiring(&inj));
        let r = verify_coarse_wiring(&inj).unwrap();
        assert!(r.volume <= 3 * g.vertex_count()); // T = k(d+1) = 3
    }

    #[test]
    fn make_injective_rejects_bad_parameters() {
        let g = Graph::complete(4);
        let w = identity_wiring(&g);
        assert!(make_injective(&w, 2, 1).is_err()); // degree above d
        let w2 = diagonal_k3();
        let r = verify_coarse_wiring(&w2).unwrap();
        assert!(make_injective(&w2, 2, r.k - 1).is_err()); // k too small
    }

    #[test]
    fn volume_and_diameter_dominate_vertex_images() {
        for g in [Graph::complete(5), Graph::path(6)] {
            let w = crate::construct::diagonal_wiring_z2(&g).unwrap();
            let report = verify_coarse_wiring(&w).unwrap();
            let images: std::collections::BTreeSet<HostVertex> =
                w.vertex_map.iter().cloned().collect();
            let images: Vec<HostVertex> = images.into_iter().collect();
            assert!(report.volume >= images.len());
            let image_diam = w.host.diameter_of(&images).unwrap().unwrap();
            assert!(report.diameter.unwrap() >= image_diam);
        }
    }

    #[test]
    fn random_regular_identity_reports_are_exact() {
        let g = graphs::random_regular(10, 3, 5).unwrap();
        let w = identity_wiring(&g);
        let r = verify_coarse_wiring(&w).unwrap();
        assert_eq!(r.max_vertex_multiplicity, 1);
        assert_eq!(r.max_edge_multiplicity, 1);
    }
}
