//! Implicit and explicit host graphs: lattice grids, lamplighter balls,
//! boxes in the plane, thickenings, and explicit graphs.
//!
//! Hosts are navigated by coordinate arithmetic and never fully materialized
//! unless small: a grid host for a routed wiring can have millions of
//! vertices while the wiring touches only a sliver.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use smallvec::SmallVec;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

pub type GridCoords = SmallVec<[i32; 6]>;
pub type LampBits = SmallVec<[u8; 24]>;

/// A vertex of a host graph, encoded per host kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HostVertex {
    /// Lattice point of a grid host (also used for plane boxes).
    Grid(GridCoords),
    /// Lamplighter ball element: bit string of length `2k` plus marker
    /// position in `[0, 2k)`.
    Lamp { lamps: LampBits, pos: u16 },
    /// Vertex `(base, layer)` of a thickened host, `layer` in `1..=T`.
    Thick { base: Box<HostVertex>, layer: u32 },
    /// Index into an explicit graph.
    Explicit(u32),
}

impl HostVertex {
    pub fn grid(coords: &[i32]) -> HostVertex {
        HostVertex::Grid(coords.iter().copied().collect())
    }

    pub fn lamp(bits: &[u8], pos: u16) -> HostVertex {
        HostVertex::Lamp {
            lamps: bits.iter().copied().collect(),
            pos,
        }
    }

    pub fn thick(base: HostVertex, layer: u32) -> HostVertex {
        HostVertex::Thick {
            base: Box::new(base),
            layer,
        }
    }
}

#[derive(Debug)]
pub struct ExplicitHostInner {
    graph: Graph,
    adj: Vec<Vec<u32>>,
}

/// Handle to a host graph with an adjacency oracle.
#[derive(Debug, Clone)]
pub enum HostHandle {
    /// `dim`-fold graph product of the path on `side` vertices.
    Grid { dim: usize, side: i64 },
    /// Ball of the lamplighter group: strings of length `2k` with a marker.
    Lamplighter { k: usize },
    /// `{0..side-1}^2` box of the integer plane; behaves as `Grid { 2, side }`.
    Z2Box { side: i64 },
    /// `T`-thickening: fibers `{v} x {1..T}` are cliques, fibers over host
    /// edges are joined completely.
    Thickened { base: Box<HostHandle>, t: u32 },
    /// Explicit finite graph.
    Explicit(Arc<ExplicitHostInner>),
}

/// Grid host `Q^n_r`: vertices are `n`-tuples in `[0, r)`, adjacent when they
/// differ by 1 in exactly one coordinate.
pub fn grid(dim: usize, side: i64) -> Result<HostHandle> {
    if dim < 1 || side < 1 {
        return Err(Error::validation(format!(
            "grid needs dim >= 1 and side >= 1, got ({dim}, {side})"
        )));
    }
    Ok(HostHandle::Grid { dim, side })
}

/// Lamplighter ball host: bit strings of length `2k` with marker position in
/// `[0, 2k)`. Neighbors flip the lamp under the marker or move the marker.
pub fn lamplighter_ball(k: usize) -> Result<HostHandle> {
    if k < 1 {
        return Err(Error::validation(format!("lamplighter ball needs k >= 1, got {k}")));
    }
    Ok(HostHandle::Lamplighter { k })
}

/// `{0..m-1}^2` box of the integer plane.
pub fn z2_box(m: i64) -> Result<HostHandle> {
    if m < 1 {
        return Err(Error::validation(format!("z2 box needs side >= 1, got {m}")));
    }
    Ok(HostHandle::Z2Box { side: m })
}

/// `T`-thickening of a host.
pub fn thicken(base: HostHandle, t: u32) -> Result<HostHandle> {
    if t < 1 {
        return Err(Error::validation(format!("thickening needs t >= 1, got {t}")));
    }
    Ok(HostHandle::Thickened {
        base: Box::new(base),
        t,
    })
}

/// Wraps an explicit graph as a host.
pub fn explicit(graph: Graph) -> HostHandle {
    let adj = graph.adjacency();
    HostHandle::Explicit(Arc::new(ExplicitHostInner { graph, adj }))
}

impl HostHandle {
    fn as_grid(&self) -> Option<(usize, i64)> {
        match self {
            HostHandle::Grid { dim, side } => Some((*dim, *side)),
            HostHandle::Z2Box { side } => Some((2, *side)),
            _ => None,
        }
    }

    pub fn explicit_graph(&self) -> Option<&Graph> {
        match self {
            HostHandle::Explicit(inner) => Some(&inner.graph),
            _ => None,
        }
    }

    pub fn contains(&self, v: &HostVertex) -> bool {
        match (self.as_grid(), self, v) {
            (Some((dim, side)), _, HostVertex::Grid(coords)) => {
                coords.len() == dim && coords.iter().all(|&c| c >= 0 && (c as i64) < side)
            }
            (None, HostHandle::Lamplighter { k }, HostVertex::Lamp { lamps, pos }) => {
                lamps.len() == 2 * k
                    && (*pos as usize) < 2 * k
                    && lamps.iter().all(|&b| b <= 1)
            }
            (None, HostHandle::Thickened { base, t }, HostVertex::Thick { base: bv, layer }) => {
                *layer >= 1 && *layer <= *t && base.contains(bv)
            }
            (None, HostHandle::Explicit(inner), HostVertex::Explicit(idx)) => {
                (*idx as usize) < inner.graph.vertex_count()
            }
            _ => false,
        }
    }

    pub fn adjacent(&self, u: &HostVertex, v: &HostVertex) -> bool {
        if !self.contains(u) || !self.contains(v) || u == v {
            return false;
        }
        match (self, u, v) {
            _ if self.as_grid().is_some() => {
                let (HostVertex::Grid(a), HostVertex::Grid(b)) = (u, v) else {
                    return false;
                };
                let mut total = 0i64;
                for (x, y) in a.iter().zip(b.iter()) {
                    total += (x - y).abs() as i64;
                    if total > 1 {
                        return false;
                    }
                }
                total == 1
            }
            (
                HostHandle::Lamplighter { .. },
                HostVertex::Lamp { lamps: la, pos: pa },
                HostVertex::Lamp { lamps: lb, pos: pb },
            ) => {
                if pa == pb {
                    // flip at the marker
                    let mut diffs = la
                        .iter()
                        .zip(lb.iter())
                        .enumerate()
                        .filter(|(_, (x, y))| x != y)
                        .map(|(i, _)| i);
                    diffs.next() == Some(*pa as usize) && diffs.next().is_none()
                } else {
                    la == lb && pa.abs_diff(*pb) == 1
                }
            }
            (
                HostHandle::Thickened { base, .. },
                HostVertex::Thick { base: bu, layer: lu },
                HostVertex::Thick { base: bv, layer: lv },
            ) => (bu == bv && lu != lv) || base.adjacent(bu, bv),
            (HostHandle::Explicit(inner), HostVertex::Explicit(a), HostVertex::Explicit(b)) => {
                inner.graph.has_edge(*a, *b)
            }
            _ => false,
        }
    }

    /// Neighbor enumeration, sorted ascending.
    pub fn neighbors(&self, v: &HostVertex) -> Result<Vec<HostVertex>> {
        if !self.contains(v) {
            return Err(Error::validation(format!("vertex {v:?} not in host")));
        }
        let mut out = Vec::new();
        match (self, v) {
            _ if self.as_grid().is_some() => {
                let (_, side) = self.as_grid().unwrap();
                let HostVertex::Grid(coords) = v else { unreachable!() };
                for i in 0..coords.len() {
                    for delta in [-1i32, 1] {
                        let c = coords[i] + delta;
                        if c >= 0 && (c as i64) < side {
                            let mut next = coords.clone();
                            next[i] = c;
                            out.push(HostVertex::Grid(next));
                        }
                    }
                }
            }
            (HostHandle::Lamplighter { k }, HostVertex::Lamp { lamps, pos }) => {
                let mut flipped = lamps.clone();
                flipped[*pos as usize] ^= 1;
                out.push(HostVertex::Lamp {
                    lamps: flipped,
                    pos: *pos,
                });
                if *pos > 0 {
                    out.push(HostVertex::Lamp {
                        lamps: lamps.clone(),
                        pos: pos - 1,
                    });
                }
                if (*pos as usize) + 1 < 2 * k {
                    out.push(HostVertex::Lamp {
                        lamps: lamps.clone(),
                        pos: pos + 1,
                    });
                }
            }
            (HostHandle::Thickened { base, t }, HostVertex::Thick { base: bv, layer }) => {
                for l in 1..=*t {
                    if l != *layer {
                        out.push(HostVertex::thick((**bv).clone(), l));
                    }
                }
                for nb in base.neighbors(bv)? {
                    for l in 1..=*t {
                        out.push(HostVertex::thick(nb.clone(), l));
                    }
                }
            }
            (HostHandle::Explicit(inner), HostVertex::Explicit(idx)) => {
                for &w in &inner.adj[*idx as usize] {
                    out.push(HostVertex::Explicit(w));
                }
            }
            _ => unreachable!("contains() filtered mismatched kinds"),
        }
        out.sort();
        Ok(out)
    }

    /// Uniform upper bound on vertex degrees.
    pub fn degree_bound(&self) -> usize {
        match self {
            HostHandle::Grid { dim, .. } => 2 * dim,
            HostHandle::Z2Box { .. } => 4,
            HostHandle::Lamplighter { .. } => 3,
            HostHandle::Thickened { base, t } => {
                (*t as usize - 1) + *t as usize * base.degree_bound()
            }
            HostHandle::Explicit(inner) => inner.graph.max_degree(),
        }
    }

    pub fn vertex_count(&self) -> Option<u128> {
        match self {
            HostHandle::Grid { dim, side } => (side.unsigned_abs() as u128).checked_pow(*dim as u32),
            HostHandle::Z2Box { side } => (side.unsigned_abs() as u128).checked_pow(2),
            HostHandle::Lamplighter { k } => {
                let bits = 2 * *k as u32;
                1u128.checked_shl(bits).map(|c| c * bits as u128)
            }
            HostHandle::Thickened { base, t } => {
                base.vertex_count().and_then(|c| c.checked_mul(*t as u128))
            }
            HostHandle::Explicit(inner) => Some(inner.graph.vertex_count() as u128),
        }
    }

    /// All host vertices, erroring above `cap`.
    pub fn enumerate_all(&self, cap: usize) -> Result<Vec<HostVertex>> {
        let count = self.vertex_count().ok_or_else(|| {
            Error::validation("host too large to enumerate")
        })?;
        if count > cap as u128 {
            return Err(Error::Capacity {
                what: "host enumeration",
                size: count.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        match self {
            _ if self.as_grid().is_some() => {
                let (dim, side) = self.as_grid().unwrap();
                let mut coords: GridCoords = std::iter::repeat(0).take(dim).collect();
                loop {
                    out.push(HostVertex::Grid(coords.clone()));
                    let mut i = dim;
                    loop {
                        if i == 0 {
                            return finish(out);
                        }
                        i -= 1;
                        coords[i] += 1;
                        if (coords[i] as i64) < side {
                            break;
                        }
                        coords[i] = 0;
                    }
                }
            }
            HostHandle::Lamplighter { k } => {
                let len = 2 * k;
                for mask in 0u64..(1u64 << len) {
                    for pos in 0..len as u16 {
                        let bits: LampBits = (0..len).map(|i| ((mask >> i) & 1) as u8).collect();
                        out.push(HostVertex::Lamp { lamps: bits, pos });
                    }
                }
            }
            HostHandle::Thickened { base, t } => {
                for bv in base.enumerate_all(cap)? {
                    for l in 1..=*t {
                        out.push(HostVertex::thick(bv.clone(), l));
                    }
                }
            }
            HostHandle::Explicit(inner) => {
                for idx in 0..inner.graph.vertex_count() as u32 {
                    out.push(HostVertex::Explicit(idx));
                }
            }
            _ => unreachable!(),
        }
        finish(out)
    }

    /// Shortest-path distance in the host, `None` when unreachable.
    pub fn distance(&self, u: &HostVertex, v: &HostVertex) -> Result<Option<u64>> {
        if !self.contains(u) || !self.contains(v) {
            return Err(Error::validation("distance endpoints must lie in the host"));
        }
        Ok(match (self, u, v) {
            _ if self.as_grid().is_some() => {
                let (HostVertex::Grid(a), HostVertex::Grid(b)) = (u, v) else { unreachable!() };
                Some(a.iter().zip(b.iter()).map(|(x, y)| x.abs_diff(*y) as u64).sum())
            }
            (
                HostHandle::Lamplighter { .. },
                HostVertex::Lamp { lamps: la, pos: pa },
                HostVertex::Lamp { lamps: lb, pos: pb },
            ) => {
                let mask_a = lamp_mask(la);
                let mask_b = lamp_mask(lb);
                Some(lamp_distance(mask_a, *pa as i64, mask_b, *pb as i64))
            }
            (
                HostHandle::Thickened { base, .. },
                HostVertex::Thick { base: bu, layer: lu },
                HostVertex::Thick { base: bv, layer: lv },
            ) => {
                if bu == bv {
                    Some(if lu == lv { 0 } else { 1 })
                } else {
                    base.distance(bu, bv)?
                }
            }
            (HostHandle::Explicit(inner), HostVertex::Explicit(a), HostVertex::Explicit(b)) => {
                inner.graph.bfs_distances(*a)[*b as usize].map(u64::from)
            }
            _ => unreachable!(),
        })
    }

    /// Shortest path from `u` to `v` with lexicographically smallest vertex
    /// choices among shortest paths. `None` when unreachable.
    pub fn shortest_path(&self, u: &HostVertex, v: &HostVertex) -> Result<Option<Vec<HostVertex>>> {
        let Some(dist) = self.distance(u, v)? else {
            return Ok(None);
        };
        // Distances from v, restricted to the ball that can matter.
        let mut dist_to_target: HashMap<HostVertex, u64> = HashMap::new();
        dist_to_target.insert(v.clone(), 0);
        let mut queue = VecDeque::from([v.clone()]);
        while let Some(x) = queue.pop_front() {
            let d = dist_to_target[&x];
            if d >= dist {
                continue;
            }
            for nb in self.neighbors(&x)? {
                // prune: nb useful only if it can lie on a shortest path
                if let Some(du) = self.distance(u, &nb)? {
                    if du + d + 1 > dist {
                        continue;
                    }
                }
                dist_to_target.entry(nb.clone()).or_insert_with(|| {
                    queue.push_back(nb.clone());
                    d + 1
                });
            }
        }
        let mut path = vec![u.clone()];
        let mut cur = u.clone();
        let mut remaining = dist;
        while remaining > 0 {
            let mut next: Option<HostVertex> = None;
            for nb in self.neighbors(&cur)? {
                if dist_to_target.get(&nb) == Some(&(remaining - 1)) {
                    next = Some(nb);
                    break; // neighbors sorted: first hit is lexicographically least
                }
            }
            cur = next.expect("BFS table covers some shortest path");
            path.push(cur.clone());
            remaining -= 1;
        }
        Ok(Some(path))
    }

    /// Explicit induced subgraph on a finite set of host vertices. Returns
    /// the graph together with the sorted vertex list mapping indices back
    /// to host vertices.
    pub fn materialize(&self, used: &BTreeSet<HostVertex>) -> Result<(Graph, Vec<HostVertex>)> {
        for v in used {
            if !self.contains(v) {
                return Err(Error::validation(format!("vertex {v:?} not in host")));
            }
        }
        let verts: Vec<HostVertex> = used.iter().cloned().collect();
        let index: BTreeMap<&HostVertex, u32> =
            verts.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let mut edges = Vec::new();
        for (i, v) in verts.iter().enumerate() {
            // For dense explicit hosts neighbor lists are cheap; for implicit
            // hosts they are bounded by the kind's degree bound.
            for nb in self.neighbors(v)? {
                if let Some(&j) = index.get(&nb) {
                    if (i as u32) < j {
                        edges.push((i as u32, j));
                    }
                }
            }
        }
        Ok((Graph::new(verts.len(), &edges)?, verts))
    }

    /// Maximum pairwise host distance over a set of host vertices.
    /// `None` when some pair is unreachable (disconnected explicit hosts).
    pub fn diameter_of(&self, set: &[HostVertex]) -> Result<Option<u64>> {
        if set.len() <= 1 {
            return Ok(Some(0));
        }
        match self {
            _ if self.as_grid().is_some() => {
                let (dim, _) = self.as_grid().unwrap();
                let mut coords = Vec::with_capacity(set.len());
                for v in set {
                    let HostVertex::Grid(c) = v else {
                        return Err(Error::validation("mixed vertex kinds"));
                    };
                    coords.push(c);
                }
                // L1 diameter via signed projections.
                let mut best = 0i64;
                for signs in 0..(1u32 << (dim - 1)) {
                    let mut lo = i64::MAX;
                    let mut hi = i64::MIN;
                    for c in &coords {
                        let mut s = c[0] as i64;
                        for i in 1..dim {
                            if signs & (1 << (i - 1)) != 0 {
                                s -= c[i] as i64;
                            } else {
                                s += c[i] as i64;
                            }
                        }
                        lo = lo.min(s);
                        hi = hi.max(s);
                    }
                    best = best.max(hi - lo);
                }
                Ok(Some(best as u64))
            }
            HostHandle::Lamplighter { .. } => {
                let entries: Vec<(u64, i64)> = set
                    .iter()
                    .map(|v| {
                        let HostVertex::Lamp { lamps, pos } = v else {
                            return Err(Error::validation("mixed vertex kinds"));
                        };
                        Ok((lamp_mask(lamps), *pos as i64))
                    })
                    .collect::<Result<_>>()?;
                Ok(Some(lamp_diameter(&entries)))
            }
            HostHandle::Thickened { base, .. } => {
                let mut bases = BTreeSet::new();
                let mut duplicated = false;
                let mut layer_of: BTreeMap<&HostVertex, u32> = BTreeMap::new();
                for v in set {
                    let HostVertex::Thick { base: bv, layer } = v else {
                        return Err(Error::validation("mixed vertex kinds"));
                    };
                    if let Some(&l) = layer_of.get(bv.as_ref()) {
                        if l != *layer {
                            duplicated = true;
                        }
                    } else {
                        layer_of.insert(bv.as_ref(), *layer);
                    }
                    bases.insert(bv.as_ref().clone());
                }
                let projected: Vec<HostVertex> = bases.into_iter().collect();
                let inner = base.diameter_of(&projected)?;
                Ok(inner.map(|d| d.max(u64::from(duplicated))))
            }
            HostHandle::Explicit(inner) => {
                let mut best = 0u64;
                let mut wanted: BTreeSet<u32> = BTreeSet::new();
                for v in set {
                    let HostVertex::Explicit(i) = v else {
                        return Err(Error::validation("mixed vertex kinds"));
                    };
                    wanted.insert(*i);
                }
                for &src in &wanted {
                    let dist = inner.graph.bfs_distances(src);
                    for &dst in &wanted {
                        match dist[dst as usize] {
                            Some(d) => best = best.max(d as u64),
                            None => return Ok(None),
                        }
                    }
                }
                Ok(Some(best))
            }
            _ => unreachable!(),
        }
    }
}

fn finish(out: Vec<HostVertex>) -> Result<Vec<HostVertex>> {
    let mut out = out;
    out.sort();
    Ok(out)
}

pub(crate) fn lamp_mask(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

/// Word distance in the lamplighter group with flip/move generators:
/// one flip per differing lamp, plus the minimal marker walk from `p` to `q`
/// visiting every differing position.
pub(crate) fn lamp_distance(mask_a: u64, p: i64, mask_b: u64, q: i64) -> u64 {
    let diff = mask_a ^ mask_b;
    if diff == 0 {
        return p.abs_diff(q);
    }
    let flips = diff.count_ones() as u64;
    let a = diff.trailing_zeros() as i64;
    let b = 63 - diff.leading_zeros() as i64;
    let span = (b - a) as u64;
    let via_low = p.abs_diff(a) + span + b.abs_diff(q);
    let via_high = p.abs_diff(b) + span + a.abs_diff(q);
    flips + via_low.min(via_high)
}

fn lamp_diameter_scalar(entries: &[(u64, i64)]) -> u64 {
    let mut best = 0;
    for i in 0..entries.len() {
        let (ma, pa) = entries[i];
        for &(mb, pb) in &entries[i + 1..] {
            let d = lamp_distance(ma, pa, mb, pb);
            if d > best {
                best = d;
            }
        }
    }
    best
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn lamp_diameter_popcnt(entries: &[(u64, i64)]) -> u64 {
    lamp_diameter_scalar(entries)
}

fn lamp_diameter(entries: &[(u64, i64)]) -> u64 {
    #[cfg(target_arch = "x86_64")]
    {
        if is_x86_feature_detected!("popcnt") {
            return unsafe { lamp_diameter_popcnt(entries) };
        }
    }
    lamp_diameter_scalar(entries)
}
