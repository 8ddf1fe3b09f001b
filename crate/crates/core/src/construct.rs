//! Explicit wiring constructions: lamplighter routing of arbitrary graphs,
//! the diagonal wiring into a plane box, and the randomized axis-parallel
//! grid router.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::hosts::{grid, lamplighter_ball, z2_box, HostVertex, LampBits};
use crate::wiring::{Walk, Wiring};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::{BTreeMap, HashMap};

/// Number of lamp positions needed to address `n` vertices: `ceil(log2 n)`,
/// clamped to at least 1 so the host is nonempty.
pub fn lamp_index_bits(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn bit(i: usize, l: usize) -> u8 {
    ((i >> l) & 1) as u8
}

/// Doubled binary string of `i` with the marker at position 0: bits of `i`
/// (low order first) in positions `0..k` and again in positions `k..2k`.
fn lamp_image(i: usize, k: usize) -> HostVertex {
    let lamps: LampBits = (0..2 * k).map(|l| bit(i, l % k)).collect();
    HostVertex::Lamp { lamps, pos: 0 }
}

/// Walk from the image of `i` to the image of `j`: sweep the marker left to
/// right, correcting each lamp to `j`'s digits, then return to position 0.
fn lamp_route(i: usize, j: usize, k: usize) -> Walk {
    let mut lamps: LampBits = (0..2 * k).map(|l| bit(i, l % k)).collect();
    let mut verts = Vec::with_capacity(6 * k + 1);
    verts.push(HostVertex::Lamp {
        lamps: lamps.clone(),
        pos: 0,
    });
    for l in 0..2 * k {
        let target = bit(j, l % k);
        if lamps[l] != target {
            lamps[l] = target;
            verts.push(HostVertex::Lamp {
                lamps: lamps.clone(),
                pos: l as u16,
            });
        }
        if l + 1 < 2 * k {
            verts.push(HostVertex::Lamp {
                lamps: lamps.clone(),
                pos: (l + 1) as u16,
            });
        }
    }
    for l in (0..2 * k - 1).rev() {
        verts.push(HostVertex::Lamp {
            lamps: lamps.clone(),
            pos: l as u16,
        });
    }
    Walk::new(verts).expect("route has no stationary steps")
}

/// Wires a graph into the lamplighter ball on `2*ceil(log2 n)` lamp
/// positions. Vertex `i` maps to its doubled binary string; each edge is
/// routed by a single left-to-right correcting sweep and a return run.
pub fn lamplighter_wiring(g: &Graph) -> Result<Wiring> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::validation("lamplighter wiring needs at least one vertex"));
    }
    let k = lamp_index_bits(n);
    let host = lamplighter_ball(k)?;
    let vertex_map: Vec<HostVertex> = (0..n).map(|i| lamp_image(i, k)).collect();
    let edge_walks: BTreeMap<(u32, u32), Walk> = g
        .edges()
        .iter()
        .map(|&(u, v)| ((u, v), lamp_route(u as usize, v as usize, k)))
        .collect();
    Wiring::new(g.clone(), host, vertex_map, edge_walks)
}

/// Wires a graph into the `n x n` plane box: vertex `i` sits on the diagonal
/// at `(i, i)`, the edge `ij` (i < j) runs horizontally to `(j, i)` and then
/// vertically up to `(j, j)`.
pub fn diagonal_wiring_z2(g: &Graph) -> Result<Wiring> {
    let n = g.vertex_count();
    let host = z2_box(n.max(1) as i64)?;
    let vertex_map: Vec<HostVertex> = (0..n as i32).map(|i| HostVertex::grid(&[i, i])).collect();
    let mut edge_walks = BTreeMap::new();
    for &(u, v) in g.edges() {
        let (i, j) = (u as i32, v as i32);
        let mut verts = Vec::with_capacity(2 * (j - i) as usize + 1);
        for x in i..=j {
            verts.push(HostVertex::grid(&[x, i]));
        }
        for y in (i + 1)..=j {
            verts.push(HostVertex::grid(&[j, y]));
        }
        edge_walks.insert((u, v), Walk::new(verts)?);
    }
    Wiring::new(g.clone(), host, vertex_map, edge_walks)
}

/// Parameters of a grid routing run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbParams {
    /// Grid dimension (>= 3).
    pub dim: usize,
    /// Degree bound of the routed graph.
    pub k: usize,
    /// Base-face lattice side: smallest R with R^(dim-1) >= |V|.
    pub r: i64,
    /// Spacing constant C = 4k(2 dim - 1) + 1.
    pub c: i64,
    /// Host side length 2 C R.
    pub side: i64,
    pub seed: u64,
    pub max_attempts_per_edge: usize,
}

/// Sampling statistics of a grid routing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbStats {
    pub edges_routed: usize,
    pub total_attempts: usize,
    pub max_attempts_one_edge: usize,
    pub mean_attempts_per_edge: f64,
}

pub const KB_DEFAULT_MAX_ATTEMPTS: usize = 64;

type SegmentKey = (u8, SmallVec<[i32; 6]>);

struct SegmentStore {
    // per (axis, fixed transverse coordinates): occupied inclusive ranges
    lines: HashMap<SegmentKey, Vec<(i32, i32)>>,
}

impl SegmentStore {
    fn new() -> SegmentStore {
        SegmentStore {
            lines: HashMap::new(),
        }
    }

    fn key(axis: usize, point: &[i32]) -> SegmentKey {
        let fixed: SmallVec<[i32; 6]> = point
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != axis)
            .map(|(_, &c)| c)
            .collect();
        (axis as u8, fixed)
    }

    fn conflicts(&self, axis: usize, point: &[i32], lo: i32, hi: i32) -> bool {
        match self.lines.get(&Self::key(axis, point)) {
            Some(ranges) => ranges.iter().any(|&(a, b)| lo <= b && a <= hi),
            None => false,
        }
    }

    fn insert(&mut self, axis: usize, point: &[i32], lo: i32, hi: i32) {
        self.lines
            .entry(Self::key(axis, point))
            .or_default()
            .push((lo, hi));
    }
}

/// One axis-parallel segment of a candidate path.
#[derive(Debug, Clone, Copy)]
struct Segment {
    axis: usize,
    from: i32,
    to: i32,
}

/// Builds the 2·dim-1 segments of a candidate path: ascend, push along the
/// first dim-2 horizontal axes by the sampled offsets, correct the remaining
/// horizontal coordinates back-to-front, descend.
fn candidate_segments(dim: usize, p: &[i32], q: &[i32], offsets: &[i32]) -> (Vec<Segment>, Vec<i32>) {
    let z = dim - 1;
    let mut cur: Vec<i32> = p.to_vec();
    let mut segs = Vec::with_capacity(2 * dim - 1);
    let push = |segs: &mut Vec<Segment>, cur: &mut Vec<i32>, axis: usize, to: i32| {
        let from = cur[axis];
        if from != to {
            segs.push(Segment { axis, from, to });
            cur[axis] = to;
        }
    };
    push(&mut segs, &mut cur, z, offsets[0]);
    for a in 0..dim.saturating_sub(2) {
        let to = cur[a] + offsets[a + 1];
        push(&mut segs, &mut cur, a, to);
    }
    for a in (0..dim - 1).rev() {
        push(&mut segs, &mut cur, a, q[a]);
    }
    push(&mut segs, &mut cur, z, q[z]);
    (segs, cur)
}

/// Routes a graph into the grid `Q^dim_{2CR}` by rejection sampling:
/// vertices sit on a C-spaced sublattice of the bottom face, and each edge
/// tries random axis-parallel candidate paths until one avoids collinear
/// overlap with every previously accepted path.
pub fn kb_wiring(
    g: &Graph,
    dim: usize,
    seed: u64,
    max_attempts_per_edge: usize,
) -> Result<(Wiring, KbParams, KbStats)> {
    if dim < 3 {
        return Err(Error::validation(format!("grid routing needs dim >= 3, got {dim}")));
    }
    let n = g.vertex_count();
    let k = g.max_degree();
    let mut r: i64 = 1;
    while (r as u128).pow(dim as u32 - 1) < n as u128 {
        r += 1;
    }
    let c = (4 * k * (2 * dim - 1) + 1) as i64;
    let side = 2 * c * r;
    let host = grid(dim, side)?;
    let params = KbParams {
        dim,
        k,
        r,
        c,
        side,
        seed,
        max_attempts_per_edge,
    };

    // lexicographic placement on the C-spaced sublattice of the bottom face
    let place = |i: usize| -> Vec<i32> {
        let mut coords = vec![0i32; dim];
        let mut rest = i as i64;
        for axis in (0..dim - 1).rev() {
            coords[axis] = (c * (rest % r)) as i32;
            rest /= r;
        }
        coords
    };
    let placements: Vec<Vec<i32>> = (0..n).map(place).collect();
    let vertex_map: Vec<HostVertex> = placements.iter().map(|p| HostVertex::grid(p)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = SegmentStore::new();
    let mut edge_walks = BTreeMap::new();
    let mut total_attempts = 0usize;
    let mut max_attempts_one_edge = 0usize;

    let cr = c * r;
    for &(u, v) in g.edges() {
        let p = &placements[u as usize];
        let q = &placements[v as usize];
        let mut accepted = None;
        let mut attempts = 0usize;
        while attempts < max_attempts_per_edge {
            attempts += 1;
            let offsets: Vec<i32> = (0..dim - 1)
                .map(|_| rng.gen_range(0..=cr) as i32)
                .collect();
            let (segs, end) = candidate_segments(dim, p, q, &offsets);
            debug_assert_eq!(&end, q);
            let mut cur: Vec<i32> = p.to_vec();
            let mut ok = true;
            for seg in &segs {
                if seg.axis != dim - 1 {
                    let (lo, hi) = (seg.from.min(seg.to), seg.from.max(seg.to));
                    cur[seg.axis] = seg.from;
                    if store.conflicts(seg.axis, &cur, lo, hi) {
                        ok = false;
                        break;
                    }
                }
                cur[seg.axis] = seg.to;
            }
            if ok {
                accepted = Some(segs);
                break;
            }
        }
        total_attempts += attempts;
        max_attempts_one_edge = max_attempts_one_edge.max(attempts);
        let segs = accepted.ok_or_else(|| {
            Error::BudgetExhausted(format!(
                "edge ({u},{v}) rejected {max_attempts_per_edge} candidate paths"
            ))
        })?;

        // record horizontal segments, build the unit-step walk
        let mut cur: Vec<i32> = p.to_vec();
        let mut verts = vec![HostVertex::grid(&cur)];
        for seg in &segs {
            if seg.axis != dim - 1 {
                let (lo, hi) = (seg.from.min(seg.to), seg.from.max(seg.to));
                store.insert(seg.axis, &cur, lo, hi);
            }
            let step = if seg.to > seg.from { 1 } else { -1 };
            let mut x = seg.from;
            while x != seg.to {
                x += step;
                cur[seg.axis] = x;
                verts.push(HostVertex::grid(&cur));
            }
        }
        debug_assert_eq!(&cur, q);
        edge_walks.insert((u, v), Walk::new(verts)?);
    }

    let edges_routed = g.edge_count();
    let stats = KbStats {
        edges_routed,
        total_attempts,
        max_attempts_one_edge,
        mean_attempts_per_edge: if edges_routed == 0 {
            0.0
        } else {
            total_attempts as f64 / edges_routed as f64
        },
    };
    let wiring = Wiring::new(g.clone(), host, vertex_map, edge_walks)?;
    Ok((wiring, params, stats))
}

/// Convenience wrapper with the default attempt budget.
pub fn kb_wiring_default(g: &Graph, dim: usize, seed: u64) -> Result<(Wiring, KbParams, KbStats)> {
    kb_wiring(g, dim, seed, KB_DEFAULT_MAX_ATTEMPTS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::random_regular;
    use crate::hosts::lamp_mask;
    use crate::wiring::verify_coarse_wiring;

    fn lamp_parts(v: &HostVertex) -> (&[u8], u16) {
        match v {
            HostVertex::Lamp { lamps, pos } => (lamps, *pos),
            _ => panic!("not a lamp vertex"),
        }
    }

    #[test]
    fn lamp_route_k2_walk() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let w = lamplighter_wiring(&g).unwrap();
        let walk = &w.edge_walks[&(0, 1)];
        let expected = [
            (vec![0u8, 0], 0u16), // marker at left of "00"
            (vec![1, 0], 0),
            (vec![1, 0], 1),
            (vec![1, 1], 1),
            (vec![1, 1], 0),
        ];
        assert_eq!(walk.len(), 5);
        for (got, want) in walk.vertices().iter().zip(expected.iter()) {
            let (lamps, pos) = lamp_parts(got);
            assert_eq!((lamps.to_vec(), pos), (want.0.clone(), want.1));
        }
        let report = verify_coarse_wiring(&w).unwrap();
        assert_eq!(report.volume, 5);
        assert!(report.volume <= 7); // d n (3k + 1/2) with d=1, n=2, k=1
    }

    #[test]
    fn lamplighter_bounds_on_random_graphs() {
        for (n, seed) in [(8usize, 1u64), (16, 2), (20, 3)] {
            let g = random_regular(n, 3, seed).unwrap();
            let d = g.max_degree();
            let k = lamp_index_bits(n);
            let w = lamplighter_wiring(&g).unwrap();
            let report = verify_coarse_wiring(&w).unwrap();
            assert!(report.k <= 2 * d, "k = {} > 2d = {}", report.k, 2 * d);
            assert!(report.diameter.unwrap() <= 6 * k as u64);
            // volume <= d n (3k + 1/2), kept integral by doubling
            assert!(2 * report.volume <= d * n * (6 * k + 1));
        }
    }

    #[test]
    fn lamplighter_edge_labels_decode_an_endpoint() {
        // every vertex string on the walk of edge (i, j) reads i from its
        // second half or j from its first half
        let g = random_regular(12, 3, 9).unwrap();
        let k = lamp_index_bits(12);
        let w = lamplighter_wiring(&g).unwrap();
        for (&(i, j), walk) in &w.edge_walks {
            for v in walk.vertices() {
                let (lamps, _) = lamp_parts(v);
                let mask = lamp_mask(lamps);
                let first = (mask & ((1 << k) - 1)) as usize;
                let second = (mask >> k) as usize;
                assert!(
                    second == i as usize || first == j as usize,
                    "edge ({i},{j}): string decodes neither endpoint"
                );
            }
        }
    }

    #[test]
    fn lamplighter_rejects_empty_graph() {
        assert!(lamplighter_wiring(&Graph::empty(0)).is_err());
    }

    #[test]
    fn lamplighter_single_vertex() {
        let w = lamplighter_wiring(&Graph::empty(1)).unwrap();
        let report = verify_coarse_wiring(&w).unwrap();
        assert_eq!(report.volume, 1);
        assert_eq!(report.diameter, Some(0));
    }

    #[test]
    fn diagonal_k3_image() {
        let w = diagonal_wiring_z2(&Graph::complete(3)).unwrap();
        let image = w.image_vertices();
        let expected: Vec<HostVertex> = [
            [0, 0],
            [1, 0],
            [1, 1],
            [2, 0],
            [2, 1],
            [2, 2],
        ]
        .iter()
        .map(|c| HostVertex::grid(&[c[0], c[1]]))
        .collect();
        let mut expected = expected;
        expected.sort();
        assert_eq!(image, expected);
    }

    #[test]
    fn diagonal_single_vertex_and_volume_bound() {
        let w = diagonal_wiring_z2(&Graph::empty(1)).unwrap();
        assert_eq!(verify_coarse_wiring(&w).unwrap().volume, 1);

        for n in [4usize, 9, 16] {
            let g = Graph::complete(n);
            let w = diagonal_wiring_z2(&g).unwrap();
            let report = verify_coarse_wiring(&w).unwrap();
            assert!(report.volume <= n * n);
            assert!(report.k <= 2 * g.max_degree());
        }
    }

    #[test]
    fn diagonal_sharing_walks_share_an_endpoint() {
        let g = random_regular(10, 3, 4).unwrap();
        let w = diagonal_wiring_z2(&g).unwrap();
        let walks: Vec<(&(u32, u32), &Walk)> = w.edge_walks.iter().collect();
        for a in 0..walks.len() {
            for b in (a + 1)..walks.len() {
                let (ea, wa) = walks[a];
                let (eb, wb) = walks[b];
                let canon = |p: &[HostVertex]| -> (HostVertex, HostVertex) {
                    if p[0] <= p[1] {
                        (p[0].clone(), p[1].clone())
                    } else {
                        (p[1].clone(), p[0].clone())
                    }
                };
                let ha: std::collections::HashSet<(HostVertex, HostVertex)> =
                    wa.vertices().windows(2).map(canon).collect();
                let shares_edge = wb.vertices().windows(2).any(|p| ha.contains(&canon(p)));
                if shares_edge {
                    let shares_endpoint =
                        ea.0 == eb.0 || ea.0 == eb.1 || ea.1 == eb.0 || ea.1 == eb.1;
                    assert!(shares_endpoint, "edges {ea:?}, {eb:?} share a host edge only");
                }
            }
        }
    }

    #[test]
    fn kb_k4_dim3() {
        let g = Graph::complete(4);
        let (w, params, stats) = kb_wiring_default(&g, 3, 0).unwrap();
        assert_eq!(params.r, 2);
        assert_eq!(params.c, 61);
        assert_eq!(params.side, 244);
        let report = verify_coarse_wiring(&w).unwrap();
        assert_eq!(report.max_vertex_multiplicity, 1);
        assert!(report.k <= params.k + params.dim);
        assert!(stats.mean_attempts_per_edge >= 1.0);
    }

    #[test]
    fn kb_edgeless() {
        let g = Graph::empty(5);
        let (w, _, stats) = kb_wiring_default(&g, 3, 1).unwrap();
        let report = verify_coarse_wiring(&w).unwrap();
        assert_eq!(report.volume, 5);
        assert_eq!(stats.edges_routed, 0);
    }

    #[test]
    fn kb_deterministic_and_dim_checked() {
        let g = random_regular(12, 3, 6).unwrap();
        let (w1, _, _) = kb_wiring_default(&g, 3, 42).unwrap();
        let (w2, _, _) = kb_wiring_default(&g, 3, 42).unwrap();
        assert_eq!(w1.vertex_map, w2.vertex_map);
        assert_eq!(w1.edge_walks, w2.edge_walks);
        assert!(kb_wiring_default(&g, 2, 0).is_err());
    }

    #[test]
    fn kb_budget_exhaustion_reports_the_edge() {
        let g = Graph::complete(4);
        let err = kb_wiring(&g, 3, 0, 0).unwrap_err();
        assert!(err.to_string().contains("rejected 0 candidate paths"));
    }

    #[test]
    fn kb_dim4_routes() {
        let g = random_regular(8, 3, 2).unwrap();
        let (w, params, _) = kb_wiring_default(&g, 4, 5).unwrap();
        let report = verify_coarse_wiring(&w).unwrap();
        assert!(report.k <= params.k + params.dim);
    }

    #[test]
    fn kb_same_direction_overlaps_only_in_vertical_columns() {
        let g = random_regular(10, 3, 8).unwrap();
        let (w, params, _) = kb_wiring_default(&g, 3, 3).unwrap();
        let dim = params.dim;
        // collect per-walk axis-parallel unit steps grouped by axis
        let mut seen: HashMap<(usize, Vec<i32>, Vec<i32>), Vec<(u32, u32)>> = HashMap::new();
        for (&e, walk) in &w.edge_walks {
            let mut mine: std::collections::HashSet<(usize, Vec<i32>, Vec<i32>)> =
                Default::default();
            for p in walk.vertices().windows(2) {
                let (HostVertex::Grid(a), HostVertex::Grid(b)) = (&p[0], &p[1]) else {
                    unreachable!()
                };
                let axis = (0..dim).find(|&i| a[i] != b[i]).unwrap();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                mine.insert((axis, lo.to_vec(), hi.to_vec()));
            }
            for key in mine {
                seen.entry(key).or_default().push(e);
            }
        }
        for ((axis, lo, _), edges) in &seen {
            if edges.len() > 1 {
                assert_eq!(*axis, dim - 1, "horizontal host edge shared: {edges:?}");
                // vertical sharing happens over a common endpoint column
                let column: Vec<i32> = lo[..dim - 1].to_vec();
                for &(u, v) in edges {
                    let pu = match &w.vertex_map[u as usize] {
                        HostVertex::Grid(c) => c[..dim - 1].to_vec(),
                        _ => unreachable!(),
                    };
                    let pv = match &w.vertex_map[v as usize] {
                        HostVertex::Grid(c) => c[..dim - 1].to_vec(),
                        _ => unreachable!(),
                    };
                    assert!(pu == column || pv == column);
                }
            }
        }
    }
}
