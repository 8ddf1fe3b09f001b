//! Finite simple graphs and the combinatorial quantities everything else
//! consumes: degrees, components, cut sets, Cheeger constants.

use crate::error::{Error, Result};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Default cap on exact (brute force) minimum cut-set search.
pub const EXACT_CUT_CAP: usize = 16;
/// Default cap on exact Cheeger constant enumeration.
pub const CHEEGER_CAP: usize = 20;

/// A finite simple graph: `n` vertices `0..n`, undirected edges `(u, v)`
/// stored with `u < v`, sorted, deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph, canonicalizing the edge set. Rejects loops and
    /// out-of-range endpoints, naming the offending pair.
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::validation(format!("loop edge ({u},{v})")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::validation(format!(
                    "edge ({u},{v}) has endpoint out of range for {n} vertices"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Graph { n, edges: canon })
    }

    pub fn empty(n: usize) -> Graph {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph { n, edges }
    }

    pub fn path(n: usize) -> Graph {
        let edges = (0..n.saturating_sub(1) as u32).map(|i| (i, i + 1)).collect();
        Graph { n, edges }
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.edges.push((0, n as u32 - 1));
            g.edges.sort_unstable();
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Maximum over vertices of incident-edge count; 0 for edgeless graphs.
    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start as u32];
            seen[start] = true;
            let mut queue = VecDeque::from([start as u32]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// BFS distances from `src`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, src: u32) -> Vec<Option<u32>> {
        let adj = self.adjacency();
        let mut dist = vec![None; self.n];
        dist[src as usize] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize].unwrap();
            for &w in &adj[v as usize] {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Diameter under the shortest path metric; `None` when disconnected
    /// (or when there are no vertices).
    pub fn diameter(&self) -> Option<u32> {
        if self.n == 0 {
            return None;
        }
        let mut best = 0;
        for v in 0..self.n as u32 {
            for d in self.bfs_distances(v) {
                match d {
                    Some(d) => best = best.max(d),
                    None => return None,
                }
            }
        }
        Some(best)
    }
}

/// Result of a cut-set search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub cut_set: Vec<u32>,
    pub largest_remaining_component: usize,
    pub is_minimum: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutMode {
    Exact,
    Heuristic,
}

fn check_vertex_set(g: &Graph, s: &[u32]) -> Result<()> {
    for &v in s {
        if v as usize >= g.vertex_count() {
            return Err(Error::validation(format!(
                "vertex {v} out of range for {} vertices",
                g.vertex_count()
            )));
        }
    }
    Ok(())
}

fn largest_component_after_removal(g: &Graph, s: &[u32]) -> usize {
    let mut removed = vec![false; g.vertex_count()];
    for &v in s {
        removed[v as usize] = true;
    }
    let adj = g.adjacency();
    let mut seen = vec![false; g.vertex_count()];
    let mut largest = 0;
    for start in 0..g.vertex_count() {
        if removed[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut size = 1usize;
        let mut queue = VecDeque::from([start as u32]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v as usize] {
                let w = w as usize;
                if !removed[w] && !seen[w] {
                    seen[w] = true;
                    size += 1;
                    queue.push_back(w as u32);
                }
            }
        }
        largest = largest.max(size);
    }
    largest
}

/// `true` iff every component of `g - s` has at most half of `g`'s vertices.
/// Components of size exactly half are allowed.
pub fn is_cut_set(g: &Graph, s: &[u32]) -> Result<bool> {
    check_vertex_set(g, s)?;
    let largest = largest_component_after_removal(g, s);
    Ok(2 * largest <= g.vertex_count())
}

/// Bitmask component check for the exact searches (`n <= 32`).
fn mask_is_cut(n: usize, adj_masks: &[u32], removed: u32) -> (bool, usize) {
    let full: u32 = if n == 32 { !0 } else { (1u32 << n) - 1 };
    let mut rem = full & !removed;
    let mut largest = 0usize;
    while rem != 0 {
        let seed = rem & rem.wrapping_neg();
        let mut comp = seed;
        loop {
            let mut grown = comp;
            let mut scan = comp;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                grown |= adj_masks[v] & rem;
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        largest = largest.max(comp.count_ones() as usize);
        rem &= !comp;
    }
    (2 * largest <= n, largest)
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    let mut masks = vec![0u32; g.vertex_count()];
    for &(u, v) in g.edges() {
        masks[u as usize] |= 1 << v;
        masks[v as usize] |= 1 << u;
    }
    masks
}

/// Minimum cut set. Exact mode brute-forces all vertex subsets (capped at
/// `cap`, hard error above); heuristic mode greedily removes high-betweenness
/// vertices and flags `is_minimum: false`.
pub fn min_cut_set_with_cap(g: &Graph, mode: CutMode, cap: usize) -> Result<CutReport> {
    match mode {
        CutMode::Exact => {
            let n = g.vertex_count();
            if n > cap.min(25) {
                return Err(Error::Capacity {
                    what: "exact min cut set",
                    size: n,
                    cap: cap.min(25),
                });
            }
            if n == 0 {
                return Ok(CutReport {
                    cut_set: vec![],
                    largest_remaining_component: 0,
                    is_minimum: true,
                });
            }
            let masks = adjacency_masks(g);
            let mut best: Option<(u32, usize)> = None;
            for removed in 0u32..(1u32 << n) {
                if let Some((m, _)) = best {
                    if removed.count_ones() >= m.count_ones() {
                        continue;
                    }
                }
                let (ok, largest) = mask_is_cut(n, &masks, removed);
                if ok {
                    best = Some((removed, largest));
                }
            }
            let (mask, largest) = best.expect("removing all vertices is always a cut set");
            let cut_set = (0..n as u32).filter(|v| mask & (1 << v) != 0).collect();
            Ok(CutReport {
                cut_set,
                largest_remaining_component: largest,
                is_minimum: true,
            })
        }
        CutMode::Heuristic => {
            let mut s: Vec<u32> = Vec::new();
            while !is_cut_set(g, &s)? {
                let v = heuristic_next_vertex(g, &s);
                s.push(v);
            }
            s.sort_unstable();
            let largest = largest_component_after_removal(g, &s);
            Ok(CutReport {
                cut_set: s,
                largest_remaining_component: largest,
                is_minimum: false,
            })
        }
    }
}

pub fn min_cut_set(g: &Graph, mode: CutMode) -> Result<CutReport> {
    min_cut_set_with_cap(g, mode, EXACT_CUT_CAP)
}

/// Highest-betweenness vertex of the largest component of `g - s`
/// (ties broken by smallest index).
fn heuristic_next_vertex(g: &Graph, s: &[u32]) -> u32 {
    let mut removed = vec![false; g.vertex_count()];
    for &v in s {
        removed[v as usize] = true;
    }
    let adj = g.adjacency();

    // largest remaining component
    let mut seen = vec![false; g.vertex_count()];
    let mut largest: Vec<u32> = Vec::new();
    for start in 0..g.vertex_count() {
        if removed[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start as u32];
        let mut queue = VecDeque::from([start as u32]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v as usize] {
                if !removed[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        if comp.len() > largest.len() {
            largest = comp;
        }
    }

    // Brandes betweenness restricted to that component.
    let mut centrality = vec![0.0f64; g.vertex_count()];
    for &src in &largest {
        let mut stack = Vec::new();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); g.vertex_count()];
        let mut sigma = vec![0.0f64; g.vertex_count()];
        let mut dist = vec![-1i64; g.vertex_count()];
        sigma[src as usize] = 1.0;
        dist[src as usize] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v as usize] {
                if removed[w as usize] {
                    continue;
                }
                if dist[w as usize] < 0 {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
                if dist[w as usize] == dist[v as usize] + 1 {
                    sigma[w as usize] += sigma[v as usize];
                    preds[w as usize].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; g.vertex_count()];
        while let Some(w) = stack.pop() {
            for &v in &preds[w as usize] {
                delta[v as usize] +=
                    sigma[v as usize] / sigma[w as usize] * (1.0 + delta[w as usize]);
            }
            if w != src {
                centrality[w as usize] += delta[w as usize];
            }
        }
    }

    let mut best = largest[0];
    for &v in &largest {
        if centrality[v as usize] > centrality[best as usize] {
            best = v;
        }
    }
    best
}

/// Exact Cheeger constant: minimum over nonempty vertex sets `A` with
/// `|A| <= |V|/2` of `|boundary(A)| / |A|`, as an exact rational.
pub fn cheeger_with_cap(g: &Graph, cap: usize) -> Result<Ratio<u64>> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::validation(format!(
            "Cheeger constant needs at least 2 vertices, got {n}"
        )));
    }
    if n > cap.min(25) {
        return Err(Error::Capacity {
            what: "exact Cheeger constant",
            size: n,
            cap: cap.min(25),
        });
    }
    let masks = adjacency_masks(g);
    let mut best: Option<Ratio<u64>> = None;
    for a in 1u32..(1u32 << n) {
        let size = a.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let mut nbhd = 0u32;
        let mut scan = a;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            nbhd |= masks[v];
        }
        let boundary = (nbhd & !a).count_ones() as u64;
        let ratio = Ratio::new(boundary, size as u64);
        best = Some(match best {
            Some(b) if b <= ratio => b,
            _ => ratio,
        });
        if best == Some(Ratio::new(0, 1)) {
            break;
        }
    }
    Ok(best.expect("n >= 2 guarantees an admissible set"))
}

pub fn cheeger(g: &Graph) -> Result<Ratio<u64>> {
    cheeger_with_cap(g, CHEEGER_CAP)
}

/// Random `d`-regular simple graph via the pairing model with rejection.
/// Deterministic given the seed.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if n * d % 2 != 0 {
        return Err(Error::validation(format!(
            "n*d = {} is odd; no {d}-regular graph on {n} vertices",
            n * d
        )));
    }
    if d >= n && !(d == 0 && n <= 1) {
        return Err(Error::validation(format!(
            "degree {d} needs at least {} vertices, got {n}",
            d + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 10_000;
    'attempt: for _ in 0..budget {
        let mut stubs: Vec<u32> = Vec::with_capacity(n * d);
        for v in 0..n as u32 {
            stubs.extend(std::iter::repeat(v).take(d));
        }
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                continue 'attempt;
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue 'attempt;
        }
        return Ok(Graph { n, edges });
    }
    Err(Error::BudgetExhausted(format!(
        "pairing model rejected {budget} times for n={n}, d={d}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_canonicalizes_and_validates() {
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3.edge_count(), 3);

        let dup = Graph::new(4, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(dup.edge_count(), 1);

        let loop_err = Graph::new(2, &[(0, 0)]).unwrap_err();
        assert!(loop_err.to_string().contains("loop"));

        let range_err = Graph::new(2, &[(0, 5)]).unwrap_err();
        assert!(range_err.to_string().contains("out of range"));
    }

    #[test]
    fn max_degree_examples() {
        assert_eq!(Graph::complete(4).max_degree(), 3);
        assert_eq!(Graph::path(3).max_degree(), 2);
        assert_eq!(Graph::empty(5).max_degree(), 0);
    }

    #[test]
    fn cut_set_examples() {
        let p3 = Graph::path(3);
        assert!(is_cut_set(&p3, &[1]).unwrap());
        assert!(!is_cut_set(&p3, &[0]).unwrap());
        let g = Graph::complete(5);
        let all: Vec<u32> = (0..5).collect();
        assert!(is_cut_set(&g, &all).unwrap());
        assert!(is_cut_set(&g, &[7]).is_err());
    }

    #[test]
    fn exact_min_cuts() {
        let p3 = Graph::path(3);
        let report = min_cut_set(&p3, CutMode::Exact).unwrap();
        assert_eq!(report.cut_set.len(), 1);
        assert!(report.is_minimum);

        let c4 = Graph::cycle(4);
        assert_eq!(min_cut_set(&c4, CutMode::Exact).unwrap().cut_set.len(), 2);

        // A single vertex is its own oversized component, so it must be removed.
        let k1 = Graph::empty(1);
        assert_eq!(min_cut_set(&k1, CutMode::Exact).unwrap().cut_set.len(), 1);

        // Edgeless graphs on >= 2 vertices are already cut by the empty set.
        let e3 = Graph::empty(3);
        assert_eq!(min_cut_set(&e3, CutMode::Exact).unwrap().cut_set.len(), 0);
    }

    #[test]
    fn exact_cut_cap_errors() {
        let g = Graph::empty(17);
        match min_cut_set(&g, CutMode::Exact) {
            Err(Error::Capacity { size: 17, cap: 16, .. }) => {}
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn heuristic_cut_is_valid_but_not_flagged_minimum() {
        let g = random_regular(24, 3, 11).unwrap();
        let report = min_cut_set(&g, CutMode::Heuristic).unwrap();
        assert!(is_cut_set(&g, &report.cut_set).unwrap());
        assert!(!report.is_minimum);
    }

    #[test]
    fn min_cut_is_minimal_by_brute_force() {
        // No subset of size |S|-1 is a cut set.
        for g in [Graph::cycle(6), Graph::complete(5), Graph::path(7)] {
            let report = min_cut_set(&g, CutMode::Exact).unwrap();
            assert!(is_cut_set(&g, &report.cut_set).unwrap());
            let s = report.cut_set.len();
            if s > 0 {
                let n = g.vertex_count();
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize == s - 1 {
                        let sub: Vec<u32> =
                            (0..n as u32).filter(|v| mask & (1 << v) != 0).collect();
                        assert!(!is_cut_set(&g, &sub).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn cheeger_examples() {
        assert_eq!(cheeger(&Graph::complete(4)).unwrap(), Ratio::new(1, 1));
        assert_eq!(cheeger(&Graph::path(3)).unwrap(), Ratio::new(1, 1));
        let two_k2 = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(cheeger(&two_k2).unwrap(), Ratio::new(0, 1));
        assert!(cheeger(&Graph::empty(1)).is_err());
        assert!(cheeger(&Graph::empty(25)).is_err());
    }

    #[test]
    fn cheeger_zero_iff_disconnected() {
        for seed in 0..5 {
            let g = random_regular(10, 3, seed).unwrap();
            let h = cheeger(&g).unwrap();
            assert_eq!(h == Ratio::new(0, 1), !g.is_connected());
        }
    }

    #[test]
    fn random_regular_examples() {
        // The unique 3-regular graph on 4 vertices is K_4.
        let g = random_regular(4, 3, 123).unwrap();
        assert_eq!(g, Graph::complete(4));

        let g = random_regular(6, 2, 7).unwrap();
        for v in 0..6 {
            assert_eq!(g.degree(v), 2);
        }

        assert!(random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn random_regular_deterministic() {
        assert_eq!(
            random_regular(16, 3, 42).unwrap(),
            random_regular(16, 3, 42).unwrap()
        );
    }

    #[test]
    fn max_degree_invariant_under_relabeling() {
        let g = random_regular(12, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let mut perm: Vec<u32> = (0..12).collect();
            perm.shuffle(&mut rng);
            let edges: Vec<(u32, u32)> = g
                .edges()
                .iter()
                .map(|&(u, v)| (perm[u as usize], perm[v as usize]))
                .collect();
            let h = Graph::new(12, &edges).unwrap();
            assert_eq!(h.max_degree(), g.max_degree());
        }
    }
}
