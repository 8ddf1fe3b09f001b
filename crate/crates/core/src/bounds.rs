//! Separation machinery along wirings: the divide-and-conquer cut pullback
//! (host cuts pulled back to domain cut sets) and the closed-form profile
//! lower-bound evaluators.

use crate::error::{Error, Result};
use crate::graphs::{is_cut_set, min_cut_set_with_cap, CutMode, Graph, EXACT_CUT_CAP};
use crate::hosts::HostVertex;
use crate::wiring::{verify_coarse_wiring, Wiring};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

/// One level of the pullback recursion.
#[derive(Debug, Clone)]
pub struct PullbackLevel {
    /// Vertices of the subgraph the cut was taken in.
    pub subgraph_size: usize,
    /// The host cut set of this level.
    pub cut: Vec<HostVertex>,
    pub is_minimum: bool,
}

/// Trace of a cut pullback along a wiring.
#[derive(Debug, Clone)]
pub struct CutPullbackTrace {
    pub levels: Vec<PullbackLevel>,
    /// Union of the level cuts (levels are disjoint, so the size is the sum).
    pub union_cut: Vec<HostVertex>,
    /// Domain vertices incident to an edge whose walk meets the union cut.
    pub domain_cut: Vec<u32>,
    /// Degree bound of the host.
    pub host_max_degree: usize,
    /// Multiplicity of the wiring.
    pub k: usize,
    /// `|domain_cut|`.
    pub lhs: usize,
    /// `k * host_max_degree * sum of level cut sizes`.
    pub rhs: usize,
    pub all_cuts_minimum: bool,
    /// Whether the pulled-back set is a cut set of the domain (always true
    /// for domains with at least 2 vertices; degenerate below that).
    pub domain_is_cut: bool,
}

/// Pulls a cut of the domain graph back through the wiring: repeatedly cut
/// the image component carrying more than half of the domain's vertex
/// images, then take all domain vertices whose incident edge walks meet any
/// chosen host cut vertex.
///
/// `mode` selects the host-side cut solver; exact mode errors above the
/// solver cap. The domain-side assertions are exact in both modes.
pub fn pullback_cut(w: &Wiring, mode: CutMode) -> Result<CutPullbackTrace> {
    pullback_cut_with_cap(w, mode, EXACT_CUT_CAP)
}

pub fn pullback_cut_with_cap(w: &Wiring, mode: CutMode, cap: usize) -> Result<CutPullbackTrace> {
    let report = verify_coarse_wiring(w)?;
    let k = report.k;
    let host_max_degree = w.host.degree_bound();
    let n_domain = w.domain.vertex_count();

    let (image_graph, image_verts) = w.image_subgraph()?;
    let image_index: HashMap<&HostVertex, u32> = image_verts
        .iter()
        .enumerate()
        .map(|(i, v)| (v, i as u32))
        .collect();
    let domain_images: Vec<u32> = w
        .vertex_map
        .iter()
        .map(|hv| image_index[hv])
        .collect();

    let mut levels: Vec<PullbackLevel> = Vec::new();
    let mut union_cut_idx: HashSet<u32> = HashSet::new();

    if n_domain >= 2 && image_graph.vertex_count() > 0 {
        // current subgraph as a sorted subset of image-graph indices
        let mut current: Vec<u32> = (0..image_graph.vertex_count() as u32).collect();
        let max_levels = (usize::BITS - image_graph.vertex_count().leading_zeros()) as usize + 1;
        loop {
            if levels.len() > max_levels {
                return Err(Error::structural(format!(
                    "pullback recursion exceeded {max_levels} levels"
                )));
            }
            let sub_index: HashMap<u32, u32> = current
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i as u32))
                .collect();
            let sub_edges: Vec<(u32, u32)> = image_graph
                .edges()
                .iter()
                .filter_map(|&(a, b)| {
                    Some((*sub_index.get(&a)?, *sub_index.get(&b)?))
                })
                .collect();
            let sub_graph = Graph::new(current.len(), &sub_edges)?;
            let cut_report = min_cut_set_with_cap(&sub_graph, mode, cap)?;
            let cut_local: HashSet<u32> = cut_report.cut_set.iter().copied().collect();
            let cut_global: Vec<u32> = cut_report.cut_set.iter().map(|&v| current[v as usize]).collect();
            union_cut_idx.extend(cut_global.iter().copied());
            levels.push(PullbackLevel {
                subgraph_size: current.len(),
                cut: cut_global.iter().map(|&v| image_verts[v as usize].clone()).collect(),
                is_minimum: cut_report.is_minimum,
            });

            // components of the level minus its cut, scanning images
            let adj = sub_graph.adjacency();
            let mut comp_of = vec![usize::MAX; current.len()];
            let mut n_comps = 0usize;
            for start in 0..current.len() {
                if comp_of[start] != usize::MAX || cut_local.contains(&(start as u32)) {
                    continue;
                }
                let id = n_comps;
                n_comps += 1;
                comp_of[start] = id;
                let mut queue = std::collections::VecDeque::from([start as u32]);
                while let Some(x) = queue.pop_front() {
                    for &y in &adj[x as usize] {
                        if comp_of[y as usize] == usize::MAX && !cut_local.contains(&y) {
                            comp_of[y as usize] = id;
                            queue.push_back(y);
                        }
                    }
                }
            }
            let mut image_count = vec![0usize; n_comps];
            for &img in &domain_images {
                if let Some(&local) = sub_index.get(&img) {
                    if !cut_local.contains(&local) {
                        let c = comp_of[local as usize];
                        if c != usize::MAX {
                            image_count[c] += 1;
                        }
                    }
                }
            }
            let heavy: Vec<usize> = (0..n_comps)
                .filter(|&c| 2 * image_count[c] > n_domain)
                .collect();
            if heavy.is_empty() {
                break;
            }
            if heavy.len() > 1 {
                return Err(Error::structural(
                    "two components both carry more than half of the images",
                ));
            }
            let next: Vec<u32> = (0..current.len())
                .filter(|&i| comp_of[i] == heavy[0])
                .map(|i| current[i])
                .collect();
            if 2 * next.len() > current.len() {
                return Err(Error::structural(format!(
                    "component of size {} is not half of {}",
                    next.len(),
                    current.len()
                )));
            }
            current = next;
        }
    }

    // pull back: end vertices of any edge whose walk meets the union cut
    let cut_vertices: HashSet<&HostVertex> = union_cut_idx
        .iter()
        .map(|&i| &image_verts[i as usize])
        .collect();
    let mut domain_cut_set: HashSet<u32> = HashSet::new();
    let mut incidence: HashMap<&HostVertex, HashSet<(u32, u32)>> = HashMap::new();
    for (&(u, v), walk) in &w.edge_walks {
        for x in walk.vertices() {
            if let Some(hv) = cut_vertices.get(x) {
                domain_cut_set.insert(u);
                domain_cut_set.insert(v);
                incidence.entry(hv).or_default().insert((u, v));
            }
        }
    }
    let mut domain_cut: Vec<u32> = domain_cut_set.into_iter().collect();
    domain_cut.sort_unstable();

    // each host vertex meets at most k*Δ edge walks through host edges, plus
    // at most k(k-1)/2 edges collapsed to a trivial walk at that vertex
    for (hv, edges) in &incidence {
        let trivial = edges
            .iter()
            .filter(|&&(u, v)| w.vertex_map[u as usize] == w.vertex_map[v as usize])
            .count();
        let walked = edges.len() - trivial;
        if walked > k * host_max_degree || trivial > k * (k.saturating_sub(1)) / 2 {
            return Err(Error::structural(format!(
                "host vertex {hv:?} meets {walked} walks and {trivial} collapsed edges, above k*Δ = {} and k(k-1)/2 = {}",
                k * host_max_degree,
                k * (k.saturating_sub(1)) / 2
            )));
        }
    }

    let cut_sum: usize = levels.iter().map(|l| l.cut.len()).sum();
    let lhs = domain_cut.len();
    let rhs = k * host_max_degree * cut_sum;
    // every member of the domain cut is an end vertex of one of the (at most
    // k*Δ + k(k-1)/2) edges through some union-cut vertex
    let per_vertex = 2 * (k * host_max_degree + k * (k.saturating_sub(1)) / 2);
    if lhs > per_vertex * union_cut_idx.len() {
        return Err(Error::structural(format!(
            "pulled-back cut of size {lhs} exceeds 2(k*Δ + k(k-1)/2)|C'| = {}",
            per_vertex * union_cut_idx.len()
        )));
    }

    let domain_is_cut = is_cut_set(&w.domain, &domain_cut)?;
    if n_domain >= 2 && !domain_is_cut {
        return Err(Error::structural(
            "pulled-back set is not a cut set of the domain",
        ));
    }

    let mut union_cut: Vec<HostVertex> = union_cut_idx
        .iter()
        .map(|&i| image_verts[i as usize].clone())
        .collect();
    union_cut.sort();

    Ok(CutPullbackTrace {
        levels: levels.clone(),
        union_cut,
        domain_cut,
        host_max_degree,
        k,
        lhs,
        rhs,
        all_cuts_minimum: levels.iter().all(|l| l.is_minimum),
        domain_is_cut,
    })
}

/// Closed-form profile lower bound: `n^{r/p} ln(n)^{(s-q)/p}` for `p > 0`,
/// `exp(n^{r/(q+1)} ln(n)^{s/(q+1)})` for `p = 0`.
pub fn profile_lower_bound(r: f64, s: f64, p: f64, q: f64, n: f64) -> Result<f64> {
    if p < 0.0 {
        return Err(Error::validation(format!("exponent p must be nonnegative, got {p}")));
    }
    if n <= 1.0 {
        return Err(Error::validation(format!("profile argument must exceed 1, got {n}")));
    }
    Ok(if p > 0.0 {
        n.powf(r / p) * n.ln().powf((s - q) / p)
    } else {
        (n.powf(r / (q + 1.0)) * n.ln().powf(s / (q + 1.0))).exp()
    })
}

/// Per-instance surrogate of the summed separation inequality:
/// `cut(domain) <= k * Δ_host * Σ_s |C'_s|`, with the left side exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SepSumReport {
    pub lhs_cut: usize,
    pub rhs: usize,
    pub holds: bool,
    pub all_cuts_minimum: bool,
    pub warning: Option<String>,
}

pub fn sep_sum_check(w: &Wiring, trace: &CutPullbackTrace) -> Result<SepSumReport> {
    let cut = min_cut_set_with_cap(&w.domain, CutMode::Exact, EXACT_CUT_CAP)?;
    let lhs_cut = cut.cut_set.len();
    let holds = lhs_cut <= trace.rhs || w.domain.vertex_count() < 2;
    Ok(SepSumReport {
        lhs_cut,
        rhs: trace.rhs,
        holds,
        all_cuts_minimum: trace.all_cuts_minimum,
        warning: (!trace.all_cuts_minimum).then(|| {
            "host cuts are heuristic: the right-hand side overestimates the minimal bound".into()
        }),
    })
}
