//! Perturbing a thick embedding into a coarse wiring of a net graph: vertex
//! points snap to their nearest net vertices, edge paths are subdivided into
//! chains with bounded metric gaps, and consecutive snaps are joined by
//! shortest paths in the net.

use crate::error::{Error, Result};
use crate::geometry::embed::ThickEmbedding;
use crate::geometry::space::Point;
use crate::hosts::{HostHandle, HostVertex};
use crate::wiring::{verify_coarse_wiring, Walk, Wiring, WiringReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A finite net inside a model space: a host graph whose vertices carry
/// positions, with a covering radius beyond which snapping fails.
#[derive(Debug, Clone)]
pub struct NetSpec {
    pub host: HostHandle,
    pub points: Vec<(HostVertex, Point)>,
    pub cover_radius: f64,
}

/// A lattice net over the box product of `[0, extents[i]-1]` under the
/// grid host on the enclosing cube, with identity positions.
pub fn box_lattice_net(extents: &[i64], cover_radius: f64) -> Result<NetSpec> {
    if extents.is_empty() || extents.iter().any(|&e| e < 1) {
        return Err(Error::validation("box extents must be positive"));
    }
    let side = extents.iter().copied().max().unwrap();
    let cube = crate::hosts::grid(extents.len(), side)?;
    let mut coords = vec![0i64; extents.len()];
    let mut inside = std::collections::BTreeSet::new();
    loop {
        inside.insert(HostVertex::grid(
            &coords.iter().map(|&c| c as i32).collect::<Vec<_>>(),
        ));
        let mut i = extents.len();
        loop {
            if i == 0 {
                let (graph, verts) = cube.materialize(&inside)?;
                let host = crate::hosts::explicit(graph);
                let points = verts
                    .iter()
                    .enumerate()
                    .map(|(idx, hv)| {
                        let HostVertex::Grid(c) = hv else { unreachable!() };
                        (
                            HostVertex::Explicit(idx as u32),
                            c.iter().map(|&x| x as f64).collect::<Point>(),
                        )
                    })
                    .collect();
                return Ok(NetSpec {
                    host,
                    points,
                    cover_radius,
                });
            }
            i -= 1;
            coords[i] += 1;
            if coords[i] < extents[i] {
                break;
            }
            coords[i] = 0;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarsenReport {
    pub wiring_report: WiringReport,
    pub max_snap_distance: f64,
    pub chain_points: usize,
}

fn snap<'a>(net: &'a NetSpec, e: &ThickEmbedding, p: &[f64]) -> Result<(&'a HostVertex, f64)> {
    let mut best: Option<(&HostVertex, f64)> = None;
    for (hv, q) in &net.points {
        let d = e.space.distance(p, q)?;
        match best {
            Some((_, bd)) if bd <= d => {}
            _ => best = Some((hv, d)),
        }
    }
    let (hv, d) = best.ok_or_else(|| Error::validation("net has no points"))?;
    if d > net.cover_radius {
        return Err(Error::validation(format!(
            "net does not cover the image: point {p:?} is {d} away, cover radius {}",
            net.cover_radius
        )));
    }
    Ok((hv, d))
}

/// Converts a certified `thickness`-thick embedding into a coarse wiring of
/// the net: snap vertices, subdivide each edge path into a minimal chain
/// with metric gaps at most `2 * thickness`, snap the chain, and join
/// consecutive snaps by shortest net paths.
pub fn coarsen_embedding(
    e: &ThickEmbedding,
    net: &NetSpec,
    thickness: f64,
) -> Result<(Wiring, CoarsenReport)> {
    e.validate()?;
    if net.points.is_empty() {
        return Err(Error::validation("net has no points"));
    }
    let mut max_snap = 0.0f64;
    let mut vertex_map = Vec::with_capacity(e.vertex_points.len());
    for p in &e.vertex_points {
        let (hv, d) = snap(net, e, p)?;
        max_snap = max_snap.max(d);
        vertex_map.push(hv.clone());
    }

    let mut chain_points = 0usize;
    let mut edge_walks = BTreeMap::new();
    for (&(u, v), path) in &e.edge_paths {
        // dense samples along the path, then a greedy minimal chain with
        // consecutive metric gaps <= 2 * thickness
        let mut samples: Vec<Point> = vec![path.points[0].clone()];
        for (a, b) in path.segments() {
            let lip = e.space.segment_lipschitz(a, b);
            let coord_len = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            let pieces = ((lip * coord_len) / (thickness / 4.0)).ceil().max(1.0) as usize;
            for i in 1..=pieces {
                let t = i as f64 / pieces as f64;
                samples.push(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect());
            }
        }
        let mut chain: Vec<usize> = vec![0];
        let mut cursor = 0usize;
        while cursor + 1 < samples.len() {
            let mut next = cursor;
            for cand in (cursor + 1)..samples.len() {
                if e.space.distance_unchecked(&samples[cursor], &samples[cand])
                    <= 2.0 * thickness
                {
                    next = cand;
                }
            }
            if next == cursor {
                return Err(Error::structural(
                    "path sampling too coarse for the requested thickness",
                ));
            }
            chain.push(next);
            cursor = next;
        }
        chain_points += chain.len();

        let mut snapped: Vec<HostVertex> = Vec::with_capacity(chain.len());
        for &idx in &chain {
            let (hv, d) = snap(net, e, &samples[idx])?;
            max_snap = max_snap.max(d);
            if snapped.last() != Some(hv) {
                snapped.push(hv.clone());
            }
        }
        // endpoints coincide with the snapped vertex images by construction
        let mut walk_vertices: Vec<HostVertex> = vec![snapped[0].clone()];
        for hop in snapped.windows(2) {
            let piece = net
                .host
                .shortest_path(&hop[0], &hop[1])?
                .ok_or_else(|| Error::validation("net graph is disconnected between snaps"))?;
            for step in &piece[1..] {
                if walk_vertices.last() != Some(step) {
                    walk_vertices.push(step.clone());
                }
            }
        }
        edge_walks.insert((u, v), Walk::new(walk_vertices)?);
    }

    let wiring = Wiring::new(e.graph.clone(), net.host.clone(), vertex_map, edge_walks)?;
    let wiring_report = verify_coarse_wiring(&wiring)?;
    Ok((
        wiring,
        CoarsenReport {
            wiring_report,
            max_snap_distance: max_snap,
            chain_points,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::embed::complete_slab_embedding;
    use crate::graphs::Graph;

    #[test]
    fn slab_coarsens_to_a_lattice_wiring() {
        let e = complete_slab_embedding(3).unwrap();
        let net = box_lattice_net(&[3, 3, 2], 0.75).unwrap();
        let (wiring, report) = coarsen_embedding(&e, &net, 1.0).unwrap();
        assert!(report.wiring_report.k >= 1);
        assert!(report.max_snap_distance <= 0.75);
        assert_eq!(wiring.domain, Graph::complete(3));
        // image volume comparable to the embedding scene
        assert!(report.wiring_report.volume <= 18);
    }

    #[test]
    fn single_vertex_coarsens_trivially() {
        let e = complete_slab_embedding(1).unwrap();
        let net = box_lattice_net(&[1, 1, 1], 0.5).unwrap();
        let (wiring, _) = coarsen_embedding(&e, &net, 1.0).unwrap();
        assert_eq!(wiring.domain.vertex_count(), 1);
        assert!(wiring.edge_walks.is_empty());
    }

    #[test]
    fn uncovered_image_errors() {
        let e = complete_slab_embedding(3).unwrap();
        let net = box_lattice_net(&[1, 1, 1], 0.4).unwrap();
        assert!(coarsen_embedding(&e, &net, 1.0).is_err());
    }

    #[test]
    fn reported_k_stays_below_the_density_bound() {
        // instance bound from net-density constants: with λ the measured
        // quasi-isometry constant of the net inside the slab and T the
        // thickness, the vertex multiplicity is at most C_{3λ+T/2}/c_{T/2}
        // and the edge multiplicity at most 2d C_{λ(L+2)+T/2}/c_{T/2} with
        // L = 1 + 2λT + λ².
        let n = 3usize;
        let e = complete_slab_embedding(n).unwrap();
        let net = box_lattice_net(&[n as i64, n as i64, 2], 0.75).unwrap();
        let thickness = 1.0;
        let (_, report) = coarsen_embedding(&e, &net, thickness).unwrap();

        // measure λ on the supplied net (both quasi-isometry directions)
        let space = &e.space;
        let mut lambda = 1.0f64;
        for (i, (hu, pu)) in net.points.iter().enumerate() {
            for (hv, pv) in net.points.iter().skip(i + 1) {
                let dm = space.distance(pu, pv).unwrap();
                let dy = net.host.distance(hu, hv).unwrap().unwrap() as f64;
                while dy > lambda * dm + lambda || dm > lambda * dy + lambda {
                    lambda += 1.0;
                }
            }
        }

        // max-metric ball volumes inside the slab region [0,n-1]^2 x [0,1]
        let region = [(n - 1) as f64, (n - 1) as f64, 1.0];
        let c_r = |r: f64| -> f64 {
            // worst corner: each axis contributes min(r, extent)
            region.iter().map(|&ext| r.min(ext)).product()
        };
        let big_c_r = |r: f64| -> f64 {
            region.iter().map(|&ext| (2.0 * r).min(ext)).product()
        };

        let t_half = thickness / 2.0;
        let d = e.graph.max_degree() as f64;
        let l = 1.0 + 2.0 * lambda * thickness + lambda * lambda;
        let vertex_bound = big_c_r(3.0 * lambda + t_half) / c_r(t_half);
        let edge_bound = 2.0 * d * big_c_r(lambda * (l + 2.0) + t_half) / c_r(t_half);
        let k_bound = vertex_bound.max(edge_bound);
        assert!(
            (report.wiring_report.k as f64) <= k_bound,
            "reported k = {} above the density bound {k_bound}",
            report.wiring_report.k
        );
    }
}
