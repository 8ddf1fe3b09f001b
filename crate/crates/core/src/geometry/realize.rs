//! Piecewise-linear realization of grid wirings in Euclidean space.
//!
//! The wiring is first made injective into the `T`-thickening of the grid.
//! Every lattice cell carries the same `T` offset points, and every edge
//! type (fiber pair or axis step with a layer pair) carries the same
//! two-segment polyline through a perturbed midpoint, so the whole scene is
//! periodic under lattice translations. Only finitely many feature-type
//! pairs within one cell of translation need pairwise-distance
//! certification; everything farther is separated by the lattice spacing.
//! The certified minimum is then rescaled to 1.

use crate::error::{Error, Result};
use crate::geometry::embed::{PolylinePath, ThickEmbedding};
use crate::geometry::measure::tube_volume_bound;
use crate::geometry::space::ModelSpace;
use crate::hosts::{HostHandle, HostVertex};
use crate::wiring::{make_injective, verify_coarse_wiring, Wiring};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Pairs farther than one cell of translation are at least this far apart
/// (lattice spacing minus the maximal feature extent), so the certification
/// only scans translations in `{-1, 0, 1}^dim`.
const FAR_SEPARATION: f64 = 0.3;
/// Resample offsets while the certified minimum is below this floor.
const EPS_FLOOR: f64 = 1e-12;
const OFFSET_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum FType {
    Vert(u32),
    /// Both endpoints in one fiber: layers (i, j), i < j.
    Fiber(u32, u32),
    /// Step along `axis`: layer `i` at the base cell, layer `j` one cell up.
    Cross(usize, u32, u32),
}

#[derive(Debug)]
struct TypeGeometry {
    ftype: FType,
    /// Polyline points in cell-0 coordinates (1 point for vertices, 3 for edges).
    points: Vec<Vec<f64>>,
    bbox: Vec<(f64, f64)>,
    /// Endpoints as (cell displacement, layer).
    ends: Vec<(Vec<i32>, u32)>,
}

#[derive(Debug)]
pub(crate) struct PeriodicRealization {
    dim: usize,
    t: u32,
    offsets: Vec<Vec<f64>>,
    fiber_mid: HashMap<(u32, u32), Vec<f64>>,
    cross_mid: HashMap<(usize, u32, u32), Vec<f64>>,
    pub(crate) eps: f64,
    pub(crate) attempts: usize,
}

fn sample_in_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if p.iter().map(|c| c * c).sum::<f64>().sqrt() <= radius {
            return p;
        }
    }
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn build_types(real: &PeriodicRealization) -> Vec<TypeGeometry> {
    let dim = real.dim;
    let t = real.t;
    let mut out = Vec::new();
    let bbox_of = |points: &[Vec<f64>]| -> Vec<(f64, f64)> {
        let mut bb = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
        for p in points {
            for (i, &c) in p.iter().enumerate() {
                bb[i].0 = bb[i].0.min(c);
                bb[i].1 = bb[i].1.max(c);
            }
        }
        bb
    };
    for l in 1..=t {
        let points = vec![real.offsets[(l - 1) as usize].clone()];
        out.push(TypeGeometry {
            ftype: FType::Vert(l),
            bbox: bbox_of(&points),
            ends: vec![(vec![0; dim], l)],
            points,
        });
    }
    for i in 1..=t {
        for j in (i + 1)..=t {
            let oi = &real.offsets[(i - 1) as usize];
            let oj = &real.offsets[(j - 1) as usize];
            let mid = add(
                &oi.iter().zip(oj).map(|(x, y)| (x + y) / 2.0).collect::<Vec<_>>(),
                &real.fiber_mid[&(i, j)],
            );
            let points = vec![oi.clone(), mid, oj.clone()];
            out.push(TypeGeometry {
                ftype: FType::Fiber(i, j),
                bbox: bbox_of(&points),
                ends: vec![(vec![0; dim], i), (vec![0; dim], j)],
                points,
            });
        }
    }
    for axis in 0..dim {
        let mut unit = vec![0.0; dim];
        unit[axis] = 1.0;
        let mut cell = vec![0i32; dim];
        cell[axis] = 1;
        for i in 1..=t {
            for j in 1..=t {
                let oi = &real.offsets[(i - 1) as usize];
                let oj_shift = add(&real.offsets[(j - 1) as usize], &unit);
                let mid = add(
                    &oi.iter()
                        .zip(&oj_shift)
                        .map(|(x, y)| (x + y) / 2.0)
                        .collect::<Vec<_>>(),
                    &real.cross_mid[&(axis, i, j)],
                );
                let points = vec![oi.clone(), mid, oj_shift.clone()];
                out.push(TypeGeometry {
                    ftype: FType::Cross(axis, i, j),
                    bbox: bbox_of(&points),
                    ends: vec![(vec![0; dim], i), (cell.clone(), j)],
                    points,
                });
            }
        }
    }
    out
}

fn point_seg_distance(p: &[f64], a: &[f64], b: &[f64], shift: &[f64]) -> f64 {
    // distance from p to the segment (a + shift, b + shift)
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..p.len() {
        let d = b[i] - a[i];
        num += (p[i] - a[i] - shift[i]) * d;
        den += d * d;
    }
    let t = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
    let mut sq = 0.0;
    for i in 0..p.len() {
        let c = a[i] + shift[i] + t * (b[i] - a[i]);
        sq += (p[i] - c) * (p[i] - c);
    }
    sq.sqrt()
}

fn seg_seg_distance(a0: &[f64], a1: &[f64], b0: &[f64], b1: &[f64], shift: &[f64]) -> f64 {
    let sb0 = add(b0, shift);
    let sb1 = add(b1, shift);
    crate::geometry::embed::coord_segment_distance(a0, a1, &sb0, &sb1)
}

fn type_pair_distance(a: &TypeGeometry, b: &TypeGeometry, shift: &[f64]) -> f64 {
    let zeros = vec![0.0; shift.len()];
    match (a.points.len(), b.points.len()) {
        (1, 1) => a.points[0]
            .iter()
            .zip(&b.points[0])
            .zip(shift)
            .map(|((x, y), s)| (x - y - s) * (x - y - s))
            .sum::<f64>()
            .sqrt(),
        (1, _) => b
            .points
            .windows(2)
            .map(|w| point_seg_distance(&a.points[0], &w[0], &w[1], shift))
            .fold(f64::INFINITY, f64::min),
        (_, 1) => {
            let shifted = add(&b.points[0], shift);
            a.points
                .windows(2)
                .map(|w| point_seg_distance(&shifted, &w[0], &w[1], &zeros))
                .fold(f64::INFINITY, f64::min)
        }
        _ => {
            let mut best = f64::INFINITY;
            for wa in a.points.windows(2) {
                for wb in b.points.windows(2) {
                    best = best.min(seg_seg_distance(&wa[0], &wa[1], &wb[0], &wb[1], shift));
                }
            }
            best
        }
    }
}

fn certify(real: &PeriodicRealization) -> f64 {
    let dim = real.dim;
    let types = build_types(real);
    let mut eps = FAR_SEPARATION;

    let mut deltas = Vec::new();
    let mut delta = vec![-1i32; dim];
    loop {
        deltas.push(delta.clone());
        let mut i = dim;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            delta[i] += 1;
            if delta[i] <= 1 {
                break;
            }
            delta[i] = -1;
        }
        if delta.iter().all(|&x| x == -1) {
            break;
        }
    }

    for (ai, a) in types.iter().enumerate() {
        for b in &types[ai..] {
            for delta in &deltas {
                if a.ftype == b.ftype && delta.iter().all(|&x| x == 0) {
                    continue;
                }
                // incidence: shared (cell, layer) endpoint
                let incident = a.ends.iter().any(|(ca, la)| {
                    b.ends.iter().any(|(cb, lb)| {
                        la == lb
                            && ca
                                .iter()
                                .zip(cb)
                                .zip(delta)
                                .all(|((x, y), d)| *x == *y + *d)
                    })
                });
                if incident {
                    continue;
                }
                // bounding box reject against the current minimum
                let mut gap_hit = false;
                for i in 0..dim {
                    let gap = (b.bbox[i].0 + delta[i] as f64 - a.bbox[i].1)
                        .max(a.bbox[i].0 - (b.bbox[i].1 + delta[i] as f64))
                        .max(0.0);
                    if gap >= eps {
                        gap_hit = true;
                        break;
                    }
                }
                if gap_hit {
                    continue;
                }
                let shift: Vec<f64> = delta.iter().map(|&x| x as f64).collect();
                let d = type_pair_distance(a, b, &shift);
                eps = eps.min(d);
            }
        }
    }
    eps
}

fn build_periodic(dim: usize, t: u32, seed: u64) -> Result<PeriodicRealization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=OFFSET_ATTEMPTS {
        let offsets: Vec<Vec<f64>> = (0..t).map(|_| sample_in_ball(&mut rng, dim, 0.25)).collect();
        let mut fiber_mid = HashMap::new();
        for i in 1..=t {
            for j in (i + 1)..=t {
                fiber_mid.insert((i, j), sample_in_ball(&mut rng, dim, 0.125));
            }
        }
        let mut cross_mid = HashMap::new();
        for axis in 0..dim {
            for i in 1..=t {
                for j in 1..=t {
                    cross_mid.insert((axis, i, j), sample_in_ball(&mut rng, dim, 0.125));
                }
            }
        }
        let mut real = PeriodicRealization {
            dim,
            t,
            offsets,
            fiber_mid,
            cross_mid,
            eps: 0.0,
            attempts: attempt,
        };
        let eps = certify(&real);
        if eps >= EPS_FLOOR {
            real.eps = eps;
            return Ok(real);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no offset sample reached separation {EPS_FLOOR} in {OFFSET_ATTEMPTS} attempts"
    )))
}

fn periodic_cache(dim: usize, t: u32, seed: u64) -> Result<Arc<PeriodicRealization>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32, u64), Arc<PeriodicRealization>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(found) = guard.get(&(dim, t, seed)) {
        return Ok(found.clone());
    }
    let built = Arc::new(build_periodic(dim, t, seed)?);
    guard.insert((dim, t, seed), built.clone());
    Ok(built)
}

/// Report of a realization run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizeReport {
    pub t: u32,
    pub offset_attempts: usize,
    /// Certified minimum feature separation at lattice spacing 1.
    pub eps_unscaled: f64,
    /// Similarity factor applied so the separation reaches 1.
    pub scale: f64,
    /// Certified thickness of the returned embedding.
    pub certified_eps: f64,
    pub wiring_volume: usize,
    pub wiring_diameter: Option<u64>,
    /// Bounding-box diagonal of the scaled scene.
    pub diameter_upper: f64,
    /// Tube-sum upper bound on the volume of the scaled scene.
    pub volume_upper: f64,
    pub diameter_ratio: Option<f64>,
    pub volume_ratio: f64,
}

/// Realizes a verified coarse `k`-wiring into `Q^dim_r` (`dim >= 3`, domain
/// degree at most `d`) as a certified 1-thick piecewise-linear embedding of
/// the domain graph in Euclidean `dim`-space.
pub fn realize_grid_wiring(
    w: &Wiring,
    k: usize,
    d: usize,
    seed: u64,
) -> Result<(ThickEmbedding, RealizeReport)> {
    let dim = match &w.host {
        HostHandle::Grid { dim, .. } if *dim >= 3 => *dim,
        other => {
            return Err(Error::validation(format!(
                "realization needs a grid host of dimension >= 3, got {other:?}"
            )))
        }
    };
    let base_report = verify_coarse_wiring(w)?;
    let inj = make_injective(w, d, k)?;
    let t = (k * (d + 1)) as u32;
    let real = periodic_cache(dim, t, seed)?;

    let scale = (1.0 + 1e-9) / real.eps;
    let vertex_point = |hv: &HostVertex| -> Result<Vec<f64>> {
        let HostVertex::Thick { base, layer } = hv else {
            return Err(Error::structural("expected a thickened grid vertex"));
        };
        let HostVertex::Grid(cell) = base.as_ref() else {
            return Err(Error::structural("expected a grid cell"));
        };
        Ok((0..dim)
            .map(|i| (cell[i] as f64 + real.offsets[(*layer - 1) as usize][i]) * scale)
            .collect())
    };
    let midpoint = |a: &HostVertex, b: &HostVertex| -> Result<Vec<f64>> {
        let (HostVertex::Thick { base: ba, layer: la }, HostVertex::Thick { base: bb, layer: lb }) =
            (a, b)
        else {
            return Err(Error::structural("expected thickened grid vertices"));
        };
        let (HostVertex::Grid(ca), HostVertex::Grid(cb)) = (ba.as_ref(), bb.as_ref()) else {
            return Err(Error::structural("expected grid cells"));
        };
        if ca == cb {
            let (i, j) = (*la.min(lb), *la.max(lb));
            let mu = &real.fiber_mid[&(i, j)];
            return Ok((0..dim)
                .map(|x| {
                    (ca[x] as f64
                        + (real.offsets[(i - 1) as usize][x] + real.offsets[(j - 1) as usize][x])
                            / 2.0
                        + mu[x])
                        * scale
                })
                .collect());
        }
        let axis = (0..dim)
            .find(|&x| ca[x] != cb[x])
            .ok_or_else(|| Error::structural("degenerate step"))?;
        let (cell, i, j) = if cb[axis] == ca[axis] + 1 {
            (ca, *la, *lb)
        } else {
            (cb, *lb, *la)
        };
        let mu = &real.cross_mid[&(axis, i, j)];
        Ok((0..dim)
            .map(|x| {
                let unit = if x == axis { 1.0 } else { 0.0 };
                (cell[x] as f64
                    + (real.offsets[(i - 1) as usize][x]
                        + real.offsets[(j - 1) as usize][x]
                        + unit)
                        / 2.0
                    + mu[x])
                    * scale
            })
            .collect())
    };

    let vertex_points: Vec<Vec<f64>> = inj
        .vertex_map
        .iter()
        .map(|hv| vertex_point(hv))
        .collect::<Result<_>>()?;
    let mut edge_paths = std::collections::BTreeMap::new();
    for (&(u, v), walk) in &inj.edge_walks {
        let verts = walk.vertices();
        let mut points = Vec::with_capacity(2 * verts.len());
        points.push(vertex_point(&verts[0])?);
        for pair in verts.windows(2) {
            points.push(midpoint(&pair[0], &pair[1])?);
            points.push(vertex_point(&pair[1])?);
        }
        edge_paths.insert((u, v), PolylinePath::new(points));
    }

    // The periodic certificate separates all non-incident thickened features,
    // which covers path self-intersections; the quadratic validate pass is
    // skipped on purpose for large scenes.
    let embedding = ThickEmbedding {
        graph: w.domain.clone(),
        space: ModelSpace::EuclideanL2(dim),
        vertex_points,
        edge_paths,
    };

    let mut bbox = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
    let mut absorb = |p: &Vec<f64>| {
        for (i, &c) in p.iter().enumerate() {
            bbox[i].0 = bbox[i].0.min(c);
            bbox[i].1 = bbox[i].1.max(c);
        }
    };
    for p in &embedding.vertex_points {
        absorb(p);
    }
    for path in embedding.edge_paths.values() {
        for p in &path.points {
            absorb(p);
        }
    }
    let diameter_upper = bbox
        .iter()
        .map(|&(lo, hi)| if hi >= lo { (hi - lo) * (hi - lo) } else { 0.0 })
        .sum::<f64>()
        .sqrt();
    let volume_upper = tube_volume_bound(&embedding)?.upper_bound;

    let report = RealizeReport {
        t,
        offset_attempts: real.attempts,
        eps_unscaled: real.eps,
        scale,
        certified_eps: real.eps * scale,
        wiring_volume: base_report.volume,
        wiring_diameter: base_report.diameter,
        diameter_upper,
        volume_upper,
        diameter_ratio: base_report
            .diameter
            .filter(|&d| d > 0)
            .map(|d| diameter_upper / d as f64),
        volume_ratio: volume_upper / base_report.volume.max(1) as f64,
    };
    Ok((embedding, report))
}
