//! Certified thickness verification.
//!
//! The feature pairs of an embedding (distinct vertices, a vertex against a
//! non-incident edge, two disjoint edges) must stay at distance at least ε.
//! For the polyline scenes built here every segment is axis-parallel in its
//! chart, so pair distances have closed forms in all supported spaces;
//! anything else falls back to adaptive bisection with Lipschitz-corrected
//! sampling and bounding-box pruning.

use crate::error::Result;
use crate::geometry::embed::ThickEmbedding;
use crate::geometry::space::ModelSpace;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    Pass,
    Fail,
    /// The subdivision budget ran out before the bound could be settled.
    Inconclusive,
}

/// Certificate produced by [`verify_thickness`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThicknessCertificate {
    pub target_eps: f64,
    pub tol: f64,
    /// Proven lower bound on the minimum feature distance. Pairs certified
    /// above the target contribute the target itself, so this never exceeds
    /// `target_eps` (it is `+inf` only when there are no pairs).
    pub certified_lower_bound: f64,
    pub status: CertStatus,
    /// Every pair bound came from a closed form.
    pub exact: bool,
    /// Largest metric cell radius accepted by the adaptive sampler.
    pub max_sampling_step: f64,
    /// Largest metric Lipschitz constant used for sampling corrections.
    pub lipschitz: f64,
    pub pairs_checked: usize,
    /// Smallest certified margins, with pair descriptions.
    pub worst_pairs: Vec<(String, f64)>,
}

#[derive(Clone, Copy)]
enum Shape<'a> {
    Point(&'a [f64]),
    Segment(&'a [f64], &'a [f64]),
}

impl<'a> Shape<'a> {
    fn bbox(&self) -> Vec<(f64, f64)> {
        match self {
            Shape::Point(p) => p.iter().map(|&c| (c, c)).collect(),
            Shape::Segment(a, b) => a
                .iter()
                .zip(b.iter())
                .map(|(&x, &y)| (x.min(y), x.max(y)))
                .collect(),
        }
    }

    fn endpoints(&self) -> (&'a [f64], &'a [f64]) {
        match self {
            Shape::Point(p) => (p, p),
            Shape::Segment(a, b) => (a, b),
        }
    }
}

fn interval_gap(lo: f64, hi: f64, x: f64) -> f64 {
    (lo - x).max(x - hi).max(0.0)
}

fn interval_interval_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.0 - a.1).max(a.0 - b.1).max(0.0)
}

/// Index of the single varying coordinate, `None` for diagonal segments.
fn single_axis(a: &[f64], b: &[f64]) -> Option<usize> {
    let mut axis = None;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            if axis.is_some() {
                return None;
            }
            axis = Some(i);
        }
    }
    axis
}

/// Exact minimum distance between two shapes, when a closed form applies.
fn exact_min_distance(space: &ModelSpace, a: Shape, b: Shape) -> Option<f64> {
    match space {
        ModelSpace::EuclideanL2(_) => Some(euclid_l2_min(a, b)),
        ModelSpace::EuclideanLinf(_) => linf_min(a, b),
        ModelSpace::HalfSpace(q) => halfspace_min(*q, a, b),
        ModelSpace::ProductL2(_) | ModelSpace::ProductMax(_) => product_min(space, a, b),
    }
}

fn euclid_l2_min(a: Shape, b: Shape) -> f64 {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    crate::geometry::embed::coord_segment_distance(a0, a1, b0, b1)
}

/// Max-metric distance for axis-parallel shapes: every coordinate
/// contributes an independent interval gap, so the minimum of the maximum
/// splits across coordinates.
fn linf_min(a: Shape, b: Shape) -> Option<f64> {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    let axis_a = if a0 == a1 { None } else { Some(single_axis(a0, a1)?) };
    let axis_b = if b0 == b1 { None } else { Some(single_axis(b0, b1)?) };
    let mut worst: f64 = 0.0;
    for i in 0..a0.len() {
        let ra = (a0[i].min(a1[i]), a0[i].max(a1[i]));
        let rb = (b0[i].min(b1[i]), b0[i].max(b1[i]));
        let gap = match (axis_a == Some(i), axis_b == Some(i)) {
            (false, false) => (a0[i] - b0[i]).abs(),
            (true, false) => interval_gap(ra.0, ra.1, b0[i]),
            (false, true) => interval_gap(rb.0, rb.1, a0[i]),
            (true, true) => interval_interval_gap(ra, rb),
        };
        worst = worst.max(gap);
    }
    Some(worst)
}

enum HalfShape {
    Point,
    Horizontal(usize),
    Vertical,
}

fn half_classify(q: usize, a0: &[f64], a1: &[f64]) -> Option<HalfShape> {
    if a0 == a1 {
        return Some(HalfShape::Point);
    }
    match single_axis(a0, a1)? {
        i if i == q - 1 => Some(HalfShape::Vertical),
        i => Some(HalfShape::Horizontal(i)),
    }
}

fn acosh_dist(num_sq: f64, z1: f64, z2: f64) -> f64 {
    (1.0 + num_sq / (2.0 * z1 * z2)).acosh()
}

/// Minimizes `(d_sq + (z - s)^2) / (2 z s)` over `s` in `[w0, w1]`; the
/// unconstrained optimum is `s = sqrt(d_sq + z^2)`.
fn min_over_height(d_sq: f64, z: f64, w0: f64, w1: f64) -> f64 {
    let s = (d_sq + z * z).sqrt().clamp(w0, w1);
    acosh_dist(d_sq + (z - s) * (z - s), z, s)
}

fn halfspace_min(q: usize, a: Shape, b: Shape) -> Option<f64> {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    let sa = half_classify(q, a0, a1)?;
    let sb = half_classify(q, b0, b1)?;
    let z = q - 1;

    // squared horizontal separation with per-coordinate interval gaps
    let horiz_sq = |skip_a: Option<usize>, skip_b: Option<usize>| -> f64 {
        let mut total = 0.0;
        for i in 0..z {
            let ra = (a0[i].min(a1[i]), a0[i].max(a1[i]));
            let rb = (b0[i].min(b1[i]), b0[i].max(b1[i]));
            let gap = match (skip_a == Some(i), skip_b == Some(i)) {
                (false, false) => (a0[i] - b0[i]).abs(),
                (true, false) => interval_gap(ra.0, ra.1, b0[i]),
                (false, true) => interval_gap(rb.0, rb.1, a0[i]),
                (true, true) => interval_interval_gap(ra, rb),
            };
            total += gap * gap;
        }
        total
    };

    Some(match (&sa, &sb) {
        (HalfShape::Point, HalfShape::Point)
        | (HalfShape::Point, HalfShape::Horizontal(_))
        | (HalfShape::Horizontal(_), HalfShape::Point)
        | (HalfShape::Horizontal(_), HalfShape::Horizontal(_)) => {
            let ax = if let HalfShape::Horizontal(i) = sa { Some(i) } else { None };
            let bx = if let HalfShape::Horizontal(i) = sb { Some(i) } else { None };
            let d_sq = horiz_sq(ax, bx) + (a0[z] - b0[z]) * (a0[z] - b0[z]);
            acosh_dist(d_sq, a0[z], b0[z])
        }
        (HalfShape::Point | HalfShape::Horizontal(_), HalfShape::Vertical) => {
            let ax = if let HalfShape::Horizontal(i) = sa { Some(i) } else { None };
            let d_sq = horiz_sq(ax, None);
            let (w0, w1) = (b0[z].min(b1[z]), b0[z].max(b1[z]));
            min_over_height(d_sq, a0[z], w0, w1)
        }
        (HalfShape::Vertical, HalfShape::Point | HalfShape::Horizontal(_)) => {
            let bx = if let HalfShape::Horizontal(i) = sb { Some(i) } else { None };
            let d_sq = horiz_sq(None, bx);
            let (w0, w1) = (a0[z].min(a1[z]), a0[z].max(a1[z]));
            min_over_height(d_sq, b0[z], w0, w1)
        }
        (HalfShape::Vertical, HalfShape::Vertical) => {
            // no interior critical point for positive horizontal separation,
            // so the minimum lies on one of the four parameter-box edges
            let d_sq = horiz_sq(None, None);
            let ra = (a0[z].min(a1[z]), a0[z].max(a1[z]));
            let rb = (b0[z].min(b1[z]), b0[z].max(b1[z]));
            min_over_height(d_sq, ra.0, rb.0, rb.1)
                .min(min_over_height(d_sq, ra.1, rb.0, rb.1))
                .min(min_over_height(d_sq, rb.0, ra.0, ra.1))
                .min(min_over_height(d_sq, rb.1, ra.0, ra.1))
        }
    })
}

/// Exact product minimum for shapes whose segments vary inside a single
/// factor: factor minima are attained simultaneously because the two
/// parameters touch each factor independently (or jointly in one factor
/// while the rest stay constant).
fn product_min(space: &ModelSpace, a: Shape, b: Shape) -> Option<f64> {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    let factors = space.factors();
    let factor_of = |p0: &[f64], p1: &[f64]| -> Option<Option<usize>> {
        if p0 == p1 {
            return Some(None); // a point varies in no factor
        }
        let mut owner = None;
        for (idx, (off, f)) in factors.iter().enumerate() {
            let range = *off..off + f.dim();
            if p0[range.clone()] != p1[range] {
                if owner.is_some() {
                    return None;
                }
                owner = Some(idx);
            }
        }
        Some(owner)
    };
    factor_of(a0, a1)?;
    factor_of(b0, b1)?;

    let mut mins = Vec::with_capacity(factors.len());
    for (off, f) in &factors {
        let range = *off..off + f.dim();
        let fa = if a0[range.clone()] == a1[range.clone()] {
            Shape::Point(&a0[range.clone()])
        } else {
            Shape::Segment(&a0[range.clone()], &a1[range.clone()])
        };
        let fb = if b0[range.clone()] == b1[range.clone()] {
            Shape::Point(&b0[range.clone()])
        } else {
            Shape::Segment(&b0[range.clone()], &b1[range.clone()])
        };
        mins.push(exact_min_distance(f, fa, fb)?);
    }
    Some(match space {
        ModelSpace::ProductMax(_) => mins.into_iter().fold(0.0, f64::max),
        _ => mins.iter().map(|d| d * d).sum::<f64>().sqrt(),
    })
}

/// Metric lower bound between two coordinate boxes.
fn box_lower_bound(space: &ModelSpace, ba: &[(f64, f64)], bb: &[(f64, f64)]) -> f64 {
    match space {
        ModelSpace::EuclideanL2(_) => ba
            .iter()
            .zip(bb)
            .map(|(&a, &b)| {
                let g = interval_interval_gap(a, b);
                g * g
            })
            .sum::<f64>()
            .sqrt(),
        ModelSpace::EuclideanLinf(_) => ba
            .iter()
            .zip(bb)
            .map(|(&a, &b)| interval_interval_gap(a, b))
            .fold(0.0, f64::max),
        ModelSpace::HalfSpace(q) => {
            let z = q - 1;
            let d_sq: f64 = ba
                .iter()
                .zip(bb)
                .map(|(&a, &b)| {
                    let g = interval_interval_gap(a, b);
                    g * g
                })
                .sum();
            let near = acosh_dist(d_sq, ba[z].1, bb[z].1);
            // vertical separation bound when height ranges are disjoint
            let vertical = if ba[z].1 < bb[z].0 {
                (bb[z].0 / ba[z].1).ln()
            } else if bb[z].1 < ba[z].0 {
                (ba[z].0 / bb[z].1).ln()
            } else {
                0.0
            };
            near.max(vertical)
        }
        ModelSpace::ProductL2(_) => {
            let mut total = 0.0;
            for (off, f) in space.factors() {
                let d = box_lower_bound(&f, &ba[off..off + f.dim()], &bb[off..off + f.dim()]);
                total += d * d;
            }
            total.sqrt()
        }
        ModelSpace::ProductMax(_) => {
            let mut best: f64 = 0.0;
            for (off, f) in space.factors() {
                best = best.max(box_lower_bound(
                    &f,
                    &ba[off..off + f.dim()],
                    &bb[off..off + f.dim()],
                ));
            }
            best
        }
    }
}

struct AdaptiveOutcome {
    lb: f64,
    ub: f64,
    max_step: f64,
    lipschitz: f64,
    exhausted: bool,
}

/// Certified minimum over a pair of (sub)segments by recursive bisection of
/// the parameter square: a cell is accepted once its center distance minus
/// the metric radii of both sub-segments clears `certify_at`.
fn adaptive_min(
    space: &ModelSpace,
    a: Shape,
    b: Shape,
    certify_at: f64,
    budget: usize,
) -> AdaptiveOutcome {
    let (a0, a1) = a.endpoints();
    let (b0, b1) = b.endpoints();
    let point_at = |p0: &[f64], p1: &[f64], t: f64| -> Vec<f64> {
        p0.iter().zip(p1).map(|(x, y)| x + t * (y - x)).collect()
    };
    let coord_len = |p0: &[f64], p1: &[f64]| -> f64 {
        p0.iter()
            .zip(p1)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };

    let mut stack = vec![(0.0f64, 1.0f64, 0.0f64, 1.0f64)];
    let mut ub = f64::INFINITY;
    let mut worst_unresolved = f64::INFINITY;
    let mut max_step: f64 = 0.0;
    let mut lipschitz: f64 = 0.0;
    let mut processed = 0usize;

    while let Some((ta0, ta1, tb0, tb1)) = stack.pop() {
        processed += 1;
        if processed > budget {
            stack.push((ta0, ta1, tb0, tb1));
            let lb = stack
                .iter()
                .map(|&(x0, x1, y0, y1)| {
                    let pa0 = point_at(a0, a1, x0);
                    let pa1 = point_at(a0, a1, x1);
                    let pb0 = point_at(b0, b1, y0);
                    let pb1 = point_at(b0, b1, y1);
                    box_lower_bound(
                        space,
                        &Shape::Segment(&pa0, &pa1).bbox(),
                        &Shape::Segment(&pb0, &pb1).bbox(),
                    )
                })
                .fold(worst_unresolved, f64::min);
            return AdaptiveOutcome {
                lb: lb.min(certify_at),
                ub,
                max_step,
                lipschitz,
                exhausted: true,
            };
        }
        let pa0 = point_at(a0, a1, ta0);
        let pa1 = point_at(a0, a1, ta1);
        let pb0 = point_at(b0, b1, tb0);
        let pb1 = point_at(b0, b1, tb1);

        let la = space.segment_lipschitz(&pa0, &pa1);
        let lb_const = space.segment_lipschitz(&pb0, &pb1);
        lipschitz = lipschitz.max(la).max(lb_const);
        let ra = la * coord_len(&pa0, &pa1) / 2.0;
        let rb = lb_const * coord_len(&pb0, &pb1) / 2.0;

        let ca = point_at(&pa0, &pa1, 0.5);
        let cb = point_at(&pb0, &pb1, 0.5);
        let dc = space.distance_unchecked(&ca, &cb);
        ub = ub.min(dc);

        let cell_lb = (dc - ra - rb).max(box_lower_bound(
            space,
            &Shape::Segment(&pa0, &pa1).bbox(),
            &Shape::Segment(&pb0, &pb1).bbox(),
        ));
        if cell_lb >= certify_at {
            max_step = max_step.max(ra + rb);
            continue;
        }
        if ra.max(rb) < 1e-14 {
            // cannot shrink further; record what this cell guarantees
            worst_unresolved = worst_unresolved.min(cell_lb.max(dc - ra - rb));
            max_step = max_step.max(ra + rb);
            continue;
        }
        if ra >= rb {
            let tm = (ta0 + ta1) / 2.0;
            stack.push((ta0, tm, tb0, tb1));
            stack.push((tm, ta1, tb0, tb1));
        } else {
            let tm = (tb0 + tb1) / 2.0;
            stack.push((ta0, ta1, tb0, tm));
            stack.push((ta0, ta1, tm, tb1));
        }
    }

    AdaptiveOutcome {
        lb: worst_unresolved.min(certify_at),
        ub,
        max_step,
        lipschitz,
        exhausted: false,
    }
}

/// Per-coordinate gap thresholds that guarantee metric distance >= eps:
/// a single coordinate gap of `thr[i]` already certifies the pair. For
/// half-space coordinates the threshold is scaled by the largest height in
/// the scene.
fn coarse_thresholds(space: &ModelSpace, eps: f64, boxes: &[Vec<(f64, f64)>]) -> Vec<f64> {
    fn fill(space: &ModelSpace, eps: f64, off: usize, boxes: &[Vec<(f64, f64)>], out: &mut Vec<f64>) {
        match space {
            ModelSpace::EuclideanL2(n) | ModelSpace::EuclideanLinf(n) => {
                for _ in 0..*n {
                    out.push(eps);
                }
            }
            ModelSpace::HalfSpace(q) => {
                let zmax = boxes
                    .iter()
                    .map(|b| b[off + q - 1].1)
                    .fold(0.0f64, f64::max);
                let g = zmax * (2.0 * (eps.cosh() - 1.0)).sqrt();
                for _ in 0..*q {
                    out.push(g);
                }
            }
            ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
                let mut inner = off;
                for f in fs {
                    fill(f, eps, inner, boxes, out);
                    inner += f.dim();
                }
            }
        }
    }
    let mut out = Vec::with_capacity(space.dim());
    fill(space, eps, 0, boxes, &mut out);
    out
}

fn coarse_far(ba: &[(f64, f64)], bb: &[(f64, f64)], thr: &[f64]) -> bool {
    ba.iter()
        .zip(bb)
        .zip(thr)
        .any(|((&a, &b), &t)| interval_interval_gap(a, b) >= t)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Owner {
    Vertex(u32),
    Edge(u32, u32),
}

impl Owner {
    fn incident(self, other: Owner) -> bool {
        match (self, other) {
            (Owner::Vertex(a), Owner::Vertex(b)) => a == b,
            (Owner::Vertex(a), Owner::Edge(u, v)) | (Owner::Edge(u, v), Owner::Vertex(a)) => {
                a == u || a == v
            }
            (Owner::Edge(a, b), Owner::Edge(u, v)) => a == u || a == v || b == u || b == v,
        }
    }

    fn describe(self) -> String {
        match self {
            Owner::Vertex(v) => format!("v{v}"),
            Owner::Edge(u, v) => format!("e({u},{v})"),
        }
    }
}

const ADAPTIVE_BUDGET: usize = 400_000;

/// Verifies ε-thickness: distinct vertices, vertices against non-incident
/// edges, and disjoint edges must all stay at distance ≥ ε. Passes when the
/// certified lower bound reaches `eps - tol`.
pub fn verify_thickness(e: &ThickEmbedding, eps: f64, tol: f64) -> Result<ThicknessCertificate> {
    e.validate()?;

    struct Element {
        owner: Owner,
        first: Vec<f64>,
        second: Vec<f64>,
        bbox: Vec<(f64, f64)>,
    }

    let mut elements: Vec<Element> = Vec::new();
    for (v, p) in e.vertex_points.iter().enumerate() {
        elements.push(Element {
            owner: Owner::Vertex(v as u32),
            first: p.clone(),
            second: p.clone(),
            bbox: Shape::Point(p).bbox(),
        });
    }
    for (&(u, v), path) in &e.edge_paths {
        for (a, b) in path.segments() {
            elements.push(Element {
                owner: Owner::Edge(u, v),
                first: a.clone(),
                second: b.clone(),
                bbox: Shape::Segment(a, b).bbox(),
            });
        }
    }

    let boxes: Vec<Vec<(f64, f64)>> = elements.iter().map(|el| el.bbox.clone()).collect();
    let coarse_gap = coarse_thresholds(&e.space, eps, &boxes);

    let mut certified = f64::INFINITY;
    let mut exact_all = true;
    let mut max_step: f64 = 0.0;
    let mut lipschitz: f64 = 0.0;
    let mut pairs_checked = 0usize;
    let mut inconclusive = false;
    let mut fail_witness: Option<(String, f64)> = None;
    let mut margins: Vec<(String, f64)> = Vec::new();

    for i in 0..elements.len() {
        for j in (i + 1)..elements.len() {
            let (ea, eb) = (&elements[i], &elements[j]);
            if ea.owner.incident(eb.owner) {
                continue;
            }
            pairs_checked += 1;
            if coarse_far(&ea.bbox, &eb.bbox, &coarse_gap)
                || box_lower_bound(&e.space, &ea.bbox, &eb.bbox) >= eps
            {
                certified = certified.min(eps);
                continue;
            }
            let sa = if ea.first == ea.second {
                Shape::Point(&ea.first)
            } else {
                Shape::Segment(&ea.first, &ea.second)
            };
            let sb = if eb.first == eb.second {
                Shape::Point(&eb.first)
            } else {
                Shape::Segment(&eb.first, &eb.second)
            };
            let desc = format!("{} / {}", ea.owner.describe(), eb.owner.describe());
            match exact_min_distance(&e.space, sa, sb) {
                Some(d) => {
                    certified = certified.min(d);
                    if d < eps {
                        margins.push((desc.clone(), d));
                    }
                    if d < eps - tol && fail_witness.is_none() {
                        fail_witness = Some((desc, d));
                    }
                }
                None => {
                    exact_all = false;
                    let out = adaptive_min(&e.space, sa, sb, eps - tol, ADAPTIVE_BUDGET);
                    max_step = max_step.max(out.max_step);
                    lipschitz = lipschitz.max(out.lipschitz);
                    certified = certified.min(out.lb);
                    if out.lb < eps - tol {
                        margins.push((desc.clone(), out.lb));
                        if out.ub < eps - tol {
                            if fail_witness.is_none() {
                                fail_witness = Some((desc, out.ub));
                            }
                        } else if out.exhausted {
                            inconclusive = true;
                        } else {
                            inconclusive = true;
                        }
                    }
                }
            }
        }
    }

    margins.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    margins.truncate(8);

    let status = if let Some((desc, d)) = &fail_witness {
        if margins.iter().all(|(m, _)| m != desc) {
            margins.insert(0, (desc.clone(), *d));
        }
        CertStatus::Fail
    } else if certified >= eps - tol {
        CertStatus::Pass
    } else if inconclusive {
        CertStatus::Inconclusive
    } else {
        CertStatus::Fail
    };

    Ok(ThicknessCertificate {
        target_eps: eps,
        tol,
        certified_lower_bound: certified,
        status,
        exact: exact_all,
        max_sampling_step: max_step,
        lipschitz,
        pairs_checked,
        worst_pairs: margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::embed::*;
    use crate::geometry::space::h0;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn slab_is_exactly_one_thick() {
        for n in [2usize, 5, 8] {
            let e = complete_slab_embedding(n).unwrap();
            let cert = verify_thickness(&e, 1.0, 0.0).unwrap();
            assert_eq!(cert.status, CertStatus::Pass, "n = {n}: {cert:?}");
            assert!(cert.exact);
            assert_eq!(cert.certified_lower_bound, 1.0);
        }
    }

    #[test]
    fn single_vertex_is_vacuously_thick() {
        let e = complete_slab_embedding(1).unwrap();
        let cert = verify_thickness(&e, 1.0, 0.0).unwrap();
        assert_eq!(cert.status, CertStatus::Pass);
        assert_eq!(cert.certified_lower_bound, f64::INFINITY);
        assert_eq!(cert.pairs_checked, 0);
    }

    #[test]
    fn h3_pushforward_is_one_thick() {
        let e = slab_to_h3(&complete_slab_embedding(4).unwrap()).unwrap();
        let cert = verify_thickness(&e, 1.0, 1e-3).unwrap();
        assert_eq!(cert.status, CertStatus::Pass, "{cert:?}");
        assert!(cert.certified_lower_bound >= 1.0 - 1e-3);
    }

    #[test]
    fn h2xr_pushforward_is_one_thick() {
        let e = slab_to_h2xr(&complete_slab_embedding(4).unwrap()).unwrap();
        let cert = verify_thickness(&e, 1.0, 1e-3).unwrap();
        assert_eq!(cert.status, CertStatus::Pass, "{cert:?}");
    }

    #[test]
    fn h2_slab_embedding_is_one_thick() {
        let e = complete_h2_slab_embedding(4).unwrap();
        let cert = verify_thickness(&e, 1.0, 1e-3).unwrap();
        assert_eq!(cert.status, CertStatus::Pass, "{cert:?}");
    }

    #[test]
    fn squeezed_slab_fails() {
        // scaling the slab by 1/2 halves every margin
        let e = scale_embedding(&complete_slab_embedding(4).unwrap(), 0.5).unwrap();
        let cert = verify_thickness(&e, 1.0, 1e-6).unwrap();
        assert_eq!(cert.status, CertStatus::Fail);
        assert!((cert.certified_lower_bound - 0.5).abs() < 1e-12);
    }

    #[test]
    fn halfspace_closed_forms_match_sampling() {
        let h2 = ModelSpace::HalfSpace(2);
        let h3 = ModelSpace::HalfSpace(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let swap = |p: &mut Vec<f64>, q: &mut Vec<f64>| {
            std::mem::swap(p, q);
        };
        for trial in 0..400 {
            // random axis-parallel segments in H^2 or H^3
            let space = if trial % 2 == 0 { &h2 } else { &h3 };
            let dim = space.dim();
            let mk = |rng: &mut ChaCha8Rng| -> (Vec<f64>, Vec<f64>) {
                let mut a: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-3.0..3.0)).collect();
                a.push(rng.gen_range(0.2..3.0));
                let mut b = a.clone();
                let axis = rng.gen_range(0..dim);
                if axis == dim - 1 {
                    b[axis] = rng.gen_range(0.2..3.0);
                } else {
                    b[axis] = rng.gen_range(-3.0..3.0);
                }
                if b[axis] == a[axis] {
                    b[axis] += 0.5;
                }
                (a, b)
            };
            let (mut a0, mut a1) = mk(&mut rng);
            let (mut b0, mut b1) = mk(&mut rng);
            if rng.gen_bool(0.5) {
                swap(&mut a0, &mut a1);
                swap(&mut b0, &mut b1);
            }
            let exact =
                exact_min_distance(space, Shape::Segment(&a0, &a1), Shape::Segment(&b0, &b1))
                    .unwrap();
            // dense sampling cross-check
            let mut best = f64::INFINITY;
            for ti in 0..=60 {
                for si in 0..=60 {
                    let t = ti as f64 / 60.0;
                    let s = si as f64 / 60.0;
                    let p: Vec<f64> = a0.iter().zip(&a1).map(|(x, y)| x + t * (y - x)).collect();
                    let q: Vec<f64> = b0.iter().zip(&b1).map(|(x, y)| x + s * (y - x)).collect();
                    best = best.min(space.distance_unchecked(&p, &q));
                }
            }
            assert!(
                exact <= best + 1e-9,
                "closed form {exact} above sampled {best}"
            );
            assert!(
                best - exact < 0.6,
                "closed form {exact} far below sampled {best}"
            );
        }
    }

    #[test]
    fn adaptive_matches_exact_on_halfspace_pairs() {
        let h2 = ModelSpace::HalfSpace(2);
        let a0 = [0.0, h0()];
        let a1 = [4.0, h0()];
        let b0 = [1.0, h0() * (-1.0f64).exp()];
        let b1 = [3.0, h0() * (-1.0f64).exp()];
        let exact = exact_min_distance(
            &h2,
            Shape::Segment(&a0, &a1),
            Shape::Segment(&b0, &b1),
        )
        .unwrap();
        let out = adaptive_min(
            &h2,
            Shape::Segment(&a0, &a1),
            Shape::Segment(&b0, &b1),
            exact + 0.5,
            ADAPTIVE_BUDGET,
        );
        assert!(out.lb <= exact + 1e-9);
        assert!(out.ub >= exact - 1e-9);
        assert!(out.ub - out.lb < 1e-2, "bracket too loose: {} {}", out.lb, out.ub);
    }

    #[test]
    fn diagonal_segments_use_adaptive_and_still_pass() {
        // a deliberately diagonal pair in the half-plane, close enough that
        // bounding boxes cannot settle it
        let g = crate::graphs::Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let e = ThickEmbedding::new(
            g,
            ModelSpace::HalfSpace(2),
            vec![
                vec![0.0, 1.0],
                vec![2.0, 2.0],
                vec![3.5, 1.0],
                vec![5.5, 2.2],
            ],
            [
                (
                    (0u32, 1u32),
                    PolylinePath::new(vec![vec![0.0, 1.0], vec![2.0, 2.0]]),
                ),
                (
                    (2u32, 3u32),
                    PolylinePath::new(vec![vec![3.5, 1.0], vec![5.5, 2.2]]),
                ),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let cert = verify_thickness(&e, 1.0, 1e-3).unwrap();
        assert_eq!(cert.status, CertStatus::Pass, "{cert:?}");
        assert!(!cert.exact);
        assert!(cert.max_sampling_step > 0.0);
    }

    #[test]
    fn thickness_invariant_under_hyperbolic_isometries() {
        // horizontal translation and dilation are isometries of half-space
        let e = slab_to_h3(&complete_slab_embedding(3).unwrap()).unwrap();
        let cert0 = verify_thickness(&e, 1.0, 1e-3).unwrap();

        let shifted = ThickEmbedding::new(
            e.graph.clone(),
            e.space.clone(),
            e.vertex_points
                .iter()
                .map(|p| vec![p[0] + 7.5, p[1], p[2]])
                .collect(),
            e.edge_paths
                .iter()
                .map(|(&k, path)| {
                    (
                        k,
                        PolylinePath::new(
                            path.points
                                .iter()
                                .map(|p| vec![p[0] + 7.5, p[1], p[2]])
                                .collect(),
                        ),
                    )
                })
                .collect(),
        )
        .unwrap();
        let cert1 = verify_thickness(&shifted, 1.0, 1e-3).unwrap();
        assert!((cert0.certified_lower_bound - cert1.certified_lower_bound).abs() < 1e-10);

        let dilated = scale_embedding(&e, 3.0).unwrap();
        let cert2 = verify_thickness(&dilated, 1.0, 1e-3).unwrap();
        assert!((cert0.certified_lower_bound - cert2.certified_lower_bound).abs() < 1e-10);
    }
}
