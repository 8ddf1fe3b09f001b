//! Thick polyline embeddings and the explicit constructions: the complete
//! graph in a slab, its push-forwards into half-space models, horospherical
//! products, and the half-plane slab wiring of complete graphs.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::geometry::space::{h0, ModelSpace, Point};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A path of straight coordinate segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylinePath {
    pub points: Vec<Point>,
}

impl PolylinePath {
    pub fn new(points: Vec<Point>) -> PolylinePath {
        PolylinePath { points }
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.points.windows(2).map(|w| (&w[0], &w[1]))
    }

    /// Smallest last coordinate along the path; the half-space floor.
    pub fn min_last_coordinate(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.last().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A topological embedding of a graph into a model space: vertex points and
/// polyline edge paths. Features are the vertex points and the open edge
/// paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ThickEmbedding {
    pub graph: Graph,
    pub space: ModelSpace,
    pub vertex_points: Vec<Point>,
    pub edge_paths: BTreeMap<(u32, u32), PolylinePath>,
}

impl ThickEmbedding {
    pub fn new(
        graph: Graph,
        space: ModelSpace,
        vertex_points: Vec<Point>,
        edge_paths: BTreeMap<(u32, u32), PolylinePath>,
    ) -> Result<ThickEmbedding> {
        let e = ThickEmbedding {
            graph,
            space,
            vertex_points,
            edge_paths,
        };
        e.validate()?;
        Ok(e)
    }

    /// Structural checks: points lie in the space, each edge path connects
    /// its endpoint images, segments are nondegenerate, consecutive segments
    /// never double back onto each other, and non-adjacent segments of one
    /// path are disjoint in coordinates.
    pub fn validate(&self) -> Result<()> {
        if self.vertex_points.len() != self.graph.vertex_count() {
            return Err(Error::structural(format!(
                "{} vertex points for {} vertices",
                self.vertex_points.len(),
                self.graph.vertex_count()
            )));
        }
        for (v, p) in self.vertex_points.iter().enumerate() {
            if !self.space.contains(p) {
                return Err(Error::structural(format!(
                    "vertex {v} maps outside the space: {p:?}"
                )));
            }
        }
        for &(u, v) in self.graph.edges() {
            let path = self
                .edge_paths
                .get(&(u, v))
                .ok_or_else(|| Error::structural(format!("edge ({u},{v}) has no path")))?;
            if path.points.is_empty() {
                return Err(Error::structural(format!("edge ({u},{v}) path is empty")));
            }
            for p in &path.points {
                if !self.space.contains(p) {
                    return Err(Error::structural(format!(
                        "edge ({u},{v}) path leaves the space at {p:?}"
                    )));
                }
            }
            let first = path.points.first().unwrap();
            let last = path.points.last().unwrap();
            let pu = &self.vertex_points[u as usize];
            let pv = &self.vertex_points[v as usize];
            let fwd = first == pu && last == pv;
            let rev = first == pv && last == pu;
            if !fwd && !rev {
                return Err(Error::structural(format!(
                    "path for edge ({u},{v}) does not connect the endpoint points"
                )));
            }
            for (a, b) in path.segments() {
                if a == b {
                    return Err(Error::structural(format!(
                        "edge ({u},{v}) has a zero-length segment"
                    )));
                }
            }
            // consecutive segments must not reverse onto each other
            for w in path.points.windows(3) {
                if doubles_back(&w[0], &w[1], &w[2]) {
                    return Err(Error::structural(format!(
                        "edge ({u},{v}) path doubles back at {:?}",
                        w[1]
                    )));
                }
            }
            // non-adjacent segments of a single path stay disjoint
            let segs: Vec<(&Point, &Point)> = path.segments().collect();
            for i in 0..segs.len() {
                for j in (i + 2)..segs.len() {
                    let closed = i == 0 && j == segs.len() - 1 && path.points.first() == path.points.last();
                    if closed {
                        continue;
                    }
                    let d = coord_segment_distance(segs[i].0, segs[i].1, segs[j].0, segs[j].1);
                    if d <= 0.0 {
                        return Err(Error::structural(format!(
                            "edge ({u},{v}) path self-intersects"
                        )));
                    }
                }
            }
        }
        for &(u, v) in self.edge_paths.keys() {
            if !self.graph.has_edge(u, v) {
                return Err(Error::structural(format!(
                    "path recorded for non-edge ({u},{v})"
                )));
            }
        }
        Ok(())
    }
}

/// True when `b -> c` exactly reverses direction along `a -> b` (collinear,
/// opposite orientation), which would make the polyline overlap itself.
fn doubles_back(a: &[f64], b: &[f64], c: &[f64]) -> bool {
    let u: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let v: Vec<f64> = b.iter().zip(c).map(|(x, y)| y - x).collect();
    let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
    if dot >= 0.0 {
        return false;
    }
    let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (nu * nv) + 1.0).abs() < 1e-12
}

/// Euclidean distance between coordinate segments, for self-intersection
/// checks in chart coordinates.
pub(crate) fn coord_segment_distance(a0: &[f64], a1: &[f64], b0: &[f64], b1: &[f64]) -> f64 {
    let d1: Vec<f64> = a0.iter().zip(a1).map(|(x, y)| y - x).collect();
    let d2: Vec<f64> = b0.iter().zip(b1).map(|(x, y)| y - x).collect();
    let r: Vec<f64> = b0.iter().zip(a0).map(|(x, y)| y - x).collect();
    let a: f64 = d1.iter().map(|x| x * x).sum();
    let e: f64 = d2.iter().map(|x| x * x).sum();
    let f: f64 = d2.iter().zip(&r).map(|(x, y)| x * y).sum();
    let (s, t);
    if a <= 1e-30 && e <= 1e-30 {
        s = 0.0;
        t = 0.0;
    } else if a <= 1e-30 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c: f64 = d1.iter().zip(&r).map(|(x, y)| x * y).sum();
        if e <= 1e-30 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b: f64 = d1.iter().zip(&d2).map(|(x, y)| x * y).sum();
            let denom = a * e - b * b;
            let s0 = if denom.abs() > 1e-30 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let t0 = ((b * s0 + f) / e).clamp(0.0, 1.0);
            let s1 = ((b * t0 - c) / a).clamp(0.0, 1.0);
            s = s1;
            t = t0;
        }
    }
    let mut sq = 0.0;
    for i in 0..a0.len() {
        let pa = a0[i] + s * d1[i];
        let pb = b0[i] + t * d2[i];
        sq += (pa - pb) * (pa - pb);
    }
    sq.sqrt()
}

/// 1-thick embedding of the complete graph on `n` vertices into the slab
/// `[0, n-1]^2 x [0, 1]` under the max metric. Vertex `k` sits at
/// `(k, k, 0)`; the edge `kl` runs to `(l, k, 0)`, lifts to height 1, slides
/// to `(l, l, 1)` and drops onto `(l, l, 0)`.
pub fn complete_slab_embedding(n: usize) -> Result<ThickEmbedding> {
    if n == 0 {
        return Err(Error::validation("slab embedding needs at least one vertex"));
    }
    let graph = Graph::complete(n);
    let space = ModelSpace::EuclideanLinf(3);
    let vertex_points: Vec<Point> = (0..n).map(|k| vec![k as f64, k as f64, 0.0]).collect();
    let mut edge_paths = BTreeMap::new();
    for &(u, v) in graph.edges() {
        let (k, l) = (u as f64, v as f64);
        let points = vec![
            vec![k, k, 0.0],
            vec![l, k, 0.0],
            vec![l, k, 1.0],
            vec![l, l, 1.0],
            vec![l, l, 0.0],
        ];
        edge_paths.insert((u, v), PolylinePath::new(points));
    }
    ThickEmbedding::new(graph, space, vertex_points, edge_paths)
}

fn check_slab_input(e: &ThickEmbedding) -> Result<()> {
    if e.space != ModelSpace::EuclideanLinf(3) {
        return Err(Error::validation(
            "expected a slab embedding in the 3-dimensional max-metric space",
        ));
    }
    let in_slab = |p: &Point| p[0] >= 0.0 && p[1] >= 0.0 && (0.0..=1.0).contains(&p[2]);
    for p in &e.vertex_points {
        if !in_slab(p) {
            return Err(Error::validation(format!("point {p:?} outside the slab")));
        }
    }
    for path in e.edge_paths.values() {
        for p in &path.points {
            if !in_slab(p) {
                return Err(Error::validation(format!("point {p:?} outside the slab")));
            }
        }
    }
    Ok(())
}

fn map_embedding(
    e: &ThickEmbedding,
    space: ModelSpace,
    f: impl Fn(&Point) -> Point,
) -> Result<ThickEmbedding> {
    let vertex_points = e.vertex_points.iter().map(&f).collect();
    let edge_paths = e
        .edge_paths
        .iter()
        .map(|(&k, path)| {
            (
                k,
                PolylinePath::new(path.points.iter().map(&f).collect()),
            )
        })
        .collect();
    ThickEmbedding::new(e.graph.clone(), space, vertex_points, edge_paths)
}

/// Push-forward of a slab embedding into hyperbolic 3-space:
/// `(x, y, a) -> (x, y; h0 e^{-a})`. Horizontal slab segments stay straight
/// on their horosphere; vertical slab segments become vertical geodesic
/// segments, so mapping breakpoints preserves the image set.
pub fn slab_to_h3(e: &ThickEmbedding) -> Result<ThickEmbedding> {
    check_slab_input(e)?;
    let h = h0();
    map_embedding(e, ModelSpace::HalfSpace(3), |p| {
        vec![p[0], p[1], h * (-p[2]).exp()]
    })
}

/// Push-forward of a slab embedding into the product of a line and the
/// hyperbolic plane: `(x, y, a) -> (x; y, h0 e^{-a})`.
pub fn slab_to_h2xr(e: &ThickEmbedding) -> Result<ThickEmbedding> {
    check_slab_input(e)?;
    let h = h0();
    map_embedding(
        e,
        ModelSpace::ProductL2(vec![ModelSpace::EuclideanL2(1), ModelSpace::HalfSpace(2)]),
        |p| vec![p[0], p[1], h * (-p[2]).exp()],
    )
}

/// Rescales every coordinate; in Euclidean spaces this scales all distances.
pub fn scale_embedding(e: &ThickEmbedding, s: f64) -> Result<ThickEmbedding> {
    map_embedding(e, e.space.clone(), |p| p.iter().map(|c| c * s).collect())
}

/// Horospherical push-forward of an embedding of `R^{r + q - 1}` into
/// `R^r x H^q`: the last `q-1` coordinates land on the horosphere at height
/// `h0`. Points at Euclidean distance 1 in either block stay at distance at
/// least 1.
pub fn horoproduct_embed(e: &ThickEmbedding, q: usize, r: usize) -> Result<ThickEmbedding> {
    if q < 2 || r < 1 {
        return Err(Error::validation(format!(
            "horospherical product needs q >= 2 and r >= 1, got ({q}, {r})"
        )));
    }
    let expected = ModelSpace::EuclideanL2(q + r - 1);
    if e.space != expected {
        return Err(Error::validation(format!(
            "expected an embedding into {expected:?}, got {:?}",
            e.space
        )));
    }
    let h = h0();
    map_embedding(
        e,
        ModelSpace::ProductL2(vec![ModelSpace::EuclideanL2(r), ModelSpace::HalfSpace(q)]),
        |p| {
            let mut out = p.clone();
            out.push(h);
            out
        },
    )
}

/// 1-thick embedding of the complete graph on `n` vertices into
/// `H^2 x [0, 1]` with the max metric. Vertex `i` sits at `(i, h0 e^{-i}; 0)`;
/// the edge `ij` runs along the horocircle at height `h0 e^{-i}`, crosses the
/// slab, descends the geodesic at `x = j`, and returns to the base level.
pub fn complete_h2_slab_embedding(n: usize) -> Result<ThickEmbedding> {
    if n == 0 {
        return Err(Error::validation("embedding needs at least one vertex"));
    }
    let h = h0();
    let graph = Graph::complete(n);
    let space = ModelSpace::ProductMax(vec![ModelSpace::HalfSpace(2), ModelSpace::EuclideanL2(1)]);
    let height = |i: f64| h * (-i).exp();
    let vertex_points: Vec<Point> = (0..n)
        .map(|i| vec![i as f64, height(i as f64), 0.0])
        .collect();
    let mut edge_paths = BTreeMap::new();
    for &(u, v) in graph.edges() {
        let (i, j) = (u as f64, v as f64);
        let points = vec![
            vec![i, height(i), 0.0],
            vec![j, height(i), 0.0],
            vec![j, height(i), 1.0],
            vec![j, height(j), 1.0],
            vec![j, height(j), 0.0],
        ];
        edge_paths.insert((u, v), PolylinePath::new(points));
    }
    ThickEmbedding::new(graph, space, vertex_points, edge_paths)
}

/// Center point used for the volume bound of [`complete_h2_slab_embedding`].
pub fn h2_slab_center(n: usize) -> Point {
    vec![(n as f64 - 1.0) / 2.0, h0(), 0.5]
}

/// Hyperbolic-plane ball bound on the volume of the `H^2 x [0,1]` embedding:
/// the slab factor has measure 1, so the 1-neighbourhood fits in the ball of
/// radius `max_center_distance + 1` around the center.
pub fn h2_slab_volume_bound(max_center_distance: f64) -> f64 {
    let r = max_center_distance + 1.0;
    4.0 * std::f64::consts::PI * (r / 2.0).sinh().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_k2_path() {
        let e = complete_slab_embedding(2).unwrap();
        let path = &e.edge_paths[&(0, 1)];
        assert_eq!(
            path.points,
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![1.0, 0.0, 1.0],
                vec![1.0, 1.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ]
        );
    }

    #[test]
    fn slab_k1_single_point() {
        let e = complete_slab_embedding(1).unwrap();
        assert_eq!(e.vertex_points.len(), 1);
        assert!(e.edge_paths.is_empty());
        assert!(complete_slab_embedding(0).is_err());
    }

    #[test]
    fn slab_vertex_to_path_margin() {
        // the path of edge (k, l) stays at max-distance >= min(|i-k|, |i-l|)
        // from the image of any third vertex
        let e = complete_slab_embedding(5).unwrap();
        let space = &e.space;
        for (&(k, l), path) in &e.edge_paths {
            for i in 0..5u32 {
                if i == k || i == l {
                    continue;
                }
                let p = &e.vertex_points[i as usize];
                let expected = (i.abs_diff(k)).min(i.abs_diff(l)) as f64;
                // sample along segments; the max metric distance is piecewise
                // linear so endpoint sampling underestimates by nothing here
                let mut min_d = f64::INFINITY;
                for (a, b) in path.segments() {
                    for t in 0..=16 {
                        let t = t as f64 / 16.0;
                        let pt: Point = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                        min_d = min_d.min(space.distance(&pt, p).unwrap());
                    }
                }
                assert!(min_d + 1e-9 >= expected.min(expected));
                assert!(min_d + 1e-9 >= 1.0);
            }
        }
    }

    #[test]
    fn h3_pushforward_examples() {
        let e = complete_slab_embedding(3).unwrap();
        let g = slab_to_h3(&e).unwrap();
        assert_eq!(g.space, ModelSpace::HalfSpace(3));
        let h = h0();
        assert_eq!(g.vertex_points[1], vec![1.0, 1.0, h]);
        // lifted breakpoints sit at height h0/e
        let path = &g.edge_paths[&(0, 1)];
        assert!((path.points[2][2] - h / std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn h2xr_pushforward_keeps_x_extent() {
        let e = complete_slab_embedding(4).unwrap();
        let g = slab_to_h2xr(&e).unwrap();
        let max_x = g
            .vertex_points
            .iter()
            .map(|p| p[0])
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max_x, 3.0);
    }

    #[test]
    fn horoproduct_point_and_factor_claims() {
        // a single point maps by appending the horosphere height
        let g = Graph::empty(1);
        let e = ThickEmbedding::new(
            g,
            ModelSpace::EuclideanL2(3),
            vec![vec![0.0, 0.0, 0.0]],
            BTreeMap::new(),
        )
        .unwrap();
        let out = horoproduct_embed(&e, 3, 1).unwrap();
        assert_eq!(out.vertex_points[0], vec![0.0, 0.0, 0.0, h0()]);

        // unit separation in the horospherical block gives distance exactly 1
        let space = ModelSpace::ProductL2(vec![ModelSpace::EuclideanL2(1), ModelSpace::HalfSpace(3)]);
        let h = h0();
        let d = space
            .distance(&[0.0, 0.0, 0.0, h], &[0.0, 1.0, 0.0, h])
            .unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn horoproduct_separation_sampled() {
        use rand::Rng;
        use rand::SeedableRng;
        let space_in = ModelSpace::EuclideanL2(3);
        let space_out =
            ModelSpace::ProductL2(vec![ModelSpace::EuclideanL2(1), ModelSpace::HalfSpace(3)]);
        let h = h0();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 2000 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let q: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            if space_in.distance(&p, &q).unwrap() < 2f64.sqrt() {
                continue;
            }
            checked += 1;
            let pp = [p[0], p[1], p[2], h];
            let qq = [q[0], q[1], q[2], h];
            assert!(space_out.distance(&pp, &qq).unwrap() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn h2_slab_k2_layout() {
        let e = complete_h2_slab_embedding(2).unwrap();
        let h = h0();
        assert_eq!(e.vertex_points[0], vec![0.0, h, 0.0]);
        assert!((e.vertex_points[1][1] - h / std::f64::consts::E).abs() < 1e-15);
        assert_eq!(e.edge_paths.len(), 1);
        assert_eq!(e.edge_paths[&(0, 1)].points.len(), 5);
    }

    #[test]
    fn self_intersection_is_rejected() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let bad = ThickEmbedding::new(
            g,
            ModelSpace::EuclideanL2(2),
            vec![vec![0.0, 0.0], vec![3.0, 0.0]],
            [(
                (0u32, 1u32),
                PolylinePath::new(vec![
                    vec![0.0, 0.0],
                    vec![2.0, 1.0],
                    vec![2.0, -1.0],
                    vec![1.0, 0.5],
                    vec![3.0, 0.0],
                ]),
            )]
            .into_iter()
            .collect(),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn doubling_back_is_rejected() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let bad = ThickEmbedding::new(
            g,
            ModelSpace::EuclideanL2(2),
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            [(
                (0u32, 1u32),
                PolylinePath::new(vec![
                    vec![0.0, 0.0],
                    vec![2.0, 0.0],
                    vec![1.0, 0.0],
                ]),
            )]
            .into_iter()
            .collect(),
        );
        assert!(bad.is_err());
    }
}
