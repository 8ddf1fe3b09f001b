//! Diameter and volume estimation for embeddings: certified sampling with
//! Lipschitz corrections for diameters, greedy nets with closed-form ball
//! volumes for volume upper bounds.

use crate::error::Result;
use crate::geometry::embed::ThickEmbedding;
use crate::geometry::space::{ball_volume, ModelSpace, Point};
use serde::{Deserialize, Serialize};

/// Samples all features so that consecutive samples along any segment are at
/// metric distance at most `step`. Returns the samples and the realized gap
/// bound.
fn sample_features(e: &ThickEmbedding, step: f64) -> (Vec<Point>, f64) {
    let mut samples: Vec<Point> = e.vertex_points.clone();
    let mut gap: f64 = 0.0;
    for path in e.edge_paths.values() {
        for (a, b) in path.segments() {
            let lip = e.space.segment_lipschitz(a, b);
            let coord_len = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            let metric_len = lip * coord_len;
            let pieces = (metric_len / step).ceil().max(1.0) as usize;
            gap = gap.max(metric_len / pieces as f64);
            for i in 0..=pieces {
                let t = i as f64 / pieces as f64;
                samples.push(a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect());
            }
        }
    }
    (samples, gap)
}

/// Certified diameter bracket: the true diameter of the image lies in
/// `[lower, upper]`; `upper = lower + gap` with `gap` the sampling bound.
pub fn embedding_diameter(e: &ThickEmbedding, step: f64) -> Result<(f64, f64)> {
    let (samples, gap) = sample_features(e, step);
    let mut best: f64 = 0.0;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            best = best.max(e.space.distance_unchecked(&samples[i], &samples[j]));
        }
    }
    Ok((best, best + gap))
}

/// Certified bracket on the maximum distance from `p` to the image.
pub fn max_distance_to_point(e: &ThickEmbedding, p: &[f64], step: f64) -> Result<(f64, f64)> {
    let (samples, gap) = sample_features(e, step);
    let mut best: f64 = 0.0;
    for s in &samples {
        best = best.max(e.space.distance(s, p)?);
    }
    Ok((best, best + gap / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeMethod {
    /// Greedy separated net times a closed-form ball volume.
    NetCount,
    /// Sum of unit-radius tubes around segments (Euclidean only).
    SegmentTubes,
}

/// An upper bound on the measure of the 1-neighbourhood of the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub method: VolumeMethod,
    pub upper_bound: f64,
    /// Net points kept (NetCount) or segments summed (SegmentTubes).
    pub count: usize,
    /// Ball radius used by the NetCount method.
    pub radius: f64,
}

/// Net-count volume upper bound: a greedy `net_spacing`-separated net over a
/// dense sampling of the image covers every image point within
/// `net_spacing + gap/2`, so the 1-neighbourhood fits in the union of balls
/// of radius `net_spacing + gap/2 + 1` around net points.
pub fn estimate_volume(e: &ThickEmbedding, net_spacing: f64, step: f64) -> Result<VolumeEstimate> {
    let (samples, gap) = sample_features(e, step);
    let mut net: Vec<&Point> = Vec::new();
    'outer: for s in &samples {
        for kept in &net {
            if e.space.distance_unchecked(s, kept) < net_spacing {
                continue 'outer;
            }
        }
        net.push(s);
    }
    let radius = net_spacing + gap / 2.0 + 1.0;
    let ball = ball_volume(&e.space, radius)?;
    Ok(VolumeEstimate {
        method: VolumeMethod::NetCount,
        upper_bound: net.len() as f64 * ball,
        count: net.len(),
        radius,
    })
}

/// Euclidean tube bound: the 1-neighbourhood of a segment of length `L` in
/// `R^n` has measure at most `omega_{n-1} L + omega_n`. Linear in the scene
/// size, which the net count is not.
pub fn tube_volume_bound(e: &ThickEmbedding) -> Result<VolumeEstimate> {
    let n = match e.space {
        ModelSpace::EuclideanL2(n) => n,
        _ => {
            return Err(crate::error::Error::Unsupported(
                "tube volume bound needs a Euclidean space".into(),
            ))
        }
    };
    let cross_section = ball_volume(&ModelSpace::EuclideanL2(n - 1), 1.0)?;
    let cap = ball_volume(&ModelSpace::EuclideanL2(n), 1.0)?;
    let mut total = e.vertex_points.len() as f64 * cap;
    let mut count = e.vertex_points.len();
    for path in e.edge_paths.values() {
        for (a, b) in path.segments() {
            let len = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            total += cross_section * len + cap;
            count += 1;
        }
    }
    Ok(VolumeEstimate {
        method: VolumeMethod::SegmentTubes,
        upper_bound: total,
        count,
        radius: 1.0,
    })
}
