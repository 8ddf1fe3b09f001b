//! Model spaces and their metrics: Euclidean (L2 and L-infinity), the upper
//! half-space model of hyperbolic space, and finite products combined by L2
//! or by maximum.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Point = Vec<f64>;

/// The height at which unit horizontal steps on a horosphere have hyperbolic
/// length exactly 1.
pub fn h0() -> f64 {
    (2.0 * (1f64.cosh() - 1.0)).powf(-0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpace {
    /// `R^n` with the Euclidean metric.
    EuclideanL2(usize),
    /// `R^n` with the max metric.
    EuclideanLinf(usize),
    /// Upper half-space model of hyperbolic `q`-space: coordinates
    /// `(x_1, ..., x_{q-1}; z)` with `z > 0` last.
    HalfSpace(usize),
    /// Product with `sqrt(sum of squared factor distances)`.
    ProductL2(Vec<ModelSpace>),
    /// Product with `max` of factor distances.
    ProductMax(Vec<ModelSpace>),
}

impl ModelSpace {
    /// Coordinate arity of points of this space.
    pub fn dim(&self) -> usize {
        match self {
            ModelSpace::EuclideanL2(n) | ModelSpace::EuclideanLinf(n) | ModelSpace::HalfSpace(n) => {
                *n
            }
            ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
                fs.iter().map(|f| f.dim()).sum()
            }
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() || p.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match self {
            ModelSpace::HalfSpace(q) => p[q - 1] > 0.0,
            ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
                let mut off = 0;
                fs.iter().all(|f| {
                    let ok = f.contains(&p[off..off + f.dim()]);
                    off += f.dim();
                    ok
                })
            }
            _ => true,
        }
    }

    /// Metric distance between two points of the space.
    pub fn distance(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::validation(format!(
                "points not in space {self:?}: {p:?}, {q:?}"
            )));
        }
        Ok(self.distance_unchecked(p, q))
    }

    pub(crate) fn distance_unchecked(&self, p: &[f64], q: &[f64]) -> f64 {
        match self {
            ModelSpace::EuclideanL2(_) => p
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            ModelSpace::EuclideanLinf(_) => p
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            ModelSpace::HalfSpace(d) => {
                let zp = p[d - 1];
                let zq = q[d - 1];
                let sq: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                (1.0 + sq / (2.0 * zp * zq)).acosh()
            }
            ModelSpace::ProductL2(fs) => {
                let mut off = 0;
                let mut total = 0.0;
                for f in fs {
                    let d = f.distance_unchecked(&p[off..off + f.dim()], &q[off..off + f.dim()]);
                    total += d * d;
                    off += f.dim();
                }
                total.sqrt()
            }
            ModelSpace::ProductMax(fs) => {
                let mut off = 0;
                let mut best: f64 = 0.0;
                for f in fs {
                    let d = f.distance_unchecked(&p[off..off + f.dim()], &q[off..off + f.dim()]);
                    best = best.max(d);
                    off += f.dim();
                }
                best
            }
        }
    }

    /// Metric Lipschitz constant of the straight coordinate segment `a -> b`
    /// parametrized by Euclidean coordinate arclength.
    pub(crate) fn segment_lipschitz(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ModelSpace::EuclideanL2(_) | ModelSpace::EuclideanLinf(_) => 1.0,
            ModelSpace::HalfSpace(d) => {
                let floor = a[d - 1].min(b[d - 1]);
                1.0 / floor
            }
            ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
                let mut off = 0;
                let mut best: f64 = 0.0;
                for f in fs {
                    best = best.max(f.segment_lipschitz(&a[off..off + f.dim()], &b[off..off + f.dim()]));
                    off += f.dim();
                }
                best
            }
        }
    }

    /// Offsets and arities of the factors; a plain space is one factor.
    pub(crate) fn factors(&self) -> Vec<(usize, ModelSpace)> {
        match self {
            ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
                let mut out = Vec::new();
                let mut off = 0;
                for f in fs {
                    out.push((off, f.clone()));
                    off += f.dim();
                }
                out
            }
            other => vec![(0, other.clone())],
        }
    }
}

/// Volume of the unit-radius `n`-ball times `r^n`; computed by the
/// two-step recurrence on the dimension.
fn euclidean_ball(n: usize, r: f64) -> f64 {
    let omega = match n {
        0 => 1.0,
        1 => 2.0,
        _ => {
            let mut values = [1.0, 2.0];
            for k in 2..=n {
                let next = 2.0 * std::f64::consts::PI / k as f64 * values[0];
                values = [values[1], next];
            }
            values[1]
        }
    };
    omega * r.powi(n as i32)
}

/// Closed-form volume of a metric ball of radius `r`. For products this is
/// the product of factor ball volumes, an upper bound on the true ball.
pub fn ball_volume(space: &ModelSpace, r: f64) -> Result<f64> {
    Ok(match space {
        ModelSpace::EuclideanL2(n) => euclidean_ball(*n, r),
        ModelSpace::EuclideanLinf(n) => (2.0 * r).powi(*n as i32),
        ModelSpace::HalfSpace(2) => 4.0 * std::f64::consts::PI * (r / 2.0).sinh().powi(2),
        ModelSpace::HalfSpace(3) => std::f64::consts::PI * ((2.0 * r).sinh() - 2.0 * r),
        ModelSpace::HalfSpace(q) => {
            return Err(Error::Unsupported(format!(
                "no closed-form ball volume for hyperbolic dimension {q}"
            )))
        }
        ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
            let mut total = 1.0;
            for f in fs {
                total *= ball_volume(f, r)?;
            }
            total
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn h0_identity() {
        let h = h0();
        assert!((1f64.cosh() - (1.0 + 1.0 / (2.0 * h * h))).abs() < 1e-12);
    }

    #[test]
    fn halfspace_unit_steps() {
        let h2 = ModelSpace::HalfSpace(2);
        let h = h0();
        // horizontal unit step at height h0 is hyperbolic distance 1
        let d = h2.distance(&[0.0, h], &[1.0, h]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);

        // vertical step from z = 1 to z = e is distance 1
        let h3 = ModelSpace::HalfSpace(3);
        let d = h3
            .distance(&[0.0, 0.0, 1.0], &[0.0, 0.0, std::f64::consts::E])
            .unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halfspace_reference_value() {
        // acosh(1.5) evaluated against ln(1.5 + sqrt(1.25))
        let h2 = ModelSpace::HalfSpace(2);
        let d = h2.distance(&[0.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((d - 0.9624236501192069).abs() < 1e-13);
    }

    #[test]
    fn halfspace_rejects_nonpositive_height() {
        let h2 = ModelSpace::HalfSpace(2);
        assert!(h2.distance(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(h2.distance(&[0.0, -1.0], &[1.0, 1.0]).is_err());
    }

    fn random_point(space: &ModelSpace, rng: &mut ChaCha8Rng) -> Point {
        match space {
            ModelSpace::EuclideanL2(n) | ModelSpace::EuclideanLinf(n) => {
                (0..*n).map(|_| rng.gen_range(-5.0..5.0)).collect()
            }
            ModelSpace::HalfSpace(q) => {
                let mut p: Point = (0..q - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
                p.push(rng.gen_range(0.05..5.0));
                p
            }
            ModelSpace::ProductL2(fs) | ModelSpace::ProductMax(fs) => {
                let mut p = Point::new();
                for f in fs {
                    p.extend(random_point(f, rng));
                }
                p
            }
        }
    }

    fn spaces() -> Vec<ModelSpace> {
        vec![
            ModelSpace::EuclideanL2(3),
            ModelSpace::EuclideanLinf(3),
            ModelSpace::HalfSpace(2),
            ModelSpace::HalfSpace(3),
            ModelSpace::ProductL2(vec![ModelSpace::EuclideanL2(1), ModelSpace::HalfSpace(2)]),
            ModelSpace::ProductMax(vec![ModelSpace::HalfSpace(2), ModelSpace::EuclideanL2(1)]),
        ]
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for space in spaces() {
            for _ in 0..2000 {
                let p = random_point(&space, &mut rng);
                let q = random_point(&space, &mut rng);
                let r = random_point(&space, &mut rng);
                let dpq = space.distance(&p, &q).unwrap();
                let dqp = space.distance(&q, &p).unwrap();
                let dpr = space.distance(&p, &r).unwrap();
                let dqr = space.distance(&q, &r).unwrap();
                assert!((dpq - dqp).abs() < 1e-12);
                assert!(dpq >= 0.0);
                assert!(dpq <= dpr + dqr + 1e-12, "triangle inequality violated");
                assert!((space.distance(&p, &p).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hyperbolic_isometry_invariance() {
        // horizontal translation and dilation preserve half-space distances
        let h3 = ModelSpace::HalfSpace(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let p = random_point(&h3, &mut rng);
            let q = random_point(&h3, &mut rng);
            let d = h3.distance(&p, &q).unwrap();

            let shift = rng.gen_range(-10.0..10.0);
            let ps = [p[0] + shift, p[1], p[2]];
            let qs = [q[0] + shift, q[1], q[2]];
            assert!((h3.distance(&ps, &qs).unwrap() - d).abs() < 1e-10);

            let lambda = rng.gen_range(0.1..10.0);
            let pl: Vec<f64> = p.iter().map(|c| c * lambda).collect();
            let ql: Vec<f64> = q.iter().map(|c| c * lambda).collect();
            assert!((h3.distance(&pl, &ql).unwrap() - d).abs() < 1e-10);
        }
    }

    #[test]
    fn ball_volume_formulas() {
        // hyperbolic 3-space constant at the paper's radius bound
        let lambda = (1.0 + std::f64::consts::E.powi(2) * 1f64.cosh() / 2.0).acosh();
        let c = ball_volume(&ModelSpace::HalfSpace(3), lambda + 1.0).unwrap();
        assert!(c <= 2039.0, "ball volume constant {c} too large");
        assert!(c > 2000.0);

        let v2 = ball_volume(&ModelSpace::HalfSpace(2), 2.0).unwrap();
        assert!((v2 - 4.0 * std::f64::consts::PI * 1f64.sinh().powi(2)).abs() < 1e-9);

        let e3 = ball_volume(&ModelSpace::EuclideanL2(3), 2.0).unwrap();
        assert!((e3 - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-9);

        assert!(ball_volume(&ModelSpace::HalfSpace(4), 1.0).is_err());
    }
}
