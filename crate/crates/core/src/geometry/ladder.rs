use alloc::vec::Vec;

use super::DiscPoint;
use crate::fmath;
use crate::{Error, Result};

/// Dyadic rings approaching the unit circle; every `|z| → 1` limit is read off
/// these rings as a trend.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryLadder {
    pub radii: Vec<f64>,
    pub samples_per_ring: usize,
}

const INNER_RADIUS: f64 = 0.5;

/// Radii `1 − 2^{−j}(1 − ρ₀)` for `j = 0..n_rings` with `ρ₀ = 0.5`.
pub fn boundary_ladder(n_rings: usize, samples_per_ring: usize) -> Result<BoundaryLadder> {
    if n_rings < 2 {
        return Err(Error::Domain {
            what: "ladder ring count",
            value: n_rings as f64,
        });
    }
    if samples_per_ring == 0 {
        return Err(Error::Domain {
            what: "ladder samples per ring",
            value: 0.0,
        });
    }
    let radii: Vec<f64> = (0..n_rings)
        .map(|j| 1.0 - fmath::powi(0.5, j as u32) * (1.0 - INNER_RADIUS))
        .collect();
    if radii.iter().any(|&r| r >= 1.0) {
        return Err(Error::Domain {
            what: "ladder ring count (last radius rounds to 1)",
            value: n_rings as f64,
        });
    }
    Ok(BoundaryLadder {
        radii,
        samples_per_ring,
    })
}

impl BoundaryLadder {
    pub fn n_rings(&self) -> usize {
        self.radii.len()
    }

    pub fn last_radius(&self) -> f64 {
        *self.radii.last().expect("ladder has rings")
    }

    /// Equiangular samples on ring `j`.
    pub fn ring_points(&self, j: usize) -> Vec<DiscPoint> {
        let r = self.radii[j];
        let m = self.samples_per_ring;
        (0..m)
            .map(|k| {
                let th = 2.0 * fmath::PI * k as f64 / m as f64;
                DiscPoint::clamped(crate::Complex::from_polar(r, th))
            })
            .collect()
    }

    /// All samples, ring by ring.
    pub fn points(&self) -> Vec<DiscPoint> {
        (0..self.n_rings()).flat_map(|j| self.ring_points(j)).collect()
    }

    /// Per-ring maxima of `values`, which must be laid out like [`Self::points`].
    pub fn ring_maxima(&self, values: &[f64]) -> Vec<(f64, f64)> {
        let m = self.samples_per_ring;
        assert_eq!(values.len(), m * self.n_rings(), "values do not match the ladder");
        self.radii
            .iter()
            .enumerate()
            .map(|(j, &r)| {
                let ring = &values[j * m..(j + 1) * m];
                let max = ring.iter().fold(0.0f64, |acc, &v| {
                    if v.is_nan() || acc.is_nan() {
                        f64::NAN
                    } else {
                        acc.max(v)
                    }
                });
                (r, max)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ladders() {
        let l = boundary_ladder(2, 4).unwrap();
        assert_eq!(l.radii, [0.5, 0.75]);
        assert_eq!(l.points().len(), 8);

        let l = boundary_ladder(4, 8).unwrap();
        assert_eq!(l.points().len(), 32);
        assert_eq!(l.last_radius(), 0.9375);
        assert!(l.points().iter().all(|p| p.norm_sqr() < 1.0));
        assert!(l.radii.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_degenerate_ladders() {
        assert!(boundary_ladder(1, 4).is_err());
        assert!(boundary_ladder(3, 0).is_err());
        assert!(boundary_ladder(80, 4).is_err());
    }

    #[test]
    fn ring_maxima_follow_ring_layout() {
        let l = boundary_ladder(3, 2).unwrap();
        let m = l.ring_maxima(&[1.0, 2.0, 0.5, 0.25, 4.0, 3.0]);
        assert_eq!(m, [(0.5, 2.0), (0.75, 0.5), (0.875, 4.0)]);
    }
}
