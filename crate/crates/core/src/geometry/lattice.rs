use alloc::vec;
use alloc::vec::Vec;

use super::{pseudo_disk, pseudo_distance, DiscPoint};
use crate::fmath;
use crate::{Complex, Error, Result};

/// Default outer radius for lattices and truncated quadrature.
pub const DEFAULT_R_MAX: f64 = 0.995;

/// An r-lattice `{a_k}` of the disc truncated at `|z| ≤ r_max`.
///
/// The points are `r/2`-separated, so the disks `Δ(a_k, r/4)` are pairwise
/// disjoint. `multiplicity_bound` bounds how many of the disks `Δ(a_k, 2r)`
/// can contain a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub radius: f64,
    pub r_max: f64,
    pub points: Vec<DiscPoint>,
    pub multiplicity_bound: usize,
}

/// Result of auditing a lattice against a sample of disc points.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeCertificate {
    pub min_separation: f64,
    pub disjoint: bool,
    pub audited: usize,
    pub covered: usize,
    pub max_multiplicity: usize,
    pub multiplicity_bound: usize,
}

impl LatticeCertificate {
    pub fn holds(&self) -> bool {
        self.disjoint && self.covered == self.audited && self.max_multiplicity <= self.multiplicity_bound
    }
}

/// Points bucketed by hyperbolic distance from the origin, each bucket sorted
/// by argument. `|β(0,z) − β(0,w)| ≤ β(z,w)` prunes buckets and the Euclidean
/// shape of `Δ(z, δ)` prunes angles.
struct AnnulusIndex {
    width: f64,
    buckets: Vec<Vec<(f64, usize)>>,
    points: Vec<DiscPoint>,
}

impl AnnulusIndex {
    fn new(width: f64, r_max: f64) -> Self {
        let n = fmath::ceil(fmath::atanh(r_max) / width) as usize + 2;
        AnnulusIndex {
            width,
            buckets: vec![Vec::new(); n],
            points: Vec::new(),
        }
    }

    fn bucket_of(&self, z: DiscPoint) -> usize {
        let b = fmath::floor(fmath::atanh(z.abs()) / self.width) as usize;
        b.min(self.buckets.len() - 1)
    }

    fn insert(&mut self, z: DiscPoint) {
        let idx = self.points.len();
        self.points.push(z);
        let b = self.bucket_of(z);
        let th = z.arg();
        let bucket = &mut self.buckets[b];
        let pos = bucket.partition_point(|&(a, _)| a < th);
        bucket.insert(pos, (th, idx));
    }

    /// Calls `visit` with the index of every stored point `w` with `d(z, w) < delta`.
    fn for_each_within(&self, z: DiscPoint, delta: f64, mut visit: impl FnMut(usize)) {
        if delta >= 1.0 {
            (0..self.points.len()).for_each(visit);
            return;
        }
        let beta = fmath::atanh(z.abs());
        let reach = fmath::atanh(delta);
        let lo = fmath::floor(((beta - reach) / self.width).max(0.0)) as usize;
        let hi = (fmath::floor((beta + reach) / self.width) as usize).min(self.buckets.len() - 1);
        let disk = pseudo_disk(z, delta).expect("delta in (0,1)");
        let c = disk.euclid_center.abs();
        let half = if disk.euclid_radius < c {
            fmath::asin(disk.euclid_radius / c) + 1e-12
        } else {
            fmath::PI + 1.0
        };
        let th = z.arg();
        for b in lo..=hi.max(lo) {
            let bucket = &self.buckets[b];
            if half >= fmath::PI {
                for &(_, i) in bucket {
                    if pseudo_distance(z, self.points[i]) < delta {
                        visit(i);
                    }
                }
                continue;
            }
            let mut scan = |from: f64, to: f64| {
                let start = bucket.partition_point(|&(a, _)| a < from);
                for &(a, i) in &bucket[start..] {
                    if a > to {
                        break;
                    }
                    if pseudo_distance(z, self.points[i]) < delta {
                        visit(i);
                    }
                }
            };
            let (from, to) = (th - half, th + half);
            if from < -fmath::PI {
                scan(from + 2.0 * fmath::PI, fmath::PI);
                scan(-fmath::PI, to);
            } else if to > fmath::PI {
                scan(from, fmath::PI);
                scan(-fmath::PI, to - 2.0 * fmath::PI);
            } else {
                scan(from, to);
            }
        }
    }

    fn any_within(&self, z: DiscPoint, delta: f64) -> bool {
        let mut hit = false;
        self.for_each_within(z, delta, |_| hit = true);
        hit
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Candidate stream: concentric rings at hyperbolic spacing `step`, each
/// rotated by the golden angle so consecutive rings trace an outward spiral.
/// The outermost ring sits exactly on `r_max`.
fn spiral_candidates(step: f64, r_max: f64) -> Vec<DiscPoint> {
    let beta_max = fmath::atanh(r_max);
    let mut out = vec![DiscPoint::ORIGIN];
    let mut j = 1usize;
    loop {
        let beta = (j as f64 * step).min(beta_max);
        let rho = fmath::tanh(beta).min(r_max);
        // Hyperbolic circumference π·sinh(2β) in the metric |dz|/(1−|z|²).
        let m = (fmath::ceil(fmath::PI * fmath::sinh(2.0 * beta) / step) as usize).max(3);
        let offset = GOLDEN_ANGLE * j as f64;
        for k in 0..m {
            let th = offset + 2.0 * fmath::PI * k as f64 / m as f64;
            out.push(DiscPoint::clamped(Complex::from_polar(rho, th)));
        }
        if beta >= beta_max {
            break;
        }
        j += 1;
    }
    out
}

/// Upper bound on the number of `Δ(a_k, 2r)` containing one point: each such
/// `a_k` has its disjoint disk `Δ(a_k, r/4)` inside `Δ(z, ρ)` with
/// `ρ = (2r + r/4)/(1 + r²/2)`, so Möbius-invariant areas bound the count.
/// When `2r ≥ 1` the disks `Δ(a_k, 2r)` are the whole disc and the bound is the
/// number of points.
fn packing_bound(r: f64, n_points: usize) -> usize {
    if 2.0 * r >= 1.0 {
        return n_points;
    }
    let outer = (2.0 * r + r / 4.0) / (1.0 + r * r / 2.0);
    let inner = r / 4.0;
    let inv_area = |x: f64| x * x / (1.0 - x * x);
    let bound = fmath::floor(inv_area(outer) / inv_area(inner)) as usize;
    bound.min(n_points)
}

/// Greedy maximal `r/2`-separated set inside `|z| ≤ r_max`, scanned over a
/// deterministic outward spiral of candidates.
pub fn build_lattice(r: f64, r_max: f64) -> Result<Lattice> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain {
            what: "lattice radius",
            value: r,
        });
    }
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::Domain {
            what: "lattice r_max",
            value: r_max,
        });
    }
    let sep = r / 2.0;
    let step = fmath::atanh(r / 8.0);
    let mut index = AnnulusIndex::new(fmath::atanh(sep.min(0.999)), r_max);
    for c in spiral_candidates(step, r_max) {
        if !index.any_within(c, sep) {
            index.insert(c);
        }
    }
    let points = index.points;
    let multiplicity_bound = packing_bound(r, points.len());
    Ok(Lattice {
        radius: r,
        r_max,
        points,
        multiplicity_bound,
    })
}

/// Deterministic audit sample of `n_rings × n_angles` points in `|z| ≤ r_max`,
/// uniform in hyperbolic radius and including the outer circle.
pub fn audit_grid(r_max: f64, n_rings: usize, n_angles: usize) -> Vec<DiscPoint> {
    let beta_max = fmath::atanh(r_max);
    let mut out = Vec::with_capacity(n_rings * n_angles);
    for i in 0..n_rings {
        let rho = fmath::tanh(beta_max * i as f64 / (n_rings - 1).max(1) as f64).min(r_max);
        for k in 0..n_angles {
            let th = 2.0 * fmath::PI * (k as f64 + 0.5 * (i % 2) as f64) / n_angles as f64;
            out.push(DiscPoint::clamped(Complex::from_polar(rho, th)));
        }
    }
    out
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lattice points with `|a| ≤ radius`.
    pub fn points_within(&self, radius: f64) -> Vec<DiscPoint> {
        self.points.iter().copied().filter(|p| p.abs() <= radius).collect()
    }

    /// Checks separation (hence disjointness of the `r/4` disks) exactly over
    /// all pairs, and covering and `2r`-multiplicity on `audit`.
    pub fn certify(&self, audit: &[DiscPoint]) -> LatticeCertificate {
        let r = self.radius;
        let mut index = AnnulusIndex::new(fmath::atanh((r / 2.0).min(0.999)), self.r_max);
        let mut min_sep = f64::INFINITY;
        for &p in &self.points {
            // Nearest earlier point, looked up within a generous radius.
            let probe = (2.0 * r).min(0.999);
            let pts = &index.points;
            let mut local = f64::INFINITY;
            index.for_each_within(p, probe, |i| local = local.min(pseudo_distance(p, pts[i])));
            min_sep = min_sep.min(local);
            index.insert(p);
        }
        let disjoint = min_sep >= r / 2.0;

        let mut covered = 0usize;
        let mut max_mult = 0usize;
        for &z in audit {
            if index.any_within(z, r) {
                covered += 1;
            }
            let mut count = 0usize;
            index.for_each_within(z, (2.0 * r).min(1.0), |_| count += 1);
            max_mult = max_mult.max(count);
        }
        LatticeCertificate {
            min_separation: min_sep,
            disjoint,
            audited: audit.len(),
            covered,
            max_multiplicity: max_mult,
            multiplicity_bound: self.multiplicity_bound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_min_separation(points: &[DiscPoint]) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..points.len() {
            for j in 0..i {
                m = m.min(pseudo_distance(points[i], points[j]));
            }
        }
        m
    }

    #[test]
    fn lattice_half_radius() {
        let l = build_lattice(0.5, 0.9).unwrap();
        assert!(brute_min_separation(&l.points) >= 0.25);
        let audit = audit_grid(0.9, 100, 100);
        assert_eq!(audit.len(), 10_000);
        // Covering oracle: direct membership scan over every lattice point.
        for z in &audit {
            assert!(l.points.iter().any(|&a| pseudo_distance(z.clone(), a) < 0.5), "{z:?} uncovered");
        }
        let cert = l.certify(&audit);
        assert!(cert.holds(), "{cert:?}");
    }

    #[test]
    fn multiplicity_counting_oracle() {
        let l = build_lattice(0.2, 0.9).unwrap();
        let audit = audit_grid(0.9, 30, 40);
        let brute = audit
            .iter()
            .map(|&z| l.points.iter().filter(|&&a| pseudo_distance(z, a) < 0.4).count())
            .max()
            .unwrap();
        let cert = l.certify(&audit);
        assert_eq!(cert.max_multiplicity, brute);
        assert!(brute <= l.multiplicity_bound);
        assert!((cert.min_separation - brute_min_separation(&l.points)).abs() < 1e-15);
    }

    #[test]
    fn lattice_is_deterministic() {
        assert_eq!(build_lattice(0.3, 0.95).unwrap(), build_lattice(0.3, 0.95).unwrap());
    }

    #[test]
    fn lattice_domain_errors() {
        assert!(build_lattice(0.0, 0.9).is_err());
        assert!(build_lattice(-0.1, 0.9).is_err());
        assert!(build_lattice(0.5, 1.0).is_err());
        assert!(build_lattice(1.0, 0.9).is_ok());
    }

    #[test]
    fn packing_bound_values() {
        assert_eq!(packing_bound(0.5, 123), 123);
        let b = packing_bound(0.2, usize::MAX);
        assert!(b > 10 && b < 200, "{b}");
    }
}
