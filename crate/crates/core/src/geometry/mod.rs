//! Pseudohyperbolic geometry of the unit disc.

mod ladder;
mod lattice;

use crate::fmath;
use crate::{Complex, Error, Result};

pub use ladder::{boundary_ladder, BoundaryLadder};
pub use lattice::{build_lattice, audit_grid, Lattice, LatticeCertificate, DEFAULT_R_MAX};

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscPoint {
    pub re: f64,
    pub im: f64,
}

impl DiscPoint {
    pub const ORIGIN: DiscPoint = DiscPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        let n = re * re + im * im;
        if !(n < 1.0) {
            return Err(Error::Domain {
                what: "disc point |z|",
                value: fmath::sqrt(n),
            });
        }
        Ok(DiscPoint { re, im })
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn from_complex(z: Complex) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn from_polar(radius: f64, angle: f64) -> Result<Self> {
        Self::new(radius * fmath::cos(angle), radius * fmath::sin(angle))
    }

    /// Builds a point known to be inside the disc; values that rounding pushed
    /// onto the circle are pulled back to the largest representable radius.
    pub(crate) fn clamped(z: Complex) -> Self {
        let n = z.norm_sqr();
        if n < 1.0 {
            DiscPoint { re: z.re, im: z.im }
        } else {
            let s = (1.0 - f64::EPSILON) / fmath::sqrt(n);
            DiscPoint {
                re: z.re * s,
                im: z.im * s,
            }
        }
    }

    #[inline]
    pub fn to_complex(self) -> Complex {
        Complex::new(self.re, self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn abs(self) -> f64 {
        fmath::hypot(self.re, self.im)
    }

    #[inline]
    pub fn arg(self) -> f64 {
        fmath::atan2(self.im, self.re)
    }
}

/// `d(z, w) = |z − w| / |1 − w̄z|`.
pub fn pseudo_distance(z: DiscPoint, w: DiscPoint) -> f64 {
    let (z, w) = (z.to_complex(), w.to_complex());
    let num = (z - w).norm();
    let den = (Complex::new(1.0, 0.0) - w.conj() * z).norm();
    let d = num / den;
    if d < 1.0 {
        d
    } else {
        1.0 - f64::EPSILON
    }
}

/// The involution `φ_a(z) = (a − z) / (1 − āz)`; it swaps `0` and `a`.
#[inline]
pub fn involution(a: DiscPoint, z: Complex) -> Complex {
    let a = a.to_complex();
    (a - z) / (Complex::new(1.0, 0.0) - a.conj() * z)
}

/// Pseudohyperbolic disk `Δ(z, r)` with its Euclidean description.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoDisk {
    pub center: DiscPoint,
    pub radius: f64,
    pub euclid_center: DiscPoint,
    pub euclid_radius: f64,
}

/// Euclidean parameters of `Δ(z, r)`: center `(1−r²)z/(1−r²|z|²)` and radius
/// `r(1−|z|²)/(1−r²|z|²)`.
pub fn pseudo_disk(z: DiscPoint, r: f64) -> Result<PseudoDisk> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "pseudohyperbolic radius",
            value: r,
        });
    }
    let n = z.norm_sqr();
    let den = 1.0 - r * r * n;
    let scale = (1.0 - r * r) / den;
    Ok(PseudoDisk {
        center: z,
        radius: r,
        euclid_center: DiscPoint {
            re: z.re * scale,
            im: z.im * scale,
        },
        euclid_radius: r * (1.0 - n) / den,
    })
}

impl PseudoDisk {
    /// Open-disk membership `d(center, w) < radius`.
    pub fn contains(&self, w: DiscPoint) -> bool {
        pseudo_distance(self.center, w) < self.radius
    }

    /// Euclidean area `π·R²` of the disk.
    pub fn area(&self) -> f64 {
        fmath::PI * self.euclid_radius * self.euclid_radius
    }
}

/// The set `S(a) = {φ_a(z) : Re(āz) ≤ 0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarlesonSet {
    pub anchor: DiscPoint,
}

/// Euclidean circle orthogonal to the unit circle that bounds `S(a)` inside the disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCircle {
    pub center: Complex,
    pub radius: f64,
}

impl CarlesonSet {
    pub fn new(anchor: DiscPoint) -> Self {
        CarlesonSet { anchor }
    }

    pub fn contains(&self, w: DiscPoint) -> bool {
        carleson_contains(self, w)
    }

    /// `None` when `S(a)` is the whole disc (`a = 0`); otherwise the circle
    /// through `a` orthogonal to both the unit circle and the radius through
    /// `a`, whose closed interior meets the disc exactly in `S(a)`.
    pub fn boundary_circle(&self) -> Option<BoundaryCircle> {
        let m = self.anchor.abs();
        if m == 0.0 {
            return None;
        }
        let dir = self.anchor.to_complex() / m;
        let c = (1.0 + m * m) / (2.0 * m);
        Some(BoundaryCircle {
            center: dir * c,
            radius: (1.0 - m * m) / (2.0 * m),
        })
    }

    /// Exact Euclidean area: `atan ρ + ρ²·atan(1/ρ) − ρ` for the boundary-circle radius ρ.
    pub fn area(&self) -> f64 {
        match self.boundary_circle() {
            None => fmath::PI,
            Some(c) => {
                let rho = c.radius;
                fmath::atan(rho) + rho * rho * fmath::atan(1.0 / rho) - rho
            }
        }
    }
}

/// Membership in `S(a)`: invert the involution and test `Re(ā·φ_a(w)) ≤ 0`.
pub fn carleson_contains(s: &CarlesonSet, w: DiscPoint) -> bool {
    let z = involution(s.anchor, w.to_complex());
    (s.anchor.to_complex().conj() * z).re <= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec::Vec;

    fn pt(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(re, im).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(pseudo_distance(DiscPoint::ORIGIN, pt(0.6, 0.0)), 0.6);
        let z = pt(0.3, -0.2);
        assert_eq!(pseudo_distance(z, z), 0.0);
        assert!((pseudo_distance(pt(0.5, 0.0), pt(-0.5, 0.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn outside_disc_is_domain_error() {
        assert!(matches!(DiscPoint::new(1.0, 0.0), Err(Error::Domain { .. })));
        assert!(DiscPoint::new(0.8, 0.7).is_err());
        assert!(DiscPoint::new(f64::NAN, 0.0).is_err());
    }

    // Oracle: sample the boundary of the returned Euclidean disk and measure d.
    fn boundary_defect(z: DiscPoint, r: f64) -> f64 {
        let d = pseudo_disk(z, r).unwrap();
        let mut worst = 0.0f64;
        for k in 0..1000 {
            let th = 2.0 * core::f64::consts::PI * k as f64 / 1000.0;
            let w = d.euclid_center.to_complex()
                + Complex::new(th.cos(), th.sin()) * d.euclid_radius;
            let w = DiscPoint::from_complex(w).unwrap();
            worst = worst.max((pseudo_distance(z, w) - r).abs());
        }
        worst
    }

    #[test]
    fn pseudo_disk_examples() {
        let d = pseudo_disk(DiscPoint::ORIGIN, 0.5).unwrap();
        assert_eq!(d.euclid_center, DiscPoint::ORIGIN);
        assert_eq!(d.euclid_radius, 0.5);

        let d = pseudo_disk(pt(0.5, 0.0), 0.5).unwrap();
        assert!((d.euclid_center.re - 0.4).abs() < 1e-15);
        assert!((d.euclid_radius - 0.4).abs() < 1e-15);
        assert!(boundary_defect(pt(0.5, 0.0), 0.5) < 1e-9);

        let d = pseudo_disk(pt(0.9, 0.0), 0.3).unwrap();
        assert!((d.euclid_center.re - 0.819 / 0.9271).abs() < 1e-12);
        assert!((d.euclid_radius - 0.06148).abs() < 1e-5);
        assert!(boundary_defect(pt(0.9, 0.0), 0.3) < 1e-9);
    }

    #[test]
    fn pseudo_disk_rejects_bad_radius() {
        assert!(pseudo_disk(DiscPoint::ORIGIN, 0.0).is_err());
        assert!(pseudo_disk(DiscPoint::ORIGIN, 1.0).is_err());
    }

    #[test]
    fn carleson_examples() {
        let s0 = CarlesonSet::new(DiscPoint::ORIGIN);
        for w in [pt(0.0, 0.0), pt(0.9, 0.1), pt(-0.99, 0.0)] {
            assert!(s0.contains(w));
        }
        let a = pt(0.3, 0.6);
        assert!(CarlesonSet::new(a).contains(a));
        assert!(!CarlesonSet::new(pt(0.5, 0.0)).contains(pt(-0.5, 0.0)));
    }

    #[test]
    fn carleson_area_matches_indicator_count() {
        // Brute-force oracle: count grid cells inside S(a).
        for a in [pt(0.5, 0.0), pt(0.0, -0.8), pt(0.2, 0.2)] {
            let s = CarlesonSet::new(a);
            let n = 1200;
            let h = 2.0 / n as f64;
            let mut count = 0usize;
            for i in 0..n {
                for j in 0..n {
                    let x = -1.0 + (i as f64 + 0.5) * h;
                    let y = -1.0 + (j as f64 + 0.5) * h;
                    if x * x + y * y < 1.0 && s.contains(pt(x, y)) {
                        count += 1;
                    }
                }
            }
            let est = count as f64 * h * h;
            assert!((est - s.area()).abs() < 5e-3, "{a:?}: {est} vs {}", s.area());
        }
    }

    #[test]
    fn boundary_circle_bounds_the_set() {
        let s = CarlesonSet::new(pt(-0.4, 0.3));
        let c = s.boundary_circle().unwrap();
        let pts: Vec<DiscPoint> = (0..40)
            .flat_map(|i| (0..40).map(move |j| (i, j)))
            .filter_map(|(i, j)| DiscPoint::new(-0.975 + 0.05 * i as f64, -0.975 + 0.05 * j as f64).ok())
            .collect();
        for w in pts {
            let inside = (w.to_complex() - c.center).norm() <= c.radius;
            assert_eq!(inside, s.contains(w), "{w:?}");
        }
    }

    fn disc_point() -> impl Strategy<Value = DiscPoint> {
        (0.0f64..0.999, 0.0f64..core::f64::consts::TAU)
            .prop_map(|(r, t)| DiscPoint::from_polar(r, t).unwrap())
    }

    proptest! {
        #[test]
        fn strong_triangle_inequality(z in disc_point(), w in disc_point(), x in disc_point()) {
            let a = pseudo_distance(z, x);
            let b = pseudo_distance(x, w);
            prop_assert!(pseudo_distance(z, w) <= (a + b) / (1.0 + a * b) + 1e-12);
        }

        #[test]
        fn distance_is_symmetric(z in disc_point(), w in disc_point()) {
            prop_assert!((pseudo_distance(z, w) - pseudo_distance(w, z)).abs() < 1e-14);
        }

        #[test]
        fn carleson_membership_is_idempotent(a in disc_point(), w in disc_point()) {
            let s = CarlesonSet::new(a);
            prop_assert_eq!(s.contains(w), s.contains(w));
            prop_assert!(s.contains(a));
        }
    }

    #[test]
    fn comparable_boundary_distances_in_a_pseudo_disk() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let r = 0.9;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..10_000 {
            let z = DiscPoint::from_polar(rng.gen_range(0.0..0.9999), rng.gen_range(0.0..6.3)).unwrap();
            // A point of Δ(z, r): φ_z of a point of radius < r.
            let v = Complex::from_polar(rng.gen_range(0.0..r), rng.gen_range(0.0..6.3));
            let w = DiscPoint::clamped(involution(z, v));
            let one_minus_wz = (Complex::new(1.0, 0.0) - w.to_complex().conj() * z.to_complex()).norm();
            for ratio in [(1.0 - z.abs()) / (1.0 - w.abs()), (1.0 - z.abs()) / one_minus_wz] {
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        // C(r) = 2(1+r)/(1−r) bounds both ratios.
        let c = 2.0 * (1.0 + r) / (1.0 - r);
        assert!(lo > 1.0 / c && hi < c, "[{lo}, {hi}]");
    }
}
