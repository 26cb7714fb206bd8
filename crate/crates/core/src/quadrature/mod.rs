//! Deterministic quadrature on the unit disc and on its sub-regions.
//!
//! Every rule is a product rule in some polar parametrization: Gauss nodes in
//! the radial variable and equispaced (trapezoid) or Gauss nodes in the angle.
//! Sums are pairwise in node order, so results are reproducible bit for bit.

mod gauss;

use alloc::format;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::fmath;
use crate::geometry::{involution, DiscPoint};
use crate::linalg::pairwise;
use crate::{Complex, Error, Result};

pub use gauss::{endpoint_rule, gauss_jacobi, gauss_legendre, GaussRule};

/// Largest radial resolution tried by [`region_quadrature`].
pub const MAX_RESOLUTION: usize = 1024;
/// Relative change of the probe integral under doubling that accepts a rule.
pub const ACCEPT_TOLERANCE: f64 = 1e-6;

/// Integration domains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// `|z| < r_max`, with `r_max = 1` meaning the whole disc.
    FullDisc { r_max: f64 },
    EuclideanDisk { center: DiscPoint, radius: f64 },
    /// `Δ(center, radius)`, integrated as the Möbius image of `|ζ| < radius`.
    PseudoDisk { center: DiscPoint, radius: f64 },
    CarlesonSet { anchor: DiscPoint },
}

/// A quadrature rule over a [`Region`].
///
/// `radial_nodes` and `angular_count` describe the product structure in the
/// rule's own polar variable. For full-disc rules, node `i·M + k` sits at
/// radius `radial_nodes[i].0` and angle `2πk/M` and carries weight
/// `radial_nodes[i].1 / M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscQuadrature {
    pub region: Region,
    pub radial_nodes: Vec<(f64, f64)>,
    pub angular_count: usize,
    /// Exponent `e` of the `(1 − |z|²)^e` behaviour the radial rule is built for.
    pub boundary_exponent: f64,
    nodes: Vec<(Complex, f64)>,
}

impl DiscQuadrature {
    pub fn nodes(&self) -> &[(Complex, f64)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of the weights.
    pub fn area(&self) -> f64 {
        pairwise(0, self.nodes.len(), 0.0, &|i| self.nodes[i].1)
    }

    /// `Σ wᵢ f(zᵢ)`; a non-finite value at any node is an error naming the node.
    pub fn integrate<F: Fn(Complex) -> Complex>(&self, f: F) -> Result<Complex> {
        let bad = Cell::new(None);
        let s = pairwise(0, self.nodes.len(), Complex::new(0.0, 0.0), &|i| {
            let (z, w) = self.nodes[i];
            let v = f(z);
            if !(v.re.is_finite() && v.im.is_finite()) && bad.get().is_none() {
                bad.set(Some(z));
            }
            v * w
        });
        match bad.get() {
            Some(z) => Err(Error::Evaluation { re: z.re, im: z.im }),
            None => Ok(s),
        }
    }

    /// Real-valued version of [`Self::integrate`].
    pub fn integrate_real<F: Fn(Complex) -> f64>(&self, f: F) -> Result<f64> {
        let bad = Cell::new(None);
        let s = pairwise(0, self.nodes.len(), 0.0, &|i| {
            let (z, w) = self.nodes[i];
            let v = f(z);
            if !v.is_finite() && bad.get().is_none() {
                bad.set(Some(z));
            }
            v * w
        });
        match bad.get() {
            Some(z) => Err(Error::Evaluation { re: z.re, im: z.im }),
            None => Ok(s),
        }
    }

    /// Real integral where non-finite integrand values are returned as they
    /// are rather than raised; used by divergence detectors.
    pub fn integrate_extended<F: Fn(Complex) -> f64>(&self, f: F) -> f64 {
        pairwise(0, self.nodes.len(), 0.0, &|i| {
            let (z, w) = self.nodes[i];
            f(z) * w
        })
    }
}

fn angles(m: usize) -> impl Iterator<Item = (f64, f64)> {
    let h = 2.0 * fmath::PI / m as f64;
    (0..m).map(move |k| {
        let th = h * k as f64;
        (fmath::cos(th), fmath::sin(th))
    })
}

fn check_sizes(n_radial: usize, n_angular: usize) -> Result<()> {
    if n_radial == 0 || n_angular == 0 {
        return Err(Error::Domain {
            what: "quadrature size",
            value: 0.0,
        });
    }
    Ok(())
}

/// Polar rule on `|z| < r_max` in the variable `s = |z|²` (`dA = ½ ds dθ`).
///
/// With `r_max = 1` the radial rule is Gauss–Jacobi for `(1 − s)^e`, so
/// integrands behaving like `(1 − |z|²)^e` near the circle are integrated
/// accurately; `e = 0` gives Gauss–Legendre.
pub fn full_disc(r_max: f64, n_radial: usize, n_angular: usize, e: f64) -> Result<DiscQuadrature> {
    check_sizes(n_radial, n_angular)?;
    if !(r_max > 0.0 && r_max <= 1.0) {
        return Err(Error::Domain {
            what: "quadrature r_max",
            value: r_max,
        });
    }
    let (rule, e) = if r_max >= 1.0 {
        (endpoint_rule(n_radial, e)?, e)
    } else {
        (gauss_legendre(n_radial)?.mapped(0.0, r_max * r_max), 0.0)
    };
    let radial_nodes: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(s, w)| (fmath::sqrt(*s), fmath::PI * w))
        .collect();
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    for &(r, w) in &radial_nodes {
        let wk = w / n_angular as f64;
        for (c, s) in angles(n_angular) {
            nodes.push((Complex::new(r * c, r * s), wk));
        }
    }
    Ok(DiscQuadrature {
        region: Region::FullDisc { r_max },
        radial_nodes,
        angular_count: n_angular,
        boundary_exponent: e,
        nodes,
    })
}

/// Polar rule centred on a Euclidean disk contained in the unit disc.
pub fn euclidean_disk(center: DiscPoint, radius: f64, n_radial: usize, n_angular: usize) -> Result<DiscQuadrature> {
    check_sizes(n_radial, n_angular)?;
    if !(radius > 0.0) || center.abs() + radius > 1.0 {
        return Err(Error::Domain {
            what: "Euclidean disk radius",
            value: radius,
        });
    }
    let g = gauss_legendre(n_radial)?.mapped(0.0, radius);
    let radial_nodes: Vec<(f64, f64)> = g
        .nodes
        .iter()
        .zip(&g.weights)
        .map(|(r, w)| (*r, 2.0 * fmath::PI * r * w))
        .collect();
    let c = center.to_complex();
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    for &(r, w) in &radial_nodes {
        let wk = w / n_angular as f64;
        for (co, si) in angles(n_angular) {
            nodes.push((c + Complex::new(r * co, r * si), wk));
        }
    }
    Ok(DiscQuadrature {
        region: Region::EuclideanDisk { center, radius },
        radial_nodes,
        angular_count: n_angular,
        boundary_exponent: 0.0,
        nodes,
    })
}

#[inline]
fn mobius_jacobian(b: Complex, zeta: Complex) -> f64 {
    let den = (Complex::new(1.0, 0.0) - b.conj() * zeta).norm_sqr();
    let f = (1.0 - b.norm_sqr()) / den;
    f * f
}

/// Rule on `Δ(center, r)` as the image of a polar rule on `|ζ| < r` under
/// `φ_center`, weighted by `|φ′|²`.
pub fn pseudo_disk_rule(center: DiscPoint, r: f64, n_radial: usize, n_angular: usize) -> Result<DiscQuadrature> {
    check_sizes(n_radial, n_angular)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "pseudohyperbolic radius",
            value: r,
        });
    }
    let g = gauss_legendre(n_radial)?.mapped(0.0, r);
    let radial_nodes: Vec<(f64, f64)> = g
        .nodes
        .iter()
        .zip(&g.weights)
        .map(|(rho, w)| (*rho, 2.0 * fmath::PI * rho * w))
        .collect();
    let b = center.to_complex();
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    for &(rho, w) in &radial_nodes {
        let wk = w / n_angular as f64;
        for (co, si) in angles(n_angular) {
            let zeta = Complex::new(rho * co, rho * si);
            nodes.push((involution(center, zeta), wk * mobius_jacobian(b, zeta)));
        }
    }
    Ok(DiscQuadrature {
        region: Region::PseudoDisk { center, radius: r },
        radial_nodes,
        angular_count: n_angular,
        boundary_exponent: 0.0,
        nodes,
    })
}

/// Full-disc rule pulled back through `φ_b`, concentrating nodes near `b`.
///
/// Suited to integrands peaked at `b` such as powers of `|K(z, b)|`.
pub fn recentered(b: DiscPoint, n_radial: usize, n_angular: usize, e: f64) -> Result<DiscQuadrature> {
    let base = full_disc(1.0, n_radial, n_angular, e)?;
    let bc = b.to_complex();
    let nodes = base
        .nodes
        .iter()
        .map(|&(zeta, w)| (involution(b, zeta), w * mobius_jacobian(bc, zeta)))
        .collect();
    Ok(DiscQuadrature { nodes, ..base })
}

/// Exact-geometry rule on the Carleson set `S(a)`.
///
/// `S(a)` is the part of the disc inside the circle through `a` orthogonal to
/// the unit circle, centred at `C = c·a/|a|` with `c = (1+|a|²)/(2|a|)` and
/// radius `ρ = (1−|a|²)/(2|a|)`. The rule is polar around the exterior point
/// `C`: the angle ψ runs over `|ψ| < asin(1/c)` and the distance `t` from
/// `t₁(ψ)` (on the unit circle) to `ρ`. Since `1 − |z|² = (t − t₁)(t₊ − t)`,
/// a Jacobi rule at `t₁` handles `(1 − |z|²)^e` exactly up to a smooth factor.
pub fn carleson_rule(anchor: DiscPoint, n_radial: usize, n_angular: usize, e: f64) -> Result<DiscQuadrature> {
    check_sizes(n_radial, n_angular)?;
    let a = anchor.abs();
    if a == 0.0 {
        let base = full_disc(1.0, n_radial, n_angular, e)?;
        return Ok(DiscQuadrature {
            region: Region::CarlesonSet { anchor },
            ..base
        });
    }
    let dir = anchor.to_complex() / a;
    let c = (1.0 + a * a) / (2.0 * a);
    let rho = (1.0 - a * a) / (2.0 * a);
    let big_c = dir * c;
    let phi_max = fmath::asin(1.0 / c);
    let tau = gauss_legendre(n_angular)?.mapped(-0.5 * fmath::PI, 0.5 * fmath::PI);
    let srule = endpoint_rule(n_radial, e)?;
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    for (&tk, &wk) in tau.nodes.iter().zip(&tau.weights) {
        let psi = phi_max * fmath::sin(tk);
        let dpsi = phi_max * fmath::cos(tk) * wk;
        let sp = fmath::sin(psi);
        let disc = (1.0 - c * c * sp * sp).max(0.0);
        let t1 = rho * rho / (c * fmath::cos(psi) + fmath::sqrt(disc));
        let span = (rho - t1).max(0.0);
        let ray = -dir * Complex::new(fmath::cos(psi), sp);
        for (&s, &ws) in srule.nodes.iter().zip(&srule.weights) {
            // t = ρ − span·s, so t − t₁ = span·(1 − s).
            let t = rho - span * s;
            let z = big_c + ray * t;
            let z = DiscPoint::clamped(z).to_complex();
            nodes.push((z, dpsi * span * ws * t));
        }
    }
    Ok(DiscQuadrature {
        region: Region::CarlesonSet { anchor },
        radial_nodes: srule.nodes.iter().copied().zip(srule.weights.iter().copied()).collect(),
        angular_count: n_angular,
        boundary_exponent: e,
        nodes,
    })
}

fn region_label(region: &Region) -> alloc::string::String {
    match region {
        Region::FullDisc { r_max } => format!("full disc (r_max {r_max})"),
        Region::EuclideanDisk { center, radius } => {
            format!("Euclidean disk ({}, {}) radius {radius}", center.re, center.im)
        }
        Region::PseudoDisk { center, radius } => {
            format!("pseudohyperbolic disk ({}, {}) radius {radius}", center.re, center.im)
        }
        Region::CarlesonSet { anchor } => format!("Carleson set S({}, {})", anchor.re, anchor.im),
    }
}

/// Rule for `region` with `resolution` radial and `2·resolution` angular nodes.
pub fn rule_at(region: Region, resolution: usize, e: f64) -> Result<DiscQuadrature> {
    let (nr, na) = (resolution, 2 * resolution);
    match region {
        Region::FullDisc { r_max } => full_disc(r_max, nr, na, e),
        Region::EuclideanDisk { center, radius } => euclidean_disk(center, radius, nr, na),
        Region::PseudoDisk { center, radius } => pseudo_disk_rule(center, radius, nr, na),
        Region::CarlesonSet { anchor } => carleson_rule(anchor, nr, na, e),
    }
}

/// Smallest rule of at least `resolution` whose probe integral of
/// `(1 − |z|²)^e` changes by less than [`ACCEPT_TOLERANCE`] (relative) when the
/// resolution doubles. With `e = 0` the probe is the area.
pub fn accepted_rule(region: Region, resolution: usize, e: f64) -> Result<DiscQuadrature> {
    if resolution < 4 {
        return Err(Error::Domain {
            what: "quadrature resolution",
            value: resolution as f64,
        });
    }
    let probe = |q: &DiscQuadrature| -> f64 {
        if e == 0.0 {
            q.area()
        } else {
            q.integrate_extended(|z| fmath::powf((1.0 - z.norm_sqr()).max(0.0), e))
        }
    };
    let mut res = resolution;
    let mut rule = rule_at(region, res, e)?;
    let mut value = probe(&rule);
    let mut change = f64::INFINITY;
    while res < MAX_RESOLUTION {
        let finer = rule_at(region, 2 * res, e)?;
        let fv = probe(&finer);
        change = fmath::abs(fv - value) / fmath::abs(fv).max(f64::MIN_POSITIVE);
        if change < ACCEPT_TOLERANCE {
            return Ok(rule);
        }
        res *= 2;
        rule = finer;
        value = fv;
    }
    Err(Error::Precision {
        region: region_label(&region),
        change,
    })
}

/// [`accepted_rule`] for plain area.
pub fn region_quadrature(region: Region, resolution: usize) -> Result<DiscQuadrature> {
    accepted_rule(region, resolution, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pseudo_disk, CarlesonSet};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn real(q: &DiscQuadrature, f: impl Fn(Complex) -> f64) -> f64 {
        q.integrate_real(f).unwrap()
    }

    #[test]
    fn full_disc_closed_forms() {
        let q = full_disc(1.0, 12, 24, 0.0).unwrap();
        assert!((q.area() - PI).abs() < 1e-13);
        assert!((real(&q, |z| 1.0 - z.norm_sqr()) - PI / 2.0).abs() < 1e-13);
        assert!((real(&q, |z| z.norm_sqr()) - PI / 2.0).abs() < 1e-13);
        let q = full_disc(0.5, 8, 16, 0.0).unwrap();
        assert!((q.area() - 0.25 * PI).abs() < 1e-13);
    }

    #[test]
    fn full_disc_with_boundary_exponent() {
        // ∫ (1-|z|²)^{-1/2} dA = 2π, exact for the Jacobi rule.
        let q = full_disc(1.0, 8, 8, -0.5).unwrap();
        assert!((real(&q, |z| (1.0 - z.norm_sqr()).powf(-0.5)) - 2.0 * PI).abs() < 1e-12);
        // π/(α+1) for the standard weight at α = 2.5.
        let q = full_disc(1.0, 8, 8, 2.5).unwrap();
        assert!((real(&q, |z| (1.0 - z.norm_sqr()).powf(2.5)) - PI / 3.5).abs() < 1e-13);
    }

    #[test]
    fn nodes_stay_inside_and_weights_positive() {
        for q in [
            full_disc(1.0, 16, 9, 0.7).unwrap(),
            pseudo_disk_rule(DiscPoint::new(0.9, 0.3).unwrap(), 0.8, 10, 20).unwrap(),
            carleson_rule(DiscPoint::new(-0.3, 0.9).unwrap(), 10, 20, -0.4).unwrap(),
            recentered(DiscPoint::real(0.95).unwrap(), 10, 20, 1.0).unwrap(),
        ] {
            assert!(q.nodes().iter().all(|(z, w)| z.norm_sqr() < 1.0 && *w > 0.0));
        }
    }

    #[test]
    fn region_examples() {
        let q = region_quadrature(
            Region::EuclideanDisk {
                center: DiscPoint::ORIGIN,
                radius: 0.5,
            },
            4,
        )
        .unwrap();
        assert!((q.area() - 0.25 * PI).abs() < 1e-12);
        let q = region_quadrature(
            Region::EuclideanDisk {
                center: DiscPoint::real(0.4).unwrap(),
                radius: 0.4,
            },
            4,
        )
        .unwrap();
        assert!((q.area() - 0.502_654_824_574_366_9).abs() < 1e-12);
        let q = region_quadrature(Region::CarlesonSet { anchor: DiscPoint::ORIGIN }, 4).unwrap();
        assert!((q.area() - PI).abs() < 1e-12);
    }

    #[test]
    fn pseudo_disk_rule_matches_euclidean_area() {
        for &(x, y, r) in &[(0.5, 0.0, 0.5), (0.9, 0.3, 0.3), (-0.2, 0.97, 0.6), (0.0, 0.0, 0.9)] {
            let z = DiscPoint::new(x, y).unwrap();
            let q = region_quadrature(Region::PseudoDisk { center: z, radius: r }, 8).unwrap();
            let d = pseudo_disk(z, r).unwrap();
            let exact = PI * d.euclid_radius * d.euclid_radius;
            assert!((q.area() - exact).abs() < 1e-6 * exact, "{x},{y},{r}: {} vs {exact}", q.area());
        }
    }

    #[test]
    fn carleson_rule_matches_exact_area() {
        for &(x, y) in &[(0.5, 0.0), (0.1, 0.2), (-0.7, -0.6), (0.0, 0.999)] {
            let a = DiscPoint::new(x, y).unwrap();
            let q = region_quadrature(Region::CarlesonSet { anchor: a }, 8).unwrap();
            let exact = CarlesonSet::new(a).area();
            assert!((q.area() - exact).abs() < 1e-7 * exact, "{x},{y}: {} vs {exact}", q.area());
        }
    }

    #[test]
    fn carleson_rule_with_singular_weight() {
        // Oracle: midpoint sum of (1-|z|²)^{-1/2} on a fine polar grid restricted
        // by membership, with the tail near |z| = 1 integrated in closed form per ray.
        let a = DiscPoint::real(0.6).unwrap();
        let set = CarlesonSet::new(a);
        let q = accepted_rule(Region::CarlesonSet { anchor: a }, 16, -0.5).unwrap();
        let value = real(&q, |z| (1.0 - z.norm_sqr()).powf(-0.5));
        let (nr, na) = (4000usize, 4000usize);
        let mut oracle = 0.0;
        for j in 0..na {
            let th = -PI + (j as f64 + 0.5) * 2.0 * PI / na as f64;
            for i in 0..nr {
                // s = r² uniform cells; ∫ (1-s)^{-1/2} ds over each cell exactly.
                let (s0, s1) = (i as f64 / nr as f64, (i + 1) as f64 / nr as f64);
                let sm = 0.5 * (s0 + s1);
                let z = Complex::from_polar(sm.sqrt(), th);
                if crate::geometry::carleson_contains(&set, DiscPoint::clamped(z)) {
                    let cell = 2.0 * ((1.0 - s0).sqrt() - (1.0 - s1).sqrt());
                    oracle += 0.5 * cell * 2.0 * PI / na as f64;
                }
            }
        }
        assert!((value - oracle).abs() < 2e-3 * oracle, "{value} vs {oracle}");
    }

    #[test]
    fn recentered_rule_integrates_plain_area() {
        let b = DiscPoint::new(0.7, -0.5).unwrap();
        let q = recentered(b, 40, 200, 0.0).unwrap();
        assert!((q.area() - PI).abs() < 1e-9);
        let q = recentered(b, 30, 200, 1.0).unwrap();
        assert!((real(&q, |z| 1.0 - z.norm_sqr()) - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand_names_the_node() {
        let q = full_disc(1.0, 4, 4, 0.0).unwrap();
        let target = q.nodes()[5].0;
        let err = q
            .integrate(|z| if z == target { Complex::new(f64::NAN, 0.0) } else { Complex::new(1.0, 0.0) })
            .unwrap_err();
        assert_eq!(err, Error::Evaluation { re: target.re, im: target.im });
    }

    #[test]
    fn additivity_disk_plus_annulus() {
        let f = |z: Complex| (z.re * 3.0).cos() + z.norm_sqr() * z.im;
        let full = real(&full_disc(1.0, 40, 80, 0.0).unwrap(), f);
        let inner = real(&full_disc(0.5, 40, 80, 0.0).unwrap(), f);
        // Annulus 0.5 < |z| < 1 as a polar rule in s on [0.25, 1].
        let g = gauss_legendre(40).unwrap().mapped(0.25, 1.0);
        let mut outer = 0.0;
        for (s, w) in g.nodes.iter().zip(&g.weights) {
            for k in 0..80 {
                let z = Complex::from_polar(s.sqrt(), 2.0 * PI * k as f64 / 80.0);
                outer += 0.5 * w * 2.0 * PI / 80.0 * f(z);
            }
        }
        assert!((inner + outer - full).abs() < 1e-6);
    }

    #[test]
    fn refinement_is_cauchy() {
        let f = |z: Complex| 1.0 / (1.2 - z.re).powi(2);
        let vals: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| real(&full_disc(1.0, n, 2 * n, 0.0).unwrap(), f))
            .collect();
        let d: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(d[1] < d[0] && d[2] < d[1] && d[2] < 1e-8, "{d:?}");
    }

    #[test]
    fn unresolvable_region_is_a_precision_error() {
        let a = DiscPoint::ORIGIN;
        // A pseudo-disk of radius extremely close to 1 around 0 is a disc of
        // radius 1 − 1e−14; fine, but a vanishing Euclidean disk is rejected.
        assert!(region_quadrature(Region::EuclideanDisk { center: a, radius: 0.0 }, 8).is_err());
        assert!(region_quadrature(Region::EuclideanDisk { center: a, radius: 0.5 }, 2).is_err());
    }

    proptest! {
        #[test]
        fn positivity(cx in -0.6f64..0.6, cy in -0.6f64..0.6, k in 0u32..6) {
            let q = pseudo_disk_rule(DiscPoint::new(cx, cy).unwrap(), 0.5, 8, 16).unwrap();
            let v = q.integrate_real(|z| (z.re * k as f64).sin().powi(2) + z.im.abs()).unwrap();
            prop_assert!(v >= 0.0);
        }

        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let q = full_disc(1.0, 8, 16, 0.0).unwrap();
            let f = |z: Complex| z * z.conj() + Complex::new(1.0, 0.5) * z;
            let g = |z: Complex| (z * 2.0).exp();
            let lhs = q.integrate(|z| f(z) * a + g(z) * b).unwrap();
            let rhs = q.integrate(f).unwrap() * a + q.integrate(g).unwrap() * b;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
