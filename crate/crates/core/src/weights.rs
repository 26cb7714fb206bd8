//! Positive weights on the disc, region masses, and the Békollé–Bonami and
//! `C_p` constants.

use alloc::vec::Vec;

use crate::fmath;
use crate::geometry::{pseudo_disk, BoundaryLadder, CarlesonSet, DiscPoint};
use crate::quadrature::{accepted_rule, Region};
use crate::report::{classify_ring_trend, max_value, PointValue, RingValue, Verdict};
use crate::{Complex, Error, Result};

/// Floor applied to interpolated grid weights.
pub const GRID_FLOOR: f64 = 1e-12;

/// `n × n` samples on the square `[−1, 1]²`, row `i` at `im = −1 + 2i/(n−1)`
/// and column `j` at `re = −1 + 2j/(n−1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    n: usize,
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 || values.len() != n * n {
            return Err(Error::Domain {
                what: "grid size",
                value: n as f64,
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                what: "grid sample",
                value: bad,
            });
        }
        Ok(GridSamples { n, values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bilinear interpolation, clamped below at [`GRID_FLOOR`].
    pub fn interpolate(&self, z: Complex) -> f64 {
        let n = self.n;
        let h = (n - 1) as f64;
        let locate = |x: f64| {
            let f = ((x + 1.0) * 0.5 * h).clamp(0.0, h);
            let i = (fmath::floor(f) as usize).min(n - 2);
            (i, f - i as f64)
        };
        let (j, tx) = locate(z.re);
        let (i, ty) = locate(z.im);
        let v = |i: usize, j: usize| self.values[i * n + j];
        let lo = v(i, j) * (1.0 - tx) + v(i, j + 1) * tx;
        let hi = v(i + 1, j) * (1.0 - tx) + v(i + 1, j + 1) * tx;
        (lo * (1.0 - ty) + hi * ty).max(GRID_FLOOR)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    Constant,
    /// `(1 − |z|²)^α`, `α > −1`.
    Standard { alpha: f64 },
    /// `|1 − z|^γ`, `γ > −2`.
    PowerOneMinusZ { gamma: f64 },
    Grid(GridSamples),
}

/// A positive weight `scale · kind(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub kind: WeightKind,
    pub scale: f64,
}

impl Weight {
    pub fn constant() -> Self {
        Weight {
            kind: WeightKind::Constant,
            scale: 1.0,
        }
    }

    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Domain {
                what: "standard weight exponent",
                value: alpha,
            });
        }
        Ok(Weight {
            kind: WeightKind::Standard { alpha },
            scale: 1.0,
        })
    }

    pub fn power_one_minus_z(gamma: f64) -> Result<Self> {
        if !(gamma > -2.0) || !gamma.is_finite() {
            return Err(Error::Domain {
                what: "power_one_minus_z exponent",
                value: gamma,
            });
        }
        Ok(Weight {
            kind: WeightKind::PowerOneMinusZ { gamma },
            scale: 1.0,
        })
    }

    pub fn grid(samples: GridSamples) -> Self {
        Weight {
            kind: WeightKind::Grid(samples),
            scale: 1.0,
        }
    }

    /// `c · u`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain {
                what: "weight scale",
                value: c,
            });
        }
        Ok(Weight {
            kind: self.kind.clone(),
            scale: self.scale * c,
        })
    }

    #[inline]
    pub fn evaluate(&self, z: Complex) -> f64 {
        let v = match &self.kind {
            WeightKind::Constant => 1.0,
            WeightKind::Standard { alpha } => fmath::powf((1.0 - z.norm_sqr()).max(0.0), *alpha),
            WeightKind::PowerOneMinusZ { gamma } => fmath::powf((Complex::new(1.0, 0.0) - z).norm(), *gamma),
            WeightKind::Grid(g) => g.interpolate(z),
        };
        self.scale * v
    }

    pub fn at(&self, z: DiscPoint) -> f64 {
        self.evaluate(z.to_complex())
    }

    /// Exponent `e` with `u ≍ (1 − |z|²)^e` along the whole circle.
    pub fn boundary_exponent(&self) -> f64 {
        match self.kind {
            WeightKind::Standard { alpha } => alpha,
            _ => 0.0,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.kind, WeightKind::Constant | WeightKind::Standard { .. })
    }

    /// True when `u` is a polynomial in `|z|²` times `(1 − |z|²)^e`, so the
    /// Jacobi disc rules integrate it exactly against polynomials.
    pub fn is_jacobi_exact(&self) -> bool {
        self.is_radial()
    }
}

/// Starting resolution for region masses and averages.
pub const REGION_RESOLUTION: usize = 16;

fn touches_circle(region: &Region) -> bool {
    match region {
        Region::FullDisc { r_max } => *r_max >= 1.0,
        Region::CarlesonSet { .. } => true,
        _ => false,
    }
}

/// `u(E) = ∫_E u dA`.
pub fn mass(u: &Weight, region: Region) -> Result<f64> {
    let e = if touches_circle(&region) { u.boundary_exponent() } else { 0.0 };
    let q = accepted_rule(region, REGION_RESOLUTION, e)?;
    q.integrate_real(|z| u.evaluate(z))
}

/// `u(Δ(z, r))`.
pub fn disk_mass(u: &Weight, z: DiscPoint, r: f64) -> Result<f64> {
    mass(u, Region::PseudoDisk { center: z, radius: r })
}

/// Euclidean area of a region.
pub fn region_area(region: &Region) -> Result<f64> {
    Ok(match *region {
        Region::FullDisc { r_max } => fmath::PI * r_max * r_max,
        Region::EuclideanDisk { radius, .. } => fmath::PI * radius * radius,
        Region::PseudoDisk { center, radius } => pseudo_disk(center, radius)?.area(),
        Region::CarlesonSet { anchor } => CarlesonSet::new(anchor).area(),
    })
}

/// Relative jump under resolution doubling read as non-integrability.
pub const DIVERGENCE_JUMP: f64 = 0.25;

/// `⟨u^e⟩_E`, or `+∞` when `u^e` is not integrable over `E`.
///
/// Integrability is decided exactly where the singular behaviour is known
/// (boundary exponent `≤ −1`, or `|1 − z|^{γe}` with `γe ≤ −2` at a region
/// touching `z = 1`); otherwise a jump above 25% under resolution doubling is
/// read as divergence.
pub fn power_average(u: &Weight, e: f64, region: Region) -> Result<f64> {
    let boundary = touches_circle(&region);
    let be = if boundary { u.boundary_exponent() * e } else { 0.0 };
    if be <= -1.0 {
        return Ok(f64::INFINITY);
    }
    if let WeightKind::PowerOneMinusZ { gamma } = u.kind {
        if gamma * e <= -2.0 && boundary && closure_touches_one(&region) {
            return Ok(f64::INFINITY);
        }
    }
    let area = region_area(&region)?;
    let f = |z: Complex| fmath::powf(u.evaluate(z), e);
    let coarse = accepted_rule(region, REGION_RESOLUTION, be)?.integrate_real(f)?;
    let fine = accepted_rule(region, 2 * REGION_RESOLUTION, be)?.integrate_real(f)?;
    if fmath::abs(fine - coarse) > DIVERGENCE_JUMP * fmath::abs(fine) {
        return Ok(f64::INFINITY);
    }
    Ok(fine / area)
}

fn closure_touches_one(region: &Region) -> bool {
    match region {
        Region::FullDisc { .. } => true,
        Region::CarlesonSet { anchor } => match CarlesonSet::new(*anchor).boundary_circle() {
            None => true,
            Some(c) => (Complex::new(1.0, 0.0) - c.center).norm() <= c.radius * (1.0 + 1e-12),
        },
        _ => false,
    }
}

/// `⟨u⟩_E · ⟨u^{−1/(p−1)}⟩_E^{p−1}` (the `p′/p` power is `1/(p − 1)`).
pub fn joint_average(u: &Weight, p: f64, region: Region) -> Result<f64> {
    let mean = power_average(u, 1.0, region)?;
    let dual = power_average(u, -1.0 / (p - 1.0), region)?;
    if dual.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(mean * fmath::powf(dual, p - 1.0))
}

/// Estimated weight constant with its per-anchor values and boundary trend.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WeightConstantReport {
    pub p: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::report::extended_float"))]
    pub value: f64,
    pub per_anchor: Vec<PointValue>,
    pub trend: Vec<RingValue>,
    pub verdict: Verdict,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain {
            what: "weight constant exponent p",
            value: p,
        });
    }
    Ok(())
}

fn constant_report(
    p: f64,
    anchors: &[DiscPoint],
    ladder: &BoundaryLadder,
    local: impl Fn(DiscPoint) -> Result<f64>,
) -> Result<WeightConstantReport> {
    let mut per_anchor = Vec::with_capacity(anchors.len() + ladder.n_rings() * ladder.samples_per_ring);
    for &a in anchors {
        per_anchor.push(PointValue::new(a, local(a)?));
    }
    let ladder_points = ladder.points();
    let mut ladder_values = Vec::with_capacity(ladder_points.len());
    for &a in &ladder_points {
        let v = local(a)?;
        ladder_values.push(v);
        per_anchor.push(PointValue::new(a, v));
    }
    let trend: Vec<RingValue> = ladder
        .ring_maxima(&ladder_values)
        .into_iter()
        .map(|(radius, value)| RingValue { radius, value })
        .collect();
    let verdict = classify_ring_trend(&trend);
    Ok(WeightConstantReport {
        p,
        value: max_value(per_anchor.iter().map(|a| a.value)),
        per_anchor,
        trend,
        verdict,
    })
}

/// `[u]_{B_p}` estimated as the max over `anchors` and the ladder samples of
/// the joint averages over Carleson sets `S(a)`.
pub fn bekolle_constant(
    u: &Weight,
    p: f64,
    anchors: &[DiscPoint],
    ladder: &BoundaryLadder,
) -> Result<WeightConstantReport> {
    check_p(p)?;
    constant_report(p, anchors, ladder, |a| joint_average(u, p, Region::CarlesonSet { anchor: a }))
}

/// `[u]_{C_p}` at radius `r`: joint averages over `Δ(z, r)`.
pub fn cp_constant(
    u: &Weight,
    p: f64,
    r: f64,
    centers: &[DiscPoint],
    ladder: &BoundaryLadder,
) -> Result<WeightConstantReport> {
    check_p(p)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "pseudohyperbolic radius",
            value: r,
        });
    }
    constant_report(p, centers, ladder, |z| {
        joint_average(u, p, Region::PseudoDisk { center: z, radius: r })
    })
}

/// Range of `u(Δ(z, r)) / u(Δ(w, r))` over the given pairs.
pub fn comparable_mass_band(u: &Weight, r: f64, pairs: &[(DiscPoint, DiscPoint)]) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &(z, w) in pairs {
        let ratio = disk_mass(u, z, r)? / disk_mass(u, w, r)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Range of `u(Δ(a, r)) / u(S(a))` over anchors with `Δ(a, r) ⊂ S(a)`.
pub fn disk_to_carleson_band(u: &Weight, r: f64, anchors: &[DiscPoint]) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &a in anchors {
        let set = CarlesonSet::new(a);
        let d = pseudo_disk(a, r)?;
        let inside = match set.boundary_circle() {
            None => true,
            Some(c) => (d.euclid_center.to_complex() - c.center).norm() + d.euclid_radius <= c.radius,
        };
        if !inside {
            continue;
        }
        let ratio = disk_mass(u, a, r)? / mass(u, Region::CarlesonSet { anchor: a })?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}
