//! Positive finite measures on the disc.

use alloc::vec::Vec;

use crate::fmath;
use crate::geometry::{carleson_contains, pseudo_distance, CarlesonSet, DiscPoint};
use crate::quadrature::{accepted_rule, full_disc, DiscQuadrature, Region};
use crate::space::KernelModel;
use crate::weights::{self, GridSamples, Weight, REGION_RESOLUTION};
use crate::{Complex, Error, Result};

/// A point mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub at: DiscPoint,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureKind {
    Atomic(Vec<Atom>),
    /// `u dA`.
    WeightedArea(Weight),
    /// `(1 − |z|²)^t dA`.
    PowerDensity { t: f64 },
    /// `g dA` with `g` bilinear on a grid.
    DensityGrid(GridSamples),
}

/// `scale · kind`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscMeasure {
    pub kind: MeasureKind,
    pub scale: f64,
}

/// Radial resolution of the default full-disc rule for densities.
pub const DENSITY_RESOLUTION: usize = 64;

impl DiscMeasure {
    pub fn atomic(atoms: Vec<(DiscPoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain {
                what: "atom count",
                value: 0.0,
            });
        }
        let mut out = Vec::with_capacity(atoms.len());
        for (at, mass) in atoms {
            if !(mass > 0.0) || !mass.is_finite() {
                return Err(Error::Domain {
                    what: "atom mass",
                    value: mass,
                });
            }
            DiscPoint::new(at.re, at.im)?;
            out.push(Atom { at, mass });
        }
        Ok(DiscMeasure {
            kind: MeasureKind::Atomic(out),
            scale: 1.0,
        })
    }

    pub fn weighted_area(u: Weight) -> Self {
        DiscMeasure {
            kind: MeasureKind::WeightedArea(u),
            scale: 1.0,
        }
    }

    pub fn power_density(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "power density exponent",
                value: t,
            });
        }
        Ok(DiscMeasure {
            kind: MeasureKind::PowerDensity { t },
            scale: 1.0,
        })
    }

    pub fn density_grid(samples: GridSamples) -> Self {
        DiscMeasure {
            kind: MeasureKind::DensityGrid(samples),
            scale: 1.0,
        }
    }

    /// `c · μ`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain {
                what: "measure scale",
                value: c,
            });
        }
        Ok(DiscMeasure {
            kind: self.kind.clone(),
            scale: self.scale * c,
        })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.kind, MeasureKind::Atomic(_))
    }

    /// Atoms with the scale applied; empty for densities.
    pub fn atoms(&self) -> Vec<Atom> {
        match &self.kind {
            MeasureKind::Atomic(a) => a
                .iter()
                .map(|x| Atom {
                    at: x.at,
                    mass: x.mass * self.scale,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Density against `dA`, `None` for atomic measures.
    #[inline]
    pub fn density(&self, z: Complex) -> Option<f64> {
        let g = match &self.kind {
            MeasureKind::Atomic(_) => return None,
            MeasureKind::WeightedArea(u) => u.evaluate(z),
            MeasureKind::PowerDensity { t } => fmath::powf((1.0 - z.norm_sqr()).max(0.0), *t),
            MeasureKind::DensityGrid(g) => g.interpolate(z),
        };
        Some(self.scale * g)
    }

    /// Exponent `e` with density `≍ (1 − |z|²)^e` at the circle.
    pub fn boundary_exponent(&self) -> f64 {
        match &self.kind {
            MeasureKind::WeightedArea(u) => u.boundary_exponent(),
            MeasureKind::PowerDensity { t } => *t,
            _ => 0.0,
        }
    }

    /// Rotation invariant.
    pub fn is_radial(&self) -> bool {
        match &self.kind {
            MeasureKind::Atomic(a) => a.iter().all(|x| x.at.norm_sqr() == 0.0),
            MeasureKind::WeightedArea(u) => u.is_radial(),
            MeasureKind::PowerDensity { .. } => true,
            MeasureKind::DensityGrid(_) => false,
        }
    }

    /// Density is a polynomial in `|z|²` times `(1 − |z|²)^e`.
    pub fn is_jacobi_exact(&self) -> bool {
        match &self.kind {
            MeasureKind::WeightedArea(u) => u.is_jacobi_exact(),
            MeasureKind::PowerDensity { .. } => true,
            _ => false,
        }
    }

    /// Largest `|a|` over atoms, or 1 for densities.
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            MeasureKind::Atomic(a) => a.iter().fold(0.0f64, |m, x| m.max(x.at.abs())),
            _ => 1.0,
        }
    }

    /// Full-disc rule matched to the density's boundary behaviour.
    pub fn density_rule(&self, n_radial: usize, n_angular: usize) -> Result<DiscQuadrature> {
        full_disc(1.0, n_radial, n_angular, self.boundary_exponent())
    }

    /// `∫ f dμ` with densities integrated by `rule`.
    pub fn integrate_with(&self, rule: &DiscQuadrature, f: impl Fn(Complex) -> f64) -> Result<f64> {
        match &self.kind {
            MeasureKind::Atomic(_) => sum_atoms(&self.atoms(), f),
            _ => rule.integrate_real(|z| f(z) * self.density(z).unwrap_or(0.0)),
        }
    }

    /// Total mass.
    pub fn total_mass(&self) -> Result<f64> {
        integrate_measure(self, |_| 1.0)
    }
}

fn sum_atoms(atoms: &[Atom], f: impl Fn(Complex) -> f64) -> Result<f64> {
    let mut s = 0.0;
    for a in atoms {
        let v = f(a.at.to_complex());
        if !v.is_finite() {
            return Err(Error::Evaluation { re: a.at.re, im: a.at.im });
        }
        s += a.mass * v;
    }
    Ok(s)
}

/// `∫ f dμ`: exact for atoms, the default density rule otherwise.
pub fn integrate_measure(mu: &DiscMeasure, f: impl Fn(Complex) -> f64) -> Result<f64> {
    if mu.is_atomic() {
        return sum_atoms(&mu.atoms(), f);
    }
    let rule = mu.density_rule(DENSITY_RESOLUTION, 2 * DENSITY_RESOLUTION)?;
    mu.integrate_with(&rule, f)
}

/// `μ(Δ(z, r))`; atoms count when `d(z, a) < r`.
pub fn disk_mass(mu: &DiscMeasure, z: DiscPoint, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            what: "pseudohyperbolic radius",
            value: r,
        });
    }
    match &mu.kind {
        MeasureKind::Atomic(_) => Ok(mu
            .atoms()
            .iter()
            .filter(|a| pseudo_distance(z, a.at) < r)
            .map(|a| a.mass)
            .sum()),
        MeasureKind::WeightedArea(u) => Ok(mu.scale * weights::disk_mass(u, z, r)?),
        _ => {
            let q = accepted_rule(Region::PseudoDisk { center: z, radius: r }, REGION_RESOLUTION, 0.0)?;
            q.integrate_real(|w| mu.density(w).unwrap_or(0.0))
        }
    }
}

/// `μ(S(a))`.
pub fn carleson_mass(mu: &DiscMeasure, a: DiscPoint) -> Result<f64> {
    match &mu.kind {
        MeasureKind::Atomic(_) => {
            let set = CarlesonSet::new(a);
            Ok(mu
                .atoms()
                .iter()
                .filter(|x| carleson_contains(&set, x.at))
                .map(|x| x.mass)
                .sum())
        }
        MeasureKind::WeightedArea(u) => Ok(mu.scale * weights::mass(u, Region::CarlesonSet { anchor: a })?),
        _ => {
            let q = accepted_rule(Region::CarlesonSet { anchor: a }, REGION_RESOLUTION, mu.boundary_exponent())?;
            q.integrate_real(|w| mu.density(w).unwrap_or(0.0))
        }
    }
}

/// Values of `∫ |K(ξ, z)|² dμ(ξ)` at probe points and their growth when the
/// model degree is halved.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSquareReport {
    pub values: Vec<f64>,
    /// Same integrals for the model truncated at half the degree.
    pub half_degree_values: Vec<f64>,
    pub finite: bool,
}

impl KernelSquareReport {
    /// Largest relative change between the half-degree and full-degree values.
    pub fn growth(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.half_degree_values)
            .map(|(v, h)| fmath::abs(v - h) / v.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// `∫|K(ξ, z)|² dμ(ξ)` at each probe. Truncated kernels make every value
/// finite, so the N-halving growth is reported as the proxy for `∫ < ∞`.
pub fn kernel_square_integrability_check(
    mu: &DiscMeasure,
    m: &KernelModel,
    probes: &[DiscPoint],
) -> Result<KernelSquareReport> {
    let half = m.degree() / 2;
    let value_at = |z: DiscPoint, degree: usize| -> Result<f64> {
        let section = m.kernel_section_truncated(z.to_complex(), degree);
        let rule_size = m.degree() / 2 + 16 + if mu.is_jacobi_exact() { 0 } else { m.degree() / 2 + 16 };
        let angular = 2 * m.degree() + 8 + if mu.is_radial() { 0 } else { 2 * m.degree() + 56 };
        let rule = mu.density_rule(rule_size, angular)?;
        mu.integrate_with(&rule, |xi| crate::space::horner(&section, xi).norm_sqr())
    };
    let mut values = Vec::with_capacity(probes.len());
    let mut half_values = Vec::with_capacity(probes.len());
    for &z in probes {
        values.push(value_at(z, m.degree())?);
        half_values.push(value_at(z, half)?);
    }
    let finite = values.iter().all(|v| v.is_finite());
    Ok(KernelSquareReport {
        values,
        half_degree_values: half_values,
        finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_lattice;
    use crate::space::build_kernel_model;
    use alloc::vec;
    use core::f64::consts::PI;

    fn pt(x: f64, y: f64) -> DiscPoint {
        DiscPoint::new(x, y).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let mu = DiscMeasure::atomic(vec![(DiscPoint::ORIGIN, 2.0)]).unwrap();
        assert_eq!(integrate_measure(&mu, |z| z.norm_sqr() + 1.0).unwrap(), 2.0);
        let mu = DiscMeasure::weighted_area(Weight::constant());
        assert!((integrate_measure(&mu, |_| 1.0).unwrap() - PI).abs() < 1e-12);
        let mu = DiscMeasure::power_density(1.0).unwrap();
        assert!((integrate_measure(&mu, |_| 1.0).unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn disk_mass_examples() {
        let mu = DiscMeasure::atomic(vec![(DiscPoint::ORIGIN, 2.0)]).unwrap();
        assert_eq!(disk_mass(&mu, DiscPoint::ORIGIN, 0.5).unwrap(), 2.0);
        let mu = DiscMeasure::atomic(vec![(pt(0.6, 0.0), 1.0)]).unwrap();
        assert_eq!(disk_mass(&mu, DiscPoint::ORIGIN, 0.5).unwrap(), 0.0);
        let mu = DiscMeasure::power_density(1.0).unwrap();
        let m = disk_mass(&mu, DiscPoint::ORIGIN, 0.5).unwrap();
        assert!((m - 0.21875 * PI).abs() < 1e-10, "{m}");
    }

    #[test]
    fn atoms_on_disk_boundary_are_excluded() {
        // d(0, 0.5) = 0.5 exactly: open disks leave it out.
        let mu = DiscMeasure::atomic(vec![(pt(0.5, 0.0), 1.0)]).unwrap();
        assert_eq!(disk_mass(&mu, DiscPoint::ORIGIN, 0.5).unwrap(), 0.0);
        assert_eq!(disk_mass(&mu, DiscPoint::ORIGIN, 0.500_001).unwrap(), 1.0);
    }

    #[test]
    fn disk_mass_monotone_in_radius() {
        for mu in [
            DiscMeasure::power_density(0.4).unwrap(),
            DiscMeasure::atomic(vec![(pt(0.3, 0.1), 1.0), (pt(-0.5, 0.5), 0.5)]).unwrap(),
        ] {
            let z = pt(0.2, 0.3);
            let ms: Vec<f64> = [0.1, 0.2, 0.4, 0.6, 0.9].iter().map(|&r| disk_mass(&mu, z, r).unwrap()).collect();
            assert!(ms.windows(2).all(|w| w[0] <= w[1]), "{ms:?}");
        }
    }

    #[test]
    fn disjoint_lattice_disks_do_not_exceed_total_mass() {
        let lat = build_lattice(0.4, 0.95).unwrap();
        for mu in [DiscMeasure::power_density(0.5).unwrap(), DiscMeasure::weighted_area(Weight::constant())] {
            let total = mu.total_mass().unwrap();
            let sum: f64 = lat.points.iter().map(|&a| disk_mass(&mu, a, 0.1).unwrap()).sum();
            assert!(sum <= total, "{sum} > {total}");
        }
    }

    #[test]
    fn weighted_area_disk_mass_is_weight_mass() {
        let u = Weight::standard(1.5).unwrap();
        let mu = DiscMeasure::weighted_area(u.clone());
        let z = pt(-0.6, 0.7);
        assert_eq!(disk_mass(&mu, z, 0.3).unwrap(), weights::disk_mass(&u, z, 0.3).unwrap());
    }

    #[test]
    fn carleson_mass_of_origin_is_total() {
        let mu = DiscMeasure::power_density(2.0).unwrap();
        assert!((carleson_mass(&mu, DiscPoint::ORIGIN).unwrap() - PI / 3.0).abs() < 1e-10);
        let mu = DiscMeasure::atomic(vec![(pt(0.5, 0.0), 1.0), (pt(-0.5, 0.0), 2.0)]).unwrap();
        assert_eq!(carleson_mass(&mu, pt(0.5, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn kernel_square_examples() {
        let m = build_kernel_model(&Weight::constant(), 40).unwrap();
        let probes = [DiscPoint::ORIGIN, pt(0.3, 0.4)];
        let atoms = DiscMeasure::atomic(vec![(pt(0.1, 0.0), 1.5)]).unwrap();
        let r = kernel_square_integrability_check(&atoms, &m, &probes).unwrap();
        assert!(r.finite);
        for (v, z) in r.values.iter().zip(&probes) {
            let k = m.kernel_eval(pt(0.1, 0.0), *z);
            assert!((v - 1.5 * k.norm_sqr()).abs() < 1e-12 * v);
        }
        let area = DiscMeasure::weighted_area(Weight::constant());
        let r = kernel_square_integrability_check(&area, &m, &probes).unwrap();
        for (v, z) in r.values.iter().zip(&probes) {
            let k = m.kernel_diag(*z);
            assert!((v - k).abs() < 1e-10 * k);
        }
        let pd = DiscMeasure::power_density(1.0).unwrap();
        let r = kernel_square_integrability_check(&pd, &m, &probes).unwrap();
        assert!(r.finite && r.growth() < 1e-6, "{}", r.growth());
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(DiscMeasure::atomic(vec![]).is_err());
        assert!(DiscMeasure::atomic(vec![(DiscPoint::ORIGIN, 0.0)]).is_err());
        assert!(DiscMeasure::power_density(0.0).is_err());
        assert!(disk_mass(&DiscMeasure::power_density(1.0).unwrap(), DiscPoint::ORIGIN, 1.0).is_err());
    }
}
