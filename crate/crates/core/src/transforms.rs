//! Berezin transforms and the weighted average function.

use alloc::vec::Vec;

use crate::fmath;
use crate::geometry::DiscPoint;
use crate::measures::{self, Atom, DiscMeasure};
use crate::report::{max_value, Band, CriterionReport, PointValue, Verdict};
use crate::space::{horner, KernelModel};
use crate::toeplitz::{assemble, ToeplitzMatrix};
use crate::weights::{self, Weight};
use crate::{Complex, Error, Result};

/// Which transform a profile holds.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TransformKind {
    Berezin,
    TBerezin { t: f64 },
    Average { r: f64 },
}

/// Values of one transform over a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformProfile {
    pub kind: TransformKind,
    pub grid: Vec<DiscPoint>,
    pub values: Vec<f64>,
}

enum Source {
    Atoms(Vec<Atom>),
    Matrix(ToeplitzMatrix),
}

/// `μ̃(z) = ⟨T_μ k_z, k_z⟩`.
///
/// Atomic measures use `Σ m_j |K(a_j, z)|² / K(z, z)` directly. Other measures
/// assemble the Toeplitz matrix once; then `μ̃(z) = v*Mv / K(z, z)` with
/// `v_n = conj(e_n(z))`.
pub struct BerezinEvaluator<'a> {
    model: &'a KernelModel,
    source: Source,
}

impl<'a> BerezinEvaluator<'a> {
    pub fn new(mu: &DiscMeasure, m: &'a KernelModel) -> Result<Self> {
        let source = if mu.is_atomic() {
            Source::Atoms(mu.atoms())
        } else {
            Source::Matrix(assemble(mu, m)?)
        };
        Ok(BerezinEvaluator { model: m, source })
    }

    pub fn from_matrix(t: ToeplitzMatrix, m: &'a KernelModel) -> Self {
        BerezinEvaluator {
            model: m,
            source: Source::Matrix(t),
        }
    }

    pub fn eval_complex(&self, z: Complex) -> f64 {
        let m = self.model;
        match &self.source {
            Source::Atoms(atoms) => {
                let section = m.kernel_section(z);
                let s: f64 = atoms.iter().map(|a| a.mass * horner(&section, a.at.to_complex()).norm_sqr()).sum();
                s / m.kernel_diag_complex(z)
            }
            Source::Matrix(t) => {
                let v: Vec<Complex> = m.basis_values(z).iter().map(|e| e.conj()).collect();
                let k: f64 = v.iter().map(|e| e.norm_sqr()).sum();
                t.quadratic_form(&v) / k
            }
        }
    }

    pub fn eval(&self, z: DiscPoint) -> f64 {
        self.eval_complex(z.to_complex())
    }
}

/// `μ̃(z) = ∫ |k_z(w)|² dμ(w)`.
pub fn berezin(mu: &DiscMeasure, m: &KernelModel, z: DiscPoint) -> Result<f64> {
    Ok(BerezinEvaluator::new(mu, m)?.eval(z))
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "Berezin exponent t",
            value: t,
        });
    }
    Ok(())
}

/// `∫ |K(w, z)|^t dμ(w) / ‖K_z‖^t_{A^t_u}`, both by quadrature.
pub fn t_berezin(mu: &DiscMeasure, m: &KernelModel, t: f64, z: DiscPoint) -> Result<f64> {
    check_t(t)?;
    let section = m.kernel_section(z.to_complex());
    let numerator = if mu.is_atomic() {
        mu.atoms()
            .iter()
            .map(|a| a.mass * fmath::powf(horner(&section, a.at.to_complex()).norm_sqr(), 0.5 * t))
            .sum()
    } else {
        let rule = m.power_rule(z, t, mu.boundary_exponent(), mu.is_jacobi_exact(), mu.is_radial())?;
        mu.integrate_with(&rule, |w| fmath::powf(horner(&section, w).norm_sqr(), 0.5 * t))?
    };
    Ok(numerator / fmath::powf(m.kernel_norm_value(z, t)?, t))
}

/// `μ̂_r(z) = μ(Δ(z, r)) / u(Δ(z, r))`.
pub fn average_function(mu: &DiscMeasure, u: &Weight, r: f64, z: DiscPoint) -> Result<f64> {
    Ok(measures::disk_mass(mu, z, r)? / weights::disk_mass(u, z, r)?)
}

pub fn berezin_profile(mu: &DiscMeasure, m: &KernelModel, grid: &[DiscPoint]) -> Result<TransformProfile> {
    let b = BerezinEvaluator::new(mu, m)?;
    Ok(TransformProfile {
        kind: TransformKind::Berezin,
        grid: grid.to_vec(),
        values: grid.iter().map(|&z| b.eval(z)).collect(),
    })
}

pub fn t_berezin_profile(mu: &DiscMeasure, m: &KernelModel, t: f64, grid: &[DiscPoint]) -> Result<TransformProfile> {
    Ok(TransformProfile {
        kind: TransformKind::TBerezin { t },
        grid: grid.to_vec(),
        values: grid.iter().map(|&z| t_berezin(mu, m, t, z)).collect::<Result<_>>()?,
    })
}

pub fn average_profile(mu: &DiscMeasure, u: &Weight, r: f64, grid: &[DiscPoint]) -> Result<TransformProfile> {
    Ok(TransformProfile {
        kind: TransformKind::Average { r },
        grid: grid.to_vec(),
        values: grid.iter().map(|&z| average_function(mu, u, r, z)).collect::<Result<_>>()?,
    })
}

/// Exponents of the discrete `L^p` comparison of the two profiles.
pub const COMPARABILITY_EXPONENTS: [f64; 2] = [1.0, 2.0];

/// `μ̃_t` against `μ̂_r` over `grid`.
///
/// Sub-reports: `lower` is `min μ̃_t/μ̂_r` over points where `μ̂_r > 0`;
/// `upper` is `max μ̃_t / sup μ̂_r`; `lp` holds the lattice sums
/// `(Σ u(Δ(z_k, r)) v(z_k)^p)^{1/p}` of both profiles and their ratio.
pub fn comparability_report(mu: &DiscMeasure, m: &KernelModel, t: f64, r: f64, grid: &[DiscPoint]) -> Result<CriterionReport> {
    if grid.is_empty() {
        return Err(Error::Domain {
            what: "comparability grid size",
            value: 0.0,
        });
    }
    let u = m.weight();
    let tilde = if t == 2.0 {
        berezin_profile(mu, m, grid)?.values
    } else {
        t_berezin_profile(mu, m, t, grid)?.values
    };
    let mut hat = Vec::with_capacity(grid.len());
    let mut masses = Vec::with_capacity(grid.len());
    for &z in grid {
        let mass = weights::disk_mass(u, z, r)?;
        hat.push(measures::disk_mass(mu, z, r)? / mass);
        masses.push(mass);
    }
    let mut report = CriterionReport::new("berezin_average_comparability")
        .param("t", t)
        .param("r", r)
        .param("degree", m.degree() as f64);
    for (i, &z) in grid.iter().enumerate() {
        report.per_point.push(PointValue::new(z, tilde[i]));
    }

    let mut lower = CriterionReport::new("lower");
    let ratios: Vec<f64> = tilde
        .iter()
        .zip(&hat)
        .filter(|(_, &h)| h > 0.0)
        .map(|(&a, &h)| a / h)
        .collect();
    lower.index_value = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().copied().fold(f64::INFINITY, f64::min)
    };
    lower.bands.push(Band::of("tilde/hat", ratios));
    lower.verdict = if lower.index_value > 0.0 { Verdict::Finite } else { Verdict::Inconclusive };

    let mut upper = CriterionReport::new("upper");
    let sup_hat = max_value(hat.iter().copied());
    let max_tilde = max_value(tilde.iter().copied());
    upper.index_value = max_tilde / sup_hat;
    upper.bands.push(Band::of("max tilde", [max_tilde]));
    upper.bands.push(Band::of("sup hat", [sup_hat]));
    upper.verdict = if upper.index_value.is_finite() { Verdict::Finite } else { Verdict::Divergent };

    let mut lp = CriterionReport::new("lp");
    for &p in &COMPARABILITY_EXPONENTS {
        let norm = |v: &[f64]| {
            let s: f64 = v.iter().zip(&masses).map(|(x, w)| w * fmath::powf(*x, p)).sum();
            fmath::powf(s, 1.0 / p)
        };
        let (a, b) = (norm(&tilde), norm(&hat));
        lp.bands.push(Band {
            name: alloc::format!("p={p}"),
            lo: a,
            hi: b,
        });
        lp.sub_reports.push({
            let mut s = CriterionReport::new("lp_ratio").param("p", p);
            s.index_value = a / b;
            s.verdict = if s.index_value.is_finite() { Verdict::Finite } else { Verdict::Inconclusive };
            s
        });
    }
    lp.verdict = Verdict::Finite;

    report.index_value = lower.index_value;
    report.verdict = if lower.verdict == Verdict::Finite && upper.verdict == Verdict::Finite {
        Verdict::Finite
    } else {
        Verdict::Inconclusive
    };
    report.sub_reports.push(lower);
    report.sub_reports.push(upper);
    report.sub_reports.push(lp);
    Ok(report)
}
