//! The acceptance suite: one check per criterion, each with pinned
//! tolerances and a JSON record of what was measured.

use std::f64::consts::PI;

use bergman_core::criteria::{
    boundedness_index, compactness_index, consistency_label, ladder_degree, theorem_consistency_report,
    ConditionRow, ConsistencyOptions,
};
use bergman_core::geometry::{audit_grid, boundary_ladder, build_lattice, BoundaryLadder};
use bergman_core::space::{build_kernel_model, kernel_estimate_report, KernelModel, ReproducingProbe};
use bergman_core::toeplitz::{
    assemble, essential_norm_estimate, schatten_integral, schatten_membership_trend, trace_identity_check,
    SchattenFunction, SchattenOptions, MEMBERSHIP_DEGREES,
};
use bergman_core::transforms::{comparability_report, t_berezin, BerezinEvaluator};
use bergman_core::{CriterionReport, DiscMeasure, DiscPoint, Result, Verdict, Weight};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const CRITERIA: [&str; 15] = [
    "classical kernel",
    "standard-weight kernel",
    "reproducing property",
    "Berezin normalization",
    "Toeplitz identity",
    "rank-one spectra",
    "trace identity",
    "lattice certificates",
    "Berezin/average band",
    "diagonal estimate",
    "boundedness threshold",
    "compactness",
    "Schatten threshold",
    "theorem consistency matrix",
    "determinism",
];

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    /// Measured values against their tolerances, one line.
    pub summary: String,
    pub details: Value,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.summary
        )
    }
}

/// Inputs the suite takes from the run configuration; everything else is
/// pinned by the criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub degree: usize,
    pub lattice_r: f64,
    pub r_max: f64,
    pub ladder: BoundaryLadder,
    pub p0: f64,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn from_config(c: &RunConfig) -> Result<Self> {
        Ok(VerifyOptions {
            degree: c.degree,
            lattice_r: c.lattice_r,
            r_max: c.r_max,
            ladder: boundary_ladder(c.ladder.rings, c.ladder.samples_per_ring)?,
            p0: c.p0,
            seed: 0x5eed,
        })
    }

    fn consistency(&self) -> ConsistencyOptions {
        ConsistencyOptions {
            ladder: self.ladder.clone(),
            p0: self.p0,
            ..ConsistencyOptions::default()
        }
    }
}

fn finish(id: usize, passed: bool, summary: String, details: Value) -> Check {
    Check {
        id,
        title: CRITERIA[id - 1],
        passed,
        summary,
        details,
    }
}

fn test_weights() -> [(&'static str, Weight); 2] {
    [("constant", Weight::constant()), ("standard(1)", Weight::standard(1.0).expect("valid"))]
}

/// Cartesian `n × n` grid on `[−a, a]²` restricted to `|z| ≤ a`.
fn square_grid(n: usize, a: f64) -> Vec<DiscPoint> {
    let step = 2.0 * a / (n - 1) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (re, im) = (-a + step * j as f64, -a + step * i as f64);
            if re * re + im * im <= a * a {
                out.push(DiscPoint { re, im });
            }
        }
    }
    out
}

fn c1() -> Result<Check> {
    let m = build_kernel_model(&Weight::constant(), 200)?;
    let grid = square_grid(20, 0.7);
    let mut worst = 0.0f64;
    for &z in &grid {
        let section = m.kernel_section(z.to_complex());
        for &w in &grid {
            // K(w, z) = conj(K(z, w)); the section is K(·, z).
            let approx = bergman_core::space::horner(&section, w.to_complex());
            let d = Complex64::new(1.0, 0.0) - z.to_complex().conj() * w.to_complex();
            let exact = 1.0 / (PI * d * d);
            worst = worst.max((approx - exact).norm() / exact.norm());
        }
    }
    let tol = 1e-6;
    Ok(finish(
        1,
        worst < tol,
        format!("max rel error {worst:.3e} over {} pairs (< {tol:e})", grid.len() * grid.len()),
        json!({"degree": 200, "pairs": grid.len() * grid.len(), "max_relative_error": worst, "tolerance": tol}),
    ))
}

fn c2() -> Result<Check> {
    let m = build_kernel_model(&Weight::standard(1.0)?, 200)?;
    let origin = (m.kernel_diag(DiscPoint::ORIGIN) - 2.0 / PI).abs();
    let mut worst = 0.0f64;
    let grid = square_grid(20, 0.6);
    for &z in &grid {
        let exact = 2.0 / (PI * (1.0 - z.norm_sqr()).powi(3));
        worst = worst.max((m.kernel_diag(z) - exact).abs() / exact);
    }
    let passed = origin < 1e-6 && worst < 1e-5;
    Ok(finish(
        2,
        passed,
        format!("|K(0,0) - 2/pi| = {origin:.3e} (< 1e-6), diagonal rel error {worst:.3e} (< 1e-5)"),
        json!({"degree": 200, "origin_error": origin, "diagonal_max_relative_error": worst, "points": grid.len()}),
    ))
}

fn c3(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<Vec<Complex64>> = (0..50)
        .map(|_| {
            let deg = rng.gen_range(0..=50);
            (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let points: Vec<DiscPoint> = (0..20)
        .map(|_| {
            let r = 0.9 * rng.gen::<f64>().sqrt();
            DiscPoint::from_polar(r, rng.gen_range(0.0..2.0 * PI)).expect("inside the disc")
        })
        .collect();
    let mut per_weight = Vec::new();
    let mut worst = 0.0f64;
    for (name, u) in test_weights() {
        let m = build_kernel_model(&u, 60)?;
        let probe = ReproducingProbe::new(&m)?;
        let mut w_worst = 0.0f64;
        for f in &polys {
            for &w in &points {
                w_worst = w_worst.max(probe.check(f, w)?);
            }
        }
        worst = worst.max(w_worst);
        per_weight.push(json!({"weight": name, "max_error": w_worst}));
    }
    let tol = 1e-7;
    Ok(finish(
        3,
        worst < tol,
        format!("max |<f,K_w> - f(w)| = {worst:.3e} over 50 polynomials x 20 points x 2 weights (< {tol:e})"),
        json!({"degree": 60, "seed": seed, "weights": per_weight, "tolerance": tol}),
    ))
}

fn c4(o: &VerifyOptions) -> Result<Check> {
    let lattice = build_lattice(o.lattice_r, o.r_max)?;
    let mut rows = Vec::new();
    let (mut unit, mut coincide) = (0.0f64, 0.0f64);
    for (name, u) in test_weights() {
        let m = build_kernel_model(&u, o.degree)?;
        let mu = DiscMeasure::weighted_area(u);
        let b = BerezinEvaluator::new(&mu, &m)?;
        // Per-point quadratures dominate; the max is taken in lattice order.
        let pairs: Vec<(f64, f64)> = lattice
            .points
            .par_iter()
            .map(|&z| {
                let v = b.eval(z);
                Ok(((v - 1.0).abs(), (t_berezin(&mu, &m, 2.0, z)? - v).abs()))
            })
            .collect::<Result<_>>()?;
        let du = pairs.iter().fold(0.0f64, |a, p| a.max(p.0));
        let dc = pairs.iter().fold(0.0f64, |a, p| a.max(p.1));
        unit = unit.max(du);
        coincide = coincide.max(dc);
        rows.push(json!({"weight": name, "max_berezin_minus_one": du, "max_t2_difference": dc}));
    }
    Ok(finish(
        4,
        unit < 1e-6 && coincide < 1e-8,
        format!(
            "max |B - 1| = {unit:.3e} (< 1e-6), max |B_2 - B| = {coincide:.3e} (< 1e-8) on {} lattice points",
            lattice.len()
        ),
        json!({"degree": o.degree, "lattice_r": o.lattice_r, "r_max": o.r_max, "points": lattice.len(), "weights": rows}),
    ))
}

fn c5(o: &VerifyOptions) -> Result<Check> {
    let mut rows = Vec::new();
    let (mut dist, mut spec) = (0.0f64, 0.0f64);
    for (name, u) in test_weights() {
        let m = build_kernel_model(&u, o.degree)?;
        let t = assemble(&DiscMeasure::weighted_area(u), &m)?;
        let d = t.to_dense().distance_to_identity();
        let s = t.spectrum().eigenvalues.iter().fold(0.0f64, |a, l| a.max((l - 1.0).abs()));
        dist = dist.max(d);
        spec = spec.max(s);
        rows.push(json!({"weight": name, "distance_to_identity": d, "max_eigenvalue_minus_one": s}));
    }
    Ok(finish(
        5,
        dist < 1e-8 && spec < 1e-8,
        format!("max |M - I| = {dist:.3e}, max |lambda - 1| = {spec:.3e} (< 1e-8)"),
        json!({"degree": o.degree, "weights": rows}),
    ))
}

fn c6(o: &VerifyOptions) -> Result<Check> {
    let m = build_kernel_model(&Weight::constant(), o.degree)?;
    let mu = DiscMeasure::atomic(vec![(DiscPoint::ORIGIN, 2.0)])?;
    let t = assemble(&mu, &m)?;
    let s = t.spectrum().eigenvalues;
    let top = (s[0] - 2.0 / PI).abs();
    let rest = s[1..].iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let trace = trace_identity_check(&t, &mu, &m)?;
    Ok(finish(
        6,
        top < 1e-8 && rest < 1e-8 && trace < 1e-10,
        format!("|lambda_1 - 2/pi| = {top:.3e}, max other |lambda| = {rest:.3e} (< 1e-8), trace residual {trace:.3e} (< 1e-10)"),
        json!({"degree": o.degree, "lambda_1": s[0], "max_other": rest, "trace_residual": trace}),
    ))
}

fn c7() -> Result<Check> {
    let m = build_kernel_model(&Weight::constant(), 120)?;
    let mu = DiscMeasure::power_density(1.0)?;
    let t = assemble(&mu, &m)?;
    let sum: f64 = t.spectrum().eigenvalues.iter().sum();
    let rel = trace_identity_check(&t, &mu, &m)? / sum;
    Ok(finish(
        7,
        rel < 1e-6,
        format!("relative trace residual {rel:.3e} (< 1e-6)"),
        json!({"degree": 120, "eigenvalue_sum": sum, "relative_residual": rel}),
    ))
}

fn c8() -> Result<Check> {
    let audit = audit_grid(0.99, 100, 100);
    let mut rows = Vec::new();
    let mut passed = true;
    let mut parts = Vec::new();
    for r in [0.2, 0.5] {
        let lattice = build_lattice(r, 0.99)?;
        let cert = lattice.certify(&audit);
        passed &= cert.holds();
        parts.push(format!(
            "r={r}: {} pts, disjoint {}, covered {}/{}, multiplicity {} <= {}",
            lattice.len(),
            cert.disjoint,
            cert.covered,
            cert.audited,
            cert.max_multiplicity,
            cert.multiplicity_bound
        ));
        rows.push(json!({"r": r, "points": lattice.len(), "certificate": cert}));
    }
    Ok(finish(8, passed, parts.join("; "), json!({"r_max": 0.99, "audit_points": audit.len(), "lattices": rows})))
}

/// Lower and upper comparability bands over a lattice.
fn band_pair(mu: &DiscMeasure, m: &KernelModel, lattice_r: f64, radius: f64) -> Result<(f64, f64, usize)> {
    let grid = build_lattice(lattice_r, radius)?.points;
    let rep = comparability_report(mu, m, 2.0, 0.3, &grid)?;
    let lower = rep.sub("lower").map(|s| s.index_value).unwrap_or(f64::NAN);
    let upper = rep.sub("upper").map(|s| s.index_value).unwrap_or(f64::NAN);
    Ok((lower, upper, grid.len()))
}

fn rel_change(a: f64, b: f64) -> f64 {
    (b - a).abs() / a.abs()
}

fn c9(o: &VerifyOptions) -> Result<Check> {
    let u = Weight::constant();
    let mu = DiscMeasure::power_density(1.0)?;
    let coarse = build_kernel_model(&u, o.degree)?;
    let fine = build_kernel_model(&u, 2 * o.degree)?;
    // Both lattices stop where the coarse model resolves the kernel.
    let radius = coarse.resolved_radius(1e-3).min(o.r_max);
    let (lo1, hi1, n1) = band_pair(&mu, &coarse, o.lattice_r, radius)?;
    let (lo2, hi2, n2) = band_pair(&mu, &fine, o.lattice_r / 2.0, radius)?;
    let (dlo, dhi) = (rel_change(lo1, lo2), rel_change(hi1, hi2));
    let passed = lo1 > 0.1 && hi1 <= 10.0 && lo2 > 0.1 && hi2 <= 10.0 && dlo < 0.2 && dhi < 0.2;
    Ok(finish(
        9,
        passed,
        format!(
            "min B/avg = {lo1:.4} -> {lo2:.4} (> 0.1), max B / sup avg = {hi1:.4} -> {hi2:.4} (<= 10), changes {:.1}% / {:.1}% (< 20%)",
            100.0 * dlo,
            100.0 * dhi
        ),
        json!({
            "radius": radius,
            "coarse": {"degree": o.degree, "lattice_r": o.lattice_r, "points": n1, "lower": lo1, "upper": hi1},
            "fine": {"degree": 2 * o.degree, "lattice_r": o.lattice_r / 2.0, "points": n2, "lower": lo2, "upper": hi2},
            "lower_change": dlo, "upper_change": dhi,
        }),
    ))
}

fn diagonal_band(u: &Weight, degree: usize, lattice_r: f64, r_max: f64) -> Result<(f64, f64, usize, f64)> {
    let m = build_kernel_model(u, degree)?;
    let radius = m.resolved_radius(1e-6).min(r_max);
    let points = build_lattice(lattice_r, radius)?.points;
    let rep = kernel_estimate_report(&m, 0.5, &points, &[])?;
    let band = rep.sub("diagonal").and_then(|d| d.band("K(z,z)u(D(z,r))")).cloned();
    let band = band.expect("diagonal band present");
    Ok((band.lo, band.hi, points.len(), radius))
}

fn c10(o: &VerifyOptions) -> Result<Check> {
    let r = 0.5f64;
    let (lo, hi, n, radius) = diagonal_band(&Weight::constant(), o.degree, o.lattice_r, o.r_max)?;
    let (a, b) = (r * r, r * r / (1.0 - r * r).powi(2));
    let in_band = lo >= a * (1.0 - 1e-3) && hi <= b * (1.0 + 1e-3);
    let in_printed = lo >= PI * a * (1.0 - 1e-3) && hi <= PI * b * (1.0 + 1e-3);
    let std = Weight::standard(1.0)?;
    let (slo1, shi1, _, std_radius) = diagonal_band(&std, o.degree, o.lattice_r, o.r_max)?;
    // The refined run covers the same region.
    let (slo2, shi2, _, _) = diagonal_band(&std, 2 * o.degree, o.lattice_r / 2.0, std_radius)?;
    let spread_change = rel_change(shi1 / slo1, shi2 / slo2);
    let stable = shi1.is_finite() && shi2.is_finite() && spread_change < 0.05;
    Ok(finish(
        10,
        in_band && stable,
        format!(
            "u=1: [{lo:.6}, {hi:.6}] within [r^2, r^2/(1-r^2)^2] = [{a:.6}, {b:.6}] (+-1e-3): {in_band}; \
             printed [pi r^2, pi r^2/(1-r^2)^2] = [{:.6}, {:.6}]: {in_printed}; \
             standard(1): [{slo1:.4}, {shi1:.4}] -> [{slo2:.4}, {shi2:.4}], spread change {:.2}% (< 5%)",
            PI * a,
            PI * b,
            100.0 * spread_change
        ),
        json!({
            "r": r, "points": n, "radius": radius,
            "constant": {"lo": lo, "hi": hi, "band": [a, b], "printed_band": [PI * a, PI * b], "in_band": in_band, "in_printed_band": in_printed},
            "standard_1": {"coarse": [slo1, shi1], "fine": [slo2, shi2], "spread_change": spread_change},
        }),
    ))
}

fn trend_values(rep: &CriterionReport) -> Vec<f64> {
    rep.ring_trend.iter().map(|r| r.value).collect()
}

fn c11(o: &VerifyOptions) -> Result<Check> {
    let u = Weight::constant();
    let options = o.consistency();
    let m = build_kernel_model(&u, ladder_degree(&o.ladder, &u, &options))?;
    let index = |t: f64| -> Result<CriterionReport> {
        boundedness_index(&DiscMeasure::power_density(t)?, &m, 2.0, 4.0, 2.0, 0.3, &[DiscPoint::ORIGIN], Some(&o.ladder))
    };
    let bounded = trend_values(&index(0.6)?);
    let last3 = &bounded[bounded.len() - 3..];
    let order = (last3.iter().cloned().fold(f64::MIN, f64::max) / last3.iter().cloned().fold(f64::MAX, f64::min)).log10();
    let growing = trend_values(&index(0.4)?);
    let min_growth = growing.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    let passed = order <= 0.1 && min_growth >= 2.0;
    Ok(finish(
        11,
        passed,
        format!("t=0.6: last three rings span {order:.4} decades (<= 0.1); t=0.4: min growth per ring {min_growth:.4}x (>= 2x)"),
        json!({"degree": m.degree(), "t_0_6": bounded, "t_0_4": growing, "order_span": order, "min_growth": min_growth}),
    ))
}

fn c12(o: &VerifyOptions) -> Result<Check> {
    let u = Weight::constant();
    let options = o.consistency();
    let m = build_kernel_model(&u, ladder_degree(&o.ladder, &u, &options))?;
    let rep = compactness_index(&DiscMeasure::power_density(0.6)?, &m, 2.0, 4.0, 2.0, 0.3, &o.ladder)?;
    let trend = trend_values(&rep);
    let decreasing = trend.windows(2).all(|w| w[1] < w[0]);
    let max = trend.iter().cloned().fold(f64::MIN, f64::max);
    let last_ratio = trend[trend.len() - 1] / max;
    let area = DiscMeasure::weighted_area(u.clone());
    let id = trend_values(&compactness_index(&area, &m, 2.0, 2.0, 2.0, 0.3, &o.ladder)?);
    let id_dev = id.iter().fold(0.0f64, |a, v| a.max((v - 1.0).abs()));
    let ess = essential_norm_estimate(&area, &m, 2.0, 2.0, 2.0, 0.3, &o.ladder)?.index_value;
    let passed = decreasing && last_ratio < 1e-2 && id_dev < 1e-6 && (ess - 1.0).abs() < 1e-6;
    Ok(finish(
        12,
        passed,
        format!(
            "t=0.6: decreasing {decreasing}, last/max = {last_ratio:.4} (< 1e-2); identity trend max |v - 1| = {id_dev:.2e}, essential norm {ess:.6} (= 1 within 1e-6)"
        ),
        json!({"degree": m.degree(), "t_0_6": trend, "last_over_max": last_ratio, "identity_trend": id, "essential_norm": ess}),
    ))
}

fn c13() -> Result<Check> {
    let u = Weight::constant();
    let m = build_kernel_model(&u, 2000)?;
    let h = SchattenFunction::power(2.0)?;
    let options = SchattenOptions::default();
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    let mut passed = true;
    for (t, want) in [(0.8, Verdict::Finite), (0.3, Verdict::Divergent)] {
        let mu = DiscMeasure::power_density(t)?;
        let integral = schatten_integral(&mu, &m, &h, 1.0, 0.3, &options)?;
        let values = trend_values(&integral);
        let (first, last) = (values[0], values[values.len() - 1]);
        let membership = schatten_membership_trend(&mu, &u, &h, 1.0, &MEMBERSHIP_DEGREES)?;
        let ok = integral.verdict == want && membership.verdict == want;
        passed &= ok;
        parts.push(format!(
            "t={t}: R_max 0.99->0.999 ratio {:.4} ({}), N-doubling {} (want {})",
            last / first,
            integral.verdict,
            membership.verdict,
            want
        ));
        rows.push(json!({
            "t": t, "integral": values, "integral_verdict": integral.verdict,
            "membership": trend_values(&membership), "membership_verdict": membership.verdict, "expected": want,
        }));
    }
    Ok(finish(13, passed, parts.join("; "), json!({"degree": 2000, "cases": rows})))
}

/// One row of the consistency matrix.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyCell {
    pub label: &'static str,
    pub weight: &'static str,
    pub measure: &'static str,
    pub p: f64,
    pub q: f64,
    pub expected: &'static str,
    pub verdict: Verdict,
    pub outcome: &'static str,
    pub known_ambiguity: bool,
    pub rows: Vec<ConditionRow>,
}

fn compact_atoms() -> Result<DiscMeasure> {
    DiscMeasure::atomic(vec![
        (DiscPoint::new(0.2, 0.0)?, 1.0),
        (DiscPoint::new(0.0, -0.3)?, 0.5),
        (DiscPoint::new(0.5, 0.1)?, 2.0),
    ])
}

/// The canonical cells plus the documented ambiguity cells.
pub fn consistency_cells(o: &VerifyOptions) -> Result<Vec<ConsistencyCell>> {
    let constant = Weight::constant();
    let standard = Weight::standard(1.0)?;
    type Spec = (&'static str, &'static str, &'static str, f64, f64, &'static str, bool);
    let specs: [Spec; 8] = [
        ("identity", "constant", "weighted_area", 2.0, 2.0, "bounded, not compact", false),
        ("power 0.6", "constant", "power_density(0.6)", 2.0, 4.0, "bounded and compact", false),
        ("atoms, q<p", "constant", "atomic", 4.0, 2.0, "bounded and compact", false),
        ("power 0.4", "constant", "power_density(0.4)", 2.0, 4.0, "unbounded", false),
        ("power 1, q<p", "constant", "power_density(1)", 4.0, 2.0, "bounded and compact", false),
        ("atoms", "constant", "atomic", 2.0, 2.0, "bounded and compact", false),
        ("area, q<p", "constant", "weighted_area", 4.0, 2.0, "ambiguous", true),
        ("standard area, q<p", "standard(1)", "weighted_area", 4.0, 2.0, "ambiguous", true),
    ];
    let options = o.consistency();
    let mut out = Vec::new();
    for (label, weight, measure, p, q, expected, ambiguous) in specs {
        let u = if weight == "constant" { constant.clone() } else { standard.clone() };
        let mu = match measure {
            "weighted_area" => DiscMeasure::weighted_area(u.clone()),
            "atomic" => compact_atoms()?,
            "power_density(0.6)" => DiscMeasure::power_density(0.6)?,
            "power_density(0.4)" => DiscMeasure::power_density(0.4)?,
            _ => DiscMeasure::power_density(1.0)?,
        };
        let (rep, rows) = theorem_consistency_report(&mu, &u, p, q, 2.0, 0.3, 2.0, &options)?;
        out.push(ConsistencyCell {
            label,
            weight,
            measure,
            p,
            q,
            expected,
            verdict: rep.verdict,
            outcome: consistency_label(rep.verdict),
            known_ambiguity: ambiguous,
            rows,
        });
    }
    Ok(out)
}

fn c14(o: &VerifyOptions) -> Result<Check> {
    let cells = consistency_cells(o)?;
    let mut passed = true;
    let mut parts = Vec::new();
    for c in &cells {
        let consistent = c.verdict != Verdict::Inconclusive;
        if !c.known_ambiguity {
            passed &= consistent;
        }
        parts.push(format!(
            "{}: {}{}",
            c.label,
            c.outcome,
            if c.known_ambiguity { " (known ambiguity)" } else { "" }
        ));
    }
    let expected: Vec<bool> = cells.iter().map(|c| c.outcome == c.expected).collect();
    Ok(finish(14, passed, parts.join("; "), json!({"cells": cells, "matches_expected": expected})))
}

/// Runs criterion `id` in `1..=14`.
pub fn run_check(id: usize, o: &VerifyOptions) -> Result<Check> {
    match id {
        1 => c1(),
        2 => c2(),
        3 => c3(o.seed),
        4 => c4(o),
        5 => c5(o),
        6 => c6(o),
        7 => c7(),
        8 => c8(),
        9 => c9(o),
        10 => c10(o),
        11 => c11(o),
        12 => c12(o),
        13 => c13(),
        14 => c14(o),
        _ => panic!("no criterion {id} to run directly"),
    }
}

/// A check that could not be evaluated fails with the error as its summary.
pub fn run_or_fail(id: usize, o: &VerifyOptions) -> Check {
    run_check(id, o).unwrap_or_else(|e| finish(id, false, format!("error: {e}"), json!({"error": e.to_string()})))
}

/// Criterion 15 from two serialized runs of the other criteria.
pub fn determinism_check(first: &[Vec<u8>], second: &[Vec<u8>]) -> Check {
    let differing: Vec<usize> = first
        .iter()
        .zip(second)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(k, _)| k + 1)
        .collect();
    let passed = first.len() == second.len() && differing.is_empty();
    finish(
        15,
        passed,
        if passed {
            format!("{} JSON artifacts bit-identical across two runs", first.len())
        } else {
            format!("artifacts differ for criteria {differing:?}")
        },
        json!({"artifacts": first.len(), "differing": differing}),
    )
}
