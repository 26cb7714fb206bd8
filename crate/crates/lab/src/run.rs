//! Subcommand orchestration: sweep cells in a worker pool, one artifact
//! directory per cell, one summary per run.

use std::fmt;
use std::path::PathBuf;

use bergman_core::criteria::{
    boundedness_index, carleson_test, compactness_index, ladder_degree, qlp_index, theorem_consistency_report,
    vanishing_carleson_test, ConsistencyOptions,
};
use bergman_core::geometry::{audit_grid, boundary_ladder, build_lattice, BoundaryLadder, Lattice};
use bergman_core::report::Verdict;
use bergman_core::space::{build_kernel_model, kernel_estimate_report, KernelModel};
use bergman_core::toeplitz::{
    assemble, essential_norm_estimate, schatten_integral, schatten_membership_trend, trace_identity_check,
    SchattenOptions,
};
use bergman_core::transforms::{average_profile, berezin_profile, comparability_report, t_berezin_profile};
use bergman_core::weights::{bekolle_constant, cp_constant};
use bergman_core::{CriterionReport, DiscMeasure, DiscPoint, Weight};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{Cell, ConfigError, CriterionChoice, RunConfig};
use crate::io::{fmt_f64, ArtifactDir};
use crate::verify;

/// Anchors inside this radius come from the lattice; the ladder covers the rest.
pub const INTERIOR_RADIUS: f64 = 0.5;
/// Side of the lattice audit grid (`n` rings by `n` angles).
pub const AUDIT_SIDE: usize = 100;
/// Relative kernel truncation tolerance bounding the profile grids.
pub const RESOLVED_TOLERANCE: f64 = 1e-3;
pub const THREADS_ENV: &str = "BERGMAN_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Lattice,
    Kernel,
    Weights,
    Berezin,
    Toeplitz,
    Criteria,
    Schatten,
    Verify,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Lattice => "lattice",
            Subcommand::Kernel => "kernel",
            Subcommand::Weights => "weights",
            Subcommand::Berezin => "berezin",
            Subcommand::Toeplitz => "toeplitz",
            Subcommand::Criteria => "criteria",
            Subcommand::Schatten => "schatten",
            Subcommand::Verify => "verify",
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(bergman_core::Error),
    Io(std::io::Error),
}

impl RunError {
    /// 2 for invalid input, 3 for numerical degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Numerical(bergman_core::Error::Domain { .. }) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "invalid config: {e}"),
            RunError::Numerical(e @ bergman_core::Error::Domain { .. }) => write!(f, "invalid parameter: {e}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "cannot write artifacts: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<bergman_core::Error> for RunError {
    fn from(e: bergman_core::Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Worker count from `BERGMAN_LAB_THREADS`, or rayon's default.
pub fn thread_count() -> Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(ConfigError::new(THREADS_ENV, format!("must be a positive integer, got {v:?}"))),
        },
    }
}

fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

/// What one cell reported.
#[derive(Debug, Clone, Serialize)]
pub struct CellOutcome {
    pub hash: String,
    pub cell: Cell,
    pub headline: String,
    pub verdict: Option<Verdict>,
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub subcommand: &'static str,
    pub config_hash: String,
    pub cells: Vec<CellOutcome>,
    /// Failed acceptance criteria (`verify` only).
    pub failed: Vec<usize>,
    #[serde(skip)]
    pub text: String,
}

struct Inputs {
    config: RunConfig,
    weight: Weight,
    measure: DiscMeasure,
    ladder: BoundaryLadder,
}

/// Validates `config` and runs `sub` over every sweep cell.
pub fn run(sub: Subcommand, config: &RunConfig) -> Result<RunSummary, RunError> {
    config.validate()?;
    let threads = thread_count()?;
    let weight = config.build_weight()?;
    let measure = config.build_measure(&weight)?;
    let ladder = boundary_ladder(config.ladder.rings, config.ladder.samples_per_ring)?;
    if sub == Subcommand::Verify {
        return run_verify(config, threads);
    }
    let root = config.out.join(sub.name());
    let cells = config.cells();
    let results: Vec<Result<CellOutcome, RunError>> = pool(threads).install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                let inputs = Inputs {
                    config: config.for_cell(cell),
                    weight: weight.clone(),
                    measure: measure.clone(),
                    ladder: ladder.clone(),
                };
                run_cell(sub, &inputs, cell, &root)
            })
            .collect()
    });
    let mut outcomes = Vec::with_capacity(results.len());
    let mut first_error = None;
    let mut text = String::new();
    for (cell, r) in cells.iter().zip(results) {
        match r {
            Ok(o) => {
                text.push_str(&format!("{} {}: {}\n", &o.hash[..16], cell_label(cell), o.headline));
                outcomes.push(o);
            }
            Err(e) => {
                text.push_str(&format!("{}: error: {e}\n", cell_label(cell)));
                first_error.get_or_insert(e);
            }
        }
    }
    let summary = RunSummary {
        subcommand: sub.name(),
        config_hash: config.hash(),
        cells: outcomes,
        failed: Vec::new(),
        text,
    };
    let mut dir = ArtifactDir::create(root, summary.config_hash.clone(), sub.name())?;
    dir.write_json("summary.json", &summary)?;
    dir.write_text("summary.txt", &summary.text)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

fn cell_label(c: &Cell) -> String {
    format!("p={} q={} t={} r={} s={}", c.p, c.q, c.t, c.r, c.s)
}

fn run_cell(sub: Subcommand, inputs: &Inputs, cell: Cell, root: &std::path::Path) -> Result<CellOutcome, RunError> {
    let hash = inputs.config.hash();
    let dir_path = root.join(&hash[..16]);
    let mut dir = ArtifactDir::create(dir_path.clone(), hash.clone(), sub.name())?;
    dir.write_json("config.json", &inputs.config)?;
    let (headline, verdict) = match sub {
        Subcommand::Lattice => lattice_cell(inputs, &mut dir)?,
        Subcommand::Kernel => kernel_cell(inputs, cell, &mut dir)?,
        Subcommand::Weights => weights_cell(inputs, cell, &mut dir)?,
        Subcommand::Berezin => berezin_cell(inputs, cell, &mut dir)?,
        Subcommand::Toeplitz => toeplitz_cell(inputs, cell, &mut dir)?,
        Subcommand::Criteria => criteria_cell(inputs, cell, &mut dir)?,
        Subcommand::Schatten => schatten_cell(inputs, cell, &mut dir)?,
        Subcommand::Verify => unreachable!("verify runs as a whole"),
    };
    dir.write_text("summary.txt", &format!("{}\n{headline}\n", cell_label(&cell)))?;
    Ok(CellOutcome {
        hash,
        cell,
        headline,
        verdict,
        dir: dir_path,
    })
}

type CellResult = Result<(String, Option<Verdict>), RunError>;

/// Report JSON plus `<stem>_points.csv` and `<stem>_trend.csv` when present.
fn write_report(dir: &mut ArtifactDir, stem: &str, report: &CriterionReport) -> std::io::Result<()> {
    dir.write_json(&format!("{stem}.json"), report)?;
    if !report.per_point.is_empty() {
        let rows = report.per_point.iter().map(|p| [fmt_f64(p.re), fmt_f64(p.im), fmt_f64(p.value)]);
        dir.write_csv(&format!("{stem}_points.csv"), &["re", "im", "value"], rows)?;
    }
    if !report.ring_trend.is_empty() {
        let rows = report.ring_trend.iter().map(|r| [fmt_f64(r.radius), fmt_f64(r.value)]);
        dir.write_csv(&format!("{stem}_trend.csv"), &["radius", "value"], rows)?;
    }
    Ok(())
}

fn lattice_json(l: &Lattice) -> serde_json::Value {
    let points: Vec<[f64; 2]> = l.points.iter().map(|z| [z.re, z.im]).collect();
    json!({"r": l.radius, "r_max": l.r_max, "points": points, "multiplicity_bound": l.multiplicity_bound})
}

fn lattice_cell(inputs: &Inputs, dir: &mut ArtifactDir) -> CellResult {
    let c = &inputs.config;
    let lattice = build_lattice(c.lattice_r, c.r_max)?;
    let cert = lattice.certify(&audit_grid(c.r_max, AUDIT_SIDE, AUDIT_SIDE));
    dir.write_json("lattice.json", &lattice_json(&lattice))?;
    dir.write_json("certificate.json", &cert)?;
    let rows = lattice.points.iter().map(|z| [fmt_f64(z.re), fmt_f64(z.im)]);
    dir.write_csv("lattice.csv", &["re", "im"], rows)?;
    Ok((
        format!(
            "{} points, min separation {:.4}, covered {}/{}, multiplicity {} <= {}: {}",
            lattice.len(),
            cert.min_separation,
            cert.covered,
            cert.audited,
            cert.max_multiplicity,
            cert.multiplicity_bound,
            if cert.holds() { "certified" } else { "NOT certified" }
        ),
        None,
    ))
}

/// Lattice points where the model resolves the kernel.
fn resolved_grid(c: &RunConfig, m: &KernelModel) -> Result<Vec<DiscPoint>, RunError> {
    let radius = m.resolved_radius(RESOLVED_TOLERANCE).min(c.r_max);
    Ok(build_lattice(c.lattice_r, radius)?.points)
}

fn model_json(c: &RunConfig, m: &KernelModel) -> serde_json::Value {
    let basis = match m.diagonal_coefficients() {
        Some(d) => json!({"diagonal_norms": d.iter().map(|c| 1.0 / (c * c)).collect::<Vec<_>>()}),
        None => {
            let rows: Vec<Vec<[f64; 2]>> = (0..=m.degree())
                .map(|k| m.coefficient_row(k).iter().map(|z| [z.re, z.im]).collect())
                .collect();
            json!({"triangular_coefficients": rows})
        }
    };
    json!({
        "degree": m.degree(),
        "weight": c.weight,
        "basis": basis,
        "gram_residual": m.gram_residual(),
        "resolution_delta": m.resolution_delta(),
    })
}

fn kernel_cell(inputs: &Inputs, cell: Cell, dir: &mut ArtifactDir) -> CellResult {
    let c = &inputs.config;
    let m = build_kernel_model(&inputs.weight, c.degree)?;
    let grid = resolved_grid(c, &m)?;
    let report = kernel_estimate_report(&m, cell.r, &grid, &[cell.p, cell.q])?;
    dir.write_json("model.json", &model_json(c, &m))?;
    write_report(dir, "kernel_estimates", &report)?;
    if let Some(d) = report.sub("diagonal") {
        let values: Vec<f64> = d.per_point.iter().map(|p| p.value).collect();
        dir.write_profile("diagonal", &grid, &values, &json!({"quantity": "K(z,z)u(D(z,r))", "r": cell.r, "degree": c.degree}))?;
    }
    let band = report.sub("diagonal").and_then(|d| d.bands.first()).cloned();
    Ok((
        format!(
            "degree {}, gram residual {:.2e}, resolution delta {:.2e}, K(z,z)u(D(z,{})) in [{:.5}, {:.5}] over {} points",
            m.degree(),
            m.gram_residual(),
            m.resolution_delta(),
            cell.r,
            band.as_ref().map_or(f64::NAN, |b| b.lo),
            band.as_ref().map_or(f64::NAN, |b| b.hi),
            grid.len()
        ),
        Some(report.verdict),
    ))
}

fn interior_anchors(c: &RunConfig) -> Result<Vec<DiscPoint>, RunError> {
    Ok(build_lattice(c.lattice_r, INTERIOR_RADIUS)?.points)
}

fn weights_cell(inputs: &Inputs, cell: Cell, dir: &mut ArtifactDir) -> CellResult {
    let anchors = interior_anchors(&inputs.config)?;
    let bp = bekolle_constant(&inputs.weight, cell.p, &anchors, &inputs.ladder)?;
    let cp = cp_constant(&inputs.weight, cell.p, cell.r, &anchors, &inputs.ladder)?;
    dir.write_json("bekolle.json", &bp)?;
    dir.write_json("cp.json", &cp)?;
    for (stem, rep) in [("bekolle", &bp), ("cp", &cp)] {
        let rows = rep.per_anchor.iter().map(|a| [fmt_f64(a.re), fmt_f64(a.im), fmt_f64(a.value)]);
        dir.write_csv(&format!("{stem}_anchors.csv"), &["re", "im", "value"], rows)?;
        let rows = rep.trend.iter().map(|r| [fmt_f64(r.radius), fmt_f64(r.value)]);
        dir.write_csv(&format!("{stem}_trend.csv"), &["radius", "value"], rows)?;
    }
    Ok((
        format!("B_{p} = {:.5} ({}), C_{p} at r={} = {:.5} ({})", bp.value, bp.verdict, cell.r, cp.value, cp.verdict, p = cell.p),
        Some(bp.verdict),
    ))
}

fn berezin_cell(inputs: &Inputs, cell: Cell, dir: &mut ArtifactDir) -> CellResult {
    let c = &inputs.config;
    let (mu, u) = (&inputs.measure, &inputs.weight);
    let m = build_kernel_model(u, c.degree)?;
    let grid = resolved_grid(c, &m)?;
    let params = json!({"degree": c.degree, "t": cell.t, "r": cell.r, "measure": c.measure, "weight": c.weight});
    let b = berezin_profile(mu, &m, &grid)?;
    dir.write_profile("berezin", &grid, &b.values, &json!({"transform": b.kind, "parameters": params}))?;
    if cell.t != 2.0 {
        let tb = t_berezin_profile(mu, &m, cell.t, &grid)?;
        dir.write_profile("t_berezin", &grid, &tb.values, &json!({"transform": tb.kind, "parameters": params}))?;
    }
    let avg = average_profile(mu, u, cell.r, &grid)?;
    dir.write_profile("average", &grid, &avg.values, &json!({"transform": avg.kind, "parameters": params}))?;
    let rep = comparability_report(mu, &m, cell.t, cell.r, &grid)?;
    write_report(dir, "comparability", &rep)?;
    let lower = rep.sub("lower").map_or(f64::NAN, |s| s.index_value);
    let upper = rep.sub("upper").map_or(f64::NAN, |s| s.index_value);
    Ok((
        format!("{} points, min B_t/avg = {lower:.5}, max B_t / sup avg = {upper:.5}", grid.len()),
        Some(rep.verdict),
    ))
}

fn toeplitz_cell(inputs: &Inputs, cell: Cell, dir: &mut ArtifactDir) -> CellResult {
    let c = &inputs.config;
    let (mu, u) = (&inputs.measure, &inputs.weight);
    let m = build_kernel_model(u, c.degree)?;
    let t = assemble(mu, &m)?;
    let spectrum = t.spectrum();
    let sum: f64 = spectrum.eigenvalues.iter().sum();
    let residual = trace_identity_check(&t, mu, &m)?;
    let rows = spectrum.eigenvalues.iter().enumerate().map(|(k, l)| [(k + 1).to_string(), fmt_f64(*l)]);
    dir.write_csv("spectrum.csv", &["k", "lambda"], rows)?;
    dir.write_json(
        "toeplitz.json",
        &json!({
            "degree": c.degree,
            "norm": t.norm(),
            "min_eigenvalue": t.min_eigenvalue(),
            "trace": sum,
            "trace_residual": residual,
            "gram_residual": m.gram_residual(),
            "spectrum": spectrum,
        }),
    )?;
    let ess = essential_norm_estimate(mu, &m, cell.p, cell.q, cell.t, cell.r, &inputs.ladder)?;
    write_report(dir, "essential_norm", &ess)?;
    Ok((
        format!(
            "degree {}, lambda_1 = {:.10}, trace {:.6} (residual {:.2e}), essential norm estimate {:.5} ({})",
            c.degree,
            t.norm(),
            sum,
            residual,
            ess.index_value + 0.0,
            ess.verdict
        ),
        Some(ess.verdict),
    ))
}

fn criteria_cell(inputs: &Inputs, cell: Cell, dir: &mut ArtifactDir) -> CellResult {
    let c = &inputs.config;
    let (mu, u, ladder) = (&inputs.measure, &inputs.weight, &inputs.ladder);
    let options = ConsistencyOptions {
        ladder: ladder.clone(),
        p0: c.p0,
        ..ConsistencyOptions::default()
    };
    let degree = ladder_degree(ladder, u, &options);
    let model = || build_kernel_model(u, degree);
    let Cell { p, q, t, r, s } = cell;
    let report = match c.criterion {
        CriterionChoice::Boundedness => boundedness_index(mu, &model()?, p, q, t, r, &interior_anchors(c)?, Some(ladder))?,
        CriterionChoice::Compactness => compactness_index(mu, &model()?, p, q, t, r, ladder)?,
        CriterionChoice::Qlp => qlp_index(mu, &model()?, p, q, t, r, c.qlp_reference)?,
        // The smallest admissible test-function exponent.
        CriterionChoice::Carleson => carleson_test(mu, u, p, q, r, 2.0 * c.p0 / p, c.p0, ladder)?,
        CriterionChoice::VanishingCarleson => vanishing_carleson_test(mu, u, p, q, ladder)?,
        CriterionChoice::EssentialNorm => essential_norm_estimate(mu, &model()?, p, q, t, r, ladder)?,
        CriterionChoice::Consistency => {
            let (report, rows) = theorem_consistency_report(mu, u, p, q, t, r, s, &options)?;
            let csv_rows = rows.iter().map(|row| {
                let flag = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
                [row.theorem.clone(), row.condition.clone(), row.verdict.to_string(), flag(row.bounded), flag(row.compact)]
            });
            dir.write_csv("consistency.csv", &["theorem", "condition", "verdict", "bounded", "compact"], csv_rows)?;
            dir.write_json("consistency_matrix.json", &rows)?;
            report
        }
    };
    write_report(dir, &report.name.clone(), &report)?;
    let label = match c.criterion {
        CriterionChoice::Consistency => format!(" ({})", bergman_core::criteria::consistency_label(report.verdict)),
        _ => String::new(),
    };
    Ok((
        format!("{}: index {:.6}, verdict {}{label}", report.name, report.index_value, report.verdict),
        Some(report.verdict),
    ))
}

fn schatten_cell(inputs: &Inputs, cell: Cell, dir: &mut ArtifactDir) -> CellResult {
    let c = &inputs.config;
    let sc = &c.schatten;
    let (mu, u) = (&inputs.measure, &inputs.weight);
    let m = build_kernel_model(u, c.degree)?;
    let options = SchattenOptions {
        proxy: sc.proxy,
        sweep: sc.sweep.clone(),
        panel_nodes: c.resolution,
        ..SchattenOptions::default()
    };
    let integral = schatten_integral(mu, &m, &sc.h, sc.c, cell.r, &options)?;
    write_report(dir, "schatten_integral", &integral)?;
    let membership = schatten_membership_trend(mu, u, &sc.h, sc.c, &sc.degrees)?;
    write_report(dir, "schatten_membership", &membership)?;
    Ok((
        format!(
            "integral {:.6} ({}), membership sum {:.6} at degree {} ({})",
            integral.index_value,
            integral.verdict,
            membership.index_value,
            sc.degrees.last().copied().unwrap_or(0),
            membership.verdict
        ),
        Some(integral.verdict),
    ))
}

/// Serialized artifact of each criterion, in order.
fn suite_artifacts(dir: &ArtifactDir, checks: &[verify::Check]) -> Vec<Vec<u8>> {
    checks.iter().map(|c| dir.json_bytes(c)).collect()
}

fn run_suite(options: &verify::VerifyOptions, threads: Option<usize>) -> Vec<verify::Check> {
    pool(threads).install(|| (1..=14).into_par_iter().map(|id| verify::run_or_fail(id, options)).collect())
}

fn run_verify(config: &RunConfig, threads: Option<usize>) -> Result<RunSummary, RunError> {
    let options = verify::VerifyOptions::from_config(config)?;
    let hash = config.hash();
    let root = config.out.join("verify");
    let mut dir = ArtifactDir::create(root.join(&hash[..16]), hash.clone(), "verify")?;
    let mut checks = run_suite(&options, threads);
    // The second run uses a different worker count.
    let second = run_suite(&options, Some(threads.unwrap_or(2).max(2) - 1));
    checks.push(verify::determinism_check(&suite_artifacts(&dir, &checks), &suite_artifacts(&dir, &second)));
    for c in &checks {
        dir.write_json(&format!("criterion_{:02}.json", c.id), c)?;
    }
    let rows = checks.iter().map(|c| [c.id.to_string(), c.title.to_string(), c.passed.to_string(), c.summary.clone()]);
    dir.write_csv("acceptance.csv", &["criterion", "title", "passed", "summary"], rows)?;
    let mut text = String::new();
    for c in &checks {
        text.push_str(&c.line());
        text.push('\n');
    }
    let failed: Vec<usize> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    text.push_str(&format!("{} of {} criteria passed\n", checks.len() - failed.len(), checks.len()));
    dir.write_text("summary.txt", &text)?;
    let summary = RunSummary {
        subcommand: "verify",
        config_hash: hash,
        cells: Vec::new(),
        failed: failed.clone(),
        text,
    };
    dir.write_json("summary.json", &json!({"checks": checks.iter().map(|c| json!({"id": c.id, "title": c.title, "passed": c.passed})).collect::<Vec<_>>(), "failed": failed}))?;
    Ok(summary)
}
