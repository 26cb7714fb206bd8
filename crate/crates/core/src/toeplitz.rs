//! Truncated Toeplitz matrices `M_{mn} = ∫ e_n conj(e_m) dμ`, their spectra,
//! the essential-norm estimator and Schatten-class tests.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::criteria::{qlp_index, QlpReference};
use crate::fmath;
use crate::geometry::{BoundaryLadder, DiscPoint};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::measures::DiscMeasure;
use crate::quadrature::{full_disc, gauss_legendre};
use crate::report::{classify_cumulative, classify_ring_trend, classify_sweep, CriterionReport, RingValue, Verdict};
use crate::space::{build_kernel_model, horner, moments, product_rule_sizes, KernelModel, Moments};
use crate::transforms::{average_function, t_berezin, BerezinEvaluator};
use crate::weights::{self, Weight};
use crate::{Complex, Error, Result};

/// Relative tolerance of the positive-semidefiniteness check.
pub const PSD_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum ToeplitzEntries {
    /// Radial measure in a diagonal basis.
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

/// `(N+1)×(N+1)` matrix of `T_μ` in the orthonormal basis of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct ToeplitzMatrix {
    degree: usize,
    entries: ToeplitzEntries,
    measure: DiscMeasure,
    eigenvalues: Vec<f64>,
}

/// Eigenvalues in descending order, clamped at 0.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl ToeplitzMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> &ToeplitzEntries {
        &self.entries
    }

    pub fn measure(&self) -> &DiscMeasure {
        &self.measure
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex {
        match &self.entries {
            ToeplitzEntries::Diagonal(d) => Complex::new(if m == n { d[m] } else { 0.0 }, 0.0),
            ToeplitzEntries::Dense(a) => a[(m, n)],
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.degree + 1;
        CMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Largest eigenvalue, the operator 2-norm on the truncated space.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0).max(0.0)
    }

    /// Smallest eigenvalue before clamping.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum {
            eigenvalues: self.eigenvalues.iter().map(|&v| v.max(0.0)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        match &self.entries {
            ToeplitzEntries::Diagonal(d) => v.iter().zip(d).map(|(x, d)| x * *d).collect(),
            ToeplitzEntries::Dense(a) => a.mul_vec(v),
        }
    }

    /// `v* M v`.
    pub fn quadratic_form(&self, v: &[Complex]) -> f64 {
        match &self.entries {
            ToeplitzEntries::Diagonal(d) => v.iter().zip(d).map(|(x, d)| x.norm_sqr() * d).sum(),
            ToeplitzEntries::Dense(a) => a.quadratic_form(v),
        }
    }
}

/// Assembles `M` for `μ` in the basis of `m`.
pub fn assemble(mu: &DiscMeasure, m: &KernelModel) -> Result<ToeplitzMatrix> {
    assemble_with(mu, m, 0)
}

/// As [`assemble`], with `extra` additional radial and angular nodes in the
/// density moments.
pub fn assemble_with(mu: &DiscMeasure, m: &KernelModel, extra: usize) -> Result<ToeplitzMatrix> {
    let degree = m.degree();
    let n = degree + 1;
    let entries = if mu.is_atomic() {
        if m.is_diagonal() && mu.is_radial() {
            let mut d = vec![0.0; n];
            d[0] = mu.atoms().iter().map(|a| a.mass).sum::<f64>() * m.kernel_diag_truncated_complex(Complex::new(0.0, 0.0), 0);
            ToeplitzEntries::Diagonal(d)
        } else {
            let mut a = CMatrix::zeros(n, n);
            for atom in mu.atoms() {
                let e = m.basis_values(atom.at.to_complex());
                for i in 0..n {
                    let ei = e[i].conj() * atom.mass;
                    for j in 0..n {
                        a[(i, j)] += ei * e[j];
                    }
                }
            }
            ToeplitzEntries::Dense(a)
        }
    } else {
        let radial = mu.is_radial();
        let (n_r, n_a) = product_rule_sizes(degree, mu.is_jacobi_exact(), radial);
        let rule = full_disc(1.0, n_r + extra, if radial { 1 } else { n_a + extra }, mu.boundary_exponent())?;
        let density = |z: Complex| mu.density(z).unwrap_or(0.0);
        let p = moments(&rule, &density, degree, radial)?;
        match (p, m.diagonal_coefficients(), m.triangular_coefficients()) {
            (Moments::Diagonal(d), Some(c), _) => ToeplitzEntries::Diagonal(d.iter().zip(c).map(|(d, c)| d * c * c).collect()),
            (Moments::Full(p), Some(c), _) => {
                ToeplitzEntries::Dense(CMatrix::from_fn(n, n, |i, j| p[(i, j)].conj() * (c[i] * c[j])))
            }
            (moments, None, Some(c)) => {
                let p = match moments {
                    Moments::Diagonal(d) => CMatrix::from_fn(n, n, |i, j| Complex::new(if i == j { d[i] } else { 0.0 }, 0.0)),
                    Moments::Full(p) => p,
                };
                let mut a = c.matmul(&p).matmul(&c.adjoint()).conj();
                // Exact Hermitian symmetry.
                for i in 0..n {
                    a[(i, i)].im = 0.0;
                    for j in 0..i {
                        let v = 0.5 * (a[(i, j)] + a[(j, i)].conj());
                        a[(i, j)] = v;
                        a[(j, i)] = v.conj();
                    }
                }
                ToeplitzEntries::Dense(a)
            }
            _ => unreachable!("a model is either diagonal or triangular"),
        }
    };
    let eigenvalues = match &entries {
        ToeplitzEntries::Diagonal(d) => {
            let mut v = d.clone();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        }
        ToeplitzEntries::Dense(a) => hermitian_eigenvalues(a)?,
    };
    let top = eigenvalues.iter().fold(0.0f64, |m, v| m.max(fmath::abs(*v)));
    let min = eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOLERANCE * top {
        return Err(Error::Degenerate {
            detail: format!("Toeplitz matrix has eigenvalue {min:e} against norm {top:e}; raise the degree or the resolution"),
        });
    }
    Ok(ToeplitzMatrix {
        degree,
        entries,
        measure: mu.clone(),
        eigenvalues,
    })
}

/// `|Σ λ_k − ∫ K_N(w, w) dμ(w)|`, the right side by an independent rule.
pub fn trace_identity_check(t: &ToeplitzMatrix, mu: &DiscMeasure, m: &KernelModel) -> Result<f64> {
    let lhs: f64 = t.eigenvalues.iter().sum();
    let rhs = if mu.is_atomic() {
        mu.atoms().iter().map(|a| a.mass * m.kernel_diag(a.at)).sum()
    } else {
        let (n_r, n_a) = product_rule_sizes(m.degree(), mu.is_jacobi_exact(), mu.is_radial());
        let rule = mu.density_rule(n_r + 9, n_a + 13)?;
        mu.integrate_with(&rule, |w| m.kernel_diag_complex(w))?
    };
    Ok(fmath::abs(lhs - rhs))
}

/// `T_μ f(z) = ∫ f(w) K(z, w) dμ(w)` by direct integration; `f` is given by
/// monomial coefficients.
pub fn apply(mu: &DiscMeasure, m: &KernelModel, f: &[Complex], z: DiscPoint) -> Result<Complex> {
    if f.len() > m.degree() + 1 {
        return Err(Error::Domain {
            what: "polynomial degree above model degree",
            value: (f.len() - 1) as f64,
        });
    }
    let section = m.kernel_section(z.to_complex());
    let integrand = |w: Complex| horner(f, w) * horner(&section, w).conj();
    if mu.is_atomic() {
        return Ok(mu.atoms().iter().map(|a| integrand(a.at.to_complex()) * a.mass).sum());
    }
    let n = m.degree();
    let n_r = n / 2 + 16 + if mu.is_jacobi_exact() { 0 } else { n + 16 };
    let n_a = 2 * n + 8 + if mu.is_radial() { 0 } else { 2 * n + 56 };
    let rule = mu.density_rule(n_r, n_a)?;
    rule.integrate(|w| integrand(w) * mu.density(w).unwrap_or(0.0))
}

/// `T_μ f(z)` through the matrix: coefficients `M a` of `f = Σ a_n e_n`.
pub fn matrix_apply(t: &ToeplitzMatrix, m: &KernelModel, f: &[Complex], z: DiscPoint) -> Result<Complex> {
    let a = m.to_basis(f)?;
    Ok(m.eval_in_basis(&t.mul_vec(&a), z.to_complex()))
}

/// Boundary behaviour of `μ̂_r(z)·u(Δ(z,r))^{(q−p)/(pq)}` along the ladder.
///
/// The main trend uses `μ̂_r`; the sub-report `berezin` repeats it with `μ̃_t`,
/// and `quotient` divides by the same power instead of multiplying. The
/// estimate is the last-ring value. For `q < p` the estimate is 0 whenever the
/// `L^{pq/(p−q)}` condition holds, and the operator is unbounded otherwise.
pub fn essential_norm_estimate(
    mu: &DiscMeasure,
    m: &KernelModel,
    p: f64,
    q: f64,
    t: f64,
    r: f64,
    ladder: &BoundaryLadder,
) -> Result<CriterionReport> {
    let mut report = CriterionReport::new("essential_norm")
        .param("p", p)
        .param("q", q)
        .param("t", t)
        .param("r", r);
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::Domain {
            what: "exponents p, q",
            value: p.min(q),
        });
    }
    if q < p {
        let qlp = qlp_index(mu, m, p, q, t, r, QlpReference::WeightedArea)?;
        if qlp.verdict.is_bounded() {
            report.index_value = 0.0;
            report.verdict = Verdict::Vanishing;
        } else {
            report.index_value = f64::INFINITY;
            report.verdict = Verdict::Divergent;
        }
        report.note("q < p: bounded operators are compact, so the essential norm is 0 when bounded");
        report.sub_reports.push(qlp);
        return Ok(report);
    }
    let u = m.weight();
    let e = (q - p) / (p * q);
    let points = ladder.points();
    let mut hat = Vec::with_capacity(points.len());
    let mut tilde = Vec::with_capacity(points.len());
    let mut quotient = Vec::with_capacity(points.len());
    let berezin = if t == 2.0 { Some(BerezinEvaluator::new(mu, m)?) } else { None };
    for &z in &points {
        let mass = weights::disk_mass(u, z, r)?;
        let factor = fmath::powf(mass, e);
        let h = average_function(mu, u, r, z)?;
        let b = match &berezin {
            Some(b) => b.eval(z),
            None => t_berezin(mu, m, t, z)?,
        };
        hat.push(h * factor);
        tilde.push(b * factor);
        quotient.push(h / factor);
    }
    let rings = |values: &[f64]| -> Vec<RingValue> {
        ladder
            .ring_maxima(values)
            .into_iter()
            .map(|(radius, value)| RingValue { radius, value })
            .collect()
    };
    let sub = |name: &str, values: &[f64]| {
        let mut s = CriterionReport::new(name);
        s.ring_trend = rings(values);
        s.index_value = s.ring_trend.last().map(|r| r.value).unwrap_or(f64::NAN);
        s.verdict = classify_ring_trend(&s.ring_trend);
        s
    };
    let tilde_report = sub("berezin", &tilde);
    let quotient_report = sub("quotient", &quotient);
    report.ring_trend = rings(&hat);
    report.index_value = report.ring_trend.last().map(|r| r.value).unwrap_or(f64::NAN);
    report.verdict = classify_ring_trend(&report.ring_trend);
    report.sub_reports.push(tilde_report);
    report.sub_reports.push(quotient_report);
    Ok(report)
}

/// Increasing convex `h` with `h(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SchattenFunction {
    /// `x^p`, `p ≥ 1`.
    Power { p: f64 },
    /// Piecewise linear through `(x, h)` knots starting at `(0, 0)`, extended
    /// linearly past the last knot.
    Table { knots: Vec<(f64, f64)> },
}

impl SchattenFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain {
                what: "Schatten exponent",
                value: p,
            });
        }
        Ok(SchattenFunction::Power { p })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |value: f64| Err(Error::Domain { what: "Schatten table", value });
        if knots.len() < 2 || knots[0] != (0.0, 0.0) {
            return bad(knots.len() as f64);
        }
        let mut last_slope = 0.0;
        for w in knots.windows(2) {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if !(dx > 0.0) || !dy.is_finite() {
                return bad(w[1].0);
            }
            let slope = dy / dx;
            if slope < last_slope {
                return bad(w[1].0);
            }
            last_slope = slope;
        }
        Ok(SchattenFunction::Table { knots })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchattenFunction::Power { p } => Self::power(*p).map(|_| ()),
            SchattenFunction::Table { knots } => Self::table(knots.clone()).map(|_| ()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SchattenFunction::Power { p } => fmath::powf(x.max(0.0), *p),
            SchattenFunction::Table { knots } => {
                let x = x.max(0.0);
                let i = knots.partition_point(|k| k.0 <= x).clamp(1, knots.len() - 1);
                let (a, b) = (knots[i - 1], knots[i]);
                a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
            }
        }
    }
}

/// Kernel-square factor `Φ` of the Schatten integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KernelProxy {
    /// `K_N(z, z) = ‖K_z‖²`.
    KernelDiagonal,
    /// `u(Δ(z, r)) / (1 − |z|)⁴`.
    Printed,
}

/// Discretization of the Schatten integral.
#[derive(Clone, Debug, PartialEq)]
pub struct SchattenOptions {
    pub proxy: KernelProxy,
    /// Increasing cut radii; the last is `R_max`.
    pub sweep: Vec<f64>,
    /// Gauss nodes per radial panel.
    pub panel_nodes: usize,
    /// Angular nodes for non-radial integrands.
    pub angular: usize,
}

/// `R_max` sweep of the Schatten integral.
pub const SCHATTEN_SWEEP: [f64; 3] = [0.99, 0.995, 0.999];

impl Default for SchattenOptions {
    fn default() -> Self {
        SchattenOptions {
            proxy: KernelProxy::KernelDiagonal,
            sweep: SCHATTEN_SWEEP.to_vec(),
            panel_nodes: 32,
            angular: 128,
        }
    }
}

/// `∫_{|z|<R} h(C μ̃(z)) Φ(z) u(z) dA(z)` for each `R` of the sweep.
///
/// Radial panels are dyadic towards the circle with every sweep radius as a
/// breakpoint. The verdict compares the first and last sweep values: a change
/// under 5% is convergent (`finite`), growth of 2× or more is divergent.
pub fn schatten_integral(
    mu: &DiscMeasure,
    m: &KernelModel,
    h: &SchattenFunction,
    c: f64,
    r: f64,
    options: &SchattenOptions,
) -> Result<CriterionReport> {
    h.validate()?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain {
            what: "Schatten constant C",
            value: c,
        });
    }
    let sweep = &options.sweep;
    if sweep.is_empty() || sweep.windows(2).any(|w| w[1] <= w[0]) || sweep[0] <= 0.0 || sweep[sweep.len() - 1] >= 1.0 {
        return Err(Error::Domain {
            what: "Schatten R_max sweep",
            value: sweep.first().copied().unwrap_or(f64::NAN),
        });
    }
    let u = m.weight();
    let berezin = BerezinEvaluator::new(mu, m)?;
    let radial = mu.is_radial() && u.is_radial();
    let r_last = sweep[sweep.len() - 1];
    let mut breaks = vec![0.0];
    let mut b = 0.5;
    while b < r_last {
        breaks.push(b);
        b = 1.0 - 0.5 * (1.0 - b);
    }
    breaks.extend_from_slice(sweep);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let phi = |z: Complex| -> Result<f64> {
        Ok(match options.proxy {
            KernelProxy::KernelDiagonal => m.kernel_diag_complex(z),
            KernelProxy::Printed => {
                let one_minus = 1.0 - z.norm();
                weights::disk_mass(u, DiscPoint::clamped(z), r)? / (one_minus * one_minus * one_minus * one_minus)
            }
        })
    };
    let integrand = |z: Complex| -> Result<f64> {
        let v = h.eval(c * berezin.eval_complex(z)) * phi(z)? * u.evaluate(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { re: z.re, im: z.im })
        }
    };
    let gl = gauss_legendre(options.panel_nodes)?;
    let angular = if radial { 1 } else { options.angular.max(1) };
    let mut total = 0.0;
    let mut values = Vec::with_capacity(sweep.len());
    for w in breaks.windows(2) {
        let panel = gl.mapped(w[0], w[1]);
        let mut s = 0.0;
        for (&rho, &wt) in panel.nodes.iter().zip(&panel.weights) {
            let mut ring = 0.0;
            for l in 0..angular {
                let th = 2.0 * fmath::PI * l as f64 / angular as f64;
                ring += integrand(Complex::from_polar(rho, th))?;
            }
            s += wt * rho * 2.0 * fmath::PI * ring / angular as f64;
        }
        total += s;
        if sweep.contains(&w[1]) {
            values.push(total);
        }
    }
    let mut report = CriterionReport::new("schatten_integral")
        .param("C", c)
        .param("r", r)
        .param("degree", m.degree() as f64);
    if let SchattenFunction::Power { p } = h {
        report = report.param("p", *p);
    }
    report.ring_trend = sweep
        .iter()
        .zip(&values)
        .map(|(&radius, &value)| RingValue { radius, value })
        .collect();
    report.index_value = values[values.len() - 1];
    report.verdict = classify_sweep(values[0], values[values.len() - 1]);
    report.note(format!(
        "proxy {}",
        match options.proxy {
            KernelProxy::KernelDiagonal => "K_N(z,z)",
            KernelProxy::Printed => "u(D(z,r))/(1-|z|)^4",
        }
    ));
    Ok(report)
}

/// `Σ_k h(C λ_k)` over the truncated spectrum.
pub fn schatten_membership(t: &ToeplitzMatrix, h: &SchattenFunction, c: f64) -> f64 {
    let mut terms: Vec<f64> = t.spectrum().eigenvalues.iter().map(|&l| h.eval(c * l)).collect();
    // Smallest first for a stable sum.
    terms.reverse();
    terms.iter().sum()
}

/// Degrees of the membership trend.
pub const MEMBERSHIP_DEGREES: [usize; 4] = [250, 500, 1000, 2000];

/// Truncated membership sums over increasing model degrees; the verdict reads
/// the last increments (see [`classify_cumulative`]).
pub fn schatten_membership_trend(
    mu: &DiscMeasure,
    u: &Weight,
    h: &SchattenFunction,
    c: f64,
    degrees: &[usize],
) -> Result<CriterionReport> {
    h.validate()?;
    let mut report = CriterionReport::new("schatten_membership").param("C", c);
    let mut sums = Vec::with_capacity(degrees.len());
    for &n in degrees {
        let m = build_kernel_model(u, n)?;
        let t = assemble(mu, &m)?;
        let s = schatten_membership(&t, h, c);
        sums.push(s);
        report.ring_trend.push(RingValue { radius: n as f64, value: s });
    }
    report.index_value = sums.last().copied().unwrap_or(f64::NAN);
    report.verdict = classify_cumulative(&sums);
    if sums.len() >= 2 {
        let (a, b) = (sums[sums.len() - 2], sums[sums.len() - 1]);
        report.bands.push(crate::report::Band::of("last doubling change", [fmath::abs(b - a) / a]));
    }
    report.note("ring_trend radius holds the model degree");
    Ok(report)
}
