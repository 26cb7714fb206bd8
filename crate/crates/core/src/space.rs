//! Truncated orthonormal bases of `A²(u)` and the reproducing kernel.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::geometry::{involution, BoundaryLadder, DiscPoint, DEFAULT_R_MAX};
use crate::linalg::{cholesky, lower_inverse, pairwise, CMatrix};
use crate::quadrature::{full_disc, recentered, DiscQuadrature};
use crate::report::{classify_ring_trend, Band, CriterionReport, PointValue, RingValue, Verdict};
use crate::weights::{self, Weight};
use crate::{Complex, Error, Result};

/// Relative pivot threshold of the Gram factorization.
pub const PIVOT_THRESHOLD: f64 = 1e-12;
/// Relative truncation delta above which a kernel norm is flagged.
pub const TRUNCATION_FLAG: f64 = 1e-2;

/// `Σ coeffs[k] z^k`.
#[inline]
pub fn horner(coeffs: &[Complex], z: Complex) -> Complex {
    coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Monomial moments `P[j][k] = ∫ z^j z̄^k g dA` for `j, k ≤ degree`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Moments {
    Diagonal(Vec<f64>),
    Full(CMatrix),
}

/// Moments of the density `g` by a full-disc polar rule. Radial densities
/// only need the diagonal and a single angle per ring; otherwise each ring is
/// Fourier-analysed once and `P[j][k] = Σᵢ Wᵢ rᵢ^{j+k} Fᵢ(j − k)`.
pub(crate) fn moments(rule: &DiscQuadrature, g: &dyn Fn(Complex) -> f64, degree: usize, radial: bool) -> Result<Moments> {
    let rings = &rule.radial_nodes;
    let n = degree + 1;
    let check = |v: f64, z: Complex| -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { re: z.re, im: z.im })
        }
    };
    if radial {
        let mut acc = Vec::with_capacity(rings.len());
        let mut s = Vec::with_capacity(rings.len());
        for &(r, w) in rings {
            let z = Complex::new(r, 0.0);
            acc.push(w * check(g(z), z)?);
            s.push(r * r);
        }
        let mut diag = Vec::with_capacity(n);
        for _ in 0..n {
            diag.push(pairwise(0, acc.len(), 0.0, &|i| acc[i]));
            for (a, si) in acc.iter_mut().zip(&s) {
                *a *= si;
            }
        }
        return Ok(Moments::Diagonal(diag));
    }
    let m = rule.angular_count;
    let twiddle: Vec<Complex> = (0..m)
        .map(|l| Complex::from_polar(1.0, 2.0 * fmath::PI * l as f64 / m as f64))
        .collect();
    let mut p = CMatrix::zeros(n, n);
    let mut values = vec![0.0; m];
    let mut f = vec![Complex::new(0.0, 0.0); n];
    let mut pw = vec![0.0; 2 * n - 1];
    for (i, &(r, w)) in rings.iter().enumerate() {
        for (l, v) in values.iter_mut().enumerate() {
            let z = rule.nodes()[i * m + l].0;
            *v = check(g(z), z)?;
        }
        for (k, fk) in f.iter_mut().enumerate() {
            let mut s = Complex::new(0.0, 0.0);
            for (l, v) in values.iter().enumerate() {
                s += twiddle[(k * l) % m] * *v;
            }
            *fk = s / m as f64;
        }
        pw[0] = w;
        for e in 1..pw.len() {
            pw[e] = pw[e - 1] * r;
        }
        for j in 0..n {
            for k in 0..n {
                let fm = if j >= k { f[j - k] } else { f[k - j].conj() };
                p[(j, k)] += fm * pw[j + k];
            }
        }
    }
    Ok(Moments::Full(p))
}

/// Radial and angular node counts for integrating products of two degree-`N`
/// polynomials against a density.
pub(crate) fn product_rule_sizes(degree: usize, jacobi_exact: bool, radial: bool) -> (usize, usize) {
    let n_r = if jacobi_exact { degree / 2 + 16 } else { degree + 32 };
    let n_a = if radial { 2 * degree + 8 } else { 4 * degree + 64 };
    (n_r, n_a)
}

#[derive(Clone, Debug, PartialEq)]
enum Basis {
    /// `e_n = c_n z^n`.
    Diagonal(Vec<f64>),
    /// `e_m = Σ_j C[m][j] z^j` with `C = L⁻¹`, `G = L L*`.
    Triangular { c: CMatrix, l: CMatrix },
}

/// Orthonormal basis `e_0, …, e_N` of the polynomials of degree `≤ N` in
/// `A²(u)`, and the truncated kernel `K_N(z, w) = Σ e_n(z) conj(e_n(w))`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelModel {
    weight: Weight,
    degree: usize,
    basis: Basis,
    gram_residual: f64,
    resolution_delta: f64,
}

/// Builds the basis from the monomial Gram matrix `G_{mn} = ∫ z^m z̄^n u dA`.
pub fn build_kernel_model(u: &Weight, degree: usize) -> Result<KernelModel> {
    if degree < 1 {
        return Err(Error::Domain {
            what: "kernel degree",
            value: degree as f64,
        });
    }
    let radial = u.is_radial();
    let (n_r, n_a) = product_rule_sizes(degree, u.is_jacobi_exact(), radial);
    let e = u.boundary_exponent();
    let g = |z: Complex| u.evaluate(z);
    let gram = moments(&full_disc(1.0, n_r, if radial { 1 } else { n_a }, e)?, &g, degree, radial)?;
    let finer = moments(
        &full_disc(1.0, n_r + 7, if radial { 1 } else { n_a + 17 }, e)?,
        &g,
        degree,
        radial,
    )?;
    match (gram, finer) {
        (Moments::Diagonal(d), Moments::Diagonal(d2)) => {
            let mut c = Vec::with_capacity(d.len());
            for (k, &gk) in d.iter().enumerate() {
                if !(gk > 0.0) || !gk.is_finite() {
                    return Err(Error::Degenerate {
                        detail: format!("Gram diagonal entry {k} is {gk:e}; lower the degree"),
                    });
                }
                c.push(1.0 / fmath::sqrt(gk));
            }
            let gram_residual = d.iter().zip(&c).map(|(g, c)| fmath::abs(g * c * c - 1.0)).fold(0.0, f64::max);
            let resolution_delta = d2.iter().zip(&c).map(|(g, c)| fmath::abs(g * c * c - 1.0)).fold(0.0, f64::max);
            Ok(KernelModel {
                weight: u.clone(),
                degree,
                basis: Basis::Diagonal(c),
                gram_residual,
                resolution_delta,
            })
        }
        (Moments::Full(gm), Moments::Full(g2)) => {
            let l = cholesky(&gm, PIVOT_THRESHOLD)?;
            let c = lower_inverse(&l);
            let ca = c.adjoint();
            let gram_residual = c.matmul(&gm).matmul(&ca).distance_to_identity();
            let resolution_delta = c.matmul(&g2).matmul(&ca).distance_to_identity();
            Ok(KernelModel {
                weight: u.clone(),
                degree,
                basis: Basis::Triangular { c, l },
                gram_residual,
                resolution_delta,
            })
        }
        _ => unreachable!("both Gram matrices share the radial flag"),
    }
}

/// `‖K_w‖_{A^p_u}` with the change when the domain is cut at `R_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelNorm {
    pub value: f64,
    pub truncation_delta: f64,
    pub flagged: bool,
}

/// `k_{t,w} = K(·, w) / ‖K_w‖_{A^t_u}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedKernel {
    pub at: DiscPoint,
    pub exponent: f64,
    pub norm_value: f64,
    section: Vec<Complex>,
}

impl NormalizedKernel {
    pub fn eval(&self, z: DiscPoint) -> Complex {
        horner(&self.section, z.to_complex()) / self.norm_value
    }
}

impl KernelModel {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// True for radial weights, where `e_n = c_n z^n`.
    pub fn is_diagonal(&self) -> bool {
        matches!(self.basis, Basis::Diagonal(_))
    }

    /// `max |⟨e_m, e_n⟩ − δ_{mn}|` under the model's own Gram matrix.
    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    /// The same residual against a Gram matrix from a finer rule.
    pub fn resolution_delta(&self) -> f64 {
        self.resolution_delta
    }

    /// `c_n` for diagonal models.
    pub fn diagonal_coefficients(&self) -> Option<&[f64]> {
        match &self.basis {
            Basis::Diagonal(c) => Some(c),
            _ => None,
        }
    }

    /// `C = L⁻¹` for models built by factorization.
    pub(crate) fn triangular_coefficients(&self) -> Option<&CMatrix> {
        match &self.basis {
            Basis::Triangular { c, .. } => Some(c),
            _ => None,
        }
    }

    /// Row `m` of the triangular coefficient matrix (`e_m = Σ_j C[m][j] z^j`).
    pub fn coefficient_row(&self, m: usize) -> Vec<Complex> {
        match &self.basis {
            Basis::Diagonal(c) => {
                let mut row = vec![Complex::new(0.0, 0.0); m + 1];
                row[m] = Complex::new(c[m], 0.0);
                row
            }
            Basis::Triangular { c, .. } => c.row(m)[..=m].to_vec(),
        }
    }

    fn powers(&self, z: Complex, upto: usize) -> Vec<Complex> {
        let mut p = Vec::with_capacity(upto + 1);
        let mut acc = Complex::new(1.0, 0.0);
        for _ in 0..=upto {
            p.push(acc);
            acc *= z;
        }
        p
    }

    /// `e_0(z), …, e_N(z)`.
    pub fn basis_values(&self, z: Complex) -> Vec<Complex> {
        let pw = self.powers(z, self.degree);
        match &self.basis {
            Basis::Diagonal(c) => pw.iter().zip(c).map(|(p, c)| p * *c).collect(),
            Basis::Triangular { c, .. } => (0..=self.degree)
                .map(|m| c.row(m)[..=m].iter().zip(&pw).map(|(a, b)| a * b).sum())
                .collect(),
        }
    }

    /// Coefficients `h_k` with `K_N(z, w) = Σ_k h_k z^k`.
    pub fn kernel_section(&self, w: Complex) -> Vec<Complex> {
        self.kernel_section_truncated(w, self.degree)
    }

    /// Section of `K_M` built from `e_0, …, e_M`, `M ≤ N`.
    pub fn kernel_section_truncated(&self, w: Complex, upto: usize) -> Vec<Complex> {
        let upto = upto.min(self.degree);
        match &self.basis {
            Basis::Diagonal(c) => {
                let wc = w.conj();
                let mut acc = Complex::new(1.0, 0.0);
                (0..=upto)
                    .map(|k| {
                        let h = acc * (c[k] * c[k]);
                        acc *= wc;
                        h
                    })
                    .collect()
            }
            Basis::Triangular { c, .. } => {
                let e = self.basis_values(w);
                let mut h = vec![Complex::new(0.0, 0.0); upto + 1];
                for n in 0..=upto {
                    let en = e[n].conj();
                    for (k, hk) in h.iter_mut().enumerate().take(n + 1) {
                        *hk += c[(n, k)] * en;
                    }
                }
                h
            }
        }
    }

    pub fn kernel_eval_complex(&self, z: Complex, w: Complex) -> Complex {
        match &self.basis {
            Basis::Diagonal(c) => {
                let x = z * w.conj();
                c.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &ck| acc * x + ck * ck)
            }
            Basis::Triangular { .. } => horner(&self.kernel_section(w), z),
        }
    }

    /// `K_N(z, w)`.
    pub fn kernel_eval(&self, z: DiscPoint, w: DiscPoint) -> Complex {
        self.kernel_eval_complex(z.to_complex(), w.to_complex())
    }

    /// `K_M(z, z)` for `M ≤ N`.
    pub fn kernel_diag_truncated_complex(&self, z: Complex, upto: usize) -> f64 {
        let upto = upto.min(self.degree);
        match &self.basis {
            Basis::Diagonal(c) => {
                let s = z.norm_sqr();
                c[..=upto].iter().rev().fold(0.0, |acc, &ck| acc * s + ck * ck)
            }
            Basis::Triangular { .. } => self.basis_values(z)[..=upto].iter().map(|e| e.norm_sqr()).sum(),
        }
    }

    pub fn kernel_diag_complex(&self, z: Complex) -> f64 {
        self.kernel_diag_truncated_complex(z, self.degree)
    }

    /// `K_N(z, z)`.
    pub fn kernel_diag(&self, z: DiscPoint) -> f64 {
        self.kernel_diag_complex(z.to_complex())
    }

    /// Relative gap `(K_N − K_{N/2})/K_N` at `z`.
    pub fn convergence_at(&self, z: DiscPoint) -> f64 {
        let full = self.kernel_diag(z);
        let half = self.kernel_diag_truncated_complex(z.to_complex(), self.degree / 2);
        (full - half) / full
    }

    /// Largest radius on the positive axis where `K_N` and `K_{3N/4}` agree to
    /// the relative tolerance `tol`.
    pub fn resolved_radius(&self, tol: f64) -> f64 {
        let lower = 3 * self.degree / 4;
        let gap = |r: f64| {
            let z = Complex::new(r, 0.0);
            let full = self.kernel_diag_complex(z);
            (full - self.kernel_diag_truncated_complex(z, lower)) / full
        };
        let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-12);
        if gap(hi) <= tol {
            return hi;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) <= tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Coordinates of a polynomial (monomial coefficients, degree `≤ N`) in the
    /// orthonormal basis.
    pub fn to_basis(&self, f: &[Complex]) -> Result<Vec<Complex>> {
        if f.len() > self.degree + 1 {
            return Err(Error::Domain {
                what: "polynomial degree above model degree",
                value: (f.len() - 1) as f64,
            });
        }
        let n = self.degree + 1;
        Ok(match &self.basis {
            Basis::Diagonal(c) => (0..n)
                .map(|k| f.get(k).copied().unwrap_or_default() / c[k])
                .collect(),
            Basis::Triangular { l, .. } => (0..n)
                .map(|k| (k..f.len()).map(|j| f[j] * l[(j, k)]).sum())
                .collect(),
        })
    }

    /// `Σ c_n e_n(z)`.
    pub fn eval_in_basis(&self, c: &[Complex], z: Complex) -> Complex {
        self.basis_values(z).iter().zip(c).map(|(e, c)| e * c).sum()
    }

    /// Rule for `∫ |K(z, b)|^p ρ(z) dA(z)` where the density `ρ` has boundary
    /// exponent `e`.
    ///
    /// Even `p ≤ 8` make the integrand a polynomial times the density, so a
    /// plain polar rule of matching size is exact for Jacobi-exact densities.
    /// Other `p` use a rule recentred at `b`, pulled in to the resolved radius.
    pub(crate) fn power_rule(&self, b: DiscPoint, p: f64, e: f64, jacobi_exact: bool, radial: bool) -> Result<DiscQuadrature> {
        let n = self.degree;
        let half = p / 2.0;
        if half == fmath::floor(half) && (1.0..=4.0).contains(&half) {
            let k = half as usize;
            let n_r = k * n / 2 + 16 + if jacobi_exact { 0 } else { n + 16 };
            let n_a = 2 * k * n + 8 + if radial { 0 } else { 2 * n + 56 };
            full_disc(1.0, n_r, n_a, e)
        } else {
            let rho = self.resolved_radius(1e-3).min(DEFAULT_R_MAX);
            let center = if b.abs() > rho {
                DiscPoint::clamped(b.to_complex() * (rho / b.abs()))
            } else {
                b
            };
            recentered(center, n + 32, 4 * n + 64, e)
        }
    }

    fn norm_on(&self, q: &DiscQuadrature, section: &[Complex], p: f64) -> Result<f64> {
        let v = q.integrate_real(|z| fmath::powf(horner(section, z).norm_sqr(), 0.5 * p) * self.weight.evaluate(z))?;
        Ok(fmath::powf(v, 1.0 / p))
    }

    fn check_p(p: f64) -> Result<()> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain {
                what: "kernel norm exponent",
                value: p,
            });
        }
        Ok(())
    }

    /// `‖K_w‖_{A^p_u}` by quadrature.
    pub fn kernel_norm_value(&self, w: DiscPoint, p: f64) -> Result<f64> {
        Self::check_p(p)?;
        let section = self.kernel_section(w.to_complex());
        let u = &self.weight;
        let q = self.power_rule(w, p, u.boundary_exponent(), u.is_jacobi_exact(), u.is_radial())?;
        self.norm_on(&q, &section, p)
    }

    /// `‖K_w‖_{A^p_u}` plus its sensitivity to cutting the domain at `R_max`.
    pub fn kernel_norm(&self, w: DiscPoint, p: f64) -> Result<KernelNorm> {
        let value = self.kernel_norm_value(w, p)?;
        let section = self.kernel_section(w.to_complex());
        let n = self.degree;
        let cut = full_disc(DEFAULT_R_MAX, n + 32, 4 * n + 64, 0.0)?;
        let truncated = self.norm_on(&cut, &section, p)?;
        let truncation_delta = fmath::abs(value - truncated) / value;
        Ok(KernelNorm {
            value,
            truncation_delta,
            flagged: truncation_delta > TRUNCATION_FLAG,
        })
    }

    pub fn normalized_kernel(&self, w: DiscPoint, t: f64) -> Result<NormalizedKernel> {
        let norm_value = self.kernel_norm_value(w, t)?;
        Ok(NormalizedKernel {
            at: w,
            exponent: t,
            norm_value,
            section: self.kernel_section(w.to_complex()),
        })
    }

    /// `|⟨f, K_w⟩ − f(w)|` for a polynomial `f` of degree `≤ N`.
    pub fn reproducing_check(&self, f: &[Complex], w: DiscPoint) -> Result<f64> {
        ReproducingProbe::new(self)?.check(f, w)
    }
}

/// Inner products against the model computed from an independently
/// integrated moment matrix, for repeated reproducing-property checks.
pub struct ReproducingProbe<'a> {
    model: &'a KernelModel,
    moments: Moments,
}

impl<'a> ReproducingProbe<'a> {
    pub fn new(model: &'a KernelModel) -> Result<Self> {
        let u = &model.weight;
        let radial = u.is_radial();
        let (n_r, n_a) = product_rule_sizes(model.degree, u.is_jacobi_exact(), radial);
        let rule = full_disc(1.0, n_r + 11, if radial { 1 } else { n_a + 29 }, u.boundary_exponent())?;
        let moments = moments(&rule, &|z| u.evaluate(z), model.degree, radial)?;
        Ok(ReproducingProbe { model, moments })
    }

    /// `⟨f, g⟩_{A²(u)}` for monomial coefficient vectors.
    pub fn inner(&self, f: &[Complex], g: &[Complex]) -> Complex {
        match &self.moments {
            Moments::Diagonal(d) => f.iter().zip(g).zip(d).map(|((a, b), m)| a * b.conj() * *m).sum(),
            Moments::Full(p) => {
                let mut s = Complex::new(0.0, 0.0);
                for (j, a) in f.iter().enumerate() {
                    for (k, b) in g.iter().enumerate() {
                        s += a * b.conj() * p[(j, k)];
                    }
                }
                s
            }
        }
    }

    pub fn check(&self, f: &[Complex], w: DiscPoint) -> Result<f64> {
        if f.len() > self.model.degree + 1 {
            return Err(Error::Domain {
                what: "polynomial degree above model degree",
                value: (f.len() - 1) as f64,
            });
        }
        let section = self.model.kernel_section(w.to_complex());
        Ok((self.inner(f, &section) - horner(f, w.to_complex())).norm())
    }
}

/// Pseudohyperbolic radii at which the near-diagonal kernel bound is sampled.
pub const NEAR_DIAGONAL_DELTAS: [f64; 3] = [0.05, 0.1, 0.2];

/// Diagonal estimate, near-diagonal lower bound and kernel-norm
/// comparabilities over `points`.
///
/// (a) `K(z,z)·u(Δ(z,r))`; (b) `|K(z,w)|²/(K(z,z)K(w,w))` for `d(z,w) < δ`;
/// (c) for each `p`, `‖K_w‖_{A^p_u}` against `u(Δ(w,r))^{1/p}/(1−|w|)²` and
/// against `u(Δ(w,r))^{1/p−1}`.
pub fn kernel_estimate_report(m: &KernelModel, r: f64, points: &[DiscPoint], p_values: &[f64]) -> Result<CriterionReport> {
    let u = m.weight();
    let mut report = CriterionReport::new("kernel_estimates").param("r", r).param("degree", m.degree() as f64);
    let masses: Vec<f64> = points
        .iter()
        .map(|&z| weights::disk_mass(u, z, r))
        .collect::<Result<_>>()?;

    let mut diag = CriterionReport::new("diagonal");
    for (&z, &mass) in points.iter().zip(&masses) {
        diag.per_point.push(PointValue::new(z, m.kernel_diag(z) * mass));
    }
    diag.bands.push(Band::of("K(z,z)u(D(z,r))", diag.per_point.iter().map(|p| p.value)));
    diag.set_index_from_points();
    diag.verdict = Verdict::Finite;
    report.sub_reports.push(diag);

    for &delta in &NEAR_DIAGONAL_DELTAS {
        let mut near = CriterionReport::new("near_diagonal").param("delta", delta);
        let mut vals = Vec::new();
        for &z in points {
            let kzz = m.kernel_diag(z);
            for k in 0..4 {
                let zeta = Complex::from_polar(0.99 * delta, fmath::PI * 0.5 * k as f64 + 0.3);
                let w = DiscPoint::clamped(involution(z, zeta));
                let kw = m.kernel_eval(z, w).norm_sqr() / (kzz * m.kernel_diag(w));
                vals.push(kw);
            }
        }
        near.bands.push(Band::of("|k_w(z)|^2/K(z,z)", vals.iter().copied()));
        near.index_value = vals.iter().copied().fold(f64::INFINITY, f64::min);
        near.verdict = if near.index_value > 0.0 { Verdict::Finite } else { Verdict::Inconclusive };
        report.sub_reports.push(near);
    }

    for &p in p_values {
        let mut sub = CriterionReport::new("kernel_norm").param("p", p);
        let mut printed = Vec::with_capacity(points.len());
        let mut consistent = Vec::with_capacity(points.len());
        for (&w, &mass) in points.iter().zip(&masses) {
            let norm = m.kernel_norm_value(w, p)?;
            let one_minus = 1.0 - w.abs();
            printed.push(norm / (fmath::powf(mass, 1.0 / p) / (one_minus * one_minus)));
            consistent.push(norm / fmath::powf(mass, 1.0 / p - 1.0));
            sub.per_point.push(PointValue::new(w, norm));
        }
        sub.bands.push(Band::of("printed", printed));
        sub.bands.push(Band::of("consistent", consistent));
        sub.set_index_from_points();
        sub.verdict = Verdict::Finite;
        report.sub_reports.push(sub);
    }
    let spread = report.sub_reports[0].bands[0].spread();
    report.index_value = spread;
    report.verdict = if spread.is_finite() { Verdict::Finite } else { Verdict::Inconclusive };
    Ok(report)
}

/// Per-ring maxima of `|g(w)|·‖K_w‖_{A^s_u}/‖K_w‖²_{A²_u}` along the ladder.
pub fn weak_decay_trend(m: &KernelModel, g: &[Complex], s: f64, ladder: &BoundaryLadder) -> Result<CriterionReport> {
    let mut report = CriterionReport::new("weak_decay").param("s", s);
    let mut values = Vec::new();
    for w in ladder.points() {
        let norm = m.kernel_norm_value(w, s)?;
        let v = horner(g, w.to_complex()).norm() * norm / m.kernel_diag(w);
        values.push(v);
        report.per_point.push(PointValue::new(w, v));
    }
    report.ring_trend = ladder
        .ring_maxima(&values)
        .into_iter()
        .map(|(radius, value)| RingValue { radius, value })
        .collect();
    report.index_value = report.ring_trend.last().map(|r| r.value).unwrap_or(f64::NAN);
    report.verdict = classify_ring_trend(&report.ring_trend);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_ladder, build_lattice};
    use core::f64::consts::PI;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: f64, y: f64) -> DiscPoint {
        DiscPoint::new(x, y).unwrap()
    }

    fn classical(z: DiscPoint, w: DiscPoint) -> Complex {
        let d = Complex::new(1.0, 0.0) - w.to_complex().conj() * z.to_complex();
        Complex::new(1.0 / PI, 0.0) / (d * d)
    }

    #[test]
    fn constant_weight_basis() {
        let m = build_kernel_model(&Weight::constant(), 30).unwrap();
        let c = m.diagonal_coefficients().unwrap();
        for (n, cn) in c.iter().enumerate() {
            assert!((cn - ((n as f64 + 1.0) / PI).sqrt()).abs() < 1e-12 * cn);
        }
        assert!(m.gram_residual() <= 1e-8);
    }

    #[test]
    fn standard_weight_gram_diagonal() {
        let m = build_kernel_model(&Weight::standard(1.0).unwrap(), 40).unwrap();
        for (n, cn) in m.diagonal_coefficients().unwrap().iter().enumerate() {
            let g = PI / ((n as f64 + 1.0) * (n as f64 + 2.0));
            assert!((1.0 / (cn * cn) - g).abs() < 1e-12 * g, "n={n}");
        }
        assert!((m.kernel_eval(DiscPoint::ORIGIN, DiscPoint::ORIGIN).re - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn classical_kernel_values() {
        let m = build_kernel_model(&Weight::constant(), 200).unwrap();
        assert!((m.kernel_eval(DiscPoint::ORIGIN, DiscPoint::ORIGIN).re - 1.0 / PI).abs() < 1e-14);
        let h = pt(0.5, 0.0);
        assert!((m.kernel_eval(h, h).re - 0.565_884).abs() < 1e-6);
        let (z, w) = (pt(0.3, -0.6), pt(-0.5, 0.2));
        assert!((m.kernel_eval(z, w) - classical(z, w)).norm() < 1e-12 * classical(z, w).norm());
    }

    #[test]
    fn kernel_diag_is_increasing_in_degree() {
        let m = build_kernel_model(&Weight::standard(0.5).unwrap(), 60).unwrap();
        let z = Complex::new(0.8, 0.1);
        let v: Vec<f64> = (0..=60).map(|k| m.kernel_diag_truncated_complex(z, k)).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn non_radial_model_is_orthonormal() {
        let rough = build_kernel_model(&Weight::power_one_minus_z(0.5).unwrap(), 24).unwrap();
        assert!(rough.gram_residual() <= 1e-8);
        assert!(rough.resolution_delta() < 1e-3, "{}", rough.resolution_delta());
        // |1 − z|² is a polynomial, so the moments are exact.
        let u = Weight::power_one_minus_z(2.0).unwrap();
        let m = build_kernel_model(&u, 24).unwrap();
        assert!(!m.is_diagonal());
        assert!(m.gram_residual() <= 1e-8, "{}", m.gram_residual());
        assert!(m.resolution_delta() < 1e-8, "{}", m.resolution_delta());
        // Independent oracle: Gram of the basis on a fine polar grid in s.
        let q = full_disc(1.0, 120, 400, 0.0).unwrap();
        for (a, b) in [(0usize, 0usize), (3, 5), (10, 10), (24, 7)] {
            let v = q
                .integrate(|z| {
                    let e = m.basis_values(z);
                    e[a] * e[b].conj() * u.evaluate(z)
                })
                .unwrap();
            let target = if a == b { 1.0 } else { 0.0 };
            assert!((v - Complex::new(target, 0.0)).norm() < 1e-9, "({a},{b}): {v}");
        }
    }

    #[test]
    fn hermitian_and_psd_kernel_matrix() {
        let m = build_kernel_model(&Weight::power_one_minus_z(-0.5).unwrap(), 16).unwrap();
        let pts = [pt(0.1, 0.2), pt(-0.5, 0.3), pt(0.7, -0.1), pt(0.0, -0.9)];
        let k = CMatrix::from_fn(4, 4, |i, j| m.kernel_eval(pts[i], pts[j]));
        assert!(k.hermitian_defect() < 1e-10 * k.max_diagonal());
        let ev = crate::linalg::hermitian_eigenvalues(&k).unwrap();
        assert!(ev[3] > -1e-10 * ev[0]);
    }

    #[test]
    fn kernel_norm_examples() {
        let m = build_kernel_model(&Weight::constant(), 40).unwrap();
        let n2 = m.kernel_norm(DiscPoint::ORIGIN, 2.0).unwrap();
        assert!((n2.value - 1.0 / PI.sqrt()).abs() < 1e-12);
        let n4 = m.kernel_norm_value(DiscPoint::ORIGIN, 4.0).unwrap();
        assert!((n4 - PI.powf(-0.75)).abs() < 1e-12);
        for u in [Weight::constant(), Weight::standard(1.0).unwrap()] {
            let m = build_kernel_model(&u, 60).unwrap();
            for w in [pt(0.3, 0.2), pt(-0.6, 0.5)] {
                let n = m.kernel_norm_value(w, 2.0).unwrap();
                assert!((n - m.kernel_diag(w).sqrt()).abs() < 1e-9 * n);
                // The recentred path agrees at p = 2 too.
                let q = m.power_rule(w, 2.1, u.boundary_exponent(), true, true).unwrap();
                let section = m.kernel_section(w.to_complex());
                let v = m.norm_on(&q, &section, 2.0).unwrap();
                assert!((v - n).abs() < 1e-6 * n, "{v} vs {n}");
            }
        }
    }

    #[test]
    fn normalized_kernel_examples() {
        let m = build_kernel_model(&Weight::constant(), 30).unwrap();
        let k = m.normalized_kernel(DiscPoint::ORIGIN, 2.0).unwrap();
        assert!((k.eval(pt(0.4, 0.3)).re - 1.0 / PI.sqrt()).abs() < 1e-12);
        let w = pt(0.5, 0.5);
        let k = m.normalized_kernel(w, 2.0).unwrap();
        let q = full_disc(1.0, 40, 100, 0.0).unwrap();
        let total = q.integrate_real(|z| (horner(&m.kernel_section(w.to_complex()), z) / k.norm_value).norm_sqr()).unwrap();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reproducing_examples() {
        let m = build_kernel_model(&Weight::constant(), 50).unwrap();
        let one = [Complex::new(1.0, 0.0)];
        for w in [DiscPoint::ORIGIN, pt(0.7, -0.6)] {
            assert!(m.reproducing_check(&one, w).unwrap() < 1e-8);
        }
        let f = [Complex::new(0.0, 0.0), Complex::new(2.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
        assert!(m.reproducing_check(&f, pt(0.3, 0.0)).unwrap() <= 1e-7);
        let mut zn = vec![Complex::new(0.0, 0.0); 51];
        zn[50] = Complex::new(1.0, 0.0);
        for u in [Weight::constant(), Weight::standard(1.0).unwrap(), Weight::power_one_minus_z(2.0).unwrap()] {
            let m = build_kernel_model(&u, 50).unwrap();
            assert!(m.reproducing_check(&zn, pt(0.85, 0.1)).unwrap() <= 1e-6);
        }
        assert!(m.reproducing_check(&vec![Complex::new(1.0, 0.0); 52], DiscPoint::ORIGIN).is_err());
    }

    #[test]
    fn convergence_to_classical_diagonal() {
        let m = build_kernel_model(&Weight::constant(), 200).unwrap();
        for k in 0..=14 {
            let z = DiscPoint::from_polar(0.05 * k as f64, 0.37 * k as f64).unwrap();
            let exact = 1.0 / (PI * (1.0 - z.norm_sqr()).powi(2));
            assert!((m.kernel_diag(z) - exact).abs() < 1e-6 * exact);
        }
        assert!(m.convergence_at(DiscPoint::real(0.9).unwrap()) < 1e-6);
        let rr = m.resolved_radius(1e-6);
        assert!(rr > 0.9 && rr < 0.99, "{rr}");
    }

    #[test]
    fn basis_round_trip() {
        let u = Weight::power_one_minus_z(0.3).unwrap();
        let m = build_kernel_model(&u, 12).unwrap();
        let f: Vec<Complex> = (0..8).map(|k| Complex::new(k as f64 - 3.0, 0.5 * k as f64)).collect();
        let c = m.to_basis(&f).unwrap();
        let z = Complex::new(0.3, -0.7);
        assert!((m.eval_in_basis(&c, z) - horner(&f, z)).norm() < 1e-10);
    }

    #[test]
    fn kernel_estimates_for_constant_weight() {
        let m = build_kernel_model(&Weight::constant(), 120).unwrap();
        let lat = build_lattice(0.5, 0.85).unwrap();
        let rep = kernel_estimate_report(&m, 0.5, &lat.points, &[4.0]).unwrap();
        let band = &rep.sub("diagonal").unwrap().bands[0];
        // K(z,z)·|Δ(z,r)| = r²/(1 − r²|z|²)² with the 1/π in K.
        let (lo, hi) = (0.25, 0.25 / (0.75f64 * 0.75));
        assert!(band.lo >= lo * (1.0 - 1e-6) && band.hi <= hi * (1.0 + 1e-6), "{band:?}");
        for near in rep.sub_reports.iter().filter(|s| s.name == "near_diagonal") {
            assert!(near.index_value > 0.5);
        }
        let norms = rep.sub("kernel_norm").unwrap();
        assert!(norms.band("printed").unwrap().spread() < 10.0);
        assert!(norms.band("consistent").unwrap().spread() < 10.0);
    }

    #[test]
    fn weak_decay_along_ladder() {
        let ladder = boundary_ladder(5, 4).unwrap();
        let g = [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        for u in [Weight::constant(), Weight::standard(1.0).unwrap()] {
            let m = build_kernel_model(&u, 80).unwrap();
            let rep = weak_decay_trend(&m, &g, 2.0, &ladder).unwrap();
            assert!(rep.ring_trend.windows(2).all(|w| w[1].value < w[0].value), "{:?}", rep.ring_trend);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn hermitian_symmetry(a in -0.9f64..0.9, b in -0.9f64..0.9, c in -0.9f64..0.9, d in -0.9f64..0.9) {
            let m = build_kernel_model(&Weight::standard(0.3).unwrap(), 20).unwrap();
            let z = DiscPoint::clamped(Complex::new(a, b) * 0.7);
            let w = DiscPoint::clamped(Complex::new(c, d) * 0.7);
            let kzw = m.kernel_eval(z, w);
            let kwz = m.kernel_eval(w, z);
            prop_assert!((kzw - kwz.conj()).norm() < 1e-12 * kzw.norm().max(1.0));
            prop_assert!(m.kernel_eval(z, z).im.abs() < 1e-12);
        }
    }

    #[test]
    fn random_reproducing_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = build_kernel_model(&Weight::standard(1.0).unwrap(), 60).unwrap();
        let probe = ReproducingProbe::new(&m).unwrap();
        for _ in 0..10 {
            let deg = rng.gen_range(0..=60);
            let f: Vec<Complex> = (0..=deg).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let w = DiscPoint::clamped(Complex::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(-PI..PI)));
            assert!(probe.check(&f, w).unwrap() < 1e-7);
        }
    }
}
