//! Small dense complex linear algebra: Cholesky, triangular inversion and
//! Hermitian eigenvalues via Householder tridiagonalization plus implicit QL.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut};

use crate::fmath;
use crate::{Complex, Error, Result};

/// Pairwise sum of `f(lo..hi)` with a fixed split order.
pub fn pairwise<T, F>(lo: usize, hi: usize, zero: T, f: &F) -> T
where
    T: Copy + Add<Output = T>,
    F: Fn(usize) -> T,
{
    const BLOCK: usize = 16;
    if hi - lo <= BLOCK {
        let mut acc = zero;
        for i in lo..hi {
            acc = acc + f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise(lo, mid, zero, f) + pairwise(mid, hi, zero, f)
    }
}

/// Pairwise sum of a slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise(0, values.len(), 0.0, &|i| values[i])
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `v* A v` for Hermitian `A`, returned as a real number.
    pub fn quadratic_form(&self, v: &[Complex]) -> f64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i.min(self.cols - 1) {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry modulus of `A − I`.
    pub fn distance_to_identity(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self[(i, j)] - Complex::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.rows.min(self.cols)).fold(0.0f64, |acc, i| acc.max(self[(i, i)].re))
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

/// Cholesky factor `L` (lower, real positive diagonal) with `A = L L*`.
///
/// A pivot below `rel_threshold` times the largest diagonal entry of `A` is
/// reported as degeneracy.
pub fn cholesky(a: &CMatrix, rel_threshold: f64) -> Result<CMatrix> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "cholesky needs a square matrix");
    let scale = a.max_diagonal();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > rel_threshold * scale) {
            return Err(Error::Degenerate {
                detail: format!(
                    "pivot {j} is {d:e} against diagonal scale {scale:e}; lower the degree or raise the quadrature resolution"
                ),
            });
        }
        let ljj = fmath::sqrt(d);
        l[(j, j)] = Complex::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_inverse(l: &CMatrix) -> CMatrix {
    let n = l.rows();
    let mut inv = CMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = Complex::new(1.0, 0.0) / l[(j, j)];
        for i in j + 1..n {
            let mut s = Complex::new(0.0, 0.0);
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and is overwritten by the eigenvalues (unsorted).
/// `e[i]` couples `i` and `i+1`; `e` has the same length as `d` and its last
/// entry is ignored. When `first_row` is given it must start as the first row
/// of the identity and ends as the first components of the eigenvectors.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut first_row: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    assert_eq!(e.len(), n, "off-diagonal length must match");
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = fmath::abs(d[m]) + fmath::abs(d[m + 1]);
                if fmath::abs(e[m]) + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    detail: format!("tridiagonal QL stalled at index {l}"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = fmath::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = fmath::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = first_row.as_deref_mut() {
                    let fz = z[i + 1];
                    z[i + 1] = s * z[i] + c * fz;
                    z[i] = c * z[i] - s * fz;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "eigenvalues need a square matrix");
    let mut m = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![Complex::new(0.0, 0.0); n];
    let mut p = vec![Complex::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        d[k] = m[(k, k)].re;
        let xnorm = fmath::sqrt((k + 1..n).map(|i| m[(i, k)].norm_sqr()).sum::<f64>());
        if xnorm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = m[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for i in k + 1..n {
            v[i] = m[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = fmath::sqrt((k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>());
        if vnorm == 0.0 {
            e[k] = alpha.norm();
            continue;
        }
        for i in k + 1..n {
            v[i] /= vnorm;
        }
        // p = B v on the trailing block, then B ← B − 2 v w* − 2 w v* with w = p − (v*p) v.
        for i in k + 1..n {
            let mut s = Complex::new(0.0, 0.0);
            for j in k + 1..n {
                s += m[(i, j)] * v[j];
            }
            p[i] = s;
        }
        let kappa: Complex = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        for i in k + 1..n {
            p[i] -= kappa * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                m[(i, j)] -= upd * 2.0;
            }
        }
        // The reflected column is alpha·e₁.
        e[k] = alpha.norm();
    }
    if n >= 2 {
        d[n - 2] = m[(n - 2, n - 2)].re;
        e[n - 2] = m[(n - 1, n - 2)].norm();
    }
    d[n - 1] = m[(n - 1, n - 1)].re;
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(d)
}
