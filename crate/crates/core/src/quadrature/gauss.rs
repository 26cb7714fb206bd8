use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::linalg::tridiagonal_ql;
use crate::{Error, Result};

/// One-dimensional Gauss rule: `∫ f w ≈ Σ weights[i] f(nodes[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Jacobi rule on `[−1, 1]` for the weight `(1 − x)^α (1 + x)^β`,
/// by Golub–Welsch on the monic Jacobi recurrence.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::Domain {
            what: "Gauss rule size",
            value: 0.0,
        });
    }
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::Domain {
            what: "Jacobi exponent",
            value: if alpha > -1.0 { beta } else { alpha },
        });
    }
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    diag[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let two = 2.0 * kf + ab;
        diag[k] = (beta * beta - alpha * alpha) / (two * (two + 2.0));
        let b = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (two * two * (two + 1.0) * (two - 1.0))
        };
        off[k - 1] = fmath::sqrt(b);
    }
    let mu0 = fmath::exp(
        (ab + 1.0) * core::f64::consts::LN_2 + fmath::lgamma(alpha + 1.0) + fmath::lgamma(beta + 1.0)
            - fmath::lgamma(ab + 2.0),
    );
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, Some(&mut first)).map_err(|_| Error::NoConvergence {
        detail: format!("Gauss–Jacobi rule n={n}, alpha={alpha}, beta={beta}"),
    })?;
    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(first.iter().map(|v| mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

impl GaussRule {
    /// Affine image of a Legendre rule on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let h = 0.5 * (b - a);
        GaussRule {
            nodes: self.nodes.iter().map(|x| a + h * (x + 1.0)).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Rule on `[0, 1]` for `∫ g(s) ds` tuned to integrands `g(s) = (1 − s)^e · smooth`.
///
/// The Gauss–Jacobi weights are divided back by `(1 − s)^e`, so the rule
/// integrates plain `ds` and is exact on `(1 − s)^e` times polynomials of
/// degree `< 2n`.
pub fn endpoint_rule(n: usize, e: f64) -> Result<GaussRule> {
    if e == 0.0 {
        return Ok(gauss_legendre(n)?.mapped(0.0, 1.0));
    }
    let g = gauss_jacobi(n, e, 0.0)?;
    let scale = fmath::powf(0.5, e + 1.0);
    let nodes: Vec<f64> = g.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let weights = g
        .weights
        .iter()
        .zip(&nodes)
        .map(|(w, s)| w * scale / fmath::powf(1.0 - s, e))
        .collect();
    Ok(GaussRule { nodes, weights })
}
