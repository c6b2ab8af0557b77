use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `E(d) = c₁/d + c₂/d² + c₃/d³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `‖E − fit‖₂` over the samples.
    pub residual: f64,
    /// `residual / ‖E‖₂`.
    pub relative_residual: f64,
    /// 1-norm condition number of the scaled normal matrix.
    pub condition: f64,
}

impl DecayFit {
    pub fn eval(&self, d: f64) -> f64 {
        self.c1 / d + self.c2 / (d * d) + self.c3 / (d * d * d)
    }
}

/// Least-squares fit of `Σ_k c_k / d^{p_k}` for a list of powers `p_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    pub powers: Vec<i32>,
    pub coeffs: Vec<f64>,
    pub residual: f64,
    pub relative_residual: f64,
    /// 1-norm condition number of the scaled normal matrix.
    pub condition: f64,
}

impl PowerFit {
    pub fn eval(&self, d: f64) -> f64 {
        self.powers.iter().zip(&self.coeffs).map(|(&p, c)| c * d.powi(-p)).sum()
    }

    /// Coefficient of `1/d^p`, if `p` is in the basis.
    pub fn coeff(&self, p: i32) -> Option<f64> {
        self.powers.iter().position(|&q| q == p).map(|i| self.coeffs[i])
    }
}

/// Fits `(d, E)` samples on the scaled basis `(d_min/d)^p` through the normal
/// equations. Needs more distinct `d` than basis functions, spanning a
/// factor of four.
pub fn fit_powers(samples: &[(f64, f64)], powers: &[i32]) -> Result<PowerFit> {
    let n = powers.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty fit basis".into()));
    }
    let mut ds: Vec<f64> = samples.iter().map(|s| s.0).collect();
    if ds.iter().any(|d| !(*d > 0.0) || !d.is_finite()) || samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::InvalidArgument("fit samples must be finite with d > 0".into()));
    }
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    if ds.len() < n + 1 {
        return Err(Error::Degenerate(format!(
            "need {} distinct distances, got {}",
            n + 1,
            ds.len()
        )));
    }
    let (dmin, dmax) = (ds[0], ds[ds.len() - 1]);
    if dmax < 4.0 * dmin {
        return Err(Error::Degenerate(format!("distances span a factor {} < 4", dmax / dmin)));
    }
    let mut m = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for &(d, e) in samples {
        let x = dmin / d;
        let phi: Vec<f64> = powers.iter().map(|&p| x.powi(p)).collect();
        for i in 0..n {
            rhs[i] += phi[i] * e;
            for j in 0..n {
                m[i][j] += phi[i] * phi[j];
            }
        }
    }
    let l = cholesky(&m).ok_or_else(|| Error::Degenerate("normal matrix is not positive definite".into()))?;
    let b = chol_solve(&l, &rhs);
    let inv: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            chol_solve(&l, &e)
        })
        .collect();
    let norm1 = |a: &[Vec<f64>]| (0..n).map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>()).fold(0.0, f64::max);
    let condition = norm1(&m) * norm1(&inv);
    if !condition.is_finite() || condition > 1e14 {
        return Err(Error::Degenerate(format!("normal matrix condition {condition:e}")));
    }
    let coeffs: Vec<f64> = powers.iter().zip(&b).map(|(&p, bk)| bk * dmin.powi(p)).collect();
    let mut fit = PowerFit {
        powers: powers.to_vec(),
        coeffs,
        residual: 0.0,
        relative_residual: 0.0,
        condition,
    };
    let mut r2 = 0.0;
    let mut e2 = 0.0;
    for &(d, e) in samples {
        r2 += (e - fit.eval(d)).powi(2);
        e2 += e * e;
    }
    fit.residual = r2.sqrt();
    fit.relative_residual = if e2 > 0.0 { fit.residual / e2.sqrt() } else { fit.residual };
    Ok(fit)
}

/// Fits `E(d) = c₁/d + c₂/d² + c₃/d³`. Needs at least four distinct `d`
/// spanning a factor of four.
pub fn fit_decay(samples: &[(f64, f64)]) -> Result<DecayFit> {
    let f = fit_powers(samples, &[1, 2, 3])?;
    Ok(DecayFit {
        c1: f.coeffs[0],
        c2: f.coeffs[1],
        c3: f.coeffs[2],
        residual: f.residual,
        relative_residual: f.relative_residual,
        condition: f.condition,
    })
}

fn cholesky(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn chol_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}
