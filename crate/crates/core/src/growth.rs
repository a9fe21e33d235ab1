//! Divergence diagnostics for formal series: a heuristic Gevrey-order fit of
//! the coefficient growth and exact detection of terminating series.
//!
//! The fit is a diagnostic only. Truncated data cannot prove divergence;
//! a Gevrey order near 1 corroborates it.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::report::real_json;
use crate::scalar::Scalar;
use crate::series::Series1;

/// Number of trailing exact zeros required before a series counts as
/// terminated. Recursions of bounded depth stay zero after such a run.
pub const DEFAULT_TAIL: i64 = 8;

/// Whether a series is a polynomial up to its truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Every stored coefficient is zero.
    Zero,
    /// Last nonzero coefficient has this degree.
    At(i64),
    Open,
}

impl Termination {
    pub fn terminated(self) -> bool {
        !matches!(self, Termination::Open)
    }

    pub fn to_json(self) -> Value {
        match self {
            Termination::Zero => json!({ "terminated": true, "degree": "-inf" }),
            Termination::At(d) => json!({ "terminated": true, "degree": d }),
            Termination::Open => json!({ "terminated": false }),
        }
    }
}

/// Exact termination test: the coefficients above the last nonzero one
/// must include at least `tail` stored zeros.
pub fn termination_detect<S: Scalar>(s: &Series1<S>, tail: i64) -> Termination {
    match s.degree() {
        None => Termination::Zero,
        Some(d) if s.trunc() - d >= tail => Termination::At(d),
        Some(_) => Termination::Open,
    }
}

/// Result of fitting `log|c_k| ≈ s·k·log k + k·log A + C`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    /// Gevrey order `s`.
    pub gevrey: f64,
    /// Two-standard-error interval for `s`.
    pub interval: (f64, f64),
    pub log_a: f64,
    pub constant: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub window: (i64, i64),
    pub points: usize,
    /// `|c_k|^{−1/k}` at the last nonzero coefficient of the window.
    pub radius: f64,
    pub termination: Termination,
}

impl GrowthReport {
    pub fn to_json(&self) -> Value {
        json!({
            "heuristic": true,
            "gevrey": real_json(self.gevrey),
            "interval": [real_json(self.interval.0), real_json(self.interval.1)],
            "log_a": real_json(self.log_a),
            "constant": real_json(self.constant),
            "residual": real_json(self.residual),
            "window": [self.window.0, self.window.1],
            "points": self.points,
            "radius": real_json(self.radius),
            "termination": self.termination.to_json(),
        })
    }
}

/// Fits the Gevrey order on the nonzero coefficients with index in
/// `window` (clamped to what is stored). Terminated series report `s = 0`
/// and infinite radius without fitting.
pub fn gevrey_estimate<S: Scalar>(s: &Series1<S>, window: (i64, i64)) -> Result<GrowthReport> {
    let lo = window.0.max(s.low()).max(1);
    let hi = window.1.min(s.trunc());
    let termination = termination_detect(s, DEFAULT_TAIL);
    if termination.terminated() {
        return Ok(GrowthReport {
            gevrey: 0.0,
            interval: (0.0, 0.0),
            log_a: 0.0,
            constant: 0.0,
            residual: 0.0,
            window: (lo, hi),
            points: 0,
            radius: f64::INFINITY,
            termination,
        });
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter_map(|k| {
            let c = s.coeff(k);
            (!c.is_zero()).then(|| (k as f64, c.ln_abs()))
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "growth fit needs at least 4 nonzero coefficients in [{lo}, {hi}], found {}",
            pts.len()
        )));
    }
    let rows: Vec<[f64; 3]> = pts.iter().map(|&(k, _)| [k * k.ln(), k, 1.0]).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (beta, cov) = least_squares(&rows, &ys)?;
    let n = pts.len() as f64;
    let sse: f64 = rows
        .iter()
        .zip(&ys)
        .map(|(r, y)| (y - dot(r, &beta)).powi(2))
        .sum();
    let dof = (n - 3.0).max(1.0);
    let se = (sse / dof * cov[0][0]).max(0.0).sqrt();
    let (k_last, ln_last) = *pts.last().expect("at least 4 points");
    Ok(GrowthReport {
        gevrey: beta[0],
        interval: (beta[0] - 2.0 * se, beta[0] + 2.0 * se),
        log_a: beta[1],
        constant: beta[2],
        residual: (sse / n).sqrt(),
        window: (lo, hi),
        points: pts.len(),
        radius: (-ln_last / k_last).exp(),
        termination,
    })
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ordinary least squares with three regressors. Columns are scaled to unit
/// norm before solving the normal equations; returns the coefficients and
/// `(XᵀX)^{-1}` in the original scale.
fn least_squares(rows: &[[f64; 3]], ys: &[f64]) -> Result<([f64; 3], [[f64; 3]; 3])> {
    let mut scale = [0.0f64; 3];
    for r in rows {
        for j in 0..3 {
            scale[j] += r[j] * r[j];
        }
    }
    let scale = scale.map(|s| if s > 0.0 { 1.0 / s.sqrt() } else { 1.0 });
    let mut gram = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (r, y) in rows.iter().zip(ys) {
        for i in 0..3 {
            rhs[i] += r[i] * scale[i] * y;
            for j in 0..3 {
                gram[i][j] += r[i] * scale[i] * r[j] * scale[j];
            }
        }
    }
    let inv = invert3(&gram).ok_or(Error::Degenerate { op: "growth fit" })?;
    let mut beta = [0.0f64; 3];
    let mut cov = [[0.0f64; 3]; 3];
    for i in 0..3 {
        beta[i] = scale[i] * dot(&inv[i], &rhs);
        for j in 0..3 {
            cov[i][j] = scale[i] * inv[i][j] * scale[j];
        }
    }
    Ok((beta, cov))
}

fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
    };
    let det: f64 = (0..3).map(|j| a[0][j] * cof(0, j)).sum();
    if det.abs() < 1e-14 {
        return None;
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / det)))
}

#[cfg(test)]
mod tests;
