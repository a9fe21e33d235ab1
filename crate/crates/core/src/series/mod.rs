//! Truncated formal power and Laurent series over a [`Scalar`] field.

mod bivariate;
mod univariate;

pub use bivariate::{Mismatch2, Series2};
pub use univariate::{rat, Mismatch, Series1};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `Φ(u(η), η) = 0` for `u(0) = 0`, where `Φ` is given as a series in
/// `(u, η)` (the first variable plays the role of `u`). Coefficients are
/// fixed one η-degree at a time: `[η^n] Φ` is affine in `u_n` with slope
/// `∂Φ/∂u(0,0)`.
pub fn solve_implicit<S: Scalar>(phi: &Series2<S>) -> Result<Series1<S>> {
    if !phi.get(0, 0).is_zero() {
        return Err(Error::NonzeroConstant { op: "solve_implicit" });
    }
    let (nu, ny) = phi.rect();
    if nu == 0 {
        return Err(Error::TruncationStarved {
            op: "solve_implicit",
            needed: 1,
            have: 0,
        });
    }
    let slope_inv = phi
        .get(1, 0)
        .inverse()
        .ok_or(Error::Degenerate { op: "solve_implicit" })?;
    let n = nu.min(ny) as i64;
    let rows = phi.rows();
    let mut u: Vec<S> = vec![S::zero(); n as usize + 1];
    for deg in 1..=n {
        let cur = Series1::from_coeffs(u.clone(), deg);
        // [η^deg] Σ_j u^j row_j(η)
        let mut acc = S::zero();
        let mut pw = Series1::one(deg);
        for row in rows.iter() {
            let prod = pw.mul(&row.truncated(deg));
            if prod.trunc() >= deg {
                acc = acc.plus(&prod.coeff(deg));
            }
            pw = pw.mul(&cur).truncated(deg);
            if pw.is_zero() {
                break;
            }
        }
        u[deg as usize] = acc.times(&slope_inv).negated();
    }
    Ok(Series1::from_coeffs(u, n))
}

impl<S: Scalar> Series1<S> {
    /// `{"pole": p, "trunc": N, "coeffs": [c_{-p}, …, c_N]}`.
    pub fn to_json(&self) -> Value {
        let p = self.pole_order();
        let coeffs: Vec<Value> = self.coeffs_from(-p).iter().map(Scalar::to_json).collect();
        json!({ "pole": p, "trunc": self.trunc(), "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Parse(format!("series is missing `{name}`")))
        };
        let pole = field("pole")?
            .as_i64()
            .filter(|p| *p >= 0)
            .ok_or_else(|| Error::Parse("`pole` must be a nonnegative integer".into()))?;
        let trunc = field("trunc")?
            .as_i64()
            .ok_or_else(|| Error::Parse("`trunc` must be an integer".into()))?;
        let coeffs = field("coeffs")?
            .as_array()
            .ok_or_else(|| Error::Parse("`coeffs` must be an array".into()))?;
        if coeffs.len() as i64 != trunc + pole + 1 {
            return Err(Error::Parse(format!(
                "expected {} coefficients, found {}",
                trunc + pole + 1,
                coeffs.len()
            )));
        }
        let coeffs = coeffs.iter().map(S::from_json).collect::<Result<Vec<_>>>()?;
        Ok(Series1::new(-pole, coeffs, trunc))
    }
}

impl<S: Scalar> Series2<S> {
    /// `{"trunc": [Nx, Nη], "coeffs": [[row 0], [row 1], …]}`.
    pub fn to_json(&self) -> Value {
        let (nx, ny) = self.rect();
        let rows: Vec<Value> = (0..=nx)
            .map(|j| Value::Array((0..=ny).map(|k| self.get(j, k).to_json()).collect()))
            .collect();
        json!({ "trunc": [nx, ny], "coeffs": rows })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let t = v
            .get("trunc")
            .and_then(Value::as_array)
            .filter(|t| t.len() == 2)
            .ok_or_else(|| bad("`trunc` must be [Nx, Neta]"))?;
        let dim = |x: &Value| {
            x.as_u64()
                .map(|d| d as usize)
                .ok_or_else(|| bad("truncation orders must be nonnegative"))
        };
        let (nx, ny) = (dim(&t[0])?, dim(&t[1])?);
        let rows = v
            .get("coeffs")
            .and_then(Value::as_array)
            .filter(|r| r.len() == nx + 1)
            .ok_or_else(|| bad("`coeffs` must have Nx+1 rows"))?;
        let mut out = Series2::zero(nx, ny);
        for (j, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|r| r.len() == ny + 1)
                .ok_or_else(|| bad("each row must have Neta+1 entries"))?;
            for (k, c) in row.iter().enumerate() {
                out.set(j, k, S::from_json(c)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
