//! Monodromy of `E^m_β` around `w = 0`: exact eigenvalue prediction from the
//! Fuchsian residue at infinity and a numerical contour integration check.
//!
//! Since `0` and `∞` are the only singular points and `λ₁ + λ₂ = m − 1` is
//! an integer, the eigenvalue set `{e^{2πiλ₁}, e^{2πiλ₂}}` does not depend
//! on the orientation of the loop, so numeric and exact eigenvalues are
//! compared as sets.

pub mod dopri;

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::report::{complex_json, real_json};
use crate::series::rat;

/// Roots of `λ² − (m−1)λ − β`, the eigenvalues of the residue matrix
/// `[[0, −1], [−β, m−1]]` at infinity, kept as `((m−1) ± √D)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueEigenvalues {
    pub sum: BigRational,
    pub product: BigRational,
    pub discriminant: BigRational,
    /// Both roots, larger first, when `D` is the square of a rational.
    pub rational: Option<[BigRational; 2]>,
}

impl ResidueEigenvalues {
    pub fn new(m: i64, beta: &BigRational) -> Self {
        let sum = rat(m - 1, 1);
        let product = -beta.clone();
        let discriminant = &sum * &sum + beta * BigRational::from_integer(4.into());
        let rational = rational_sqrt(&discriminant).map(|s| {
            let two = BigRational::from_integer(2.into());
            [(&sum + &s) / &two, (&sum - &s) / &two]
        });
        ResidueEigenvalues {
            sum,
            product,
            discriminant,
            rational,
        }
    }

    /// Both roots are integers.
    pub fn integral(&self) -> bool {
        self.rational
            .as_ref()
            .is_some_and(|r| r.iter().all(BigRational::is_integer))
    }

    /// Floating approximations of the roots, larger (or `+√`) first.
    pub fn approx(&self) -> [Complex64; 2] {
        let half_sum = self.sum.to_f64().unwrap_or(f64::NAN) / 2.0;
        let d = self.discriminant.to_f64().unwrap_or(f64::NAN);
        let root = if d >= 0.0 {
            Complex64::new(d.sqrt() / 2.0, 0.0)
        } else {
            Complex64::new(0.0, (-d).sqrt() / 2.0)
        };
        [
            Complex64::new(half_sum, 0.0) + root,
            Complex64::new(half_sum, 0.0) - root,
        ]
    }

    /// The roots as text: exact rationals, or `(s ± sqrt(D))/2`.
    pub fn display(&self) -> [String; 2] {
        match &self.rational {
            Some([a, b]) => [a.to_string(), b.to_string()],
            None => {
                let (s, d) = (&self.sum, &self.discriminant);
                [format!("({s}+sqrt({d}))/2"), format!("({s}-sqrt({d}))/2")]
            }
        }
    }
}

/// `√q` if `q ≥ 0` is the square of a rational.
fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let exact = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(BigRational::new(exact(q.numer())?, exact(q.denom())?))
}

/// Result of integrating the fundamental matrix once around `|w| = r`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericMonodromy {
    pub radius: f64,
    pub tol: f64,
    /// `Y(2π)` for `Y(0) = I`, columns are solutions `(z, z')`.
    pub matrix: [[Complex64; 2]; 2],
    pub eigenvalues: [Complex64; 2],
    /// Largest distance in a greedy set-wise matching against the prediction.
    pub deviation: f64,
    pub det: Complex64,
    /// `exp(∮ trace)`, which equals `det` by Liouville's formula.
    pub liouville: Complex64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyReport {
    pub m: i64,
    pub beta: BigRational,
    pub residue: ResidueEigenvalues,
    /// `e^{2πiλ_j}`.
    pub predicted: [Complex64; 2],
    pub trivial: bool,
    pub numeric: Option<NumericMonodromy>,
}

/// Exact part of the monodromy report for `E^m_β`.
pub fn residue_analysis(m: i64, beta: &BigRational) -> Result<MonodromyReport> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "monodromy analysis needs m >= 2, got {m}"
        )));
    }
    let residue = ResidueEigenvalues::new(m, beta);
    let lambda = residue.approx();
    let predicted = lambda.map(|l| (Complex64::new(0.0, 2.0 * PI) * l).exp());
    Ok(MonodromyReport {
        m,
        beta: beta.clone(),
        trivial: residue.integral(),
        residue,
        predicted,
        numeric: None,
    })
}

/// Exact and numeric monodromy of `E^m_β` on the circle of the given radius.
pub fn numeric_monodromy(m: i64, beta: &BigRational, radius: f64, tol: f64) -> Result<MonodromyReport> {
    let mut report = residue_analysis(m, beta)?;
    // P = 2i − m w^{m−1}, Q = β w^{2m−2}
    let mut p = vec![Complex64::new(0.0, 0.0); m as usize];
    p[0] += Complex64::new(0.0, 2.0);
    p[m as usize - 1] -= Complex64::new(m as f64, 0.0);
    let mut q = vec![Complex64::new(0.0, 0.0); 2 * m as usize - 1];
    q[2 * m as usize - 2] = Complex64::new(beta.to_f64().unwrap_or(f64::NAN), 0.0);
    let numeric = contour_monodromy(m, &p, &q, radius, tol, &report.predicted)?;
    report.numeric = Some(numeric);
    Ok(report)
}

/// Integrates `z'' = (P/w^m) z' + (Q/w^{2m}) z` for polynomial `P`, `Q`
/// along `w = r e^{iθ}`, `θ ∈ [0, 2π]`, and compares the eigenvalues of
/// the monodromy matrix with `expected`.
pub fn contour_monodromy(
    m: i64,
    p: &[Complex64],
    q: &[Complex64],
    radius: f64,
    tol: f64,
    expected: &[Complex64; 2],
) -> Result<NumericMonodromy> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if radius < 0.1 {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} is below 0.1; the irregular singularity makes the system too stiff"
        )));
    }
    let eval = |c: &[Complex64], w: Complex64, shift: i32| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            acc = acc * w + a;
        }
        acc * w.powi(-shift)
    };
    let m32 = m as i32;
    let rhs = |theta: f64, y: &[Complex64; 5]| -> [Complex64; 5] {
        let w = Complex64::from_polar(radius, theta);
        let dw = Complex64::new(0.0, 1.0) * w;
        let alpha = eval(p, w, m32);
        let gamma = eval(q, w, 2 * m32);
        // Y = [[y0, y1], [y2, y3]], Y' = [[0, 1], [γ, α]] Y
        [
            dw * y[2],
            dw * y[3],
            dw * (gamma * y[0] + alpha * y[2]),
            dw * (gamma * y[1] + alpha * y[3]),
            dw * alpha,
        ]
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (y, stats) = dopri::integrate(rhs, 0.0, 2.0 * PI, [one, zero, zero, one, zero], tol)?;
    let matrix = [[y[0], y[1]], [y[2], y[3]]];
    let det = y[0] * y[3] - y[1] * y[2];
    let eigenvalues = eigenvalues_2x2(&matrix);
    Ok(NumericMonodromy {
        radius,
        tol,
        matrix,
        eigenvalues,
        deviation: set_deviation(&eigenvalues, expected),
        det,
        liouville: y[4].exp(),
        steps: stats.accepted + stats.rejected,
    })
}

fn eigenvalues_2x2(a: &[[Complex64; 2]; 2]) -> [Complex64; 2] {
    let half_trace = (a[0][0] + a[1][1]) / 2.0;
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let root = (half_trace * half_trace - det).sqrt();
    [half_trace + root, half_trace - root]
}

/// Greedy matching: each expected value takes the nearest unused computed
/// value; returns the largest matched distance.
pub fn set_deviation(computed: &[Complex64], expected: &[Complex64]) -> f64 {
    let mut used = vec![false; computed.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let best = computed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, (c - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

impl MonodromyReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "m": self.m,
            "beta": self.beta.to_string(),
            "residue_eigenvalues": self.residue.display(),
            "discriminant": self.residue.discriminant.to_string(),
            "predicted_eigenvalues": self.predicted.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            "trivial": self.trivial,
        });
        if let Some(n) = &self.numeric {
            v["numeric"] = n.to_json();
        }
        v
    }
}

impl NumericMonodromy {
    pub fn to_json(&self) -> Value {
        let row = |r: &[Complex64; 2]| r.iter().map(|z| complex_json(*z)).collect::<Vec<_>>();
        json!({
            "radius": real_json(self.radius),
            "tol": real_json(self.tol),
            "matrix": [row(&self.matrix[0]), row(&self.matrix[1])],
            "eigenvalues": self.eigenvalues.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            "deviation": real_json(self.deviation),
            "det": complex_json(self.det),
            "liouville": complex_json(self.liouville),
            "steps": self.steps,
        })
    }
}
