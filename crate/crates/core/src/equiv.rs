//! Formal fundamental solutions of the family `E^m_β`, the formal gauge
//! equivalence `(χ, τ)` to `E^m_0`, the coupled parameter map, and checks
//! that these maps carry one hypersurface to the other.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ode::{AdmissibleOde, GaugeMap};
use crate::scalar::Scalar;
use crate::segre::Hypersurface;
use crate::series::{rat, Series1, Series2};

/// The formal solutions `f` and `u` of `E^m_β` and of its companion
/// `u'' = (−2i/w^m − m/w) u' + (β/w²) u`, both normalized to constant
/// term 1. The second fundamental solution of `E^m_β` is
/// `w^{m−1} u(w) · w^{1−m} · exp(2i w^{1−m}/(1−m))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalSolutionPair<S: Scalar> {
    pub m: i64,
    pub beta: BigRational,
    pub f: Series1<S>,
    pub u: Series1<S>,
}

/// Runs `c(k+1) f_{k+1} = ((k−m+2)(k+1) − β) f_{k−m+2}` with `c = ±2i`.
fn recursion<S: Scalar>(m: i64, beta: &S, lead: &S, n: i64) -> Series1<S> {
    let mut f: Vec<S> = vec![S::one()];
    for k in 0..n {
        let j = k - m + 2;
        let next = if j < 0 {
            S::zero()
        } else {
            let factor = S::from_i64(j * (k + 1)).minus(beta);
            let denom = lead.scaled(k + 1);
            factor
                .times(&f[j as usize])
                .over(&denom)
                .expect("nonzero denominator")
        };
        f.push(next);
    }
    Series1::from_coeffs(f, n)
}

/// Formal solutions of `E^m_β` to degree `n`.
pub fn formal_solutions<S: Scalar>(m: i64, beta: &BigRational, n: i64) -> Result<FormalSolutionPair<S>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "formal solutions need m >= 2, got {m}"
        )));
    }
    let b = S::from_rational(beta);
    let two_i = S::i().scaled(2);
    Ok(FormalSolutionPair {
        m,
        beta: beta.clone(),
        f: recursion(m, &b, &two_i, n),
        u: recursion(m, &b, &two_i.negated(), n),
    })
}

impl<S: Scalar> FormalSolutionPair<S> {
    /// The ODE `E^m_β` whose formal solution is `f`.
    pub fn ode(&self) -> AdmissibleOde<S> {
        AdmissibleOde::family(self.m, &self.beta, self.f.trunc() + self.m).expect("m >= 2 was checked")
    }

    /// Residuals of `f` in `E^m_β` and of `u` in the companion equation
    /// (the coefficient-conjugate of `E^m_β`, as `β` is rational).
    pub fn residuals(&self) -> (Series1<S>, Series1<S>) {
        let e = self.ode();
        (e.residual(&self.f), e.conjugate().residual(&self.u))
    }

    /// `χ = 1/f`, `τ = w·(1 + ((1−m)/2i) w^{m−1} log(u/f))^{1/(1−m)}`.
    pub fn chi_tau(&self) -> Result<GaugeMap<S>> {
        let m = self.m;
        let chi = self.f.recip()?;
        let log = self.u.div(&self.f)?.log()?;
        let c = S::from_i64(1 - m).over(&S::i().scaled(2)).expect("2i != 0");
        let inner = log.shift(m - 1).scale(&c).add_const(&S::one());
        let tau = inner.pow_rational(&rat(1, 1 - m))?.shift(1);
        GaugeMap::new(chi, tau)
    }
}

/// The parameter-side map `G = (ξ λ(η), μ(η))` coupled to `F = (f, g)`:
/// `μ = g` and `η^m g'(η) = μ(η)^m f(η) λ(η)`.
pub fn coupled_map_g<S: Scalar>(map: &GaugeMap<S>, m: i64) -> Result<GaugeMap<S>> {
    let g = map.g();
    let ratio = g.shift(-1).powi(m)?.mul(map.f());
    let lambda = g.derivative().div(&ratio)?;
    GaugeMap::new(lambda, g.clone())
}

/// Residual `τ(ρ_β(x,η)) − ρ₀(x·χ(ρ_β)·χ̄(η), τ̄(η))` of the map
/// `(z, w) ↦ (z χ(w), τ(w))` from `h_beta` to `h0`.
pub fn map_residual<S: Scalar>(
    h_beta: &Hypersurface<S>,
    h0: &Hypersurface<S>,
    map: &GaugeMap<S>,
) -> Result<Series2<S>> {
    let rho_b = h_beta.rho();
    let (nx, _) = rho_b.rect();
    let (chi, tau) = (map.f(), map.g());
    let lhs = tau.compose2(rho_b)?;
    let x_new = chi.compose2(rho_b)?.mul_eta(&chi.conj())?.shift_x(1);
    let (xx, xy) = x_new.rect();
    let x_new = x_new.truncated(xx.min(nx), xy);
    let eta_new = Series2::from_eta(&tau.conj(), nx)?;
    let rhs = h0.rho().substitute(&x_new, &eta_new)?;
    Ok(lhs.sub(&rhs))
}

/// Outcome of one degree of the self-map probe.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeLevel<S: Scalar> {
    /// Unknowns at this level are `f_d` and `g_{d+m}`.
    pub degree: i64,
    /// Rank of the 2×2 linear part.
    pub rank: usize,
    /// Dimension of the affine solution set (`None` if inconsistent).
    pub dimension: Option<usize>,
    /// Basis of the free directions in `(f_d, g_{d+m})` coordinates.
    pub kernel: Vec<(S, S)>,
}

/// Result of probing special gauge self-maps of an ODE degree by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport<S: Scalar> {
    pub levels: Vec<ProbeLevel<S>>,
    /// A particular solution (free coordinates set to zero).
    pub map: GaugeMap<S>,
    /// The particular solution leaves `pullback = ode` up to this degree.
    pub verified_degree: i64,
}

impl<S: Scalar> ProbeReport<S> {
    /// Unique solution at every probed degree.
    pub fn is_rigid(&self) -> bool {
        self.levels.iter().all(|l| l.dimension == Some(0))
    }

    pub fn is_identity(&self) -> bool {
        let n = self.map.f().trunc();
        self.map.f().agrees_with(&Series1::one(n)) && self.map.g().agrees_with(&Series1::var(n))
    }
}

/// Solves `pullback(ode, (f, g), m) = ode` for special `(f, g)` degree by
/// degree up to `n`. At level `d` the unknowns `f_d, g_{d+m}` first enter
/// the degree `d+m−1` coefficients of `P̂` and `Q̂`, affinely, while all
/// later unknowns enter only higher degrees.
pub fn self_map_probe<S: Scalar>(ode: &AdmissibleOde<S>, n: i64) -> Result<ProbeReport<S>> {
    let m = ode.m();
    let top = n + m - 1;
    if ode.trunc() < top {
        return Err(Error::TruncationStarved {
            op: "self_map_probe",
            needed: top,
            have: ode.trunc(),
        });
    }
    let t = n + m + 2;
    let mut f: Vec<S> = vec![S::zero(); t as usize + 1];
    let mut g: Vec<S> = vec![S::zero(); t as usize + 1];
    f[0] = S::one();
    g[1] = S::one();
    let residual_at = |f: &[S], g: &[S], deg: i64| -> Result<(S, S)> {
        let map = GaugeMap::new(
            Series1::from_coeffs(f.to_vec(), t),
            Series1::from_coeffs(g.to_vec(), t),
        )?;
        let back = ode.pullback(&map, m)?;
        if back.trunc() < deg {
            return Err(Error::TruncationStarved {
                op: "self_map_probe",
                needed: deg,
                have: back.trunc(),
            });
        }
        Ok((
            back.p().coeff(deg).minus(&ode.p().coeff(deg)),
            back.q().coeff(deg).minus(&ode.q().coeff(deg)),
        ))
    };

    let mut levels = Vec::new();
    for d in 1..=n {
        let deg = d + m - 1;
        let (fi, gi) = (d as usize, (d + m) as usize);
        let r0 = residual_at(&f, &g, deg)?;
        f[fi] = S::one();
        let ra = residual_at(&f, &g, deg)?;
        f[fi] = S::zero();
        g[gi] = S::one();
        let rb = residual_at(&f, &g, deg)?;
        g[gi] = S::zero();
        // columns of the linear part
        let a = [ra.0.minus(&r0.0), ra.1.minus(&r0.1)];
        let b = [rb.0.minus(&r0.0), rb.1.minus(&r0.1)];
        let rhs = [r0.0.negated(), r0.1.negated()];
        let (level, sol) = solve_2x2(d, &a, &b, &rhs);
        let stop = level.dimension.is_none();
        levels.push(level);
        if stop {
            break;
        }
        f[fi] = sol.0;
        g[gi] = sol.1;
    }

    let map = GaugeMap::new(Series1::from_coeffs(f, t), Series1::from_coeffs(g, t))?;
    let back = ode.pullback(&map, m)?;
    let verified_degree = match back.truncated(top).mismatch(&ode.truncated(top)) {
        Some((_, mm)) => mm.degree - 1,
        None => top.min(back.trunc()),
    };
    Ok(ProbeReport {
        levels,
        map,
        verified_degree,
    })
}

/// Solves `x·a + y·b = rhs` for the 2-vectors `a`, `b` exactly.
fn solve_2x2<S: Scalar>(d: i64, a: &[S; 2], b: &[S; 2], rhs: &[S; 2]) -> (ProbeLevel<S>, (S, S)) {
    let det = a[0].times(&b[1]).minus(&a[1].times(&b[0]));
    let level = |rank, dimension, kernel| ProbeLevel {
        degree: d,
        rank,
        dimension,
        kernel,
    };
    if let Some(inv) = det.inverse() {
        let x = rhs[0].times(&b[1]).minus(&rhs[1].times(&b[0])).times(&inv);
        let y = a[0].times(&rhs[1]).minus(&a[1].times(&rhs[0])).times(&inv);
        return (level(2, Some(0), vec![]), (x, y));
    }
    let zero = S::zero();
    let a_zero = a.iter().all(S::is_zero);
    let b_zero = b.iter().all(S::is_zero);
    if a_zero && b_zero {
        let consistent = rhs.iter().all(S::is_zero);
        let kernel = vec![(S::one(), zero.clone()), (zero.clone(), S::one())];
        let dim = consistent.then_some(2);
        return (level(0, dim, kernel), (zero.clone(), zero));
    }
    // rank 1: use whichever column is nonzero, free variable set to zero
    let (col, use_x) = if a_zero { (b, false) } else { (a, true) };
    let pivot = if col[0].is_zero() { 1 } else { 0 };
    let t = rhs[pivot].over(&col[pivot]).expect("pivot is nonzero");
    let consistent = col[1 - pivot].times(&t) == rhs[1 - pivot];
    // kernel: (x, y) with x·a + y·b = 0
    let kernel = if a_zero {
        vec![(S::one(), zero.clone())]
    } else {
        let ratio = b[pivot].over(&a[pivot]).expect("pivot is nonzero");
        vec![(ratio.negated(), S::one())]
    };
    let sol = if use_x { (t, zero) } else { (zero.clone(), t) };
    (level(1, consistent.then_some(1), kernel), sol)
}

impl<S: Scalar> ProbeLevel<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "rank": self.rank,
            "dimension": self.dimension,
            "kernel": self.kernel.iter().map(|(x, y)| json!([x.to_json(), y.to_json()])).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests;
