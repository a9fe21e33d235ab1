//! Segre families `w = η·exp(±i η^{m−1} ψ(x, η))` of admissible ODEs, the
//! associated complex defining series `ρ(x, η)` and reality tests.
//!
//! Here `x` stands for the product `z ξ̄` and `η` for the conjugate
//! parameter `w̄`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ode::AdmissibleOde;
use crate::scalar::Scalar;
use crate::series::{Mismatch2, Series1, Series2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    /// `±i`.
    pub fn sigma<S: Scalar>(self) -> S {
        S::i().scaled(self.as_i64())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
        })
    }
}

/// An `m`-admissible Segre family `w = η·exp(σ η^{m−1} ψ(x, η))`, `σ = ±i`,
/// with `ψ = x + Σ_{k≥2} ψ_k(η) x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegreFamily<S: Scalar> {
    m: i64,
    sign: Sign,
    psi: Series2<S>,
}

impl<S: Scalar> SegreFamily<S> {
    /// Checks `ψ(0, η) = 0` and `∂ψ/∂x(0, η) = 1`.
    pub fn new(m: i64, sign: Sign, psi: Series2<S>) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument(format!("m must be >= 1, got {m}")));
        }
        let (nx, ny) = psi.rect();
        if nx < 1 {
            return Err(Error::InvalidArgument("psi needs x-degree >= 1".into()));
        }
        for k in 0..=ny {
            let expect_slope = if k == 0 { S::one() } else { S::zero() };
            if !psi.get(0, k).is_zero() || *psi.get(1, k) != expect_slope {
                return Err(Error::InvalidArgument(format!(
                    "psi must be x + O(x^2); offending eta-degree {k}"
                )));
            }
        }
        Ok(SegreFamily { m, sign, psi })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn psi(&self) -> &Series2<S> {
        &self.psi
    }

    pub fn rect(&self) -> (usize, usize) {
        self.psi.rect()
    }

    /// `ψ_k(η)`, the coefficient of `x^k`.
    pub fn psi_k(&self, k: usize) -> Series1<S> {
        self.psi.row(k)
    }

    /// Recovers `(P, Q)` from `ψ₂, ψ₃`:
    /// `P = 2σψ₂ − w^{m−1}`,
    /// `Q = 6ψ₃ − 8ψ₂² + 2σ(m−1)w^{m−1}ψ₂ − 2σ w^m ψ₂'`.
    pub fn extract_pq(&self) -> Result<AdmissibleOde<S>> {
        let (nx, ny) = self.rect();
        if nx < 3 {
            return Err(Error::TruncationStarved {
                op: "extract_pq",
                needed: 3,
                have: nx as i64,
            });
        }
        let m = self.m;
        let n = ny as i64;
        let sigma: S = self.sign.sigma();
        let two_sigma = sigma.scaled(2);
        let p2 = self.psi_k(2);
        let p3 = self.psi_k(3);
        let p = p2.scale(&two_sigma).sub(&Series1::monomial(S::one(), m - 1, n));
        let q = p3
            .scale_i64(6)
            .sub(&p2.mul(&p2).scale_i64(8))
            .add(&p2.shift(m - 1).scale(&two_sigma.scaled(m - 1)))
            .sub(&p2.derivative().shift(m).scale(&two_sigma));
        AdmissibleOde::new(m, p, q.truncated(n))
    }

    /// `ρ(x, η) = η·exp(σ η^{m−1} ψ(x, η))`.
    pub fn rho(&self) -> Result<Hypersurface<S>> {
        let (nx, ny) = self.rect();
        let sigma: S = self.sign.sigma();
        let expo = self
            .psi
            .shift_eta(self.m as usize - 1)
            .truncated(nx, ny)
            .scale(&sigma);
        let rho = expo.exp()?.shift_eta(1).truncated(nx, ny);
        Ok(Hypersurface { m: self.m, rho })
    }

    /// The coefficient-conjugate family; the sign flips.
    pub fn conjugated(&self) -> Self {
        SegreFamily {
            m: self.m,
            sign: self.sign.flip(),
            psi: self.psi.conj(),
        }
    }

    /// The dual family: `w = ρ*(x, η)` solving `η = ρ(x, w)`.
    ///
    /// Writing `ρ* = η E*` with `E* = exp(−σ η^{m−1} ψ*)`, the defining
    /// relation becomes `ψ* = E*^{m−1} ψ(x, η E*)`, a fixed point that gains
    /// one x-order per pass; pass `j` works on the rectangle `(j, Nη)`.
    pub fn dual(&self) -> Result<Self> {
        let (nx, ny) = self.rect();
        let m = self.m as usize;
        let neg_sigma: S = self.sign.flip().sigma();
        let mut psi_star = Series2::x(nx, ny);
        for j in 2..=nx {
            let cur = psi_star.truncated(j, ny);
            let expo = cur.shift_eta(m - 1).truncated(j, ny).scale(&neg_sigma);
            let e_star = expo.exp()?;
            let h = e_star.shift_eta(1).truncated(j, ny);
            let mut next = self.psi.truncated(j, ny).subst_eta(&h)?;
            if m > 1 {
                let em1 = expo.scale(&S::from_i64(m as i64 - 1)).exp()?;
                next = em1.mul(&next);
            }
            for k in 0..=ny {
                psi_star.set(j, k, next.get(j, k).clone());
            }
        }
        SegreFamily::new(self.m, self.sign.flip(), psi_star)
    }

    /// Compares the dual and the conjugated family coefficient-wise; `None`
    /// means they coincide on the whole rectangle (real structure).
    pub fn real_structure_witness(&self) -> Result<Option<Mismatch2<S>>> {
        let dual = self.dual()?;
        Ok(dual.psi.mismatch(&self.conjugated().psi))
    }

    pub fn has_real_structure(&self) -> Result<bool> {
        Ok(self.real_structure_witness()?.is_none())
    }

    pub fn to_json(&self) -> Value {
        json!({ "m": self.m, "sign": self.sign, "psi": self.psi.to_json() })
    }
}

/// Solves for the Segre family of `ode` with the given sign on the
/// rectangle `(nx, ny)`.
///
/// With `y(t, η) = ψ(t, η)` and `E = exp(σ η^{m−1} y)`, the inverse ODE
/// reads
/// `y'' = −σ(y')²(η^{m−1} + P(ηE)E^{1−m}) + (y')³ t Q(ηE) E^{2−2m}`
/// with `y(0) = 0`, `y'(0) = 1`. The `t^{k−2}` coefficient gives
/// `k(k−1) y_k` in terms of `y_1, …, y_{k−1}`.
pub fn solve_psi<S: Scalar>(
    ode: &AdmissibleOde<S>,
    sign: Sign,
    nx: usize,
    ny: usize,
) -> Result<SegreFamily<S>> {
    if nx < 1 {
        return Err(Error::InvalidArgument("x-truncation must be >= 1".into()));
    }
    if ode.trunc() < ny as i64 {
        return Err(Error::TruncationStarved {
            op: "solve_psi",
            needed: ny as i64,
            have: ode.trunc(),
        });
    }
    let m = ode.m() as usize;
    let sigma: S = sign.sigma();
    let mut y = Series2::x(nx, ny);
    for k in 2..=nx {
        let kx = k - 2;
        let dy = y.truncated(k - 1, ny).deriv_x()?;
        let expo = y
            .truncated(kx, ny)
            .shift_eta(m - 1)
            .truncated(kx, ny)
            .scale(&sigma);
        let eta_e = expo.exp()?.shift_eta(1).truncated(kx, ny);
        let e_1m = expo.scale(&S::from_i64(1 - m as i64)).exp()?;

        let dy2 = dy.mul(&dy);
        let bracket = power_sum(ode.p(), &e_1m, &eta_e, kx, ny).add(&Series2::from_fn(kx, ny, |j, l| {
            if j == 0 && l == m - 1 {
                S::one()
            } else {
                S::zero()
            }
        }));
        let mut rhs = dy2.mul(&bracket).scale(&sigma.negated());
        if kx >= 1 {
            let e_22m = e_1m.mul(&e_1m);
            let qs = power_sum(ode.q(), &e_22m, &eta_e, kx, ny);
            let cubic = dy2.mul(&dy).mul(&qs).shift_x(1).truncated(kx, ny);
            rhs = rhs.add(&cubic);
        }
        let denom = (k * (k - 1)) as i64;
        for l in 0..=ny {
            y.set(k, l, rhs.get(kx, l).divided(denom));
        }
    }
    SegreFamily::new(ode.m(), sign, y)
}

/// `Σ_l c_l η^l E^l · base = Σ_l c_l (ηE)^l · base` on the rectangle.
fn power_sum<S: Scalar>(
    c: &Series1<S>,
    base: &Series2<S>,
    eta_e: &Series2<S>,
    nx: usize,
    ny: usize,
) -> Series2<S> {
    let mut acc = Series2::zero(nx, ny);
    let top = c.degree().unwrap_or(-1).min(ny as i64);
    let mut cur = base.truncated(nx, ny);
    for l in 0..=top {
        let cl = c.coeff(l);
        if !cl.is_zero() {
            acc = acc.add(&cur.scale(&cl));
        }
        if l < top {
            cur = cur.mul(eta_e);
        }
    }
    acc
}

/// A hypersurface given by its complex defining series: `w = ρ(x, w̄)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypersurface<S: Scalar> {
    m: i64,
    rho: Series2<S>,
}

/// Real normal form `v = u^m(±s + Σ_{k≥2} h_k(u) s^k)` with `s = x/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealForm<S: Scalar> {
    /// `v(x, u)` as computed from `ρ` (no rescaling).
    pub v: Series2<S>,
    /// `h[k]` for `k = 1..=Nx` (`h[0]` is zero); `h[1]` is the constant `±1`.
    pub h: Vec<Series1<S>>,
}

impl<S: Scalar> Hypersurface<S> {
    pub fn new(m: i64, rho: Series2<S>) -> Self {
        Hypersurface { m, rho }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn rho(&self) -> &Series2<S> {
        &self.rho
    }

    pub fn rect(&self) -> (usize, usize) {
        self.rho.rect()
    }

    /// Residual `η − ρ(x, ρ̄(x, η))`, which vanishes for a real hypersurface.
    pub fn realty_residual(&self) -> Result<Series2<S>> {
        let composed = self.rho.subst_eta(&self.rho.conj())?;
        let (nx, ny) = composed.rect();
        Ok(Series2::eta(nx, ny).sub(&composed))
    }

    /// Solves `u + iv = ρ(x, u − iv)` for `v(x, u)` and extracts the real
    /// normal form. Fails with `NotReal` if an `h_k` has a non-real
    /// coefficient.
    pub fn real_normal_form(&self) -> Result<RealForm<S>> {
        let (nx, ny) = self.rect();
        let m = self.m as usize;
        let i = S::i();
        let half_over_i = S::i().scaled(2).inverse().expect("2i is invertible");
        let u = Series2::eta(nx, ny);
        // v = (ρ(x, u − iv) − (u − iv)) / 2i, one more x-order per pass
        let mut v = Series2::zero(nx, ny);
        for j in 1..=nx {
            let cur = v.truncated(j, ny);
            let wbar = u.truncated(j, ny).sub(&cur.scale(&i));
            let g = self.rho.truncated(j, ny).subst_eta(&wbar)?.sub(&wbar);
            let next = g.scale(&half_over_i);
            let (gx, gy) = next.rect();
            if gx < j || gy < ny {
                return Err(Error::TruncationStarved {
                    op: "real_normal_form",
                    needed: ny as i64,
                    have: gy as i64,
                });
            }
            for k in 0..=ny {
                v.set(j, k, next.get(j, k).clone());
            }
        }
        let mut h = vec![Series1::zero(ny as i64 - m as i64)];
        for k in 1..=nx {
            let row = v.row(k).shift(-(m as i64));
            if row.pole_order() > 0 {
                return Err(Error::InvalidArgument(format!(
                    "x^{k} coefficient of v is not divisible by u^{m}"
                )));
            }
            let hk = row.scale(&S::from_i64(1 << k));
            if let Some((degree, value)) = hk.first_non_real() {
                return Err(Error::NotReal {
                    degree,
                    value: format!("h_{k}: {value}"),
                });
            }
            h.push(hk);
        }
        Ok(RealForm { v, h })
    }

    /// Rebuilds `ρ` from a real normal form on the rectangle `(nx, ny)`:
    /// `v(x, u) = u^m Σ h_k(u) (x/2)^k`, then `u = η + i v(x, u)` and
    /// `ρ = η + 2i v`.
    pub fn from_real_form(m: i64, h: &[Series1<S>], nx: usize, ny: usize) -> Result<Self> {
        let rows: Vec<Series1<S>> = h
            .iter()
            .enumerate()
            .take(nx + 1)
            .skip(1)
            .map(|(k, hk)| hk.shift(m).scale(&S::from_ratio(1, 1 << k)))
            .collect();
        let known = rows.iter().map(Series1::trunc).min().unwrap_or(ny as i64);
        let ny = ny.min(known.max(0) as usize);
        let mut v = Series2::zero(nx, ny);
        for (k, row) in rows.iter().enumerate() {
            for l in 0..=ny {
                v.set(k + 1, l, row.coeff(l as i64));
            }
        }
        let i = S::i();
        let eta = Series2::eta(nx, ny);
        let mut u = eta.clone();
        for _ in 0..nx {
            u = eta.add(&v.subst_eta(&u)?.scale(&i));
        }
        let iv = v.subst_eta(&u)?.scale(&i.scaled(2));
        Ok(Hypersurface { m, rho: eta.add(&iv) })
    }

    pub fn to_json(&self) -> Value {
        json!({ "m": self.m, "rho": self.rho.to_json() })
    }
}

#[cfg(test)]
mod tests;
