//! Infinitesimal automorphisms `A(w) z∂z + B(w) ∂w`, their tangency to a
//! complexified hypersurface, and the closed-form model with `β = 0`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ode::{AdmissibleOde, GaugeMap};
use crate::scalar::Scalar;
use crate::segre::Hypersurface;
use crate::series::{rat, Mismatch, Series1, Series2};

/// The holomorphic vector field `A(w)·z·∂z + B(w)·∂w`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<S: Scalar> {
    pub a: Series1<S>,
    pub b: Series1<S>,
}

impl<S: Scalar> VectorField<S> {
    pub fn new(a: Series1<S>, b: Series1<S>) -> Result<Self> {
        if a.pole_order() > 0 || b.pole_order() > 0 {
            return Err(Error::InvalidArgument(
                "vector field coefficients must be power series".into(),
            ));
        }
        Ok(VectorField { a, b })
    }

    /// `w^m ∂w`.
    pub fn model(m: i64, trunc: i64) -> Self {
        VectorField {
            a: Series1::zero(trunc),
            b: Series1::monomial(S::one(), m, trunc),
        }
    }

    /// `i z∂z`, the generator of the rotations `z ↦ e^{it} z`.
    pub fn rotation(trunc: i64) -> Self {
        VectorField {
            a: Series1::constant(S::i(), trunc),
            b: Series1::zero(trunc),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "A": self.a.to_json(), "B": self.b.to_json() })
    }
}

/// The field `L = −(χ'τ^m)/(χτ') z∂z + (τ^m/τ') ∂w`, which is `w^m ∂w`
/// transported by the gauge map `(χ, τ)`.
pub fn build_l<S: Scalar>(map: &GaugeMap<S>, m: i64) -> Result<VectorField<S>> {
    let (chi, tau) = (map.f(), map.g());
    let b = tau.powi(m)?.div(&tau.derivative())?;
    let a = chi.derivative().div(chi)?.mul(&b).neg();
    VectorField::new(a, b)
}

/// Residual `B(ρ) − (A(ρ) + Ā(η))·x ρ_x − B̄(η)·ρ_η` with `w = ρ(x, η)`.
/// It vanishes on the returned rectangle iff `L + L̄` is tangent there.
pub fn tangency_residual<S: Scalar>(field: &VectorField<S>, h: &Hypersurface<S>) -> Result<Series2<S>> {
    let rho = h.rho();
    let (nx, _) = rho.rect();
    let b_rho = field.b.compose2(rho)?;
    let a_rho = field.a.compose2(rho)?;
    let a_bar = Series2::from_eta(&field.a.conj(), nx)?;
    let x_part = a_rho.add(&a_bar).mul(&rho.euler_x());
    let b_bar = field.b.conj();
    let eta_part = match b_bar.valuation() {
        // B̄(η)ρ_η = (B̄/η)·(η ρ_η) keeps the η-truncation
        Some(v) if v >= 1 => Series2::from_eta(&b_bar.shift(-1), nx)?.mul(&rho.euler_eta()),
        None => Series2::zero(nx, b_bar.trunc().max(0) as usize),
        _ => Series2::from_eta(&b_bar, nx)?.mul(&rho.deriv_eta()?),
    };
    Ok(b_rho.sub(&x_part).sub(&eta_part))
}

/// The hypersurface `w = η(1 + (i/2)(1−m)η^{m−1} L(x))^{1/(1−m)}` with
/// `L(x) = −log(1−2x)`, on the rectangle `(nx, ny)`.
pub fn explicit_m0<S: Scalar>(m: i64, nx: usize, ny: usize) -> Result<Hypersurface<S>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "the closed-form model needs m >= 2, got {m}"
        )));
    }
    if ny == 0 {
        return Err(Error::InvalidArgument("η-truncation must be positive".into()));
    }
    let n = nx as i64;
    let one_minus_2x = Series1::from_coeffs(vec![S::one(), S::from_i64(-2)], n);
    let big_l = one_minus_2x.log()?.neg();
    let c = S::i().times(&S::from_rational(&rat(1 - m, 2)));
    let base = Series2::from_x(&big_l, ny - 1)?
        .shift_eta((m - 1) as usize)
        .truncated(nx, ny - 1)
        .scale(&c)
        .add_const(&S::one());
    let rho = base.pow_rational(&rat(1, 1 - m))?.shift_eta(1);
    Ok(Hypersurface::new(m, rho))
}

/// Outcome of the Λ-map identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaCheck<S: Scalar> {
    pub m: i64,
    /// The pulled-back ODE.
    pub pulled: AdmissibleOde<S>,
    /// First coefficient where it differs from `E^m_0`.
    pub witness: Option<(&'static str, Mismatch<S>)>,
}

impl<S: Scalar> LambdaCheck<S> {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

/// Pulls `Z'' = 0` back under `W = E(w)` where `E'/E = ℓ(w)` is given as a
/// Laurent series, and compares with `E^m_0`. Writing `E' = ℓE` and
/// `E'' = (ℓ' + ℓ²)E`, the pullback is `z'' = (ℓ + ℓ'/ℓ) z'`.
pub fn lambda_identity<S: Scalar>(m: i64, ell: &Series1<S>) -> Result<LambdaCheck<S>> {
    let alpha = ell.add(&ell.derivative().div(ell)?);
    let gamma = Series1::zero(alpha.trunc());
    let pulled = AdmissibleOde::from_laurent(m, &alpha, &gamma)?;
    let target = AdmissibleOde::family(m, &rat(0, 1), pulled.trunc())?;
    let witness = pulled.mismatch(&target);
    Ok(LambdaCheck { m, pulled, witness })
}

/// The Λ-map identity with `E = exp((2i/(1−m)) w^{1−m})`, i.e.
/// `E'/E = 2i w^{−m}`, checked to degree `n`.
pub fn lambda_map_check<S: Scalar>(m: i64, n: i64) -> Result<LambdaCheck<S>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("the Λ-map needs m >= 2, got {m}")));
    }
    let ell = Series1::monomial(S::i().scaled(2), -m, n - m);
    lambda_identity(m, &ell)
}
