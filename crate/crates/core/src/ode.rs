//! Admissible second-order ODEs `z'' = (P/w^m) z' + (Q/w^{2m}) z`, their
//! real structure, conjugation and pullback under gauge maps.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};
use crate::series::{Mismatch, Series1};

/// The ODE `z'' = (P(w)/w^m) z' + (Q(w)/w^{2m}) z` with `P`, `Q`
/// holomorphic at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleOde<S: Scalar> {
    m: i64,
    p: Series1<S>,
    q: Series1<S>,
}

impl<S: Scalar> AdmissibleOde<S> {
    /// Validates `m ≥ 1` and that `P`, `Q` have no pole; both are cut to
    /// their common truncation order.
    pub fn new(m: i64, p: Series1<S>, q: Series1<S>) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument(format!("m must be >= 1, got {m}")));
        }
        for s in [&p, &q] {
            if s.pole_order() > 0 {
                return Err(Error::PoleOverflow {
                    found: s.pole_order(),
                    allowed: 0,
                });
            }
        }
        let n = p.trunc().min(q.trunc());
        Ok(AdmissibleOde {
            m,
            p: p.truncated(n),
            q: q.truncated(n),
        })
    }

    /// The family `z'' = ((2i − m w^{m−1})/w^m) z' + (β w^{2m−2}/w^{2m}) z`,
    /// i.e. real data `a ≡ 1`, `b = β w^{2m−2}`.
    pub fn family(m: i64, beta: &BigRational, trunc: i64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument(format!("m must be >= 1, got {m}")));
        }
        let data = RealData::new(
            m,
            Series1::one(trunc),
            Series1::monomial(S::from_rational(beta), 2 * m - 2, trunc),
        )?;
        Ok(data.to_ode())
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn p(&self) -> &Series1<S> {
        &self.p
    }

    pub fn q(&self) -> &Series1<S> {
        &self.q
    }

    pub fn trunc(&self) -> i64 {
        self.p.trunc()
    }

    pub fn truncated(&self, n: i64) -> Self {
        AdmissibleOde {
            m: self.m,
            p: self.p.truncated(n),
            q: self.q.truncated(n),
        }
    }

    /// `P/w^m`, the coefficient of `z'`.
    pub fn alpha(&self) -> Series1<S> {
        self.p.shift(-self.m)
    }

    /// `Q/w^{2m}`, the coefficient of `z`.
    pub fn gamma(&self) -> Series1<S> {
        self.q.shift(-2 * self.m)
    }

    /// Repackages Laurent coefficients `z'' = α z' + γ z` as an `m`-admissible
    /// ODE; fails if `α` has a pole beyond `m` or `γ` beyond `2m`.
    pub fn from_laurent(m: i64, alpha: &Series1<S>, gamma: &Series1<S>) -> Result<Self> {
        let p = alpha.shift(m);
        let q = gamma.shift(2 * m);
        if p.pole_order() > 0 {
            return Err(Error::PoleOverflow {
                found: alpha.pole_order(),
                allowed: m,
            });
        }
        if q.pole_order() > 0 {
            return Err(Error::PoleOverflow {
                found: gamma.pole_order(),
                allowed: 2 * m,
            });
        }
        Self::new(m, p, q)
    }

    /// Coefficient-wise complex conjugate of `P` and `Q`.
    pub fn conjugate(&self) -> Self {
        AdmissibleOde {
            m: self.m,
            p: self.p.conj(),
            q: self.q.conj(),
        }
    }

    /// First disagreement of `P` (then `Q`) with another ODE.
    pub fn mismatch(&self, other: &Self) -> Option<(&'static str, Mismatch<S>)> {
        if let Some(mm) = self.p.mismatch(&other.p) {
            return Some(("P", mm));
        }
        self.q.mismatch(&other.q).map(|mm| ("Q", mm))
    }

    /// Residual `w^{2m} z'' − w^m P z' − Q z` of a candidate solution `z`.
    pub fn residual(&self, z: &Series1<S>) -> Series1<S> {
        let m = self.m;
        let d1 = z.derivative();
        let d2 = d1.derivative();
        d2.shift(2 * m).sub(&self.p.mul(&d1).shift(m)).sub(&self.q.mul(z))
    }

    /// Extracts `(a, b)` if the ODE has a (positive) real structure, i.e.
    /// `a = (P + m w^{m−1})/(2i)` and `b = Q − i w^m a'` are real.
    pub fn real_structure(&self) -> RealStructure<S> {
        let m = self.m;
        let n = self.trunc();
        let two_i = S::i().scaled(2);
        let a = self
            .p
            .add(&Series1::monomial(S::from_i64(m), m - 1, n))
            .scale(&two_i.inverse().expect("2i is invertible"));
        if let Some((degree, value)) = a.first_non_real() {
            return RealStructure::NotReal {
                series: "a",
                degree,
                value,
            };
        }
        let b = self.q.sub(&a.derivative().shift(m).scale(&S::i()));
        if let Some((degree, value)) = b.first_non_real() {
            return RealStructure::NotReal {
                series: "b",
                degree,
                value,
            };
        }
        RealStructure::Real(RealData {
            m,
            a: a.truncated(n),
            b: b.truncated(n),
        })
    }

    /// Pullback of `self` under the gauge map `(z, w) ↦ (z f(w), g(w))`:
    /// the ODE satisfied by `z(w)` whenever `Z(g(w)) = z(w) f(w)` solves
    /// `self`. The result is packaged as `m_pulled`-admissible.
    pub fn pullback(&self, map: &GaugeMap<S>, m_pulled: i64) -> Result<Self> {
        let (f, g) = (&map.f, &map.g);
        let alpha = self.alpha();
        let gamma = self.gamma();
        let g1 = g.derivative();
        let g2 = g1.derivative();
        let f1 = f.derivative();
        let f2 = f1.derivative();
        let lf = f1.div(f)?;
        let lg = g2.div(&g1)?;
        let ag = alpha.compose(g)?.mul(&g1);
        // α̂ = α(g)g' + g''/g' − 2f'/f
        let alpha_hat = ag.add(&lg).sub(&lf.scale_i64(2));
        // γ̂ = α(g)g'(f'/f) + γ(g)g'² + (g''/g')(f'/f) − f''/f
        let gamma_hat = ag
            .mul(&lf)
            .add(&gamma.compose(g)?.mul(&g1.mul(&g1)))
            .add(&lg.mul(&lf))
            .sub(&f2.div(f)?);
        Self::from_laurent(m_pulled, &alpha_hat, &gamma_hat)
    }

    pub fn to_json(&self) -> Value {
        json!({ "m": self.m, "P": self.p.to_json(), "Q": self.q.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let m = v
            .get("m")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse("ODE needs an integer `m`".into()))?;
        let part = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("ODE is missing `{k}`")))
                .and_then(Series1::from_json)
        };
        Self::new(m, part("P")?, part("Q")?)
    }
}

/// Outcome of the real-structure test.
#[derive(Clone, Debug, PartialEq)]
pub enum RealStructure<S: Scalar> {
    Real(RealData<S>),
    /// The named series (`"a"` or `"b"`) has a non-real coefficient.
    NotReal {
        series: &'static str,
        degree: i64,
        value: S,
    },
}

impl<S: Scalar> RealStructure<S> {
    pub fn is_real(&self) -> bool {
        matches!(self, RealStructure::Real(_))
    }
}

/// Real-coefficient data `(a, b)` from which an ODE with real structure is
/// built via `P = 2i a − m w^{m−1}`, `Q = b + i w^m a'`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealData<S: Scalar> {
    m: i64,
    a: Series1<S>,
    b: Series1<S>,
}

impl<S: Scalar> RealData<S> {
    pub fn new(m: i64, a: Series1<S>, b: Series1<S>) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument(format!("m must be >= 1, got {m}")));
        }
        for s in [&a, &b] {
            if let Some((degree, value)) = s.first_non_real() {
                return Err(Error::NotReal {
                    degree,
                    value: value.to_string(),
                });
            }
            if s.pole_order() > 0 {
                return Err(Error::PoleOverflow {
                    found: s.pole_order(),
                    allowed: 0,
                });
            }
        }
        Ok(RealData { m, a, b })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn a(&self) -> &Series1<S> {
        &self.a
    }

    pub fn b(&self) -> &Series1<S> {
        &self.b
    }

    pub fn to_ode(&self) -> AdmissibleOde<S> {
        let m = self.m;
        let n = self.a.trunc().min(self.b.trunc());
        let a = self.a.truncated(n);
        let p = a
            .scale(&S::i().scaled(2))
            .sub(&Series1::monomial(S::from_i64(m), m - 1, n));
        // a' loses one order but w^m a' gains m of them
        let q = self
            .b
            .truncated(n)
            .add(&a.derivative().shift(m).scale(&S::i()).truncated(n));
        AdmissibleOde::new(m, p, q).expect("real data has no poles")
    }
}

/// The map `(z, w) ↦ (z f(w), g(w))` with `f(0) ≠ 0`, `g(0) = 0`,
/// `g'(0) ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeMap<S: Scalar> {
    f: Series1<S>,
    g: Series1<S>,
}

impl<S: Scalar> GaugeMap<S> {
    pub fn new(f: Series1<S>, g: Series1<S>) -> Result<Self> {
        if f.valuation() != Some(0) {
            return Err(Error::InvalidGauge("f(0) must be nonzero".into()));
        }
        if g.valuation() != Some(1) {
            return Err(Error::InvalidGauge(
                "g must vanish to first order exactly at 0".into(),
            ));
        }
        Ok(GaugeMap { f, g })
    }

    pub fn identity(trunc: i64) -> Self {
        GaugeMap {
            f: Series1::one(trunc),
            g: Series1::var(trunc),
        }
    }

    pub fn f(&self) -> &Series1<S> {
        &self.f
    }

    pub fn g(&self) -> &Series1<S> {
        &self.g
    }

    /// `f(0) = 1` and `g = w + O(w^{m+1})`.
    pub fn is_special(&self, m: i64) -> bool {
        self.f.coeff(0).is_one()
            && self.g.coeff(1).is_one()
            && (2..=m.min(self.g.trunc())).all(|k| self.g.coeff(k).is_zero())
    }

    /// `self ∘ inner`: first apply `inner`, then `self`.
    pub fn after(&self, inner: &Self) -> Result<Self> {
        let f = inner.f.mul(&self.f.compose(&inner.g)?);
        let g = self.g.compose(&inner.g)?;
        Self::new(f, g)
    }

    pub fn conj(&self) -> Self {
        GaugeMap {
            f: self.f.conj(),
            g: self.g.conj(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "f": self.f.to_json(), "g": self.g.to_json() })
    }
}

/// Parses a polynomial written as a sum of `RAT*w^INT` terms, e.g.
/// `1*w^0 - 3/2*w^2`. A bare `RAT` is read as a constant term.
pub fn parse_polynomial<S: Scalar>(text: &str, trunc: i64) -> Result<Series1<S>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // Split into signed terms at '+'/'-' that are not part of an exponent.
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);

    let mut coeffs: Vec<BigRational> = Vec::new();
    for term in terms {
        let term = term.strip_prefix('+').unwrap_or(term);
        let (coef, exp) = match term.split_once("*w^") {
            Some((c, e)) => (c, e),
            None => (term, "0"),
        };
        let c = parse_rational(coef)?;
        let e: usize = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent `{exp}` in `{term}`")))?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, BigRational::from_integer(0.into()));
        }
        coeffs[e] += c;
    }
    Ok(Series1::from_coeffs(
        coeffs.iter().map(S::from_rational).collect(),
        trunc,
    ))
}
