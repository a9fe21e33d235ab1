use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A truncated Laurent series `Σ_{k=low}^{trunc} c_k w^k + O(w^{trunc+1})`.
///
/// Coefficients above `trunc` are unknown, not zero. The representation is
/// normalized so that `coeffs[0]` is nonzero; the zero series (zero up to
/// `trunc`) has no stored coefficients and `low = trunc + 1`, which makes
/// `low` a lower bound for the true valuation in every case.
#[derive(Clone, PartialEq)]
pub struct Series1<S> {
    low: i64,
    trunc: i64,
    coeffs: Vec<S>,
}

/// First degree at which two series disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch<S> {
    pub degree: i64,
    pub left: S,
    pub right: S,
}

impl<S: Scalar> Series1<S> {
    /// Coefficients `coeffs[i]` of `w^{low+i}`, known up to degree `trunc`.
    /// Entries past `trunc` are dropped and missing ones are zero-filled.
    pub fn new(low: i64, mut coeffs: Vec<S>, trunc: i64) -> Self {
        let len = (trunc - low + 1).max(0) as usize;
        coeffs.resize(len, S::zero());
        let mut s = Series1 { low, trunc, coeffs };
        s.normalize();
        s
    }

    pub fn from_coeffs(coeffs: Vec<S>, trunc: i64) -> Self {
        Self::new(0, coeffs, trunc)
    }

    pub fn zero(trunc: i64) -> Self {
        Self::new(0, Vec::new(), trunc)
    }

    pub fn one(trunc: i64) -> Self {
        Self::constant(S::one(), trunc)
    }

    pub fn constant(c: S, trunc: i64) -> Self {
        Self::new(0, vec![c], trunc)
    }

    /// `c·w^k`.
    pub fn monomial(c: S, k: i64, trunc: i64) -> Self {
        Self::new(k, vec![c], trunc)
    }

    /// The series `w`.
    pub fn var(trunc: i64) -> Self {
        Self::monomial(S::one(), 1, trunc)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(p) => {
                self.coeffs.drain(..p);
                self.low += p as i64;
            }
            None => {
                self.coeffs.clear();
                self.low = self.trunc + 1;
            }
        }
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Lowest possibly-nonzero degree (a lower bound for the valuation).
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn pole_order(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            (-self.low).max(0)
        }
    }

    /// Degree of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// All known coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `w^k`; panics if `k > trunc` since that value is unknown.
    pub fn coeff(&self, k: i64) -> S {
        assert!(
            k <= self.trunc,
            "coefficient {k} beyond truncation {}",
            self.trunc
        );
        if k < self.low {
            S::zero()
        } else {
            self.coeffs[(k - self.low) as usize].clone()
        }
    }

    fn at(&self, k: i64) -> Option<&S> {
        if k < self.low || k > self.trunc {
            None
        } else {
            Some(&self.coeffs[(k - self.low) as usize])
        }
    }

    /// Known coefficients from degree `from` through `trunc`.
    pub fn coeffs_from(&self, from: i64) -> Vec<S> {
        (from..=self.trunc).map(|k| self.coeff(k)).collect()
    }

    /// `(degree, coefficient)` pairs of the nonzero known coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Series1<T> {
        Series1::new(self.low, self.coeffs.iter().map(f).collect(), self.trunc)
    }

    pub fn conj(&self) -> Self {
        self.map(S::conj)
    }

    pub fn neg(&self) -> Self {
        self.map(S::negated)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.times(c))
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.map(|x| x.scaled(k))
    }

    /// Forgets everything above degree `n` (never raises the truncation).
    pub fn truncated(&self, n: i64) -> Self {
        if n >= self.trunc {
            return self.clone();
        }
        Self::new(self.low, self.coeffs.clone(), n)
    }

    /// Multiplication by `w^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series1 {
            low: self.low + k,
            trunc: self.trunc + k,
            coeffs: self.coeffs.clone(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let low = self.low.min(other.low).min(trunc + 1);
        let zero = S::zero();
        let coeffs = (low..=trunc)
            .map(|k| f(self.at(k).unwrap_or(&zero), other.at(k).unwrap_or(&zero)))
            .collect();
        Self::new(low, coeffs, trunc)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, S::plus)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, S::minus)
    }

    /// Adds a constant to the degree-0 coefficient.
    pub fn add_const(&self, c: &S) -> Self {
        self.add(&Self::constant(c.clone(), self.trunc))
    }

    /// Product; the result is known up to `min(ta + vb, tb + va)`.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = (self.trunc + other.low).min(other.trunc + self.low);
        let low = self.low + other.low;
        if self.is_zero() || other.is_zero() || trunc < low {
            return Self::zero(trunc);
        }
        let coeffs = (low..=trunc)
            .map(|n| {
                let i_lo = self.low.max(n - other.trunc);
                let i_hi = self.trunc.min(n - other.low);
                S::sum_products((i_lo..=i_hi).filter_map(|i| Some((self.at(i)?, other.at(n - i)?))))
            })
            .collect();
        Self::new(low, coeffs, trunc)
    }

    /// Inverse of a unit `u` (constant term nonzero), known to `u.trunc`.
    fn unit_inverse(u: &[S], n: usize) -> Result<Vec<S>> {
        let inv0 = u
            .first()
            .and_then(S::inverse)
            .ok_or(Error::ZeroDivisor { trunc: n as i64 })?;
        let mut r: Vec<S> = Vec::with_capacity(n + 1);
        r.push(inv0.clone());
        for k in 1..=n {
            let s = S::sum_products((1..=k.min(u.len() - 1)).map(|j| (&u[j], &r[k - j])));
            r.push(s.times(&inv0).negated());
        }
        Ok(r)
    }

    /// `1/self` as a Laurent series.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor { trunc: self.trunc });
        }
        let v = self.low;
        let n = (self.trunc - v) as usize;
        let r = Self::unit_inverse(&self.coeffs, n)?;
        Ok(Self::new(-v, r, self.trunc - 2 * v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// `self^n` for any integer `n` (negative powers need a nonzero series).
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        if n == 0 {
            return Ok(Self::one(self.trunc - self.low));
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result.expect("n > 0"))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scaled(self.low + i as i64))
            .collect();
        Self::new(self.low - 1, coeffs, self.trunc - 1)
    }

    fn constant_term(&self) -> S {
        if self.trunc < 0 {
            return S::zero();
        }
        self.coeff(0)
    }

    fn require_power_series(&self, op: &'static str) -> Result<()> {
        if self.low < 0 {
            return Err(Error::InvalidArgument(format!("{op}: series has a pole")));
        }
        Ok(())
    }

    /// Formal exponential. The constant term must vanish on the exact
    /// backend; the float backend factors out `e^{c₀}`.
    pub fn exp(&self) -> Result<Self> {
        self.require_power_series("exp")?;
        let c0 = self.constant_term();
        let scale = if c0.is_zero() {
            S::one()
        } else {
            S::exp_const(&c0).ok_or(Error::NonzeroConstant { op: "exp" })?
        };
        let n = self.trunc.max(-1);
        let a: Vec<S> = (0..=n)
            .map(|k| if k == 0 { S::zero() } else { self.coeff(k) })
            .collect();
        // n e_n = Σ_{k=1}^n k a_k e_{n-k}
        let ka: Vec<S> = a.iter().enumerate().map(|(k, c)| c.scaled(k as i64)).collect();
        let mut e: Vec<S> = Vec::with_capacity(a.len());
        if n >= 0 {
            e.push(scale);
        }
        for m in 1..a.len() {
            let s = S::sum_products((1..=m).map(|k| (&ka[k], &e[m - k])));
            e.push(s.divided(m as i64));
        }
        Ok(Self::from_coeffs(e, self.trunc))
    }

    /// Formal logarithm of a unit. The exact backend requires constant
    /// term 1; the float backend adds the principal log of the constant.
    pub fn log(&self) -> Result<Self> {
        self.require_power_series("log")?;
        let c0 = self.constant_term();
        let shift = if c0.is_one() {
            S::zero()
        } else {
            S::ln_const(&c0).ok_or_else(|| Error::NotUnit {
                op: "log",
                found: c0.to_string(),
            })?
        };
        // (log u)' = u'/u
        let dlog = self.derivative().div(self)?;
        let n = self.trunc;
        let mut coeffs = Vec::with_capacity(n.max(0) as usize + 1);
        coeffs.push(shift);
        for k in 1..=n {
            coeffs.push(dlog.coeff(k - 1).divided(k));
        }
        Ok(Self::from_coeffs(coeffs, n))
    }

    /// Principal formal power `u^α` of a unit with constant term 1.
    pub fn pow_rational(&self, alpha: &BigRational) -> Result<Self> {
        self.require_power_series("pow")?;
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(Error::NotUnit {
                op: "pow",
                found: c0.to_string(),
            });
        }
        // n v_n = Σ_{k=1}^n (α k − (n − k)) u_k v_{n−k}   (u_0 = 1)
        let n = self.trunc;
        let u: Vec<S> = self.coeffs_from(0);
        let mut v: Vec<S> = vec![S::one()];
        for m in 1..=n as usize {
            let weights: Vec<S> = (1..=m)
                .map(|k| {
                    let w = alpha * BigRational::from_integer((k as i64).into())
                        - BigRational::from_integer(((m - k) as i64).into());
                    S::from_rational(&w).times(&u[k])
                })
                .collect();
            let s = S::sum_products((1..=m).map(|k| (&weights[k - 1], &v[m - k])));
            v.push(s.divided(m as i64));
        }
        Ok(Self::from_coeffs(v, n))
    }

    /// `outer(inner)`. The inner series must vanish at 0. A pole in the
    /// outer series is handled through `1/inner`, which must exist.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.low < 1 {
            return Err(Error::NonzeroConstant { op: "compose" });
        }
        let v = inner.low;
        let lo = self.low.min(0);
        // outer = w^lo · R(w) with R a power series known to trunc - lo
        let r = self.shift(-lo);
        let t_r = r.trunc;
        let mut bound = (t_r + 1) * v - 1;
        if let Some(kmin) = r.terms().map(|(k, _)| k).find(|&k| k >= 1) {
            bound = bound.min(inner.trunc + (kmin - 1) * v);
        }
        let mut acc = Self::zero(bound);
        if r.trunc >= 0 {
            acc = acc.add_const(&r.coeff(0));
        }
        let inner_b = inner.truncated(bound);
        let mut pw = inner_b.clone();
        let mut k = 1;
        while k <= t_r && k * v <= bound {
            if let Some(c) = r.at(k) {
                if !c.is_zero() {
                    acc = acc.add(&pw.scale(c));
                }
            }
            k += 1;
            if k <= t_r && k * v <= bound {
                pw = pw.mul(&inner_b).truncated(bound);
            }
        }
        let acc = acc.truncated(bound);
        if lo < 0 {
            if inner.is_zero() {
                return Err(Error::ZeroDivisor { trunc: inner.trunc });
            }
            Ok(acc.mul(&inner.powi(lo)?))
        } else {
            Ok(acc)
        }
    }

    /// Compositional inverse `h` with `g(h(w)) = w`, via Lagrange inversion
    /// `h_n = (1/n)[t^{n−1}] (t/g(t))^n`.
    pub fn compositional_inverse(&self) -> Result<Self> {
        if self.low != 1 {
            return Err(Error::Degenerate {
                op: "compositional_inverse",
            });
        }
        let n = self.trunc;
        let phi = self.shift(-1).recip()?; // t/g(t), known to n-1
        let mut coeffs = vec![S::zero()];
        let mut pw = Self::one(n - 1);
        for k in 1..=n {
            pw = pw.mul(&phi).truncated(n - 1);
            coeffs.push(pw.coeff(k - 1).divided(k));
        }
        Ok(Self::from_coeffs(coeffs, n))
    }

    /// First degree where `self` and `other` differ within the common
    /// truncation.
    pub fn mismatch(&self, other: &Self) -> Option<Mismatch<S>> {
        let trunc = self.trunc.min(other.trunc);
        let low = self.low.min(other.low);
        let zero = S::zero();
        (low..=trunc).find_map(|k| {
            let a = self.at(k).unwrap_or(&zero);
            let b = other.at(k).unwrap_or(&zero);
            (a != b).then(|| Mismatch {
                degree: k,
                left: a.clone(),
                right: b.clone(),
            })
        })
    }

    /// Equality up to the common truncation order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.mismatch(other).is_none()
    }

    pub fn first_nonzero(&self) -> Option<(i64, S)> {
        self.terms().next().map(|(k, c)| (k, c.clone()))
    }

    /// First degree with a non-real coefficient.
    pub fn first_non_real(&self) -> Option<(i64, S)> {
        self.terms()
            .find(|(_, c)| !c.is_real())
            .map(|(k, c)| (k, c.clone()))
    }

    pub fn is_real(&self) -> bool {
        self.first_non_real().is_none()
    }

    /// Degree of the last nonzero known coefficient.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map(|i| self.low + i as i64)
    }
}

impl<S: Scalar> std::fmt::Debug for Series1<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})w^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(w^{})", self.trunc + 1)
    }
}

/// Exact rational shorthand used in tests and builders.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
