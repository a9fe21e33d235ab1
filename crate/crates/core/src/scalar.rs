//! Coefficient fields for truncated series.
//!
//! Two backends exist: [`GaussRat`], exact elements of ℚ(i) backed by big
//! integers, and [`Complex64`] doubles. The backend is a type parameter of
//! every series, so mixing backends inside one computation does not compile.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// Field operations needed by the series code.
///
/// Methods take references so that big-integer coefficients are not cloned
/// on every operation.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;

    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// `None` for zero.
    fn inverse(&self) -> Option<Self>;
    fn scaled(&self, k: i64) -> Self;
    fn conj(&self) -> Self;
    fn is_real(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    /// Natural log of the modulus; finite even when the value overflows f64.
    fn ln_abs(&self) -> f64;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `e^c` when representable in this field.
    fn exp_const(&self) -> Option<Self> {
        self.is_zero().then(Self::one)
    }

    /// Principal `log c` when representable in this field.
    fn ln_const(&self) -> Option<Self> {
        self.is_one().then(Self::zero)
    }

    fn over(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self.times(&inv))
    }

    fn divided(&self, k: i64) -> Self {
        self.times(&Self::from_ratio(1, k))
    }

    /// Σ aᵢ·bᵢ. Backends may override this to defer normalization.
    fn sum_products<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a Self, &'a Self)>,
        Self: 'a,
    {
        pairs
            .into_iter()
            .fold(Self::zero(), |acc, (a, b)| acc.plus(&a.times(b)))
    }
}

/// An exact Gaussian rational `(re + im·i) / den`.
///
/// Invariant: `den > 0` and `gcd(re, im, den) = 1`, so equal values have
/// equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    re: BigInt,
    im: BigInt,
    den: BigInt,
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        let den = re.denom().lcm(im.denom());
        let r = re.numer() * (&den / re.denom());
        let i = im.numer() * (&den / im.denom());
        Self::from_parts(r, i, den)
    }

    fn from_parts(re: BigInt, im: BigInt, den: BigInt) -> Self {
        let mut z = GaussRat { re, im, den };
        z.normalize();
        z
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.re = -&self.re;
            self.im = -&self.im;
            self.den = -&self.den;
        }
        if self.re.is_zero() && self.im.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let g = self.re.gcd(&self.im).gcd(&self.den);
        if !g.is_one() {
            self.re = &self.re / &g;
            self.im = &self.im / &g;
            self.den = &self.den / &g;
        }
    }

    pub fn re(&self) -> BigRational {
        BigRational::new(self.re.clone(), self.den.clone())
    }

    pub fn im(&self) -> BigRational {
        BigRational::new(self.im.clone(), self.den.clone())
    }

    pub fn from_complex_ratio(re: (i64, i64), im: (i64, i64)) -> Self {
        GaussRat::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        )
    }
}

impl Scalar for GaussRat {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        GaussRat {
            re: BigInt::zero(),
            im: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn one() -> Self {
        GaussRat {
            re: BigInt::one(),
            im: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn i() -> Self {
        GaussRat {
            re: BigInt::zero(),
            im: BigInt::one(),
            den: BigInt::one(),
        }
    }

    fn from_i64(n: i64) -> Self {
        GaussRat {
            re: n.into(),
            im: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        GaussRat::from_parts(r.numer().clone(), BigInt::zero(), r.denom().clone())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn plus(&self, o: &Self) -> Self {
        if self.den == o.den {
            return GaussRat::from_parts(&self.re + &o.re, &self.im + &o.im, self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = &o.den / &g;
        let b = &self.den / &g;
        GaussRat::from_parts(
            &self.re * &a + &o.re * &b,
            &self.im * &a + &o.im * &b,
            &self.den * &a,
        )
    }

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negated())
    }

    fn times(&self, o: &Self) -> Self {
        let (re, im) = if self.im.is_zero() {
            (&self.re * &o.re, &self.re * &o.im)
        } else if o.im.is_zero() {
            (&self.re * &o.re, &self.im * &o.re)
        } else {
            (
                &self.re * &o.re - &self.im * &o.im,
                &self.re * &o.im + &self.im * &o.re,
            )
        };
        GaussRat::from_parts(re, im, &self.den * &o.den)
    }

    fn negated(&self) -> Self {
        GaussRat {
            re: -&self.re,
            im: -&self.im,
            den: self.den.clone(),
        }
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // d / (a + bi) = d (a - bi) / (a² + b²)
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::from_parts(
            &self.den * &self.re,
            -(&self.den * &self.im),
            norm,
        ))
    }

    fn scaled(&self, k: i64) -> Self {
        GaussRat::from_parts(&self.re * k, &self.im * k, self.den.clone())
    }

    fn divided(&self, k: i64) -> Self {
        GaussRat::from_parts(self.re.clone(), self.im.clone(), &self.den * k)
    }

    fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -&self.im,
            den: self.den.clone(),
        }
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re().to_f64().unwrap_or(f64::NAN),
            self.im().to_f64().unwrap_or(f64::NAN),
        )
    }

    fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        0.5 * ln_bigint(&norm) - ln_bigint(&self.den)
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => s.parse(),
            Value::Number(n) => n
                .as_i64()
                .map(GaussRat::from_i64)
                .ok_or_else(|| Error::Parse(format!("non-integer exact coefficient {n}"))),
            other => Err(Error::Parse(format!("expected exact coefficient, got {other}"))),
        }
    }

    /// Accumulates over a lazily grown common denominator and reduces once.
    fn sum_products<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a Self, &'a Self)>,
    {
        let mut re = BigInt::zero();
        let mut im = BigInt::zero();
        let mut den = BigInt::one();
        for (a, b) in pairs {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let (mut tr, mut ti) = if a.im.is_zero() {
                (&a.re * &b.re, &a.re * &b.im)
            } else if b.im.is_zero() {
                (&a.re * &b.re, &a.im * &b.re)
            } else {
                (&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
            };
            let td = &a.den * &b.den;
            if td != den {
                let (q, r) = den.div_rem(&td);
                if r.is_zero() {
                    tr *= &q;
                    ti *= &q;
                } else {
                    let g = den.gcd(&td);
                    let scale_acc = &td / &g;
                    let scale_term = &den / &g;
                    re *= &scale_acc;
                    im *= &scale_acc;
                    den *= &scale_acc;
                    tr *= &scale_term;
                    ti *= &scale_term;
                }
            }
            re += tr;
            im += ti;
        }
        GaussRat::from_parts(re, im, den)
    }
}

fn fmt_rat(num: &BigInt, den: &BigInt, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let r = BigRational::new(num.clone(), den.clone());
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rat(&self.re, &self.den, f),
            (true, false) => {
                fmt_rat(&self.im, &self.den, f)?;
                write!(f, "i")
            }
            (false, false) => {
                fmt_rat(&self.re, &self.den, f)?;
                write!(f, "{}", if self.im.is_negative() { "-" } else { "+" })?;
                fmt_rat(&self.im.abs(), &self.den, f)?;
                write!(f, "i")
            }
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `RAT := "-"? INT ("/" INT)?`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    let s = s.trim();
    let digits = s.strip_prefix('-').unwrap_or(s);
    let valid = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match digits.split_once('/') {
        Some((n, d)) if valid(n) && valid(d) => (n, d),
        None if valid(digits) => (digits, "1"),
        _ => return Err(bad()),
    };
    let mut n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    if s.starts_with('-') {
        n = -n;
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for GaussRat {
    type Err = Error;

    /// `COEFF := RAT | RAT SIGN RAT "i" | RAT "i"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(GaussRat::from_rational(&parse_rational(s)?));
        };
        let split = body
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(pos, _)| pos);
        match split {
            None => Ok(GaussRat::new(BigRational::zero(), parse_rational(body)?)),
            Some(pos) => {
                let re = parse_rational(&body[..pos])?;
                let (sign, rest) = body[pos..].split_at(1);
                let mut im = parse_rational(rest)?;
                if sign == "-" {
                    im = -im;
                }
                Ok(GaussRat::new(re, im))
            }
        }
    }
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn plus(&self, o: &Self) -> Self {
        self + o
    }

    fn minus(&self, o: &Self) -> Self {
        self - o
    }

    fn times(&self, o: &Self) -> Self {
        self * o
    }

    fn negated(&self) -> Self {
        -self
    }

    fn inverse(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }

    fn scaled(&self, k: i64) -> Self {
        self * k as f64
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn is_real(&self) -> bool {
        self.im == 0.0
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn ln_abs(&self) -> f64 {
        self.norm().ln()
    }

    fn exp_const(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn ln_const(&self) -> Option<Self> {
        (!Scalar::is_zero(self)).then(|| self.ln())
    }

    fn to_json(&self) -> Value {
        serde_json::json!([self.re, self.im])
    }

    fn from_json(v: &Value) -> Result<Self> {
        let pair = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse(format!("expected [re, im], got {v}")))?;
        let part = |x: &Value| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("non-numeric float coefficient {x}")))
        };
        Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "3", "-7/2", "5i", "-1/3i", "1/2+3/4i", "-2-1/5i"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("6/4-3/9i").to_string(), "3/2-1/3i");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "i", "1/0", "a", "1//2", "1+i", "--1"] {
            assert!(s.parse::<GaussRat>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn field_identities() {
        let a = q("1/2+3/4i");
        let b = q("-2/3+1/5i");
        let inv = b.inverse().unwrap();
        assert_eq!(b.times(&inv), GaussRat::one());
        assert_eq!(a.times(&b).over(&b).unwrap(), a);
        assert_eq!(a.minus(&a), GaussRat::zero());
        assert_eq!(GaussRat::i().times(&GaussRat::i()), GaussRat::from_i64(-1));
        assert_eq!(a.conj().conj(), a);
        assert!(GaussRat::zero().inverse().is_none());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let z = GaussRat::from_parts(BigInt::from(-4), BigInt::from(6), BigInt::from(-8));
        assert_eq!(z.den, BigInt::from(4));
        assert_eq!(z.re, BigInt::from(2));
        assert_eq!(z.im, BigInt::from(-3));
    }

    #[test]
    fn sum_products_matches_fold() {
        let xs: Vec<GaussRat> = ["1/2", "3/7i", "-5/6+1/3i", "4", "1/9-2/9i"]
            .iter()
            .map(|s| q(s))
            .collect();
        let ys: Vec<GaussRat> = ["2/3i", "1/4", "7/5", "-1/8+1/8i", "3"]
            .iter()
            .map(|s| q(s))
            .collect();
        let fast = GaussRat::sum_products(xs.iter().zip(ys.iter()));
        let slow = xs
            .iter()
            .zip(&ys)
            .fold(GaussRat::zero(), |acc, (a, b)| acc.plus(&a.times(b)));
        assert_eq!(fast, slow);
    }

    #[test]
    fn ln_abs_survives_huge_values() {
        let big = GaussRat::from_rational(&BigRational::from_integer(BigInt::from(10).pow(400)));
        let expected = 400.0 * 10f64.ln();
        assert!((big.ln_abs() - expected).abs() < 1e-9);
    }

    #[test]
    fn json_forms() {
        let z = q("1/2-3i");
        assert_eq!(GaussRat::from_json(&z.to_json()).unwrap(), z);
        let c = Complex64::new(0.25, -1.5);
        assert_eq!(Complex64::from_json(&c.to_json()).unwrap(), c);
    }
}
