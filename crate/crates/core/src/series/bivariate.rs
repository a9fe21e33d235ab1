use num_rational::BigRational;

use super::Series1;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A bivariate power series `Σ c[j][k] x^j η^k` known on the rectangle
/// `0 ≤ j ≤ nx, 0 ≤ k ≤ ny`. Coefficients outside the rectangle are unknown.
#[derive(Clone, PartialEq)]
pub struct Series2<S> {
    nx: usize,
    ny: usize,
    c: Vec<S>,
}

/// First coefficient (in row-major order) where two series disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch2<S> {
    pub x_degree: usize,
    pub eta_degree: usize,
    pub left: S,
    pub right: S,
}

impl<S: Scalar> Series2<S> {
    pub fn zero(nx: usize, ny: usize) -> Self {
        Series2 {
            nx,
            ny,
            c: vec![S::zero(); (nx + 1) * (ny + 1)],
        }
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut c = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=nx {
            for k in 0..=ny {
                c.push(f(j, k));
            }
        }
        Series2 { nx, ny, c }
    }

    /// Builds a series from rows `rows[j]` = coefficient of `x^j`, each a
    /// power series in η. The η-truncation is the smallest row truncation.
    pub fn from_rows(rows: &[Series1<S>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("no rows given".into()));
        }
        let ny = rows.iter().map(Series1::trunc).min().unwrap_or(0);
        if ny < 0 {
            return Err(Error::InvalidArgument("row truncation below 0".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.pole_order() > 0) {
            return Err(Error::PoleOverflow {
                found: r.pole_order(),
                allowed: 0,
            });
        }
        Ok(Self::from_fn(rows.len() - 1, ny as usize, |j, k| {
            rows[j].coeff(k as i64)
        }))
    }

    /// A series in η alone, viewed as bivariate (constant in x).
    pub fn from_eta(s: &Series1<S>, nx: usize) -> Result<Self> {
        if s.pole_order() > 0 || s.trunc() < 0 {
            return Err(Error::InvalidArgument(
                "from_eta needs a power series with trunc >= 0".into(),
            ));
        }
        let ny = s.trunc() as usize;
        Ok(Self::from_fn(nx, ny, |j, k| {
            if j == 0 {
                s.coeff(k as i64)
            } else {
                S::zero()
            }
        }))
    }

    /// A series in x alone, viewed as bivariate (constant in η).
    pub fn from_x(s: &Series1<S>, ny: usize) -> Result<Self> {
        Ok(Self::from_eta(s, ny)?.transpose())
    }

    pub fn constant(c: S, nx: usize, ny: usize) -> Self {
        let mut s = Self::zero(nx, ny);
        s.c[0] = c;
        s
    }

    pub fn x(nx: usize, ny: usize) -> Self {
        Self::from_fn(nx, ny, |j, k| if (j, k) == (1, 0) { S::one() } else { S::zero() })
    }

    pub fn eta(nx: usize, ny: usize) -> Self {
        Self::from_fn(nx, ny, |j, k| if (j, k) == (0, 1) { S::one() } else { S::zero() })
    }

    pub fn rect(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn idx(&self, j: usize, k: usize) -> usize {
        j * (self.ny + 1) + k
    }

    /// Coefficient of `x^j η^k`; panics outside the rectangle.
    pub fn get(&self, j: usize, k: usize) -> &S {
        assert!(j <= self.nx && k <= self.ny, "({j},{k}) outside rectangle");
        &self.c[self.idx(j, k)]
    }

    pub fn set(&mut self, j: usize, k: usize, v: S) {
        let i = self.idx(j, k);
        self.c[i] = v;
    }

    /// The coefficient of `x^j` as a series in η.
    pub fn row(&self, j: usize) -> Series1<S> {
        let start = self.idx(j, 0);
        Series1::from_coeffs(self.c[start..=start + self.ny].to_vec(), self.ny as i64)
    }

    pub fn rows(&self) -> Vec<Series1<S>> {
        (0..=self.nx).map(|j| self.row(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ny, self.nx, |j, k| self.get(k, j).clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Series2<T> {
        Series2 {
            nx: self.nx,
            ny: self.ny,
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(S::conj)
    }

    pub fn neg(&self) -> Self {
        self.map(S::negated)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.times(c))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(S::is_zero)
    }

    /// Restricts to a smaller rectangle (never enlarges).
    pub fn truncated(&self, nx: usize, ny: usize) -> Self {
        let (nx, ny) = (nx.min(self.nx), ny.min(self.ny));
        if (nx, ny) == (self.nx, self.ny) {
            return self.clone();
        }
        Self::from_fn(nx, ny, |j, k| self.get(j, k).clone())
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let (nx, ny) = (self.nx.min(o.nx), self.ny.min(o.ny));
        Self::from_fn(nx, ny, |j, k| f(self.get(j, k), o.get(j, k)))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, S::plus)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, S::minus)
    }

    pub fn add_const(&self, c: &S) -> Self {
        let mut s = self.clone();
        s.c[0] = s.c[0].plus(c);
        s
    }

    /// Product on the common rectangle.
    pub fn mul(&self, o: &Self) -> Self {
        let (nx, ny) = (self.nx.min(o.nx), self.ny.min(o.ny));
        self.mul_into(o, nx, ny)
    }

    /// Product restricted to the rectangle `(nx, ny)`, which must fit inside
    /// both operands' rectangles.
    pub fn mul_into(&self, o: &Self, nx: usize, ny: usize) -> Self {
        debug_assert!(nx <= self.nx.min(o.nx) && ny <= self.ny.min(o.ny));
        // Skip rows that are entirely zero; ψ-type series are sparse in x.
        let live = |s: &Self| -> Vec<bool> {
            (0..=nx)
                .map(|j| (0..=ny).any(|k| !s.get(j, k).is_zero()))
                .collect()
        };
        let (la, lb) = (live(self), live(o));
        Self::from_fn(nx, ny, |jj, kk| {
            S::sum_products(
                (0..=jj)
                    .filter(|&j| la[j] && lb[jj - j])
                    .flat_map(|j| (0..=kk).map(move |k| (self.get(j, k), o.get(jj - j, kk - k)))),
            )
        })
    }

    /// Multiplies by a series in η only (constant in x).
    pub fn mul_eta(&self, s: &Series1<S>) -> Result<Self> {
        let e = Self::from_eta(s, self.nx)?;
        Ok(self.mul(&e))
    }

    /// Multiplication by `x^k`; the rectangle grows accordingly.
    pub fn shift_x(&self, k: usize) -> Self {
        Self::from_fn(self.nx + k, self.ny, |j, l| {
            if j < k {
                S::zero()
            } else {
                self.get(j - k, l).clone()
            }
        })
    }

    /// Multiplication by `η^k`; the rectangle grows accordingly.
    pub fn shift_eta(&self, k: usize) -> Self {
        Self::from_fn(self.nx, self.ny + k, |j, l| {
            if l < k {
                S::zero()
            } else {
                self.get(j, l - k).clone()
            }
        })
    }

    /// Exact division by `η^k`; fails if a known coefficient below `η^k`
    /// is nonzero or nothing would remain.
    pub fn div_eta(&self, k: usize) -> Result<Self> {
        if k > self.ny {
            return Err(Error::TruncationStarved {
                op: "div_eta",
                needed: k as i64,
                have: self.ny as i64,
            });
        }
        for j in 0..=self.nx {
            for l in 0..k {
                if !self.get(j, l).is_zero() {
                    return Err(Error::InvalidArgument(format!(
                        "not divisible by eta^{k}: coefficient ({j},{l}) is nonzero"
                    )));
                }
            }
        }
        Ok(Self::from_fn(self.nx, self.ny - k, |j, l| {
            self.get(j, l + k).clone()
        }))
    }

    /// `x·∂/∂x` (keeps the rectangle).
    pub fn euler_x(&self) -> Self {
        Self::from_fn(self.nx, self.ny, |j, k| self.get(j, k).scaled(j as i64))
    }

    /// `η·∂/∂η` (keeps the rectangle).
    pub fn euler_eta(&self) -> Self {
        Self::from_fn(self.nx, self.ny, |j, k| self.get(j, k).scaled(k as i64))
    }

    /// `∂/∂η`; the η-truncation drops by one.
    pub fn deriv_eta(&self) -> Result<Self> {
        if self.ny == 0 {
            return Err(Error::TruncationStarved {
                op: "deriv_eta",
                needed: 1,
                have: 0,
            });
        }
        Ok(Self::from_fn(self.nx, self.ny - 1, |j, k| {
            self.get(j, k + 1).scaled(k as i64 + 1)
        }))
    }

    /// `∂/∂x`; the x-truncation drops by one.
    pub fn deriv_x(&self) -> Result<Self> {
        Ok(self.transpose().deriv_eta()?.transpose())
    }

    /// Cells in order of increasing total degree, so that recursions in the
    /// Euler operator `x∂x + η∂η` only look at already computed cells.
    fn by_total_degree(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::with_capacity(self.c.len());
        for t in 0..=self.nx + self.ny {
            for j in t.saturating_sub(self.ny)..=t.min(self.nx) {
                cells.push((j, t - j));
            }
        }
        cells
    }

    /// Inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let inv0 = self.c[0].inverse().ok_or(Error::ZeroDivisor { trunc: 0 })?;
        let mut r = Self::zero(self.nx, self.ny);
        for (j, k) in self.by_total_degree() {
            if (j, k) == (0, 0) {
                r.set(0, 0, inv0.clone());
                continue;
            }
            let s = S::sum_products((0..=j).flat_map(|a| {
                let r = &r;
                (0..=k)
                    .filter(move |&b| (a, b) != (0, 0))
                    .map(move |b| (self.get(a, b), r.get(j - a, k - b)))
            }));
            r.set(j, k, s.times(&inv0).negated());
        }
        Ok(r)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    /// Formal exponential; the constant term must vanish on the exact
    /// backend (the float backend factors out `e^{c₀}`).
    pub fn exp(&self) -> Result<Self> {
        let c0 = self.c[0].clone();
        let e0 = S::exp_const(&c0).ok_or(Error::NonzeroConstant { op: "exp" })?;
        // D E = (D a) E with D = x∂x + η∂η, so (j+k) E_jk = Σ (Da)_{ab} E_{j-a,k-b}
        let da = Self::from_fn(self.nx, self.ny, |j, k| self.get(j, k).scaled((j + k) as i64));
        let mut e = Self::zero(self.nx, self.ny);
        for (j, k) in self.by_total_degree() {
            if (j, k) == (0, 0) {
                e.set(0, 0, e0.clone());
                continue;
            }
            let s = S::sum_products((0..=j).flat_map(|a| {
                let (da, e) = (&da, &e);
                (0..=k)
                    .filter(move |&b| (a, b) != (0, 0))
                    .map(move |b| (da.get(a, b), e.get(j - a, k - b)))
            }));
            e.set(j, k, s.divided((j + k) as i64));
        }
        Ok(e)
    }

    /// Formal logarithm of a unit; the exact backend requires constant 1.
    pub fn log(&self) -> Result<Self> {
        let c0 = self.c[0].clone();
        let l0 = S::ln_const(&c0).ok_or_else(|| Error::NotUnit {
            op: "log",
            found: c0.to_string(),
        })?;
        let du = Self::from_fn(self.nx, self.ny, |j, k| self.get(j, k).scaled((j + k) as i64));
        let q = du.div(self)?;
        Ok(Self::from_fn(self.nx, self.ny, |j, k| {
            if (j, k) == (0, 0) {
                l0.clone()
            } else {
                q.get(j, k).divided((j + k) as i64)
            }
        }))
    }

    /// Principal power `u^α` of a unit with constant term 1.
    pub fn pow_rational(&self, alpha: &BigRational) -> Result<Self> {
        if !self.c[0].is_one() {
            return Err(Error::NotUnit {
                op: "pow",
                found: self.c[0].to_string(),
            });
        }
        self.log()?.scale(&S::from_rational(alpha)).exp()
    }

    /// Lowest η-degree of a nonzero coefficient, if any.
    pub fn eta_valuation(&self) -> Option<usize> {
        (0..=self.ny).find(|&k| (0..=self.nx).any(|j| !self.get(j, k).is_zero()))
    }

    /// Lowest x-degree of a nonzero coefficient, if any.
    pub fn x_valuation(&self) -> Option<usize> {
        (0..=self.nx).find(|&j| (0..=self.ny).any(|k| !self.get(j, k).is_zero()))
    }

    /// First nonzero coefficient in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, S)> {
        self.c
            .iter()
            .position(|v| !v.is_zero())
            .map(|i| (i / (self.ny + 1), i % (self.ny + 1), self.c[i].clone()))
    }

    pub fn first_non_real(&self) -> Option<(usize, usize, S)> {
        self.c
            .iter()
            .position(|v| !v.is_real())
            .map(|i| (i / (self.ny + 1), i % (self.ny + 1), self.c[i].clone()))
    }

    /// First coefficient on the common rectangle where the two differ.
    pub fn mismatch(&self, o: &Self) -> Option<Mismatch2<S>> {
        let (nx, ny) = (self.nx.min(o.nx), self.ny.min(o.ny));
        for j in 0..=nx {
            for k in 0..=ny {
                let (a, b) = (self.get(j, k), o.get(j, k));
                if a != b {
                    return Some(Mismatch2 {
                        x_degree: j,
                        eta_degree: k,
                        left: a.clone(),
                        right: b.clone(),
                    });
                }
            }
        }
        None
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.mismatch(o).is_none()
    }

    /// `Σ_j x^j · row_j(h(x, η))`: substitutes `h` for η. `h` must vanish
    /// at the origin.
    pub fn subst_eta(&self, h: &Self) -> Result<Self> {
        let x1 = Self::x(self.nx.min(h.nx), h.ny);
        self.substitute(&x1, h)
    }

    /// `Σ_j X^j · row_j(H)`: substitutes `X` for x and `H` for η. `X` must
    /// be divisible by x and `H` must vanish at the origin.
    pub fn substitute(&self, xs: &Self, h: &Self) -> Result<Self> {
        if xs.x_valuation().is_some_and(|v| v == 0) {
            return Err(Error::InvalidArgument(
                "substituted x must be divisible by x".into(),
            ));
        }
        let powers = EtaPowers::new(h)?;
        // Rows j > self.nx only contribute O(x^{self.nx+1}) since X = O(x);
        // with η | h a row known to η^t determines the result to η^t.
        let mut nx = xs.nx.min(h.nx).min(self.nx);
        let mut ny = h.ny;
        if powers.eta_form {
            ny = ny.min(self.ny);
        } else if powers.x_form {
            // unknown row tails are O(h^{ny+1}) = O(x^{ny+1})
            nx = nx.min(self.ny);
        } else if nx + ny > self.ny {
            // only total degree ≤ self.ny is determined
            nx = nx.min(self.ny);
            ny = self.ny - nx;
        }
        let mut acc = Self::zero(nx, ny);
        let xs = xs.truncated(nx, ny);
        let mut xp = Self::constant(S::one(), nx, ny);
        for j in 0..=nx.min(self.nx) {
            let row = self.row(j);
            if !row.is_zero() {
                let r = powers.combine(&row, nx, ny)?;
                acc = acc.add(&r.mul(&xp));
            }
            if j < nx {
                xp = xp.mul(&xs);
            }
        }
        Ok(acc)
    }
}

/// Powers of a bivariate series `h` with `h(0,0) = 0`, prepared for
/// evaluating many univariate series at `h`.
///
/// When `η | h` the powers are stored as `U^l` with `h = ηU`, truncated to
/// η-degree `ny − l`, which keeps the work proportional to the rectangle.
pub(crate) struct EtaPowers<S> {
    eta_form: bool,
    x_form: bool,
    pows: Vec<Series2<S>>,
}

impl<S: Scalar> EtaPowers<S> {
    pub(crate) fn new(h: &Series2<S>) -> Result<Self> {
        if !h.get(0, 0).is_zero() {
            return Err(Error::NonzeroConstant { op: "compose" });
        }
        let (nx, ny) = h.rect();
        if h.eta_valuation().is_none_or(|v| v >= 1) && ny >= 1 {
            let u = h.div_eta(1)?;
            let mut pows = vec![Series2::constant(S::one(), nx, ny)];
            for l in 1..=ny {
                let prev = pows[l - 1].truncated(nx, ny - l);
                pows.push(prev.mul_into(&u, nx, ny - l));
            }
            return Ok(EtaPowers {
                eta_form: true,
                x_form: false,
                pows,
            });
        }
        if h.x_valuation().is_none_or(|v| v >= 1) {
            // h = O(x): h^l = O(x^l), so powers beyond nx vanish.
            let mut pows = vec![Series2::constant(S::one(), nx, ny)];
            for l in 1..=nx {
                pows.push(pows[l - 1].mul(h));
            }
            return Ok(EtaPowers {
                eta_form: false,
                x_form: true,
                pows,
            });
        }
        // Only the total degree grows; powers vanish past nx + ny.
        let mut pows = vec![Series2::constant(S::one(), nx, ny)];
        for l in 1..=nx + ny {
            pows.push(pows[l - 1].mul(h));
        }
        Ok(EtaPowers {
            eta_form: false,
            x_form: false,
            pows,
        })
    }

    /// `r(h)` on the rectangle `(nx, ny)` (which must fit inside the
    /// prepared one). Fails if `r` is not known far enough.
    pub(crate) fn combine(&self, r: &Series1<S>, nx: usize, ny: usize) -> Result<Series2<S>> {
        if r.pole_order() > 0 {
            return Err(Error::InvalidArgument("outer series has a pole".into()));
        }
        let needed = if self.eta_form {
            ny
        } else {
            (self.pows.len() - 1).min(if self.x_form { nx } else { nx + ny })
        };
        if r.trunc() < needed as i64 {
            return Err(Error::TruncationStarved {
                op: "compose",
                needed: needed as i64,
                have: r.trunc(),
            });
        }
        let mut acc: Series2<S> = Series2::zero(nx, ny);
        for (l, c) in r.terms() {
            let l = l as usize;
            if l > needed {
                break;
            }
            if self.eta_form {
                // c·η^l·U^l, known up to η-degree ny
                let p = &self.pows[l];
                for j in 0..=nx {
                    for k in 0..=ny - l {
                        let v = p.get(j, k);
                        if !v.is_zero() {
                            let i = acc.idx(j, k + l);
                            acc.c[i] = acc.c[i].plus(&v.times(c));
                        }
                    }
                }
            } else {
                let p = &self.pows[l];
                for j in 0..=nx {
                    for k in 0..=ny {
                        let v = p.get(j, k);
                        if !v.is_zero() {
                            let i = acc.idx(j, k);
                            acc.c[i] = acc.c[i].plus(&v.times(c));
                        }
                    }
                }
            }
        }
        Ok(acc)
    }
}

impl<S: Scalar> Series1<S> {
    /// `self(h(x, η))` for a bivariate `h` with `h(0,0) = 0`.
    ///
    /// If `self` is not known far enough for the full rectangle of `h`, the
    /// η-truncation (or x-truncation) is reduced to what is guaranteed; when
    /// neither reduction works the call fails with `TruncationStarved`.
    pub fn compose2(&self, h: &Series2<S>) -> Result<Series2<S>> {
        if self.pole_order() > 0 {
            return Err(Error::InvalidArgument("outer series has a pole".into()));
        }
        let t = self.trunc();
        let (nx, ny) = h.rect();
        let h = match (h.eta_valuation(), h.x_valuation()) {
            (Some(v), _) if v >= 1 && t < ny as i64 => {
                let new_ny = (t + 1) * v as i64 - 1;
                if new_ny < 0 {
                    return Err(Error::TruncationStarved {
                        op: "compose",
                        needed: ny as i64,
                        have: t,
                    });
                }
                h.truncated(nx, (new_ny as usize).min(ny))
            }
            (_, Some(v)) if v >= 1 && t < nx as i64 => {
                let new_nx = (t + 1) * v as i64 - 1;
                if new_nx < 0 {
                    return Err(Error::TruncationStarved {
                        op: "compose",
                        needed: nx as i64,
                        have: t,
                    });
                }
                h.truncated((new_nx as usize).min(nx), ny)
            }
            _ => h.clone(),
        };
        let powers = EtaPowers::new(&h)?;
        let (nx, ny) = h.rect();
        powers.combine(self, nx, ny)
    }
}

impl<S: Scalar> std::fmt::Debug for Series2<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Series2 rect ({}, {}):", self.nx, self.ny)?;
        for j in 0..=self.nx {
            let row = self.row(j);
            if !row.is_zero() {
                writeln!(f, "  x^{j}: {row:?}")?;
            }
        }
        Ok(())
    }
}
