use super::*;
use crate::scalar::GaussRat;

fn q(s: &str) -> GaussRat {
    s.parse().unwrap()
}

fn s1(coeffs: &[&str], trunc: i64) -> Series1<GaussRat> {
    Series1::from_coeffs(coeffs.iter().map(|c| q(c)).collect(), trunc)
}

fn laurent(low: i64, coeffs: &[&str], trunc: i64) -> Series1<GaussRat> {
    Series1::new(low, coeffs.iter().map(|c| q(c)).collect(), trunc)
}

fn w(trunc: i64) -> Series1<GaussRat> {
    Series1::var(trunc)
}

#[test]
fn difference_of_squares() {
    let a = s1(&["1", "1"], 6);
    let b = s1(&["1", "-1"], 6);
    assert_eq!(a.mul(&b), s1(&["1", "0", "-1"], 6));
}

#[test]
fn inverse_monomial_times_monomial_is_one() {
    let winv = laurent(-1, &["1"], 6);
    let p = winv.mul(&w(6));
    assert_eq!(p.pole_order(), 0);
    assert_eq!(p.coeffs_from(0)[0], q("1"));
    assert!(p.coeffs_from(1).iter().all(|c| c.is_zero()));
}

#[test]
fn bivariate_square() {
    let one = Series2::<GaussRat>::constant(q("1"), 2, 2);
    let s = one.add(&Series2::x(2, 2)).add(&Series2::eta(2, 2));
    let sq = s.mul(&s);
    let expect = |j: usize, k: usize| match (j, k) {
        (0, 0) => "1",
        (1, 0) | (0, 1) => "2",
        (2, 0) | (0, 2) => "1",
        (1, 1) => "2",
        _ => "0",
    };
    assert_eq!(sq, Series2::from_fn(2, 2, |j, k| q(expect(j, k))));
}

#[test]
fn geometric_series_division() {
    let r = s1(&["1"], 8).div(&s1(&["1", "-1"], 8)).unwrap();
    assert_eq!(r, s1(&["1"; 9], 8));
}

#[test]
fn monomial_division() {
    let r = laurent(2, &["1"], 8).div(&w(8)).unwrap();
    assert_eq!(r.valuation(), Some(1));
    assert_eq!(r.coeff(1), q("1"));
}

#[test]
fn termwise_laurent_division() {
    let num = s1(&["2i", "-2"], 6);
    let w2 = laurent(2, &["1"], 8);
    let r = num.div(&w2).unwrap();
    assert_eq!(r.pole_order(), 2);
    assert_eq!(r.coeff(-2), q("2i"));
    assert_eq!(r.coeff(-1), q("-2"));
    assert!(r.coeffs_from(0).iter().all(|c| c.is_zero()));
}

#[test]
fn division_by_zero_series_fails() {
    assert!(s1(&["1"], 4).div(&Series1::zero(4)).is_err());
}

#[test]
fn compose_with_square() {
    let outer = s1(&["1", "1"], 6);
    let inner = laurent(2, &["1"], 6);
    let r = outer.compose(&inner).unwrap();
    assert!(r.agrees_with(&s1(&["1", "0", "1"], 6)));
}

#[test]
fn compose_linear_into_bivariate() {
    let p = s1(&["2i", "-2"], 4);
    // η(1 + ix)
    let inner = Series2::from_fn(1, 1, |j, k| match (j, k) {
        (0, 1) => q("1"),
        (1, 1) => q("1i"),
        _ => q("0"),
    });
    let r = p.compose2(&inner).unwrap();
    let expect = Series2::from_fn(1, 1, |j, k| match (j, k) {
        (0, 0) => q("2i"),
        (0, 1) => q("-2"),
        (1, 1) => q("-2i"),
        _ => q("0"),
    });
    assert_eq!(r, expect);
}

#[test]
fn log1p_after_expm1_is_identity() {
    let n = 12;
    let expm1 = w(n).exp().unwrap().add_const(&q("-1"));
    let log1p = w(n).add_const(&q("1")).log().unwrap();
    let r = log1p.compose(&expm1).unwrap();
    assert_eq!(r.trunc(), n);
    assert!(r.agrees_with(&w(n)));
}

#[test]
fn exp_matches_factorials() {
    let e = w(10).exp().unwrap();
    let mut fact = 1i64;
    for k in 0..=10 {
        if k > 0 {
            fact *= k;
        }
        assert_eq!(e.coeff(k), GaussRat::from_ratio(1, fact));
    }
}

#[test]
fn log_one_plus_w() {
    let l = s1(&["1", "1"], 9).log().unwrap();
    for k in 1..=9 {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        assert_eq!(l.coeff(k), GaussRat::from_ratio(sign, k));
    }
    assert!(l.coeff(0).is_zero());
}

#[test]
fn log_ratio_of_conjugate_solutions() {
    let f = s1(&["1", "1/2i", "1/8"], 2);
    let ubar = f.conj();
    let r = ubar.div(&f).unwrap().log().unwrap();
    assert_eq!(r.trunc(), 2);
    assert!(r.agrees_with(&s1(&["0", "-1i", "0"], 2)));
    // independently: difference of the two logs
    let d = ubar.log().unwrap().sub(&f.log().unwrap());
    assert!(r.agrees_with(&d));
}

#[test]
fn log_requires_unit_constant() {
    assert!(matches!(s1(&["2", "1"], 4).log(), Err(Error::NotUnit { .. })));
    assert!(matches!(
        s1(&["1", "1"], 4).exp(),
        Err(Error::NonzeroConstant { .. })
    ));
}

#[test]
fn binomial_square_root() {
    let r = s1(&["1", "1"], 4).pow_rational(&rat(1, 2)).unwrap();
    assert!(r.agrees_with(&s1(&["1", "1/2", "-1/8", "1/16", "-5/128"], 4)));
}

#[test]
fn reciprocal_via_power() {
    let u = s1(&["1", "0", "1/2"], 8);
    let r = u.pow_rational(&rat(-1, 1)).unwrap();
    assert!(r.agrees_with(&s1(&["1", "0", "-1/2", "0", "1/4", "0", "-1/8", "0", "1/16"], 8)));
    assert!(r.agrees_with(&u.recip().unwrap()));
}

#[test]
fn power_round_trip() {
    let u = s1(&["1", "1"], 8);
    let back = u
        .pow_rational(&rat(-1, 1))
        .unwrap()
        .pow_rational(&rat(-1, 1))
        .unwrap();
    assert!(back.agrees_with(&u));
}

#[test]
fn power_rejects_non_unit() {
    assert!(s1(&["2", "1"], 4).pow_rational(&rat(1, 2)).is_err());
}

#[test]
fn implicit_linear() {
    // Φ = u − η
    let phi = Series2::from_fn(6, 6, |j, k| match (j, k) {
        (1, 0) => q("1"),
        (0, 1) => q("-1"),
        _ => q("0"),
    });
    let u = solve_implicit(&phi).unwrap();
    assert!(u.agrees_with(&w(6)));
}

#[test]
fn implicit_catalan() {
    // Φ = u − η − u²
    let phi = Series2::from_fn(8, 8, |j, k| match (j, k) {
        (1, 0) => q("1"),
        (0, 1) => q("-1"),
        (2, 0) => q("-1"),
        _ => q("0"),
    });
    let u = solve_implicit(&phi).unwrap();
    assert_eq!(u.trunc(), 8);
    // oracle: substitute back, u − η − u² must vanish
    let resid = u.sub(&w(8)).sub(&u.mul(&u));
    assert!(resid.is_zero());
    assert_eq!(u.coeffs_from(1)[..4], [q("1"), q("1"), q("2"), q("5")]);
}

#[test]
fn implicit_geometric() {
    // Φ = u(1 + η) − η
    let phi = Series2::from_fn(6, 6, |j, k| match (j, k) {
        (1, 0) | (1, 1) => q("1"),
        (0, 1) => q("-1"),
        _ => q("0"),
    });
    let u = solve_implicit(&phi).unwrap();
    assert!(u.agrees_with(&s1(&["0", "1", "-1", "1", "-1", "1", "-1"], 6)));
}

#[test]
fn implicit_degenerate() {
    let phi = Series2::from_fn(4, 4, |j, k| match (j, k) {
        (2, 0) | (0, 1) => q("1"),
        _ => q("0"),
    });
    assert!(matches!(solve_implicit(&phi), Err(Error::Degenerate { .. })));
}

#[test]
fn inverse_of_identity() {
    assert!(w(8).compositional_inverse().unwrap().agrees_with(&w(8)));
}

#[test]
fn inverse_of_mobius() {
    let g = w(10).div(&s1(&["1", "-1"], 10)).unwrap();
    let h = g.compositional_inverse().unwrap();
    let expect = w(10).div(&s1(&["1", "1"], 10)).unwrap();
    assert!(h.agrees_with(&expect));
}

#[test]
fn inverse_of_cubic_perturbation() {
    let g = s1(&["0", "1", "0", "1"], 11);
    let h = g.compositional_inverse().unwrap();
    assert_eq!(h.coeff(3), q("-1"));
    assert_eq!(h.coeff(5), q("3"));
    assert_eq!(h.coeff(7), q("-12"));
    let back = g.compose(&h).unwrap();
    assert_eq!(back.trunc(), 11);
    assert!(back.agrees_with(&w(11)));
}

#[test]
fn inverse_rejects_degenerate() {
    assert!(s1(&["0", "0", "1"], 6).compositional_inverse().is_err());
}

#[test]
fn compose_with_pole_uses_reciprocal() {
    // (1/t) ∘ (w + w²) = 1/(w(1+w)) = w⁻¹ − 1 + w − …
    let outer = laurent(-1, &["1"], 6);
    let inner = s1(&["0", "1", "1"], 6);
    let r = outer.compose(&inner).unwrap();
    assert_eq!(r.pole_order(), 1);
    assert_eq!(r.coeff(-1), q("1"));
    assert_eq!(r.coeff(0), q("-1"));
    assert_eq!(r.coeff(1), q("1"));
}

#[test]
fn bivariate_exp_log_round_trip() {
    let a = Series2::from_fn(3, 4, |j, k| {
        if j + k == 0 {
            q("0")
        } else {
            GaussRat::from_complex_ratio((j as i64, 3), (k as i64 - 1, 2))
        }
    });
    let e = a.exp().unwrap();
    assert!(e.log().unwrap().agrees_with(&a));
}

#[test]
fn bivariate_recip() {
    let u = Series2::from_fn(3, 3, |j, k| q(&format!("{}", 1 + j + 2 * k)));
    let p = u.mul(&u.recip().unwrap());
    assert_eq!(p, Series2::constant(q("1"), 3, 3));
}

#[test]
fn subst_eta_of_identity_row() {
    // outer(x, η) = η, substituting η ↦ h gives h back
    let h = Series2::from_fn(3, 5, |j, k| match (j, k) {
        (0, 1) => q("1"),
        (1, 2) => q("1i"),
        (2, 3) => q("1/2"),
        _ => q("0"),
    });
    let outer = Series2::eta(3, 5);
    assert_eq!(outer.subst_eta(&h).unwrap(), h);
}

#[test]
fn compose2_starved_truncation_shrinks() {
    let outer = s1(&["0", "1", "1"], 2);
    let inner = Series2::eta(2, 6);
    let r = outer.compose2(&inner).unwrap();
    assert_eq!(r.rect(), (2, 2));
}

#[test]
fn series_json_round_trip() {
    let s = laurent(-2, &["1/3", "0", "2-1i"], 4);
    let v = s.to_json();
    assert_eq!(v["pole"], 2);
    assert_eq!(v["coeffs"][0], "1/3");
    assert_eq!(Series1::<GaussRat>::from_json(&v).unwrap(), s);
    let b = Series2::from_fn(2, 3, |j, k| {
        GaussRat::from_complex_ratio((j as i64, 1), (k as i64, 5))
    });
    assert_eq!(Series2::<GaussRat>::from_json(&b.to_json()).unwrap(), b);
}

#[test]
fn float_backend_exp_with_constant() {
    use num_complex::Complex64;
    let s = Series1::from_coeffs(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 3);
    let e = s.exp().unwrap();
    assert!((e.coeff(0).re - std::f64::consts::E).abs() < 1e-12);
    assert!((e.coeff(1).re - std::f64::consts::E).abs() < 1e-12);
}
