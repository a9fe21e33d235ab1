use super::*;
use crate::scalar::GaussRat;
use crate::series::rat;

type Fam = SegreFamily<GaussRat>;

fn q(s: &str) -> GaussRat {
    s.parse().unwrap()
}

fn poly(coeffs: &[&str], n: i64) -> Series1<GaussRat> {
    Series1::from_coeffs(coeffs.iter().map(|c| q(c)).collect(), n)
}

fn family(m: i64, beta: i64, n: i64) -> AdmissibleOde<GaussRat> {
    AdmissibleOde::family(m, &rat(beta, 1), n).unwrap()
}

fn psi_of(m: i64, beta: i64, nx: usize, ny: usize) -> Fam {
    solve_psi(&family(m, beta, ny as i64), Sign::Positive, nx, ny).unwrap()
}

/// ψ with prescribed ψ₂ (and nothing else) on the rectangle.
fn hand_psi(m: i64, sign: Sign, psi2: &Series1<GaussRat>, nx: usize, ny: usize) -> Fam {
    let psi = Series2::from_fn(nx, ny, |j, k| match j {
        1 if k == 0 => q("1"),
        2 if (k as i64) <= psi2.trunc() => psi2.coeff(k as i64),
        _ => q("0"),
    });
    SegreFamily::new(m, sign, psi).unwrap()
}

#[test]
fn psi2_of_flat_family_matches_relation() {
    let ode = family(2, 0, 10);
    let fam = solve_psi(&ode, Sign::Positive, 4, 10).unwrap();
    // oracle: ψ₂ = (P + w^{m−1}) / (2i)
    let oracle = ode
        .p()
        .add(&Series1::monomial(q("1"), 1, 10))
        .scale(&q("2i").inverse().unwrap());
    assert!(fam.psi_k(2).agrees_with(&oracle));
    assert!(fam.psi_k(2).agrees_with(&poly(&["1", "1/2i"], 10)));
}

#[test]
fn psi3_of_flat_family_matches_relation() {
    let ode = family(2, 0, 10);
    let fam = solve_psi(&ode, Sign::Positive, 4, 10).unwrap();
    // oracle: 6ψ₃ = Q + 8ψ₂² − 2i(m−1)w^{m−1}ψ₂ + 2i w^m ψ₂'
    let p2 = poly(&["1", "1/2i"], 10);
    let two_i = q("2i");
    let six_psi3 = ode
        .q()
        .add(&p2.mul(&p2).scale_i64(8))
        .sub(&p2.shift(1).scale(&two_i))
        .add(&p2.derivative().shift(2).scale(&two_i));
    let oracle = six_psi3.scale(&GaussRat::from_ratio(1, 6));
    assert!(fam.psi_k(3).agrees_with(&oracle));
    assert!(fam.psi_k(3).agrees_with(&poly(&["4/3", "1i", "-1/3"], 10)));
}

#[test]
fn psi_has_unit_slope() {
    for (m, beta) in [(2, 1), (3, 2), (1, 0)] {
        let fam = psi_of(m, beta, 5, 8);
        assert!(fam.psi_k(0).is_zero());
        assert!(fam.psi_k(1).agrees_with(&Series1::one(8)));
    }
}

#[test]
fn solve_psi_needs_enough_ode_truncation() {
    let ode = family(2, 1, 5);
    assert!(matches!(
        solve_psi(&ode, Sign::Positive, 4, 8),
        Err(Error::TruncationStarved { .. })
    ));
}

#[test]
fn round_trip_positive_and_negative() {
    for m in [1, 2, 3] {
        for beta in [0, 1, 2] {
            let ode = family(m, beta, 12);
            for sign in [Sign::Positive, Sign::Negative] {
                let fam = solve_psi(&ode, sign, 4, 12).unwrap();
                let back = fam.extract_pq().unwrap();
                assert_eq!(back.mismatch(&ode), None, "m={m} beta={beta} sign={sign}");
                assert_eq!(back.trunc(), 12);
            }
        }
    }
}

#[test]
fn round_trip_non_family_ode() {
    let a = poly(&["1", "1/3", "-2"], 10);
    let b = poly(&["0", "5", "1/7", "1"], 10);
    let ode = crate::ode::RealData::new(2, a, b).unwrap().to_ode();
    let fam = solve_psi(&ode, Sign::Positive, 4, 10).unwrap();
    assert_eq!(fam.extract_pq().unwrap().mismatch(&ode), None);
}

#[test]
fn extract_from_linear_psi() {
    let fam = hand_psi(1, Sign::Positive, &Series1::zero(6), 4, 6);
    let ode = fam.extract_pq().unwrap();
    assert!(ode.p().agrees_with(&poly(&["-1"], 6)));
    assert!(ode.q().is_zero());
}

#[test]
fn extract_of_conjugated_family_is_conjugated_ode() {
    let ode = family(2, 1, 10);
    let fam = solve_psi(&ode, Sign::Positive, 4, 10).unwrap();
    let back = fam.conjugated().extract_pq().unwrap();
    assert_eq!(back.mismatch(&ode.conjugate()), None);
}

#[test]
fn extract_needs_cubic_order() {
    let fam = hand_psi(2, Sign::Positive, &Series1::zero(4), 2, 4);
    assert!(fam.extract_pq().is_err());
}

#[test]
fn rho_of_flat_family() {
    let fam = psi_of(2, 0, 4, 10);
    let rho = fam.rho().unwrap();
    let r = rho.rho();
    assert!(r.row(0).agrees_with(&poly(&["0", "1"], 10)));
    assert!(r.row(1).agrees_with(&poly(&["0", "0", "1i"], 10)));
    assert!(r.row(2).agrees_with(&poly(&["0", "0", "1i", "-1"], 10)));
}

#[test]
fn rho_one_jet_shape() {
    for (m, sign) in [(1, Sign::Positive), (2, Sign::Negative), (3, Sign::Positive)] {
        let fam = solve_psi(&family(m, 1, 8), sign, 3, 8).unwrap();
        let r = fam.rho().unwrap();
        assert!(r.rho().row(0).agrees_with(&poly(&["0", "1"], 8)));
        let slope = Series1::monomial(sign.sigma::<GaussRat>(), m, 8);
        assert!(r.rho().row(1).agrees_with(&slope));
    }
}

#[test]
fn dual_of_trivial_m1_family() {
    let fam = hand_psi(1, Sign::Positive, &Series1::zero(6), 5, 6);
    let dual = fam.dual().unwrap();
    assert_eq!(dual.sign(), Sign::Negative);
    assert!(dual.psi().agrees_with(&Series2::x(5, 6)));
    // ρ* = η e^{−ix}
    let rho = dual.rho().unwrap();
    let mut fact = 1i64;
    for j in 0..=5usize {
        if j > 0 {
            fact *= j as i64;
        }
        let c = GaussRat::from_ratio(1, fact).times(&q("-1i").pow_i(j));
        assert_eq!(*rho.rho().get(j, 1), c);
    }
}

trait PowI {
    fn pow_i(&self, n: usize) -> Self;
}

impl PowI for GaussRat {
    fn pow_i(&self, n: usize) -> Self {
        (0..n).fold(q("1"), |acc, _| acc.times(self))
    }
}

#[test]
fn dual_shifts_psi2() {
    for m in [1, 2, 3] {
        let fam = psi_of(m, 1, 4, 10);
        let dual = fam.dual().unwrap();
        let shift = Series1::monomial(GaussRat::from_i64(m - 1).times(&q("1i")), m - 1, 10);
        assert!(dual.psi_k(2).agrees_with(&fam.psi_k(2).sub(&shift)));
    }
}

#[test]
fn dual_is_involution() {
    let fam = psi_of(2, 1, 5, 10);
    let back = fam.dual().unwrap().dual().unwrap();
    assert_eq!(back.sign(), fam.sign());
    assert!(back.psi().agrees_with(fam.psi()));
}

#[test]
fn conjugation_examples() {
    let fam = hand_psi(2, Sign::Positive, &Series1::zero(4), 3, 4);
    let c = fam.conjugated();
    assert_eq!(c.sign(), Sign::Negative);
    assert!(c.psi().agrees_with(fam.psi()));
    let fam = psi_of(2, 0, 3, 6);
    assert!(fam.conjugated().psi_k(2).agrees_with(&poly(&["1", "-1/2i"], 6)));
    assert_eq!(fam.conjugated().conjugated(), fam);
}

#[test]
fn family_members_have_real_structure() {
    for beta in [0, 1, 2] {
        assert!(psi_of(2, beta, 5, 10).has_real_structure().unwrap());
    }
}

#[test]
fn imaginary_psi2_for_m1_is_not_real() {
    let fam = hand_psi(1, Sign::Positive, &poly(&["1i"], 6), 4, 6);
    let witness = fam.real_structure_witness().unwrap().expect("must fail");
    assert_eq!(witness.x_degree, 2);
}

#[test]
fn conjugated_dual_of_real_family_is_real() {
    let fam = psi_of(2, 1, 4, 8);
    let other = fam.conjugated().dual().unwrap();
    assert!(other.has_real_structure().unwrap());
}

#[test]
fn realty_of_flat_family_vanishes() {
    let rho = psi_of(2, 0, 5, 10).rho().unwrap();
    let r = rho.realty_residual().unwrap();
    assert_eq!(r.rect(), (5, 10));
    assert!(r.is_zero());
}

#[test]
fn realty_detects_non_real_shape() {
    let rho = Series2::from_fn(3, 6, |j, k| match (j, k) {
        (1, 0) | (0, 1) => q("1"),
        _ => q("0"),
    });
    let r = Hypersurface::new(1, rho).realty_residual().unwrap();
    let (j, k, c) = r.first_nonzero().unwrap();
    assert_eq!((j, k, c), (1, 0, q("-2")));
}

#[test]
fn realty_of_levi_flat_is_zero() {
    let r = Hypersurface::new(1, Series2::<GaussRat>::eta(3, 6))
        .realty_residual()
        .unwrap();
    assert!(r.is_zero());
}

#[test]
fn real_normal_form_of_flat_family() {
    let rho = psi_of(2, 0, 4, 10).rho().unwrap();
    let form = rho.real_normal_form().unwrap();
    // raw: v = u²x/2 + O(x²); normalized leading term u²
    assert!(form.v.row(1).agrees_with(&poly(&["0", "0", "1/2"], 10)));
    assert!(form.h[1].agrees_with(&Series1::one(8)));
    for hk in &form.h {
        assert!(hk.is_real());
    }
    let back = Hypersurface::from_real_form(2, &form.h, 4, 10).unwrap();
    assert!(back.rho().agrees_with(rho.rho()));
}

#[test]
fn real_normal_form_negative_sign() {
    let ode = family(2, 0, 10).conjugate();
    let rho = solve_psi(&ode, Sign::Negative, 4, 10).unwrap().rho().unwrap();
    let form = rho.real_normal_form().unwrap();
    assert!(form.h[1].agrees_with(&poly(&["-1"], 8)));
}

#[test]
fn real_normal_form_levi_flat() {
    let form = Hypersurface::new(2, Series2::<GaussRat>::eta(3, 6))
        .real_normal_form()
        .unwrap();
    assert!(form.h.iter().all(Series1::is_zero));
}

#[test]
fn real_normal_form_rejects_non_real() {
    let fam = hand_psi(1, Sign::Positive, &poly(&["1i"], 6), 4, 6);
    let rho = fam.rho().unwrap();
    assert!(rho.real_normal_form().is_err());
}
