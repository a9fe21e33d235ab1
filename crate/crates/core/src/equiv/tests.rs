use super::*;
use crate::scalar::GaussRat;
use crate::segre::{solve_psi, Sign};

type Pair = FormalSolutionPair<GaussRat>;

fn q(s: &str) -> GaussRat {
    s.parse().unwrap()
}

fn poly(coeffs: &[&str], n: i64) -> Series1<GaussRat> {
    Series1::from_coeffs(coeffs.iter().map(|c| q(c)).collect(), n)
}

fn pair(m: i64, beta: i64, n: i64) -> Pair {
    formal_solutions(m, &rat(beta, 1), n).unwrap()
}

fn hypersurface(m: i64, beta: i64, nx: usize, ny: usize) -> Hypersurface<GaussRat> {
    let ode = AdmissibleOde::family(m, &rat(beta, 1), ny as i64).unwrap();
    solve_psi(&ode, Sign::Positive, nx, ny).unwrap().rho().unwrap()
}

#[test]
fn f_for_beta_one() {
    let p = pair(2, 1, 12);
    assert_eq!(p.f.coeffs_from(0)[..3], [q("1"), q("1/2i"), q("1/8")]);
    // oracle: substitute into w²f'' = (2i − 2w)f' + f
    let (rf, ru) = p.residuals();
    assert!(rf.is_zero() && ru.is_zero());
    assert!(rf.trunc() >= 12);
}

#[test]
fn f_terminates_for_beta_two() {
    let p = pair(2, 2, 15);
    assert!(p.f.agrees_with(&poly(&["1", "1i"], 15)));
}

#[test]
fn u_is_conjugate_of_f_for_real_beta() {
    for (m, beta) in [(2, 1), (2, 3), (3, 5)] {
        let p = pair(m, beta, 14);
        assert!(p.u.agrees_with(&p.f.conj()));
    }
    let p: Pair = formal_solutions(2, &rat(-7, 3), 10).unwrap();
    assert!(p.u.agrees_with(&p.f.conj()));
}

#[test]
fn f_support_is_multiples_of_m_minus_one() {
    let p = pair(3, 1, 20);
    for (k, _) in p.f.terms() {
        assert_eq!(k % 2, 0);
    }
    let (rf, ru) = p.residuals();
    assert!(rf.is_zero() && ru.is_zero());
}

#[test]
fn formal_solutions_need_m_at_least_two() {
    assert!(formal_solutions::<GaussRat>(1, &rat(1, 1), 5).is_err());
}

#[test]
fn chi_tau_trivial_for_beta_zero() {
    let map = pair(2, 0, 10).chi_tau().unwrap();
    assert!(map.f().agrees_with(&Series1::one(10)));
    assert!(map.g().agrees_with(&Series1::var(10)));
}

#[test]
fn chi_tau_is_special() {
    for beta in [1, 2, 3, -1] {
        let map = pair(2, beta, 12).chi_tau().unwrap();
        assert!(map.is_special(2));
        assert!(map.g().coeff(2).is_zero());
    }
    let map = pair(3, 2, 12).chi_tau().unwrap();
    assert!(map.is_special(3));
}

#[test]
fn chi_tau_pulls_flat_equation_to_family() {
    let e0 = AdmissibleOde::family(2, &rat(0, 1), 40).unwrap();
    for beta in [1, 2, 3] {
        let map = pair(2, beta, 24).chi_tau().unwrap();
        let back = e0.pullback(&map, 2).unwrap();
        let target = AdmissibleOde::family(2, &rat(beta, 1), 40).unwrap();
        assert_eq!(back.mismatch(&target), None);
        assert!(back.trunc() >= 20, "trunc {}", back.trunc());
    }
}

#[test]
fn coupled_map_of_identity() {
    let g = coupled_map_g(&GaugeMap::<GaussRat>::identity(10), 2).unwrap();
    assert!(g.f().agrees_with(&Series1::one(10)));
    assert!(g.g().agrees_with(&Series1::var(10)));
}

#[test]
fn coupled_map_is_conjugate() {
    let map = pair(2, 1, 16).chi_tau().unwrap();
    let g = coupled_map_g(&map, 2).unwrap();
    assert!(g.f().agrees_with(&map.f().conj()));
    assert!(g.g().agrees_with(&map.g().conj()));
}

#[test]
fn coupled_map_defining_equation() {
    let gmap = w_over(10);
    let g = coupled_map_g(&gmap, 2).unwrap();
    // η^m g' = μ^m f λ with f = 1
    let lhs = gmap.g().derivative().shift(2);
    let rhs = g.g().powi(2).unwrap().mul(g.f());
    assert!(lhs.sub(&rhs).is_zero());
}

fn w_over(n: i64) -> GaugeMap<GaussRat> {
    // (1, w/(1 − w²))
    let g = Series1::var(n).div(&poly(&["1", "0", "-1"], n)).unwrap();
    GaugeMap::new(Series1::one(n), g).unwrap()
}

#[test]
fn map_residual_identity_flat() {
    let h0 = hypersurface(2, 0, 4, 10);
    let r = map_residual(&h0, &h0, &GaugeMap::identity(12)).unwrap();
    assert!(r.is_zero());
}

#[test]
fn map_residual_chi_tau() {
    let h0 = hypersurface(2, 0, 5, 12);
    let h1 = hypersurface(2, 1, 5, 12);
    let map = pair(2, 1, 14).chi_tau().unwrap();
    let r = map_residual(&h1, &h0, &map).unwrap();
    assert_eq!(r.rect(), (5, 12));
    assert!(r.is_zero());
}

#[test]
fn map_residual_identity_mismatch() {
    let h0 = hypersurface(2, 0, 4, 10);
    let h1 = hypersurface(2, 1, 4, 10);
    let r = map_residual(&h1, &h0, &GaugeMap::identity(12)).unwrap();
    let (j, _, _) = r.first_nonzero().expect("families differ");
    assert!(j >= 1);
}

#[test]
fn probe_flat_family_rigid() {
    let e0 = AdmissibleOde::<GaussRat>::family(2, &rat(0, 1), 20).unwrap();
    let rep = self_map_probe(&e0, 12).unwrap();
    assert_eq!(rep.levels.len(), 12);
    assert!(rep.is_rigid());
    assert!(rep.is_identity());
    assert_eq!(rep.verified_degree, 13);
}

#[test]
fn probe_beta_one_rigid() {
    let e1 = AdmissibleOde::<GaussRat>::family(2, &rat(1, 1), 20).unwrap();
    let rep = self_map_probe(&e1, 12).unwrap();
    assert!(rep.is_rigid());
    assert!(rep.is_identity());
}

#[test]
fn probe_flat_equation_has_freedom() {
    let flat = AdmissibleOde::<GaussRat>::new(1, Series1::zero(20), Series1::zero(20)).unwrap();
    let rep = self_map_probe(&flat, 6).unwrap();
    assert_eq!(rep.levels[0].dimension, Some(1));
    assert_eq!(rep.levels[0].kernel, vec![(q("1"), q("1"))]);
    assert!(!rep.is_rigid());
}
