use super::*;
use crate::equiv::formal_solutions;
use crate::scalar::GaussRat;
use crate::series::rat;
use num_bigint::BigInt;
use num_rational::BigRational;

fn f_of(m: i64, beta: i64, n: i64) -> Series1<GaussRat> {
    formal_solutions(m, &rat(beta, 1), n).unwrap().f
}

fn from_rationals(c: Vec<BigRational>, n: i64) -> Series1<GaussRat> {
    Series1::from_coeffs(c.iter().map(GaussRat::from_rational).collect(), n)
}

#[test]
fn inverse_factorials_have_order_minus_one() {
    let mut fact = BigInt::from(1);
    let mut c = vec![];
    for k in 0..=120i64 {
        if k > 0 {
            fact *= k;
        }
        c.push(BigRational::new(1.into(), fact.clone()));
    }
    let r = gevrey_estimate(&from_rationals(c, 120), (10, 120)).unwrap();
    assert!((r.gevrey + 1.0).abs() < 0.1, "s = {}", r.gevrey);
    assert!(r.interval.0 <= r.gevrey && r.gevrey <= r.interval.1);
}

#[test]
fn geometric_series() {
    let c = (0..=100)
        .map(|k| BigRational::from_integer(BigInt::from(2).pow(k)))
        .collect();
    let r = gevrey_estimate(&from_rationals(c, 100), (10, 100)).unwrap();
    assert!(r.gevrey.abs() < 0.05, "s = {}", r.gevrey);
    assert!((r.radius - 0.5).abs() < 1e-9);
    assert!((r.log_a - 2f64.ln()).abs() < 0.2);
}

#[test]
fn convergent_rational_series() {
    let c = vec![BigRational::from_integer(1.into()); 101];
    let r = gevrey_estimate(&from_rationals(c, 100), (32, 100)).unwrap();
    assert!(r.gevrey <= 0.15);
}

#[test]
fn f_beta_one_is_gevrey_one() {
    let f = f_of(2, 1, 200);
    // oracle: |f_{k+1}/f_k| = |k(k+1) − 1| / (2(k+1)) → k/2
    let k = 150;
    let ratio = (f.coeff(k + 1).ln_abs() - f.coeff(k).ln_abs()).exp();
    let expected = ((k * (k + 1) - 1) as f64) / (2.0 * (k + 1) as f64);
    assert!((ratio / expected - 1.0).abs() < 1e-9);
    let r = gevrey_estimate(&f, (32, 180)).unwrap();
    assert!((0.8..=1.2).contains(&r.gevrey), "s = {}", r.gevrey);
    assert!(!r.termination.terminated());
}

#[test]
fn window_shifts_are_stable() {
    let f = f_of(2, 1, 200);
    let base = gevrey_estimate(&f, (32, 180)).unwrap().gevrey;
    for (lo, hi) in [(22, 170), (42, 190), (22, 190), (42, 170)] {
        let s = gevrey_estimate(&f, (lo, hi)).unwrap().gevrey;
        assert!((s - base).abs() <= 0.1, "window ({lo},{hi}): {s} vs {base}");
    }
}

#[test]
fn sparse_support_uses_nonzero_terms() {
    let f = f_of(3, 1, 200);
    let r = gevrey_estimate(&f, (32, 180)).unwrap();
    assert_eq!(r.points, 75);
    assert!(r.gevrey > 0.5, "s = {}", r.gevrey);
}

#[test]
fn termination_on_resonant_grid() {
    for j in 0..=5 {
        let beta = j * (j + 1);
        let t = termination_detect(&f_of(2, beta, 60), DEFAULT_TAIL);
        assert_eq!(t, Termination::At(j), "beta = {beta}");
    }
    for beta in [1, 3, 5, 7] {
        assert_eq!(
            termination_detect(&f_of(2, beta, 60), DEFAULT_TAIL),
            Termination::Open
        );
    }
}

#[test]
fn termination_examples() {
    assert_eq!(
        termination_detect(&f_of(2, 2, 30), DEFAULT_TAIL),
        Termination::At(1)
    );
    assert_eq!(
        termination_detect(&Series1::<GaussRat>::zero(10), DEFAULT_TAIL),
        Termination::Zero
    );
    let r = gevrey_estimate(&f_of(2, 2, 60), (32, 60)).unwrap();
    assert_eq!(r.gevrey, 0.0);
    assert!(r.radius.is_infinite());
}

#[test]
fn too_few_points() {
    let f = f_of(2, 1, 20);
    assert!(gevrey_estimate(&f, (18, 20)).is_err());
}
