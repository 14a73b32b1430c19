use cfrac::{compare_prefix, ContinuedFraction, PrefixOrder};
use circlemap::*;
use numerics::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

fn golden(prec: u32) -> Real {
    ContinuedFraction::golden(200).value_real(prec)
}

#[test]
fn rigid_golden_rotation() {
    let cf = rotation_number(&make_rigid(&golden(256)), 20).unwrap();
    assert_eq!(cf, ContinuedFraction::golden(20));
}

#[test]
fn rigid_half_terminates() {
    let cf = rotation_number(&make_rigid(&real(256, 0.5)), 10).unwrap();
    assert_eq!(cf.quotients, vec![2]);
    assert!(cf.terminated);
}

#[test]
fn rigid_random_bounded_type() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let q: Vec<u64> = (0..60).map(|_| rng.gen_range(1..=5)).collect();
        let cf = ContinuedFraction::new(q.clone());
        let got = rotation_number(&make_rigid(&cf.value_real(256)), 10).unwrap();
        assert_eq!(got.quotients, q[..10]);
    }
}

#[test]
fn periodic_orbit_is_rational() {
    // the single cubic at omega = 0 fixes 0: height infinite at the first level
    let cf = rotation_number(&make_single(&real(128, 0.0), 3).unwrap(), 5).unwrap();
    assert!(cf.terminated && cf.quotients.is_empty());
}

#[test]
fn rotation_number_is_monotone_in_omega() {
    let prec = 128;
    let beta = real(prec, 0.35);
    let mut prev: Option<ContinuedFraction> = None;
    for i in 1..50 {
        let w = Float::with_val(prec, i) / 50u32;
        let Ok(s) = make_bicubic(&w, &beta) else { continue };
        let cf = rotation_number(&s, 6).unwrap();
        if let Some(p) = &prev {
            assert_ne!(compare_prefix(p, &cf, 6), PrefixOrder::Greater, "at omega {}", w.to_f64());
        }
        prev = Some(cf);
    }
}

#[test]
fn tune_rigid_to_golden() {
    let tol = pow2(256, -30);
    let t = tune(|w: &Real| Ok(make_rigid(w)), &ContinuedFraction::golden(80), 10, &tol).unwrap();
    assert!(Float::with_val(256, t.spec.omega() - golden(256)).abs() <= tol);
}

#[test]
fn tune_single_cubic_to_golden() {
    let tol = pow2(256, -30);
    let t = tune(|w: &Real| make_single(w, 3), &ContinuedFraction::golden(80), 10, &tol).unwrap();
    assert!(t.depth >= 10);
    let w = t.spec.omega().to_f64();
    assert!(w > 0.0 && w < 1.0);
    let re = rotation_number(&t.spec, t.depth).unwrap();
    assert_eq!(re, ContinuedFraction::golden(t.depth));
}

#[test]
fn tune_bicubic_to_silver() {
    let beta = real(128, 0.5);
    let t = tune(|w: &Real| make_bicubic(w, &beta), &ContinuedFraction::silver(40), 10, &pow2(128, -12)).unwrap();
    assert_eq!(rotation_number(&t.spec, 10).unwrap(), ContinuedFraction::silver(10));
}

#[test]
fn tuned_bicubic_matches_birkhoff_average() {
    let beta = real(256, 0.5);
    let t = tune(|w: &Real| make_bicubic(w, &beta), &ContinuedFraction::golden(80), 24, &pow2(256, -30)).unwrap();
    assert_eq!(rotation_number(&t.spec, 24).unwrap(), ContinuedFraction::golden(24));
    let low = t.spec.with_precision(64).unwrap();
    let avg = birkhoff_rotation(&low, &real(64, 0.0), 1_000_000);
    assert!((avg.to_f64() - golden(64).to_f64()).abs() < 1e-6);
}

#[test]
fn tune_rejects_rational_target() {
    let target = ContinuedFraction { quotients: vec![2], terminated: true };
    assert!(matches!(
        tune(|w: &Real| Ok(make_rigid(w)), &target, 3, &pow2(128, -20)),
        Err(CircleMapError::TargetUnattainable(_))
    ));
}
