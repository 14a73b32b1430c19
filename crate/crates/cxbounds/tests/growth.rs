use cfrac::ContinuedFraction;
use circlemap::*;
use cxbounds::*;
use numerics::*;
use renorm::renorm_orbit;

const B: u32 = 128;

#[test]
fn bicubic_renormalizations_grow_like_cubes() {
    let beta = real(B, 0.5);
    let spec = tune(|w: &Real| make_bicubic(w, &beta), &ContinuedFraction::golden(80), 24, &pow2(B, -30)).unwrap().spec;
    let orbit = renorm_orbit(&spec, 10);
    assert!(orbit.error.is_none());
    let pairs: Vec<_> = orbit.pairs.into_iter().filter(|p| p.pair.level >= 4).collect();
    assert_eq!(pairs.len(), 7);
    let rep = growth_check(&pairs, &real(B, 2.0), 200).unwrap();
    assert_eq!(rep.d, 3);
    assert!(rep.success);
    let cs: Vec<f64> = rep.per_level.iter().map(|l| l.fit.slope.to_f64()).collect();
    let (lo, hi) = cs.iter().fold((f64::MAX, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    assert!(lo > 0.0 && hi / lo <= 5.0, "{cs:?}");
    // z = 0 is a sample with |η̃(0)| = 1
    for l in &rep.per_level {
        assert!(l.fit.intercept <= 1u32);
    }
    assert!(rep.c().is_sign_positive());
}

#[test]
fn rigid_pairs_are_rejected() {
    let spec = make_rigid(&ContinuedFraction::golden(120).value_real(B));
    let orbit = renorm_orbit(&spec, 4);
    assert_eq!(orbit.pairs.len(), 4);
    assert!(matches!(growth_check(&orbit.pairs, &real(B, 2.0), 50), Err(CxError::NotCritical)));
}

#[test]
fn radius_below_one_is_rejected() {
    assert!(matches!(growth_check(&[], &real(B, 0.5), 50), Err(CxError::RadiusTooSmall(_))));
}
