use cxbounds::*;
use numerics::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const B: u32 = 128;

fn disk(a: f64, b: f64, theta: f64) -> PoincareDisk {
    PoincareDisk::new(Interval { lo: real(B, a), hi: real(B, b) }, real(B, theta)).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn diameter_closed_forms() {
    let pi = std::f64::consts::PI;
    let right = Float::with_val(B, numerics::pi(B) / 2u32);
    let d = PoincareDisk::new(Interval { lo: real(B, 0.0), hi: real(B, 1.0) }, right).unwrap().diameter();
    assert!(Float::with_val(B, d - 1u32).abs() < pow2(B, -120));
    assert!(close(poincare_diameter(&disk(-1.0, 1.0, pi / 3.0)), 2.0 * 3f64.sqrt(), 1e-15));
    // the caps collapse onto J
    assert!(close(disk(0.0, 1.0, pi - 1e-9).diameter().to_f64(), 1.0, 1e-15));
    assert!(hyperbolic_radius(&numerics::pi(B)).to_f64().abs() < 1e-30);
}

fn poincare_diameter(pd: &PoincareDisk) -> f64 {
    cxbounds::poincare_diameter(pd).to_f64()
}

/// Boundary of the two-cap region: the arc over J from b to a, and its mirror.
fn boundary(len: f64, theta: f64, per_arc: usize) -> Vec<(f64, f64)> {
    let half = len / 2.0;
    let h = half / theta.tan();
    let r = half / theta.sin();
    let start = (-h).atan2(half);
    let end = std::f64::consts::PI - start;
    let mut pts = Vec::with_capacity(2 * per_arc + 2);
    for k in 0..=per_arc {
        let phi = start + (end - start) * k as f64 / per_arc as f64;
        let (x, y) = (r * phi.cos(), h + r * phi.sin());
        pts.push((x, y));
        pts.push((x, -y));
    }
    pts
}

#[test]
fn diameter_matches_boundary_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let theta: f64 = rng.gen_range(0.05..3.1);
        let len: f64 = rng.gen_range(0.01..10.0);
        let pts = boundary(len, theta, 2500);
        let mut best = 0.0f64;
        for i in 0..pts.len() {
            for p in &pts[i + 1..] {
                best = best.max((pts[i].0 - p.0).hypot(pts[i].1 - p.1));
            }
        }
        let d = disk(0.0, len, theta).diameter().to_f64();
        assert!(close(d, best, 1e-6), "theta {theta} len {len}: {d} vs {best}");
    }
}

#[test]
fn membership_of_chord_and_circle() {
    let pi = std::f64::consts::PI;
    for theta in [0.3, pi / 2.0, 2.5] {
        assert!(disk(-1.0, 3.0, theta).contains(&Cx::from_f64(B, 1.0, 0.0)));
    }
    let right = Float::with_val(B, numerics::pi(B) / 2u32);
    let d = PoincareDisk::new(Interval { lo: real(B, -1.0), hi: real(B, 1.0) }, right).unwrap();
    assert!(poincare_contains(&d, &Cx::new(real(B, 0.0), real(B, 1.0))));
    assert!(!d.contains(&Cx::new(real(B, 0.0), Float::with_val(B, 1u32 + &pow2(B, -100)))));
    assert!(!d.contains(&Cx::from_f64(B, 1.5, 0.0)));
}

#[test]
fn smaller_angle_gives_larger_region() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let t1: f64 = rng.gen_range(0.05..3.0);
        let t2: f64 = rng.gen_range(t1..3.1);
        let z = Cx::from_f64(B, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if disk(-1.0, 1.0, t2).contains(&z) {
            assert!(disk(-1.0, 1.0, t1).contains(&z));
        }
    }
}

/// Hyperbolic distance from z to J in ℂ_J: (z − a)/(b − z) sends ℂ_J to the
/// plane slit along (−∞, 0], the square root then to the right half plane
/// with J on the positive axis, where cosh d = |w|/Re w.
fn hyperbolic_distance(z: (f64, f64), a: f64, b: f64) -> f64 {
    let num = (z.0 - a, z.1);
    let den = (b - z.0, -z.1);
    let dd = den.0 * den.0 + den.1 * den.1;
    let q = ((num.0 * den.0 + num.1 * den.1) / dd, (num.1 * den.0 - num.0 * den.1) / dd);
    let m = q.0.hypot(q.1);
    let w = (((m + q.0) / 2.0).sqrt(), (((m - q.0) / 2.0).sqrt()).copysign(q.1));
    (w.0.hypot(w.1) / w.0).acosh()
}

#[test]
fn membership_agrees_with_hyperbolic_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 100 {
        let theta: f64 = rng.gen_range(0.1..3.0);
        let z = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let d = hyperbolic_distance(z, -1.0, 1.0);
        let r = hyperbolic_radius(&real(B, theta)).to_f64();
        if (d - r).abs() < 1e-9 {
            continue;
        }
        assert_eq!(disk(-1.0, 1.0, theta).contains(&Cx::from_f64(B, z.0, z.1)), d <= r, "z {z:?} theta {theta}");
        checked += 1;
    }
}

#[test]
fn angles_to_an_interval() {
    let j = Interval { lo: real(B, -1.0), hi: real(B, 1.0) };
    let high = angle_to_interval(&Cx::from_f64(B, 0.0, 1e12), &j).unwrap().to_f64();
    assert!((high - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    assert!(angle_to_interval(&Cx::from_f64(B, 2.0, 0.0), &j).unwrap().is_zero());
    let unit = Interval { lo: real(B, 0.0), hi: real(B, 1.0) };
    let s = Float::with_val(B, 2u32).sqrt() / 2u32;
    let z = Cx::new(Float::with_val(B, 1u32 + &s), s);
    let a = angle_to_interval(&z, &unit).unwrap();
    let quarter = Float::with_val(B, numerics::pi(B) / 4u32);
    assert!(Float::with_val(B, &a - &quarter).abs() < pow2(B, -120));
    assert!(matches!(angle_to_interval(&Cx::from_f64(B, 1.0, 0.0), &unit), Err(CxError::DegeneratePoint)));
}

#[test]
fn rejects_bad_angles() {
    let j = Interval { lo: real(B, 0.0), hi: real(B, 1.0) };
    assert!(PoincareDisk::new(j.clone(), real(B, 0.0)).is_err());
    assert!(PoincareDisk::new(j, numerics::pi(B)).is_err());
}
