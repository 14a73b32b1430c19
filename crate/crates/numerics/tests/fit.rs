use numerics::*;
use proptest::prelude::*;
use rug::Float;

const P: u32 = 256;

fn v(xs: &[f64]) -> Vec<Real> {
    xs.iter().map(|x| real(P, *x)).collect()
}

#[test]
fn exact_line() {
    let f = linear_fit(&v(&[0.0, 1.0, 2.0]), &v(&[1.0, 3.0, 5.0])).unwrap();
    assert_eq!(f.slope, 2);
    assert_eq!(f.intercept, 1);
    assert_eq!(f.r_squared, 1);
}

#[test]
fn constant_data() {
    let f = linear_fit(&v(&[0.0, 1.0]), &v(&[7.5, 7.5])).unwrap();
    assert_eq!(f.slope, 0);
    assert_eq!(f.intercept, 7.5);
    assert_eq!(f.r_squared, 1);
}

#[test]
fn hand_normal_equations() {
    // xs 0,1,2 ys 0,1,1: slope 1/2, intercept 1/6, r² 3/4
    let f = linear_fit(&v(&[0.0, 1.0, 2.0]), &v(&[0.0, 1.0, 1.0])).unwrap();
    assert_eq!(f.slope, 0.5);
    let sixth = Float::with_val(P, 1) / 6u32;
    assert!(Float::with_val(P, &f.intercept - &sixth).abs() < 1e-70);
    assert!(Float::with_val(P, &f.r_squared - 0.75).abs() < 1e-70);
}

#[test]
fn equal_abscissae_rejected() {
    assert!(linear_fit(&v(&[1.0, 1.0]), &v(&[0.0, 2.0])).is_err());
    assert!(upper_envelope_fit(&v(&[1.0, 1.0]), &v(&[0.0, 2.0])).is_err());
    assert!(linear_fit(&v(&[1.0]), &v(&[0.0])).is_err());
}

#[test]
fn envelope_of_two_points() {
    let f = upper_envelope_fit(&v(&[0.0, 1.0]), &v(&[1.0, 2.0])).unwrap();
    assert_eq!((f.slope.to_f64(), f.intercept.to_f64()), (1.0, 1.0));
}

#[test]
fn envelope_of_zeros() {
    let f = upper_envelope_fit(&v(&[0.0, 1.0, 2.0]), &v(&[0.0, 0.0, 0.0])).unwrap();
    assert_eq!((f.slope.to_f64(), f.intercept.to_f64()), (0.0, 0.0));
}

#[test]
fn envelope_dominates_concave_triple() {
    // (1,3) sits above the chord from (0,1) to (2,4), so the chord cannot be
    // the envelope; the leftmost hull edge (0,1)-(1,3) is.
    let xs = v(&[0.0, 1.0, 2.0]);
    let ys = v(&[1.0, 3.0, 4.0]);
    let f = upper_envelope_fit(&xs, &ys).unwrap();
    assert_eq!((f.slope.to_f64(), f.intercept.to_f64()), (2.0, 1.0));
    for (x, y) in xs.iter().zip(&ys) {
        assert!(*y <= Float::with_val(P, &f.slope * x) + &f.intercept);
    }
}

#[test]
fn lower_envelope_takes_rightmost_edge() {
    let xs = v(&[0.0, 1.0, 2.0, 3.0]);
    let ys = v(&[1.0, 0.0, 0.5, 2.0]);
    let f = lower_envelope_fit(&xs, &ys).unwrap();
    assert_eq!((f.slope.to_f64(), f.intercept.to_f64()), (1.5, -2.5));
}

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*seed >> 11) as f64 / (1u64 << 53) as f64
}

proptest! {
    #[test]
    fn exact_lines_to_one_ulp(a in -100000i64..100000, b in -100i32..100, k in 0u32..40, n in 2usize..12) {
        // dyadic slope so every sample is exactly representable
        let slope = Float::with_val(P, a) >> k;
        let xs: Vec<Real> = (0..n).map(|i| real(P, i as f64)).collect();
        let ys: Vec<Real> = xs.iter().map(|x| Float::with_val(P, &slope * x) + b).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        let ulp = Float::with_val(P, slope.clone().abs()) >> (P as i32 - 1);
        prop_assert!(Float::with_val(P, &f.slope - &slope).abs() <= ulp);
    }

    #[test]
    fn upper_envelope_dominates_samples(seed in any::<u64>(), n in 2usize..40) {
        let mut s = seed;
        let xs: Vec<Real> = (0..n).map(|_| real(P, lcg(&mut s) * 10.0)).collect();
        let ys: Vec<Real> = (0..n).map(|_| real(P, lcg(&mut s) * 3.0 - 1.0)).collect();
        prop_assume!(xs.iter().any(|x| *x != xs[0]));
        let f = upper_envelope_fit(&xs, &ys).unwrap();
        let slack = real(P, 1e-60);
        for (x, y) in xs.iter().zip(&ys) {
            let line = Float::with_val(P, &f.slope * x) + &f.intercept;
            prop_assert!(Float::with_val(P, y - &line) <= slack);
        }
        let g = lower_envelope_fit(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            let line = Float::with_val(P, &g.slope * x) + &g.intercept;
            prop_assert!(Float::with_val(P, &line - y) <= slack);
        }
    }

    #[test]
    fn r_squared_in_unit_interval(seed in any::<u64>(), n in 3usize..30) {
        let mut s = seed;
        let xs: Vec<Real> = (0..n).map(|i| real(P, i as f64)).collect();
        let ys: Vec<Real> = (0..n).map(|_| real(P, lcg(&mut s))).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        prop_assert!(f.r_squared >= 0 && f.r_squared <= 1);
    }
}
