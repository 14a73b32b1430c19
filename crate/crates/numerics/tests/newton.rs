use numerics::*;
use rug::Float;

const P: u32 = 256;

fn poly(roots: &[f64]) -> impl Fn(&Cx) -> (Cx, Cx) + '_ {
    move |w: &Cx| {
        // product and its derivative via the product rule
        let mut v = Cx::from_f64(P, 1.0, 0.0);
        let mut d = Cx::zero(P);
        for r in roots {
            let f = w.sub_real(&real(P, *r));
            d = &(&d * &f) + &v;
            v = &v * &f;
        }
        (v, d)
    }
}

#[test]
fn square_root_of_one_from_nearby_seed() {
    let tol = parse_real("1e-30", P).unwrap();
    let g = |w: &Cx| {
        let v = (w * w).sub_real(&real(P, 1.0));
        let d = w.scale(&real(P, 2.0));
        (v, d)
    };
    let w = newton_root(g, &Cx::from_f64(P, 0.9, 0.0), &tol, 50).unwrap();
    let err = Float::with_val(P, &w.re - 1u32).abs();
    assert!(err <= tol);
    assert!(w.im.is_zero());
}

#[test]
fn triple_root_converges_or_reports_vanishing_derivative() {
    let tol = parse_real("1e-30", P).unwrap();
    let g = |w: &Cx| {
        let w2 = w * w;
        (&w2 * w, w2.scale(&real(P, 3.0)))
    };
    match newton_root(g, &Cx::from_f64(P, 0.1, 0.0), &tol, 200) {
        Ok(w) => {
            let bound = Float::with_val(P, tol.cbrt_ref());
            assert!(w.abs() <= bound * 2u32);
        }
        Err(NumericsError::DerivativeVanished { .. }) => {}
        Err(e) => panic!("unexpected {e}"),
    }
}

#[test]
fn arcsine_of_one_half() {
    let tol = default_tol(P);
    let half = real(P, 0.5);
    let g = |w: &Cx| {
        let (s, c) = w.sin_cos();
        (s.sub_real(&half), c)
    };
    let w = newton_root(g, &Cx::from_f64(P, 0.5, 0.0), &tol, 50).unwrap();
    let oracle = Float::with_val(P, half.asin_ref());
    let err = Float::with_val(P, &w.re - &oracle).abs();
    assert!(err <= tol, "err {err}");
    assert!(w.re.to_f64() - 0.5235987755982988 < 1e-15);
}

#[test]
fn simple_roots_are_found_to_ten_tolerances() {
    let tol = default_tol(P);
    let sets: &[&[f64]] = &[&[0.5, -1.25, 3.0], &[2.0, -2.0], &[0.125, 0.75, 1.5, -0.5], &[1.0]];
    for roots in sets {
        for (k, r) in roots.iter().enumerate() {
            let seed = Cx::from_f64(P, r + 0.01 * (k as f64 + 1.0), 0.001);
            let w = newton_root(poly(roots), &seed, &tol, 100).unwrap();
            let dist = (&w - &Cx::from_f64(P, *r, 0.0)).abs();
            assert!(dist <= Float::with_val(P, &tol * 10u32), "root {r}: {dist}");
        }
    }
}

#[test]
fn complex_roots_of_quadratic() {
    // w² + 1 has roots ±i
    let tol = default_tol(P);
    let g = |w: &Cx| ((w * w).add_real(&real(P, 1.0)), w.scale(&real(P, 2.0)));
    let w = newton_root(g, &Cx::from_f64(P, 0.1, 0.8), &tol, 100).unwrap();
    let d = (&w - &Cx::from_f64(P, 0.0, 1.0)).abs();
    assert!(d <= Float::with_val(P, &tol * 10u32));
}

#[test]
fn guard_rejects_iterates_outside_region() {
    let tol = default_tol(P);
    let g = |w: &Cx| ((w * w).sub_real(&real(P, 4.0)), w.scale(&real(P, 2.0)));
    let opts = NewtonOptions::new(tol, 100);
    let r = newton_root_guarded(g, &Cx::from_f64(P, 0.5, 0.0), &opts, |w| w.re < 1.0);
    assert!(matches!(r, Err(NumericsError::Escaped { .. })));
}

#[test]
fn newton_is_bit_deterministic() {
    let tol = default_tol(P);
    let run = || {
        let g = |w: &Cx| {
            let (s, c) = w.sin_cos();
            (s.sub_real(&real(P, 0.25)), c)
        };
        newton_root(g, &Cx::from_f64(P, 0.3, 0.2), &tol, 100).unwrap()
    };
    assert_eq!(run(), run());
}
