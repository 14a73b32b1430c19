use cfrac::{convergents, ContinuedFraction};
use circlemap::*;
use numerics::*;
use partition::*;
use rug::Float;

const B: u32 = 256;

fn rigid(cf: &ContinuedFraction) -> CircleMapSpec {
    make_rigid(&cf.value_real(B))
}

fn golden_bicubic() -> CircleMapSpec {
    let beta = real(B, 0.5);
    tune(|w: &Real| make_bicubic(w, &beta), &ContinuedFraction::golden(80), 24, &pow2(B, -30)).unwrap().spec
}

fn silver_bicubic() -> CircleMapSpec {
    let beta = real(B, 0.5);
    tune(|w: &Real| make_bicubic(w, &beta), &ContinuedFraction::silver(60), 14, &pow2(B, -30)).unwrap().spec
}

fn cf_q(cf: &ContinuedFraction, n: usize) -> Vec<u64> {
    convergents(cf, n).unwrap().q.iter().map(|q| q.to_u64().unwrap()).collect()
}

#[test]
fn rigid_golden_returns_are_fibonacci() {
    let rt = closest_returns(&rigid(&ContinuedFraction::golden(80)), &real(B, 0.0), 8).unwrap();
    assert_eq!(rt.q, vec![1, 1, 2, 3, 5, 8, 13, 21, 34]);
}

#[test]
fn rigid_silver_returns_follow_convergents() {
    let cf = ContinuedFraction::silver(80);
    let rt = closest_returns(&rigid(&cf), &real(B, 0.0), 6).unwrap();
    assert_eq!(rt.q, vec![1, 2, 5, 12, 29, 70, 169]);
    assert_eq!(rt.q, cf_q(&cf, 6));
}

#[test]
fn returns_alternate_and_shrink() {
    let f = golden_bicubic();
    let rt = closest_returns(&f, &real(B, 0.0), 14).unwrap();
    assert_eq!(rt.q, cf_q(&ContinuedFraction::golden(20), 14));
    for n in 1..rt.len() {
        let expected_positive = n % 2 == 0;
        assert_eq!(rt.residual[n].is_sign_positive(), expected_positive, "level {n}");
    }
    // same-side returns are nested at every level; consecutive distances
    // only decrease once the second critical point stops interfering
    let d: Vec<Real> = rt.residual.iter().map(|r| r.clone().abs()).collect();
    for n in 2..d.len() {
        assert!(d[n] < d[n - 2]);
    }
    for n in 5..d.len() {
        assert!(d[n] < d[n - 1], "level {n}");
    }
}

#[test]
fn returns_at_a_generic_base_point() {
    let f = golden_bicubic();
    let rt = closest_returns(&f, &real(B, 0.3), 12).unwrap();
    assert_eq!(rt.q, cf_q(&ContinuedFraction::golden(20), 12));
}

#[test]
fn level_zero_rigid_partition() {
    let w = ContinuedFraction::golden(80).value_real(B);
    let p = build_partition(&make_rigid(&w), &real(B, 0.0), 0).unwrap();
    assert_eq!(p.count(), 2);
    let lens: Vec<f64> = p.circle_order().iter().map(|iv| iv.length().to_f64()).collect();
    let w = w.to_f64();
    assert!((lens[0] - w).abs() < 1e-15 || (lens[0] - (1.0 - w)).abs() < 1e-15);
    assert!((lens[0] + lens[1] - 1.0).abs() < 1e-15);
}

#[test]
fn rigid_lengths_match_three_distance_values() {
    let cf = ContinuedFraction::periodic(&[1, 3, 2], 90);
    let w = cf.value_real(B);
    let f = make_rigid(&w);
    let tol = pow2(B, 24 - B as i32);
    for n in 1..10 {
        let p = build_partition(&f, &real(B, 0.0), n).unwrap();
        let c = convergents(&cf, n + 1).unwrap();
        // |I_n| = |q_n ω − p_n|
        let exact = |k: usize| (Float::with_val(B, &w * &c.q[k]) - &c.p[k]).abs();
        for iv in &p.long_intervals {
            assert!(Float::with_val(B, iv.length() - exact(n)).abs() <= tol);
        }
        for iv in &p.short_intervals {
            assert!(Float::with_val(B, iv.length() - exact(n + 1)).abs() <= tol);
        }
    }
}

#[test]
fn bicubic_partition_counts_and_covering() {
    let f = golden_bicubic();
    let q = cf_q(&ContinuedFraction::golden(20), 14);
    for n in 0..=10 {
        let p = build_partition(&f, &real(B, 0.0), n).unwrap();
        assert_eq!(p.count() as u64, q[n] + q[n + 1]);
        let bound = pow2(B, 20 - B as i32) * q[n + 1];
        assert!(p.covering().defect() <= bound, "level {n}");
    }
    assert_eq!(build_partition(&f, &real(B, 0.0), 5).unwrap().count(), 21);
}

#[test]
fn golden_refinement_splits_in_two() {
    let f = golden_bicubic();
    for n in 1..9 {
        let a = build_partition(&f, &real(B, 0.0), n).unwrap();
        let b = build_partition(&f, &real(B, 0.0), n + 1).unwrap();
        let r = refinement_check(&a, &b).unwrap();
        assert!(r.pass, "level {n}: {:?}", r.pieces);
        assert!(r.pieces.iter().all(|&p| p == (1, 1)));
    }
}

#[test]
fn silver_refinement_splits_in_three() {
    let f = silver_bicubic();
    for n in 1..7 {
        let a = build_partition(&f, &real(B, 0.0), n).unwrap();
        let b = build_partition(&f, &real(B, 0.0), n + 1).unwrap();
        let r = refinement_check(&a, &b).unwrap();
        assert_eq!(r.expected_long, 2);
        assert!(r.pass, "level {n}: {:?}", r.pieces);
        assert!(r.pieces.iter().all(|&p| p == (2, 1)));
    }
}

#[test]
fn refinement_rejects_mismatched_partitions() {
    let f = rigid(&ContinuedFraction::golden(80));
    let a = build_partition(&f, &real(B, 0.0), 3).unwrap();
    let b = build_partition(&f, &real(B, 0.1), 4).unwrap();
    assert!(matches!(refinement_check(&a, &b), Err(PartitionError::LevelsNotConsecutive)));
    let c = build_partition(&f, &real(B, 0.0), 5).unwrap();
    assert!(matches!(refinement_check(&a, &c), Err(PartitionError::LevelsNotConsecutive)));
}

#[test]
fn rigid_golden_commensurability_bound() {
    let w = ContinuedFraction::golden(80).value_real(B);
    let cs = commensurability(&make_rigid(&w), &real(B, 0.0), 2..=12).unwrap();
    let bound = 1.0 / (w.to_f64() * w.to_f64()) + 1e-9;
    for c in cs {
        assert!(c.c.to_f64() <= bound, "{} at {}", c.c.to_f64(), c.level);
        assert!(!c.pre_asymptotic);
    }
}

#[test]
fn bicubic_commensurability_is_beau() {
    let f = golden_bicubic();
    let cs = commensurability(&f, &real(B, 0.0), 1..=10).unwrap();
    let window: Vec<f64> = cs.iter().filter(|c| c.level >= 5).map(|c| c.c.to_f64()).collect();
    assert!(window.iter().all(|c| c.is_finite()));
    let mut sorted = window.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let max = *sorted.last().unwrap();
    assert!(max <= 3.0 * median && max >= median / 3.0);
    // the second critical point sits near I_n(0) at coarse levels only
    assert!(cs[0].pre_asymptotic || cs.iter().all(|c| !c.pre_asymptotic));
    assert!(!cs.last().unwrap().pre_asymptotic);
}

#[test]
fn csv_export_has_one_row_per_interval() {
    let f = rigid(&ContinuedFraction::golden(80));
    let p = build_partition(&f, &real(B, 0.0), 4).unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "level,type,index,left,right,length");
    assert_eq!(lines.len(), 1 + p.count());
    assert!(lines[1].starts_with("4,long,0,"));
}
