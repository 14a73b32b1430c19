use cfrac::*;
use proptest::prelude::*;
use rug::Integer;

proptest! {
    #[test]
    fn expansion_round_trips_through_value(qs in prop::collection::vec(1u64..9, 1..20)) {
        let cf = ContinuedFraction::new(qs.clone());
        let x = cf.value_real(512);
        prop_assume!(x < 1);
        let back = cf_expand(&x, qs.len()).map(|c| c.quotients).unwrap_or_else(|e| match e {
            CfError::PrecisionExhausted { partial } => partial.quotients,
            e => panic!("{e}"),
        });
        // the rational [.., a_k] with a_k = 1 also reads as [.., a_{k-1}+1]
        let v = ContinuedFraction { quotients: back, terminated: true }.value();
        prop_assert_eq!(v, cf.value());
    }

    #[test]
    fn convergent_gap_is_reciprocal_product(qs in prop::collection::vec(1u64..6, 3..25)) {
        let cf = ContinuedFraction::new(qs.clone());
        let c = convergents(&cf, qs.len()).unwrap();
        for n in 1..qs.len() {
            // |p_{n+1} q_n - p_n q_{n+1}| = 1
            let d = Integer::from(&c.p[n + 1] * &c.q[n]) - Integer::from(&c.p[n] * &c.q[n + 1]);
            prop_assert_eq!(d.abs(), 1);
        }
    }
}
