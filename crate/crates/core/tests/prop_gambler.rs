use proptest::prelude::*;
use ruinlab::exactnum::DyadicRational;
use ruinlab::gambler::*;

fn start() -> impl Strategy<Value = DyadicRational> {
    (1i64..40 * 16).prop_map(|m| DyadicRational::new(m, -4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_identities_hold(x in start(), p in 0.0f64..1.0, seed in any::<u64>(), stream in any::<u64>()) {
        let mut rng = StreamRng::new(seed, stream);
        prop_assert!(verify_closed_form(&x, p, 200, &mut rng).unwrap());
        let mut rng = StreamRng::new(seed, stream);
        prop_assert!(verify_path_identities(&x, p, 200, &mut rng).unwrap());
    }

    #[test]
    fn blocks_sum_to_partial(p in 0.0f64..0.45, seed in any::<u64>(), count in 1usize..12) {
        let mut rng = StreamRng::new(seed, 0);
        let s = sample_blocks(p, count, DEFAULT_BLOCK_STEP_CAP, &mut rng).unwrap();
        prop_assert!(s.is_consistent());
        prop_assert_eq!(s.blocks.len(), count);
    }

    #[test]
    fn z_chain_recursion(p in 0.05f64..0.45, k in 1u32..6, seed in any::<u64>()) {
        let mut rng = StreamRng::new(seed, 3);
        let chain = z_chain(p, k, 6, &DigitSettings::default(), &mut rng).unwrap();
        let (checked, holds) = chain.recursion_check();
        prop_assert_eq!(checked, holds);
    }

    #[test]
    fn coupling_dominates(p1 in 0.0f64..1.0, p2 in 0.0f64..1.0, u1 in 0.0f64..1.0, u2 in 0.0f64..1.0) {
        let (lo, hi) = (p1.min(p2), p1.max(p2));
        let (a, b) = coupled_pair(lo, hi, u1, u2);
        prop_assert!(a <= b);
    }

    #[test]
    fn digit_windows_match_floor(m in any::<u32>(), e in -40i64..0, j in 0u32..8, k in 1u32..8) {
        let x = DyadicRational::new(m, e);
        let expected = (x.floor_mul_pow2((j + k) as i64) % (1u64 << k)).to_u64_digits().1.first().copied().unwrap_or(0);
        prop_assert_eq!(digit_of(&x, j, k), expected);
    }
}
