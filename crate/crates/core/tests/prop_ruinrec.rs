use proptest::prelude::*;
use ruinlab::exactnum::*;
use ruinlab::ruinrec::*;

/// `x` in (2, 33) with at most `2^-6` resolution.
fn start() -> impl Strategy<Value = DyadicRational> {
    (129i64..33 * 64).prop_map(|m| DyadicRational::new(m, -6))
}

/// `p = a / b` with `b <= 64`.
fn prob() -> impl Strategy<Value = BigRational> {
    (1i64..=64).prop_flat_map(|b| (0..=b).prop_map(move |a| BigRational::new(a.into(), b.into())))
}

fn exact_step(n: u32, p: &BigRational) -> StepFunction<BigRational> {
    iterate_step(n, p, DEFAULT_BREAKPOINT_BUDGET).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_engines_agree(x in start(), p in prob(), n in 0u32..=12) {
        let step = exact_step(n, &p).eval(&x);
        let point = pointwise_fn(&x, &p, n).unwrap();
        let poly = poly_fn(&x, n).unwrap().eval(&p);
        prop_assert_eq!(&step, &point);
        prop_assert_eq!(&step, &poly);
        let fwd = cumulative(&gap_sequence(&x, &p, n).unwrap());
        prop_assert_eq!(&fwd[n as usize], &step);
    }

    #[test]
    fn increasing_in_n(x in start(), p in prob(), n in 0u32..=11) {
        let a = pointwise_fn(&x, &p, n).unwrap();
        let b = pointwise_fn(&x, &p, n + 1).unwrap();
        prop_assert!(a <= b);
    }

    #[test]
    fn decreasing_in_x(x in start(), y in start(), p in prob(), n in 0u32..=12) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let f = exact_step(n, &p);
        prop_assert!(f.eval(&lo) >= f.eval(&hi));
        prop_assert!(f.validate().is_ok());
    }

    #[test]
    fn boundary_values(m in -200i64..=128, x in start(), n in 0u32..=12, p in prob()) {
        let low = DyadicRational::new(m, -6);
        prop_assert_eq!(pointwise_fn(&low, &p, n).unwrap(), BigRational::from_integer(1.into()));
        let zero = BigRational::from_integer(0.into());
        prop_assert_eq!(pointwise_fn(&x, &zero, n).unwrap(), zero.clone());
        if n == 0 {
            prop_assert_eq!(pointwise_fn(&x, &p, 0).unwrap(), zero);
        }
    }

    #[test]
    fn polynomial_increasing_on_half_interval(x in start(), n in 1u32..=8, a in 0i64..63, b in 0i64..63) {
        prop_assume!(a != b);
        let (lo, hi) = (a.min(b), a.max(b));
        let poly = poly_fn(&x, n).unwrap();
        let pl = BigRational::new(lo.into(), 128.into());
        let ph = BigRational::new(hi.into(), 128.into());
        prop_assert!(poly.eval(&pl) <= poly.eval(&ph));
    }

    #[test]
    fn grid_brackets_exact_values(m in 1i64..64, e in -6i64..4, p in 0.01f64..0.49, n in 1u32..=14, bits in 3u32..=8) {
        let x = &DyadicRational::from_int(2) + &DyadicRational::new(m, e);
        let exact = cumulative(&gap_sequence(&x, &p, n).unwrap());
        let prof = grid_profiles(&[x.to_f64()], p, n, GridConfig { bits, top_binade: 12 }).unwrap();
        for k in 0..=n as usize {
            prop_assert!(prof[0].lower[k] <= exact[k] + 1e-12, "k={} lower={} exact={}", k, prof[0].lower[k], exact[k]);
            prop_assert!(exact[k] <= prof[0].upper[k] + 1e-12, "k={} upper={} exact={}", k, prof[0].upper[k], exact[k]);
        }
    }

    #[test]
    fn fast_mode_tracks_exact_mode(x in start(), p in prob(), n in 0u32..=10) {
        let exact = pointwise_fn(&x, &p, n).unwrap();
        let fast = pointwise_fn(&x, &rational_to_f64(&p), n).unwrap();
        prop_assert!((rational_to_f64(&exact) - fast).abs() < 1e-12);
    }

    #[test]
    fn records_round_trip(p in prob(), n in 0u32..=8) {
        let f = exact_step(n, &p);
        let rec = f.to_record(&p, n);
        let text = serde_json::to_string(&rec).unwrap();
        let back: StepRecord = serde_json::from_str(&text).unwrap();
        let (p2, n2, g) = StepFunction::<BigRational>::from_record(&back).unwrap();
        prop_assert_eq!((p2, n2), (p, n));
        prop_assert_eq!(g, f);
    }
}
