use proptest::prelude::*;
use ruinlab::analysis::*;
use ruinlab::exactnum::DyadicRational;
use ruinlab::ruinrec::{cumulative, gap_sequence, GridConfig};

fn cheap() -> PlateauSettings {
    PlateauSettings {
        n_start: 4,
        n_cap: 128,
        grid: GridConfig {
            bits: 10,
            top_binade: 40,
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plateau_invariants(m in 1i64..256, p in 0.0f64..0.2, tol in 1e-5f64..1e-2) {
        let x = 2.0 + m as f64 / 16.0;
        let est = plateau_estimates(&[x], p, tol, &cheap()).unwrap().remove(0);
        prop_assert!(est.gap < est.tolerance);
        prop_assert!((0.0..=1.0).contains(&est.value));
        if est.n_used > 0 && est.n_used <= 24 {
            let f = cumulative(&gap_sequence(&DyadicRational::from_f64(x).unwrap(), &p, est.n_used).unwrap());
            let exact = f[est.n_used as usize];
            prop_assert!(est.value <= exact + 1e-12 && exact <= est.value + est.width + 1e-12);
        }
    }

    #[test]
    fn histogram_statistics_bounded(counts in prop::collection::vec(0u64..1000, 2..64)) {
        let tv = tv_from_uniform(&counts);
        prop_assert!((0.0..=1.0).contains(&tv));
        prop_assert!(chi_square_uniform(&counts) >= 0.0);
    }

    #[test]
    fn sandwich_margins_consistent(p in 0.01f64..0.49, k in 1u32..12, f3 in 0.0f64..1.0, f2 in 0.0f64..1.0, slack in 0.0f64..1e-3) {
        let c = sandwich_check(p, k, f3, f2, slack);
        prop_assert!(c.lower <= c.upper);
        prop_assert_eq!(c.pass, c.lower_margin >= 0.0 && c.upper_margin >= 0.0);
    }

    #[test]
    fn gaps_nonnegative(m in 1i64..128, p in 0.0f64..0.5) {
        let x = DyadicRational::new(32 + m, -4);
        let g = gap_decay(&x, p, 2, 16).unwrap();
        prop_assert!(g.nonnegative);
    }
}
