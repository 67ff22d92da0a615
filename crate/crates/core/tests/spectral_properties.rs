use proptest::prelude::*;
use singlab_core::cone::ConeSpec;
use singlab_core::spectral::*;

proptest! {
    #[test]
    fn indicial_roots_solve_the_quadratic(n in 3usize..20, t in 0.0f64..1.0, shift in 0.0f64..20.0) {
        let h = (n as f64 - 2.0) / 2.0;
        let mu = -h * h * t + shift;
        let d = indicial_exponents(mu, n).unwrap();
        for a in [d.alpha_plus, d.alpha_minus] {
            let q = a * a + (n as f64 - 2.0) * a - mu;
            prop_assert!(q.abs() <= 1e-9 * (1.0 + mu.abs()));
        }
        prop_assert!(d.alpha_plus >= d.alpha_minus);
        prop_assert!((d.alpha_plus + d.alpha_minus + (n as f64 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn scaling_group_law_on_monomials(alpha in -6.0f64..2.0, c in 0.1f64..10.0, a in -8.0f64..8.0, b in -8.0f64..8.0) {
        let rec = SolutionRecord { terms: vec![RecordTerm { coeff: c, alpha, branch: None }] };
        let (ea, eb) = (10f64.powf(a), 10f64.powf(b));
        prop_assert_eq!(scaling_action(&scaling_action(&rec, eb).unwrap(), ea).unwrap(), scaling_action(&rec, ea * eb).unwrap());
    }

    #[test]
    fn scaling_group_law_on_mixtures(c in 0.1f64..10.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let rec = SolutionRecord {
            terms: vec![
                RecordTerm { coeff: c, alpha: -3.0, branch: Some(Branch::Minus) },
                RecordTerm { coeff: 1.0, alpha: -2.0, branch: Some(Branch::Plus) },
            ],
        };
        let (ea, eb) = (10f64.powf(a), 10f64.powf(b));
        let two = scaling_action(&scaling_action(&rec, eb).unwrap(), ea).unwrap();
        let one = scaling_action(&rec, ea * eb).unwrap();
        for (x, y) in two.terms.iter().zip(&one.terms) {
            prop_assert!((x.coeff - y.coeff).abs() <= 1e-10 * x.coeff.abs().max(1e-300));
        }
    }

    #[test]
    fn bounds_hold_exactly_below_the_threshold(l in 1e-6f64..0.2) {
        let best = theorem12_largest_lambda(&ConeSpec::simons()).unwrap();
        prop_assume!((l - best).abs() > 1e-8);
        prop_assert_eq!(theorem12_bounds_check(&ConeSpec::simons(), l).unwrap().all_pass(), l < best);
    }
}

#[test]
fn jacobi_threshold_large_n() {
    for n in 3..60 {
        assert_eq!(jacobi_exponents_real(n), n >= 7);
    }
}
