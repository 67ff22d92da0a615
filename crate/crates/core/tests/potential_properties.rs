use proptest::prelude::*;
use singlab_core::linalg::EigenOptions;
use singlab_core::potential::*;

fn laplace(d: &GridDomain) -> GridSystem {
    discretize(d, &OperatorSpec::laplacian()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_is_symmetric(a in 0usize..10_000, b in 0usize..10_000, half in any::<bool>()) {
        let d = if half { half_disk(16).unwrap() } else { disk(16).unwrap() };
        let s = laplace(&d);
        let free = s.free();
        let (x, y) = (free[a % free.len()], free[b % free.len()]);
        let gx = green_function(&s, x).unwrap();
        let gy = green_function(&s, y).unwrap();
        let (p, q) = (gx.values[y], gy.values[x]);
        prop_assert!((p - q).abs() <= 1e-10 * p.abs().max(q.abs()));
    }

    #[test]
    fn dirichlet_solution_obeys_maximum_principle(data in prop::collection::vec(-5.0f64..5.0, 64)) {
        let d = disk(16).unwrap();
        let s = laplace(&d);
        let bdry: Vec<usize> = (0..d.len()).filter(|&v| s.position(v).is_none()).collect();
        let mut f = vec![0.0; d.len()];
        for (i, &v) in bdry.iter().enumerate() {
            f[v] = data[i % data.len()];
        }
        let u = solve_dirichlet(&s, &f, None).unwrap();
        let lo = bdry.iter().map(|&v| f[v]).fold(f64::INFINITY, f64::min);
        let hi = bdry.iter().map(|&v| f[v]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.free().iter().all(|&v| u.values[v] >= lo - 1e-12 && u.values[v] <= hi + 1e-12));
    }

    #[test]
    fn bhp_ratio_self_and_symmetry(u in prop::collection::vec(0.1f64..10.0, 40), v in prop::collection::vec(0.1f64..10.0, 40), k in 1usize..40) {
        let (u, v) = (GridFunction { values: u }, GridFunction { values: v });
        let region: Vec<usize> = (0..k).collect();
        prop_assert_eq!(bhp_ratio(&u, &u, &region).unwrap(), 1.0);
        let a = bhp_ratio(&u, &v, &region).unwrap();
        let b = bhp_ratio(&v, &u, &region).unwrap();
        prop_assert!(a >= 1.0 && (a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn eigenvalues_decrease_along_exhaustions(radii in prop::collection::btree_set(3u32..10, 3)) {
        let d = disk(24).unwrap();
        let s = laplace(&d);
        let radii: Vec<f64> = radii.into_iter().map(|r| f64::from(r) / 10.0).collect();
        let ex: Vec<Vec<usize>> = radii.iter().map(|&r| s.free().iter().copied().filter(|&v| d.radius(v) < r).collect()).collect();
        prop_assume!(ex.windows(2).all(|w| w[1].len() > w[0].len()));
        let p0 = d.nearest(&[0.0, 0.0]);
        let rep = weighted_principal_eigenvalue(&s, &ex, None, p0, EigenOptions::default()).unwrap();
        prop_assert!(rep.strictly_decreasing, "{:?}", rep.lambdas);
    }
}

#[test]
fn green_matches_disk_formula() {
    let d = disk(64).unwrap();
    let s = laplace(&d);
    let y = d.nearest(&[0.3, 0.2]);
    let g = green_function(&s, y).unwrap();
    let c = &d.coords[y];
    // G(x, y) = ln(|1 − x ȳ| / |x − y|) / 2π for the unit disk.
    let exact = |x: &[f64]| {
        let num = ((1.0 - (x[0] * c[0] + x[1] * c[1])).powi(2) + (x[0] * c[1] - x[1] * c[0]).powi(2)).sqrt();
        let den = (x[0] - c[0]).hypot(x[1] - c[1]);
        (num / den).ln() / (2.0 * std::f64::consts::PI)
    };
    let err = s
        .free()
        .iter()
        .filter(|&&v| (d.coords[v][0] - c[0]).hypot(d.coords[v][1] - c[1]) > 0.25)
        .map(|&v| (g.values[v] - exact(&d.coords[v])).abs())
        .fold(0.0, f64::max);
    assert!(err < 5e-3, "{err}");
}

#[test]
fn oscillation_rate_on_half_disk() {
    let d = half_disk(96).unwrap();
    let s = laplace(&d);
    let arc = |f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> {
        (0..d.len()).map(|v| if d.classes[v] == NodeClass::Dirichlet { f(&d.coords[v]) } else { 0.0 }).collect()
    };
    let u = solve_dirichlet(&s, &arc(&|_| 1.0), None).unwrap();
    let v = solve_dirichlet(&s, &arc(&|c| c[1] * (1.0 + c[0] / 2.0)), None).unwrap();
    let chain: Vec<Vec<usize>> = (0..5)
        .map(|i| (0..d.len()).filter(|&x| d.classes[x] == NodeClass::Free && d.radius(x) < 0.5 * 0.5f64.powi(i)).collect())
        .collect();
    let rep = oscillation_decay(&u, &v, &chain).unwrap();
    assert!(rep.non_increasing && rep.osc.iter().all(|o| *o > 0.0), "{rep:?}");
    assert!(rep.fitted_rate <= rep.predicted_rate + 0.1, "{rep:?}");
}
