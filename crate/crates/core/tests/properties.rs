use dynamo_core::curve::Curve2;
use dynamo_core::exceptional::{
    chebyshev, classify, power_map, DEFAULT_COLLISION_TOL, DEFAULT_MAX_ORBIT,
};
use dynamo_core::harness::{measure_compare, rational_terms};
use dynamo_core::heights::{
    canonical_height, canonical_height_functoriality_check, decide_preperiodic, product_formula,
    PreperiodicityVerdict,
};
use dynamo_core::measure::{green, sample_invariant_measure};
use dynamo_core::orbits::periodic_points;
use dynamo_core::poly::{resultant, resultant_reduced};
use dynamo_core::{BinaryForm, Caps, Hypersurface, ProjectivePoint, RationalMapLift};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn map_strategy(max_degree: usize) -> impl Strategy<Value = RationalMapLift> {
    (2..=max_degree)
        .prop_flat_map(|d| {
            (
                prop::collection::vec(-5i64..=5, d + 1),
                prop::collection::vec(-5i64..=5, d + 1),
            )
        })
        .prop_filter_map("degenerate lift", |(a, b)| {
            let f = RationalMapLift::from_i64(&a, &b).ok()?;
            (f.degree() >= 2).then_some(f)
        })
}

fn point_strategy(bound: i64) -> impl Strategy<Value = ProjectivePoint> {
    (-bound..=bound, 0..=bound)
        .prop_filter_map("zero point", |(p, q)| ProjectivePoint::new(p, q).ok())
}

fn quad(c: i64) -> RationalMapLift {
    RationalMapLift::from_i64(&[c, 0, 1], &[1, 0, 0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_is_canonical(p in -1000i64..1000, q in -1000i64..1000, k in 1i64..50) {
        prop_assume!(p != 0 || q != 0);
        let a = ProjectivePoint::new(p, q).unwrap();
        let b = ProjectivePoint::new(p * k, q * k).unwrap();
        let c = ProjectivePoint::new(-p * k, -q * k).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
        prop_assert_eq!(ProjectivePoint::new(a.x().clone(), a.y().clone()).unwrap(), a);
    }

    #[test]
    fn composition_matches_evaluation(f in map_strategy(3), g in map_strategy(2), p in point_strategy(50)) {
        let fg = f.compose(&g, &Caps::default()).unwrap();
        prop_assert_eq!(fg.degree(), f.degree() * g.degree());
        prop_assert_eq!(fg.evaluate(&p), f.evaluate(&g.evaluate(&p)));
    }

    #[test]
    fn bezout_certificate_verifies(f in map_strategy(4)) {
        let (res, cert) = f.resultant_with_certificate().unwrap();
        prop_assert_eq!(&res, f.res());
        prop_assert!(cert.verify(&f));
    }

    #[test]
    fn reduced_resultant_agrees(a in prop::collection::vec(-20i64..=20, 1..8), b in prop::collection::vec(-20i64..=20, 1..6)) {
        let (f, g) = (BinaryForm::from_i64(&a), BinaryForm::from_i64(&b));
        prop_assert_eq!(resultant_reduced(&f, &g), resultant(&f, &g));
    }

    #[test]
    fn critical_points_count_with_multiplicity(f in map_strategy(4)) {
        let crit = f.critical_points(1e-6).unwrap();
        let total: usize = crit.iter().map(|c| c.multiplicity).sum();
        prop_assert_eq!(total, 2 * f.degree() - 2);
    }

    #[test]
    fn certified_radius_shrinks_with_target(f in map_strategy(2), p in point_strategy(30)) {
        let coarse = canonical_height(&f, &p, 1e-2).unwrap();
        let fine = canonical_height(&f, &p, 1e-4).unwrap();
        prop_assert!(fine.error_radius <= coarse.error_radius);
        prop_assert!(fine.error_radius <= 1e-4);
        // the two enclosures overlap
        prop_assert!(fine.lower() <= coarse.upper() + 1e-12 && coarse.lower() <= fine.upper() + 1e-12);
        prop_assert!(fine.value >= -fine.error_radius);
    }

    #[test]
    fn functoriality_holds(f in map_strategy(2), p in point_strategy(30)) {
        prop_assert!(canonical_height_functoriality_check(&f, &p).unwrap());
    }

    #[test]
    fn preperiodic_points_have_zero_height(c in -3i64..=1, p in point_strategy(4)) {
        let f = quad(c);
        let verdict = decide_preperiodic(&f, &p).unwrap();
        let h = canonical_height(&f, &p, 1e-3).unwrap();
        match verdict {
            PreperiodicityVerdict::Preperiodic { .. } => prop_assert!(h.value.abs() <= h.error_radius),
            PreperiodicityVerdict::NotPreperiodic { lower_bound, .. } => {
                prop_assert!(lower_bound > 0.0);
                prop_assert!(h.upper() >= lower_bound - 1e-12);
            }
        }
    }

    #[test]
    fn product_formula_is_exact(p in any::<i64>(), q in 1i64..i64::MAX) {
        prop_assume!(p != 0);
        let x = BigRational::new(BigInt::from(p), BigInt::from(q));
        prop_assert!(product_formula(&x).unwrap().product.is_one());
    }

    #[test]
    fn curve_normalization_ignores_scaling(
        c in prop::collection::vec(-9i64..=9, 6),
        k in prop::sample::select(vec![-7i64, -2, -1, 2, 3, 11]),
    ) {
        prop_assume!(c.iter().any(|&x| x != 0));
        let terms: Vec<(usize, usize, i64)> = c.iter().enumerate().map(|(n, &x)| (n / 3, n % 3, x)).collect();
        let scaled: Vec<(usize, usize, i64)> = terms.iter().map(|&(i, j, x)| (i, j, k * x)).collect();
        prop_assert_eq!(
            Curve2::from_terms((1, 2), &terms).unwrap(),
            Curve2::from_terms((1, 2), &scaled).unwrap()
        );
    }

    #[test]
    fn hypersurface_json_round_trip(c in prop::collection::vec(-9i64..=9, 8)) {
        prop_assume!(c.iter().any(|&x| x != 0));
        let terms: Vec<(Vec<usize>, i64)> =
            c.iter().enumerate().map(|(n, &x)| (vec![n & 1, (n >> 1) & 1, (n >> 2) & 1], x)).collect();
        let Ok(h) = Hypersurface::new(vec![1, 1, 1], rational_terms(&terms)) else {
            return Ok(());
        };
        let text = serde_json::to_string(&h.to_json()).unwrap();
        prop_assert_eq!(Hypersurface::from_json_str(&text).unwrap(), h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cycle_points_count_to_degree_power_plus_one(f in map_strategy(3), n in 1usize..=3) {
        let cycles = periodic_points(&f, n, 1e-6).unwrap();
        let total: usize = cycles.iter().map(|c| c.points.len()).sum();
        let parabolic = cycles.iter().any(|c| c.parabolic);
        if !parabolic {
            prop_assert_eq!(total, f.degree().pow(n as u32) + 1);
        }
        for c in &cycles {
            prop_assert_eq!(n % c.period, 0);
        }
    }

    #[test]
    fn classification_is_conjugation_invariant(
        d in 2usize..=4,
        chebyshev_family in any::<bool>(),
        m in prop::sample::select(vec![(1i64, 1i64, 0i64, 1i64), (2, 0, 0, 1), (1, 0, 1, 1), (0, 1, 1, 0), (2, -1, 1, 1)]),
    ) {
        let f = if chebyshev_family { chebyshev(d).unwrap() } else { power_map(d as i64).unwrap() };
        let base = classify(&f, DEFAULT_MAX_ORBIT, DEFAULT_COLLISION_TOL).unwrap();
        let mobius = RationalMapLift::mobius(m.0, m.1, m.2, m.3).unwrap();
        let g = f.conjugate(&mobius, &Caps::default()).unwrap();
        let conj = classify(&g, DEFAULT_MAX_ORBIT, DEFAULT_COLLISION_TOL).unwrap();
        prop_assert_eq!(conj.verdict, base.verdict);
        let mut a = base.signature.unwrap();
        let mut b = conj.signature.unwrap();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn green_scaling(c in -2i64..=1, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let f = quad(c);
        let z = Complex64::new(re, im);
        let fz = z * z + c as f64;
        let n = 20;
        let here = green(&f, z, n + 1).unwrap();
        let there = green(&f, fz, n).unwrap();
        prop_assert!((there.value - 2.0 * here.value).abs() <= there.error_bound + 2.0 * here.error_bound + 1e-12);
    }

    #[test]
    fn measure_sampling_is_deterministic(seed in any::<u64>(), c in -2i64..=0) {
        let a = sample_invariant_measure(&quad(c), 200, 12, seed).unwrap();
        let b = sample_invariant_measure(&quad(c), 200, 12, seed).unwrap();
        prop_assert_eq!(a.points, b.points);
    }

    #[test]
    fn discrepancy_is_symmetric(seed in any::<u64>(), c in -2i64..=0) {
        let diag = Hypersurface::diagonal(2, 0, 1).unwrap();
        let maps = [quad(0), quad(c)];
        let ij = measure_compare(&diag, &maps, 0, 1, 500, 15, seed, None).unwrap();
        let ji = measure_compare(&diag, &maps, 1, 0, 500, 15, seed, None).unwrap();
        prop_assert_eq!(ij.statistic, ji.statistic);
    }
}
