use num_complex::Complex;
use orbifold_lab::algebra::{
    diagonal_product, frobenius_pairing, fusion_product, idempotent, sector_project, AlgebraElement,
    PairingWeights,
};
use orbifold_lab::group::FiniteGroupTable;
use orbifold_lab::observables::{partition_function, sector_partition};
use orbifold_lab::rgflow::{rg_filter, RGState};
use orbifold_lab::space::{sector_chart, DiscreteSpace, GroupAction, SectorChart};
use orbifold_lab::spectral::{ModeBasis, DEFAULT_CLUSTER_TOL};
use orbifold_lab::toymodel::{parity_split, toy_product, toy_rg, ParityElement};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(group: &str, space: DiscreteSpace<f64>, action: &str) -> (SectorChart<f64>, ModeBasis<f64>) {
    let g = FiniteGroupTable::preset(group).unwrap();
    let a = GroupAction::preset(action, &space, &g).unwrap();
    let chart = sector_chart(&space, &a, &g).unwrap();
    let modes = ModeBasis::from_chart(&space, &chart, DEFAULT_CLUSTER_TOL).unwrap();
    (chart, modes)
}

fn charts() -> Vec<(SectorChart<f64>, ModeBasis<f64>)> {
    vec![
        setup("Z2", DiscreteSpace::circle(8).unwrap(), "circle_reflection"),
        setup("Z4", DiscreteSpace::torus(4).unwrap(), "torus_quarter_turn"),
        setup("Z2xZ2", DiscreteSpace::torus(4).unwrap(), "torus_axis_flips"),
    ]
}

fn close(a: &AlgebraElement<f64>, b: &AlgebraElement<f64>, tol: f64) -> bool {
    a.sub(b).unwrap().max_abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn diagonal_product_laws(seed in any::<u64>()) {
        for (chart, _) in charts() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = chart.locus_sizes();
            let a = AlgebraElement::random(&shape, &mut rng);
            let b = AlgebraElement::random(&shape, &mut rng);
            let c = AlgebraElement::random(&shape, &mut rng);
            let w = PairingWeights::from_chart(&chart);
            let ab_c = diagonal_product(&diagonal_product(&a, &b).unwrap(), &c).unwrap();
            let a_bc = diagonal_product(&a, &diagonal_product(&b, &c).unwrap()).unwrap();
            prop_assert!(close(&ab_c, &a_bc, 1e-12));
            prop_assert!(close(&diagonal_product(&a, &b).unwrap(), &diagonal_product(&b, &a).unwrap(), 0.0));
            prop_assert!(close(&diagonal_product(&a, &AlgebraElement::unit(&chart)).unwrap(), &a, 0.0));
            let lhs = frobenius_pairing(&diagonal_product(&a, &b).unwrap(), &c, &w).unwrap();
            let rhs = frobenius_pairing(&a, &diagonal_product(&b, &c).unwrap(), &w).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn fusion_associative_with_unit(seed in any::<u64>()) {
        for (chart, _) in charts() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = chart.locus_sizes();
            let a = AlgebraElement::random(&shape, &mut rng);
            let b = AlgebraElement::random(&shape, &mut rng);
            let c = AlgebraElement::random(&shape, &mut rng);
            let l = fusion_product(&fusion_product(&a, &b, &chart).unwrap(), &c, &chart).unwrap();
            let r = fusion_product(&a, &fusion_product(&b, &c, &chart).unwrap(), &chart).unwrap();
            prop_assert!(close(&l, &r, 1e-10));
            let e = idempotent(&chart, chart.identity_class()).unwrap();
            prop_assert!(close(&fusion_product(&e, &a, &chart).unwrap(), &a, 1e-12));
        }
    }

    #[test]
    fn filter_is_a_monotone_sector_preserving_projection(
        seed in any::<u64>(),
        l1 in 0.05f64..5.0,
        l2 in 0.05f64..5.0,
    ) {
        let (fine, coarse) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        for (chart, modes) in charts() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = AlgebraElement::random(&chart.locus_sizes(), &mut rng);
            let sf = RGState::new(&modes, fine).unwrap();
            let sc = RGState::new(&modes, coarse).unwrap();
            let once = rg_filter(&sf, &a).unwrap();
            prop_assert!(close(&rg_filter(&sf, &once).unwrap(), &once, 1e-10));
            let both = rg_filter(&sf, &rg_filter(&sc, &a).unwrap()).unwrap();
            prop_assert!(close(&both, &rg_filter(&sc, &a).unwrap(), 1e-10));
            for k in 0..chart.len() {
                let p = sector_project(&once, k).unwrap();
                let q = rg_filter(&sf, &sector_project(&a, k).unwrap()).unwrap();
                prop_assert!(close(&p, &q, 0.0));
            }
        }
    }

    #[test]
    fn partition_is_additive_and_log_convex(beta in 1e-3f64..5.0) {
        for (_, modes) in charts() {
            let z = partition_function(&modes, beta).unwrap();
            let parts: f64 = (0..modes.len()).map(|c| sector_partition(&modes, c, beta).unwrap()).sum();
            prop_assert!((z - parts).abs() <= 1e-12 * z);
            let h = 1e-3 * beta;
            let zm = partition_function(&modes, beta - h).unwrap();
            let zp = partition_function(&modes, beta + h).unwrap();
            prop_assert!(zp <= z && z <= zm);
            prop_assert!(z.ln() * 2.0 <= zm.ln() + zp.ln() + 1e-12);
        }
    }

    #[test]
    fn toy_rg_is_a_projection(seed in any::<u64>(), ell in 0.01f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<Complex<f64>> = AlgebraElement::<f64>::random(&[11], &mut rng).component(0).to_vec();
        let f = parity_split(&coeffs);
        let once = toy_rg(&f, ell).unwrap();
        prop_assert_eq!(toy_rg(&once, ell).unwrap(), once.clone());
        prop_assert_eq!(once.twisted(), f.twisted());
        prop_assert_eq!(toy_rg(&ParityElement::even_unit(10), ell).unwrap(), ParityElement::even_unit(10));
        prop_assert_eq!(toy_rg(&ParityElement::twisted_unit(10), ell).unwrap(), ParityElement::twisted_unit(10));
    }
}

#[test]
fn toy_parity_table_is_exact() {
    let n = 12;
    let one = Complex::new(1.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let mono = |k: usize| {
                let mut c = vec![Complex::new(0.0, 0.0); n + 1];
                c[k] = one;
                parity_split(&c)
            };
            let p = toy_product(&mono(i), &mono(j)).unwrap();
            for k in 0..=n {
                let expected = if k == i + j { one } else { Complex::new(0.0, 0.0) };
                assert_eq!(p.coefficient(k), expected, "z^{i}·z^{j} at z^{k}");
            }
            if i + j <= n {
                let lands_even = (i + j) % 2 == 0;
                assert_eq!(lands_even, (i % 2) == (j % 2));
            }
        }
    }
}
