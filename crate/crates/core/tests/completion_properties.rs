use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trimetric_core::cauchy::{colimit, constant_tower, is_cauchy, truncation_tower, CauchyStatus};
use trimetric_core::complex::{cone, derived_hom, Complex};
use trimetric_core::completion::{
    has_bounded_injective_resolution, in_s, is_perfect, sing_hom, syzygy_class, CompletionObject,
    Verdict,
};
use trimetric_core::metric::{GoodMetric, Length};
use trimetric_core::random::{random_acyclic, random_chain_map, random_complex};
use trimetric_core::rmodule::{stable_hom, RModule, Ring};

fn rings() -> [Ring; 3] {
    [
        Ring::new(2, 2).unwrap(),
        Ring::new(3, 3).unwrap(),
        Ring::new(2, 3).unwrap(),
    ]
}

/// A random bounded complex of free modules.
fn random_free_complex(rng: &mut ChaCha8Rng, ring: Ring) -> Complex {
    loop {
        let x = random_complex(rng, ring, -1, 1, 6, 0.2);
        if x.degrees().all(|i| x.component(i).is_free()) {
            return x;
        }
    }
}

/// Every module of dimension ≤ `max_dim` over `ring`, as Jordan types.
fn all_modules(ring: Ring, max_dim: usize) -> Vec<RModule> {
    fn go(n: usize, left: usize, largest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for j in (1..=largest.min(left).min(n)).rev() {
            cur.push(j);
            go(n, left - j, j, cur, out);
            cur.pop();
        }
    }
    let mut types = Vec::new();
    go(ring.n(), max_dim, ring.n(), &mut Vec::new(), &mut types);
    types.into_iter().map(|b| RModule::new(ring, b).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perfection_matches_ext_probe(seed in any::<u64>(), which in 0usize..3) {
        let ring = rings()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, ring, -1, 2, 5, 0.2);
        let k = Complex::concentrated(RModule::simple(ring), 0);
        let perfect = is_perfect(&x);
        if let Some(a) = x.min_degree() {
            let probe = [2 - a, 3 - a].iter().any(|&d| derived_hom(&x, &k, d).unwrap() > 0);
            prop_assert_eq!(perfect, !probe);
        } else {
            prop_assert!(perfect);
        }
        prop_assert_eq!(has_bounded_injective_resolution(&x), perfect);
        prop_assert_eq!(syzygy_class(&x).is_zero(), perfect);
    }

    #[test]
    fn cones_of_perfect_complexes_are_perfect(seed in any::<u64>(), which in 0usize..3) {
        let ring = rings()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_free_complex(&mut rng, ring);
        let y = random_free_complex(&mut rng, ring);
        prop_assert!(is_perfect(&x) && is_perfect(&y));
        let f = random_chain_map(&mut rng, &x, &y);
        prop_assert!(is_perfect(&cone(&f).z));
    }

    #[test]
    fn syzygy_class_is_a_singularity_invariant(seed in any::<u64>(), which in 0usize..3) {
        let ring = rings()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, ring, -1, 1, 5, 0.2);
        prop_assume!(!x.is_zero());
        let base = syzygy_class(&x);
        let lo = x.min_degree().unwrap();
        // Acyclic and perfect summands inside the amplitude change nothing.
        let a = random_acyclic(&mut rng, ring, lo + 1, 4);
        let p = Complex::concentrated(RModule::free(ring, 2), lo);
        let y = Complex::direct_sum(&Complex::direct_sum(&x, &a).unwrap().sum, &p).unwrap().sum;
        let cls = syzygy_class(&y);
        prop_assert_eq!(sing_hom(&cls, &cls).unwrap(), sing_hom(&base, &base).unwrap());
        prop_assert_eq!(sing_hom(&base, &cls).unwrap(), sing_hom(&base, &base).unwrap());
        // The class of a shift aligns with the class itself.
        let shifted = syzygy_class(&x.shift(2));
        prop_assert_eq!(sing_hom(&shifted, &shifted).unwrap(), sing_hom(&base, &base).unwrap());
    }

    #[test]
    fn constant_tower_tables_are_quasi_iso_invariant(seed in any::<u64>()) {
        let ring = Ring::new(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, ring, -1, 1, 4, 0.2);
        let a = random_acyclic(&mut rng, ring, 0, 4);
        let y = Complex::direct_sum(&x, &a).unwrap().sum;
        let tx = colimit(&constant_tower(&x), (-3, 3), 3).unwrap();
        let ty = colimit(&constant_tower(&y), (-3, 3), 3).unwrap();
        prop_assert_eq!(tx.representative(ring), ty.representative(ring));
        for i in -3..=3 {
            prop_assert_eq!(&tx.entries[(i + 3) as usize].module, &x.cohomology(i));
        }
    }
}

#[test]
fn truncation_towers_over_all_small_modules() {
    for ring in [Ring::new(2, 1).unwrap(), Ring::new(2, 2).unwrap(), Ring::new(3, 3).unwrap()] {
        for m in all_modules(ring, 4) {
            let t = truncation_tower(&m);
            let cert = is_cauchy(&t, &GoodMetric::metric_i(), 6, 8).unwrap();
            assert_eq!(cert.status(), CauchyStatus::Cauchy);
            let nonfree = !m.strip_free().is_zero();
            for (&(i, _), l) in &cert.lengths {
                let expect = if nonfree { Length::Inverse(i as u64 + 1) } else { Length::Zero };
                assert_eq!(*l, expect, "{m} pair starting at {i}");
            }
            for n in 1..=8 {
                assert_eq!(cert.threshold(n), Some(if nonfree { n } else { 1 }));
            }
            let c = CompletionObject::new(t, GoodMetric::metric_i(), 6, 8, (-3, 3)).unwrap();
            assert_eq!(in_s(&c).unwrap(), Verdict::True);
            let rep = c.representative.clone().unwrap();
            assert_eq!(rep, Complex::concentrated(m.clone(), 0));
            assert_eq!(is_perfect(&rep), !nonfree);
            let cls = syzygy_class(&rep);
            assert_eq!(sing_hom(&cls, &cls).unwrap(), stable_hom(&m, &m).unwrap().dim);
        }
    }
}

#[test]
fn certificates_are_monotone() {
    let ring = Ring::new(3, 3).unwrap();
    let t = truncation_tower(&RModule::new(ring, vec![2, 1]).unwrap());
    for m in [GoodMetric::metric_i(), GoodMetric::metric_iii(), GoodMetric::metric_ii().dual()] {
        let cert = is_cauchy(&t, &m, 6, 10).unwrap();
        let ts: Vec<usize> = (1..=10).map(|n| cert.threshold(n).unwrap()).collect();
        assert!(ts.windows(2).all(|w| w[0] <= w[1]), "{m}: {ts:?}");
    }
}
