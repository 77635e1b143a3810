mod common;

use std::sync::Arc;

use monoidk::aset::{
    coequalizer, coproduct, free_aset, free_of_rank, hom_maps, hom_set, is_admissible_epi, is_admissible_exact,
    is_admissible_mono, is_isomorphic, is_projective, kernel_cokernel, product, pullback, random_aset,
    random_morphism, tensor, wedge, ASetMorphism, Biset, Exactness, FiniteASet,
};
use monoidk::ktheory::free_basis;
use monoidk::monoid::PointedMonoid;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{all_asets, asets_of_size, balanced_map_count, monoid, monoids, small_monoids};

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn enumeration_counts() {
    let expected = [
        ("F1", [1, 1, 1, 1, 1, 1]),
        ("Z/2*", [1, 1, 2, 2, 3, 3]),
        ("Z/3*", [1, 1, 1, 2, 2, 2]),
        ("{0,1,e}", [1, 2, 4, 7, 12, 19]),
        ("{0,1,n}", [1, 1, 2, 3, 5, 7]),
        ("{0,1,e,f}", [1, 2, 5, 10, 20, 36]),
    ];
    for (name, counts) in expected {
        let a = monoid(name);
        let got: Vec<usize> = (1..=6).map(|k| asets_of_size(&a, k).len()).collect();
        assert_eq!(got, counts, "{name}");
    }
}

#[test]
fn free_examples() {
    let f1 = monoid("F1");
    assert_eq!(free_of_rank(&f1, 3).set.len(), 4);
    let z2 = monoid("Z/2*");
    assert_eq!(free_of_rank(&z2, 2).set.len(), 5);
    assert!(free_aset(&z2, &labels(&["x", "x"])).is_err());
}

/// Every choice of generator images extends to exactly one morphism.
#[test]
fn free_universal_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (name, a) in monoids() {
        for _ in 0..5 {
            let target = random_aset(&a, 4, &mut rng);
            for rank in 0..=2 {
                let free = free_of_rank(&a, rank);
                let homs = hom_maps(&free.set, &target).unwrap();
                assert_eq!(homs.len(), target.len().pow(rank as u32), "{name}");
                let mut images = vec![0; rank];
                loop {
                    let f = free.extend(&target, &images).unwrap();
                    for (k, &g) in free.generators.iter().enumerate() {
                        assert_eq!(f.apply(g), images[k]);
                    }
                    assert!(homs.contains(&f.map().to_vec()));
                    let Some(k) = (0..rank).find(|&k| images[k] + 1 < target.len()) else { break };
                    images[k] += 1;
                    images[..k].iter_mut().for_each(|x| *x = 0);
                }
            }
        }
    }
}

#[test]
fn kernel_cokernel_examples() {
    let a = monoid("Z/2*");
    let m = Arc::new(FiniteASet::regular(a.clone()));
    let (k, c) = kernel_cokernel(&ASetMorphism::identity(&m));
    assert_eq!((k.source().len(), c.target().len()), (1, 1));
    let n = free_of_rank(&a, 2).set;
    let (k, c) = kernel_cokernel(&ASetMorphism::zero(&m, &n));
    assert!(is_isomorphic(k.source(), &m));
    assert!(is_isomorphic(c.target(), &n));
    let w = wedge(&m, &m).unwrap();
    let (k, c) = kernel_cokernel(&w.injections[0]);
    assert_eq!(k.source().len(), 1);
    assert!(is_isomorphic(c.target(), &m));
}

#[test]
fn coequalizer_examples() {
    let a = monoid("{0,1,e}");
    let m = Arc::new(FiniteASet::regular(a.clone()));
    let w = wedge(&m, &m).unwrap();
    let f = &w.injections[0];
    let q = coequalizer(f, f).unwrap();
    assert!(q.is_bijective());
    let zero = ASetMorphism::zero(&m, &w.set);
    let q = coequalizer(f, &zero).unwrap();
    let (_, c) = kernel_cokernel(f);
    assert!(is_isomorphic(q.target(), c.target()));
}

#[test]
fn coequalizer_sweep_small() {
    for (name, a) in small_monoids(3) {
        let s = common::coequalizer_relation_sweep(&a, 4);
        assert!(s.instances > 0 && s.failures == 0, "{name}: {s:?}");
    }
}

#[test]
fn product_coproduct_examples() {
    let f1 = monoid("F1");
    let one = Arc::new(FiniteASet::regular(f1.clone()));
    let p = product(std::slice::from_ref(&one)).unwrap();
    assert!(is_isomorphic(&p.set, &one));
    assert_eq!(coproduct(&[one.clone(), one.clone()]).unwrap().set.len(), 3);
    let x3 = free_of_rank(&f1, 2).set;
    let x4 = free_of_rank(&f1, 3).set;
    assert_eq!(product(&[x3, x4]).unwrap().set.len(), 12);
}

#[test]
fn hom_examples() {
    let f1 = monoid("F1");
    for x in 1..=4 {
        for y in 1..=4 {
            let xs = free_of_rank(&f1, x - 1).set;
            let ys = free_of_rank(&f1, y - 1).set;
            assert_eq!(hom_maps(&xs, &ys).unwrap().len(), y.pow(x as u32 - 1));
        }
    }
    for (name, a) in small_monoids(4) {
        let reg = Arc::new(FiniteASet::regular(a.clone()));
        let point = Arc::new(FiniteASet::point(a.clone()));
        for n in all_asets(&a, 4) {
            assert_eq!(hom_maps(&reg, &n).unwrap().len(), n.len(), "{name}");
            assert_eq!(hom_maps(&n, &point).unwrap().len(), 1);
        }
    }
}

#[test]
fn exactness_examples() {
    let a = monoid("Z/2*");
    let m = free_of_rank(&a, 1).set;
    let k = free_of_rank(&a, 2).set;
    let w = wedge(&m, &k).unwrap();
    let (_, j) = kernel_cokernel(&w.injections[0]);
    assert!(is_isomorphic(j.target(), &k));
    let r = is_admissible_exact(&w.injections[0], &j).unwrap();
    assert!(matches!(r.verdict, Exactness::Exact { split: true, cokernel_projective: true }), "{:?}", r.verdict);
    assert!(r.section.is_some());

    let f1 = monoid("F1");
    let three = free_of_rank(&f1, 3).set;
    let one = free_of_rank(&f1, 1).set;
    let collapse = ASetMorphism::new(three.clone(), one.clone(), vec![0, 0, 1, 1]).unwrap();
    let zero = ASetMorphism::zero(&Arc::new(FiniteASet::point(f1.clone())), &three);
    let r = is_admissible_exact(&zero, &collapse).unwrap();
    assert!(matches!(r.verdict, Exactness::NormalFailure { .. }), "{:?}", r.verdict);
}

#[test]
fn projectivity_examples() {
    for (name, a) in monoids() {
        for k in 0..3 {
            assert!(is_projective(&free_of_rank(&a, k).set).is_projective(), "{name}");
        }
    }
    let f1 = monoid("F1");
    for n in all_asets(&f1, 5) {
        assert!(is_projective(&n).is_projective());
    }
    let a = monoid("{0,1,e}");
    let e = a.index_of("e").unwrap();
    let reg = Arc::new(FiniteASet::regular(a.clone()));
    let ae = reg.sub(&[0, e]).unwrap();
    assert!(is_projective(ae.source()).is_projective());
    assert!(free_basis(ae.source()).basis().is_none());
}

#[test]
fn pullback_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (_, a) in small_monoids(4) {
        let m = random_aset(&a, 5, &mut rng);
        let k = random_aset(&a, 4, &mut rng);
        let f = random_morphism(&k, &m, &mut rng).unwrap();
        let pb = pullback(&f, &ASetMorphism::identity(&m)).unwrap();
        assert!(is_isomorphic(&pb.set, &k));
    }
    // K → K∨K′ ← K∨K′∨M′ gives K∨M′
    let a = monoid("Z/2*");
    let k = free_of_rank(&a, 1).set;
    let k2 = free_of_rank(&a, 2).set;
    let big = coproduct(&[k.clone(), k2.clone(), k.clone()]).unwrap();
    let kk = coproduct(&[k.clone(), k2.clone()]).unwrap();
    let i = kk.injections[0].clone();
    let j_map: Vec<usize> = (0..big.set.len())
        .map(|x| {
            (0..2)
                .find_map(|s| {
                    (0..kk.injections[s].source().len())
                        .find(|&y| y != 0 && big.injections[s].apply(y) == x)
                        .map(|y| kk.injections[s].apply(y))
                })
                .unwrap_or(0)
        })
        .collect();
    let j = ASetMorphism::new(big.set.clone(), kk.set.clone(), j_map).unwrap();
    let pb = pullback(&i, &j).unwrap();
    let expected = coproduct(&[k.clone(), k.clone()]).unwrap().set;
    assert!(is_isomorphic(&pb.set, &expected));
}

#[test]
fn tensor_unit_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, a) in monoids().into_iter().filter(|(_, a)| a.len() <= 7) {
        for _ in 0..10 {
            let n = random_aset(&a, 5, &mut rng);
            let t = tensor(&Biset::regular(a.clone()), &Biset::from_left(&n)).unwrap();
            assert!(is_isomorphic(&Arc::new(t.biset.left_set()), &n), "{name}");
        }
        if a.is_commutative() {
            for _ in 0..10 {
                let m = Biset::symmetric(&random_aset(&a, 4, &mut rng)).unwrap();
                let n = Biset::symmetric(&random_aset(&a, 4, &mut rng)).unwrap();
                let mn = tensor(&m, &n).unwrap().biset.left_set();
                let nm = tensor(&n, &m).unwrap().biset.left_set();
                assert!(is_isomorphic(&Arc::new(mn), &Arc::new(nm)), "{name}");
            }
        }
    }
}

#[test]
fn tensor_associativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (name, a) in small_monoids(4).into_iter().filter(|(_, a)| a.is_commutative()) {
        for _ in 0..10 {
            let m = Biset::symmetric(&random_aset(&a, 4, &mut rng)).unwrap();
            let n = Biset::symmetric(&random_aset(&a, 4, &mut rng)).unwrap();
            let p = Biset::symmetric(&random_aset(&a, 4, &mut rng)).unwrap();
            let left = tensor(&tensor(&m, &n).unwrap().biset, &p).unwrap().biset.left_set();
            let right = tensor(&m, &tensor(&n, &p).unwrap().biset).unwrap().biset.left_set();
            assert!(is_isomorphic(&Arc::new(left), &Arc::new(right)), "{name}");
        }
    }
}

/// A hand-checked balanced-map count: over `𝔽₁` it is the pointed maps
/// `M ∧ N → P`.
#[test]
fn balanced_count_over_f1() {
    let f1 = monoid("F1");
    let m = Biset::from_left(&free_of_rank(&f1, 2).set);
    let n = Biset::from_left(&free_of_rank(&f1, 1).set);
    let p = Biset::from_left(&free_of_rank(&f1, 2).set);
    assert_eq!(balanced_map_count(&m, &n, &p), 9);
}

fn monoid_index() -> impl Strategy<Value = Arc<PointedMonoid>> {
    (0usize..9).prop_map(|i| monoids().swap_remove(i).1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn admissible_classes_compose(a in monoid_index(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_aset(&a, 4, &mut rng);
        let y = random_aset(&a, 5, &mut rng);
        let z = random_aset(&a, 6, &mut rng);
        let f = random_morphism(&x, &y, &mut rng).unwrap();
        let g = random_morphism(&y, &z, &mut rng).unwrap();
        let fg = f.then(&g).unwrap();
        if is_admissible_mono(&f) && is_admissible_mono(&g) {
            prop_assert!(is_admissible_mono(&fg));
        }
        if is_admissible_epi(&f) && is_admissible_epi(&g) {
            prop_assert!(is_admissible_epi(&fg));
        }
        for m in [&f, &g] {
            let (k, c) = kernel_cokernel(m);
            prop_assert!(k.then(m).unwrap().is_zero());
            prop_assert!(m.then(&c).unwrap().is_zero());
            prop_assert!(is_admissible_mono(&k));
            prop_assert!(is_admissible_epi(&c));
        }
    }

    #[test]
    fn hom_set_composes(a in monoid_index(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_aset(&a, 3, &mut rng);
        let y = random_aset(&a, 4, &mut rng);
        let z = random_aset(&a, 4, &mut rng);
        let xz = hom_maps(&x, &z).unwrap();
        for f in hom_set(&x, &y).unwrap() {
            for g in hom_set(&y, &z).unwrap().iter().take(8) {
                prop_assert!(xz.contains(&f.then(g).unwrap().map().to_vec()));
            }
        }
    }

    #[test]
    fn product_and_coproduct_sizes(a in monoid_index(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_aset(&a, 4, &mut rng);
        let y = random_aset(&a, 4, &mut rng);
        prop_assert_eq!(product(&[x.clone(), y.clone()]).unwrap().set.len(), x.len() * y.len());
        prop_assert_eq!(coproduct(&[x.clone(), y.clone()]).unwrap().set.len(), x.len() + y.len() - 1);
    }
}
