//! One line per acceptance criterion; the test fails if any criterion does.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use monoidk::abgroup::{homology, Coefficients, FgAbelianGroup};
use monoidk::aset::{biset_hom_maps, hom_biset, tensor};
use monoidk::guard::SizeGuard;
use monoidk::ktheory::{homotopy_invariance_check, k1, k1_bruteforce_check, k2_abelian, pi2s_formula};
use monoidk::matrix::{brute_elementary, elementary_predicate_set, factorization_identities};
use monoidk::monoid::{poly_units, units};
use monoidk::qcat::{build_nerve, pi1_presentation};
use monoidk::steinberg::{alpha_order, m_check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    balanced_map_count, coequalizer_pair_sweep, coequalizer_relation_sweep, monoid, monoids, pullback_cone_check,
    random_adjunction_triple, random_cospan, small_monoids,
};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn within(v: Verdict, elapsed: Duration, budget: Option<Duration>) -> Verdict {
    match budget {
        Some(b) if elapsed > b => verdict(false, format!("{} (over budget: {:.1?} > {:.0?})", v.detail, elapsed, b)),
        _ => v,
    }
}

fn k1_closed_form() -> Verdict {
    let guard = SizeGuard::default();
    let mut bad = Vec::new();
    for name in ["F1", "Z/2*", "Z/3*", "S3*"] {
        let a = monoid(name);
        for n in [2, 3] {
            let check = k1_bruteforce_check(&a, n, &guard).expect("within guard");
            if !check.agrees || check.brute_force != k1(&a) {
                bad.push(format!("{name} n={n}: {} vs {}", check.brute_force, check.closed_form));
            }
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "8 cases agree".to_string() } else { bad.join("; ") })
}

fn elementary_characterization() -> Verdict {
    let guard = SizeGuard::default();
    let mut bad = Vec::new();
    let mut cases = 0;
    for (name, a) in monoids().into_iter().filter(|(_, a)| units(a).order() <= 3) {
        for n in [3, 4, 5] {
            cases += 1;
            let brute = brute_elementary(&a, n, &guard).expect("within guard");
            let predicate = elementary_predicate_set(&a, n, &guard).expect("within guard");
            if brute != predicate {
                bad.push(format!("{name} n={n}: |brute|={} |predicate|={}", brute.len(), predicate.len()));
            }
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { format!("{cases} cases equal") } else { bad.join("; ") })
}

fn factorization_checks() -> Verdict {
    let mut total = 0;
    let mut bad = Vec::new();
    for (name, a) in monoids() {
        for c in factorization_identities(&a) {
            total += 1;
            if !c.holds {
                bad.push(format!("{name}: {} a={} b={:?}", c.identity, c.a, c.b));
            }
        }
    }
    verdict(total > 0 && bad.is_empty(), format!("{total} identities, {} fail {}", bad.len(), bad.join("; ")))
}

fn k2_values() -> Verdict {
    let mut bad = Vec::new();
    let z2 = FgAbelianGroup::cyclic(2);
    let z2z2 = FgAbelianGroup::new(0, &[2, 2]);
    let group = |d: u64| if d == 0 { FgAbelianGroup::free(1) } else { FgAbelianGroup::cyclic(d) };
    let odd: Vec<u64> = (1..=15).step_by(2).collect();
    let even = [0u64, 2, 4, 6, 8];
    for &d in &odd {
        if k2_abelian(&group(d)) != z2 {
            bad.push(format!("d={d}: {}", k2_abelian(&group(d))));
        }
    }
    for &d in &even {
        if k2_abelian(&group(d)) != z2z2 {
            bad.push(format!("d={d}: {}", k2_abelian(&group(d))));
        }
    }
    for &d in odd.iter().chain(&even) {
        let order = k2_abelian(&group(d)).order();
        if order != Some(2 * alpha_order(d) as u128) {
            bad.push(format!("d={d}: |K2|={order:?} alpha_order={}", alpha_order(d)));
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "13 moduli".to_string() } else { bad.join("; ") })
}

fn steinberg_audit() -> Verdict {
    let mut bad = Vec::new();
    for d in [0u64, 2, 3, 4, 5, 6] {
        let r = m_check(d, 1).expect("m_check runs");
        if !r.passed {
            let mut parts = Vec::new();
            let rel = &r.relations;
            for (label, c) in [
                ("assoc", &rel.associativity),
                ("alpha central", &rel.alpha_central),
                ("commutator", &rel.commutator),
                ("power", &rel.power),
                ("sigma commutator", &r.sigma.commutator_relation),
                ("sigma power", &r.sigma.power_relation),
                ("sigma hom", &r.sigma.homomorphism),
                ("sigma composition", &r.sigma.composition),
            ] {
                if !c.passed() {
                    parts.push(format!("{label} {}/{}", c.failures, c.cases));
                }
            }
            if r.kernel.kernel_order != r.alpha_order {
                parts.push(format!("kernel {} != {}", r.kernel.kernel_order, r.alpha_order));
            }
            if r.parity.applicable && r.parity.nontrivial_reduction > 0 {
                parts.push(format!("parity {}", r.parity.nontrivial_reduction));
            }
            bad.push(format!("d={d}: {}", parts.join(", ")));
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "all moduli clean".to_string() } else { bad.join("; ") })
}

fn aset_category() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, a) in small_monoids(4) {
        let rel = coequalizer_relation_sweep(&a, 6);
        let pairs = coequalizer_pair_sweep(&a, 3, 6);
        ok &= rel.failures == 0 && pairs.failures == 0;
        notes.push(format!(
            "{name}: {}/{} relation sets, {}/{} pairs",
            rel.instances - rel.failures,
            rel.instances,
            pairs.instances - pairs.failures,
            pairs.instances
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let commutative: Vec<Arc<_>> =
        small_monoids(4).into_iter().filter(|(_, a)| a.is_commutative()).map(|(_, a)| a).collect();
    let mut adjunction_failures = 0;
    for _ in 0..50 {
        let a = &commutative[rng.gen_range(0..commutative.len())];
        let (m, n, p) = random_adjunction_triple(a, 4, &mut rng);
        let balanced = balanced_map_count(&m, &n, &p);
        let t = tensor(&m, &n).expect("composable bisets");
        let left = biset_hom_maps(&t.biset, &p).expect("same monoids").len();
        let (h, _) = hom_biset(&m, &p).expect("same left monoid");
        let right = biset_hom_maps(&n, &h).expect("same monoids").len();
        if balanced != left || left != right {
            adjunction_failures += 1;
        }
    }
    ok &= adjunction_failures == 0;
    notes.push(format!("adjunction {adjunction_failures}/50 fail"));
    let all: Vec<_> = small_monoids(4).into_iter().map(|(_, a)| a).collect();
    let mut pullback_failures = 0;
    for _ in 0..50 {
        let a = &all[rng.gen_range(0..all.len())];
        let (f, g) = random_cospan(a, 5, &mut rng);
        if !pullback_cone_check(&f, &g, 3) {
            pullback_failures += 1;
        }
    }
    ok &= pullback_failures == 0;
    notes.push(format!("pullback {pullback_failures}/50 fail"));
    verdict(ok, notes.join("; "))
}

fn random_group(rng: &mut ChaCha8Rng) -> (usize, Vec<u64>) {
    let summands = rng.gen_range(1..=4);
    let free = rng.gen_range(0..=summands.min(2));
    let torsion = (free..summands).map(|_| rng.gen_range(2..=12)).collect();
    (free, torsion)
}

fn homology_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    for _ in 0..50 {
        let (free, torsion) = random_group(&mut rng);
        let g = FgAbelianGroup::new(free, &torsion);
        for k in 0..=3 {
            let h = homology(&g, k, Coefficients::Integers).expect("k ≤ 3");
            let expected = common::chain::homology(free, &torsion, k);
            if (h.free_rank(), h.torsion().to_vec()) != expected {
                bad.push(format!("{g} H{k}: {h} vs {expected:?}"));
            }
        }
        let h2 = homology(&g, 2, Coefficients::Integers).expect("k ≤ 3");
        if (h2.free_rank(), h2.torsion().to_vec()) != common::chain::exterior_square(free, &torsion) {
            bad.push(format!("{g} exterior square"));
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "50 groups, k ≤ 3".to_string() } else { bad.join("; ") })
}

fn homotopy_invariance() -> Verdict {
    let mut bad = Vec::new();
    let all = monoids();
    for (name, a) in &all {
        let report = homotopy_invariance_check(a);
        let poly = poly_units(a);
        let same_k1 = FgAbelianGroup::cyclic(2).direct_sum(&poly.group.abelianization()) == k1(a);
        if !report.holds || !report.is_isomorphism || poly.group.order() != units(a).order() || !same_k1 {
            bad.push(name.clone());
        }
    }
    verdict(bad.is_empty(), format!("{} monoids, failing: {:?}", all.len(), bad))
}

fn q_construction() -> Verdict {
    let f1 = monoid("F1");
    let guard = SizeGuard::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [2, 3] {
        let nerve = build_nerve(&f1, n, &guard).expect("within guard");
        let r = pi1_presentation(&f1, &nerve).expect("presentation");
        let additive = !r.additivity.is_empty() && r.additivity.iter().all(|x| x.holds);
        ok &= r.rank_surjective && additive;
        notes.push(format!(
            "N={n}: surjective={} additivity={} abelianization {}",
            r.rank_surjective, additive, r.abelianization
        ));
    }
    verdict(ok, notes.join("; "))
}

fn pi2s_shapes() -> Verdict {
    let g = |free: usize, t: &[u64]| FgAbelianGroup::new(free, t);
    // (label, G_ab, H₂, extra ℤ/2 expected)
    let shapes: Vec<(&str, FgAbelianGroup, FgAbelianGroup, bool)> = vec![
        ("A3", g(0, &[3]), g(0, &[]), false),
        ("A4", g(0, &[3]), g(0, &[2]), false),
        ("A5", g(0, &[]), g(0, &[2]), false),
        ("A6", g(0, &[]), g(0, &[6]), false),
        ("S3", g(0, &[2]), g(0, &[]), true),
        ("S4", g(0, &[2]), g(0, &[2]), true),
        ("S6", g(0, &[2]), g(0, &[2]), true),
        ("E3(F4)", g(0, &[]), g(0, &[]), false),
        ("E2(F9)", g(0, &[]), g(0, &[3]), false),
        ("GL2(F3)", g(0, &[2]), g(0, &[]), true),
        ("GL3(F5)", g(0, &[4]), g(0, &[]), true),
        ("GL2(F4)", g(0, &[3]), g(0, &[]), false),
        ("GL3(F8)", g(0, &[7]), g(0, &[]), false),
    ];
    let mut bad = Vec::new();
    for (label, gab, h2, extra) in &shapes {
        let mut expected = FgAbelianGroup::cyclic(2).direct_sum(h2);
        if *extra {
            expected = expected.direct_sum(&FgAbelianGroup::cyclic(2));
        }
        let got = pi2s_formula(gab, h2);
        if got != expected || (gab.order().unwrap() % 2 == 0) != *extra {
            bad.push(format!("{label}: {got} vs {expected}"));
        }
    }
    verdict(bad.is_empty(), format!("{} shapes, failing: {:?}", shapes.len(), bad))
}

#[test]
fn acceptance() {
    let criteria: Vec<(u32, &str, Option<u64>, fn() -> Verdict)> = vec![
        (1, "K1 closed form vs brute force", Some(10), k1_closed_form),
        (2, "E(A) characterization", Some(60), elementary_characterization),
        (3, "factorization identities", None, factorization_checks),
        (4, "K2 values", None, k2_values),
        (5, "Steinberg audit", None, steinberg_audit),
        (6, "A-set category", Some(120), aset_category),
        (7, "homology oracles", None, homology_oracle),
        (8, "homotopy invariance", None, homotopy_invariance),
        (9, "Q-construction", None, q_construction),
        (10, "pi2s shapes", None, pi2s_shapes),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let v = within(v, elapsed, budget.map(Duration::from_secs));
        println!(
            "criterion {id:>2} {}: {name} [{:.2?}] {}",
            if v.passed { "PASS" } else { "FAIL" },
            elapsed,
            v.detail
        );
        if !v.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
