mod common;

use std::collections::HashSet;
use std::sync::Arc;

use monoidk::aset::{is_isomorphic, pullback};
use monoidk::guard::SizeGuard;
use monoidk::ktheory::free_basis;
use monoidk::matrix::{enumerate_gl, mat_mul, RowMonomicMatrix};
use monoidk::monoid::{units, PointedMonoid};
use monoidk::qcat::{build_nerve, compose_spans, pi1_presentation, span_count, spans_between, QSpan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::monoid;

/// Every raw `(epi, mono)` pair with middle rank `p`, before identification.
fn raw_spans(a: &PointedMonoid, m: usize, n: usize, p: usize) -> Vec<(RowMonomicMatrix, RowMonomicMatrix)> {
    let unit_elems: Vec<usize> = (0..a.len()).filter(|&x| a.is_unit(x)).collect();
    // each row: None or Some((col, unit))
    let choices = |cols: usize, allow_empty: bool| {
        let mut row: Vec<Option<(usize, usize)>> = if allow_empty { vec![None] } else { vec![] };
        for c in 0..cols {
            for &u in &unit_elems {
                row.push(Some((c, u)));
            }
        }
        row
    };
    let product = |row: &[Option<(usize, usize)>]| {
        let mut all: Vec<Vec<Option<(usize, usize)>>> = vec![vec![]];
        for _ in 0..p {
            all = all.into_iter().flat_map(|v| row.iter().map(move |&e| [v.clone(), vec![e]].concat())).collect();
        }
        all
    };
    let distinct = |rows: &Vec<Option<(usize, usize)>>| {
        let cols: Vec<usize> = rows.iter().flatten().map(|e| e.0).collect();
        cols.len() == cols.iter().collect::<HashSet<_>>().len()
    };
    let epis: Vec<_> = product(&choices(m, true))
        .into_iter()
        .filter(|r| distinct(r) && r.iter().flatten().count() == m)
        .collect();
    let monos: Vec<_> =
        product(&choices(n, false)).into_iter().filter(|r| distinct(r) && r.iter().all(Option::is_some)).collect();
    let mut out = Vec::new();
    for e in &epis {
        for mo in &monos {
            out.push((
                RowMonomicMatrix::new(a, p, m, e.clone()).unwrap(),
                RowMonomicMatrix::new(a, p, n, mo.clone()).unwrap(),
            ));
        }
    }
    out
}

/// Orbit representative under `GLₚ(A)` acting on the middle object.
fn orbit_min(
    a: &PointedMonoid,
    gl: &[RowMonomicMatrix],
    span: &(RowMonomicMatrix, RowMonomicMatrix),
) -> (RowMonomicMatrix, RowMonomicMatrix) {
    gl.iter()
        .map(|g| (mat_mul(a, g, &span.0).unwrap(), mat_mul(a, g, &span.1).unwrap()))
        .min()
        .unwrap()
}

#[test]
fn span_classes_match_orbit_count() {
    let guard = SizeGuard::default();
    for name in ["F1", "Z/2*", "Z/3*"] {
        let a = monoid(name);
        let u = units(&a).order();
        for m in 0..=2 {
            for n in 0..=3 {
                let mut orbits = 0;
                let mut canon = HashSet::new();
                for p in m..=n {
                    let gl = enumerate_gl(&a, p, &guard).unwrap();
                    let raws = raw_spans(&a, m, n, p);
                    let reps: HashSet<_> = raws.iter().map(|s| orbit_min(&a, &gl, s)).collect();
                    orbits += reps.len();
                    // same orbit ⇔ same canonical span
                    let classes: HashSet<(QSpan, (RowMonomicMatrix, RowMonomicMatrix))> = raws
                        .iter()
                        .map(|s| (QSpan::new(&a, m, n, s.0.clone(), s.1.clone()).unwrap(), orbit_min(&a, &gl, s)))
                        .collect();
                    let spans: HashSet<_> = classes.iter().map(|c| c.0.clone()).collect();
                    assert_eq!(spans.len(), reps.len(), "{name} {m}->{n} p={p}");
                    assert_eq!(classes.len(), reps.len(), "{name} {m}->{n} p={p}");
                    canon.extend(spans);
                }
                assert_eq!(orbits as u128, span_count(u, m, n), "{name} {m}->{n}");
                let listed: HashSet<QSpan> = spans_between(&a, m, n).into_iter().collect();
                assert_eq!(listed, canon, "{name} {m}->{n}");
            }
        }
    }
}

fn random_span(a: &PointedMonoid, m: usize, n: usize, rng: &mut ChaCha8Rng) -> QSpan {
    let all = spans_between(a, m, n);
    all[rng.gen_range(0..all.len())].clone()
}

/// The composite's middle is the pullback of the inner legs, and the
/// composite is associative and unital.
#[test]
fn composition_matches_pullback() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for name in ["F1", "Z/2*", "Z/3*"] {
        let a: Arc<PointedMonoid> = monoid(name);
        for _ in 0..60 {
            // spans m → n exist only for m ≤ n
            let mut dims: Vec<usize> = (0..4).map(|_| rng.gen_range(0..=3)).collect();
            dims.sort();
            let (x, y, z, w) = (dims[0], dims[1], dims[2], dims[3]);
            let s1 = random_span(&a, x, y, &mut rng);
            let s2 = random_span(&a, y, z, &mut rng);
            let s3 = random_span(&a, z, w, &mut rng);
            let c = compose_spans(&a, &s1, &s2).unwrap();
            assert_eq!((c.source(), c.target()), (x, z));
            let r1 = s1.realize(&a);
            let r2 = s2.realize(&a);
            let pb = pullback(&r1.mono, &r2.epi).unwrap();
            assert_eq!(free_basis(&pb.set).rank(), Some(c.middle_rank()), "{name}");
            assert!(is_isomorphic(&pb.set, &c.realize(&a).middle.set));
            let left = compose_spans(&a, &c, &s3).unwrap();
            let right = compose_spans(&a, &s1, &compose_spans(&a, &s2, &s3).unwrap()).unwrap();
            assert_eq!(left, right, "{name}");
            assert_eq!(compose_spans(&a, &QSpan::identity(&a, x), &s1).unwrap(), s1);
            assert_eq!(compose_spans(&a, &s1, &QSpan::identity(&a, y)).unwrap(), s1);
        }
    }
}

#[test]
fn nerve_shape() {
    let f1 = monoid("F1");
    let guard = SizeGuard::default();
    let nerve = build_nerve(&f1, 1, &guard).unwrap();
    assert_eq!(nerve.vertex_count(), 2);
    assert_eq!(nerve.edges.len() as u128, (0..=1).flat_map(|m| (0..=1).map(move |n| span_count(1, m, n))).sum());
    for n in 1..=3 {
        let nerve = build_nerve(&f1, n, &guard).unwrap();
        for &(f, g, h) in &nerve.triangles {
            assert_eq!(compose_spans(&f1, &nerve.edges[f], &nerve.edges[g]).unwrap(), nerve.edges[h]);
        }
    }
    assert!(build_nerve(&f1, 3, &SizeGuard::new(10)).is_err());
}

#[test]
fn pi1_abelianization_cross_check() {
    let guard = SizeGuard::default();
    for (name, n) in [("F1", 1), ("F1", 2), ("F1", 3), ("Z/2*", 1), ("Z/2*", 2), ("Z/3*", 1), ("Z/3*", 2)] {
        let a = monoid(name);
        let nerve = build_nerve(&a, n, &guard).unwrap();
        let r = pi1_presentation(&a, &nerve).unwrap();
        let gens = r.presentation.generators.len();
        let rows: Vec<Vec<i128>> = r
            .presentation
            .relators
            .iter()
            .map(|w| {
                let mut row = vec![0i128; gens];
                for &(g, e) in w {
                    row[g] += e as i128;
                }
                row
            })
            .collect();
        let expected = if rows.is_empty() { (gens, vec![]) } else { common::chain::cokernel(rows, gens) };
        assert_eq!((r.abelianization.free_rank(), r.abelianization.torsion().to_vec()), expected, "{name} N={n}");
        assert!(r.weights_consistent && r.rank_surjective, "{name} N={n}");
        assert_eq!(r.vertices, n + 1);
    }
}
