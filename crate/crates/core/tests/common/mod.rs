//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod chain;

use std::collections::BTreeSet;
use std::sync::Arc;

use monoidk::aset::FiniteASet;
use monoidk::monoid::{standard_monoids, PointedMonoid};
use monoidk::perm::Permutation;

pub fn monoids() -> Vec<(String, Arc<PointedMonoid>)> {
    standard_monoids().into_iter().map(|(n, m)| (n, Arc::new(m))).collect()
}

/// The test monoids with at most `max` elements.
pub fn small_monoids(max: usize) -> Vec<(String, Arc<PointedMonoid>)> {
    monoids().into_iter().filter(|(_, m)| m.len() <= max).collect()
}

pub fn monoid(name: &str) -> Arc<PointedMonoid> {
    monoids().into_iter().find(|(n, _)| n == name).map(|(_, m)| m).expect("known test monoid")
}

/// Every A-set with carrier size exactly `k`, one per isomorphism class,
/// found by backtracking over the action table point by point.
pub fn asets_of_size(a: &Arc<PointedMonoid>, k: usize) -> Vec<Arc<FiniteASet>> {
    let others: Vec<usize> = (0..a.len()).filter(|&x| x != a.zero() && x != a.one()).collect();
    // act[i][x] for x in 0..k, i indexing `others`; usize::MAX = unassigned
    let mut act = vec![vec![usize::MAX; k]; others.len()];
    for row in act.iter_mut() {
        row[0] = 0;
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let perms: Vec<Permutation> = Permutation::all(k.saturating_sub(1));
    fill(a, &others, &mut act, 1, 0, k, &mut |act| {
        let canon = canonical(&others, act, k, &perms);
        if seen.insert(canon) {
            out.push(Arc::new(build(a, &others, act, k)));
        }
    });
    out
}

/// All A-sets with carrier at most `max_len`, up to isomorphism.
pub fn all_asets(a: &Arc<PointedMonoid>, max_len: usize) -> Vec<Arc<FiniteASet>> {
    (1..=max_len).flat_map(|k| asets_of_size(a, k)).collect()
}

fn value(a: &PointedMonoid, others: &[usize], act: &[Vec<usize>], x: usize, m: usize) -> usize {
    if m == 0 || x == a.zero() {
        0
    } else if x == a.one() {
        m
    } else {
        act[others.iter().position(|&o| o == x).expect("listed")][m]
    }
}

fn consistent(a: &PointedMonoid, others: &[usize], act: &[Vec<usize>], upto: usize) -> bool {
    for m in 1..=upto {
        for &y in others {
            let ym = value(a, others, act, y, m);
            if ym == usize::MAX || ym > upto {
                continue;
            }
            for &x in others {
                let lhs = value(a, others, act, x, ym);
                let rhs = value(a, others, act, a.mul(x, y), m);
                if lhs != usize::MAX && rhs != usize::MAX && lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

fn fill(
    a: &PointedMonoid,
    others: &[usize],
    act: &mut Vec<Vec<usize>>,
    m: usize,
    i: usize,
    k: usize,
    emit: &mut impl FnMut(&[Vec<usize>]),
) {
    if m == k {
        emit(act);
        return;
    }
    if i == others.len() {
        if consistent(a, others, act, m) {
            fill(a, others, act, m + 1, 0, k, emit);
        }
        return;
    }
    for v in 0..k {
        act[i][m] = v;
        fill(a, others, act, m, i + 1, k, emit);
    }
    act[i][m] = usize::MAX;
}

fn canonical(others: &[usize], act: &[Vec<usize>], k: usize, perms: &[Permutation]) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for p in perms {
        // point m ≥ 1 goes to p(m-1)+1
        let relabel = |m: usize| if m == 0 { 0 } else { p.apply(m - 1) + 1 };
        let mut table = vec![0; others.len() * k];
        for (i, row) in act.iter().enumerate() {
            for m in 1..k {
                table[i * k + relabel(m)] = relabel(row[m]);
            }
        }
        if best.as_ref().is_none_or(|b| table < *b) {
            best = Some(table);
        }
    }
    best.unwrap_or_default()
}

fn build(a: &Arc<PointedMonoid>, others: &[usize], act: &[Vec<usize>], k: usize) -> FiniteASet {
    let labels = std::iter::once("*".to_string()).chain((1..k).map(|m| format!("p{m}"))).collect();
    let table = (0..a.len()).map(|x| (0..k).map(|m| value(a, others, act, x, m)).collect()).collect();
    FiniteASet::new(a.clone(), labels, table).expect("enumerated tables satisfy the action axioms")
}

use monoidk::aset::{
    all_congruences, coequalizer, free_of_rank, hom_maps, hom_set, pullback, random_aset, random_morphism, ASetMorphism,
    Biset,
};
use rand::Rng;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub instances: usize,
    pub failures: usize,
}

impl Sweep {
    fn record(&mut self, ok: bool) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

/// Bit `pair_index(x, y)` for unordered pairs `x < y` of a carrier of size `n`.
fn pair_index(n: usize, x: usize, y: usize) -> usize {
    let (x, y) = if x < y { (x, y) } else { (y, x) };
    x * n - x * (x + 1) / 2 + (y - x - 1)
}

/// The relation mask of every A-compatible partition of `n`.
struct CongruenceLattice {
    masks: Vec<u64>,
    blocks: Vec<Vec<usize>>,
}

impl CongruenceLattice {
    /// Enumerates set partitions directly and keeps the A-compatible ones.
    fn of(n: &FiniteASet) -> Self {
        let len = n.len();
        let mut masks = Vec::new();
        let mut blocks = Vec::new();
        let mut rgs = vec![0usize; len];
        loop {
            let compatible = (0..n.monoid().len()).all(|a| {
                (0..len).all(|x| (x + 1..len).all(|y| rgs[x] != rgs[y] || rgs[n.act(a, x)] == rgs[n.act(a, y)]))
            });
            if compatible {
                let mut mask = 0u64;
                for x in 0..len {
                    for y in x + 1..len {
                        if rgs[x] == rgs[y] {
                            mask |= 1 << pair_index(len, x, y);
                        }
                    }
                }
                masks.push(mask);
                blocks.push(rgs.clone());
            }
            // next restricted growth string
            let mut i = len;
            loop {
                if i <= 1 {
                    return CongruenceLattice { masks, blocks };
                }
                i -= 1;
                let max_prev = rgs[..i].iter().copied().max().unwrap_or(0);
                if rgs[i] <= max_prev {
                    rgs[i] += 1;
                    for r in rgs[i + 1..].iter_mut() {
                        *r = 0;
                    }
                    break;
                }
            }
        }
    }

    /// The unique smallest congruence containing `mask`, if the containing
    /// ones have a least element.
    fn minimal(&self, mask: u64) -> Option<u64> {
        let containing: Vec<u64> = self.masks.iter().copied().filter(|m| mask & !m == 0).collect();
        let least = *containing.iter().min_by_key(|m| m.count_ones())?;
        containing.iter().all(|m| least & !m == 0).then_some(least)
    }
}

fn quotient_mask(q: &ASetMorphism) -> u64 {
    let len = q.source().len();
    let mut mask = 0;
    for x in 0..len {
        for y in x + 1..len {
            if q.apply(x) == q.apply(y) {
                mask |= 1 << pair_index(len, x, y);
            }
        }
    }
    mask
}

/// Coequalizers against the minimal-congruence oracle, over every relation
/// set on every A-set `N` of carrier ≤ `max_len`. Each relation set `S` is
/// realized by the pair of maps from the free A-set on `S`.
pub fn coequalizer_relation_sweep(a: &Arc<PointedMonoid>, max_len: usize) -> Sweep {
    let mut sweep = Sweep::default();
    let frees: Vec<_> = (0..=max_len * (max_len - 1) / 2).map(|k| free_of_rank(a, k)).collect();
    for n in all_asets(a, max_len) {
        let lattice = CongruenceLattice::of(&n);
        let len = n.len();
        let pairs: Vec<(usize, usize)> = (0..len).flat_map(|x| (x + 1..len).map(move |y| (x, y))).collect();
        for subset in 0u64..(1 << pairs.len()) {
            let chosen: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| subset >> i & 1 == 1).map(|(_, &p)| p).collect();
            let free = &frees[chosen.len()];
            let left: Vec<usize> = chosen.iter().map(|p| p.0).collect();
            let right: Vec<usize> = chosen.iter().map(|p| p.1).collect();
            let f = free.extend(&n, &left).expect("free extension");
            let g = free.extend(&n, &right).expect("free extension");
            let q = coequalizer(&f, &g).expect("parallel pair");
            let expected = lattice.minimal(subset_mask(len, &chosen));
            sweep.record(expected == Some(quotient_mask(&q)) && q.is_surjective());
        }
    }
    sweep
}

fn subset_mask(len: usize, pairs: &[(usize, usize)]) -> u64 {
    pairs.iter().fold(0, |m, &(x, y)| m | 1 << pair_index(len, x, y))
}

/// Coequalizers of every parallel pair `M ⇉ N` with `|M| ≤ max_source` and
/// `|N| ≤ max_len`, against the same oracle.
pub fn coequalizer_pair_sweep(a: &Arc<PointedMonoid>, max_source: usize, max_len: usize) -> Sweep {
    let mut sweep = Sweep::default();
    let targets = all_asets(a, max_len);
    let sources = all_asets(a, max_source);
    for n in &targets {
        let lattice = CongruenceLattice::of(n);
        for m in &sources {
            let maps = hom_maps(m, n).expect("same monoid");
            for f in &maps {
                for g in &maps {
                    let pairs: Vec<(usize, usize)> =
                        (0..m.len()).filter(|&x| f[x] != g[x]).map(|x| (f[x], g[x])).collect();
                    let fm = ASetMorphism::new(m.clone(), n.clone(), f.clone()).expect("hom");
                    let gm = ASetMorphism::new(m.clone(), n.clone(), g.clone()).expect("hom");
                    let q = coequalizer(&fm, &gm).expect("parallel pair");
                    let expected = lattice.minimal(subset_mask(n.len(), &pairs));
                    sweep.record(expected == Some(quotient_mask(&q)));
                }
            }
        }
    }
    sweep
}

/// The number of pointed maps `φ: M ∧ N → P` with `φ(am, n) = aφ(m, n)`,
/// `φ(m, nc) = φ(m, n)c` and `φ(mb, n) = φ(m, bn)`, by backtracking.
pub fn balanced_map_count(m: &Biset, n: &Biset, p: &Biset) -> usize {
    let (ml, nl) = (m.len(), n.len());
    let cells: Vec<(usize, usize)> = (1..ml).flat_map(|x| (1..nl).map(move |y| (x, y))).collect();
    let mut phi = vec![usize::MAX; cells.len()];
    let at = |x: usize, y: usize| if x == 0 || y == 0 { None } else { Some((x - 1) * (nl - 1) + (y - 1)) };
    let ok = |phi: &[usize]| {
        let get = |x: usize, y: usize| match at(x, y) {
            None => Some(0),
            Some(i) => (phi[i] != usize::MAX).then_some(phi[i]),
        };
        for &(x, y) in &cells {
            let Some(v) = get(x, y) else { continue };
            for a in 0..m.left_monoid().len() {
                if let Some(w) = get(m.act_left(a, x), y) {
                    if w != p.act_left(a, v) {
                        return false;
                    }
                }
            }
            for c in 0..n.right_monoid().len() {
                if let Some(w) = get(x, n.act_right(y, c)) {
                    if w != p.act_right(v, c) {
                        return false;
                    }
                }
            }
            for b in 0..m.right_monoid().len() {
                if let (Some(u), Some(w)) = (get(m.act_right(x, b), y), get(x, n.act_left(b, y))) {
                    if u != w {
                        return false;
                    }
                }
            }
        }
        true
    };
    fn go(i: usize, phi: &mut Vec<usize>, size: usize, ok: &dyn Fn(&[usize]) -> bool) -> usize {
        if i == phi.len() {
            return 1;
        }
        let mut total = 0;
        for v in 0..size {
            phi[i] = v;
            if ok(phi) {
                total += go(i + 1, phi, size, ok);
            }
        }
        phi[i] = usize::MAX;
        total
    }
    go(0, &mut phi, p.len(), &ok)
}

/// A random `(M, N, P)` for the adjunction over a commutative `A`, with
/// `B` and `C` each either `A` or `𝔽₁`.
pub fn random_adjunction_triple<R: Rng>(a: &Arc<PointedMonoid>, max_len: usize, rng: &mut R) -> (Biset, Biset, Biset) {
    let f1 = Arc::new(PointedMonoid::f1());
    let b_is_a = rng.gen_bool(0.5);
    let c_is_a = b_is_a && rng.gen_bool(0.5);
    let over = |m: &Arc<PointedMonoid>, rng: &mut R| random_aset(m, max_len, rng);
    let x = over(a, rng);
    let m = if b_is_a { Biset::symmetric(&x).expect("commutative") } else { Biset::from_left(&x) };
    let n = if b_is_a {
        let y = over(a, rng);
        if c_is_a {
            Biset::symmetric(&y).expect("commutative")
        } else {
            Biset::from_left(&y)
        }
    } else {
        Biset::from_left(&over(&f1, rng))
    };
    let z = over(a, rng);
    let p = if c_is_a { Biset::symmetric(&z).expect("commutative") } else { Biset::from_left(&z) };
    (m, n, p)
}

/// Checks the universal property of the pullback of `f: K → M ← N: g`
/// against every cone from every A-set of carrier ≤ `max_apex`.
pub fn pullback_cone_check(f: &ASetMorphism, g: &ASetMorphism, max_apex: usize) -> bool {
    let pb = pullback(f, g).expect("cospan");
    let a = f.source().monoid().clone();
    for x in all_asets(&a, max_apex) {
        let to_k = hom_set(&x, f.source()).expect("same monoid");
        let to_n = hom_set(&x, g.source()).expect("same monoid");
        let to_pb = hom_set(&x, &pb.set).expect("same monoid");
        for u in &to_k {
            for v in &to_n {
                let uf = u.then(f).expect("composable");
                let vg = v.then(g).expect("composable");
                if uf.map() != vg.map() {
                    continue;
                }
                let factorizations = to_pb
                    .iter()
                    .filter(|h| {
                        h.then(&pb.p1).map(|c| c.map() == u.map()).unwrap_or(false)
                            && h.then(&pb.p2).map(|c| c.map() == v.map()).unwrap_or(false)
                    })
                    .count();
                if factorizations != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// A random cospan `K → M ← N` with carriers ≤ `max_len`.
pub fn random_cospan<R: Rng>(a: &Arc<PointedMonoid>, max_len: usize, rng: &mut R) -> (ASetMorphism, ASetMorphism) {
    let m = random_aset(a, max_len, rng);
    let k = random_aset(a, max_len, rng);
    let n = random_aset(a, max_len, rng);
    (random_morphism(&k, &m, rng).expect("hom"), random_morphism(&n, &m, rng).expect("hom"))
}

pub fn congruence_count(n: &FiniteASet) -> usize {
    all_congruences(n).len()
}

pub fn lattice_size(n: &FiniteASet) -> usize {
    CongruenceLattice::of(n).blocks.len()
}
