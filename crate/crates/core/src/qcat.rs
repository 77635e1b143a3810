//! The Q-construction on free A-sets of rank at most `N`, and the edge-path
//! group of its nerve.
//!
//! A span `M ↞ P ↣ N` between free A-sets of ranks `m, n` with middle of
//! rank `p` is stored as a pair of row-monomic matrices: `epi` is `p×m` and
//! `mono` is `p×n`, row `k` giving the image of the `k`-th basis element of
//! `P`. Two spans are isomorphic iff they differ by `GLₚ(A)` acting on rows,
//! so the canonical form scales each row to make its mono entry `1` and
//! sorts rows by mono column.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{smith_normal_form, FgAbelianGroup, IntegerMatrix, SmithForm};
use crate::aset::{free_of_rank, pullback, ASetMorphism, FreeASet};
use crate::guard::{SizeGuard, SizeGuardError};
use crate::ktheory::free_basis;
use crate::matrix::RowMonomicMatrix;
use crate::monoid::{units, PointedMonoid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    #[error("not an admissible span: {0}")]
    NotAdmissible(String),
    #[error("spans are not composable: {0}")]
    ObjectMismatch(String),
    #[error("{0}")]
    Structural(String),
    #[error(transparent)]
    SizeGuard(#[from] SizeGuardError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QSpan {
    source: usize,
    target: usize,
    epi: RowMonomicMatrix,
    mono: RowMonomicMatrix,
}

impl QSpan {
    /// Validates admissibility and returns the canonical representative.
    pub fn new(
        a: &PointedMonoid,
        source: usize,
        target: usize,
        epi: RowMonomicMatrix,
        mono: RowMonomicMatrix,
    ) -> Result<Self, QError> {
        let p = epi.rows();
        if mono.rows() != p || epi.cols() != source || mono.cols() != target {
            return Err(QError::NotAdmissible("leg shapes do not match".into()));
        }
        let mut epi_hit = vec![false; source];
        let mut mono_hit = vec![false; target];
        for k in 0..p {
            if let Some((c, x)) = epi.entries()[k] {
                if !a.is_unit(x) || std::mem::replace(&mut epi_hit[c], true) {
                    return Err(QError::NotAdmissible(format!("epi is not normal at row {k}")));
                }
            }
            match mono.entries()[k] {
                Some((c, x)) if a.is_unit(x) && !std::mem::replace(&mut mono_hit[c], true) => {}
                _ => return Err(QError::NotAdmissible(format!("mono is not injective at row {k}"))),
            }
        }
        if epi_hit.iter().any(|h| !h) {
            return Err(QError::NotAdmissible("epi is not onto".into()));
        }
        let mut rows: Vec<(usize, Option<(usize, usize)>)> = (0..p)
            .map(|k| {
                let (c, b) = mono.entries()[k].expect("checked above");
                let u = a.inverse(b).expect("unit");
                (c, epi.entries()[k].map(|(l, x)| (l, a.mul(u, x))))
            })
            .collect();
        rows.sort_unstable();
        let one = a.one();
        let epi = RowMonomicMatrix::new(a, p, source, rows.iter().map(|r| r.1).collect()).expect("valid entries");
        let mono = RowMonomicMatrix::new(a, p, target, rows.iter().map(|r| Some((r.0, one))).collect())
            .expect("valid entries");
        Ok(QSpan { source, target, epi, mono })
    }

    pub fn identity(a: &PointedMonoid, n: usize) -> Self {
        QSpan {
            source: n,
            target: n,
            epi: RowMonomicMatrix::identity(a, n),
            mono: RowMonomicMatrix::identity(a, n),
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn middle_rank(&self) -> usize {
        self.epi.rows()
    }

    pub fn epi(&self) -> &RowMonomicMatrix {
        &self.epi
    }

    pub fn mono(&self) -> &RowMonomicMatrix {
        &self.mono
    }

    /// Rank of the middle minus rank of the source.
    pub fn weight(&self) -> i64 {
        self.middle_rank() as i64 - self.source as i64
    }

    pub fn display(&self, a: &PointedMonoid) -> String {
        format!(
            "{} <- {} -> {} epi {} mono {}",
            self.source,
            self.middle_rank(),
            self.target,
            self.epi.display(a),
            self.mono.display(a)
        )
    }

    /// The two legs as A-set morphisms between free A-sets.
    pub fn realize(&self, a: &Arc<PointedMonoid>) -> RealizedSpan {
        let middle = free_of_rank(a, self.middle_rank());
        let source = free_of_rank(a, self.source);
        let target = free_of_rank(a, self.target);
        let images = |mat: &RowMonomicMatrix, to: &FreeASet| -> Vec<usize> {
            mat.entries()
                .iter()
                .map(|e| match *e {
                    Some((c, x)) => to.set.act(x, to.generators[c]),
                    None => crate::aset::BASE,
                })
                .collect()
        };
        let epi = middle.extend(&source.set, &images(&self.epi, &source)).expect("same monoid");
        let mono = middle.extend(&target.set, &images(&self.mono, &target)).expect("same monoid");
        RealizedSpan { source, middle, target, epi, mono }
    }
}

#[derive(Debug, Clone)]
pub struct RealizedSpan {
    pub source: FreeASet,
    pub middle: FreeASet,
    pub target: FreeASet,
    pub epi: ASetMorphism,
    pub mono: ASetMorphism,
}

/// `(M ↞ P ↣ N) then (N ↞ Q ↣ R)` through the pullback `P ×_N Q`.
pub fn compose_spans(a: &Arc<PointedMonoid>, s1: &QSpan, s2: &QSpan) -> Result<QSpan, QError> {
    if s1.target != s2.source {
        return Err(QError::ObjectMismatch(format!("rank {} vs rank {}", s1.target, s2.source)));
    }
    let r1 = s1.realize(a);
    let r2 = s2.realize(a);
    let pb = pullback(&r1.mono, &r2.epi).map_err(|e| QError::Structural(e.to_string()))?;
    let basis = free_basis(&pb.set);
    let basis = basis
        .basis()
        .ok_or_else(|| QError::Structural("pullback of free A-sets is not free".into()))?;
    let mut epi_rows = Vec::with_capacity(basis.len());
    let mut mono_rows = Vec::with_capacity(basis.len());
    for &b in basis {
        let alpha = r1.epi.apply(pb.p1.apply(b));
        let beta = r2.mono.apply(pb.p2.apply(b));
        epi_rows.push(r1.source.coordinates(alpha));
        mono_rows.push(r2.target.coordinates(beta));
    }
    let p = basis.len();
    let epi = RowMonomicMatrix::new(a, p, s1.source, epi_rows).expect("coordinates are in range");
    let mono = RowMonomicMatrix::new(a, p, s2.target, mono_rows).expect("coordinates are in range");
    QSpan::new(a, s1.source, s2.target, epi, mono)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Injective maps `{0..m} → {0..p}`.
fn injections(m: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let free: Vec<usize> = (0..p).filter(|x| !v.contains(x)).collect();
                free.into_iter().map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// `Σₚ C(n,p)·C(p,m)·m!·|A^×|^m`.
pub fn span_count(unit_count: usize, m: usize, n: usize) -> u128 {
    let binom = |n: u128, k: u128| -> u128 { (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)) };
    let fact = |k: u128| -> u128 { (1..=k).product() };
    (m..=n)
        .map(|p| {
            binom(n as u128, p as u128)
                * binom(p as u128, m as u128)
                * fact(m as u128)
                * (unit_count as u128).pow(m as u32)
        })
        .sum()
}

/// All span classes `m → n`, canonical and sorted.
pub fn spans_between(a: &PointedMonoid, m: usize, n: usize) -> Vec<QSpan> {
    let unit_elems = units(a).monoid_elements().to_vec();
    let mut out = Vec::new();
    for p in m..=n {
        for cols in subsets(n, p) {
            let mono = RowMonomicMatrix::new(a, p, n, cols.iter().map(|&c| Some((c, a.one()))).collect())
                .expect("valid entries");
            for inj in injections(m, p) {
                let mut labels: Vec<Vec<usize>> = vec![vec![]];
                for _ in 0..m {
                    labels = labels
                        .into_iter()
                        .flat_map(|v| {
                            unit_elems.iter().map(move |&u| {
                                let mut w = v.clone();
                                w.push(u);
                                w
                            })
                        })
                        .collect();
                }
                for us in labels {
                    let mut rows = vec![None; p];
                    for (l, (&k, &u)) in inj.iter().zip(&us).enumerate() {
                        rows[k] = Some((l, u));
                    }
                    let epi = RowMonomicMatrix::new(a, p, m, rows).expect("valid entries");
                    out.push(QSpan { source: m, target: n, epi, mono: mono.clone() });
                }
            }
        }
    }
    out.sort();
    out
}

/// The 2-skeleton of the nerve of the truncated Q-category.
#[derive(Debug, Clone)]
pub struct Nerve {
    pub rank_bound: usize,
    pub edges: Vec<QSpan>,
    /// `(f, g, g∘f)` as edge indices.
    pub triangles: Vec<(usize, usize, usize)>,
}

impl Nerve {
    pub fn vertex_count(&self) -> usize {
        self.rank_bound + 1
    }
}

pub fn build_nerve(a: &Arc<PointedMonoid>, rank_bound: usize, guard: &SizeGuard) -> Result<Nerve, QError> {
    let u = units(a).order();
    let mut counts = vec![vec![0u128; rank_bound + 1]; rank_bound + 1];
    for (m, row) in counts.iter_mut().enumerate() {
        for (n, c) in row.iter_mut().enumerate() {
            *c = span_count(u, m, n);
        }
    }
    let edge_total: u128 = counts.iter().flatten().sum();
    guard.check("Q-category spans", edge_total)?;
    let triangle_total: u128 = (0..=rank_bound)
        .map(|b| (0..=rank_bound).map(|x| counts[x][b]).sum::<u128>() * counts[b].iter().sum::<u128>())
        .sum();
    guard.check("Q-category composable pairs", triangle_total)?;

    let mut edges = Vec::new();
    for m in 0..=rank_bound {
        for n in 0..=rank_bound {
            edges.extend(spans_between(a, m, n));
        }
    }
    edges.sort_by(|x, y| (x.source, x.target).cmp(&(y.source, y.target)).then(x.cmp(y)));
    let index: HashMap<&QSpan, usize> = edges.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); rank_bound + 1];
    for (i, e) in edges.iter().enumerate() {
        by_source[e.source].push(i);
    }
    let mut triangles = Vec::with_capacity(triangle_total as usize);
    for (f, ef) in edges.iter().enumerate() {
        for &g in &by_source[ef.target] {
            let h = compose_spans(a, ef, &edges[g])?;
            let &hi = index.get(&h).ok_or_else(|| {
                QError::Structural(format!("composite {} is not an enumerated span", h.display(a)))
            })?;
            triangles.push((f, g, hi));
        }
    }
    Ok(Nerve { rank_bound, edges, triangles })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgePathPresentation {
    /// Edge index of each generator.
    pub generators: Vec<usize>,
    /// Edge index of each spanning-tree edge.
    pub tree: Vec<usize>,
    /// One word per triangle, as `(generator, ±1)` letters.
    pub relators: Vec<Vec<(usize, i32)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopClass {
    pub rank: usize,
    /// `0 ← 0 → P` followed by the reverse of `0 ← P → P`.
    pub edges: (usize, usize),
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Additivity {
    pub p: usize,
    pub q: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pi1Report {
    pub rank_bound: usize,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub presentation: EdgePathPresentation,
    pub abelianization: FgAbelianGroup,
    pub invariant_factors: Vec<String>,
    /// Rank weight of each generator after the tree correction.
    pub generator_weights: Vec<i64>,
    /// Every relator has total weight zero.
    pub weights_consistent: bool,
    pub weight_gcd: i64,
    pub rank_surjective: bool,
    pub loop_classes: Vec<LoopClass>,
    pub additivity: Vec<Additivity>,
    pub is_integers: bool,
}

/// BFS spanning tree from rank 0, edges taken in canonical order.
fn spanning_tree(nerve: &Nerve) -> Result<(Vec<bool>, Vec<i64>), QError> {
    let nv = nerve.vertex_count();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, e) in nerve.edges.iter().enumerate() {
        incident[e.source].push(i);
        if e.target != e.source {
            incident[e.target].push(i);
        }
    }
    for list in &mut incident {
        list.sort_unstable();
    }
    let mut potential = vec![None; nv];
    let mut in_tree = vec![false; nerve.edges.len()];
    potential[0] = Some(0i64);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let pv = potential[v].expect("visited");
        for &i in &incident[v] {
            let e = &nerve.edges[i];
            let (w, pw) = if e.source == v { (e.target, pv + e.weight()) } else { (e.source, pv - e.weight()) };
            if potential[w].is_none() {
                potential[w] = Some(pw);
                in_tree[i] = true;
                queue.push_back(w);
            }
        }
    }
    let potential = potential
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| QError::Structural("nerve is disconnected".into()))?;
    Ok((in_tree, potential))
}

/// `ℤ^gens` modulo a list of sparse relations. Generators occurring with
/// coefficient `±1` are eliminated first; the Smith form is taken of what
/// remains, which keeps the dense part small.
struct RelationModule {
    eliminations: Vec<(usize, i64, BTreeMap<usize, i64>)>,
    keep: Vec<usize>,
    snf: Option<SmithForm>,
}

fn overflow() -> QError {
    QError::Structural("relation coefficients overflow".into())
}

/// `v -= k·r`
fn sub_multiple(v: &mut BTreeMap<usize, i64>, k: i64, r: &BTreeMap<usize, i64>) -> Result<(), QError> {
    for (&y, &c) in r {
        let e = v.entry(y).or_insert(0);
        *e = c.checked_mul(k).and_then(|t| e.checked_sub(t)).ok_or_else(overflow)?;
        if *e == 0 {
            v.remove(&y);
        }
    }
    Ok(())
}

impl RelationModule {
    fn new(ngens: usize, mut rels: Vec<BTreeMap<usize, i64>>) -> Result<Self, QError> {
        let mut occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ngens];
        for (i, r) in rels.iter().enumerate() {
            for &x in r.keys() {
                occ[x].insert(i);
            }
        }
        let mut alive = vec![true; rels.len()];
        let mut eliminated = vec![false; ngens];
        let mut eliminations = Vec::new();
        loop {
            let mut changed = false;
            for i in 0..rels.len() {
                if !alive[i] {
                    continue;
                }
                let Some((&x, &c)) = rels[i].iter().find(|(_, c)| c.abs() == 1) else {
                    continue;
                };
                alive[i] = false;
                changed = true;
                let r = std::mem::take(&mut rels[i]);
                for &y in r.keys() {
                    occ[y].remove(&i);
                }
                for j in std::mem::take(&mut occ[x]) {
                    let k = rels[j][&x] * c;
                    let before: Vec<usize> = rels[j].keys().copied().collect();
                    sub_multiple(&mut rels[j], k, &r)?;
                    for y in before {
                        if !rels[j].contains_key(&y) {
                            occ[y].remove(&j);
                        }
                    }
                    for &y in rels[j].keys() {
                        occ[y].insert(j);
                    }
                }
                eliminated[x] = true;
                eliminations.push((x, c, r));
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..ngens).filter(|&x| !eliminated[x]).collect();
        let mut remaining = BTreeSet::new();
        for (i, r) in rels.iter().enumerate() {
            if alive[i] && !r.is_empty() {
                let mut v: Vec<(usize, i64)> = r.iter().map(|(&x, &c)| (x, c)).collect();
                if v[0].1 < 0 {
                    v.iter_mut().for_each(|t| t.1 = -t.1);
                }
                remaining.insert(v);
            }
        }
        let snf = if keep.is_empty() {
            None
        } else {
            let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let mut m = IntegerMatrix::zeros(keep.len(), remaining.len().max(1));
            for (col, v) in remaining.iter().enumerate() {
                for &(x, c) in v {
                    m.add_to(pos[&x], col, c);
                }
            }
            Some(smith_normal_form(&m))
        };
        Ok(RelationModule { eliminations, keep, snf })
    }

    fn cokernel(&self) -> Result<FgAbelianGroup, QError> {
        match &self.snf {
            None => Ok(FgAbelianGroup::trivial()),
            Some(s) => s.cokernel().map_err(|e| QError::Structural(e.to_string())),
        }
    }

    fn invariant_factors(&self) -> Vec<String> {
        self.snf
            .as_ref()
            .map(|s| s.invariant_factors().iter().map(|d| d.to_string()).collect())
            .unwrap_or_default()
    }

    /// Whether `v` lies in the relation lattice.
    fn contains(&self, v: &[i64]) -> Result<bool, QError> {
        let mut w: BTreeMap<usize, i64> = v.iter().enumerate().filter(|(_, c)| **c != 0).map(|(x, &c)| (x, c)).collect();
        for (x, c, r) in &self.eliminations {
            if let Some(&k) = w.get(x) {
                sub_multiple(&mut w, k * c, r)?;
            }
        }
        match &self.snf {
            None => Ok(w.is_empty()),
            Some(s) => {
                let dense: Vec<BigInt> = self.keep.iter().map(|x| BigInt::from(*w.get(x).unwrap_or(&0))).collect();
                s.image_contains(&dense).map_err(|e| QError::Structural(e.to_string()))
            }
        }
    }
}

pub fn pi1_presentation(a: &PointedMonoid, nerve: &Nerve) -> Result<Pi1Report, QError> {
    let (in_tree, potential) = spanning_tree(nerve)?;
    let mut gen_of = vec![None; nerve.edges.len()];
    let mut generators = Vec::new();
    let mut tree = Vec::new();
    for i in 0..nerve.edges.len() {
        if in_tree[i] {
            tree.push(i);
        } else {
            gen_of[i] = Some(generators.len());
            generators.push(i);
        }
    }
    let relators: Vec<Vec<(usize, i32)>> = nerve
        .triangles
        .iter()
        .map(|&(f, g, h)| {
            [(f, 1), (g, 1), (h, -1)]
                .into_iter()
                .filter_map(|(e, s)| gen_of[e].map(|x| (x, s)))
                .collect()
        })
        .collect();

    let ng = generators.len();
    let relations = relators
        .iter()
        .map(|word| {
            let mut r = BTreeMap::new();
            for &(x, e) in word {
                *r.entry(x).or_insert(0i64) += e as i64;
            }
            r.retain(|_, c| *c != 0);
            r
        })
        .collect();
    let module = RelationModule::new(ng, relations)?;
    let abelianization = module.cokernel()?;

    let weight = |i: usize| {
        let e = &nerve.edges[i];
        e.weight() + potential[e.source] - potential[e.target]
    };
    let generator_weights: Vec<i64> = generators.iter().map(|&i| weight(i)).collect();
    let weights_consistent = relators
        .iter()
        .all(|w| w.iter().map(|&(x, s)| generator_weights[x] * s as i64).sum::<i64>() == 0);
    let weight_gcd = generator_weights.iter().fold(0i64, |g, &w| g.gcd(&w));

    let position = |s: &QSpan| nerve.edges.iter().position(|e| e == s);
    let mut loop_classes = Vec::new();
    let mut loop_vectors = Vec::new();
    for p in 1..=nerve.rank_bound {
        let mono_in = QSpan::new(
            a,
            0,
            p,
            RowMonomicMatrix::zero(0, 0),
            RowMonomicMatrix::zero(0, p),
        )?;
        let kill = QSpan::new(a, 0, p, RowMonomicMatrix::zero(p, 0), RowMonomicMatrix::identity(a, p))?;
        let (x, y) = match (position(&mono_in), position(&kill)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(QError::Structural(format!("standard loop edges at rank {p} missing"))),
        };
        let mut v = vec![0i64; ng];
        if let Some(gx) = gen_of[x] {
            v[gx] += 1;
        }
        if let Some(gy) = gen_of[y] {
            v[gy] -= 1;
        }
        loop_classes.push(LoopClass { rank: p, edges: (x, y), weight: weight(x) - weight(y) });
        loop_vectors.push(v);
    }
    let mut additivity = Vec::new();
    for p in 1..=nerve.rank_bound {
        for q in p..=nerve.rank_bound {
            if p + q > nerve.rank_bound {
                continue;
            }
            let diff: Vec<i64> = (0..ng)
                .map(|k| loop_vectors[p + q - 1][k] - loop_vectors[p - 1][k] - loop_vectors[q - 1][k])
                .collect();
            let holds = module.contains(&diff)?;
            additivity.push(Additivity { p, q, holds });
        }
    }
    let invariant_factors = module.invariant_factors();
    Ok(Pi1Report {
        rank_bound: nerve.rank_bound,
        vertices: nerve.vertex_count(),
        edges: nerve.edges.len(),
        triangles: nerve.triangles.len(),
        is_integers: abelianization == FgAbelianGroup::free(1),
        presentation: EdgePathPresentation { generators, tree, relators },
        abelianization,
        invariant_factors,
        rank_surjective: weights_consistent && weight_gcd.abs() == 1,
        generator_weights,
        weights_consistent,
        weight_gcd: weight_gcd.abs(),
        loop_classes,
        additivity,
    })
}

impl fmt::Display for Pi1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={}: {} edges, {} triangles, {} generators, pi1^ab = {}",
            self.rank_bound,
            self.edges,
            self.triangles,
            self.presentation.generators.len(),
            self.abelianization
        )
    }
}
