//! Finite pointed `A`-sets: morphisms, congruences, limits and colimits,
//! tensor and Hom over bisets, projectivity, and admissible exactness.
//!
//! The basepoint `*` is always carrier index 0.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monoid::{MonoidError, PointedMonoid};

pub const BASE: usize = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ASetError {
    #[error("A-sets are over different monoids")]
    MonoidMismatch,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("{0}")]
    Structural(String),
    #[error("A-set JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

fn same_monoid(a: &Arc<PointedMonoid>, b: &Arc<PointedMonoid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A finite pointed set with a left action of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteASet {
    monoid: Arc<PointedMonoid>,
    labels: Vec<String>,
    action: Vec<usize>,
}

fn check_action(
    a: &PointedMonoid,
    len: usize,
    act: impl Fn(usize, usize) -> usize,
    side: &str,
) -> Result<(), ASetError> {
    let bad = |msg: String| Err(ASetError::InvalidAction(format!("{side}: {msg}")));
    for m in 0..len {
        if act(a.one(), m) != m {
            return bad(format!("1 does not fix element {m}"));
        }
        if act(a.zero(), m) != BASE {
            return bad(format!("0 does not send element {m} to the basepoint"));
        }
    }
    for x in 0..a.len() {
        if act(x, BASE) != BASE {
            return bad(format!("{} moves the basepoint", a.label(x)));
        }
        for y in 0..a.len() {
            let xy = a.mul(x, y);
            for m in 0..len {
                if act(xy, m) != act(x, act(y, m)) {
                    return bad(format!(
                        "({}{})·m ≠ {}·({}·m) at element {m}",
                        a.label(x),
                        a.label(y),
                        a.label(x),
                        a.label(y)
                    ));
                }
            }
        }
    }
    Ok(())
}

impl FiniteASet {
    /// `action[a][m] = a·m`; the basepoint is carrier index 0.
    pub fn new(
        monoid: Arc<PointedMonoid>,
        labels: Vec<String>,
        action: Vec<Vec<usize>>,
    ) -> Result<Self, ASetError> {
        let len = labels.len();
        if len == 0 {
            return Err(ASetError::InvalidAction("empty carrier".into()));
        }
        if action.len() != monoid.len() || action.iter().any(|r| r.len() != len) {
            return Err(ASetError::InvalidAction(format!(
                "expected {}x{len} action table",
                monoid.len()
            )));
        }
        if action.iter().flatten().any(|&x| x >= len) {
            return Err(ASetError::InvalidAction("action leaves the carrier".into()));
        }
        let flat: Vec<usize> = action.into_iter().flatten().collect();
        check_action(&monoid, len, |a, m| flat[a * len + m], "left action")?;
        Ok(FiniteASet { monoid, labels, action: flat })
    }

    fn from_parts(monoid: Arc<PointedMonoid>, labels: Vec<String>, action: Vec<usize>) -> Self {
        debug_assert_eq!(action.len(), monoid.len() * labels.len());
        FiniteASet { monoid, labels, action }
    }

    /// The one-point A-set `{*}`.
    pub fn point(monoid: Arc<PointedMonoid>) -> Self {
        let n = monoid.len();
        Self::from_parts(monoid, vec!["*".into()], vec![BASE; n])
    }

    /// `A` acting on itself by left multiplication; the zero is the basepoint.
    pub fn regular(monoid: Arc<PointedMonoid>) -> Self {
        let order: Vec<usize> = std::iter::once(monoid.zero()).chain(monoid.nonzero()).collect();
        let mut pos = vec![0; monoid.len()];
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let labels = order.iter().map(|&x| monoid.label(x).to_string()).collect();
        let mut action = Vec::with_capacity(monoid.len() * order.len());
        for a in 0..monoid.len() {
            for &x in &order {
                action.push(pos[monoid.mul(a, x)]);
            }
        }
        Self::from_parts(monoid, labels, action)
    }

    pub fn monoid(&self) -> &Arc<PointedMonoid> {
        &self.monoid
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `a·m`
    #[inline]
    pub fn act(&self, a: usize, m: usize) -> usize {
        self.action[a * self.labels.len() + m]
    }

    pub fn action_row(&self, a: usize) -> &[usize] {
        let n = self.labels.len();
        &self.action[a * n..(a + 1) * n]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, m: usize) -> &str {
        &self.labels[m]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn ops(&self) -> Vec<&[usize]> {
        (0..self.monoid.len()).map(|a| self.action_row(a)).collect()
    }

    /// The orbit `A·m`.
    pub fn orbit(&self, m: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.monoid.len()).map(|a| self.act(a, m)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn same_shape(&self, other: &FiniteASet) -> bool {
        self.len() == other.len() && same_monoid(&self.monoid, &other.monoid)
    }

    /// The sub-A-set on `members` (must contain the basepoint and be closed),
    /// with its inclusion.
    pub fn sub(self: &Arc<Self>, members: &[usize]) -> Result<ASetMorphism, ASetError> {
        let mut pos = vec![usize::MAX; self.len()];
        let mut order: Vec<usize> = members.to_vec();
        order.sort_unstable();
        order.dedup();
        if order.first() != Some(&BASE) {
            return Err(ASetError::Structural("subset does not contain the basepoint".into()));
        }
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let mut action = Vec::with_capacity(self.monoid.len() * order.len());
        for a in 0..self.monoid.len() {
            for &x in &order {
                let y = self.act(a, x);
                if pos[y] == usize::MAX {
                    return Err(ASetError::Structural(format!("subset not closed at {}", self.label(x))));
                }
                action.push(pos[y]);
            }
        }
        let labels = order.iter().map(|&x| self.labels[x].clone()).collect();
        let sub = Arc::new(Self::from_parts(self.monoid.clone(), labels, action));
        Ok(ASetMorphism { source: sub, target: self.clone(), map: order })
    }

    pub fn from_file(monoid: Arc<PointedMonoid>, file: &ASetFile) -> Result<Self, ASetError> {
        let pos: HashMap<&str, usize> = file.carrier.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if pos.len() != file.carrier.len() {
            return Err(ASetError::InvalidAction("duplicate carrier label".into()));
        }
        let len = file.carrier.len();
        let mut rows: Vec<Option<Vec<usize>>> = vec![None; monoid.len()];
        rows[monoid.zero()] = Some(vec![BASE; len]);
        rows[monoid.one()] = Some((0..len).collect());
        for (a_label, images) in &file.action {
            let a = monoid
                .index_of(a_label)
                .ok_or_else(|| ASetError::InvalidAction(format!("unknown monoid element {a_label:?}")))?;
            if images.len() != len {
                return Err(ASetError::InvalidAction(format!("action of {a_label:?} has wrong length")));
            }
            let row = images
                .iter()
                .map(|l| {
                    pos.get(l.as_str())
                        .copied()
                        .ok_or_else(|| ASetError::InvalidAction(format!("unknown carrier label {l:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows[a] = Some(row);
        }
        let action = rows
            .into_iter()
            .enumerate()
            .map(|(a, r)| {
                r.ok_or_else(|| ASetError::InvalidAction(format!("missing action of {:?}", monoid.label(a))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(monoid, file.carrier.clone(), action)
    }

    /// JSON form with the monoid inlined.
    pub fn to_file(&self) -> ASetFile {
        let m = &self.monoid;
        ASetFile {
            monoid: serde_json::to_value(m.to_file()).expect("monoid serializes"),
            carrier: self.labels.clone(),
            action: m
                .nonzero()
                .filter(|&a| a != m.one())
                .map(|a| {
                    let row = self.action_row(a).iter().map(|&x| self.labels[x].clone()).collect();
                    (m.label(a).to_string(), row)
                })
                .collect(),
        }
    }
}

/// `{"monoid": <path or inline monoid>, "carrier": [...], "action": {"g": [...]}}`.
/// The first carrier label is the basepoint; zero and one act implicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ASetFile {
    pub monoid: serde_json::Value,
    pub carrier: Vec<String>,
    #[serde(default)]
    pub action: BTreeMap<String, Vec<String>>,
}

/// A pointed equivariant map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ASetMorphism {
    source: Arc<FiniteASet>,
    target: Arc<FiniteASet>,
    map: Vec<usize>,
}

impl ASetMorphism {
    pub fn new(source: Arc<FiniteASet>, target: Arc<FiniteASet>, map: Vec<usize>) -> Result<Self, ASetError> {
        if !same_monoid(&source.monoid, &target.monoid) {
            return Err(ASetError::MonoidMismatch);
        }
        if map.len() != source.len() || map.iter().any(|&y| y >= target.len()) {
            return Err(ASetError::InvalidMorphism("map does not fit the carriers".into()));
        }
        if map[BASE] != BASE {
            return Err(ASetError::InvalidMorphism("basepoint not preserved".into()));
        }
        for a in 0..source.monoid.len() {
            for m in 0..source.len() {
                if map[source.act(a, m)] != target.act(a, map[m]) {
                    return Err(ASetError::InvalidMorphism(format!(
                        "f({}·{}) ≠ {}·f({})",
                        source.monoid.label(a),
                        source.label(m),
                        source.monoid.label(a),
                        source.label(m)
                    )));
                }
            }
        }
        Ok(ASetMorphism { source, target, map })
    }

    pub(crate) fn new_unchecked(source: Arc<FiniteASet>, target: Arc<FiniteASet>, map: Vec<usize>) -> Self {
        ASetMorphism { source, target, map }
    }

    pub fn identity(m: &Arc<FiniteASet>) -> Self {
        ASetMorphism { source: m.clone(), target: m.clone(), map: (0..m.len()).collect() }
    }

    /// The map sending everything to `*`.
    pub fn zero(source: &Arc<FiniteASet>, target: &Arc<FiniteASet>) -> Self {
        ASetMorphism { source: source.clone(), target: target.clone(), map: vec![BASE; source.len()] }
    }

    pub fn source(&self) -> &Arc<FiniteASet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteASet> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, m: usize) -> usize {
        self.map[m]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ASetMorphism) -> Result<ASetMorphism, ASetError> {
        if *self.target != *next.source {
            return Err(ASetError::Structural("morphisms are not composable".into()));
        }
        Ok(ASetMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&x| next.map[x]).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.map.iter().all(|&y| y == BASE)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &y in &self.map {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.len() == self.target.len() && self.is_injective()
    }

    /// `f⁻¹(*) = {*}`. Weaker than injectivity.
    pub fn has_trivial_kernel(&self) -> bool {
        self.map.iter().skip(1).all(|&y| y != BASE)
    }

    /// Two distinct points off the kernel with the same image, if any.
    pub fn normal_failure(&self) -> Option<(usize, usize)> {
        let mut first = vec![usize::MAX; self.target.len()];
        for (x, &y) in self.map.iter().enumerate() {
            if y == BASE {
                continue;
            }
            if first[y] != usize::MAX {
                return Some((first[y], x));
            }
            first[y] = x;
        }
        None
    }

    /// Injective off the kernel.
    pub fn is_normal(&self) -> bool {
        self.normal_failure().is_none()
    }

    /// Sorted image indices.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// An equivalence relation compatible with the action. Blocks are numbered
/// by first appearance, so the basepoint's block is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Congruence {
    block_of: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

/// Smallest equivalence containing `pairs` and closed under every map in `ops`.
fn closure_blocks(len: usize, ops: &[&[usize]], pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut uf = UnionFind::new(len);
    for (x, y) in pairs {
        uf.union(x, y);
    }
    loop {
        let mut changed = false;
        for x in 0..len {
            let r = uf.find(x);
            if r == x {
                continue;
            }
            for op in ops {
                changed |= uf.union(op[x], op[r]);
            }
        }
        if !changed {
            break;
        }
    }
    canonical_blocks((0..len).map(|x| uf.find(x)))
}

fn canonical_blocks(keys: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut ids = HashMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

impl Congruence {
    pub fn generated(m: &FiniteASet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Congruence { block_of: closure_blocks(m.len(), &m.ops(), pairs) }
    }

    /// Accepts an arbitrary block labelling if it is action-compatible.
    pub fn from_blocks(m: &FiniteASet, labels: &[usize]) -> Option<Self> {
        if labels.len() != m.len() {
            return None;
        }
        let block_of = canonical_blocks(labels.iter().copied());
        let ok = m.ops().iter().all(|op| {
            let mut image = vec![usize::MAX; block_of.len()];
            (0..m.len()).all(|x| {
                let b = block_of[op[x]];
                let slot = &mut image[block_of[x]];
                if *slot == usize::MAX {
                    *slot = b;
                }
                *slot == b
            })
        });
        ok.then_some(Congruence { block_of })
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn num_blocks(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// `M → M/~`; each class is labelled by its smallest member.
    pub fn quotient(&self, m: &Arc<FiniteASet>) -> ASetMorphism {
        let blocks = self.blocks();
        let labels = blocks.iter().map(|b| m.labels[b[0]].clone()).collect();
        let mut action = Vec::with_capacity(m.monoid.len() * blocks.len());
        for a in 0..m.monoid.len() {
            for b in &blocks {
                action.push(self.block_of[m.act(a, b[0])]);
            }
        }
        let q = Arc::new(FiniteASet::from_parts(m.monoid.clone(), labels, action));
        ASetMorphism::new_unchecked(m.clone(), q, self.block_of.clone())
    }
}

/// All congruences of `m`, by exhaustive partition enumeration.
pub fn all_congruences(m: &FiniteASet) -> Vec<Congruence> {
    let mut out = Vec::new();
    let n = m.len();
    let mut rgs = vec![0usize; n];
    loop {
        if let Some(c) = Congruence::from_blocks(m, &rgs) {
            out.push(c);
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
        }
    }
}

pub fn kernel(f: &ASetMorphism) -> ASetMorphism {
    let members: Vec<usize> = (0..f.source.len()).filter(|&x| f.map[x] == BASE).collect();
    f.source.sub(&members).expect("kernel is a sub-A-set")
}

/// `N → N/f(M)`, carrier `(N − f(M)) ∪ {*}`.
pub fn cokernel(f: &ASetMorphism) -> ASetMorphism {
    let c = Congruence::generated(&f.target, f.map.iter().map(|&y| (y, BASE)));
    c.quotient(&f.target)
}

/// Kernel inclusion and cokernel projection.
pub fn kernel_cokernel(f: &ASetMorphism) -> (ASetMorphism, ASetMorphism) {
    (kernel(f), cokernel(f))
}

fn check_parallel(f: &ASetMorphism, g: &ASetMorphism) -> Result<(), ASetError> {
    if *f.source != *g.source || *f.target != *g.target {
        return Err(ASetError::Structural("morphisms are not parallel".into()));
    }
    Ok(())
}

/// Quotient of the target by the congruence generated by `f(m) ~ g(m)`.
pub fn coequalizer(f: &ASetMorphism, g: &ASetMorphism) -> Result<ASetMorphism, ASetError> {
    check_parallel(f, g)?;
    let c = Congruence::generated(&f.target, f.map.iter().copied().zip(g.map.iter().copied()));
    Ok(c.quotient(&f.target))
}

/// Inclusion of `{m : f(m) = g(m)}`.
pub fn equalizer(f: &ASetMorphism, g: &ASetMorphism) -> Result<ASetMorphism, ASetError> {
    check_parallel(f, g)?;
    let members: Vec<usize> = (0..f.source.len()).filter(|&x| f.map[x] == g.map[x]).collect();
    f.source.sub(&members)
}

#[derive(Debug, Clone)]
pub struct Product {
    pub set: Arc<FiniteASet>,
    pub projections: Vec<ASetMorphism>,
}

#[derive(Debug, Clone)]
pub struct Coproduct {
    pub set: Arc<FiniteASet>,
    pub injections: Vec<ASetMorphism>,
}

fn check_common_monoid(ms: &[Arc<FiniteASet>]) -> Result<Arc<PointedMonoid>, ASetError> {
    let first = ms.first().ok_or_else(|| ASetError::Structural("empty list".into()))?;
    if ms.iter().any(|m| !same_monoid(&m.monoid, &first.monoid)) {
        return Err(ASetError::MonoidMismatch);
    }
    Ok(first.monoid.clone())
}

/// Cartesian product with the diagonal action.
pub fn product(ms: &[Arc<FiniteASet>]) -> Result<Product, ASetError> {
    let monoid = check_common_monoid(ms)?;
    if ms.len() == 1 {
        return Ok(Product { set: ms[0].clone(), projections: vec![ASetMorphism::identity(&ms[0])] });
    }
    let sizes: Vec<usize> = ms.iter().map(|m| m.len()).collect();
    let total: usize = sizes.iter().product();
    let decode = |mut idx: usize| {
        let mut t = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            t[k] = idx % sizes[k];
            idx /= sizes[k];
        }
        t
    };
    let encode = |t: &[usize]| t.iter().zip(&sizes).fold(0, |acc, (&x, &s)| acc * s + x);
    let tuples: Vec<Vec<usize>> = (0..total).map(decode).collect();
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().zip(ms).map(|(&x, m)| m.label(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut action = Vec::with_capacity(monoid.len() * total);
    for a in 0..monoid.len() {
        for t in &tuples {
            let moved: Vec<usize> = t.iter().zip(ms).map(|(&x, m)| m.act(a, x)).collect();
            action.push(encode(&moved));
        }
    }
    let set = Arc::new(FiniteASet::from_parts(monoid, labels, action));
    let projections = ms
        .iter()
        .enumerate()
        .map(|(k, m)| ASetMorphism::new_unchecked(set.clone(), m.clone(), tuples.iter().map(|t| t[k]).collect()))
        .collect();
    Ok(Product { set, projections })
}

/// Wedge `⋁ Mᵢ`: basepoints identified. Non-base elements are labelled `i:x`.
pub fn coproduct(ms: &[Arc<FiniteASet>]) -> Result<Coproduct, ASetError> {
    let monoid = check_common_monoid(ms)?;
    if ms.len() == 1 {
        return Ok(Coproduct { set: ms[0].clone(), injections: vec![ASetMorphism::identity(&ms[0])] });
    }
    let mut labels = vec!["*".to_string()];
    let mut offsets = Vec::new();
    for (k, m) in ms.iter().enumerate() {
        offsets.push(labels.len() - 1);
        labels.extend(m.labels.iter().skip(1).map(|l| format!("{}:{l}", k + 1)));
    }
    let embed = |k: usize, x: usize| if x == BASE { BASE } else { offsets[k] + x };
    let mut action = Vec::with_capacity(monoid.len() * labels.len());
    for a in 0..monoid.len() {
        action.push(BASE);
        for (k, m) in ms.iter().enumerate() {
            for x in 1..m.len() {
                action.push(embed(k, m.act(a, x)));
            }
        }
    }
    let set = Arc::new(FiniteASet::from_parts(monoid, labels, action));
    let injections = ms
        .iter()
        .enumerate()
        .map(|(k, m)| ASetMorphism::new_unchecked(m.clone(), set.clone(), (0..m.len()).map(|x| embed(k, x)).collect()))
        .collect();
    Ok(Coproduct { set, injections })
}

pub fn product_coproduct(ms: &[Arc<FiniteASet>]) -> Result<(Product, Coproduct), ASetError> {
    Ok((product(ms)?, coproduct(ms)?))
}

pub fn wedge(x: &Arc<FiniteASet>, y: &Arc<FiniteASet>) -> Result<Coproduct, ASetError> {
    coproduct(&[x.clone(), y.clone()])
}

#[derive(Debug, Clone)]
pub struct Pullback {
    pub set: Arc<FiniteASet>,
    /// to the source of `f`
    pub p1: ASetMorphism,
    /// to the source of `g`
    pub p2: ASetMorphism,
}

/// `K ×_M N = {(k, n) : f(k) = g(n)}`.
pub fn pullback(f: &ASetMorphism, g: &ASetMorphism) -> Result<Pullback, ASetError> {
    if *f.target != *g.target {
        return Err(ASetError::Structural("pullback of morphisms with different targets".into()));
    }
    let (k, n) = (&f.source, &g.source);
    let monoid = k.monoid.clone();
    let pairs: Vec<(usize, usize)> = (0..k.len())
        .flat_map(|x| (0..n.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| f.map[x] == g.map[y])
        .collect();
    let pos: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let labels = pairs.iter().map(|&(x, y)| format!("({},{})", k.label(x), n.label(y))).collect();
    let mut action = Vec::with_capacity(monoid.len() * pairs.len());
    for a in 0..monoid.len() {
        for &(x, y) in &pairs {
            action.push(pos[&(k.act(a, x), n.act(a, y))]);
        }
    }
    let set = Arc::new(FiniteASet::from_parts(monoid, labels, action));
    let p1 = ASetMorphism::new_unchecked(set.clone(), k.clone(), pairs.iter().map(|p| p.0).collect());
    let p2 = ASetMorphism::new_unchecked(set.clone(), n.clone(), pairs.iter().map(|p| p.1).collect());
    Ok(Pullback { set, p1, p2 })
}

/// A free A-set `⋁ₓ A·x` with its generators.
#[derive(Debug, Clone)]
pub struct FreeASet {
    pub set: Arc<FiniteASet>,
    pub generators: Vec<usize>,
}

impl FreeASet {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `x = a·g_k` as `(k, a)`; `None` for the basepoint.
    pub fn coordinates(&self, x: usize) -> Option<(usize, usize)> {
        let m = &self.set.monoid;
        self.generators
            .iter()
            .enumerate()
            .find_map(|(k, &g)| m.nonzero().find(|&a| self.set.act(a, g) == x).map(|a| (k, a)))
            .filter(|_| x != BASE)
    }

    /// The unique morphism sending generator `k` to `images[k]`.
    pub fn extend(&self, target: &Arc<FiniteASet>, images: &[usize]) -> Result<ASetMorphism, ASetError> {
        if images.len() != self.generators.len() {
            return Err(ASetError::Structural("one image per generator required".into()));
        }
        if !same_monoid(&self.set.monoid, &target.monoid) {
            return Err(ASetError::MonoidMismatch);
        }
        let m = &self.set.monoid;
        let mut map = vec![BASE; self.set.len()];
        for (&g, &t) in self.generators.iter().zip(images) {
            for a in m.nonzero() {
                map[self.set.act(a, g)] = target.act(a, t);
            }
        }
        Ok(ASetMorphism::new_unchecked(self.set.clone(), target.clone(), map))
    }
}

/// `⋁ₓ A·x`; carrier size `k·(|A|−1)+1`. Elements are labelled `x` and `a.x`.
pub fn free_aset(monoid: &Arc<PointedMonoid>, generators: &[String]) -> Result<FreeASet, ASetError> {
    let mut sorted = generators.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != generators.len() {
        return Err(ASetError::Structural("generator labels must be distinct".into()));
    }
    let nz: Vec<usize> = monoid.nonzero().collect();
    let mut pos = vec![usize::MAX; monoid.len()];
    for (i, &a) in nz.iter().enumerate() {
        pos[a] = i;
    }
    let mut labels = vec!["*".to_string()];
    let mut gens = Vec::new();
    for x in generators {
        for &a in &nz {
            if a == monoid.one() {
                gens.push(labels.len());
                labels.push(x.clone());
            } else {
                labels.push(format!("{}.{x}", monoid.label(a)));
            }
        }
    }
    let mut unique = labels.clone();
    unique.sort();
    unique.dedup();
    if unique.len() != labels.len() {
        return Err(ASetError::Structural("generator labels collide with element labels".into()));
    }
    let block = nz.len();
    let mut action = Vec::with_capacity(monoid.len() * labels.len());
    for a in 0..monoid.len() {
        action.push(BASE);
        for k in 0..generators.len() {
            for &b in &nz {
                let ab = monoid.mul(a, b);
                action.push(if ab == monoid.zero() { BASE } else { 1 + k * block + pos[ab] });
            }
        }
    }
    let set = Arc::new(FiniteASet::from_parts(monoid.clone(), labels, action));
    Ok(FreeASet { set, generators: gens })
}

/// `⋁ⁿ A` with generators `x1..xn`.
pub fn free_of_rank(monoid: &Arc<PointedMonoid>, n: usize) -> FreeASet {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    free_aset(monoid, &names).expect("distinct generator names")
}

/// Backtracking search for pointed maps intertwining paired operator lists.
struct HomSearch<'a> {
    src_len: usize,
    tgt_len: usize,
    src_ops: Vec<&'a [usize]>,
    tgt_ops: Vec<&'a [usize]>,
    allowed: Option<&'a dyn Fn(usize, usize) -> bool>,
    injective: bool,
    limit: Option<usize>,
}

impl HomSearch<'_> {
    fn run(&self) -> Vec<Vec<usize>> {
        let mut map = vec![usize::MAX; self.src_len];
        let mut used = vec![0u32; self.tgt_len];
        let mut trail = Vec::new();
        let mut out = Vec::new();
        if self.assign(BASE, BASE, &mut map, &mut used, &mut trail) {
            self.branch(1, &mut map, &mut used, &mut trail, &mut out);
        }
        out
    }

    fn assign(&self, x: usize, y: usize, map: &mut [usize], used: &mut [u32], trail: &mut Vec<usize>) -> bool {
        let mut queue = VecDeque::from([(x, y)]);
        while let Some((x, y)) = queue.pop_front() {
            if map[x] != usize::MAX {
                if map[x] != y {
                    return false;
                }
                continue;
            }
            if let Some(ok) = self.allowed {
                if !ok(x, y) {
                    return false;
                }
            }
            if self.injective && used[y] > 0 {
                return false;
            }
            map[x] = y;
            used[y] += 1;
            trail.push(x);
            for (s, t) in self.src_ops.iter().zip(&self.tgt_ops) {
                queue.push_back((s[x], t[y]));
            }
        }
        true
    }

    fn undo(&self, mark: usize, map: &mut [usize], used: &mut [u32], trail: &mut Vec<usize>) {
        while trail.len() > mark {
            let x = trail.pop().expect("trail above mark");
            used[map[x]] -= 1;
            map[x] = usize::MAX;
        }
    }

    fn branch(&self, from: usize, map: &mut [usize], used: &mut [u32], trail: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if self.limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        let Some(x) = (from..self.src_len).find(|&x| map[x] == usize::MAX) else {
            out.push(map.to_vec());
            return;
        };
        for y in 0..self.tgt_len {
            let mark = trail.len();
            if self.assign(x, y, map, used, trail) {
                self.branch(x + 1, map, used, trail, out);
            }
            self.undo(mark, map, used, trail);
            if self.limit.is_some_and(|l| out.len() >= l) {
                return;
            }
        }
    }
}

fn search_maps(
    m: &FiniteASet,
    n: &FiniteASet,
    allowed: Option<&dyn Fn(usize, usize) -> bool>,
    injective: bool,
    limit: Option<usize>,
) -> Vec<Vec<usize>> {
    HomSearch {
        src_len: m.len(),
        tgt_len: n.len(),
        src_ops: m.ops(),
        tgt_ops: n.ops(),
        allowed,
        injective,
        limit,
    }
    .run()
}

/// All A-set morphisms `M → N` as carrier maps, lexicographically sorted.
pub fn hom_maps(m: &FiniteASet, n: &FiniteASet) -> Result<Vec<Vec<usize>>, ASetError> {
    if !same_monoid(&m.monoid, &n.monoid) {
        return Err(ASetError::MonoidMismatch);
    }
    Ok(search_maps(m, n, None, false, None))
}

pub fn hom_set(m: &Arc<FiniteASet>, n: &Arc<FiniteASet>) -> Result<Vec<ASetMorphism>, ASetError> {
    Ok(hom_maps(m, n)?
        .into_iter()
        .map(|map| ASetMorphism::new_unchecked(m.clone(), n.clone(), map))
        .collect())
}

/// A lift `s: M → N` with `p ∘ s = f`, if one exists.
pub fn find_lift(f: &ASetMorphism, p: &ASetMorphism) -> Result<Option<ASetMorphism>, ASetError> {
    if *f.target != *p.target {
        return Err(ASetError::Structural("lift problem with different targets".into()));
    }
    let allowed = |x: usize, y: usize| p.map[y] == f.map[x];
    Ok(search_maps(&f.source, &p.source, Some(&allowed), false, Some(1))
        .pop()
        .map(|map| ASetMorphism::new_unchecked(f.source.clone(), p.source.clone(), map)))
}

pub fn find_isomorphism(m: &Arc<FiniteASet>, n: &Arc<FiniteASet>) -> Option<ASetMorphism> {
    if m.len() != n.len() || !same_monoid(&m.monoid, &n.monoid) {
        return None;
    }
    search_maps(m, n, None, true, Some(1))
        .pop()
        .map(|map| ASetMorphism::new_unchecked(m.clone(), n.clone(), map))
}

pub fn is_isomorphic(m: &Arc<FiniteASet>, n: &Arc<FiniteASet>) -> bool {
    find_isomorphism(m, n).is_some()
}

/// Generators chosen greedily in carrier order.
pub fn greedy_generators(m: &FiniteASet) -> Vec<usize> {
    let mut covered = vec![false; m.len()];
    covered[BASE] = true;
    let mut gens = Vec::new();
    for x in 1..m.len() {
        if !covered[x] {
            gens.push(x);
            for y in m.orbit(x) {
                covered[y] = true;
            }
        }
    }
    gens
}

/// The free cover `⋁_{gens} A → M` on the greedy generating set.
pub fn free_cover(m: &Arc<FiniteASet>) -> (FreeASet, ASetMorphism) {
    let gens = greedy_generators(m);
    let names: Vec<String> = gens.iter().map(|&g| m.label(g).to_string()).collect();
    let free = free_aset(&m.monoid, &names)
        .unwrap_or_else(|_| free_of_rank(&m.monoid, gens.len()));
    let cover = free.extend(m, &gens).expect("same monoid");
    (free, cover)
}

#[derive(Debug, Clone)]
pub enum Projectivity {
    /// `retraction ∘ section = id`, with `retraction` the free cover.
    Projective { section: ASetMorphism, retraction: ASetMorphism },
    /// `id: P → P` does not lift along the surjection `cover`.
    NotProjective { cover: ASetMorphism },
}

impl Projectivity {
    pub fn is_projective(&self) -> bool {
        matches!(self, Projectivity::Projective { .. })
    }
}

/// Retract search over the free cover.
pub fn is_projective(p: &Arc<FiniteASet>) -> Projectivity {
    let (_, cover) = free_cover(p);
    match find_lift(&ASetMorphism::identity(p), &cover).expect("same target") {
        Some(section) => Projectivity::Projective { section, retraction: cover },
        None => Projectivity::NotProjective { cover },
    }
}

/// Injective; the cokernel is then automatically normal with kernel the image.
pub fn is_admissible_mono(i: &ASetMorphism) -> bool {
    i.is_injective()
}

/// Onto and injective off its kernel.
pub fn is_admissible_epi(j: &ASetMorphism) -> bool {
    j.is_surjective() && j.is_normal()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceMap {
    I,
    J,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Exactness {
    Exact { split: bool, cokernel_projective: bool },
    CompositeNotZero,
    KernelNotTrivial,
    NormalFailure { map: SequenceMap, points: (String, String) },
    NotOnto,
    ImageKernelMismatch,
}

#[derive(Debug, Clone)]
pub struct ExactnessReport {
    pub verdict: Exactness,
    /// A section `s` with `j ∘ s = id`, when the sequence is exact and splits.
    pub section: Option<ASetMorphism>,
}

/// Checks `M →ⁱ N →ʲ K` for admissible exactness.
pub fn is_admissible_exact(i: &ASetMorphism, j: &ASetMorphism) -> Result<ExactnessReport, ASetError> {
    if *i.target != *j.source {
        return Err(ASetError::Structural("i and j are not composable".into()));
    }
    let fail = |verdict| Ok(ExactnessReport { verdict, section: None });
    if !i.then(j)?.is_zero() {
        return fail(Exactness::CompositeNotZero);
    }
    if !i.has_trivial_kernel() {
        return fail(Exactness::KernelNotTrivial);
    }
    for (which, f) in [(SequenceMap::I, i), (SequenceMap::J, j)] {
        if let Some((x, y)) = f.normal_failure() {
            let points = (f.source.label(x).to_string(), f.source.label(y).to_string());
            return fail(Exactness::NormalFailure { map: which, points });
        }
    }
    if !j.is_surjective() {
        return fail(Exactness::NotOnto);
    }
    let ker_j: Vec<usize> = (0..j.source.len()).filter(|&x| j.map[x] == BASE).collect();
    if i.image() != ker_j {
        return fail(Exactness::ImageKernelMismatch);
    }
    let section = find_lift(&ASetMorphism::identity(&j.target), j)?;
    let cokernel_projective = is_projective(&j.target).is_projective();
    Ok(ExactnessReport {
        verdict: Exactness::Exact { split: section.is_some(), cokernel_projective },
        section,
    })
}

/// A finite set with commuting actions: `A` on the left, `B` on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biset {
    left: Arc<PointedMonoid>,
    right: Arc<PointedMonoid>,
    labels: Vec<String>,
    left_action: Vec<usize>,
    right_action: Vec<usize>,
}

impl Biset {
    /// `left_action[a][m] = a·m`, `right_action[b][m] = m·b`.
    pub fn new(
        left: Arc<PointedMonoid>,
        right: Arc<PointedMonoid>,
        labels: Vec<String>,
        left_action: Vec<Vec<usize>>,
        right_action: Vec<Vec<usize>>,
    ) -> Result<Self, ASetError> {
        let len = labels.len();
        let shape_ok = |rows: &Vec<Vec<usize>>, n: usize| {
            rows.len() == n && rows.iter().all(|r| r.len() == len && r.iter().all(|&x| x < len))
        };
        if len == 0 || !shape_ok(&left_action, left.len()) || !shape_ok(&right_action, right.len()) {
            return Err(ASetError::InvalidAction("biset action tables have the wrong shape".into()));
        }
        let la: Vec<usize> = left_action.into_iter().flatten().collect();
        let ra: Vec<usize> = right_action.into_iter().flatten().collect();
        check_action(&left, len, |a, m| la[a * len + m], "left action")?;
        // the right action of B is a left action of B^op
        let op = opposite(&right);
        check_action(&op, len, |b, m| ra[b * len + m], "right action")?;
        for a in 0..left.len() {
            for b in 0..right.len() {
                for m in 0..len {
                    if ra[b * len + la[a * len + m]] != la[a * len + ra[b * len + m]] {
                        return Err(ASetError::InvalidAction("left and right actions do not commute".into()));
                    }
                }
            }
        }
        Ok(Biset { left, right, labels, left_action: la, right_action: ra })
    }

    /// A left A-set with the trivial right action of `𝔽₁`.
    pub fn from_left(m: &FiniteASet) -> Self {
        let f1 = Arc::new(PointedMonoid::f1());
        let len = m.len();
        let mut right_action = vec![0; 2 * len];
        for x in 0..len {
            right_action[f1.zero() * len + x] = BASE;
            right_action[f1.one() * len + x] = x;
        }
        Biset {
            left: m.monoid.clone(),
            right: f1,
            labels: m.labels.clone(),
            left_action: m.action.clone(),
            right_action,
        }
    }

    /// For commutative `A`: a left A-set made into an (A, A)-biset.
    pub fn symmetric(m: &FiniteASet) -> Result<Self, ASetError> {
        if !m.monoid.is_commutative() {
            return Err(ASetError::Structural("symmetric biset needs a commutative monoid".into()));
        }
        Ok(Biset {
            left: m.monoid.clone(),
            right: m.monoid.clone(),
            labels: m.labels.clone(),
            left_action: m.action.clone(),
            right_action: m.action.clone(),
        })
    }

    /// `A` as an (A, A)-biset.
    pub fn regular(monoid: Arc<PointedMonoid>) -> Self {
        let left = FiniteASet::regular(monoid.clone());
        let len = left.len();
        let mut right_action = Vec::with_capacity(monoid.len() * len);
        for b in 0..monoid.len() {
            for x in 0..len {
                let elem = left.labels[x].as_str();
                let xi = monoid.index_of(elem).expect("regular labels are monoid labels");
                let prod = monoid.mul(xi, b);
                right_action.push(left.index_of(monoid.label(prod)).expect("product in carrier"));
            }
        }
        Biset {
            left: monoid.clone(),
            right: monoid,
            labels: left.labels.clone(),
            left_action: left.action.clone(),
            right_action,
        }
    }

    pub fn left_monoid(&self) -> &Arc<PointedMonoid> {
        &self.left
    }

    pub fn right_monoid(&self) -> &Arc<PointedMonoid> {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn act_left(&self, a: usize, m: usize) -> usize {
        self.left_action[a * self.labels.len() + m]
    }

    pub fn act_right(&self, m: usize, b: usize) -> usize {
        self.right_action[b * self.labels.len() + m]
    }

    /// Forgets the right action.
    pub fn left_set(&self) -> FiniteASet {
        FiniteASet::from_parts(self.left.clone(), self.labels.clone(), self.left_action.clone())
    }

    fn ops(&self) -> Vec<&[usize]> {
        let n = self.labels.len();
        self.left_action.chunks(n).chain(self.right_action.chunks(n)).collect()
    }
}

fn opposite(m: &PointedMonoid) -> PointedMonoid {
    let mut t = m.to_table();
    let n = t.labels.len();
    let orig = t.table.clone();
    for a in 0..n {
        for b in 0..n {
            t.table[a][b] = orig[b][a];
        }
    }
    PointedMonoid::new(t).expect("opposite of a monoid is a monoid")
}

/// `M ⊗_B N` as an (A, C)-biset together with the class of each smash pair.
#[derive(Debug, Clone)]
pub struct TensorProduct {
    pub biset: Biset,
    n_len: usize,
    classes: Vec<usize>,
}

impl TensorProduct {
    /// Class of `m ⊗ n` (either coordinate the basepoint gives the basepoint).
    pub fn class_of(&self, m: usize, n: usize) -> usize {
        if m == BASE || n == BASE {
            BASE
        } else {
            self.classes[1 + (m - 1) * (self.n_len - 1) + (n - 1)]
        }
    }
}

/// Smash product `M ∧ N` modulo the congruence generated by `(mb, n) ~ (m, bn)`.
pub fn tensor(m: &Biset, n: &Biset) -> Result<TensorProduct, ASetError> {
    if !same_monoid(&m.right, &n.left) {
        return Err(ASetError::Structural(
            "tensor needs the right monoid of M to equal the left monoid of N".into(),
        ));
    }
    let (ml, nl) = (m.len(), n.len());
    let idx = |x: usize, y: usize| if x == BASE || y == BASE { BASE } else { 1 + (x - 1) * (nl - 1) + (y - 1) };
    let size = 1 + (ml - 1) * (nl - 1);
    let mut pairs = Vec::new();
    for b in 0..m.right.len() {
        for x in 1..ml {
            for y in 1..nl {
                pairs.push((idx(m.act_right(x, b), y), idx(x, n.act_left(b, y))));
            }
        }
    }
    let mut ops: Vec<Vec<usize>> = Vec::new();
    for a in 0..m.left.len() {
        let mut op = vec![BASE; size];
        for x in 1..ml {
            for y in 1..nl {
                op[idx(x, y)] = idx(m.act_left(a, x), y);
            }
        }
        ops.push(op);
    }
    for c in 0..n.right.len() {
        let mut op = vec![BASE; size];
        for x in 1..ml {
            for y in 1..nl {
                op[idx(x, y)] = idx(x, n.act_right(y, c));
            }
        }
        ops.push(op);
    }
    let op_refs: Vec<&[usize]> = ops.iter().map(Vec::as_slice).collect();
    let classes = closure_blocks(size, &op_refs, pairs);
    let num = classes.iter().max().map_or(0, |x| x + 1);
    let mut rep = vec![usize::MAX; num];
    for (p, &c) in classes.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = p;
        }
    }
    let decode = |p: usize| (1 + (p - 1) / (nl - 1), 1 + (p - 1) % (nl - 1));
    let labels = rep
        .iter()
        .map(|&p| {
            if p == BASE {
                "*".to_string()
            } else {
                let (x, y) = decode(p);
                format!("{}⊗{}", m.labels[x], n.labels[y])
            }
        })
        .collect();
    let left_action = ops[..m.left.len()].iter().flat_map(|op| rep.iter().map(|&p| classes[op[p]])).collect();
    let right_action = ops[m.left.len()..].iter().flat_map(|op| rep.iter().map(|&p| classes[op[p]])).collect();
    let biset = Biset { left: m.left.clone(), right: n.right.clone(), labels, left_action, right_action };
    Ok(TensorProduct { biset, n_len: nl, classes })
}

/// `Hom_A(M, P)` for an (A, B)-biset `M` and an (A, C)-biset `P`, as a
/// (B, C)-biset: `(b·f)(m) = f(m·b)` and `(f·c)(m) = f(m)·c`.
pub fn hom_biset(m: &Biset, p: &Biset) -> Result<(Biset, Vec<Vec<usize>>), ASetError> {
    if !same_monoid(&m.left, &p.left) {
        return Err(ASetError::MonoidMismatch);
    }
    let mut maps = hom_maps(&m.left_set(), &p.left_set())?;
    // zero map first so it is the basepoint
    let zero = vec![BASE; m.len()];
    maps.sort_by_key(|f| *f != zero);
    let pos: HashMap<&Vec<usize>, usize> = maps.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut left_action = Vec::new();
    for b in 0..m.right.len() {
        for f in &maps {
            let g: Vec<usize> = (0..m.len()).map(|x| f[m.act_right(x, b)]).collect();
            left_action.push(pos[&g]);
        }
    }
    let mut right_action = Vec::new();
    for c in 0..p.right.len() {
        for f in &maps {
            let g: Vec<usize> = f.iter().map(|&y| p.act_right(y, c)).collect();
            right_action.push(pos[&g]);
        }
    }
    let labels = (0..maps.len()).map(|i| if i == 0 { "*".into() } else { format!("f{i}") }).collect();
    let biset = Biset { left: m.right.clone(), right: p.right.clone(), labels, left_action, right_action };
    Ok((biset, maps))
}

/// Maps of bisets commuting with both actions.
pub fn biset_hom_maps(x: &Biset, y: &Biset) -> Result<Vec<Vec<usize>>, ASetError> {
    if !same_monoid(&x.left, &y.left) || !same_monoid(&x.right, &y.right) {
        return Err(ASetError::MonoidMismatch);
    }
    Ok(HomSearch {
        src_len: x.len(),
        tgt_len: y.len(),
        src_ops: x.ops(),
        tgt_ops: y.ops(),
        allowed: None,
        injective: false,
        limit: None,
    }
    .run())
}

/// A quotient of a free A-set of rank 1 or 2 by a random congruence, with
/// carrier at most `max_len` when possible.
pub fn random_aset<R: Rng>(monoid: &Arc<PointedMonoid>, max_len: usize, rng: &mut R) -> Arc<FiniteASet> {
    let per = monoid.len() - 1;
    let max_rank = if per == 0 { 1 } else { ((max_len.max(2) - 1) / per).clamp(1, 2) };
    let rank = rng.gen_range(1..=max_rank);
    let free = free_of_rank(monoid, rank);
    let mut current = free.set.clone();
    let mut tries = 0;
    while current.len() > max_len.max(2) || (tries < 2 && rng.gen_bool(0.5)) {
        let x = rng.gen_range(0..current.len());
        let y = rng.gen_range(0..current.len());
        current = Congruence::generated(&current, [(x, y)]).quotient(&current).target().clone();
        tries += 1;
    }
    current
}

/// A uniformly random morphism `M → N`.
pub fn random_morphism<R: Rng>(m: &Arc<FiniteASet>, n: &Arc<FiniteASet>, rng: &mut R) -> Result<ASetMorphism, ASetError> {
    let maps = hom_maps(m, n)?;
    let k = rng.gen_range(0..maps.len());
    Ok(ASetMorphism::new_unchecked(m.clone(), n.clone(), maps[k].clone()))
}

/// A-sets with carrier at most `max_len`, up to isomorphism: quotients of
/// free A-sets that fit, closed under wedges that fit.
pub fn small_asets(monoid: &Arc<PointedMonoid>, max_len: usize) -> Vec<Arc<FiniteASet>> {
    let mut found: Vec<Arc<FiniteASet>> = vec![Arc::new(FiniteASet::point(monoid.clone()))];
    let push = |found: &mut Vec<Arc<FiniteASet>>, x: Arc<FiniteASet>| {
        if !found.iter().any(|y| is_isomorphic(y, &x)) {
            found.push(x);
        }
    };
    let per = monoid.len() - 1;
    if per > 0 {
        let mut rank = 1;
        while rank * per < max_len {
            let free = free_of_rank(monoid, rank).set;
            for c in all_congruences(&free) {
                push(&mut found, c.quotient(&free).target().clone());
            }
            rank += 1;
        }
    }
    loop {
        let before = found.len();
        let snapshot = found.clone();
        for x in &snapshot {
            for y in &snapshot {
                if x.len() > 1 && y.len() > 1 && x.len() + y.len() - 1 <= max_len {
                    push(&mut found, wedge(x, y).expect("same monoid").set);
                }
            }
        }
        if found.len() == before {
            break;
        }
    }
    found.sort_by_key(|x| x.len());
    found
}
