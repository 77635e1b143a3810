//! Pointed monoids given by multiplication tables, finite groups, unit
//! groups, and the polynomial extension `A[x]`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{AbGroupError, FgAbelianGroup, IntegerMatrix};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("malformed monoid: {0}")]
    Structural(String),
    #[error("monoid axioms violated: {}", first_violation(.0))]
    Invalid(Vec<Violation>),
    #[error("monoid JSON: {0}")]
    Json(String),
}

fn first_violation(v: &[Violation]) -> String {
    match v {
        [] => "none".into(),
        [only] => only.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group table is not closed: {0}")]
    NotClosed(String),
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(String),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("malformed group table: {0}")]
    Structural(String),
    #[error(transparent)]
    AbGroup(#[from] AbGroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A failed monoid axiom, named by element labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Associativity { a: String, b: String, c: String },
    ZeroNotAbsorbing { element: String, side: Side },
    UnitFailure { element: String, side: Side },
    ZeroEqualsOne,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Associativity { a, b, c } => {
                write!(f, "associativity fails at ({a}, {b}, {c})")
            }
            Violation::ZeroNotAbsorbing { element, side } => {
                write!(f, "zero is not absorbing on the {side:?} at {element}")
            }
            Violation::UnitFailure { element, side } => {
                write!(f, "one is not a {side:?} identity at {element}")
            }
            Violation::ZeroEqualsOne => write!(f, "zero equals one in a monoid with more than one element"),
        }
    }
}

/// An unvalidated multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidTable {
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub zero: usize,
    pub one: usize,
}

/// The on-disk JSON form: every entry is an element label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidFile {
    pub elements: Vec<String>,
    pub zero: String,
    pub one: String,
    pub table: Vec<Vec<String>>,
}

impl MonoidFile {
    pub fn into_table(self) -> Result<MonoidTable, MonoidError> {
        let mut index = HashMap::new();
        for (i, l) in self.elements.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MonoidError::Structural(format!("duplicate element label {l:?}")));
            }
        }
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| MonoidError::Structural(format!("unknown element label {l:?}")))
        };
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|l| lookup(l)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MonoidTable { zero: lookup(&self.zero)?, one: lookup(&self.one)?, labels: self.elements, table })
    }
}

fn check_shape(t: &MonoidTable) -> Result<(), MonoidError> {
    let n = t.labels.len();
    if n == 0 {
        return Err(MonoidError::Structural("empty element list".into()));
    }
    if t.table.len() != n {
        return Err(MonoidError::Structural(format!("table has {} rows, expected {n}", t.table.len())));
    }
    for (i, row) in t.table.iter().enumerate() {
        if row.len() != n {
            return Err(MonoidError::Structural(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= n) {
            return Err(MonoidError::Structural(format!("row {i} contains out-of-range index {bad}")));
        }
    }
    if t.zero >= n || t.one >= n {
        return Err(MonoidError::Structural("zero or one index out of range".into()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = t.labels.iter().find(|l| !seen.insert(*l)) {
        return Err(MonoidError::Structural(format!("duplicate element label {dup:?}")));
    }
    Ok(())
}

/// Every violated axiom of a candidate table; empty iff it is a pointed monoid.
pub fn validate_monoid(t: &MonoidTable) -> Result<Vec<Violation>, MonoidError> {
    check_shape(t)?;
    let n = t.labels.len();
    let l = |i: usize| t.labels[i].clone();
    let m = |a: usize, b: usize| t.table[a][b];
    let mut out = Vec::new();
    if n > 1 && t.zero == t.one {
        out.push(Violation::ZeroEqualsOne);
    }
    for a in 0..n {
        if m(t.one, a) != a {
            out.push(Violation::UnitFailure { element: l(a), side: Side::Left });
        }
        if m(a, t.one) != a {
            out.push(Violation::UnitFailure { element: l(a), side: Side::Right });
        }
        if m(t.zero, a) != t.zero {
            out.push(Violation::ZeroNotAbsorbing { element: l(a), side: Side::Left });
        }
        if m(a, t.zero) != t.zero {
            out.push(Violation::ZeroNotAbsorbing { element: l(a), side: Side::Right });
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = m(a, b);
            for c in 0..n {
                if m(ab, c) != m(a, m(b, c)) {
                    out.push(Violation::Associativity { a: l(a), b: l(b), c: l(c) });
                }
            }
        }
    }
    Ok(out)
}

/// A finite monoid with absorbing zero and two-sided unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedMonoid {
    labels: Vec<String>,
    table: Vec<usize>,
    zero: usize,
    one: usize,
}

impl PointedMonoid {
    pub fn new(t: MonoidTable) -> Result<Self, MonoidError> {
        let violations = validate_monoid(&t)?;
        if !violations.is_empty() {
            return Err(MonoidError::Invalid(violations));
        }
        Ok(PointedMonoid {
            table: t.table.into_iter().flatten().collect(),
            labels: t.labels,
            zero: t.zero,
            one: t.one,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, MonoidError> {
        let file: MonoidFile = serde_json::from_str(s).map_err(|e| MonoidError::Json(e.to_string()))?;
        Self::new(file.into_table()?)
    }

    pub fn to_file(&self) -> MonoidFile {
        MonoidFile {
            elements: self.labels.clone(),
            zero: self.labels[self.zero].clone(),
            one: self.labels[self.one].clone(),
            table: (0..self.len())
                .map(|a| (0..self.len()).map(|b| self.labels[self.mul(a, b)].clone()).collect())
                .collect(),
        }
    }

    pub fn to_table(&self) -> MonoidTable {
        MonoidTable {
            labels: self.labels.clone(),
            table: self.table.chunks(self.len()).map(<[usize]>::to_vec).collect(),
            zero: self.zero,
            one: self.one,
        }
    }

    /// `𝔽₁ = {0, 1}`.
    pub fn f1() -> Self {
        group_monoid(&FiniteGroup::cyclic(1))
    }

    /// `{0, 1, e}` with `e² = e`.
    pub fn with_idempotent() -> Self {
        Self::from_small(&["0", "1", "e"], &[[0, 0, 0], [0, 1, 2], [0, 2, 2]])
    }

    /// `{0, 1, n}` with `n² = 0`.
    pub fn with_nilpotent() -> Self {
        Self::from_small(&["0", "1", "n"], &[[0, 0, 0], [0, 1, 2], [0, 2, 0]])
    }

    /// `{0, 1, e, f}` with `xy = x` for `x, y ∈ {e, f}`; noncommutative.
    pub fn left_zero_band() -> Self {
        Self::from_small(
            &["0", "1", "e", "f"],
            &[[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 2, 2], [0, 3, 3, 3]],
        )
    }

    fn from_small<const N: usize>(labels: &[&str; N], rows: &[[usize; N]; N]) -> Self {
        Self::new(MonoidTable {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            table: rows.iter().map(|r| r.to_vec()).collect(),
            zero: 0,
            one: 1,
        })
        .expect("built-in monoid table is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.labels.len() + b]
    }

    /// Product of a sequence in order.
    pub fn product(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.one, |acc, x| self.mul(acc, x))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&a| a != self.zero)
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        (0..self.len()).find(|&b| self.mul(a, b) == self.one && self.mul(b, a) == self.one)
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.inverse(a).is_some()
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.is_idempotent(a)).collect()
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.len()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// `G* = G ∪ {0}` with `0` absorbing.
pub fn group_monoid(g: &FiniteGroup) -> PointedMonoid {
    let n = g.order();
    let mut zero_label = "0".to_string();
    while g.labels.contains(&zero_label) {
        zero_label.push('\'');
    }
    let mut labels = vec![zero_label];
    labels.extend(g.labels.iter().cloned());
    let mut table = vec![vec![0; n + 1]; n + 1];
    for a in 0..n {
        for b in 0..n {
            table[a + 1][b + 1] = g.mul(a, b) + 1;
        }
    }
    PointedMonoid::new(MonoidTable { labels, table, zero: 0, one: g.identity() + 1 })
        .expect("group monoid of a valid group is a pointed monoid")
}

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = labels.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(GroupError::Structural(format!("expected a {n}x{n} table")));
        }
        if let Some(bad) = table.iter().flatten().find(|&&x| x >= n) {
            return Err(GroupError::NotClosed(format!("index {bad}")));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(
                            labels[a].clone(),
                            labels[b].clone(),
                            labels[c].clone(),
                        ));
                    }
                }
            }
        }
        Self::from_flat(labels, table.into_iter().flatten().collect())
    }

    /// Finds identity and inverses in a closed table assumed associative.
    fn from_flat(labels: Vec<String>, table: Vec<usize>) -> Result<Self, GroupError> {
        let n = labels.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] == x && table[x * n + e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            if inverse[a] != usize::MAX {
                continue;
            }
            let b = (0..n)
                .find(|&b| table[a * n + b] == identity && table[b * n + a] == identity)
                .ok_or_else(|| GroupError::NoInverse(labels[a].clone()))?;
            inverse[a] = b;
            inverse[b] = a;
        }
        Ok(FiniteGroup { labels, table, identity, inverse })
    }

    /// Builds the group on a finite set closed under an associative operation.
    /// Associativity is inherited from `mul` and not re-checked.
    pub fn from_closed_set<T, L, M>(elements: Vec<T>, label: L, mul: M) -> Result<Self, GroupError>
    where
        T: Clone + Eq + Hash,
        L: Fn(&T) -> String,
        M: Fn(&T, &T) -> T,
    {
        let n = elements.len();
        let index: HashMap<&T, usize> = elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
        if index.len() != n {
            return Err(GroupError::Structural("duplicate elements".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                let c = mul(a, b);
                let k = index.get(&c).ok_or_else(|| {
                    GroupError::NotClosed(format!("{} * {} = {}", label(a), label(b), label(&c)))
                })?;
                table.push(*k);
            }
        }
        Self::from_flat(elements.iter().map(label).collect(), table)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `ℤ/n` with elements `1, g, g^2, …`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group of order 0");
        let label = |k: &usize| match k {
            0 => "1".to_string(),
            1 => "g".to_string(),
            k => format!("g^{k}"),
        };
        Self::from_closed_set((0..n).collect(), label, |a, b| (a + b) % n)
            .expect("cyclic group is closed")
    }

    /// `Σₙ`, elements in cycle notation, lexicographic order.
    pub fn symmetric(n: usize) -> Self {
        Self::from_closed_set(Permutation::all(n), |p| p.to_string(), |a, b| a.compose(b))
            .expect("symmetric group is closed")
    }

    /// `Q₈ = {±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        // (negative, unit) with unit 0=1, 1=i, 2=j, 3=k
        fn unit_mul(a: u8, b: u8) -> (bool, u8) {
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 3) => (false, 1),
                (3, 1) => (false, 2),
                (2, 1) => (true, 3),
                (3, 2) => (true, 1),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        }
        let elements: Vec<(bool, u8)> = (0..4).flat_map(|u| [(false, u), (true, u)]).collect();
        let label = |&(neg, u): &(bool, u8)| {
            let name = ["1", "i", "j", "k"][u as usize];
            if neg {
                format!("-{name}")
            } else {
                name.to_string()
            }
        };
        Self::from_closed_set(elements, label, |&(s, a), &(t, b)| {
            let (neg, c) = unit_mul(a, b);
            (s ^ t ^ neg, c)
        })
        .expect("quaternion group is closed")
    }

    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let elements: Vec<(usize, usize)> =
            (0..g.order()).flat_map(|a| (0..h.order()).map(move |b| (a, b))).collect();
        Self::from_closed_set(
            elements,
            |&(a, b)| format!("({},{})", g.label(a), h.label(b)),
            |&(a, b), &(c, d)| (g.mul(a, c), h.mul(b, d)),
        )
        .expect("direct product is closed")
    }

    /// The finite abelian group `⊕ ℤ/dᵢ`; elements are exponent vectors in
    /// mixed-radix order (last coordinate fastest).
    pub fn from_abelian(a: &FgAbelianGroup) -> Result<FiniteGroup, GroupError> {
        if !a.is_finite() {
            return Err(GroupError::Structural(format!("{a} is infinite")));
        }
        let orders: Vec<usize> = a.torsion().iter().map(|&d| d as usize).collect();
        if orders.len() == 1 {
            return Ok(Self::cyclic(orders[0]));
        }
        let mut elements: Vec<Vec<usize>> = vec![vec![]];
        for &d in &orders {
            elements = elements
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        let label = |v: &Vec<usize>| {
            if v.is_empty() {
                "1".to_string()
            } else {
                format!("({})", v.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            }
        };
        Self::from_closed_set(elements, label, |x, y| {
            x.iter().zip(y).zip(&orders).map(|((a, b), d)| (a + b) % d).collect()
        })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.labels.len() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `[g, h] = g h g⁻¹ h⁻¹`.
    pub fn commutator(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Membership mask of the subgroup generated by `gens`.
    pub fn closure_mask(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        mask[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    queue.push_back(y);
                }
            }
        }
        mask
    }

    /// Sorted indices of the commutator subgroup.
    pub fn commutator_indices(&self) -> Vec<usize> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut gens = Vec::new();
        for g in 0..n {
            for h in 0..n {
                let c = self.commutator(g, h);
                if !seen[c] {
                    seen[c] = true;
                    gens.push(c);
                }
            }
        }
        mask_to_indices(&self.closure_mask(&gens))
    }

    pub fn commutator_subgroup(&self) -> FiniteGroup {
        self.subgroup(&self.commutator_indices())
    }

    /// The subgroup on `members` (assumed closed), labels preserved.
    pub fn subgroup(&self, members: &[usize]) -> FiniteGroup {
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let table = members
            .iter()
            .flat_map(|&a| members.iter().map(move |&b| (a, b)))
            .map(|(a, b)| pos[&self.mul(a, b)])
            .collect();
        let labels = members.iter().map(|&x| self.labels[x].clone()).collect();
        Self::from_flat(labels, table).expect("subset closed under multiplication in a finite group")
    }

    /// Whether `g N g⁻¹ ⊆ N` for every `g`; `members` must be a subgroup.
    pub fn is_normal(&self, members: &[usize]) -> bool {
        let mut mask = vec![false; self.order()];
        for &x in members {
            mask[x] = true;
        }
        (0..self.order()).all(|g| members.iter().all(|&x| mask[self.mul(self.mul(g, x), self.inv(g))]))
    }

    /// `G/[G,G]` from the orders of elements in the quotient.
    pub fn abelianization(&self) -> FgAbelianGroup {
        let n = self.order();
        let comm = self.commutator_indices();
        let mut in_comm = vec![false; n];
        for &x in &comm {
            in_comm[x] = true;
        }
        // coset representative = smallest index in gN
        let mut rep = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if rep[g] != usize::MAX {
                continue;
            }
            reps.push(g);
            for &x in &comm {
                rep[self.mul(g, x)] = g;
            }
        }
        let coset_order = |g: usize| {
            let mut x = g;
            let mut k = 1u64;
            while !in_comm[x] {
                x = self.mul(x, g);
                k += 1;
            }
            k
        };
        let orders: Vec<u64> = reps.iter().map(|&g| coset_order(g)).collect();
        abelian_from_element_orders(&orders)
    }

    /// `G^ab` as the cokernel of the relation matrix of the table
    /// presentation `⟨[x] | [x] + [y] = [xy]⟩`.
    pub fn abelianization_via_relations(&self) -> Result<FgAbelianGroup, GroupError> {
        let n = self.order();
        let mut m = IntegerMatrix::zeros(n, n * n);
        for x in 0..n {
            for y in 0..n {
                let col = x * n + y;
                m.add_to(x, col, 1);
                m.add_to(y, col, 1);
                m.add_to(self.mul(x, y), col, -1);
            }
        }
        Ok(m.cokernel()?)
    }

    /// Whether `map` (indices of `self` to indices of `other`) is a group isomorphism.
    pub fn is_isomorphism(&self, other: &FiniteGroup, map: &[usize]) -> bool {
        let n = self.order();
        if other.order() != n || map.len() != n {
            return false;
        }
        let mut hit = vec![false; n];
        for &y in map {
            if y >= n || std::mem::replace(&mut hit[y], true) {
                return false;
            }
        }
        (0..n).all(|a| (0..n).all(|b| map[self.mul(a, b)] == other.mul(map[a], map[b])))
    }
}

fn mask_to_indices(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect()
}

/// Invariant factors of a finite abelian group from the multiset of its
/// element orders: `|G[p^k]| = p^{s_k}` and `s_k - s_{k-1}` counts the cyclic
/// p-summands of order at least `p^k`.
pub fn abelian_from_element_orders(orders: &[u64]) -> FgAbelianGroup {
    let size = orders.len() as u64;
    let primes = FgAbelianGroup::new(0, &[size]).primary_decomposition();
    let mut cyclic = Vec::new();
    for (p, full) in primes {
        let mut exponents = Vec::new();
        let mut pk = 1u64;
        let mut prev_log = 0u32;
        while pk < full {
            pk *= p;
            let count = orders.iter().filter(|&&o| pk.is_multiple_of(o)).count() as u64;
            let log = count.ilog(p);
            exponents.push(log - prev_log);
            prev_log = log;
        }
        // exponents[k-1] = number of summands of order >= p^k
        for k in 0..exponents.len() {
            let at_least = exponents[k];
            let above = exponents.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(at_least - above) {
                cyclic.push(p.pow(k as u32 + 1));
            }
        }
    }
    FgAbelianGroup::new(0, &cyclic)
}

/// `A^×` together with its embedding into `A`.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    group: FiniteGroup,
    to_monoid: Vec<usize>,
    from_monoid: Vec<Option<usize>>,
}

impl UnitGroup {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn into_group(self) -> FiniteGroup {
        self.group
    }

    /// Monoid index of a group element.
    pub fn to_monoid(&self, g: usize) -> usize {
        self.to_monoid[g]
    }

    /// Group index of a monoid element, if it is a unit.
    pub fn from_monoid(&self, a: usize) -> Option<usize> {
        self.from_monoid[a]
    }

    pub fn monoid_elements(&self) -> &[usize] {
        &self.to_monoid
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }
}

pub fn units(a: &PointedMonoid) -> UnitGroup {
    let members: Vec<usize> = (0..a.len()).filter(|&x| a.is_unit(x)).collect();
    let mut from_monoid = vec![None; a.len()];
    for (i, &x) in members.iter().enumerate() {
        from_monoid[x] = Some(i);
    }
    let table = members
        .iter()
        .flat_map(|&x| members.iter().map(move |&y| (x, y)))
        .map(|(x, y)| from_monoid[a.mul(x, y)].expect("units are closed under multiplication"))
        .collect();
    let labels = members.iter().map(|&x| a.label(x).to_string()).collect();
    let group = FiniteGroup::from_flat(labels, table).expect("units of a monoid form a group");
    UnitGroup { group, to_monoid: members, from_monoid }
}

pub fn commutator_subgroup(g: &FiniteGroup) -> FiniteGroup {
    g.commutator_subgroup()
}

pub fn abelianization(g: &FiniteGroup) -> FgAbelianGroup {
    g.abelianization()
}

/// An element of `A[x]`: either zero or `a·x^n` with `a ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolyElement {
    Zero,
    Term { coeff: usize, degree: u32 },
}

impl PolyElement {
    pub fn term(a: &PointedMonoid, coeff: usize, degree: u32) -> Self {
        if coeff == a.zero() {
            PolyElement::Zero
        } else {
            PolyElement::Term { coeff, degree }
        }
    }

    pub fn one(a: &PointedMonoid) -> Self {
        Self::term(a, a.one(), 0)
    }

    pub fn mul(self, other: Self, a: &PointedMonoid) -> Self {
        match (self, other) {
            (PolyElement::Term { coeff: c, degree: n }, PolyElement::Term { coeff: d, degree: m }) => {
                Self::term(a, a.mul(c, d), n + m)
            }
            _ => PolyElement::Zero,
        }
    }

    /// Degrees add, so an inverse forces degree 0.
    pub fn is_unit(self, a: &PointedMonoid) -> bool {
        matches!(self, PolyElement::Term { coeff, degree: 0 } if a.is_unit(coeff))
    }

    pub fn is_idempotent(self, a: &PointedMonoid) -> bool {
        self.mul(self, a) == self
    }

    pub fn label(self, a: &PointedMonoid) -> String {
        match self {
            PolyElement::Zero => a.label(a.zero()).to_string(),
            PolyElement::Term { coeff, degree: 0 } => a.label(coeff).to_string(),
            PolyElement::Term { coeff, degree: 1 } => format!("{}x", a.label(coeff)),
            PolyElement::Term { coeff, degree } => format!("{}x^{degree}", a.label(coeff)),
        }
    }
}

/// Units and idempotents of `A[x]`.
#[derive(Debug, Clone)]
pub struct PolyUnits {
    /// `A[x]^×`, built from its elements under polynomial multiplication.
    pub group: FiniteGroup,
    pub elements: Vec<PolyElement>,
    /// `bijection[g] = index in group of (u, 0)` where `u` is the g-th unit of `A`.
    pub bijection: Vec<usize>,
    /// `(e, 0)` for each idempotent `e` of `A`, zero included.
    pub idempotents: Vec<PolyElement>,
}

pub fn poly_units(a: &PointedMonoid) -> PolyUnits {
    let ua = units(a);
    let elements: Vec<PolyElement> = ua
        .monoid_elements()
        .iter()
        .map(|&u| PolyElement::term(a, u, 0))
        .filter(|p| p.is_unit(a))
        .collect();
    let group = FiniteGroup::from_closed_set(elements.clone(), |p| p.label(a), |p, q| p.mul(*q, a))
        .expect("units of A[x] are closed");
    let bijection = (0..ua.order())
        .map(|g| {
            let p = PolyElement::term(a, ua.to_monoid(g), 0);
            elements.iter().position(|q| *q == p).expect("every unit of A is a unit of A[x]")
        })
        .collect();
    let idempotents = a
        .idempotents()
        .into_iter()
        .map(|e| PolyElement::term(a, e, 0))
        .filter(|p| p.is_idempotent(a))
        .collect();
    PolyUnits { group, elements, bijection, idempotents }
}

/// Named monoids used by the built-in suites.
pub fn standard_monoids() -> Vec<(String, PointedMonoid)> {
    vec![
        ("F1".into(), PointedMonoid::f1()),
        ("Z/2*".into(), group_monoid(&FiniteGroup::cyclic(2))),
        ("Z/3*".into(), group_monoid(&FiniteGroup::cyclic(3))),
        ("Z/5*".into(), group_monoid(&FiniteGroup::cyclic(5))),
        ("S3*".into(), group_monoid(&FiniteGroup::symmetric(3))),
        ("Q8*".into(), group_monoid(&FiniteGroup::quaternion())),
        ("{0,1,e}".into(), PointedMonoid::with_idempotent()),
        ("{0,1,n}".into(), PointedMonoid::with_nilpotent()),
        ("{0,1,e,f}".into(), PointedMonoid::left_zero_band()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_is_valid() {
        let f1 = PointedMonoid::f1();
        assert_eq!(f1.len(), 2);
        assert!(validate_monoid(&f1.to_table()).unwrap().is_empty());
        assert_eq!(units(&f1).order(), 1);
    }

    #[test]
    fn absorbing_violation_is_named() {
        let mut t = PointedMonoid::with_idempotent().to_table();
        t.table[0][2] = 2;
        let v = validate_monoid(&t).unwrap();
        assert!(v.contains(&Violation::ZeroNotAbsorbing { element: "e".into(), side: Side::Left }));
    }

    #[test]
    fn structural_errors() {
        let mut t = PointedMonoid::f1().to_table();
        t.table[1].pop();
        assert!(matches!(validate_monoid(&t), Err(MonoidError::Structural(_))));
    }

    #[test]
    fn group_monoid_shapes() {
        assert_eq!(group_monoid(&FiniteGroup::trivial()), PointedMonoid::f1());
        let s3 = group_monoid(&FiniteGroup::symmetric(3));
        assert_eq!(s3.len(), 7);
        assert!(!s3.is_commutative());
        let z3 = group_monoid(&FiniteGroup::cyclic(3));
        assert_eq!(units(&z3).order(), 3);
    }

    #[test]
    fn commutators() {
        assert_eq!(FiniteGroup::cyclic(6).commutator_indices().len(), 1);
        assert_eq!(FiniteGroup::symmetric(3).commutator_indices().len(), 3);
        let q = FiniteGroup::quaternion();
        let c = q.commutator_subgroup();
        let mut labels = c.labels().to_vec();
        labels.sort();
        assert_eq!(labels, vec!["-1", "1"]);
    }

    #[test]
    fn abelianizations() {
        assert_eq!(FiniteGroup::cyclic(6).abelianization(), FgAbelianGroup::cyclic(6));
        assert_eq!(FiniteGroup::symmetric(3).abelianization(), FgAbelianGroup::cyclic(2));
        let z2z4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4));
        assert_eq!(z2z4.abelianization().torsion(), &[2, 4]);
        assert_eq!(FiniteGroup::quaternion().abelianization(), FgAbelianGroup::new(0, &[2, 2]));
    }

    #[test]
    fn idempotent_monoid_has_trivial_units() {
        assert_eq!(units(&PointedMonoid::with_idempotent()).order(), 1);
    }

    #[test]
    fn poly_degree_kills_invertibility() {
        let a = group_monoid(&FiniteGroup::cyclic(5));
        let pu = poly_units(&a);
        assert_eq!(pu.group.order(), 5);
        let g = a.index_of("g").unwrap();
        assert!(!PolyElement::term(&a, g, 1).is_unit(&a));
        assert!(!PolyElement::term(&a, a.one(), 1).is_idempotent(&a));
    }

    #[test]
    fn json_round_trip() {
        let m = group_monoid(&FiniteGroup::cyclic(2));
        let s = serde_json::to_string(&m.to_file()).unwrap();
        assert_eq!(PointedMonoid::from_json_str(&s).unwrap(), m);
        assert!(PointedMonoid::from_json_str("{\"elements\":[]}").is_err());
    }
}
