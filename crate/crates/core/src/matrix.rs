//! Row-monomic matrices over a pointed monoid and the groups `GLₙ(A)`.
//!
//! Convention: `D(a₁, …, aₙ)·σ` has `aᵢ` at `(i, σ(i))`, so the permutation
//! matrix of `σ` has its ones at `(i, σ(i))` and `(P_σ P_τ)` is `P_{τ∘σ}`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::guard::{SizeGuard, SizeGuardError};
use crate::monoid::{units, FiniteGroup, PointedMonoid, UnitGroup};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid entry in row {row}: {reason}")]
    InvalidEntry { row: usize, reason: String },
    #[error("matrix is not invertible: {0}")]
    NotInvertible(NonInvertible),
    #[error("matrix JSON: {0}")]
    Json(String),
    #[error(transparent)]
    SizeGuard(#[from] SizeGuardError),
}

/// Why a square matrix is not in `GLₙ(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum NonInvertible {
    NotSquare { rows: usize, cols: usize },
    MissingRow { row: usize },
    RepeatedColumn { column: usize },
    NonUnitEntry { row: usize, element: String },
}

impl fmt::Display for NonInvertible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonInvertible::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            NonInvertible::MissingRow { row } => write!(f, "missing row {}", row + 1),
            NonInvertible::RepeatedColumn { column } => write!(f, "repeated column {}", column + 1),
            NonInvertible::NonUnitEntry { row, element } => {
                write!(f, "non-unit entry {element} in row {}", row + 1)
            }
        }
    }
}

/// An `m×n` matrix over `A` with at most one nonzero entry per row.
/// Entries are `(column, element index)`; zeros are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowMonomicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Option<(usize, usize)>>,
}

impl RowMonomicMatrix {
    pub fn new(
        a: &PointedMonoid,
        rows: usize,
        cols: usize,
        entries: Vec<Option<(usize, usize)>>,
    ) -> Result<Self, MatrixError> {
        if entries.len() != rows {
            return Err(MatrixError::Dimension(format!("{} row entries for {rows} rows", entries.len())));
        }
        for (row, e) in entries.iter().enumerate() {
            if let Some((c, x)) = *e {
                if c >= cols {
                    return Err(MatrixError::InvalidEntry { row, reason: format!("column {c} out of range") });
                }
                if x >= a.len() {
                    return Err(MatrixError::InvalidEntry { row, reason: format!("element index {x} out of range") });
                }
                if x == a.zero() {
                    return Err(MatrixError::InvalidEntry { row, reason: "stored zero entry".into() });
                }
            }
        }
        Ok(RowMonomicMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RowMonomicMatrix { rows, cols, entries: vec![None; rows] }
    }

    pub fn identity(a: &PointedMonoid, n: usize) -> Self {
        RowMonomicMatrix { rows: n, cols: n, entries: (0..n).map(|i| Some((i, a.one()))).collect() }
    }

    /// `D(a₁, …, aₙ)`; zero diagonal entries leave the row empty.
    pub fn diag(a: &PointedMonoid, diag: &[usize]) -> Self {
        let n = diag.len();
        let entries = diag.iter().enumerate().map(|(i, &x)| (x != a.zero()).then_some((i, x))).collect();
        RowMonomicMatrix { rows: n, cols: n, entries }
    }

    /// The matrix with ones at `(i, σ(i))`.
    pub fn permutation(a: &PointedMonoid, sigma: &Permutation) -> Self {
        let n = sigma.len();
        RowMonomicMatrix { rows: n, cols: n, entries: (0..n).map(|i| Some((sigma.apply(i), a.one()))).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Option<(usize, usize)>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<usize> {
        match self.entries[i] {
            Some((c, x)) if c == j => Some(x),
            _ => None,
        }
    }

    pub fn from_json_str(a: &PointedMonoid, s: &str) -> Result<Self, MatrixError> {
        let file: MatrixFile = serde_json::from_str(s).map_err(|e| MatrixError::Json(e.to_string()))?;
        file.into_matrix(a)
    }

    pub fn to_file(&self, a: &PointedMonoid) -> MatrixFile {
        MatrixFile {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.map(|(c, x)| (c, a.label(x).to_string()))).collect(),
        }
    }

    /// Compact text form, e.g. `[2:g, 1:h]` with 1-based columns and `-` for empty rows.
    pub fn display(&self, a: &PointedMonoid) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|e| match e {
                Some((c, x)) => format!("{}:{}", c + 1, a.label(*x)),
                None => "-".into(),
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// The JSON form `{"rows": m, "cols": n, "entries": [null | [column, label], …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Option<(usize, String)>>,
}

impl MatrixFile {
    pub fn into_matrix(self, a: &PointedMonoid) -> Result<RowMonomicMatrix, MatrixError> {
        let entries = self
            .entries
            .into_iter()
            .enumerate()
            .map(|(row, e)| match e {
                None => Ok(None),
                Some((c, label)) => a
                    .index_of(&label)
                    .map(|x| Some((c, x)))
                    .ok_or_else(|| MatrixError::InvalidEntry { row, reason: format!("unknown label {label:?}") }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        RowMonomicMatrix::new(a, self.rows, self.cols, entries)
    }
}

pub fn mat_mul(
    a: &PointedMonoid,
    l: &RowMonomicMatrix,
    r: &RowMonomicMatrix,
) -> Result<RowMonomicMatrix, MatrixError> {
    if l.cols != r.rows {
        return Err(MatrixError::Dimension(format!(
            "{}x{} times {}x{}",
            l.rows, l.cols, r.rows, r.cols
        )));
    }
    Ok(mul_unchecked(a, l, r))
}

fn mul_unchecked(a: &PointedMonoid, l: &RowMonomicMatrix, r: &RowMonomicMatrix) -> RowMonomicMatrix {
    let entries = l
        .entries
        .iter()
        .map(|e| {
            let (k, x) = (*e)?;
            let (j, y) = r.entries[k]?;
            let xy = a.mul(x, y);
            (xy != a.zero()).then_some((j, xy))
        })
        .collect();
    RowMonomicMatrix { rows: l.rows, cols: r.cols, entries }
}

/// `D(diag)·perm`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialDecomposition {
    pub diag: Vec<usize>,
    pub perm: Permutation,
}

impl MonomialDecomposition {
    pub fn recompose(&self) -> RowMonomicMatrix {
        let n = self.diag.len();
        RowMonomicMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| Some((self.perm.apply(i), self.diag[i]))).collect(),
        }
    }

    pub fn display(&self, a: &PointedMonoid) -> String {
        let d: Vec<&str> = self.diag.iter().map(|&x| a.label(x)).collect();
        format!("D({}){}", d.join(","), self.perm)
    }
}

pub fn decompose(a: &PointedMonoid, m: &RowMonomicMatrix) -> Result<MonomialDecomposition, NonInvertible> {
    if m.rows != m.cols {
        return Err(NonInvertible::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut images = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for (row, e) in m.entries.iter().enumerate() {
        let (c, x) = e.ok_or(NonInvertible::MissingRow { row })?;
        if std::mem::replace(&mut used[c], true) {
            return Err(NonInvertible::RepeatedColumn { column: c });
        }
        images.push(c);
        diag.push(x);
    }
    for (row, &x) in diag.iter().enumerate() {
        if !a.is_unit(x) {
            return Err(NonInvertible::NonUnitEntry { row, element: a.label(x).to_string() });
        }
    }
    let perm = Permutation::new(images).expect("distinct columns form a permutation");
    Ok(MonomialDecomposition { diag, perm })
}

pub fn gl_order(unit_count: usize, n: usize) -> u128 {
    let fact: u128 = (1..=n as u128).product();
    (unit_count as u128).saturating_pow(n as u32).saturating_mul(fact)
}

/// All of `GLₙ(A)`, sorted.
pub fn enumerate_gl(a: &PointedMonoid, n: usize, guard: &SizeGuard) -> Result<Vec<RowMonomicMatrix>, MatrixError> {
    let u = units(a);
    guard.check(&format!("GL_{n}"), gl_order(u.order(), n))?;
    let unit_elems = u.monoid_elements();
    let mut diags: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        diags = diags
            .into_iter()
            .flat_map(|d| {
                unit_elems.iter().map(move |&x| {
                    let mut e = d.clone();
                    e.push(x);
                    e
                })
            })
            .collect();
    }
    let perms = Permutation::all(n);
    let mut out: Vec<RowMonomicMatrix> = perms
        .iter()
        .flat_map(|p| {
            diags.iter().map(move |d| MonomialDecomposition { diag: d.clone(), perm: p.clone() }.recompose())
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `GLₙ(A)` as a finite group; elements labelled by [`RowMonomicMatrix::display`].
pub fn gl_group(a: &PointedMonoid, n: usize, guard: &SizeGuard) -> Result<FiniteGroup, MatrixError> {
    let elements = enumerate_gl(a, n, guard)?;
    Ok(FiniteGroup::from_closed_set(elements, |m| m.display(a), |x, y| mul_unchecked(a, x, y))
        .expect("GL_n(A) is a group"))
}

/// Membership in `E(A)`: even permutation and ordered diagonal product in `[A^×, A^×]`.
pub fn in_elementary(a: &PointedMonoid, m: &RowMonomicMatrix) -> Result<bool, MatrixError> {
    let u = units(a);
    let commutators = commutator_mask(&u);
    in_elementary_with(a, &u, &commutators, m)
}

fn commutator_mask(u: &UnitGroup) -> Vec<bool> {
    let mut mask = vec![false; u.order()];
    for g in u.group().commutator_indices() {
        mask[g] = true;
    }
    mask
}

fn in_elementary_with(
    a: &PointedMonoid,
    u: &UnitGroup,
    commutators: &[bool],
    m: &RowMonomicMatrix,
) -> Result<bool, MatrixError> {
    let d = decompose(a, m).map_err(MatrixError::NotInvertible)?;
    let product = a.product(d.diag.iter().copied());
    let g = u.from_monoid(product).expect("product of units is a unit");
    Ok(d.perm.is_even() && commutators[g])
}

/// The elements of `GLₙ(A)` satisfying [`in_elementary`], sorted.
pub fn elementary_predicate_set(
    a: &PointedMonoid,
    n: usize,
    guard: &SizeGuard,
) -> Result<Vec<RowMonomicMatrix>, MatrixError> {
    let u = units(a);
    let comm = commutator_mask(&u);
    let mut out = Vec::new();
    for m in enumerate_gl(a, n, guard)? {
        if in_elementary_with(a, &u, &comm, &m)? {
            out.push(m);
        }
    }
    Ok(out)
}

fn closure(
    a: &PointedMonoid,
    identity: &RowMonomicMatrix,
    gens: &[RowMonomicMatrix],
) -> HashSet<RowMonomicMatrix> {
    let mut seen = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = mul_unchecked(a, &x, g);
            if !seen.contains(&y) {
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    seen
}

fn inverse(a: &PointedMonoid, m: &RowMonomicMatrix) -> RowMonomicMatrix {
    // (D σ)⁻¹ has a_i⁻¹ at (σ(i), i)
    let n = m.rows;
    let mut entries = vec![None; n];
    for (i, e) in m.entries.iter().enumerate() {
        let (c, x) = e.expect("invertible matrix has full rows");
        entries[c] = Some((i, a.inverse(x).expect("invertible entry")));
    }
    RowMonomicMatrix { rows: n, cols: n, entries }
}

/// A generating set of `GLₙ(A)` chosen greedily in sorted element order.
pub fn greedy_generators(a: &PointedMonoid, elements: &[RowMonomicMatrix]) -> Vec<RowMonomicMatrix> {
    let Some(first) = elements.first() else { return vec![] };
    let identity = RowMonomicMatrix::identity(a, first.rows);
    let mut gens = Vec::new();
    let mut span = closure(a, &identity, &gens);
    for x in elements {
        if !span.contains(x) {
            gens.push(x.clone());
            span = closure(a, &identity, &gens);
        }
    }
    gens
}

/// The commutator subgroup `[GLₙ(A), GLₙ(A)]`, sorted.
///
/// Computed as the normal closure of the commutators of a generating set,
/// which is the same subgroup as the span of all commutators.
pub fn brute_elementary(
    a: &PointedMonoid,
    n: usize,
    guard: &SizeGuard,
) -> Result<Vec<RowMonomicMatrix>, MatrixError> {
    let elements = enumerate_gl(a, n, guard)?;
    let identity = RowMonomicMatrix::identity(a, n);
    let gens = greedy_generators(a, &elements);
    let conjugators: Vec<(RowMonomicMatrix, RowMonomicMatrix)> =
        gens.iter().map(|s| (s.clone(), inverse(a, s))).collect();
    let comm = |x: &RowMonomicMatrix, y: &RowMonomicMatrix| {
        let xy = mul_unchecked(a, x, y);
        let inv = mul_unchecked(a, &inverse(a, x), &inverse(a, y));
        mul_unchecked(a, &xy, &inv)
    };
    let mut normal_gens: Vec<RowMonomicMatrix> = Vec::new();
    for s in &gens {
        for t in &gens {
            let c = comm(s, t);
            if c != identity && !normal_gens.contains(&c) {
                normal_gens.push(c);
            }
        }
    }
    let mut span = closure(a, &identity, &normal_gens);
    loop {
        let mut grew = false;
        let current = normal_gens.clone();
        for h in &current {
            for (s, s_inv) in &conjugators {
                let c = mul_unchecked(a, &mul_unchecked(a, s, h), s_inv);
                if !span.contains(&c) {
                    normal_gens.push(c);
                    span = closure(a, &identity, &normal_gens);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<RowMonomicMatrix> = span.into_iter().collect();
    out.sort();
    Ok(out)
}

/// The commutator subgroup from every pair `[X, Y]`; quadratic in `|GLₙ(A)|`.
pub fn all_pairs_commutator_closure(
    a: &PointedMonoid,
    n: usize,
    guard: &SizeGuard,
) -> Result<Vec<RowMonomicMatrix>, MatrixError> {
    let g = gl_group(a, n, guard)?;
    let elements = enumerate_gl(a, n, guard)?;
    let mut out: Vec<RowMonomicMatrix> = g.commutator_indices().into_iter().map(|i| elements[i].clone()).collect();
    out.sort();
    Ok(out)
}

/// One of the explicit factorizations used to place diagonal matrices in `E(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub a: String,
    pub b: Option<String>,
    pub holds: bool,
}

/// Checks, for all units `a, b`:
/// - `D(a,a⁻¹) = D(a,1)·w·D(a⁻¹,1)·w` with `w` the swap,
/// - `D(a,a⁻¹)·σ·D(a,a⁻¹)·σ⁻¹ = D(a,1,a⁻¹)` for `σ = (123)(456)` acting on
///   basis vectors (`σ eⱼ = e_{σ(j)}`, ones at `(σ(j), j)`),
/// - `D(aba⁻¹b⁻¹,1) = D(a,a⁻¹,1)·D(b,1,b⁻¹)·D(a⁻¹,a,1)·D(b⁻¹,1,b)`,
///
/// with short diagonals padded by ones.
pub fn factorization_identities(a: &PointedMonoid) -> Vec<IdentityCheck> {
    let u = units(a);
    let one = a.one();
    let inv = |x: usize| a.inverse(x).expect("unit");
    let d = |xs: &[usize], n: usize| {
        let mut v = xs.to_vec();
        v.resize(n, one);
        RowMonomicMatrix::diag(a, &v)
    };
    let prod = |ms: &[RowMonomicMatrix]| {
        ms.iter().skip(1).fold(ms[0].clone(), |acc, m| mul_unchecked(a, &acc, m))
    };
    let swap = RowMonomicMatrix::permutation(a, &Permutation::transposition(2, 0, 1));
    let sigma = Permutation::from_cycles(6, &[&[1, 2, 3], &[4, 5, 6]]).expect("valid cycles");
    let sigma_m = RowMonomicMatrix::permutation(a, &sigma.inverse());
    let sigma_inv_m = RowMonomicMatrix::permutation(a, &sigma);

    let mut out = Vec::new();
    for &x in u.monoid_elements() {
        let xi = inv(x);
        let lhs = d(&[x, xi], 2);
        let rhs = prod(&[d(&[x], 2), swap.clone(), d(&[xi], 2), swap.clone()]);
        out.push(IdentityCheck {
            identity: "D(a,a^-1) = D(a,1) w D(a^-1,1) w".into(),
            a: a.label(x).into(),
            b: None,
            holds: lhs == rhs,
        });
        let lhs = prod(&[d(&[x, xi], 6), sigma_m.clone(), d(&[x, xi], 6), sigma_inv_m.clone()]);
        out.push(IdentityCheck {
            identity: "D(a,a^-1) s D(a,a^-1) s^-1 = D(a,1,a^-1), s = (123)(456)".into(),
            a: a.label(x).into(),
            b: None,
            holds: lhs == d(&[x, one, xi], 6),
        });
        for &y in u.monoid_elements() {
            let yi = inv(y);
            let c = a.product([x, y, xi, yi]);
            let rhs = prod(&[d(&[x, xi, one], 3), d(&[y, one, yi], 3), d(&[xi, x, one], 3), d(&[yi, one, y], 3)]);
            out.push(IdentityCheck {
                identity: "D(aba^-1b^-1,1) = D(a,a^-1,1) D(b,1,b^-1) D(a^-1,a,1) D(b^-1,1,b)".into(),
                a: a.label(x).into(),
                b: Some(a.label(y).into()),
                holds: d(&[c], 3) == rhs,
            });
        }
    }
    out
}
