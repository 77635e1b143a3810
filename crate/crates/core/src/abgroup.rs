//! Finitely generated abelian groups, Smith normal form, and low-degree
//! homology of abelian groups.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbGroupError {
    #[error("invariant factor does not fit in 64 bits")]
    Overflow,
    #[error("homology is only supported in degrees 0..=3, got {0}")]
    UnsupportedDegree(usize),
    #[error("bad group description {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

/// `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `d₁ | d₂ | … | d_k` and every `dᵢ ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FgAbelianGroup {
    #[serde(rename = "free")]
    free_rank: usize,
    torsion: Vec<u64>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        FgAbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// `ℤ/d`, with `d = 0` meaning `ℤ`.
    pub fn cyclic(d: u64) -> Self {
        if d == 0 {
            Self::free(1)
        } else {
            Self::new(0, &[d])
        }
    }

    /// Normalizes an arbitrary list of cyclic orders. Orders equal to 1 vanish;
    /// an order of 0 is read as a copy of `ℤ`.
    ///
    /// Panics if an invariant factor overflows `u64`; see [`Self::try_new`].
    pub fn new(free_rank: usize, cyclic_orders: &[u64]) -> Self {
        Self::try_new(free_rank, cyclic_orders).expect("invariant factor overflows u64")
    }

    pub fn try_new(free_rank: usize, cyclic_orders: &[u64]) -> Result<Self, AbGroupError> {
        let mut free = free_rank;
        let mut v: Vec<u64> = Vec::new();
        for &d in cyclic_orders {
            match d {
                0 => free += 1,
                1 => {}
                _ => v.push(d),
            }
        }
        // gcd/lcm sweep leaves v[0] | v[1] | ... with the product unchanged.
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let g = v[i].gcd(&v[j]);
                let l = (v[i] / g).checked_mul(v[j]).ok_or(AbGroupError::Overflow)?;
                v[i] = g;
                v[j] = l;
            }
        }
        v.retain(|&d| d > 1);
        Ok(FgAbelianGroup { free_rank: free, torsion: v })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, or `None` when the group is infinite or the order overflows.
    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        self.torsion.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    /// Number of cyclic summands in the invariant-factor form.
    pub fn num_summands(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// The summands as cyclic orders, with 0 standing for `ℤ`.
    pub fn cyclic_orders(&self) -> Vec<u64> {
        let mut out = vec![0; self.free_rank];
        out.extend_from_slice(&self.torsion);
        out
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders = self.torsion.clone();
        orders.extend_from_slice(&other.torsion);
        Self::new(self.free_rank + other.free_rank, &orders)
    }

    pub fn direct_sum_all<'a>(groups: impl IntoIterator<Item = &'a FgAbelianGroup>) -> Self {
        groups.into_iter().fold(Self::trivial(), |acc, g| acc.direct_sum(g))
    }

    /// Dimension of `G ⊗ ℤ/p` over `ℤ/p` for a prime `p`.
    pub fn p_rank(&self, p: u64) -> usize {
        self.free_rank + self.torsion.iter().filter(|&&d| d % p == 0).count()
    }

    /// `G ⊗ ℤ/n`.
    pub fn reduce_mod(&self, n: u64) -> Self {
        tensor_tor(self, &Self::cyclic(n)).0
    }

    /// Prime-power decomposition `(p, p^k)` of the torsion part, sorted.
    pub fn primary_decomposition(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for &d in &self.torsion {
            let mut n = d;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    let mut q = 1;
                    while n % p == 0 {
                        n /= p;
                        q *= p;
                    }
                    out.push((p, q));
                }
                p += 1;
            }
            if n > 1 {
                out.push((n, n));
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromStr for FgAbelianGroup {
    type Err = AbGroupError;

    /// Parses `"free=r;torsion=d1,d2,..."`. Either key may be omitted.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| AbGroupError::Parse { input: input.to_string(), reason };
        let mut free = None;
        let mut torsion = None;
        for part in input.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found {part:?}")))?;
            match key.trim() {
                "free" => {
                    if free.is_some() {
                        return Err(err("duplicate key 'free'".into()));
                    }
                    let r = value
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| err(format!("free rank {value:?}: {e}")))?;
                    free = Some(r);
                }
                "torsion" => {
                    if torsion.is_some() {
                        return Err(err("duplicate key 'torsion'".into()));
                    }
                    let mut ds = Vec::new();
                    for tok in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        let d = tok
                            .parse::<u64>()
                            .map_err(|e| err(format!("torsion entry {tok:?}: {e}")))?;
                        if d == 0 {
                            return Err(err("torsion entries must be positive".into()));
                        }
                        ds.push(d);
                    }
                    torsion = Some(ds);
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Self::try_new(free.unwrap_or(0), &torsion.unwrap_or_default())
    }
}

/// `(G ⊗ H, Tor(G, H))`.
pub fn tensor_tor(g: &FgAbelianGroup, h: &FgAbelianGroup) -> (FgAbelianGroup, FgAbelianGroup) {
    let mut tensor_orders = Vec::new();
    let mut tor_orders = Vec::new();
    for _ in 0..h.free_rank {
        tensor_orders.extend_from_slice(&g.torsion);
    }
    for _ in 0..g.free_rank {
        tensor_orders.extend_from_slice(&h.torsion);
    }
    for &a in &g.torsion {
        for &b in &h.torsion {
            let c = a.gcd(&b);
            tensor_orders.push(c);
            tor_orders.push(c);
        }
    }
    (
        FgAbelianGroup::new(g.free_rank * h.free_rank, &tensor_orders),
        FgAbelianGroup::new(0, &tor_orders),
    )
}

pub fn iso_test(g: &FgAbelianGroup, h: &FgAbelianGroup) -> bool {
    g == h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Mod2,
}

/// Integral homology `H_0..=H_3` of one cyclic summand (`d = 0` is `ℤ`).
fn cyclic_homology(d: u64) -> [FgAbelianGroup; 4] {
    let z = FgAbelianGroup::free(1);
    let zero = FgAbelianGroup::trivial();
    if d == 0 {
        [z.clone(), z, zero.clone(), zero]
    } else {
        let c = FgAbelianGroup::cyclic(d);
        [z, c.clone(), zero, c]
    }
}

fn kunneth(x: &[FgAbelianGroup; 4], y: &[FgAbelianGroup; 4]) -> [FgAbelianGroup; 4] {
    std::array::from_fn(|n| {
        let mut acc = FgAbelianGroup::trivial();
        for p in 0..=n {
            acc = acc.direct_sum(&tensor_tor(&x[p], &y[n - p]).0);
        }
        if n >= 1 {
            for p in 0..n {
                acc = acc.direct_sum(&tensor_tor(&x[p], &y[n - 1 - p]).1);
            }
        }
        acc
    })
}

/// Integral homology in degrees 0 through 3.
pub fn integral_homology_table(g: &FgAbelianGroup) -> [FgAbelianGroup; 4] {
    let point = [
        FgAbelianGroup::free(1),
        FgAbelianGroup::trivial(),
        FgAbelianGroup::trivial(),
        FgAbelianGroup::trivial(),
    ];
    g.cyclic_orders()
        .into_iter()
        .fold(point, |acc, d| kunneth(&acc, &cyclic_homology(d)))
}

/// `H_k(G; ℤ)` or `H_k(G; ℤ/2)` for `k ≤ 3`, via Künneth over the cyclic
/// decomposition and universal coefficients.
pub fn homology(
    g: &FgAbelianGroup,
    k: usize,
    coefficients: Coefficients,
) -> Result<FgAbelianGroup, AbGroupError> {
    if k > 3 {
        return Err(AbGroupError::UnsupportedDegree(k));
    }
    let table = integral_homology_table(g);
    Ok(match coefficients {
        Coefficients::Integers => table[k].clone(),
        Coefficients::Mod2 => {
            let two = FgAbelianGroup::cyclic(2);
            let mut out = tensor_tor(&table[k], &two).0;
            if k >= 1 {
                out = out.direct_sum(&tensor_tor(&table[k - 1], &two).1);
            }
            out
        }
    })
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, AbGroupError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(AbGroupError::Shape(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntegerMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: impl Into<BigInt>) {
        self.data[i * self.cols + j] = value.into();
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: impl Into<BigInt>) {
        self.data[i * self.cols + j] += value.into();
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, AbGroupError> {
        if self.cols != other.rows {
            return Err(AbGroupError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, AbGroupError> {
        if v.len() != self.cols {
            return Err(AbGroupError::Shape(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect())
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut out = IntegerMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += q · row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * q;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += q · col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * q;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }

    /// Cokernel of `ℤ^cols → ℤ^rows`.
    pub fn cokernel(&self) -> Result<FgAbelianGroup, AbGroupError> {
        smith_normal_form(self).cokernel()
    }

    /// Whether `v ∈ ℤ^rows` lies in the column span.
    pub fn image_contains(&self, v: &[BigInt]) -> Result<bool, AbGroupError> {
        smith_normal_form(self).image_contains(v)
    }
}

/// `U · M · V = S` with `U`, `V` unimodular and `S` diagonal in divisibility order.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries of `S`, all positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    pub fn cokernel(&self) -> Result<FgAbelianGroup, AbGroupError> {
        let factors = self.invariant_factors();
        let free = self.s.rows - factors.len();
        let orders = factors
            .iter()
            .map(|d| d.to_u64().ok_or(AbGroupError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        FgAbelianGroup::try_new(free, &orders)
    }

    pub fn image_contains(&self, v: &[BigInt]) -> Result<bool, AbGroupError> {
        let w = self.u.mul_vec(v)?;
        let factors = self.invariant_factors();
        Ok(w.iter().enumerate().all(|(i, wi)| match factors.get(i) {
            Some(d) => wi.is_multiple_of(d),
            None => wi.is_zero(),
        }))
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&s, t, |_, _| true) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let pivot = s.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if !s.get(i, t).is_zero() {
                    let q = -s.get(i, t).div_floor(&pivot);
                    s.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    dirty |= !s.get(i, t).is_zero();
                }
            }
            for j in t + 1..cols {
                if !s.get(t, j).is_zero() {
                    let q = -s.get(t, j).div_floor(&pivot);
                    s.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    dirty |= !s.get(t, j).is_zero();
                }
            }
            if dirty {
                let (pi, pj) = min_abs_entry(&s, t, |i, j| i == t || j == t)
                    .expect("pivot row or column has a nonzero entry");
                s.swap_rows(t, pi);
                u.swap_rows(t, pi);
                s.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = offender {
                let one = BigInt::one();
                s.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                continue;
            }
            break;
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { s, u, v }
}

fn min_abs_entry(
    s: &IntegerMatrix,
    t: usize,
    allowed: impl Fn(usize, usize) -> bool,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows {
        for j in t..s.cols {
            let x = s.get(i, j);
            if x.is_zero() || !allowed(i, j) {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}
