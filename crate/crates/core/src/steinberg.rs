//! The groups `M(ℤ/d)`: generators `α, X₂, X₃, …` with `α` central,
//! `[Xᵢ, Xⱼ] = α` for `i ≠ j` and `Xᵢ^d = 1`.
//!
//! Elements are kept in standard form `α^r X₂^{e₂} X₃^{e₃} ⋯`. Multiplication
//! is `(r, e)(s, f) = (r + s + c(e, f), e + f)` with the 2-cocycle
//! `c(e, f) = Σ_{k>l} e_k f_l mod 2`. For odd `d` the bit is always 0
//! since `α = 1` there. The module also models `E(G*) ≅ ⊕G ⋊ A∞` at finite
//! truncation through monomial matrices.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abgroup::FgAbelianGroup;
use crate::guard::{SizeGuard, SizeGuardError};
use crate::matrix::{decompose, in_elementary, mat_mul, RowMonomicMatrix};
use crate::monoid::{group_monoid, FiniteGroup, GroupError, PointedMonoid};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinbergError {
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("odd permutation {0} is not in A_inf")]
    OddPermutation(String),
    #[error("cannot parse word: {0}")]
    Parse(String),
    #[error("{0}")]
    Structural(String),
    #[error(transparent)]
    SizeGuard(#[from] SizeGuardError),
}

/// `α^bit · Π Xᵢ^{vector[i]}` with indices `i ≥ 2`. Entries are reduced to
/// `0..d` (nonzero integers when `d = 0`); zero entries are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MGroupElement {
    modulus: u64,
    bit: u8,
    vector: BTreeMap<usize, i64>,
}

pub fn alpha_order(d: u64) -> u64 {
    if d.is_multiple_of(2) {
        2
    } else {
        1
    }
}

fn reduce(d: u64, x: i64) -> i64 {
    if d == 0 {
        x
    } else {
        x.rem_euclid(d as i64)
    }
}

impl MGroupElement {
    pub fn identity(d: u64) -> Self {
        MGroupElement { modulus: d, bit: 0, vector: BTreeMap::new() }
    }

    /// `α` (equal to the identity for odd `d`).
    pub fn alpha(d: u64) -> Self {
        MGroupElement { modulus: d, bit: (alpha_order(d) == 2) as u8, vector: BTreeMap::new() }
    }

    /// `Xᵢ`, `i ≥ 2`.
    pub fn x(d: u64, i: usize) -> Self {
        assert!(i >= 2, "generators start at X2");
        Self::from_parts(d, 0, [(i, 1)])
    }

    pub fn from_parts(d: u64, bit: u8, entries: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut vector = BTreeMap::new();
        for (i, e) in entries {
            let v = reduce(d, e);
            if v != 0 {
                vector.insert(i, v);
            }
        }
        let bit = if alpha_order(d) == 2 { bit & 1 } else { 0 };
        MGroupElement { modulus: d, bit, vector }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The exponent `r` of `α` in standard form.
    pub fn central_bit(&self) -> u8 {
        self.bit
    }

    pub fn vector(&self) -> &BTreeMap<usize, i64> {
        &self.vector
    }

    pub fn exponent(&self, i: usize) -> i64 {
        self.vector.get(&i).copied().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.bit == 0 && self.vector.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.vector.keys().next_back().copied()
    }

    pub fn inverse(&self) -> Self {
        let neg = Self::from_parts(self.modulus, 0, self.vector.iter().map(|(&i, &e)| (i, -e)));
        let bit = self.bit ^ cocycle(self, &neg);
        Self::from_parts(self.modulus, bit, neg.vector)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Self::identity(self.modulus);
        for _ in 0..k.unsigned_abs() {
            out = m_mul_unchecked(&out, &base);
        }
        out
    }

    /// The image in `⊕ℤ/d`.
    pub fn project(&self) -> BTreeMap<usize, i64> {
        self.vector.clone()
    }
}

/// `Σ_{k>l} e_k f_l mod 2`, zero for odd moduli.
fn cocycle(x: &MGroupElement, y: &MGroupElement) -> u8 {
    if alpha_order(x.modulus) == 1 {
        return 0;
    }
    let mut total = 0i64;
    for (&k, &e) in &x.vector {
        for (&l, &f) in y.vector.range(..k) {
            debug_assert!(l < k);
            total += (e & 1) * (f & 1);
        }
    }
    (total & 1) as u8
}

fn m_mul_unchecked(x: &MGroupElement, y: &MGroupElement) -> MGroupElement {
    let bit = x.bit ^ y.bit ^ cocycle(x, y);
    let mut vector = x.vector.clone();
    for (&i, &f) in &y.vector {
        *vector.entry(i).or_insert(0) += f;
    }
    MGroupElement::from_parts(x.modulus, bit, vector)
}

pub fn m_mul(x: &MGroupElement, y: &MGroupElement) -> Result<MGroupElement, SteinbergError> {
    if x.modulus != y.modulus {
        return Err(SteinbergError::ModulusMismatch(x.modulus, y.modulus));
    }
    Ok(m_mul_unchecked(x, y))
}

pub fn m_commutator(x: &MGroupElement, y: &MGroupElement) -> MGroupElement {
    let xy = m_mul_unchecked(x, y);
    m_mul_unchecked(&m_mul_unchecked(&xy, &x.inverse()), &y.inverse())
}

pub fn m_product<'a>(d: u64, items: impl IntoIterator<Item = &'a MGroupElement>) -> MGroupElement {
    items.into_iter().fold(MGroupElement::identity(d), |acc, x| m_mul_unchecked(&acc, x))
}

/// `α^r X₂^{e₂} ⋯ X_k^{e_k}` through the largest index in the support,
/// zero exponents included; `1` for the identity.
impl fmt::Display for MGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.bit == 1 {
            parts.push("a".to_string());
        }
        if let Some(top) = self.max_index() {
            for i in 2..=top {
                parts.push(format!("X{i}^{}", self.exponent(i)));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Parses words such as `"X3 X2 a X2^-1"`; `a` stands for `α`.
pub fn parse_word(d: u64, word: &str) -> Result<MGroupElement, SteinbergError> {
    let mut out = MGroupElement::identity(d);
    for token in word.split_whitespace() {
        let (base, exp) = match token.split_once('^') {
            Some((b, e)) => {
                let e: i64 = e.parse().map_err(|_| SteinbergError::Parse(format!("bad exponent in {token:?}")))?;
                (b, e)
            }
            None => (token, 1),
        };
        let g = if base == "a" || base == "alpha" {
            MGroupElement::alpha(d)
        } else if let Some(idx) = base.strip_prefix('X') {
            let i: usize = idx.parse().map_err(|_| SteinbergError::Parse(format!("bad generator {token:?}")))?;
            if i < 2 {
                return Err(SteinbergError::Parse(format!("generator index must be >= 2 in {token:?}")));
            }
            MGroupElement::x(d, i)
        } else {
            return Err(SteinbergError::Parse(format!("unknown symbol {token:?}")));
        };
        out = m_mul_unchecked(&out, &g.pow(exp));
    }
    Ok(out)
}

/// Points of `σ` as 1-based labels: `σ(i)` for `i ≥ 1`.
fn apply1(sigma: &Permutation, i: usize) -> usize {
    sigma.apply(i - 1) + 1
}

/// The image of `Xᵢ`:
/// `X_{σ(i)}` if `σ(1) = 1`, `X_{σ(1)}⁻¹` if `σ(i) = 1`, and
/// `X_{σ(1)}⁻¹ X_{σ(i)}` otherwise.
pub fn sigma_generator(d: u64, sigma: &Permutation, i: usize) -> MGroupElement {
    let s1 = apply1(sigma, 1);
    let si = apply1(sigma, i);
    if s1 == 1 {
        MGroupElement::x(d, si)
    } else if si == 1 {
        MGroupElement::x(d, s1).inverse()
    } else {
        m_mul_unchecked(&MGroupElement::x(d, s1).inverse(), &MGroupElement::x(d, si))
    }
}

fn require_even(sigma: &Permutation) -> Result<(), SteinbergError> {
    if sigma.is_even() {
        Ok(())
    } else {
        Err(SteinbergError::OddPermutation(sigma.to_string()))
    }
}

/// Applies the generator rule to the standard form of `x`, factor by factor.
pub fn sigma_act(sigma: &Permutation, x: &MGroupElement) -> Result<MGroupElement, SteinbergError> {
    require_even(sigma)?;
    let d = x.modulus;
    let mut out = if x.bit == 1 { MGroupElement::alpha(d) } else { MGroupElement::identity(d) };
    for (&i, &e) in &x.vector {
        out = m_mul_unchecked(&out, &sigma_generator(d, sigma, i).pow(e));
    }
    Ok(out)
}

/// Reduction `M(ℤ) → M(ℤ/d)` sending `α ↦ α` and `Xᵢ ↦ Xᵢ`.
pub fn reduce_mod(x: &MGroupElement, d: u64) -> Result<MGroupElement, SteinbergError> {
    if x.modulus != 0 {
        return Err(SteinbergError::Structural(format!("reduce_mod needs a source over Z, got d = {}", x.modulus)));
    }
    Ok(MGroupElement::from_parts(d, x.bit, x.vector.iter().map(|(&i, &e)| (i, e))))
}

/// A random element supported on `X₂ … X_top`.
pub fn random_element<R: Rng>(d: u64, top: usize, rng: &mut R) -> MGroupElement {
    let entries: Vec<(usize, i64)> = (2..=top)
        .map(|i| (i, if d == 0 { rng.gen_range(-3..=3) } else { rng.gen_range(0..d as i64) }))
        .collect();
    MGroupElement::from_parts(d, rng.gen_range(0..=1), entries)
}

/// A uniformly random even permutation of `{1..n}`.
pub fn random_even_permutation<R: Rng>(n: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        images.swap(i, rng.gen_range(0..=i));
    }
    let p = Permutation::new(images).expect("shuffle is a permutation");
    if p.is_even() || n < 2 {
        p
    } else {
        Permutation::transposition(n, n - 2, n - 1).compose(&p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl CheckCount {
    fn new() -> Self {
        CheckCount { cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaAudit {
    /// `σ([Xᵢ, Xⱼ]) = α`
    pub commutator_relation: CheckCount,
    /// `σ(Xᵢ)^d = 1`
    pub power_relation: CheckCount,
    /// `σ(xy) = σ(x)σ(y)`
    pub homomorphism: CheckCount,
    /// `(σ∘τ)·x = σ·(τ·x)`
    pub composition: CheckCount,
}

impl SigmaAudit {
    pub fn passed(&self) -> bool {
        self.commutator_relation.passed()
            && self.power_relation.passed()
            && self.homomorphism.passed()
            && self.composition.passed()
    }
}

/// Random checks of the σ-rule on permutations supported in `{1..7}`.
pub fn sigma_audit<R: Rng>(d: u64, cases: usize, rng: &mut R) -> SigmaAudit {
    let mut commutator_relation = CheckCount::new();
    let mut power_relation = CheckCount::new();
    let mut homomorphism = CheckCount::new();
    let mut composition = CheckCount::new();
    let alpha = MGroupElement::alpha(d);
    for _ in 0..cases {
        let sigma = random_even_permutation(7, rng);
        let tau = random_even_permutation(7, rng);
        let i = rng.gen_range(2..=7);
        let j = loop {
            let j = rng.gen_range(2..=7);
            if j != i {
                break j;
            }
        };
        let si = sigma_generator(d, &sigma, i);
        let sj = sigma_generator(d, &sigma, j);
        commutator_relation.record(m_commutator(&si, &sj) == alpha, || format!("sigma = {sigma}, i = {i}, j = {j}"));
        if d > 0 {
            let p = si.pow(d as i64);
            power_relation.record(p.is_identity(), || format!("sigma = {sigma}: sigma(X{i})^{d} = {p}"));
        }
        let x = random_element(d, 7, rng);
        let y = random_element(d, 7, rng);
        let lhs = sigma_act(&sigma, &m_mul_unchecked(&x, &y)).expect("even");
        let rhs = m_mul_unchecked(&sigma_act(&sigma, &x).expect("even"), &sigma_act(&sigma, &y).expect("even"));
        homomorphism.record(lhs == rhs, || format!("sigma = {sigma}, x = {x}, y = {y}"));
        let st = sigma.compose(&tau);
        let lhs = sigma_act(&st, &x).expect("even");
        let rhs = sigma_act(&sigma, &sigma_act(&tau, &x).expect("even")).expect("even");
        composition.record(lhs == rhs, || format!("sigma = {sigma}, tau = {tau}, x = {x}"));
    }
    SigmaAudit { commutator_relation, power_relation, homomorphism, composition }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub modulus: u64,
    pub kernel_order: u64,
    pub alpha_order: u64,
    pub alpha_central: CheckCount,
    pub homomorphism: CheckCount,
    pub surjective_on_generators: bool,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.kernel_order == self.alpha_order
            && self.alpha_central.passed()
            && self.homomorphism.passed()
            && self.surjective_on_generators
    }
}

/// The projection `(r, e) ↦ e` onto `⊕ℤ/d` and its kernel `{1, α}`.
pub fn projection_kernel<R: Rng>(d: u64, rng: &mut R) -> KernelReport {
    // elements over the empty support: the kernel of the projection
    let kernel: std::collections::BTreeSet<MGroupElement> =
        (0..=1).map(|b| MGroupElement::from_parts(d, b, [])).collect();
    let alpha = MGroupElement::alpha(d);
    let mut alpha_central = CheckCount::new();
    let mut homomorphism = CheckCount::new();
    for _ in 0..100 {
        let x = random_element(d, 7, rng);
        alpha_central.record(m_mul_unchecked(&alpha, &x) == m_mul_unchecked(&x, &alpha), || format!("x = {x}"));
        let y = random_element(d, 7, rng);
        let mut sum = x.project();
        for (i, f) in y.project() {
            *sum.entry(i).or_insert(0) += f;
        }
        let sum = MGroupElement::from_parts(d, 0, sum).project();
        homomorphism.record(m_mul_unchecked(&x, &y).project() == sum, || format!("x = {x}, y = {y}"));
    }
    let surjective_on_generators = (2..=7).all(|i| {
        let p = MGroupElement::x(d, i).project();
        d == 1 || (p.len() == 1 && p[&i] == 1)
    });
    KernelReport {
        modulus: d,
        kernel_order: kernel.len() as u64,
        alpha_order: alpha_order(d),
        alpha_central,
        homomorphism,
        surjective_on_generators,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityAudit {
    pub modulus: u64,
    /// `None` when `d` is odd, where the statement is not made.
    pub applicable: bool,
    pub words: usize,
    /// Words whose standard form over `ℤ` has odd `r`.
    pub odd_r: usize,
    /// Words whose reduction mod `d` is not the identity.
    pub nontrivial_reduction: usize,
    pub alpha_survives: bool,
}

impl ParityAudit {
    pub fn passed(&self) -> bool {
        !self.applicable || (self.odd_r == 0 && self.nontrivial_reduction == 0 && self.alpha_survives)
    }
}

/// Random products `Π aₗ Xᵢ^{±d} aₗ⁻¹` in `M(ℤ)`, `N ≤ 6` factors.
pub fn parity_audit<R: Rng>(d: u64, words: usize, rng: &mut R) -> ParityAudit {
    let applicable = d.is_multiple_of(2);
    let mut odd_r = 0;
    let mut nontrivial_reduction = 0;
    if applicable {
        for _ in 0..words {
            let n = rng.gen_range(1..=6);
            let mut x = MGroupElement::identity(0);
            for _ in 0..n {
                let a = random_element(0, 7, rng);
                let i = rng.gen_range(2..=7);
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let core = MGroupElement::x(0, i).pow(sign * d as i64);
                let term = m_mul_unchecked(&m_mul_unchecked(&a, &core), &a.inverse());
                x = m_mul_unchecked(&x, &term);
            }
            if x.central_bit() != 0 {
                odd_r += 1;
            }
            if !reduce_mod(&x, d).expect("source over Z").is_identity() {
                nontrivial_reduction += 1;
            }
        }
    }
    let alpha_survives = !applicable || reduce_mod(&MGroupElement::alpha(0), d).expect("over Z") == MGroupElement::alpha(d);
    ParityAudit {
        modulus: d,
        applicable,
        words: if applicable { words } else { 0 },
        odd_r,
        nontrivial_reduction,
        alpha_survives,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationAudit {
    pub associativity: CheckCount,
    pub alpha_central: CheckCount,
    pub commutator: CheckCount,
    pub power: CheckCount,
}

impl RelationAudit {
    pub fn passed(&self) -> bool {
        self.associativity.passed() && self.alpha_central.passed() && self.commutator.passed() && self.power.passed()
    }
}

/// Associativity on random triples and the three defining relations on
/// `X₂ … X_top`.
pub fn relation_audit<R: Rng>(d: u64, triples: usize, top: usize, rng: &mut R) -> RelationAudit {
    let mut associativity = CheckCount::new();
    for _ in 0..triples {
        let (x, y, z) = (random_element(d, 7, rng), random_element(d, 7, rng), random_element(d, 7, rng));
        let l = m_mul_unchecked(&m_mul_unchecked(&x, &y), &z);
        let r = m_mul_unchecked(&x, &m_mul_unchecked(&y, &z));
        associativity.record(l == r, || format!("x = {x}, y = {y}, z = {z}"));
    }
    let alpha = MGroupElement::alpha(d);
    let mut alpha_central = CheckCount::new();
    let mut commutator = CheckCount::new();
    let mut power = CheckCount::new();
    for i in 2..=top {
        let xi = MGroupElement::x(d, i);
        alpha_central.record(m_commutator(&alpha, &xi).is_identity(), || format!("[a, X{i}]"));
        power.record(xi.pow(d as i64).is_identity(), || format!("X{i}^{d}"));
        for j in 2..=top {
            if i != j {
                let xj = MGroupElement::x(d, j);
                commutator.record(m_commutator(&xi, &xj) == alpha, || format!("[X{i}, X{j}]"));
            }
        }
    }
    RelationAudit { associativity, alpha_central, commutator, power }
}

/// `E_n(G*)` for finite abelian `G` as pairs `(g₂..gₙ, σ)`, with the maps
/// `u`, `t`, `s` to and from monomial matrices.
#[derive(Debug, Clone)]
pub struct EGroup {
    group: FiniteGroup,
    monoid: PointedMonoid,
    n: usize,
}

/// `(vector, σ)` standing for `u(vector)·s(σ)`. Vector entries are indices
/// into the finite group, coordinate `k` meaning `g_{k+2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ESemidirectElement {
    pub vector: Vec<usize>,
    pub perm: Permutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EGroupReport {
    pub n: usize,
    pub group_order: usize,
    pub order: usize,
    pub predicate_count: usize,
    pub matches_predicate: bool,
    pub t_of_u_trivial: bool,
    pub t_of_s_identity: bool,
    pub image_u_is_kernel_t: bool,
    pub multiplication_matches_matrices: bool,
}

impl EGroupReport {
    pub fn passed(&self) -> bool {
        self.matches_predicate
            && self.t_of_u_trivial
            && self.t_of_s_identity
            && self.image_u_is_kernel_t
            && self.multiplication_matches_matrices
    }
}

impl EGroup {
    pub fn new(g: &FgAbelianGroup, n: usize) -> Result<Self, SteinbergError> {
        if n < 3 {
            return Err(SteinbergError::Structural(format!("truncation n = {n} is below 3")));
        }
        let group = FiniteGroup::from_abelian(g).map_err(|e: GroupError| SteinbergError::Structural(e.to_string()))?;
        let monoid = group_monoid(&group);
        Ok(EGroup { group, monoid, n })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn monoid(&self) -> &PointedMonoid {
        &self.monoid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn monoid_index(&self, g: usize) -> usize {
        g + 1
    }

    fn group_index(&self, x: usize) -> usize {
        x - 1
    }

    pub fn order(&self) -> u128 {
        let half_fact: u128 = (3..=self.n as u128).product();
        (self.group.order() as u128).saturating_pow(self.n as u32 - 1).saturating_mul(half_fact)
    }

    /// `u(g₂, …) = Diag((g₂g₃⋯)⁻¹, g₂, g₃, …)`.
    pub fn u(&self, vector: &[usize]) -> RowMonomicMatrix {
        let total = vector.iter().fold(self.group.identity(), |acc, &g| self.group.mul(acc, g));
        let mut diag = vec![self.monoid_index(self.group.inv(total))];
        diag.extend(vector.iter().map(|&g| self.monoid_index(g)));
        RowMonomicMatrix::diag(&self.monoid, &diag)
    }

    /// `t(Dσ) = σ`.
    pub fn t(&self, m: &RowMonomicMatrix) -> Result<Permutation, SteinbergError> {
        decompose(&self.monoid, m)
            .map(|dec| dec.perm)
            .map_err(|e| SteinbergError::Structural(e.to_string()))
    }

    /// The permutation matrix of `σ`.
    pub fn s(&self, sigma: &Permutation) -> RowMonomicMatrix {
        RowMonomicMatrix::permutation(&self.monoid, sigma)
    }

    pub fn to_matrix(&self, x: &ESemidirectElement) -> RowMonomicMatrix {
        mat_mul(&self.monoid, &self.u(&x.vector), &self.s(&x.perm)).expect("square matrices of equal size")
    }

    pub fn from_matrix(&self, m: &RowMonomicMatrix) -> Result<ESemidirectElement, SteinbergError> {
        let dec = decompose(&self.monoid, m).map_err(|e| SteinbergError::Structural(e.to_string()))?;
        let vector: Vec<usize> = dec.diag[1..].iter().map(|&x| self.group_index(x)).collect();
        let x = ESemidirectElement { vector, perm: dec.perm };
        if self.to_matrix(&x) != *m {
            return Err(SteinbergError::Structural("matrix is not in E_n(G*)".into()));
        }
        Ok(x)
    }

    /// `λ_σ(w)ᵢ = b_{σ(i)}` where `b = ((Πw)⁻¹, w₂, …)`: conjugation
    /// `s(σ)·u(w)·s(σ)⁻¹ = u(λ_σ(w))`.
    pub fn lambda(&self, sigma: &Permutation, w: &[usize]) -> Vec<usize> {
        let total = w.iter().fold(self.group.identity(), |acc, &g| self.group.mul(acc, g));
        let mut b = vec![self.group.inv(total)];
        b.extend_from_slice(w);
        (1..self.n).map(|i| b[sigma.apply(i)]).collect()
    }

    /// `(v, σ)(w, τ) = (v·λ_σ(w), τ∘σ)`, matching matrix multiplication.
    pub fn mul(&self, x: &ESemidirectElement, y: &ESemidirectElement) -> ESemidirectElement {
        let lw = self.lambda(&x.perm, &y.vector);
        ESemidirectElement {
            vector: x.vector.iter().zip(&lw).map(|(&a, &b)| self.group.mul(a, b)).collect(),
            perm: y.perm.compose(&x.perm),
        }
    }

    pub fn elements(&self, guard: &SizeGuard) -> Result<Vec<ESemidirectElement>, SteinbergError> {
        guard.check(&format!("E_{}(G*)", self.n), self.order())?;
        let mut vectors: Vec<Vec<usize>> = vec![vec![]];
        for _ in 1..self.n {
            vectors = vectors
                .into_iter()
                .flat_map(|v| {
                    (0..self.group.order()).map(move |g| {
                        let mut w = v.clone();
                        w.push(g);
                        w
                    })
                })
                .collect();
        }
        let perms: Vec<Permutation> = Permutation::all(self.n).into_iter().filter(Permutation::is_even).collect();
        let mut out: Vec<ESemidirectElement> = perms
            .iter()
            .flat_map(|p| vectors.iter().map(move |v| ESemidirectElement { vector: v.clone(), perm: p.clone() }))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Checks the split sequence `⊕G → E → A_n` at the matrix level.
    pub fn verify<R: Rng>(&self, guard: &SizeGuard, rng: &mut R) -> Result<EGroupReport, SteinbergError> {
        let elements = self.elements(guard)?;
        let matrices: Vec<RowMonomicMatrix> = elements.iter().map(|x| self.to_matrix(x)).collect();
        let gl = crate::matrix::enumerate_gl(&self.monoid, self.n, guard).map_err(|e| SteinbergError::Structural(e.to_string()))?;
        let mut predicate: Vec<&RowMonomicMatrix> = Vec::new();
        for m in &gl {
            if in_elementary(&self.monoid, m).map_err(|e| SteinbergError::Structural(e.to_string()))? {
                predicate.push(m);
            }
        }
        let mut sorted: Vec<&RowMonomicMatrix> = matrices.iter().collect();
        sorted.sort();
        sorted.dedup();
        let matches_predicate = sorted.len() == elements.len() && sorted == predicate;

        let id = Permutation::identity(self.n);
        let t_of_u_trivial = elements
            .iter()
            .filter(|x| x.perm.is_identity())
            .all(|x| self.t(&self.u(&x.vector)).map(|p| p.is_identity()).unwrap_or(false));
        let t_of_s_identity = Permutation::all(self.n)
            .iter()
            .filter(|p| p.is_even())
            .all(|p| self.t(&self.s(p)).map(|q| q == *p).unwrap_or(false));
        let kernel: Vec<&RowMonomicMatrix> =
            matrices.iter().filter(|m| self.t(m).map(|p| p == id).unwrap_or(false)).collect();
        let image_u_is_kernel_t = kernel.len() == self.group.order().pow(self.n as u32 - 1)
            && kernel.iter().all(|m| {
                decompose(&self.monoid, m).map(|dec| self.u(&dec.diag[1..].iter().map(|&x| self.group_index(x)).collect::<Vec<_>>()) == **m).unwrap_or(false)
            });
        let mut multiplication_matches_matrices = true;
        for _ in 0..200 {
            let x = &elements[rng.gen_range(0..elements.len())];
            let y = &elements[rng.gen_range(0..elements.len())];
            let lhs = self.to_matrix(&self.mul(x, y));
            let rhs = mat_mul(&self.monoid, &self.to_matrix(x), &self.to_matrix(y)).expect("same size");
            multiplication_matches_matrices &= lhs == rhs;
        }
        Ok(EGroupReport {
            n: self.n,
            group_order: self.group.order(),
            order: elements.len(),
            predicate_count: predicate.len(),
            matches_predicate,
            t_of_u_trivial,
            t_of_s_identity,
            image_u_is_kernel_t,
            multiplication_matches_matrices,
        })
    }
}

/// Compares `π(σ·x)` with the coordinate action on `⊕ℤ/d` induced by
/// conjugation in `E_n((ℤ/d)*)`: `sigma_act(σ)` matches `λ_{σ⁻¹}`.
pub fn lambda_compatibility<R: Rng>(d: u64, n: usize, cases: usize, rng: &mut R) -> Result<CheckCount, SteinbergError> {
    if d == 0 {
        return Err(SteinbergError::Structural("E-group comparison needs a finite G".into()));
    }
    let e = EGroup::new(&FgAbelianGroup::cyclic(d), n)?;
    let mut check = CheckCount::new();
    for _ in 0..cases {
        let sigma = random_even_permutation(n, rng);
        let x = random_element(d, n, rng);
        let acted = sigma_act(&sigma, &x)?.project();
        let w: Vec<usize> = (2..=n).map(|i| x.exponent(i) as usize).collect();
        let lw = e.lambda(&sigma.inverse(), &w);
        let expected: BTreeMap<usize, i64> =
            lw.iter().enumerate().filter(|(_, &g)| g != 0).map(|(k, &g)| (k + 2, g as i64)).collect();
        check.record(acted == expected, || format!("sigma = {sigma}, x = {x}"));
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MCheckReport {
    pub modulus: u64,
    pub seed: u64,
    pub alpha_order: u64,
    pub relations: RelationAudit,
    pub sigma: SigmaAudit,
    pub kernel: KernelReport,
    pub parity: ParityAudit,
    /// Skipped for `d = 0`, where `⊕ℤ` has no finite E-group model.
    pub lambda_compatibility: Option<CheckCount>,
    pub passed: bool,
}

/// Full audit of `M(ℤ/d)`: 10⁴ associativity triples, the relations on
/// `X₂ … X₇`, 200 σ cases, the projection kernel and 100 parity words.
pub fn m_check(d: u64, seed: u64) -> Result<MCheckReport, SteinbergError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let relations = relation_audit(d, 10_000, 7, &mut rng);
    let sigma = sigma_audit(d, 200, &mut rng);
    let kernel = projection_kernel(d, &mut rng);
    let parity = parity_audit(d, 100, &mut rng);
    let lambda_compatibility = if d == 0 { None } else { Some(lambda_compatibility(d, 5, 200, &mut rng)?) };
    let passed = relations.passed()
        && sigma.passed()
        && kernel.passed()
        && parity.passed()
        && lambda_compatibility.as_ref().is_none_or(CheckCount::passed);
    Ok(MCheckReport {
        modulus: d,
        seed,
        alpha_order: alpha_order(d),
        relations,
        sigma,
        kernel,
        parity,
        lambda_compatibility,
        passed,
    })
}
