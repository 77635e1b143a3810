//! Closed-form K-groups of pointed monoids and their finite consistency checks.

use std::sync::Arc;

use serde::Serialize;

use crate::abgroup::{homology, Coefficients, FgAbelianGroup};
use crate::aset::{free_aset, is_projective, FiniteASet, BASE};
use crate::guard::SizeGuard;
use crate::matrix::{gl_group, gl_order, MatrixError};
use crate::monoid::{poly_units, units, PointedMonoid};

/// One K-group value together with the formula that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KEntry {
    pub group: FgAbelianGroup,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KReport {
    pub k0: Option<KEntry>,
    pub k1: Option<KEntry>,
    pub k2: Option<KEntry>,
    /// Why K₀ was withheld, when it was.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0_note: Option<String>,
}

pub const K1_PROVENANCE: &str = "K1(A) = Z/2 + (A^x)^ab";
pub const K2_PROVENANCE: &str = "K2(G*) = Z/2 + G/2 + H2(G;Z)";
pub const PI2S_PROVENANCE: &str = "pi2s(BG+) = Z/2 + G_ab/2 + H2";
pub const K0_PROVENANCE: &str = "K0(A) = Z in the Proj = Vec regime";

pub fn k1(a: &PointedMonoid) -> FgAbelianGroup {
    FgAbelianGroup::cyclic(2).direct_sum(&units(a).group().abelianization())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K1Check {
    pub n: usize,
    pub gl_order: u128,
    pub brute_force: FgAbelianGroup,
    pub closed_form: FgAbelianGroup,
    pub agrees: bool,
}

/// Abelianization of the finite group `GLₙ(A)` against [`k1`].
pub fn k1_bruteforce_check(a: &PointedMonoid, n: usize, guard: &SizeGuard) -> Result<K1Check, MatrixError> {
    if n < 2 {
        return Err(MatrixError::Dimension(format!("check-k1 needs n >= 2, got {n}")));
    }
    let g = gl_group(a, n, guard)?;
    let brute_force = g.abelianization();
    let closed_form = k1(a);
    Ok(K1Check {
        n,
        gl_order: gl_order(units(a).order(), n),
        agrees: brute_force == closed_form,
        brute_force,
        closed_form,
    })
}

/// The three summands of `π₂ˢ(BG₊)` as read off the spectral sequence, with
/// the differential `H₃ → H₁(−; ℤ/2)` taken to be zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K2Decomposition {
    pub stable_stem: FgAbelianGroup,
    pub coker_d: FgAbelianGroup,
    pub h2: FgAbelianGroup,
    pub total: FgAbelianGroup,
}

pub fn k2_decomposition(g: &FgAbelianGroup) -> K2Decomposition {
    let h2 = homology(g, 2, Coefficients::Integers).expect("degree 2 is supported");
    pi2s_decomposition(g, &h2)
}

pub fn k2_abelian(g: &FgAbelianGroup) -> FgAbelianGroup {
    k2_decomposition(g).total
}

fn pi2s_decomposition(g_ab: &FgAbelianGroup, h2: &FgAbelianGroup) -> K2Decomposition {
    let stable_stem = FgAbelianGroup::cyclic(2);
    let coker_d = g_ab.reduce_mod(2);
    let total = FgAbelianGroup::direct_sum_all([&stable_stem, &coker_d, h2]);
    K2Decomposition { stable_stem, coker_d, h2: h2.clone(), total }
}

/// `ℤ/2 ⊕ (G_ab ⊗ ℤ/2) ⊕ H₂`; the Schur multiplier is an input.
pub fn pi2s_formula(g_ab: &FgAbelianGroup, h2: &FgAbelianGroup) -> FgAbelianGroup {
    pi2s_decomposition(g_ab, h2).total
}

/// Result of basis extraction on a finite A-set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FreeBasis {
    Free { basis: Vec<usize> },
    /// The candidate generators do not span freely; `candidates` are the
    /// maximal orbit classes that any basis would have to use.
    NotFree { candidates: Vec<usize> },
}

impl FreeBasis {
    pub fn basis(&self) -> Option<&[usize]> {
        match self {
            FreeBasis::Free { basis } => Some(basis),
            FreeBasis::NotFree { .. } => None,
        }
    }

    pub fn rank(&self) -> Option<usize> {
        self.basis().map(<[usize]>::len)
    }
}

/// `x ∈ A·y`
fn in_orbit(m: &FiniteASet, x: usize, y: usize) -> bool {
    (0..m.monoid().len()).any(|a| m.act(a, y) == x)
}

/// Whether `A·g₁ ∨ … ∨ A·gₖ → M` is a bijection.
pub fn is_basis(m: &FiniteASet, gens: &[usize]) -> bool {
    let a = m.monoid();
    let mut hit = vec![false; m.len()];
    hit[BASE] = true;
    let mut count = 1;
    for &g in gens {
        for x in a.nonzero() {
            let y = m.act(x, g);
            if y == BASE || std::mem::replace(&mut hit[y], true) {
                return false;
            }
            count += 1;
        }
    }
    count == m.len()
}

/// One representative (the smallest index) of each maximal class of the
/// preorder `x ≤ y ⇔ x ∈ A·y`, tested for freeness.
pub fn free_basis(m: &FiniteASet) -> FreeBasis {
    let mut candidates = Vec::new();
    for x in 1..m.len() {
        let maximal = (1..m.len()).all(|y| !in_orbit(m, x, y) || in_orbit(m, y, x));
        let first = (1..x).all(|y| !(in_orbit(m, x, y) && in_orbit(m, y, x)));
        if maximal && first {
            candidates.push(x);
        }
    }
    if is_basis(m, &candidates) {
        FreeBasis::Free { basis: candidates }
    } else {
        FreeBasis::NotFree { candidates }
    }
}

/// Pairs each `x` of one basis with the unique `y` of the other and a unit
/// `u` with `x = u·y`, if the two bases match that way.
pub fn unit_matching(m: &FiniteASet, xs: &[usize], ys: &[usize]) -> Option<Vec<(usize, usize, usize)>> {
    if xs.len() != ys.len() {
        return None;
    }
    let a = m.monoid();
    let mut used = vec![false; ys.len()];
    let mut out = Vec::new();
    for &x in xs {
        let mut found = None;
        for (k, &y) in ys.iter().enumerate() {
            if let Some(u) = (0..a.len()).find(|&u| a.is_unit(u) && m.act(u, y) == x) {
                if found.is_some() {
                    return None;
                }
                found = Some((k, u));
            }
        }
        let (k, u) = found?;
        if std::mem::replace(&mut used[k], true) {
            return None;
        }
        out.push((x, ys[k], u));
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomotopyReport {
    pub units_order: usize,
    pub poly_units_order: usize,
    /// `(u, image of u in A[x])` as labels.
    pub isomorphism: Vec<(String, String)>,
    pub is_isomorphism: bool,
    pub idempotents: Vec<String>,
    pub poly_idempotents: Vec<String>,
    pub k1: FgAbelianGroup,
    pub k1_poly: FgAbelianGroup,
    pub holds: bool,
}

/// Compares `A^×` with `A[x]^×` through the inclusion `a ↦ a·x⁰`.
pub fn homotopy_invariance_check(a: &PointedMonoid) -> HomotopyReport {
    let ua = units(a);
    let pu = poly_units(a);
    let is_isomorphism = ua.group().is_isomorphism(&pu.group, &pu.bijection);
    let isomorphism = (0..ua.order())
        .map(|g| (ua.group().label(g).to_string(), pu.group.label(pu.bijection[g]).to_string()))
        .collect();
    let k1 = k1(a);
    let k1_poly = FgAbelianGroup::cyclic(2).direct_sum(&pu.group.abelianization());
    let idempotents: Vec<String> = a.idempotents().into_iter().map(|e| a.label(e).to_string()).collect();
    let poly_idempotents: Vec<String> = pu.idempotents.iter().map(|p| p.label(a)).collect();
    HomotopyReport {
        units_order: ua.order(),
        poly_units_order: pu.group.order(),
        holds: is_isomorphism && k1 == k1_poly && idempotents.len() == poly_idempotents.len(),
        isomorphism,
        is_isomorphism,
        idempotents,
        poly_idempotents,
        k1,
        k1_poly,
    }
}

/// Whether every tested projective is free. The tested projectives are
/// the cyclic retracts `A·e` of `A` for each nonzero idempotent `e`.
pub fn projectives_are_free(a: &Arc<PointedMonoid>) -> Result<(), String> {
    let regular = Arc::new(FiniteASet::regular(a.clone()));
    for e in a.idempotents() {
        if e == a.zero() {
            continue;
        }
        let ei = regular.index_of(a.label(e)).expect("regular carrier uses monoid labels");
        let inc = regular.sub(&regular.orbit(ei)).map_err(|x| x.to_string())?;
        let p = inc.source();
        if !is_projective(p).is_projective() {
            return Err(format!("A·{} failed the retract test", a.label(e)));
        }
        if free_basis(p).basis().is_none() {
            return Err(format!("A·{} is projective but not free", a.label(e)));
        }
    }
    Ok(())
}

/// K₀, K₁ and, for abelian unit groups, K₂.
pub fn k_report(a: &Arc<PointedMonoid>) -> KReport {
    let (k0, k0_note) = match projectives_are_free(a) {
        Ok(()) => (Some(KEntry { group: FgAbelianGroup::free(1), provenance: K0_PROVENANCE.into() }), None),
        Err(why) => (None, Some(why)),
    };
    let g = units(a).into_group();
    let k2 = g.is_abelian().then(|| KEntry {
        group: k2_abelian(&g.abelianization()),
        provenance: K2_PROVENANCE.into(),
    });
    KReport { k0, k1: Some(KEntry { group: k1(a), provenance: K1_PROVENANCE.into() }), k2, k0_note }
}

/// `⋁ⁿA` built through [`free_aset`], handy for basis checks.
pub fn free_rank_set(a: &Arc<PointedMonoid>, n: usize) -> Arc<FiniteASet> {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    free_aset(a, &names).expect("distinct names").set
}
