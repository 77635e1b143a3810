//! Integral homology of `ℤ^r ⊕ ⊕ ℤ/dᵢ` from the tensor product of the
//! periodic resolutions, reduced mod the augmentation and diagonalized by a
//! local integer elimination.

use num_integer::Integer;

/// Degree-`k` cells are exponent vectors `e` with `Σe = k`, where free
/// factors only allow exponents 0 and 1.
fn cells(bounds: &[Option<u64>], k: usize) -> Vec<Vec<usize>> {
    fn go(bounds: &[Option<u64>], i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == bounds.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let top = if bounds[i].is_none() { left.min(1) } else { left };
        for e in 0..=top {
            cur.push(e);
            go(bounds, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(bounds, 0, k, &mut Vec::new(), &mut out);
    out
}

/// `∂(x₁ ⊗ … ⊗ xₘ) = Σ (−1)^{|x₁|+…+|x_{i−1}|} x₁ ⊗ … ∂xᵢ … ⊗ xₘ` with
/// `∂e_j = d·e_{j−1}` for even `j ≥ 2` on a `ℤ/d` factor and zero otherwise.
fn boundary(bounds: &[Option<u64>], k: usize) -> Vec<Vec<i128>> {
    let src = cells(bounds, k);
    let tgt = if k == 0 { vec![] } else { cells(bounds, k - 1) };
    let mut m = vec![vec![0i128; src.len()]; tgt.len()];
    for (c, cell) in src.iter().enumerate() {
        let mut sign = 1i128;
        for (i, &e) in cell.iter().enumerate() {
            if let Some(d) = bounds[i] {
                if e >= 2 && e % 2 == 0 {
                    let mut face = cell.clone();
                    face[i] -= 1;
                    let r = tgt.iter().position(|t| *t == face).expect("face is a cell");
                    m[r][c] += sign * d as i128;
                }
            }
            if e % 2 == 1 {
                sign = -sign;
            }
        }
    }
    m
}

/// Nonzero diagonal entries of the Smith form, unnormalized order.
fn diagonal(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| m[r][c] != 0)
            .min_by_key(|&(r, c)| m[r][c].abs())
        else {
            break;
        };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let p = m[t][t];
            let mut done = true;
            for r in t + 1..rows {
                let q = Integer::div_floor(&m[r][t], &p);
                if q != 0 {
                    for c in t..cols {
                        m[r][c] -= q * m[t][c];
                    }
                }
                if m[r][t] != 0 {
                    done = false;
                }
            }
            for c in t + 1..cols {
                let q = Integer::div_floor(&m[t][c], &p);
                if q != 0 {
                    for r in t..rows {
                        m[r][c] -= q * m[r][t];
                    }
                }
                if m[t][c] != 0 {
                    done = false;
                }
            }
            if done {
                // divisibility of the rest is fixed up by the gcd merge below
                break;
            }
            let (r, c) = (t..rows)
                .flat_map(|r| (t..cols).map(move |c| (r, c)))
                .filter(|&(r, c)| (r == t || c == t) && m[r][c] != 0)
                .min_by_key(|&(r, c)| m[r][c].abs())
                .expect("pivot row or column is nonzero");
            m.swap(t, r);
            for row in m.iter_mut() {
                row.swap(t, c);
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

/// Invariant factors of a diagonal list: merge pairwise by gcd/lcm.
fn invariant(mut ds: Vec<i128>) -> Vec<u64> {
    for i in 0..ds.len() {
        for j in i + 1..ds.len() {
            let (g, l) = (ds[i].gcd(&ds[j]), ds[i].lcm(&ds[j]));
            ds[i] = g;
            ds[j] = l;
        }
    }
    ds.into_iter().filter(|&d| d > 1).map(|d| d as u64).collect()
}

/// `(free rank, torsion invariant factors)` of `H_k(G; ℤ)` where `G` has the
/// given free rank and cyclic orders.
pub fn homology(free_rank: usize, torsion: &[u64], k: usize) -> (usize, Vec<u64>) {
    let bounds: Vec<Option<u64>> =
        std::iter::repeat_n(None, free_rank).chain(torsion.iter().map(|&d| Some(d))).collect();
    let dim = cells(&bounds, k).len();
    let out = boundary(&bounds, k);
    let inc = boundary(&bounds, k + 1);
    let rank_out = diagonal(out).len();
    let inc_diag = diagonal(inc);
    let rank_in = inc_diag.len();
    (dim - rank_out - rank_in, invariant(inc_diag))
}

/// `Λ²G`: `ℤ^{r(r−1)/2} ⊕ (⊕ᵢ ℤ/dᵢ)^r ⊕ ⊕_{i<j} ℤ/gcd(dᵢ, dⱼ)`, as a list of
/// cyclic orders (not yet in invariant form).
pub fn exterior_square(free_rank: usize, torsion: &[u64]) -> (usize, Vec<u64>) {
    let mut cyclic = Vec::new();
    for _ in 0..free_rank {
        cyclic.extend_from_slice(torsion);
    }
    for i in 0..torsion.len() {
        for j in i + 1..torsion.len() {
            cyclic.push(torsion[i].gcd(&torsion[j]));
        }
    }
    (free_rank * free_rank.saturating_sub(1) / 2, invariant(cyclic.into_iter().map(i128::from).collect()))
}

/// `ℤ^cols / ⟨rows⟩` as `(free rank, torsion invariant factors)`.
pub fn cokernel(rows: Vec<Vec<i128>>, cols: usize) -> (usize, Vec<u64>) {
    let d = diagonal(rows);
    (cols - d.len(), invariant(d))
}
