//! Integer lattice helpers: positive functionals, bounded enumeration of
//! nonnegative solutions to `sum c_i v_i = target`, and Smith normal form.

use std::collections::HashMap;

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l1_norm(a: &[i64]) -> i64 {
    a.iter().map(|x| x.abs()).sum()
}

/// An integer vector `l` with `l . v >= 1` for every `v`, if one exists.
///
/// Runs the perceptron update `l += v` on violated vectors; it terminates
/// whenever the vectors span a pointed cone without zero vectors. Gives up
/// after a fixed number of sweeps.
pub fn positive_functional(vectors: &[Vec<i64>]) -> Option<Vec<i64>> {
    let d = vectors.first()?.len();
    if vectors.iter().any(|v| v.iter().all(|&x| x == 0)) {
        return None;
    }
    let mut l = vec![0i64; d];
    for _ in 0..20_000 {
        let mut changed = false;
        for v in vectors {
            if dot(&l, v) <= 0 {
                for (a, b) in l.iter_mut().zip(v) {
                    *a += b;
                }
                changed = true;
            }
        }
        if !changed {
            return Some(l);
        }
    }
    None
}

/// A nonzero nonnegative combination of `vectors` summing to zero, searched
/// up to total multiplicity `max_total`.
pub fn zero_combination(vectors: &[Vec<i64>], max_total: u32) -> Option<Vec<u32>> {
    let n = vectors.len();
    let d = vectors.first().map_or(0, Vec::len);
    fn rec(vectors: &[Vec<i64>], idx: usize, left: u32, acc: &mut Vec<i64>, coeffs: &mut Vec<u32>) -> bool {
        if idx == vectors.len() {
            return left == 0 && acc.iter().all(|&x| x == 0);
        }
        for c in 0..=left {
            coeffs[idx] = c;
            for (a, v) in acc.iter_mut().zip(&vectors[idx]) {
                *a += c as i64 * v;
            }
            let found = rec(vectors, idx + 1, left - c, acc, coeffs);
            for (a, v) in acc.iter_mut().zip(&vectors[idx]) {
                *a -= c as i64 * v;
            }
            if found {
                return true;
            }
        }
        coeffs[idx] = 0;
        false
    }
    for total in 1..=max_total {
        let mut coeffs = vec![0u32; n];
        let mut acc = vec![0i64; d];
        if rec(vectors, 0, total, &mut acc, &mut coeffs) {
            return Some(coeffs);
        }
    }
    None
}

/// Every `c in N^k` with `sum c_i vectors[i] = target`. `functional` must be
/// positive on all vectors; it bounds the search.
pub fn enumerate_solutions(vectors: &[Vec<i64>], functional: &[i64], target: &[i64]) -> Vec<Vec<u32>> {
    let weights: Vec<i64> = vectors.iter().map(|v| dot(functional, v)).collect();
    debug_assert!(weights.iter().all(|&w| w >= 1));
    let budget = dot(functional, target);
    let mut out = Vec::new();
    if budget < 0 {
        return out;
    }
    let search = Search { vectors, weights: &weights, signs: suffix_signs(vectors, target.len()) };
    let mut cur = vec![0u32; vectors.len()];
    let mut rem = target.to_vec();
    search.rec(0, budget, &mut rem, &mut cur, &mut out);
    out
}

/// `signs[idx][c]`: whether `vectors[idx..]` are all `>= 0` and all `<= 0` in coordinate `c`.
fn suffix_signs(vectors: &[Vec<i64>], d: usize) -> Vec<Vec<(bool, bool)>> {
    let mut signs = vec![vec![(true, true); d]; vectors.len() + 1];
    for idx in (0..vectors.len()).rev() {
        for c in 0..d {
            let (nonneg, nonpos) = signs[idx + 1][c];
            let x = vectors[idx][c];
            signs[idx][c] = (nonneg && x >= 0, nonpos && x <= 0);
        }
    }
    signs
}

struct Search<'a> {
    vectors: &'a [Vec<i64>],
    weights: &'a [i64],
    signs: Vec<Vec<(bool, bool)>>,
}

impl Search<'_> {
    /// The remainder must have the sign the remaining vectors can produce.
    fn reachable(&self, idx: usize, rem: &[i64]) -> bool {
        rem.iter().zip(&self.signs[idx]).all(|(&r, &(nonneg, nonpos))| (!nonneg || r >= 0) && (!nonpos || r <= 0))
    }

    fn rec(&self, idx: usize, budget: i64, rem: &mut Vec<i64>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !self.reachable(idx, rem) {
            return;
        }
        let n = self.vectors.len();
        if idx == n || budget == 0 {
            if budget == 0 && rem.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let (v, w) = (&self.vectors[idx], self.weights[idx]);
        if idx + 1 == n {
            // The last multiplicity is forced by the budget.
            if budget % w == 0 && rem.iter().zip(v).all(|(r, x)| *r == budget / w * x) {
                cur[idx] = (budget / w) as u32;
                out.push(cur.clone());
                cur[idx] = 0;
            }
            return;
        }
        let max_c = budget / w;
        let mut c = 0;
        while c <= max_c {
            cur[idx] = c as u32;
            self.rec(idx + 1, budget - c * w, rem, cur, out);
            for (r, x) in rem.iter_mut().zip(v) {
                *r -= x;
            }
            c += 1;
        }
        for (r, x) in rem.iter_mut().zip(v) {
            *r += c * x;
        }
        cur[idx] = 0;
    }
}

/// Number of `c in N^k` with `sum c_i vectors[i] = target`, memoized.
pub fn count_solutions(vectors: &[Vec<i64>], functional: &[i64], target: &[i64]) -> u128 {
    let weights: Vec<i64> = vectors.iter().map(|v| dot(functional, v)).collect();
    debug_assert!(weights.iter().all(|&w| w >= 1));
    let mut memo = HashMap::new();
    count_rec(vectors, &weights, functional, 0, target.to_vec(), &mut memo)
}

fn count_rec(
    vectors: &[Vec<i64>],
    weights: &[i64],
    functional: &[i64],
    idx: usize,
    rem: Vec<i64>,
    memo: &mut HashMap<(usize, Vec<i64>), u128>,
) -> u128 {
    let budget = dot(functional, &rem);
    if budget < 0 {
        return 0;
    }
    if idx == vectors.len() {
        return u128::from(rem.iter().all(|&x| x == 0));
    }
    if let Some(&v) = memo.get(&(idx, rem.clone())) {
        return v;
    }
    let mut total = 0;
    let mut r = rem.clone();
    let mut b = budget;
    while b >= 0 {
        total += count_rec(vectors, weights, functional, idx + 1, r.clone(), memo);
        for (x, v) in r.iter_mut().zip(&vectors[idx]) {
            *x -= v;
        }
        b -= weights[idx];
    }
    memo.insert((idx, rem), total);
    total
}

/// Diagonal form `A Q = P^{-1} D` of an integer matrix, tracking only the
/// column transform `Q` and its inverse.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub rank: usize,
    /// Nonzero diagonal entries, in pivot order.
    pub diagonal: Vec<i128>,
    pub q: Vec<Vec<i128>>,
    pub q_inv: Vec<Vec<i128>>,
}

impl SmithForm {
    pub fn torsion_free(&self) -> bool {
        self.diagonal.iter().all(|d| d.abs() == 1)
    }
}

pub fn smith_form(rows: &[Vec<i64>], ncols: usize) -> SmithForm {
    let nrows = rows.len();
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ident = |n: usize| -> Vec<Vec<i128>> { (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect() };
    let mut q = ident(ncols);
    let mut q_inv = ident(ncols);
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if *x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in q.iter_mut() {
                row.swap(t, pj);
            }
            q_inv.swap(t, pj);
        }
        let mut clean = true;
        let p = a[t][t];
        let pivot_row = a[t].clone();
        for row in a.iter_mut().skip(t + 1) {
            let k = row[t].div_euclid(p);
            if k != 0 {
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(t) {
                    *x -= k * y;
                }
            }
            clean &= row[t] == 0;
        }
        for j in t + 1..ncols {
            let k = a[t][j].div_euclid(p);
            if k != 0 {
                for row in a.iter_mut() {
                    row[j] -= k * row[t];
                }
                for row in q.iter_mut() {
                    row[j] -= k * row[t];
                }
                let (head, tail) = q_inv.split_at_mut(j);
                for (x, y) in head[t].iter_mut().zip(tail[0].iter()) {
                    *x += k * y;
                }
            }
            clean &= a[t][j] == 0;
        }
        if clean {
            diagonal.push(p);
            t += 1;
        }
    }
    SmithForm { rank: diagonal.len(), diagonal, q, q_inv }
}
