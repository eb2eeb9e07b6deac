//! Enumeration-based ground truth: closed forms for polynomial rings, Hilbert
//! series, semigroup presentations, normality and Gorenstein detection.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cech::Side;
use crate::engine::{AnyEngine, PieceError};
use crate::field::{Field, Rationals};
use crate::lattice::{count_solutions, dot, enumerate_solutions, l1_norm, positive_functional, smith_form};
use crate::linalg::{rank, SparseMatrix};
use crate::ring::ValidatedRing;
use crate::table::ProbeBox;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("closed forms need a relation-free ring")]
    RelationsPresent,
    #[error("the basis set is infinite in this degree (no positive functional on the shifted cone)")]
    Unbounded,
    #[error("the ring is not a complete intersection, so no closed-form series numerator applies")]
    NotCompleteIntersection,
    #[error("series expansion gives {series} at {mu:?} but linear algebra gives {linear_algebra}")]
    SeriesMismatch { mu: Vec<i64>, series: BigInt, linear_algebra: usize },
    #[error("coarse series numerator not determined up to degree {0}")]
    SeriesNotDetermined(i64),
    #[error("relation {0} is not a pure binomial")]
    NotBinomial(usize),
    #[error("the binomial relations define a lattice with torsion")]
    Torsion,
    #[error("the binomials do not present the semigroup ring at {mu:?}: {semigroup} points vs dim {dim}")]
    NotSemigroupPresentation { mu: Vec<i64>, semigroup: usize, dim: usize },
    #[error(transparent)]
    Piece(#[from] PieceError),
}

/// What to count: a single lambda-weight or a single fine degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Weight(i64),
    Fine(Vec<i64>),
}

/// Local cohomology of a polynomial ring, which lives in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormDims {
    /// `|P|` on the plus side, `|N|` on the minus side.
    pub cohomological_degree: usize,
    pub dim: u128,
}

impl ClosedFormDims {
    pub fn at(&self, j: usize) -> u128 {
        if j == self.cohomological_degree {
            self.dim
        } else {
            0
        }
    }
}

/// Counts Laurent monomials with exponent `<= -1` on the side's variables and
/// `>= 0` elsewhere, in the requested degree.
pub fn closed_form_dims(ring: &ValidatedRing, side: Side, target: &Target) -> Result<ClosedFormDims, ToricError> {
    if !ring.relations().is_empty() {
        return Err(ToricError::RelationsPresent);
    }
    let sel = ring.variables_with_sign(side == Side::Plus);
    // substitute alpha = -e - 1 >= 0 on the selected variables
    let (vectors, target): (Vec<Vec<i64>>, Vec<i64>) = match target {
        Target::Weight(i) => {
            let w = ring.weights();
            let vs = (0..ring.nvars()).map(|k| vec![if sel.contains(&k) { -w[k] } else { w[k] }]).collect();
            let shift: i64 = sel.iter().map(|&k| w[k]).sum();
            (vs, vec![i + shift])
        }
        Target::Fine(mu) => {
            let degs = ring.degrees();
            let vs = (0..ring.nvars())
                .map(|k| if sel.contains(&k) { degs[k].iter().map(|x| -x).collect() } else { degs[k].clone() })
                .collect();
            let mut t = mu.clone();
            for &k in &sel {
                for (a, b) in t.iter_mut().zip(&degs[k]) {
                    *a += b;
                }
            }
            (vs, t)
        }
    };
    let l = positive_functional(&vectors).ok_or(ToricError::Unbounded)?;
    Ok(ClosedFormDims { cohomological_degree: sel.len(), dim: count_solutions(&vectors, &l, &target) })
}

/// `numerator / prod_i (1 - t^{deg x_i})` in the fine grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    pub numerator: BTreeMap<Vec<i64>, BigInt>,
    pub denominator: Vec<Vec<i64>>,
}

impl HilbertSeries {
    /// Series coefficient at `mu`.
    pub fn coefficient(&self, ring: &ValidatedRing, mu: &[i64]) -> BigInt {
        let l = ring.positive_functional();
        let mut total = BigInt::zero();
        for (delta, c) in &self.numerator {
            let rest: Vec<i64> = mu.iter().zip(delta).map(|(a, b)| a - b).collect();
            total += c * BigInt::from(count_solutions(&self.denominator, l, &rest));
        }
        total
    }

    fn marker_names(d: usize) -> Vec<String> {
        match d {
            1 => vec!["t".into()],
            2 => vec!["s".into(), "t".into()],
            _ => (1..=d).map(|k| format!("t{k}")).collect(),
        }
    }

    fn monomial(names: &[String], e: &[i64]) -> String {
        let parts: Vec<String> = names
            .iter()
            .zip(e)
            .filter(|(_, &x)| x != 0)
            .map(|(n, &x)| if x == 1 { n.clone() } else { format!("{n}^{x}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for HilbertSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.denominator.first().map_or(1, Vec::len);
        let names = Self::marker_names(d);
        let mut num = String::new();
        for (k, (e, c)) in self.numerator.iter().enumerate() {
            let m = Self::monomial(&names, e);
            let sign = if c.is_negative() {
                " - "
            } else if k > 0 {
                " + "
            } else {
                ""
            };
            let mag = c.abs();
            num.push_str(sign);
            if m == "1" {
                num.push_str(&mag.to_string());
            } else if mag.is_one() {
                num.push_str(&m);
            } else {
                num.push_str(&format!("{mag}*{m}"));
            }
        }
        // factors grouped in order of first appearance
        let mut counts: Vec<(&Vec<i64>, usize)> = Vec::new();
        for g in &self.denominator {
            match counts.iter_mut().find(|(h, _)| *h == g) {
                Some(entry) => entry.1 += 1,
                None => counts.push((g, 1)),
            }
        }
        let den: Vec<String> = counts
            .into_iter()
            .map(|(g, n)| {
                let base = format!("(1 - {})", Self::monomial(&names, g));
                if n == 1 {
                    base
                } else {
                    format!("{base}^{n}")
                }
            })
            .collect();
        write!(f, "({num})/({})", den.join("*"))
    }
}

/// Series with numerator `prod_rel (1 - t^{deg rel})`, checked against piece
/// dims on every cell of `probe`.
pub fn hilbert_series(engine: &AnyEngine, probe: &ProbeBox) -> Result<HilbertSeries, ToricError> {
    let ring = engine.ring();
    if !ring.is_complete_intersection() {
        return Err(ToricError::NotCompleteIntersection);
    }
    let d = ring.rank();
    let mut numerator: BTreeMap<Vec<i64>, BigInt> = BTreeMap::from([(vec![0; d], BigInt::one())]);
    for g in ring.relation_degrees() {
        let mut next = numerator.clone();
        for (e, c) in &numerator {
            let shifted: Vec<i64> = e.iter().zip(g).map(|(a, b)| a + b).collect();
            *next.entry(shifted).or_insert_with(BigInt::zero) -= c;
        }
        next.retain(|_, c| !c.is_zero());
        numerator = next;
    }
    let series = HilbertSeries { numerator, denominator: ring.degrees().to_vec() };
    for mu in probe.cells(ring) {
        let dim = engine.dim(&mu)?;
        let coeff = series.coefficient(ring, &mu);
        if coeff != BigInt::from(dim) {
            return Err(ToricError::SeriesMismatch { mu, series: coeff, linear_algebra: dim });
        }
    }
    Ok(series)
}

/// One-variable series for the coarse grading `t^{l(mu)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoarseSeries {
    /// The functional `l` on fine degrees.
    pub grading: Vec<i64>,
    /// Coefficients of the numerator after cancelling denominator factors.
    #[serde(serialize_with = "bigints_as_strings")]
    pub numerator: Vec<BigInt>,
    /// Exponents `e` of the remaining factors `(1 - t^e)`.
    pub denominator: Vec<i64>,
}

impl CoarseSeries {
    /// Symmetry `H(1/t) = ±t^s H(t)`, i.e. a palindromic numerator up to sign.
    pub fn is_symmetric(&self) -> bool {
        let n = &self.numerator;
        let rev: Vec<BigInt> = n.iter().rev().cloned().collect();
        let neg: Vec<BigInt> = rev.iter().map(|c| -c).collect();
        *n == rev || *n == neg
    }
}

impl fmt::Display for CoarseSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = String::new();
        for (k, c) in self.numerator.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let sign = if c.is_negative() {
                " - "
            } else if num.is_empty() {
                ""
            } else {
                " + "
            };
            num.push_str(sign);
            let mag = c.abs();
            match k {
                0 => num.push_str(&mag.to_string()),
                _ => {
                    if !mag.is_one() {
                        num.push_str(&format!("{mag}*"));
                    }
                    num.push_str(&if k == 1 { "t".to_string() } else { format!("t^{k}") });
                }
            }
        }
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for &e in &self.denominator {
            *counts.entry(e).or_default() += 1;
        }
        let den: Vec<String> = counts
            .into_iter()
            .map(|(e, n)| {
                let base = if e == 1 { "(1 - t)".to_string() } else { format!("(1 - t^{e})") };
                if n == 1 {
                    base
                } else {
                    format!("{base}^{n}")
                }
            })
            .collect();
        write!(f, "({num})/({})", den.join("*"))
    }
}

/// Computes the coarse series numerator from piece dims and cancels common
/// factors with the denominator.
pub fn coarse_hilbert_series(engine: &AnyEngine) -> Result<CoarseSeries, ToricError> {
    let ring = engine.ring();
    let ell = ring.positive_functional();
    let raw: Vec<i64> = ring.degrees().iter().map(|g| dot(ell, g)).collect();
    let g = raw.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let grading: Vec<i64> = ell.iter().map(|x| x / g).collect();
    let c: Vec<i64> = raw.iter().map(|x| x / g).collect();
    let cmax = *c.iter().max().expect("ring has variables");
    let rel_total: i64 = ring.relation_degrees().iter().map(|r| dot(&grading, r)).sum();
    let top = c.iter().sum::<i64>() + rel_total + 2 * cmax + 4;

    let coarse_vecs: Vec<Vec<i64>> = c.iter().map(|&x| vec![x]).collect();
    let mut h = Vec::with_capacity(top as usize + 1);
    for k in 0..=top {
        let mut fine: Vec<Vec<i64>> = enumerate_solutions(&coarse_vecs, &[1], &[k])
            .into_iter()
            .map(|e| crate::poly::Monomial(e).degree(ring.degrees()))
            .collect();
        fine.sort();
        fine.dedup();
        let mut total = 0usize;
        for mu in fine {
            total += engine.dim(&mu)?;
        }
        h.push(BigInt::from(total));
    }
    // numerator = h * prod (1 - t^{c_i}), truncated at `top`
    let mut num = h;
    for &e in &c {
        for k in (e as usize..num.len()).rev() {
            let prev = num[k - e as usize].clone();
            num[k] -= prev;
        }
    }
    let window = (cmax + 2) as usize;
    if num[num.len() - window..].iter().any(|x| !x.is_zero()) {
        return Err(ToricError::SeriesNotDetermined(top));
    }
    while num.last().is_some_and(Zero::is_zero) {
        num.pop();
    }
    let mut denominator = c.clone();
    denominator.sort_unstable();
    let mut k = 0;
    while k < denominator.len() {
        match divide_by_cyclotomic_factor(&num, denominator[k]) {
            Some(q) => {
                num = q;
                denominator.remove(k);
            }
            None => k += 1,
        }
    }
    Ok(CoarseSeries { grading, numerator: num, denominator })
}

fn bigints_as_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

/// `p / (1 - t^e)` when the division is exact.
fn divide_by_cyclotomic_factor(p: &[BigInt], e: i64) -> Option<Vec<BigInt>> {
    let e = e as usize;
    if p.is_empty() {
        return None;
    }
    // q_k = p_k + q_{k-e}; exact iff the tail of q beyond deg p - e vanishes
    let mut q: Vec<BigInt> = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let mut v = p[k].clone();
        if k >= e {
            v += &q[k - e];
        }
        q.push(v);
    }
    if p.len() <= e {
        return None;
    }
    let keep = p.len() - e;
    if q[keep..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    q.truncate(keep);
    Some(q)
}

/// `A = k[Q]` for an affine semigroup `Q ⊂ Z^r` cut out by binomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemigroupEmbedding {
    /// Image of each variable in `Z^r`.
    pub generators: Vec<Vec<i64>>,
    /// `r × d` matrix sending lattice points to fine degrees.
    pub fine_map: Vec<Vec<i64>>,
}

impl SemigroupEmbedding {
    /// Lattice coordinates from the Smith form of the binomial exponent
    /// differences. Requires pure binomials `m1 - m2` and a torsion-free
    /// quotient lattice.
    pub fn from_ring(ring: &ValidatedRing) -> Result<Self, ToricError> {
        let n = ring.nvars();
        let mut rows = Vec::new();
        for (k, g) in ring.relations().iter().enumerate() {
            let terms: Vec<_> = g.terms().collect();
            if terms.len() != 2 || !(terms[0].1 + terms[1].1).is_zero() || !terms[0].1.abs().is_one() {
                return Err(ToricError::NotBinomial(k));
            }
            rows.push((0..n).map(|i| i64::from(terms[0].0 .0[i]) - i64::from(terms[1].0 .0[i])).collect());
        }
        let s = smith_form(&rows, n);
        if !s.torsion_free() {
            return Err(ToricError::Torsion);
        }
        let rho = s.rank;
        let generators: Vec<Vec<i64>> = (0..n).map(|i| (rho..n).map(|j| s.q[i][j] as i64).collect()).collect();
        let d = ring.rank();
        let fine_map: Vec<Vec<i64>> = (rho..n)
            .map(|k| {
                (0..d)
                    .map(|c| (0..n).map(|t| s.q_inv[k][t] * i128::from(ring.degrees()[t][c])).sum::<i128>() as i64)
                    .collect()
            })
            .collect();
        let emb = Self { generators, fine_map };
        debug_assert!((0..n).all(|i| emb.fine_degree(&emb.generators[i]) == ring.degrees()[i]));
        Ok(emb)
    }

    pub fn rank(&self) -> usize {
        self.fine_map.len()
    }

    pub fn fine_degree(&self, q: &[i64]) -> Vec<i64> {
        let d = self.fine_map.first().map_or(0, Vec::len);
        (0..d).map(|c| q.iter().zip(&self.fine_map).map(|(x, row)| x * row[c]).sum()).collect()
    }

    pub fn image(&self, exponents: &[u32]) -> Vec<i64> {
        let r = self.rank();
        let mut q = vec![0i64; r];
        for (e, g) in exponents.iter().zip(&self.generators) {
            for (a, b) in q.iter_mut().zip(g) {
                *a += i64::from(*e) * b;
            }
        }
        q
    }

    /// Semigroup points of fine degree `mu`.
    pub fn points(&self, ring: &ValidatedRing, mu: &[i64]) -> HashSet<Vec<i64>> {
        enumerate_solutions(ring.degrees(), ring.positive_functional(), mu).iter().map(|e| self.image(e)).collect()
    }

    /// Checks `#Q_mu = dim A_mu` on the cells of `probe`.
    pub fn verify_presentation(&self, engine: &AnyEngine, probe: &ProbeBox) -> Result<(), ToricError> {
        let ring = engine.ring();
        for mu in probe.cells(ring) {
            let semigroup = self.points(ring, &mu).len();
            let dim = engine.dim(&mu)?;
            if semigroup != dim {
                return Err(ToricError::NotSemigroupPresentation { mu, semigroup, dim });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NormalityVerdict {
    Normal { r#box: u32 },
    NotNormal { witness: Vec<i64> },
    Inconclusive { reason: String },
}

/// Compares the semigroup generated by `generators` with the lattice points of
/// its cone, for points of functional value at most `bound`.
///
/// The lattice is the group generated by `generators`. A cone point `p` has
/// `k p` in the semigroup for some `k` at most the largest maximal minor, so
/// candidates are `q / k` for semigroup points `q`.
pub fn normality_check(generators: &[Vec<i64>], bound: u32) -> NormalityVerdict {
    let Some(first) = generators.first() else {
        return NormalityVerdict::Normal { r#box: bound };
    };
    let dim = first.len();
    // coordinates in which the generated group is Z^rank
    let s = smith_form(generators, dim);
    let rank = s.rank;
    let to_group = |g: &[i64]| -> Vec<i64> {
        (0..rank)
            .map(|c| {
                let v: i128 = g.iter().enumerate().map(|(t, &x)| i128::from(x) * s.q[t][c]).sum();
                (v / s.diagonal[c]) as i64
            })
            .collect()
    };
    let from_group = |p: &[i64]| -> Vec<i64> {
        (0..dim)
            .map(|c| (0..rank).map(|t| i128::from(p[t]) * s.diagonal[t] * s.q_inv[t][c]).sum::<i128>() as i64)
            .collect()
    };
    let gens: Vec<Vec<i64>> = generators.iter().map(|g| to_group(g)).filter(|g| g.iter().any(|&x| x != 0)).collect();
    if gens.is_empty() {
        return NormalityVerdict::Normal { r#box: bound };
    }
    let Some(mut ell) = positive_functional(&gens) else {
        return NormalityVerdict::Inconclusive { reason: "generators do not span a pointed cone".into() };
    };
    let content = ell.iter().fold(0i64, |acc, x| acc.gcd(x));
    ell.iter_mut().for_each(|x| *x /= content);
    let heights: Vec<i64> = gens.iter().map(|g| dot(&ell, g)).collect();
    let max_height = *heights.iter().max().expect("nonempty");
    if i64::from(bound) <= max_height {
        return NormalityVerdict::Inconclusive {
            reason: format!("box {bound} does not exceed the largest generator height {max_height}"),
        };
    }
    let kmax = max_minor(&gens, rank).max(1);
    let budget = i64::from(bound) * kmax;
    let points = semigroup_points(&gens, &heights, budget);
    let mut witness: Option<(i64, Vec<i64>)> = None;
    for q in &points {
        let hq = dot(&ell, q);
        for k in 2..=kmax {
            if hq % k != 0 || hq / k > i64::from(bound) || q.iter().any(|x| x % k != 0) {
                continue;
            }
            let p: Vec<i64> = q.iter().map(|x| x / k).collect();
            if !points.contains(&p) {
                let cand = (hq / k, p);
                if witness.as_ref().is_none_or(|w| cand < *w) {
                    witness = Some(cand);
                }
            }
        }
    }
    match witness {
        Some((_, p)) => NormalityVerdict::NotNormal { witness: from_group(&p) },
        None => NormalityVerdict::Normal { r#box: bound },
    }
}

fn semigroup_points(gens: &[Vec<i64>], heights: &[i64], budget: i64) -> HashSet<Vec<i64>> {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let origin = vec![0i64; gens[0].len()];
    let mut frontier = vec![origin.clone()];
    seen.insert(origin);
    let ell_of: HashMap<usize, i64> = heights.iter().copied().enumerate().collect();
    let mut height_of: HashMap<Vec<i64>, i64> = HashMap::new();
    height_of.insert(vec![0; gens[0].len()], 0);
    while let Some(p) = frontier.pop() {
        let hp = height_of[&p];
        for (k, g) in gens.iter().enumerate() {
            let h = hp + ell_of[&k];
            if h > budget {
                continue;
            }
            let q: Vec<i64> = p.iter().zip(g).map(|(a, b)| a + b).collect();
            if seen.insert(q.clone()) {
                height_of.insert(q.clone(), h);
                frontier.push(q);
            }
        }
    }
    seen
}

/// Largest absolute maximal minor of the `rank`-column matrix `gens`.
fn max_minor(gens: &[Vec<i64>], rank: usize) -> i64 {
    fn det(m: Vec<Vec<i128>>) -> i128 {
        let n = m.len();
        let mut a = m;
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    // Bareiss fraction-free step
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }
    fn rec(gens: &[Vec<i64>], rank: usize, start: usize, chosen: &mut Vec<usize>, best: &mut i64) {
        if chosen.len() == rank {
            let m = chosen.iter().map(|&i| gens[i].iter().map(|&x| i128::from(x)).collect()).collect();
            *best = (*best).max(det(m).unsigned_abs() as i64);
            return;
        }
        for i in start..gens.len() {
            chosen.push(i);
            rec(gens, rank, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = 0;
    rec(gens, rank, 0, &mut Vec::new(), &mut best);
    best
}

/// Local cohomology of a semigroup ring, by enumerating lattice points.
///
/// In lattice degree `q` every Čech term is `k` or `0` (`q` lies in the
/// localization at `f_S` iff `q + K g_S ∈ Q` for some `K`), so each degree
/// contributes the cohomology of a small sign matrix complex.
pub fn semigroup_local_cohomology(
    emb: &SemigroupEmbedding,
    ring: &ValidatedRing,
    side: Side,
    mu: &[i64],
    kmax: u32,
) -> Vec<usize> {
    let gens_idx = ring.variables_with_sign(side == Side::Plus);
    let r = gens_idx.len();
    let mut cache: HashMap<Vec<i64>, HashSet<Vec<i64>>> = HashMap::new();
    let mut in_q = |q: &[i64]| -> bool {
        let deg = emb.fine_degree(q);
        cache.entry(deg.clone()).or_insert_with(|| emb.points(ring, &deg)).contains(q)
    };
    if r == 0 {
        return vec![emb.points(ring, mu).len()];
    }
    let g: Vec<&Vec<i64>> = gens_idx.iter().map(|&i| &emb.generators[i]).collect();
    let sum_of = |s: &[usize]| -> Vec<i64> {
        let mut v = vec![0i64; emb.rank()];
        for &i in s {
            for (a, b) in v.iter_mut().zip(g[i]) {
                *a += b;
            }
        }
        v
    };
    let all: Vec<usize> = (0..r).collect();
    let g_all = sum_of(&all);
    let k = i64::from(kmax);
    let shifted_mu: Vec<i64> = emb.fine_degree(&g_all).iter().zip(mu).map(|(a, m)| m + k * a).collect();
    let mut candidates: Vec<Vec<i64>> = emb
        .points(ring, &shifted_mu)
        .into_iter()
        .map(|p| p.iter().zip(&g_all).map(|(a, b)| a - k * b).collect())
        .collect();
    candidates.sort();

    let mut subsets: Vec<Vec<usize>> =
        (1u32..(1 << r)).map(|m| (0..r).filter(|i| m & (1 << i) != 0).collect()).collect();
    subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));

    let field = Rationals;
    let mut totals = vec![0usize; r + 1];
    for q in candidates {
        // membership of q in each localization
        let mut present: HashMap<Vec<usize>, bool> = HashMap::new();
        for s in &subsets {
            let gs = sum_of(s);
            let member = (0..=k).any(|kk| {
                let p: Vec<i64> = q.iter().zip(&gs).map(|(a, b)| a + kk * b).collect();
                in_q(&p)
            });
            present.insert(s.clone(), member);
        }
        let base = in_q(&q);
        // augmented complex: degree 0 is A, degree p+1 is subsets of size p+1
        let mut terms: Vec<Vec<Vec<usize>>> = vec![Vec::new(); r + 1];
        if base {
            terms[0].push(Vec::new());
        }
        for s in &subsets {
            if present[s] {
                terms[s.len()].push(s.clone());
            }
        }
        let mut ranks = vec![0usize; r + 1];
        for p in 0..r {
            let rows: HashMap<&Vec<usize>, usize> = terms[p + 1].iter().enumerate().map(|(i, s)| (s, i)).collect();
            let cols = terms[p]
                .iter()
                .map(|s| {
                    let mut col = Vec::new();
                    for i in (0..r).filter(|i| !s.contains(i)) {
                        let mut t = s.clone();
                        t.push(i);
                        t.sort_unstable();
                        if let Some(&row) = rows.get(&t) {
                            let pos = t.iter().position(|&x| x == i).expect("inserted");
                            let sign = if p == 0 || pos % 2 == 1 { 1 } else { -1 };
                            col.push((row, field.from_i64(sign)));
                        }
                    }
                    col.sort_by_key(|e| e.0);
                    col
                })
                .collect();
            ranks[p] = rank(&field, &SparseMatrix::from_columns(terms[p + 1].len(), cols));
        }
        for p in 0..=r {
            let incoming = if p > 0 { ranks[p - 1] } else { 0 };
            totals[p] += terms[p].len() - ranks[p] - incoming;
        }
    }
    totals
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gorenstein {
    Gorenstein,
    NotGorenstein,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GorensteinRoute {
    CompleteIntersection,
    NormalSemigroupSeriesSymmetry,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GorensteinVerdict {
    pub verdict: Gorenstein,
    pub route: GorensteinRoute,
    pub detail: String,
    pub coarse_series: Option<String>,
    pub normality: Option<NormalityVerdict>,
}

impl GorensteinVerdict {
    fn unknown(detail: impl Into<String>) -> Self {
        Self {
            verdict: Gorenstein::Unknown,
            route: GorensteinRoute::None,
            detail: detail.into(),
            coarse_series: None,
            normality: None,
        }
    }
}

/// Complete intersections are Gorenstein. A normal semigroup ring is
/// Cohen-Macaulay, and then Gorenstein iff its Hilbert series is symmetric.
pub fn gorenstein_check(engine: &AnyEngine, probe: &ProbeBox) -> GorensteinVerdict {
    let ring = engine.ring();
    if ring.is_complete_intersection() {
        if ring.relations().len() > 1 {
            if let Err(e) = hilbert_series(engine, probe) {
                return GorensteinVerdict::unknown(format!("complete-intersection assertion refuted: {e}"));
            }
        }
        return GorensteinVerdict {
            verdict: Gorenstein::Gorenstein,
            route: GorensteinRoute::CompleteIntersection,
            detail: format!("{} relations in {} variables", ring.relations().len(), ring.nvars()),
            coarse_series: None,
            normality: None,
        };
    }
    let emb = match SemigroupEmbedding::from_ring(ring) {
        Ok(e) => e,
        Err(e) => return GorensteinVerdict::unknown(format!("no semigroup route: {e}")),
    };
    if let Err(e) = emb.verify_presentation(engine, probe) {
        return GorensteinVerdict::unknown(format!("no semigroup route: {e}"));
    }
    let normality = normality_check(&emb.generators, probe.fine_bound);
    if !matches!(normality, NormalityVerdict::Normal { .. }) {
        return GorensteinVerdict {
            normality: Some(normality),
            ..GorensteinVerdict::unknown("semigroup not certified normal")
        };
    }
    let series = match coarse_hilbert_series(engine) {
        Ok(s) => s,
        Err(e) => return GorensteinVerdict { normality: Some(normality), ..GorensteinVerdict::unknown(e.to_string()) },
    };
    let symmetric = series.is_symmetric();
    GorensteinVerdict {
        verdict: if symmetric { Gorenstein::Gorenstein } else { Gorenstein::NotGorenstein },
        route: GorensteinRoute::NormalSemigroupSeriesSymmetry,
        detail: if symmetric {
            "normal semigroup ring with symmetric Hilbert series numerator".into()
        } else {
            "normal semigroup ring whose Hilbert series numerator is not palindromic".into()
        },
        coarse_series: Some(series.to_string()),
        normality: Some(normality),
    }
}

/// Truncation depth used by the lattice oracle in degree `mu`.
pub fn oracle_kmax(mu: &[i64]) -> u32 {
    l1_norm(mu) as u32 + 4
}
