//! Čech complexes of `A` with respect to homogeneous generators, one fine
//! degree at a time, and local cohomology through the triangle
//! `RΓ_I(A) -> A -> Č_I(A)`.
//!
//! The localization `A_{f_S}` in degree `mu` is the colimit over `K` of
//! `f_S^{-K} A_{mu + K deg f_S}` with transition maps "multiply by `f_S`".
//! At level `K` the complex is
//!
//! ```text
//! C^p = ⊕_{|S| = p+1} A_{mu + K deg f_S},   S -> S ∪ {i}: -(-1)^pos · f_i^K
//! ```
//!
//! where `pos` is the position of `i` in `S ∪ {i}`. The augmentation
//! `eta: A_mu -> C^0` is `a -> (f_i^K a)_i`. Cohomology is read off at the
//! first level `K` where it agrees with level `K+1` and the induced map is
//! injective.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{with_engine, AnyEngine, Engine, PieceError};
use crate::field::Field;
use crate::lattice::l1_norm;
use crate::linalg::{apply, collect_sparse, kernel, rank, Echelon, SparseMatrix, SparseVec};
use crate::poly::Polynomial;
use crate::ring::{irrelevant_ideals, ValidatedRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error("the {0} side has no generators")]
    EmptySide(Side),
    #[error("generator {index} is zero or not homogeneous")]
    BadGenerator { index: usize },
    #[error("truncation did not stabilize at {mu:?} by K = {kmax}; cohomology dims per level: {trajectory:?}")]
    NotStabilized { mu: Vec<i64>, kmax: u32, trajectory: Vec<(u32, Vec<usize>)> },
    #[error(transparent)]
    Piece(#[from] PieceError),
}

/// Generators `f_1..f_r` of the ideal on one side.
#[derive(Clone, Debug)]
pub struct CechComplexSpec {
    pub side: Side,
    pub generators: Vec<Polynomial>,
    pub degrees: Vec<Vec<i64>>,
}

impl CechComplexSpec {
    /// The variables of positive (plus) or negative (minus) weight.
    pub fn irrelevant(ring: &ValidatedRing, side: Side) -> Self {
        let (plus, minus) = irrelevant_ideals(ring);
        let gens = if side == Side::Plus { plus } else { minus };
        let degrees = gens.iter().map(|m| m.degree(ring.degrees())).collect();
        let generators = gens.into_iter().map(|m| Polynomial::monomial(m, 1)).collect();
        Self { side, generators, degrees }
    }

    /// Any list of nonzero homogeneous elements.
    pub fn with_generators(ring: &ValidatedRing, side: Side, generators: Vec<Polynomial>) -> Result<Self, CechError> {
        let mut degrees = Vec::with_capacity(generators.len());
        for (index, g) in generators.iter().enumerate() {
            let mut degs = g.terms().map(|(m, _)| m.degree(ring.degrees()));
            let first = degs.next().ok_or(CechError::BadGenerator { index })?;
            if degs.any(|d| d != first) {
                return Err(CechError::BadGenerator { index });
            }
            degrees.push(first);
        }
        Ok(Self { side, generators, degrees })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Truncation levels tried: `start` (or `max(4, |mu|_1 + 1)`) up to `kmax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub kmax: u32,
    pub start: Option<u32>,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { kmax: 32, start: None }
    }
}

impl Truncation {
    pub fn with_kmax(kmax: u32) -> Self {
        Self { kmax, start: None }
    }

    // Equal dims at small K can be vacuous (both zero) when the classes in
    // degree mu need denominators beyond K, so the start grows with |mu|.
    fn first_level(&self, mu: &[i64]) -> u32 {
        let auto = (l1_norm(mu) as u32 + 1).max(4);
        self.start.unwrap_or(auto).min(self.kmax.saturating_sub(1)).max(1)
    }
}

/// The degree-`mu` piece of one localization `A_{f_S}` at level `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalizedPiece {
    pub subset: Vec<usize>,
    pub fine_degree: Vec<i64>,
    pub level: u32,
    /// `dim A_{mu + K deg f_S}`.
    pub dim: usize,
    pub next_dim: usize,
    /// Equal dims at `K` and `K+1`, and multiplication by `f_S` injective.
    pub stabilized: bool,
}

/// The level-`K` complex in one fine degree.
#[derive(Debug)]
pub struct CechPiece<E> {
    pub side: Side,
    pub fine_degree: Vec<i64>,
    pub level: u32,
    pub terms: Vec<LocalizedPiece>,
    /// `d^p: C^p -> C^{p+1}` for `p = 0..r-1`.
    pub differentials: Vec<SparseMatrix<E>>,
    /// `eta: A_mu -> C^0`.
    pub eta: SparseMatrix<E>,
    pub d_squared_zero: bool,
    pub cohomology: Vec<usize>,
}

/// Field-free summary of a [`CechPiece`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CechPieceSummary {
    pub side: Side,
    pub fine_degree: Vec<i64>,
    pub level: u32,
    pub terms: Vec<LocalizedPiece>,
    pub differential_ranks: Vec<usize>,
    pub d_squared_zero: bool,
    pub cohomology: Vec<usize>,
}

/// Dimension data of `A_mu -> Č^0` in one fine degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleMaps {
    pub eta_rank: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    /// Kernel of `eta` as elements of `A_mu`.
    pub kernel_basis: Vec<String>,
}

/// Čech and local cohomology dims in one fine degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCohomology {
    pub fine_degree: Vec<i64>,
    pub ring_dim: usize,
    /// `H^j(Č)` for `j = 0..r-1`; empty when the side is empty.
    pub cech: Vec<usize>,
    /// `H^j(RΓ)` for `j = 0..=r`.
    pub local: Vec<usize>,
    pub level: u32,
    pub triangle: TriangleMaps,
}

impl LocalCohomology {
    pub fn local_at(&self, j: usize) -> usize {
        self.local.get(j).copied().unwrap_or(0)
    }

    pub fn cech_at(&self, j: usize) -> usize {
        self.cech.get(j).copied().unwrap_or(0)
    }

    pub fn local_is_zero(&self) -> bool {
        self.local.iter().all(|&d| d == 0)
    }

    pub fn euler_local(&self) -> i64 {
        alternating_sum(&self.local)
    }

    pub fn euler_cech(&self) -> i64 {
        alternating_sum(&self.cech)
    }
}

fn alternating_sum(v: &[usize]) -> i64 {
    v.iter().enumerate().map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// Nonempty subsets of `0..r` grouped by size, each group in lex order.
fn subsets_by_degree(r: usize) -> Vec<Vec<Vec<usize>>> {
    let mut by = vec![Vec::new(); r];
    for mask in 1u32..(1 << r) {
        let s: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        by[s.len() - 1].push(s);
    }
    for group in &mut by {
        group.sort();
    }
    by
}

struct Level<E> {
    k: u32,
    /// Per degree `p`: block offsets of the subsets, then the total dim.
    offsets: Vec<Vec<usize>>,
    dims: Vec<usize>,
    term_dims: Vec<Vec<usize>>,
    d: Vec<SparseMatrix<E>>,
    eta: SparseMatrix<E>,
}

struct Builder<'a, F: Field> {
    engine: &'a Engine<F>,
    spec: &'a CechComplexSpec,
    mu: Vec<i64>,
    subsets: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    powers: HashMap<(usize, u32), Polynomial>,
}

impl<'a, F: Field> Builder<'a, F> {
    fn new(engine: &'a Engine<F>, spec: &'a CechComplexSpec, mu: &[i64]) -> Self {
        let subsets = subsets_by_degree(spec.len());
        let index = subsets.iter().map(|g| g.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        Self { engine, spec, mu: mu.to_vec(), subsets, index, powers: HashMap::new() }
    }

    fn r(&self) -> usize {
        self.spec.len()
    }

    fn deg_of(&self, s: &[usize]) -> Vec<i64> {
        let mut d = vec![0; self.mu.len()];
        for &i in s {
            for (a, b) in d.iter_mut().zip(&self.spec.degrees[i]) {
                *a += b;
            }
        }
        d
    }

    fn shifted(&self, s: &[usize], k: u32) -> Vec<i64> {
        let d = self.deg_of(s);
        self.mu.iter().zip(&d).map(|(m, x)| m + i64::from(k) * x).collect()
    }

    fn power(&mut self, i: usize, k: u32) -> Polynomial {
        self.powers.entry((i, k)).or_insert_with(|| self.spec.generators[i].pow(k)).clone()
    }

    fn product(&self, s: &[usize]) -> Polynomial {
        let n = self.engine.ring().nvars();
        s.iter()
            .fold(Polynomial::monomial(crate::poly::Monomial::one(n), 1), |acc, &i| acc.mul(&self.spec.generators[i]))
    }

    fn level(&mut self, k: u32) -> Result<Level<F::Elem>, CechError> {
        let f = self.engine.field().clone();
        let r = self.r();
        let mut offsets = Vec::with_capacity(r);
        let mut dims = Vec::with_capacity(r);
        let mut term_dims = Vec::with_capacity(r);
        for group in &self.subsets {
            let mut off = Vec::with_capacity(group.len());
            let mut tds = Vec::with_capacity(group.len());
            let mut total = 0;
            for s in group {
                off.push(total);
                let td = self.engine.dim(&self.shifted(s, k))?;
                tds.push(td);
                total += td;
            }
            offsets.push(off);
            dims.push(total);
            term_dims.push(tds);
        }

        let mut d = Vec::with_capacity(r);
        for p in 0..r {
            let ncols = dims[p];
            let nrows = if p + 1 < r { dims[p + 1] } else { 0 };
            let mut cols: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); ncols];
            if p + 1 < r {
                for (si, s) in self.subsets[p].clone().iter().enumerate() {
                    let src = self.shifted(s, k);
                    for i in (0..r).filter(|i| !s.contains(i)) {
                        let mut t = s.clone();
                        t.push(i);
                        t.sort_unstable();
                        let pos = t.iter().position(|&x| x == i).unwrap();
                        let ti = self.index[p + 1][&t];
                        let g = self.power(i, k);
                        let dg: Vec<i64> = self.spec.degrees[i].iter().map(|x| i64::from(k) * x).collect();
                        let m = self.engine.multiplication(&g, &dg, &src)?;
                        // -(-1)^pos
                        let negate = pos % 2 == 0;
                        let (c0, r0) = (offsets[p][si], offsets[p + 1][ti]);
                        for (j, col) in m.cols.into_iter().enumerate() {
                            for (row, v) in col {
                                let v = if negate { f.neg(&v) } else { v };
                                cols[c0 + j].push((r0 + row, v));
                            }
                        }
                    }
                }
            }
            let cols = cols.into_iter().map(|c| collect_sparse(&f, c)).collect();
            d.push(SparseMatrix::from_columns(nrows, cols));
        }

        let a_dim = self.engine.dim(&self.mu)?;
        let mut cols: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); a_dim];
        for i in 0..r {
            let g = self.power(i, k);
            let dg: Vec<i64> = self.spec.degrees[i].iter().map(|x| i64::from(k) * x).collect();
            let m = self.engine.multiplication(&g, &dg, &self.mu)?;
            let r0 = offsets[0][self.index[0][&vec![i]]];
            for (j, col) in m.cols.into_iter().enumerate() {
                cols[j].extend(col.into_iter().map(|(row, v)| (row + r0, v)));
            }
        }
        let eta = SparseMatrix::from_columns(dims[0], cols.into_iter().map(|c| collect_sparse(&f, c)).collect());
        Ok(Level { k, offsets, dims, term_dims, d, eta })
    }

    /// Block-diagonal transition `C^p(K) -> C^p(K+1)`, multiplication by `f_S`.
    fn transition(
        &mut self,
        p: usize,
        from: &Level<F::Elem>,
        to: &Level<F::Elem>,
    ) -> Result<SparseMatrix<F::Elem>, CechError> {
        let mut cols = Vec::with_capacity(from.dims[p]);
        for (si, s) in self.subsets[p].clone().iter().enumerate() {
            let g = self.product(s);
            let m = self.engine.multiplication(&g, &self.deg_of(s), &self.shifted(s, from.k))?;
            let r0 = to.offsets[p][si];
            cols.extend(
                m.cols.into_iter().map(|c| c.into_iter().map(|(row, v)| (row + r0, v)).collect::<SparseVec<_>>()),
            );
        }
        Ok(SparseMatrix::from_columns(to.dims[p], cols))
    }
}

struct LevelCohomology {
    dims: Vec<usize>,
    eta_rank: usize,
}

fn level_cohomology<F: Field>(field: &F, level: &Level<F::Elem>) -> LevelCohomology {
    let ranks: Vec<usize> = level.d.iter().map(|m| rank(field, m)).collect();
    let dims = (0..level.dims.len()).map(|p| level.dims[p] - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 }).collect();
    LevelCohomology { dims, eta_rank: rank(field, &level.eta) }
}

fn d_squared_zero<F: Field>(field: &F, level: &Level<F::Elem>) -> bool {
    let composed_zero =
        |a: &SparseMatrix<F::Elem>, b: &SparseMatrix<F::Elem>| a.cols.iter().all(|c| apply(field, b, c).is_empty());
    let mut ok = level.d.is_empty() || composed_zero(&level.eta, &level.d[0]);
    for p in 0..level.d.len().saturating_sub(1) {
        ok &= composed_zero(&level.d[p], &level.d[p + 1]);
    }
    ok
}

impl<F: Field> Engine<F> {
    /// The truncated complex at level `k`, with per-term stabilization flags.
    pub fn cech_piece(&self, spec: &CechComplexSpec, mu: &[i64], k: u32) -> Result<CechPiece<F::Elem>, CechError> {
        if spec.is_empty() {
            return Err(CechError::EmptySide(spec.side));
        }
        let mut b = Builder::new(self, spec, mu);
        let level = b.level(k)?;
        let mut terms = Vec::new();
        for (p, group) in b.subsets.clone().iter().enumerate() {
            for (si, s) in group.iter().enumerate() {
                let dim = level.term_dims[p][si];
                let next_dim = self.dim(&b.shifted(s, k + 1))?;
                let g = b.product(s);
                let m = self.multiplication(&g, &b.deg_of(s), &b.shifted(s, k))?;
                let injective = rank(self.field(), &m) == dim;
                terms.push(LocalizedPiece {
                    subset: s.clone(),
                    fine_degree: mu.to_vec(),
                    level: k,
                    dim,
                    next_dim,
                    stabilized: dim == next_dim && injective,
                });
            }
        }
        let coh = level_cohomology(self.field(), &level);
        let d_squared_zero = d_squared_zero(self.field(), &level);
        Ok(CechPiece {
            side: spec.side,
            fine_degree: mu.to_vec(),
            level: k,
            terms,
            differentials: level.d,
            eta: level.eta,
            d_squared_zero,
            cohomology: coh.dims,
        })
    }

    /// Čech and local cohomology in degree `mu`, raising `K` until the
    /// truncated cohomology is stable.
    pub fn local_cohomology(
        &self,
        spec: &CechComplexSpec,
        mu: &[i64],
        trunc: Truncation,
    ) -> Result<LocalCohomology, CechError> {
        let ring_dim = self.dim(mu)?;
        if spec.is_empty() {
            return Ok(LocalCohomology {
                fine_degree: mu.to_vec(),
                ring_dim,
                cech: Vec::new(),
                local: vec![ring_dim],
                level: 0,
                triangle: TriangleMaps { eta_rank: 0, kernel_dim: ring_dim, cokernel_dim: 0, kernel_basis: Vec::new() },
            });
        }
        let field = self.field().clone();
        let mut b = Builder::new(self, spec, mu);
        let mut k = trunc.first_level(mu);
        let mut cur = b.level(k)?;
        let mut cur_coh = level_cohomology(&field, &cur);
        let mut trajectory = vec![(k, cur_coh.dims.clone())];
        loop {
            if k + 1 > trunc.kmax {
                return Err(CechError::NotStabilized { mu: mu.to_vec(), kmax: trunc.kmax, trajectory });
            }
            let next = b.level(k + 1)?;
            let next_coh = level_cohomology(&field, &next);
            trajectory.push((k + 1, next_coh.dims.clone()));
            if cur_coh.dims == next_coh.dims
                && cur_coh.eta_rank == next_coh.eta_rank
                && self.induced_injective(&mut b, &cur, &cur_coh, &next)?
            {
                debug_assert!(d_squared_zero(&field, &cur));
                return Ok(self.assemble(mu, ring_dim, &cur, &cur_coh));
            }
            k += 1;
            cur = next;
            cur_coh = next_coh;
        }
    }

    /// Whether `H^p(K) -> H^p(K+1)` is injective for every `p`.
    fn induced_injective(
        &self,
        b: &mut Builder<'_, F>,
        cur: &Level<F::Elem>,
        cur_coh: &LevelCohomology,
        next: &Level<F::Elem>,
    ) -> Result<bool, CechError> {
        let field = self.field();
        for p in 0..cur.dims.len() {
            if cur_coh.dims[p] == 0 {
                continue;
            }
            let phi = b.transition(p, cur, next)?;
            let mut ech = Echelon::new(field.clone());
            if p > 0 {
                for c in &next.d[p - 1].cols {
                    ech.insert(c.clone());
                }
            }
            let boundary_rank = ech.rank();
            for z in kernel(field, &cur.d[p]) {
                ech.insert(apply(field, &phi, &z));
            }
            if ech.rank() - boundary_rank != cur_coh.dims[p] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn assemble(&self, mu: &[i64], ring_dim: usize, level: &Level<F::Elem>, coh: &LevelCohomology) -> LocalCohomology {
        let field = self.field();
        let mut local = Vec::with_capacity(coh.dims.len() + 1);
        local.push(ring_dim - coh.eta_rank);
        local.push(coh.dims[0] - coh.eta_rank);
        local.extend_from_slice(&coh.dims[1..]);
        let names = self.ring().names();
        let basis: Vec<_> = self.piece(mu).map(|p| p.basis_monomials().cloned().collect()).unwrap_or_default();
        let kernel_basis = kernel(field, &level.eta)
            .into_iter()
            .map(|v| {
                let terms: Vec<String> = v
                    .iter()
                    .map(|(i, c)| {
                        let m: &crate::poly::Monomial = &basis[*i];
                        if *c == field.one() {
                            m.display(names).to_string()
                        } else {
                            format!("({})*{}", field.format(c), m.display(names))
                        }
                    })
                    .collect();
                terms.join(" + ")
            })
            .collect();
        LocalCohomology {
            fine_degree: mu.to_vec(),
            ring_dim,
            cech: coh.dims.clone(),
            local,
            level: level.k,
            triangle: TriangleMaps {
                eta_rank: coh.eta_rank,
                kernel_dim: ring_dim - coh.eta_rank,
                cokernel_dim: coh.dims[0] - coh.eta_rank,
                kernel_basis,
            },
        }
    }
}

impl AnyEngine {
    pub fn local_cohomology(
        &self,
        spec: &CechComplexSpec,
        mu: &[i64],
        trunc: Truncation,
    ) -> Result<LocalCohomology, CechError> {
        with_engine!(self, e => e.local_cohomology(spec, mu, trunc))
    }

    /// `H^j(Č)` dims, `j = 0..r-1`.
    pub fn cech_cohomology(
        &self,
        spec: &CechComplexSpec,
        mu: &[i64],
        trunc: Truncation,
    ) -> Result<Vec<usize>, CechError> {
        if spec.is_empty() {
            return Err(CechError::EmptySide(spec.side));
        }
        Ok(self.local_cohomology(spec, mu, trunc)?.cech)
    }

    pub fn cech_piece(&self, spec: &CechComplexSpec, mu: &[i64], k: u32) -> Result<CechPieceSummary, CechError> {
        with_engine!(self, e => {
            let piece = e.cech_piece(spec, mu, k)?;
            Ok(CechPieceSummary {
                side: piece.side,
                fine_degree: piece.fine_degree,
                level: piece.level,
                terms: piece.terms,
                differential_ranks: piece.differentials.iter().map(|m| rank(e.field(), m)).collect(),
                d_squared_zero: piece.d_squared_zero,
                cohomology: piece.cohomology,
            })
        })
    }
}
