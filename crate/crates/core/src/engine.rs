//! Fine-degree pieces `A_mu` as explicit finite-dimensional spaces.
//!
//! A piece is the span of the monomials of degree `mu`, ordered
//! lexicographically descending, modulo the relation span in that degree. The
//! relation span is kept in echelon form with leftmost pivots, so pivots are
//! the largest monomials and the quotient basis is the set of non-pivot
//! ("standard") monomials.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::Serialize;
use thiserror::Error;

use crate::field::{Field, PrimeField, Rationals};
use crate::lattice::{count_solutions, enumerate_solutions};
use crate::linalg::{collect_sparse, Echelon, SparseMatrix, SparseVec};
use crate::poly::{Monomial, Polynomial};
use crate::ring::{FieldSpec, ValidatedRing};

pub const DEFAULT_MONOMIAL_LIMIT: u128 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PieceError {
    #[error("fine degree {mu:?} has {count} monomials, above the limit {limit}")]
    DegreeBoxOverflow { mu: Vec<i64>, count: u128, limit: u128 },
}

/// Public description of a piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceBasis {
    pub fine_degree: Vec<i64>,
    pub ambient_monomials: Vec<Monomial>,
    pub relation_span_rank: usize,
    pub quotient_basis: Vec<Monomial>,
}

impl PieceBasis {
    pub fn dim(&self) -> usize {
        self.quotient_basis.len()
    }
}

#[derive(Debug)]
pub struct Piece<F: Field> {
    pub fine_degree: Vec<i64>,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    relations: Echelon<F>,
    /// Ambient indices of the standard monomials, increasing.
    basis: Vec<usize>,
    coord_of: HashMap<usize, usize>,
}

impl<F: Field> Piece<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn relation_rank(&self) -> usize {
        self.relations.rank()
    }

    pub fn basis_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.basis.iter().map(|&i| &self.monomials[i])
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates, in the quotient basis, of an ambient vector.
    pub fn coordinates(&self, v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        // Normal forms only have entries on standard monomials, and the
        // coordinate map is increasing, so the result stays sorted.
        self.relations.reduce(v).into_iter().map(|(i, c)| (self.coord_of[&i], c)).collect()
    }

    fn to_basis(&self) -> PieceBasis {
        PieceBasis {
            fine_degree: self.fine_degree.clone(),
            ambient_monomials: self.monomials.clone(),
            relation_span_rank: self.relations.rank(),
            quotient_basis: self.basis_monomials().cloned().collect(),
        }
    }
}

/// Piece construction and caching for one validated ring over one field.
pub struct Engine<F: Field> {
    ring: Arc<ValidatedRing>,
    field: F,
    monomial_limit: u128,
    pieces: RwLock<HashMap<Vec<i64>, Arc<Piece<F>>>>,
}

impl<F: Field> Engine<F> {
    pub fn new(ring: Arc<ValidatedRing>, field: F) -> Self {
        Self { ring, field, monomial_limit: DEFAULT_MONOMIAL_LIMIT, pieces: RwLock::new(HashMap::new()) }
    }

    pub fn with_monomial_limit(mut self, limit: u128) -> Self {
        self.monomial_limit = limit;
        self
    }

    pub fn ring(&self) -> &Arc<ValidatedRing> {
        &self.ring
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn elem(&self, c: &num_bigint::BigInt) -> F::Elem {
        self.field.from_bigint(c)
    }

    /// Exponent vectors of all monomials of fine degree `mu`, descending.
    pub fn monomials(&self, mu: &[i64]) -> Result<Vec<Monomial>, PieceError> {
        let ring = &self.ring;
        let l = ring.positive_functional();
        let count = count_solutions(ring.degrees(), l, mu);
        if count > self.monomial_limit {
            return Err(PieceError::DegreeBoxOverflow { mu: mu.to_vec(), count, limit: self.monomial_limit });
        }
        let mut ms: Vec<Monomial> = enumerate_solutions(ring.degrees(), l, mu).into_iter().map(Monomial).collect();
        ms.sort_by(|a, b| b.cmp(a));
        Ok(ms)
    }

    pub fn piece(&self, mu: &[i64]) -> Result<Arc<Piece<F>>, PieceError> {
        if let Some(p) = self.pieces.read().get(mu) {
            return Ok(p.clone());
        }
        let piece = Arc::new(self.build_piece(mu)?);
        let mut w = self.pieces.write();
        Ok(w.entry(mu.to_vec()).or_insert(piece).clone())
    }

    fn build_piece(&self, mu: &[i64]) -> Result<Piece<F>, PieceError> {
        let ring = &self.ring;
        let monomials = self.monomials(mu)?;
        let index: HashMap<Monomial, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut relations = Echelon::new(self.field.clone());
        for (g, dg) in ring.relations().iter().zip(ring.relation_degrees()) {
            let rest: Vec<i64> = mu.iter().zip(dg).map(|(a, b)| a - b).collect();
            let coeffs: Vec<(Monomial, F::Elem)> = g.terms().map(|(m, c)| (m.clone(), self.elem(c))).collect();
            for m in self.monomials(&rest)? {
                let entries = coeffs.iter().map(|(t, c)| (index[&m.mul(t)], c.clone())).collect();
                relations.insert(collect_sparse(&self.field, entries));
            }
        }
        let basis: Vec<usize> = (0..monomials.len()).filter(|&i| !relations.is_pivot(i)).collect();
        let coord_of = basis.iter().enumerate().map(|(c, &i)| (i, c)).collect();
        Ok(Piece { fine_degree: mu.to_vec(), monomials, index, relations, basis, coord_of })
    }

    pub fn piece_basis(&self, mu: &[i64]) -> Result<PieceBasis, PieceError> {
        Ok(self.piece(mu)?.to_basis())
    }

    pub fn dim(&self, mu: &[i64]) -> Result<usize, PieceError> {
        Ok(self.piece(mu)?.dim())
    }

    /// Matrix of multiplication by a homogeneous `g` of fine degree `deg_g`,
    /// from the quotient basis of `A_mu` to that of `A_{mu + deg_g}`.
    pub fn multiplication(
        &self,
        g: &Polynomial,
        deg_g: &[i64],
        mu: &[i64],
    ) -> Result<SparseMatrix<F::Elem>, PieceError> {
        let src = self.piece(mu)?;
        let target_deg: Vec<i64> = mu.iter().zip(deg_g).map(|(a, b)| a + b).collect();
        let dst = self.piece(&target_deg)?;
        let coeffs: Vec<(Monomial, F::Elem)> = g.terms().map(|(m, c)| (m.clone(), self.elem(c))).collect();
        let cols = src
            .basis_monomials()
            .map(|m| {
                let entries = coeffs.iter().map(|(t, c)| (dst.index[&m.mul(t)], c.clone())).collect();
                dst.coordinates(collect_sparse(&self.field, entries))
            })
            .collect();
        Ok(SparseMatrix::from_columns(dst.dim(), cols))
    }

    pub fn cached_pieces(&self) -> usize {
        self.pieces.read().len()
    }
}

/// Field-erased engine handle.
pub enum AnyEngine {
    Q(Engine<Rationals>),
    P(Engine<PrimeField>),
}

/// Runs `$body` with `$e` bound to the concrete engine.
macro_rules! with_engine {
    ($any:expr, $e:ident => $body:expr) => {
        match $any {
            $crate::engine::AnyEngine::Q($e) => $body,
            $crate::engine::AnyEngine::P($e) => $body,
        }
    };
}
pub(crate) use with_engine;

impl AnyEngine {
    pub fn new(ring: Arc<ValidatedRing>) -> Self {
        match ring.field() {
            FieldSpec::Rationals => AnyEngine::Q(Engine::new(ring, Rationals)),
            FieldSpec::Prime(p) => {
                AnyEngine::P(Engine::new(ring, PrimeField::new(u64::from(p)).expect("validated prime")))
            }
        }
    }

    pub fn with_monomial_limit(self, limit: u128) -> Self {
        match self {
            AnyEngine::Q(e) => AnyEngine::Q(e.with_monomial_limit(limit)),
            AnyEngine::P(e) => AnyEngine::P(e.with_monomial_limit(limit)),
        }
    }

    pub fn ring(&self) -> &Arc<ValidatedRing> {
        with_engine!(self, e => e.ring())
    }

    pub fn piece_basis(&self, mu: &[i64]) -> Result<PieceBasis, PieceError> {
        with_engine!(self, e => e.piece_basis(mu))
    }

    pub fn dim(&self, mu: &[i64]) -> Result<usize, PieceError> {
        with_engine!(self, e => e.dim(mu))
    }

    /// Rank of multiplication by `g` out of `A_mu`.
    pub fn multiplication_rank(&self, g: &Polynomial, deg_g: &[i64], mu: &[i64]) -> Result<usize, PieceError> {
        with_engine!(self, e => {
            let m = e.multiplication(g, deg_g, mu)?;
            Ok(crate::linalg::rank(e.field(), &m))
        })
    }
}
