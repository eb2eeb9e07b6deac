//! Local cohomology tables over a probe box of fine degrees.
//!
//! The box holds every `mu` with `|mu|_1 <= fine_bound` and `lambda(mu)` in
//! the weight range. A weight piece is certified finite when no nonzero cell
//! of that weight sits on the L1 boundary of the box.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cech::{CechComplexSpec, CechError, LocalCohomology, Side, Truncation};
use crate::engine::AnyEngine;
use crate::lattice::l1_norm;
use crate::ring::ValidatedRing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProbeBox {
    pub weight_min: i64,
    pub weight_max: i64,
    pub fine_bound: u32,
    pub kmax: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoxError {
    #[error("weight range [{0}, {1}] is empty or a single point")]
    WeightRange(i64, i64),
    #[error("fine bound must be at least 1")]
    FineBound,
    #[error("kmax must be at least 2, got {0}")]
    Kmax(u32),
}

impl ProbeBox {
    pub fn new(weight_min: i64, weight_max: i64, fine_bound: u32, kmax: u32) -> Result<Self, BoxError> {
        let b = Self { weight_min, weight_max, fine_bound, kmax };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), BoxError> {
        if self.weight_min >= self.weight_max {
            return Err(BoxError::WeightRange(self.weight_min, self.weight_max));
        }
        if self.fine_bound < 1 {
            return Err(BoxError::FineBound);
        }
        if self.kmax < 2 {
            return Err(BoxError::Kmax(self.kmax));
        }
        Ok(())
    }

    pub fn contains_weight(&self, i: i64) -> bool {
        (self.weight_min..=self.weight_max).contains(&i)
    }

    pub fn contains(&self, ring: &ValidatedRing, mu: &[i64]) -> bool {
        l1_norm(mu) <= i64::from(self.fine_bound) && self.contains_weight(ring.weight_of(mu))
    }

    pub fn on_boundary(&self, mu: &[i64]) -> bool {
        l1_norm(mu) == i64::from(self.fine_bound)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::with_kmax(self.kmax)
    }

    /// Every fine degree of the box, in lexicographic order.
    pub fn cells(&self, ring: &ValidatedRing) -> Vec<Vec<i64>> {
        fn rec(d: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if cur.len() == d {
                out.push(cur.clone());
                return;
            }
            for x in -left..=left {
                cur.push(x);
                rec(d, left - x.abs(), cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        rec(ring.rank(), i64::from(self.fine_bound), &mut Vec::new(), &mut all);
        all.retain(|mu| self.contains_weight(ring.weight_of(mu)));
        all
    }
}

/// A weight aggregate of a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Aggregate {
    Finite { dim: usize },
    UnboundedInBox { boundary_degree: Vec<i64> },
}

impl Aggregate {
    pub fn finite(&self) -> Option<usize> {
        match self {
            Aggregate::Finite { dim } => Some(*dim),
            Aggregate::UnboundedInBox { .. } => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("weight {weight} on the {side} side has support on the box boundary at {boundary_degree:?}")]
pub struct BoxTooSmall {
    pub side: Side,
    pub weight: i64,
    pub boundary_degree: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Complex {
    /// `RΓ_I(A)`.
    Local,
    /// `Č_I(A)`.
    Cech,
}

/// Cohomology of one side over the whole box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideTable {
    pub side: Side,
    /// Number of Čech generators.
    pub generators: usize,
    pub entries: Vec<LocalCohomology>,
    #[serde(skip)]
    by_weight: BTreeMap<i64, Vec<usize>>,
    #[serde(skip)]
    by_degree: HashMap<Vec<i64>, usize>,
}

impl SideTable {
    fn new(ring: &ValidatedRing, side: Side, generators: usize, entries: Vec<LocalCohomology>) -> Self {
        let mut t = Self { side, generators, entries, by_weight: BTreeMap::new(), by_degree: HashMap::new() };
        t.reindex(ring);
        t
    }

    fn reindex(&mut self, ring: &ValidatedRing) {
        self.by_weight.clear();
        self.by_degree.clear();
        for (k, e) in self.entries.iter().enumerate() {
            self.by_weight.entry(ring.weight_of(&e.fine_degree)).or_default().push(k);
            self.by_degree.insert(e.fine_degree.clone(), k);
        }
    }

    pub fn get(&self, mu: &[i64]) -> Option<&LocalCohomology> {
        self.by_degree.get(mu).map(|&k| &self.entries[k])
    }

    pub fn cells_of_weight(&self, i: i64) -> impl Iterator<Item = &LocalCohomology> {
        self.by_weight.get(&i).into_iter().flatten().map(|&k| &self.entries[k])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub probe: ProbeBox,
    pub plus: SideTable,
    pub minus: SideTable,
}

impl CohomologyTable {
    /// Computes both sides over every cell of the box, in parallel.
    pub fn compute(engine: &AnyEngine, probe: ProbeBox) -> Result<Self, CechError> {
        let ring = engine.ring().clone();
        let cells = probe.cells(&ring);
        let trunc = probe.truncation();
        let mut sides = Vec::new();
        for side in [Side::Plus, Side::Minus] {
            let spec = CechComplexSpec::irrelevant(&ring, side);
            let results: Vec<Result<LocalCohomology, CechError>> =
                cells.par_iter().map(|mu| engine.local_cohomology(&spec, mu, trunc)).collect();
            let entries = results.into_iter().collect::<Result<Vec<_>, _>>()?;
            sides.push(SideTable::new(&ring, side, spec.len(), entries));
        }
        let minus = sides.pop().expect("two sides");
        let plus = sides.pop().expect("two sides");
        Ok(Self { probe, plus, minus })
    }

    /// Rebuilds lookup indices after deserialization.
    pub fn reindex(&mut self, ring: &ValidatedRing) {
        self.plus.reindex(ring);
        self.minus.reindex(ring);
    }

    pub fn side(&self, side: Side) -> &SideTable {
        match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &LocalCohomology> {
        self.plus.entries.iter().chain(&self.minus.entries)
    }

    /// Sum of `dim H^j` over the cells of weight `i`.
    pub fn weight_aggregate(&self, side: Side, complex: Complex, j: usize, i: i64) -> Aggregate {
        let mut dim = 0;
        let mut boundary: Option<Vec<i64>> = None;
        for e in self.side(side).cells_of_weight(i) {
            let d = match complex {
                Complex::Local => e.local_at(j),
                Complex::Cech => e.cech_at(j),
            };
            if d > 0 && boundary.is_none() && self.probe.on_boundary(&e.fine_degree) {
                boundary = Some(e.fine_degree.clone());
            }
            dim += d;
        }
        match boundary {
            Some(boundary_degree) => Aggregate::UnboundedInBox { boundary_degree },
            None => Aggregate::Finite { dim },
        }
    }

    /// Like [`Self::weight_aggregate`], failing when the piece is not certified finite.
    pub fn finite_aggregate(&self, side: Side, complex: Complex, j: usize, i: i64) -> Result<usize, BoxTooSmall> {
        match self.weight_aggregate(side, complex, j, i) {
            Aggregate::Finite { dim } => Ok(dim),
            Aggregate::UnboundedInBox { boundary_degree } => Err(BoxTooSmall { side, weight: i, boundary_degree }),
        }
    }

    /// Whether some cell of weight `i` has nonzero `RΓ`.
    pub fn local_nonzero(&self, side: Side, i: i64) -> bool {
        self.side(side).cells_of_weight(i).any(|e| !e.local_is_zero())
    }

    /// A boundary cell of weight `i` with nonzero `RΓ`, if any.
    pub fn local_boundary_support(&self, side: Side, i: i64) -> Option<Vec<i64>> {
        self.side(side)
            .cells_of_weight(i)
            .find(|e| !e.local_is_zero() && self.probe.on_boundary(&e.fine_degree))
            .map(|e| e.fine_degree.clone())
    }

    pub fn weights(&self) -> std::ops::RangeInclusive<i64> {
        self.probe.weight_min..=self.probe.weight_max
    }

    /// Longest cohomology vector length on `side` (`r + 1` for `RΓ`).
    pub fn max_local_degree(&self, side: Side) -> usize {
        self.side(side).generators + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{validate_ring, FieldSpec, GradedRingSpec};
    use std::sync::Arc;

    fn relation_free(weights_second: &[i64]) -> Arc<ValidatedRing> {
        // x, y in degree (1,0); u, v in degree (0, |w|)
        let spec = GradedRingSpec {
            field: FieldSpec::Rationals,
            variables: ["x", "y", "u", "v"].iter().map(|s| s.to_string()).collect(),
            fine_degrees: vec![vec![1, 0], vec![1, 0], vec![0, -weights_second[0]], vec![0, -weights_second[1]]],
            lambda: vec![1, -1],
            relations: vec![],
            complete_intersection: false,
        };
        Arc::new(validate_ring(spec).unwrap())
    }

    #[test]
    fn box_cells_respect_bounds() {
        let r = relation_free(&[-1, -1]);
        let b = ProbeBox::new(-2, 2, 3, 8).unwrap();
        let cells = b.cells(&r);
        assert!(cells.iter().all(|mu| l1_norm(mu) <= 3 && (-2..=2).contains(&(mu[0] - mu[1]))));
        assert!(cells.contains(&vec![1, -1]));
        assert!(!cells.contains(&vec![3, 0]));
        assert!(ProbeBox::new(1, 1, 3, 8).is_err());
        assert!(ProbeBox::new(0, 1, 0, 8).is_err());
        assert!(ProbeBox::new(0, 1, 3, 1).is_err());
    }

    #[test]
    fn conifold_weight_aggregates() {
        let r = relation_free(&[-1, -1]);
        let e = AnyEngine::new(r.clone());
        let t = CohomologyTable::compute(&e, ProbeBox::new(-5, 5, 7, 32).unwrap()).unwrap();
        // C(-i+1, 3)
        assert_eq!(t.finite_aggregate(Side::Plus, Complex::Local, 2, -2), Ok(1));
        assert_eq!(t.finite_aggregate(Side::Plus, Complex::Local, 2, -3), Ok(4));
        assert_eq!(t.finite_aggregate(Side::Plus, Complex::Local, 2, -4), Ok(10));
        assert_eq!(t.finite_aggregate(Side::Plus, Complex::Local, 2, 0), Ok(0));
        assert_eq!(t.finite_aggregate(Side::Plus, Complex::Cech, 1, -3), Ok(4));
        assert!(!t.local_nonzero(Side::Plus, -1));
        assert!(t.local_nonzero(Side::Minus, 2));
    }

    #[test]
    fn flip_minus_side_aggregate() {
        let r = relation_free(&[-1, -2]);
        let e = AnyEngine::new(r.clone());
        let t = CohomologyTable::compute(&e, ProbeBox::new(-4, 4, 6, 32).unwrap()).unwrap();
        assert_eq!(t.finite_aggregate(Side::Minus, Complex::Local, 2, 3), Ok(1));
        assert_eq!(t.finite_aggregate(Side::Plus, Complex::Local, 2, -3), Ok(3));
    }

    #[test]
    fn boundary_support_is_flagged() {
        // weight-0 ring pieces reach the boundary: (xu)^n has weight 0
        let r = relation_free(&[-1, -1]);
        let e = AnyEngine::new(r.clone());
        let t = CohomologyTable::compute(&e, ProbeBox::new(-2, 2, 4, 16).unwrap()).unwrap();
        assert!(matches!(t.weight_aggregate(Side::Plus, Complex::Cech, 0, 0), Aggregate::UnboundedInBox { .. }));
        assert!(t.finite_aggregate(Side::Plus, Complex::Cech, 0, 0).is_err());
    }
}
