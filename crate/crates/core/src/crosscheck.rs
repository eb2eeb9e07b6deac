//! Cell-by-cell comparison of the linear-algebra table with independent
//! counts: the closed form for polynomial rings, lattice enumeration for
//! semigroup rings, and the Euler identity everywhere.

use serde::{Deserialize, Serialize};

use crate::cech::Side;
use crate::engine::AnyEngine;
use crate::table::CohomologyTable;
use crate::toric::{
    closed_form_dims, hilbert_series, oracle_kmax, semigroup_local_cohomology, SemigroupEmbedding, Target,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    ClosedForm,
    SemigroupLattice,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub side: Side,
    pub fine_degree: Vec<i64>,
    pub linear_algebra: Vec<usize>,
    pub oracle: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub oracle: Oracle,
    /// Why no cell oracle applies, when `oracle` is `none`.
    pub reason: Option<String>,
    pub cells_checked: usize,
    pub mismatches: Vec<Mismatch>,
    /// Cells where `dim A_mu` differs from the two Euler characteristics.
    pub euler_violations: Vec<(Side, Vec<i64>)>,
    /// Fine Hilbert series, present when the complete-intersection series agrees with the box.
    pub hilbert_series: Option<String>,
    pub series_error: Option<String>,
}

impl CrossCheckReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.euler_violations.is_empty() && self.series_error.is_none()
    }
}

fn trimmed(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn crosscheck(engine: &AnyEngine, table: &CohomologyTable) -> CrossCheckReport {
    let ring = engine.ring();
    let mut report = CrossCheckReport {
        oracle: Oracle::None,
        reason: None,
        cells_checked: 0,
        mismatches: Vec::new(),
        euler_violations: Vec::new(),
        hilbert_series: None,
        series_error: None,
    };
    for side in [Side::Plus, Side::Minus] {
        for e in &table.side(side).entries {
            if e.ring_dim as i64 != e.euler_local() + e.euler_cech() {
                report.euler_violations.push((side, e.fine_degree.clone()));
            }
        }
    }
    if ring.is_complete_intersection() {
        match hilbert_series(engine, &table.probe) {
            Ok(s) => report.hilbert_series = Some(s.to_string()),
            Err(e) => report.series_error = Some(e.to_string()),
        }
    }

    let embedding = if ring.relations().is_empty() {
        report.oracle = Oracle::ClosedForm;
        None
    } else {
        match SemigroupEmbedding::from_ring(ring).and_then(|emb| {
            emb.verify_presentation(engine, &table.probe)?;
            Ok(emb)
        }) {
            Ok(emb) => {
                report.oracle = Oracle::SemigroupLattice;
                Some(emb)
            }
            Err(e) => {
                report.reason = Some(e.to_string());
                return report;
            }
        }
    };
    for side in [Side::Plus, Side::Minus] {
        for e in &table.side(side).entries {
            let mu = &e.fine_degree;
            let oracle = match &embedding {
                None => match closed_form_dims(ring, side, &Target::Fine(mu.clone())) {
                    Ok(c) => (0..=c.cohomological_degree).map(|j| c.at(j) as usize).collect(),
                    Err(err) => {
                        report.reason = Some(err.to_string());
                        return report;
                    }
                },
                Some(emb) => semigroup_local_cohomology(emb, ring, side, mu, oracle_kmax(mu)),
            };
            report.cells_checked += 1;
            let (la, or) = (trimmed(e.local.clone()), trimmed(oracle));
            if la != or {
                report.mismatches.push(Mismatch { side, fine_degree: mu.clone(), linear_algebra: la, oracle: or });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{validate_ring, FieldSpec, GradedRingSpec};
    use crate::table::ProbeBox;
    use std::sync::Arc;

    #[test]
    fn hypersurface_agrees_with_lattice() {
        let r = validate_ring(GradedRingSpec {
            field: FieldSpec::Rationals,
            variables: ["x", "y", "u", "v"].iter().map(|s| s.to_string()).collect(),
            fine_degrees: vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]],
            lambda: vec![1, -1],
            relations: vec!["x*u - y*v".into()],
            complete_intersection: false,
        })
        .unwrap();
        let e = AnyEngine::new(Arc::new(r));
        let t = CohomologyTable::compute(&e, ProbeBox::new(-3, 3, 4, 32).unwrap()).unwrap();
        let c = crosscheck(&e, &t);
        assert_eq!(c.oracle, Oracle::SemigroupLattice);
        assert!(c.pass(), "{c:?}");
        assert!(c.cells_checked > 20);
        assert_eq!(c.hilbert_series.as_deref(), Some("(1 - s*t)/((1 - s)^2*(1 - t)^2)"));
    }
}
