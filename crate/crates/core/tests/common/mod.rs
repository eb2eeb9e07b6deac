//! Fixtures and brute-force counts shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use wallcross_core::cech::Side;
use wallcross_core::corpus::example;
use wallcross_core::engine::AnyEngine;
use wallcross_core::ring::{validate_ring, FieldSpec, GradedRingSpec, ValidatedRing};
use wallcross_core::table::{CohomologyTable, ProbeBox};

pub fn ring(name: &str) -> Arc<ValidatedRing> {
    Arc::new(validate_ring(example(name).unwrap().spec()).unwrap())
}

pub fn table(ring: &Arc<ValidatedRing>, lo: i64, hi: i64, bound: u32) -> (AnyEngine, CohomologyTable) {
    let e = AnyEngine::new(ring.clone());
    let t = CohomologyTable::compute(&e, ProbeBox::new(lo, hi, bound, 32).unwrap()).unwrap();
    (e, t)
}

/// Relation-free ring with the given weights, graded by (positive part, negative part).
pub fn weights_ring(w: &[i64]) -> Arc<ValidatedRing> {
    Arc::new(
        validate_ring(GradedRingSpec {
            field: FieldSpec::Rationals,
            variables: (0..w.len()).map(|i| format!("z{i}")).collect(),
            fine_degrees: w.iter().map(|&x| if x > 0 { vec![x, 0] } else { vec![0, -x] }).collect(),
            lambda: vec![1, -1],
            relations: vec![],
            complete_intersection: false,
        })
        .unwrap(),
    )
}

/// Laurent monomials of weight `i` with exponent `<= -1` on the side's
/// variables and `>= 0` on the rest: the local cohomology of a polynomial
/// ring in its single nonzero degree. All factors push the weight the same
/// way, so the search runs over magnitudes bounded by `|i|`.
pub fn laurent_count(weights: &[i64], side: Side, i: i64) -> u64 {
    let sign = if side == Side::Plus { -1 } else { 1 };
    let target = sign * i;
    if target < 0 {
        return 0;
    }
    // (smallest magnitude, step) per variable
    let vars: Vec<(i64, i64)> = weights
        .iter()
        .map(|&w| if (w > 0) == (side == Side::Plus) { (w.abs(), w.abs()) } else { (0, w.abs()) })
        .collect();
    fn rec(vars: &[(i64, i64)], rem: i64) -> u64 {
        let Some((&(first, step), rest)) = vars.split_first() else {
            return u64::from(rem == 0);
        };
        let mut total = 0;
        let mut val = first;
        while val <= rem {
            total += rec(rest, rem - val);
            val += step;
        }
        total
    }
    rec(&vars, target)
}

pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1u64, |acc, j| acc * (n - j) as u64 / (j + 1) as u64)
}
