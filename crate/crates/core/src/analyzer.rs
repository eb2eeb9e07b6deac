//! Wall-crossing classification, vanishing bounds, canonical vanishing and
//! the dimension-level duality check.
//!
//! The duality compares `dim H^{j+1}(RΓ+)_{i+a}` with `dim H^{n-j}(RΓ-)_{-i}`
//! for `n = dim A - 1`, skipping the exceptional weights `-a < i < 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cech::Side;
use crate::engine::AnyEngine;
use crate::ring::ValidatedRing;
use crate::table::{Aggregate, BoxTooSmall, CohomologyTable, Complex};
use crate::toric::coarse_hilbert_series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Flop,
    Flip,
    Antiflip,
}

impl Kind {
    pub fn of(a: i64) -> Kind {
        match a.signum() {
            0 => Kind::Flop,
            1 => Kind::Flip,
            _ => Kind::Antiflip,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Kind::Flop => "flop",
            Kind::Flip => "flip",
            Kind::Antiflip => "antiflip (negative a, outside the flip/flop definition)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smallness {
    Small,
    NotSmall,
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideSmallness {
    pub verdict: Smallness,
    /// `codim V(I)` in `Spec A`, when the dimension count applies.
    pub codimension: Option<usize>,
}

/// Codimension of `V(I±)` by complete-intersection dimension counting.
///
/// `A / I` is the polynomial ring on the other variables modulo the restricted
/// relations; the count is trusted when at most one restricted relation
/// survives.
pub fn smallness(ring: &ValidatedRing, side: Side) -> SideSmallness {
    let unverified = SideSmallness { verdict: Smallness::Unverified, codimension: None };
    let Some(dim_a) = ring.ci_dimension() else {
        return unverified;
    };
    let sel = ring.variables_with_sign(side == Side::Plus);
    let surviving = ring.relations().iter().filter(|g| !g.restrict_zero(&sel).is_zero()).count();
    if surviving > 1 {
        return unverified;
    }
    let dim_quotient = ring.nvars() - sel.len() - surviving;
    let codim = dim_a.saturating_sub(dim_quotient);
    SideSmallness { verdict: if codim >= 2 { Smallness::Small } else { Smallness::NotSmall }, codimension: Some(codim) }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyzerError {
    #[error("the {0} side has no generators")]
    EmptySide(Side),
    #[error("no vanishing tail of RΓ on the {side} side is visible inside the weight range (nonzero at {weight})")]
    NoVanishingTail { side: Side, weight: i64 },
    #[error("weight {0} lies outside the probed weight range")]
    WeightOutsideBox(i64),
    #[error(transparent)]
    BoxTooSmall(#[from] BoxTooSmall),
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `lcm |w_i|` over the side's variables; a sufficient Cartier index.
pub fn cartier_step(ring: &ValidatedRing, side: Side) -> Result<u64, AnalyzerError> {
    let sel = ring.variables_with_sign(side == Side::Plus);
    if sel.is_empty() {
        return Err(AnalyzerError::EmptySide(side));
    }
    Ok(sel.iter().map(|&i| ring.weights()[i].unsigned_abs()).fold(1, |l, w| l / gcd(l, w) * w))
}

/// Observed `c+` (first weight of the vanishing tail of `RΓ+`) and `c-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingBounds {
    pub c_plus: i64,
    pub c_minus: i64,
    pub weight_min: i64,
    pub weight_max: i64,
}

pub fn vanishing_bounds(table: &CohomologyTable) -> Result<VanishingBounds, AnalyzerError> {
    let (lo, hi) = (table.probe.weight_min, table.probe.weight_max);
    if table.local_nonzero(Side::Plus, hi) {
        return Err(AnalyzerError::NoVanishingTail { side: Side::Plus, weight: hi });
    }
    if table.local_nonzero(Side::Minus, lo) {
        return Err(AnalyzerError::NoVanishingTail { side: Side::Minus, weight: lo });
    }
    let c_plus = (lo..=hi).rev().find(|&i| table.local_nonzero(Side::Plus, i)).map_or(lo, |i| i + 1);
    let c_minus = (lo..=hi).find(|&i| table.local_nonzero(Side::Minus, i)).map_or(hi, |i| i - 1);
    Ok(VanishingBounds { c_plus, c_minus, weight_min: lo, weight_max: hi })
}

/// `H^j` aggregates of one weight piece, `j = 0..=r`.
pub fn weight_profile(table: &CohomologyTable, side: Side, i: i64) -> Vec<Aggregate> {
    (0..table.max_local_degree(side)).map(|j| table.weight_aggregate(side, Complex::Local, j, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingWitness {
    pub side: Side,
    pub weight: i64,
    pub dims: Vec<Aggregate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalVanishing {
    pub a: i64,
    pub pass: bool,
    /// `a - c+`; nonnegative iff the plus condition holds.
    pub plus_margin: i64,
    /// `c- - a`; nonnegative iff the minus condition holds.
    pub minus_margin: i64,
    pub witness: Option<VanishingWitness>,
}

/// `RΓ+_i = 0` for box weights `i >= a` and `RΓ-_i = 0` for `i <= a`.
pub fn canonical_vanishing_check(table: &CohomologyTable, a: i64) -> Result<CanonicalVanishing, AnalyzerError> {
    if !table.probe.contains_weight(a) {
        return Err(AnalyzerError::WeightOutsideBox(a));
    }
    let b = vanishing_bounds(table)?;
    let (lo, hi) = (b.weight_min, b.weight_max);
    let plus_bad = (a..=hi).find(|&i| table.local_nonzero(Side::Plus, i));
    let minus_bad = (lo..=a).rev().find(|&i| table.local_nonzero(Side::Minus, i));
    let witness = plus_bad
        .map(|i| (Side::Plus, i))
        .or(minus_bad.map(|i| (Side::Minus, i)))
        .map(|(side, weight)| VanishingWitness { side, weight, dims: weight_profile(table, side, weight) });
    Ok(CanonicalVanishing {
        a,
        pass: witness.is_none(),
        plus_margin: a - b.c_plus,
        minus_margin: b.c_minus - a,
        witness,
    })
}

/// Krull dimension from the complete-intersection count or the coarse
/// Hilbert series pole order.
pub fn krull_dimension(engine: &AnyEngine) -> Option<usize> {
    let ring = engine.ring();
    if let Some(d) = ring.ci_dimension() {
        return Some(d);
    }
    let s = coarse_hilbert_series(engine).ok()?;
    // remove (1 - t) factors still hidden in the numerator
    let mut num = s.numerator.clone();
    let mut mult = 0;
    loop {
        let total: num_bigint::BigInt = num.iter().sum();
        if num.is_empty() || total != num_bigint::BigInt::from(0) {
            break;
        }
        // divide by (1 - t): q_k = p_k + q_{k-1}
        let mut q = Vec::with_capacity(num.len());
        let mut acc = num_bigint::BigInt::from(0);
        for c in &num[..num.len() - 1] {
            acc += c;
            q.push(acc.clone());
        }
        num = q;
        mult += 1;
    }
    Some(s.denominator.len() - mult)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualityMode {
    Weight,
    Fine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityCell {
    pub j: i64,
    /// The weight `i`; the plus piece sits in weight `i + a`, the minus piece in `-i`.
    pub i: i64,
    /// Fine degrees of the two pieces (fine mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fine: Option<(Vec<i64>, Vec<i64>)>,
    pub lhs: usize,
    pub rhs: usize,
    pub equal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityVerdict {
    pub mode: DualityMode,
    pub a: i64,
    pub n: usize,
    pub flip_vector: Vec<i64>,
    /// Run with `a < 0` or `a != -sigma`; not a test of the theorem.
    pub diagnostic: bool,
    /// Weights `-a < i < 0` that were not compared.
    pub exceptional_window: Vec<i64>,
    pub cells: Vec<DualityCell>,
    pub failures: Vec<DualityCell>,
    pub witness: Option<DualityCell>,
    pub outcome: Outcome,
    pub reason: Option<String>,
}

/// Prefers failures where both pieces are nonzero, then weights nearest 0.
fn choose_witness(failures: &[DualityCell]) -> Option<DualityCell> {
    failures.iter().min_by_key(|c| (c.lhs == 0 || c.rhs == 0, c.i.abs(), c.i, c.j)).cloned()
}

pub fn duality_check(
    table: &CohomologyTable,
    ring: &ValidatedRing,
    krull_dim: Option<usize>,
    a: i64,
    mode: DualityMode,
) -> DualityVerdict {
    let mut verdict = DualityVerdict {
        mode,
        a,
        n: 0,
        flip_vector: ring.flip_vector().to_vec(),
        diagnostic: a < 0 || a != -ring.sigma(),
        exceptional_window: ((-a + 1)..0).collect(),
        cells: Vec::new(),
        failures: Vec::new(),
        witness: None,
        outcome: Outcome::Inconclusive,
        reason: None,
    };
    let Some(dim) = krull_dim.filter(|&d| d >= 1) else {
        verdict.reason = Some("dimension of A could not be determined".into());
        return verdict;
    };
    let n = dim - 1;
    verdict.n = n;
    let in_window = |i: i64| -a < i && i < 0;
    let mut infinite: Option<String> = None;
    match mode {
        DualityMode::Weight => {
            for i in table.weights() {
                if in_window(i) || !table.probe.contains_weight(i + a) || !table.probe.contains_weight(-i) {
                    continue;
                }
                for j in -1..=(n as i64) {
                    let lhs = table.weight_aggregate(Side::Plus, Complex::Local, (j + 1) as usize, i + a);
                    let rhs = table.weight_aggregate(Side::Minus, Complex::Local, (n as i64 - j) as usize, -i);
                    match (lhs.finite(), rhs.finite()) {
                        (Some(l), Some(r)) => {
                            verdict.cells.push(DualityCell { j, i, fine: None, lhs: l, rhs: r, equal: l == r });
                        }
                        _ => {
                            infinite.get_or_insert_with(|| {
                                format!("weight piece at i = {i} is not certified finite in the box; use fine mode")
                            });
                        }
                    }
                }
            }
        }
        DualityMode::Fine => {
            if a != -ring.sigma() {
                verdict.reason =
                    Some(format!("fine mode pairs mu with -mu - c, which corresponds to a = {} only", -ring.sigma()));
                return verdict;
            }
            let c = ring.flip_vector();
            for e in &table.plus.entries {
                let mu = &e.fine_degree;
                let i = ring.weight_of(mu) - a;
                if in_window(i) {
                    continue;
                }
                let nu: Vec<i64> = mu.iter().zip(c).map(|(m, x)| -m - x).collect();
                let Some(other) = table.minus.get(&nu) else { continue };
                for j in -1..=(n as i64) {
                    let l = e.local_at((j + 1) as usize);
                    let r = other.local_at((n as i64 - j) as usize);
                    verdict.cells.push(DualityCell {
                        j,
                        i,
                        fine: Some((mu.clone(), nu.clone())),
                        lhs: l,
                        rhs: r,
                        equal: l == r,
                    });
                }
            }
        }
    }
    verdict.failures = verdict.cells.iter().filter(|c| !c.equal).cloned().collect();
    verdict.witness = choose_witness(&verdict.failures);
    verdict.outcome = if verdict.witness.is_some() {
        Outcome::Fail
    } else if infinite.is_some() {
        Outcome::Inconclusive
    } else if verdict.cells.is_empty() {
        verdict.reason = Some("no comparable cells in the box".into());
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    if verdict.reason.is_none() {
        verdict.reason = infinite;
    }
    verdict
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub plus: SideSmallness,
    pub minus: SideSmallness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierSteps {
    pub plus: Option<u64>,
    pub minus: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallCrossingReport {
    pub sigma: i64,
    pub a_parameter: i64,
    pub kind: Kind,
    pub kind_label: String,
    pub smallness: SmallnessReport,
    pub cartier_step: CartierSteps,
    pub bounds: Option<VanishingBounds>,
    pub bounds_error: Option<String>,
    pub canonical_vanishing: Option<CanonicalVanishing>,
}

/// Everything that follows from the presentation, plus table-derived bounds.
pub fn classify(ring: &ValidatedRing, table: Option<&CohomologyTable>) -> WallCrossingReport {
    let a = -ring.sigma();
    let kind = Kind::of(a);
    let (mut bounds, mut bounds_error, mut canonical) = (None, None, None);
    if let Some(t) = table {
        match vanishing_bounds(t) {
            Ok(b) => bounds = Some(b),
            Err(e) => bounds_error = Some(e.to_string()),
        }
        match canonical_vanishing_check(t, a) {
            Ok(c) => canonical = Some(c),
            Err(e) => {
                bounds_error.get_or_insert(e.to_string());
            }
        }
    }
    WallCrossingReport {
        sigma: ring.sigma(),
        a_parameter: a,
        kind,
        kind_label: kind.label().to_string(),
        smallness: SmallnessReport { plus: smallness(ring, Side::Plus), minus: smallness(ring, Side::Minus) },
        cartier_step: CartierSteps {
            plus: cartier_step(ring, Side::Plus).ok(),
            minus: cartier_step(ring, Side::Minus).ok(),
        },
        bounds,
        bounds_error,
        canonical_vanishing: canonical,
    }
}
