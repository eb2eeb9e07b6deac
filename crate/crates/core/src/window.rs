//! Slices and windows spanned by twists `A(j)`, `j ∈ W`.
//!
//! `RHom(A(j), RΓ(A(j')))` in degree zero is the weight piece `RΓ(A)_{j'-j}`,
//! so every verdict here is a lookup in a [`CohomologyTable`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::{vanishing_bounds, weight_profile, AnalyzerError, DualityVerdict, Outcome};
use crate::cech::Side;
use crate::table::{Aggregate, CohomologyTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("window must contain at least one twist")]
    Empty,
    #[error("difference {0} lies outside the probed weight range")]
    BoxTooSmall(i64),
    #[error("strong slice needs a visible vanishing tail: {0}")]
    NoTail(AnalyzerError),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
}

/// A nonempty, sorted, duplicate-free set of twist weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Window(Vec<i64>);

impl Window {
    pub fn new(weights: impl IntoIterator<Item = i64>) -> Result<Self, WindowError> {
        let set: BTreeSet<i64> = weights.into_iter().collect();
        if set.is_empty() {
            return Err(WindowError::Empty);
        }
        Ok(Window(set.into_iter().collect()))
    }

    /// `{start, ..., start + width - 1}`.
    pub fn interval(start: i64, width: usize) -> Result<Self, WindowError> {
        Self::new((0..width as i64).map(|k| start + k))
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn translate(&self, c: i64) -> Window {
        Window(self.0.iter().map(|j| j + c).collect())
    }

    /// `W - W`, sorted by `|d|` with negative differences first on ties.
    pub fn differences(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self
            .0
            .iter()
            .flat_map(|a| self.0.iter().map(move |b| b - a))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        d.sort_by_key(|&x| (x.abs(), x));
        d
    }

    fn spread(&self) -> i64 {
        self.0[self.0.len() - 1] - self.0[0]
    }
}

impl TryFrom<Vec<i64>> for Window {
    type Error = WindowError;
    fn try_from(v: Vec<i64>) -> Result<Self, WindowError> {
        Window::new(v)
    }
}

impl From<Window> for Vec<i64> {
    fn from(w: Window) -> Vec<i64> {
        w.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceKind {
    Plain,
    Strong,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceVerdict {
    pub side: Side,
    pub kind: SliceKind,
    pub window: Window,
    pub pass: bool,
    /// A weight with nonzero `RΓ` piece that breaks the condition.
    pub witness_difference: Option<i64>,
    pub witness_dims: Option<Vec<Aggregate>>,
}

fn verdict(table: &CohomologyTable, side: Side, kind: SliceKind, w: &Window, bad: Option<i64>) -> SliceVerdict {
    SliceVerdict {
        side,
        kind,
        window: w.clone(),
        pass: bad.is_none(),
        witness_difference: bad,
        witness_dims: bad.map(|d| weight_profile(table, side, d)),
    }
}

fn check_range(table: &CohomologyTable, w: &Window) -> Result<(), WindowError> {
    let s = w.spread();
    for d in [-s, s] {
        if !table.probe.contains_weight(d) {
            return Err(WindowError::BoxTooSmall(d));
        }
    }
    Ok(())
}

/// `RΓ(A)_{j'-j} = 0` for all `j, j' ∈ W`.
pub fn slice_check(table: &CohomologyTable, w: &Window, side: Side) -> Result<SliceVerdict, WindowError> {
    check_range(table, w)?;
    let bad = w.differences().into_iter().find(|&d| table.local_nonzero(side, d));
    Ok(verdict(table, side, SliceKind::Plain, w, bad))
}

/// Plus side: `RΓ+_i = 0` for every box weight `i >= min(W - W)`, the part
/// above the box certified by the observed vanishing tail. Minus side mirrors.
pub fn strong_slice_check(table: &CohomologyTable, w: &Window, side: Side) -> Result<SliceVerdict, WindowError> {
    check_range(table, w)?;
    vanishing_bounds(table).map_err(WindowError::NoTail)?;
    let s = w.spread();
    let (lo, hi) = (table.probe.weight_min, table.probe.weight_max);
    let bad = match side {
        Side::Plus => (-s..=hi).find(|&i| table.local_nonzero(side, i)),
        Side::Minus => (lo..=s).rev().find(|&i| table.local_nonzero(side, i)),
    };
    Ok(verdict(table, side, SliceKind::Strong, w, bad))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthEntry {
    pub width: usize,
    pub representative: Vec<i64>,
    /// Width reached the largest value the box can test.
    pub unbounded_in_box: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowInventory {
    pub positive: WidthEntry,
    pub negative: WidthEntry,
    pub simultaneous: WidthEntry,
    pub strong_positive: WidthEntry,
    pub strong_negative: WidthEntry,
}

/// Maximal contiguous windows per criterion. Translation invariance makes
/// `{0, ..., w-1}` a representative for each width.
pub fn max_windows(table: &CohomologyTable) -> Result<WindowInventory, WindowError> {
    vanishing_bounds(table).map_err(WindowError::NoTail)?;
    let limit = table.probe.weight_max.min(-table.probe.weight_min).max(0) as usize + 1;
    let widest = |ok: &dyn Fn(Window) -> Result<bool, WindowError>| -> Result<WidthEntry, WindowError> {
        let mut width = 0;
        for w in 1..=limit {
            if !ok(Window::interval(0, w)?)? {
                break;
            }
            width = w;
        }
        Ok(WidthEntry { width, representative: (0..width as i64).collect(), unbounded_in_box: width == limit })
    };
    let plain = |side| move |w: Window| Ok(slice_check(table, &w, side)?.pass);
    let strong = |side| move |w: Window| Ok(strong_slice_check(table, &w, side)?.pass);
    Ok(WindowInventory {
        positive: widest(&plain(Side::Plus))?,
        negative: widest(&plain(Side::Minus))?,
        simultaneous: widest(&|w: Window| {
            Ok(slice_check(table, &w, Side::Plus)?.pass && slice_check(table, &w, Side::Minus)?.pass)
        })?,
        strong_positive: widest(&strong(Side::Plus))?,
        strong_negative: widest(&strong(Side::Minus))?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapPair {
    pub j: i64,
    pub j_prime: i64,
    pub plus_vanishes: bool,
    pub minus_vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhomSwapReport {
    pub window: Window,
    pub pairs_checked: usize,
    pub violations: Vec<SwapPair>,
}

/// For every `(j, j') ∈ W × W`: `RΓ+_{j'-j} = 0` iff `RΓ-_{j-j'} = 0`.
/// Requires a passing duality verdict at `a = 0`.
pub fn rhom_swap_check(
    table: &CohomologyTable,
    w: &Window,
    duality_at_zero: &DualityVerdict,
) -> Result<RhomSwapReport, WindowError> {
    if duality_at_zero.a != 0 || duality_at_zero.outcome != Outcome::Pass {
        return Err(WindowError::PreconditionNotMet(format!(
            "duality at a = 0 must pass (got a = {}, {:?})",
            duality_at_zero.a, duality_at_zero.outcome
        )));
    }
    check_range(table, w)?;
    let mut report = RhomSwapReport { window: w.clone(), pairs_checked: 0, violations: Vec::new() };
    for &j in w.weights() {
        for &jp in w.weights() {
            let pair = SwapPair {
                j,
                j_prime: jp,
                plus_vanishes: !table.local_nonzero(Side::Plus, jp - j),
                minus_vanishes: !table.local_nonzero(Side::Minus, j - jp),
            };
            report.pairs_checked += 1;
            if pair.plus_vanishes != pair.minus_vanishes {
                report.violations.push(pair);
            }
        }
    }
    Ok(report)
}
