//! Task orchestration and the report document.
//!
//! Tasks run in dependency order: the cohomology table first, then the
//! table-level checks, then the analyzer, windows and the Gorenstein test.
//! Every `fail` status carries a witness.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use wallcross_core::analyzer::{
    classify, duality_check, krull_dimension, DualityMode, DualityVerdict, Outcome, WallCrossingReport,
};
use wallcross_core::cech::Side;
use wallcross_core::crosscheck::{crosscheck, CrossCheckReport, Oracle};
use wallcross_core::engine::AnyEngine;
use wallcross_core::table::{Aggregate, CohomologyTable, Complex, ProbeBox};
use wallcross_core::toric::{gorenstein_check, Gorenstein, GorensteinVerdict};
use wallcross_core::window::{
    max_windows, rhom_swap_check, slice_check, strong_slice_check, RhomSwapReport, SliceVerdict, Window,
    WindowInventory,
};

use crate::cache::{sha256_hex, CanonicalRing, Lookup, TableCache, ENGINE_VERSION};
use crate::config::{Job, Task};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    /// Data was produced; nothing was asserted.
    Computed,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub task: Task,
    pub status: Status,
    pub summary: String,
    pub witness: Option<String>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightRow {
    pub weight: i64,
    pub dims: Vec<Aggregate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SideSummary {
    pub side: Side,
    pub generators: usize,
    pub cells: usize,
    pub max_level: u32,
    /// Weights with a nonzero aggregate, `dims[j]` for `H^j`.
    pub nonzero: Vec<WeightRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableSummary {
    pub complex: Complex,
    pub sides: Vec<SideSummary>,
}

impl TableSummary {
    pub fn of(table: &CohomologyTable, complex: Complex) -> Self {
        let sides = [Side::Plus, Side::Minus]
            .into_iter()
            .map(|side| {
                let t = table.side(side);
                let degrees = match complex {
                    Complex::Local => table.max_local_degree(side),
                    Complex::Cech => t.entries.iter().map(|e| e.cech.len()).max().unwrap_or(0),
                };
                let nonzero = table
                    .weights()
                    .filter_map(|i| {
                        let dims: Vec<Aggregate> =
                            (0..degrees).map(|j| table.weight_aggregate(side, complex, j, i)).collect();
                        let zero = dims.iter().all(|d| d.finite() == Some(0));
                        (!zero).then_some(WeightRow { weight: i, dims })
                    })
                    .collect();
                SideSummary {
                    side,
                    generators: t.generators,
                    cells: t.entries.len(),
                    max_level: t.entries.iter().map(|e| e.level).max().unwrap_or(0),
                    nonzero,
                }
            })
            .collect();
        Self { complex, sides }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowCheck {
    pub window: Window,
    pub plus: SliceVerdict,
    pub minus: SliceVerdict,
    pub strong_plus: Option<SliceVerdict>,
    pub strong_minus: Option<SliceVerdict>,
    pub swap: Option<RhomSwapReport>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WindowsReport {
    pub inventory: Option<WindowInventory>,
    pub checks: Vec<WindowCheck>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RingSummary {
    #[serde(flatten)]
    pub ring: CanonicalRing,
    pub weights: Vec<i64>,
    pub sigma: i64,
    pub flip_vector: Vec<i64>,
}

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub engine: &'static str,
    pub input_hash: String,
    pub ring: RingSummary,
    pub probe: ProbeBox,
    pub tasks: Vec<TaskReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<WallCrossingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cech: Option<TableSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_cohomology: Option<TableSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrossCheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<WindowsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gorenstein: Option<GorensteinVerdict>,
    pub exit_code: i32,
}

/// Side effects of a run that are not part of the report.
#[derive(Debug)]
pub struct RunLog {
    pub cache: Lookup,
    pub warnings: Vec<String>,
}

fn input_hash(job: &Job) -> String {
    #[derive(Serialize)]
    struct Input<'a> {
        ring: CanonicalRing,
        probe: &'a ProbeBox,
        tasks: &'a [Task],
        mode: DualityMode,
        a: Option<i64>,
        windows: &'a [Vec<i64>],
    }
    let d = &job.document;
    let input = Input {
        ring: CanonicalRing::of(&job.ring),
        probe: &job.probe,
        tasks: &d.tasks,
        mode: d.mode,
        a: d.a,
        windows: &d.windows,
    };
    sha256_hex(&serde_json::to_vec(&input).expect("input serializes"))
}

fn dims_text(dims: &[Aggregate]) -> String {
    let parts: Vec<String> = dims
        .iter()
        .map(|d| match d {
            Aggregate::Finite { dim } => dim.to_string(),
            Aggregate::UnboundedInBox { .. } => "?".into(),
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

struct Runner<'a> {
    job: &'a Job,
    engine: AnyEngine,
    table: Option<Result<Arc<CohomologyTable>, String>>,
    duality: Vec<DualityVerdict>,
    report: ReportDocument,
}

impl Runner<'_> {
    fn table(&mut self, cache: &mut TableCache, lookup: &mut Lookup) -> Result<Arc<CohomologyTable>, String> {
        if self.table.is_none() {
            let (hit, cached) = cache.lookup(&self.job.ring, &self.job.probe);
            *lookup = hit;
            let t = match cached {
                Some(t) => Ok(t),
                None => {
                    let t = CohomologyTable::compute(&self.engine, self.job.probe).map_err(|e| e.to_string());
                    if let Ok(t) = &t {
                        cache.store(&self.job.ring, t);
                    }
                    t
                }
            };
            self.table = Some(t.map(Arc::new));
        }
        self.table.clone().expect("set above")
    }

    fn duality(&mut self, table: &CohomologyTable, a: i64, mode: DualityMode) -> DualityVerdict {
        if let Some(d) = self.duality.iter().find(|d| d.a == a && d.mode == mode) {
            return d.clone();
        }
        let d = duality_check(table, &self.job.ring, krull_dimension(&self.engine), a, mode);
        self.duality.push(d.clone());
        d
    }

    fn run_task(&mut self, task: Task, table: Option<&CohomologyTable>) -> (Status, String, Option<String>) {
        let ring = &self.job.ring;
        if task == Task::Gorenstein {
            return self.gorenstein();
        }
        let Some(table) = table else {
            let err = self.table.as_ref().and_then(|t| t.as_ref().err()).cloned().unwrap_or_default();
            return (Status::Inconclusive, format!("cohomology table unavailable: {err}"), None);
        };
        match task {
            Task::Cech | Task::Localcoh => {
                let complex = if task == Task::Cech { Complex::Cech } else { Complex::Local };
                let s = TableSummary::of(table, complex);
                let summary = s
                    .sides
                    .iter()
                    .map(|side| format!("{}: {} cells, {} nonzero weights", side.side, side.cells, side.nonzero.len()))
                    .collect::<Vec<_>>()
                    .join("; ");
                if complex == Complex::Cech {
                    self.report.cech = Some(s);
                } else {
                    self.report.local_cohomology = Some(s);
                }
                (Status::Computed, summary, None)
            }
            Task::Crosscheck => {
                let c = crosscheck(&self.engine, table);
                let euler =
                    c.euler_violations.first().map(|(s, mu)| format!("Euler identity fails on {s} side at {mu:?}"));
                let mismatch = c.mismatches.first().map(|m| {
                    format!(
                        "{} side at {:?}: linear algebra {:?}, oracle {:?}",
                        m.side, m.fine_degree, m.linear_algebra, m.oracle
                    )
                });
                let out = if let Some(w) = mismatch.or(euler) {
                    (Status::Fail, format!("{} mismatches", c.mismatches.len() + c.euler_violations.len()), Some(w))
                } else if c.oracle == Oracle::None {
                    (
                        Status::Inconclusive,
                        format!("no cell oracle applies: {}", c.reason.clone().unwrap_or_default()),
                        None,
                    )
                } else if let Some(e) = &c.series_error {
                    (Status::Inconclusive, format!("{} cells agree; series check: {e}", c.cells_checked), None)
                } else {
                    (Status::Pass, format!("{} cells agree with the {:?} oracle", c.cells_checked, c.oracle), None)
                };
                self.report.crosscheck = Some(c);
                out
            }
            Task::Analyze => {
                let c = classify(ring, Some(table));
                let mut summary = format!("a = {}, {}", c.a_parameter, c.kind_label);
                if let Some(b) = &c.bounds {
                    let _ = write!(summary, "; c+ = {}, c- = {}", b.c_plus, b.c_minus);
                }
                let out = match (&c.canonical_vanishing, &c.bounds_error) {
                    (Some(cv), _) if cv.pass => {
                        (Status::Pass, format!("{summary}; canonical vanishing holds at a"), None)
                    }
                    (Some(cv), _) => {
                        let w = cv.witness.as_ref().expect("failures carry witnesses");
                        (
                            Status::Fail,
                            format!("{summary}; canonical vanishing fails"),
                            Some(format!("{} side, weight {}, dims {}", w.side, w.weight, dims_text(&w.dims))),
                        )
                    }
                    (None, e) => (Status::Inconclusive, format!("{summary}; {}", e.clone().unwrap_or_default()), None),
                };
                self.report.classification = Some(c);
                out
            }
            Task::Duality => {
                let a = self.job.document.a.unwrap_or(-ring.sigma());
                let d = self.duality(table, a, self.job.document.mode);
                let tag = if d.diagnostic { " (diagnostic)" } else { "" };
                let out = match d.outcome {
                    Outcome::Pass => (Status::Pass, format!("a = {a}{tag}: {} cells agree", d.cells.len()), None),
                    Outcome::Fail => {
                        let w = d.witness.as_ref().expect("failures carry witnesses");
                        (
                            Status::Fail,
                            format!("a = {a}{tag}: {} of {} cells differ", d.failures.len(), d.cells.len()),
                            Some(format!("j = {}, i = {}: dims {} vs {}", w.j, w.i, w.lhs, w.rhs)),
                        )
                    }
                    Outcome::Inconclusive => {
                        (Status::Inconclusive, format!("a = {a}{tag}: {}", d.reason.clone().unwrap_or_default()), None)
                    }
                };
                self.report.duality = Some(d);
                out
            }
            Task::Windows => self.windows(table),
            Task::Gorenstein => unreachable!("handled above"),
        }
    }

    fn windows(&mut self, table: &CohomologyTable) -> (Status, String, Option<String>) {
        let mut w = WindowsReport::default();
        let mut status = Status::Pass;
        let mut witness = None;
        let mut summary = String::new();
        match max_windows(table) {
            Ok(inv) => {
                let _ = write!(
                    summary,
                    "widths: positive {}, negative {}, simultaneous {}",
                    inv.positive.width, inv.negative.width, inv.simultaneous.width
                );
                w.inventory = Some(inv);
            }
            Err(e) => {
                status = Status::Inconclusive;
                summary = format!("inventory unavailable: {e}");
                w.notes.push(summary.clone());
            }
        }
        let zero = self.duality(table, 0, DualityMode::Weight);
        for raw in &self.job.document.windows {
            let window = Window::new(raw.iter().copied()).expect("validated nonempty");
            let mut notes = Vec::new();
            let (plus, minus) =
                match (slice_check(table, &window, Side::Plus), slice_check(table, &window, Side::Minus)) {
                    (Ok(p), Ok(m)) => (p, m),
                    (Err(e), _) | (_, Err(e)) => {
                        w.notes.push(format!("window {:?}: {e}", window.weights()));
                        if status == Status::Pass {
                            status = Status::Inconclusive;
                        }
                        continue;
                    }
                };
            let strong_plus =
                strong_slice_check(table, &window, Side::Plus).map_err(|e| notes.push(e.to_string())).ok();
            let strong_minus =
                strong_slice_check(table, &window, Side::Minus).map_err(|e| notes.push(e.to_string())).ok();
            let swap = rhom_swap_check(table, &window, &zero).map_err(|e| notes.push(e.to_string())).ok();
            if let Some(v) = swap.as_ref().and_then(|s| s.violations.first()) {
                status = Status::Fail;
                witness.get_or_insert_with(|| {
                    format!(
                        "window {:?}, pair ({}, {}): plus vanishes {}, minus vanishes {}",
                        window.weights(),
                        v.j,
                        v.j_prime,
                        v.plus_vanishes,
                        v.minus_vanishes
                    )
                });
            }
            w.checks.push(WindowCheck { window, plus, minus, strong_plus, strong_minus, swap, notes });
        }
        if !w.checks.is_empty() {
            let _ = write!(summary, "; {} windows checked", w.checks.len());
        }
        self.report.windows = Some(w);
        (status, summary, witness)
    }

    fn gorenstein(&mut self) -> (Status, String, Option<String>) {
        let g = gorenstein_check(&self.engine, &self.job.probe);
        let status = match g.verdict {
            Gorenstein::Unknown => Status::Inconclusive,
            _ => Status::Computed,
        };
        let summary = format!("{:?} via {:?}: {}", g.verdict, g.route, g.detail);
        self.report.gorenstein = Some(g);
        (status, summary, None)
    }
}

/// Runs every requested task and returns the report with its exit code.
pub fn run(job: &Job, cache: &mut TableCache) -> (ReportDocument, RunLog) {
    let ring = Arc::new(job.ring.clone());
    let mut tasks = job.document.tasks.clone();
    tasks.sort();
    tasks.dedup();
    let report = ReportDocument {
        engine: ENGINE_VERSION,
        input_hash: input_hash(job),
        ring: RingSummary {
            ring: CanonicalRing::of(&ring),
            weights: ring.weights().to_vec(),
            sigma: ring.sigma(),
            flip_vector: ring.flip_vector().to_vec(),
        },
        probe: job.probe,
        tasks: Vec::new(),
        classification: None,
        cech: None,
        local_cohomology: None,
        crosscheck: None,
        duality: None,
        windows: None,
        gorenstein: None,
        exit_code: EXIT_PASS,
    };
    let mut runner = Runner { job, engine: AnyEngine::new(ring), table: None, duality: Vec::new(), report };
    let mut lookup = Lookup::Off;
    for task in tasks {
        let start = Instant::now();
        let table = if task.needs_table() { runner.table(cache, &mut lookup).ok() } else { None };
        let (status, summary, witness) = runner.run_task(task, table.as_deref());
        runner.report.tasks.push(TaskReport {
            task,
            status,
            summary,
            witness,
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    let statuses: Vec<Status> = runner.report.tasks.iter().map(|t| t.status).collect();
    runner.report.exit_code = if statuses.contains(&Status::Fail) {
        EXIT_FAIL
    } else if statuses.contains(&Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    };
    let log = RunLog { cache: lookup, warnings: cache.warnings().to_vec() };
    (runner.report, log)
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let r = &self.ring;
        let _ = writeln!(out, "{} over {}", r.ring.variables.join(", "), r.ring.field);
        let _ = writeln!(out, "weights {:?}, sigma {}, c {:?}", r.weights, r.sigma, r.flip_vector);
        if !r.ring.relations.is_empty() {
            let _ = writeln!(out, "relations: {}", r.ring.relations.join(", "));
        }
        let p = &self.probe;
        let _ = writeln!(
            out,
            "box: weights [{}, {}], fine bound {}, kmax {}",
            p.weight_min, p.weight_max, p.fine_bound, p.kmax
        );
        for t in &self.tasks {
            let _ =
                writeln!(out, "{:<11} {:<13} {}", t.task.name(), format!("{:?}", t.status).to_lowercase(), t.summary);
            if let Some(w) = &t.witness {
                let _ = writeln!(out, "{:<25} witness: {w}", "");
            }
        }
        for s in self.local_cohomology.iter().chain(&self.cech) {
            let name = match s.complex {
                Complex::Local => "local cohomology",
                Complex::Cech => "Čech cohomology",
            };
            for side in &s.sides {
                let _ = writeln!(out, "{name}, {} side:", side.side);
                for row in &side.nonzero {
                    let _ = writeln!(out, "  weight {:>4}: {}", row.weight, dims_text(&row.dims));
                }
            }
        }
        let _ = writeln!(out, "exit code {}", self.exit_code);
        out
    }
}

/// Drops timing fields so reports can be compared across runs.
pub fn without_timing(mut json: serde_json::Value) -> serde_json::Value {
    if let Some(tasks) = json.get_mut("tasks").and_then(|t| t.as_array_mut()) {
        for t in tasks {
            if let Some(o) = t.as_object_mut() {
                o.remove("elapsed_ms");
            }
        }
    }
    json
}
