//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use wallcross_cli::cache::{Lookup, TableCache};
use wallcross_cli::config::load_job;
use wallcross_cli::report::{run, without_timing};
use wallcross_core::analyzer::{classify, duality_check, krull_dimension, DualityMode, Kind, Outcome, Smallness};
use wallcross_core::cech::{CechComplexSpec, Side, Truncation};
use wallcross_core::corpus::{example, CATALOG};
use wallcross_core::crosscheck::{crosscheck, Oracle};
use wallcross_core::engine::AnyEngine;
use wallcross_core::poly::parse_polynomial;
use wallcross_core::ring::{validate_ring, ValidatedRing};
use wallcross_core::table::{CohomologyTable, Complex, ProbeBox};
use wallcross_core::toric::{coarse_hilbert_series, gorenstein_check, Gorenstein};
use wallcross_core::window::{max_windows, rhom_swap_check, slice_check, strong_slice_check, Window};

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    failures: Vec<String>,
    start: Instant,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str, budget_secs: u64) -> Self {
        Self { id, title, budget: Duration::from_secs(budget_secs), failures: Vec::new(), start: Instant::now() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, got: T, want: T) {
        if got != want {
            self.failures.push(format!("{what}: got {got:?}, expected {want:?}"));
        }
    }

    fn finish(mut self) -> bool {
        let elapsed = self.start.elapsed();
        if elapsed > self.budget {
            self.failures.push(format!("took {:.2}s, budget {}s", elapsed.as_secs_f64(), self.budget.as_secs()));
        }
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} {} {} ({:.2}s)", self.id, self.title, elapsed.as_secs_f64());
        for f in &self.failures {
            println!("       {f}");
        }
        self.failures.is_empty()
    }
}

fn ring(name: &str) -> Arc<ValidatedRing> {
    Arc::new(validate_ring(example(name).unwrap().spec()).unwrap())
}

fn standard_table(ring: &Arc<ValidatedRing>) -> (AnyEngine, CohomologyTable) {
    let e = AnyEngine::new(ring.clone());
    let t = CohomologyTable::compute(&e, ProbeBox::new(-8, 8, 12, 32).unwrap()).unwrap();
    (e, t)
}

fn h2(t: &CohomologyTable, side: Side, i: i64) -> Option<usize> {
    t.weight_aggregate(side, Complex::Local, 2, i).finite()
}

/// Laurent monomials of weight `i`, exponents `<= -1` on the side's
/// variables and `>= 0` elsewhere.
fn laurent_count(weights: &[i64], side: Side, i: i64) -> usize {
    let sign = if side == Side::Plus { -1 } else { 1 };
    let vars: Vec<(i64, i64)> = weights
        .iter()
        .map(|&w| if (w > 0) == (side == Side::Plus) { (w.abs(), w.abs()) } else { (0, w.abs()) })
        .collect();
    fn rec(vars: &[(i64, i64)], rem: i64) -> usize {
        let Some((&(first, step), rest)) = vars.split_first() else {
            return usize::from(rem == 0);
        };
        (0..).map(|k| first + k * step).take_while(|&v| v <= rem).map(|v| rec(rest, rem - v)).sum()
    }
    if sign * i < 0 {
        0
    } else {
        rec(&vars, sign * i)
    }
}

fn binomial(n: i64, k: i64) -> usize {
    (0..k).fold(1usize, |acc, j| acc * (n - j) as usize / (j + 1) as usize)
}

fn c1(tables: &mut Vec<(String, CohomologyTable)>) -> bool {
    let mut c = Criterion::new("C1", "conifold flop suite", 10);
    let r = ring("conifold");
    let (e, t) = standard_table(&r);
    let cl = classify(&r, Some(&t));
    c.eq("kind", (cl.kind, cl.a_parameter), (Kind::Flop, 0));
    c.eq("smallness", (cl.smallness.plus.verdict, cl.smallness.minus.verdict), (Smallness::Small, Smallness::Small));
    c.eq("bounds", cl.bounds.map(|b| (b.c_plus, b.c_minus)), Some((-1, 1)));
    c.check("canonical vanishing at 0", cl.canonical_vanishing.as_ref().is_some_and(|v| v.pass));
    let d = duality_check(&t, &r, krull_dimension(&e), 0, DualityMode::Weight);
    c.eq("duality(0)", d.outcome, Outcome::Pass);
    c.check("duality compared cells", !d.cells.is_empty() && d.cells.iter().all(|x| x.equal));
    for i in [-2, -3, -4] {
        let oracle = binomial(-i + 1, 3);
        c.eq(&format!("H^2(RΓ+)_{i} vs binomial"), h2(&t, Side::Plus, i), Some(oracle));
        c.eq(
            &format!("H^2(RΓ+)_{i} vs enumeration"),
            h2(&t, Side::Plus, i),
            Some(laurent_count(&[1, 1, -1, -1], Side::Plus, i)),
        );
    }
    match max_windows(&t) {
        Ok(inv) => c.eq("simultaneous width", inv.simultaneous.width, 2),
        Err(err) => c.check(format!("window inventory: {err}"), false),
    }
    tables.push(("conifold".into(), t));
    c.finish()
}

fn c2(tables: &mut Vec<(String, CohomologyTable)>) -> bool {
    let mut c = Criterion::new("C2", "Francia flip suite", 10);
    let r = ring("francia");
    let (e, t) = standard_table(&r);
    let cl = classify(&r, None);
    c.eq("a", (cl.a_parameter, cl.kind), (1, Kind::Flip));
    let d = duality_check(&t, &r, krull_dimension(&e), 1, DualityMode::Weight);
    c.eq("duality(1)", d.outcome, Outcome::Pass);
    c.check("exceptional window empty", d.exceptional_window.is_empty());
    let w = [1, 1, -1, -2];
    c.eq("H^2(RΓ+)_-3", h2(&t, Side::Plus, -3), Some(laurent_count(&w, Side::Plus, -3)));
    c.eq("H^2(RΓ-)_4", h2(&t, Side::Minus, 4), Some(laurent_count(&w, Side::Minus, 4)));
    c.eq("H^2 spot value", (h2(&t, Side::Plus, -3), h2(&t, Side::Minus, 4)), (Some(3), Some(3)));
    match max_windows(&t) {
        Ok(inv) => c.eq("positive/negative widths", (inv.positive.width, inv.negative.width), (2, 3)),
        Err(err) => c.check(format!("window inventory: {err}"), false),
    }
    tables.push(("francia".into(), t));
    c.finish()
}

fn c3(tables: &mut Vec<(String, CohomologyTable)>) -> bool {
    let mut c = Criterion::new("C3", "antiflip negative control", 10);
    let r = ring("antiflip");
    let (e, t) = standard_table(&r);
    let cl = classify(&r, None);
    c.eq("classification", (cl.kind, cl.a_parameter), (Kind::Antiflip, -2));
    let d = duality_check(&t, &r, krull_dimension(&e), 0, DualityMode::Weight);
    c.eq("duality(0)", d.outcome, Outcome::Fail);
    let w = [3, 1, -1, -1];
    let oracle = (laurent_count(&w, Side::Plus, -4), laurent_count(&w, Side::Minus, 4));
    c.eq("oracle dims at i = -4", oracle, (1, 6));
    c.eq("witness", d.witness.map(|x| (x.i, x.lhs, x.rhs)), Some((-4, oracle.0, oracle.1)));
    let diag = duality_check(&t, &r, krull_dimension(&e), -2, DualityMode::Weight);
    c.check("diagnostic flag", diag.diagnostic);
    c.eq("duality(-2)", diag.outcome, Outcome::Pass);
    tables.push(("antiflip".into(), t));
    c.finish()
}

fn c4(tables: &mut Vec<(String, CohomologyTable)>) -> bool {
    let mut c = Criterion::new("C4", "engine cross-validation", 60);
    let r = ring("hypersurface");
    let e = AnyEngine::new(r.clone());
    // weights of |mu|_1 <= 6 span [-12, 12], so no degree is filtered out
    let t = CohomologyTable::compute(&e, ProbeBox::new(-12, 12, 6, 32).unwrap()).unwrap();
    let x = crosscheck(&e, &t);
    c.eq("hypersurface oracle", x.oracle, Oracle::SemigroupLattice);
    c.eq("hypersurface cells", x.cells_checked, 2 * 85);
    c.check(format!("hypersurface mismatches: {:?}", x.mismatches.first()), x.mismatches.is_empty());
    tables.push(("hypersurface".into(), t));
    for ex in CATALOG {
        let r = ring(ex.name);
        if !r.relations().is_empty() {
            continue;
        }
        let bound = if r.rank() > 2 { 5 } else { 12 };
        let e = AnyEngine::new(r.clone());
        let t = CohomologyTable::compute(&e, ProbeBox::new(-8, 8, bound, 32).unwrap()).unwrap();
        let x = crosscheck(&e, &t);
        c.eq(&format!("{} oracle", ex.name), x.oracle, Oracle::ClosedForm);
        c.check(format!("{} mismatches: {:?}", ex.name, x.mismatches.first()), x.mismatches.is_empty());
        c.check(format!("{} cells", ex.name), x.cells_checked > 0);
        tables.push((ex.name.into(), t));
    }
    c.finish()
}

fn c5(tables: &[(String, CohomologyTable)]) -> bool {
    let mut c = Criterion::new("C5", "property suites", 60);

    // (a) generator invariance
    let r = ring("conifold");
    let e = AnyEngine::new(r.clone());
    let gens = ["x", "y", "x + y"].iter().map(|g| parse_polynomial(g, r.names()).unwrap()).collect();
    let three = CechComplexSpec::with_generators(&r, Side::Plus, gens).unwrap();
    let two = CechComplexSpec::irrelevant(&r, Side::Plus);
    let cells = ProbeBox::new(-6, 6, 6, 32).unwrap().cells(&r);
    c.check(format!("only {} sampled degrees", cells.len()), cells.len() >= 50);
    let trim = |mut v: Vec<usize>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    for mu in &cells {
        let a = e.local_cohomology(&two, mu, Truncation::default()).unwrap();
        let b = e.local_cohomology(&three, mu, Truncation::default()).unwrap();
        c.check(
            format!("generator invariance at {mu:?}"),
            trim(a.local) == trim(b.local) && trim(a.cech) == trim(b.cech),
        );
    }

    // (b) Euler conservation in every computed degree
    let mut degrees = 0;
    for (name, t) in tables {
        for x in t.entries() {
            degrees += 1;
            c.check(
                format!("Euler identity in {name} at {:?}", x.fine_degree),
                x.ring_dim as i64 == x.euler_local() + x.euler_cech(),
            );
        }
    }
    c.check("Euler identity checked somewhere", degrees > 1000);

    // (c) translation invariance and strong implies plain
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    let strategy = (prop::collection::vec(-3i64..=3, 1..=4), -10i64..=10, 0usize..3);
    let result = runner.run(&strategy, |(raw, shift, which)| {
        let t = &tables[which].1;
        let w = Window::new(raw).unwrap();
        let moved = w.translate(shift);
        for side in [Side::Plus, Side::Minus] {
            let (p, q) = (slice_check(t, &w, side).unwrap(), slice_check(t, &moved, side).unwrap());
            prop_assert_eq!((p.pass, p.witness_difference), (q.pass, q.witness_difference));
            let (sp, sq) = (strong_slice_check(t, &w, side).unwrap(), strong_slice_check(t, &moved, side).unwrap());
            prop_assert_eq!(sp.pass, sq.pass);
            prop_assert!(!sp.pass || p.pass);
        }
        Ok(())
    });
    c.check(format!("window properties: {result:?}"), result.is_ok());

    // (d) swap on the conifold
    let t = &tables[0].1;
    let d = duality_check(t, &r, krull_dimension(&e), 0, DualityMode::Weight);
    match rhom_swap_check(t, &Window::interval(-3, 7).unwrap(), &d) {
        Ok(s) => c.eq("swap pairs and violations", (s.pairs_checked, s.violations.len()), (49, 0)),
        Err(err) => c.check(format!("swap: {err}"), false),
    }
    c.finish()
}

fn c6() -> bool {
    let mut c = Criterion::new("C6", "Gorenstein consequence checks", 5);
    let probe = ProbeBox::new(-6, 6, 12, 32).unwrap();
    for ex in CATALOG {
        let r = ring(ex.name);
        if r.relations().len() > 1 {
            continue;
        }
        let g = gorenstein_check(&AnyEngine::new(r), &probe);
        c.eq(ex.name, g.verdict, Gorenstein::Gorenstein);
    }
    let e = AnyEngine::new(ring("twisted_cubic"));
    c.eq("twisted cubic", gorenstein_check(&e, &probe).verdict, Gorenstein::NotGorenstein);
    match coarse_hilbert_series(&e) {
        Ok(s) => {
            // the semigroup has 3m + 1 monomials s^i t^j with i + j = 3m
            let num: Vec<i64> = s.numerator.iter().map(|x| x.try_into().unwrap()).collect();
            let mut series = vec![0i64; 12];
            series[..num.len()].copy_from_slice(&num);
            for &d in &s.denominator {
                for k in d as usize..12 {
                    series[k] += series[k - d as usize];
                }
            }
            c.eq("coarse series expansion", series, (0..12).map(|m| 3 * m + 1).collect());
            c.check("series asymmetric", !s.is_symmetric());
        }
        Err(err) => c.check(format!("coarse series: {err}"), false),
    }
    c.finish()
}

fn c7() -> bool {
    let mut c = Criterion::new("C7", "deterministic cached reports", 30);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("jobs/conifold.toml");
    let dir = tempfile::tempdir().unwrap();
    let job = load_job(&path).unwrap().validate().unwrap();
    let mut reports = Vec::new();
    let mut lookups = Vec::new();
    for _ in 0..2 {
        let mut cache = TableCache::new(Some(dir.path()));
        let (report, log) = run(&job, &mut cache);
        c.eq("exit code", report.exit_code, 0);
        lookups.push(log.cache);
        reports.push(serde_json::to_string(&without_timing(serde_json::to_value(&report).unwrap())).unwrap());
    }
    c.eq("cache lookups", lookups, vec![Lookup::Miss, Lookup::Hit]);
    c.check("reports byte-identical modulo timing", reports[0] == reports[1]);
    c.finish()
}

fn main() {
    let mut tables = Vec::new();
    let results = [c1(&mut tables), c2(&mut tables), c3(&mut tables), c4(&mut tables), c5(&tables), c6(), c7()];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
