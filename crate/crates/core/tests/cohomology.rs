mod common;

use common::{binomial, laurent_count, ring, table, weights_ring};
use proptest::prelude::*;
use wallcross_core::cech::{CechComplexSpec, Side, Truncation};
use wallcross_core::corpus::CATALOG;
use wallcross_core::crosscheck::{crosscheck, Oracle};
use wallcross_core::engine::AnyEngine;
use wallcross_core::poly::parse_polynomial;
use wallcross_core::ring::{validate_ring, FieldSpec};
use wallcross_core::table::{Aggregate, Complex, ProbeBox};
use wallcross_core::toric::{closed_form_dims, Target};

fn trimmed(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

#[test]
fn oracle_self_check() {
    // x^-a y^-b u^c v^d with a, b >= 1 and a + b + c + d = -i
    for i in -8..=-2 {
        assert_eq!(laurent_count(&[1, 1, -1, -1], Side::Plus, i), binomial(-i + 1, 3));
    }
    assert_eq!(laurent_count(&[1, 1, -1, -2], Side::Plus, -3), 3);
    assert_eq!(laurent_count(&[1, 1, -1, -2], Side::Minus, 4), 3);
    assert_eq!(laurent_count(&[1], Side::Plus, 0), 0);
    assert_eq!(laurent_count(&[1], Side::Plus, -5), 1);
}

#[test]
fn weight_aggregates_match_brute_force() {
    for (name, w) in [("conifold", [1, 1, -1, -1]), ("francia", [1, 1, -1, -2]), ("antiflip", [3, 1, -1, -1])] {
        let r = ring(name);
        let (_, t) = table(&r, -6, 6, 9);
        for side in [Side::Plus, Side::Minus] {
            for i in -6..=6 {
                let expected = laurent_count(&w, side, i) as usize;
                let got = t.weight_aggregate(side, Complex::Local, 2, i);
                assert_eq!(got, Aggregate::Finite { dim: expected }, "{name} {side} i={i}");
            }
        }
    }
}

#[test]
fn generator_invariance_on_conifold() {
    let r = ring("conifold");
    let e = AnyEngine::new(r.clone());
    let names = r.names();
    let gens: Vec<_> = ["x", "y", "x + y"].iter().map(|g| parse_polynomial(g, names).unwrap()).collect();
    let three = CechComplexSpec::with_generators(&r, Side::Plus, gens).unwrap();
    let two = CechComplexSpec::irrelevant(&r, Side::Plus);
    let cells = ProbeBox::new(-6, 6, 6, 32).unwrap().cells(&r);
    assert!(cells.len() >= 50);
    for mu in &cells {
        let a = e.local_cohomology(&two, mu, Truncation::default()).unwrap();
        let b = e.local_cohomology(&three, mu, Truncation::default()).unwrap();
        assert_eq!(trimmed(a.local.clone()), trimmed(b.local.clone()), "RΓ at {mu:?}");
        assert_eq!(trimmed(a.cech.clone()), trimmed(b.cech.clone()), "Č at {mu:?}");
    }
}

#[test]
fn euler_identity_on_every_corpus_table() {
    for ex in CATALOG {
        let r = ring(ex.name);
        let bound = if r.rank() > 2 { 5 } else { 8 };
        let (_, t) = table(&r, -5, 5, bound);
        for e in t.entries() {
            assert_eq!(e.ring_dim as i64, e.euler_local() + e.euler_cech(), "{} at {:?}", ex.name, e.fine_degree);
        }
    }
}

#[test]
fn differentials_square_to_zero() {
    for name in ["hypersurface", "twisted_cubic", "francia"] {
        let r = ring(name);
        let e = AnyEngine::new(r.clone());
        for side in [Side::Plus, Side::Minus] {
            let spec = CechComplexSpec::irrelevant(&r, side);
            for mu in ProbeBox::new(-3, 3, 4, 32).unwrap().cells(&r) {
                let p = e.cech_piece(&spec, &mu, 3).unwrap();
                assert!(p.d_squared_zero, "{name} {side} {mu:?}");
            }
        }
    }
}

#[test]
fn prime_field_agrees_with_rationals_on_binomial_rings() {
    for name in ["hypersurface", "twisted_cubic"] {
        let mut spec = wallcross_core::corpus::example(name).unwrap().spec();
        let q = ring(name);
        spec.field = FieldSpec::Prime(32003);
        let p = std::sync::Arc::new(validate_ring(spec).unwrap());
        let (_, tq) = table(&q, -4, 4, 6);
        let (_, tp) = table(&p, -4, 4, 6);
        assert_eq!(tq.plus.entries, tp.plus.entries);
        assert_eq!(tq.minus.entries, tp.minus.entries);
    }
}

#[test]
fn relation_free_corpus_matches_closed_form() {
    for ex in CATALOG {
        let r = ring(ex.name);
        if !r.relations().is_empty() {
            continue;
        }
        let bound = if r.rank() > 2 { 5 } else { 8 };
        let (e, t) = table(&r, -6, 6, bound);
        let c = crosscheck(&e, &t);
        assert_eq!(c.oracle, Oracle::ClosedForm);
        assert!(c.pass(), "{}: {:?}", ex.name, c.mismatches.first());
        assert_eq!(c.cells_checked, t.plus.entries.len() + t.minus.entries.len());
    }
}

#[test]
fn hypersurface_matches_lattice_enumeration() {
    let r = ring("hypersurface");
    let (e, t) = table(&r, -12, 12, 6);
    let c = crosscheck(&e, &t);
    assert_eq!(c.oracle, Oracle::SemigroupLattice);
    assert!(c.pass(), "{:?}", c.mismatches.first());
    // every Z^2 degree of L1 norm at most 6, on both sides
    assert_eq!(c.cells_checked, 2 * 85);
}

fn weight_vectors() -> impl Strategy<Value = Vec<i64>> {
    (prop::collection::vec(1i64..=3, 1..=2), prop::collection::vec(-3i64..=-1, 1..=2))
        .prop_map(|(p, n)| p.into_iter().chain(n).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn random_polynomial_rings_match_closed_form(w in weight_vectors()) {
        let r = weights_ring(&w);
        let (e, t) = table(&r, -4, 4, 5);
        let c = crosscheck(&e, &t);
        prop_assert!(c.pass(), "{:?}", c.mismatches.first());
    }
}

proptest! {
    #[test]
    fn closed_form_duality_symmetry(w in weight_vectors(), i in -12i64..=12) {
        let r = weights_ring(&w);
        let sigma = r.sigma();
        let plus = closed_form_dims(&r, Side::Plus, &Target::Weight(i)).unwrap();
        let minus = closed_form_dims(&r, Side::Minus, &Target::Weight(-i - sigma)).unwrap();
        prop_assert_eq!(plus.dim, minus.dim);
        prop_assert_eq!(plus.dim, u128::from(laurent_count(&w, Side::Plus, i)));
    }

    #[test]
    fn closed_form_fine_symmetry(w in weight_vectors(), a in -8i64..=8, b in -8i64..=8) {
        let r = weights_ring(&w);
        let c = r.flip_vector().to_vec();
        let mu = vec![a, b];
        let nu = vec![-a - c[0], -b - c[1]];
        let plus = closed_form_dims(&r, Side::Plus, &Target::Fine(mu)).unwrap();
        let minus = closed_form_dims(&r, Side::Minus, &Target::Fine(nu)).unwrap();
        prop_assert_eq!(plus.dim, minus.dim);
    }
}
