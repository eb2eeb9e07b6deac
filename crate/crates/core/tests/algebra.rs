mod common;

use common::ring;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use wallcross_core::engine::AnyEngine;
use wallcross_core::field::{Field, PrimeField, Rationals};
use wallcross_core::lattice::{count_solutions, enumerate_solutions};
use wallcross_core::linalg::{apply, kernel, rank, SparseMatrix};
use wallcross_core::ring::degree_zero_generators;
use wallcross_core::table::ProbeBox;
use wallcross_core::toric::hilbert_series;

/// Fraction-free elimination over i128.
fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
    let (mut r, mut prev) = (0, 1i128);
    for c in 0..nc {
        let Some(p) = (r..nr).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..nr {
            for j in c + 1..nc {
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
    }
    r
}

fn sparse<F: Field>(field: &F, rows: &[Vec<i64>]) -> SparseMatrix<F::Elem> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    let cols = (0..nc)
        .map(|c| (0..nr).filter(|&r| rows[r][c] != 0).map(|r| (r, field.from_i64(rows[r][c]))).collect())
        .collect();
    SparseMatrix::from_columns(nr, cols)
}

fn matrices() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

proptest! {
    #[test]
    fn rank_matches_exact_elimination(rows in matrices()) {
        let q = Rationals;
        let m = sparse(&q, &rows);
        let rk = rank(&q, &m);
        prop_assert_eq!(rk, bareiss_rank(&rows));
        let transposed: Vec<Vec<i64>> = (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        prop_assert_eq!(rk, rank(&q, &sparse(&q, &transposed)));
        let p = PrimeField::new(7).unwrap();
        prop_assert!(rank(&p, &sparse(&p, &rows)) <= rk);
    }

    #[test]
    fn kernel_is_annihilated_and_complementary(rows in matrices()) {
        let q = Rationals;
        let m = sparse(&q, &rows);
        let ker = kernel(&q, &m);
        prop_assert_eq!(ker.len() + rank(&q, &m), rows[0].len());
        for v in &ker {
            prop_assert!(apply(&q, &m, v).is_empty());
        }
        let basis = SparseMatrix::from_columns(rows[0].len(), ker.clone());
        prop_assert_eq!(rank(&q, &basis), ker.len());
    }

    #[test]
    fn piece_dims_of_polynomial_rings_count_monomials(a in 0i64..=9, b in 0i64..=9) {
        // x: (3,0), y: (1,0), u, v: (0,1)
        let r = ring("antiflip");
        let e = AnyEngine::new(r.clone());
        let brute = (0..=a / 3).filter(|i| a - 3 * i >= 0).count() * (b as usize + 1);
        prop_assert_eq!(e.dim(&[a, b]).unwrap(), brute);
    }

    #[test]
    fn enumeration_and_counting_agree(a in -4i64..=8, b in -4i64..=8) {
        let vectors = vec![vec![1, 0], vec![2, 1], vec![0, 1], vec![1, 1]];
        let f = [1, 1];
        let sols = enumerate_solutions(&vectors, &f, &[a, b]);
        prop_assert_eq!(sols.len() as u128, count_solutions(&vectors, &f, &[a, b]));
        for s in sols {
            let sum: Vec<i64> = (0..2).map(|k| s.iter().zip(&vectors).map(|(&c, v)| c as i64 * v[k]).sum()).collect();
            prop_assert_eq!(sum, vec![a, b]);
        }
    }
}

#[test]
fn hypersurface_pieces_match_hand_counts() {
    // A_(a,b) = monomials of S_(a,b) minus the image of (xu - yv) from S_(a-1,b-1)
    let r = ring("hypersurface");
    let e = AnyEngine::new(r);
    for a in 0..6i64 {
        for b in 0..6i64 {
            let s = |a: i64, b: i64| if a < 0 || b < 0 { 0 } else { ((a + 1) * (b + 1)) as usize };
            assert_eq!(e.dim(&[a, b]).unwrap(), s(a, b) - s(a - 1, b - 1));
        }
    }
}

#[test]
fn hilbert_series_expands_to_piece_dims() {
    for name in ["hypersurface", "conifold", "line", "francia"] {
        let r = ring(name);
        let e = AnyEngine::new(r.clone());
        let probe = ProbeBox::new(-6, 6, 8, 32).unwrap();
        let s = hilbert_series(&e, &probe).unwrap();
        for mu in probe.cells(&r) {
            assert_eq!(s.coefficient(&r, &mu), BigInt::from(e.dim(&mu).unwrap()), "{name} {mu:?}");
        }
    }
}

#[test]
fn degree_zero_generators_of_the_corpus() {
    let names = |name: &str| {
        let r = ring(name);
        let g = degree_zero_generators(&r, 6);
        g.generators.iter().map(|m| m.display(r.names()).to_string()).collect::<Vec<_>>()
    };
    assert_eq!(names("conifold"), ["x*u", "x*v", "y*u", "y*v"]);
    assert_eq!(names("francia"), ["x*u", "y*u", "x^2*v", "x*y*v", "y^2*v"]);
    assert!(names("line").is_empty());
}

#[test]
fn rationals_format_integers_plainly() {
    let q = Rationals;
    assert_eq!(q.format(&BigRational::from_integer(BigInt::from(-4))), "-4");
}
