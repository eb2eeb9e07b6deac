//! Sparse exact linear algebra: echelon bases, ranks, kernels and normal
//! forms.
//!
//! Vectors are sorted `(index, value)` lists with no explicit zeros. Pivots
//! are always taken at the leftmost (smallest) nonzero index, so every basis
//! choice made here is reproducible.

use std::collections::HashMap;

use crate::field::Field;

pub type SparseVec<E> = Vec<(usize, E)>;

/// `x + c * y`.
pub fn axpy<F: Field>(field: &F, x: &SparseVec<F::Elem>, c: &F::Elem, y: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            let v = field.mul(c, &y[j].1);
            if !field.is_zero(&v) {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = field.add(&x[i].1, &field.mul(c, &y[j].1));
            if !field.is_zero(&v) {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale<F: Field>(field: &F, c: &F::Elem, x: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    if field.is_zero(c) {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, field.mul(c, v))).collect()
}

/// Builds a sparse vector from unsorted entries, summing duplicates.
pub fn collect_sparse<F: Field>(field: &F, mut entries: Vec<(usize, F::Elem)>) -> SparseVec<F::Elem> {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseVec<F::Elem> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = field.add(&last.1, &v),
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !field.is_zero(v));
    out
}

/// A column-major sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<E> {
    pub nrows: usize,
    pub ncols: usize,
    pub cols: Vec<SparseVec<E>>,
}

impl<E: Clone> SparseMatrix<E> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, cols: vec![Vec::new(); ncols] }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec<E>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.iter().all(|(i, _)| *i < nrows)));
        Self { nrows, ncols: cols.len(), cols }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

/// `a * b`, where `a.ncols == b.nrows`.
pub fn matmul<F: Field>(field: &F, a: &SparseMatrix<F::Elem>, b: &SparseMatrix<F::Elem>) -> SparseMatrix<F::Elem> {
    assert_eq!(a.ncols, b.nrows, "dimension mismatch in matmul");
    let cols = b.cols.iter().map(|col| apply(field, a, col)).collect();
    SparseMatrix { nrows: a.nrows, ncols: b.ncols, cols }
}

/// `m * v`.
pub fn apply<F: Field>(field: &F, m: &SparseMatrix<F::Elem>, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    let mut acc = Vec::new();
    for (j, c) in v {
        acc = axpy(field, &acc, c, &m.cols[*j]);
    }
    acc
}

/// Incrementally built echelon basis of a subspace.
///
/// Each stored row is monic at its pivot, which is its smallest index. Rows
/// are not inter-reduced; [`Echelon::reduce`] still returns the unique normal
/// form because it sweeps pivots in increasing index order.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    field: F,
    rows: Vec<SparseVec<F::Elem>>,
    pivot_of: HashMap<usize, usize>,
    track: Option<Vec<SparseVec<F::Elem>>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Self { field, rows: Vec::new(), pivot_of: HashMap::new(), track: None }
    }

    /// Records, for every row, the combination of inserted vectors producing it.
    pub fn with_tracking(field: F) -> Self {
        Self { field, rows: Vec::new(), pivot_of: HashMap::new(), track: Some(Vec::new()) }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r[0].0)
    }

    pub fn is_pivot(&self, idx: usize) -> bool {
        self.pivot_of.contains_key(&idx)
    }

    /// Normal form of `v` modulo the span: no entry sits at a pivot index.
    pub fn reduce(&self, v: SparseVec<F::Elem>) -> SparseVec<F::Elem> {
        self.reduce_tracked(v, None).0
    }

    fn reduce_tracked(
        &self,
        mut v: SparseVec<F::Elem>,
        mut comb: Option<SparseVec<F::Elem>>,
    ) -> (SparseVec<F::Elem>, Option<SparseVec<F::Elem>>) {
        let f = &self.field;
        let mut pos = 0;
        while pos < v.len() {
            let idx = v[pos].0;
            match self.pivot_of.get(&idx) {
                Some(&r) => {
                    let c = f.neg(&v[pos].1);
                    v = axpy(f, &v, &c, &self.rows[r]);
                    if let (Some(cb), Some(track)) = (comb.as_mut(), self.track.as_ref()) {
                        *cb = axpy(f, cb, &c, &track[r]);
                    }
                }
                None => pos += 1,
            }
        }
        (v, comb)
    }

    /// Adds `v` to the spanning set. Returns `true` if the rank grew.
    pub fn insert(&mut self, v: SparseVec<F::Elem>) -> bool {
        self.insert_tracked(v, Vec::new()).is_none()
    }

    /// Inserts `v` whose expression in terms of the caller's generators is
    /// `comb`. If `v` is dependent, returns the relation among generators.
    pub fn insert_tracked(&mut self, v: SparseVec<F::Elem>, comb: SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let tracking = self.track.is_some();
        let (v, comb) = self.reduce_tracked(v, tracking.then_some(comb));
        if v.is_empty() {
            return Some(comb.unwrap_or_default());
        }
        let f = &self.field;
        let lead_inv = f.inv(&v[0].1);
        let row = scale(f, &lead_inv, &v);
        self.pivot_of.insert(row[0].0, self.rows.len());
        self.rows.push(row);
        if let (Some(track), Some(cb)) = (self.track.as_mut(), comb) {
            track.push(scale(f, &lead_inv, &cb));
        }
        None
    }
}

pub fn rank<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> usize {
    let mut ech = Echelon::new(field.clone());
    for col in &m.cols {
        ech.insert(col.clone());
    }
    ech.rank()
}

/// A basis of `{x : m x = 0}`, as sparse vectors over the column indices.
pub fn kernel<F: Field>(field: &F, m: &SparseMatrix<F::Elem>) -> Vec<SparseVec<F::Elem>> {
    let mut ech = Echelon::with_tracking(field.clone());
    let mut out = Vec::new();
    for (j, col) in m.cols.iter().enumerate() {
        if let Some(rel) = ech.insert_tracked(col.clone(), vec![(j, field.one())]) {
            out.push(rel);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn dense_to_cols(rows: &[Vec<i64>]) -> SparseMatrix<num_rational::BigRational> {
        let q = Rationals;
        let nrows = rows.len();
        let ncols = rows[0].len();
        let cols = (0..ncols)
            .map(|j| (0..nrows).filter(|&i| rows[i][j] != 0).map(|i| (i, q.from_i64(rows[i][j]))).collect())
            .collect();
        SparseMatrix::from_columns(nrows, cols)
    }

    #[test]
    fn rank_of_small_matrices() {
        let q = Rationals;
        assert_eq!(rank(&q, &dense_to_cols(&[vec![1, 2, 3], vec![2, 4, 6]])), 1);
        assert_eq!(rank(&q, &dense_to_cols(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]])), 3);
        // over GF(2) the last matrix is singular
        let f2 = PrimeField::new(2).unwrap();
        let m = SparseMatrix::from_columns(3, vec![vec![(0, 1), (2, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (1, 1)]]);
        assert_eq!(rank(&f2, &m), 2);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let q = Rationals;
        let m = dense_to_cols(&[vec![1, 1, 0, 2], vec![0, 1, 1, 1]]);
        let ker = kernel(&q, &m);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(apply(&q, &m, v).is_empty());
        }
    }

    #[test]
    fn reduce_gives_normal_form_off_pivots() {
        let q = Rationals;
        let mut ech = Echelon::new(q);
        ech.insert(vec![(0, q.from_i64(1)), (3, q.from_i64(-1))]);
        ech.insert(vec![(1, q.from_i64(2)), (3, q.from_i64(2))]);
        let nf = ech.reduce(vec![(0, q.from_i64(1)), (1, q.from_i64(1))]);
        // x0 = x3, x1 = -x3  =>  x0 + x1 = 0
        assert!(nf.is_empty());
        let nf = ech.reduce(vec![(0, q.from_i64(1)), (2, q.from_i64(5))]);
        assert_eq!(nf, vec![(2, q.from_i64(5)), (3, q.from_i64(1))]);
    }
}
