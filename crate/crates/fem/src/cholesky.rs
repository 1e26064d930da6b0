//! Sparse Cholesky factorization of symmetric positive definite systems
//! over a fixed sparsity pattern, backed by faer's supernodal solver with
//! an AMD fill-reducing ordering.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::LltError;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, LltRef, SymbolicCholesky};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par, Side};

use crate::{Error, Result};

/// Lower-triangle pattern with its symbolic factorization.
pub struct SpdPattern {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    symbolic: SymbolicCholesky<usize>,
}

impl SpdPattern {
    /// `coupled[j]` lists the rows `i >= j` that may be nonzero in column
    /// `j`; the diagonal is always included.
    pub fn new(coupled: &[Vec<usize>]) -> Result<Self> {
        let n = coupled.len();
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for (j, rows) in coupled.iter().enumerate() {
            let mut rows: Vec<usize> = rows.iter().copied().filter(|&i| i >= j && i < n).collect();
            rows.push(j);
            rows.sort_unstable();
            rows.dedup();
            row_idx.extend(rows);
            col_ptr.push(row_idx.len());
        }
        let structure = SymbolicSparseColMatRef::new_checked(n, n, &col_ptr, None, &row_idx);
        let symbolic = factorize_symbolic_cholesky(structure, Side::Lower, Default::default(), Default::default())
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Self {
            n,
            col_ptr,
            row_idx,
            symbolic,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn zeros(&self) -> SpdMatrix<'_> {
        SpdMatrix {
            pattern: self,
            values: vec![0.0; self.row_idx.len()],
        }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        self.row_idx[lo..hi].binary_search(&i).ok().map(|k| lo + k)
    }
}

/// Symmetric matrix over an [`SpdPattern`], storing the lower triangle.
pub struct SpdMatrix<'p> {
    pattern: &'p SpdPattern,
    values: Vec<f64>,
}

impl<'p> SpdMatrix<'p> {
    /// Adds `v` at `(i, j)`. Entries above the diagonal are ignored so a
    /// full symmetric block can be scattered as is.
    ///
    /// Panics if `(i, j)` lies below the diagonal but outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if j > i {
            return;
        }
        let k = self
            .pattern
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        self.pattern.slot(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn factorize(&self) -> Result<SpdFactor<'p>> {
        let p = self.pattern;
        let structure = SymbolicSparseColMatRef::new_checked(p.n, p.n, &p.col_ptr, None, &p.row_idx);
        let a = SparseColMatRef::new(structure, &self.values);
        let mut l = vec![0.0; p.symbolic.len_val()];
        let par = Par::Seq;
        let mut mem = MemBuffer::new(p.symbolic.factorize_numeric_llt_scratch::<f64>(par, Default::default()));
        p.symbolic
            .factorize_numeric_llt(
                &mut l,
                a,
                Side::Lower,
                Default::default(),
                par,
                MemStack::new(&mut mem),
                Default::default(),
            )
            .map_err(|LltError::NonPositivePivot { index }| Error::NotPositiveDefinite(index))?;
        Ok(SpdFactor { pattern: p, l })
    }
}

pub struct SpdFactor<'p> {
    pattern: &'p SpdPattern,
    l: Vec<f64>,
}

impl SpdFactor<'_> {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let symbolic = &self.pattern.symbolic;
        let mut x = b.to_vec();
        let par = Par::Seq;
        let mut mem = MemBuffer::new(symbolic.solve_in_place_scratch::<f64>(1, par));
        let rhs = MatMut::from_column_major_slice_mut(&mut x, b.len(), 1);
        LltRef::new(symbolic, &self.l).solve_in_place_with_conj(Conj::No, rhs, par, MemStack::new(&mut mem));
        x
    }
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Random banded SPD matrix with a few long-range couplings.
    fn sample(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(3)..i {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        for _ in 0..n / 4 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        for i in 0..n {
            a[(i, i)] = 1.0 + (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum::<f64>();
        }
        a
    }

    fn to_sparse(a: &DMatrix<f64>) -> SpdPattern {
        let n = a.nrows();
        let coupled: Vec<Vec<usize>> = (0..n).map(|j| (j..n).filter(|&i| a[(i, j)] != 0.0).collect()).collect();
        SpdPattern::new(&coupled).unwrap()
    }

    #[test]
    fn solve_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n: usize = 60;
        let a = sample(n, &mut rng);
        let pattern = to_sparse(&a);
        let mut m = pattern.zeros();
        for i in 0..n {
            for j in 0..n {
                if a[(i, j)] != 0.0 {
                    m.add(i, j, a[(i, j)]);
                }
            }
        }
        assert_eq!(m.get(3, 1), a[(3, 1)]);
        assert_eq!(m.get(1, 3), a[(3, 1)]);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = m.factorize().unwrap().solve(&b);
        let expected = a.clone().cholesky().unwrap().solve(&DVector::from_vec(b));
        for i in 0..n {
            assert!((x[i] - expected[i]).abs() < 1e-12, "{i}: {} vs {}", x[i], expected[i]);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let pattern = SpdPattern::new(&[vec![0, 1], vec![1]]).unwrap();
        let mut m = pattern.zeros();
        m.add(0, 0, 1.0);
        m.add(1, 0, 2.0);
        m.add(1, 1, 1.0);
        assert!(matches!(m.factorize(), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    #[should_panic(expected = "outside the sparsity pattern")]
    fn entries_outside_the_pattern_panic() {
        let pattern = SpdPattern::new(&[vec![0], vec![1]]).unwrap();
        pattern.zeros().add(1, 0, 1.0);
    }
}
