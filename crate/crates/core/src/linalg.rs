//! Dense Gaussian elimination over a [`FieldCtx`].
//!
//! Pivoting is deterministic: columns are scanned left to right and the
//! pivot is the first remaining row with a nonzero entry.

use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};

pub type Matrix = Vec<Vec<FElem>>;

/// Reduced row echelon form of a row set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Rref {
    pub fn new(mut rows: Matrix, ncols: usize, f: &FieldCtx) -> Result<Self> {
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::LengthMismatch { expected: ncols, got: r.len() });
            }
        }
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..ncols {
            if top == rows.len() {
                break;
            }
            let Some(pr) = (top..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(top, pr);
            let inv = f.inv(rows[top][col])?;
            for v in rows[top].iter_mut() {
                *v = f.mul(*v, inv);
            }
            let pivot_row = rows[top].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == top {
                    continue;
                }
                let c = row[col];
                if c.is_zero() {
                    continue;
                }
                for (v, &p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *v = f.sub_mul(*v, c, p);
                }
            }
            pivots.push(col);
            top += 1;
        }
        rows.truncate(top);
        Ok(Rref { rows, pivots, ncols })
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Residue of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &[FElem], f: &FieldCtx) -> Result<Vec<FElem>> {
        if v.len() != self.ncols {
            return Err(Error::LengthMismatch { expected: self.ncols, got: v.len() });
        }
        let mut w = v.to_vec();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let c = w[col];
            if c.is_zero() {
                continue;
            }
            for (x, &p) in w.iter_mut().zip(row).skip(col) {
                *x = f.sub_mul(*x, c, p);
            }
        }
        Ok(w)
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, v: &[FElem], f: &FieldCtx) -> Result<bool> {
        Ok(self.reduce(v, f)?.iter().all(|x| x.is_zero()))
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn kernel(&self, f: &FieldCtx) -> Matrix {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![FElem::ZERO; self.ncols];
            v[free] = FElem::ONE;
            for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                v[pc] = f.neg(row[free]);
            }
            out.push(v);
        }
        out
    }
}

pub fn rank(rows: &Matrix, ncols: usize, f: &FieldCtx) -> Result<usize> {
    Ok(Rref::new(rows.clone(), ncols, f)?.rank())
}

/// `v * M` for a row vector `v` and a matrix with `v.len()` rows.
pub fn vec_mat(v: &[FElem], m: &Matrix, ncols: usize, f: &FieldCtx) -> Result<Vec<FElem>> {
    if v.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: v.len() });
    }
    let mut out = vec![FElem::ZERO; ncols];
    for (&c, row) in v.iter().zip(m) {
        if c.is_zero() {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            *o = f.add(*o, f.mul(c, x));
        }
    }
    Ok(out)
}

/// `M * v` for a column vector `v`.
pub fn mat_vec(m: &Matrix, v: &[FElem], f: &FieldCtx) -> Vec<FElem> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(FElem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf9() -> FieldCtx {
        FieldCtx::new(3, 2, None).unwrap()
    }

    fn to_matrix(f: &FieldCtx, ints: &[Vec<u32>]) -> Matrix {
        ints.iter().map(|r| r.iter().map(|&v| f.elem(v)).collect()).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let f = gf9();
        let a = vec![f.elem(1), f.elem(2), f.elem(5)];
        let b = vec![f.elem(4), f.elem(0), f.elem(7)];
        let c: Vec<FElem> = a.iter().zip(&b).map(|(&x, &y)| f.add(f.mul(f.elem(3), x), y)).collect();
        assert_eq!(rank(&vec![a, b, c], 3, &f).unwrap(), 2);
    }

    #[test]
    fn empty_and_zero_matrices() {
        let f = gf9();
        assert_eq!(rank(&vec![], 4, &f).unwrap(), 0);
        assert_eq!(rank(&to_matrix(&f, &[vec![0, 0], vec![0, 0]]), 2, &f).unwrap(), 0);
    }

    #[test]
    fn ragged_rows_rejected() {
        let f = gf9();
        let m = to_matrix(&f, &[vec![1, 2], vec![1]]);
        assert!(matches!(Rref::new(m, 2, &f), Err(Error::LengthMismatch { .. })));
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate(ints in proptest::collection::vec(proptest::collection::vec(0u32..9, 6), 0..5)) {
            let f = gf9();
            let m = to_matrix(&f, &ints);
            let r = Rref::new(m.clone(), 6, &f).unwrap();
            let ker = r.kernel(&f);
            prop_assert_eq!(ker.len() + r.rank(), 6);
            for v in &ker {
                prop_assert!(mat_vec(&m, v, &f).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn combinations_are_members(
            ints in proptest::collection::vec(proptest::collection::vec(0u32..9, 5), 1..5),
            coeffs in proptest::collection::vec(0u32..9, 5),
        ) {
            let f = gf9();
            let m = to_matrix(&f, &ints);
            let r = Rref::new(m.clone(), 5, &f).unwrap();
            let c: Vec<FElem> = coeffs[..m.len()].iter().map(|&v| f.elem(v)).collect();
            let w = vec_mat(&c, &m, 5, &f).unwrap();
            prop_assert!(r.contains(&w, &f).unwrap());
        }
    }
}
