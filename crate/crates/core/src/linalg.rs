//! Dense exact linear algebra over a finite field.
//!
//! Elimination always pivots on the first nonzero entry of a column so
//! results (and the witnesses built from them) are reproducible.

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix over {} ({}x{})", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<u32> = self.row(r).iter().map(|x| x.rank()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    /// Row-major constructor.
    pub fn new(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElement>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from rank rows; panics on ragged input.
    pub fn from_ranks(field: &FieldSpec, rows: &[&[u32]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| FieldElement::from_rank(x)))
            .collect();
        FieldMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field: field.clone(),
            rows,
            cols,
            entries: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for k in 0..n {
            m.set(k, k, FieldElement::ONE);
        }
        m
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(FieldElement::ZERO, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduces to reduced row echelon form in place and returns the pivot
    /// columns.
    fn reduce(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(src) = (pivot_row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(pivot_row, src);
            let inv = f.inv(self.get(pivot_row, col)).expect("pivot is nonzero");
            for c in col..self.cols {
                let v = f.mul(self.get(pivot_row, c), inv);
                self.set(pivot_row, c, v);
            }
            for r in 0..self.rows {
                let factor = self.get(r, col);
                if r == pivot_row || factor.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(factor, self.get(pivot_row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    /// Gaussian elimination, tracking row swaps and pivot scaling.
    pub fn determinant(&self) -> Result<FieldElement, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let f = &self.field;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = FieldElement::ONE;
        for col in 0..n {
            let Some(src) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(FieldElement::ZERO);
            };
            if src != col {
                a.swap_rows(col, src);
                det = f.neg(det);
            }
            let pivot = a.get(col, col);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(a.get(r, col), inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = f.sub(a.get(r, c), f.mul(factor, a.get(col, c)));
                    a.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce().len()
    }

    /// The unique `x` with `self * x = b`.
    pub fn solve_unique(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                got: b.len(),
            });
        }
        let n = self.rows;
        let mut entries = Vec::with_capacity(n * (n + 1));
        for r in 0..n {
            entries.extend_from_slice(self.row(r));
            entries.push(b[r]);
        }
        let mut aug = FieldMatrix {
            field: self.field.clone(),
            rows: n,
            cols: n + 1,
            entries,
        };
        let pivots = aug.reduce();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::SingularMatrix);
        }
        Ok((0..n).map(|r| aug.get(r, n)).collect())
    }

    /// A basis of the right kernel, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<Vec<FieldElement>> {
        let f = &self.field;
        let mut a = self.clone();
        let pivots = a.reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[fc] = FieldElement::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(a.get(r, fc));
                }
                v
            })
            .collect()
    }
}
