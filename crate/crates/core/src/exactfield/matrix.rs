use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// Dense row-major matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length and share the field.
    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::PreconditionViolation("ragged matrix rows".into()));
            }
            for e in r {
                if e.field() != field {
                    return Err(Error::MixedFields);
                }
                data.push(e);
            }
        }
        Ok(Matrix {
            field: field.clone(),
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|v| field.int(*v)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("rectangular integer rows")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// Gauss–Jordan elimination: leftmost nonzero pivot, scaled to 1.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(pr, lead);
            let inv = m.get(lead, c).inv().expect("nonzero pivot");
            for k in c..m.cols {
                let v = m.get(lead, k) * &inv;
                m.set(lead, k, v);
            }
            let pivot_row: Vec<FieldElement> = m.row(lead)[c..].to_vec();
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let factor = m.get(r, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for (k, pv) in (c..m.cols).zip(&pivot_row) {
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(r, k) - &(&factor * pv);
                    m.set(r, k, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Echelon { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space, itself in reduced row-echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let Echelon { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let raw: Vec<Vec<FieldElement>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -matrix.get(r, f);
                }
                v
            })
            .collect();
        if raw.is_empty() {
            return raw;
        }
        let basis = Matrix::from_rows(&self.field, raw)
            .expect("uniform rows")
            .rref();
        (0..basis.pivots.len())
            .map(|r| basis.matrix.row(r).to_vec())
            .collect()
    }

    /// Indices of the first maximal linearly independent set of rows, scanning top to bottom.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        // Incremental echelon basis: (pivot column, normalized row).
        let mut basis: Vec<(usize, Vec<FieldElement>)> = Vec::new();
        for r in 0..self.rows {
            let mut v = self.row(r).to_vec();
            for (pc, b) in &basis {
                let f = v[*pc].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
            if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
                let inv = v[pc].inv().expect("nonzero");
                let v: Vec<FieldElement> = v.iter().map(|x| x * &inv).collect();
                basis.push((pc, v));
                chosen.push(r);
                if basis.len() == self.cols {
                    break;
                }
            }
        }
        chosen
    }

    pub fn determinant(&self) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::PreconditionViolation(
                "determinant of a non-square matrix".into(),
            ));
        }
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..m.cols {
            let Some(pr) = (c..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv()?;
            for r in c + 1..m.rows {
                let factor = m.get(r, c) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for k in c..m.cols {
                    let v = m.get(r, k) - &(&factor * m.get(c, k));
                    m.set(r, k, v);
                }
            }
        }
        Ok(det)
    }

    /// Unique solution of `self · x = rhs` for a square nonsingular system.
    pub fn solve(&self, rhs: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if self.rows != self.cols || rhs.len() != self.rows {
            return Err(Error::PreconditionViolation(
                "solve needs a square system".into(),
            ));
        }
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for (r, v) in rhs.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, v.clone());
        }
        let e = aug.rref();
        if e.pivots.len() != self.rows || e.pivots.contains(&self.cols) {
            return Err(Error::DivisionByZero);
        }
        Ok((0..self.rows)
            .map(|r| e.matrix.get(r, self.cols).clone())
            .collect())
    }
}

/// Right null space basis in reduced row-echelon form.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<FieldElement>> {
    m.kernel_basis()
}
