//! Dense exact rational matrices.
//!
//! Everything here is plain fraction arithmetic over [`Rational`]; no
//! pivoting heuristics are needed because there is no rounding. Elimination
//! picks the first nonzero pivot, which keeps every routine deterministic.

use num::{One, Zero};

use crate::expr::{rat_int, Rational};

/// Row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> RationalMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    /// Build from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> RationalMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        RationalMatrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).fold(Rational::zero(), |acc, i| acc + self.at(i, i))
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        RationalMatrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = Rational::zero();
            for k in 0..self.cols {
                let a = self.at(r, k);
                let b = rhs.at(k, c);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for c in 0..self.cols {
                    let a = self.at(r, c);
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    /// `self^k` by repeated multiplication; `k == 0` gives the identity.
    pub fn pow(&self, k: u32) -> RationalMatrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = RationalMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact determinant by Gaussian elimination with first-nonzero pivoting.
    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| !m.at(r, col).is_zero()) {
                Some(r) => r,
                None => return Rational::zero(),
            };
            if pivot_row != col {
                m.swap_rows(pivot_row, col);
                det = -det;
            }
            let pivot = m.at(col, col).clone();
            det *= &pivot;
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col) / &pivot;
                for c in col..n {
                    let delta = &factor * m.at(col, c);
                    let v = m.at(r, c) - delta;
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// Exact inverse via Gauss-Jordan on the augmented system, or `None`
    /// when the matrix is singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = RationalMatrix::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| !m.at(r, col).is_zero())?;
            if pivot_row != col {
                m.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let inv_pivot = m.at(col, col).recip();
            m.scale_row(col, &inv_pivot);
            inv.scale_row(col, &inv_pivot);
            for r in 0..n {
                if r == col || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                m.sub_scaled_row(r, col, &factor);
                inv.sub_scaled_row(r, col, &factor);
            }
        }
        Some(inv)
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pivot_row = match (row..m.rows).find(|&r| !m.at(r, col).is_zero()) {
                Some(r) => r,
                None => continue,
            };
            m.swap_rows(pivot_row, row);
            let pivot = m.at(row, col).clone();
            m.scale_row(row, &pivot.recip());
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                m.sub_scaled_row(r, row, &factor);
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, one vector per free column, ordered by
    /// ascending free column index with the free variable set to 1.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut pivot_iter = pivots.iter().copied().enumerate().collect::<Vec<_>>();
        pivot_iter.sort_by_key(|&(_, col)| col);
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for &(prow, pcol) in &pivot_iter {
                v[pcol] = -r.at(prow, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Coefficients of `det(lambda*I - M)` by the Faddeev-LeVerrier
    /// recurrence, monic and in descending powers: `[1, c1, ..., cn]`.
    pub fn char_poly(&self) -> Vec<Rational> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        assert!(n > 0, "characteristic polynomial of an empty matrix");
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(Rational::one());
        let mut m = self.clone();
        let mut c = -m.trace();
        coeffs.push(c.clone());
        for k in 2..=n {
            let mut shifted = m.clone();
            for i in 0..n {
                let v = shifted.at(i, i) + &c;
                shifted.set(i, i, v);
            }
            m = self.mul(&shifted);
            c = -m.trace() / rat_int(k as i64);
            coeffs.push(c.clone());
        }
        coeffs
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, factor: &Rational) {
        for c in 0..self.cols {
            let v = self.at(r, c) * factor;
            self.set(r, c, v);
        }
    }

    /// `row_r -= factor * row_src`.
    fn sub_scaled_row(&mut self, r: usize, src: usize, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let delta = factor * self.at(src, c);
            if delta.is_zero() {
                continue;
            }
            let v = self.at(r, c) - delta;
            self.set(r, c, v);
        }
    }
}

/// Render a matrix row by row, entries separated by single spaces. Used by
/// report witnesses and the CLI model printer.
pub fn format_matrix(m: &RationalMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if c > 0 {
                out.push(' ');
            }
            out.push_str(&m.at(r, c).to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, rat_int};

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat_int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn hilbert_determinant_and_inverse() {
        // The 4x4 Hilbert matrix: det = 1/6048000, inverse is integral.
        let h = RationalMatrix::from_fn(4, 4, |i, j| rat(1, (i + j + 1) as i64));
        assert_eq!(h.determinant(), rat(1, 6_048_000));
        let inv = h.inverse().expect("Hilbert matrix is invertible");
        assert_eq!(h.mul(&inv), RationalMatrix::identity(4));
        assert_eq!(*inv.at(0, 0), rat_int(16));
        assert_eq!(*inv.at(3, 3), rat_int(2800));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let s = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.determinant(), rat_int(0));
        assert!(s.inverse().is_none());
    }

    #[test]
    fn rref_rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(a.rank(), 2);
        let (r, pivots) = a.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(*r.at(0, 0), rat_int(1));
        assert_eq!(*r.at(1, 1), rat_int(1));
        let basis = a.nullspace();
        assert_eq!(basis.len(), 1);
        for v in &basis {
            let image = a.mul_vec(v);
            assert!(image.iter().all(num::Zero::is_zero));
        }
        // The canonical basis sets the free column to 1.
        assert_eq!(basis[0][2], rat_int(1));
    }

    #[test]
    fn nullspace_of_invertible_matrix_is_trivial() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert!(a.nullspace().is_empty());
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn char_poly_of_diagonal_matrix() {
        let d = m(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]);
        // (x-2)(x-3)(x-5) = x^3 - 10x^2 + 31x - 30.
        assert_eq!(
            d.char_poly(),
            vec![rat_int(1), rat_int(-10), rat_int(31), rat_int(-30)]
        );
    }

    #[test]
    fn char_poly_matches_determinant_evaluation() {
        // Independent cross-check: coefficients must reproduce det(tI - M)
        // at more sample values than the degree.
        let a = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat_int(3), rat(-2, 3), rat_int(0)],
            vec![rat_int(1), rat(-1, 4), rat_int(2), rat(5, 6)],
            vec![rat_int(0), rat(7, 2), rat_int(-1), rat_int(4)],
            vec![rat(2, 5), rat_int(-3), rat(1, 3), rat(3, 7)],
        ]);
        let coeffs = a.char_poly();
        assert_eq!(coeffs.len(), 5);
        assert_eq!(coeffs[0], rat_int(1));
        for t in -2i64..=3 {
            let ti = RationalMatrix::from_fn(4, 4, |i, j| {
                if i == j { rat_int(t) - a.at(i, j) } else { -a.at(i, j).clone() }
            });
            let expected = ti.determinant();
            let mut value = rat_int(0);
            for c in &coeffs {
                value = value * rat_int(t) + c;
            }
            assert_eq!(value, expected, "char poly disagrees with det(tI - M) at t = {t}");
        }
    }

    #[test]
    fn char_poly_trace_and_determinant_coefficients() {
        let a = m(&[&[1, 2, 0], &[-1, 3, 4], &[2, 2, -5]]);
        let coeffs = a.char_poly();
        assert_eq!(coeffs[1], -a.trace());
        // Constant coefficient is (-1)^n det.
        assert_eq!(coeffs[3], -a.determinant());
    }

    #[test]
    fn matrix_power_and_mul_vec() {
        let a = m(&[&[1, 1], &[0, 1]]);
        let p = a.pow(5);
        assert_eq!(*p.at(0, 1), rat_int(5));
        assert_eq!(a.pow(0), RationalMatrix::identity(2));
        let v = vec![rat_int(2), rat_int(3)];
        assert_eq!(a.mul_vec(&v), vec![rat_int(5), rat_int(3)]);
    }

    #[test]
    fn nonsquare_shapes() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!((a.rows(), a.cols()), (2, 3));
        assert!(!a.is_square());
        assert_eq!(a.rank(), 2);
        assert_eq!(a.nullspace().len(), 1);
    }
}
