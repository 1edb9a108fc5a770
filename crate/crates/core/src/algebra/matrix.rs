//! Small dense matrices over ℚ(i).

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::crational::CRational;
use super::upoly::UniPoly;

#[derive(Clone, PartialEq, Eq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CRational>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![CRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, CRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        CMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| CRational::from_int(v)).collect()).collect())
    }

    pub fn diagonal(entries: &[CRational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<CRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CRational::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &CRational) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn trace(&self) -> CRational {
        (0..self.rows.min(self.cols)).fold(CRational::zero(), |acc, i| &acc + self.get(i, i))
    }

    /// `AB - BA`.
    pub fn commutator(&self, o: &CMatrix) -> CMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    /// Row-echelon reduction over the field; returns the rank and the
    /// determinant factor accumulated from pivots and swaps.
    fn eliminate(&self) -> (usize, CRational) {
        let mut m = self.to_rows();
        let mut det = CRational::one();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                det = CRational::zero();
                continue;
            };
            if p != rank {
                m.swap(p, rank);
                det = -det;
            }
            let pivot = m[rank][col].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for r in rank + 1..self.rows {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] * &inv;
                for c in col..self.cols {
                    let t = &f * &m[rank][c];
                    m[r][c] -= &t;
                }
            }
            rank += 1;
        }
        (rank, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn det(&self) -> CRational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        if self.rows == 0 {
            return CRational::one();
        }
        let (rank, det) = self.eliminate();
        if rank < self.rows {
            CRational::zero()
        } else {
            det
        }
    }

    /// Monic `det(xI - A)` by the Faddeev–LeVerrier recurrence:
    /// `M_k = A M_{k-1} + c_{n-k+1} I`, `c_{n-k} = -tr(A M_k)/k`.
    pub fn char_poly(&self) -> UniPoly {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut c = vec![CRational::zero(); n + 1];
        c[n] = CRational::one();
        let mut m = CMatrix::zeros(n, n);
        let id = CMatrix::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&c[n - k + 1]));
            let am = self.mul(&m);
            c[n - k] = -(&am.trace() / &CRational::from_int(k as i64));
        }
        UniPoly::new(c)
    }

    /// Horner evaluation of `p(A)`.
    pub fn eval_poly(&self, p: &UniPoly) -> CMatrix {
        let n = self.rows;
        let id = CMatrix::identity(n);
        p.coeffs().iter().rev().fold(CMatrix::zeros(n, n), |acc, c| self.mul(&acc).add(&id.scale(c)))
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }

    /// Row-major strings, for reports.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect()
    }
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_det() {
        let m = CMatrix::from_ints(&[&[1, 1, 0], &[0, 1, 1], &[1, 2, 1]]);
        assert_eq!(m.rank(), 2);
        assert!(m.det().is_zero());
        let m = CMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.det(), CRational::from_int(-1));
    }

    #[test]
    fn char_poly_of_rotation() {
        let m = CMatrix::from_ints(&[&[0, -1], &[1, 0]]);
        assert_eq!(m.char_poly(), UniPoly::from_ints(&[1, 0, 1]));
        // Cayley–Hamilton
        assert!(m.eval_poly(&m.char_poly()).is_zero());
    }

    #[test]
    fn commutator() {
        let a = CMatrix::from_ints(&[&[1, 0], &[0, 2]]);
        let b = CMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.commutator(&b), CMatrix::from_ints(&[&[0, -1], &[1, 0]]));
    }
}
