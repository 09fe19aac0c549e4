use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::field::{is_integral, rat, Field, Rat, Rationals};
use crate::error::{invalid, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<Rat>;
pub type IntMatrix = Matrix<BigInt>;

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.rows {
            l.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        l.finish()
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn try_from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return invalid("ragged matrix rows");
        }
        Ok(Self::from_rows(rows))
    }

    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        Matrix::from_fn(rows, cols, |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }
}

/// Generic algorithms over an arbitrary exact field.
impl<T: Clone + PartialEq + fmt::Debug> Matrix<T> {
    pub fn identity_in<F: Field<Elem = T>>(f: &F, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
    }

    pub fn zero_in<F: Field<Elem = T>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, f.zero())
    }

    pub fn mul_in<F: Field<Elem = T>>(&self, f: &F, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = f.zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                acc = f.add(&acc, &f.mul(a, rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec_in<F: Field<Elem = T>>(&self, f: &F, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (k, x) in v.iter().enumerate() {
                    acc = f.add(&acc, &f.mul(self.get(i, k), x));
                }
                acc
            })
            .collect()
    }

    pub fn add_in<F: Field<Elem = T>>(&self, f: &F, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| f.add(self.get(i, j), rhs.get(i, j)))
    }

    pub fn sub_in<F: Field<Elem = T>>(&self, f: &F, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| f.sub(self.get(i, j), rhs.get(i, j)))
    }

    pub fn scale_in<F: Field<Elem = T>>(&self, f: &F, s: &T) -> Self {
        self.map(|x| f.mul(s, x))
    }

    pub fn is_zero_in<F: Field<Elem = T>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn is_identity_in<F: Field<Elem = T>>(&self, f: &F) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        f.is_zero(&f.sub(x, &f.one()))
                    } else {
                        f.is_zero(x)
                    }
                })
            })
    }

    /// Reduced row echelon form; returns the form and its pivot columns.
    pub fn rref_in<F: Field<Elem = T>>(&self, f: &F) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank_in<F: Field<Elem = T>>(&self, f: &F) -> usize {
        self.rref_in(f).1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn kernel_in<F: Field<Elem = T>>(&self, f: &F) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref_in(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(row, fc));
                }
                v
            })
            .collect()
    }

    /// One solution of `M x = b` with free variables set to zero, if any exists.
    pub fn solve_in<F: Field<Elem = T>>(&self, f: &F, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let bcol = Matrix::from_fn(self.rows, 1, |i, _| b[i].clone());
        let aug = self.hstack(&bcol);
        let (r, pivots) = aug.rref_in(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse_in<F: Field<Elem = T>>(&self, f: &F) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity_in(f, n));
        let (r, pivots) = aug.rref_in(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn det_in<F: Field<Elem = T>>(&self, f: &F) -> T {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else {
                return f.zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = f.neg(&det);
            }
            let pivot = m.get(c, c).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot).expect("nonzero pivot");
            for i in c + 1..n {
                if f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = f.mul(m.get(i, c), &inv);
                for j in c..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn pow_in<F: Field<Elem = T>>(&self, f: &F, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Matrix::identity_in(f, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_in(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_in(f, &base);
            }
        }
        acc
    }

    /// Indices of a maximal set of linearly independent rows, chosen greedily.
    pub fn independent_rows_in<F: Field<Elem = T>>(&self, f: &F) -> Vec<usize> {
        let (_, pivots) = self.transpose().rref_in(f);
        pivots
    }
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        Matrix::identity_in(&Rationals, n)
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::zero_in(&Rationals, rows, cols)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn diag(entries: &[Rat]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Rat::zero() })
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.mul_in(&Rationals, rhs)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        self.mul_vec_in(&Rationals, v)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.add_in(&Rationals, rhs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.sub_in(&Rationals, rhs)
    }

    pub fn scale(&self, s: &Rat) -> Self {
        self.scale_in(&Rationals, s)
    }

    pub fn rank(&self) -> usize {
        self.rank_in(&Rationals)
    }

    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        self.kernel_in(&Rationals)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.inverse_in(&Rationals)
    }

    pub fn det(&self) -> Rat {
        self.det_in(&Rationals)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.pow_in(&Rationals, e)
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.is_identity_in(&Rationals)
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_in(&Rationals)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(is_integral)
    }

    pub fn to_int(&self) -> Result<IntMatrix> {
        if !self.is_integral() {
            return invalid("matrix has non-integer entries");
        }
        Ok(self.map(|x| x.numer().clone()))
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.is_integral() && self.det().abs().is_one()
    }
}

impl IntMatrix {
    pub fn identity_int(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    }

    pub fn from_i64_int(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    pub fn mul_int(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        })
    }

    pub fn det_int(&self) -> BigInt {
        self.to_rat().det().to_integer()
    }

    pub(crate) fn row_axpy(&mut self, target: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(target, j) - factor * self.get(src, j);
            self.set(target, j, v);
        }
    }

    pub(crate) fn col_axpy(&mut self, target: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, target) - factor * self.get(i, src);
            self.set(i, target, v);
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    pub fn is_zero_int(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn abs_max(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}
