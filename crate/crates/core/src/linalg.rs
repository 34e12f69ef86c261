//! Exact dense linear algebra over prime fields.
//!
//! Matrices act on column vectors; a map `V -> W` is stored as a
//! `dim W x dim V` matrix. Empty shapes (`0 x n`, `n x 0`) are valid values.

use std::fmt;

use crate::error::{Error, Result};

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        if p > 65_521 {
            return Err(Error::InvalidRing(format!("prime {p} is too large")));
        }
        Ok(Self { p })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        let mut result = 1u64;
        let mut base = a as u64;
        let mut e = self.p - 2;
        let m = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        result as u32
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[F_{}; {}x{}]", self.field.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing entries mod p.
    pub fn from_rows(field: Fp, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| field.reduce(v)))
            .collect();
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a `rows x cols` matrix from row-major residues.
    pub fn from_vec(field: Fp, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        let data = data.into_iter().map(|v| v % field.p).collect();
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let f = self.field;
        let p = f.p as u64;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot += a * b as u64;
                    if *slot >= (1 << 62) {
                        *slot %= p;
                    }
                }
            }
            for (c, a) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = (a % p) as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let p = self.field.p as u64;
        (0..self.rows)
            .map(|r| {
                let s: u64 = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64 % p)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "matrix sum shape mismatch");
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut out = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let cols = self.cols + other.cols;
        let mut out = Matrix::zeros(self.field, self.rows, cols);
        for r in 0..self.rows {
            out.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * cols + self.cols..(r + 1) * cols].copy_from_slice(other.row(r));
        }
        out
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(
            self.field,
            self.rows + other.rows,
            self.cols + other.cols,
        );
        out.paste(0, 0, self);
        out.paste(self.rows, self.cols, other);
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.data[i * out.cols + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * out.cols + j] = self.get(r, c);
            }
        }
        out
    }

    /// Column-stacked vectorization (column-major flattening).
    pub fn vectorize(&self) -> Vec<u32> {
        (0..self.cols)
            .flat_map(|c| (0..self.rows).map(move |r| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect()
    }

    /// Inverse of [`Matrix::vectorize`].
    pub fn unvectorize(field: Fp, rows: usize, cols: usize, v: &[u32]) -> Matrix {
        assert_eq!(v.len(), rows * cols);
        let mut m = Matrix::zeros(field, rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[r * cols + c] = v[c * rows + r];
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = Matrix::identity(self.field, self.rows);
        let (r, rank, _) = rref(&self.hstack(&id));
        let left = r.submatrix(0..self.rows, 0..self.cols);
        if rank < self.rows || left != id {
            return None;
        }
        Some(r.submatrix(0..self.rows, self.cols..2 * self.cols))
    }

    /// Basis (as columns) of the column space, chosen among the original columns.
    pub fn column_space(&self) -> Matrix {
        let (_, _, pivots) = rref(self);
        self.select_columns(&pivots)
    }
}

/// Reduced row-echelon form, rank and pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, usize, Vec<usize>) {
    let f = m.field;
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if pr != r {
            for k in 0..cols {
                a.data.swap(pr * cols + k, r * cols + k);
            }
        }
        let inv = f.inv(a.get(r, c));
        for k in c..cols {
            let v = a.get(r, k);
            a.data[r * cols + k] = f.mul(v, inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c);
            if factor == 0 {
                continue;
            }
            for k in c..cols {
                let v = f.sub(a.get(i, k), f.mul(factor, a.get(r, k)));
                a.data[i * cols + k] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, r, pivots)
}

/// Columns form a basis of `{ v : m v = 0 }`.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let f = m.field;
    let (r, rank, pivots) = rref(m);
    let cols = m.cols;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Matrix::zeros(f, cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        out.set(fc, j, 1);
        for (i, &pc) in pivots.iter().enumerate().take(rank) {
            out.set(pc, j, f.neg(r.get(i, fc)));
        }
    }
    out
}

/// Some `x` with `m x = rhs`, or `None` when the system is inconsistent.
pub fn solve(m: &Matrix, rhs: &Matrix) -> Result<Option<Matrix>> {
    if m.rows != rhs.rows {
        return Err(Error::DimensionMismatch(format!(
            "solve: matrix has {} rows but right-hand side has {}",
            m.rows, rhs.rows
        )));
    }
    let f = m.field;
    let (r, rank, pivots) = rref(&m.hstack(rhs));
    if pivots.iter().any(|&c| c >= m.cols) {
        return Ok(None);
    }
    let mut x = Matrix::zeros(f, m.cols, rhs.cols);
    for (i, &pc) in pivots.iter().enumerate().take(rank) {
        for j in 0..rhs.cols {
            x.set(pc, j, r.get(i, m.cols + j));
        }
    }
    Ok(Some(x))
}

/// Incrementally maintained echelon basis of a subspace of F_p^dim.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: Fp,
    dim: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl EchelonBasis {
    pub fn new(field: Fp, dim: usize) -> Self {
        Self {
            field,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.dim);
        let f = self.field;
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            let c = w[*pivot];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[pivot]);
        w.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        for (_, row) in &mut self.rows {
            let c = row[pivot];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&w) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        self.rows.push((pivot, w));
        true
    }
}

/// Standard basis vectors completing the columns of `basis` (assumed
/// independent) to a basis of the ambient space.
pub fn complement_columns(basis: &Matrix) -> Matrix {
    let f = basis.field;
    let dim = basis.rows;
    let mut ech = EchelonBasis::new(f, dim);
    for c in basis.columns() {
        ech.insert(&c);
    }
    let mut extra = Vec::new();
    for i in 0..dim {
        if ech.rank() == dim {
            break;
        }
        let mut e = vec![0; dim];
        e[i] = 1;
        if ech.insert(&e) {
            extra.push(e);
        }
    }
    Matrix::from_columns(f, dim, &extra)
}

/// A matrix `L` with `L * basis = I`, for `basis` of full column rank.
pub fn left_inverse(basis: &Matrix) -> Matrix {
    let comp = complement_columns(basis);
    let full = basis.hstack(&comp);
    let inv = full
        .inverse()
        .expect("basis plus complement must be invertible");
    inv.submatrix(0..basis.cols, 0..basis.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Fp {
        Fp::new(2).unwrap()
    }

    #[test]
    fn field_arithmetic() {
        let f = Fp::new(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.reduce(-1), 6);
        assert!(Fp::new(4).is_err());
        assert!(Fp::new(1).is_err());
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = Matrix::identity(f2(), 2);
        let (r, rank, piv) = rref(&id);
        assert_eq!(r, id);
        assert_eq!(rank, 2);
        assert_eq!(piv, vec![0, 1]);

        let z = Matrix::zeros(f2(), 3, 3);
        let (r, rank, piv) = rref(&z);
        assert_eq!(r, z);
        assert_eq!(rank, 0);
        assert!(piv.is_empty());
    }

    #[test]
    fn rref_all_ones() {
        let m = Matrix::from_rows(f2(), &[vec![1, 1], vec![1, 1]]).unwrap();
        let (r, rank, piv) = rref(&m);
        assert_eq!(rank, 1);
        assert_eq!(piv, vec![0]);
        assert_eq!(r, Matrix::from_rows(f2(), &[vec![1, 1], vec![0, 0]]).unwrap());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::identity(f2(), 3)).cols(), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(f2(), 4, 4)).cols(), 4);
        let k = kernel_basis(&Matrix::from_rows(f2(), &[vec![1, 1]]).unwrap());
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![1, 1]);
    }

    #[test]
    fn solve_examples() {
        let id = Matrix::identity(f2(), 2);
        let rhs = Matrix::from_rows(f2(), &[vec![1], vec![0]]).unwrap();
        assert_eq!(solve(&id, &rhs).unwrap(), Some(rhs.clone()));

        let z = Matrix::zeros(f2(), 2, 2);
        assert_eq!(solve(&z, &rhs).unwrap(), None);

        let m = Matrix::from_rows(f2(), &[vec![1, 1], vec![0, 0]]).unwrap();
        let x = solve(&m, &rhs).unwrap().expect("solvable");
        assert_eq!(m.mul(&x), rhs);

        let bad = Matrix::zeros(f2(), 3, 1);
        assert!(matches!(solve(&m, &bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn empty_shapes() {
        let f = f2();
        let a = Matrix::zeros(f, 0, 3);
        assert_eq!(kernel_basis(&a).cols(), 3);
        let b = Matrix::zeros(f, 3, 0);
        assert_eq!(kernel_basis(&b).cols(), 0);
        assert_eq!(b.mul(&a).shape(), (3, 3));
        assert_eq!(a.mul(&b).shape(), (0, 0));
        assert_eq!(solve(&b, &Matrix::zeros(f, 3, 1)).unwrap().unwrap().shape(), (0, 1));
    }

    #[test]
    fn left_inverse_works() {
        let f = Fp::new(5).unwrap();
        let b = Matrix::from_rows(f, &[vec![1, 0], vec![2, 1], vec![3, 4]]).unwrap();
        let l = left_inverse(&b);
        assert_eq!(l.mul(&b), Matrix::identity(f, 2));
    }
}
