//! Dense exact linear algebra over the rationals: reduced row echelon form,
//! rank, kernels and particular solutions.

use num::{Signed, Zero};

use crate::scalar::{one, Rational};

/// Row-major dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<Rational>>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, ncols, rows: vec![vec![Rational::zero(); ncols]; nrows] }
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<Rational>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix rows");
        Matrix { nrows: rows.len(), ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.rows[i][j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let rows = (0..self.ncols).map(|j| self.column(j)).collect();
        Matrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Reduced row echelon form (zero rows dropped) and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut reducer = RowReducer::new(self.ncols);
        for r in &self.rows {
            reducer.insert(r.clone());
        }
        reducer.into_rref()
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{v : A v = 0}`. Each basis vector has a 1 at
    /// one free column and 0 at the other free columns.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (rref, pivots) = self.rref();
        kernel_from_rref(&rref, &pivots, self.ncols)
    }

    /// A solution of `A x = b` with all free variables set to zero, if one exists.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.nrows);
        let augmented: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut row = r.clone();
                row.push(bi.clone());
                row
            })
            .collect();
        let (rref, pivots) = Matrix::from_rows(self.ncols + 1, augmented).rref();
        if pivots.last() == Some(&self.ncols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.ncols];
        for (row, &p) in rref.rows.iter().zip(&pivots) {
            x[p] = row[self.ncols].clone();
        }
        Some(x)
    }
}

pub(crate) fn kernel_from_rref(rref: &Matrix, pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&j| !is_pivot[j])
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = one();
            for (row, &p) in rref.rows.iter().zip(pivots) {
                if !row[free].is_zero() {
                    v[p] = -row[free].clone();
                }
            }
            v
        })
        .collect()
}

/// Incremental Gauss–Jordan elimination. Rows are inserted one at a time and
/// the stored rows are kept fully reduced against each other.
#[derive(Clone, Debug)]
pub struct RowReducer {
    ncols: usize,
    /// (pivot column, normalized row)
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        RowReducer { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    fn reduce(&self, row: &mut [Rational]) {
        for (p, basis) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let factor = row[*p].clone();
            for (x, b) in row.iter_mut().zip(basis).skip(*p) {
                if !b.is_zero() {
                    *x -= &factor * b;
                }
            }
        }
    }

    /// Whether `row` already lies in the span of the inserted rows.
    pub fn contains(&self, row: &[Rational]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(Zero::is_zero)
    }

    /// Inserts a row; returns true when it increased the rank.
    pub fn insert(&mut self, mut row: Vec<Rational>) -> bool {
        assert_eq!(row.len(), self.ncols);
        self.reduce(&mut row);
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[p].recip();
        for x in row.iter_mut().skip(p) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for (_, other) in self.rows.iter_mut() {
            if other[p].is_zero() {
                continue;
            }
            let factor = other[p].clone();
            for (x, b) in other.iter_mut().zip(&row).skip(p) {
                if !b.is_zero() {
                    *x -= &factor * b;
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, row));
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn into_rref(self) -> (Matrix, Vec<usize>) {
        let pivots = self.pivots();
        let rows = self.rows.into_iter().map(|(_, r)| r).collect();
        (Matrix::from_rows(self.ncols, rows), pivots)
    }

    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (rref, pivots) = self.clone().into_rref();
        kernel_from_rref(&rref, &pivots, self.ncols)
    }
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_leading(v: &mut [Rational]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        if lead.is_negative() || lead != one() {
            for x in v.iter_mut() {
                *x /= &lead;
            }
        }
    }
}
