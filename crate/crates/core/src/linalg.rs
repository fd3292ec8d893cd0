//! Dense exact linear algebra over the rationals.
//!
//! Basis conventions are fixed everywhere: vectors are columns, matrices act
//! on the left, and tensor products pair bases lexicographically
//! (`(i, j) ↦ i * dim_b + j`).

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rat::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    /// Builds a matrix from row vectors. All rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension("ragged rows".into()));
            }
            data.extend(row);
        }
        Ok(QMatrix { rows: r, cols, data })
    }

    /// Convenience constructor for tests and literals.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged integer literal");
                r.iter().map(|&x| Rat::from_int(x))
            })
            .collect();
        QMatrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = QMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn column_vector(v: Vec<Rat>) -> Self {
        let n = v.len();
        QMatrix { rows: n, cols: 1, data: v }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn transpose(&self) -> Self {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Rat) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &QMatrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &QMatrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    fn check_same_shape(&self, other: &QMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Matrix product; zero entries of `self` are skipped, which makes
    /// products with permutation-like matrices cheap.
    pub fn mul(&self, other: &QMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                if a.is_one() {
                    for (o, b) in out_row.iter_mut().zip(brow) {
                        if !b.is_zero() {
                            *o += b;
                        }
                    }
                } else {
                    for (o, b) in out_row.iter_mut().zip(brow) {
                        if !b.is_zero() {
                            o.add_mul(a, b);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {:?}",
                v.len(),
                self.shape()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Rat::ZERO;
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_mul(a, b);
                    }
                }
                acc
            })
            .collect())
    }

    /// Columns `range` of `self` as a new matrix.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = QMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        QMatrix { rows: idx.len(), cols: self.cols, data }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &QMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(QMatrix { rows: self.rows, cols, data })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &QMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(QMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &QMatrix) -> Self {
        let mut m = QMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut m = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * c);
        head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
    }

    /// `row[target] -= factor * row[source]`, starting at column `from`.
    fn axpy_row(&mut self, target: usize, source: usize, factor: &Rat, from: usize) {
        let c = self.cols;
        let (t, s) = if target < source {
            let (head, tail) = self.data.split_at_mut(source * c);
            (&mut head[target * c..(target + 1) * c], &tail[..c])
        } else {
            let (head, tail) = self.data.split_at_mut(target * c);
            (&mut tail[..c], &head[source * c..(source + 1) * c])
        };
        let neg = -factor;
        for j in from..c {
            if !s[j].is_zero() {
                t[j].add_mul(&neg, &s[j]);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: &Rat, from: usize) {
        let c = self.cols;
        for x in &mut self.data[r * c + from..(r + 1) * c] {
            if !x.is_zero() {
                *x *= s;
            }
        }
    }

    /// Reduced row echelon form and the increasing list of pivot columns.
    /// The first nonzero entry in a column is taken as pivot.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut r = self.clone();
        let pivots = r.rref_in_place(None);
        (r, pivots)
    }

    /// Like [`rref`](Self::rref), also returning an invertible `T` with `T · self = R`.
    pub fn rref_with_transform(&self) -> (QMatrix, Vec<usize>, QMatrix) {
        let mut r = self.clone();
        let mut t = QMatrix::identity(self.rows);
        let pivots = r.rref_in_place(Some(&mut t));
        (r, pivots, t)
    }

    fn rref_in_place(&mut self, mut track: Option<&mut QMatrix>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !self[(i, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            if let Some(t) = track.as_deref_mut() {
                t.swap_rows(row, p);
            }
            let inv = self[(row, col)].recip().expect("nonzero pivot");
            self.scale_row(row, &inv, col);
            if let Some(t) = track.as_deref_mut() {
                t.scale_row(row, &inv, 0);
            }
            for i in 0..self.rows {
                if i == row || self[(i, col)].is_zero() {
                    continue;
                }
                let f = self[(i, col)].clone();
                self.axpy_row(i, row, &f, col);
                if let Some(t) = track.as_deref_mut() {
                    t.axpy_row(i, row, &f, 0);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Exact rank. A full rank modulo a large prime already determines the
    /// rational rank; otherwise falls back to [`rank_exact`](Self::rank_exact).
    pub fn rank(&self) -> usize {
        let full = self.rows.min(self.cols);
        if full > 8 && crate::modp::dense_rank(self) == Some(full) {
            return full;
        }
        self.rank_exact()
    }

    /// Rank by forward elimination over Q.
    pub fn rank_exact(&self) -> usize {
        let mut m = self.clone();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].recip().expect("nonzero pivot");
            m.scale_row(row, &inv, col);
            for i in row + 1..m.rows {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let f = m[(i, col)].clone();
                m.axpy_row(i, row, &f, col);
            }
            row += 1;
        }
        row
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let (r, pivots, t) = self.rref_with_transform();
        let _ = r;
        (pivots.len() == self.rows).then_some(t)
    }

    /// Columns form a basis of the null space.
    pub fn kernel_basis(&self) -> QMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = QMatrix::zeros(self.cols, free.len());
        for (kc, &f) in free.iter().enumerate() {
            k[(f, kc)] = Rat::ONE;
            for (pr, &pc) in pivots.iter().enumerate() {
                k[(pc, kc)] = -&r[(pr, f)];
            }
        }
        k
    }

    /// A basis of the column space, as a subset of the original columns.
    pub fn column_space(&self) -> QMatrix {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// A witness `x` with `self · x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Result<Option<Vec<Rat>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side of length {} for {} equations",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&QMatrix::column_vector(b.to_vec()))?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rat::ZERO; self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(pr, self.cols)].clone();
        }
        Ok(Some(x))
    }

    /// Solves `self · X = B` column by column; `None` if any column is inconsistent.
    pub fn solve_matrix(&self, b: &QMatrix) -> Result<Option<QMatrix>> {
        if b.rows != self.rows {
            return Err(Error::Dimension("solve_matrix row mismatch".into()));
        }
        let aug = self.hstack(b)?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Ok(None);
        }
        let mut x = QMatrix::zeros(self.cols, b.cols);
        for (pr, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pc, j)] = r[(pr, self.cols + j)].clone();
            }
        }
        Ok(Some(x))
    }

    /// A surjection `P` out of the codomain whose kernel is exactly the image
    /// of `self`, together with the cokernel dimension.
    ///
    /// The rows of `P` are a basis of the left null space of `self`.
    pub fn cokernel(&self) -> (QMatrix, usize) {
        let p = self.transpose().kernel_basis().transpose();
        let dim = p.rows();
        (p, dim)
    }

    pub fn kronecker(&self, other: &QMatrix) -> QMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = QMatrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Whether every column of `other` lies in the column space of `self`.
    pub fn column_span_contains(&self, other: &QMatrix) -> bool {
        if other.cols == 0 {
            return true;
        }
        if self.rows != other.rows {
            return false;
        }
        let base = self.rank();
        self.hstack(other).map(|m| m.rank() == base).unwrap_or(false)
    }

    /// Column spaces agree (mutual containment).
    pub fn same_column_span(&self, other: &QMatrix) -> bool {
        self.column_span_contains(other) && other.column_span_contains(self)
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "{}[", if i == 0 { "" } else { ", " })?;
            for j in 0..self.cols {
                write!(f, "{}{}", if j == 0 { "" } else { ", " }, self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Serialized as nested row arrays. A matrix with zero rows loses its column
/// count in this form; readers supply the expected shape where it matters.
impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[Rat]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<Rat>> = Vec::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        QMatrix::from_rows(cols, rows).map_err(serde::de::Error::custom)
    }
}

impl QMatrix {
    /// Reinterprets a deserialized matrix with the expected shape, which is
    /// needed for matrices that have zero rows or zero columns.
    pub fn with_shape(self, rows: usize, cols: usize) -> Result<QMatrix> {
        if self.shape() == (rows, cols) {
            return Ok(self);
        }
        if self.data.is_empty() && rows * cols == 0 {
            return Ok(QMatrix::zeros(rows, cols));
        }
        Err(Error::Dimension(format!(
            "expected {rows}x{cols}, found {}x{}",
            self.rows, self.cols
        )))
    }
}

/// Incrementally grown basis of a subspace of `Q^dim`, kept in reduced form
/// so membership tests are a single reduction pass.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    dim: usize,
    /// `(pivot, row)`; each row has a 1 at its pivot and zeros at all other pivots.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn reduce(&self, v: &mut [Rat]) {
        for (p, r) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = -&v[*p];
            for (x, y) in v.iter_mut().zip(r) {
                if !y.is_zero() {
                    x.add_mul(&f, y);
                }
            }
        }
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Rat::is_zero)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip().expect("nonzero");
        for x in &mut w {
            *x *= &inv;
        }
        for (_, r) in &mut self.rows {
            if r[p].is_zero() {
                continue;
            }
            let f = -&r[p];
            for (x, y) in r.iter_mut().zip(&w) {
                if !y.is_zero() {
                    x.add_mul(&f, y);
                }
            }
        }
        self.rows.push((p, w));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_ints(rows)
    }

    #[test]
    fn rref_identity() {
        let (r, p) = QMatrix::identity(3).rref();
        assert_eq!(r, QMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn rref_proportional_rows() {
        let (r, p) = q(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r, q(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        let k = QMatrix::identity(2).kernel_basis();
        assert_eq!(k.shape(), (2, 0));
        let k = q(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.shape(), (2, 1));
        assert_eq!(k[(0, 0)], -&k[(1, 0)]);
        assert!(!k.is_zero());
    }

    #[test]
    fn solve_examples() {
        let x = QMatrix::identity(2)
            .solve(&[Rat::from_int(3), Rat::from_int(5)])
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![Rat::from_int(3), Rat::from_int(5)]);

        let m = q(&[&[1, 1]]);
        let x = m.solve(&[Rat::from_int(2)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![Rat::from_int(2)]);

        let m = q(&[&[1], &[0]]);
        assert_eq!(m.solve(&[Rat::ZERO, Rat::ONE]).unwrap(), None);
        assert!(m.solve(&[Rat::ZERO]).is_err());
    }

    #[test]
    fn cokernel_examples() {
        let (p, d) = QMatrix::zeros(2, 2).cokernel();
        assert_eq!(d, 2);
        assert_eq!(p.rank(), 2);
        let (_, d) = QMatrix::identity(2).cokernel();
        assert_eq!(d, 0);

        let m = q(&[&[1], &[1]]);
        let (p, d) = m.cokernel();
        assert_eq!(d, 1);
        assert!(p.mul(&m).unwrap().is_zero());
        assert_eq!(p.rank(), 1);
        // kernel(P) = image(M), both inclusions
        let kp = p.kernel_basis();
        assert!(kp.same_column_span(&m));
    }

    #[test]
    fn kronecker_examples() {
        let k = QMatrix::identity(2).kronecker(&QMatrix::identity(3));
        assert_eq!(k, QMatrix::identity(6));
        let b = q(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(q(&[&[2]]).kronecker(&b), b.scale(&Rat::from_int(2)));
    }

    #[test]
    fn empty_shapes() {
        let z = QMatrix::zeros(0, 3);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().shape(), (3, 3));
        let z = QMatrix::zeros(3, 0);
        assert_eq!(z.kernel_basis().shape(), (0, 0));
        assert_eq!(z.cokernel().1, 3);
        assert_eq!(z.mul(&QMatrix::zeros(0, 2)).unwrap(), QMatrix::zeros(3, 2));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = q(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn json_shape() {
        let m = q(&[&[1, 2]]).scale(&Rat::new(1, 2));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","1"]]"#);
        let back: QMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let e: QMatrix = serde_json::from_str("[]").unwrap();
        assert_eq!(e.with_shape(0, 4).unwrap().shape(), (0, 4));
    }
}
