//! Column-sparse exact matrices, used only for the large nerve cochain
//! complexes of derived limits where dense storage does not fit.

use std::collections::HashMap;

use crate::linalg::QMatrix;
use crate::rational::Rat;

/// Columns hold `(row, value)` pairs sorted by row, without zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, Rat)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, Rat)] {
        &self.columns[j]
    }

    /// Adds `value` at `(row, col)`.
    pub fn add_entry(&mut self, row: usize, col: usize, value: &Rat) {
        assert!(row < self.rows);
        if value.is_zero() {
            return;
        }
        let c = &mut self.columns[col];
        match c.binary_search_by_key(&row, |e| e.0) {
            Ok(pos) => {
                c[pos].1 += value;
                if c[pos].1.is_zero() {
                    c.remove(pos);
                }
            }
            Err(pos) => c.insert(pos, (row, value.clone())),
        }
    }

    pub fn from_dense(m: &QMatrix) -> Self {
        let mut s = SparseMatrix::new(m.rows(), m.cols());
        for j in 0..m.cols() {
            s.columns[j] = (0..m.rows())
                .filter(|&i| !m[(i, j)].is_zero())
                .map(|i| (i, m[(i, j)].clone()))
                .collect();
        }
        s
    }

    pub fn to_dense(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows, self.cols());
        for (j, c) in self.columns.iter().enumerate() {
            for (i, x) in c {
                m[(*i, j)] = x.clone();
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "sparse product shape");
        let mut out = SparseMatrix::new(self.rows, other.cols());
        for (j, col) in other.columns.iter().enumerate() {
            let mut acc: HashMap<usize, Rat> = HashMap::new();
            for (k, b) in col {
                for (i, a) in &self.columns[*k] {
                    acc.entry(*i).or_insert(Rat::ZERO).add_mul(a, b);
                }
            }
            let mut entries: Vec<(usize, Rat)> =
                acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            entries.sort_by_key(|e| e.0);
            out.columns[j] = entries;
        }
        out
    }

    /// Exact rank; uses the modular lower bound when it is already maximal.
    pub fn rank(&self) -> usize {
        let full = self.rows.min(self.cols());
        if crate::modp::sparse_rank(self) == Some(full) {
            return full;
        }
        self.rank_exact()
    }

    /// Exact rank by column reduction on the lowest nonzero row over Q.
    pub fn rank_exact(&self) -> usize {
        let mut reduced: HashMap<usize, Vec<(usize, Rat)>> = HashMap::new();
        for col in &self.columns {
            let mut c = col.clone();
            while let Some((low, lead)) = c.last().cloned() {
                match reduced.get(&low) {
                    Some(p) => {
                        let f = &lead / &p.last().expect("nonempty pivot column").1;
                        c = axpy(&c, &f, p);
                    }
                    None => {
                        reduced.insert(low, c);
                        break;
                    }
                }
            }
        }
        reduced.len()
    }
}

/// `c - f * p` on sorted sparse vectors.
fn axpy(c: &[(usize, Rat)], f: &Rat, p: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
    let mut out = Vec::with_capacity(c.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < c.len() || j < p.len() {
        let take_c = j == p.len() || (i < c.len() && c[i].0 < p[j].0);
        let take_p = i == c.len() || (j < p.len() && p[j].0 < c[i].0);
        if take_c {
            out.push(c[i].clone());
            i += 1;
        } else if take_p {
            out.push((p[j].0, -&(f * &p[j].1)));
            j += 1;
        } else {
            let v = &c[i].1 - &(f * &p[j].1);
            if !v.is_zero() {
                out.push((c[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_dense() {
        let m = QMatrix::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1], &[1, 3, 4]]);
        let s = SparseMatrix::from_dense(&m);
        assert_eq!(s.rank(), m.rank());
        assert_eq!(s.to_dense(), m);
    }

    #[test]
    fn product_matches_dense() {
        let a = QMatrix::from_ints(&[&[1, 0, 2], &[0, -1, 0]]);
        let b = QMatrix::from_ints(&[&[1, 1], &[2, 0], &[0, 3]]);
        let p = SparseMatrix::from_dense(&a).mul(&SparseMatrix::from_dense(&b));
        assert_eq!(p.to_dense(), a.mul(&b).unwrap());
    }

    #[test]
    fn add_entry_cancels() {
        let mut s = SparseMatrix::new(2, 1);
        s.add_entry(1, 0, &Rat::ONE);
        s.add_entry(1, 0, &Rat::from_int(-1));
        assert!(s.is_zero());
    }
}
