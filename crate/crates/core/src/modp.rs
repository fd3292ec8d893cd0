//! Arithmetic modulo a large prime, used to bound exact ranks from below.
//!
//! If a rational matrix has rank `r` modulo `p` then some `r × r` minor is
//! nonzero mod `p`, hence nonzero over Q, so the rational rank is at least `r`.
//! A full rank mod `p` therefore settles the rational rank exactly.

use std::collections::HashMap;

use crate::linalg::QMatrix;
use crate::sparse::SparseMatrix;

/// `2^61 - 1`.
pub const PRIME: u64 = (1 << 61) - 1;

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b, p);
        }
        b = mul(b, b, p);
        e >>= 1;
    }
    r
}

/// Inverse modulo the prime `p`; `None` for zero.
pub fn inverse(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (a != 0).then(|| pow(a, p - 2, p))
}

/// Rank of a dense matrix mod [`PRIME`]; `None` if an entry has a
/// denominator divisible by the prime.
pub fn dense_rank(m: &QMatrix) -> Option<usize> {
    let (rows, cols) = m.shape();
    let mut a: Vec<u64> = m.entries().iter().map(|x| x.residue(PRIME)).collect::<Option<_>>()?;
    let p = PRIME;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = inverse(a[rank * cols + c], p).expect("nonzero pivot");
        let pivot_row: Vec<u64> = a[rank * cols + c..(rank + 1) * cols].iter().map(|&x| mul(x, inv, p)).collect();
        for i in rank + 1..rows {
            let f = a[i * cols + c];
            if f == 0 {
                continue;
            }
            let row = &mut a[i * cols + c..(i + 1) * cols];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                if y != 0 {
                    *x = sub(*x, mul(f, y, p), p);
                }
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Rank of a sparse matrix mod [`PRIME`] by column reduction on the lowest row.
pub fn sparse_rank(m: &SparseMatrix) -> Option<usize> {
    let p = PRIME;
    let mut reduced: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for j in 0..m.cols() {
        let mut c: Vec<(usize, u64)> = m
            .column(j)
            .iter()
            .map(|(i, x)| x.residue(p).map(|r| (*i, r)))
            .collect::<Option<Vec<_>>>()?;
        c.retain(|e| e.1 != 0);
        while let Some(&(low, lead)) = c.last() {
            match reduced.get(&low) {
                Some(piv) => {
                    let f = mul(lead, inverse(piv.last().expect("pivot").1, p).expect("nonzero"), p);
                    c = axpy(&c, f, piv, p);
                }
                None => {
                    reduced.insert(low, c);
                    break;
                }
            }
        }
    }
    Some(reduced.len())
}

fn axpy(c: &[(usize, u64)], f: u64, piv: &[(usize, u64)], p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(c.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < c.len() || j < piv.len() {
        if j == piv.len() || (i < c.len() && c[i].0 < piv[j].0) {
            out.push(c[i]);
            i += 1;
        } else if i == c.len() || piv[j].0 < c[i].0 {
            out.push((piv[j].0, sub(0, mul(f, piv[j].1, p), p)));
            j += 1;
        } else {
            let v = sub(c[i].1, mul(f, piv[j].1, p), p);
            if v != 0 {
                out.push((c[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
