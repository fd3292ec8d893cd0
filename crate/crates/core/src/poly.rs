//! Dense univariate polynomials over Q, coefficients from degree 0 upward.

use crate::rational::Rat;

pub type Poly = Vec<Rat>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Rat::is_zero) {
        p.pop();
    }
    p
}

/// Degree of a trimmed polynomial; `None` for zero.
pub fn degree(p: &[Rat]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn monomial(k: usize) -> Poly {
    let mut p = vec![Rat::ZERO; k + 1];
    p[k] = Rat::ONE;
    p
}

/// `X^n - 1`.
pub fn x_pow_minus_one(n: usize) -> Poly {
    let mut p = monomial(n);
    p[0] = Rat::from_int(-1);
    p
}

pub fn mul(a: &[Rat], b: &[Rat]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j].add_mul(x, y);
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &[Rat], b: &[Rat]) -> (Poly, Poly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = b[db].recip().expect("nonzero leading coefficient");
    let mut r = trim(a.to_vec());
    let mut q = vec![Rat::ZERO; r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let f = &r[dr] * &lead_inv;
        let shift = dr - db;
        for (i, c) in b[..=db].iter().enumerate() {
            if !c.is_zero() {
                r[shift + i].add_mul(&-&f, c);
            }
        }
        q[shift] = f;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn rem(a: &[Rat], b: &[Rat]) -> Poly {
    divrem(a, b).1
}

pub fn make_monic(p: Poly) -> Poly {
    let p = trim(p);
    match p.last() {
        None => p,
        Some(lead) => {
            let inv = lead.recip().expect("nonzero");
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd(a: &[Rat], b: &[Rat]) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while degree(&b).is_some() {
        let r = rem(&a, &b);
        a = b;
        b = make_monic(r);
    }
    make_monic(a)
}

/// The n-th cyclotomic polynomial, by dividing `X^n - 1` by the cyclotomic
/// polynomials of all proper divisors.
pub fn cyclotomic(n: u64) -> Poly {
    let mut p = x_pow_minus_one(n as usize);
    for d in 1..n {
        if n.is_multiple_of(d) {
            let (q, r) = divrem(&p, &cyclotomic(d));
            debug_assert!(degree(&r).is_none());
            p = q;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Poly {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic(9), ints(&[1, 0, 0, 1, 0, 0, 1]));
    }

    #[test]
    fn gcd_and_divrem() {
        // (X-1)(X+1) and (X+1)^2
        let a = ints(&[-1, 0, 1]);
        let b = ints(&[1, 2, 1]);
        assert_eq!(gcd(&a, &b), ints(&[1, 1]));
        let (q, r) = divrem(&ints(&[1, 0, 0, 1]), &ints(&[1, 1]));
        assert_eq!(q, ints(&[1, -1, 1]));
        assert!(r.is_empty());
    }
}
