//! Arithmetic of the indexing site: divisor-closed supports, the unit groups
//! `Out(C_n) ≅ (Z/n)^×`, and the reductions induced by the preferred
//! projections `C_m ↠ C_n`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    out.sort_unstable();
    out
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(1, |acc, (p, k)| acc * (p - 1) * p.pow(k - 1))
}

/// `x mod n` on the unit-group labelling, where the single unit modulo 1 is 1.
#[inline]
pub fn reduce_unit(x: u64, n: u64) -> u64 {
    if n == 1 {
        1
    } else {
        x % n
    }
}

/// A finite divisor-closed set of positive integers containing 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct SupportSet {
    members: Vec<u64>,
}

impl TryFrom<Vec<u64>> for SupportSet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        SupportSet::new(v)
    }
}

impl From<SupportSet> for Vec<u64> {
    fn from(s: SupportSet) -> Vec<u64> {
        s.members
    }
}

impl SupportSet {
    /// Accepts exactly the divisor-closed sets; duplicates and order are ignored.
    pub fn new(members: Vec<u64>) -> Result<Self> {
        let set: BTreeSet<u64> = members.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Support("empty support".into()));
        }
        if set.contains(&0) {
            return Err(Error::Support("0 is not a level".into()));
        }
        for &n in &set {
            if let Some(d) = divisors(n).into_iter().find(|d| !set.contains(d)) {
                return Err(Error::Support(format!("{d} divides {n} but is missing")));
            }
        }
        Ok(SupportSet { members: set.into_iter().collect() })
    }

    pub fn divisors_of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Support("0 has no finite divisor set".into()));
        }
        Ok(SupportSet { members: divisors(n) })
    }

    pub fn upto(n: u64) -> Result<Self> {
        divisor_closure(&(1..=n).collect::<Vec<_>>())
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn index_of(&self, n: u64) -> Option<usize> {
        self.members.binary_search(&n).ok()
    }

    pub fn max(&self) -> u64 {
        *self.members.last().expect("support contains 1")
    }

    /// The maximum under divisibility, when one exists.
    pub fn top(&self) -> Option<u64> {
        let m = self.max();
        self.members.iter().all(|&n| m.is_multiple_of(n)).then_some(m)
    }

    /// Pairs `(n, q)` with `q` prime and `n·q` in the support, ordered by
    /// `n` then `q`.
    pub fn covering_pairs(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for &n in &self.members {
            for &m in &self.members {
                if m > n && m % n == 0 && is_prime(m / n) {
                    out.push((n, m / n));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Members divisible by `n`.
    pub fn multiples_of(&self, n: u64) -> Vec<u64> {
        self.members.iter().copied().filter(|m| m % n == 0).collect()
    }

    /// Strict divisors of `n` that lie in the support.
    pub fn proper_divisors_of(&self, n: u64) -> Vec<u64> {
        self.members.iter().copied().filter(|&d| d < n && n.is_multiple_of(d)).collect()
    }
}

/// The smallest divisor-closed set containing the seeds.
pub fn divisor_closure(seeds: &[u64]) -> Result<SupportSet> {
    if seeds.is_empty() {
        return Err(Error::Support("empty seed list".into()));
    }
    if seeds.contains(&0) {
        return Err(Error::Support("seeds must be positive".into()));
    }
    let set: BTreeSet<u64> = seeds.iter().flat_map(|&s| divisors(s)).collect();
    Ok(SupportSet { members: set.into_iter().collect() })
}

/// `(Z/n)^×` as an explicit sorted residue list, together with a basis of
/// independent cyclic factors used to store and check group actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitsGroup {
    modulus: u64,
    elements: Vec<u64>,
    /// `(generator, order)` of each independent cyclic factor.
    basis: Vec<(u64, u64)>,
    /// Exponent vector w.r.t. `basis`, indexed by position in `elements`.
    words: Vec<Vec<u64>>,
}

impl UnitsGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, l: u64) -> bool {
        self.index_of(l).is_some()
    }

    pub fn index_of(&self, l: u64) -> Option<usize> {
        self.elements.binary_search(&l).ok()
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        reduce_unit(a * b, self.modulus)
    }

    pub fn inverse(&self, a: u64) -> u64 {
        *self
            .elements
            .iter()
            .find(|&&b| self.mul(a, b) == 1)
            .expect("units form a group")
    }

    /// Generators of independent cyclic factors with their orders; the group
    /// is their internal direct product. Empty for the trivial group.
    pub fn basis(&self) -> &[(u64, u64)] {
        &self.basis
    }

    pub fn generators(&self) -> Vec<u64> {
        self.basis.iter().map(|b| b.0).collect()
    }

    /// Exponents `e` with `l = Π g_i^{e_i}` over the basis.
    pub fn word(&self, l: u64) -> Option<&[u64]> {
        self.index_of(l).map(|i| self.words[i].as_slice())
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn mult_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 {
        x = x * g % m;
        k += 1;
    }
    k
}

/// Lift `a mod q` (with `q | n`, `gcd(q, n/q) = 1`) to the residue that is
/// `1` modulo `n/q`.
fn crt_lift(a: u64, q: u64, n: u64) -> u64 {
    let r = n / q;
    (0..n)
        .map(|k| 1 + k * r)
        .find(|x| x % q == a % q)
        .map(|x| x % n)
        .expect("coprime moduli")
}

pub fn units(n: u64) -> UnitsGroup {
    assert!(n >= 1, "units of a positive modulus");
    let elements: Vec<u64> = if n == 1 {
        vec![1]
    } else {
        (1..n).filter(|&l| gcd(l, n) == 1).collect()
    };

    // local cyclic factors: (generator mod n, order)
    let mut basis = Vec::new();
    for (p, k) in factorize(n) {
        let q = p.pow(k);
        let phi = (p - 1) * p.pow(k - 1);
        let local: Vec<u64> = if p == 2 {
            match k {
                1 => vec![],
                2 => vec![3],
                _ => vec![q - 1, 5],
            }
        } else {
            let g = (2..q)
                .find(|&g| gcd(g, q) == 1 && mult_order(g, q) == phi)
                .expect("odd prime powers have primitive roots");
            vec![g]
        };
        for g in local {
            basis.push((crt_lift(g, q, n), mult_order(g, q)));
        }
    }

    let mut words = vec![Vec::new(); elements.len()];
    let index = |l: u64| elements.binary_search(&l).expect("unit");
    let mut exps = vec![0u64; basis.len()];
    // enumerate every exponent vector once
    loop {
        let l = basis
            .iter()
            .zip(&exps)
            .fold(reduce_unit(1, n), |acc, (&(g, _), &e)| {
                reduce_unit(acc * pow_mod(g, e, n.max(2)), n)
            });
        let i = index(l);
        debug_assert!(words[i].is_empty() || basis.is_empty());
        words[i] = exps.clone();
        let mut pos = 0;
        loop {
            if pos == basis.len() {
                return UnitsGroup { modulus: n, elements, basis, words };
            }
            exps[pos] += 1;
            if exps[pos] < basis[pos].1 {
                break;
            }
            exps[pos] = 0;
            pos += 1;
        }
    }
}

/// The reduction `units(m) → units(n)` for `n | m`: images in the order of
/// `units(m).elements()`, and the fiber over each element of `units(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitReduction {
    pub m: u64,
    pub n: u64,
    pub image: Vec<u64>,
    pub fibers: Vec<(u64, Vec<u64>)>,
}

pub fn unit_reduction(m: u64, n: u64) -> Result<UnitReduction> {
    if n == 0 || !m.is_multiple_of(n) {
        return Err(Error::NotDivisor { d: n, n: m });
    }
    let um = units(m);
    let un = units(n);
    let image: Vec<u64> = um.elements().iter().map(|&l| reduce_unit(l, n)).collect();
    let fibers = un
        .elements()
        .iter()
        .map(|&j| {
            let f = um
                .elements()
                .iter()
                .zip(&image)
                .filter(|(_, &r)| r == j)
                .map(|(&l, _)| l)
                .collect();
            (j, f)
        })
        .collect();
    Ok(UnitReduction { m, n, image, fibers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_examples() {
        assert_eq!(divisor_closure(&[12]).unwrap().members(), &[1, 2, 3, 4, 6, 12]);
        assert_eq!(divisor_closure(&[1]).unwrap().members(), &[1]);
        assert_eq!(divisor_closure(&[8, 9]).unwrap().members(), &[1, 2, 3, 4, 8, 9]);
        assert!(divisor_closure(&[]).is_err());
    }

    #[test]
    fn totient_examples() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        assert_eq!(totient(2520), 576);
    }

    #[test]
    fn units_examples() {
        assert_eq!(units(4).elements(), &[1, 3]);
        assert_eq!(units(12).elements(), &[1, 5, 7, 11]);
        assert_eq!(units(1).elements(), &[1]);
        assert_eq!(units(2).elements(), &[1]);
    }

    #[test]
    fn reduction_examples() {
        let r = unit_reduction(12, 4).unwrap();
        assert_eq!(r.image, vec![1, 1, 3, 3]);
        let r = unit_reduction(7, 7).unwrap();
        assert_eq!(r.image, units(7).elements());
        let r = unit_reduction(4, 2).unwrap();
        assert_eq!(r.fibers, vec![(1, vec![1, 3])]);
        assert!(unit_reduction(12, 5).is_err());
    }

    #[test]
    fn support_validation() {
        assert!(SupportSet::new(vec![2, 4]).is_err());
        assert!(SupportSet::new(vec![1, 2, 4, 8]).is_ok());
        let s = SupportSet::divisors_of(12).unwrap();
        assert_eq!(s.top(), Some(12));
        assert_eq!(SupportSet::new(vec![1, 2, 3]).unwrap().top(), None);
        assert_eq!(
            s.covering_pairs(),
            vec![(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (4, 3), (6, 2)]
        );
    }

    #[test]
    fn basis_words_reconstruct_every_unit() {
        for n in 1..=200u64 {
            let u = units(n);
            let prod: u64 = u.basis().iter().map(|b| b.1).product();
            assert_eq!(prod as usize, u.order(), "n = {n}");
            for &l in u.elements() {
                let w = u.word(l).unwrap();
                let back = u
                    .basis()
                    .iter()
                    .zip(w)
                    .fold(1u64, |acc, (&(g, _), &e)| {
                        reduce_unit(acc * pow_mod(g, e, n.max(2)), n)
                    });
                assert_eq!(back, l, "n = {n}, l = {l}");
            }
        }
    }
}
