//! The isomorphism `Q[Out(-)] → τ(RU_Q)` classified by normal-basis
//! elements at prime powers, multiplied together across coprime factors.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::outcyc::{regular_module, ModuleMorphism, Violation};
use crate::rational::Rat;
use crate::rep_ring::{tau_ru_module, RUElement, TauLevel};
use crate::site::{factorize, is_prime, SupportSet};

/// Which prime-power elements to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scaling {
    /// `(-1/p^{k-1}) (X + X^p + ⋯ + X^{p^{k-1}})`.
    Scaled,
    /// `X + X^p + ⋯ + X^{p^{k-1}}`; does not give a natural family.
    Unscaled,
}

fn prime_power_sum(p: u64, k: u32, scaling: Scaling) -> Result<RUElement> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = p.pow(k);
    if k == 0 {
        return Ok(RUElement::one(1));
    }
    let c = match scaling {
        Scaling::Scaled => Rat::new(-1, p.pow(k - 1) as i64),
        Scaling::Unscaled => Rat::ONE,
    };
    let mut coeffs = vec![Rat::ZERO; n as usize];
    for i in 0..k {
        coeffs[p.pow(i) as usize] = c.clone();
    }
    RUElement::new(n, coeffs)
}

/// Quotient coordinates of the classifying element at `C_{p^k}`.
pub fn classifying_element(p: u64, k: u32) -> Result<Vec<Rat>> {
    classifying_element_with(p, k, Scaling::Scaled)
}

pub fn classifying_element_with(p: u64, k: u32, scaling: Scaling) -> Result<Vec<Rat>> {
    let a = prime_power_sum(p, k, scaling)?;
    TauLevel::new(p.pow(k)).project(&a)
}

#[derive(Clone, Debug)]
pub struct ClassifierFamily {
    pub support: SupportSet,
    pub scaling: Scaling,
    /// Quotient coordinates of `x_n`, aligned with the support.
    pub elements: Vec<Vec<Rat>>,
    levels: Vec<Arc<TauLevel>>,
}

impl ClassifierFamily {
    pub fn element(&self, n: u64) -> Option<&[Rat]> {
        self.support.index_of(n).map(|i| self.elements[i].as_slice())
    }

    pub fn tau_level(&self, n: u64) -> Option<&TauLevel> {
        self.support.index_of(n).map(|i| self.levels[i].as_ref())
    }

    /// `x_{nm} = x_n · x_m` (inflated to level `nm`) for every coprime pair
    /// `n, m > 1` with `nm` in the support. Returns the failing pairs.
    pub fn multiplicativity_failures(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let members = self.support.members();
        for &n in members {
            for &m in members {
                if n < 2 || m <= n || crate::site::gcd(n, m) != 1 || !self.support.contains(n * m) {
                    continue;
                }
                let top = self.tau_level(n * m).expect("member");
                let xn = top.inflation_from(self.tau_level(n).expect("member"));
                let xm = top.inflation_from(self.tau_level(m).expect("member"));
                let a = xn.mul_vec(self.element(n).expect("member")).expect("shape");
                let b = xm.mul_vec(self.element(m).expect("member")).expect("shape");
                if top.mul(&a, &b) != self.element(n * m).expect("member") {
                    out.push((n, m));
                }
            }
        }
        out
    }
}

/// `x_n` built from the prime-power factors of `n` taken in the given order.
pub fn assemble_level(n: u64, order: &[u64], scaling: Scaling) -> Result<Vec<Rat>> {
    let fac: BTreeMap<u64, u32> = factorize(n).into_iter().collect();
    let mut keys: Vec<u64> = order.to_vec();
    keys.sort_unstable();
    keys.dedup();
    if keys != fac.keys().copied().collect::<Vec<_>>() || keys.len() != order.len() {
        return Err(Error::Dimension(format!("{order:?} is not an ordering of the primes of {n}")));
    }
    let top = TauLevel::new(n);
    let mut acc = top.one();
    for &p in order {
        let k = fac[&p];
        let x = classifying_element_with(p, k, scaling)?;
        let infl = top.inflation_from(&TauLevel::new(p.pow(k)));
        acc = top.mul(&acc, &infl.mul_vec(&x)?);
    }
    Ok(acc)
}

pub fn assemble(support: &SupportSet) -> ClassifierFamily {
    assemble_with(support, Scaling::Scaled)
}

/// Composite levels use the prime factorization in increasing prime order.
pub fn assemble_with(support: &SupportSet, scaling: Scaling) -> ClassifierFamily {
    let levels: Vec<Arc<TauLevel>> = support
        .members()
        .par_iter()
        .map(|&n| Arc::new(TauLevel::new(n)))
        .collect();
    let elements = support
        .members()
        .par_iter()
        .zip(&levels)
        .map(|(&n, top)| {
            let mut acc = top.one();
            for (p, k) in factorize(n) {
                let x = classifying_element_with(p, k, scaling).expect("prime");
                let infl = top.inflation_from(&TauLevel::new(p.pow(k)));
                acc = top.mul(&acc, &infl.mul_vec(&x).expect("shape"));
            }
            acc
        })
        .collect();
    ClassifierFamily { support: support.clone(), scaling, elements, levels }
}

/// The morphism `Q[Out(-)] → τ(RU_Q)` sending the basis element `g` of level
/// `n` to `g · x_n`.
pub fn map_from_classifier(family: &ClassifierFamily) -> Result<ModuleMorphism> {
    let support = &family.support;
    let source = Arc::new(regular_module(support));
    let target = Arc::new(tau_ru_module(support));
    let maps = support
        .members()
        .par_iter()
        .zip(&family.elements)
        .zip(&family.levels)
        .map(|((&n, x), t)| {
            let units = source.level(n).expect("member").units().elements().to_vec();
            let columns: Vec<Vec<Rat>> = units
                .par_iter()
                .map(|&g| {
                    let n = t.level;
                    // Σ x_i X^{i g}, reduced
                    let mut col = vec![Rat::ZERO; t.dim()];
                    for (i, xi) in x.iter().enumerate() {
                        if xi.is_zero() {
                            continue;
                        }
                        let j = (i as u64 * g % n) as usize;
                        for (r, c) in col.iter_mut().enumerate() {
                            c.add_mul(xi, &t.projection[(r, j)]);
                        }
                    }
                    col
                })
                .collect();
            QMatrix::from_columns(t.dim(), &columns)
        })
        .collect();
    ModuleMorphism::new(source, target, maps)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: u64,
    pub size: usize,
    pub rank: usize,
    pub invertible: bool,
}

pub struct NormalBasisReport {
    pub morphism: ModuleMorphism,
    pub levels: Vec<LevelReport>,
    /// Equivariance and naturality failures.
    pub violations: Vec<Violation>,
    pub multiplicativity_failures: Vec<(u64, u64)>,
}

impl NormalBasisReport {
    pub fn is_isomorphism(&self) -> bool {
        self.violations.is_empty() && self.levels.iter().all(|l| l.invertible)
    }
}

pub fn normal_basis_iso(support: &SupportSet) -> Result<NormalBasisReport> {
    normal_basis_report(support, Scaling::Scaled)
}

pub fn normal_basis_report(support: &SupportSet, scaling: Scaling) -> Result<NormalBasisReport> {
    let family = assemble_with(support, scaling);
    let morphism = map_from_classifier(&family)?;
    let levels = support
        .members()
        .par_iter()
        .zip(&morphism.maps)
        .map(|(&n, m)| {
            let rank = m.rank();
            LevelReport { level: n, size: m.rows(), rank, invertible: m.rows() == m.cols() && rank == m.rows() }
        })
        .collect();
    let violations = morphism.validate();
    Ok(NormalBasisReport {
        multiplicativity_failures: family.multiplicativity_failures(),
        morphism,
        levels,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_elements() {
        assert_eq!(classifying_element(5, 0).unwrap(), vec![Rat::ONE]);
        assert_eq!(classifying_element(2, 1).unwrap(), vec![Rat::ONE]);
        let half = Rat::new(1, 2);
        assert_eq!(classifying_element(2, 2).unwrap(), vec![half.clone(), -&half]);
        assert!(classifying_element(4, 1).is_err());
    }

    #[test]
    fn small_supports_are_isomorphic() {
        let r = normal_basis_iso(&SupportSet::divisors_of(4).unwrap()).unwrap();
        assert!(r.is_isomorphism());
        assert_eq!(r.levels.iter().map(|l| l.size).collect::<Vec<_>>(), vec![1, 1, 2]);
        let r = normal_basis_iso(&SupportSet::divisors_of(12).unwrap()).unwrap();
        assert!(r.is_isomorphism(), "{:?}", r.violations);
        assert!(r.multiplicativity_failures.is_empty());
        assert_eq!(r.morphism.at(1).unwrap(), &QMatrix::identity(1));
        assert_eq!(r.morphism.at(2).unwrap(), &QMatrix::identity(1));
    }

    #[test]
    fn assembly_order_is_irrelevant() {
        assert_eq!(assemble_level(12, &[2, 3], Scaling::Scaled).unwrap(), assemble_level(12, &[3, 2], Scaling::Scaled).unwrap());
        let fam = assemble(&SupportSet::divisors_of(6).unwrap());
        assert_eq!(fam.element(6).unwrap(), assemble_level(6, &[3, 2], Scaling::Scaled).unwrap());
        assert!(assemble_level(12, &[2], Scaling::Scaled).is_err());
    }

    #[test]
    fn unscaled_family_breaks_naturality() {
        let r = normal_basis_report(&SupportSet::divisors_of(4).unwrap(), Scaling::Unscaled).unwrap();
        assert!(r.violations.iter().any(|v| v.check == "naturality"));
    }
}
