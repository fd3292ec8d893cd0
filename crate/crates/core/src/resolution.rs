//! The resolution of `R_eQ` by semi-free modules indexed by sets of primes,
//! its contracting homotopy away from the trivial group, and the cocycles
//! showing that Ext does not vanish in positive degrees.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom_ext::hom_direct;
use crate::linalg::QMatrix;
use crate::outcyc::{atomic_module, morphism_factor, ModuleMorphism, OutCycModule, RestrictionMap};
use crate::rational::Rat;
use crate::site::{is_prime, units, SupportSet};

/// Strictly increasing tuples of primes drawn from a fixed ambient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSetBasis {
    primes: Vec<u64>,
}

impl PrimeSetBasis {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        primes.sort_unstable();
        primes.dedup();
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeSetBasis { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// All `k`-element tuples, lexicographically.
    pub fn tuples(&self, k: usize) -> Vec<Vec<u64>> {
        fn go(primes: &[u64], k: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..primes.len() {
                cur.push(primes[i]);
                go(primes, k, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(&self.primes, k, 0, &mut Vec::new(), &mut out);
        out
    }

    /// The `k`-tuples whose product divides `m`: the basis of `P_k(C_m)`.
    pub fn tuples_at(&self, k: usize, m: u64) -> Vec<Vec<u64>> {
        self.tuples(k).into_iter().filter(|t| m.is_multiple_of(t.iter().product::<u64>())).collect()
    }

    /// Number of ambient primes dividing `m`.
    pub fn omega(&self, m: u64) -> usize {
        self.primes.iter().filter(|&&p| m.is_multiple_of(p)).count()
    }
}

/// How the sign exponent of the contraction counts the insertion position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignConvention {
    /// `(-1)^j` with `j` the 1-based position of the inserted prime.
    OneBased,
    /// `(-1)^j` with `j` the 0-based position.
    ZeroBased,
}

/// Matrix of `d(e_α) = Σ_{i=1}^{k} (-1)^i e_{α without α_i}` from `P_k(C_m)` to `P_{k-1}(C_m)`.
pub fn differential_at(basis: &PrimeSetBasis, k: usize, m: u64) -> QMatrix {
    let src = basis.tuples_at(k, m);
    let dst = basis.tuples_at(k - 1, m);
    let mut d = QMatrix::zeros(dst.len(), src.len());
    for (c, alpha) in src.iter().enumerate() {
        for i in 0..alpha.len() {
            let mut face = alpha.clone();
            face.remove(i);
            let r = dst.binary_search(&face).expect("faces of a dividing tuple divide");
            d[(r, c)] = if (i + 1) % 2 == 0 { Rat::ONE } else { -Rat::ONE };
        }
    }
    d
}

/// `h_k(e_α) = (1/ω(m)) Σ_{p ∉ α} (-1)^{j(α,p)} e_{α ∪ p}` from `P_k(C_m)` to `P_{k+1}(C_m)`.
pub fn contraction(basis: &PrimeSetBasis, k: usize, m: u64, convention: SignConvention) -> Result<QMatrix> {
    let omega = basis.omega(m);
    if m == 1 || omega == 0 {
        return Err(Error::Bound(format!("no contraction at level {m}")));
    }
    let w = Rat::new(1, omega as i64);
    let src = basis.tuples_at(k, m);
    let dst = basis.tuples_at(k + 1, m);
    let mut h = QMatrix::zeros(dst.len(), src.len());
    for (c, alpha) in src.iter().enumerate() {
        for &p in basis.primes().iter().filter(|&&p| m.is_multiple_of(p) && !alpha.contains(&p)) {
            let pos = alpha.iter().filter(|&&a| a < p).count();
            let j = match convention {
                SignConvention::OneBased => pos + 1,
                SignConvention::ZeroBased => pos,
            };
            let mut beta = alpha.clone();
            beta.insert(pos, p);
            let r = dst.binary_search(&beta).expect("dividing tuple");
            h[(r, c)] = if j % 2 == 0 { w.clone() } else { -&w };
        }
    }
    Ok(h)
}

/// `P_0 ← P_1 ← ⋯ ← P_max` together with the augmentation onto `R_eQ`.
pub struct PrimeComplex {
    pub basis: PrimeSetBasis,
    pub support: SupportSet,
    /// `modules[k] = P_k`.
    pub modules: Vec<Arc<OutCycModule>>,
    /// `differentials[k - 1] = d_k : P_k → P_{k-1}`.
    pub differentials: Vec<ModuleMorphism>,
    pub augmentation: ModuleMorphism,
}

impl PrimeComplex {
    pub fn max_degree(&self) -> usize {
        self.modules.len() - 1
    }

    pub fn d(&self, k: usize) -> &ModuleMorphism {
        &self.differentials[k - 1]
    }
}

fn chain_module(basis: &PrimeSetBasis, k: usize, support: &SupportSet) -> Result<OutCycModule> {
    let mut b = OutCycModule::builder(support.clone());
    for &m in support.members() {
        let dim = basis.tuples_at(k, m).len();
        b = b.level(m, dim, vec![QMatrix::identity(dim); units(m).basis().len()]);
    }
    for (n, q) in support.covering_pairs() {
        let (src, dst) = (basis.tuples_at(k, n), basis.tuples_at(k, n * q));
        let mut r = QMatrix::zeros(dst.len(), src.len());
        for (c, t) in src.iter().enumerate() {
            r[(dst.binary_search(t).expect("tuple divides the multiple"), c)] = Rat::ONE;
        }
        b = b.restriction(RestrictionMap { from: n, to: n * q, matrix: r });
    }
    b.build()
}

pub fn build_complex(primes: &[u64], max_degree: usize, support: &SupportSet) -> Result<PrimeComplex> {
    let basis = PrimeSetBasis::new(primes.to_vec())?;
    for k in 1..=max_degree {
        for t in basis.tuples(k) {
            let prod: u64 = t.iter().product();
            if !support.contains(prod) {
                return Err(Error::Support(format!("{prod} is needed for degree {k} but lies outside the support")));
            }
        }
    }
    let modules = (0..=max_degree)
        .map(|k| chain_module(&basis, k, support).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let differentials = (1..=max_degree)
        .map(|k| {
            let maps = support.members().iter().map(|&m| differential_at(&basis, k, m)).collect();
            ModuleMorphism::new(modules[k].clone(), modules[k - 1].clone(), maps)
        })
        .collect::<Result<Vec<_>>>()?;
    let req = Arc::new(atomic_module(1, 1, support)?);
    let aug_maps = support
        .members()
        .iter()
        .map(|&m| if m == 1 { QMatrix::identity(1) } else { QMatrix::zeros(0, modules[0].dim(m)) })
        .collect();
    let augmentation = ModuleMorphism::new(modules[0].clone(), req, aug_maps)?;
    Ok(PrimeComplex { basis, support: support.clone(), modules, differentials, augmentation })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub dims: Vec<usize>,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, dims: Vec<usize>) -> Self {
        Check { name: name.into(), pass, dims }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionReport {
    pub primes: Vec<u64>,
    pub max_degree: usize,
    /// The sign convention under which the contraction identity was checked.
    pub convention: SignConvention,
    pub checks: Vec<Check>,
}

impl ResolutionReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Whether `d_{k+1} h_k + h_{k-1} d_k = id` on `P_k(C_m)` for `k = 0..=top`,
/// with `d_0 = 0` (the augmentation vanishes away from the trivial group).
fn contraction_holds(basis: &PrimeSetBasis, m: u64, top: usize, convention: SignConvention) -> Result<bool> {
    for k in 0..=top {
        let dim = basis.tuples_at(k, m).len();
        let mut lhs = differential_at(basis, k + 1, m).mul(&contraction(basis, k, m, convention)?)?;
        if k > 0 {
            lhs = lhs.add(&contraction(basis, k - 1, m, convention)?.mul(&differential_at(basis, k, m))?)?;
        }
        if lhs != QMatrix::identity(dim) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn verify_resolution(primes: &[u64], max_degree: usize, support: &SupportSet) -> Result<ResolutionReport> {
    let cx = build_complex(primes, max_degree, support)?;
    let mut checks = Vec::new();
    for k in 2..=max_degree {
        let z = cx.d(k).then(cx.d(k - 1))?;
        checks.push(Check::new(format!("d_{}∘d_{k} = 0", k - 1), z.is_zero(), vec![]));
    }
    if max_degree >= 1 {
        let z = cx.d(1).then(&cx.augmentation)?;
        checks.push(Check::new("ε∘d_1 = 0", z.is_zero(), vec![]));
    }
    checks.push(Check::new("complex modules valid", cx.modules.iter().all(|m| m.is_valid()), vec![]));
    checks.push(Check::new(
        "differentials are morphisms",
        cx.differentials.iter().all(ModuleMorphism::is_valid) && cx.augmentation.is_valid(),
        vec![],
    ));
    for &m in support.members() {
        let eps = cx.augmentation.at(m)?;
        checks.push(Check::new(format!("level {m}: ε surjective"), eps.rank() == eps.rows(), vec![eps.rank(), eps.rows()]));
        if max_degree >= 1 {
            let d1 = cx.d(1).at(m)?;
            let ker = eps.cols() - eps.rank();
            checks.push(Check::new(format!("level {m}: exact at P_0"), d1.rank() == ker, vec![d1.rank(), ker]));
        }
        for k in 1..max_degree {
            let dk = cx.d(k).at(m)?;
            let ker = dk.cols() - dk.rank();
            let im = cx.d(k + 1).at(m)?.rank();
            checks.push(Check::new(format!("level {m}: exact at P_{k}"), im == ker, vec![im, ker]));
        }
    }
    let levels: Vec<u64> = support.members().iter().copied().filter(|&m| m > 1).collect();
    let mut convention = SignConvention::OneBased;
    let passes = |c: SignConvention| -> Result<bool> {
        for &m in &levels {
            if !contraction_holds(&cx.basis, m, max_degree, c)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut ok = passes(SignConvention::OneBased)?;
    if !ok && passes(SignConvention::ZeroBased)? {
        convention = SignConvention::ZeroBased;
        ok = true;
    }
    checks.push(Check::new("dh + hd = id at every level > 1", ok, vec![]));
    Ok(ResolutionReport { primes: cx.basis.primes().to_vec(), max_degree, convention, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtWitness {
    pub degree: usize,
    pub hom_dim: usize,
    pub cokernel_dims: Vec<usize>,
    pub cocycle: bool,
    pub nonzero: bool,
    /// `ξ_n` levelwise.
    pub xi: Vec<QMatrix>,
}

impl ExtWitness {
    /// The class of `ξ_n` in `Ext^n(R_eQ, coker d_{n+1})` is nonzero.
    pub fn nontrivial(&self) -> bool {
        self.hom_dim == 0 && self.cocycle && self.nonzero
    }
}

/// `ξ_n : P_n → coker(d_{n+1})`; a coboundary would factor through
/// `Hom(P_{n-1}, coker d_{n+1})`, which is checked to vanish.
pub fn nontrivial_ext_witness(n: usize, primes: &[u64], support: &SupportSet) -> Result<ExtWitness> {
    if n == 0 {
        return Err(Error::Bound("witnesses start in degree 1".into()));
    }
    let cx = build_complex(primes, n + 1, support)?;
    let fac = morphism_factor(cx.d(n + 1))?;
    let xi = fac.cokernel_projection;
    let hom = hom_direct(&cx.modules[n - 1], &fac.cokernel)?;
    Ok(ExtWitness {
        degree: n,
        hom_dim: hom.dim(),
        cokernel_dims: fac.cokernel.dims(),
        cocycle: cx.d(n + 1).then(&xi)?.is_zero(),
        nonzero: !xi.is_zero(),
        xi: xi.maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> PrimeSetBasis {
        PrimeSetBasis::new(vec![2, 3, 5]).unwrap()
    }

    #[test]
    fn differential_signs() {
        let b = basis();
        let d = differential_at(&b, 2, 6);
        // columns: {2,3}; rows: {2}, {3}
        assert_eq!(d, QMatrix::from_ints(&[&[1], &[-1]]));
        assert_eq!(differential_at(&b, 1, 2), QMatrix::from_ints(&[&[-1]]));
    }

    #[test]
    fn contraction_small_levels() {
        let b = basis();
        let h = contraction(&b, 0, 2, SignConvention::OneBased).unwrap();
        let dh = differential_at(&b, 1, 2).mul(&h).unwrap();
        assert!(dh.is_identity());
        let h = contraction(&b, 0, 6, SignConvention::OneBased).unwrap();
        assert_eq!(h.column(0), vec![Rat::new(-1, 2), Rat::new(-1, 2)]);
        assert!(contraction(&b, 0, 1, SignConvention::OneBased).is_err());
        assert!(contraction(&b, 3, 30, SignConvention::OneBased).unwrap().is_zero());
        assert!(contraction_holds(&b, 30, 3, SignConvention::OneBased).unwrap());
        assert!(!contraction_holds(&b, 30, 3, SignConvention::ZeroBased).unwrap());
    }

    #[test]
    fn two_primes_resolution() {
        let r = verify_resolution(&[2, 3], 2, &SupportSet::divisors_of(6).unwrap()).unwrap();
        assert!(r.pass(), "{:?}", r.checks);
        assert_eq!(r.convention, SignConvention::OneBased);
        assert!(build_complex(&[2, 3, 5], 2, &SupportSet::divisors_of(6).unwrap()).is_err());
    }

    #[test]
    fn first_witness() {
        let w = nontrivial_ext_witness(1, &[2, 3], &SupportSet::divisors_of(6).unwrap()).unwrap();
        assert!(w.nontrivial(), "{w:?}");
    }
}
