//! The rationalized representation ring `RU_Q(C_n) = Q[X]/(X^n - 1)` in the
//! monomial basis `X^0, …, X^{n-1}`, its structure maps, and the quotient by
//! proper transfers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::outcyc::{OutCycModule, RestrictionMap};
use crate::poly::{self, Poly};
use crate::rational::Rat;
use crate::site::{gcd, prime_factors, totient, units, SupportSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RUElement {
    pub level: u64,
    pub coeffs: Vec<Rat>,
}

impl RUElement {
    pub fn new(level: u64, coeffs: Vec<Rat>) -> Result<Self> {
        if level == 0 || coeffs.len() as u64 != level {
            return Err(Error::Dimension(format!(
                "{} coefficients at level {level}",
                coeffs.len()
            )));
        }
        Ok(RUElement { level, coeffs })
    }

    pub fn zero(level: u64) -> Self {
        RUElement { level, coeffs: vec![Rat::ZERO; level as usize] }
    }

    pub fn one(level: u64) -> Self {
        RUElement::monomial(level, 0)
    }

    /// `X^i` at level `n`, exponent taken mod `n`.
    pub fn monomial(level: u64, i: u64) -> Self {
        let mut e = RUElement::zero(level);
        e.coeffs[(i % level) as usize] = Rat::ONE;
        e
    }

    pub fn from_ints(level: u64, coeffs: &[i64]) -> Result<Self> {
        RUElement::new(level, coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn add(&self, other: &RUElement) -> Result<Self> {
        check_level(self.level, other.level)?;
        Ok(RUElement {
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: &Rat) -> Self {
        RUElement { level: self.level, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    fn apply(&self, m: &QMatrix, level: u64) -> RUElement {
        RUElement { level, coeffs: m.mul_vec(&self.coeffs).expect("shape checked by caller") }
    }
}

fn check_level(a: u64, b: u64) -> Result<()> {
    if a != b {
        return Err(Error::LevelMismatch(a, b));
    }
    Ok(())
}

fn check_divides(d: u64, n: u64) -> Result<()> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::NotDivisor { d, n });
    }
    Ok(())
}

/// Cyclic convolution.
pub fn mul(a: &RUElement, b: &RUElement) -> Result<RUElement> {
    check_level(a.level, b.level)?;
    let n = a.level as usize;
    let mut out = vec![Rat::ZERO; n];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            out[(i + j) % n].add_mul(x, y);
        }
    }
    Ok(RUElement { level: a.level, coeffs: out })
}

/// Matrix (`m × n`) of inflation along `C_m ↠ C_n`: `X_n^i ↦ X_m^{i·m/n}`.
pub fn restrict_proj_matrix(m: u64, n: u64) -> Result<QMatrix> {
    check_divides(n, m)?;
    let mut a = QMatrix::zeros(m as usize, n as usize);
    for i in 0..n {
        a[((i * (m / n)) as usize, i as usize)] = Rat::ONE;
    }
    Ok(a)
}

pub fn restrict_proj(m: u64, n: u64, a: &RUElement) -> Result<RUElement> {
    check_level(a.level, n)?;
    Ok(a.apply(&restrict_proj_matrix(m, n)?, m))
}

/// Matrix (`d × n`) of restriction to the subgroup `C_d ≤ C_n`: `X_n^i ↦ X_d^{i mod d}`.
pub fn restrict_sub_matrix(n: u64, d: u64) -> Result<QMatrix> {
    check_divides(d, n)?;
    let mut a = QMatrix::zeros(d as usize, n as usize);
    for i in 0..n {
        a[((i % d) as usize, i as usize)] = Rat::ONE;
    }
    Ok(a)
}

pub fn restrict_sub(n: u64, d: u64, a: &RUElement) -> Result<RUElement> {
    check_level(a.level, n)?;
    Ok(a.apply(&restrict_sub_matrix(n, d)?, d))
}

/// Matrix (`n × d`) of induction from `C_d` to `C_n`, defined by summing over
/// the congruence class `i ≡ j (mod d)`.
pub fn transfer_matrix(d: u64, n: u64) -> Result<QMatrix> {
    check_divides(d, n)?;
    let mut a = QMatrix::zeros(n as usize, d as usize);
    for i in 0..n {
        a[(i as usize, (i % d) as usize)] = Rat::ONE;
    }
    Ok(a)
}

pub fn transfer(d: u64, n: u64, a: &RUElement) -> Result<RUElement> {
    check_level(a.level, d)?;
    Ok(a.apply(&transfer_matrix(d, n)?, n))
}

/// Permutation matrix of `X^i ↦ X^{i·l mod n}`.
pub fn unit_action_matrix(n: u64, l: u64) -> Result<QMatrix> {
    if !units(n).contains(l) {
        return Err(Error::NotUnit { l, n });
    }
    let mut a = QMatrix::zeros(n as usize, n as usize);
    for i in 0..n {
        a[((i * l % n) as usize, i as usize)] = Rat::ONE;
    }
    Ok(a)
}

pub fn unit_action(n: u64, l: u64, a: &RUElement) -> Result<RUElement> {
    check_level(a.level, n)?;
    Ok(a.apply(&unit_action_matrix(n, l)?, n))
}

/// Columns span the ideal of all proper transfers in `RU_Q(C_n)`: the images
/// `tr_{C_d}^{C_n}(X_d^j)` for proper `d | n`. Each such image is already an
/// ideal, so no further multiples by `X^i` are needed. Zero columns at `n = 1`.
pub fn transfer_ideal(n: u64) -> QMatrix {
    let mut cols = Vec::new();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let t = transfer_matrix(d, n).expect("d divides n");
        cols.extend(t.columns());
    }
    QMatrix::from_columns(n as usize, &cols)
}

/// Dimension of `τ(RU_Q)(C_n)` computed by elimination on the transfer ideal.
pub fn tau_dimension_by_elimination(n: u64) -> usize {
    n as usize - transfer_ideal(n).rank()
}

/// The quotient `τ(RU_Q)(C_n) = RU_Q(C_n) / (proper transfers)`.
///
/// The transfer ideal is principal in `Q[X]`; its monic generator is the gcd
/// of `X^n - 1` and the transfer images `(X^n - 1)/(X^{n/p} - 1)` from the
/// maximal subgroups (transfers from smaller subgroups factor through these).
/// Quotient coordinates are the monomials `1, X, …, X^{deg - 1}`, which are
/// exactly the non-pivot monomials when the ideal is eliminated from the top
/// monomial downward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauLevel {
    pub level: u64,
    /// Monic generator of the transfer ideal.
    pub modulus: Poly,
    /// `quotient_dim × n`; column `j` holds the reduction of `X^j`.
    pub projection: QMatrix,
    /// `n × quotient_dim`; column `i` is the monomial `X^i`.
    pub section: QMatrix,
}

impl TauLevel {
    pub fn new(n: u64) -> TauLevel {
        let ambient = poly::x_pow_minus_one(n as usize);
        let mut g = ambient.clone();
        for p in prime_factors(n) {
            let (q, r) = poly::divrem(&ambient, &poly::x_pow_minus_one((n / p) as usize));
            debug_assert!(r.is_empty());
            g = poly::gcd(&g, &q);
        }
        let dim = poly::degree(&g).expect("nonzero generator");
        let mut projection = QMatrix::zeros(dim, n as usize);
        // X^j mod g, iteratively
        let mut cur: Poly = vec![Rat::ZERO; dim.max(1)];
        cur[0] = Rat::ONE;
        for j in 0..n as usize {
            if dim == 0 {
                break;
            }
            for (i, c) in cur.iter().enumerate() {
                projection[(i, j)] = c.clone();
            }
            // multiply by X and reduce by the monic g
            let top = cur[dim - 1].clone();
            let mut next = vec![Rat::ZERO; dim];
            for i in (1..dim).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for (i, gi) in g[..dim].iter().enumerate() {
                    next[i].add_mul(&-&top, gi);
                }
            }
            cur = next;
        }
        let mut section = QMatrix::zeros(n as usize, dim);
        for i in 0..dim {
            section[(i, i)] = Rat::ONE;
        }
        TauLevel { level: n, modulus: g, projection, section }
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn project(&self, a: &RUElement) -> Result<Vec<Rat>> {
        check_level(a.level, self.level)?;
        self.projection.mul_vec(&a.coeffs)
    }

    pub fn lift(&self, x: &[Rat]) -> RUElement {
        RUElement {
            level: self.level,
            coeffs: self.section.mul_vec(x).expect("quotient coordinates"),
        }
    }

    /// Product in the quotient ring, in quotient coordinates.
    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let p = mul(&self.lift(x), &self.lift(y)).expect("same level");
        self.project(&p).expect("same level")
    }

    pub fn one(&self) -> Vec<Rat> {
        self.project(&RUElement::one(self.level)).expect("same level")
    }

    /// Structure constants: entry `(i, j)` is the product `e_i · e_j`.
    pub fn multiplication_table(&self) -> Vec<Vec<Vec<Rat>>> {
        let d = self.dim();
        let basis = |i: usize| {
            let mut v = vec![Rat::ZERO; d];
            v[i] = Rat::ONE;
            v
        };
        (0..d)
            .map(|i| (0..d).map(|j| self.mul(&basis(i), &basis(j))).collect())
            .collect()
    }

    /// Induced action of the unit `l` on the quotient.
    pub fn action_matrix(&self, l: u64) -> QMatrix {
        let n = self.level;
        let cols: Vec<usize> = (0..self.dim() as u64).map(|i| (i * l % n) as usize).collect();
        self.projection.select_columns(&cols)
    }

    /// Induced inflation `τ(C_n) → τ(C_m)` for `n | m`, where `self` is level `m`
    /// and `from` is level `n`.
    pub fn inflation_from(&self, from: &TauLevel) -> QMatrix {
        let (m, n) = (self.level, from.level);
        assert_eq!(m % n, 0);
        let cols: Vec<usize> = (0..from.dim() as u64).map(|i| (i * (m / n) % m) as usize).collect();
        self.projection.select_columns(&cols)
    }
}

/// `τ(RU_Q)` over a support as a validated module.
pub fn tau_ru_module(support: &SupportSet) -> OutCycModule {
    let levels: Vec<TauLevel> = support.members().iter().map(|&n| TauLevel::new(n)).collect();
    let mut builder = OutCycModule::builder(support.clone());
    for t in &levels {
        let u = units(t.level);
        let gens: Vec<QMatrix> = u.generators().iter().map(|&g| t.action_matrix(g)).collect();
        builder = builder.level(t.level, t.dim(), gens);
    }
    for (n, q) in support.covering_pairs() {
        let src = &levels[support.index_of(n).expect("member")];
        let dst = &levels[support.index_of(n * q).expect("member")];
        builder = builder.restriction(RestrictionMap { from: n, to: n * q, matrix: dst.inflation_from(src) });
    }
    builder.build().expect("tau(RU_Q) is a well-formed module")
}

/// Matrix of `x ⊗ y ↦ p*(x) · p*(y)` from `RU_Q(C_n) ⊗ RU_Q(C_m)` to
/// `RU_Q(C_{nm})`, with the lexicographic tensor basis.
pub fn crt_iso(n: u64, m: u64) -> Result<QMatrix> {
    if gcd(n, m) != 1 {
        return Err(Error::NotCoprime(n, m));
    }
    let nm = n * m;
    let pn = restrict_proj_matrix(nm, n)?;
    let pm = restrict_proj_matrix(nm, m)?;
    let mut out = QMatrix::zeros(nm as usize, nm as usize);
    for i in 0..n as usize {
        let x = RUElement { level: nm, coeffs: pn.column(i) };
        for j in 0..m as usize {
            let y = RUElement { level: nm, coeffs: pm.column(j) };
            let p = mul(&x, &y)?;
            for (r, c) in p.coeffs.iter().enumerate() {
                out[(r, i * m as usize + j)] = c.clone();
            }
        }
    }
    Ok(out)
}

/// The induced multiplication `τ(C_n) ⊗ τ(C_m) → τ(C_{nm})` for coprime `n, m`.
pub fn tau_crt_map(n: u64, m: u64) -> Result<QMatrix> {
    if gcd(n, m) != 1 {
        return Err(Error::NotCoprime(n, m));
    }
    let (tn, tm, tnm) = (TauLevel::new(n), TauLevel::new(m), TauLevel::new(n * m));
    let infl_n = tnm.inflation_from(&tn);
    let infl_m = tnm.inflation_from(&tm);
    let (dn, dm) = (tn.dim(), tm.dim());
    let mut out = QMatrix::zeros(tnm.dim(), dn * dm);
    for i in 0..dn {
        for j in 0..dm {
            let p = tnm.mul(&infl_n.column(i), &infl_m.column(j));
            for (r, c) in p.into_iter().enumerate() {
                out[(r, i * dm + j)] = c;
            }
        }
    }
    Ok(out)
}

/// Sanity check used by tests and reports: `dim τ(RU_Q)(C_n) = φ(n)`.
pub fn tau_dim_matches_totient(n: u64) -> bool {
    TauLevel::new(n).dim() as u64 == totient(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(level: u64, c: &[i64]) -> RUElement {
        RUElement::from_ints(level, c).unwrap()
    }

    #[test]
    fn mul_examples() {
        for n in 1..8 {
            let p = mul(&RUElement::monomial(n, 1), &RUElement::monomial(n, n - 1)).unwrap();
            assert_eq!(p, RUElement::one(n));
        }
        let a = el(3, &[1, 2, -1]);
        assert_eq!(mul(&RUElement::one(3), &a).unwrap(), a);
        assert_eq!(mul(&el(2, &[1, 1]), &el(2, &[1, 1])).unwrap(), el(2, &[2, 2]));
        assert!(mul(&el(2, &[1, 1]), &el(3, &[1, 1, 1])).is_err());
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(restrict_proj(4, 2, &RUElement::monomial(2, 1)).unwrap(), RUElement::monomial(4, 2));
        assert_eq!(restrict_proj(6, 3, &RUElement::monomial(3, 1)).unwrap(), RUElement::monomial(6, 2));
        let a = el(5, &[1, 0, 3, 0, -2]);
        assert_eq!(restrict_proj(5, 5, &a).unwrap(), a);
        assert!(restrict_proj(6, 4, &el(4, &[1, 0, 0, 0])).is_err());

        assert_eq!(restrict_sub(4, 2, &RUElement::monomial(4, 1)).unwrap(), RUElement::monomial(2, 1));
        assert_eq!(restrict_sub(6, 3, &RUElement::monomial(6, 2)).unwrap(), RUElement::monomial(3, 2));
        assert_eq!(restrict_sub(5, 5, &a).unwrap(), a);
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(transfer(1, 2, &RUElement::one(1)).unwrap(), el(2, &[1, 1]));
        assert_eq!(transfer(2, 4, &RUElement::monomial(2, 1)).unwrap(), el(4, &[0, 1, 0, 1]));
        assert_eq!(transfer(2, 6, &RUElement::one(2)).unwrap(), el(6, &[1, 0, 1, 0, 1, 0]));
    }

    #[test]
    fn unit_action_examples() {
        let a = el(4, &[1, 2, 3, 4]);
        assert_eq!(unit_action(4, 1, &a).unwrap(), a);
        assert_eq!(unit_action(4, 3, &RUElement::monomial(4, 1)).unwrap(), RUElement::monomial(4, 3));
        assert!(unit_action(4, 2, &a).is_err());
    }

    #[test]
    fn transfer_ideal_examples() {
        let i4 = transfer_ideal(4);
        let expected = QMatrix::from_columns(
            4,
            &[el(4, &[1, 0, 1, 0]).coeffs, el(4, &[0, 1, 0, 1]).coeffs],
        );
        assert!(i4.same_column_span(&expected));
        assert_eq!(transfer_ideal(1).cols(), 0);
        for p in [2u64, 3, 5, 7] {
            let i = transfer_ideal(p);
            assert_eq!(i.rank(), 1);
            let norm = RUElement::new(p, vec![Rat::ONE; p as usize]).unwrap();
            assert!(i.same_column_span(&QMatrix::column_vector(norm.coeffs)));
        }
    }

    #[test]
    fn tau_dims() {
        let s = SupportSet::new(vec![1, 2, 4]).unwrap();
        let m = tau_ru_module(&s);
        assert_eq!(m.dims(), vec![1, 1, 2]);
        let m = tau_ru_module(&SupportSet::divisors_of(12).unwrap());
        assert_eq!(m.dim(12), 4);
        assert_eq!(m.dim(1), 1);
        assert!(m.action(1, 1).unwrap().is_identity());
    }

    #[test]
    fn projection_splits_and_kills_ideal() {
        for n in 1..=36u64 {
            let t = TauLevel::new(n);
            assert!(t.projection.mul(&t.section).unwrap().is_identity(), "n = {n}");
            // kernel(projection) = transfer ideal, by dimension and inclusion
            let k = t.projection.kernel_basis();
            assert!(k.same_column_span(&transfer_ideal(n)), "n = {n}");
        }
    }

    #[test]
    fn reversed_elimination_non_pivots_are_low_monomials() {
        for n in 1..=30u64 {
            let ideal = transfer_ideal(n).transpose();
            let rev: Vec<usize> = (0..n as usize).rev().collect();
            let (_, piv) = ideal.select_columns(&rev).rref();
            let mut non_pivot: Vec<usize> = (0..n as usize)
                .filter(|c| !piv.contains(c))
                .map(|c| n as usize - 1 - c)
                .collect();
            non_pivot.sort_unstable();
            let expected: Vec<usize> = (0..TauLevel::new(n).dim()).collect();
            assert_eq!(non_pivot, expected, "n = {n}");
        }
    }

    #[test]
    fn crt_examples() {
        assert!(crt_iso(1, 5).unwrap().is_identity());
        assert_eq!(crt_iso(2, 3).unwrap().rank(), 6);
        assert_eq!(crt_iso(4, 9).unwrap().rank(), 36);
        assert!(crt_iso(4, 6).is_err());
        assert!(tau_crt_map(4, 9).unwrap().is_invertible());
    }
}
