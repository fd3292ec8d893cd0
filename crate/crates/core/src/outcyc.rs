//! Truncated `Out^op_cyc`-modules: per-level `(Z/n)^×`-representations linked
//! by equivariant restriction maps along the preferred projections.
//!
//! A module stores one action matrix per independent cyclic factor of
//! `units(n)` (see [`UnitsGroup::basis`]); the action of any other unit is the
//! corresponding product of generator powers. Restrictions are stored only on
//! covering pairs `n → n·q` with `q` prime; longer restrictions are composites.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::Rat;
use crate::site::{factorize, reduce_unit, unit_reduction, units, SupportSet, UnitsGroup};

/// One failed invariant; `check` names the family, `detail` the square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct Level {
    pub n: u64,
    pub dim: usize,
    units: UnitsGroup,
    /// Aligned with `units.basis()`.
    generator_actions: Vec<QMatrix>,
    /// Actions supplied for non-generator units (e.g. read from a file);
    /// validation checks them against the generator products.
    declared_actions: BTreeMap<u64, QMatrix>,
}

impl Level {
    pub fn units(&self) -> &UnitsGroup {
        &self.units
    }

    pub fn generator_actions(&self) -> impl Iterator<Item = (u64, &QMatrix)> {
        self.units.basis().iter().map(|b| b.0).zip(&self.generator_actions)
    }

    /// Action of the unit `l`, as the product of generator powers.
    pub fn action(&self, l: u64) -> Result<QMatrix> {
        let word = self.units.word(l).ok_or(Error::NotUnit { l, n: self.n })?;
        let mut acc = QMatrix::identity(self.dim);
        for (e, a) in word.iter().zip(&self.generator_actions) {
            for _ in 0..*e {
                acc = a.mul(&acc)?;
            }
        }
        Ok(acc)
    }

    /// Images of a vector under every unit, in the order of `units().elements()`,
    /// computed by walking the generator basis.
    pub fn orbit(&self, v: &[Rat]) -> Vec<Vec<Rat>> {
        let elements = self.units.elements();
        let mut out: Vec<Option<Vec<Rat>>> = vec![None; elements.len()];
        out[self.units.index_of(reduce_unit(1, self.n)).expect("identity")] = Some(v.to_vec());
        let mut frontier = vec![reduce_unit(1, self.n)];
        while let Some(l) = frontier.pop() {
            let cur = out[self.units.index_of(l).expect("unit")].clone().expect("visited");
            for (g, a) in self.generator_actions() {
                let next = self.units.mul(g, l);
                let idx = self.units.index_of(next).expect("unit");
                if out[idx].is_none() {
                    out[idx] = Some(a.mul_vec(&cur).expect("square action"));
                    frontier.push(next);
                }
            }
        }
        out.into_iter().map(|x| x.expect("basis generates the group")).collect()
    }
}

/// Two levels are equal when every unit acts the same way, whether its
/// action was declared or derived from the generators.
impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.dim != other.dim || self.generator_actions != other.generator_actions {
            return false;
        }
        let effective = |lvl: &Level, l: u64| lvl.declared_actions.get(&l).cloned().or_else(|| lvl.action(l).ok());
        self.declared_actions
            .keys()
            .chain(other.declared_actions.keys())
            .all(|&l| effective(self, l) == effective(other, l))
    }
}

impl Eq for Level {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionMap {
    pub from: u64,
    pub to: u64,
    pub matrix: QMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutCycModule {
    support: SupportSet,
    levels: Vec<Level>,
    /// Keyed by covering pair `(n, n·q)`; shape `dim(nq) × dim(n)`.
    restrictions: BTreeMap<(u64, u64), QMatrix>,
}

pub struct ModuleBuilder {
    support: SupportSet,
    levels: BTreeMap<u64, (usize, Vec<QMatrix>, BTreeMap<u64, QMatrix>)>,
    restrictions: BTreeMap<(u64, u64), QMatrix>,
}

impl ModuleBuilder {
    /// Level `n` with generator actions aligned with `units(n).basis()`.
    pub fn level(mut self, n: u64, dim: usize, generator_actions: Vec<QMatrix>) -> Self {
        self.levels.insert(n, (dim, generator_actions, BTreeMap::new()));
        self
    }

    /// Level `n` with actions given per unit. The generator actions must be
    /// present; the remaining entries are kept and checked by validation.
    pub fn level_with_actions(mut self, n: u64, dim: usize, actions: BTreeMap<u64, QMatrix>) -> Result<Self> {
        let u = units(n);
        let mut rest = actions;
        let gens = u
            .generators()
            .into_iter()
            .map(|g| {
                rest.remove(&g)
                    .ok_or_else(|| Error::InvalidModule(format!("level {n}: action of generator {g} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.levels.insert(n, (dim, gens, rest));
        Ok(self)
    }

    pub fn restriction(mut self, r: RestrictionMap) -> Self {
        self.restrictions.insert((r.from, r.to), r.matrix);
        self
    }

    /// Checks shapes and keys; the algebraic invariants are checked by
    /// [`OutCycModule::validate`]. Missing restrictions default to zero.
    pub fn build(self) -> Result<OutCycModule> {
        let mut levels = Vec::with_capacity(self.support.len());
        for &n in self.support.members() {
            let (dim, gens, declared) = self
                .levels
                .get(&n)
                .cloned()
                .ok_or_else(|| Error::InvalidModule(format!("level {n} missing")))?;
            let u = units(n);
            if gens.len() != u.basis().len() {
                return Err(Error::InvalidModule(format!(
                    "level {n}: {} generator actions for {} generators",
                    gens.len(),
                    u.basis().len()
                )));
            }
            for (g, a) in u.generators().iter().zip(&gens).map(|(g, a)| (*g, a)).chain(
                declared.iter().map(|(l, a)| (*l, a)),
            ) {
                if !u.contains(g) {
                    return Err(Error::NotUnit { l: g, n });
                }
                if a.shape() != (dim, dim) {
                    return Err(Error::InvalidModule(format!(
                        "level {n}: action of {g} has shape {:?}, expected {dim}x{dim}",
                        a.shape()
                    )));
                }
            }
            levels.push(Level { n, dim, units: u, generator_actions: gens, declared_actions: declared });
        }
        if let Some(extra) = self.levels.keys().find(|n| !self.support.contains(**n)) {
            return Err(Error::NotInSupport(*extra));
        }
        let dim_of = |n: u64| levels[self.support.index_of(n).expect("member")].dim;
        let pairs = self.support.covering_pairs();
        let mut restrictions = BTreeMap::new();
        for &(n, q) in &pairs {
            let shape = (dim_of(n * q), dim_of(n));
            let m = match self.restrictions.get(&(n, n * q)) {
                Some(m) => m.clone().with_shape(shape.0, shape.1).map_err(|e| {
                    Error::InvalidModule(format!("restriction {n}->{}: {e}", n * q))
                })?,
                None => QMatrix::zeros(shape.0, shape.1),
            };
            restrictions.insert((n, n * q), m);
        }
        if let Some(&(a, b)) = self.restrictions.keys().find(|k| !restrictions.contains_key(k)) {
            return Err(Error::InvalidModule(format!("{a}->{b} is not a covering pair of the support")));
        }
        Ok(OutCycModule { support: self.support, levels, restrictions })
    }
}

impl OutCycModule {
    pub fn builder(support: SupportSet) -> ModuleBuilder {
        ModuleBuilder { support, levels: BTreeMap::new(), restrictions: BTreeMap::new() }
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, n: u64) -> Result<&Level> {
        self.support
            .index_of(n)
            .map(|i| &self.levels[i])
            .ok_or(Error::NotInSupport(n))
    }

    pub fn dim(&self, n: u64) -> usize {
        self.level(n).map_or(0, |l| l.dim)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.levels.iter().map(|l| l.dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn action(&self, n: u64, l: u64) -> Result<QMatrix> {
        self.level(n)?.action(l)
    }

    /// Stored restriction along a covering pair.
    pub fn covering_restriction(&self, n: u64, m: u64) -> Option<&QMatrix> {
        self.restrictions.get(&(n, m))
    }

    pub fn covering_restrictions(&self) -> impl Iterator<Item = ((u64, u64), &QMatrix)> {
        self.restrictions.iter().map(|(k, v)| (*k, v))
    }

    /// Restriction `X(C_n) → X(C_m)` for `n | m`, composed along the prime
    /// factorization of `m/n` in increasing prime order.
    pub fn restriction_matrix(&self, m: u64, n: u64) -> Result<QMatrix> {
        self.restriction_along(m, n, &chain_primes(m, n)?)
    }

    /// Restriction composed along an explicit ordering of the prime steps.
    pub fn restriction_along(&self, m: u64, n: u64, steps: &[u64]) -> Result<QMatrix> {
        if !self.support.contains(n) {
            return Err(Error::NotInSupport(n));
        }
        if !self.support.contains(m) {
            return Err(Error::NotInSupport(m));
        }
        if n == 0 || !m.is_multiple_of(n) || steps.iter().product::<u64>() != m / n {
            return Err(Error::NotDivisor { d: n, n: m });
        }
        let mut acc = QMatrix::identity(self.dim(n));
        let mut cur = n;
        for &q in steps {
            let r = self
                .restrictions
                .get(&(cur, cur * q))
                .ok_or(Error::NotDivisor { d: cur, n: cur * q })?;
            acc = r.mul(&acc)?;
            cur *= q;
        }
        Ok(acc)
    }

    /// Checks the group-action, equivariance and path-independence invariants.
    /// An empty list means the module is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for lvl in &self.levels {
            check_action(lvl, &mut out);
        }
        for (&(n, m), r) in &self.restrictions {
            let (src, dst) = (self.level(n).expect("member"), self.level(m).expect("member"));
            for (g, a) in dst.generator_actions() {
                let gbar = reduce_unit(g, n);
                let lhs = a.mul(r).expect("shapes");
                let rhs = r.mul(&src.action(gbar).expect("unit")).expect("shapes");
                if lhs != rhs {
                    out.push(Violation {
                        check: "equivariance",
                        detail: format!("square {n}->{m} fails for unit {g} (reducing to {gbar})"),
                    });
                }
            }
        }
        for &(n, nq) in self.restrictions.keys() {
            let q = nq / n;
            for &(n2, nq2) in self.restrictions.keys() {
                let q2 = nq2 / n2;
                if n2 != n || q2 <= q || !self.support.contains(n * q * q2) {
                    continue;
                }
                let top = n * q * q2;
                let a = self.restrictions[&(nq, top)].mul(&self.restrictions[&(n, nq)]).expect("shapes");
                let b = self.restrictions[&(nq2, top)].mul(&self.restrictions[&(n, nq2)]).expect("shapes");
                if a != b {
                    out.push(Violation {
                        check: "path independence",
                        detail: format!("{n}->{nq}->{top} differs from {n}->{nq2}->{top}"),
                    });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Actions of every unit at level `n`, keyed by residue.
    pub fn all_actions(&self, n: u64) -> Result<BTreeMap<u64, QMatrix>> {
        let lvl = self.level(n)?;
        lvl.units
            .elements()
            .iter()
            .map(|&l| Ok((l, lvl.action(l)?)))
            .collect()
    }

    /// Rough count of stored matrix entries, used for size guards.
    pub fn storage_entries(&self) -> usize {
        let lv: usize = self.levels.iter().map(|l| l.dim * l.dim * l.generator_actions.len()).sum();
        let rs: usize = self.restrictions.values().map(|r| r.rows() * r.cols()).sum();
        lv + rs
    }

    /// Same data with every level conjugated by an invertible change of basis
    /// `B_n` (new coordinates = `B_n⁻¹ ·` old).
    pub fn change_basis(&self, bases: &[QMatrix]) -> Result<OutCycModule> {
        if bases.len() != self.levels.len() {
            return Err(Error::Dimension("one basis per level".into()));
        }
        let inverses: Vec<QMatrix> = bases
            .iter()
            .map(|b| b.inverse().ok_or_else(|| Error::Dimension("singular change of basis".into())))
            .collect::<Result<_>>()?;
        let mut builder = OutCycModule::builder(self.support.clone());
        for (i, lvl) in self.levels.iter().enumerate() {
            let gens = lvl
                .generator_actions
                .iter()
                .map(|a| inverses[i].mul(a)?.mul(&bases[i]))
                .collect::<Result<Vec<_>>>()?;
            builder = builder.level(lvl.n, lvl.dim, gens);
        }
        for (&(n, m), r) in &self.restrictions {
            let (i, j) = (self.support.index_of(n).expect("member"), self.support.index_of(m).expect("member"));
            builder = builder.restriction(RestrictionMap {
                from: n,
                to: m,
                matrix: inverses[j].mul(r)?.mul(&bases[i])?,
            });
        }
        builder.build()
    }
}

fn check_action(lvl: &Level, out: &mut Vec<Violation>) {
    let basis = lvl.units.basis();
    let id = QMatrix::identity(lvl.dim);
    for (i, (&(g, order), a)) in basis.iter().zip(&lvl.generator_actions).enumerate() {
        let mut p = id.clone();
        for _ in 0..order {
            p = a.mul(&p).expect("square");
        }
        if p != id {
            out.push(Violation {
                check: "group action",
                detail: format!("level {}: unit {g} does not act with order dividing {order}", lvl.n),
            });
        }
        for (&(h, _), b) in basis.iter().zip(&lvl.generator_actions).skip(i + 1) {
            if a.mul(b).expect("square") != b.mul(a).expect("square") {
                out.push(Violation {
                    check: "group action",
                    detail: format!("level {}: actions of {g} and {h} do not commute", lvl.n),
                });
            }
        }
    }
    for (&l, a) in &lvl.declared_actions {
        if lvl.action(l).map(|d| &d != a).unwrap_or(true) {
            out.push(Violation {
                check: "group action",
                detail: format!("level {}: declared action of {l} is not the product of generator actions", lvl.n),
            });
        }
    }
}

/// Prime steps from `n` up to `m`, increasing.
pub fn chain_primes(m: u64, n: u64) -> Result<Vec<u64>> {
    if n == 0 || !m.is_multiple_of(n) {
        return Err(Error::NotDivisor { d: n, n: m });
    }
    Ok(factorize(m / n)
        .into_iter()
        .flat_map(|(p, k)| std::iter::repeat_n(p, k as usize))
        .collect())
}

fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> QMatrix {
    let mut m = QMatrix::zeros(dim, dim);
    for j in 0..dim {
        m[(f(j), j)] = Rat::ONE;
    }
    m
}

/// The zero module over a support.
pub fn zero_module(support: &SupportSet) -> OutCycModule {
    let mut b = OutCycModule::builder(support.clone());
    for &n in support.members() {
        let k = units(n).basis().len();
        b = b.level(n, 0, vec![QMatrix::zeros(0, 0); k]);
    }
    b.build().expect("zero module")
}

/// `Q[Out(-)]`: the regular representation at each level, with restrictions
/// summing over the fibers of `units(nq) → units(n)`.
pub fn regular_module(support: &SupportSet) -> OutCycModule {
    let mut b = OutCycModule::builder(support.clone());
    for &n in support.members() {
        let u = units(n);
        let dim = u.order();
        let gens = u
            .generators()
            .iter()
            .map(|&g| permutation(dim, |j| u.index_of(u.mul(g, u.elements()[j])).expect("unit")))
            .collect();
        b = b.level(n, dim, gens);
    }
    for (n, q) in support.covering_pairs() {
        let red = unit_reduction(n * q, n).expect("divides");
        let (un, um) = (units(n), units(n * q));
        let mut r = QMatrix::zeros(um.order(), un.order());
        for (j, fiber) in &red.fibers {
            let col = un.index_of(*j).expect("unit");
            for jt in fiber {
                r[(um.index_of(*jt).expect("unit"), col)] = Rat::ONE;
            }
        }
        b = b.restriction(RestrictionMap { from: n, to: n * q, matrix: r });
    }
    b.build().expect("regular module")
}

/// The representable module `Q{Epi(-, C_n)}`: at each multiple `m` of `n` the
/// basis is `units(n)` (an epimorphism `C_m ↠ C_n` is `u ∘ p_{m,n}`), units of
/// `m` act through their reduction, and restrictions are identities.
pub fn free_module(n: u64, support: &SupportSet) -> Result<OutCycModule> {
    if !support.contains(n) {
        return Err(Error::NotInSupport(n));
    }
    let un = units(n);
    let dim = un.order();
    let mut b = OutCycModule::builder(support.clone());
    for &m in support.members() {
        let um = units(m);
        if m % n == 0 {
            let gens = um
                .generators()
                .iter()
                .map(|&g| {
                    let gbar = reduce_unit(g, n);
                    permutation(dim, |j| un.index_of(un.mul(un.elements()[j], gbar)).expect("unit"))
                })
                .collect();
            b = b.level(m, dim, gens);
        } else {
            b = b.level(m, 0, vec![QMatrix::zeros(0, 0); um.basis().len()]);
        }
    }
    for (m, q) in support.covering_pairs() {
        if m % n == 0 {
            b = b.restriction(RestrictionMap { from: m, to: m * q, matrix: QMatrix::identity(dim) });
        }
    }
    b.build()
}

/// `F_n`: a copy of Q with trivial action at every multiple of `n`, identity restrictions.
pub fn semifree_module(n: u64, support: &SupportSet) -> Result<OutCycModule> {
    if !support.contains(n) {
        return Err(Error::NotInSupport(n));
    }
    let mut b = OutCycModule::builder(support.clone());
    for &m in support.members() {
        let k = units(m).basis().len();
        let d = usize::from(m % n == 0);
        b = b.level(m, d, vec![QMatrix::identity(d); k]);
    }
    for (m, q) in support.covering_pairs() {
        if m % n == 0 {
            b = b.restriction(RestrictionMap { from: m, to: m * q, matrix: QMatrix::identity(1) });
        }
    }
    b.build()
}

/// A `d`-dimensional trivial representation at level `n` only.
pub fn atomic_module(n: u64, d: usize, support: &SupportSet) -> Result<OutCycModule> {
    if !support.contains(n) {
        return Err(Error::NotInSupport(n));
    }
    let mut b = OutCycModule::builder(support.clone());
    for &m in support.members() {
        let k = units(m).basis().len();
        let dim = if m == n { d } else { 0 };
        b = b.level(m, dim, vec![QMatrix::identity(dim); k]);
    }
    b.build()
}

/// Direct sum, levelwise block diagonal.
pub fn direct_sum(summands: &[&OutCycModule]) -> Result<OutCycModule> {
    let first = summands.first().ok_or_else(|| Error::InvalidModule("empty direct sum".into()))?;
    let support = first.support.clone();
    if summands.iter().any(|s| s.support != support) {
        return Err(Error::SupportMismatch);
    }
    let mut b = OutCycModule::builder(support.clone());
    for (i, &n) in support.members().iter().enumerate() {
        let k = summands[0].levels[i].generator_actions.len();
        let dim = summands.iter().map(|s| s.levels[i].dim).sum();
        let gens = (0..k)
            .map(|g| {
                summands.iter().fold(QMatrix::zeros(0, 0), |acc, s| {
                    acc.direct_sum(&s.levels[i].generator_actions[g])
                })
            })
            .collect();
        b = b.level(n, dim, gens);
    }
    for (n, q) in support.covering_pairs() {
        let m = summands.iter().fold(QMatrix::zeros(0, 0), |acc, s| {
            acc.direct_sum(&s.restrictions[&(n, n * q)])
        });
        b = b.restriction(RestrictionMap { from: n, to: n * q, matrix: m });
    }
    b.build()
}

/// The morphism `free_module(d) → target` corresponding to `v ∈ target(C_d)`:
/// the basis element `u` at level `m` goes to `res[d→m](u · v)`.
pub fn yoneda_morphism(d: u64, target: Arc<OutCycModule>, v: &[Rat]) -> Result<ModuleMorphism> {
    let support = target.support.clone();
    let source = Arc::new(free_module(d, &support)?);
    let lvl = target.level(d)?;
    if v.len() != lvl.dim {
        return Err(Error::Dimension(format!("vector of length {} at level {d}", v.len())));
    }
    let orbit = lvl.orbit(v);
    let maps = support
        .members()
        .iter()
        .map(|&m| {
            if m % d != 0 {
                return Ok(QMatrix::zeros(target.dim(m), 0));
            }
            let r = target.restriction_matrix(m, d)?;
            let cols = orbit.iter().map(|w| r.mul_vec(w)).collect::<Result<Vec<_>>>()?;
            Ok(QMatrix::from_columns(target.dim(m), &cols))
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleMorphism::new(source, target, maps)
}

/// The morphism `⊕_g free_module(d_g) → target` sending the generator `g`
/// to `v_g ∈ target(C_{d_g})`; the zero module when there are no generators.
pub fn generated_morphism(target: &Arc<OutCycModule>, gens: &[(u64, Vec<Rat>)]) -> Result<ModuleMorphism> {
    let support = target.support.clone();
    if gens.is_empty() {
        return ModuleMorphism::zero(Arc::new(zero_module(&support)), target.clone());
    }
    let pieces = gens
        .iter()
        .map(|(d, v)| yoneda_morphism(*d, target.clone(), v))
        .collect::<Result<Vec<_>>>()?;
    let sources: Vec<&OutCycModule> = pieces.iter().map(|f| f.source.as_ref()).collect();
    let p = Arc::new(direct_sum(&sources)?);
    let maps = (0..support.len())
        .map(|i| {
            let mut acc = QMatrix::zeros(target.levels[i].dim, 0);
            for f in &pieces {
                acc = acc.hstack(&f.maps[i])?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleMorphism::new(p, target.clone(), maps)
}

/// A morphism of modules over the same support, one matrix per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMorphism {
    pub source: Arc<OutCycModule>,
    pub target: Arc<OutCycModule>,
    /// Aligned with the support; `maps[i]` is `dim_target × dim_source`.
    pub maps: Vec<QMatrix>,
}

impl ModuleMorphism {
    pub fn new(source: Arc<OutCycModule>, target: Arc<OutCycModule>, maps: Vec<QMatrix>) -> Result<Self> {
        if source.support != target.support {
            return Err(Error::SupportMismatch);
        }
        if maps.len() != source.levels.len() {
            return Err(Error::InvalidMorphism("one matrix per level required".into()));
        }
        for (i, m) in maps.iter().enumerate() {
            let want = (target.levels[i].dim, source.levels[i].dim);
            if m.shape() != want {
                return Err(Error::InvalidMorphism(format!(
                    "level {}: shape {:?}, expected {want:?}",
                    source.levels[i].n,
                    m.shape()
                )));
            }
        }
        Ok(ModuleMorphism { source, target, maps })
    }

    pub fn zero(source: Arc<OutCycModule>, target: Arc<OutCycModule>) -> Result<Self> {
        let maps = source
            .levels
            .iter()
            .zip(&target.levels)
            .map(|(s, t)| QMatrix::zeros(t.dim, s.dim))
            .collect();
        ModuleMorphism::new(source, target, maps)
    }

    pub fn identity(module: Arc<OutCycModule>) -> Self {
        let maps = module.levels.iter().map(|l| QMatrix::identity(l.dim)).collect();
        ModuleMorphism { source: module.clone(), target: module, maps }
    }

    pub fn support(&self) -> &SupportSet {
        &self.source.support
    }

    pub fn at(&self, n: u64) -> Result<&QMatrix> {
        self.source.support.index_of(n).map(|i| &self.maps[i]).ok_or(Error::NotInSupport(n))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| b.mul(a))
            .collect::<Result<Vec<_>>>()?;
        ModuleMorphism::new(self.source.clone(), other.target.clone(), maps)
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(QMatrix::is_zero)
    }

    /// Coefficients of all levels stacked in support order, row-major.
    pub fn flatten(&self) -> Vec<Rat> {
        self.maps.iter().flat_map(|m| m.entries().iter().cloned()).collect()
    }

    /// Equivariance at every level (checked on the generator basis) and
    /// naturality on every covering pair.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, f) in self.maps.iter().enumerate() {
            let (s, t) = (&self.source.levels[i], &self.target.levels[i]);
            for ((g, a_s), (_, a_t)) in s.generator_actions().zip(t.generator_actions()) {
                if f.mul(a_s).expect("shape") != a_t.mul(f).expect("shape") {
                    out.push(Violation {
                        check: "equivariance",
                        detail: format!("level {}: unit {g}", s.n),
                    });
                }
            }
        }
        for (n, q) in self.support().covering_pairs() {
            let m = n * q;
            let (fi, fj) = (self.at(n).expect("member"), self.at(m).expect("member"));
            let lhs = self.target.restrictions[&(n, m)].mul(fi).expect("shape");
            let rhs = fj.mul(&self.source.restrictions[&(n, m)]).expect("shape");
            if lhs != rhs {
                out.push(Violation {
                    check: "naturality",
                    detail: format!("square {n}->{m}"),
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

/// Kernel, image and cokernel of a morphism with their canonical maps.
pub struct Factorization {
    pub kernel: Arc<OutCycModule>,
    pub kernel_inclusion: ModuleMorphism,
    pub image: Arc<OutCycModule>,
    pub image_inclusion: ModuleMorphism,
    pub cokernel: Arc<OutCycModule>,
    pub cokernel_projection: ModuleMorphism,
}

/// Sub-object spanned levelwise by the columns of `bases` (full column rank,
/// stable under the structure maps): induced actions and restrictions are the
/// unique solutions of `B · X = A · B`.
fn induced_submodule(module: &OutCycModule, bases: &[QMatrix]) -> Result<OutCycModule> {
    let mut b = OutCycModule::builder(module.support.clone());
    for (lvl, basis) in module.levels.iter().zip(bases) {
        let gens = lvl
            .generator_actions
            .iter()
            .map(|a| {
                basis
                    .solve_matrix(&a.mul(basis)?)?
                    .ok_or_else(|| Error::InvalidMorphism(format!("level {}: subspace not invariant", lvl.n)))
            })
            .collect::<Result<Vec<_>>>()?;
        b = b.level(lvl.n, basis.cols(), gens);
    }
    for (&(n, m), r) in &module.restrictions {
        let (bi, bj) = (
            &bases[module.support.index_of(n).expect("member")],
            &bases[module.support.index_of(m).expect("member")],
        );
        let x = bj
            .solve_matrix(&r.mul(bi)?)?
            .ok_or_else(|| Error::InvalidMorphism(format!("restriction {n}->{m} leaves the subspace")))?;
        b = b.restriction(RestrictionMap { from: n, to: m, matrix: x });
    }
    b.build()
}

/// Quotient by levelwise subspaces; `projections[i]` is a surjection with
/// kernel the subspace, and `sections[i]` a right inverse.
fn induced_quotient(module: &OutCycModule, projections: &[QMatrix], sections: &[QMatrix]) -> Result<OutCycModule> {
    let mut b = OutCycModule::builder(module.support.clone());
    for ((lvl, p), s) in module.levels.iter().zip(projections).zip(sections) {
        let gens = lvl
            .generator_actions
            .iter()
            .map(|a| p.mul(a)?.mul(s))
            .collect::<Result<Vec<_>>>()?;
        b = b.level(lvl.n, p.rows(), gens);
    }
    for (&(n, m), r) in &module.restrictions {
        let (i, j) = (module.support.index_of(n).expect("member"), module.support.index_of(m).expect("member"));
        b = b.restriction(RestrictionMap { from: n, to: m, matrix: projections[j].mul(r)?.mul(&sections[i])? });
    }
    b.build()
}

fn right_inverse(p: &QMatrix) -> Result<QMatrix> {
    p.solve_matrix(&QMatrix::identity(p.rows()))?
        .ok_or_else(|| Error::Dimension("projection is not surjective".into()))
}

pub fn morphism_factor(f: &ModuleMorphism) -> Result<Factorization> {
    let violations = f.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidMorphism(violations[0].to_string()));
    }
    let kernels: Vec<QMatrix> = f.maps.iter().map(QMatrix::kernel_basis).collect();
    let images: Vec<QMatrix> = f.maps.iter().map(QMatrix::column_space).collect();
    let projections: Vec<QMatrix> = f.maps.iter().map(|m| m.cokernel().0).collect();
    let sections = projections.iter().map(right_inverse).collect::<Result<Vec<_>>>()?;

    let kernel = Arc::new(induced_submodule(&f.source, &kernels)?);
    let image = Arc::new(induced_submodule(&f.target, &images)?);
    let cokernel = Arc::new(induced_quotient(&f.target, &projections, &sections)?);
    Ok(Factorization {
        kernel_inclusion: ModuleMorphism::new(kernel.clone(), f.source.clone(), kernels)?,
        image_inclusion: ModuleMorphism::new(image.clone(), f.target.clone(), images)?,
        cokernel_projection: ModuleMorphism::new(f.target.clone(), cokernel.clone(), projections)?,
        kernel,
        image,
        cokernel,
    })
}

/// Levelwise duals with transposed restrictions; group actions are forgotten.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseSystem {
    support: SupportSet,
    dims: Vec<usize>,
    /// Keyed by covering pair `(n, n·q)`: the structure map `D(nq) → D(n)`,
    /// shape `dim(n) × dim(nq)`.
    maps: BTreeMap<(u64, u64), QMatrix>,
}

impl InverseSystem {
    /// Structure maps must be given for every covering pair.
    pub fn new(support: SupportSet, dims: Vec<usize>, maps: BTreeMap<(u64, u64), QMatrix>) -> Result<Self> {
        if dims.len() != support.len() {
            return Err(Error::Dimension("one dimension per level".into()));
        }
        let sys = InverseSystem { support, dims, maps };
        for (n, q) in sys.support.covering_pairs() {
            let m = sys
                .maps
                .get(&(n, n * q))
                .ok_or_else(|| Error::InvalidModule(format!("missing structure map {}->{n}", n * q)))?;
            if m.shape() != (sys.dim(n), sys.dim(n * q)) {
                return Err(Error::Dimension(format!("structure map {}->{n}", n * q)));
            }
        }
        Ok(sys)
    }

    /// The constant system `Q` with identity maps.
    pub fn constant(support: &SupportSet) -> Self {
        let maps = support
            .covering_pairs()
            .into_iter()
            .map(|(n, q)| ((n, n * q), QMatrix::identity(1)))
            .collect();
        InverseSystem { support: support.clone(), dims: vec![1; support.len()], maps }
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, n: u64) -> usize {
        self.support.index_of(n).map_or(0, |i| self.dims[i])
    }

    pub fn covering_map(&self, n: u64, m: u64) -> Option<&QMatrix> {
        self.maps.get(&(n, m))
    }

    /// Structure map `D(m) → D(n)` for `n | m`.
    pub fn map(&self, m: u64, n: u64) -> Result<QMatrix> {
        let steps = chain_primes(m, n)?;
        let mut acc = QMatrix::identity(self.dim(m));
        let mut cur = m;
        for &q in steps.iter().rev() {
            let r = self.maps.get(&(cur / q, cur)).ok_or(Error::NotInSupport(cur / q))?;
            acc = r.mul(&acc)?;
            cur /= q;
        }
        Ok(acc)
    }

    /// Path independence of composite structure maps.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for &(n, nq) in self.maps.keys() {
            for &(n2, nq2) in self.maps.keys() {
                let (q, q2) = (nq / n, nq2 / n2);
                if n2 != n || q2 <= q || !self.support.contains(n * q * q2) {
                    continue;
                }
                let top = n * q * q2;
                let a = self.maps[&(n, nq)].mul(&self.maps[&(nq, top)]).expect("shape");
                let b = self.maps[&(n, nq2)].mul(&self.maps[&(nq2, top)]).expect("shape");
                if a != b {
                    out.push(Violation {
                        check: "path independence",
                        detail: format!("{top}->{nq}->{n} differs from {top}->{nq2}->{n}"),
                    });
                }
            }
        }
        out
    }

    /// Whether every covering structure map is surjective.
    pub fn all_maps_surjective(&self) -> bool {
        self.maps.values().all(|m| m.rank() == m.rows())
    }
}

pub fn dual_system(module: &OutCycModule) -> InverseSystem {
    InverseSystem {
        support: module.support.clone(),
        dims: module.dims(),
        maps: module.restrictions.iter().map(|(k, r)| (*k, r.transpose())).collect(),
    }
}
