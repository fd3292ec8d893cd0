//! Hom and Ext between modules: directly by linear algebra, through limits of
//! dual systems, through free resolutions, and derived limits on the nerve of
//! the divisibility poset.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, QMatrix};
use crate::modp;
use crate::outcyc::{
    dual_system, generated_morphism, morphism_factor, regular_module, InverseSystem,
    ModuleMorphism, OutCycModule,
};
use crate::rational::Rat;
use crate::site::units;
use crate::sparse::SparseMatrix;

#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: Arc<OutCycModule>,
    pub target: Arc<OutCycModule>,
    pub basis: Vec<ModuleMorphism>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis morphisms as columns of stacked coefficients.
    pub fn coefficient_matrix(&self) -> QMatrix {
        let len = self
            .source
            .dims()
            .iter()
            .zip(self.target.dims())
            .map(|(s, t)| s * t)
            .sum();
        QMatrix::from_columns(len, &self.basis.iter().map(ModuleMorphism::flatten).collect::<Vec<_>>())
    }

    /// Mutual membership of the two bases.
    pub fn same_span(&self, other: &HomSpace) -> bool {
        self.dim() == other.dim() && self.coefficient_matrix().same_column_span(&other.coefficient_matrix())
    }

    /// Whether `f` lies in the span.
    pub fn contains(&self, f: &ModuleMorphism) -> bool {
        let m = self.coefficient_matrix();
        m.solve(&f.flatten()).ok().flatten().is_some()
    }
}

/// Vectorization index of entry `(r, c)` of a `rows × cols` matrix.
#[inline]
fn vi(r: usize, c: usize, cols: usize) -> usize {
    r * cols + c
}

fn reshape(v: &[Rat], rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_vec(rows, cols, v.to_vec()).expect("length matches")
}

/// Basis of equivariant maps `X(C_n) → Y(C_n)`, vectorized row-major.
/// Equivariance is imposed on the generator basis of `units(n)`, which
/// implies it for every unit.
fn equivariant_maps(x: &OutCycModule, y: &OutCycModule, n: u64) -> Result<QMatrix> {
    let (lx, ly) = (x.level(n)?, y.level(n)?);
    let (ds, dt) = (lx.dim, ly.dim);
    let unknowns = ds * dt;
    if unknowns == 0 {
        return Ok(QMatrix::zeros(0, 0));
    }
    let gens: Vec<(&QMatrix, &QMatrix)> =
        lx.generator_actions().zip(ly.generator_actions()).map(|((_, a), (_, b))| (a, b)).collect();
    let mut eqs = QMatrix::zeros(unknowns * gens.len(), unknowns);
    for (g, (a_s, a_t)) in gens.iter().enumerate() {
        let base = g * unknowns;
        // (f A_s - A_t f)[r][c]
        for r in 0..dt {
            for c in 0..ds {
                let row = base + vi(r, c, ds);
                for k in 0..ds {
                    let a = &a_s[(k, c)];
                    if !a.is_zero() {
                        eqs[(row, vi(r, k, ds))] += a;
                    }
                }
                for k in 0..dt {
                    let a = &a_t[(r, k)];
                    if !a.is_zero() {
                        eqs[(row, vi(k, c, ds))] -= a;
                    }
                }
            }
        }
    }
    Ok(eqs.kernel_basis())
}

/// Basis of `Hom(X, Y)`: levelwise equivariant maps cut down by naturality
/// on every covering pair.
pub fn hom_direct(x: &Arc<OutCycModule>, y: &Arc<OutCycModule>) -> Result<HomSpace> {
    if x.support() != y.support() {
        return Err(Error::SupportMismatch);
    }
    let support = x.support();
    let members = support.members();
    let local: Vec<QMatrix> = members.iter().map(|&n| equivariant_maps(x, y, n)).collect::<Result<_>>()?;
    let mut offsets = Vec::with_capacity(local.len());
    let mut total = 0;
    for k in &local {
        offsets.push(total);
        total += k.cols();
    }
    let pairs = support.covering_pairs();
    let mut blocks: Vec<QMatrix> = Vec::new();
    for &(n, q) in &pairs {
        let m = n * q;
        let (i, j) = (support.index_of(n).expect("member"), support.index_of(m).expect("member"));
        let (rt, rs) = (y.covering_restriction(n, m).expect("pair"), x.covering_restriction(n, m).expect("pair"));
        let (rows, cols) = (y.dim(m), x.dim(n));
        if rows * cols == 0 {
            continue;
        }
        let mut block = QMatrix::zeros(rows * cols, total);
        for a in 0..local[i].cols() {
            let f = reshape(&local[i].column(a), y.dim(n), x.dim(n));
            for (r, v) in rt.mul(&f)?.entries().iter().enumerate() {
                block[(r, offsets[i] + a)] = v.clone();
            }
        }
        for b in 0..local[j].cols() {
            let g = reshape(&local[j].column(b), y.dim(m), x.dim(m));
            for (r, v) in g.mul(rs)?.entries().iter().enumerate() {
                block[(r, offsets[j] + b)] -= v;
            }
        }
        blocks.push(block);
    }
    let solutions = if blocks.is_empty() {
        QMatrix::identity(total)
    } else {
        let mut eqs = blocks[0].clone();
        for b in &blocks[1..] {
            eqs = eqs.vstack(b)?;
        }
        eqs.kernel_basis()
    };
    let basis = (0..solutions.cols())
        .map(|s| {
            let c = solutions.column(s);
            let maps = members
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    let coeffs = &c[offsets[i]..offsets[i] + local[i].cols()];
                    let v = if local[i].cols() == 0 {
                        vec![Rat::ZERO; y.dim(n) * x.dim(n)]
                    } else {
                        local[i].mul_vec(coeffs)?
                    };
                    Ok(reshape(&v, y.dim(n), x.dim(n)))
                })
                .collect::<Result<Vec<_>>>()?;
            ModuleMorphism::new(x.clone(), y.clone(), maps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomSpace { source: x.clone(), target: y.clone(), basis })
}

/// A compatible family of linear forms, one per level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitElement {
    pub forms: Vec<Vec<Rat>>,
}

/// Basis of `lim D` as the equalizer of the covering structure maps.
pub fn limit(system: &InverseSystem) -> Vec<LimitElement> {
    let support = system.support();
    let dims = system.dims();
    let mut offsets = Vec::new();
    let mut total = 0;
    for &d in dims {
        offsets.push(total);
        total += d;
    }
    let pairs = support.covering_pairs();
    let rows: usize = pairs.iter().map(|&(n, _)| system.dim(n)).sum();
    let mut eqs = QMatrix::zeros(rows, total);
    let mut r0 = 0;
    for &(n, q) in &pairs {
        let m = system.covering_map(n, n * q).expect("pair");
        let (i, j) = (support.index_of(n).expect("member"), support.index_of(n * q).expect("member"));
        eqs.set_block(r0, offsets[j], m);
        for a in 0..dims[i] {
            eqs[(r0 + a, offsets[i] + a)] -= &Rat::ONE;
        }
        r0 += dims[i];
    }
    let k = eqs.kernel_basis();
    (0..k.cols())
        .map(|c| {
            let col = k.column(c);
            LimitElement {
                forms: offsets.iter().zip(dims).map(|(&o, &d)| col[o..o + d].to_vec()).collect(),
            }
        })
        .collect()
}

/// The morphism `X → Q[Out(-)]` determined by a compatible family of forms:
/// `φ_n(x) = Σ_g λ_n(g⁻¹ x) e_g`.
pub fn reconstruct(x: &Arc<OutCycModule>, regular: &Arc<OutCycModule>, lambda: &LimitElement) -> Result<ModuleMorphism> {
    let maps = x
        .levels()
        .iter()
        .zip(&lambda.forms)
        .map(|(lvl, form)| {
            let u = lvl.units();
            let rows = u
                .elements()
                .iter()
                .map(|&g| lvl.action(u.inverse(g))?.transpose().mul_vec(form))
                .collect::<Result<Vec<_>>>()?;
            QMatrix::from_rows(lvl.dim, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleMorphism::new(x.clone(), regular.clone(), maps)
}

/// `Hom(X, Q[Out(-)])` computed as `lim X^∨` followed by reconstruction.
pub fn hom_via_limit(x: &Arc<OutCycModule>) -> Result<(HomSpace, Vec<LimitElement>)> {
    let regular = Arc::new(regular_module(x.support()));
    let elements = limit(&dual_system(x));
    let basis = elements
        .iter()
        .map(|l| reconstruct(x, &regular, l))
        .collect::<Result<Vec<_>>>()?;
    Ok((HomSpace { source: x.clone(), target: regular, basis }, elements))
}

/// Finite cochain complex `C^0 → C^1 → ⋯` with sparse differentials.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub dims: Vec<usize>,
    /// `differentials[k] : C^k → C^{k+1}`.
    pub differentials: Vec<SparseMatrix>,
}

impl CochainComplex {
    pub fn new(dims: Vec<usize>, differentials: Vec<SparseMatrix>) -> Result<Self> {
        for (k, d) in differentials.iter().enumerate() {
            if d.cols() != dims[k] || dims.get(k + 1).is_some_and(|&r| r != d.rows()) {
                return Err(Error::Dimension(format!("differential {k}")));
            }
        }
        Ok(CochainComplex { dims, differentials })
    }

    pub fn d_squared_zero(&self) -> bool {
        self.differentials.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Cohomology dimensions `H^0..H^max_k` (needs `differentials[max_k]`).
    ///
    /// Ranks are first bounded from below modulo a prime. Since `d² = 0`
    /// forces `rank d^k + rank d^{k-1} ≤ dim C^k` over Q, lower bounds that
    /// meet this at degree `k` are exact; remaining ranks are computed over Q.
    pub fn cohomology(&self, max_k: usize) -> Vec<usize> {
        let count = self.differentials.len().min(max_k + 1);
        let certified_sum = self.d_squared_zero();
        let lower: Vec<Option<usize>> = self.differentials[..count].iter().map(modp::sparse_rank).collect();
        let mut exact: Vec<Option<usize>> = self.differentials[..count]
            .iter()
            .zip(&lower)
            .map(|(d, l)| l.filter(|&r| r == d.rows().min(d.cols())))
            .collect();
        if certified_sum {
            for k in 0..count {
                let prev = if k == 0 { Some(0) } else { lower[k - 1] };
                if let (Some(a), Some(b)) = (lower[k], prev) {
                    if a + b == self.dims[k] {
                        exact[k] = Some(a);
                        if k > 0 {
                            exact[k - 1] = Some(b);
                        }
                    }
                }
            }
        }
        let mut rank = |k: usize| -> usize {
            if k >= count {
                return 0;
            }
            *exact[k].get_or_insert_with(|| self.differentials[k].rank_exact())
        };
        (0..=max_k.min(self.dims.len() - 1))
            .map(|k| {
                let below = if k == 0 { 0 } else { rank(k - 1) };
                self.dims[k] - rank(k) - below
            })
            .collect()
    }

    /// Representative cocycles of a basis of `H^k`, by dense elimination.
    pub fn witnesses(&self, k: usize) -> Vec<Vec<Rat>> {
        let zero = SparseMatrix::new(0, self.dims[k]);
        let d = self.differentials.get(k).unwrap_or(&zero).to_dense();
        let cocycles = d.kernel_basis();
        let mut span = Echelon::new(self.dims[k]);
        if k > 0 {
            let prev = self.differentials[k - 1].to_dense();
            for c in prev.columns() {
                span.insert(&c);
            }
        }
        cocycles.columns().into_iter().filter(|z| span.insert(z)).collect()
    }
}

/// Strictly increasing divisibility chains of each length, in a fixed order.
fn chains(support: &crate::site::SupportSet, max_len: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out: Vec<Vec<Vec<u64>>> = vec![support.members().iter().map(|&n| vec![n]).collect()];
    while out.len() < max_len {
        let next: Vec<Vec<u64>> = out
            .last()
            .expect("nonempty")
            .iter()
            .flat_map(|c| {
                let top = *c.last().expect("nonempty chain");
                support
                    .multiples_of(top)
                    .into_iter()
                    .filter(move |&m| m != top)
                    .map(move |m| {
                        let mut c2 = c.clone();
                        c2.push(m);
                        c2
                    })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        out.push(next);
    }
    out
}

/// Number of cochain entries the nerve complex needs up to degree `max_k + 1`.
pub fn nerve_size(system: &InverseSystem, max_k: usize) -> usize {
    chains(system.support(), max_k + 2)
        .iter()
        .map(|cs| cs.iter().map(|c| system.dim(c[0])).sum::<usize>())
        .sum()
}

/// The nerve complex of the support with coefficients in `D`: `C^k` is the
/// product over chains `n_0 | ⋯ | n_k` of `D(n_0)`; the face dropping `n_0`
/// carries the structure map `D(n_1) → D(n_0)`, the others are signed
/// identities.
pub fn nerve_complex(system: &InverseSystem, max_k: usize) -> Result<CochainComplex> {
    let all = chains(system.support(), max_k + 2);
    let mut dims = Vec::new();
    let mut index: Vec<HashMap<Vec<u64>, usize>> = Vec::new();
    for cs in &all {
        let mut off = 0;
        let mut idx = HashMap::with_capacity(cs.len());
        for c in cs {
            idx.insert(c.clone(), off);
            off += system.dim(c[0]);
        }
        dims.push(off);
        index.push(idx);
    }
    let mut maps: HashMap<(u64, u64), QMatrix> = HashMap::new();
    let mut differentials = Vec::new();
    for k in 0..all.len().saturating_sub(1) {
        let mut d = SparseMatrix::new(dims[k + 1], dims[k]);
        for sigma in &all[k + 1] {
            let row = index[k + 1][sigma];
            let n0 = sigma[0];
            let dn0 = system.dim(n0);
            for i in 0..sigma.len() {
                let mut face = sigma.clone();
                face.remove(i);
                let col = index[k][&face];
                let sign = if i % 2 == 0 { Rat::ONE } else { -Rat::ONE };
                if i == 0 {
                    let n1 = sigma[1];
                    if let std::collections::hash_map::Entry::Vacant(e) = maps.entry((n1, n0)) {
                        e.insert(system.map(n1, n0)?);
                    }
                    let m = &maps[&(n1, n0)];
                    for a in 0..dn0 {
                        for b in 0..m.cols() {
                            if !m[(a, b)].is_zero() {
                                d.add_entry(row + a, col + b, &(&sign * &m[(a, b)]));
                            }
                        }
                    }
                } else {
                    for a in 0..dn0 {
                        d.add_entry(row + a, col + a, &sign);
                    }
                }
            }
        }
        differentials.push(d);
    }
    CochainComplex::new(dims, differentials)
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivedLimits {
    pub dims: Vec<usize>,
    pub cochain_dims: Vec<usize>,
    pub d_squared_zero: bool,
    /// `H^0` is the equalizer: same dimension, and every equalizer element is a cocycle.
    pub h0_matches_equalizer: bool,
    /// Cocycle representatives per degree; empty when the complex is too large to densify.
    pub witnesses: Vec<Vec<Vec<Rat>>>,
}

/// Complexes up to this many cochains per degree also get witness cocycles.
pub const WITNESS_LIMIT: usize = 600;

pub fn lim_derived(system: &InverseSystem, max_k: usize) -> Result<DerivedLimits> {
    let complex = nerve_complex(system, max_k)?;
    let d_squared_zero = complex.d_squared_zero();
    let mut dims = complex.cohomology(max_k);
    dims.resize(max_k + 1, 0);
    let eq = limit(system);
    let h0_matches_equalizer = eq.len() == dims[0]
        && eq.iter().all(|l| {
            let v: Vec<Rat> = l.forms.concat();
            complex.differentials.first().is_none_or(|d0| {
                let m = SparseMatrix::from_dense(&QMatrix::column_vector(v));
                d0.mul(&m).is_zero()
            })
        });
    let witnesses = (0..=max_k)
        .map(|k| {
            if k < complex.dims.len() && complex.dims[k] <= WITNESS_LIMIT && dims[k] > 0 {
                complex.witnesses(k)
            } else {
                Vec::new()
            }
        })
        .collect();
    Ok(DerivedLimits { dims, cochain_dims: complex.dims.clone(), d_squared_zero, h0_matches_equalizer, witnesses })
}

/// A resolution `⋯ → P_1 → P_0 → X` by sums of free modules.
pub struct FreeResolution {
    /// Generators of each `P_k`: `(level, image)`, where the image of the
    /// generator in `P_{k-1}(level)` (or `X(level)` for `k = 0`) is stored.
    pub generators: Vec<Vec<(u64, Vec<Rat>)>>,
    pub modules: Vec<Arc<OutCycModule>>,
    /// `maps[0] : P_0 → X`, `maps[k] : P_k → P_{k-1}`.
    pub maps: Vec<ModuleMorphism>,
}

/// Greedy generators of `target`: for levels in increasing order, add basis
/// vectors not yet reached by the orbits of earlier generators.
fn cover(target: &Arc<OutCycModule>) -> Result<(Vec<(u64, Vec<Rat>)>, Arc<OutCycModule>, ModuleMorphism)> {
    let support = target.support().clone();
    let mut gens: Vec<(u64, Vec<Rat>)> = Vec::new();
    for &n in support.members() {
        let lvl = target.level(n)?;
        let mut span = Echelon::new(lvl.dim);
        for (d, v) in &gens {
            if n % d != 0 {
                continue;
            }
            let r = target.restriction_matrix(n, *d)?;
            for w in target.level(*d)?.orbit(v) {
                span.insert(&r.mul_vec(&w)?);
            }
        }
        for i in 0..lvl.dim {
            if span.is_full() {
                break;
            }
            let mut e = vec![Rat::ZERO; lvl.dim];
            e[i] = Rat::ONE;
            if span.contains(&e) {
                continue;
            }
            for w in lvl.orbit(&e) {
                span.insert(&w);
            }
            gens.push((n, e));
        }
    }
    let f = generated_morphism(target, &gens)?;
    Ok((gens, f.source.clone(), f))
}

/// Resolution of `x` through `P_len`; stops early once a kernel vanishes.
pub fn free_resolution(x: &Arc<OutCycModule>, len: usize) -> Result<FreeResolution> {
    let mut res = FreeResolution { generators: Vec::new(), modules: Vec::new(), maps: Vec::new() };
    let mut target = x.clone();
    let mut inclusion: Option<ModuleMorphism> = None;
    for _ in 0..=len {
        let (gens, p, f) = cover(&target)?;
        let d = match &inclusion {
            Some(inc) => f.then(inc)?,
            None => f,
        };
        let levels: Vec<u64> = gens.iter().map(|g| g.0).collect();
        let images = levels
            .iter()
            .enumerate()
            .map(|(g, &lvl)| (lvl, d.at(lvl).expect("member").column(generator_column(&levels, g))))
            .collect();
        let fac = morphism_factor(&d)?;
        res.generators.push(images);
        res.modules.push(p);
        res.maps.push(d);
        if fac.kernel.is_zero() {
            break;
        }
        target = fac.kernel.clone();
        inclusion = Some(fac.kernel_inclusion);
    }
    Ok(res)
}

/// Column of `P(levels[g])` holding the basis element `1` of generator `g`.
fn generator_column(levels: &[u64], g: usize) -> usize {
    let level = levels[g];
    levels[..g]
        .iter()
        .filter(|&&d| level.is_multiple_of(d))
        .map(|&d| units(d).order())
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtResult {
    pub dims: Vec<usize>,
    pub cochain_dims: Vec<usize>,
    /// Levels of the free generators of each `P_k`.
    pub generator_levels: Vec<Vec<u64>>,
    pub d_squared_zero: bool,
}

/// The complex `Hom(P_0, Y) → Hom(P_1, Y) → ⋯`, identifying
/// `Hom(free_module(d), Y)` with `Y(C_d)`.
pub fn hom_complex(resolution: &FreeResolution, y: &OutCycModule) -> Result<CochainComplex> {
    let gens = &resolution.generators;
    let mut actions: HashMap<u64, Vec<QMatrix>> = HashMap::new();
    let mut offsets: Vec<Vec<usize>> = Vec::new();
    let mut dims = Vec::new();
    for g in gens {
        let mut off = 0;
        let mut o = Vec::new();
        for (d, _) in g {
            o.push(off);
            off += y.dim(*d);
        }
        offsets.push(o);
        dims.push(off);
    }
    let mut differentials = Vec::new();
    for k in 0..gens.len().saturating_sub(1) {
        let prev_levels: Vec<u64> = gens[k].iter().map(|g| g.0).collect();
        let mut delta = SparseMatrix::new(dims[k + 1], dims[k]);
        for (gi, (dg, image)) in gens[k + 1].iter().enumerate() {
            // image ∈ P_k(dg): blocks over generators h of P_k with d_h | dg
            let mut pos = 0;
            for (hi, &dh) in prev_levels.iter().enumerate() {
                if dg % dh != 0 {
                    continue;
                }
                let uh = units(dh);
                if let std::collections::hash_map::Entry::Vacant(e) = actions.entry(dh) {
                    let lvl = y.level(dh)?;
                    e.insert(uh.elements().iter().map(|&u| lvl.action(u)).collect::<Result<_>>()?);
                }
                let mut block = QMatrix::zeros(y.dim(dh), y.dim(dh));
                for (ui, a) in actions[&dh].iter().enumerate() {
                    let c = &image[pos + ui];
                    if !c.is_zero() {
                        block = block.add(&a.scale(c))?;
                    }
                }
                pos += uh.order();
                if block.is_zero() {
                    continue;
                }
                let block = y.restriction_matrix(*dg, dh)?.mul(&block)?;
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        delta.add_entry(offsets[k + 1][gi] + r, offsets[k][hi] + c, &block[(r, c)]);
                    }
                }
            }
        }
        differentials.push(delta);
    }
    CochainComplex::new(dims, differentials)
}

/// `Ext^0..Ext^max_k` of `(X, Y)` from a free resolution of `X`.
pub fn ext_via_resolution(x: &Arc<OutCycModule>, y: &OutCycModule, max_k: usize) -> Result<ExtResult> {
    if x.support() != y.support() {
        return Err(Error::SupportMismatch);
    }
    let res = free_resolution(x, max_k + 1)?;
    let complex = hom_complex(&res, y)?;
    let mut dims = complex.cohomology(max_k);
    dims.resize(max_k + 1, 0);
    Ok(ExtResult {
        dims,
        cochain_dims: complex.dims.clone(),
        generator_levels: res.generators.iter().map(|g| g.iter().map(|x| x.0).collect()).collect(),
        d_squared_zero: complex.d_squared_zero(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequentialLimit {
    pub lim: usize,
    pub lim1: usize,
    pub mittag_leffler: bool,
}

/// `lim` and `lim¹` of a finite tower `D_0 ← D_1 ← ⋯ ← D_r`, where
/// `maps[k] : D_{k+1} → D_k`, from `Δ(x)_k = x_k - d(x_{k+1})` for `k < r`.
pub fn sequential_lim1(dims: &[usize], maps: &[QMatrix]) -> Result<SequentialLimit> {
    if dims.is_empty() || maps.len() + 1 != dims.len() {
        return Err(Error::Dimension("a tower of r+1 spaces needs r maps".into()));
    }
    for (k, m) in maps.iter().enumerate() {
        if m.shape() != (dims[k], dims[k + 1]) {
            return Err(Error::Dimension(format!("tower map {k}")));
        }
    }
    let r = dims.len() - 1;
    let mut col_off = vec![0];
    for d in dims {
        col_off.push(col_off.last().expect("nonempty") + d);
    }
    let rows = col_off[r];
    let mut delta = QMatrix::zeros(rows, col_off[r + 1]);
    for k in 0..r {
        delta.set_block(col_off[k], col_off[k], &QMatrix::identity(dims[k]));
        delta.set_block(col_off[k], col_off[k + 1], &maps[k].scale(&-Rat::ONE));
    }
    let rank = delta.rank();
    Ok(SequentialLimit {
        lim: delta.cols() - rank,
        lim1: rows - rank,
        mittag_leffler: maps.iter().all(|m| m.rank() == m.rows()),
    })
}

/// The tower of duals of `x` along a divisibility chain `n_0 | n_1 | ⋯`.
pub fn dual_tower(x: &OutCycModule, chain: &[u64]) -> Result<(Vec<usize>, Vec<QMatrix>)> {
    let dims = chain.iter().map(|&n| x.level(n).map(|l| l.dim)).collect::<Result<Vec<_>>>()?;
    let maps = chain
        .windows(2)
        .map(|w| Ok(x.restriction_matrix(w[1], w[0])?.transpose()))
        .collect::<Result<Vec<_>>>()?;
    Ok((dims, maps))
}
