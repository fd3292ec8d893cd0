//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ruq::battery::battery;
use ruq::hom_ext::{dual_tower, ext_via_resolution, hom_direct, hom_via_limit, lim_derived, sequential_lim1};
use ruq::normal_basis::{normal_basis_iso, normal_basis_report, Scaling};
use ruq::outcyc::{atomic_module, dual_system, regular_module, OutCycModule};
use ruq::rep_ring::{
    crt_iso, mul, restrict_sub, restrict_sub_matrix, tau_dimension_by_elimination, tau_ru_module, transfer,
    transfer_ideal, transfer_matrix, RUElement, TauLevel,
};
use ruq::{QMatrix, Rat, SupportSet};

const SEED: u64 = 1000;
const RANDOM_MODULES: usize = 20;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn divisors(n: u64) -> SupportSet {
    SupportSet::divisors_of(n).unwrap()
}

fn supports_6_7() -> Vec<(&'static str, SupportSet)> {
    vec![
        ("divisors(12)", divisors(12)),
        ("divisors(60)", divisors(60)),
        ("upto:10", SupportSet::upto(10).unwrap()),
    ]
}

fn naive_totient(n: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

fn within(limit: Duration, t: Instant, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e <= limit, || format!("{what} took {e:?}, limit {limit:?}"))
}

fn c1_totient() -> Outcome {
    let t = Instant::now();
    for n in 1..=100u64 {
        let phi = naive_totient(n);
        let d = TauLevel::new(n).dim() as u64;
        ensure(d == phi, || format!("n = {n}: dim {d}, phi {phi}"))?;
        let e = tau_dimension_by_elimination(n) as u64;
        ensure(e == phi, || format!("n = {n}: elimination gives {e}, phi {phi}"))?;
    }
    within(Duration::from_secs(60), t, "n <= 100")?;
    Ok(format!("dim = phi(n) for n <= 100 in {:?}", t.elapsed()))
}

/// Columns `X^i · (1 + X^{q} + ⋯ + X^{(p-1)q})` in `Q[X]/(X^n - 1)`, `q = n/p`.
fn norm_ideal(p: u64, n: u64) -> QMatrix {
    let q = n / p;
    let cols: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut v = vec![Rat::ZERO; n as usize];
            for j in 0..p {
                v[((i + j * q) % n) as usize] = Rat::ONE;
            }
            v
        })
        .collect();
    QMatrix::from_columns(n as usize, &cols)
}

fn c2_transfer_ideal() -> Outcome {
    let mut sizes = Vec::new();
    for (p, k) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)] {
        let n: u64 = p.pow(k);
        let tr = transfer_ideal(n);
        let norm = norm_ideal(p, n);
        ensure(norm.column_span_contains(&tr), || format!("{n}: a transfer lies outside the norm ideal"))?;
        ensure(tr.column_span_contains(&norm), || format!("{n}: the norm ideal is not spanned by transfers"))?;
        let r = tr.rank_exact();
        let expected = (n - naive_totient(n)) as usize;
        ensure(r == expected, || format!("{n}: ideal rank {r}, expected {expected}"))?;
        sizes.push(format!("{n}:{r}"));
    }
    Ok(format!("equal ideals by double inclusion, ranks {}", sizes.join(" ")))
}

fn c3_crt() -> Outcome {
    for (n, m) in [(2, 3), (4, 9), (8, 27), (4, 25), (3, 8)] {
        let a = crt_iso(n, m).map_err(|e| e.to_string())?;
        let r = a.rank_exact();
        ensure(a.rows() == a.cols() && r == (n * m) as usize, || format!("({n},{m}): rank {r} of {:?}", a.shape()))?;
    }
    Ok("full rank for (2,3) (4,9) (8,27) (4,25) (3,8)".into())
}

fn c4_normal_basis() -> Outcome {
    let mut parts = Vec::new();
    for n in [12, 60, 360, 2520] {
        let t = Instant::now();
        let r = normal_basis_iso(&divisors(n)).map_err(|e| e.to_string())?;
        let bad: Vec<u64> = r.levels.iter().filter(|l| !l.invertible).map(|l| l.level).collect();
        ensure(bad.is_empty(), || format!("divisors({n}): singular at levels {bad:?}"))?;
        ensure(r.violations.is_empty(), || format!("divisors({n}): {}", r.violations[0]))?;
        for l in &r.levels {
            ensure(l.size as u64 == naive_totient(l.level), || format!("level {} has size {}", l.level, l.size))?;
        }
        if n == 2520 {
            within(Duration::from_secs(300), t, "divisors(2520)")?;
        }
        parts.push(format!("{n} ({:.1?})", t.elapsed()));
    }
    Ok(format!("invertible, equivariant, natural over divisors of {}", parts.join(", ")))
}

fn c5_unscaled() -> Outcome {
    for n in [4, 12] {
        let s = divisors(n);
        let r = normal_basis_report(&s, Scaling::Unscaled).map_err(|e| e.to_string())?;
        let Some(v) = r.violations.iter().find(|v| v.check == "naturality") else {
            continue;
        };
        // recompute the failing square for the report
        let (a, b) = v.detail.trim_start_matches("square ").split_once("->").expect("square a->b");
        let (a, b): (u64, u64) = (a.parse().unwrap(), b.parse().unwrap());
        let f = &r.morphism;
        let lhs = f.target.covering_restriction(a, b).unwrap().mul(f.at(a).unwrap()).unwrap();
        let rhs = f.at(b).unwrap().mul(f.source.covering_restriction(a, b).unwrap()).unwrap();
        ensure(lhs != rhs, || "reported square commutes".into())?;
        ensure(b > 1 && b % a == 0, || format!("square {a}->{b} is not a covering pair"))?;
        let scaled = normal_basis_iso(&s).map_err(|e| e.to_string())?;
        ensure(scaled.is_isomorphism(), || "scaled family fails on the same support".into())?;
        return Ok(format!(
            "unscaled family fails naturality on divisors({n}) at square {a}->{b}: res*f = {:?}, f*res = {:?}",
            show(&lhs),
            show(&rhs)
        ));
    }
    Err("unscaled family is natural on divisors(4) and divisors(12)".into())
}

fn show(m: &QMatrix) -> Vec<String> {
    m.entries().iter().map(|x| x.to_string()).collect()
}

fn c6_hom() -> Outcome {
    let mut count = 0;
    for (label, s) in supports_6_7() {
        let reg = Arc::new(regular_module(&s));
        for (name, x) in battery(&s, RANDOM_MODULES, SEED).map_err(|e| e.to_string())? {
            let direct = hom_direct(&x, &reg).map_err(|e| e.to_string())?;
            let (via, _) = hom_via_limit(&x).map_err(|e| e.to_string())?;
            ensure(direct.dim() == via.dim(), || format!("{label} {name}: {} vs {}", direct.dim(), via.dim()))?;
            ensure(direct.same_span(&via), || format!("{label} {name}: spans differ"))?;
            for f in &direct.basis {
                ensure(f.is_valid(), || format!("{label} {name}: basis element is not a morphism"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} modules, equal dimensions and spans"))
}

fn c7_ext_lim() -> Outcome {
    let t = Instant::now();
    let mut count = 0;
    for (label, s) in supports_6_7() {
        let reg = Arc::new(regular_module(&s));
        for (name, x) in battery(&s, RANDOM_MODULES, SEED).map_err(|e| e.to_string())? {
            let e = ext_via_resolution(&x, &reg, 3).map_err(|e| e.to_string())?;
            let l = lim_derived(&dual_system(&x), 3).map_err(|e| e.to_string())?;
            ensure(e.d_squared_zero && l.d_squared_zero, || format!("{label} {name}: d^2 != 0"))?;
            ensure(e.dims == l.dims, || format!("{label} {name}: Ext {:?} vs lim {:?}", e.dims, l.dims))?;
            count += 1;
        }
    }
    within(Duration::from_secs(600), t, "all supports")?;
    Ok(format!("{count} modules, Ext^k = lim^k for k <= 3 in {:?}", t.elapsed()))
}

/// Modules whose free resolution on `divisors(360)` is out of reach; their
/// Ext is read off the derived limits, equal to Ext by criterion 7.
fn resolution_too_large(n: u64, name: &str) -> bool {
    n == 360 && matches!(name, "regular" | "tauRU")
}

fn c8_vanishing() -> Outcome {
    let mut notes = Vec::new();
    for n in [12, 60, 360] {
        let s = divisors(n);
        let reg = Arc::new(regular_module(&s));
        let mut via_lim = 0;
        for (name, x) in battery(&s, RANDOM_MODULES, SEED).map_err(|e| e.to_string())? {
            let l = lim_derived(&dual_system(&x), 3).map_err(|e| e.to_string())?;
            ensure(l.dims[1..] == [0, 0, 0], || format!("divisors({n}) {name}: lim {:?}", l.dims))?;
            if resolution_too_large(n, &name) {
                via_lim += 1;
                continue;
            }
            let e = ext_via_resolution(&x, &reg, 3).map_err(|e| e.to_string())?;
            ensure(e.dims[1..] == [0, 0, 0], || format!("divisors({n}) {name}: Ext {:?}", e.dims))?;
        }
        // Ext^1(tauRU, tauRU) through tauRU = regular
        let iso = normal_basis_iso(&s).map_err(|e| e.to_string())?;
        ensure(iso.is_isomorphism(), || format!("divisors({n}): tauRU is not identified with regular"))?;
        let tau = Arc::new(tau_ru_module(&s));
        let ext1 = if resolution_too_large(n, "tauRU") {
            lim_derived(&dual_system(&tau), 1).map_err(|e| e.to_string())?.dims[1]
        } else {
            let direct = ext_via_resolution(&tau, &tau, 1).map_err(|e| e.to_string())?.dims[1];
            let transported = ext_via_resolution(&tau, &reg, 1).map_err(|e| e.to_string())?.dims[1];
            ensure(direct == transported, || format!("divisors({n}): Ext^1(tau,tau) {direct} vs Ext^1(tau,reg) {transported}"))?;
            direct
        };
        ensure(ext1 == 0, || format!("divisors({n}): Ext^1(tauRU, tauRU) = {ext1}"))?;
        notes.push(if via_lim > 0 { format!("{n} ({via_lim} via lim)") } else { n.to_string() });
    }
    Ok(format!("Ext^1..3 = 0 and Ext^1(tauRU, tauRU) = 0 over divisors of {}", notes.join(", ")))
}

fn c9_non_directed() -> Outcome {
    let s = SupportSet::new(vec![1, 2, 3]).unwrap();
    let x = Arc::new(atomic_module(1, 1, &s).map_err(|e| e.to_string())?);
    let reg = Arc::new(regular_module(&s));
    let hom = hom_direct(&x, &reg).map_err(|e| e.to_string())?.dim();
    let e = ext_via_resolution(&x, &reg, 2).map_err(|e| e.to_string())?;
    let l = lim_derived(&dual_system(&x), 2).map_err(|e| e.to_string())?;
    ensure(hom == 0, || format!("Hom = {hom}"))?;
    ensure(e.dims == [0, 1, 0], || format!("Ext {:?}", e.dims))?;
    ensure(l.dims == [0, 1, 0], || format!("lim {:?}", l.dims))?;
    ensure(l.witnesses[1].len() == 1, || "no lim^1 witness".into())?;
    Ok("Hom = 0, Ext = [0, 1, 0], lim = [0, 1, 0]".into())
}

fn c10_resolution() -> Outcome {
    use ruq::resolution::{nontrivial_ext_witness, verify_resolution};
    let t = Instant::now();
    let s = divisors(30);
    let primes = [2, 3, 5];
    let r = verify_resolution(&primes, 3, &s).map_err(|e| e.to_string())?;
    for c in &r.checks {
        ensure(c.pass, || format!("check {} failed ({:?})", c.name, c.dims))?;
    }
    for name in ["= 0", "exact at P_", "dh + hd"] {
        ensure(r.checks.iter().any(|c| c.name.contains(name)), || format!("no {name} check"))?;
    }
    for n in [1, 2] {
        let w = nontrivial_ext_witness(n, &primes, &s).map_err(|e| e.to_string())?;
        ensure(w.hom_dim == 0, || format!("n = {n}: Hom(P_(n-1), coker) = {}", w.hom_dim))?;
        ensure(w.nontrivial(), || format!("n = {n}: xi is trivial"))?;
    }
    within(Duration::from_secs(120), t, "resolution")?;
    Ok(format!("{} checks pass ({:?} contraction), xi_1 and xi_2 nonzero, {:?}", r.checks.len(), r.convention, t.elapsed()))
}

fn random_element(level: u64, rng: &mut ChaCha8Rng) -> RUElement {
    let coeffs = (0..level).map(|_| Rat::new(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
    RUElement::new(level, coeffs).unwrap()
}

fn c11_frobenius() -> Outcome {
    let mut pairs = 0;
    for n in 1..=60u64 {
        for d in (1..=n).filter(|d| n % d == 0) {
            let t = transfer_matrix(d, n).map_err(|e| e.to_string())?;
            let r = restrict_sub_matrix(n, d).map_err(|e| e.to_string())?;
            ensure(t == r.transpose(), || format!("tr_{d}^{n} is not the transpose of res"))?;
            pairs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let levels: Vec<(u64, u64)> = (1..=60u64).flat_map(|n| (1..=n).filter(move |d| n % d == 0).map(move |d| (n, d))).collect();
    for _ in 0..100 {
        let (n, d) = levels[rng.gen_range(0..levels.len())];
        let a = random_element(n, &mut rng);
        let b = random_element(d, &mut rng);
        let e = |x: ruq::Error| x.to_string();
        let lhs = transfer(d, n, &mul(&restrict_sub(n, d, &a).map_err(e)?, &b).map_err(e)?).map_err(e)?;
        let rhs = mul(&a, &transfer(d, n, &b).map_err(e)?).map_err(e)?;
        ensure(lhs == rhs, || format!("projection formula fails for d = {d}, n = {n}"))?;
    }
    Ok(format!("tr = res^T for {pairs} pairs d | n <= 60; projection formula on 100 seeded pairs"))
}

fn maximal_chains(s: &SupportSet) -> Vec<Vec<u64>> {
    fn extend(s: &SupportSet, chain: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let last = *chain.last().unwrap();
        let next: Vec<u64> =
            s.members().iter().copied().filter(|&m| m > last && m % last == 0 && is_prime(m / last)).collect();
        if next.is_empty() {
            out.push(chain.clone());
        }
        for m in next {
            chain.push(m);
            extend(s, chain, out);
            chain.pop();
        }
    }
    fn is_prime(q: u64) -> bool {
        q > 1 && (2..q).take_while(|k| k * k <= q).all(|k| !q.is_multiple_of(k))
    }
    let mut out = Vec::new();
    extend(s, &mut vec![1], &mut out);
    out
}

fn c12_mittag_leffler() -> Outcome {
    let mut towers = 0;
    for s in [divisors(12), divisors(60), divisors(360), SupportSet::upto(10).unwrap()] {
        let reg: OutCycModule = regular_module(&s);
        for chain in maximal_chains(&s) {
            // every contiguous sub-chain is itself a divisibility chain
            for i in 0..chain.len() {
                for j in i..chain.len() {
                    let sub = &chain[i..=j];
                    let (dims, maps) = dual_tower(&reg, sub).map_err(|e| e.to_string())?;
                    let l = sequential_lim1(&dims, &maps).map_err(|e| e.to_string())?;
                    ensure(l.lim1 == 0, || format!("chain {sub:?}: lim^1 = {}", l.lim1))?;
                    ensure(l.mittag_leffler, || format!("chain {sub:?}: a map is not surjective"))?;
                    for m in &maps {
                        ensure(m.rank_exact() == m.rows(), || format!("chain {sub:?}: exact rank says not surjective"))?;
                    }
                    ensure(l.lim == *dims.last().unwrap(), || format!("chain {sub:?}: lim {} vs top {dims:?}", l.lim))?;
                    towers += 1;
                }
            }
        }
    }
    Ok(format!("lim^1 = 0 and all maps surjective on {towers} towers"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("totient dimensions", c1_totient),
        ("transfer ideal at prime powers", c2_transfer_ideal),
        ("CRT isomorphism", c3_crt),
        ("normal basis isomorphism", c4_normal_basis),
        ("scaling necessity", c5_unscaled),
        ("Hom oracles agree", c6_hom),
        ("Ext equals derived limits", c7_ext_lim),
        ("vanishing on directed supports", c8_vanishing),
        ("non-directed lim^1", c9_non_directed),
        ("prime-set resolution", c10_resolution),
        ("Frobenius reciprocity", c11_frobenius),
        ("Mittag-Leffler towers", c12_mittag_leffler),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(msg) => println!("criterion {:2} PASS {name}: {msg} [{:.1?}]", i + 1, t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("criterion {:2} FAIL {name}: {msg} [{:.1?}]", i + 1, t.elapsed());
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
