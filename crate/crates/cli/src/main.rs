mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ruq::battery::battery;
use ruq::format::{builtin_module, is_builtin, module_to_json, morphism_to_json, parse_module, parse_support};
use ruq::hom_ext::{ext_via_resolution, free_resolution, hom_direct, hom_via_limit, lim_derived, nerve_size};
use ruq::normal_basis::{normal_basis_report, Scaling};
use ruq::outcyc::{dual_system, regular_module};
use ruq::resolution::{nontrivial_ext_witness, verify_resolution, PrimeSetBasis};
use ruq::rep_ring::{tau_ru_module, TauLevel};
use ruq::site::totient;
use ruq::{OutCycModule, SupportSet};

use report::Report;

const QUOTIENT_BASIS: &str =
    "tauRU at level n has basis 1, X, ..., X^(phi(n)-1): monomials of Q[X] modulo the monic generator of the transfer ideal";
const NERVE: &str = "C^k is the product over chains n0 | n1 | ... | nk of D(n0); the face omitting n0 applies the structure map";

#[derive(Parser)]
#[command(name = "ruq", version, about = "Exact rational algebra of Out-modules over cyclic groups")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// `divisors:N`, `upto:N`, or a divisor-closed list such as `1,2,3`.
    #[arg(long, global = true)]
    support: Option<String>,
    /// A built-in module name or a module JSON file.
    #[arg(long, global = true)]
    source: Option<String>,
    /// Target module; the regular module when omitted.
    #[arg(long, global = true)]
    target: Option<String>,
    #[arg(long, global = true, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, global = true, value_delimiter = ',', default_value = "2,3,5,7")]
    primes: Vec<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed of the random modules in `report`.
    #[arg(long, global = true, default_value_t = 1000)]
    seed: u64,
    /// Number of random modules in `report`.
    #[arg(long, global = true, default_value_t = 20)]
    random: usize,
    /// Run independent per-level work on all cores.
    #[arg(long, global = true)]
    parallel: bool,
    /// Refuse computations whose estimated matrix size exceeds this many entries.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_entries: usize,
    /// Let a file shadow a built-in module name.
    #[arg(long = "override", global = true)]
    override_builtin: bool,
    /// Write the source module as JSON to this path (`validate`).
    #[arg(long, global = true)]
    write: Option<PathBuf>,
    /// Use the classifier family without the scaling factor (`normal-basis`).
    #[arg(long, global = true)]
    unscaled: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Verb {
    /// Check the axioms of a module.
    Validate,
    /// Hom(source, target), directly and, for the regular target, through the limit of the dual system.
    Hom,
    /// Ext^k(source, target) for k <= max-degree through a free resolution.
    Ext,
    /// Derived limits of the dual system of the source.
    Lim,
    /// The module tau(RU_Q) and its level dimensions.
    TauRu,
    /// The map from the regular module to tau(RU_Q) built from classifying elements.
    NormalBasis,
    /// The prime-set resolution of R_eQ and its Ext witnesses.
    Resolution,
    /// Hom, Ext and lim agreement over the standard battery of modules.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !cli.opts.parallel {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    match run(&cli.verb, &cli.opts) {
        Ok(report) => {
            match cli.opts.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("serializable")),
            }
            if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(verb: &Verb, o: &Opts) -> Result<Report> {
    match verb {
        Verb::Validate => validate(o),
        Verb::Hom => hom(o),
        Verb::Ext => ext(o),
        Verb::Lim => lim(o),
        Verb::TauRu => tau_ru(o),
        Verb::NormalBasis => normal_basis(o),
        Verb::Resolution => resolution(o),
        Verb::Report => full_report(o),
    }
}

/// Built-in names win unless `--override` is given and a file of that name exists.
fn load(name: &str, support: Option<&SupportSet>, o: &Opts) -> Result<OutCycModule> {
    let file = Path::new(name);
    if is_builtin(name) && !(o.override_builtin && file.is_file()) {
        let s = support.context("built-in modules need --support")?;
        return Ok(builtin_module(name, s)?);
    }
    let text = std::fs::read_to_string(file).with_context(|| format!("cannot read module file {name:?}"))?;
    let m = parse_module(&text).with_context(|| format!("cannot parse {name:?}"))?;
    if let Some(s) = support {
        if m.support() != s {
            bail!("{name:?} is defined over {:?}, not {:?}", m.support().members(), s.members());
        }
    }
    Ok(m)
}

fn support_opt(o: &Opts) -> Result<Option<SupportSet>> {
    o.support.as_deref().map(parse_support).transpose().map_err(Into::into)
}

fn support(o: &Opts) -> Result<SupportSet> {
    support_opt(o)?.context("--support is required")
}

/// The source module and the support it lives on.
fn source(o: &Opts) -> Result<Arc<OutCycModule>> {
    let name = o.source.as_deref().context("--source is required")?;
    Ok(Arc::new(load(name, support_opt(o)?.as_ref(), o)?))
}

fn target(o: &Opts, s: &SupportSet) -> Result<(String, Arc<OutCycModule>)> {
    let name = o.target.clone().unwrap_or_else(|| "regular".into());
    let m = load(&name, Some(s), o)?;
    Ok((name, Arc::new(m)))
}

fn guard(o: &Opts, what: &str, estimate: usize) -> Result<()> {
    if estimate > o.max_entries {
        bail!("{what} needs about {estimate} matrix entries, above the cap of {} (raise --max-entries)", o.max_entries);
    }
    Ok(())
}

/// Entries of the largest matrix `hom_direct` builds: the equivariance system
/// at one level, or the naturality system over all levels.
fn hom_estimate(x: &OutCycModule, y: &OutCycModule) -> usize {
    let local = x
        .levels()
        .iter()
        .zip(y.levels())
        .map(|(a, b)| {
            let u = a.dim * b.dim;
            u * u * a.generator_actions().count().max(1)
        })
        .max()
        .unwrap_or(0);
    let unknowns: usize = x.dims().iter().zip(y.dims()).map(|(a, b)| a * b).sum();
    let rows: usize = x.support().covering_pairs().iter().map(|&(n, q)| y.dim(n * q) * x.dim(n)).sum();
    local.max(unknowns * rows)
}

/// Stored entries of the sparse nerve complex up to degree `max_k + 1`.
fn nerve_estimate(x: &OutCycModule, max_k: usize) -> usize {
    let widest = x.dims().into_iter().max().unwrap_or(0);
    nerve_size(&dual_system(x), max_k) * (max_k + 2 + widest)
}

/// Kernels in a free resolution grow with the first free cover, so its
/// total dimension bounds the dense matrices of the later steps.
fn ext_estimate(x: &Arc<OutCycModule>, max_k: usize) -> Result<usize> {
    let p0 = free_resolution(x, 0)?.modules[0].total_dim();
    Ok(p0 * p0 * (max_k + 1))
}

fn is_regular(y: &OutCycModule) -> bool {
    *y == regular_module(y.support())
}

fn validate(o: &Opts) -> Result<Report> {
    let x = source(o)?;
    let mut r = Report::new("validate", x.support().members());
    r.value("source", o.source.clone().unwrap_or_default());
    r.value("level dims", x.dims());
    r.value("total dimension", x.total_dim());
    let violations = x.validate();
    r.check("unit actions form a group action, restrictions are equivariant and compose", violations.is_empty(), vec![violations.len()]);
    if !violations.is_empty() {
        r.witness("violations", violations.iter().map(|v| Value::String(v.to_string())).collect());
    }
    if let Some(path) = &o.write {
        let v = module_to_json(&x);
        std::fs::write(path, serde_json::to_string_pretty(&v)? + "\n").with_context(|| format!("cannot write {path:?}"))?;
        let back = parse_module(&std::fs::read_to_string(path)?)?;
        r.check("the written module re-parses to an equal module", back == *x, vec![]);
        r.value("written", path.display().to_string());
    }
    Ok(r)
}

fn hom(o: &Opts) -> Result<Report> {
    let x = source(o)?;
    let (tname, y) = target(o, x.support())?;
    guard(o, "Hom", hom_estimate(&x, &y))?;
    let mut r = Report::new("hom", x.support().members());
    r.value("source", o.source.clone().unwrap_or_default());
    r.value("target", tname);
    let h = hom_direct(&x, &y)?;
    r.value("dimension", h.dim());
    r.check("every basis element is an equivariant natural map", h.basis.iter().all(|f| f.is_valid()), vec![h.dim()]);
    if is_regular(&y) {
        let (via, _) = hom_via_limit(&x)?;
        r.check(
            "Hom(X, regular) equals the limit of the dual system, with the same span",
            h.dim() == via.dim() && h.same_span(&via),
            vec![h.dim(), via.dim()],
        );
    }
    r.witness("morphisms", h.basis.iter().map(morphism_to_json).collect());
    Ok(r)
}

fn ext(o: &Opts) -> Result<Report> {
    let x = source(o)?;
    let (tname, y) = target(o, x.support())?;
    let k = o.max_degree;
    guard(o, "Ext", ext_estimate(&x, k)?)?;
    let mut r = Report::new("ext", x.support().members());
    r.value("source", o.source.clone().unwrap_or_default());
    r.value("target", tname);
    let e = ext_via_resolution(&x, &y, k)?;
    r.value("Ext dims", e.dims.clone());
    r.value("cochain dims", e.cochain_dims.clone());
    r.value("generator levels", json!(e.generator_levels));
    r.check("the Hom complex of the free resolution squares to zero", e.d_squared_zero, e.cochain_dims.clone());
    if is_regular(&y) {
        let l = lim_derived(&dual_system(&x), k)?;
        r.check("Ext^k(X, regular) equals lim^k of the dual system for every k", l.dims == e.dims, [e.dims.clone(), l.dims].concat());
    }
    r.convention("resolution", "P_k is a sum of free modules; generators are added by increasing level until they cover");
    Ok(r)
}

fn lim(o: &Opts) -> Result<Report> {
    let x = source(o)?;
    let k = o.max_degree;
    let system = dual_system(&x);
    guard(o, "the nerve complex", nerve_estimate(&x, k))?;
    let mut r = Report::new("lim", x.support().members());
    r.value("source", o.source.clone().unwrap_or_default());
    let l = lim_derived(&system, k)?;
    r.value("lim dims", l.dims.clone());
    r.value("cochain dims", l.cochain_dims.clone());
    r.check("the nerve complex squares to zero", l.d_squared_zero, l.cochain_dims.clone());
    r.check("lim^0 is the equalizer of the dual system", l.h0_matches_equalizer, vec![l.dims[0]]);
    r.convention("nerve", NERVE);
    for (deg, w) in l.witnesses.iter().enumerate() {
        if !w.is_empty() {
            r.witness(format!("lim^{deg}"), serde_json::to_value(w)?);
        }
    }
    Ok(r)
}

fn tau_ru(o: &Opts) -> Result<Report> {
    let s = support(o)?;
    guard(o, "tauRU", s.members().iter().map(|&n| (n * n) as usize).sum())?;
    let m = tau_ru_module(&s);
    let mut r = Report::new("tau-ru", s.members());
    r.value("level dims", m.dims());
    let phi: Vec<usize> = s.members().iter().map(|&n| totient(n) as usize).collect();
    r.check("the dimension at level n is Euler's phi(n)", m.dims() == phi, phi);
    let violations = m.validate();
    r.check("tauRU is a valid module", violations.is_empty(), vec![violations.len()]);
    let gens: Vec<Value> = s
        .members()
        .iter()
        .map(|&n| json!({ "level": n, "generator": TauLevel::new(n).modulus.iter().map(|c| c.to_string()).collect::<Vec<_>>() }))
        .collect();
    r.witness("ideal generators", Value::Array(gens));
    r.convention("quotient basis", QUOTIENT_BASIS);
    if let Some(path) = &o.write {
        std::fs::write(path, serde_json::to_string_pretty(&module_to_json(&m))? + "\n")?;
        r.value("written", path.display().to_string());
    }
    Ok(r)
}

fn normal_basis(o: &Opts) -> Result<Report> {
    let s = support(o)?;
    guard(o, "the normal-basis map", s.members().iter().map(|&n| (totient(n) * totient(n)) as usize).sum())?;
    let scaling = if o.unscaled { Scaling::Unscaled } else { Scaling::Scaled };
    let rep = normal_basis_report(&s, scaling)?;
    let mut r = Report::new("normal-basis", s.members());
    r.value("scaling", if o.unscaled { "unscaled" } else { "scaled by -1/p^(k-1)" });
    r.value("isomorphism", rep.is_isomorphism());
    r.value("ranks", rep.levels.iter().map(|l| l.rank).collect::<Vec<_>>());
    for l in &rep.levels {
        r.check(format!("level {}: the map is invertible", l.level), l.invertible, vec![l.rank, l.size]);
    }
    let failed = |c: &str| rep.violations.iter().filter(|v| v.check == c).count();
    r.check("the map commutes with every unit action", failed("equivariance") == 0, vec![failed("equivariance")]);
    r.check("the map commutes with every restriction", failed("naturality") == 0, vec![failed("naturality")]);
    let mult = rep.multiplicativity_failures.len();
    r.value("multiplicativity failures", mult);
    if !rep.violations.is_empty() {
        r.witness("violations", rep.violations.iter().map(|v| Value::String(v.to_string())).collect());
    }
    r.convention("quotient basis", QUOTIENT_BASIS);
    r.convention("classifier", "at p^k the element is -(1/p^(k-1)) times the sum of the primitive p^k-th roots of unity, 1 at k = 0; products over coprime prime powers");
    Ok(r)
}

fn resolution(o: &Opts) -> Result<Report> {
    let basis = PrimeSetBasis::new(o.primes.clone())?;
    let s = match support_opt(o)? {
        Some(s) => s,
        None => SupportSet::divisors_of(basis.primes().iter().product())?,
    };
    let est: usize = (0..=o.max_degree + 1).map(|k| basis.tuples(k).len().pow(2)).sum::<usize>() * s.len();
    guard(o, "the prime-set resolution", est)?;
    let rep = verify_resolution(basis.primes(), o.max_degree, &s)?;
    let mut r = Report::new("resolution", s.members());
    r.value("primes", basis.primes().to_vec());
    r.value("max degree", o.max_degree);
    r.value("ranks", (0..=o.max_degree).map(|k| basis.tuples(k).len()).collect::<Vec<_>>());
    for c in &rep.checks {
        r.check(c.name.clone(), c.pass, c.dims.clone());
    }
    let mut xi = Vec::new();
    for n in (1..o.max_degree).filter(|&n| n < basis.primes().len()) {
        let w = nontrivial_ext_witness(n, basis.primes(), &s)?;
        r.check(format!("Hom(P_{}, coker d_{}) = 0", n - 1, n + 1), w.hom_dim == 0, vec![w.hom_dim]);
        r.check(format!("xi_{n} is a nonzero cocycle"), w.cocycle && w.nonzero, w.cokernel_dims.clone());
        xi.push(serde_json::to_value(&w)?);
    }
    r.witness("xi", Value::Array(xi));
    r.convention(
        "contraction sign",
        &format!("{:?}: h(e_a) = (1/omega(m)) sum over primes p not in a of (-1)^j e_(a+p), j the position of p counted from 1", rep.convention),
    );
    Ok(r)
}

fn full_report(o: &Opts) -> Result<Report> {
    let s = support(o)?;
    let k = o.max_degree;
    let reg = Arc::new(regular_module(&s));
    let modules = battery(&s, o.random, o.seed)?;
    for (name, x) in &modules {
        let est = ext_estimate(x, k)?.max(nerve_estimate(x, k)).max(hom_estimate(x, &reg));
        guard(o, &format!("module {name}"), est)?;
    }
    let mut r = Report::new("report", s.members());
    r.value("modules", modules.len());
    r.value("seed", o.seed);
    for (name, x) in &modules {
        let h = hom_direct(x, &reg)?;
        let (via, _) = hom_via_limit(x)?;
        let e = ext_via_resolution(x, &reg, k)?;
        let l = lim_derived(&dual_system(x), k)?;
        r.value(format!("{name} Ext"), e.dims.clone());
        r.check(format!("{name}: Hom(X, regular) equals the limit, same span"), h.same_span(&via), vec![h.dim(), via.dim()]);
        r.check(format!("{name}: Ext^k = lim^k for k <= {k}"), e.dims == l.dims, [e.dims, l.dims].concat());
    }
    let phi: Vec<usize> = s.members().iter().map(|&n| totient(n) as usize).collect();
    r.check("tauRU has dimension phi(n) at level n", tau_ru_module(&s).dims() == phi, phi);
    let nb = normal_basis_report(&s, Scaling::Scaled)?;
    r.check("the classifier map regular -> tauRU is an isomorphism", nb.is_isomorphism(), vec![]);
    r.convention("nerve", NERVE);
    r.convention("quotient basis", QUOTIENT_BASIS);
    Ok(r)
}
