//! Browser bindings: each entry point takes plain strings and returns a JSON
//! report, so the page needs no glue beyond `JSON.parse`.

use std::sync::Arc;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ruq::format::{builtin_module, parse_support};
use ruq::hom_ext::{ext_via_resolution, free_resolution, hom_direct, lim_derived, nerve_size};
use ruq::normal_basis::{normal_basis_report, Scaling};
use ruq::outcyc::{dual_system, regular_module};
use ruq::resolution::{nontrivial_ext_witness, verify_resolution};

/// Pages stay responsive below this many estimated matrix entries.
pub const MAX_ENTRIES: usize = 200_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn guard(what: &str, estimate: usize) -> Result<(), String> {
    if estimate > MAX_ENTRIES {
        return Err(format!("{what} needs about {estimate} matrix entries; the page allows {MAX_ENTRIES}"));
    }
    Ok(())
}

/// Hom, Ext and derived limits of a built-in module against the regular module.
pub fn ext_report(support: &str, module: &str, max_degree: usize) -> Result<Value, String> {
    let s = parse_support(support).map_err(err)?;
    let x = Arc::new(builtin_module(module, &s).map_err(err)?);
    let reg = Arc::new(regular_module(&s));
    let widest = x.dims().into_iter().max().unwrap_or(0);
    guard("the nerve complex", nerve_size(&dual_system(&x), max_degree) * (max_degree + 2 + widest))?;
    let p0 = free_resolution(&x, 0).map_err(err)?.modules[0].total_dim();
    guard("the free resolution", p0 * p0 * (max_degree + 1))?;
    let e = ext_via_resolution(&x, &reg, max_degree).map_err(err)?;
    let l = lim_derived(&dual_system(&x), max_degree).map_err(err)?;
    let hom = hom_direct(&x, &reg).map_err(err)?.dim();
    Ok(json!({
        "support": s.members(),
        "module": module,
        "level_dims": x.dims(),
        "hom": hom,
        "ext": e.dims,
        "lim": l.dims,
        "agree": e.dims == l.dims && hom == l.dims[0],
    }))
}

/// Per-level ranks of the map from the regular module to `tauRU`.
pub fn normal_basis(support: &str, unscaled: bool) -> Result<Value, String> {
    let s = parse_support(support).map_err(err)?;
    let phi2: usize = s.members().iter().map(|&n| ruq::site::totient(n).pow(2) as usize).sum();
    guard("the normal-basis map", phi2)?;
    let scaling = if unscaled { Scaling::Unscaled } else { Scaling::Scaled };
    let r = normal_basis_report(&s, scaling).map_err(err)?;
    Ok(json!({
        "support": s.members(),
        "isomorphism": r.is_isomorphism(),
        "levels": r.levels,
        "violations": r.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    }))
}

/// Checks of the prime-set resolution of `R_eQ` and its `ξ_n` witnesses.
pub fn resolution(primes: &str, max_degree: usize) -> Result<Value, String> {
    let primes = primes
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|_| format!("not a prime: {p:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if primes.len() > 5 {
        return Err("at most five primes".into());
    }
    let s = ruq::SupportSet::divisors_of(primes.iter().product()).map_err(err)?;
    let r = verify_resolution(&primes, max_degree, &s).map_err(err)?;
    let witnesses = (1..max_degree)
        .filter(|&n| n < primes.len())
        .map(|n| {
            let w = nontrivial_ext_witness(n, &primes, &s).map_err(err)?;
            Ok(json!({ "degree": n, "hom_dim": w.hom_dim, "nontrivial": w.nontrivial() }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({
        "support": s.members(),
        "convention": format!("{:?}", r.convention),
        "pass": r.pass(),
        "checks": r.checks,
        "witnesses": witnesses,
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = extReport)]
pub fn ext_report_js(support: &str, module: &str, max_degree: usize) -> Result<String, JsError> {
    to_js(ext_report(support, module, max_degree))
}

#[wasm_bindgen(js_name = normalBasis)]
pub fn normal_basis_js(support: &str, unscaled: bool) -> Result<String, JsError> {
    to_js(normal_basis(support, unscaled))
}

#[wasm_bindgen(js_name = resolution)]
pub fn resolution_js(primes: &str, max_degree: usize) -> Result<String, JsError> {
    to_js(resolution(primes, max_degree))
}
