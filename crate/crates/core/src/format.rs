//! Text formats: support specs, built-in module names, and the module and
//! morphism JSON files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::outcyc::{
    atomic_module, free_module, regular_module, semifree_module, ModuleMorphism, OutCycModule, RestrictionMap,
};
use crate::rep_ring::tau_ru_module;
use crate::site::{divisor_closure, SupportSet};

/// `divisors:N`, `upto:N`, or an explicit comma-separated divisor-closed list.
pub fn parse_support(spec: &str) -> Result<SupportSet> {
    let spec = spec.trim();
    let num = |s: &str| -> Result<u64> {
        s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("not a positive integer: {s:?}")))
    };
    if let Some(n) = spec.strip_prefix("divisors:") {
        return SupportSet::divisors_of(num(n)?);
    }
    if let Some(n) = spec.strip_prefix("upto:") {
        let n = num(n)?;
        if n == 0 {
            return Err(Error::Support("upto:0 is empty".into()));
        }
        return divisor_closure(&(1..=n).collect::<Vec<_>>());
    }
    let members = spec.split(',').map(num).collect::<Result<Vec<_>>>()?;
    SupportSet::new(members)
}

/// Whether `name` is one of the built-in module names.
pub fn is_builtin(name: &str) -> bool {
    matches!(name, "regular" | "tauRU")
        || name.starts_with("free:")
        || name.starts_with("semifree:")
        || name.starts_with("atomic:")
}

pub fn builtin_module(name: &str, support: &SupportSet) -> Result<OutCycModule> {
    let parts: Vec<&str> = name.split(':').collect();
    let int = |s: &str| -> Result<u64> { s.parse().map_err(|_| Error::Parse(format!("bad number in {name:?}"))) };
    match parts.as_slice() {
        ["regular"] => Ok(regular_module(support)),
        ["tauRU"] => Ok(tau_ru_module(support)),
        ["free", n] => free_module(int(n)?, support),
        ["semifree", n] => semifree_module(int(n)?, support),
        ["atomic", n, d] => atomic_module(int(n)?, int(d)? as usize, support),
        _ => Err(Error::Parse(format!("unknown module {name:?}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct LevelFile {
    dim: usize,
    action: BTreeMap<u64, QMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ModuleFile {
    support: SupportSet,
    levels: BTreeMap<u64, LevelFile>,
    #[serde(default)]
    restrictions: BTreeMap<String, QMatrix>,
}

/// The module as JSON, listing the action of every unit.
pub fn module_to_json(module: &OutCycModule) -> Value {
    let levels = module
        .levels()
        .iter()
        .map(|l| {
            let action = module.all_actions(l.n).expect("member");
            (l.n, LevelFile { dim: l.dim, action })
        })
        .collect();
    let file = ModuleFile {
        support: module.support().clone(),
        levels,
        restrictions: BTreeMap::new(),
    };
    let mut v = serde_json::to_value(&file).expect("serializable");
    // numeric order of restriction keys
    let mut res = Map::new();
    for ((n, m), r) in module.covering_restrictions() {
        res.insert(format!("{n}->{m}"), serde_json::to_value(r).expect("serializable"));
    }
    v["restrictions"] = Value::Object(res);
    v
}

pub fn module_from_json(v: &Value) -> Result<OutCycModule> {
    let file: ModuleFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let mut b = OutCycModule::builder(file.support.clone());
    for (n, lvl) in file.levels {
        let actions = lvl
            .action
            .into_iter()
            .map(|(l, m)| Ok((l, m.with_shape(lvl.dim, lvl.dim)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        b = b.level_with_actions(n, lvl.dim, actions)?;
    }
    for (key, m) in file.restrictions {
        let (a, c) = key
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("restriction key {key:?} is not of the form n->m")))?;
        let parse = |s: &str| s.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad level in {key:?}")));
        b = b.restriction(RestrictionMap { from: parse(a)?, to: parse(c)?, matrix: m });
    }
    b.build()
}

pub fn parse_module(text: &str) -> Result<OutCycModule> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    module_from_json(&v)
}

/// `{ "maps": { "n": matrix } }` with the level dimensions of both ends.
pub fn morphism_to_json(f: &ModuleMorphism) -> Value {
    let mut maps = Map::new();
    for (&n, m) in f.support().members().iter().zip(&f.maps) {
        maps.insert(n.to_string(), serde_json::to_value(m).expect("serializable"));
    }
    serde_json::json!({
        "source_dims": f.source.dims(),
        "target_dims": f.target.dims(),
        "maps": maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_specs() {
        assert_eq!(parse_support("divisors:12").unwrap().members(), &[1, 2, 3, 4, 6, 12]);
        assert_eq!(parse_support("upto:4").unwrap().members(), &[1, 2, 3, 4]);
        assert_eq!(parse_support("1,2,4,8").unwrap().members(), &[1, 2, 4, 8]);
        assert!(parse_support("2,4").is_err());
        assert!(parse_support("divisors:x").is_err());
        assert!(parse_support("upto:0").is_err());
    }

    #[test]
    fn builtins_resolve() {
        let s = parse_support("divisors:12").unwrap();
        for name in ["regular", "tauRU", "free:2", "semifree:3", "atomic:4:2"] {
            assert!(is_builtin(name));
            assert!(builtin_module(name, &s).unwrap().is_valid());
        }
        assert!(builtin_module("atomic:5:1", &s).is_err());
        assert!(builtin_module("nope", &s).is_err());
    }

    #[test]
    fn module_round_trip() {
        let s = parse_support("divisors:12").unwrap();
        for name in ["regular", "tauRU", "free:4", "atomic:1:1"] {
            let m = builtin_module(name, &s).unwrap();
            let text = serde_json::to_string(&module_to_json(&m)).unwrap();
            assert_eq!(parse_module(&text).unwrap(), m, "{name}");
        }
    }

    #[test]
    fn inconsistent_declared_action_is_a_violation() {
        let s = parse_support("divisors:4").unwrap();
        let m = builtin_module("regular", &s).unwrap();
        let mut v = module_to_json(&m);
        // the unit 1 must act trivially
        v["levels"]["4"]["action"]["1"] = serde_json::json!([["0", "1"], ["1", "0"]]);
        let bad = module_from_json(&v).unwrap();
        assert!(!bad.is_valid());
    }
}
