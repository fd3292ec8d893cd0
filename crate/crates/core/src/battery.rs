//! Seeded families of valid modules used by property checks and reports.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::QMatrix;
use crate::outcyc::{
    atomic_module, direct_sum, free_module, generated_morphism, morphism_factor, regular_module, semifree_module,
    OutCycModule,
};
use crate::rational::Rat;
use crate::rep_ring::tau_ru_module;
use crate::site::SupportSet;

/// Levels used to seed random modules; small levels keep dimensions small on
/// large supports.
fn seed_levels(support: &SupportSet) -> Vec<u64> {
    support.members().iter().copied().filter(|&n| n <= 6).collect()
}

fn random_summand(support: &SupportSet, rng: &mut ChaCha8Rng) -> Result<OutCycModule> {
    let n = *seed_levels(support).choose(rng).expect("1 is always present");
    match rng.gen_range(0..3) {
        0 => free_module(n, support),
        1 => semifree_module(n, support),
        _ => atomic_module(n, rng.gen_range(1..=2), support),
    }
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    Rat::from_int(rng.gen_range(-2..=2))
}

/// A unipotent upper triangular change of basis with small entries.
fn shear(dim: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    let mut b = QMatrix::identity(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            if rng.gen_bool(0.3) {
                b[(i, j)] = small_rat(rng);
            }
        }
    }
    b
}

/// A random valid module: the cokernel, image or kernel of a random map from
/// a sum of free modules into a sum of free, semi-free and atomic modules,
/// written in a random basis. Never the zero module.
pub fn random_module(support: &SupportSet, seed: u64) -> Result<OutCycModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let count = rng.gen_range(1..=3);
        let summands = (0..count).map(|_| random_summand(support, &mut rng)).collect::<Result<Vec<_>>>()?;
        let target = Arc::new(direct_sum(&summands.iter().collect::<Vec<_>>())?);
        let levels = seed_levels(support);
        let gens: Vec<(u64, Vec<Rat>)> = (0..rng.gen_range(1..=2))
            .filter_map(|_| {
                let d = *levels.choose(&mut rng).expect("nonempty");
                let dim = target.dim(d);
                (dim > 0).then(|| (d, (0..dim).map(|_| small_rat(&mut rng)).collect()))
            })
            .collect();
        let f = generated_morphism(&target, &gens)?;
        let fac = morphism_factor(&f)?;
        let pick = match rng.gen_range(0..3) {
            0 => fac.cokernel,
            1 => fac.image,
            _ => fac.kernel,
        };
        if pick.is_zero() {
            continue;
        }
        let bases: Vec<QMatrix> = pick.dims().iter().map(|&d| shear(d, &mut rng)).collect();
        return pick.change_basis(&bases);
    }
}

/// The named modules of the standard battery over `support`: the regular
/// module, `τ(RU_Q)`, `R_eQ`, the semi-free `F_n` for `n | 12` in the support,
/// `atomic:4:2` when 4 is a level, and `random` seeded random modules.
pub fn battery(support: &SupportSet, random: usize, seed: u64) -> Result<Vec<(String, Arc<OutCycModule>)>> {
    let mut out: Vec<(String, Arc<OutCycModule>)> = vec![
        ("regular".into(), Arc::new(regular_module(support))),
        ("tauRU".into(), Arc::new(tau_ru_module(support))),
        ("atomic:1:1".into(), Arc::new(atomic_module(1, 1, support)?)),
    ];
    for n in [1, 2, 3, 4, 6, 12] {
        if support.contains(n) {
            out.push((format!("semifree:{n}"), Arc::new(semifree_module(n, support)?)));
        }
    }
    if support.contains(4) {
        out.push(("atomic:4:2".into(), Arc::new(atomic_module(4, 2, support)?)));
    }
    for i in 0..random as u64 {
        out.push((format!("random:{}", seed + i), Arc::new(random_module(support, seed + i)?)));
    }
    Ok(out)
}
