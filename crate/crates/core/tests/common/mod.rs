#![allow(dead_code)]

use std::collections::BTreeSet;

use imp_core::finsys::{FinSet, System, SystemMap, TotalFn};
use imp_core::impkit::RegulationProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BOT: &str = "_|_";

pub fn z3(label: &str) -> FinSet {
    FinSet::new(label, vec!["0", "1", "2"]).unwrap()
}

pub fn relay() -> FinSet {
    FinSet::new("B", vec![BOT, "0", "1", "2"]).unwrap()
}

/// Relay index of `s` where 0 is `⊥` and `k + 1` is phase `k`.
fn relay_of(phase: Option<usize>) -> usize {
    phase.map_or(0, |k| k + 1)
}

/// Mod-3 tracking: the plant reports `(⊥, c)` when `c = e + 1` and `(e, c)`
/// otherwise; `controller(c, s, o)` gives the next controller state.
pub fn tracking_with(controller: impl Fn(usize, Option<usize>, usize) -> usize) -> RegulationProblem {
    let e = z3("E");
    let c = z3("C");
    let p = FinSet::product(&[relay(), z3("O")]).unwrap();
    let env = System::autonomous(&e, |x| (x + 1) % 3).unwrap();
    // plant state index = relay * 3 + o; plant input index = e * 3 + c
    let plant = System::from_rule(&p, &FinSet::pair(&e, &c).unwrap(), |_, ec| {
        let (e, c) = (ec / 3, ec % 3);
        if c == (e + 1) % 3 {
            relay_of(None) * 3 + c
        } else {
            relay_of(Some(e)) * 3 + c
        }
    })
    .unwrap();
    let ctrl = System::from_rule(&c, &p, |cv, pv| {
        let (s, o) = (pv / 3, pv % 3);
        controller(cv, s.checked_sub(1), o)
    })
    .unwrap();
    let targets: BTreeSet<(usize, usize)> = (0..3).map(|e| (e, relay_of(None) * 3 + e)).collect();
    RegulationProblem::new(env, plant, ctrl, targets).unwrap()
}

pub fn tracking() -> RegulationProblem {
    tracking_with(|c, s, _| s.unwrap_or((c + 1) % 3))
}

/// Violates autonomy on the attractor: after `⊥` the controller jumps to
/// `o + 2`.
pub fn tracking_input_dependent() -> RegulationProblem {
    tracking_with(|_, s, o| s.unwrap_or((o + 2) % 3))
}

pub fn clock(label: &str, prefix: &str, n: usize) -> System {
    let states = FinSet::numbered(label, prefix, n).unwrap();
    System::autonomous(&states, |i| (i + 1) % n).unwrap()
}

/// Clock4 modelled by Clock2 through parity.
pub fn e1() -> SystemMap {
    let (x, m) = (clock("X", "x", 4), clock("M", "m", 2));
    let mu_s = TotalFn::from_fn(x.states(), m.states(), |i| i % 2).unwrap();
    SystemMap::with_default_inputs(x, m, mu_s).unwrap()
}

/// A random autonomous model: `M` with `m` states, fibres of size
/// `1..=max_fibre`, and `upd_X(x)` chosen inside `fibre(upd_M(μ(x)))`.
pub fn random_model(seed: u64, m: usize, max_fibre: usize) -> SystemMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upd_m: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
    let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=max_fibre)).collect();
    let mut owner = Vec::new();
    let mut fibres: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, &n) in sizes.iter().enumerate() {
        for _ in 0..n {
            fibres[k].push(owner.len());
            owner.push(k);
        }
    }
    let upd_x: Vec<usize> = owner
        .iter()
        .map(|&k| {
            let target = &fibres[upd_m[k]];
            target[rng.gen_range(0..target.len())]
        })
        .collect();
    let xs = FinSet::numbered("X", "x", owner.len()).unwrap();
    let ms = FinSet::numbered("M", "m", m).unwrap();
    let x = System::autonomous(&xs, |i| upd_x[i]).unwrap();
    let msys = System::autonomous(&ms, |i| upd_m[i]).unwrap();
    let mu_s = TotalFn::new(xs, ms, owner).unwrap();
    SystemMap::with_default_inputs(x, msys, mu_s).unwrap()
}
