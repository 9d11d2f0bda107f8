//! Shared random-instance generators for the integration suites.

use aoi_core::model::{validate, Pmf, PowerLevels, RawConfig, ValidatedConfig};
use aoi_core::power_opt::polytope_vertices;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly increasing power grid of `n` levels in (0.1, 10).
pub fn random_levels(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut levels: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if levels.windows(2).all(|w| w[1] > w[0]) {
            return levels;
        }
    }
}

/// Feasible budget: usually interior, sometimes exactly on a grid level,
/// occasionally above the whole grid.
pub fn random_budget(rng: &mut ChaCha8Rng, levels: &[f64]) -> f64 {
    let roll: f64 = rng.gen();
    let lo = levels[0];
    let hi = levels[levels.len() - 1];
    if roll < 0.15 {
        levels[rng.gen_range(0..levels.len())]
    } else if roll < 0.20 {
        hi + rng.gen_range(0.0..1.0)
    } else if lo < hi {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Success matrix with non-decreasing columns and non-increasing rows.
/// Occasional duplicate rows exercise tie handling.
pub fn random_monotone_success(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut base: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.95)).collect();
    base.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut rows = vec![base];
    for _ in 1..n {
        let prev = rows.last().unwrap().clone();
        if rng.gen::<f64>() < 0.2 {
            rows.push(prev);
        } else {
            let t: f64 = rng.gen_range(0.0..0.3);
            rows.push(prev.iter().map(|&f| f + t * (1.0 - f)).collect());
        }
    }
    rows
}

/// Per-user channel sets: each of size at least two, refilled so the union
/// covers every channel.
pub fn random_channel_sets(rng: &mut ChaCha8Rng, users: usize, channels: usize) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = (0..users)
        .map(|_| {
            let size = rng.gen_range(2..=channels);
            let mut all: Vec<usize> = (0..channels).collect();
            all.shuffle(rng);
            let mut set: Vec<usize> = all[..size].to_vec();
            set.sort_unstable();
            set
        })
        .collect();
    for c in 0..channels {
        if !sets.iter().any(|s| s.contains(&c)) {
            let u = rng.gen_range(0..users);
            sets[u].push(c);
            sets[u].sort_unstable();
        }
    }
    sets
}

/// Small relaxed-topology instance with `n`/`m` power levels drawn from the
/// given ranges; budgets are always feasible.
pub fn random_power_instance(
    rng: &mut ChaCha8Rng,
    n_range: std::ops::RangeInclusive<usize>,
    m_range: std::ops::RangeInclusive<usize>,
) -> ValidatedConfig<f64> {
    let n = rng.gen_range(n_range);
    let m = rng.gen_range(m_range);
    let bs_levels = random_levels(rng, n);
    let adv_levels = random_levels(rng, m);
    let raw = RawConfig {
        num_users: 2,
        total_channels: 2,
        channel_sets: None,
        bs_budget: random_budget(rng, &bs_levels),
        adv_budget: random_budget(rng, &adv_levels),
        bs_levels,
        adv_levels,
        success: random_monotone_success(rng, n, m),
    };
    validate(&raw).expect("generated instance is valid")
}

/// Instance for simulation: 2-5 users, 2-5 channels (relaxed or
/// heterogeneous), small power grids.
pub fn random_sim_config(rng: &mut ChaCha8Rng, force_relaxed: bool) -> ValidatedConfig<f64> {
    let users = rng.gen_range(2..=5);
    let channels = rng.gen_range(2..=5);
    let n = rng.gen_range(2..=4);
    let m = rng.gen_range(2..=4);
    let bs_levels = random_levels(rng, n);
    let adv_levels = random_levels(rng, m);
    let channel_sets = if force_relaxed || rng.gen::<f64>() < 0.5 {
        None
    } else {
        Some(random_channel_sets(rng, users, channels))
    };
    let raw = RawConfig {
        num_users: users,
        total_channels: channels,
        channel_sets,
        bs_budget: random_budget(rng, &bs_levels),
        adv_budget: random_budget(rng, &adv_levels),
        bs_levels,
        adv_levels,
        success: random_monotone_success(rng, n, m),
    };
    validate(&raw).expect("generated instance is valid")
}

/// Random point of the budget polytope: a convex combination of its
/// vertices.
pub fn random_feasible_pmf(rng: &mut ChaCha8Rng, levels: &PowerLevels<f64>) -> Pmf<f64> {
    let vertices = polytope_vertices(levels).expect("budget is feasible");
    let raw: Vec<f64> = (0..vertices.len())
        .map(|_| rng.gen_range(0.01..1.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut weights = vec![0.0; levels.len()];
    for (lambda, v) in raw.iter().zip(&vertices) {
        for (acc, &w) in weights.iter_mut().zip(v.weights()) {
            *acc += lambda / total * w;
        }
    }
    Pmf::new(weights).expect("convex combination is a pmf")
}

/// Random interior pmf with every weight at least `floor / len`.
pub fn random_pmf(rng: &mut ChaCha8Rng, len: usize, floor: f64) -> Pmf<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0) + floor).collect();
    let total: f64 = raw.iter().sum();
    Pmf::new(raw.into_iter().map(|w| w / total).collect()).expect("normalized pmf")
}
