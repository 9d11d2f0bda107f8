use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ValidatedConfig;
use crate::scalar::{mean, real, sample_std, Real};
use crate::sim::policy::{
    sample_uniform_index, AdvPolicy, BsPolicy, CompiledAdv, CompiledBs, CompiledChannelRule,
    CompiledPowerRule, CompiledUserRule,
};

/// Per-user ages in slots. Every age is at least one; a slot either resets
/// the delivered user's age to one or increments it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgeState {
    ages: Vec<u64>,
}

impl AgeState {
    /// Fresh state with every age at one.
    pub fn new(num_users: usize) -> Self {
        AgeState {
            ages: vec![1; num_users],
        }
    }

    pub fn ages(&self) -> &[u64] {
        &self.ages
    }

    fn advance(&mut self, delivered: Option<usize>) {
        for a in &mut self.ages {
            *a += 1;
        }
        if let Some(user) = delivered {
            self.ages[user] = 1;
        }
    }
}

/// Everything sampled in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlotOutcome {
    pub user: usize,
    pub bs_channel: usize,
    pub bs_power: usize,
    pub adv_channel: usize,
    pub adv_power: usize,
    pub delivered: bool,
}

/// One `slot,user,age` trajectory row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgeRow {
    pub slot: u64,
    pub user: usize,
    pub age: u64,
}

/// Aggregated simulation output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult<T> {
    pub per_user_avg_age: Vec<T>,
    pub per_user_std_error: Vec<T>,
    pub system_avg_age: T,
    pub std_error: T,
    pub slots_per_rep: u64,
    pub replications: u32,
    pub master_seed: u64,
}

impl<T: Real> CompiledChannelRule<T> {
    fn sample<R: Rng>(&self, user: usize, rng: &mut R) -> usize {
        match self {
            CompiledChannelRule::PerUserUniform(sets) => {
                let set = &sets[user.min(sets.len() - 1)];
                set[sample_uniform_index(rng, set.len())]
            }
            CompiledChannelRule::Table(table) => table.sample(rng),
        }
    }
}

impl<T: Real> CompiledPowerRule<T> {
    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        match self {
            CompiledPowerRule::Pure(idx) => *idx,
            CompiledPowerRule::Table(table) => table.sample(rng),
        }
    }
}

fn do_step<T: Real, R: Rng>(
    state: &mut AgeState,
    bs: &CompiledBs<T>,
    adv: &CompiledAdv<T>,
    cfg: &ValidatedConfig<T>,
    rng: &mut R,
) -> SlotOutcome {
    let user = match &bs.user {
        CompiledUserRule::Table(table) => table.sample(rng),
        CompiledUserRule::MaxAge => {
            let mut best = 0;
            for (i, &a) in state.ages.iter().enumerate() {
                if a > state.ages[best] {
                    best = i;
                }
            }
            best
        }
    };
    let bs_channel = bs.channel.sample(user, rng);
    let bs_power = bs.power.sample(rng);
    let adv_channel = adv.channel.sample(0, rng);
    let adv_power = adv.power.sample(rng);

    let delivered = if bs_channel == adv_channel {
        let success = cfg.success().get(bs_power, adv_power);
        real::<T>(rng.gen::<f64>()) < success
    } else {
        true
    };

    state.advance(delivered.then_some(user));
    SlotOutcome {
        user,
        bs_channel,
        bs_power,
        adv_channel,
        adv_power,
        delivered,
    }
}

/// Samples one slot: the base station picks a user, a channel from that
/// user's set, and a transmit power; the adversary picks a channel and a
/// blocking power. Delivery succeeds with the matrix probability when the
/// channels collide and always otherwise, and ages update accordingly.
pub fn step<T: Real, R: Rng>(
    state: &mut AgeState,
    bs: &BsPolicy<T>,
    adv: &AdvPolicy<T>,
    cfg: &ValidatedConfig<T>,
    rng: &mut R,
) -> Result<SlotOutcome> {
    let cbs = CompiledBs::compile(bs, cfg)?;
    let cadv = CompiledAdv::compile(adv, cfg)?;
    Ok(do_step(state, &cbs, &cadv, cfg, rng))
}

fn replication_rng(master_seed: u64, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep as u64);
    rng
}

/// Per-user time-average ages of one replication over the `slots` slots
/// after an initial `burn_in` window; `record` sees the ages at every slot
/// (including burn-in) before that slot's transmission.
fn run_replication<T: Real>(
    cfg: &ValidatedConfig<T>,
    bs: &CompiledBs<T>,
    adv: &CompiledAdv<T>,
    slots: u64,
    burn_in: u64,
    rng: &mut ChaCha8Rng,
    mut record: impl FnMut(u64, &[u64]),
) -> Vec<T> {
    let n = cfg.num_users();
    let mut state = AgeState::new(n);
    let mut sums = vec![0u128; n];
    for t in 1..=(burn_in + slots) {
        record(t, state.ages());
        if t > burn_in {
            for (sum, &age) in sums.iter_mut().zip(state.ages()) {
                *sum += age as u128;
            }
        }
        do_step(&mut state, bs, adv, cfg, rng);
    }
    sums.iter()
        .map(|&s| real::<T>(s as f64) / real::<T>(slots as f64))
        .collect()
}

/// Runs `reps` independent replications of `slots` slots each and merges
/// them deterministically by replication index. Initial ages are all one;
/// the estimator is the time average of the per-slot mean age.
pub fn run<T: Real>(
    cfg: &ValidatedConfig<T>,
    bs: &BsPolicy<T>,
    adv: &AdvPolicy<T>,
    slots: u64,
    reps: u32,
    master_seed: u64,
) -> Result<SimResult<T>> {
    run_with_burn_in(cfg, bs, adv, slots, reps, master_seed, 0)
}

/// [`run`] with an initial window of discarded slots per replication. The
/// long-run average does not need one; it exists to shorten transients in
/// short runs.
pub fn run_with_burn_in<T: Real>(
    cfg: &ValidatedConfig<T>,
    bs: &BsPolicy<T>,
    adv: &AdvPolicy<T>,
    slots: u64,
    reps: u32,
    master_seed: u64,
    burn_in: u64,
) -> Result<SimResult<T>> {
    if slots == 0 {
        return Err(Error::validation(vec!["slots must be at least 1".into()]));
    }
    if reps == 0 {
        return Err(Error::validation(vec![
            "replications must be at least 1".into()
        ]));
    }
    let cbs = CompiledBs::compile(bs, cfg)?;
    let cadv = CompiledAdv::compile(adv, cfg)?;

    let per_rep: Vec<Vec<T>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(master_seed, rep);
            run_replication(cfg, &cbs, &cadv, slots, burn_in, &mut rng, |_, _| {})
        })
        .collect();

    let n = cfg.num_users();
    let per_user_avg_age: Vec<T> = (0..n)
        .map(|i| mean(&per_rep.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect();
    let per_user_std_error: Vec<T> = (0..n)
        .map(|i| {
            sample_std(&per_rep.iter().map(|r| r[i]).collect::<Vec<_>>())
                / real::<T>(reps as f64).sqrt()
        })
        .collect();
    let system_per_rep: Vec<T> = per_rep.iter().map(|r| mean(r)).collect();

    Ok(SimResult {
        per_user_avg_age,
        per_user_std_error,
        system_avg_age: mean(&system_per_rep),
        std_error: sample_std(&system_per_rep) / real::<T>(reps as f64).sqrt(),
        slots_per_rep: slots,
        replications: reps,
        master_seed,
    })
}

/// Replays one replication's substream and records its `slot,user,age`
/// rows for the slots after the burn-in window; identical draws to the same
/// replication inside [`run_with_burn_in`].
pub fn trajectory<T: Real>(
    cfg: &ValidatedConfig<T>,
    bs: &BsPolicy<T>,
    adv: &AdvPolicy<T>,
    slots: u64,
    master_seed: u64,
    rep: u32,
    burn_in: u64,
) -> Result<Vec<AgeRow>> {
    if slots == 0 {
        return Err(Error::validation(vec!["slots must be at least 1".into()]));
    }
    let cbs = CompiledBs::compile(bs, cfg)?;
    let cadv = CompiledAdv::compile(adv, cfg)?;
    let mut rows = Vec::with_capacity((slots as usize).saturating_mul(cfg.num_users()));
    let mut rng = replication_rng(master_seed, rep);
    run_replication(cfg, &cbs, &cadv, slots, burn_in, &mut rng, |slot, ages| {
        if slot <= burn_in {
            return;
        }
        for (user, &age) in ages.iter().enumerate() {
            rows.push(AgeRow { slot, user, age });
        }
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{uniform_profile, validate, Pmf};
    use crate::presets::{counterexample_config, counterexample_raw};
    use crate::sim::policy::{AdvChannelRule, AdvPowerRule};

    fn pmf(w: &[f64]) -> Pmf<f64> {
        Pmf::new(w.to_vec()).unwrap()
    }

    fn all_ones_config() -> crate::model::ValidatedConfig<f64> {
        let mut raw = counterexample_raw::<f64>();
        raw.success = vec![vec![1.0; 3]; 3];
        validate(&raw).unwrap()
    }

    #[test]
    fn max_age_with_certain_delivery_alternates_users() {
        let cfg = all_ones_config();
        let bs = BsPolicy::max_age_beta_mix();
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        let mut state = AgeState::new(2);
        let mut rng = replication_rng(3, 0);
        let mut served = Vec::new();
        for _ in 0..10 {
            let out = step(&mut state, &bs, &adv, &cfg, &mut rng).unwrap();
            assert!(out.delivered);
            served.push(out.user);
            let mut sorted = state.ages().to_vec();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![1, 2]);
        }
        // Ties go to the lowest index, then strict alternation.
        assert_eq!(served, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        let result = run(&cfg, &bs, &adv, 10_000, 2, 1).unwrap();
        assert!((result.system_avg_age - 1.5).abs() < 1e-3);
    }

    #[test]
    fn missed_channels_always_deliver() {
        let mut raw = counterexample_raw::<f64>();
        raw.success = vec![vec![0.0; 3]; 3]; // blocked slots always fail
        let cfg = validate(&raw).unwrap();
        let bs = BsPolicy {
            channel_rule: crate::sim::BsChannelRule::Custom(pmf(&[1.0, 0.0])),
            ..BsPolicy::uniform_beta_mix()
        };
        let adv = AdvPolicy::new(
            AdvChannelRule::Custom(pmf(&[0.0, 1.0])),
            AdvPowerRule::PureLevel(0),
        );
        let mut state = AgeState::new(2);
        let mut rng = replication_rng(5, 0);
        for _ in 0..20 {
            let out = step(&mut state, &bs, &adv, &cfg, &mut rng).unwrap();
            assert_ne!(out.bs_channel, out.adv_channel);
            assert!(out.delivered);
        }
    }

    #[test]
    fn ages_never_below_one_and_move_by_one() {
        let cfg = counterexample_config::<f64>();
        let bs = BsPolicy::uniform_beta_mix();
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        let mut state = AgeState::new(2);
        let mut rng = replication_rng(11, 0);
        let mut prev = state.ages().to_vec();
        for _ in 0..500 {
            step(&mut state, &bs, &adv, &cfg, &mut rng).unwrap();
            for (i, (&now, &before)) in state.ages().iter().zip(&prev).enumerate() {
                assert!(now >= 1, "user {i} age dropped below 1");
                assert!(
                    now == 1 || now == before + 1,
                    "user {i} age jumped from {before} to {now}"
                );
            }
            prev = state.ages().to_vec();
        }
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let cfg = counterexample_config::<f64>();
        let bs = BsPolicy::uniform_beta_mix();
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        let a = run(&cfg, &bs, &adv, 5_000, 4, 42).unwrap();
        let b = run(&cfg, &bs, &adv, 5_000, 4, 42).unwrap();
        assert_eq!(a, b);
        let c = run(&cfg, &bs, &adv, 5_000, 4, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trajectory_matches_run_substream() {
        let cfg = counterexample_config::<f64>();
        let bs = BsPolicy::uniform_beta_mix();
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        let rows = trajectory(&cfg, &bs, &adv, 100, 9, 0, 0).unwrap();
        assert_eq!(rows.len(), 200);
        // Recompute the replication-0 mean age from the rows and compare to
        // a single-replication run.
        let total: u64 = rows.iter().map(|r| r.age).sum();
        let by_rows = total as f64 / 200.0;
        let result = run(&cfg, &bs, &adv, 100, 1, 9).unwrap();
        assert!((result.system_avg_age - by_rows).abs() < 1e-12);
    }

    #[test]
    fn burn_in_discards_the_transient_window() {
        let cfg = counterexample_config::<f64>();
        let bs = BsPolicy::uniform_beta_mix();
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        let plain = run(&cfg, &bs, &adv, 2_000, 3, 21).unwrap();
        let zero_burn = run_with_burn_in(&cfg, &bs, &adv, 2_000, 3, 21, 0).unwrap();
        assert_eq!(plain, zero_burn);
        // With a burn-in the averaging window shifts, so the estimate moves
        // but stays a valid age.
        let burned = run_with_burn_in(&cfg, &bs, &adv, 2_000, 3, 21, 500).unwrap();
        assert_ne!(plain.system_avg_age, burned.system_avg_age);
        assert!(burned.system_avg_age >= 1.0);
    }

    #[test]
    fn rejects_zero_slots_and_budget_violations() {
        let cfg = counterexample_config::<f64>();
        let bs = BsPolicy::uniform_beta_mix();
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        assert!(run(&cfg, &bs, &adv, 0, 1, 1).is_err());
        assert!(run(&cfg, &bs, &adv, 10, 0, 1).is_err());

        let greedy = AdvPolicy::new(
            AdvChannelRule::UniformAllChannels,
            AdvPowerRule::PureLevel(2), // 5 W against a 3.5 W budget
        );
        assert!(run(&cfg, &bs, &greedy, 10, 1, 1).is_err());
        // The diagnostic probe is allowed through.
        let probe = AdvPolicy::ceil_power_probe(&cfg);
        assert!(run(&cfg, &bs, &probe, 10, 1, 1).is_ok());
    }

    #[test]
    fn custom_channel_pmf_must_fit_every_user() {
        let mut raw = counterexample_raw::<f64>();
        raw.total_channels = 3;
        raw.channel_sets = Some(vec![vec![0, 1], vec![1, 2]]);
        let cfg = validate(&raw).unwrap();
        let bs = BsPolicy {
            channel_rule: crate::sim::BsChannelRule::Custom(pmf(&[1.0, 0.0, 0.0])),
            ..BsPolicy::uniform_beta_mix()
        };
        let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();
        assert!(matches!(
            run(&cfg, &bs, &adv, 10, 1, 1),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn stationary_profile_simulation_tracks_renewal_age() {
        let cfg = counterexample_config::<f64>();
        let profile =
            uniform_profile(&cfg, pmf(&[0.0, 0.75, 0.25]), pmf(&[1.0, 0.0, 0.0])).unwrap();
        let predicted = crate::game::average_age_stationary(&profile, &cfg).unwrap();
        let bs = BsPolicy::from_profile(&profile);
        let adv = AdvPolicy::from_profile(&profile);
        let result = run(&cfg, &bs, &adv, 200_000, 10, 2024).unwrap();
        let slack = 4.0 * result.std_error;
        assert!(
            (result.system_avg_age - predicted).abs() <= slack,
            "simulated {} vs predicted {predicted} (slack {slack})",
            result.system_avg_age
        );
    }
}
