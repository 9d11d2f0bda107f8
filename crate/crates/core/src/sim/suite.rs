use serde::Serialize;

use crate::bounds::{bound_report, BoundReport};
use crate::error::Result;
use crate::game::average_age_stationary;
use crate::model::{
    adv_floor_index, bs_bracket_indices, budget_mix_weight, uniform_profile, Pmf, ValidatedConfig,
};
use crate::scalar::Real;
use crate::sim::engine::{run, SimResult};
use crate::sim::policy::{AdvPolicy, BsPolicy};

/// One simulated pairing of a scheduling policy and an adversary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow<T> {
    pub policy: String,
    pub adversary: String,
    /// True for the diagnostic adversary whose average power exceeds the
    /// budget (it probes bound tightness, not feasibility).
    pub adversary_over_budget: bool,
    /// Renewal-reward prediction, present for the stationary row under the
    /// relaxed topology.
    pub predicted_age: Option<T>,
    pub result: SimResult<T>,
}

/// Bound-comparison table: each implemented policy simulated against the
/// implemented adversaries, next to the closed-form bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySuiteReport<T> {
    pub bounds: BoundReport<T>,
    pub rows: Vec<SuiteRow<T>>,
}

/// The budget-tight two-level transmit power pmf as an explicit pmf.
fn beta_mix_pmf<T: Real>(cfg: &ValidatedConfig<T>) -> Result<Pmf<T>> {
    let bracket = bs_bracket_indices(cfg)?;
    let w = budget_mix_weight(cfg)?;
    if bracket.floor == bracket.ceil {
        Ok(Pmf::basis(cfg.num_bs_levels(), bracket.floor))
    } else {
        let mut weights = vec![T::zero(); cfg.num_bs_levels()];
        weights[bracket.floor] = w;
        weights[bracket.ceil] = T::one() - w;
        Ok(Pmf::new(weights).expect("budget mix is a valid pmf"))
    }
}

type Pairing<'a, T> = (&'a str, BsPolicy<T>, &'a str, AdvPolicy<T>, bool);

/// Simulates the uniform-user and max-age policies against the benchmark
/// adversary and the over-budget diagnostic adversary, plus the uniform
/// stationary profile when the topology is relaxed, and tabulates everything
/// against the closed-form bounds.
pub fn policy_suite<T: Real>(
    cfg: &ValidatedConfig<T>,
    slots: u64,
    reps: u32,
    master_seed: u64,
) -> Result<PolicySuiteReport<T>> {
    let bounds = bound_report(cfg)?;
    let benchmark = AdvPolicy::uniform_floor_power(cfg)?;
    let probe = AdvPolicy::ceil_power_probe(cfg);

    let pairings: Vec<Pairing<T>> = vec![
        (
            "uniform-user",
            BsPolicy::uniform_beta_mix(),
            "benchmark-floor-power",
            benchmark.clone(),
            false,
        ),
        (
            "uniform-user",
            BsPolicy::uniform_beta_mix(),
            "ceil-power-probe",
            probe.clone(),
            true,
        ),
        (
            "max-age",
            BsPolicy::max_age_beta_mix(),
            "benchmark-floor-power",
            benchmark.clone(),
            false,
        ),
        (
            "max-age",
            BsPolicy::max_age_beta_mix(),
            "ceil-power-probe",
            probe,
            true,
        ),
    ];

    let mut rows = Vec::new();
    for (idx, (policy, bs, adversary, adv, over_budget)) in pairings.into_iter().enumerate() {
        let seed = master_seed.wrapping_add(idx as u64);
        let result = run(cfg, &bs, &adv, slots, reps, seed)?;
        rows.push(SuiteRow {
            policy: policy.to_string(),
            adversary: adversary.to_string(),
            adversary_over_budget: over_budget,
            predicted_age: None,
            result,
        });
    }

    if cfg.topology().is_relaxed() {
        let floor = adv_floor_index(cfg)?;
        let profile = uniform_profile(
            cfg,
            beta_mix_pmf(cfg)?,
            Pmf::basis(cfg.num_adv_levels(), floor),
        )?;
        let predicted = average_age_stationary(&profile, cfg)?;
        let bs = BsPolicy::from_profile(&profile);
        let adv = AdvPolicy::from_profile(&profile);
        let seed = master_seed.wrapping_add(rows.len() as u64);
        let result = run(cfg, &bs, &adv, slots, reps, seed)?;
        rows.push(SuiteRow {
            policy: "uniform-stationary-profile".to_string(),
            adversary: "uniform-floor-power-profile".to_string(),
            adversary_over_budget: false,
            predicted_age: Some(predicted),
            result,
        });
    }

    Ok(PolicySuiteReport { bounds, rows })
}
