//! Closed-form bounds on the long-run average age and the optimality ratios
//! of the two reference scheduling policies (uniform-user and max-age-user,
//! both with uniform channel choice and the budget-mixed power rule).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    adv_ceil_index, adv_floor_index, bs_bracket_indices, budget_mix_weight, ValidatedConfig,
};
use crate::scalar::{real, Real};

/// The four optimality ratios: achieved upper bound divided by the universal
/// lower bound, in the forms the analysis states them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityRatios<T> {
    /// Uniform-user policy, general topology; always at most 4.
    pub general_uniform: T,
    /// Uniform-user policy, homogeneous channel sets (as printed in the
    /// analysis; the achieved upper/lower ratio is always smaller).
    pub special_uniform: T,
    /// Cap on the homogeneous-case ratio: `2 Ns / (Ns - 1)`, at most 4 and
    /// close to 2 for many channels.
    pub special_cap: T,
    /// Max-age policy: `min_set / (min_set - 1)`, always at most 2.
    pub maxage: T,
}

/// Every closed-form bound for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub lower_bound: T,
    pub upper_uniform_general: T,
    /// Present only when every user sees the full channel set.
    pub upper_uniform_special: Option<T>,
    pub upper_maxage: T,
    pub ratios: OptimalityRatios<T>,
    /// Cardinality of the smallest per-user channel set.
    pub nbar_s: usize,
}

/// Blocking-power index used inside the upper bounds: the level just above
/// the adversary budget, saturating at the top level when the budget exceeds
/// the whole grid.
fn adv_ceil_or_top<T: Real>(cfg: &ValidatedConfig<T>) -> Result<usize> {
    match adv_ceil_index(cfg) {
        Ok(i) => Ok(i),
        Err(Error::NoneAbove) => Ok(cfg.num_adv_levels() - 1),
        Err(e) => Err(e),
    }
}

/// The budget-mixed success term `w * f[floor][ceil'] + (1-w) * f[ceil][ceil']`
/// shared by both upper bounds.
fn mixed_success<T: Real>(cfg: &ValidatedConfig<T>) -> Result<T> {
    let bracket = bs_bracket_indices(cfg)?;
    let w = budget_mix_weight(cfg)?;
    let ceil_adv = adv_ceil_or_top(cfg)?;
    let f = cfg.success();
    Ok(w * f.get(bracket.floor, ceil_adv) + (T::one() - w) * f.get(bracket.ceil, ceil_adv))
}

/// Universal lower bound on the average age, valid for every causal
/// scheduling policy against the benchmark blocking action:
/// `(N+1) Ns / (2 (Ns - 1 + f[ceil][floor']))`.
pub fn lower_bound<T: Real>(cfg: &ValidatedConfig<T>) -> Result<T> {
    let adv_floor = adv_floor_index(cfg)?;
    let bracket = bs_bracket_indices(cfg)?;
    let n = real::<T>(cfg.num_users() as f64);
    let ns = real::<T>(cfg.num_channels() as f64);
    let f = cfg.success().get(bracket.ceil, adv_floor);
    Ok((n + T::one()) * ns / (real::<T>(2.0) * (ns - T::one() + f)))
}

/// Upper bounds for the uniform-user policy: the general bound `2N` holds
/// for any topology; the sharper bound is returned only when every user
/// sees the full channel set.
pub fn upper_bound_uniform<T: Real>(cfg: &ValidatedConfig<T>) -> Result<(T, Option<T>)> {
    let n = real::<T>(cfg.num_users() as f64);
    let general = real::<T>(2.0) * n;
    if !cfg.topology().is_relaxed() {
        // Still touch the bracket so infeasibility is reported consistently.
        bs_bracket_indices(cfg)?;
        return Ok((general, None));
    }
    let ns = real::<T>(cfg.num_channels() as f64);
    let mixed = mixed_success(cfg)?;
    let special = n * ns / (ns - T::one() + mixed);
    Ok((general, Some(special)))
}

/// Upper bound for the max-age policy:
/// `(N+1) min_set / (2 (min_set - 1 + mixed))` with the budget-mixed
/// success term and the smallest per-user channel-set size.
pub fn upper_bound_maxage<T: Real>(cfg: &ValidatedConfig<T>) -> Result<T> {
    let nbar = real::<T>(cfg.topology().min_set_size() as f64);
    let n = real::<T>(cfg.num_users() as f64);
    let mixed = mixed_success(cfg)?;
    Ok((n + T::one()) * nbar / (real::<T>(2.0) * (nbar - T::one() + mixed)))
}

/// The four optimality ratios of the two reference policies.
pub fn optimality_ratios<T: Real>(cfg: &ValidatedConfig<T>) -> Result<OptimalityRatios<T>> {
    let adv_floor = adv_floor_index(cfg)?;
    let adv_ceil = adv_ceil_or_top(cfg)?;
    let bracket = bs_bracket_indices(cfg)?;
    let f = cfg.success();
    let n = real::<T>(cfg.num_users() as f64);
    let ns = real::<T>(cfg.num_channels() as f64);
    let nbar = real::<T>(cfg.topology().min_set_size() as f64);
    let one = T::one();
    let two = real::<T>(2.0);
    let four = real::<T>(4.0);

    let lo_term = ns - one + f.get(bracket.ceil, adv_floor);
    let general_uniform = four * n * lo_term / ((n + one) * ns);
    let special_uniform =
        two * (n + one) * lo_term / (n * (ns - one + f.get(bracket.floor, adv_ceil)));
    let special_cap = two * ns / (ns - one);
    let maxage = nbar / (nbar - one);

    debug_assert!(general_uniform <= four);
    debug_assert!(maxage <= two);

    Ok(OptimalityRatios {
        general_uniform,
        special_uniform,
        special_cap,
        maxage,
    })
}

/// All bounds and ratios in one report.
pub fn bound_report<T: Real>(cfg: &ValidatedConfig<T>) -> Result<BoundReport<T>> {
    let (upper_uniform_general, upper_uniform_special) = upper_bound_uniform(cfg)?;
    Ok(BoundReport {
        lower_bound: lower_bound(cfg)?,
        upper_uniform_general,
        upper_uniform_special,
        upper_maxage: upper_bound_maxage(cfg)?,
        ratios: optimality_ratios(cfg)?,
        nbar_s: cfg.topology().min_set_size(),
    })
}
