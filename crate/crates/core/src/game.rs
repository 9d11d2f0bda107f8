//! The stationary-policy game: renewal-reward age evaluation, channel and
//! user best responses, alternating power best-response dynamics with cycle
//! detection, equilibrium verification with frozen power pmfs, a bilinear
//! minimax probe over the two budget polytopes, and the shift-structured
//! special case where a full equilibrium exists.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    phi, success_prob_vector, uniform_profile, Pmf, StationaryProfile, SuccessMatrix,
    ValidatedConfig,
};
use crate::power_opt::{algorithm1, algorithm2, BudgetPolytope};
use crate::scalar::{real, Real};

/// An age improvement below this threshold does not count as a profitable
/// deviation.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-9;

/// Two pmfs within this distance (per weight) are considered the same
/// strategy when detecting cycles.
pub const CYCLE_TOLERANCE: f64 = 1e-12;

/// One step of alternating best responses: the transmit power pmf chosen
/// against the previous blocking pmf, then the blocking pmf chosen against
/// it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep<T> {
    pub e: Pmf<T>,
    pub d: Pmf<T>,
}

/// Sequence of strategy pairs visited by best-response dynamics, with cycle
/// metadata once a pair repeats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseTrace<T> {
    pub steps: Vec<TraceStep<T>>,
    pub cycle_start: Option<usize>,
    pub cycle_period: Option<usize>,
}

impl<T: Real> BestResponseTrace<T> {
    /// True when the dynamics reached a fixed point (a cycle of period one).
    pub fn is_fixed_point(&self) -> bool {
        self.cycle_period == Some(1)
    }
}

/// Outcome of probing a candidate profile with exact best-response
/// deviations on both sides, powers held fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport<T> {
    pub candidate: StationaryProfile<T>,
    /// Largest age reduction any probed base-station deviation achieves.
    pub max_bs_gain: T,
    /// Largest age increase any probed adversary deviation achieves.
    pub max_adv_gain: T,
    /// True iff neither side improves beyond [`EQUILIBRIUM_TOLERANCE`].
    pub is_equilibrium: bool,
}

/// Result of the bilinear minimax probe over the two budget polytopes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimaxReport<T> {
    pub bs_power: Pmf<T>,
    pub adv_power: Pmf<T>,
    /// Expected blocked-slot success at the returned pair.
    pub value: T,
    /// Residual gap between the best vertex response payoffs on both sides;
    /// zero at an exact saddle point.
    pub duality_gap: T,
    /// Iterations of fictitious play performed before the best pair was
    /// found.
    pub iterations: usize,
}

/// Long-run average age of a stationary profile under the relaxed topology:
/// each user's age renews geometrically with its delivery probability, so
/// the system average is the mean of the reciprocals.
pub fn average_age_stationary<T: Real>(
    profile: &StationaryProfile<T>,
    cfg: &ValidatedConfig<T>,
) -> Result<T> {
    let q = success_prob_vector(profile, cfg)?;
    let mut total = T::zero();
    for (user, &qi) in q.iter().enumerate() {
        if qi <= T::zero() {
            return Err(Error::Divergent { user });
        }
        total = total + T::one() / qi;
    }
    Ok(total / real::<T>(cfg.num_users() as f64))
}

/// Age of a profile with divergent profiles mapped to infinity, for
/// deviation probing.
fn age_or_infinite<T: Real>(profile: &StationaryProfile<T>, cfg: &ValidatedConfig<T>) -> Result<T> {
    match average_age_stationary(profile, cfg) {
        Ok(age) => Ok(age),
        Err(Error::Divergent { .. }) => Ok(T::infinity()),
        Err(e) => Err(e),
    }
}

/// The optimal user pmf is uniform, independent of everything else.
pub fn br_user_pmf<T: Real>(cfg: &ValidatedConfig<T>) -> Pmf<T> {
    Pmf::uniform(cfg.num_users())
}

/// Base-station channel best response: spread uniformly over the channels
/// the adversary blocks least (the full tied set).
pub fn br_channel_pmf_bs<T: Real>(a: &Pmf<T>, _cfg: &ValidatedConfig<T>) -> Pmf<T> {
    let min = a.iter().copied().fold(T::infinity(), T::min);
    let support: Vec<usize> = (0..a.len()).filter(|&k| a[k] == min).collect();
    Pmf::uniform_over(a.len(), &support)
}

/// Adversary channel best response: spread uniformly over the channels the
/// base station uses most (the full tied set).
pub fn br_channel_pmf_adv<T: Real>(s: &Pmf<T>, _cfg: &ValidatedConfig<T>) -> Pmf<T> {
    let max = s.iter().copied().fold(T::neg_infinity(), T::max);
    let support: Vec<usize> = (0..s.len()).filter(|&k| s[k] == max).collect();
    Pmf::uniform_over(s.len(), &support)
}

/// Alternates exact power best responses (channel pmfs stay uniform, where
/// they are mutually optimal) and records every `(e, d)` pair until one
/// repeats or `max_iters` is reached. A fixed point shows up as a cycle of
/// period one.
pub fn best_response_dynamics<T: Real>(
    init_d: &Pmf<T>,
    cfg: &ValidatedConfig<T>,
    max_iters: usize,
) -> Result<BestResponseTrace<T>> {
    let tol = real::<T>(CYCLE_TOLERANCE);
    let mut steps: Vec<TraceStep<T>> = Vec::new();
    let mut d = init_d.clone();
    for _ in 0..max_iters {
        let e = algorithm1(&d, cfg)?;
        d = algorithm2(&e, cfg)?;
        let step = TraceStep { e, d: d.clone() };
        let repeat = steps
            .iter()
            .position(|prev| prev.e.approx_eq(&step.e, tol) && prev.d.approx_eq(&step.d, tol));
        let index = steps.len();
        steps.push(step);
        if let Some(start) = repeat {
            return Ok(BestResponseTrace {
                steps,
                cycle_start: Some(start),
                cycle_period: Some(index - start),
            });
        }
    }
    Ok(BestResponseTrace {
        steps,
        cycle_start: None,
        cycle_period: None,
    })
}

/// Probes an arbitrary candidate profile with the exact best responses of
/// the fixed-power game: the uniform user pmf and the channel best response
/// for the base station (individually and jointly), the channel best
/// response for the adversary. Power pmfs are frozen as given.
pub fn check_triple_fixed_powers<T: Real>(
    cfg: &ValidatedConfig<T>,
    candidate: &StationaryProfile<T>,
) -> Result<EquilibriumReport<T>> {
    let base_age = average_age_stationary(candidate, cfg)?;

    let u_star = br_user_pmf(cfg);
    let s_star = br_channel_pmf_bs(candidate.adv_channel(), cfg);
    let bs_probes = [
        candidate.with_user(cfg, u_star.clone())?,
        candidate.with_bs_channel(cfg, s_star.clone())?,
        candidate
            .with_user(cfg, u_star)?
            .with_bs_channel(cfg, s_star)?,
    ];
    let mut max_bs_gain = T::neg_infinity();
    for probe in &bs_probes {
        let gain = base_age - age_or_infinite(probe, cfg)?;
        max_bs_gain = max_bs_gain.max(gain);
    }

    let a_star = br_channel_pmf_adv(candidate.bs_channel(), cfg);
    let adv_probe = candidate.with_adv_channel(cfg, a_star)?;
    let max_adv_gain = age_or_infinite(&adv_probe, cfg)? - base_age;

    let tol = real::<T>(EQUILIBRIUM_TOLERANCE);
    Ok(EquilibriumReport {
        candidate: candidate.clone(),
        max_bs_gain,
        max_adv_gain,
        is_equilibrium: max_bs_gain <= tol && max_adv_gain <= tol,
    })
}

/// Verifies that the all-uniform triple (user, channel, blocking channel) is
/// an equilibrium of the game in which the power pmfs are frozen at
/// `(e, d)`.
pub fn check_nash_fixed_powers<T: Real>(
    cfg: &ValidatedConfig<T>,
    e: &Pmf<T>,
    d: &Pmf<T>,
) -> Result<EquilibriumReport<T>> {
    let candidate = uniform_profile(cfg, e.clone(), d.clone())?;
    check_triple_fixed_powers(cfg, &candidate)
}

/// Solves the zero-sum bilinear game over the two budget polytopes by
/// reducing it to a matrix game over the polytope vertices and running
/// alternating fictitious play, keeping the averaged strategy pair with the
/// smallest duality gap. Stops early once the gap is negligible.
pub fn minimax_power_game<T: Real>(
    cfg: &ValidatedConfig<T>,
    max_iters: usize,
) -> Result<MinimaxReport<T>> {
    let bs_polytope = BudgetPolytope::new(cfg.bs_powers().clone());
    let adv_polytope = BudgetPolytope::new(cfg.adv_powers().clone());
    let rows = bs_polytope.vertices()?;
    let cols = adv_polytope.vertices()?;
    let payoff: Vec<Vec<T>> = rows
        .iter()
        .map(|e| {
            let margins = cfg.success().adv_marginals(e);
            cols.iter().map(|d| d.expectation(&margins)).collect()
        })
        .collect();
    let (nr, nc) = (rows.len(), cols.len());

    // Running best-response scores: col_scores[r] = sum_c counts_c * M[r][c]
    // and row_scores[c] = sum_r counts_r * M[r][c].
    let mut row_counts = vec![0u64; nr];
    let mut col_counts = vec![0u64; nc];
    let mut col_scores = vec![T::zero(); nr];
    let mut row_scores = vec![T::zero(); nc];

    let argmax = |scores: &[T]| -> usize {
        let mut best = 0;
        for (i, &v) in scores.iter().enumerate() {
            if v > scores[best] {
                best = i;
            }
        }
        best
    };
    let argmin = |scores: &[T]| -> usize {
        let mut best = 0;
        for (i, &v) in scores.iter().enumerate() {
            if v < scores[best] {
                best = i;
            }
        }
        best
    };

    // Open with the row best response to the uniform column mix.
    let row_sums: Vec<T> = payoff.iter().map(|r| r.iter().copied().sum()).collect();
    let mut r = argmax(&row_sums);

    let mut best_gap = T::infinity();
    let mut best_iter = 0;
    let mut best_rows = vec![0u64; nr];
    let mut best_cols = vec![0u64; nc];
    let early_stop = real::<T>(CYCLE_TOLERANCE);

    for k in 1..=max_iters {
        row_counts[r] += 1;
        for c in 0..nc {
            row_scores[c] = row_scores[c] + payoff[r][c];
        }
        let c = argmin(&row_scores);
        col_counts[c] += 1;
        for (i, scores) in col_scores.iter_mut().enumerate() {
            *scores = *scores + payoff[i][c];
        }
        r = argmax(&col_scores);

        let count = real::<T>(k as f64);
        let ub = col_scores[argmax(&col_scores)] / count;
        let lb = row_scores[argmin(&row_scores)] / count;
        let gap = ub - lb;
        if gap < best_gap {
            best_gap = gap;
            best_iter = k;
            best_rows.copy_from_slice(&row_counts);
            best_cols.copy_from_slice(&col_counts);
            if best_gap <= early_stop {
                break;
            }
        }
    }

    let total_r: u64 = best_rows.iter().sum();
    let total_c: u64 = best_cols.iter().sum();
    let mix = |counts: &[u64], vertices: &[Pmf<T>], total: u64, len: usize| -> Pmf<T> {
        let mut weights = vec![T::zero(); len];
        for (count, v) in counts.iter().zip(vertices) {
            if *count == 0 {
                continue;
            }
            let w = real::<T>(*count as f64) / real::<T>(total as f64);
            for (acc, &x) in weights.iter_mut().zip(v.weights()) {
                *acc = *acc + w * x;
            }
        }
        Pmf::new(weights).expect("convex combination of pmfs is a pmf")
    };
    let e_star = mix(&best_rows, &rows, total_r, cfg.num_bs_levels());
    let d_star = mix(&best_cols, &cols, total_c, cfg.num_adv_levels());
    debug_assert!(bs_polytope.contains(&e_star, real(1e-9)));
    debug_assert!(adv_polytope.contains(&d_star, real(1e-9)));
    let value = phi(&e_star, &d_star, cfg.success())?;

    Ok(MinimaxReport {
        bs_power: e_star,
        adv_power: d_star,
        value,
        duality_gap: best_gap,
        iterations: best_iter,
    })
}

/// Checks whether every row of the success matrix is the first row shifted
/// by a constant: `f[i][j] - f[0][j] = l[i]` for all `j`, within `tol`.
/// Returns the shift vector (non-negative, starting at zero) when the
/// structure holds.
pub fn detect_shift_structure<T: Real>(success: &SuccessMatrix<T>, tol: T) -> Option<Vec<T>> {
    let n = success.num_bs_levels();
    let m = success.num_adv_levels();
    let mut shifts = Vec::with_capacity(n);
    for i in 0..n {
        let l_i = success.get(i, 0) - success.get(0, 0);
        for j in 0..m {
            if (success.get(i, j) - success.get(0, j) - l_i).abs() > tol {
                return None;
            }
        }
        shifts.push(l_i);
    }
    Some(shifts)
}

/// Shift tolerance used by [`special_case_nash`].
pub const SHIFT_TOLERANCE: f64 = 1e-9;

/// Constructs the full equilibrium profile available under the shift
/// structure: the power best responses are opponent-independent there, so
/// running each side's optimization once against an arbitrary opponent pmf
/// yields mutually optimal powers; combined with the uniform user/channel
/// triple the profile survives every deviation probe. Each probe is re-run
/// before returning.
pub fn special_case_nash<T: Real>(cfg: &ValidatedConfig<T>) -> Result<StationaryProfile<T>> {
    if detect_shift_structure(cfg.success(), real(SHIFT_TOLERANCE)).is_none() {
        return Err(Error::Structure(
            "success matrix rows are not constant shifts of the first row".into(),
        ));
    }
    let e_hat = algorithm1(&Pmf::uniform(cfg.num_adv_levels()), cfg)?;
    let d_hat = algorithm2(&Pmf::uniform(cfg.num_bs_levels()), cfg)?;
    let profile = uniform_profile(cfg, e_hat.clone(), d_hat.clone())?;

    let report = check_triple_fixed_powers(cfg, &profile)?;
    let base_age = average_age_stationary(&profile, cfg)?;
    let e_resp = algorithm1(&d_hat, cfg)?;
    let bs_power_gain = base_age - age_or_infinite(&profile.with_bs_power(cfg, e_resp)?, cfg)?;
    let d_resp = algorithm2(&e_hat, cfg)?;
    let adv_power_gain = age_or_infinite(&profile.with_adv_power(cfg, d_resp)?, cfg)? - base_age;

    let tol = real::<T>(EQUILIBRIUM_TOLERANCE);
    if !report.is_equilibrium || bs_power_gain > tol || adv_power_gain > tol {
        return Err(Error::Structure(format!(
            "deviation probe defeated the shift-structure profile \
             (bs: {}, adv: {}, bs power: {bs_power_gain}, adv power: {adv_power_gain})",
            report.max_bs_gain, report.max_adv_gain
        )));
    }
    Ok(profile)
}
