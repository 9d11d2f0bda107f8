use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::pmf::Pmf;
use crate::scalar::Real;

/// A strictly increasing grid of transmit (or blocking) powers together with
/// the average-power budget that constrains pmfs over the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLevels<T> {
    levels: Vec<T>,
    budget: T,
}

impl<T: Real> PowerLevels<T> {
    pub fn new(levels: Vec<T>, budget: T) -> Result<Self> {
        let violations = check_power_levels("powers", &levels, budget);
        if violations.is_empty() {
            Ok(PowerLevels { levels, budget })
        } else {
            Err(Error::validation(violations))
        }
    }

    pub(crate) fn new_unchecked(levels: Vec<T>, budget: T) -> Self {
        PowerLevels { levels, budget }
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn budget(&self) -> T {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Expected power of a pmf over this grid.
    pub fn expected_power(&self, pmf: &Pmf<T>) -> T {
        pmf.expectation(&self.levels)
    }

    /// True when the pmf's expected power respects the budget within `tol`.
    pub fn within_budget(&self, pmf: &Pmf<T>, tol: T) -> bool {
        self.expected_power(pmf) <= self.budget + tol
    }
}

fn check_power_levels<T: Real>(key: &str, levels: &[T], budget: T) -> Vec<String> {
    let mut violations = Vec::new();
    if levels.is_empty() {
        violations.push(format!("{key}: power list is empty"));
        return violations;
    }
    for (i, &p) in levels.iter().enumerate() {
        if p <= T::zero() || p.is_nan() {
            violations.push(format!("{key}[{i}]: power {p} must be strictly positive"));
        }
    }
    for i in 1..levels.len() {
        if levels[i] <= levels[i - 1] {
            violations.push(format!(
                "{key}[{i}]: power {} does not strictly increase over {} (duplicates rejected)",
                levels[i],
                levels[i - 1]
            ));
        }
    }
    if budget <= T::zero() || budget.is_nan() {
        violations.push(format!("{key}: budget {budget} must be strictly positive"));
    }
    violations
}

/// Success-probability matrix: entry `(i, j)` is the probability that a
/// packet sent with the `i`-th transmit power survives blocking with the
/// `j`-th adversary power on the same channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessMatrix<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> SuccessMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let violations = check_success_matrix("success_matrix", &rows);
        if violations.is_empty() {
            Ok(SuccessMatrix { rows })
        } else {
            Err(Error::validation(violations))
        }
    }

    pub(crate) fn new_unchecked(rows: Vec<Vec<T>>) -> Self {
        SuccessMatrix { rows }
    }

    /// Number of transmit power levels (rows).
    pub fn num_bs_levels(&self) -> usize {
        self.rows.len()
    }

    /// Number of blocking power levels (columns).
    pub fn num_adv_levels(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, bs_level: usize, adv_level: usize) -> T {
        self.rows[bs_level][adv_level]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// Per-transmit-power expected success against blocking pmf `d`:
    /// `g[i] = sum_j d[j] * f[i][j]`.
    pub fn bs_marginals(&self, d: &Pmf<T>) -> Vec<T> {
        self.rows.iter().map(|row| d.expectation(row)).collect()
    }

    /// Per-blocking-power expected success against transmit pmf `e`:
    /// `g[j] = sum_i e[i] * f[i][j]`.
    pub fn adv_marginals(&self, e: &Pmf<T>) -> Vec<T> {
        (0..self.num_adv_levels())
            .map(|j| {
                e.iter()
                    .zip(self.rows.iter())
                    .map(|(&w, row)| w * row[j])
                    .sum()
            })
            .collect()
    }
}

fn check_success_matrix<T: Real>(key: &str, rows: &[Vec<T>]) -> Vec<String> {
    let mut violations = Vec::new();
    if rows.is_empty() {
        violations.push(format!("{key}: matrix is empty"));
        return violations;
    }
    let m = rows[0].len();
    if m == 0 {
        violations.push(format!("{key}: matrix has zero columns"));
        return violations;
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            violations.push(format!(
                "{key}[{i}]: row has {} entries, expected {m}",
                row.len()
            ));
            return violations;
        }
        for (j, &f) in row.iter().enumerate() {
            if f < T::zero() || f > T::one() || f.is_nan() {
                violations.push(format!("{key}[{i}][{j}]: entry {f} outside [0, 1]"));
            }
        }
    }
    // Columns must not decrease with transmit power; rows must not increase
    // with blocking power.
    for i in 1..rows.len() {
        for (j, (&cur, &prev)) in rows[i].iter().zip(&rows[i - 1]).enumerate() {
            if cur < prev {
                violations.push(format!(
                    "{key}[{i}][{j}]: column {j} decreases with transmit power ({cur} < {prev})"
                ));
            }
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for j in 1..m {
            if row[j] > row[j - 1] {
                violations.push(format!(
                    "{key}[{i}][{j}]: row {i} increases with blocking power ({} > {})",
                    row[j],
                    row[j - 1]
                ));
            }
        }
    }
    violations
}

/// Channel availability: which subset of the channel set each user can
/// receive on. Channel indices are zero-based internally.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelTopology {
    total_channels: usize,
    per_user: Vec<Vec<usize>>,
}

impl ChannelTopology {
    pub fn new(total_channels: usize, per_user: Vec<Vec<usize>>) -> Result<Self> {
        let violations = check_topology(total_channels, &per_user);
        if violations.is_empty() {
            Ok(ChannelTopology {
                total_channels,
                per_user,
            })
        } else {
            Err(Error::validation(violations))
        }
    }

    pub fn total_channels(&self) -> usize {
        self.total_channels
    }

    pub fn num_users(&self) -> usize {
        self.per_user.len()
    }

    pub fn user_set(&self, user: usize) -> &[usize] {
        &self.per_user[user]
    }

    /// Cardinality of the smallest per-user channel set.
    pub fn min_set_size(&self) -> usize {
        self.per_user.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// True when every user sees the full channel set.
    pub fn is_relaxed(&self) -> bool {
        self.per_user
            .iter()
            .all(|set| set.len() == self.total_channels)
    }

    /// The full-set topology: every user can receive on every channel.
    pub fn relaxed(num_users: usize, total_channels: usize) -> Self {
        let all: Vec<usize> = (0..total_channels).collect();
        ChannelTopology {
            total_channels,
            per_user: vec![all; num_users],
        }
    }
}

fn check_topology(total_channels: usize, per_user: &[Vec<usize>]) -> Vec<String> {
    let mut violations = Vec::new();
    if per_user.is_empty() {
        violations.push("channel_sets: no per-user channel sets".into());
        return violations;
    }
    let mut covered = vec![false; total_channels];
    for (u, set) in per_user.iter().enumerate() {
        if set.len() < 2 {
            violations.push(format!(
                "channel_sets[{u}]: user has {} channels, at least 2 required",
                set.len()
            ));
        }
        let mut seen = vec![false; total_channels];
        for &c in set {
            if c >= total_channels {
                violations.push(format!(
                    "channel_sets[{u}]: channel index {c} out of range (total {total_channels})"
                ));
            } else {
                if seen[c] {
                    violations.push(format!("channel_sets[{u}]: duplicate channel index {c}"));
                }
                seen[c] = true;
                covered[c] = true;
            }
        }
    }
    for (c, &hit) in covered.iter().enumerate() {
        if !hit {
            violations.push(format!(
                "channel_sets: channel {c} is not available to any user"
            ));
        }
    }
    violations
}

/// An unvalidated instance, exactly as ingested from a config file or built
/// in code. `channel_sets: None` means every user gets every channel.
#[derive(Debug, Clone)]
pub struct RawConfig<T> {
    pub num_users: usize,
    pub total_channels: usize,
    pub channel_sets: Option<Vec<Vec<usize>>>,
    pub bs_levels: Vec<T>,
    pub bs_budget: T,
    pub adv_levels: Vec<T>,
    pub adv_budget: T,
    pub success: Vec<Vec<T>>,
}

/// A fully validated system instance. Construction is only possible through
/// [`validate`], so every invariant holds for the lifetime of the value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedConfig<T> {
    num_users: usize,
    topology: ChannelTopology,
    bs_powers: PowerLevels<T>,
    adv_powers: PowerLevels<T>,
    success: SuccessMatrix<T>,
}

impl<T: Real> ValidatedConfig<T> {
    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn topology(&self) -> &ChannelTopology {
        &self.topology
    }

    pub fn num_channels(&self) -> usize {
        self.topology.total_channels()
    }

    pub fn bs_powers(&self) -> &PowerLevels<T> {
        &self.bs_powers
    }

    pub fn adv_powers(&self) -> &PowerLevels<T> {
        &self.adv_powers
    }

    pub fn success(&self) -> &SuccessMatrix<T> {
        &self.success
    }

    /// Number of transmit power levels.
    pub fn num_bs_levels(&self) -> usize {
        self.bs_powers.len()
    }

    /// Number of blocking power levels.
    pub fn num_adv_levels(&self) -> usize {
        self.adv_powers.len()
    }
}

/// Checks every invariant of the raw instance and reports all violations at
/// once; returns the typed configuration only when everything holds.
pub fn validate<T: Real>(raw: &RawConfig<T>) -> Result<ValidatedConfig<T>> {
    let mut violations = Vec::new();

    if raw.num_users < 2 {
        violations.push(format!(
            "num_users: {} users, more than one required",
            raw.num_users
        ));
    }

    let sets = match &raw.channel_sets {
        Some(sets) => {
            if sets.len() != raw.num_users {
                violations.push(format!(
                    "channel_sets: {} sets for {} users",
                    sets.len(),
                    raw.num_users
                ));
            }
            sets.clone()
        }
        None => vec![(0..raw.total_channels).collect(); raw.num_users],
    };
    violations.extend(check_topology(raw.total_channels, &sets));

    violations.extend(check_power_levels(
        "bs_powers",
        &raw.bs_levels,
        raw.bs_budget,
    ));
    violations.extend(check_power_levels(
        "adv_powers",
        &raw.adv_levels,
        raw.adv_budget,
    ));
    violations.extend(check_success_matrix("success_matrix", &raw.success));

    if !raw.success.is_empty() {
        if raw.success.len() != raw.bs_levels.len() {
            violations.push(format!(
                "success_matrix: {} rows for {} transmit powers",
                raw.success.len(),
                raw.bs_levels.len()
            ));
        }
        let m = raw.success[0].len();
        if m != raw.adv_levels.len() {
            violations.push(format!(
                "success_matrix: {} columns for {} blocking powers",
                m,
                raw.adv_levels.len()
            ));
        }
    }

    if !violations.is_empty() {
        return Err(Error::validation(violations));
    }

    Ok(ValidatedConfig {
        num_users: raw.num_users,
        topology: ChannelTopology {
            total_channels: raw.total_channels,
            per_user: sets,
        },
        bs_powers: PowerLevels::new_unchecked(raw.bs_levels.clone(), raw.bs_budget),
        adv_powers: PowerLevels::new_unchecked(raw.adv_levels.clone(), raw.adv_budget),
        success: SuccessMatrix::new_unchecked(raw.success.clone()),
    })
}
