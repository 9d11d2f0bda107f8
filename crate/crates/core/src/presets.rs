//! Built-in instances used by the CLI and the test suites.

use crate::model::{validate, RawConfig, ValidatedConfig};
use crate::scalar::{real, Real};

/// The 3x3 instance on which alternating power best responses cycle forever:
/// two users, two shared channels, power grid [1, 3, 5] W on both sides,
/// both budgets 3.5 W.
pub fn counterexample_raw<T: Real>() -> RawConfig<T> {
    let r = real::<T>;
    RawConfig {
        num_users: 2,
        total_channels: 2,
        channel_sets: None,
        bs_levels: vec![r(1.0), r(3.0), r(5.0)],
        bs_budget: r(3.5),
        adv_levels: vec![r(1.0), r(3.0), r(5.0)],
        adv_budget: r(3.5),
        success: vec![
            vec![r(0.5), r(0.35), r(0.2)],
            vec![r(0.6), r(0.55), r(0.4)],
            vec![r(0.8), r(0.7), r(0.65)],
        ],
    }
}

/// Validated form of [`counterexample_raw`].
pub fn counterexample_config<T: Real>() -> ValidatedConfig<T> {
    validate(&counterexample_raw()).expect("built-in counterexample instance is valid")
}
