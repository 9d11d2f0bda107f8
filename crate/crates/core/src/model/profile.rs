use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::config::ValidatedConfig;
use crate::model::pmf::Pmf;
use crate::scalar::{real, Real};

/// Slack allowed when checking a power pmf's expected power against its
/// budget.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

/// A full stationary strategy profile: the three base-station pmfs (user,
/// channel, transmit power) and the two adversary pmfs (channel, blocking
/// power). Both power pmfs respect their average-power budgets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryProfile<T> {
    user: Pmf<T>,
    bs_channel: Pmf<T>,
    bs_power: Pmf<T>,
    adv_channel: Pmf<T>,
    adv_power: Pmf<T>,
}

impl<T: Real> StationaryProfile<T> {
    pub fn new(
        cfg: &ValidatedConfig<T>,
        user: Pmf<T>,
        bs_channel: Pmf<T>,
        bs_power: Pmf<T>,
        adv_channel: Pmf<T>,
        adv_power: Pmf<T>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        let expect_len = |name: &str, got: usize, want: usize, v: &mut Vec<String>| {
            if got != want {
                v.push(format!("{name}: pmf has {got} entries, expected {want}"));
            }
        };
        expect_len("user_pmf", user.len(), cfg.num_users(), &mut violations);
        expect_len(
            "bs_channel_pmf",
            bs_channel.len(),
            cfg.num_channels(),
            &mut violations,
        );
        expect_len(
            "bs_power_pmf",
            bs_power.len(),
            cfg.num_bs_levels(),
            &mut violations,
        );
        expect_len(
            "adv_channel_pmf",
            adv_channel.len(),
            cfg.num_channels(),
            &mut violations,
        );
        expect_len(
            "adv_power_pmf",
            adv_power.len(),
            cfg.num_adv_levels(),
            &mut violations,
        );

        let tol = real(BUDGET_TOLERANCE);
        if bs_power.len() == cfg.num_bs_levels() && !cfg.bs_powers().within_budget(&bs_power, tol) {
            violations.push(format!(
                "bs_power_pmf: expected power {} exceeds budget {}",
                cfg.bs_powers().expected_power(&bs_power),
                cfg.bs_powers().budget()
            ));
        }
        if adv_power.len() == cfg.num_adv_levels()
            && !cfg.adv_powers().within_budget(&adv_power, tol)
        {
            violations.push(format!(
                "adv_power_pmf: expected power {} exceeds budget {}",
                cfg.adv_powers().expected_power(&adv_power),
                cfg.adv_powers().budget()
            ));
        }

        if violations.is_empty() {
            Ok(StationaryProfile {
                user,
                bs_channel,
                bs_power,
                adv_channel,
                adv_power,
            })
        } else {
            Err(Error::validation(violations))
        }
    }

    pub fn user(&self) -> &Pmf<T> {
        &self.user
    }

    pub fn bs_channel(&self) -> &Pmf<T> {
        &self.bs_channel
    }

    pub fn bs_power(&self) -> &Pmf<T> {
        &self.bs_power
    }

    pub fn adv_channel(&self) -> &Pmf<T> {
        &self.adv_channel
    }

    pub fn adv_power(&self) -> &Pmf<T> {
        &self.adv_power
    }

    /// Copy of the profile with a different user pmf.
    pub fn with_user(&self, cfg: &ValidatedConfig<T>, user: Pmf<T>) -> Result<Self> {
        Self::new(
            cfg,
            user,
            self.bs_channel.clone(),
            self.bs_power.clone(),
            self.adv_channel.clone(),
            self.adv_power.clone(),
        )
    }

    /// Copy of the profile with a different base-station channel pmf.
    pub fn with_bs_channel(&self, cfg: &ValidatedConfig<T>, bs_channel: Pmf<T>) -> Result<Self> {
        Self::new(
            cfg,
            self.user.clone(),
            bs_channel,
            self.bs_power.clone(),
            self.adv_channel.clone(),
            self.adv_power.clone(),
        )
    }

    /// Copy of the profile with a different base-station power pmf.
    pub fn with_bs_power(&self, cfg: &ValidatedConfig<T>, bs_power: Pmf<T>) -> Result<Self> {
        Self::new(
            cfg,
            self.user.clone(),
            self.bs_channel.clone(),
            bs_power,
            self.adv_channel.clone(),
            self.adv_power.clone(),
        )
    }

    /// Copy of the profile with a different adversary channel pmf.
    pub fn with_adv_channel(&self, cfg: &ValidatedConfig<T>, adv_channel: Pmf<T>) -> Result<Self> {
        Self::new(
            cfg,
            self.user.clone(),
            self.bs_channel.clone(),
            self.bs_power.clone(),
            adv_channel,
            self.adv_power.clone(),
        )
    }

    /// Copy of the profile with a different adversary power pmf.
    pub fn with_adv_power(&self, cfg: &ValidatedConfig<T>, adv_power: Pmf<T>) -> Result<Self> {
        Self::new(
            cfg,
            self.user.clone(),
            self.bs_channel.clone(),
            self.bs_power.clone(),
            self.adv_channel.clone(),
            adv_power,
        )
    }
}

/// Profile with uniform user and channel pmfs on both sides and the given
/// power pmfs.
pub fn uniform_profile<T: Real>(
    cfg: &ValidatedConfig<T>,
    bs_power: Pmf<T>,
    adv_power: Pmf<T>,
) -> Result<StationaryProfile<T>> {
    StationaryProfile::new(
        cfg,
        Pmf::uniform(cfg.num_users()),
        Pmf::uniform(cfg.num_channels()),
        bs_power,
        Pmf::uniform(cfg.num_channels()),
        adv_power,
    )
}
