//! Config-file ingestion: TOML with 1-based channel indices on disk,
//! converted to the zero-based internal form before validation.

use std::path::Path;

use aoi_core::model::{validate, Pmf, RawConfig, ValidatedConfig};
use aoi_core::sim::{
    AdvChannelRule, AdvPolicy, AdvPowerRule, BsChannelRule, BsPolicy, BsPowerRule, UserRule,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub num_users: usize,
    pub num_channels: usize,
    /// One list per user, channel indices starting at 1; omitted means every
    /// user gets every channel.
    pub channel_sets: Option<Vec<Vec<usize>>>,
    pub bs_powers: Vec<f64>,
    pub bs_budget: f64,
    pub adv_powers: Vec<f64>,
    pub adv_budget: f64,
    pub success_matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub policies: Option<PoliciesBlock>,
    #[serde(default)]
    pub sim: Option<SimBlock>,
}

/// A policy rule in the file: a rule name, a pure level (1-based), or an
/// explicit pmf.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RuleSpec {
    Name(String),
    Level(usize),
    Pmf(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoliciesBlock {
    /// "uniform", "max-age", or a pmf over users.
    pub user: Option<RuleSpec>,
    /// "uniform" (over the scheduled user's set) or a pmf over channels.
    pub bs_channel: Option<RuleSpec>,
    /// "beta-mix" or a pmf over transmit powers.
    pub bs_power: Option<RuleSpec>,
    /// "uniform" or a pmf over channels.
    pub adv_channel: Option<RuleSpec>,
    /// "floor", a 1-based level index, or a pmf over blocking powers.
    pub adv_power: Option<RuleSpec>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    pub slots: Option<u64>,
    pub reps: Option<u32>,
    pub seed: Option<u64>,
}

/// A parsed config file together with the raw bytes it came from (for the
/// manifest digest).
pub struct LoadedConfig {
    pub file: ConfigFile,
    pub config: ValidatedConfig<f64>,
    pub bytes: Vec<u8>,
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::input(format!("{}: not UTF-8: {e}", path.display())))?;
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;

    let channel_sets = match &file.channel_sets {
        None => None,
        Some(sets) => {
            let mut converted = Vec::with_capacity(sets.len());
            for (u, set) in sets.iter().enumerate() {
                let mut zero_based = Vec::with_capacity(set.len());
                for &c in set {
                    if c == 0 {
                        return Err(CliError::input(format!(
                            "channel_sets[{u}]: channel indices are 1-based, found 0"
                        )));
                    }
                    zero_based.push(c - 1);
                }
                converted.push(zero_based);
            }
            Some(converted)
        }
    };

    let raw = RawConfig {
        num_users: file.num_users,
        total_channels: file.num_channels,
        channel_sets,
        bs_levels: file.bs_powers.clone(),
        bs_budget: file.bs_budget,
        adv_levels: file.adv_powers.clone(),
        adv_budget: file.adv_budget,
        success: file.success_matrix.clone(),
    };
    let config = validate(&raw).map_err(CliError::from_core)?;
    Ok(LoadedConfig {
        file,
        config,
        bytes,
    })
}

fn pmf_from(values: &[f64], what: &str) -> Result<Pmf<f64>, CliError> {
    Pmf::new(values.to_vec()).map_err(|e| CliError::input(format!("{what}: {e}")))
}

/// Base-station policy from the file's `policies` block (defaults:
/// uniform user, uniform channel, budget-mixed power).
pub fn bs_policy_from_file(file: &ConfigFile) -> Result<BsPolicy<f64>, CliError> {
    let block = file.policies.clone().unwrap_or_default();
    let user_rule = match &block.user {
        None => UserRule::Uniform,
        Some(RuleSpec::Name(name)) => match name.as_str() {
            "uniform" => UserRule::Uniform,
            "max-age" | "maxage" => UserRule::MaxAge,
            other => {
                return Err(CliError::input(format!(
                    "policies.user: unknown rule '{other}' (expected 'uniform' or 'max-age')"
                )))
            }
        },
        Some(RuleSpec::Pmf(w)) => UserRule::Custom(pmf_from(w, "policies.user")?),
        Some(RuleSpec::Level(_)) => {
            return Err(CliError::input(
                "policies.user: a bare level index is not a user rule".into(),
            ))
        }
    };
    let channel_rule = match &block.bs_channel {
        None => BsChannelRule::UniformOverUserSet,
        Some(RuleSpec::Name(name)) if name == "uniform" => BsChannelRule::UniformOverUserSet,
        Some(RuleSpec::Name(other)) => {
            return Err(CliError::input(format!(
                "policies.bs_channel: unknown rule '{other}'"
            )))
        }
        Some(RuleSpec::Pmf(w)) => BsChannelRule::Custom(pmf_from(w, "policies.bs_channel")?),
        Some(RuleSpec::Level(_)) => {
            return Err(CliError::input(
                "policies.bs_channel: a bare level index is not a channel rule".into(),
            ))
        }
    };
    let power_rule = match &block.bs_power {
        None => BsPowerRule::BetaMix,
        Some(RuleSpec::Name(name)) if name == "beta-mix" => BsPowerRule::BetaMix,
        Some(RuleSpec::Name(other)) => {
            return Err(CliError::input(format!(
                "policies.bs_power: unknown rule '{other}'"
            )))
        }
        Some(RuleSpec::Pmf(w)) => BsPowerRule::Custom(pmf_from(w, "policies.bs_power")?),
        Some(RuleSpec::Level(_)) => {
            return Err(CliError::input(
                "policies.bs_power: a bare level index is not a power rule".into(),
            ))
        }
    };
    Ok(BsPolicy {
        user_rule,
        channel_rule,
        power_rule,
    })
}

/// Adversary policy from the file's `policies` block (defaults: uniform
/// channel, largest feasible pure power).
pub fn adv_policy_from_file(
    file: &ConfigFile,
    cfg: &ValidatedConfig<f64>,
) -> Result<AdvPolicy<f64>, CliError> {
    let block = file.policies.clone().unwrap_or_default();
    let channel_rule = match &block.adv_channel {
        None => AdvChannelRule::UniformAllChannels,
        Some(RuleSpec::Name(name)) if name == "uniform" => AdvChannelRule::UniformAllChannels,
        Some(RuleSpec::Name(other)) => {
            return Err(CliError::input(format!(
                "policies.adv_channel: unknown rule '{other}'"
            )))
        }
        Some(RuleSpec::Pmf(w)) => AdvChannelRule::Custom(pmf_from(w, "policies.adv_channel")?),
        Some(RuleSpec::Level(_)) => {
            return Err(CliError::input(
                "policies.adv_channel: a bare level index is not a channel rule".into(),
            ))
        }
    };
    let power_rule = match &block.adv_power {
        None => {
            let idx = aoi_core::model::adv_floor_index(cfg).map_err(CliError::from_core)?;
            AdvPowerRule::PureLevel(idx)
        }
        Some(RuleSpec::Name(name)) if name == "floor" => {
            let idx = aoi_core::model::adv_floor_index(cfg).map_err(CliError::from_core)?;
            AdvPowerRule::PureLevel(idx)
        }
        Some(RuleSpec::Name(other)) => {
            return Err(CliError::input(format!(
                "policies.adv_power: unknown rule '{other}'"
            )))
        }
        Some(RuleSpec::Level(level)) => {
            if *level == 0 {
                return Err(CliError::input(
                    "policies.adv_power: level indices are 1-based, found 0".into(),
                ));
            }
            AdvPowerRule::PureLevel(level - 1)
        }
        Some(RuleSpec::Pmf(w)) => AdvPowerRule::Custom(pmf_from(w, "policies.adv_power")?),
    };
    Ok(AdvPolicy::new(channel_rule, power_rule))
}
