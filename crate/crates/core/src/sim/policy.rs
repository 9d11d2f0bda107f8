use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    adv_ceil_index, adv_floor_index, bs_bracket_indices, budget_mix_weight, Pmf, ValidatedConfig,
    BUDGET_TOLERANCE,
};
use crate::scalar::{real, Real};

/// How the base station picks the user to serve each slot.
#[derive(Debug, Clone, PartialEq)]
pub enum UserRule<T> {
    /// Uniform over all users.
    Uniform,
    /// Serve the oldest user, ties to the lowest index.
    MaxAge,
    Custom(Pmf<T>),
}

/// How the base station picks the channel for the scheduled user.
#[derive(Debug, Clone, PartialEq)]
pub enum BsChannelRule<T> {
    /// Uniform over the scheduled user's channel set.
    UniformOverUserSet,
    /// Fixed pmf over the full channel set; its support must be available
    /// to every user.
    Custom(Pmf<T>),
}

/// How the base station picks its transmit power.
#[derive(Debug, Clone, PartialEq)]
pub enum BsPowerRule<T> {
    /// The budget-tight mixture of the two levels bracketing the budget.
    BetaMix,
    Custom(Pmf<T>),
}

/// A base-station policy: one rule per decision.
#[derive(Debug, Clone, PartialEq)]
pub struct BsPolicy<T> {
    pub user_rule: UserRule<T>,
    pub channel_rule: BsChannelRule<T>,
    pub power_rule: BsPowerRule<T>,
}

impl<T: Real> BsPolicy<T> {
    /// Uniform user, uniform channel over the user's set, budget-mixed power.
    pub fn uniform_beta_mix() -> Self {
        BsPolicy {
            user_rule: UserRule::Uniform,
            channel_rule: BsChannelRule::UniformOverUserSet,
            power_rule: BsPowerRule::BetaMix,
        }
    }

    /// Max-age user, uniform channel over the user's set, budget-mixed power.
    pub fn max_age_beta_mix() -> Self {
        BsPolicy {
            user_rule: UserRule::MaxAge,
            channel_rule: BsChannelRule::UniformOverUserSet,
            power_rule: BsPowerRule::BetaMix,
        }
    }

    /// The base-station side of a stationary profile.
    pub fn from_profile(profile: &crate::model::StationaryProfile<T>) -> Self {
        BsPolicy {
            user_rule: UserRule::Custom(profile.user().clone()),
            channel_rule: BsChannelRule::Custom(profile.bs_channel().clone()),
            power_rule: BsPowerRule::Custom(profile.bs_power().clone()),
        }
    }
}

/// How the adversary picks the channel to block.
#[derive(Debug, Clone, PartialEq)]
pub enum AdvChannelRule<T> {
    /// Uniform over the full channel set; the adversary cannot condition on
    /// the base station's realized choice.
    UniformAllChannels,
    Custom(Pmf<T>),
}

/// How the adversary picks its blocking power.
#[derive(Debug, Clone, PartialEq)]
pub enum AdvPowerRule<T> {
    /// Always the given level index.
    PureLevel(usize),
    Custom(Pmf<T>),
}

/// An adversary policy.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvPolicy<T> {
    pub channel_rule: AdvChannelRule<T>,
    pub power_rule: AdvPowerRule<T>,
    /// Set only by [`AdvPolicy::ceil_power_probe`]: lets a deliberately
    /// over-budget pure level through validation for bound-tightness
    /// diagnostics.
    budget_exempt: bool,
}

impl<T: Real> AdvPolicy<T> {
    pub fn new(channel_rule: AdvChannelRule<T>, power_rule: AdvPowerRule<T>) -> Self {
        AdvPolicy {
            channel_rule,
            power_rule,
            budget_exempt: false,
        }
    }

    /// The benchmark adversary: uniform channel, largest feasible blocking
    /// power.
    pub fn uniform_floor_power(cfg: &ValidatedConfig<T>) -> Result<Self> {
        Ok(Self::new(
            AdvChannelRule::UniformAllChannels,
            AdvPowerRule::PureLevel(adv_floor_index(cfg)?),
        ))
    }

    /// Diagnostic adversary blocking with the level just above the budget
    /// (top level when the budget exceeds the grid). Its average power may
    /// exceed the budget; it exists to probe the tightness of the upper
    /// bounds, which are computed against exactly this level.
    pub fn ceil_power_probe(cfg: &ValidatedConfig<T>) -> Self {
        let idx = match adv_ceil_index(cfg) {
            Ok(i) => i,
            Err(_) => cfg.num_adv_levels() - 1,
        };
        AdvPolicy {
            channel_rule: AdvChannelRule::UniformAllChannels,
            power_rule: AdvPowerRule::PureLevel(idx),
            budget_exempt: true,
        }
    }

    /// The adversary side of a stationary profile.
    pub fn from_profile(profile: &crate::model::StationaryProfile<T>) -> Self {
        Self::new(
            AdvChannelRule::Custom(profile.adv_channel().clone()),
            AdvPowerRule::Custom(profile.adv_power().clone()),
        )
    }

    pub fn is_budget_exempt(&self) -> bool {
        self.budget_exempt
    }
}

/// Cumulative-weight sampling table. Draws use an `f64` uniform converted to
/// the working scalar, so the draw path is identical for every scalar type.
#[derive(Debug, Clone)]
pub(crate) struct CumTable<T> {
    cum: Vec<T>,
}

impl<T: Real> CumTable<T> {
    pub(crate) fn new(weights: &[T]) -> Self {
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = T::zero();
        for &w in weights {
            acc = acc + w;
            cum.push(acc);
        }
        CumTable { cum }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u = real::<T>(rng.gen::<f64>());
        for (i, &c) in self.cum.iter().enumerate() {
            if u < c {
                return i;
            }
        }
        self.cum.len() - 1
    }
}

/// Uniform draw from `0..len` via one `f64` uniform.
pub(crate) fn sample_uniform_index<R: Rng>(rng: &mut R, len: usize) -> usize {
    let u = rng.gen::<f64>();
    ((u * len as f64) as usize).min(len - 1)
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledUserRule<T> {
    Table(CumTable<T>),
    MaxAge,
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledChannelRule<T> {
    PerUserUniform(Vec<Vec<usize>>),
    Table(CumTable<T>),
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledPowerRule<T> {
    Pure(usize),
    Table(CumTable<T>),
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledBs<T> {
    pub(crate) user: CompiledUserRule<T>,
    pub(crate) channel: CompiledChannelRule<T>,
    pub(crate) power: CompiledPowerRule<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledAdv<T> {
    pub(crate) channel: CompiledChannelRule<T>,
    pub(crate) power: CompiledPowerRule<T>,
}

impl<T: Real> CompiledBs<T> {
    pub(crate) fn compile(policy: &BsPolicy<T>, cfg: &ValidatedConfig<T>) -> Result<Self> {
        let user = match &policy.user_rule {
            UserRule::Uniform => {
                CompiledUserRule::Table(CumTable::new(Pmf::uniform(cfg.num_users()).weights()))
            }
            UserRule::MaxAge => CompiledUserRule::MaxAge,
            UserRule::Custom(pmf) => {
                if pmf.len() != cfg.num_users() {
                    return Err(Error::validation(vec![format!(
                        "user pmf has {} entries for {} users",
                        pmf.len(),
                        cfg.num_users()
                    )]));
                }
                CompiledUserRule::Table(CumTable::new(pmf.weights()))
            }
        };

        let channel = match &policy.channel_rule {
            BsChannelRule::UniformOverUserSet => CompiledChannelRule::PerUserUniform(
                (0..cfg.num_users())
                    .map(|u| cfg.topology().user_set(u).to_vec())
                    .collect(),
            ),
            BsChannelRule::Custom(pmf) => {
                if pmf.len() != cfg.num_channels() {
                    return Err(Error::validation(vec![format!(
                        "channel pmf has {} entries for {} channels",
                        pmf.len(),
                        cfg.num_channels()
                    )]));
                }
                for user in 0..cfg.num_users() {
                    let set = cfg.topology().user_set(user);
                    for (c, &w) in pmf.weights().iter().enumerate() {
                        if w > T::zero() && !set.contains(&c) {
                            return Err(Error::Topology(format!(
                                "channel pmf puts mass on channel {c}, unavailable to user {user}"
                            )));
                        }
                    }
                }
                CompiledChannelRule::Table(CumTable::new(pmf.weights()))
            }
        };

        let power = match &policy.power_rule {
            BsPowerRule::BetaMix => {
                let bracket = bs_bracket_indices(cfg)?;
                let w = budget_mix_weight(cfg)?;
                let mut weights = vec![T::zero(); cfg.num_bs_levels()];
                weights[bracket.floor] = weights[bracket.floor] + w;
                weights[bracket.ceil] = weights[bracket.ceil] + (T::one() - w);
                CompiledPowerRule::Table(CumTable::new(&weights))
            }
            BsPowerRule::Custom(pmf) => {
                if pmf.len() != cfg.num_bs_levels() {
                    return Err(Error::validation(vec![format!(
                        "transmit power pmf has {} entries for {} levels",
                        pmf.len(),
                        cfg.num_bs_levels()
                    )]));
                }
                if !cfg.bs_powers().within_budget(pmf, real(BUDGET_TOLERANCE)) {
                    return Err(Error::validation(vec![format!(
                        "transmit power pmf spends {} with budget {}",
                        cfg.bs_powers().expected_power(pmf),
                        cfg.bs_powers().budget()
                    )]));
                }
                CompiledPowerRule::Table(CumTable::new(pmf.weights()))
            }
        };

        Ok(CompiledBs {
            user,
            channel,
            power,
        })
    }
}

impl<T: Real> CompiledAdv<T> {
    pub(crate) fn compile(policy: &AdvPolicy<T>, cfg: &ValidatedConfig<T>) -> Result<Self> {
        let channel = match &policy.channel_rule {
            AdvChannelRule::UniformAllChannels => {
                let all: Vec<usize> = (0..cfg.num_channels()).collect();
                CompiledChannelRule::PerUserUniform(vec![all])
            }
            AdvChannelRule::Custom(pmf) => {
                if pmf.len() != cfg.num_channels() {
                    return Err(Error::validation(vec![format!(
                        "blocking channel pmf has {} entries for {} channels",
                        pmf.len(),
                        cfg.num_channels()
                    )]));
                }
                CompiledChannelRule::Table(CumTable::new(pmf.weights()))
            }
        };

        let power = match &policy.power_rule {
            AdvPowerRule::PureLevel(idx) => {
                if *idx >= cfg.num_adv_levels() {
                    return Err(Error::validation(vec![format!(
                        "blocking power index {idx} out of range ({} levels)",
                        cfg.num_adv_levels()
                    )]));
                }
                let level = cfg.adv_powers().levels()[*idx];
                if !policy.budget_exempt
                    && level > cfg.adv_powers().budget() + real(BUDGET_TOLERANCE)
                {
                    return Err(Error::validation(vec![format!(
                        "pure blocking power {level} exceeds budget {}",
                        cfg.adv_powers().budget()
                    )]));
                }
                CompiledPowerRule::Pure(*idx)
            }
            AdvPowerRule::Custom(pmf) => {
                if pmf.len() != cfg.num_adv_levels() {
                    return Err(Error::validation(vec![format!(
                        "blocking power pmf has {} entries for {} levels",
                        pmf.len(),
                        cfg.num_adv_levels()
                    )]));
                }
                if !cfg.adv_powers().within_budget(pmf, real(BUDGET_TOLERANCE)) {
                    return Err(Error::validation(vec![format!(
                        "blocking power pmf spends {} with budget {}",
                        cfg.adv_powers().expected_power(pmf),
                        cfg.adv_powers().budget()
                    )]));
                }
                CompiledPowerRule::Table(CumTable::new(pmf.weights()))
            }
        };

        Ok(CompiledAdv { channel, power })
    }
}
