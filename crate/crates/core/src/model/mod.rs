//! System instance: validated configuration, probability vectors, and every
//! derived scalar of the model (budget bracket indices, the budget mixing
//! weight, expected success under jamming, per-user delivery probabilities).

mod config;
mod derived;
mod pmf;
mod profile;

pub use config::{
    validate, ChannelTopology, PowerLevels, RawConfig, SuccessMatrix, ValidatedConfig,
};
pub use derived::{
    adv_ceil_index, adv_floor_index, bs_bracket_indices, budget_mix_weight, phi,
    success_prob_vector, BracketIndices,
};
pub use pmf::{Pmf, PMF_SUM_TOLERANCE};
pub use profile::{uniform_profile, StationaryProfile, BUDGET_TOLERANCE};
