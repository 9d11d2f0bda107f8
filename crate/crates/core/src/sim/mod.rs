//! Slotted-time Monte Carlo engine: simulates the age process under
//! configurable base-station and adversary policies with seeded,
//! embarrassingly parallel replications.
//!
//! Determinism contract: a replication's draws come from a ChaCha stream
//! keyed by `(master_seed, replication index)`, so results are bit-identical
//! for a fixed seed regardless of how replications are scheduled across
//! worker threads.

mod engine;
mod policy;
mod suite;

pub use engine::{
    run, run_with_burn_in, step, trajectory, AgeRow, AgeState, SimResult, SlotOutcome,
};
pub use policy::{
    AdvChannelRule, AdvPolicy, AdvPowerRule, BsChannelRule, BsPolicy, BsPowerRule, UserRule,
};
pub use suite::{policy_suite, PolicySuiteReport, SuiteRow};
