//! Age-of-information scheduling in a slotted network with a power-constrained
//! base station and a power-constrained jamming adversary.
//!
//! The crate is organized around five subsystems:
//!
//! - [`model`]: the validated system instance (users, channels, power grids,
//!   success matrix) and every derived scalar (budget bracket indices, the
//!   budget mixing weight, expected success under jamming, per-user delivery
//!   probabilities).
//! - [`bounds`]: closed-form lower/upper bounds on the long-run average age
//!   and the optimality ratios of the two reference scheduling policies.
//! - [`power_opt`]: optimal power-pmf selection for either side given the
//!   opponent's power pmf, plus an independent vertex-enumeration oracle.
//! - [`game`]: the stationary-policy game: renewal-reward age evaluation,
//!   channel/user best responses, best-response dynamics with cycle
//!   detection, equilibrium verification, a bilinear minimax probe, and the
//!   shift-structured special case.
//! - [`sim`]: a seeded, embarrassingly parallel slotted Monte Carlo engine.
//!
//! All numeric code is generic over the scalar type through [`scalar::Real`]
//! (any `num_traits::Float`); the aliases below fix `f64` for ordinary use.

pub mod bounds;
pub mod error;
pub mod game;
pub mod model;
pub mod power_opt;
pub mod presets;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};

/// `f64` instantiations of the core generic types.
pub type Pmf64 = model::Pmf<f64>;
pub type Config64 = model::ValidatedConfig<f64>;
pub type RawConfig64 = model::RawConfig<f64>;
pub type Profile64 = model::StationaryProfile<f64>;
pub type BoundReport64 = bounds::BoundReport<f64>;
pub type SimResult64 = sim::SimResult<f64>;
pub type Trace64 = game::BestResponseTrace<f64>;
pub type EquilibriumReport64 = game::EquilibriumReport<f64>;
pub type MinimaxReport64 = game::MinimaxReport<f64>;

#[cfg(test)]
mod tests {
    use crate::model::Pmf;

    /// The whole pipeline instantiates at `f32` (the counterexample's
    /// numbers are exactly representable there).
    #[test]
    fn core_operations_run_at_f32() {
        let cfg = crate::presets::counterexample_config::<f32>();
        assert_eq!(crate::model::budget_mix_weight(&cfg).unwrap(), 0.75f32);

        let d = Pmf::<f32>::new(vec![0.0, 0.75, 0.25]).unwrap();
        let e = crate::power_opt::algorithm1(&d, &cfg).unwrap();
        assert_eq!(e.weights(), &[0.0, 0.75, 0.25]);

        let report = crate::bounds::bound_report(&cfg).unwrap();
        assert!((report.lower_bound - 6.0 / 3.4).abs() < 1e-6);

        let trace = crate::game::best_response_dynamics(&d, &cfg, 16).unwrap();
        assert_eq!(trace.cycle_period, Some(2));

        let bs = crate::sim::BsPolicy::<f32>::max_age_beta_mix();
        let adv = crate::sim::AdvPolicy::uniform_floor_power(&cfg).unwrap();
        let result = crate::sim::run(&cfg, &bs, &adv, 2_000, 2, 5).unwrap();
        assert!(result.system_avg_age >= 1.0);
    }
}
