//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime. Run with `cargo test --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use aoi_core::game::{
    average_age_stationary, best_response_dynamics, check_nash_fixed_powers,
    check_triple_fixed_powers, minimax_power_game, special_case_nash,
};
use aoi_core::model::{uniform_profile, validate, Pmf, RawConfig};
use aoi_core::power_opt::{
    algorithm1, algorithm1_with_mode, algorithm2, algorithm2_with_mode, oracle_best_d,
    oracle_best_e, TraversalMode,
};
use aoi_core::presets::counterexample_config;
use aoi_core::sim::{policy_suite, run, AdvPolicy, BsPolicy};
use common::*;
use rand::prelude::*;

fn pmf(w: &[f64]) -> Pmf<f64> {
    Pmf::new(w.to_vec()).unwrap()
}

fn assert_weights(got: &Pmf<f64>, want: &[f64], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length mismatch");
    for (i, (&g, &w)) in got.weights().iter().zip(want).enumerate() {
        assert!(
            (g - w).abs() <= tol,
            "{what}: weight {i} is {g}, expected {w} within {tol}"
        );
    }
}

/// Criterion 1: on the embedded instance, alternating power best responses
/// reproduce the published alternation exactly and cycle with period two.
#[test]
fn criterion_1_counterexample_regression() {
    let started = Instant::now();
    let cfg = counterexample_config::<f64>();
    let on_mid_high = pmf(&[0.0, 0.75, 0.25]); // powers {3, 5}
    let on_low_high = pmf(&[0.375, 0.0, 0.625]); // powers {1, 5}

    // The four best-response arrows of the alternation.
    let e = algorithm1(&on_mid_high, &cfg).unwrap();
    assert_eq!(e.support(), vec![1, 2], "BS response to adversary {{3,5}}");
    assert_weights(&e, on_mid_high.weights(), 1e-12, "BS response to {3,5}");

    let e = algorithm1(&on_low_high, &cfg).unwrap();
    assert_eq!(e.support(), vec![0, 2], "BS response to adversary {{1,5}}");
    assert_weights(&e, on_low_high.weights(), 1e-12, "BS response to {1,5}");

    let d = algorithm2(&on_low_high, &cfg).unwrap();
    assert_eq!(d.support(), vec![1, 2], "adversary response to BS {{1,5}}");
    assert_weights(
        &d,
        on_mid_high.weights(),
        1e-12,
        "adversary response to {1,5}",
    );

    let d = algorithm2(&on_mid_high, &cfg).unwrap();
    assert_eq!(d.support(), vec![0, 2], "adversary response to BS {{3,5}}");
    assert_weights(
        &d,
        on_low_high.weights(),
        1e-12,
        "adversary response to {3,5}",
    );

    // The dynamics stitch them into a period-2 cycle.
    let trace = best_response_dynamics(&on_mid_high, &cfg, 64).unwrap();
    assert_eq!(trace.cycle_period, Some(2), "cycle period");
    let start = trace.cycle_start.unwrap();
    assert_weights(
        &trace.steps[start].e,
        on_mid_high.weights(),
        1e-12,
        "cycle e0",
    );
    assert_weights(
        &trace.steps[start].d,
        on_low_high.weights(),
        1e-12,
        "cycle d0",
    );
    assert_weights(
        &trace.steps[start + 1].e,
        on_low_high.weights(),
        1e-12,
        "cycle e1",
    );
    assert_weights(
        &trace.steps[start + 1].d,
        on_mid_high.weights(),
        1e-12,
        "cycle d1",
    );

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("[acceptance] criterion 1 (counterexample regression): PASS in {elapsed:?}");
}

/// Criterion 2: both power optimizations match the vertex-enumeration
/// oracle on 1000+ random instances with zero failures.
#[test]
fn criterion_2_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = rng(0x5EED_0002);
    let instances = 1200;
    let mut failures = 0usize;
    let mut literal_mismatches = 0usize;

    for trial in 0..instances {
        let cfg = random_power_instance(&mut rng, 2..=8, 2..=8);
        let d = random_feasible_pmf(&mut rng, cfg.adv_powers());
        let e_in = random_feasible_pmf(&mut rng, cfg.bs_powers());

        let g_bs = cfg.success().bs_marginals(&d);
        let (_, oracle_val_e) = oracle_best_e(&d, &cfg).unwrap();
        let alg_val_e = algorithm1(&d, &cfg).unwrap().expectation(&g_bs);
        if (alg_val_e - oracle_val_e).abs() > 1e-9 {
            failures += 1;
            println!(
                "[acceptance] criterion 2 FAILURE (trial {trial}, transmit side)\n\
                 instance: {cfg:?}\nopponent pmf: {d:?}\n\
                 algorithm value {alg_val_e}, oracle value {oracle_val_e}"
            );
        }

        let g_adv = cfg.success().adv_marginals(&e_in);
        let (_, oracle_val_d) = oracle_best_d(&e_in, &cfg).unwrap();
        let alg_val_d = algorithm2(&e_in, &cfg).unwrap().expectation(&g_adv);
        if (alg_val_d - oracle_val_d).abs() > 1e-9 {
            failures += 1;
            println!(
                "[acceptance] criterion 2 FAILURE (trial {trial}, blocking side)\n\
                 instance: {cfg:?}\nopponent pmf: {e_in:?}\n\
                 algorithm value {alg_val_d}, oracle value {oracle_val_d}"
            );
        }

        // The single-round pseudocode reading is reported, not required.
        let lit_e = algorithm1_with_mode(&d, &cfg, TraversalMode::PseudocodeLiteral)
            .unwrap()
            .expectation(&g_bs);
        let lit_d = algorithm2_with_mode(&e_in, &cfg, TraversalMode::PseudocodeLiteral)
            .unwrap()
            .expectation(&g_adv);
        if (lit_e - oracle_val_e).abs() > 1e-9 || (lit_d - oracle_val_d).abs() > 1e-9 {
            literal_mismatches += 1;
        }
    }

    assert_eq!(failures, 0, "{failures} oracle disagreements");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "[acceptance] criterion 2 (oracle equivalence, {instances} instances, \
         single-round literal mode off-oracle on {literal_mismatches}): PASS in {elapsed:?}"
    );
}

/// Criterion 3: simulated per-user ages of random stationary profiles match
/// the renewal-reward prediction within four standard errors.
#[test]
fn criterion_3_renewal_reward_validation() {
    let started = Instant::now();
    let mut rng = rng(0x5EED_0003);
    let slots = 1_000_000;
    let reps = 20;

    for trial in 0..20 {
        let cfg = {
            // Relaxed topology with 2-5 users and channels.
            let mut c;
            loop {
                c = random_sim_config(&mut rng, true);
                if c.topology().is_relaxed() {
                    break;
                }
            }
            c
        };
        let profile = aoi_core::model::StationaryProfile::new(
            &cfg,
            random_pmf(&mut rng, cfg.num_users(), 0.5),
            random_pmf(&mut rng, cfg.num_channels(), 0.5),
            random_feasible_pmf(&mut rng, cfg.bs_powers()),
            random_pmf(&mut rng, cfg.num_channels(), 0.5),
            random_feasible_pmf(&mut rng, cfg.adv_powers()),
        )
        .unwrap();
        let q = aoi_core::model::success_prob_vector(&profile, &cfg).unwrap();

        let bs = BsPolicy::from_profile(&profile);
        let adv = AdvPolicy::from_profile(&profile);
        let result = run(&cfg, &bs, &adv, slots, reps, 0xC0FFEE + trial).unwrap();

        for (user, &qi) in q.iter().enumerate() {
            let predicted = 1.0 / qi;
            let got = result.per_user_avg_age[user];
            let slack = 4.0 * result.per_user_std_error[user];
            assert!(
                (got - predicted).abs() <= slack,
                "trial {trial} user {user}: simulated {got}, predicted {predicted}, \
                 slack {slack}"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("[acceptance] criterion 3 (renewal-reward validation): PASS in {elapsed:?}");
}

/// Criterion 4: simulated reference policies respect the closed-form bounds,
/// and the max-age policy meets its bound with equality when both budgets
/// sit on grid powers and the topology is relaxed.
#[test]
fn criterion_4_bound_suite() {
    let started = Instant::now();
    let mut rng = rng(0x5EED_0004);
    let slots = 100_000;
    let reps = 10;

    for trial in 0..10u64 {
        let cfg = random_sim_config(&mut rng, false);
        let report = policy_suite(&cfg, slots, reps, 0xB0 + trial).unwrap();
        let b = &report.bounds;
        for row in &report.rows {
            let age = row.result.system_avg_age;
            let slack = 4.0 * row.result.std_error;
            assert!(
                age >= b.lower_bound - slack,
                "trial {trial} {} vs {}: {age} below lower bound {}",
                row.policy,
                row.adversary,
                b.lower_bound
            );
            match row.policy.as_str() {
                "uniform-user" => assert!(
                    age <= b.upper_uniform_general + slack,
                    "trial {trial} uniform vs {}: {age} above 2N {}",
                    row.adversary,
                    b.upper_uniform_general
                ),
                "max-age" => assert!(
                    age <= b.upper_maxage + slack,
                    "trial {trial} max-age vs {}: {age} above bound {}",
                    row.adversary,
                    b.upper_maxage
                ),
                _ => {}
            }
        }
    }

    // Equality case: both budgets exactly on grid powers, homogeneous sets.
    for trial in 0..3u64 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=4);
        let bs_levels = random_levels(&mut rng, n);
        let adv_levels = random_levels(&mut rng, m);
        let raw = RawConfig {
            num_users: rng.gen_range(2..=4),
            total_channels: rng.gen_range(2..=4),
            channel_sets: None,
            bs_budget: bs_levels[rng.gen_range(0..n)],
            adv_budget: adv_levels[rng.gen_range(0..m)],
            bs_levels,
            adv_levels,
            success: random_monotone_success(&mut rng, n, m),
        };
        let cfg = validate(&raw).unwrap();
        let report = policy_suite(&cfg, slots, reps, 0xEA + trial).unwrap();
        let maxage_vs_benchmark = report
            .rows
            .iter()
            .find(|r| r.policy == "max-age" && r.adversary == "benchmark-floor-power")
            .unwrap();
        let age = maxage_vs_benchmark.result.system_avg_age;
        let slack = 4.0 * maxage_vs_benchmark.result.std_error;
        let bound = report.bounds.upper_maxage;
        assert!(
            (age - bound).abs() <= slack,
            "equality trial {trial}: max-age age {age} vs bound {bound}, slack {slack}"
        );
    }

    let elapsed = started.elapsed();
    println!("[acceptance] criterion 4 (bound suite): PASS in {elapsed:?}");
}

/// Criterion 5: with powers frozen, the all-uniform triple survives every
/// deviation probe on random instances, and a perturbed triple does not.
#[test]
fn criterion_5_fixed_power_equilibrium() {
    let started = Instant::now();
    let mut rng = rng(0x5EED_0005);

    for trial in 0..10 {
        let cfg = random_sim_config(&mut rng, true);
        let e = random_feasible_pmf(&mut rng, cfg.bs_powers());
        let d = random_feasible_pmf(&mut rng, cfg.adv_powers());

        let report = check_nash_fixed_powers(&cfg, &e, &d).unwrap();
        assert!(
            report.is_equilibrium,
            "trial {trial}: uniform triple rejected (bs gain {}, adv gain {})",
            report.max_bs_gain, report.max_adv_gain
        );
        assert!(report.max_bs_gain <= 1e-9 && report.max_adv_gain <= 1e-9);

        // Skew the channel pmf: the adversary can then profitably follow.
        let ns = cfg.num_channels();
        let mut skewed = vec![1.0 / ns as f64; ns];
        skewed[0] += 0.1;
        skewed[ns - 1] -= 0.1;
        let candidate = uniform_profile(&cfg, e, d)
            .unwrap()
            .with_bs_channel(&cfg, pmf(&skewed))
            .unwrap();
        let perturbed = check_triple_fixed_powers(&cfg, &candidate).unwrap();
        assert!(
            !perturbed.is_equilibrium && perturbed.max_adv_gain > 1e-9,
            "trial {trial}: perturbed triple still passed"
        );
    }

    let elapsed = started.elapsed();
    println!("[acceptance] criterion 5 (fixed-power equilibrium): PASS in {elapsed:?}");
}

/// Criterion 6: under the shift structure the transmit best response is the
/// same for every opponent pmf, and the assembled profile survives every
/// probe.
#[test]
fn criterion_6_shift_structure_nash() {
    let started = Instant::now();
    let mut rng = rng(0x5EED_0006);

    for trial in 0..10 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(2..=6);
        // Shift-structured success matrix: every row is the first row plus a
        // non-negative constant.
        let mut base: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..0.5)).collect();
        base.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut shifts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..0.45)).collect();
        shifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut success = vec![base.clone()];
        for &l in &shifts {
            success.push(base.iter().map(|&f| f + l).collect());
        }
        let bs_levels = random_levels(&mut rng, n);
        let adv_levels = random_levels(&mut rng, m);
        let raw = RawConfig {
            num_users: rng.gen_range(2..=4),
            total_channels: rng.gen_range(2..=4),
            channel_sets: None,
            bs_budget: random_budget(&mut rng, &bs_levels),
            adv_budget: random_budget(&mut rng, &adv_levels),
            bs_levels,
            adv_levels,
            success,
        };
        let cfg = validate(&raw).unwrap();

        let reference = algorithm1(&random_pmf(&mut rng, m, 0.0), &cfg).unwrap();
        for _ in 0..100 {
            let d = random_pmf(&mut rng, m, 0.0);
            let e = algorithm1(&d, &cfg).unwrap();
            assert_eq!(
                e, reference,
                "trial {trial}: transmit best response changed with the opponent pmf"
            );
        }

        let profile = special_case_nash(&cfg).unwrap();
        let report = check_triple_fixed_powers(&cfg, &profile).unwrap();
        assert!(report.is_equilibrium);
        assert!(report.max_bs_gain <= 1e-9 && report.max_adv_gain <= 1e-9);

        // Power re-runs cannot improve either side.
        let base_age = average_age_stationary(&profile, &cfg).unwrap();
        let e_resp = algorithm1(profile.adv_power(), &cfg).unwrap();
        let bs_gain = base_age
            - average_age_stationary(&profile.with_bs_power(&cfg, e_resp).unwrap(), &cfg).unwrap();
        let d_resp = algorithm2(profile.bs_power(), &cfg).unwrap();
        let adv_gain = average_age_stationary(&profile.with_adv_power(&cfg, d_resp).unwrap(), &cfg)
            .unwrap()
            - base_age;
        assert!(bs_gain <= 1e-9, "trial {trial}: bs power gain {bs_gain}");
        assert!(adv_gain <= 1e-9, "trial {trial}: adv power gain {adv_gain}");
    }

    let elapsed = started.elapsed();
    println!("[acceptance] criterion 6 (shift-structure equilibrium): PASS in {elapsed:?}");
}

/// Criterion 7: fictitious play over the polytope vertices closes the
/// duality gap on the counterexample while the vertex dynamics cycle; both
/// findings are reported, neither is declared a verdict.
#[test]
fn criterion_7_minimax_probe() {
    let started = Instant::now();
    let cfg = counterexample_config::<f64>();

    let report = minimax_power_game(&cfg, 100_000).unwrap();
    assert!(
        report.duality_gap <= 1e-6,
        "duality gap {} after {} iterations",
        report.duality_gap,
        report.iterations
    );
    assert!(report.iterations <= 100_000);
    assert!(
        (report.value - 0.55).abs() <= 1e-5,
        "value {}",
        report.value
    );

    // The cycle exists side by side with the saddle point.
    let trace = best_response_dynamics(&pmf(&[0.0, 0.75, 0.25]), &cfg, 64).unwrap();
    assert_eq!(trace.cycle_period, Some(2));

    let elapsed = started.elapsed();
    println!(
        "[acceptance] criterion 7 (minimax probe, gap {:.2e} at iteration {}): PASS in {elapsed:?}",
        report.duality_gap, report.iterations
    );
}

/// Criterion 8: identical seeds give byte-identical results across worker
/// counts 1, 2, and 8.
#[test]
fn criterion_8_worker_count_determinism() {
    let started = Instant::now();
    let cfg = counterexample_config::<f64>();
    let bs = BsPolicy::max_age_beta_mix();
    let adv = AdvPolicy::uniform_floor_power(&cfg).unwrap();

    let mut serialized = Vec::new();
    for workers in [1usize, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let result = pool
            .install(|| run(&cfg, &bs, &adv, 20_000, 8, 0xD5EED))
            .unwrap();
        serialized.push(serde_json::to_string(&result).unwrap());
    }
    assert_eq!(serialized[0], serialized[1], "1 vs 2 workers");
    assert_eq!(serialized[0], serialized[2], "1 vs 8 workers");

    let elapsed = started.elapsed();
    println!("[acceptance] criterion 8 (worker-count determinism): PASS in {elapsed:?}");
}
