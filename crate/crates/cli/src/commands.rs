use std::io::Write;
use std::path::Path;

use aoi_core::bounds::bound_report;
use aoi_core::game::{
    best_response_dynamics, check_nash_fixed_powers, check_triple_fixed_powers,
    detect_shift_structure, minimax_power_game, special_case_nash, BestResponseTrace,
};
use aoi_core::model::{
    adv_ceil_index, adv_floor_index, bs_bracket_indices, budget_mix_weight, phi, Pmf,
    ValidatedConfig,
};
use aoi_core::power_opt::{algorithm1, algorithm2, oracle_best_d, oracle_best_e};
use aoi_core::presets::counterexample_config;
use aoi_core::sim::{policy_suite, run_with_burn_in, trajectory, AdvPolicy, BsPolicy};
use serde_json::{json, Value};

use crate::config::{self, LoadedConfig};
use crate::manifest::RunManifest;
use crate::{CliError, SEED_ENV_VAR};

/// Guard on the algorithm-vs-oracle objective difference; larger gaps are an
/// internal failure (exit 4).
const ORACLE_AGREEMENT_TOLERANCE: f64 = 1e-9;

/// Iteration budget for the fictitious-play probe.
const MINIMAX_ITERS: usize = 100_000;

/// Canonical serialization of the built-in counterexample instance; the
/// `counterexample` manifest digests these bytes.
const COUNTEREXAMPLE_TOML: &str = "\
num_users = 2
num_channels = 2
bs_powers = [1.0, 3.0, 5.0]
bs_budget = 3.5
adv_powers = [1.0, 3.0, 5.0]
adv_budget = 3.5
success_matrix = [[0.5, 0.35, 0.2], [0.6, 0.55, 0.4], [0.8, 0.7, 0.65]]
";

const SIDE_BY_SIDE_NOTE: &str = "The alternating best-response cycle and the bilinear minimax \
saddle point are reported side by side; neither is presented as a verdict on equilibrium \
existence for the stationary game.";

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable output")
    );
}

fn parse_pmf_flag(raw: &str, what: &str) -> Result<Pmf<f64>, CliError> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| CliError::input(format!("{what}: '{tok}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    Pmf::new(values).map_err(|e| CliError::input(format!("{what}: {e}")))
}

fn resolve_seed(flag: Option<u64>, from_file: Option<u64>) -> u64 {
    flag.or(from_file)
        .or_else(|| {
            std::env::var(SEED_ENV_VAR)
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn to_value<S: serde::Serialize>(value: &S) -> Value {
    serde_json::to_value(value).expect("serializable")
}

pub fn bounds(path: &Path) -> Result<(), CliError> {
    let loaded = config::load(path)?;
    let cfg = &loaded.config;
    let report = bound_report(cfg).map_err(CliError::from_core)?;

    let floor_adv = adv_floor_index(cfg).map_err(CliError::from_core)?;
    let ceil_adv = adv_ceil_index(cfg).unwrap_or(cfg.num_adv_levels() - 1);
    let bracket = bs_bracket_indices(cfg).map_err(CliError::from_core)?;
    let beta = budget_mix_weight(cfg).map_err(CliError::from_core)?;

    let manifest = RunManifest::new("bounds", &loaded.bytes, None);
    print_json(&json!({
        "manifest": to_value(&manifest),
        "lower_bound": report.lower_bound,
        "upper_uniform_general": report.upper_uniform_general,
        "upper_uniform_special": report.upper_uniform_special,
        "upper_maxage": report.upper_maxage,
        "ratios": to_value(&report.ratios),
        "nbar_s": report.nbar_s,
        // Power indices are 1-based here, matching the file format.
        "indices": {
            "x": floor_adv + 1,
            "x_bar": ceil_adv + 1,
            "y": bracket.floor + 1,
            "y_bar": bracket.ceil + 1,
            "beta": beta,
        },
    }));
    Ok(())
}

pub fn optimize_power(path: &Path, given: &str, pmf_raw: &str) -> Result<(), CliError> {
    let loaded = config::load(path)?;
    let cfg = &loaded.config;
    let input = parse_pmf_flag(pmf_raw, "--pmf")?;
    let manifest = RunManifest::new("optimize-power", &loaded.bytes, None);

    let (side, input_budget_ok, optimized, opt_value, oracle, oracle_value) = match given {
        "d" => {
            if input.len() != cfg.num_adv_levels() {
                return Err(CliError::input(format!(
                    "--pmf: {} entries for {} blocking powers",
                    input.len(),
                    cfg.num_adv_levels()
                )));
            }
            let ok = cfg.adv_powers().within_budget(&input, 1e-9);
            if !ok {
                return Err(CliError::input(format!(
                    "--pmf: expected blocking power {} exceeds budget {}",
                    cfg.adv_powers().expected_power(&input),
                    cfg.adv_powers().budget()
                )));
            }
            let e = algorithm1(&input, cfg).map_err(CliError::from_core)?;
            let marginals = cfg.success().bs_marginals(&input);
            let value = e.expectation(&marginals);
            let (oe, oval) = oracle_best_e(&input, cfg).map_err(CliError::from_core)?;
            ("transmit", ok, e, value, oe, oval)
        }
        "e" => {
            if input.len() != cfg.num_bs_levels() {
                return Err(CliError::input(format!(
                    "--pmf: {} entries for {} transmit powers",
                    input.len(),
                    cfg.num_bs_levels()
                )));
            }
            let ok = cfg.bs_powers().within_budget(&input, 1e-9);
            if !ok {
                return Err(CliError::input(format!(
                    "--pmf: expected transmit power {} exceeds budget {}",
                    cfg.bs_powers().expected_power(&input),
                    cfg.bs_powers().budget()
                )));
            }
            let d = algorithm2(&input, cfg).map_err(CliError::from_core)?;
            let marginals = cfg.success().adv_marginals(&input);
            let value = d.expectation(&marginals);
            let (od, oval) = oracle_best_d(&input, cfg).map_err(CliError::from_core)?;
            ("blocking", ok, d, value, od, oval)
        }
        other => {
            return Err(CliError::input(format!(
                "--given must be 'd' or 'e', got '{other}'"
            )))
        }
    };
    debug_assert!(input_budget_ok);

    let gap = (opt_value - oracle_value).abs();
    print_json(&json!({
        "manifest": to_value(&manifest),
        "given": given,
        "optimized_side": side,
        "input_pmf": to_value(&input),
        "optimal_pmf": to_value(&optimized),
        "optimal_value": opt_value,
        "oracle_pmf": to_value(&oracle),
        "oracle_value": oracle_value,
        "agreement_gap": gap,
    }));
    if gap > ORACLE_AGREEMENT_TOLERANCE {
        return Err(CliError::oracle(format!(
            "optimizer and vertex oracle disagree by {gap}"
        )));
    }
    Ok(())
}

fn trace_json(trace: &BestResponseTrace<f64>, cfg: &ValidatedConfig<f64>) -> Value {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "e": to_value(&s.e),
                "d": to_value(&s.d),
                "value": phi(&s.e, &s.d, cfg.success()).expect("profile dims match"),
            })
        })
        .collect();
    json!({
        "steps": steps,
        "cycle_start": trace.cycle_start,
        "cycle_period": trace.cycle_period,
    })
}

fn write_trace_csv(
    path: &Path,
    trace: &BestResponseTrace<f64>,
    cfg: &ValidatedConfig<f64>,
) -> Result<(), CliError> {
    let mut out = std::fs::File::create(path).map_err(|e| CliError::io(e, "trace csv"))?;
    let mut header = String::from("step");
    for i in 1..=cfg.num_bs_levels() {
        header.push_str(&format!(",e{i}"));
    }
    for j in 1..=cfg.num_adv_levels() {
        header.push_str(&format!(",d{j}"));
    }
    header.push_str(",value");
    writeln!(out, "{header}").map_err(|e| CliError::io(e, "trace csv"))?;
    for (step, s) in trace.steps.iter().enumerate() {
        let mut line = format!("{step}");
        for w in s.e.weights() {
            line.push_str(&format!(",{w}"));
        }
        for w in s.d.weights() {
            line.push_str(&format!(",{w}"));
        }
        let value = phi(&s.e, &s.d, cfg.success()).expect("profile dims match");
        line.push_str(&format!(",{value}"));
        writeln!(out, "{line}").map_err(|e| CliError::io(e, "trace csv"))?;
    }
    Ok(())
}

pub fn counterexample(trace_csv: Option<&Path>) -> Result<(), CliError> {
    let cfg = counterexample_config::<f64>();
    let init_d = Pmf::new(vec![0.0, 0.75, 0.25]).expect("valid pmf");
    let trace = best_response_dynamics(&init_d, &cfg, 64).map_err(CliError::from_core)?;
    let minimax = minimax_power_game(&cfg, MINIMAX_ITERS).map_err(CliError::from_core)?;

    if let Some(path) = trace_csv {
        write_trace_csv(path, &trace, &cfg)?;
    }

    let manifest = RunManifest::new("counterexample", COUNTEREXAMPLE_TOML.as_bytes(), None);
    print_json(&json!({
        "manifest": to_value(&manifest),
        "instance": {
            "num_users": cfg.num_users(),
            "num_channels": cfg.num_channels(),
            "bs_powers": cfg.bs_powers().levels(),
            "bs_budget": cfg.bs_powers().budget(),
            "adv_powers": cfg.adv_powers().levels(),
            "adv_budget": cfg.adv_powers().budget(),
            "success_matrix": cfg.success().rows(),
        },
        "best_response_cycle": trace_json(&trace, &cfg),
        "minimax": to_value(&minimax),
        "note": SIDE_BY_SIDE_NOTE,
    }));
    Ok(())
}

fn bs_policy_for(name: &str, loaded: &LoadedConfig) -> Result<(String, BsPolicy<f64>), CliError> {
    match name {
        "uniform" => Ok(("uniform".into(), BsPolicy::uniform_beta_mix())),
        "max-age" | "maxage" => Ok(("max-age".into(), BsPolicy::max_age_beta_mix())),
        "from-config" => Ok((
            "from-config".into(),
            config::bs_policy_from_file(&loaded.file)?,
        )),
        other => Err(CliError::input(format!(
            "--policy: unknown policy '{other}' (uniform, max-age, from-config)"
        ))),
    }
}

fn adv_policy_for(name: &str, loaded: &LoadedConfig) -> Result<(String, AdvPolicy<f64>), CliError> {
    match name {
        "uniform-x" => Ok((
            "uniform-x".into(),
            AdvPolicy::uniform_floor_power(&loaded.config).map_err(CliError::from_core)?,
        )),
        "uniform-xbar" => Ok((
            "uniform-xbar".into(),
            AdvPolicy::ceil_power_probe(&loaded.config),
        )),
        "from-config" => Ok((
            "from-config".into(),
            config::adv_policy_from_file(&loaded.file, &loaded.config)?,
        )),
        other => Err(CliError::input(format!(
            "--adversary: unknown adversary '{other}' (uniform-x, uniform-xbar, from-config)"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    path: &Path,
    slots: Option<u64>,
    reps: Option<u32>,
    seed: Option<u64>,
    burn_in: u64,
    policy: &str,
    adversary: &str,
    trajectories: Option<&Path>,
) -> Result<(), CliError> {
    let loaded = config::load(path)?;
    let sim_block = loaded.file.sim.unwrap_or_default();
    let slots = slots.or(sim_block.slots).unwrap_or(100_000);
    let reps = reps.or(sim_block.reps).unwrap_or(10);
    let seed = resolve_seed(seed, sim_block.seed);

    let (policy_name, bs) = bs_policy_for(policy, &loaded)?;
    let (adversary_name, adv) = adv_policy_for(adversary, &loaded)?;

    let result = run_with_burn_in(&loaded.config, &bs, &adv, slots, reps, seed, burn_in)
        .map_err(CliError::from_core)?;

    if let Some(out_path) = trajectories {
        let rows = trajectory(&loaded.config, &bs, &adv, slots, seed, 0, burn_in)
            .map_err(CliError::from_core)?;
        let mut out =
            std::fs::File::create(out_path).map_err(|e| CliError::io(e, "trajectory csv"))?;
        writeln!(out, "slot,user,age").map_err(|e| CliError::io(e, "trajectory csv"))?;
        for row in rows {
            // Users are 1-based in file-facing output, like channel indices.
            writeln!(out, "{},{},{}", row.slot, row.user + 1, row.age)
                .map_err(|e| CliError::io(e, "trajectory csv"))?;
        }
    }

    let manifest = RunManifest::new("simulate", &loaded.bytes, Some(seed));
    print_json(&json!({
        "manifest": to_value(&manifest),
        "policy": policy_name,
        "adversary": adversary_name,
        "adversary_over_budget": adv.is_budget_exempt(),
        "burn_in": burn_in,
        "result": to_value(&result),
    }));
    Ok(())
}

pub fn nash(
    path: &Path,
    fixed_powers: bool,
    e_raw: Option<&str>,
    d_raw: Option<&str>,
    max_iters: usize,
    trace_csv: Option<&Path>,
) -> Result<(), CliError> {
    let loaded = config::load(path)?;
    let cfg = &loaded.config;
    let manifest = RunManifest::new("nash", &loaded.bytes, None);

    if fixed_powers {
        let e = parse_pmf_flag(e_raw.expect("clap enforces --e"), "--e")?;
        let d = parse_pmf_flag(d_raw.expect("clap enforces --d"), "--d")?;
        let report = check_nash_fixed_powers(cfg, &e, &d).map_err(CliError::from_core)?;
        print_json(&json!({
            "manifest": to_value(&manifest),
            "mode": "fixed-powers",
            "report": to_value(&report),
        }));
        return Ok(());
    }

    if detect_shift_structure(cfg.success(), 1e-9).is_some() {
        let shift = detect_shift_structure(cfg.success(), 1e-9).expect("checked");
        let profile = special_case_nash(cfg).map_err(CliError::from_core)?;
        let report = check_triple_fixed_powers(cfg, &profile).map_err(CliError::from_core)?;
        print_json(&json!({
            "manifest": to_value(&manifest),
            "mode": "shift-structure",
            "shift": shift,
            "profile": to_value(&profile),
            "report": to_value(&report),
        }));
        return Ok(());
    }

    let floor = adv_floor_index(cfg).map_err(CliError::from_core)?;
    let init_d = Pmf::basis(cfg.num_adv_levels(), floor);
    let trace = best_response_dynamics(&init_d, cfg, max_iters).map_err(CliError::from_core)?;
    let minimax = minimax_power_game(cfg, MINIMAX_ITERS).map_err(CliError::from_core)?;
    if let Some(csv) = trace_csv {
        write_trace_csv(csv, &trace, cfg)?;
    }
    print_json(&json!({
        "manifest": to_value(&manifest),
        "mode": "best-response-dynamics",
        "trace": trace_json(&trace, cfg),
        "minimax": to_value(&minimax),
        "note": SIDE_BY_SIDE_NOTE,
    }));
    Ok(())
}

pub fn suite(
    path: &Path,
    slots: Option<u64>,
    reps: Option<u32>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let loaded = config::load(path)?;
    let sim_block = loaded.file.sim.unwrap_or_default();
    let slots = slots.or(sim_block.slots).unwrap_or(100_000);
    let reps = reps.or(sim_block.reps).unwrap_or(10);
    let seed = resolve_seed(seed, sim_block.seed);

    let report = policy_suite(&loaded.config, slots, reps, seed).map_err(CliError::from_core)?;
    let manifest = RunManifest::new("suite", &loaded.bytes, Some(seed));
    print_json(&json!({
        "manifest": to_value(&manifest),
        "bounds": to_value(&report.bounds),
        "rows": to_value(&report.rows),
    }));
    Ok(())
}
