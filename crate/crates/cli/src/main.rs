//! `roadmap`: analyses of robust principal-agent contracting scenarios.
//!
//! Every subcommand reads one JSON config (see `config.rs` for the schema),
//! runs the corresponding analysis from `roadmap-core`, and emits a result
//! envelope on stdout: command, sha-256 digest of the config bytes,
//! timestamp, warnings, and the result payload. Identical config and seed
//! produce a byte-identical payload (the timestamp sits outside it).
//! Extended reals are encoded as the literals `"inf"`, `"-inf"`, and
//! `"zero-limit"`. Exit codes: 0 success, 2 infeasibility verdicts, 1
//! errors.

mod config;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use config::{parse_grid, ConfigFile, Scenario};
use roadmap_core::dynamic_contract::{
    best_plan, first_period_gap, no_intertemporal_arbitrage, ActionKind, PlanSolveOptions,
};
use roadmap_core::dynamics_state::{incentive_capacity, trap_check, RobustnessState};
use roadmap_core::entropic::Intensity;
use roadmap_core::error::CoreError;
use roadmap_core::extensions::{
    design_roadmap, diagnostic_condition, milestone_capacity, shirking_capacity,
    two_action_margin,
};
use roadmap_core::interventions::{
    feedback_state, optimal_coarsening, screening_cutoff, screening_diff, turnover_analysis,
    turnover_profit_at,
};
use roadmap_core::longrun::{
    cycle_experiment, limit_recursion, simulate_path, speed_limit, value_recursion, Policy,
};
use roadmap_core::static_contract::{lambda_comparative, solve_static, SolveOptions};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "roadmap", version, about = "Robust-contracting analyses", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Extra path seed appended to simulation seed lists.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory for the envelope and any tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Sweep grid, `name=start:stop:count`.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Stdout format: the JSON envelope or the command's primary table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the one-shot wage-minimization problem.
    StaticSolve,
    /// Solve the two-period game by plan enumeration.
    DynamicSolve,
    /// Incentive capacity at the configured state, optionally swept over
    /// lambda.
    Capacity,
    /// Breakthrough-trap diagnostic.
    TrapCheck,
    /// Coarse-evaluation design: minimum coarsening and post-signal states,
    /// optionally swept over r.
    Feedback,
    /// Screening menu values, cutoff, and D(gamma) sweep.
    Screen,
    /// Post-success turnover analysis.
    Turnover,
    /// Simulate paths under a policy and updating rule.
    Simulate,
    /// Long-run innovation speed limit, with a gated-policy probe when
    /// seeds are configured.
    SpeedLimit,
    /// Evolving-vs-frozen recursion comparison at simulated roots.
    BridgeCheck,
    /// Credibility-constrained prior design.
    DesignRoadmap,
    /// Three-outcome milestone capacity and diagnostic condition.
    Milestones,
    /// Shirking-adjusted capacity.
    Shirking,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::StaticSolve => "static-solve",
            Command::DynamicSolve => "dynamic-solve",
            Command::Capacity => "capacity",
            Command::TrapCheck => "trap-check",
            Command::Feedback => "feedback",
            Command::Screen => "screen",
            Command::Turnover => "turnover",
            Command::Simulate => "simulate",
            Command::SpeedLimit => "speed-limit",
            Command::BridgeCheck => "bridge-check",
            Command::DesignRoadmap => "design-roadmap",
            Command::Milestones => "milestones",
            Command::Shirking => "shirking",
        }
    }
}

/// Extended-real JSON encoding.
fn ext(v: f64) -> Value {
    if v.is_nan() {
        Value::String("nan".into())
    } else if v == f64::INFINITY {
        Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        json!(v)
    }
}

fn lam(v: Intensity) -> Value {
    match v {
        Intensity::Zero => Value::String("zero-limit".into()),
        Intensity::Infinite => Value::String("inf".into()),
        Intensity::Finite(l) => json!(l),
    }
}

fn action_name(a: ActionKind) -> &'static str {
    match a {
        ActionKind::Safe => "safe",
        ActionKind::Innovate => "innovate",
    }
}

fn state_json(st: &RobustnessState) -> Value {
    json!({ "m_high": st.m_high, "lambda": lam(st.lambda) })
}

struct Output {
    payload: Value,
    /// (file stem, header, rows) tables.
    tables: Vec<(String, String, Vec<String>)>,
    /// Exit 2 when the scenario's verdict is infeasibility.
    infeasible: bool,
}

impl Output {
    fn new(payload: Value) -> Self {
        Output {
            payload,
            tables: Vec::new(),
            infeasible: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let envelope = json!({
                "schema_version": 1,
                "command": cli.command.name(),
                "config_digest": digest_of(&cli).unwrap_or_default(),
                "timestamp": chrono::Utc::now().to_rfc3339(),
                "warnings": [],
                "result": out.payload,
            });
            let rendered = serde_json::to_string_pretty(&envelope).expect("valid json");
            match cli.format {
                Format::Json => println!("{rendered}"),
                Format::Csv => {
                    if let Some((_, header, rows)) = out.tables.first() {
                        println!("{header}");
                        for r in rows {
                            println!("{r}");
                        }
                    } else {
                        // Flat key,value view of the payload.
                        println!("key,value");
                        for line in flatten(&out.payload) {
                            println!("{line}");
                        }
                    }
                }
            }
            if let Some(dir) = &cli.out {
                if let Err(e) = write_outputs(dir, cli.command.name(), &rendered, &out.tables) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            }
            if out.infeasible {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn digest_of(cli: &Cli) -> Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| anyhow!("missing --config"))?;
    let bytes = fs::read(path)?;
    Ok(format!("sha256:{:x}", Sha256::digest(&bytes)))
}

fn write_outputs(
    dir: &PathBuf,
    command: &str,
    envelope: &str,
    tables: &[(String, String, Vec<String>)],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{command}.json")), envelope)?;
    for (stem, header, rows) in tables {
        let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        fs::write(dir.join(format!("{stem}.csv")), text)?;
    }
    Ok(())
}

fn flatten(v: &Value) -> Vec<String> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, val) in m {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, val, out);
                }
            }
            Value::Array(a) => {
                for (i, val) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), val, out);
                }
            }
            other => out.push(format!("{prefix},{other}")),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn load_config(cli: &Cli) -> Result<ConfigFile> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("missing --config PATH"))?;
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: ConfigFile = serde_json::from_slice(&bytes).context("config does not validate")?;
    if cfg.schema_version != 1 {
        bail!("unsupported schema_version {}", cfg.schema_version);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Output> {
    let cfg = load_config(cli)?;
    match (&cli.command, &cfg.scenario) {
        (Command::StaticSolve, Scenario::Static(sc)) => cmd_static_solve(cli, sc),
        (Command::DynamicSolve, Scenario::Dynamic(dc)) => cmd_dynamic_solve(dc),
        (Command::Capacity, Scenario::Dynamic(dc)) => cmd_capacity(cli, dc),
        (Command::TrapCheck, Scenario::Dynamic(dc)) => cmd_trap_check(dc),
        (Command::Feedback, Scenario::Dynamic(dc)) => cmd_feedback(cli, dc),
        (Command::Screen, Scenario::Screening(sc)) => cmd_screen(cli, sc),
        (Command::Turnover, Scenario::Turnover(tc)) => cmd_turnover(tc),
        (Command::Simulate, Scenario::Longrun(lc)) => cmd_simulate(cli, lc),
        (Command::SpeedLimit, Scenario::Longrun(lc)) => cmd_speed_limit(cli, lc),
        (Command::BridgeCheck, Scenario::BridgeCheck(bc)) => cmd_bridge_check(bc),
        (Command::DesignRoadmap, Scenario::Design(dc)) => cmd_design(dc),
        (Command::Milestones, Scenario::Milestones(mc)) => cmd_milestones(mc),
        (Command::Shirking, Scenario::Shirking(sc)) => cmd_shirking(sc),
        (cmd, scenario) => bail!(
            "command {} needs a {:?}-kind scenario, config has kind {:?}",
            cmd.name(),
            expected_kind(cmd),
            scenario.kind()
        ),
    }
}

fn expected_kind(cmd: &Command) -> &'static str {
    match cmd {
        Command::StaticSolve => "static",
        Command::DynamicSolve | Command::Capacity | Command::TrapCheck | Command::Feedback => {
            "dynamic"
        }
        Command::Screen => "screening",
        Command::Turnover => "turnover",
        Command::Simulate | Command::SpeedLimit => "longrun",
        Command::BridgeCheck => "bridge-check",
        Command::DesignRoadmap => "design",
        Command::Milestones => "milestones",
        Command::Shirking => "shirking",
    }
}

fn cmd_static_solve(cli: &Cli, sc: &config::StaticConfig) -> Result<Output> {
    let (scenario, a_star) = sc.to_scenario()?;
    let mut opts = SolveOptions::default();
    if let Some(seed) = cli.seed {
        opts.seed = seed;
    }
    match solve_static(&scenario, a_star, &opts) {
        Ok(sol) => {
            let mut payload = json!({
                "implemented": sc.a_star,
                "x": sol.x,
                "wage_bill": sol.wage_bill,
                "ir_slack": sol.ir_slack,
                "ic_slacks": sol.ic_slacks.iter().map(|(n, v)| json!({"action": n, "slack": v})).collect::<Vec<_>>(),
                "binding_set": sol.binding_set,
                "solver": {
                    "starts": sol.solver_trace.starts,
                    "penalty_rounds": sol.solver_trace.penalty_rounds,
                    "objective_evaluations": sol.solver_trace.objective_evaluations,
                },
            });
            let mut tables = Vec::new();
            if let Some(spec) = &cli.grid {
                let grid = parse_grid(spec)?;
                if grid.name != "lambda" {
                    bail!("static-solve sweeps over lambda; got grid name {:?}", grid.name);
                }
                let rep = lambda_comparative(&scenario, a_star, &grid.values, &opts)?;
                let mut rows = Vec::new();
                for p in &rep.points {
                    rows.push(format!(
                        "{},{}",
                        p.lambda,
                        p.wage_bill.map_or("infeasible".to_string(), |w| w.to_string())
                    ));
                }
                payload.as_object_mut().expect("object").insert(
                    "lambda_sweep".into(),
                    json!({
                        "condition_holds": rep.condition_holds,
                        "gaps_decreasing": rep.gaps_decreasing,
                        "nesting_holds": rep.nesting_holds,
                        "wage_monotone": rep.wage_monotone,
                        "points": rep.points.iter().map(|p| json!({
                            "lambda": p.lambda,
                            "wage_bill": p.wage_bill,
                        })).collect::<Vec<_>>(),
                    }),
                );
                tables.push(("lambda_sweep".to_string(), "lambda,wage_bill".to_string(), rows));
            }
            Ok(Output {
                payload,
                tables,
                infeasible: false,
            })
        }
        Err(CoreError::Infeasible(cert)) => {
            let payload = json!({
                "implemented": sc.a_star,
                "infeasible": {
                    "best_x": cert.best_x,
                    "ir_slack": cert.ir_slack,
                    "ic_slacks": cert.ic_slacks,
                    "worst_violation": cert.worst_violation,
                },
            });
            Ok(Output {
                payload,
                tables: Vec::new(),
                infeasible: true,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_dynamic_solve(dc: &config::DynamicConfig) -> Result<Output> {
    let prims = dc.to_primitives()?;
    let report = best_plan(&prims, &PlanSolveOptions::default())?;
    let plan_json = |p: &roadmap_core::dynamic_contract::ActionPlan| {
        json!({
            "a1": action_name(p.a1),
            "sigma2": [action_name(p.sigma2[0]), action_name(p.sigma2[1])],
        })
    };
    let all: Vec<Value> = report
        .all
        .iter()
        .map(|outcome| match outcome {
            Ok(sol) => json!({
                "plan": plan_json(&sol.plan),
                "profit": sol.profit,
                "v1": sol.v1,
                "contract": { "x1": sol.contract.x1, "x2": sol.contract.x2 },
                "nodes": sol.node_reports.iter().map(|nr| json!({
                    "y1": nr.y1,
                    "action": action_name(nr.action),
                    "state": state_json(&nr.state),
                    "gap": nr.gap,
                    "spread": nr.spread,
                })).collect::<Vec<_>>(),
            }),
            Err(inf) => json!({
                "plan": plan_json(&inf.plan),
                "infeasible": { "node": inf.node, "reason": inf.reason },
            }),
        })
        .collect();
    let gap = first_period_gap(&prims, &report.best.contract)?;
    Ok(Output::new(json!({
        "no_intertemporal_arbitrage": no_intertemporal_arbitrage(&prims),
        "best": {
            "plan": plan_json(&report.best.plan),
            "profit": report.best.profit,
            "v1": report.best.v1,
            "contract": { "x1": report.best.contract.x1, "x2": report.best.contract.x2 },
            "first_period_gap": gap,
        },
        "plans": all,
    })))
}

fn cmd_capacity(cli: &Cli, dc: &config::DynamicConfig) -> Result<Output> {
    let prims = dc.to_primitives()?;
    let state = RobustnessState {
        m_high: prims.m,
        lambda: prims.lambda1,
    };
    let cap = incentive_capacity(&state, &prims)?;
    let mut payload = Map::new();
    payload.insert("state".into(), state_json(&state));
    payload.insert("capacity".into(), ext(cap.value));
    payload.insert("attained".into(), json!(cap.attained));
    payload.insert("spread".into(), cap.spread.map_or(Value::Null, |s| json!(s)));

    let mut tables = Vec::new();
    if let Some(spec) = &cli.grid {
        let grid = parse_grid(spec)?;
        if grid.name != "lambda" {
            bail!("capacity sweeps over lambda; got grid name {:?}", grid.name);
        }
        let mut rows = Vec::with_capacity(grid.values.len());
        let mut sweep = Vec::with_capacity(grid.values.len());
        for &l in &grid.values {
            let st = RobustnessState {
                m_high: prims.m,
                lambda: Intensity::from_raw(l)?,
            };
            let c = incentive_capacity(&st, &prims)?;
            rows.push(format!("{l},{},{}", c.value, c.attained));
            sweep.push(json!({ "lambda": l, "capacity": ext(c.value), "attained": c.attained }));
        }
        payload.insert("sweep".into(), Value::Array(sweep));
        tables.push(("capacity_sweep".to_string(), "lambda,capacity,attained".to_string(), rows));
    }
    Ok(Output {
        payload: Value::Object(payload),
        tables,
        infeasible: false,
    })
}

fn cmd_trap_check(dc: &config::DynamicConfig) -> Result<Output> {
    let prims = dc.to_primitives()?;
    let rep = trap_check(&prims)?;
    Ok(Output::new(json!({
        "lambda_star": rep.lambda_star,
        "lambda_success": rep.lambda_success,
        "lambda_failure": rep.lambda_failure,
        "post_success_state": state_json(&rep.post_success_state),
        "post_success_capacity": ext(rep.post_success_capacity),
        "trap": rep.trap,
        "threshold_relation": match rep.threshold_relation {
            roadmap_core::dynamics_state::ThresholdRelation::Above => "above",
            roadmap_core::dynamics_state::ThresholdRelation::Below => "below",
            roadmap_core::dynamics_state::ThresholdRelation::Boundary => "boundary",
        },
        "condition_forms_agree": rep.condition_forms_agree,
        "theta_l_bar": rep.theta_l_bar,
    })))
}

fn cmd_feedback(cli: &Cli, dc: &config::DynamicConfig) -> Result<Output> {
    let prims = dc.to_primitives()?;
    let rep = optimal_coarsening(&prims)?;
    let mut payload = Map::new();
    payload.insert("lambda_star".into(), json!(rep.lambda_star));
    payload.insert("lambda_success_raw".into(), json!(rep.lambda_success_raw));
    payload.insert("r_star".into(), json!(rep.r_star));
    payload.insert("lambda_at_r_star".into(), json!(rep.lambda_at_r_star));
    let star_state = feedback_state(&prims, rep.r_star)?;
    payload.insert("state_at_r_star".into(), state_json(&star_state));

    let mut tables = Vec::new();
    if let Some(spec) = &cli.grid {
        let grid = parse_grid(spec)?;
        if grid.name != "r" {
            bail!("feedback sweeps over r; got grid name {:?}", grid.name);
        }
        let mut rows = Vec::new();
        let mut sweep = Vec::new();
        for &r in &grid.values {
            let st = feedback_state(&prims, r)?;
            let cap = incentive_capacity(&st, &prims)?;
            let l = match st.lambda {
                Intensity::Zero => 0.0,
                Intensity::Finite(v) => v,
                Intensity::Infinite => f64::INFINITY,
            };
            rows.push(format!("{r},{l},{},{}", st.m_high, cap.value));
            sweep.push(json!({
                "r": r,
                "lambda_signal": l,
                "m_signal": st.m_high,
                "capacity": ext(cap.value),
            }));
        }
        payload.insert("sweep".into(), Value::Array(sweep));
        tables.push((
            "feedback_sweep".to_string(),
            "r,lambda_signal,m_signal,capacity".to_string(),
            rows,
        ));
    }
    Ok(Output {
        payload: Value::Object(payload),
        tables,
        infeasible: false,
    })
}

fn cmd_screen(cli: &Cli, sc: &config::ScreeningConfig) -> Result<Output> {
    let prims = sc.primitives.to_primitives()?;
    let menu = sc.menu();
    let cutoff = screening_cutoff(&prims, &menu, sc.gamma_lo, sc.gamma_hi)?;
    let d_at_cutoff = screening_diff(&prims, &menu, cutoff)?;
    let mut payload = Map::new();
    payload.insert("gamma_star".into(), json!(cutoff));
    payload.insert("d_at_cutoff".into(), json!(d_at_cutoff));

    let grid = match &cli.grid {
        Some(spec) => {
            let g = parse_grid(spec)?;
            if g.name != "gamma" {
                bail!("screening sweeps over gamma; got grid name {:?}", g.name);
            }
            g.values
        }
        None => {
            let step = (sc.gamma_hi - sc.gamma_lo) / 9.0;
            (0..10).map(|i| sc.gamma_lo + step * i as f64).collect()
        }
    };
    let mut rows = Vec::new();
    let mut sweep = Vec::new();
    for &g in &grid {
        let d = screening_diff(&prims, &menu, g)?;
        rows.push(format!("{g},{d}"));
        sweep.push(json!({ "gamma": g, "d": d }));
    }
    payload.insert("sweep".into(), Value::Array(sweep));
    Ok(Output {
        payload: Value::Object(payload),
        tables: vec![("screen_sweep".to_string(), "gamma,d".to_string(), rows)],
        infeasible: false,
    })
}

fn cmd_turnover(tc: &config::TurnoverConfig) -> Result<Output> {
    let prims = tc.primitives.to_primitives()?;
    let rep = turnover_analysis(&prims, tc.replacement_cost)?;
    Ok(Output::new(json!({
        "sandwich_holds": rep.sandwich_holds,
        "capacity_incumbent": ext(rep.capacity_incumbent),
        "capacity_new_agent": ext(rep.capacity_new_agent),
        "keep_profit": rep.keep_profit,
        "profit_slope": rep.profit_slope,
        "profit_at_configured_scale": rep
            .profit_slope
            .and_then(|_| turnover_profit_at(&rep, prims.a_scale)),
        "a_bar": rep.a_bar,
        "failure_action": rep.failure_action.map(action_name),
    })))
}

fn cmd_simulate(cli: &Cli, lc: &config::LongrunConfig) -> Result<Output> {
    let prims = lc.primitives.to_primitives()?;
    let process = lc.true_process.to_process();
    let rule = lc.rule.to_rule();
    let mut seeds = lc.seeds.clone();
    if let Some(s) = cli.seed {
        seeds.push(s);
    }
    if seeds.is_empty() {
        seeds.push(0);
    }
    let stride = lc.stride.max(1);
    let mut runs = Vec::new();
    let mut tables = Vec::new();
    for &seed in &seeds {
        let traj = simulate_path(&prims, &process, lc.policy, &rule, lc.horizon, seed)?;
        let mut rows = Vec::new();
        for s in traj.steps.iter().filter(|s| s.t % stride == 0 || s.t == lc.horizon) {
            rows.push(format!(
                "{},{},{},{},{},{}",
                s.t,
                action_name(s.action),
                s.outcome,
                s.m_high,
                s.lambda,
                s.alpha
            ));
        }
        tables.push((
            format!("trajectory_seed{seed}"),
            "t,action,outcome,posterior,lambda,alpha".to_string(),
            rows,
        ));
        runs.push(json!({
            "seed": seed,
            "final_alpha": traj.final_alpha,
            "final_lambda": traj.final_lambda,
            "final_m": traj.final_m,
            "n_innovate": traj.counts.innovations(),
            "n_safe": traj.counts.n[0][0] + traj.counts.n[0][1],
        }));
    }
    Ok(Output {
        payload: json!({ "policy": policy_name(lc.policy), "horizon": lc.horizon, "runs": runs }),
        tables,
        infeasible: false,
    })
}

fn policy_name(p: Policy) -> &'static str {
    match p {
        Policy::AlwaysSafe => "always-safe",
        Policy::AlwaysInnovate => "always-innovate",
        Policy::CapacityGated => "capacity-gated",
    }
}

fn cmd_speed_limit(cli: &Cli, lc: &config::LongrunConfig) -> Result<Output> {
    let prims = lc.primitives.to_primitives()?;
    let process = lc.true_process.to_process();
    let sl = speed_limit(&prims, &process)?;
    let mut payload = Map::new();
    payload.insert("d_star".into(), json!(sl.d_star));
    payload.insert("best_fit".into(), json!(sl.best_fit));
    payload.insert("lambda_bar_high".into(), json!(sl.lambda_bar_high));
    payload.insert("lambda_bar_low".into(), json!(sl.lambda_bar_low));
    payload.insert("alpha_star".into(), ext(sl.alpha_star));
    payload.insert("correctly_specified".into(), json!(sl.correctly_specified));

    let mut seeds = lc.seeds.clone();
    if let Some(s) = cli.seed {
        seeds.push(s);
    }
    let mut tables = Vec::new();
    if !seeds.is_empty() {
        let rule = lc.rule.to_rule();
        let rep = cycle_experiment(&prims, &process, lc.policy, &rule, lc.horizon, &seeds)?;
        let mut rows = Vec::new();
        for s in &rep.per_seed {
            rows.push(format!(
                "{},{},{},{},{},{}",
                s.seed, s.final_alpha, s.final_lambda, s.final_m, s.n_innovate, s.n_safe
            ));
        }
        payload.insert(
            "probe".into(),
            json!({
                "policy": policy_name(rep.policy),
                "horizon": lc.horizon,
                "max_final_alpha": rep.max_final_alpha,
                "per_seed": rep.per_seed.iter().map(|s| json!({
                    "seed": s.seed,
                    "final_alpha": s.final_alpha,
                    "final_lambda": s.final_lambda,
                    "final_m": s.final_m,
                    "n_innovate": s.n_innovate,
                    "n_safe": s.n_safe,
                })).collect::<Vec<_>>(),
            }),
        );
        tables.push((
            "speed_limit_probe".to_string(),
            "seed,final_alpha,final_lambda,final_m,n_innovate,n_safe".to_string(),
            rows,
        ));
    }
    Ok(Output {
        payload: Value::Object(payload),
        tables,
        infeasible: false,
    })
}

fn cmd_bridge_check(bc: &config::BridgeConfig) -> Result<Output> {
    let prims = bc.primitives.to_primitives()?;
    let process = bc.true_process.to_process();
    let rule = bc.rule.to_rule();
    let contract = bc.contract.to_contract();
    let sl = speed_limit(&prims, &process)?;
    let lambda_inf = Intensity::from_raw(sl.d_star / prims.gamma)?;
    let m_inf = if sl.best_fit == vec!["high".to_string()] {
        1.0
    } else if sl.best_fit == vec!["low".to_string()] {
        0.0
    } else {
        prims.m
    };
    let mut roots = Vec::new();
    let mut rows = Vec::new();
    let mut prev_gap: Option<f64> = None;
    let mut decreasing = true;
    for &t in &bc.roots {
        if t == 0 {
            bail!("roots must be at least 1");
        }
        let traj = simulate_path(
            &prims,
            &process,
            Policy::AlwaysInnovate,
            &rule,
            t,
            bc.seed,
        )?;
        let root_t = t + 1;
        let horizon = root_t + bc.depth;
        let w = value_recursion(&prims, &rule, &contract, &traj.counts, root_t, horizon, bc.delta)?;
        let w_inf = limit_recursion(&prims, m_inf, lambda_inf, &contract, root_t, horizon, bc.delta)?;
        let gap = (w.w_root - w_inf.w_root).abs();
        if let Some(p) = prev_gap {
            if gap > p {
                decreasing = false;
            }
        }
        prev_gap = Some(gap);
        rows.push(format!("{t},{},{},{gap},{}", w.w_root, w_inf.w_root, w.truncation_bound));
        roots.push(json!({
            "t": t,
            "w": w.w_root,
            "w_limit": w_inf.w_root,
            "gap": gap,
            "truncation_bound": w.truncation_bound,
            "value_bound": w.value_bound,
        }));
    }
    Ok(Output {
        payload: json!({
            "m_inf": m_inf,
            "lambda_inf": lam(lambda_inf),
            "delta": bc.delta,
            "depth": bc.depth,
            "roots": roots,
            "gaps_decreasing": decreasing,
        }),
        tables: vec![(
            "bridge_check".to_string(),
            "t,w,w_limit,gap,truncation_bound".to_string(),
            rows,
        )],
        infeasible: false,
    })
}

fn cmd_design(dc: &config::DesignConfig) -> Result<Output> {
    let prob = dc.to_problem();
    match design_roadmap(&prob) {
        Ok(sol) => Ok(Output::new(json!({
            "x": sol.x,
            "mu": sol.mu,
            "eta": sol.eta,
            "beta": sol.beta,
            "objective": sol.objective,
            "iterations": sol.iterations,
            "converged": sol.converged,
            "kkt": {
                "stationarity": sol.kkt.stationarity,
                "primal": sol.kkt.primal,
                "complementary": sol.kkt.complementary,
            },
        }))),
        Err(CoreError::Infeasible(_)) => Ok(Output {
            payload: json!({ "infeasible": true }),
            tables: Vec::new(),
            infeasible: true,
        }),
        Err(e) => Err(e.into()),
    }
}

fn cmd_milestones(mc: &config::MilestonesConfig) -> Result<Output> {
    let prims = mc.to_primitives();
    let lambda = mc.lambda.to_intensity()?;
    let cap = milestone_capacity(&prims, mc.m_high, lambda)?;
    let diag = match lambda {
        Intensity::Finite(l) => Some(diagnostic_condition(&prims, mc.m_high, l)?),
        _ => None,
    };
    Ok(Output::new(json!({
        "capacity": ext(cap),
        "implementable": cap >= prims.k,
        "diagnostic": diag.map(|d| json!({ "margin": d.margin, "t_bound": d.t_bound })),
    })))
}

fn cmd_shirking(sc: &config::ShirkingConfig) -> Result<Output> {
    let sp = sc.to_primitives();
    let lambda = sc.lambda.to_intensity()?;
    let rep = shirking_capacity(&sp, sc.m_high, lambda)?;
    let two = two_action_margin(&sp, sc.m_high, lambda)?;
    Ok(Output::new(json!({
        "value": ext(rep.value),
        "verdict": rep.verdict,
        "two_action_margin": ext(two),
    })))
}
