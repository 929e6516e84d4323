use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ffnet::export::{self, write_atomic};
use ffnet::generate::{self, GenerateError, GenerateParams};
use ffnet::scenario::ScenarioError;
use ffnet::sim::{self, SimError};
use ffnet::{formation, svg, Metrics, Scenario, ScenarioFile};

use crate::{GenerateArgs, SimulateArgs};

fn load(path: &Path) -> Result<Scenario> {
    let file = ScenarioFile::load(path)?;
    Ok(file.into_scenario()?)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn build_graph(scenario: &Path, out_dir: &Path) -> Result<()> {
    let s = load(scenario)?;
    let graph = formation::build_actual(&s.formation).map_err(SimError::from)?;
    let positions = s.formation.positions();
    write(out_dir, "graph.json", &export::to_json(&export::graph_dump(&graph, positions)))?;
    write(out_dir, "graph.svg", &svg::graph_svg(&graph, positions, Some(&s.targets)))?;
    println!(
        "N={} N_B={} N_L={} M={} |V_c|={} |V_u|={}",
        graph.agent_count(),
        graph.boundary_count(),
        graph.leading_simplices,
        graph.depth(),
        graph.cooperative_count(),
        graph.uncooperative_count()
    );
    Ok(())
}

fn write_plan(s: &Scenario, plan: &sim::Plan, out_dir: &Path) -> Result<()> {
    let positions = s.formation.positions();
    write(out_dir, "graph.json", &export::to_json(&export::graph_dump(&plan.graph, positions)))?;
    write(out_dir, "plan.json", &export::to_json(&export::plan_dump(plan, positions)))?;
    write(out_dir, "graph.svg", &svg::graph_svg(&plan.graph, positions, Some(&s.targets)))?;
    Ok(())
}

fn print_plan(s: &Scenario, plan: &sim::Plan) {
    let g = &plan.graph;
    println!(
        "planned {} agents in {} layers; core {}; {} samples, {} uncaptured; empty capture: {:?}",
        g.agent_count(),
        g.depth(),
        g.core_id,
        s.targets.samples.len(),
        plan.desired.uncaptured_samples(s.targets.samples.len()),
        ids(&plan.desired.empty_capture)
    );
}

fn ids(list: &[ffnet::AgentId]) -> Vec<u32> {
    list.iter().map(|id| id.0).collect()
}

pub fn plan(scenario: &Path, out_dir: &Path) -> Result<()> {
    let s = load(scenario)?;
    let plan = sim::plan(&s)?;
    write_plan(&s, &plan, out_dir)?;
    print_plan(&s, &plan);
    Ok(())
}

pub fn simulate(args: &SimulateArgs, out_dir: &Path) -> Result<()> {
    let mut s = load(&args.scenario)?;
    if let Some(dt) = args.dt {
        s.times.dt = dt;
    }
    if let Some(m) = args.margin {
        s.margin = m;
    }
    if let Some(t) = &args.snapshot_times {
        s.snapshot_times = t.clone();
    }
    s.leader_blend |= args.leader_blend;
    s.validate()?;

    let plan = sim::plan(&s)?;
    write_plan(&s, &plan, out_dir)?;
    if args.dry_run {
        print_plan(&s, &plan);
        return Ok(());
    }

    let trace = sim::run_plan(&s, &plan)?;
    let setpoints = sim::setpoint_series(&plan, &trace.times)?;
    let tracking = sim::tracking_error_report(&trace, &setpoints)?;
    let metrics = Metrics::new(&s, &plan, &trace);
    write(out_dir, "trace.csv", &export::trace_csv(&trace))?;
    write(out_dir, "setpoints.csv", &export::setpoints_csv(&setpoints))?;
    write(out_dir, "tracking.csv", &export::tracking_csv(&tracking))?;
    write(out_dir, "metrics.json", &export::metrics_json(&metrics))?;
    for t in &s.snapshot_times {
        let k = trace.sample_near(*t);
        let text = svg::snapshot_svg(&trace, k, &plan.graph, &s.targets, s.margin);
        write(out_dir, &format!("snapshot_{t}s.svg"), &text)?;
    }
    println!(
        "convergence rate {:.4} ({}/{}); unconverged {:?}; excluded {:?}; wrote {}",
        metrics.convergence_rate,
        metrics.converged,
        metrics.evaluated,
        ids(&metrics.unconverged_ids),
        ids(&metrics.excluded_ids),
        out_dir.display()
    );
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let mut params = GenerateParams {
        agents: args.agents,
        boundary: args.boundary,
        dim: args.dim,
        seed: args.seed,
        radius: args.radius,
        sample_density: args.sample_density,
        core_id: args.core_id,
        ..GenerateParams::default()
    };
    if let Some(k) = args.uncooperative {
        params.uncooperative = k;
    }
    if let Some(f) = args.uncooperative_fraction {
        if !(0.0..1.0).contains(&f) {
            bail!(GenerateError::InfeasibleParams(format!("uncooperative fraction {f} outside [0, 1)")));
        }
        params = params.with_uncooperative_fraction(f);
    }
    let text = generate::generate(&params)?.to_toml();
    match &args.output {
        Some(path) => {
            write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn report(path: &Path, json: bool) -> Result<()> {
    let file = if path.is_dir() { path.join("metrics.json") } else { path.to_path_buf() };
    let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let m: Metrics = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
    if json {
        print!("{}", export::metrics_json(&m));
        return Ok(());
    }
    println!("agents              {}", m.agents);
    println!("boundary leaders    {}", m.boundary);
    println!("leading simplices   {}", m.leading_simplices);
    println!("layers              {}", m.depth);
    println!("cooperative         {}", m.cooperative);
    println!("uncooperative       {}", m.uncooperative);
    println!("core                {}", m.core);
    println!("convergence rate    {:.4} ({}/{}) at t = {} s, margin {}", m.convergence_rate, m.converged, m.evaluated, m.t_end, m.margin);
    println!("unconverged         {:?}", ids(&m.unconverged_ids));
    println!("excluded            {:?}", ids(&m.excluded_ids));
    println!("max terminal error  {:.3e}", m.max_terminal_error);
    println!("empty capture       {:?}", ids(&m.empty_capture_ids));
    println!("uncaptured samples  {}", m.uncaptured_samples);
    Ok(())
}

fn kind(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<ScenarioError>() {
        return match e {
            ScenarioError::Parse { .. } => "parse",
            ScenarioError::BadRole { .. } => "bad_role",
            ScenarioError::Invalid(_) => "invalid_scenario",
            ScenarioError::Graph(_) => "build_failure",
            ScenarioError::Target(_) => "target",
            ScenarioError::Sim(_) => "invalid_scenario",
            ScenarioError::Io { .. } => "io",
        };
    }
    if let Some(e) = err.downcast_ref::<SimError>() {
        return match e {
            SimError::Invalid(_) => "invalid_scenario",
            SimError::BuildFailure(_) => "build_failure",
            SimError::Target(_) => "target",
            SimError::Weight(_) => "weight",
            SimError::Setpoint(_) => "setpoint",
            SimError::Diverged { .. } => "diverged",
            SimError::GridMismatch(_) => "grid_mismatch",
        };
    }
    if err.downcast_ref::<GenerateError>().is_some() {
        return "infeasible_params";
    }
    if err.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some()) {
        return "io";
    }
    "error"
}

/// One-line JSON error record for stderr.
pub fn error_record(err: &anyhow::Error) -> String {
    let mut record = serde_json::json!({
        "error": kind(err),
        "message": format!("{err:#}"),
    });
    if let Some(ScenarioError::Parse { line: Some(l), .. }) = err.downcast_ref::<ScenarioError>() {
        record["line"] = serde_json::json!(l);
    }
    if let Some(ScenarioError::BadRole { agent, .. }) = err.downcast_ref::<ScenarioError>() {
        record["agent"] = serde_json::json!(agent.0);
    }
    record.to_string()
}
