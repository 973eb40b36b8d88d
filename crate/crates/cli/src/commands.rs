use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};

use tpop_core::analytics::{
    criterion_breakdown, expected_edges, grid, optimal_honest_edge_points, platoon_expected_edges,
    theoretical_surfaces, Density, Mix, ModelParams,
};
use tpop_core::report::{
    create_file, read_grid_column, write_json, write_sweep_csv, write_surface_csv, write_uniqueness_csv, GridValue,
    Metadata,
};
use tpop_core::simulator::{sweep as run_sweep, uniqueness_experiment, SweepConfig, UniquenessConfig};
use tpop_core::{AgentState, Environment, ThetaParams};

use crate::config::CliError;
use crate::Global;

/// Accepts `t=..,h=..,w=..` or a scenario name `theta1`..`theta4`.
fn parse_theta(raw: Option<&str>) -> Result<ThetaParams, CliError> {
    let raw = raw.ok_or_else(|| CliError::Validation("missing --theta".into()))?;
    let lower = raw.trim().to_ascii_lowercase();
    if let Some(n) = lower.strip_prefix("theta") {
        return n
            .parse()
            .ok()
            .and_then(ThetaParams::scenario)
            .ok_or_else(|| CliError::Validation(format!("unknown scenario `{raw}`")));
    }
    Ok(raw.parse()?)
}

fn parse_env(raw: &str, r: f64, agents: usize) -> Result<Environment, CliError> {
    let bad = || CliError::Validation(format!("--env expects WIDTHxHEIGHT, got `{raw}`"));
    let (w, h) = raw.split_once(['x', 'X']).ok_or_else(bad)?;
    let width: f64 = w.trim().parse().map_err(|_| bad())?;
    let height: f64 = h.trim().parse().map_err(|_| bad())?;
    Ok(Environment::new(width, height, r, agents)?)
}

fn config_echo<T: Serialize>(global: &Global, args: &T) -> String {
    let mut value = serde_json::to_value(args).unwrap_or_default();
    if let Some(map) = value.as_object_mut() {
        map.insert("seed".into(), global.seed.into());
    }
    value.to_string()
}

fn output(global: &Global, name: &str) -> PathBuf {
    global.out.join(name)
}

fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut fs::File) -> tpop_core::Result<()>,
{
    let mut file = create_file(path)?.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    f(&mut file)?;
    info!("wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Operating conditions, `t=<real>,h=<int>,w=<int>[,<int>...]` or `theta1`..`theta4`.
    #[arg(long)]
    pub theta: Option<String>,
    /// Environment size, `WIDTHxHEIGHT`.
    #[arg(long, default_value = "10x10")]
    pub env: String,
    #[arg(long, default_value_t = 350)]
    pub agents: usize,
    /// Range of sight.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Repetitions per grid cell; every agent proves once per repetition.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
}

pub fn sweep(global: &Global, args: &SweepArgs) -> Result<(), CliError> {
    let config = SweepConfig {
        env: parse_env(&args.env, args.r, args.agents)?,
        theta: parse_theta(args.theta.as_deref())?,
        grid_step: args.grid_step,
        runs_per_agent: args.runs,
        seed: global.seed,
    };
    config.validate()?;
    info!("sweep {} over {} agents", config.theta, config.env.agent_count);
    let result = run_sweep(&config, None)?;
    let meta = Metadata::new("sweep")
        .with("config", config_echo(global, args))
        .with("theta", &config.theta)
        .with("seed", global.seed)
        .with("population", "regenerated per repetition")
        .with("total_runs", result.total_runs());
    write_with(&output(global, "sweep.csv"), |f| write_sweep_csv(f, &result, &meta))?;
    write_with(&output(global, "sweep.json"), |f| write_json(f, &result, &meta))?;
    println!("{} runs over {} cells", result.total_runs(), result.cells.len());
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// Assume criteria 2 and 3 always hold.
    #[arg(long)]
    pub infinite_density: bool,
    /// Agents per unit area, for a finite-density model.
    #[arg(long, conflicts_with = "infinite_density")]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Write only the expected-edge grid.
    #[arg(long)]
    pub edges: bool,
}

#[derive(Serialize)]
struct CellBreakdown {
    p_h: f64,
    p_c: f64,
    tp: f64,
    tn: f64,
    expected_edges: f64,
    states: BTreeMap<String, tpop_core::analytics::CriterionBreakdown>,
}

pub fn model(global: &Global, args: &ModelArgs) -> Result<(), CliError> {
    let theta = parse_theta(args.theta.as_deref())?;
    let axis = grid(args.grid_step)?;
    let meta = |kind: &str| {
        Metadata::new("model")
            .with("config", config_echo(global, args))
            .with("theta", &theta)
            .with("surface", kind)
    };
    let edge_rows: Vec<(f64, f64, f64)> = axis
        .iter()
        .flat_map(|&p_h| axis.iter().map(move |&p_c| (p_h, p_c)))
        .map(|(p_h, p_c)| (p_h, p_c, expected_edges(&theta, Mix { p_h, p_c })))
        .collect();
    write_with(&output(global, "model_edges.csv"), |f| write_surface_csv(f, edge_rows.iter().copied(), &meta("expected_edges")))?;
    if args.edges {
        return Ok(());
    }

    let density = match (args.infinite_density, args.mu) {
        (true, _) => Density::Infinite,
        (false, Some(mu)) => Density::finite(mu, args.r)?,
        (false, None) => return Err(CliError::Validation("pass --infinite-density or --mu".into())),
    };
    let surfaces = theoretical_surfaces(&theta, args.grid_step, density)?;
    let tp = surfaces.points.iter().map(|p| (p.p_h, p.p_c, p.tp));
    let tn = surfaces.points.iter().map(|p| (p.p_h, p.p_c, p.tn));
    write_with(&output(global, "model_tp.csv"), |f| write_surface_csv(f, tp, &meta("tp")))?;
    write_with(&output(global, "model_tn.csv"), |f| write_surface_csv(f, tn, &meta("tn")))?;

    let cells = surfaces
        .points
        .iter()
        .zip(&edge_rows)
        .map(|(pt, &(_, _, edges))| {
            let model = ModelParams::new(pt.p_h, pt.p_c, theta.clone(), density)?;
            let states = [AgentState::S1, AgentState::S3, AgentState::S4, AgentState::S5]
                .into_iter()
                .map(|s| Ok((s.to_string(), criterion_breakdown(s, &model)?)))
                .collect::<tpop_core::Result<BTreeMap<_, _>>>()?;
            Ok(CellBreakdown { p_h: pt.p_h, p_c: pt.p_c, tp: pt.tp, tn: pt.tn, expected_edges: edges, states })
        })
        .collect::<tpop_core::Result<Vec<_>>>()?;
    write_with(&output(global, "model.json"), |f| write_json(f, &cells, &meta("breakdown")))?;
    println!("model surfaces for {theta} on {} cells", surfaces.points.len());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tp,
    Tn,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    /// Simulated surface (sweep CSV).
    #[arg(long)]
    pub sim: Option<PathBuf>,
    /// Model surface (surface CSV, probabilities).
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Metric::Tp)]
    pub metric: Metric,
    /// Largest allowed absolute deviation, in percentage points.
    #[arg(long, default_value_t = 5.0)]
    pub tolerance: f64,
    /// Only compare cells with 0.1 <= p_h <= 0.9.
    #[arg(long)]
    pub interior: bool,
}

/// Reads `<metric>_pct`, or `value` scaled to percent.
fn load_percent(path: &Path, metric: Metric) -> Result<Vec<GridValue>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let column = match metric {
        Metric::Tp => "tp_pct",
        Metric::Tn => "tn_pct",
    };
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap_or("");
    let has = |name: &str| header.split(',').any(|h| h.trim() == name);
    let (name, scale) = if has(column) {
        (column, 1.0)
    } else if has("value") {
        ("value", 100.0)
    } else {
        return Err(CliError::Validation(format!("{}: no `{column}` or `value` column", path.display())));
    };
    let values = read_grid_column(text.as_bytes(), name)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(values.into_iter().map(|v| GridValue { value: v.value.map(|x| x * scale), ..v }).collect())
}

fn key(v: &GridValue) -> (i64, i64) {
    ((v.p_h * 1e6).round() as i64, (v.p_c * 1e6).round() as i64)
}

#[derive(Debug, Serialize)]
pub struct Deviation {
    pub p_h: f64,
    pub p_c: f64,
    pub sim: f64,
    pub model: f64,
    pub abs: f64,
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let sim_path = args.sim.as_deref().ok_or_else(|| CliError::Validation("missing --sim".into()))?;
    let model_path = args.model.as_deref().ok_or_else(|| CliError::Validation("missing --model".into()))?;
    if args.tolerance.is_nan() || args.tolerance < 0.0 {
        return Err(CliError::Validation("--tolerance must be non-negative".into()));
    }
    let sim = load_percent(sim_path, args.metric)?;
    let model: BTreeMap<_, _> = load_percent(model_path, args.metric)?.into_iter().map(|v| (key(&v), v)).collect();
    if sim.len() != model.len() || sim.iter().any(|v| !model.contains_key(&key(v))) {
        return Err(CliError::Validation("the two files cover different grids".into()));
    }
    let mut deviations = Vec::new();
    let mut skipped = 0usize;
    for s in &sim {
        if args.interior && !(s.p_h >= 0.1 - 1e-9 && s.p_h <= 0.9 + 1e-9) {
            continue;
        }
        match (s.value, model[&key(s)].value) {
            (Some(a), Some(b)) => deviations.push(Deviation { p_h: s.p_h, p_c: s.p_c, sim: a, model: b, abs: (a - b).abs() }),
            _ => skipped += 1,
        }
    }
    if deviations.is_empty() {
        return Err(CliError::Validation("no comparable cells".into()));
    }
    let worst = deviations.iter().max_by(|a, b| a.abs.total_cmp(&b.abs)).expect("non-empty");
    let mean = deviations.iter().map(|d| d.abs).sum::<f64>() / deviations.len() as f64;
    println!("cells compared: {} (skipped {skipped})", deviations.len());
    println!("max deviation: {:.3} pp at p_h={}, p_c={}", worst.abs, worst.p_h, worst.p_c);
    println!("mean deviation: {mean:.3} pp");
    let failing: Vec<_> = deviations.iter().filter(|d| d.abs > args.tolerance).collect();
    for d in &failing {
        println!("FAIL p_h={} p_c={}: sim {:.3} model {:.3} (|d| = {:.3} pp)", d.p_h, d.p_c, d.sim, d.model, d.abs);
    }
    if failing.is_empty() {
        println!("PASS (tolerance {} pp)", args.tolerance);
        Ok(())
    } else {
        println!("{} cells exceed {} pp", failing.len(), args.tolerance);
        Err(CliError::CompareFailed)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PlatoonArgs {
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
}

pub fn platoon(global: &Global, args: &PlatoonArgs) -> Result<(), CliError> {
    let theta = parse_theta(args.theta.as_deref())?;
    let axis = grid(args.grid_step)?;
    let rows: Vec<(f64, f64, f64)> = axis
        .iter()
        .flat_map(|&p_h| axis.iter().map(move |&p_c| (p_h, p_c)))
        .map(|(p_h, p_c)| (p_h, p_c, platoon_expected_edges(&theta, Mix { p_h, p_c })))
        .collect();
    let meta = Metadata::new("platoon").with("config", config_echo(global, args)).with("theta", &theta);
    write_with(&output(global, "platoon_edges.csv"), |f| write_surface_csv(f, rows.iter().copied(), &meta))?;
    let optima = optimal_honest_edge_points();
    write_with(&output(global, "platoon_optima.json"), |f| write_json(f, &optima, &meta))?;
    println!("edge   p_h   p_c");
    for p in &optima {
        println!("m{}{}   {:.2}  {:.2}", p.parent.number(), p.child.number(), p.p_h, p.p_c);
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct UniquenessArgs {
    /// Population sizes; default 12 log-spaced values from 200 to 10000.
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.1)]
    pub r: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trees: usize,
    #[arg(long, default_value = "t=1,h=2,w=2,2")]
    pub theta: Option<String>,
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<usize> {
    (0..count)
        .map(|i| (lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).round() as usize)
        .collect()
}

pub fn uniqueness(global: &Global, args: &UniquenessArgs) -> Result<(), CliError> {
    let theta = parse_theta(args.theta.as_deref())?;
    let n_values = args.n_values.clone().unwrap_or_else(|| log_spaced(200.0, 10_000.0, 12));
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(CliError::Validation("--n-values must be positive".into()));
    }
    let config = UniquenessConfig { n_values, r: args.r, trees_per_n: args.trees, theta, seed: global.seed };
    let rows = uniqueness_experiment(&config, None)?;
    let meta = Metadata::new("uniqueness")
        .with("config", config_echo(global, args))
        .with("theta", &config.theta)
        .with("mean_degree", "(N-1)(pi r^2 - 8 r^3 / 3 + r^4 / 2)");
    write_with(&output(global, "uniqueness.csv"), |f| write_uniqueness_csv(f, &rows, &meta))?;
    for row in &rows {
        let theory = row.theory.map(|t| format!("{t:.4}")).unwrap_or_else(|| "-".into());
        println!("N={:>6}  empirical {:.4}  theory {theory}", row.n_agents, row.fraction_unique);
    }
    Ok(())
}
