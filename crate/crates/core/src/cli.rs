//! Command-line front end.

use crate::error::{Error, Result};
use crate::fitting::{fit_mle, model_comparison, Family, FitConfig, FitResult};
use crate::graph::{Graph, GraphSpace};
use crate::io::{load_graphset, load_observations, write_graphset};
use crate::models::{BernoulliParams, BetaBernoulliParams, Model, UmanParams};
use crate::netinf::{
    posterior_gibbs, run_experiment, write_experiment_csv, BetaPrior, ErrorModel, ExperimentDesign,
    GibbsConfig, GraphPrior, Pooling,
};
use crate::oracle::{exact_distribution, exact_posterior};
use crate::rng::RngSeed;
use crate::samplers::{run_contagion, sample_beta_bernoulli, sample_cug, sample_model};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "graphmix", version, about = "Beta and Dirichlet mixtures of random graphs", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Root seed. Drawn from system entropy and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Flag values as `key=value` lines or a JSON object; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw graphs from a family and write a graph-set file.
    Simulate(SimulateArgs),
    /// Run the contagious tie-formation dynamics and write its trace.
    Contagion(ContagionArgs),
    /// Maximum-likelihood fit of one or more families to a graph-set file.
    Fit(FitArgs),
    /// Posterior inference of a graph from an observation file.
    Infer(InferArgs),
    /// Run a network-inference experiment design.
    Experiment(ExperimentArgs),
    /// Dump an exact distribution or posterior by enumeration.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct SpaceArgs {
    #[arg(long)]
    n_vertices: usize,
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = clap::ArgAction::Set)]
    directed: bool,
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = clap::ArgAction::Set)]
    loops: bool,
}

impl SpaceArgs {
    fn space(&self) -> GraphSpace {
        GraphSpace::new(self.n_vertices, self.directed, self.loops)
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// bernoulli, cug, uman, beta-bernoulli, dirichlet-categorical,
    /// beta-bernoulli-meandeg or dc-nnd.
    #[arg(long)]
    family: String,
    /// Comma-separated parameters in the family's order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    params: Vec<f64>,
}

impl ModelArgs {
    fn model(&self) -> Result<Model> {
        let p = &self.params;
        let want = |k: usize| -> Result<()> {
            if p.len() == k {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{} takes {k} parameters, got {}",
                    self.family,
                    p.len()
                )))
            }
        };
        match self.family.as_str() {
            "cug" => {
                want(1)?;
                if p[0] < 0.0 || p[0].fract() != 0.0 {
                    return Err(Error::Domain(format!("cug edge count must be a whole number, got {}", p[0])));
                }
                Ok(Model::Cug { edges: p[0] as usize })
            }
            "uman" => {
                want(3)?;
                Ok(Model::Uman(UmanParams::new(p[0], p[1], p[2])?))
            }
            name => {
                let family: Family = name.parse()?;
                want(family.n_params())?;
                let model = family.model(p)?;
                if let Model::Bernoulli(b) = model {
                    BernoulliParams::new(b.delta)?;
                }
                Ok(model)
            }
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 1)]
    n_graphs: usize,
}

#[derive(Debug, Args)]
struct ContagionArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    n_vertices: usize,
    #[arg(long)]
    rounds: u64,
    #[arg(long, default_value_t = 1)]
    thin: u64,
    /// exact, empty, or density=x for a uniform graph with round(x e*) edges.
    #[arg(long, default_value = "empty")]
    init: String,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    /// Graph-set JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Families to fit, comma-separated.
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    /// Restrict to the region where the offset approximation applies.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = clap::ArgAction::Set)]
    approx: bool,
    /// Fit several families and rank them by AIC.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = clap::ArgAction::Set)]
    compare: bool,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PoolingArg {
    Global,
    PerSource,
}

#[derive(Debug, Args)]
struct InferArgs {
    #[command(flatten)]
    common: Common,
    /// Observation JSON file.
    #[arg(long)]
    input: PathBuf,
    /// e.g. bernoulli:0.05, beta-bernoulli:0.5,0.5, dirichlet-categorical:1,1,1
    #[arg(long)]
    prior: GraphPrior,
    #[arg(long, default_value_t = 3)]
    chains: usize,
    #[arg(long, default_value_t = 100)]
    burnin: usize,
    /// Retained draws per chain.
    #[arg(long, default_value_t = 100)]
    draws: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// Known rates `fp,fn`; disables the rate updates.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    fix_error_rates: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "global")]
    pooling: PoolingArg,
    /// Beta prior `a,b` on the false-positive rate.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 11.0])]
    fp_prior: Vec<f64>,
    /// Beta prior `a,b` on the false-negative rate.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 11.0])]
    fn_prior: Vec<f64>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    /// Experiment design JSON file.
    #[arg(long)]
    design: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    space: SpaceArgs,
    /// Observation file; the posterior is dumped instead of the prior.
    #[arg(long)]
    observations: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    fp: f64,
    #[arg(long = "fn", default_value_t = 0.5)]
    fn_rate: f64,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    /// Numerical failure, with the reason.
    Numerical(String),
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ImpossibleObservation { .. }
        | Error::ZeroStatistic { .. }
        | Error::InvalidDispersion { .. }
        | Error::EmptyDraws
        | Error::InsufficientChains(_)
        | Error::ConstraintViolation(_) => 2,
        _ => 1,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match with_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(Status::Ok) => 0,
        Ok(Status::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("GRAPHMIX_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, in which case it is kept.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Splices flags read from `--config` in right after the subcommand name,
/// so that flags given explicitly override them.
fn with_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (k, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(k + 1).map(PathBuf::from);
        } else if let Some(rest) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(rest));
        }
    }
    let Some(path) = path else { return Ok(args) };
    let Some(sub) = args.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(args);
    };
    let flags = config_flags(&std::fs::read_to_string(&path)?)?;
    let at = sub + 2;
    args.splice(at..at, flags.into_iter().map(OsString::from));
    Ok(args)
}

fn config_flags(text: &str) -> Result<Vec<String>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("config JSON must be an object".into()))?;
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                    .collect::<Vec<_>>()
                    .join(","),
                other => other.to_string(),
            };
            pairs.push((k.clone(), s));
        }
    } else {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    pairs
        .into_iter()
        .map(|(k, v)| {
            let key = k.replace('_', "-");
            if key == "config" {
                Err(Error::Parse("config files cannot include other config files".into()))
            } else {
                Ok(format!("--{key}={v}"))
            }
        })
        .collect()
}

fn seed_or_entropy(c: &Common) -> RngSeed {
    c.seed.map(RngSeed).unwrap_or_else(|| {
        let s = RngSeed::from_entropy();
        eprintln!("seed: {}", s.0);
        s
    })
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_file(p, bytes),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Contagion(a) => contagion(a),
        Command::Fit(a) => fit(a),
        Command::Infer(a) => infer(a),
        Command::Experiment(a) => experiment(a),
        Command::Oracle(a) => oracle(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<Status> {
    let model = a.model.model()?;
    let space = a.space.space();
    if a.n_graphs == 0 {
        return Err(Error::Domain("n-graphs must be at least 1".into()));
    }
    let mut rng = seed_or_entropy(&a.common).rng();
    let graphs = (0..a.n_graphs)
        .map(|_| sample_model(space, &model, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_graphset(&graphs, &mut buf)?;
    emit(&a.common.out, &buf)?;
    Ok(Status::Ok)
}

fn contagion(a: ContagionArgs) -> Result<Status> {
    let p = BetaBernoulliParams::new(a.alpha, a.beta)?;
    let space = GraphSpace::directed(a.n_vertices);
    let mut rng = seed_or_entropy(&a.common).rng();
    let y0 = match a.init.as_str() {
        "empty" => Graph::empty(space),
        "exact" => sample_beta_bernoulli(space, p, &mut rng)?.0,
        other => {
            let x: f64 = other
                .strip_prefix("density=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("--init must be exact, empty or density=x, got '{other}'")))?;
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Domain(format!("initial density must lie in [0, 1], got {x}")));
            }
            let edges = (x * space.edge_vars() as f64).round() as usize;
            sample_cug(space, edges, &mut rng)?
        }
    };
    let trace = run_contagion(&y0, p, a.rounds, a.thin, &mut rng)?;
    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    emit(&a.common.out, &buf)?;
    Ok(Status::Ok)
}

fn fit_problems(fits: &[FitResult]) -> Option<String> {
    let bad: Vec<String> = fits
        .iter()
        .filter(|f| !f.converged)
        .map(|f| {
            let why = if f.flags.is_empty() {
                "not converged".to_string()
            } else {
                f.flags.join("; ")
            };
            format!("{}: {why}", f.family)
        })
        .collect();
    (!bad.is_empty()).then(|| bad.join("\n"))
}

fn fit(a: FitArgs) -> Result<Status> {
    let gs = load_graphset(&a.input)?;
    let cfg = FitConfig {
        max_iter: a.max_iter,
        approx: a.approx,
        ..FitConfig::default()
    };
    let mut buf = Vec::new();
    let fits = if a.compare {
        let families = if a.family.is_empty() {
            let mut f = vec![Family::Bernoulli, Family::BetaBernoulli];
            if gs.directed() && !gs.loops() {
                f.push(Family::DirichletCategorical);
            }
            f
        } else {
            a.family.clone()
        };
        let fits = families
            .iter()
            .map(|&f| fit_mle(&gs, f, &cfg))
            .collect::<Result<Vec<_>>>()?;
        let table = model_comparison(&fits)?;
        serde_json::to_writer_pretty(&mut buf, &serde_json::json!({ "fits": fits, "comparison": table }))?;
        fits
    } else {
        let family = match a.family.as_slice() {
            [f] => *f,
            [] => return Err(Error::Domain("--family is required".into())),
            _ => return Err(Error::Domain("give one --family, or use --compare".into())),
        };
        let fit = fit_mle(&gs, family, &cfg)?;
        serde_json::to_writer_pretty(&mut buf, &fit)?;
        vec![fit]
    };
    buf.push(b'\n');
    emit(&a.common.out, &buf)?;
    Ok(fit_problems(&fits).map_or(Status::Ok, Status::Numerical))
}

fn beta_prior(v: &[f64]) -> BetaPrior {
    BetaPrior { a: v[0], b: v[1] }
}

fn infer(a: InferArgs) -> Result<Status> {
    let obs = load_observations(&a.input)?;
    let em = ErrorModel {
        fp_prior: beta_prior(&a.fp_prior),
        fn_prior: beta_prior(&a.fn_prior),
        pooling: match a.pooling {
            PoolingArg::Global => Pooling::Global,
            PoolingArg::PerSource => Pooling::PerSource,
        },
        fixed_rates: a.fix_error_rates.as_ref().map(|v| (v[0], v[1])),
    };
    let cfg = GibbsConfig {
        chains: a.chains,
        burn_in: a.burnin,
        draws: a.draws,
        thin: a.thin,
    };
    let mut rng = seed_or_entropy(&a.common).rng();
    let draws = posterior_gibbs(&obs, a.prior, em, cfg, &mut rng)?;
    let est = draws.point_estimate()?;
    let (fp, fnr) = draws.mean_rates()?;
    let marginals: Vec<serde_json::Value> = obs
        .space()
        .edge_var_list()
        .into_iter()
        .zip(draws.marginals()?)
        .map(|((i, j), p)| serde_json::json!([i + 1, j + 1, p]))
        .collect();
    let finite = |r: Result<f64>| r.ok().filter(|v| v.is_finite());
    let summary = serde_json::json!({
        "prior": a.prior.to_string(),
        "chains": cfg.chains,
        "burn_in": cfg.burn_in,
        "draws_per_chain": cfg.draws,
        "thin": cfg.thin,
        "inferred_density": draws.density_summary()?,
        "estimate_density": est.gli().density,
        "mean_fp": fp,
        "mean_fn": fnr,
        "psrf_density": finite(draws.psrf_density()),
        "psrf_fp": finite(draws.psrf_fp()),
        "psrf_fn": finite(draws.psrf_fn()),
        "estimate_edges": est.edges().into_iter().map(|(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
        "marginals": marginals,
    });
    let mut buf = serde_json::to_vec_pretty(&summary)?;
    buf.push(b'\n');
    emit(&a.common.out, &buf)?;
    Ok(Status::Ok)
}

fn experiment(a: ExperimentArgs) -> Result<Status> {
    let design: ExperimentDesign = serde_json::from_str(&std::fs::read_to_string(&a.design)?)?;
    let seed = seed_or_entropy(&a.common);
    let rows = run_experiment(&design, seed)?;
    let mut buf = Vec::new();
    write_experiment_csv(&rows, &mut buf)?;
    emit(&a.common.out, &buf)?;
    Ok(Status::Ok)
}

fn oracle(a: OracleArgs) -> Result<Status> {
    let model = a.model.model()?;
    let space = a.space.space();
    let dist = match &a.observations {
        Some(path) => {
            let obs = load_observations(path)?;
            exact_posterior(space, &model, &obs, a.fp, a.fn_rate)?
        }
        None => exact_distribution(space, &model)?,
    };
    let mut buf = Vec::new();
    dist.write_csv(&mut buf)?;
    emit(&a.common.out, &buf)?;
    Ok(Status::Ok)
}
