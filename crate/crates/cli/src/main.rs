use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rholap::coupling_ops::{stability_check, verify_txy_bounds};
use rholap::generators::{GeneratorSpec, Kind, KindParams};
use rholap::laplacian::{low_eigenpairs, low_spectrum, Normalization, RhoOperator, SolveOptions, Solver};
use rholap::mmspace::DEFAULT_NODE_BUDGET;
use rholap::regularity::{check_bishop_gromov, check_biv, check_doubling, check_slv, ConditionReport};
use rholap::transport::{
    certify_closeness, discretize, seed_order, verify_certificate, Certification, ClosenessCertificate, CrossMetric,
};
use rholap::weyl::{count_bound_check, growth_bound_check};
use rholap::{MMSpace, FORMAT_VERSION, VERSION};

/// Failures that map to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<bool, InputError>;

#[derive(Parser)]
#[command(name = "rholap", about = "Ball-averaging Laplacians on finite metric-measure spaces")]
struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model space and write it as mm-space JSON.
    Generate(GenArgs),
    /// Lowest eigenvalues of the rho-Laplacian.
    Spectrum(SpectrumArgs),
    /// Volume regularity audits; exit 1 if any fails.
    Audit(AuditArgs),
    /// Search for a closeness certificate; exit 1 with a violator if none exists.
    Certify(CertifyArgs),
    /// Greedy eps-net of a space with its certificate.
    Discretize(DiscretizeArgs),
    /// Eigenvalue stability and transport bounds for a certified pair.
    Compare(CompareArgs),
    /// Eigenvalue counting and both packing bounds.
    Weyl(WeylArgs),
}

#[derive(Args, Clone, Default)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Points; per side for the torus, per component for two components.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2)]
    periods: Option<Vec<f64>>,
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Generator spec JSON; replaces the flags above.
    #[arg(long, conflicts_with_all = ["kind", "n"])]
    spec: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Circle,
    Sphere,
    FlatTorus,
    Interval,
    TwoComponents,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// mm-space JSON; otherwise the space is generated from the flags.
    #[arg(long, conflicts_with_all = ["kind", "spec"])]
    input: Option<PathBuf>,
    #[command(flatten)]
    generator: GenArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// per-ball, constant:<phi>, riemannian:<dim> or file:<path> (JSON array).
    #[arg(long, default_value = "per-ball")]
    normalization: String,
    #[arg(long, value_enum, default_value = "auto")]
    solver: SolverArg,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum SolverArg {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    rho: f64,
    /// Layer width for SLV and BIV. Default `rho/2`.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "slv,biv,doubling")]
    conditions: Vec<ConditionArg>,
    /// Doubling radii; default `rho` and `2 rho`.
    #[arg(long)]
    r_small: Option<f64>,
    #[arg(long)]
    r_big: Option<f64>,
    /// Bishop-Gromov radius pairs as `r1:r2`; default `2rho:rho,rho:rho/2`.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum ConditionArg {
    Slv,
    Biv,
    Doubling,
    BishopGromov,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// embedding, matrix:<path> or subset:<path>; the files hold JSON arrays.
    #[arg(long, default_value = "embedding")]
    cross: String,
}

#[derive(Args)]
struct DiscretizeArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    eps: f64,
    /// Shuffle the greedy scan order with this seed.
    #[arg(long)]
    order_seed: Option<u64>,
    /// Certificate destination; the net goes to `--out`.
    #[arg(long)]
    certificate: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    certificate: PathBuf,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    lambda: f64,
    /// Transport bounds are evaluated on this many low eigenfunctions of X.
    #[arg(long, default_value_t = 4)]
    k: usize,
}

#[derive(Args)]
struct WeylArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    lambda: f64,
    /// Radii for the lower bound; default `rho, 2rho, 4rho`.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// Also evaluate the tent-function Rayleigh bound.
    #[arg(long)]
    tents: bool,
}

/// Everything that determines a run, embedded in every output.
#[derive(Serialize, Default)]
struct RunConfig {
    subcommand: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalization: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    options: Option<Value>,
}

fn header(config: &RunConfig) -> Value {
    json!({ "tool": "rholap", "version": VERSION, "format_version": FORMAT_VERSION, "config": config })
}

fn envelope(config: &RunConfig, holds: bool, result: Value) -> String {
    let mut v = header(config);
    v["holds"] = json!(holds);
    v["result"] = result;
    pretty(&v)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), InputError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => say(text),
    }
}

/// Writes to stdout; a reader that hung up early (`| head`) is not an error.
fn say(text: &str) -> Result<(), InputError> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(InputError(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn load_space(p: &Path) -> Result<MMSpace, InputError> {
    MMSpace::load(p).map_err(|e| InputError(format!("{}: {e}", p.display())))
}

fn generator_spec(g: &GenArgs) -> Result<GeneratorSpec, InputError> {
    if let Some(p) = &g.spec {
        let text = std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
        let mut spec: GeneratorSpec = serde_json::from_str(&text)?;
        if let Some(s) = g.seed {
            spec.seed = s;
        }
        return Ok(spec);
    }
    let kind = match g.kind.ok_or_else(|| InputError("need --input, --kind or --spec".into()))? {
        KindArg::Circle => Kind::Circle,
        KindArg::Sphere => Kind::Sphere,
        KindArg::FlatTorus => Kind::FlatTorus,
        KindArg::Interval => Kind::Interval,
        KindArg::TwoComponents => Kind::TwoComponents,
    };
    let n = g.n.ok_or_else(|| InputError("--kind needs --n".into()))?;
    let params = KindParams {
        length: g.length,
        periods: g.periods.as_ref().map(|p| [p[0], p[1]]),
        gap: g.gap,
        t: g.t,
        ..KindParams::default()
    };
    Ok(GeneratorSpec { kind, resolution: n, seed: g.seed.unwrap_or(0), params })
}

fn resolve_space(s: &SpaceArgs, config: &mut RunConfig) -> Result<MMSpace, InputError> {
    match &s.input {
        Some(p) => {
            config.inputs.push(path_str(p));
            load_space(p)
        }
        None => {
            let spec = generator_spec(&s.generator)?;
            let space = spec.build()?;
            config.seed = Some(spec.seed);
            config.generator = Some(spec);
            Ok(space)
        }
    }
}

fn parse_normalization(text: &str, n: usize, rho: f64) -> Result<Normalization, InputError> {
    let bad = || InputError(format!("unknown normalization {text:?}"));
    if text == "per-ball" {
        return Ok(Normalization::PerBall);
    }
    let (head, rest) = text.split_once(':').ok_or_else(bad)?;
    match head {
        "constant" => Ok(Normalization::Constant(rest.parse().map_err(|_| bad())?)),
        "riemannian" => Ok(Normalization::riemannian(rest.parse().map_err(|_| bad())?, rho)),
        "file" => {
            let text = std::fs::read_to_string(rest).map_err(|e| InputError(format!("{rest}: {e}")))?;
            let v: Vec<f64> = serde_json::from_str(&text)?;
            if v.len() != n {
                return Err(InputError(format!("normalization file has {} values for {n} points", v.len())));
            }
            Ok(Normalization::Custom(v))
        }
        _ => Err(bad()),
    }
}

fn json_only(format: Option<Format>) -> Result<(), InputError> {
    if format == Some(Format::Csv) {
        return Err(InputError("this subcommand only writes JSON".into()));
    }
    Ok(())
}

fn cmd_generate(cli: &Cli, g: &GenArgs) -> Outcome {
    json_only(cli.format)?;
    let spec = generator_spec(g)?;
    let space = spec.build()?;
    let config = RunConfig {
        subcommand: "generate",
        seed: Some(spec.seed),
        generator: Some(spec),
        output: cli.out.as_ref().map(|p| path_str(p)),
        ..RunConfig::default()
    };
    // the run header rides along as an extra key; loaders ignore it
    let mut v: Value = serde_json::from_str(&space.to_json())?;
    v["run"] = header(&config);
    emit(&cli.out, &pretty(&v))?;
    Ok(true)
}

fn cmd_spectrum(cli: &Cli, a: &SpectrumArgs) -> Outcome {
    let format = cli.format.unwrap_or(Format::Csv);
    let mut config = RunConfig { subcommand: "spectrum", rho: Some(a.rho), k: Some(a.k), ..RunConfig::default() };
    let space = resolve_space(&a.space, &mut config)?;
    let normalization = parse_normalization(&a.normalization, space.len(), a.rho)?;
    config.normalization = Some(a.normalization.clone());
    config.format = Some(format);
    config.output = cli.out.as_ref().map(|p| path_str(p));
    config.options = Some(json!({ "solver": a.solver }));
    let op = RhoOperator::assemble(&space, a.rho, normalization)?;
    let solver = match a.solver {
        SolverArg::Auto => Solver::Auto,
        SolverArg::Dense => Solver::Dense,
        SolverArg::Lanczos => Solver::Lanczos,
    };
    let spectrum = low_spectrum(&op, a.k, &SolveOptions { solver, ..SolveOptions::default() })?;
    let text = match format {
        Format::Csv => format!("# {}\n{}", serde_json::to_string(&header(&config))?, spectrum.to_csv()),
        Format::Json => envelope(&config, true, serde_json::to_value(&spectrum)?),
    };
    emit(&cli.out, &text)?;
    Ok(true)
}

fn parse_radii(items: &[String]) -> Result<Vec<[f64; 2]>, InputError> {
    items
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').ok_or_else(|| InputError(format!("radius pair {s:?} is not r1:r2")))?;
            Ok([a.trim().parse()?, b.trim().parse()?])
        })
        .collect()
}

fn cmd_audit(cli: &Cli, a: &AuditArgs) -> Outcome {
    json_only(cli.format)?;
    let eps = a.eps.unwrap_or(a.rho / 2.0);
    let mut config = RunConfig {
        subcommand: "audit",
        rho: Some(a.rho),
        eps: Some(eps),
        lambda: Some(a.lambda),
        ..RunConfig::default()
    };
    let space = resolve_space(&a.space, &mut config)?;
    let (r_small, r_big) = (a.r_small.unwrap_or(a.rho), a.r_big.unwrap_or(2.0 * a.rho));
    let radii = match &a.radii {
        Some(items) => parse_radii(items)?,
        None => vec![[2.0 * a.rho, a.rho], [a.rho, a.rho / 2.0]],
    };
    config.output = cli.out.as_ref().map(|p| path_str(p));
    config.options = Some(json!({ "conditions": a.conditions, "r_small": r_small, "r_big": r_big, "radii": radii }));
    let mut reports: Vec<ConditionReport> = Vec::new();
    for c in &a.conditions {
        reports.push(match c {
            ConditionArg::Slv => check_slv(&space, a.lambda, a.rho, eps)?,
            ConditionArg::Biv => check_biv(&space, a.lambda, a.rho, eps)?,
            ConditionArg::Doubling => check_doubling(&space, a.lambda, r_small, r_big)?,
            ConditionArg::BishopGromov => check_bishop_gromov(&space, a.lambda, &radii)?,
        });
    }
    for r in &mut reports {
        r.per_point = None;
    }
    let holds = reports.iter().all(|r| r.holds);
    emit(&cli.out, &envelope(&config, holds, serde_json::to_value(&reports)?))?;
    Ok(holds)
}

fn parse_cross(text: &str) -> Result<CrossMetric, InputError> {
    if text == "embedding" {
        return Ok(CrossMetric::Embedding);
    }
    let (head, path) = text.split_once(':').ok_or_else(|| InputError(format!("unknown cross metric {text:?}")))?;
    let body = std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?;
    match head {
        "matrix" => Ok(CrossMetric::Matrix { rows: serde_json::from_str(&body)? }),
        "subset" => Ok(CrossMetric::Subset { origin: serde_json::from_str(&body)? }),
        _ => Err(InputError(format!("unknown cross metric {text:?}"))),
    }
}

/// Certificate JSON with the run header under `run`.
fn certificate_text(cert: &ClosenessCertificate, config: &RunConfig) -> Result<String, InputError> {
    let mut v: Value = serde_json::from_str(&cert.to_json())?;
    v["run"] = header(config);
    Ok(pretty(&v))
}

fn cmd_certify(cli: &Cli, a: &CertifyArgs) -> Outcome {
    json_only(cli.format)?;
    let config = RunConfig {
        subcommand: "certify",
        inputs: vec![path_str(&a.x), path_str(&a.y)],
        eps: Some(a.eps),
        delta: Some(a.delta),
        output: cli.out.as_ref().map(|p| path_str(p)),
        options: Some(json!({ "cross": a.cross })),
        ..RunConfig::default()
    };
    let (x, y) = (load_space(&a.x)?, load_space(&a.y)?);
    let cross = parse_cross(&a.cross)?;
    match certify_closeness(&x, &y, &cross, a.eps, a.delta)? {
        Certification::Certified(cert) => {
            match &cli.out {
                Some(_) => {
                    emit(&cli.out, &certificate_text(&cert, &config)?)?;
                    let check = verify_certificate(&cert, &x, &y)?;
                    say(&format!("{}\n", serde_json::to_string(&json!({ "certified": true, "check": check }))?))?;
                }
                None => emit(&None, &certificate_text(&cert, &config)?)?,
            }
            Ok(true)
        }
        Certification::Violated(v) => {
            let text = envelope(&config, false, json!({ "certified": false, "violator": v }));
            emit(&cli.out, &text)?;
            Ok(false)
        }
    }
}

fn cmd_discretize(cli: &Cli, a: &DiscretizeArgs) -> Outcome {
    json_only(cli.format)?;
    let mut config = RunConfig { subcommand: "discretize", eps: Some(a.eps), ..RunConfig::default() };
    let space = resolve_space(&a.space, &mut config)?;
    config.output = cli.out.as_ref().map(|p| path_str(p));
    config.options = Some(json!({ "order_seed": a.order_seed, "certificate": path_str(&a.certificate) }));
    let order = seed_order(space.len(), a.order_seed);
    let (net, cert) = discretize(&space, a.eps, &order)?;
    let check = verify_certificate(&cert, &space, &net)?;
    let mut v: Value = serde_json::from_str(&net.to_json())?;
    v["run"] = header(&config);
    std::fs::write(&a.certificate, certificate_text(&cert, &config)?)
        .map_err(|e| InputError(format!("{}: {e}", a.certificate.display())))?;
    emit(&cli.out, &pretty(&v))?;
    if cli.out.is_some() {
        say(&format!("{}\n", serde_json::to_string(&json!({ "points": net.len(), "check": check }))?))?;
    }
    Ok(check.valid)
}

fn cmd_compare(cli: &Cli, a: &CompareArgs) -> Outcome {
    json_only(cli.format)?;
    let config = RunConfig {
        subcommand: "compare",
        inputs: vec![path_str(&a.x), path_str(&a.y), path_str(&a.certificate)],
        rho: Some(a.rho),
        lambda: Some(a.lambda),
        k: Some(a.k),
        output: cli.out.as_ref().map(|p| path_str(p)),
        ..RunConfig::default()
    };
    let (x, y) = (load_space(&a.x)?, load_space(&a.y)?);
    let text = std::fs::read_to_string(&a.certificate)?;
    let cert = ClosenessCertificate::from_json(&text)?;
    let stability = stability_check(&x, &y, &cert, a.rho, a.lambda)?;
    let op = RhoOperator::assemble(&x, a.rho, Normalization::PerBall)?;
    let pairs = low_eigenpairs(&op, a.k, &SolveOptions::default())?;
    let mut txy = Vec::new();
    for u in &pairs.vectors {
        txy.push(verify_txy_bounds(&x, &y, &cert, a.rho, a.lambda, u)?);
    }
    let holds = stability.holds && txy.iter().all(|t| t.holds);
    emit(&cli.out, &envelope(&config, holds, json!({ "stability": stability, "transport": txy })))?;
    Ok(holds)
}

fn cmd_weyl(cli: &Cli, a: &WeylArgs) -> Outcome {
    json_only(cli.format)?;
    let mut config = RunConfig { subcommand: "weyl", rho: Some(a.rho), lambda: Some(a.lambda), ..RunConfig::default() };
    let space = resolve_space(&a.space, &mut config)?;
    let radii = a.r.clone().unwrap_or_else(|| vec![a.rho, 2.0 * a.rho, 4.0 * a.rho]);
    config.normalization = Some("per-ball".into());
    config.output = cli.out.as_ref().map(|p| path_str(p));
    config.options = Some(json!({ "r": radii, "node_budget": a.node_budget, "tents": a.tents }));
    let op = RhoOperator::assemble(&space, a.rho, Normalization::PerBall)?;
    let count = count_bound_check(&op, a.lambda, a.node_budget)?;
    let mut growth = Vec::new();
    for &r in &radii {
        growth.push(growth_bound_check(&op, r, a.node_budget, a.tents)?);
    }
    let holds = count.holds && growth.iter().all(|g| g.holds && g.tent_holds != Some(false));
    emit(&cli.out, &envelope(&config, holds, json!({ "count_bound": count, "growth_bounds": growth })))?;
    Ok(holds)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Generate(g) => cmd_generate(cli, g),
        Command::Spectrum(a) => cmd_spectrum(cli, a),
        Command::Audit(a) => cmd_audit(cli, a),
        Command::Certify(a) => cmd_certify(cli, a),
        Command::Discretize(a) => cmd_discretize(cli, a),
        Command::Compare(a) => cmd_compare(cli, a),
        Command::Weyl(a) => cmd_weyl(cli, a),
    }
}

fn main() -> ExitCode {
    let version = format!("{VERSION} (mm-space format {FORMAT_VERSION})");
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
