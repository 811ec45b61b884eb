//! Command-line front end: argument model, dispatch and output rendering.
//!
//! Every subcommand produces a JSON document, a flat table (CSV or aligned
//! plain text), or both. Numbers are printed at 15 significant digits so
//! repeated runs are byte-identical.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use logcalib::experiments::{self, ExperimentConfig};
use logcalib::format::{round_json, sig15};
use logcalib::optimize::{default_grid, optimize_p};
use logcalib::{noise, privacy_profile, threshold_t, Error, NoiseFamily, PrivacyBudget};

#[derive(Debug, Parser)]
#[command(name = "logcalib", version, about = "Noise calibration for (epsilon, delta)-differential privacy")]
pub struct Cli {
    /// Output format. Defaults to `csv` for `experiment`, `json` otherwise.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal scale meeting a privacy budget.
    Calibrate(CalibrateArgs),
    /// Tight delta over a range of scales.
    Profile(ProfileArgs),
    /// Scale and variance ratios of two families over a budget grid.
    Compare(CompareArgs),
    /// Mean-squared-error-optimal Subbotin index for a vector query.
    OptimizeP(OptimizeArgs),
    /// Seeded noise variates.
    Sample(SampleArgs),
    /// Mean-vector release experiment.
    Experiment(ExperimentArgs),
}

/// `laplace`, `logistic`, `gaussian`, `subbotin:R` or `truncated-laplace:A`.
fn parse_family(s: &str) -> Result<NoiseFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: NoiseFamily,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sensitivity: f64,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: NoiseFamily,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sensitivity: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub scale_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub scale_max: f64,
    /// Number of evenly spaced scales, endpoints included.
    #[arg(long, default_value_t = 11)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_family)]
    pub a: NoiseFamily,
    #[arg(long, value_parser = parse_family)]
    pub b: NoiseFamily,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
    pub eps_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
    pub delta_grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    /// Query dimension `m`.
    #[arg(long)]
    pub dim: usize,
    /// Largest absolute coefficient of the linear query.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: f64,
    /// Sup-norm diameter of the record domain.
    #[arg(long, allow_negative_numbers = true)]
    pub diam: f64,
    /// Candidate indices; defaults to 1, 1.5, ..., 14.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: NoiseFamily,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub scale: f64,
    #[arg(long)]
    pub count: usize,
    /// Defaults to `LOGCALIB_SEED`, else 42.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Flat TOML file with `ExperimentConfig` fields; missing fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config file, `LOGCALIB_SEED` and the default 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the summary here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON metadata sidecar. Defaults to `<output stem>.meta.json` when
    /// `--output` is given; omitted otherwise.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag, config or infeasible request. Exit status 2.
    #[error("{0}")]
    Invalid(String),
    /// A numerical search gave up. Exit status 3.
    #[error("{0}")]
    NonConvergence(String),
    /// Exit status 1.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Library errors with parameter names translated into flag names.
fn from_lib(err: Error, flag: impl Fn(&str) -> String) -> CliError {
    match err {
        Error::Domain { param, message } => CliError::Invalid(format!("{}: {message}", flag(param))),
        Error::Infeasible(m) => CliError::Invalid(format!("infeasible: {m}")),
        Error::NonConvergence(m) => CliError::NonConvergence(format!("did not converge: {m}")),
    }
}

fn flag_of(param: &str) -> String {
    let flag = match param {
        "epsilon" => "eps",
        "delta" => "delta",
        "sensitivity" => "sensitivity",
        "scale" => "scale",
        "family" | "a" | "r" => "family",
        "grid" => "grid",
        "dim" | "m" | "dimension" => "dim",
        "nu" => "nu",
        "diam" => "diam",
        "eps-grid" => "eps-grid",
        "LOGCALIB_SEED" => return param.to_string(),
        other => other,
    };
    format!("--{flag}")
}

fn config_field(param: &str) -> String {
    match param {
        "LOGCALIB_SEED" => param.to_string(),
        other => format!("config field '{other}'"),
    }
}

fn lib<T>(r: logcalib::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| from_lib(e, flag_of))
}

fn invalid(flag: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Invalid(format!("--{flag}: {message}"))
}

/// Finite numbers at 15 digits; `inf`, `-inf` and `nan` as strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(sig15(x))
    }
}

/// A flat result: header plus rows of already formatted cells.
#[derive(Debug, Default)]
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_plain(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        // numbers right-aligned; the last column is left ragged
        let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
            let padded: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(&mut self.header.iter().copied()))?;
        for row in &self.rows {
            writeln!(out, "{}", line(&mut row.iter().map(String::as_str)))?;
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// What a subcommand hands back for rendering.
struct Rendered {
    json: Value,
    table: Table,
    /// Lines printed above the table in plain mode.
    preamble: Vec<String>,
}

fn emit(r: Rendered, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(r.json, out),
        Format::Csv => r.table.write_csv(out),
        Format::Plain => {
            for l in &r.preamble {
                writeln!(out, "{l}")?;
            }
            r.table.write_plain(out)
        }
    }
}

fn write_json(mut v: Value, out: &mut dyn Write) -> Result<(), CliError> {
    round_json(&mut v);
    serde_json::to_writer_pretty(&mut *out, &v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Runs one parsed command line, writing its result to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let format = cli.format;
    let rendered = match &cli.command {
        Command::Calibrate(a) => calibrate(a)?,
        Command::Profile(a) => profile(a)?,
        Command::Compare(a) => compare(a)?,
        Command::OptimizeP(a) => optimize(a)?,
        Command::Sample(a) => sample(a)?,
        Command::Experiment(a) => return experiment(a, format.unwrap_or(Format::Csv), out),
    };
    emit(rendered, format.unwrap_or(Format::Json), out)
}

fn calibrate(a: &CalibrateArgs) -> Result<Rendered, CliError> {
    let budget = lib(PrivacyBudget::new(a.eps, a.delta))?;
    let r = lib(logcalib::scale_for_budget(&a.family, budget, a.sensitivity))?;
    let json = json!({
        "family": a.family.to_string(),
        "epsilon": a.eps,
        "delta": a.delta,
        "sensitivity": a.sensitivity,
        "scale": r.scale,
        "threshold": num(r.threshold),
        "achieved_delta": r.achieved_delta,
        "converged": r.converged,
        "iterations": r.iterations,
    });
    let mut table = Table::new(vec![
        "family",
        "epsilon",
        "delta",
        "sensitivity",
        "scale",
        "threshold",
        "achieved_delta",
        "converged",
        "iterations",
    ]);
    table.rows.push(vec![
        a.family.to_string(),
        sig15(a.eps),
        sig15(a.delta),
        sig15(a.sensitivity),
        sig15(r.scale),
        sig15(r.threshold),
        sig15(r.achieved_delta),
        r.converged.to_string(),
        r.iterations.to_string(),
    ]);
    Ok(Rendered { json, table, preamble: Vec::new() })
}

fn profile(a: &ProfileArgs) -> Result<Rendered, CliError> {
    if !(a.eps >= 0.0 && a.eps.is_finite()) {
        return Err(invalid("eps", format!("must be finite and >= 0 (got {})", a.eps)));
    }
    if !(a.sensitivity >= 0.0 && a.sensitivity.is_finite()) {
        return Err(invalid("sensitivity", format!("must be finite and >= 0 (got {})", a.sensitivity)));
    }
    if !(a.scale_min > 0.0 && a.scale_min.is_finite()) {
        return Err(invalid("scale-min", format!("must be finite and > 0 (got {})", a.scale_min)));
    }
    if !(a.scale_max >= a.scale_min && a.scale_max.is_finite()) {
        return Err(invalid("scale-max", format!("must be finite and >= --scale-min (got {})", a.scale_max)));
    }
    if a.points == 0 || (a.points == 1 && a.scale_max != a.scale_min) {
        return Err(invalid("points", "must be >= 2, or 1 when --scale-min equals --scale-max"));
    }
    let step = if a.points > 1 { (a.scale_max - a.scale_min) / (a.points - 1) as f64 } else { 0.0 };
    let mut table = Table::new(vec!["scale", "threshold", "delta"]);
    let mut points = Vec::with_capacity(a.points);
    for k in 0..a.points {
        let s = if k + 1 == a.points { a.scale_max } else { a.scale_min + step * k as f64 };
        let t = threshold_t(&a.family, a.eps, a.sensitivity, s);
        let d = privacy_profile(&a.family, a.eps, a.sensitivity, s);
        table.rows.push(vec![sig15(s), sig15(t), sig15(d)]);
        points.push(json!({"scale": s, "threshold": num(t), "delta": d}));
    }
    let json = json!({
        "family": a.family.to_string(),
        "epsilon": a.eps,
        "sensitivity": a.sensitivity,
        "points": points,
    });
    Ok(Rendered { json, table, preamble: Vec::new() })
}

fn compare(a: &CompareArgs) -> Result<Rendered, CliError> {
    if let Some(d) = a.delta_grid.iter().find(|d| !(0.0..1.0).contains(*d)) {
        return Err(invalid("delta-grid", format!("entries must satisfy 0 <= delta < 1 (got {d})")));
    }
    if let Some(e) = a.eps_grid.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(invalid("eps-grid", format!("entries must be finite and >= 0 (got {e})")));
    }
    let t = lib(experiments::variance_ratio_table(&a.a, &a.b, &a.eps_grid, &a.delta_grid))?;
    let mut table = Table::new(vec!["delta", "epsilon", "rho", "v", "note"]);
    let opt = |x: Option<f64>| x.map(sig15).unwrap_or_default();
    for p in &t.points {
        table.rows.push(vec![
            sig15(p.delta),
            sig15(p.epsilon),
            opt(p.rho),
            opt(p.v),
            p.note.clone().unwrap_or_default(),
        ]);
    }
    let mut preamble = vec![format!("a = {}, b = {}", t.family_a, t.family_b)];
    preamble.extend(
        t.crossings
            .iter()
            .map(|c| format!("v = 1 at delta = {}, epsilon = {}", sig15(c.delta), sig15(c.epsilon))),
    );
    let json = serde_json::to_value(&t).expect("table serializes");
    Ok(Rendered { json, table, preamble })
}

fn optimize(a: &OptimizeArgs) -> Result<Rendered, CliError> {
    let budget = lib(PrivacyBudget::new(a.eps, a.delta))?;
    let grid = a.grid.clone().unwrap_or_else(default_grid);
    let o = lib(optimize_p(budget, a.dim, a.nu, a.diam, &grid))?;
    let mut table = Table::new(vec!["r", "sensitivity", "scale", "mse", "selected", "note"]);
    for g in &o.grid_evaluations {
        table.rows.push(vec![
            sig15(g.r),
            sig15(g.sensitivity),
            sig15(g.scale),
            sig15(g.mse),
            (g.r == o.r_star).to_string(),
            String::new(),
        ]);
    }
    for f in &o.failures {
        let mut row = vec![sig15(f.r), String::new(), String::new(), String::new()];
        row.extend(["false".to_string(), f.reason.clone()]);
        table.rows.push(row);
    }
    let preamble = vec![format!(
        "r* = {}, scale = {}, mse = {}",
        sig15(o.r_star),
        sig15(o.scale_star),
        sig15(o.mse_star)
    )];
    let mut json = serde_json::to_value(&o).expect("outcome serializes");
    json["input"] = json!({
        "epsilon": a.eps, "delta": a.delta, "dim": a.dim, "nu": a.nu, "diam": a.diam,
    });
    Ok(Rendered { json, table, preamble })
}

fn sample(a: &SampleArgs) -> Result<Rendered, CliError> {
    if !(a.scale >= 0.0 && a.scale.is_finite()) {
        return Err(invalid("scale", format!("must be finite and >= 0 (got {})", a.scale)));
    }
    let seed = match a.seed {
        Some(s) => s,
        None => lib(experiments::default_seed())?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> =
        noise::sample(&a.family, a.count, &mut rng).into_iter().map(|x| a.scale * x).collect();
    let mut table = Table::new(vec!["index", "value"]);
    table.rows = values.iter().enumerate().map(|(i, v)| vec![i.to_string(), sig15(*v)]).collect();
    let json = json!({
        "family": a.family.to_string(),
        "scale": a.scale,
        "seed": seed,
        "values": values,
    });
    Ok(Rendered { json, table, preamble: Vec::new() })
}

/// Reads a flat TOML config. A missing `seed` comes from `LOGCALIB_SEED` or
/// the default, so the file alone does not pin the seed.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Invalid(format!("--config: cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Invalid(format!("--config: {}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    if !table.contains_key("seed") {
        let seed = experiments::default_seed().map_err(|e| from_lib(e, config_field))?;
        let seed = i64::try_from(seed)
            .map_err(|_| CliError::Invalid(format!("LOGCALIB_SEED: must be < 2^63 (got {seed})")))?;
        table.insert("seed".into(), toml::Value::Integer(seed));
    }
    table.try_into().map_err(|e: toml::de::Error| CliError::Invalid(format!("--config: {}", e.message())))
}

fn experiment(a: &ExperimentArgs, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let mut config = load_config(a.config.as_deref())?;
    if let Some(s) = a.seed {
        config.seed = s;
    }
    config.validate().map_err(|e| from_lib(e, config_field))?;
    let report = experiments::mean_vector_experiment(&config).map_err(|e| from_lib(e, config_field))?;
    let meta = experiments::metadata(&config);

    let mut body = Vec::new();
    match format {
        Format::Csv => experiments::write_summary_csv(&report.summaries, &mut body)?,
        Format::Json => write_json(json!({"metadata": meta, "summaries": report.summaries}), &mut body)?,
        Format::Plain => {
            let mut table = Table::new(vec![
                "epsilon",
                "m",
                "mechanism",
                "mean_l2_error",
                "stderr",
                "r",
                "scale",
                "seed",
            ]);
            for s in &report.summaries {
                table.rows.push(vec![
                    sig15(s.epsilon),
                    s.m.to_string(),
                    s.mechanism.to_string(),
                    sig15(s.mean_l2_error),
                    sig15(s.stderr),
                    sig15(s.r),
                    sig15(s.scale),
                    s.seed.to_string(),
                ]);
            }
            table.write_plain(&mut body)?;
        }
    }

    let sidecar = a.metadata.clone().or_else(|| a.output.as_ref().map(|o| o.with_extension("meta.json")));
    match &a.output {
        Some(path) => std::fs::write(path, &body)?,
        None => out.write_all(&body)?,
    }
    if let Some(path) = sidecar {
        let mut text = Vec::new();
        write_json(meta, &mut text)?;
        std::fs::write(path, text)?;
    }
    Ok(())
}
