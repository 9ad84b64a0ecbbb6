//! Command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ratprog_core::datakit::{design_points, enumerate_configs, synthesize, SampleSet};
use ratprog_core::perfmodel::{DeviceProfile, LaunchConfig, MetricFunctions, RepMode, CONFIG_INPUTS};
use ratprog_core::pipeline::{
    emit_c_source, fit_all_metrics, generate_occupancy_rp, generate_rp, metric_occupancy, sanity_report, FitOptions,
    MetricModelSet, PipelineError, SearchResult,
};
use ratprog_core::polyfit::{max_relative_error, DegreeBounds, FitData, DEFAULT_RANK_TOL};
use ratprog_core::ratir::{evaluate, parse, serialize, validate, Bindings, RationalProgram, Var, DEFAULT_STEP_LIMIT};
use ratprog_core::Rational;
use serde_json::{json, Value};

use crate::device::{parse_device, SYNTHETIC_DEVICE};
use crate::error::{read_text, write_text, Error, Result};
use crate::kernel::{parse_kernel, STENCIL_KERNEL};
use crate::models::{parse_models, write_models};
use crate::report::{num, opt_num, Format, Table};
use crate::samples::{parse_samples, write_samples};
use crate::search::{case_tag, evaluate_parallel, search_parallel};

/// Environment variable naming the default device profile.
pub const PROFILE_ENV: &str = "RATPROG_PROFILE";

#[derive(Debug, Parser)]
#[command(name = "ratprog", version, about = "Rational programs for choosing GPU thread-block configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emulate measurements of a synthetic kernel and write them as CSV.
    Synth(SynthArgs),
    /// Fit one rational function per metric column.
    Fit(FitArgs),
    /// Generate the rational program for a fitted model set.
    GenRp(GenRpArgs),
    /// Evaluate a rational program at one input tuple.
    EvalRp(EvalRpArgs),
    /// Rank all launch configurations at one data point.
    Search(SearchArgs),
    /// Compare collected metrics with the rational program per data point.
    Sanity(SanityArgs),
    /// Check that a file is a well-formed rational program.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ConfigSpace {
    /// Largest number of threads per block.
    #[arg(long, default_value_t = 1024)]
    max_threads: u64,
    /// Smallest number of threads per block.
    #[arg(long, default_value_t = 32)]
    min_threads: u64,
    /// Block dimensions that vary (1, 2 or 3).
    #[arg(long, default_value_t = 2)]
    dims: u8,
}

impl ConfigSpace {
    fn configs(&self) -> Result<Vec<LaunchConfig>> {
        enumerate_configs(self.max_threads, self.min_threads, self.dims)
            .map_err(|e| Error::usage(format!("--max-threads/--min-threads/--dims: {e}")))
    }
}

#[derive(Debug, Args)]
struct DeviceArg {
    /// Device profile (`field = value` lines). Defaults to the bundled synthetic profile.
    #[arg(long, env = PROFILE_ENV)]
    device: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RepArg {
    Real,
    Ceil,
}

impl From<RepArg> for RepMode {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::Real => RepMode::Real,
            RepArg::Ceil => RepMode::Ceil,
        }
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Kernel description (JSON). Defaults to the bundled stencil kernel.
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative noise level, overriding the kernel file.
    #[arg(long)]
    noise: Option<f64>,
    /// Design values for one data parameter, e.g. `N=64,128`.
    #[arg(long = "values", value_name = "NAME=V1,V2,...")]
    values: Vec<String>,
    #[command(flatten)]
    space: ConfigSpace,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Sample CSV.
    #[arg(long)]
    samples: PathBuf,
    /// Output model set (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Per-metric degree caps over the fit variables, e.g. `total_blocks=2,1,1/0,1,1`.
    #[arg(long = "bounds", value_name = "METRIC=NUM/DEN")]
    bounds: Vec<String>,
    /// Default numerator/denominator cap on every variable.
    #[arg(long, default_value = "2/1", value_name = "NUM/DEN")]
    degree: String,
    /// Relative singular-value cutoff.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Declared constant metric, e.g. `regs_per_thread=24`.
    #[arg(long = "const", value_name = "NAME=VALUE")]
    constants: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct GenRpArgs {
    /// Model set from `fit`.
    #[arg(long, required_unless_present = "occupancy")]
    models: Option<PathBuf>,
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, value_enum, default_value_t = RepArg::Real)]
    rep_mode: RepArg,
    /// Output program; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the program as C source.
    #[arg(long, value_name = "PATH")]
    emit_c: Option<PathBuf>,
    /// Emit the occupancy program (inputs R, Z, T) instead of the cycle estimate.
    #[arg(long, conflicts_with = "models")]
    occupancy: bool,
}

#[derive(Debug, Args)]
struct EvalRpArgs {
    #[arg(long)]
    program: PathBuf,
    /// Input value, e.g. `N=1024` or `x=-3/4`.
    #[arg(long = "bind", value_name = "NAME=VALUE")]
    bind: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Rational program from `gen-rp`.
    #[arg(long, required_unless_present = "models")]
    program: Option<PathBuf>,
    /// Model set; generates the program if `--program` is absent, and
    /// supplies occupancy and case tags.
    #[arg(long)]
    models: Option<PathBuf>,
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, value_enum, default_value_t = RepArg::Real)]
    rep_mode: RepArg,
    /// Data parameter value, e.g. `N=1024`.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write every evaluated configuration as JSON lines.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
    #[command(flatten)]
    space: ConfigSpace,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SanityArgs {
    #[arg(long)]
    models: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    /// Rational program; generated from the models if omitted.
    #[arg(long)]
    program: Option<PathBuf>,
    #[command(flatten)]
    device: DeviceArg,
    #[arg(long, value_enum, default_value_t = RepArg::Real)]
    rep_mode: RepArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 1 };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Fit(a) => fit(a),
        Command::GenRp(a) => gen_rp(a),
        Command::EvalRp(a) => eval_rp(a),
        Command::Search(a) => search(a),
        Command::Sanity(a) => sanity(a),
        Command::Validate(a) => validate_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn input_file(flag: &str, path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::usage(format!("{flag}: no such file `{}`", path.display())))
    }
}

fn output_file(flag: &str, path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    match parent {
        Some(dir) if !dir.is_dir() => Err(Error::usage(format!("{flag}: directory `{}` does not exist", dir.display()))),
        _ if path.is_dir() => Err(Error::usage(format!("{flag}: `{}` is a directory", path.display()))),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn key_value<'a>(flag: &str, s: &'a str) -> Result<(&'a str, &'a str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Error::usage(format!("{flag}: expected NAME=VALUE, got `{s}`")))
}

fn caps(flag: &str, s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse()
                .map_err(|_| Error::usage(format!("{flag}: `{c}` is not a degree")))
        })
        .collect()
}

fn load_device(arg: &DeviceArg) -> Result<DeviceProfile> {
    match &arg.device {
        Some(p) => parse_device(&read_text(p)?, &p.display().to_string()),
        None => {
            eprintln!("note: no --device or {PROFILE_ENV}; using the bundled SYNTHETIC device profile");
            parse_device(SYNTHETIC_DEVICE, "bundled device profile")
        }
    }
}

fn check_device(arg: &DeviceArg) -> Result<()> {
    arg.device.as_deref().map_or(Ok(()), |p| input_file("--device", p))
}

fn load_models(path: &Path) -> Result<MetricModelSet> {
    parse_models(&read_text(path)?, &path.display().to_string())
}

fn load_program(path: &Path) -> Result<RationalProgram> {
    let text = read_text(path)?;
    parse(&text).map_err(|e| Error::data(format!("{}:{}", path.display(), e.line), e))
}

fn pipeline_error(origin: &Path, e: PipelineError) -> Error {
    Error::data(origin.display(), e)
}

fn synth(a: SynthArgs) -> Result<i32> {
    if let Some(p) = &a.kernel {
        input_file("--kernel", p)?;
    }
    if let Some(p) = &a.out {
        output_file("--out", p)?;
    }
    let configs = a.space.configs()?;
    let mut kernel = match &a.kernel {
        Some(p) => parse_kernel(&read_text(p)?, &p.display().to_string())?,
        None => parse_kernel(STENCIL_KERNEL, "bundled stencil kernel")?,
    };
    if let Some(noise) = a.noise {
        kernel.spec.noise_rel = noise;
    }
    if !a.values.is_empty() {
        let mut lists: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
        for v in &a.values {
            let (name, list) = key_value("--values", v)?;
            if !kernel.spec.param_names.iter().any(|p| p == name) {
                return Err(Error::usage(format!("--values: `{name}` is not a parameter of the kernel")));
            }
            let parsed = list
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::usage(format!("--values: `{x}` is not an integer")))
                })
                .collect::<Result<Vec<i64>>>()?;
            lists.insert(name, parsed);
        }
        let k = kernel.spec.param_names.len();
        let mut columns: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let mut seen: Vec<i64> = kernel.design.iter().map(|d| d[i]).collect();
                seen.dedup();
                seen
            })
            .collect();
        for (i, p) in kernel.spec.param_names.iter().enumerate() {
            if let Some(v) = lists.get(p.as_str()) {
                columns[i] = v.clone();
            }
        }
        kernel.design = columns.iter().fold(vec![Vec::new()], |acc, col| {
            acc.iter()
                .flat_map(|prefix| {
                    col.iter().map(move |&v| {
                        let mut d = prefix.clone();
                        d.push(v);
                        d
                    })
                })
                .collect()
        });
    }
    let points = design_points(&kernel.design, &configs).map_err(|e| Error::usage(format!("--values: {e}")))?;
    let outcome = synthesize(&kernel.spec, &points, a.seed).map_err(|e| Error::usage(format!("--noise: {e}")))?;
    for s in &outcome.skipped {
        eprintln!("note: skipped {:?} {}: metric `{}`: {}", s.point.0, s.point.1, s.metric, s.reason);
    }
    emit(a.out.as_deref(), &write_samples(&outcome.set))?;
    Ok(0)
}

fn fit_variables(samples: &SampleSet) -> Vec<String> {
    let dims = if samples.uses_bz() { 3 } else { 2 };
    samples
        .param_names()
        .iter()
        .cloned()
        .chain(CONFIG_INPUTS[..dims].iter().map(|s| s.to_string()))
        .collect()
}

fn fit_data(samples: &SampleSet, variables: &[String], metric: usize) -> Option<FitData> {
    let points = samples
        .samples()
        .iter()
        .map(|s| {
            let mut p: Vec<f64> = s.data_params.iter().map(|&d| d as f64).collect();
            let c = [s.config.bx, s.config.by, s.config.bz];
            p.extend(c[..variables.len() - p.len()].iter().map(|&x| x as f64));
            p
        })
        .collect();
    let values = samples.samples().iter().map(|s| s.values[metric]).collect();
    FitData::new(variables.to_vec(), points, values).ok()
}

fn caps_text(c: &[u32]) -> String {
    c.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn fit(a: FitArgs) -> Result<i32> {
    input_file("--samples", &a.samples)?;
    output_file("--out", &a.out)?;
    let (num_cap, den_cap) = a
        .degree
        .split_once('/')
        .ok_or_else(|| Error::usage(format!("--degree: expected NUM/DEN, got `{}`", a.degree)))?;
    let parse_cap = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Error::usage(format!("--degree: `{s}` is not a degree")))
    };
    let mut options = FitOptions {
        default_num: parse_cap(num_cap)?,
        default_den: parse_cap(den_cap)?,
        rank_tol: a.rank_tol,
        ..FitOptions::default()
    };
    if !(a.rank_tol.is_finite() && a.rank_tol >= 0.0) {
        return Err(Error::usage("--rank-tol must be finite and non-negative"));
    }
    let mut constants = BTreeMap::new();
    for c in &a.constants {
        let (name, value) = key_value("--const", c)?;
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| Error::usage(format!("--const {name}: `{value}` is not a non-negative number")))?;
        constants.insert(name.to_string(), v);
    }
    let mut bound_specs = Vec::new();
    for b in &a.bounds {
        let (metric, spec) = key_value("--bounds", b)?;
        let (n, d) = spec
            .split_once('/')
            .ok_or_else(|| Error::usage(format!("--bounds {metric}: expected NUM/DEN caps, got `{spec}`")))?;
        let bounds = DegreeBounds::new(caps("--bounds", n)?, caps("--bounds", d)?)
            .ok_or_else(|| Error::usage(format!("--bounds {metric}: numerator and denominator cap counts differ")))?;
        bound_specs.push((metric.to_string(), bounds));
    }

    let origin = a.samples.display().to_string();
    let samples = parse_samples(&read_text(&a.samples)?, &origin)?;
    for name in MetricFunctions::NAMES {
        if samples.metric_index(name).is_none() && !constants.contains_key(name) {
            return Err(Error::data(&origin, format!("missing metric column `{name}` (or declare it with --const)")));
        }
    }
    for (metric, bounds) in bound_specs {
        if samples.metric_index(&metric).is_none() {
            return Err(Error::usage(format!("--bounds: `{origin}` has no metric column `{metric}`")));
        }
        options.bounds.insert(metric, bounds);
    }
    let variables = fit_variables(&samples);
    let mut set = fit_all_metrics(&samples, &options).map_err(|e| match e {
        PipelineError::BoundsMismatch { metric, expected, found } => Error::usage(format!(
            "--bounds {metric}: {found} caps given, the fit variables are {} ({expected})",
            variables.join(", ")
        )),
        e => Error::data(&origin, e),
    })?;
    set.constants = constants;
    write_text(&a.out, &write_models(&set))?;

    let mut table = Table::new(&["metric", "status", "num_caps", "den_caps", "rank", "truncated", "residual", "max_rel_err", "note"]);
    for (k, metric) in samples.metric_names().iter().enumerate() {
        if let Some(m) = set.models.get(metric) {
            let b = m.function.bounds();
            let err = fit_data(&samples, &variables, k).map(|d| max_relative_error(&m.function, &d));
            let constant = m.function.num.basis.len() == 1 && m.function.den.basis.len() == 1 && b.num.iter().all(|&c| c == 0);
            table.push(vec![
                json!(metric),
                json!(if constant { "constant" } else { "fitted" }),
                json!(caps_text(&b.num)),
                json!(caps_text(&b.den)),
                json!(m.report.numerical_rank),
                json!(m.report.truncated),
                num(m.report.residual_norm),
                opt_num(err),
                if set.constants.contains_key(metric) { json!("overridden by --const") } else { Value::Null },
            ]);
        } else if let Some(msg) = set.failures.get(metric) {
            let mut row = vec![json!(metric), json!("failed")];
            row.extend(std::iter::repeat_n(Value::Null, 6));
            row.push(json!(msg));
            table.push(row);
        }
    }
    for (name, v) in &set.constants {
        if samples.metric_index(name).is_none() {
            let mut row = vec![json!(name), json!("declared")];
            row.extend(std::iter::repeat_n(Value::Null, 6));
            row.push(json!(format!("value {v}")));
            table.push(row);
        }
    }
    table.summary.push(format!(
        "fit {} samples over ({}); models written to {}",
        samples.len(),
        variables.join(", "),
        a.out.display()
    ));
    print!("{}", table.render(a.format));
    Ok(0)
}

fn gen_rp(a: GenRpArgs) -> Result<i32> {
    if let Some(p) = &a.models {
        input_file("--models", p)?;
    }
    check_device(&a.device)?;
    if let Some(p) = &a.out {
        output_file("--out", p)?;
    }
    if let Some(p) = &a.emit_c {
        output_file("--emit-c", p)?;
    }
    let hw = load_device(&a.device)?;
    let device_origin = a
        .device
        .device
        .as_ref()
        .map_or_else(|| PathBuf::from("bundled device profile"), PathBuf::clone);
    let rp = match &a.models {
        Some(path) => {
            let models = load_models(path)?;
            generate_rp(&models, &hw, a.rep_mode.into()).map_err(|e| match e {
                PipelineError::Device(_) => pipeline_error(&device_origin, e),
                e => pipeline_error(path, e),
            })?
        }
        None => generate_occupancy_rp(&hw).map_err(|e| pipeline_error(&device_origin, e))?,
    };
    emit(a.out.as_deref(), &serialize(&rp))?;
    if let Some(p) = &a.emit_c {
        write_text(p, &emit_c_source(&rp))?;
    }
    Ok(0)
}

fn parse_bindings(flag: &str, binds: &[String]) -> Result<Bindings> {
    let mut out = Bindings::new();
    for b in binds {
        let (name, value) = key_value(flag, b)?;
        let v: Rational = value
            .parse()
            .map_err(|_| Error::usage(format!("{flag} {name}: `{value}` is not a rational number")))?;
        if out.insert(Var::new(name), v).is_some() {
            return Err(Error::usage(format!("{flag}: `{name}` bound twice")));
        }
    }
    Ok(out)
}

fn eval_rp(a: EvalRpArgs) -> Result<i32> {
    input_file("--program", &a.program)?;
    let bindings = parse_bindings("--bind", &a.bind)?;
    let rp = load_program(&a.program)?;
    let report = validate(&rp);
    if !report.is_valid() {
        return Err(Error::data(a.program.display(), format!("not a rational program: {}", report.violations[0])));
    }
    if let Some(v) = rp.inputs.iter().find(|v| !bindings.contains_key(*v)) {
        return Err(Error::usage(format!("--bind: no value for input `{v}`")));
    }
    if let Some(v) = bindings.keys().find(|v| !rp.inputs.contains(v)) {
        return Err(Error::usage(format!("--bind: `{v}` is not an input of the program")));
    }
    let value = evaluate(&rp, &bindings, DEFAULT_STEP_LIMIT).map_err(|e| Error::data(a.program.display(), e))?;
    let mut table = Table::new(&["output", "value", "approx"]);
    table.push(vec![json!(rp.output.to_string()), json!(value.to_string()), num(value.to_f64())]);
    print!("{}", table.render(a.format));
    Ok(0)
}

fn parse_params(names: &[String], given: &[String]) -> Result<Vec<(String, i64)>> {
    let mut values = BTreeMap::new();
    for p in given {
        let (name, value) = key_value("--param", p)?;
        let v: i64 = value
            .parse()
            .map_err(|_| Error::usage(format!("--param {name}: `{value}` is not an integer")))?;
        if !names.iter().any(|n| n == name) {
            return Err(Error::usage(format!(
                "--param: `{name}` is not a data parameter (expected {})",
                names.join(", ")
            )));
        }
        values.insert(name.to_string(), v);
    }
    names
        .iter()
        .map(|n| {
            values
                .get(n)
                .map(|&v| (n.clone(), v))
                .ok_or_else(|| Error::usage(format!("--param: no value for data parameter `{n}`")))
        })
        .collect()
}

fn search_table(result: &SearchResult, tags: &BTreeMap<LaunchConfig, &'static str>) -> Table {
    let mut table = Table::new(&["rank", "bx", "by", "bz", "Ec", "occupancy", "case_tag", "tied", "chosen"]);
    for (k, r) in result.ranked.iter().enumerate() {
        let c = r.config;
        table.push(vec![
            json!(k + 1),
            json!(c.bx),
            json!(c.by),
            json!(c.bz),
            num(r.cycles),
            num(r.occupancy),
            tags.get(&c).map_or(Value::Null, |t| json!(t)),
            json!(k < result.ties),
            json!(k == 0),
        ]);
    }
    table
}

fn search(a: SearchArgs) -> Result<i32> {
    if let Some(p) = &a.program {
        input_file("--program", p)?;
    }
    if let Some(p) = &a.models {
        input_file("--models", p)?;
    }
    check_device(&a.device)?;
    if let Some(p) = &a.dump {
        output_file("--dump", p)?;
    }
    if a.jobs == 0 {
        return Err(Error::usage("--jobs must be at least 1"));
    }
    let configs = a.space.configs()?;
    let rep_mode: RepMode = a.rep_mode.into();

    let models = a.models.as_deref().map(load_models).transpose()?;
    let hw = if models.is_some() { Some(load_device(&a.device)?) } else { None };
    let (rp, origin) = match (&a.program, &models, &hw) {
        (Some(p), _, _) => (load_program(p)?, p.clone()),
        (None, Some(m), Some(hw)) => {
            let path = a.models.clone().expect("models given");
            (generate_rp(m, hw, rep_mode).map_err(|e| pipeline_error(&path, e))?, path)
        }
        _ => return Err(Error::usage("search needs --program or --models")),
    };
    let report = validate(&rp);
    if !report.is_valid() {
        return Err(Error::data(origin.display(), format!("not a rational program: {}", report.violations[0])));
    }
    let names: Vec<String> = match &models {
        Some(m) => m.param_names.clone(),
        None => rp
            .inputs
            .iter()
            .map(|v| v.to_string())
            .filter(|v| !CONFIG_INPUTS.contains(&v.as_str()))
            .collect(),
    };
    let data = parse_params(&names, &a.params)?;

    let metrics = models
        .as_ref()
        .map(|m| m.metric_functions().map_err(|e| pipeline_error(a.models.as_deref().expect("models given"), e)))
        .transpose()?;
    let occupancy = |c: &LaunchConfig| match (&hw, &metrics) {
        (Some(hw), Some(m)) => metric_occupancy(hw, m, &data)(c),
        _ => 0.0,
    };
    let evaluated = evaluate_parallel(&rp, &data, &configs, a.jobs).map_err(|e| pipeline_error(&origin, e))?;
    let result = search_parallel(&rp, &data, &configs, occupancy, a.jobs).map_err(|e| pipeline_error(&origin, e))?;
    let tags: BTreeMap<LaunchConfig, &'static str> = match (&hw, &metrics) {
        (Some(hw), Some(m)) => configs
            .iter()
            .filter_map(|c| case_tag(hw, m, &data, c, rep_mode).map(|t| (*c, t.as_str())))
            .collect(),
        _ => BTreeMap::new(),
    };

    if let Some(path) = &a.dump {
        let mut out = String::new();
        for e in &evaluated {
            let c = e.config;
            let line = json!({
                "config": [c.bx, c.by, c.bz],
                "Ec": e.cycles.map_or(Value::Null, num),
                "occupancy": num(occupancy(&c)),
                "case_tag": tags.get(&c).map_or(Value::Null, |t| json!(t)),
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        write_text(path, &out)?;
    }

    let mut table = search_table(&result, &tags);
    let best = &result.ranked[0];
    let at: Vec<String> = data.iter().map(|(k, v)| format!("{k}={v}")).collect();
    table.summary.push(format!(
        "chosen {} at {}: Ec {} cycles, occupancy {}, ties {}",
        result.chosen,
        at.join(" "),
        crate::report::short_float(best.cycles),
        crate::report::short_float(best.occupancy),
        result.ties
    ));
    table.summary.push(format!(
        "{} configurations, {} feasible",
        configs.len(),
        result.ranked.len()
    ));
    print!("{}", table.render(a.format));
    Ok(0)
}

fn config_cell(c: Option<LaunchConfig>) -> Value {
    c.map_or(Value::Null, |c| json!(format!("{}x{}x{}", c.bx, c.by, c.bz)))
}

fn sanity(a: SanityArgs) -> Result<i32> {
    input_file("--models", &a.models)?;
    input_file("--samples", &a.samples)?;
    if let Some(p) = &a.program {
        input_file("--program", p)?;
    }
    check_device(&a.device)?;
    let rep_mode: RepMode = a.rep_mode.into();
    let models = load_models(&a.models)?;
    let samples = parse_samples(&read_text(&a.samples)?, &a.samples.display().to_string())?;
    if samples.param_names() != models.param_names.as_slice() {
        return Err(Error::data(
            a.samples.display(),
            format!(
                "data parameters ({}) differ from the models ({})",
                samples.param_names().join(", "),
                models.param_names.join(", ")
            ),
        ));
    }
    let hw = load_device(&a.device)?;
    let rp = match &a.program {
        Some(p) => load_program(p)?,
        None => generate_rp(&models, &hw, rep_mode).map_err(|e| pipeline_error(&a.models, e))?,
    };
    let rows = sanity_report(&models, &samples, &rp, &hw, rep_mode).map_err(|e| match e {
        PipelineError::MissingMetric(_) => pipeline_error(&a.samples, e),
        e => pipeline_error(&a.models, e),
    })?;
    let mut columns: Vec<&str> = samples.param_names().iter().map(String::as_str).collect();
    columns.extend(["C_i", "Ec_i", "C_r", "Ec_r", "collected_Ec"]);
    let mut table = Table::new(&columns);
    for r in rows {
        let mut row: Vec<Value> = r.data_params.iter().map(|&d| json!(d)).collect();
        row.extend([
            config_cell(r.c_i),
            opt_num(r.ec_i),
            config_cell(r.c_r),
            opt_num(r.ec_r),
            opt_num(r.collected_ec),
        ]);
        table.push(row);
    }
    print!("{}", table.render(a.format));
    Ok(0)
}

fn validate_cmd(a: ValidateArgs) -> Result<i32> {
    input_file("--program", &a.program)?;
    let rp = load_program(&a.program)?;
    let report = validate(&rp);
    let mut table = Table::new(&["violation"]);
    for v in &report.violations {
        table.push(vec![json!(v.to_string())]);
    }
    let inputs: Vec<String> = rp.inputs.iter().map(|v| v.to_string()).collect();
    table.summary.push(format!(
        "{}: {} ({} instructions, inputs {}, output {})",
        a.program.display(),
        if report.is_valid() { "valid" } else { "INVALID" },
        rp.body.len(),
        inputs.join(" "),
        rp.output
    ));
    if report.may_be_non_integer {
        table.summary.push("note: non-integer literals; integer inputs may give a non-integer output".into());
    }
    print!("{}", table.render(a.format));
    Ok(if report.is_valid() { 0 } else { 2 })
}
