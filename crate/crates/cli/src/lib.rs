//! Command implementations behind the `polweak` binary.
//!
//! Every command writes its table or JSON to `out` and diagnostics to
//! `err`, and returns the process exit code.

use std::fmt::Write as _;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use polweak::network::{parse_network, run_exact, run_weak, NetworkSpec};
use polweak::optimizer::{
    optimize_arrangement, sweep_polarization, Engine, Objective, DEFAULT_GRID,
};
use polweak::weak::PmdShift;
use polweak::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// Weak-engine runs above this `max dgd / t_c` carry a warning.
pub const WEAKNESS_WARN: f64 = 0.1;
pub const DEFAULT_POINTS: usize = 2001;
/// Intensity window padding, in coherence times.
pub const INTENSITY_MARGIN: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(name = "polweak", version, about = "Mean arrival time of pulses through PMD/PDL networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact propagation: mean time, transmission, optional intensity profile.
    Simulate(SimulateArgs),
    /// First-order estimate with the per-PMD shift table.
    Weak(WeakArgs),
    /// Mean time over linear input polarizations, as CSV.
    Sweep(SweepArgs),
    /// Best ordering of the file's elements.
    Optimize(OptimizeArgs),
    /// Exact versus weak discrepancy across dgd scales.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Network file, or `-` for standard input.
    pub file: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: Input,
    /// Emit `t,intensity` CSV on stdout; the report then goes to stderr.
    #[arg(long)]
    pub intensity: bool,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct WeakArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// `exact` adds a `t_exact` column next to `t_weak`.
    #[arg(long, value_enum, default_value_t = EngineArg::Weak)]
    pub engine: EngineArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Max)]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = EngineArg::Weak)]
    pub engine: EngineArg,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: Input,
    /// Target values of `max dgd / t_c`, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3])]
    pub ratios: Vec<f64>,
    /// Constant in the bound `C * sum(dgd) * (max dgd / t_c)^2`.
    #[arg(long, default_value_t = 5.0)]
    pub bound_factor: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Weak,
    Exact,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Weak => Engine::Weak,
            EngineArg::Exact => Engine::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Max,
    Min,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Max => Objective::Max,
            ObjectiveArg::Min => Objective::Min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mean_time: f64,
    pub transmission: f64,
    pub engine: Engine,
    pub warnings: Vec<String>,
    /// SHA-256 of the raw input bytes, hex encoded.
    pub input_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<PmdShift>>,
}

impl RunReport {
    fn render(&self) -> String {
        let mut s = String::new();
        let engine = match self.engine {
            Engine::Weak => "weak",
            Engine::Exact => "exact",
        };
        writeln!(s, "engine: {engine}").unwrap();
        writeln!(s, "mean_time: {}", num(self.mean_time)).unwrap();
        writeln!(s, "transmission: {}", num(self.transmission)).unwrap();
        writeln!(s, "input_sha256: {}", self.input_sha256).unwrap();
        if let Some(shifts) = &self.shifts {
            writeln!(s, "element,shift").unwrap();
            for row in shifts {
                writeln!(s, "{},{}", row.element, num(row.shift)).unwrap();
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub ratio: f64,
    pub discrepancy: f64,
    pub bound: f64,
    pub ok: bool,
}

/// 17 significant digits, round-trip safe.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

/// A failure that maps onto an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_PARSE,
            _ => EXIT_PHYSICS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

struct Loaded {
    spec: NetworkSpec,
    digest: String,
}

fn load(input: &Input, stdin: &mut dyn Read) -> Result<Loaded, Failure> {
    let bytes = if input.file == "-" {
        let mut buf = Vec::new();
        stdin.read_to_end(&mut buf)?;
        buf
    } else {
        std::fs::read(&input.file).map_err(|e| usage(format!("{}: {e}", input.file)))?
    };
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let spec = parse_network(&text).map_err(Error::from)?;
    Ok(Loaded { spec, digest })
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdin, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Simulate(a) => simulate(a, stdin, out, err),
        Command::Weak(a) => weak(a, stdin, out, err),
        Command::Sweep(a) => sweep(a, stdin, out),
        Command::Optimize(a) => optimize(a, stdin, out),
        Command::Validate(a) => validate(a, stdin, out),
    }
}

fn simulate(a: SimulateArgs, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let Loaded { spec, digest } = load(&a.input, stdin)?;
    let run = run_exact(&spec)?;
    let report = RunReport {
        mean_time: run.mean_time,
        transmission: run.transmission,
        engine: Engine::Exact,
        warnings: Vec::new(),
        input_sha256: digest,
        shifts: None,
    };
    let rendered = if a.json { json(&report) } else { report.render() };
    if a.intensity {
        if a.points < 2 {
            return Err(usage("--points must be at least 2"));
        }
        let mut csv = String::from("t,intensity\n");
        for (t, i) in run.intensity_samples(a.points, INTENSITY_MARGIN) {
            writeln!(csv, "{},{}", num(t), num(i)).unwrap();
        }
        out.write_all(csv.as_bytes())?;
        err.write_all(rendered.as_bytes())?;
    } else {
        out.write_all(rendered.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn weak(a: WeakArgs, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let Loaded { spec, digest } = load(&a.input, stdin)?;
    let result = run_weak(&spec)?;
    let mut warnings = Vec::new();
    if result.max_weakness > WEAKNESS_WARN {
        warnings.push(format!(
            "max dgd/t_c = {} exceeds {WEAKNESS_WARN}; the first-order estimate may be inaccurate",
            result.max_weakness
        ));
    }
    for w in &warnings {
        writeln!(err, "warning: {w}")?;
    }
    let report = RunReport {
        mean_time: result.mean_time,
        transmission: result.norm_sq,
        engine: Engine::Weak,
        warnings,
        input_sha256: digest,
        shifts: Some(result.per_element_shifts),
    };
    let rendered = if a.json { json(&report) } else { report.render() };
    out.write_all(rendered.as_bytes())?;
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    let Loaded { spec, .. } = load(&a.input, stdin)?;
    let with_exact = a.engine == EngineArg::Exact;
    let result = sweep_polarization(&spec, a.grid, with_exact)?;
    if a.json {
        out.write_all(json(&result).as_bytes())?;
        return Ok(EXIT_OK);
    }
    let mut csv = String::from(if with_exact { "phi,t_weak,t_exact\n" } else { "phi,t_weak\n" });
    for row in &result.rows {
        write!(csv, "{},{}", num(row.phi), opt_num(row.t_weak)).unwrap();
        if with_exact {
            write!(csv, ",{}", opt_num(row.t_exact)).unwrap();
        }
        csv.push('\n');
    }
    out.write_all(csv.as_bytes())?;
    Ok(EXIT_OK)
}

fn optimize(a: OptimizeArgs, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    let Loaded { spec, .. } = load(&a.input, stdin)?;
    let result = optimize_arrangement(&spec, a.objective.into(), a.grid, a.engine.into())?;
    out.write_all(json(&result).as_bytes())?;
    Ok(EXIT_OK)
}

/// Rescales the file's dgd values so `max dgd / t_c` hits each ratio and
/// compares the engines there.
pub fn validation_table(spec: &NetworkSpec, ratios: &[f64], bound_factor: f64) -> Result<Vec<ValidationRow>, Error> {
    let tc = spec.pulse.t_c();
    let max = spec.max_dgd();
    ratios
        .iter()
        .map(|&ratio| {
            let scaled = if max > 0.0 {
                spec.scale_dgd(ratio * tc / max)
            } else {
                spec.clone()
            };
            let exact = run_exact(&scaled)?.mean_time;
            let weak = run_weak(&scaled)?.mean_time;
            let discrepancy = (exact - weak).abs();
            let bound = bound_factor * scaled.total_dgd() * scaled.weakness().powi(2);
            Ok(ValidationRow {
                ratio,
                discrepancy,
                bound,
                ok: discrepancy <= bound,
            })
        })
        .collect()
}

fn validate(a: ValidateArgs, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(usage("--ratios must be positive and finite"));
    }
    let Loaded { spec, .. } = load(&a.input, stdin)?;
    let table = validation_table(&spec, &a.ratios, a.bound_factor)?;
    if a.json {
        out.write_all(json(&table).as_bytes())?;
    } else {
        let mut csv = String::from("ratio,discrepancy,bound,ok\n");
        for r in &table {
            writeln!(csv, "{},{},{},{}", num(r.ratio), num(r.discrepancy), num(r.bound), r.ok).unwrap();
        }
        out.write_all(csv.as_bytes())?;
    }
    Ok(if table.iter().all(|r| r.ok) { EXIT_OK } else { EXIT_BOUND })
}
