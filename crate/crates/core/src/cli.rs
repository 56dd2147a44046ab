//! `qlimits` command line: every module as a subcommand, CSV / JSON / SVG out.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 1 numerical failure
//! (with a JSON diagnostic on stderr).

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::curvature::{response_first_principles, PathSpec};
use crate::error::Error;
use crate::kernels::{self, TrackingMode};
use crate::limits::{
    self, Bandwidth, KernelView, MeasurementConfig, MirrorResponse, Source, SpectrumGrid,
};
use crate::plot::{Plot, Scale, Series};
use crate::simulate::{self, SynthesisSpec, Target, TimeSeries, Window};
use crate::timedomain::{b_time, B_time};
use crate::units::{PhysicalConstants, UnitSystem};

/// Environment variable naming a default JSON config file.
pub const CONFIG_ENV: &str = "QLIMITS_CONFIG";

pub const KERNEL_HEADER: &str = "x,b_closed,b_oracle,abs_diff";
pub const TIMEDOMAIN_HEADER: &str = "t,b_regular,B";
pub const FIRST_PRINCIPLES_HEADER: &str = "omega,value,oracle,rel_err";
pub const BUDGET_HEADER: &str = "omega,sql,vql,gql,dominant";
pub const SIMULATE_HEADER: &str = "t,q";
pub const PSD_HEADER: &str = "omega,estimate,target,lower3sigma,upper3sigma";

#[derive(Debug, Parser)]
#[command(name = "qlimits", version, about = "Quantum limits on interferometric length measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Response kernel b(x): closed form against the angular quadrature.
    Kernel(KernelArgs),
    /// Time-domain kernel b(t) and its integral B(t).
    Timedomain(TimedomainArgs),
    /// Length-noise spectrum from the curvature correlation.
    FirstPrinciples(FirstPrinciplesArgs),
    /// SQL, VQL and GQL spectra on a frequency grid.
    Budget(BudgetArgs),
    /// Mass where the vacuum-pressure and gravitational limits meet.
    Crossover(CrossoverArgs),
    /// Gaussian sample path for a limit spectrum.
    Simulate(SimulateArgs),
    /// Welch estimate of a simulated path against its target.
    Psd(PsdArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Si,
    Natural,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Si => UnitSystem::Si,
            Units::Natural => UnitSystem::Natural,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
    /// Raw little-endian f64 samples (simulate only).
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    Sql,
    Vql,
    Gql,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WindowArg {
    Hann,
    Rectangular,
}

#[derive(Debug, Args)]
struct Common {
    /// Unit system [default: natural, or SI for budget/crossover]
    #[arg(long, value_enum, global = true)]
    units: Option<Units>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Output file (stdout when absent)
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// JSON file with "hbar", "c", "G" replacing the CODATA values (SI only)
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    c: Option<f64>,
    #[arg(long = "G", global = true)]
    g: Option<f64>,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, default_value = "one-way")]
    mode: TrackingMode,
    #[arg(long, default_value_t = 0.01)]
    x_min: f64,
    #[arg(long, default_value_t = 100.0)]
    x_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    log: bool,
    /// Absolute tolerance of the quadrature oracle
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TimedomainArgs {
    #[arg(long, default_value = "one-way")]
    mode: TrackingMode,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long, default_value_t = 601)]
    points: usize,
    /// Sidecar JSON for the impulses [default: <output>.impulses.json]
    #[arg(long)]
    impulses: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct FirstPrinciplesArgs {
    #[arg(long, default_value = "one-way")]
    mode: TrackingMode,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Angular frequencies (repeat or comma-separate)
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    omega: Vec<f64>,
    /// Relative tolerance of the angular quadrature
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Arm direction x,y,z
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 1.0], allow_negative_numbers = true)]
    direction: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 10.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.334e-5)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
    /// JSON {"omegas": [...], "values": [...]} for a frequency-dependent Φ
    #[arg(long, conflicts_with = "phi")]
    phi_table: Option<PathBuf>,
    #[arg(long, default_value = "two-way")]
    mode: TrackingMode,
    #[arg(long, default_value_t = 1.0)]
    omega_min: f64,
    #[arg(long, default_value_t = 1e6)]
    omega_max: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long)]
    log: bool,
    /// Use the large-frequency constant of b instead of b(ωτ)
    #[arg(long)]
    envelope: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CrossoverArgs {
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SynthesisArgs {
    #[arg(long, value_enum, default_value = "gql")]
    source: SourceArg,
    #[arg(long, default_value = "two-way")]
    mode: TrackingMode,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
    #[arg(long, default_value_t = 1 << 20)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Infrared cutoff (rad per time unit); required, no default
    #[arg(long)]
    omega_min: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    synth: SynthesisArgs,
    /// Metadata JSON [default: <output>.meta.json]
    #[arg(long)]
    metadata: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct PsdArgs {
    #[command(flatten)]
    synth: SynthesisArgs,
    /// Samples written by `simulate` (CSV, or .bin); synthesized when absent
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 4096)]
    segment: usize,
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    #[arg(long, value_enum, default_value = "hann")]
    window: WindowArg,
    #[command(flatten)]
    common: Common,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Library(e)) => {
            let code = match e {
                Error::Numerical { .. } | Error::Singularity(_) => 1,
                _ => 2,
            };
            eprintln!("{}", diagnostic(&e));
            code
        }
    }
}

fn diagnostic(e: &Error) -> String {
    let kind = match e {
        Error::Domain(_) => "domain",
        Error::Argument(_) => "argument",
        Error::Singularity(_) => "singularity",
        Error::Numerical { .. } => "numerical",
        Error::Config(_) => "config",
    };
    let mut v = json!({ "error": kind, "message": e.to_string() });
    if let Error::Numerical { estimate, error_estimate, .. } = e {
        v["estimate"] = json!(estimate);
        v["error_estimate"] = json!(error_estimate);
    }
    v.to_string()
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Kernel(a) => kernel(a),
        Command::Timedomain(a) => timedomain(a),
        Command::FirstPrinciples(a) => first_principles(a),
        Command::Budget(a) => budget(a),
        Command::Crossover(a) => crossover(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Psd(a) => psd(a),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    hbar: Option<f64>,
    c: Option<f64>,
    #[serde(rename = "G")]
    g: Option<f64>,
}

impl Common {
    fn system(&self, default: UnitSystem) -> UnitSystem {
        self.units.map(Into::into).unwrap_or(default)
    }

    /// Constants for the chosen system: config file (SI only), then flags.
    fn constants(&self, system: UnitSystem) -> CliResult<PhysicalConstants> {
        let mut k = PhysicalConstants::for_system(system);
        if let (UnitSystem::Si, Some(path)) = (system, &self.config) {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
            let file: ConfigFile = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
            k.hbar = file.hbar.unwrap_or(k.hbar);
            k.c = file.c.unwrap_or(k.c);
            k.g = file.g.unwrap_or(k.g);
        }
        k.hbar = self.hbar.unwrap_or(k.hbar);
        k.c = self.c.unwrap_or(k.c);
        k.g = self.g.unwrap_or(k.g);
        k.validate()?;
        Ok(k)
    }

    fn formats(&self, allowed: &[Format]) -> CliResult<Format> {
        if allowed.contains(&self.format) {
            Ok(self.format)
        } else {
            Err(Failure::Usage(format!("format {:?} is not available here", self.format).to_lowercase()))
        }
    }

    fn emit(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.output {
            Some(p) => fs::write(p, bytes)?,
            None => io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }

    fn sidecar(&self, explicit: &Option<PathBuf>, suffix: &str) -> Option<PathBuf> {
        explicit.clone().or_else(|| {
            self.output.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(suffix);
                PathBuf::from(s)
            })
        })
    }
}

fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:e}")
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.join(","));
    }
    out
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn kernel(a: KernelArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Natural);
    let format = c.formats(&[Format::Csv, Format::Json, Format::Svg])?;
    positive("tol", a.tol)?;
    let xs = kernels::grid(a.x_min, a.x_max, a.points, a.log)?;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let closed = kernels::b_closed(a.mode, x)?;
        let oracle = kernels::b_angular_oracle(a.mode, x, a.tol)?;
        rows.push((x, closed, oracle, (closed - oracle).abs()));
    }
    let out = match format {
        Format::Csv => csv(
            KERNEL_HEADER,
            rows.iter().map(|&(x, b, o, d)| vec![num(x), num(b), num(o), num(d)]),
        ),
        Format::Json => json_text(&json!({
            "units": system.label(),
            "mode": a.mode.as_str(),
            "max_abs_diff": rows.iter().map(|r| r.3).fold(0.0, f64::max),
            "rows": rows.iter().map(|&(x, b, o, d)| json!({"x": x, "b_closed": b, "b_oracle": o, "abs_diff": d})).collect::<Vec<_>>(),
        })),
        _ => {
            let scale = if a.log { Scale::Log } else { Scale::Linear };
            Plot::new(format!("b(x), {}", a.mode), "x", "b")
                .scales(scale, scale)
                .with_series(Series::new("closed form", xs.clone(), rows.iter().map(|r| r.1).collect()))
                .with_series(Series::new("quadrature", xs, rows.iter().map(|r| r.2).collect()))
                .to_svg()?
        }
    };
    c.emit(out.as_bytes())
}

fn timedomain(a: TimedomainArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Natural);
    let format = c.formats(&[Format::Csv, Format::Json, Format::Svg])?;
    if a.points < 2 || !(a.t_min < a.t_max) {
        return Err(Failure::Usage("need --points ≥ 2 and --t-min < --t-max".into()));
    }
    let b = b_time(a.mode, a.tau)?;
    let big = B_time(a.mode, a.tau)?;
    let step = (a.t_max - a.t_min) / (a.points - 1) as f64;
    let rows: Vec<(f64, f64, f64)> = (0..a.points)
        .map(|i| {
            let t = if i + 1 == a.points { a.t_max } else { a.t_min + step * i as f64 };
            (t, b.regular(t), big.regular(t))
        })
        .collect();
    let impulses = json!({
        "units": system.label(),
        "mode": a.mode.as_str(),
        "tau": a.tau,
        "impulses": b.impulses().iter().map(|i| json!({"t": i.location, "weight": i.weight})).collect::<Vec<_>>(),
    });
    let out = match format {
        Format::Csv => {
            if let Some(path) = c.sidecar(&a.impulses, ".impulses.json") {
                fs::write(path, json_text(&impulses))?;
            }
            csv(TIMEDOMAIN_HEADER, rows.iter().map(|&(t, r, bb)| vec![num(t), num(r), num(bb)]))
        }
        Format::Json => json_text(&json!({
            "units": system.label(),
            "mode": a.mode.as_str(),
            "tau": a.tau,
            "impulses": impulses["impulses"],
            "rows": rows.iter().map(|&(t, r, bb)| json!({"t": t, "b_regular": r, "B": bb})).collect::<Vec<_>>(),
        })),
        _ => {
            let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
            Plot::new(format!("b(t) and B(t), {}", a.mode), "t", "")
                .with_series(Series::new("b regular part", ts.clone(), rows.iter().map(|r| r.1).collect()))
                .with_series(Series::new("B", ts, rows.iter().map(|r| r.2).collect()))
                .to_svg()?
        }
    };
    c.emit(out.as_bytes())
}

fn first_principles(a: FirstPrinciplesArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Natural);
    let format = c.formats(&[Format::Csv, Format::Json])?;
    let k = c.constants(system)?;
    let lp2 = k.planck()?.length_p.powi(2);
    positive("tol", a.tol)?;
    let path = PathSpec::new(a.mode, [a.direction[0], a.direction[1], a.direction[2]], a.tau)?;
    let mut results = Vec::new();
    for &w in &a.omega {
        positive("omega", w)?;
        let oracle = limits::gql_spectrum(a.mode, a.tau, w, &k)?;
        let value = lp2 * response_first_principles(&path, w, a.tol * oracle / lp2)?;
        results.push((w, value, oracle, ((value - oracle) / oracle).abs()));
    }
    let out = match format {
        Format::Csv => csv(
            FIRST_PRINCIPLES_HEADER,
            results.iter().map(|&(w, v, o, r)| vec![num(w), num(v), num(o), num(r)]),
        ),
        _ => {
            let objs: Vec<Value> = results
                .iter()
                .map(|&(w, v, o, r)| {
                    json!({"units": system.label(), "mode": a.mode.as_str(), "tau": a.tau,
                           "omega": w, "value": v, "oracle": o, "rel_err": r})
                })
                .collect();
            json_text(&if objs.len() == 1 { objs[0].clone() } else { Value::Array(objs) })
        }
    };
    c.emit(out.as_bytes())
}

fn budget(a: BudgetArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Si);
    let format = c.formats(&[Format::Csv, Format::Json, Format::Svg])?;
    let k = c.constants(system)?;
    let phi = match &a.phi_table {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<MirrorResponse>(&text)
                .map_err(|e| Failure::Usage(format!("phi table {}: {e}", path.display())))?
        }
        None => MirrorResponse::Constant(a.phi),
    };
    let config = MeasurementConfig {
        mass: a.mass,
        tau: a.tau,
        phi,
        mode: a.mode,
        bandwidth: Bandwidth {
            omega_center: 0.5 * (a.omega_min + a.omega_max),
            delta_omega: a.omega_max - a.omega_min,
        },
    };
    let omegas = kernels::grid(a.omega_min, a.omega_max, a.points, a.log)?;
    let view = if a.envelope { KernelView::Envelope } else { KernelView::Instantaneous };
    let table = limits::noise_budget(&config, &omegas, &k, view)?;
    let out = match format {
        Format::Csv => csv(
            BUDGET_HEADER,
            table.rows.iter().map(|r| {
                vec![num(r.omega), num(r.sql), num(r.vql), num(r.gql), r.dominant.label().to_string()]
            }),
        ),
        Format::Json => json_text(&json!({
            "units": system.label(),
            "mass": a.mass,
            "tau": a.tau,
            "mode": a.mode.as_str(),
            "envelope": a.envelope,
            "rows": table.rows,
        })),
        _ => {
            let scale = if a.log { Scale::Log } else { Scale::Linear };
            let vql = table.grid(Source::Vql)?;
            let gql = table.grid(Source::Gql)?;
            Plot::new(format!("VQL and GQL, m = {}", a.mass), "omega", "C_qq")
                .scales(scale, Scale::Log)
                .with_series(Series::new("VQL", omegas.clone(), vql.values().to_vec()))
                .with_series(Series::new("GQL", omegas, gql.values().to_vec()))
                .to_svg()?
        }
    };
    c.emit(out.as_bytes())
}

fn crossover(a: CrossoverArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Si);
    c.formats(&[Format::Json, Format::Csv])?;
    let k = c.constants(system)?;
    let m = limits::crossover_mass(a.phi, a.b, &k)?;
    let mp = k.planck()?.mass_p;
    let out = json_text(&json!({
        "units": system.label(),
        "phi": a.phi,
        "b": a.b,
        "m_star_kg": m,
        "m_star_over_planck": m / mp,
    }));
    c.emit(out.as_bytes())
}

impl SynthesisArgs {
    fn spec(&self, k: PhysicalConstants) -> SynthesisSpec {
        let target = match self.source {
            SourceArg::Gql => Target::Gql { mode: self.mode, tau: self.tau, constants: k },
            SourceArg::Vql => Target::Vql { mass: self.mass, phi: self.phi, constants: k },
            SourceArg::Sql => Target::Sql { mass: self.mass, constants: k },
        };
        SynthesisSpec { target, n_samples: self.n, dt: self.dt, seed: self.seed, omega_min: self.omega_min }
    }

    fn metadata(&self, system: UnitSystem) -> Value {
        json!({
            "units": system.label(),
            "source": format!("{:?}", self.source).to_uppercase(),
            "mode": self.mode.as_str(),
            "tau": self.tau,
            "mass": self.mass,
            "phi": self.phi,
            "n_samples": self.n,
            "dt": self.dt,
            "seed": self.seed,
            "omega_min": self.omega_min,
            "spectrum": "symmetrized (C[w] + C[-w])/2",
        })
    }
}

fn simulate_cmd(a: SimulateArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Natural);
    let format = c.formats(&[Format::Csv, Format::Bin, Format::Json, Format::Svg])?;
    let k = c.constants(system)?;
    let series = simulate::synthesize(&a.synth.spec(k))?;
    let mut meta = a.synth.metadata(system);
    meta["variance"] = json!(series.variance());
    meta["format"] = json!(format!("{format:?}").to_lowercase());
    let ts = || (0..series.len()).map(|i| i as f64 * series.dt);
    let bytes = match format {
        Format::Csv => csv(
            SIMULATE_HEADER,
            ts().zip(&series.samples).map(|(t, &q)| vec![num(t), num(q)]),
        )
        .into_bytes(),
        Format::Bin => series.samples.iter().flat_map(|q| q.to_le_bytes()).collect(),
        Format::Json => {
            let mut v = meta.clone();
            v["samples"] = json!(series.samples);
            json_text(&v).into_bytes()
        }
        Format::Svg => Plot::new("sample path", "t", "q")
            .with_series(Series::new("q", ts().collect(), series.samples.clone()))
            .to_svg()?
            .into_bytes(),
    };
    c.emit(&bytes)?;
    if format != Format::Json {
        if let Some(path) = c.sidecar(&a.metadata, ".meta.json") {
            fs::write(path, json_text(&meta))?;
        }
    }
    Ok(())
}

fn read_samples(path: &Path, dt: f64) -> CliResult<TimeSeries> {
    let bytes = fs::read(path)?;
    let bad = |m: String| Failure::Usage(format!("{}: {m}", path.display()));
    let samples = if path.extension().is_some_and(|e| e == "bin") {
        if bytes.len() % 8 != 0 {
            return Err(bad("length is not a multiple of 8 bytes".into()));
        }
        bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect()
    } else {
        let text = String::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
        text.lines()
            .skip(1)
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let field = l.split(',').nth(1).ok_or_else(|| bad(format!("no q column in {l:?}")))?;
                field.trim().parse::<f64>().map_err(|e| bad(e.to_string()))
            })
            .collect::<CliResult<Vec<f64>>>()?
    };
    Ok(TimeSeries { samples, dt, seed: 0 })
}

fn psd(a: PsdArgs) -> CliResult<()> {
    let c = &a.common;
    let system = c.system(UnitSystem::Natural);
    let format = c.formats(&[Format::Csv, Format::Json, Format::Svg])?;
    let k = c.constants(system)?;
    let spec = a.synth.spec(k);
    spec.validate()?;
    let series = match &a.input {
        Some(p) => read_samples(p, a.synth.dt)?,
        None => simulate::synthesize(&spec)?,
    };
    let window = match a.window {
        WindowArg::Hann => Window::Hann,
        WindowArg::Rectangular => Window::Rectangular,
    };
    let est = simulate::estimate_psd(&series, a.segment, a.overlap, window)?;
    let (lo, hi) = est.band(3.0);
    let mut rows = Vec::with_capacity(est.grid.len());
    for (&w, &v) in est.grid.omegas().iter().zip(est.grid.values()) {
        let target = if w < spec.omega_min { 0.0 } else { spec.target.symmetrized(w)? };
        rows.push((w, v, target, lo * target, hi * target));
    }
    let out = match format {
        Format::Csv => csv(
            PSD_HEADER,
            rows.iter().map(|&(w, v, t, l, h)| vec![num(w), num(v), num(t), num(l), num(h)]),
        ),
        Format::Json => {
            let checked: Vec<_> = rows.iter().filter(|r| r.2 > 0.0).collect();
            let inside = checked.iter().filter(|r| r.1 >= r.3 && r.1 <= r.4).count();
            json_text(&json!({
                "units": system.label(),
                "segments": est.segments,
                "dof": est.dof,
                "fraction_in_band": inside as f64 / checked.len().max(1) as f64,
                "rows": rows.iter().map(|&(w, v, t, l, h)| json!({
                    "omega": w, "estimate": v, "target": t, "lower3sigma": l, "upper3sigma": h
                })).collect::<Vec<_>>(),
            }))
        }
        _ => {
            let ws: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let grid = SpectrumGrid::new(ws.clone(), rows.iter().map(|r| r.2).collect(), Source::Background)?;
            Plot::new("Welch estimate against target", "omega", "S")
                .scales(Scale::Log, Scale::Log)
                .with_series(Series::new("estimate", ws, est.grid.values().to_vec()))
                .with_series(Series::new("target", grid.omegas().to_vec(), grid.values().to_vec()))
                .to_svg()?
        }
    };
    c.emit(out.as_bytes())
}
