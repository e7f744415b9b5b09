//! The `cdquench` command line.
//!
//! Subcommands: `lattice`, `agp`, `exact1d`, `circuit`. Lattices are given as
//! `chain:N`, `square:WxH`, `ladder:N`, `heavyhex:RxC` or `file:PATH`.
//! With `--out DIR` every output file is written atomically next to a
//! `manifest.json`; without it the main table goes to stdout.
//!
//! Exit codes: 0 success, 2 usage error, 3 capacity error, 1 anything else.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agp::{alpha1_chain_obc, alpha1_periodic_continuum, alpha1_variational};
use crate::circuit::{build_trotter, gate_counts, EvalPolicy, FieldSign, QuenchConfig, StepPolicy};
use crate::error::{Error, Result};
use crate::exact1d::{cumulants_from_profile, excitation_profile, kink_distribution, CumulantConvention};
use crate::lattice::{Geometry, LatticeGraph};
use crate::statevector::{kink_distribution_exact, sample_bitstrings, StateVector};
use crate::stats::{cumulants_from_samples, DefectStats};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeSpec {
    Chain { n: usize },
    Square { width: usize, height: usize },
    Ladder { n: usize },
    HeavyHex { rows: usize, cols: usize },
    File { path: PathBuf },
}

impl LatticeSpec {
    pub fn build(&self) -> Result<LatticeGraph> {
        match self {
            LatticeSpec::Chain { n } => LatticeGraph::chain(*n),
            LatticeSpec::Square { width, height } => LatticeGraph::square(*width, *height),
            LatticeSpec::Ladder { n } => LatticeGraph::ladder(*n),
            LatticeSpec::HeavyHex { rows, cols } => LatticeGraph::heavy_hex(*rows, *cols),
            LatticeSpec::File { path } => LatticeGraph::load_edge_list(&std::fs::read_to_string(path)?),
        }
    }
}

fn parse_pair(text: &str) -> Option<(usize, usize)> {
    let (a, b) = text.split_once(['x', 'X'])?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for LatticeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("lattice '{s}' is not of the form kind:args"))?;
        let bad = || format!("cannot parse lattice arguments in '{s}'");
        match kind.to_ascii_lowercase().as_str() {
            "chain" => Ok(LatticeSpec::Chain {
                n: arg.trim().parse().map_err(|_| bad())?,
            }),
            "ladder" => Ok(LatticeSpec::Ladder {
                n: arg.trim().parse().map_err(|_| bad())?,
            }),
            "square" => {
                let (width, height) = parse_pair(arg).ok_or_else(bad)?;
                Ok(LatticeSpec::Square { width, height })
            }
            "heavyhex" | "heavy_hex" => {
                let (rows, cols) = parse_pair(arg).ok_or_else(bad)?;
                Ok(LatticeSpec::HeavyHex { rows, cols })
            }
            "file" if !arg.is_empty() => Ok(LatticeSpec::File { path: arg.into() }),
            _ => Err(format!("unknown lattice kind in '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyArg {
    Left,
    Mid,
    Right,
}

impl From<PolicyArg> for EvalPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Left => EvalPolicy::Left,
            PolicyArg::Mid => EvalPolicy::Mid,
            PolicyArg::Right => EvalPolicy::Right,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignArg {
    Negative,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    Pair,
    Literal,
}

#[derive(Debug, Parser)]
#[command(name = "cdquench", version, about = "Digitized counterdiabatic quenches of the transverse-field Ising model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a lattice and print its edge list.
    Lattice(LatticeArgs),
    /// Tabulate the first-order AGP coefficient alpha1(lambda).
    Agp(AgpArgs),
    /// Exact cumulants of the periodic chain (free fermions).
    Exact1d(Exact1dArgs),
    /// Build, simulate and measure a Trotterized quench circuit.
    Circuit(CircuitArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Output directory; files are written atomically with a manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args, Serialize)]
pub struct Couplings {
    /// Transverse field g.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Ising coupling J.
    #[arg(long = "J", alias = "j", default_value_t = 1.0)]
    pub j: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long)]
    pub lattice: LatticeSpec,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct AgpArgs {
    #[arg(long)]
    pub lattice: LatticeSpec,
    #[command(flatten)]
    pub couplings: Couplings,
    /// Number of evenly spaced lambda points in [0, 1].
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct CdFlag {
    /// Add the first-order counterdiabatic term.
    #[arg(long, overrides_with = "no_cd")]
    pub cd: bool,
    #[arg(long = "no-cd", overrides_with = "cd")]
    #[serde(skip)]
    pub no_cd: bool,
}

impl CdFlag {
    fn enabled(&self) -> bool {
        self.cd && !self.no_cd
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Exact1dArgs {
    /// Number of sites (even, at least 4).
    #[arg(long)]
    pub n: usize,
    /// Quench times, comma separated (units of 1/J).
    #[arg(long = "T", alias = "t", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[command(flatten)]
    pub cd: CdFlag,
    #[command(flatten)]
    pub couplings: Couplings,
    #[arg(long, value_enum, default_value_t = ConventionArg::Pair)]
    pub convention: ConventionArg,
    /// Also write the kink-number PMF per T (requires --out).
    #[arg(long)]
    pub pmf: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct CircuitArgs {
    #[arg(long)]
    pub lattice: LatticeSpec,
    /// Quench times, comma separated (units of 1/J).
    #[arg(long = "T", alias = "t", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    /// Requested Trotter step.
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[command(flatten)]
    pub cd: CdFlag,
    #[command(flatten)]
    pub couplings: Couplings,
    #[arg(long, default_value_t = 20_000)]
    pub shots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the exact kink distribution instead of sampling.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value_t = PolicyArg::Mid)]
    pub eval_policy: PolicyArg,
    /// Maximum number of Trotter steps once T >= 0.8/J.
    #[arg(long, default_value_t = 6)]
    pub step_cap: usize,
    #[arg(long, value_enum, default_value_t = SignArg::Negative)]
    pub field_sign: SignArg,
    /// Also write each gate sequence as JSON (requires --out).
    #[arg(long)]
    pub emit_circuit: bool,
    #[command(flatten)]
    pub output: Output,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'static str,
    pub config: &'a C,
    pub seed: Option<u64>,
    /// Per-point settings derived from the arguments, e.g. Trotter steps.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub resolved: Vec<serde_json::Value>,
    pub version: &'static str,
    pub outputs: Vec<String>,
}

/// Collects outputs: files under `--out`, or the main table on stdout.
struct Sink<'a> {
    dir: Option<PathBuf>,
    stdout: &'a mut dyn Write,
    written: Vec<String>,
    resolved: Vec<serde_json::Value>,
}

impl<'a> Sink<'a> {
    fn new(dir: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
            stdout,
            written: Vec::new(),
            resolved: Vec::new(),
        })
    }

    fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    fn file(&mut self, name: &str, contents: &str) -> Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        write_atomic(&dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn main(&mut self, name: &str, contents: &str) -> Result<()> {
        if self.has_dir() {
            self.file(name, contents)
        } else {
            self.stdout.write_all(contents.as_bytes())?;
            Ok(())
        }
    }

    fn finish<C: Serialize>(mut self, command: &'static str, config: &C, seed: Option<u64>) -> Result<()> {
        if self.dir.is_none() {
            return Ok(());
        }
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let manifest = RunManifest {
            command,
            config,
            seed,
            resolved: std::mem::take(&mut self.resolved),
            version: env!("CARGO_PKG_VERSION"),
            outputs,
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        self.file("manifest.json", &text)
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn render<R: Serialize>(format: OutputFormat, header: &[&str], rows: &[Vec<String>], records: &[R]) -> Result<String> {
    match format {
        OutputFormat::Csv => csv_table(header, rows),
        OutputFormat::Json => Ok(serde_json::to_string_pretty(records)? + "\n"),
    }
}

fn table_name(stem: &str, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format!("{stem}.csv"),
        OutputFormat::Json => format!("{stem}.json"),
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::param(format!("quench time {t} must be positive")));
    }
    Ok(())
}

fn geometry_name(g: Geometry) -> String {
    serde_json::to_value(g)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn cmd_lattice(args: &LatticeArgs, stdout: &mut dyn Write) -> Result<()> {
    let graph = args.lattice.build()?;
    let mut sink = Sink::new(args.output.out.as_deref(), stdout)?;
    match args.output.format {
        OutputFormat::Csv => sink.main("lattice.txt", &graph.to_edge_list())?,
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Summary<'a> {
                n_sites: usize,
                n_edges: usize,
                geometry: String,
                max_degree: usize,
                triangle_free: bool,
                edges: &'a [(usize, usize)],
            }
            let summary = Summary {
                n_sites: graph.n_sites(),
                n_edges: graph.n_edges(),
                geometry: geometry_name(graph.geometry()),
                max_degree: graph.max_degree(),
                triangle_free: graph.is_triangle_free(),
                edges: graph.edges(),
            };
            sink.main("lattice.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;
        }
    }
    sink.finish("lattice", args, None)
}

#[derive(Serialize)]
struct AgpRow {
    lambda: f64,
    alpha1_variational: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha1_chain_obc: Option<f64>,
    alpha1_periodic_continuum: f64,
}

fn cmd_agp(args: &AgpArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.points < 2 {
        return Err(Error::param("need at least two lambda points"));
    }
    let graph = args.lattice.build()?;
    let (g, j) = (args.couplings.g, args.couplings.j);
    let chain = graph.geometry() == Geometry::Chain;
    let records = (0..args.points)
        .map(|i| {
            let lambda = i as f64 / (args.points - 1) as f64;
            Ok(AgpRow {
                lambda,
                alpha1_variational: alpha1_variational(&graph, g, j, lambda)?.alpha1,
                alpha1_chain_obc: if chain {
                    Some(alpha1_chain_obc(graph.n_sites(), g, j, lambda)?.alpha1)
                } else {
                    None
                },
                alpha1_periodic_continuum: alpha1_periodic_continuum(g, j, lambda)?.alpha1,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header = vec!["lambda", "alpha1_variational"];
    if chain {
        header.push("alpha1_chain_obc");
    }
    header.push("alpha1_periodic_continuum");
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.lambda.to_string(), r.alpha1_variational.to_string()];
            if let Some(c) = r.alpha1_chain_obc {
                row.push(c.to_string());
            }
            row.push(r.alpha1_periodic_continuum.to_string());
            row
        })
        .collect();

    let mut sink = Sink::new(args.output.out.as_deref(), stdout)?;
    let text = render(args.output.format, &header, &rows, &records)?;
    sink.main(&table_name("agp", args.output.format), &text)?;
    sink.finish("agp", args, None)
}

#[derive(Serialize)]
struct Exact1dRow {
    #[serde(rename = "T")]
    t: f64,
    kappa1_density: f64,
    kappa2_density: f64,
    kappa3_density: f64,
    cd_flag: bool,
}

fn cmd_exact1d(args: &Exact1dArgs, stdout: &mut dyn Write) -> Result<()> {
    if args.n < 4 || args.n % 2 != 0 {
        return Err(Error::InvalidSize(format!("exact1d needs an even n >= 4, got {}", args.n)));
    }
    check_times(&args.t)?;
    let cd = args.cd.enabled();
    let convention = match args.convention {
        ConventionArg::Pair => CumulantConvention::PairModel,
        ConventionArg::Literal => CumulantConvention::LiteralIntegral,
    };
    let mut sink = Sink::new(args.output.out.as_deref(), stdout)?;
    let mut records = Vec::with_capacity(args.t.len());
    for &t in &args.t {
        let cfg = QuenchConfig::new(t, 1).couplings(args.couplings.g, args.couplings.j);
        let profile = excitation_profile(args.n, &cfg, cd)?;
        let [k1, k2, k3] = cumulants_from_profile(&profile, convention).density(args.n);
        records.push(Exact1dRow {
            t,
            kappa1_density: k1,
            kappa2_density: k2,
            kappa3_density: k3,
            cd_flag: cd,
        });
        if args.pmf && sink.has_dir() {
            let pmf = kink_distribution(&profile).support();
            let name = format!("pmf_T{t}_{}.json", if cd { "cd" } else { "nocd" });
            sink.file(&name, &(serde_json::to_string(&pmf)? + "\n"))?;
        }
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.t.to_string(),
                r.kappa1_density.to_string(),
                r.kappa2_density.to_string(),
                r.kappa3_density.to_string(),
                r.cd_flag.to_string(),
            ]
        })
        .collect();
    let header = ["T", "kappa1_density", "kappa2_density", "kappa3_density", "cd_flag"];
    let text = render(args.output.format, &header, &rows, &records)?;
    sink.main(&table_name("exact1d", args.output.format), &text)?;
    sink.finish("exact1d", args, None)
}

#[derive(Serialize)]
struct CircuitRow {
    #[serde(rename = "T")]
    t: f64,
    steps: usize,
    dt: f64,
    cd: bool,
    kappa1: f64,
    kappa2: f64,
    kappa3: f64,
    se: [f64; 3],
    shots: usize,
    depth: usize,
    two_qubit_gates: usize,
}

fn cmd_circuit(args: &CircuitArgs, stdout: &mut dyn Write) -> Result<()> {
    check_times(&args.t)?;
    if !args.exact && args.shots == 0 {
        return Err(Error::param("shots must be positive"));
    }
    let graph = args.lattice.build()?;
    // fail on capacity before doing any work
    if graph.n_sites() > crate::statevector::MAX_DENSE_SITES {
        return Err(Error::Capacity {
            what: "statevector",
            requested: graph.n_sites(),
            limit: crate::statevector::MAX_DENSE_SITES,
        });
    }
    if args.exact && graph.n_sites() > crate::statevector::MAX_PMF_SITES {
        return Err(Error::Capacity {
            what: "exact kink distribution",
            requested: graph.n_sites(),
            limit: crate::statevector::MAX_PMF_SITES,
        });
    }
    let policy = StepPolicy {
        cap: args.step_cap,
        ..StepPolicy::default()
    };
    let cd = args.cd.enabled();
    let sign = match args.field_sign {
        SignArg::Negative => FieldSign::Negative,
        SignArg::Positive => FieldSign::Positive,
    };

    let mut sink = Sink::new(args.output.out.as_deref(), stdout)?;
    let mut records = Vec::with_capacity(args.t.len());
    for &t in &args.t {
        let cfg = QuenchConfig::with_step_policy(t, args.dt, &policy)?
            .couplings(args.couplings.g, args.couplings.j)
            .cd(cd)
            .eval_policy(args.eval_policy.into())
            .field_sign(sign);
        let seq = build_trotter(&graph, &cfg)?;
        let counts = gate_counts(&seq);
        sink.resolved.push(serde_json::to_value(&cfg)?);
        let mut state = StateVector::zeros(graph.n_sites())?;
        state.run(&seq)?;

        let tag = format!("T{t}_{}", if cd { "cd" } else { "nocd" });
        let stats = if args.exact {
            DefectStats::from_pmf(&kink_distribution_exact(&state, &graph)?)
        } else {
            let samples = sample_bitstrings(&state, args.shots, args.seed)?;
            if sink.has_dir() {
                let mut text = String::with_capacity(samples.len() * (graph.n_sites() + 1));
                for s in &samples {
                    let _ = writeln!(text, "{s}");
                }
                sink.file(&format!("samples_{tag}.txt"), &text)?;
            }
            cumulants_from_samples(&samples, &graph)?
        };
        sink.file(&format!("stats_{tag}.json"), &(stats.to_json()? + "\n"))?;
        if args.emit_circuit {
            sink.file(&format!("circuit_{tag}.json"), &(seq.to_json()? + "\n"))?;
        }
        records.push(CircuitRow {
            t,
            steps: cfg.steps,
            dt: cfg.dt,
            cd,
            kappa1: stats.kappa1,
            kappa2: stats.kappa2,
            kappa3: stats.kappa3,
            se: stats.se,
            shots: stats.shots,
            depth: counts.depth,
            two_qubit_gates: counts.two_qubit,
        });
    }

    let header = [
        "T", "steps", "dt", "cd", "kappa1", "kappa2", "kappa3", "se1", "se2", "se3", "shots", "depth",
        "two_qubit_gates",
    ];
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.t.to_string(), r.steps.to_string(), r.dt.to_string(), r.cd.to_string()];
            row.extend([r.kappa1, r.kappa2, r.kappa3].map(|x| x.to_string()));
            row.extend(r.se.map(|x| x.to_string()));
            row.extend([r.shots, r.depth, r.two_qubit_gates].map(|x| x.to_string()));
            row
        })
        .collect();
    let text = render(args.output.format, &header, &rows, &records)?;
    sink.main(&table_name("circuit", args.output.format), &text)?;
    let seed = (!args.exact).then_some(args.seed);
    sink.finish("circuit", args, seed)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Lattice(a) => cmd_lattice(a, stdout),
        Command::Agp(a) => cmd_agp(a, stdout),
        Command::Exact1d(a) => cmd_exact1d(a, stdout),
        Command::Circuit(a) => cmd_circuit(a, stdout),
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::InvalidSize(_) | Error::InvalidParameter(_) | Error::LambdaOutOfRange(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_specs() {
        assert_eq!("chain:100".parse::<LatticeSpec>().unwrap(), LatticeSpec::Chain { n: 100 });
        assert_eq!(
            "square:6x4".parse::<LatticeSpec>().unwrap(),
            LatticeSpec::Square { width: 6, height: 4 }
        );
        assert_eq!("ladder:15".parse::<LatticeSpec>().unwrap(), LatticeSpec::Ladder { n: 15 });
        assert_eq!(
            "heavyhex:7x3".parse::<LatticeSpec>().unwrap(),
            LatticeSpec::HeavyHex { rows: 7, cols: 3 }
        );
        assert_eq!(
            "file:/tmp/g.txt".parse::<LatticeSpec>().unwrap(),
            LatticeSpec::File { path: "/tmp/g.txt".into() }
        );
        for bad in ["chain", "chain:x", "square:6", "torus:3", "file:"] {
            assert!(bad.parse::<LatticeSpec>().is_err(), "{bad}");
        }
        let hh = "heavyhex:7x3".parse::<LatticeSpec>().unwrap().build().unwrap();
        assert_eq!((hh.n_sites(), hh.n_edges()), (156, 176));
    }

    #[test]
    fn cd_flag_last_wins() {
        let cli = Cli::try_parse_from(["cdquench", "exact1d", "--n", "4", "--T", "1", "--cd", "--no-cd"]).unwrap();
        let Command::Exact1d(a) = cli.command else { panic!() };
        assert!(!a.cd.enabled());
        let cli = Cli::try_parse_from(["cdquench", "exact1d", "--n", "4", "--T", "1,2", "--no-cd", "--cd"]).unwrap();
        let Command::Exact1d(a) = cli.command else { panic!() };
        assert!(a.cd.enabled());
        assert_eq!(a.t, vec![1.0, 2.0]);
    }

    #[test]
    fn exit_codes() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["cdquench", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(
            run(["cdquench", "circuit", "--lattice", "chain:27", "--T", "0.1"], &mut out, &mut err),
            EXIT_CAPACITY
        );
        assert_eq!(
            run(["cdquench", "exact1d", "--n", "5", "--T", "0.1"], &mut out, &mut err),
            EXIT_USAGE
        );
    }
}
