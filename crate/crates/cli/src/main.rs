mod butterfly;
mod config;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use orbifold_hall::comparison::comparison_report;
use orbifold_hall::conductance::{hall_conductance, ConductanceOptions, FermiChoice};
use orbifold_hall::fuchsian::{cayley_ball, group_for, MAX_RADIUS};
use orbifold_hall::orbifold::cohomology_summary;
use orbifold_hall::search::{fraction_report, SearchBounds};
use orbifold_hall::spectral::{check_dense_dimension, use_sequential_linear_algebra};
use orbifold_hall::verify::{self, Fixture, Suite};
use orbifold_hall::{Error, OrbifoldSignature, Rational};

const SCHEMA_VERSION: u32 = 1;
const THREADS_ENV: &str = "ORBIHALL_THREADS";

const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_NO_GAP: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(name = "orbihall", version, about = "Fractional quantum numbers on hyperbolic 2-orbifolds")]
struct Cli {
    /// File of `key = value` lines supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic and φ = −χ_orb.
    #[command(args_override_self = true)]
    Euler(SigArg),
    /// Spherical, Euclidean or hyperbolic.
    #[command(args_override_self = true)]
    Classify(SigArg),
    /// Cohomology of the orbifold group with Z, R and U(1) coefficients.
    #[command(args_override_self = true)]
    Cohomology(SigArg),
    /// All signatures with a given φ.
    #[command(args_override_self = true)]
    Enumerate(EnumerateArgs),
    /// Harper spectra across a flux grid, as CSV.
    #[command(args_override_self = true)]
    Butterfly(ButterflyArgs),
    /// Harper spectrum at a single flux, as CSV.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Hall conductance pipeline.
    #[command(args_override_self = true)]
    Conductance(ConductanceArgs),
    /// Symplectic versus area cocycle comparison.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
    /// Export a Cayley ball as JSON.
    #[command(args_override_self = true)]
    Ball(BallArgs),
    /// Run the property suites.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Args, Serialize)]
struct SigArg {
    /// Signature such as "(1;6,6,6)".
    signature: String,
}

#[derive(Args, Serialize)]
struct EnumerateArgs {
    /// Target fraction P/Q.
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    #[arg(long, default_value_t = 4)]
    max_genus: u32,
    #[arg(long, default_value_t = 8)]
    max_points: u32,
    #[arg(long, default_value_t = 100)]
    max_order: u32,
    /// Reject φ ≤ 0 instead of listing spherical/Euclidean signatures.
    #[arg(long)]
    hyperbolic_only: bool,
}

#[derive(Args, Serialize)]
struct BallSpec {
    #[arg(long)]
    sig: String,
    #[arg(long, default_value_t = 3)]
    radius: usize,
}

#[derive(Args, Serialize)]
struct ButterflyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ball: BallSpec,
    /// start:stop:count, inclusive of both ends.
    #[arg(long, allow_hyphen_values = true)]
    theta_grid: String,
    /// Flux values per eigensolve batch; each finished batch is flushed.
    #[arg(long, default_value_t = 8)]
    chunk: usize,
    /// Continue an interrupted sweep in --output.
    #[arg(long)]
    resume: bool,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ball: BallSpec,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
}

#[derive(Args, Serialize)]
struct ConductanceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ball: BallSpec,
    /// Flux in radians per unit hyperbolic area.
    #[arg(long, conflicts_with = "flux_quanta", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Flux quanta q through the orbifold: θ = 2πq / Area.
    #[arg(long, allow_hyphen_values = true)]
    flux_quanta: Option<f64>,
    /// Fermi level, or "auto" for the midpoint of the widest gap.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    fermi: String,
    #[arg(long)]
    gap_threshold: Option<f64>,
    /// Support radius of the extracted projection (default R − 2).
    #[arg(long)]
    support: Option<usize>,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    #[arg(long, default_value = "(2;)")]
    sig: String,
    #[arg(long, default_value_t = 2.0 * PI / 5.0, allow_hyphen_values = true)]
    theta: f64,
    /// Comma-separated radii; the largest also hosts the triple checks.
    #[arg(long, default_value = "2,3,4")]
    radii: String,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct BallArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ball: BallSpec,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Regression fixture replacing the bundled one.
    #[arg(long)]
    fixture: Option<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a C,
    result: R,
}

enum Failure {
    Lib(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<String, Failure>;

fn json<C: Serialize, R: Serialize>(command: &str, config: &C, result: R) -> CmdResult {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::Precondition(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn parse_sig(s: &str) -> Result<OrbifoldSignature, Error> {
    s.parse()
}

fn io_err(e: io::Error) -> Failure {
    Failure::Lib(Error::Precondition(format!("i/o: {e}")))
}

fn run(cli: Cli) -> CmdResult {
    let format = cli.format;
    match &cli.command {
        Command::Euler(a) => {
            let sig = parse_sig(&a.signature)?;
            let (chi, phi) = (sig.euler_characteristic(), sig.phi());
            match format.unwrap_or(Format::Text) {
                Format::Json => {
                    #[derive(Serialize)]
                    struct R {
                        signature: String,
                        chi: Rational,
                        phi: Rational,
                        geometry: String,
                    }
                    let r = R {
                        signature: sig.to_string(),
                        chi,
                        phi,
                        geometry: sig.geometry().to_string(),
                    };
                    json("euler", a, r)
                }
                _ => Ok(format!(
                    "signature = {sig}\nchi = {chi}\nphi = {phi}\ngeometry = {}\n",
                    sig.geometry()
                )),
            }
        }
        Command::Classify(a) => {
            let sig = parse_sig(&a.signature)?;
            match format.unwrap_or(Format::Text) {
                Format::Json => json("classify", a, sig.geometry()),
                _ => Ok(format!("{}\n", sig.geometry())),
            }
        }
        Command::Cohomology(a) => {
            let sum = cohomology_summary(&parse_sig(&a.signature)?);
            match format.unwrap_or(Format::Text) {
                Format::Json => json("cohomology", a, &sum),
                _ => Ok(sum.to_string()),
            }
        }
        Command::Enumerate(a) => {
            let phi: Rational = a.phi.parse()?;
            if a.hyperbolic_only && !phi.is_positive() {
                return Err(Error::Precondition(format!("phi = {phi} is not hyperbolic")).into());
            }
            let bounds = SearchBounds::new(a.max_genus, a.max_points, a.max_order);
            let report = fraction_report(&phi, &bounds)?;
            let covers = |m: &orbifold_hall::search::FractionMatch| {
                m.covers
                    .iter()
                    .map(|c| format!("{}:{}", c.group_order, c.cover_genus))
                    .collect::<Vec<_>>()
                    .join(";")
            };
            match format.unwrap_or(Format::Text) {
                Format::Json => json("enumerate", a, &report),
                Format::Csv => {
                    let mut s = String::from("signature,genus,cone_points,geometry,covers\n");
                    for m in &report.matches {
                        let sig = &m.signature;
                        let _ = writeln!(
                            s,
                            "\"{sig}\",{},{},{},{}",
                            sig.genus(),
                            sig.cone_points(),
                            m.geometry,
                            covers(m)
                        );
                    }
                    Ok(s)
                }
                Format::Text => {
                    let mut s = format!("phi = {phi}: {} signature(s)\n", report.matches.len());
                    for m in &report.matches {
                        let c = covers(m);
                        let _ = write!(s, "{:<24} {}", m.signature.to_string(), m.geometry);
                        if !c.is_empty() {
                            let _ = write!(s, "  covers (#G:g') {c}");
                        }
                        s.push('\n');
                    }
                    if let Some(note) = &report.annotation {
                        let _ = writeln!(s, "note: {note}");
                    }
                    Ok(s)
                }
            }
        }
        Command::Butterfly(a) => {
            let grid = butterfly::parse_grid(&a.theta_grid)?;
            let ball = build_ball(&a.ball)?;
            match &cli.output {
                Some(path) => {
                    let skipped = butterfly::sweep_to_file(&ball, &grid, a.chunk, path, a.resume)?;
                    if skipped > 0 {
                        eprintln!("resumed after {skipped} completed theta values");
                    }
                    Ok(String::new())
                }
                None => {
                    let mut buf = Vec::new();
                    butterfly::sweep_to_writer(&ball, &grid, a.chunk, &mut buf)?;
                    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
                }
            }
        }
        Command::Spectrum(a) => {
            let ball = build_ball(&a.ball)?;
            let rows = orbifold_hall::conductance::butterfly(&ball, &[a.theta])?;
            let mut s = String::from("index,eigenvalue\n");
            for (i, v) in rows[0].1.iter().enumerate() {
                let _ = writeln!(s, "{i},{v:?}");
            }
            Ok(s)
        }
        Command::Conductance(a) => {
            let sig = parse_sig(&a.ball.sig)?;
            let theta = match (a.theta, a.flux_quanta) {
                (_, Some(q)) => {
                    if sig.phi().is_zero() {
                        return Err(Error::Precondition("flux quanta need a nonzero orbifold area".into()).into());
                    }
                    2.0 * PI * q / sig.hyperbolic_area()
                }
                (Some(t), None) => t,
                (None, None) => 0.0,
            };
            let fermi = match a.fermi.as_str() {
                "auto" | "auto-largest-gap" => FermiChoice::AutoLargestGap,
                e => FermiChoice::Energy(
                    e.parse()
                        .map_err(|_| Error::Parse(format!("--fermi expects a number or \"auto\", got {e:?}")))?,
                ),
            };
            let opts = ConductanceOptions {
                fermi,
                gap_threshold: a.gap_threshold,
                support_radius: a.support,
            };
            let group = group_for(&sig)?;
            check_radius(a.ball.radius)?;
            let report = hall_conductance(&group, theta, a.ball.radius, &opts)?;
            match format.unwrap_or(Format::Json) {
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "signature = {}  theta = {theta}  R = {}", report.signature, report.radius);
                    let _ = writeln!(s, "fermi level = {}  rank = {}/{}", report.fermi_level, report.rank, report.dimension);
                    let _ = writeln!(s, "tr_c = {:e} (imag {:e})", report.tr_c, report.tr_c_imag);
                    let _ = writeln!(s, "tr_K = {:e} (imag {:e})", report.tr_k, report.tr_k_imag);
                    let _ = writeln!(
                        s,
                        "nearest multiple of phi = {} * {}  residual = {:e}",
                        report.nearest_multiple, report.phi, report.residual
                    );
                    for n in &report.notes {
                        let _ = writeln!(s, "note: {n}");
                    }
                    Ok(s)
                }
                _ => {
                    #[derive(Serialize)]
                    struct Resolved<'a> {
                        #[serde(flatten)]
                        args: &'a ConductanceArgs,
                        resolved_theta: f64,
                    }
                    json("conductance", &Resolved { args: a, resolved_theta: theta }, &report)
                }
            }
        }
        Command::Compare(a) => {
            let group = group_for(&parse_sig(&a.sig)?)?;
            let radii = a
                .radii
                .split(',')
                .map(|r| r.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("--radii expects integers, got {:?}", a.radii)))?;
            if let Some(&r) = radii.iter().max() {
                check_radius(r)?;
            }
            let report = comparison_report(&group, a.theta, &radii, a.samples, a.seed)?;
            json("compare", a, &report)
        }
        Command::Ball(a) => {
            let ball = build_ball(&a.ball)?;
            json("ball", a, ball.export())
        }
        Command::Verify(a) => {
            let suite: Suite = a.suite.parse()?;
            let fixture = match &a.fixture {
                Some(p) => Fixture::parse(&fs::read_to_string(p).map_err(io_err)?)?,
                None => Fixture::builtin(),
            };
            let report = verify::run(suite, &fixture)?;
            let text = match format.unwrap_or(Format::Text) {
                Format::Json => json("verify", a, &report)?,
                _ => {
                    let mut s = String::new();
                    for c in &report.checks {
                        let _ = writeln!(s, "{c}");
                    }
                    let failed = report.checks.iter().filter(|c| !c.passed).count();
                    let _ = writeln!(s, "{} checks, {failed} failed", report.checks.len());
                    s
                }
            };
            match report.first_failure() {
                Some(c) => {
                    emit(&cli.output, &text).map_err(io_err)?;
                    Err(Failure::Verify(format!("first failing check: {c}")))
                }
                None => Ok(text),
            }
        }
    }
}

fn check_radius(radius: usize) -> Result<(), Error> {
    if radius > MAX_RADIUS {
        return Err(Error::Precondition(format!("radius {radius} exceeds the supported maximum {MAX_RADIUS}")));
    }
    Ok(())
}

fn build_ball(spec: &BallSpec) -> Result<orbifold_hall::fuchsian::CayleyBall, Error> {
    let group = group_for(&parse_sig(&spec.sig)?)?;
    check_radius(spec.radius)?;
    let ball = cayley_ball(&group, spec.radius)?;
    check_dense_dimension(ball.len())?;
    Ok(ball)
}

fn emit(path: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidSignature(_) => EXIT_USAGE,
        Error::NoGap { .. } => EXIT_NO_GAP,
        _ => EXIT_PRECONDITION,
    }
}

fn main() -> ExitCode {
    let argv = match config::splice(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());

    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => {
                eprintln!("error: {THREADS_ENV} must be a non-negative integer, got {n:?}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    use_sequential_linear_algebra();

    let output = cli.output.clone();
    match run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                if let Err(e) = emit(&output, &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_PRECONDITION);
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
