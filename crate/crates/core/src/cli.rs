//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::classify::{classify_spiral, grid_classify, spiral_window_check, transversal_check, GridSquare, WindowFrame};
use crate::error::Error;
use crate::io::{
    projection_json, write_projection_csv, write_trajectory_csv, Document, InvariantsJson, TrajectoryJson,
};
use crate::orbit::{iterate, orbit_projection, sample_in_square, Direction, OrbitTrajectory};
use crate::polygon::CornerInvariants;
use crate::scalar::Scalar;
use crate::server;
use crate::verify::{run_verify, Mode, VerifyConfig};

/// Exit status for usage and input errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failed verification or a failed computation.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "spiralgram", version, about = "Deep diagonal maps on twisted polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample corner invariants in a tic-tac-toe square.
    Gen(GenArgs),
    /// Iterate T3 in corner-invariant coordinates.
    Orbit(OrbitArgs),
    /// Grid square and spiral window verdict.
    Classify(ClassifyArgs),
    /// Run the randomized property suites.
    Verify(VerifyArgs),
    /// Unit-square projection of a forward orbit.
    Project(ProjectArgs),
    /// Serve the engine protocol.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Rational => Mode::Rational,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Target square: IJ, KJ, JI, JK or JJ.
    #[arg(long, default_value = "KJ")]
    square: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, value_enum, default_value = "forward")]
    direction: DirectionArg,
    #[arg(long, value_enum, env = "SPIRALGRAM_MODE", default_value = "float")]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the output extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// First window index.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    start: i64,
    /// Window horizon; defaults to 3n.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, value_enum, env = "SPIRALGRAM_MODE", default_value = "float")]
    mode: ModeArg,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ProjectArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 2048)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    /// Read requests from stdin and answer on stdout.
    #[arg(long)]
    stdio: bool,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Port for the NDJSON socket, or for HTTP with --ui (0 picks a free port).
    #[arg(long, default_value_t = 8764)]
    port: u16,
    /// Serve static assets from this directory over HTTP, with requests on POST /rpc.
    #[arg(long)]
    ui: Option<PathBuf>,
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_USAGE, msg: e.to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a, out, err),
        Command::Orbit(a) => orbit(a, out, err),
        Command::Classify(a) => classify(a, out),
        Command::Verify(a) => verify(a, out, err),
        Command::Project(a) => project(a, out),
        Command::Serve(a) => serve(a, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn draw_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        let _ = writeln!(err, "seed: {s}");
        s
    })
}

fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => out.write_all(bytes),
    }
}

fn read_doc(path: &Path) -> std::result::Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure { code: EXIT_USAGE, msg: format!("{}: {e}", path.display()) })?;
    Ok(Document::parse(&text)?)
}

fn format_for(explicit: Option<Format>, path: Option<&Path>) -> Format {
    explicit.unwrap_or_else(|| match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    })
}

fn pretty<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

fn gen(a: GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let square: GridSquare = a.square.parse()?;
    let seed = draw_seed(a.seed, err);
    let x = sample_in_square(square, a.n, seed)?;
    emit(a.out.as_deref(), &pretty(&InvariantsJson::from_invariants(&x, Some(seed))?), out)?;
    Ok(0)
}

fn orbit(a: OrbitArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let doc = read_doc(&a.input)?;
    let seed = match &doc {
        Document::Invariants(j) => j.seed,
        Document::Polygon(_) => None,
    };
    let x = doc.invariants()?;
    let dir = match a.direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let format = format_for(a.format, a.out.as_deref());
    match Mode::from(a.mode) {
        Mode::Float => write_orbit(&iterate(&x, a.steps, dir), seed, format, a.out.as_deref(), out, err),
        Mode::Rational => write_orbit(&iterate(&x.to_rational()?, a.steps, dir), seed, format, a.out.as_deref(), out, err),
    }
}

fn write_orbit<S: Scalar>(
    traj: &OrbitTrajectory<S>,
    seed: Option<u64>,
    format: Format,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, traj)?;
            buf
        }
        Format::Json => pretty(&TrajectoryJson::from_trajectory(traj, seed)),
    };
    emit(path, &bytes, out)?;
    match traj.drift() {
        Ok(d) => writeln!(err, "drift F1={:e} F2={:e} F3={:e} F4={:e}", d[0], d[1], d[2], d[3])?,
        Err(e) => writeln!(err, "drift unavailable: {e}")?,
    }
    if !traj.is_completed() {
        writeln!(err, "orbit stopped early: {:?}", traj.termination)?;
    }
    Ok(0)
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> CmdResult {
    let doc = read_doc(&a.input)?;
    let report = match &doc {
        Document::Polygon(p) => {
            let poly = p.to_polygon()?;
            let x = poly.corner_invariants()?;
            let horizon = a.horizon.unwrap_or(3 * poly.n());
            let spiral = spiral_window_check(&poly, a.k, a.start, horizon)?;
            let tr = transversal_check(&poly, a.k, a.start, horizon, WindowFrame::AsGiven).ok();
            json!({ "grid": grid_classify(&x), "spiral": spiral, "transversals": tr })
        }
        Document::Invariants(_) => {
            let x: CornerInvariants = doc.invariants()?;
            let horizon = a.horizon.unwrap_or(3 * x.n());
            let spiral = classify_spiral(&x, a.k, a.start, horizon).ok();
            json!({ "grid": grid_classify(&x), "spiral": spiral })
        }
    };
    emit(a.out.as_deref(), &pretty(&report), out)?;
    Ok(0)
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let seed = draw_seed(a.seed, err);
    let report = run_verify(&VerifyConfig { n: a.n, trials: a.trials, seed, mode: a.mode.into() })?;
    for c in &report.checks {
        let verdict = if c.ok() { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} {} (passed {}, failed {}, skipped {}, max error {:e})", c.name, c.passed, c.failed, c.skipped, c.max_error)?;
    }
    Ok(if report.ok() { 0 } else { EXIT_FAILURE })
}

fn project(a: ProjectArgs, out: &mut dyn Write) -> CmdResult {
    let x = read_doc(&a.input)?.invariants()?;
    let pts = orbit_projection(&x, a.steps)?;
    let bytes = match format_for(a.format, a.out.as_deref()) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_projection_csv(&mut buf, &pts)?;
            buf
        }
        Format::Json => pretty(&json!({ "points": projection_json(&pts) })),
    };
    emit(a.out.as_deref(), &bytes, out)?;
    Ok(0)
}

fn serve(a: ServeArgs, err: &mut dyn Write) -> CmdResult {
    if a.stdio {
        let stdin = io::stdin();
        server::serve_lines(stdin.lock(), io::stdout())?;
        return Ok(0);
    }
    let (listener, addr) = server::bind(&a.host, a.port)?;
    match a.ui {
        Some(dir) => {
            if !dir.is_dir() {
                return Err(Failure { code: EXIT_USAGE, msg: format!("{} is not a directory", dir.display()) });
            }
            writeln!(err, "serving {} on http://{addr}/ (requests on POST /rpc)", dir.display())?;
            err.flush()?;
            server::serve_http(listener, dir)?;
        }
        None => {
            writeln!(err, "listening on {addr}")?;
            err.flush()?;
            server::serve_tcp(listener)?;
        }
    }
    Ok(0)
}
