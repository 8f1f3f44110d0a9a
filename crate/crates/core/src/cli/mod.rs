//! The `lampwalk` command line.
//!
//! Each subcommand reads an optional JSON config (`--config`), applies flag
//! overrides on top, validates the result and writes one primary output. CSV
//! outputs start with a `# tool=... config_hash=... seed=...` comment line
//! followed by a header row; JSON outputs carry the same fields under `meta`.
//! Files written with `--output` get a `<file>.meta.json` sidecar holding the
//! thread count and a timestamp, which never appear in the primary output.
//!
//! Exit status: 0 success, 1 internal failure or a failed check, 2 invalid
//! configuration, 3 resource guard.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use commands::{Context, Report};
use config::*;

#[derive(Parser, Debug)]
#[command(name = "lampwalk", version, about = "Random walks on wreath products with exact word metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON config file; flags override its keys.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "LAMPWALK_THREADS")]
    threads: Option<usize>,
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// text | csv | json
    #[arg(long)]
    format: Option<String>,
    /// Lamp group: Z<q>, Zd:<k> or a JSON table file.
    #[arg(long)]
    lamp: Option<String>,
    /// Base group: free:<k> or lattice:<d>.
    #[arg(long)]
    base: Option<String>,
    /// Arbitrary override, `key=value` with a JSON value; dotted keys reach nested objects.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Validate and print the resolved plan without computing.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Word length of an element `x=v,y=w;h`.
    Length {
        element: Option<String>,
        #[arg(long)]
        dp_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Fixed-endpoint TSP in the base group.
    Tsp {
        #[arg(long)]
        start: Option<String>,
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<String>>,
        #[arg(long)]
        end: Option<String>,
        /// auto | tree | dp | brute | heuristic
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        dp_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare word lengths with breadth-first distances on a ball.
    BfsOracle {
        #[arg(long)]
        radius: Option<u64>,
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Raw Monte Carlo records.
    Simulate {
        /// cocycle | defect | tracking
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
        /// Defect grid as `m:n` pairs.
        #[arg(long, value_delimiter = ',')]
        pairs: Option<Vec<String>>,
        #[arg(long)]
        samples: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Defect moments over `(n, n)` and their growth fits.
    DefectTable {
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        powers: Option<Vec<u32>>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, value_name = "FILE")]
        records_output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Standardised `Q_n` against the normal law.
    CltTest {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        calibration_samples: Option<u64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_name = "FILE")]
        samples_output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Geodesic tracking and progress of the projected walk.
    Tracking {
        #[arg(long, value_delimiter = ',')]
        horizons: Option<Vec<u64>>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        slow_divisor: Option<u64>,
        #[arg(long, value_name = "FILE")]
        records_output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized check of the TSP defect bound along a geodesic.
    VerifyLemma {
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        d_min: Option<u64>,
        #[arg(long)]
        d_max: Option<u64>,
        #[arg(long)]
        axis_min: Option<u64>,
        #[arg(long)]
        axis_max: Option<u64>,
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long)]
        density: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_resource_guard() {
        return 3;
    }
    match e {
        Error::Config { .. }
        | Error::Parse { .. }
        | Error::GeneratorOutOfRange { .. }
        | Error::InvalidGroup(_)
        | Error::LampTable(_)
        | Error::Distribution(_)
        | Error::Checkpoint { .. }
        | Error::InsufficientSamples(_) => 2,
        _ => 1,
    }
}

/// Flag values collected as config overrides.
struct Overrides(Map<String, Value>);

impl Overrides {
    fn put<T: Serialize>(&mut self, key: &str, v: Option<T>) {
        if let Some(v) = v {
            set_path(&mut self.0, key, serde_json::to_value(v).expect("flag values serialise"));
        }
    }
}

fn base_map(common: &Common) -> Result<(Map<String, Value>, Overrides)> {
    let file = match &common.config {
        Some(p) => read_config_file(p)?,
        None => Map::new(),
    };
    let mut o = Overrides(Map::new());
    o.put("seed", common.seed);
    o.put("threads", common.threads);
    o.put("output", common.output.as_ref());
    o.put("format", common.format.as_ref());
    o.put("group.lamp", common.lamp.as_ref());
    o.put("group.base", common.base.as_ref());
    for item in &common.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::config("set", format!("`{item}` is not key=value")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        set_path(&mut o.0, k.trim(), value);
    }
    Ok((file, o))
}

fn merge(mut file: Map<String, Value>, overrides: Overrides) -> Map<String, Value> {
    fn go(dst: &mut Map<String, Value>, src: Map<String, Value>) {
        for (k, v) in src {
            match (dst.get_mut(&k), v) {
                (Some(Value::Object(d)), Value::Object(s)) => go(d, s),
                (_, v) => {
                    dst.insert(k, v);
                }
            }
        }
    }
    go(&mut file, overrides.0);
    file
}

/// Access to the keys every config shares.
trait Shared {
    fn threads(&self) -> Option<usize>;
    fn output(&self) -> Option<&std::path::Path>;
    fn format(&self) -> OutputFormat;
    fn seed(&self) -> Option<u64>;
}

macro_rules! shared {
    ($t:ty, seeded) => {
        shared!($t, |c: &$t| Some(c.seed));
    };
    ($t:ty, unseeded) => {
        shared!($t, |_: &$t| None);
    };
    ($t:ty, $seed:expr) => {
        impl Shared for $t {
            fn threads(&self) -> Option<usize> {
                self.threads
            }
            fn output(&self) -> Option<&std::path::Path> {
                self.output.as_deref()
            }
            fn format(&self) -> OutputFormat {
                self.format
            }
            fn seed(&self) -> Option<u64> {
                ($seed)(self)
            }
        }
    };
}

shared!(LengthConfig, unseeded);
shared!(TspConfig, unseeded);
shared!(BfsConfig, unseeded);
shared!(SimulateConfig, seeded);
shared!(DefectTableConfig, seeded);
shared!(CltConfig, seeded);
shared!(TrackingConfig, seeded);
shared!(VerifyLemmaConfig, seeded);

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn execute<T>(
    command: &'static str,
    raw: Map<String, Value>,
    dry_run: bool,
    stdout: &mut dyn Write,
    body: fn(&T, &mut Context) -> Result<Report>,
) -> Result<i32>
where
    T: DeserializeOwned + Serialize + Validate + Shared,
{
    let cfg: T = resolve(raw)?;
    let hash = config_hash(command, &cfg);
    let threads = cfg.threads().unwrap_or_else(default_threads);
    if dry_run {
        writeln!(stdout, "command      {command}")?;
        writeln!(stdout, "config_hash  {hash}")?;
        writeln!(stdout, "threads      {threads}")?;
        writeln!(stdout, "{}", serde_json::to_string_pretty(&cfg)?)?;
        return Ok(0);
    }
    let mut ctx = Context {
        command,
        hash,
        seed: cfg.seed(),
        threads,
        stdout,
    };
    let report = body(&cfg, &mut ctx)?;
    ctx.finish(report, cfg.format(), cfg.output())
}

fn parse_pair(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::config("pairs", format!("`{s}` is not m:n"));
    let (m, n) = s.split_once(':').ok_or_else(bad)?;
    Ok((m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Length {
            element,
            dp_cap,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("element", element);
            o.put("dp_cap", dp_cap);
            execute("length", merge(file, o), common.dry_run, stdout, commands::length)
        }
        Command::Tsp {
            start,
            points,
            end,
            solver,
            dp_cap,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("start", start);
            o.put("points", points);
            o.put("end", end);
            o.put("solver", solver);
            o.put("dp_cap", dp_cap);
            execute("tsp", merge(file, o), common.dry_run, stdout, commands::tsp)
        }
        Command::BfsOracle {
            radius,
            limit,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("radius", radius);
            o.put("limit", limit);
            execute("bfs-oracle", merge(file, o), common.dry_run, stdout, commands::bfs_oracle)
        }
        Command::Simulate {
            kind,
            horizons,
            pairs,
            samples,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("kind", kind);
            o.put("horizons", horizons);
            let pairs = pairs
                .map(|ps| ps.iter().map(|p| parse_pair(p)).collect::<Result<Vec<_>>>())
                .transpose()?;
            o.put("pairs", pairs);
            o.put("samples", samples);
            execute("simulate", merge(file, o), common.dry_run, stdout, commands::simulate)
        }
        Command::DefectTable {
            ns,
            powers,
            samples,
            records_output,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("ns", ns);
            o.put("powers", powers);
            o.put("samples", samples);
            o.put("records_output", records_output);
            execute("defect-table", merge(file, o), common.dry_run, stdout, commands::defect_table)
        }
        Command::CltTest {
            n,
            samples,
            calibration_samples,
            alpha,
            samples_output,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("n", n);
            o.put("samples", samples);
            o.put("calibration_samples", calibration_samples);
            o.put("alpha", alpha);
            o.put("samples_output", samples_output);
            execute("clt-test", merge(file, o), common.dry_run, stdout, commands::clt_test)
        }
        Command::Tracking {
            horizons,
            samples,
            slow_divisor,
            records_output,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("horizons", horizons);
            o.put("samples", samples);
            o.put("slow_divisor", slow_divisor);
            o.put("records_output", records_output);
            execute("tracking", merge(file, o), common.dry_run, stdout, commands::tracking)
        }
        Command::VerifyLemma {
            count,
            rank,
            d_min,
            d_max,
            axis_min,
            axis_max,
            max_points,
            density,
            common,
        } => {
            let (file, mut o) = base_map(&common)?;
            o.put("count", count);
            o.put("rank", rank);
            o.put("d_min", d_min);
            o.put("d_max", d_max);
            o.put("axis_min", axis_min);
            o.put("axis_max", axis_max);
            o.put("max_points", max_points);
            o.put("density", density);
            execute("verify-lemma", merge(file, o), common.dry_run, stdout, commands::verify_lemma)
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the exit status.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
