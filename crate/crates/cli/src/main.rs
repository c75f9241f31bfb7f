use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use geodrev::config::ExperimentConfig;
use geodrev::geodesics::{reversibility_batch, reversibility_run, seed_directions};
use geodrev::metric::validate_finsler;
use geodrev::reversibility::classify;
use geodrev::scan::{self, write_path_csv, Table};
use geodrev::Error;

// stdout write errors (e.g. a closed pipe) are ignored
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NOT_FINSLER: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "geodrev",
    version,
    about = "Reversibility of geodesics for 2D (alpha, beta)-Finsler metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Finsler conditions on phi and the bound sup b(x) < b0.
    Validate {
        config: PathBuf,
        /// Also write the (s, b, ec1_margin) grid.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the metric and print the zero-test evidence.
    Classify { config: PathBuf },
    /// Write a CSV scan of one quantity.
    Scan {
        config: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate a geodesic forward and back and report the path distance.
    Geodesic {
        config: PathBuf,
        /// Initial point, `a,b`.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        x0: [f64; 2],
        /// Initial direction, `c,d`; without it the configured number of seed directions is run.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        y0: Option<[f64; 2]>,
        #[arg(long = "T")]
        duration: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    #[value(name = "E")]
    E,
    #[value(name = "F")]
    F,
    Residual,
    Crosscheck,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let a: f64 = a.parse().map_err(|_| format!("`{a}` is not a number"))?;
            let b: f64 = b.parse().map_err(|_| format!("`{b}` is not a number"))?;
            Ok([a, b])
        }
        _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
    }
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl ToString) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotFinsler(_) | Error::FormTooLong { .. } => EXIT_NOT_FINSLER,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn write_table(table: &Table, path: &Path) -> Result<(), Failure> {
    let mut w = create(path)?;
    table
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::load(path).map_err(Failure::config)
}

fn cmd_validate(config: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let cfg = load(config)?;
    let phi = cfg.phi.build()?;
    let report = validate_finsler(&phi, cfg.sampling.n_s);
    outln!("phi: {}  b0 = {}", phi.label(), phi.b0());
    outln!("{}", report.summary());
    if let Some(e) = &report.eval_error {
        outln!("evaluation error: {e}");
    }
    if !report.pass {
        outln!("witness: {:?}", report.witness);
        outln!("FAIL");
        return Ok(EXIT_NOT_FINSLER);
    }
    let bundle = cfg.build_bundle()?;
    let (b_max, at) = bundle.b_max();
    outln!(
        "sup b(x) = {b_max} at ({}, {}), margin = {}",
        at[0],
        at[1],
        bundle.b_margin()
    );
    if let Some(out) = out {
        write_table(&scan::scan_ec1(&bundle)?, out)?;
    }
    outln!("PASS");
    Ok(0)
}

fn cmd_classify(config: &Path) -> Result<u8, Failure> {
    let bundle = load(config)?.build_bundle()?;
    out!("{}", classify(&bundle)?);
    Ok(0)
}

fn cmd_scan(config: &Path, what: What, out: &Path) -> Result<u8, Failure> {
    let bundle = load(config)?.build_bundle()?;
    let table = match what {
        What::E => scan::scan_e(&bundle)?,
        What::F => scan::scan_f(&bundle)?,
        What::Residual => scan::scan_residual(&bundle)?,
        What::Crosscheck => scan::scan_crosscheck(&bundle)?,
    };
    write_table(&table, out)?;
    outln!("wrote {} rows to {}", table.rows.len(), out.display());
    Ok(0)
}

fn reverse_path_name(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.reverse.csv"))
}

fn cmd_geodesic(
    config: &Path,
    x0: [f64; 2],
    y0: Option<[f64; 2]>,
    duration: Option<f64>,
    h: Option<f64>,
    out: &Path,
) -> Result<u8, Failure> {
    let cfg = load(config)?;
    let bundle = cfg.build_bundle()?;
    let duration = duration.unwrap_or(cfg.geodesics.duration);
    let h = h.unwrap_or(cfg.geodesics.h);
    if !bundle.domain().contains(x0) {
        return Err(Failure::config(format!(
            "x0 = ({}, {}) lies outside the domain",
            x0[0], x0[1]
        )));
    }

    let Some(y0) = y0 else {
        let dirs = seed_directions(cfg.geodesics.seeds);
        let runs = reversibility_batch(&bundle, x0, &dirs, duration, h);
        let mut rows = Vec::with_capacity(runs.len());
        let mut truncated = false;
        outln!("direction                                    reversibility_error");
        for (k, (y, run)) in dirs.iter().zip(runs).enumerate() {
            let run = run?;
            truncated |= run.truncated();
            outln!(
                "{k:>3}  ({:+.6}, {:+.6})   {:e}{}",
                y[0],
                y[1],
                run.error,
                if run.truncated() { "  (truncated)" } else { "" }
            );
            rows.push(vec![
                k as f64,
                y[0],
                y[1],
                run.error,
                f64::from(u8::from(run.truncated())),
            ]);
        }
        let table = Table {
            header: vec!["seed", "y1", "y2", "reversibility_error", "truncated"],
            rows,
        };
        write_table(&table, out)?;
        if truncated {
            eprintln!("warning: at least one path left the domain");
            return Ok(EXIT_TRUNCATED);
        }
        return Ok(0);
    };

    let run = reversibility_run(&bundle, x0, y0, duration, h)?;
    let reverse_out = reverse_path_name(out);
    for (path, file) in [(&run.forward, out), (&run.reverse, reverse_out.as_path())] {
        let mut w = create(file)?;
        write_path_csv(path, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", file.display())))?;
    }
    outln!(
        "forward samples = {}, reverse samples = {}",
        run.forward.samples.len(),
        run.reverse.samples.len()
    );
    outln!("reverse duration = {}", run.reverse_duration);
    outln!("reversibility_error = {:e}", run.error);
    if run.truncated() {
        eprintln!("warning: path left the domain and was truncated");
        return Ok(EXIT_TRUNCATED);
    }
    Ok(0)
}

fn configure_threads() {
    if let Some(n) = std::env::var("GEODREV_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            // fails only if a pool already exists, which cannot happen this early
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Validate { config, out } => cmd_validate(config, out.as_deref()),
        Command::Classify { config } => cmd_classify(config),
        Command::Scan { config, what, out } => cmd_scan(config, *what, out),
        Command::Geodesic {
            config,
            x0,
            y0,
            duration,
            h,
            out,
        } => cmd_geodesic(config, *x0, *y0, *duration, *h, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
