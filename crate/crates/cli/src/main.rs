//! `polstar`: best polynomial approximation with fixed-point coefficients.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use polstar::pipeline::{interactive_session, run_batch, ProblemConfig, Report};

/// Finds the polynomial of degree n whose degree-i coefficient is a multiple
/// of 2^-m_i and whose maximum error against f on [0, a] is smallest.
#[derive(Parser, Debug)]
#[command(name = "polstar", version)]
struct Args {
    /// Builtin name (cos, exp, log1p, ...) or an expression in x.
    #[arg(long)]
    function: Option<String>,
    /// Interval as 0:<endpoint>, e.g. 0:pi/4.
    #[arg(long)]
    interval: Option<String>,
    /// Polynomial degree n; defaults to one less than the number of bit counts.
    #[arg(long)]
    degree: Option<usize>,
    /// Fractional bits m_0,...,m_n.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bits: Option<Vec<i64>>,
    /// Quality factor in (0, 1], as p/q or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Refine the box with constraints at d + 1 sample points.
    #[arg(long = "refine-d")]
    refine_d: Option<u64>,
    /// Refine automatically when the box holds more tuples than this.
    #[arg(long = "refine-threshold")]
    refine_threshold: Option<u64>,
    /// Working precision in bits.
    #[arg(long)]
    precision: Option<u32>,
    /// Relative tolerance of every certified norm.
    #[arg(long)]
    tol: Option<f64>,
    /// Search threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// TOML file with the same keys as ProblemConfig; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Ask before each stage.
    #[arg(long)]
    interactive: bool,
    /// Print nothing but errors.
    #[arg(long, short)]
    quiet: bool,
}

fn build_config(args: &Args) -> Result<ProblemConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ProblemConfig::default(),
    };
    if let Some(f) = &args.function {
        cfg.function = f.clone();
    }
    if let Some(iv) = &args.interval {
        let (lo, hi) = iv.split_once(':').ok_or_else(|| format!("interval must look like 0:<endpoint>, got {iv:?}"))?;
        if lo.trim() != "0" {
            return Err(format!("intervals start at 0, got {:?}", lo.trim()));
        }
        cfg.a = hi.trim().to_string();
    }
    if let Some(b) = &args.bits {
        cfg.bits = b.clone();
        if args.degree.is_none() && args.config.is_none() {
            cfg.degree = b.len().saturating_sub(1);
        }
    }
    if let Some(n) = args.degree {
        cfg.degree = n;
    }
    if let Some(l) = &args.lambda {
        cfg.lambda = l.clone();
    }
    if args.refine_d.is_some() {
        cfg.d = args.refine_d;
    }
    if let Some(t) = args.refine_threshold {
        cfg.refine_threshold = t;
    }
    if let Some(p) = args.precision {
        cfg.precision = p;
    }
    if let Some(t) = args.tol {
        cfg.tol = t;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if cfg.function.is_empty() {
        return Err("no function given (--function)".into());
    }
    if cfg.a.is_empty() {
        return Err("no interval given (--interval 0:<endpoint>)".into());
    }
    if cfg.bits.is_empty() {
        return Err("no bit counts given (--bits m0,m1,...)".into());
    }
    Ok(cfg)
}

fn run(args: &Args) -> Result<Report, String> {
    let cfg = build_config(args)?;
    let stdout = io::stdout();
    let mut out: Box<dyn Write> = if args.quiet { Box::new(io::sink()) } else { Box::new(stdout.lock()) };
    let report = if args.interactive {
        let stdin = io::stdin();
        interactive_session(cfg, &mut stdin.lock(), &mut out)
    } else {
        run_batch(cfg, &mut out)
    }
    .map_err(|e| e.to_string())?;
    if let Some(path) = &args.output {
        std::fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(report) => match report.pstar {
            Some(p) if !p.feasible => ExitCode::from(2),
            _ => ExitCode::SUCCESS,
        },
        Err(e) => {
            eprintln!("polstar: {e}");
            ExitCode::from(1)
        }
    }
}
