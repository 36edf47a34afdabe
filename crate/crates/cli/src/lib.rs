//! Command-line front end: load a CSV, run the lambda-alpha search, write the
//! summary table, the preferred model and the two plots.

pub mod io;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use enetsearch::{
    alpha_sequence, best_by_nzero, preferable, search, sensitivity_analysis, z_surface, Family,
    SearchConfig,
};

pub use io::{load_csv, read_summary_csv, Format, PreferableModel};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<enetsearch::Error> for CliError {
    fn from(e: enetsearch::Error) -> Self {
        let msg = e.to_string();
        if matches!(e.root(), enetsearch::Error::InvalidArgument(_)) {
            CliError::Usage(msg)
        } else if e.is_data_error() {
            CliError::Data(msg)
        } else {
            CliError::Numeric(msg)
        }
    }
}

/// Alpha values given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphas(pub Vec<f64>);

/// Parses `lo:hi:n` as an evenly spaced sequence, otherwise a comma list.
pub fn parse_alphas(s: &str) -> Result<Alphas, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| format!("'{n}' is not a count"))?;
            if n == 0 {
                return Err("alpha count must be positive".into());
            }
            Ok(Alphas(alpha_sequence(num(lo)?, num(hi)?, n)))
        }
        [_] => s.split(',').map(num).collect::<Result<_, _>>().map(Alphas),
        _ => Err(format!("expected 'lo:hi:n' or a comma list, got '{s}'")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "enetsearch", version, about = "Cross-validated elastic net search over lambda and alpha")]
pub struct Args {
    /// Input CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column; every other column is a predictor.
    #[arg(long)]
    pub response: String,
    #[arg(long, default_value = "gaussian")]
    pub family: Family,
    /// "lo:hi:n" or a comma-separated list.
    #[arg(long, default_value = "0.05:0.95:10", value_parser = parse_alphas)]
    pub alphas: Alphas,
    #[arg(long, default_value_t = 100)]
    pub nlambda: usize,
    /// Smallest lambda as a fraction of the largest. Defaults to 1e-4 when
    /// N > p, 1e-2 otherwise.
    #[arg(long)]
    pub lambda_min_ratio: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fit on the raw predictor scale.
    #[arg(long)]
    pub no_standardize: bool,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Repeat the search over this many fold assignments.
    #[arg(long)]
    pub sensitivity: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Cap on worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Args {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            alphas: self.alphas.0.clone(),
            nlambda: self.nlambda,
            lambda_min_ratio: self.lambda_min_ratio,
            k_folds: self.folds,
            seed: self.seed,
            standardize: !self.no_standardize,
            ..SearchConfig::default()
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Runs a parsed invocation and returns the line reported on success.
pub fn execute(args: &Args) -> Result<String, CliError> {
    let data = load_csv(&args.data, &args.response, args.family)?;
    let config = args.config();
    config.validate()?;
    if matches!(args.sensitivity, Some(r) if r < 2) {
        return Err(CliError::Usage("--sensitivity needs at least 2 reps".into()));
    }
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;

    let result = search(&data, &config)?;
    let ext = args.format.extension();
    io::write_summary(&args.out.join(format!("summary.{ext}")), &result.summary, args.format)?;
    let (best, coef) = preferable(&result);
    let model = PreferableModel::new(&result, &best, &coef);
    io::write_preferable(&args.out.join("preferable.json"), &model)?;
    write_text(&args.out.join("contour.svg"), &plot::contour_svg(&z_surface(&result)))?;
    write_text(&args.out.join("nzero.svg"), &plot::nzero_svg(&best_by_nzero(&result)))?;

    if let Some(reps) = args.sensitivity {
        let report = sensitivity_analysis(&data, &config, reps)?;
        io::write_sensitivity(&args.out.join(format!("sensitivity.{ext}")), &report, args.format)?;
    }
    Ok(format!(
        "preferable: alpha={} lambda={} cvm={} nzero={}",
        best.alpha, best.lambda, best.cvm, best.nzero
    ))
}

/// Entry point: returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match args.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&args)),
            Err(e) => Err(CliError::Io(format!("cannot start thread pool: {e}"))),
        },
        None => execute(&args),
    };
    match outcome {
        Ok(line) => {
            println!("{line}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
