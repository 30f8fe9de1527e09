//! `attrib` command-line driver.
//!
//! Exit codes: 0 on success, 1 when inputs fail validation or attribution
//! fails, 2 on usage errors. Reports go to stdout or `--output`; all
//! diagnostics go to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use attrib_core::path_oracle::{
    run_study, write_discrepancy_csv, JumpSpec, ProcessRole, ProcessSpec, SimulationParams,
};
use attrib_core::portfolio_file::load_portfolio;
use attrib_core::report::{render_report, ReportFormat};
use attrib_core::{attribute_portfolio, load_market_snapshots, CarryMode, FxMode, MarketSnapshot};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "attrib", version, about = "EUR PnL attribution into FX, rate, market and carry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Attribute a portfolio's PnL over a period
    Attribute(AttributeArgs),
    /// Compare the two-point FX split with fine-grid path sums
    Oracle(OracleArgs),
    /// Load and check input files without attributing
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FxModeArg {
    Average,
    StartEnd,
}

impl From<FxModeArg> for FxMode {
    fn from(m: FxModeArg) -> Self {
        match m {
            FxModeArg::Average => FxMode::AverageWeights,
            FxModeArg::StartEnd => FxMode::StartEnd,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CarryModeArg {
    Corrected,
    Literal,
    Sophis,
}

impl From<CarryModeArg> for CarryMode {
    fn from(m: CarryModeArg) -> Self {
        match m {
            CarryModeArg::Corrected => CarryMode::CorrectedStart,
            CarryModeArg::Literal => CarryMode::PaperLiteral,
            CarryModeArg::Sophis => CarryMode::SophisFrozenAtT,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Text,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Text => ReportFormat::Text,
        }
    }
}

#[derive(Args, Debug)]
struct AttributeArgs {
    /// Portfolio file (TOML)
    #[arg(long)]
    portfolio: PathBuf,
    /// Market snapshot CSV
    #[arg(long)]
    market: PathBuf,
    /// Period start (exclusive), YYYY-MM-DD
    #[arg(long)]
    from: NaiveDate,
    /// Period end (inclusive), YYYY-MM-DD
    #[arg(long)]
    to: NaiveDate,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "average")]
    fx_mode: FxModeArg,
    #[arg(long, value_enum, default_value = "corrected")]
    carry_mode: CarryModeArg,
    /// Fund NAV in EUR; adds basis-point columns
    #[arg(long)]
    nav: Option<f64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// First seed; seeds run consecutively from here
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of seeds
    #[arg(long, default_value_t = 1000)]
    seeds: u64,
    /// Grid steps per path
    #[arg(long, default_value_t = 63)]
    steps: usize,
    /// Period length in years
    #[arg(long, default_value_t = 0.25)]
    horizon: f64,
    #[arg(long, value_enum, default_value = "average")]
    fx_mode: FxModeArg,
    #[arg(long, default_value_t = 100.0)]
    asset_start: f64,
    #[arg(long, default_value_t = 0.0)]
    asset_drift: f64,
    #[arg(long, default_value_t = 0.10)]
    asset_vol: f64,
    #[arg(long, default_value_t = 0.90)]
    fx_start: f64,
    #[arg(long, default_value_t = 0.0)]
    fx_drift: f64,
    #[arg(long, default_value_t = 0.08)]
    fx_vol: f64,
    /// Correlation of the asset and FX diffusions
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    correlation: f64,
    /// Intensity per year of jumps common to asset and FX
    #[arg(long, default_value_t = 0.0)]
    jump_intensity: f64,
    /// Relative asset jump size
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    asset_jump: f64,
    /// Relative FX jump size
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    fx_jump: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    portfolio: Option<PathBuf>,
    #[arg(long)]
    market: Option<PathBuf>,
}

/// Inputs of an `attribute` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub portfolio: PathBuf,
    pub market: PathBuf,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub fx_mode: FxMode,
    pub carry_mode: CarryMode,
    pub format: ReportFormat,
    pub nav: Option<f64>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.from >= self.to {
            bail!("--from {} must be before --to {}", self.from, self.to);
        }
        for path in [&self.portfolio, &self.market] {
            if !path.exists() {
                bail!("{} does not exist", path.display());
            }
        }
        Ok(())
    }
}

fn load_market(path: &Path) -> Result<Vec<MarketSnapshot>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_market_snapshots(BufReader::new(file)).with_context(|| path.display().to_string())
}

/// Runs an attribution and returns the rendered report.
pub fn attribute(config: &RunConfig) -> Result<Vec<u8>> {
    config.validate()?;
    let file = load_portfolio(&config.portfolio)?;
    let snapshots = load_market(&config.market)?;
    let result = attribute_portfolio(
        &file.portfolio,
        &snapshots,
        config.from,
        config.to,
        config.fx_mode,
        config.carry_mode,
    )?;
    Ok(render_report(&result.positions, &file.lines, config.format, config.nav)?)
}

fn oracle(args: &OracleArgs) -> Result<(Vec<u8>, String)> {
    let mut params = SimulationParams::asset_fx(
        args.horizon,
        ProcessSpec::geometric(ProcessRole::Asset, args.asset_start, args.asset_drift, args.asset_vol),
        ProcessSpec::geometric(ProcessRole::Fx, args.fx_start, args.fx_drift, args.fx_vol),
        args.correlation,
    );
    if args.jump_intensity > 0.0 {
        params.jumps = Some(JumpSpec {
            intensity: args.jump_intensity,
            sizes: vec![args.asset_jump, args.fx_jump],
            scheduled: Vec::new(),
        });
    }
    let seeds: Vec<u64> = (0..args.seeds).map(|k| args.seed + k).collect();
    let report = run_study(&params, args.steps, &seeds, args.fx_mode.into())?;
    let mut out = Vec::new();
    write_discrepancy_csv(&mut out, &report.discrepancies)?;
    let mut summary = format!("{} seeds, {} steps\n", seeds.len(), args.steps);
    for s in &report.summary {
        summary.push_str(&format!(
            "{:<12} mean coarse {:>14.6}  mean fine {:>14.6} (se {:.6})  mean diff {:>12.6} (se {:.6})\n",
            s.component.to_string(),
            s.mean_coarse,
            s.mean_fine,
            s.stderr_fine,
            s.mean_diff,
            s.stderr_diff
        ));
    }
    Ok((out, summary))
}

fn validate(args: &ValidateArgs) -> Result<String> {
    if args.portfolio.is_none() && args.market.is_none() {
        bail!("nothing to validate: pass --portfolio and/or --market");
    }
    let mut summary = String::new();
    if let Some(path) = &args.portfolio {
        let file = load_portfolio(path)?;
        summary.push_str(&format!(
            "{}: {} positions, {} report lines\n",
            path.display(),
            file.portfolio.positions().len(),
            file.lines.len()
        ));
    }
    if let Some(path) = &args.market {
        let snaps = load_market(path)?;
        let range = match (snaps.first(), snaps.last()) {
            (Some(a), Some(b)) => format!(" from {} to {}", a.as_of, b.as_of),
            _ => String::new(),
        };
        summary.push_str(&format!("{}: {} snapshots{range}\n", path.display(), snaps.len()));
    }
    Ok(summary)
}

fn emit(bytes: &[u8], output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => out.write_all(bytes).context("writing report"),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };

    let result = match &cli.command {
        Command::Attribute(a) => {
            let config = RunConfig {
                portfolio: a.portfolio.clone(),
                market: a.market.clone(),
                from: a.from,
                to: a.to,
                fx_mode: a.fx_mode.into(),
                carry_mode: a.carry_mode.into(),
                format: a.format.into(),
                nav: a.nav,
            };
            attribute(&config).and_then(|bytes| emit(&bytes, a.output.as_deref(), out))
        }
        Command::Oracle(a) => oracle(a).and_then(|(bytes, summary)| {
            let _ = write!(err, "{summary}");
            emit(&bytes, a.output.as_deref(), out)
        }),
        Command::Validate(a) => validate(a).map(|summary| {
            let _ = writeln!(err, "{summary}ok");
        }),
    };

    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
