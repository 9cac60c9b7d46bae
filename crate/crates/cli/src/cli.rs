use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use sensor_aoi::detector::ErrorScope;
use sensor_aoi::oracle::{bootstrap_for, validation_report, BOOTSTRAP_RESAMPLES};
use sensor_aoi::sim::simulate;
use sensor_aoi::summary::summarize;
use sensor_aoi::{AnalyticReport, DecisionRule, SimParams};

use crate::grid::Grid;
use crate::output::{write_csv, write_json};
use crate::svg::{render_series_svg, Column, Series};
use crate::sweep::{run_sweep, SweepSpec, SweepVar};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SENSOR_AOI_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "sensor-aoi",
    version,
    about = "Age of information and failure detection for an intermittently failing sensor"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the closed-form report as JSON.
    Analytic(ParamArgs),
    /// Simulate one configuration and print its metrics as JSON.
    Simulate(RunArgs),
    /// AoI and error rate over utilisation rho (lambda = rho * mu).
    SweepRho(SweepArgs),
    /// AoI and error rate over mean time to failure (nu = 1 / E[T]).
    SweepExpectedT(SweepArgs),
    /// Error rate over detector thresholds on one shared simulation.
    SweepThreshold(SweepArgs),
    /// AoI against error rate over rho.
    Tradeoff(SweepArgs),
    /// Compare closed forms with quadrature and simulation; writes validate.json.
    Validate(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Update generation rate (1/s).
    #[arg(long, allow_negative_numbers = true, default_value_t = SimParams::default().lambda)]
    pub lambda: f64,
    /// Service rate (1/s).
    #[arg(long, allow_negative_numbers = true, default_value_t = SimParams::default().mu)]
    pub mu: f64,
    /// Failure rate (1/s).
    #[arg(long, allow_negative_numbers = true, default_value_t = SimParams::default().nu)]
    pub nu: f64,
    /// Recovery time (s).
    #[arg(long, allow_negative_numbers = true, default_value_t = SimParams::default().r)]
    pub recovery: f64,
    /// Number of failure/recovery periods; accepts forms like 1e5.
    #[arg(long, value_parser = parse_count, default_value_t = SimParams::default().periods)]
    pub periods: u64,
    /// Master seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed, default_value_t = SimParams::default().master_seed)]
    pub seed: u64,
    /// Redraw periods until at least one update is delivered.
    #[arg(long)]
    pub enforce_assumption3: bool,
}

impl ParamArgs {
    pub fn params(&self) -> anyhow::Result<SimParams> {
        let p = SimParams::default()
            .with_rates(self.lambda, self.mu)
            .with_nu(self.nu)
            .with_recovery(self.recovery)
            .with_periods(self.periods)
            .with_seed(self.seed)
            .with_assumption3(self.enforce_assumption3);
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    /// Score every instant from the first arrival on.
    FullSpan,
    /// Leave out the stretch between recovery and the first new arrival.
    ExcludeR1,
}

impl From<ScopeArg> for ErrorScope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::FullSpan => ErrorScope::FullSpan,
            ScopeArg::ExcludeR1 => ErrorScope::ExcludeR1,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Part of the timeline over which the detector is scored.
    #[arg(long, value_enum, default_value_t = ScopeArg::ExcludeR1)]
    pub error_scope: ScopeArg,
    /// Bootstrap resamples for confidence half-widths (0 disables).
    #[arg(long, default_value_t = BOOTSTRAP_RESAMPLES)]
    pub bootstrap: usize,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Swept values as start:stop:step, inclusive.
    #[arg(long)]
    pub grid: Option<Grid>,
    /// Also write SVG charts next to the CSV.
    #[arg(long)]
    pub svg: bool,
    /// Skip simulation and leave the empirical columns empty.
    #[arg(long)]
    pub analytic_only: bool,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("expected a non-negative whole number, got {s:?}")),
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("bad seed {s:?}: {e}"))
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn prepare_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn sweep(name: &str, variable: SweepVar, args: &SweepArgs) -> anyhow::Result<()> {
    let grid = args.grid.unwrap_or(variable.default_grid());
    let mut spec = SweepSpec::new(variable, grid, args.run.params.params()?)
        .with_scope(args.run.error_scope.into())
        .with_bootstrap(args.run.bootstrap);
    if args.analytic_only {
        spec = spec.analytic_only();
    }
    let rows = run_sweep(&spec)?;

    let dir = &args.run.out;
    prepare_dir(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    write_csv(&rows, &csv)?;
    write_json(&spec, &dir.join(format!("{name}.config.json")))?;
    eprintln!("wrote {} ({} rows)", csv.display(), rows.len());

    if args.svg {
        let against_x = |ys: &[Column]| -> Vec<Series> {
            ys.iter()
                .map(|&y| Series {
                    x: Column::SweptValue,
                    y,
                })
                .collect()
        };
        let charts: Vec<(&str, Vec<Series>)> = match (name, variable) {
            ("tradeoff", _) => vec![(
                "",
                vec![
                    Series {
                        x: Column::AoiAnalytic,
                        y: Column::ErrAnalytic,
                    },
                    Series {
                        x: Column::AoiEmpirical,
                        y: Column::ErrEmpirical,
                    },
                ],
            )],
            (_, SweepVar::Threshold) => {
                vec![("", against_x(&[Column::ErrAnalytic, Column::ErrEmpirical]))]
            }
            _ => vec![
                (
                    ".aoi",
                    against_x(&[Column::AoiAnalytic, Column::AoiEmpirical]),
                ),
                (
                    ".err",
                    against_x(&[Column::ErrAnalytic, Column::ErrEmpirical]),
                ),
            ],
        };
        for (suffix, series) in charts {
            let path = dir.join(format!("{name}{suffix}.svg"));
            render_series_svg(&rows, &series, &path)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analytic(args) => {
            let params = args.params()?;
            print_json(&AnalyticReport::evaluate(&params)?)
        }
        Command::Simulate(args) => {
            let params = args.params.params()?;
            let rule = DecisionRule::map(params.lambda, params.nu, params.r)?;
            let timeline = simulate(&params)?;
            let bootstrap =
                (args.bootstrap > 0).then(|| bootstrap_for(params.master_seed, args.bootstrap));
            let summary = summarize(&timeline, &rule, args.error_scope.into(), bootstrap)?;
            print_json(&summary)
        }
        Command::SweepRho(args) => sweep("sweep-rho", SweepVar::Rho, &args),
        Command::SweepExpectedT(args) => sweep("sweep-expected-t", SweepVar::ExpectedT, &args),
        Command::SweepThreshold(args) => sweep("sweep-threshold", SweepVar::Threshold, &args),
        Command::Tradeoff(args) => sweep("tradeoff", SweepVar::Rho, &args),
        Command::Validate(args) => {
            let report = validation_report(&args.params.params()?)?;
            prepare_dir(&args.out)?;
            let path = args.out.join("validate.json");
            write_json(&report, &path)?;
            eprintln!("wrote {}", path.display());
            print_json(&report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_exponent_form() {
        assert_eq!(parse_count("100000"), Ok(100_000));
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn seeds_accept_hex() {
        assert_eq!(parse_seed("0x05EE_DA01"), Ok(0x05EE_DA01));
        assert_eq!(parse_seed("42"), Ok(42));
        assert!(parse_seed("0xZZ").is_err());
    }

    #[test]
    fn defaults_match_model_defaults() {
        let cli = Cli::try_parse_from(["sensor-aoi", "analytic"]).unwrap();
        let Command::Analytic(args) = cli.command else {
            panic!()
        };
        assert_eq!(args.params().unwrap(), SimParams::default());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
