//! Command-line definition and dispatch.

use crate::audit::{self, parse_ladder, DEFAULT_LADDER};
use crate::error::{io_err, CliError, CliResult, EXIT_INVALID_INPUT, EXIT_OK};
use crate::figures::{curve_meta, figure_curves, FigureName, DEFAULT_COUNT};
use crate::oracle_check::{oracle_check, render as render_check};
use crate::point::point_report;
use crate::settings::{delta3_notice, pick, CommonArgs, FileValues, Settings};
use crate::sweep::{
    run_sweep_with_workers, sweep_meta, write_csv, write_csv_file, Axis, Column, SweepSpec,
};
use clap::{Parser, Subcommand};
use nopo_core::{OracleConfig, SeriesOptions};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "nopo",
    version,
    about = "Steady-state moments and two-mode squeezing of the nondegenerate OPO"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct GridArgs {
    /// Sweep axis: es or p.
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    /// Number of grid points including both ends.
    #[arg(long)]
    pub count: Option<usize>,
    /// Worker threads (0 uses every available core).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full report for one parameter point.
    #[command(allow_negative_numbers = true)]
    Point {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// CSV sweep over the pump amplitude or intensity.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Write the data of a built-in figure preset, one CSV per curve.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        /// Output directory.
        #[arg(long, default_value = ".")]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        /// Series relative tail tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Compare the series with the truncated-Fock master-equation solution.
    #[command(name = "oracle-check", allow_negative_numbers = true)]
    OracleCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest cutoff the convergence scan may reach.
        #[arg(long = "max-cutoff")]
        max_cutoff: Option<usize>,
        /// Negate the drive inside the oracle (negative control).
        #[arg(long = "flip-lambda-sign", hide = true)]
        flip_lambda_sign: bool,
    },
    /// Far-above-threshold constants and near-threshold scaling.
    #[command(allow_negative_numbers = true)]
    Audit {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated p/|Lambda|^2 ladder.
        #[arg(long)]
        ladder: Option<String>,
    },
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(
                e.kind(),
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            let first = e.to_string().lines().next().unwrap_or("").to_string();
            let _ = writeln!(
                err,
                "error kind=Usage exit={EXIT_INVALID_INPUT} message={first:?}"
            );
            return EXIT_INVALID_INPUT;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{}", e.line());
            e.exit_code()
        }
    }
}

fn load_file(common: &CommonArgs) -> CliResult<FileValues> {
    match &common.config {
        Some(p) => FileValues::load(p),
        None => Ok(FileValues::default()),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => stdout_result(out.write_all(text.as_bytes())),
    }
}

/// A closed downstream pipe (`nopo sweep | head`) is not an error.
fn stdout_result(r: std::io::Result<()>) -> CliResult<()> {
    match r {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(io_err(Path::new("<stdout>"), e))
        }
        _ => Ok(()),
    }
}

fn note(err: &mut dyn Write, s: &Settings) {
    if s.delta3_assumed {
        let _ = writeln!(err, "{}", delta3_notice(s.delta, s.delta3));
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Point { common } => {
            let s = Settings::resolve(&common, &load_file(&common)?)?;
            note(err, &s);
            emit(s.output.as_deref(), &point_report(&s)?, out)
        }
        Command::Sweep { common, grid } => {
            let file = load_file(&common)?;
            let s = Settings::resolve(&common, &file)?;
            if s.pump.is_some() {
                return Err(CliError::Input(
                    "sweep takes the pump from the axis; drop --es/--p".into(),
                ));
            }
            note(err, &s);
            let axis = match pick(&grid.axis, &file, "axis")? {
                Some(a) => Axis::parse(&a)?,
                None => Axis::Es,
            };
            let spec = SweepSpec {
                base: s.base_params(),
                axis,
                start: pick(&grid.start, &file, "start")?.unwrap_or(0.0),
                stop: pick(&grid.stop, &file, "stop")?
                    .ok_or_else(|| CliError::Input("sweep needs --stop".into()))?,
                count: pick(&grid.count, &file, "count")?.unwrap_or(DEFAULT_COUNT),
                columns: s.columns.clone().unwrap_or_else(Column::default_set),
                options: s.series_options(),
            };
            spec.validate()?;
            let workers = pick(&grid.workers, &file, "workers")?.unwrap_or(0);
            let rows = run_sweep_with_workers(&spec, workers)?;
            let meta = sweep_meta(&spec, &s.echo());
            let cols = spec.header_columns();
            match &s.output {
                Some(p) => write_csv_file(p, &meta, &cols, &rows),
                None => stdout_result(write_csv(out, &meta, &cols, &rows)),
            }
        }
        Command::Figure {
            name,
            output,
            count,
            tol,
            workers,
        } => {
            let tol = tol.unwrap_or(SeriesOptions::default().tol);
            let curves = figure_curves(name, count, tol)?;
            let _ = writeln!(
                err,
                "NOTE: {} presets use the pump-detuning convention delta3 = 2*delta for every curve",
                name.as_str()
            );
            if name == FigureName::Fig3 {
                let _ = writeln!(
                    err,
                    "NOTE: the method column records which series route produced each row"
                );
            }
            std::fs::create_dir_all(&output).map_err(|e| io_err(&output, e))?;
            for c in &curves {
                let rows = run_sweep_with_workers(&c.spec, workers)?;
                let path = output.join(format!("{}.csv", c.stem));
                write_csv_file(&path, &curve_meta(name, c), &c.spec.header_columns(), &rows)?;
                let _ = writeln!(out, "wrote {}", path.display());
            }
            Ok(())
        }
        Command::OracleCheck {
            common,
            max_cutoff,
            flip_lambda_sign,
        } => {
            let file = load_file(&common)?;
            let mut s = Settings::resolve(&common, &file)?;
            if s.delta3_assumed {
                s.delta3 = 0.0;
                s.delta3_assumed = false;
                let _ = writeln!(
                    err,
                    "NOTE: pump detuning not given; the oracle requires delta3 = 0 and uses it"
                );
            }
            let defaults = OracleConfig::default();
            let config = OracleConfig {
                cutoff: s.cutoff,
                solver_tol: s.solver_tol,
                max_cutoff_scan: pick(&max_cutoff, &file, "max-cutoff")?
                    .unwrap_or(defaults.max_cutoff_scan.max(s.cutoff)),
                ..defaults
            };
            config.validate()?;
            let report = oracle_check(&s.params(), &config, &s.series_options(), flip_lambda_sign)?;
            let meta = format!(
                "nopo oracle-check {} cutoff_start={} solver_tol={:?}",
                s.echo(),
                s.cutoff,
                s.solver_tol
            );
            emit(s.output.as_deref(), &render_check(&report, &meta), out)?;
            if report.pass {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .rows
                    .iter()
                    .filter(|r| !r.pass)
                    .map(|r| r.quantity.as_str())
                    .collect();
                Err(CliError::OracleCheck(format!(
                    "deviations above tolerance: {}",
                    failed.join(" ")
                )))
            }
        }
        Command::Audit { common, ladder } => {
            let s = Settings::resolve(&common, &load_file(&common)?)?;
            note(err, &s);
            let scales = match ladder {
                Some(l) => parse_ladder(&l)?,
                None => DEFAULT_LADDER.to_vec(),
            };
            let report = audit::audit(&s.base_params(), &scales, &s.series_options())?;
            let meta = format!("nopo audit {}", s.echo());
            emit(s.output.as_deref(), &audit::render(&report, &meta), out)
        }
    }
}
