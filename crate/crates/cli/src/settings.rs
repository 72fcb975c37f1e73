//! Flag and config-file resolution. Config files hold `key=value` lines whose keys are
//! the long flag names without dashes prefix (`kappa=0.5`, `phi-e=0.3`); `#` starts a
//! comment. Flags given on the command line override file values.

use crate::error::{io_err, CliError, CliResult};
use crate::sweep::Column;
use nopo_core::{NopoParams, SeriesOptions};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const DEFAULT_KAPPA: f64 = 0.5;
pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_GAMMA3: f64 = 18.0;

/// Keys accepted in config files.
pub const CONFIG_KEYS: &[&str] = &[
    "kappa",
    "gamma",
    "gamma3",
    "delta",
    "delta3",
    "es",
    "p",
    "phi-e",
    "tol",
    "output",
    "columns",
    "cutoff",
    "solver-tol",
    "axis",
    "start",
    "stop",
    "count",
    "workers",
    "max-cutoff",
];

#[derive(clap::Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Nonlinear coupling κ.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Subharmonic-mode damping γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Pump-mode damping γ₃.
    #[arg(long)]
    pub gamma3: Option<f64>,
    /// Subharmonic detuning Δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Pump detuning Δ₃ (defaults to 2Δ, announced on stderr).
    #[arg(long)]
    pub delta3: Option<f64>,
    /// Dimensionless pump amplitude E_s = 2κ|E|/(γγ₃).
    #[arg(long, conflicts_with = "p")]
    pub es: Option<f64>,
    /// Scaled pump intensity p = 4|E|²/κ².
    #[arg(long)]
    pub p: Option<f64>,
    /// Pump phase Φ_E in radians.
    #[arg(long = "phi-e")]
    pub phi_e: Option<f64>,
    /// Series relative tail tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// key=value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (directory for `figure`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated sweep columns.
    #[arg(long)]
    pub columns: Option<String>,
    /// Oracle starting cutoff.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Oracle residual tolerance.
    #[arg(long = "solver-tol")]
    pub solver_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pump {
    Es(f64),
    P(f64),
}

/// Config-file values, keyed by flag name.
#[derive(Debug, Clone, Default)]
pub struct FileValues {
    values: BTreeMap<String, String>,
}

impl FileValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("config line {}: expected key=value", no + 1))
            })?;
            let k = k.trim().trim_start_matches("--").to_string();
            if !CONFIG_KEYS.contains(&k.as_str()) {
                return Err(CliError::Input(format!(
                    "config line {}: unknown key {k:?}",
                    no + 1
                )));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(FileValues { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                CliError::Input(format!("config value for {key} is not valid: {v:?}"))
            }),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Flag value, else file value.
pub fn pick<T: FromStr + Clone>(
    flag: &Option<T>,
    file: &FileValues,
    key: &str,
) -> CliResult<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v.clone())),
        None => file.get(key),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub kappa: f64,
    pub gamma: f64,
    pub gamma3: f64,
    pub delta: f64,
    pub delta3: f64,
    /// Δ₃ was not given and the 2Δ convention was applied.
    pub delta3_assumed: bool,
    pub pump: Option<Pump>,
    pub phi_e: f64,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub columns: Option<Vec<Column>>,
    pub cutoff: usize,
    pub solver_tol: f64,
}

impl Settings {
    pub fn resolve(args: &CommonArgs, file: &FileValues) -> CliResult<Self> {
        let delta = pick(&args.delta, file, "delta")?.unwrap_or(0.0);
        let d3 = pick(&args.delta3, file, "delta3")?;
        let es = pick(&args.es, file, "es")?;
        let p = pick(&args.p, file, "p")?;
        // A flag of one pump kind overrides a file value of the other.
        let pump = match (args.es, args.p, es, p) {
            (Some(e), _, _, _) => Some(Pump::Es(e)),
            (_, Some(p), _, _) => Some(Pump::P(p)),
            (_, _, Some(_), Some(_)) => {
                return Err(CliError::Input("config sets both es and p".into()))
            }
            (_, _, Some(e), None) => Some(Pump::Es(e)),
            (_, _, None, Some(p)) => Some(Pump::P(p)),
            _ => None,
        };
        let columns = match pick(&args.columns, file, "columns")? {
            Some(list) => Some(Column::parse_list(&list)?),
            None => None,
        };
        let output = match &args.output {
            Some(p) => Some(p.clone()),
            None => file.raw("output").map(PathBuf::from),
        };
        Ok(Settings {
            kappa: pick(&args.kappa, file, "kappa")?.unwrap_or(DEFAULT_KAPPA),
            gamma: pick(&args.gamma, file, "gamma")?.unwrap_or(DEFAULT_GAMMA),
            gamma3: pick(&args.gamma3, file, "gamma3")?.unwrap_or(DEFAULT_GAMMA3),
            delta,
            delta3: d3.unwrap_or(2.0 * delta),
            delta3_assumed: d3.is_none(),
            pump,
            phi_e: pick(&args.phi_e, file, "phi-e")?.unwrap_or(0.0),
            tol: pick(&args.tol, file, "tol")?.unwrap_or(SeriesOptions::default().tol),
            output,
            columns,
            cutoff: pick(&args.cutoff, file, "cutoff")?.unwrap_or(20),
            solver_tol: pick(&args.solver_tol, file, "solver-tol")?.unwrap_or(1e-12),
        })
    }

    /// Rates and phase with zero pump.
    pub fn base_params(&self) -> NopoParams {
        NopoParams::new(self.kappa, self.gamma, self.gamma3, self.delta, self.delta3)
            .with_phase(self.phi_e)
    }

    /// Full parameter point; an absent pump means a dark cavity.
    pub fn params(&self) -> NopoParams {
        let b = self.base_params();
        match self.pump {
            Some(Pump::Es(e)) => b.with_es(e),
            Some(Pump::P(p)) => b.with_p(p),
            None => b,
        }
    }

    pub fn series_options(&self) -> SeriesOptions {
        SeriesOptions::with_tol(self.tol)
    }

    /// Deterministic `key=value` echo for metadata lines.
    pub fn echo(&self) -> String {
        let mut s = format!(
            "kappa={:?} gamma={:?} gamma3={:?} delta={:?} delta3={:?}",
            self.kappa, self.gamma, self.gamma3, self.delta, self.delta3
        );
        if self.delta3_assumed {
            s.push_str(" delta3_rule=2*delta");
        }
        match self.pump {
            Some(Pump::Es(e)) => s.push_str(&format!(" es={e:?}")),
            Some(Pump::P(p)) => s.push_str(&format!(" p={p:?}")),
            None => {}
        }
        s.push_str(&format!(" phi_e={:?} tol={:?}", self.phi_e, self.tol));
        s
    }
}

/// Stderr notice for the pump-detuning convention.
pub fn delta3_notice(delta: f64, delta3: f64) -> String {
    format!(
        "NOTE: pump detuning not given; using the convention delta3 = 2*delta = {delta3:?} (delta = {delta:?})"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flag_precedence() {
        let file = FileValues::parse("kappa = 0.25 # comment\n\ndelta=3\nes=2.5\n").unwrap();
        let args = CommonArgs {
            delta: Some(1.0),
            ..Default::default()
        };
        let s = Settings::resolve(&args, &file).unwrap();
        assert_eq!(s.kappa, 0.25);
        assert_eq!(s.delta, 1.0);
        assert_eq!(s.delta3, 2.0);
        assert!(s.delta3_assumed);
        assert_eq!(s.pump, Some(Pump::Es(2.5)));
        let args = CommonArgs {
            p: Some(7.0),
            ..Default::default()
        };
        assert_eq!(
            Settings::resolve(&args, &file).unwrap().pump,
            Some(Pump::P(7.0))
        );
    }

    #[test]
    fn bad_files() {
        assert!(FileValues::parse("kapa=1").is_err());
        assert!(FileValues::parse("kappa").is_err());
        let f = FileValues::parse("kappa=abc").unwrap();
        assert!(Settings::resolve(&CommonArgs::default(), &f).is_err());
        let f = FileValues::parse("es=1\np=2").unwrap();
        assert!(Settings::resolve(&CommonArgs::default(), &f).is_err());
    }
}
