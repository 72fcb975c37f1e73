//! Parameter sweeps over the pump axis and their CSV emission.

use crate::error::{io_err, CliError, CliResult};
use nopo_core::entangle::minimized_variance;
use nopo_core::semiclassical::{classical_photon_number, delta_n_of};
use nopo_core::{derive, evaluate, Method, NopoParams, Regime, SeriesOptions};
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

pub const MAX_COUNT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Es,
    P,
}

impl Axis {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "es" | "eS" | "Es" => Ok(Axis::Es),
            "p" | "P" => Ok(Axis::P),
            _ => Err(CliError::Input(format!(
                "unknown axis {s:?} (expected es or p)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Es => "es",
            Axis::P => "p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    ES,
    P,
    N,
    NCl,
    DeltaN,
    VMin,
    Theta,
    Regime,
    Method,
    TailBound,
    Status,
}

impl Column {
    pub const ALL: [Column; 11] = [
        Column::ES,
        Column::P,
        Column::N,
        Column::NCl,
        Column::DeltaN,
        Column::VMin,
        Column::Theta,
        Column::Regime,
        Column::Method,
        Column::TailBound,
        Column::Status,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::ES => "eS",
            Column::P => "p",
            Column::N => "n",
            Column::NCl => "nCl",
            Column::DeltaN => "deltaN",
            Column::VMin => "vMin",
            Column::Theta => "theta",
            Column::Regime => "regime",
            Column::Method => "method",
            Column::TailBound => "tailBound",
            Column::Status => "status",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CliError::Input(format!("unknown column {s:?}")))
    }

    /// Comma-separated list; duplicates are rejected so the header stays unambiguous.
    pub fn parse_list(s: &str) -> CliResult<Vec<Self>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let c = Column::parse(part)?;
            if out.contains(&c) {
                return Err(CliError::Input(format!("column {part:?} listed twice")));
            }
            out.push(c);
        }
        if out.is_empty() {
            return Err(CliError::Input("empty column list".into()));
        }
        Ok(out)
    }

    /// Every column except `status`, which is appended automatically.
    pub fn default_set() -> Vec<Self> {
        Column::ALL[..10].to_vec()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Rates and pump phase; the pump amplitude is ignored.
    pub base: NopoParams,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Columns written to the CSV; `status` is always appended.
    pub columns: Vec<Column>,
    pub options: SeriesOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start < 0.0 {
            return Err(CliError::Input(format!(
                "sweep range [{}, {}] must be finite and non-negative",
                self.start, self.stop
            )));
        }
        if !(self.start < self.stop) {
            return Err(CliError::Input(format!(
                "sweep start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.count < 2 || self.count > MAX_COUNT {
            return Err(CliError::Input(format!(
                "sweep count {} outside [2, {MAX_COUNT}]",
                self.count
            )));
        }
        self.base.validate()?;
        Ok(())
    }

    /// Grid value `i`, hitting both endpoints exactly.
    pub fn grid_value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.stop
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn point(&self, x: f64) -> NopoParams {
        match self.axis {
            Axis::Es => self.base.with_es(x),
            Axis::P => self.base.with_p(x),
        }
    }

    /// Output columns including the trailing status column.
    pub fn header_columns(&self) -> Vec<Column> {
        let mut cols: Vec<Column> = self
            .columns
            .iter()
            .copied()
            .filter(|c| *c != Column::Status)
            .collect();
        cols.push(Column::Status);
        cols
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub e_s: f64,
    pub p: f64,
    pub n: f64,
    pub n_cl: f64,
    pub delta_n: f64,
    pub v_min: f64,
    pub theta: f64,
    pub regime: Option<Regime>,
    pub method: Option<Method>,
    pub tail_bound: f64,
    /// `ok` or the error kind of the failing module call.
    pub status: String,
}

/// Evaluate one grid point. Failures are recorded in the row and never abort the sweep.
pub fn compute_row(spec: &SweepSpec, x: f64) -> SweepRow {
    let params = spec.point(x);
    let (e_s, p) = match spec.axis {
        Axis::Es => (x, params.p()),
        Axis::P => (params.e_s(), x),
    };
    let mut row = SweepRow {
        e_s,
        p,
        n: f64::NAN,
        n_cl: f64::NAN,
        delta_n: f64::NAN,
        v_min: f64::NAN,
        theta: f64::NAN,
        regime: None,
        method: None,
        tail_bound: f64::NAN,
        status: "ok".into(),
    };
    let derived = match derive(&params) {
        Ok(d) => d,
        Err(e) => {
            row.status = e.kind().into();
            return row;
        }
    };
    row.regime = Some(derived.regime);
    row.n_cl = classical_photon_number(derived.lambda, p).n_cl;
    match evaluate(derived.lambda, p, params.pump_phase, &spec.options) {
        Ok(m) => {
            let ent = minimized_variance(&m);
            row.n = m.n;
            row.delta_n = delta_n_of(&m);
            row.v_min = ent.v_min;
            row.theta = ent.theta_relative;
            row.method = Some(m.stats.method);
            row.tail_bound = m.stats.tail_bound;
        }
        Err(e) => row.status = e.kind().into(),
    }
    row
}

/// Evaluate the whole grid on the current rayon pool; rows come back in axis order.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    (0..spec.count)
        .into_par_iter()
        .map(|i| compute_row(spec, spec.grid_value(i)))
        .collect()
}

/// Run on a dedicated pool of `workers` threads (0 means rayon's default).
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> CliResult<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| run_sweep(spec)))
}

/// Fixed-width scientific notation; 17 significant digits round-trip every f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(row: &SweepRow, c: Column) -> String {
    match c {
        Column::ES => fmt_num(row.e_s),
        Column::P => fmt_num(row.p),
        Column::N => fmt_num(row.n),
        Column::NCl => fmt_num(row.n_cl),
        Column::DeltaN => fmt_num(row.delta_n),
        Column::VMin => fmt_num(row.v_min),
        Column::Theta => fmt_num(row.theta),
        Column::Regime => row.regime.map_or("NA", Regime::as_str).into(),
        Column::Method => row.method.map_or("NA", Method::as_str).into(),
        Column::TailBound => fmt_num(row.tail_bound),
        Column::Status => row.status.clone(),
    }
}

/// One `#` metadata line, the header, then one line per row.
pub fn write_csv(
    out: &mut dyn Write,
    meta: &str,
    columns: &[Column],
    rows: &[SweepRow],
) -> std::io::Result<()> {
    writeln!(out, "# {meta}")?;
    let header: Vec<&str> = columns.iter().map(|c| c.name()).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = columns.iter().map(|c| cell(row, *c)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Metadata echo for a sweep.
pub fn sweep_meta(spec: &SweepSpec, params_echo: &str) -> String {
    format!(
        "nopo sweep {params_echo} axis={} start={:?} stop={:?} count={}",
        spec.axis.as_str(),
        spec.start,
        spec.stop,
        spec.count
    )
}

pub fn write_csv_file(
    path: &Path,
    meta: &str,
    columns: &[Column],
    rows: &[SweepRow],
) -> CliResult<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, meta, columns, rows).map_err(|e| io_err(path, e))?;
    std::fs::write(path, buf).map_err(|e| io_err(path, e))
}

/// Parse a CSV produced by [`write_csv`] into (header, rows of cells).
pub fn read_csv(text: &str) -> CliResult<(String, Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let meta = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| CliError::Input("missing metadata line".into()))?
        .to_string();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Input("missing header".into()))?
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    Ok((meta, header, rows))
}
