//! Series-versus-oracle comparison table.

use crate::error::CliResult;
use crate::sweep::fmt_num;
use nopo_core::entangle::minimized_variance;
use nopo_core::oracle::{build_generator, oracle_moment, oracle_vmin, solve_converged, ScanStep};
use nopo_core::series::general_moment_mn;
use nopo_core::{derive, evaluate, Complex64, NopoParams, OracleConfig, SeriesOptions};
use std::fmt::Write;

pub const N_TOL: f64 = 1e-4;
pub const PAIR_TOL: f64 = 1e-4;
pub const MN_TOL: f64 = 1e-3;
pub const VMIN_ABS_TOL: f64 = 1e-4;
/// Normally-ordered moments ⟨a₁⁺ᵐa₁ᵐa₂⁺ᵏa₂ᵏ⟩ in the table.
pub const MN_ORDERS: [(u32, u32); 3] = [(1, 1), (2, 1), (2, 2)];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub quantity: String,
    pub series: Complex64,
    pub oracle: Complex64,
    /// Relative deviation, or absolute when the series value is zero or the tolerance is absolute.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    pub cutoff: usize,
    pub tail_mass: f64,
    pub iterations: usize,
    /// Photon number and tail mass at every cutoff the convergence scan visited.
    pub scan: Vec<ScanStep>,
    pub pass: bool,
}

fn deviation(series: Complex64, oracle: Complex64) -> f64 {
    let d = (oracle - series).norm();
    if series.norm() == 0.0 {
        d
    } else {
        d / series.norm()
    }
}

fn row(
    quantity: &str,
    series: Complex64,
    oracle: Complex64,
    tolerance: f64,
    absolute: bool,
) -> CheckRow {
    let dev = if absolute {
        (oracle - series).norm()
    } else {
        deviation(series, oracle)
    };
    let pass = dev <= tolerance;
    CheckRow {
        quantity: quantity.into(),
        series,
        oracle,
        deviation: dev,
        tolerance,
        pass,
        note: String::new(),
    }
}

/// Solve the oracle at a converged cutoff and compare with the series.
/// `flip_lambda_sign` negates the drive inside the oracle only (negative control).
pub fn oracle_check(
    params: &NopoParams,
    config: &OracleConfig,
    opts: &SeriesOptions,
    flip_lambda_sign: bool,
) -> CliResult<CheckReport> {
    let d = derive(params)?;
    let mut generator = build_generator(params, config)?;
    if flip_lambda_sign {
        generator.lambda = -generator.lambda;
    }
    let st = solve_converged(&generator, config)?;
    let m = evaluate(d.lambda, d.p, params.pump_phase, opts)?;
    let real = |x: f64| Complex64::new(x, 0.0);
    let mut rows = vec![row(
        "n",
        real(m.n),
        oracle_moment(&st, 1, 1, 0, 0)?,
        N_TOL,
        false,
    )];
    let mut pair = row(
        "a1a2",
        m.pair_moment,
        oracle_moment(&st, 0, 1, 0, 1)?,
        PAIR_TOL,
        false,
    );
    if pair.series.norm() > 0.0 && pair.oracle.norm() > 0.0 {
        let dphi = (pair.oracle / pair.series).arg();
        pair.note = format!("phase_diff={}", fmt_num(dphi));
        if !pair.pass && dphi.abs() > std::f64::consts::FRAC_PI_4 {
            pair.note.push_str(" phase mismatch");
        }
    }
    rows.push(pair);
    for (a, b) in MN_ORDERS {
        let s = general_moment_mn(d.lambda, d.p, a, b, opts)?;
        rows.push(row(
            &format!("mn_{a}_{b}"),
            real(s),
            oracle_moment(&st, a, a, b, b)?,
            MN_TOL,
            false,
        ));
    }
    rows.push(row(
        "v_min",
        real(minimized_variance(&m).v_min),
        real(oracle_vmin(&st)?),
        VMIN_ABS_TOL,
        true,
    ));
    let pass = rows.iter().all(|r| r.pass);
    Ok(CheckReport {
        rows,
        cutoff: st.cutoff,
        tail_mass: st.cutoff_tail_mass,
        iterations: st.iterations,
        scan: st.scan,
        pass,
    })
}

pub fn render(report: &CheckReport, meta: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {meta}");
    let _ = writeln!(
        s,
        "# cutoff={} tail_mass={} iterations={}",
        report.cutoff,
        fmt_num(report.tail_mass),
        report.iterations
    );
    let _ = writeln!(
        s,
        "quantity,series_re,series_im,oracle_re,oracle_im,deviation,tolerance,result,note"
    );
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.quantity,
            fmt_num(r.series.re),
            fmt_num(r.series.im),
            fmt_num(r.oracle.re),
            fmt_num(r.oracle.im),
            fmt_num(r.deviation),
            fmt_num(r.tolerance),
            if r.pass { "PASS" } else { "FAIL" },
            r.note
        );
    }
    let _ = writeln!(s, "overall,{}", if report.pass { "PASS" } else { "FAIL" });
    s
}
