//! Far-above-threshold constants on a pump ladder and near-threshold scaling checks.

use crate::error::{CliError, CliResult};
use crate::sweep::fmt_num;
use nopo_core::entangle::minimized_variance;
use nopo_core::nearthreshold::{exact_minimum, near_threshold_params, F1_LOWER_BOUND};
use nopo_core::semiclassical::delta_n_of;
use nopo_core::{derive, evaluate, Complex64, NopoParams, Regime, SeriesOptions};
use std::fmt::Write;

pub const DEFAULT_LADDER: [f64; 3] = [1e2, 1e3, 1e4];
pub const V_INF: f64 = 0.75;
pub const V_INF_TOL: f64 = 0.01;
pub const DELTA_N_INF: f64 = -0.125;
pub const DELTA_N_TOL: f64 = 0.005;
pub const LOG_SLOPE_INF: f64 = 0.5;
pub const LOG_SLOPE_TOL: f64 = 1e-3;
pub const OFFSET_RATIO: f64 = 2.0;
pub const OFFSET_RATIO_TOL: f64 = 0.4;
/// Half-width of the argmin window in units of s².
pub const ARGMIN_WINDOW: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung {
    /// p/|Λ|².
    pub scale: f64,
    pub p: f64,
    pub n: f64,
    pub v_min: f64,
    pub delta_n: f64,
    pub p_dn_dp: f64,
}

impl Rung {
    pub fn gap(&self) -> f64 {
        (self.v_min - V_INF).abs()
    }
    /// (p/n) dn/dp.
    pub fn log_slope(&self) -> f64 {
        self.p_dn_dp / self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearThresholdAudit {
    pub s: f64,
    pub argmin: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub offset: f64,
    /// Offset at half the coupling.
    pub offset_half_kappa: f64,
}

impl NearThresholdAudit {
    pub fn offset_ratio(&self) -> f64 {
        self.offset / self.offset_half_kappa
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub lambda: Complex64,
    pub rungs: Vec<Rung>,
    pub near_threshold: Option<NearThresholdAudit>,
}

pub fn ladder(lambda: Complex64, scales: &[f64], opts: &SeriesOptions) -> CliResult<Vec<Rung>> {
    scales
        .iter()
        .map(|&scale| {
            let p = scale * lambda.norm_sqr();
            let m = evaluate(lambda, p, 0.0, opts)?;
            Ok(Rung {
                scale,
                p,
                n: m.n,
                v_min: minimized_variance(&m).v_min,
                delta_n: delta_n_of(&m),
                p_dn_dp: m.p_dn_dp,
            })
        })
        .collect()
}

/// Argmin window check at Λ and the offset ratio between couplings κ and κ/2.
pub fn near_threshold_audit(
    params: &NopoParams,
    opts: &SeriesOptions,
) -> CliResult<NearThresholdAudit> {
    let lambda = derive(params)?.lambda;
    let half = derive(&NopoParams {
        kappa: 0.5 * params.kappa,
        ..*params
    })?
    .lambda;
    let np = near_threshold_params(lambda, 1.0)?;
    let center = 1.0 + np.f3 * np.s;
    let w = ARGMIN_WINDOW * np.s * np.s;
    let ex = exact_minimum(lambda, opts)?;
    let ex_half = exact_minimum(half, opts)?;
    Ok(NearThresholdAudit {
        s: np.s,
        argmin: ex.i_over_ith,
        window_lo: center - w,
        window_hi: center + w,
        offset: ex.v_min - 0.5,
        offset_half_kappa: ex_half.v_min - 0.5,
    })
}

pub fn audit(params: &NopoParams, scales: &[f64], opts: &SeriesOptions) -> CliResult<AuditReport> {
    if scales.is_empty() || scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(CliError::Input("ladder entries must be positive".into()));
    }
    let d = derive(params)?;
    let rungs = ladder(d.lambda, scales, opts)?;
    let near_threshold = match d.regime {
        Regime::Monostable => Some(near_threshold_audit(params, opts)?),
        _ => None,
    };
    Ok(AuditReport {
        lambda: d.lambda,
        rungs,
        near_threshold,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render(report: &AuditReport, meta: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {meta}");
    let _ = writeln!(
        s,
        "# lambda_re={} lambda_im={}",
        fmt_num(report.lambda.re),
        fmt_num(report.lambda.im)
    );
    let _ = writeln!(s, "p_over_lambda2,p,n,v_min,delta_n,log_slope,gap");
    for r in &report.rungs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt_num(r.scale),
            fmt_num(r.p),
            fmt_num(r.n),
            fmt_num(r.v_min),
            fmt_num(r.delta_n),
            fmt_num(r.log_slope()),
            fmt_num(r.gap())
        );
    }
    let _ = writeln!(s, "constant,measured,expected,tolerance,result");
    let top = report.rungs.last().expect("non-empty ladder");
    let mut line = |name: &str, measured: f64, expected: f64, tol: f64| {
        let ok = (measured - expected).abs() <= tol;
        let _ = writeln!(
            s,
            "{name},{},{},{},{}",
            fmt_num(measured),
            fmt_num(expected),
            fmt_num(tol),
            verdict(ok)
        );
    };
    line("v_inf", top.v_min, V_INF, V_INF_TOL);
    line("delta_n_inf", top.delta_n, DELTA_N_INF, DELTA_N_TOL);
    line(
        "log_slope_inf",
        top.log_slope(),
        LOG_SLOPE_INF,
        LOG_SLOPE_TOL,
    );
    if let Some(nt) = &report.near_threshold {
        line(
            "offset_ratio",
            nt.offset_ratio(),
            OFFSET_RATIO,
            OFFSET_RATIO_TOL,
        );
    }
    let monotone = report.rungs.windows(2).all(|w| w[1].gap() < w[0].gap());
    let _ = writeln!(s, "gap_monotone,{monotone},true,NA,{}", verdict(monotone));
    if let Some(nt) = &report.near_threshold {
        let inside = (nt.window_lo..=nt.window_hi).contains(&nt.argmin);
        let _ = writeln!(
            s,
            "argmin_location,{},[{} {}],NA,{}",
            fmt_num(nt.argmin),
            fmt_num(nt.window_lo),
            fmt_num(nt.window_hi),
            verdict(inside)
        );
        let per_s = nt.offset / nt.s;
        let _ = writeln!(
            s,
            "offset_over_s,{},>={},NA,{}",
            fmt_num(per_s),
            fmt_num(F1_LOWER_BOUND),
            verdict(per_s >= F1_LOWER_BOUND)
        );
    } else {
        let _ = writeln!(s, "near_threshold,skipped,monostable only,NA,NA");
    }
    s
}

/// Parse a comma-separated ladder of p/|Λ|² values.
pub fn parse_ladder(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad ladder entry {t:?}")))
        })
        .collect()
}
