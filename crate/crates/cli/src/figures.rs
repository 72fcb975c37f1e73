//! Built-in figure presets. Each preset expands into one sweep per curve.

use crate::error::CliResult;
use crate::sweep::{Axis, Column, SweepSpec};
use nopo_core::{NopoParams, SeriesOptions};

pub const DEFAULT_COUNT: usize = 301;

/// Detunings of the monostable, interjacent and bistable curves.
pub const CURVE_DETUNINGS: [f64; 3] = [1.0, 3.0, 7.0];
pub const FIG_KAPPA: f64 = 0.5;
pub const FIG_GAMMA: f64 = 1.0;
pub const FIG_GAMMA3: f64 = 18.0;
pub const FIG_ES_MAX: f64 = 30.0;
/// Small-coupling comparison curves of the critical-region preset.
pub const FIG3_KAPPAS: [f64; 2] = [0.5, 1e-6];
pub const FIG3_DELTA: f64 = 3.0;
pub const FIG3_ES_MAX: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureName {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FigureName::Fig1 => "mean photon number and classical curve versus E_s",
            FigureName::Fig2 => "minimized variance versus E_s",
            FigureName::Fig3 => "critical-region variance for two couplings (interjacent regime)",
            FigureName::Fig4 => "pair phase relative to the pump versus E_s",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    /// File stem, e.g. `fig2_delta3`.
    pub stem: String,
    pub spec: SweepSpec,
}

fn curve(
    stem: String,
    base: NopoParams,
    stop: f64,
    count: usize,
    columns: &[Column],
    tol: f64,
) -> FigureCurve {
    FigureCurve {
        stem,
        spec: SweepSpec {
            base,
            axis: Axis::Es,
            start: 0.0,
            stop,
            count,
            columns: columns.to_vec(),
            options: SeriesOptions::with_tol(tol),
        },
    }
}

/// Expand a preset. Pump detuning follows Δ₃ = 2Δ throughout.
pub fn figure_curves(name: FigureName, count: usize, tol: f64) -> CliResult<Vec<FigureCurve>> {
    use Column::*;
    let columns: &[Column] = match name {
        FigureName::Fig1 => &[ES, P, N, NCl, DeltaN, Regime, Method, TailBound],
        FigureName::Fig2 => &[ES, P, VMin, N, Regime, Method, TailBound],
        FigureName::Fig3 => &[ES, P, VMin, N, Regime, Method, TailBound],
        FigureName::Fig4 => &[ES, P, Theta, VMin, Regime, Method],
    };
    let curves: Vec<FigureCurve> = match name {
        FigureName::Fig3 => FIG3_KAPPAS
            .iter()
            .map(|&k| {
                let base = NopoParams::new(k, FIG_GAMMA, FIG_GAMMA3, FIG3_DELTA, 2.0 * FIG3_DELTA);
                curve(
                    format!("fig3_kappa{k:?}"),
                    base,
                    FIG3_ES_MAX,
                    count,
                    columns,
                    tol,
                )
            })
            .collect(),
        _ => CURVE_DETUNINGS
            .iter()
            .map(|&d| {
                let base = NopoParams::new(FIG_KAPPA, FIG_GAMMA, FIG_GAMMA3, d, 2.0 * d);
                curve(
                    format!("{}_delta{d:?}", name.as_str()),
                    base,
                    FIG_ES_MAX,
                    count,
                    columns,
                    tol,
                )
            })
            .collect(),
    };
    for c in &curves {
        c.spec.validate()?;
    }
    Ok(curves)
}

/// Metadata echo for one preset curve.
pub fn curve_meta(name: FigureName, c: &FigureCurve) -> String {
    let b = &c.spec.base;
    format!(
        "nopo figure {} curve={} kappa={:?} gamma={:?} gamma3={:?} delta={:?} delta3={:?} delta3_rule=2*delta phi_e={:?} tol={:?} axis=es start={:?} stop={:?} count={}",
        name.as_str(),
        c.stem,
        b.kappa,
        b.gamma,
        b.gamma3,
        b.delta,
        b.delta3,
        b.pump_phase,
        c.spec.options.tol,
        c.spec.start,
        c.spec.stop,
        c.spec.count
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_expand() {
        for name in [FigureName::Fig1, FigureName::Fig2, FigureName::Fig4] {
            let c = figure_curves(name, DEFAULT_COUNT, 1e-13).unwrap();
            assert_eq!(c.len(), 3);
            assert!(c
                .iter()
                .all(|c| c.spec.base.delta3 == 2.0 * c.spec.base.delta));
        }
        let c = figure_curves(FigureName::Fig3, 11, 1e-13).unwrap();
        assert_eq!(
            c.iter().map(|c| c.stem.as_str()).collect::<Vec<_>>(),
            ["fig3_kappa0.5", "fig3_kappa1e-6"]
        );
        assert!(c.iter().all(|c| c.spec.columns.contains(&Column::Method)));
    }
}
