//! Steady-state moment series.
//!
//! All moments are expressed through the weight family N_j = p^j / |(Λ+1)_j|²:
//! N = Σ N_j, n = ⟨j⟩/2 and ⟨a₁a₂⟩ = e^{iΦ_E}/(2N√p) Σ j(Λ*+j) N_j.

mod continuum;
mod direct;
mod general;
pub mod special;
pub mod sum;

pub use continuum::MIN_SCALE;
pub use general::{general_moment_kl, general_moment_mn, MAX_MOMENT_ORDER};

use crate::error::{Error, Result};
use num_complex::Complex64;
use sum::two_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DirectSum,
    SaddleApprox,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DirectSum => "DirectSum",
            Method::SaddleApprox => "SaddleApprox",
        }
    }
}

/// Which evaluation route [`evaluate`] may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Direct,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Relative tail tolerance, 0 < tol < 1e-3.
    pub tol: f64,
    /// Direct-sum term ceiling.
    pub max_terms: u64,
    /// Estimated index extent above which `Auto` uses the continuum route.
    pub saddle_switch: f64,
    pub method: MethodChoice,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            tol: 1e-13,
            max_terms: 10_000_000,
            saddle_switch: 1e7,
            method: MethodChoice::Auto,
        }
    }
}

impl SeriesOptions {
    pub fn with_tol(tol: f64) -> Self {
        SeriesOptions {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::InvalidParams(format!(
                "tol must lie in (0, 1e-3), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Summary of the normalized weight family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JStats {
    pub log_n: f64,
    pub j_mean: f64,
    pub j_var: f64,
    pub j_peak: u64,
    pub terms_used: u64,
    pub tail_bound: f64,
    pub method: Method,
    /// Reference index the mean was accumulated about; `j_mean = j_center + j_offset`.
    pub j_center: f64,
    pub j_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    SeriesDirect,
    AltForm,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::SeriesDirect => "SeriesDirect",
            Route::AltForm => "AltForm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub lambda: Complex64,
    pub p: f64,
    pub phi_e: f64,
    pub n: f64,
    pub pair_moment: Complex64,
    /// p ∂n/∂p.
    pub p_dn_dp: f64,
    /// n − |⟨a₁a₂⟩|, evaluated without cancellation on the continuum route.
    pub deficit: f64,
    pub stats: JStats,
    pub route: Route,
}

pub(crate) fn validate_input(lambda: Complex64, p: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::InvalidParams(format!(
            "p must be non-negative and finite, got {p}"
        )));
    }
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::InvalidParams("Lambda must be finite".into()));
    }
    Ok(())
}

/// Direct summation of the weight family.
pub fn j_distribution(lambda: Complex64, p: f64, tol: f64) -> Result<JStats> {
    j_distribution_with(lambda, p, &SeriesOptions::with_tol(tol))
}

pub fn j_distribution_with(lambda: Complex64, p: f64, opts: &SeriesOptions) -> Result<JStats> {
    validate_input(lambda, p)?;
    opts.validate()?;
    Ok(direct::direct_sum(lambda, p, opts.tol, opts.max_terms)?.stats)
}

/// Continuum statistics for index scales too large for direct summation.
pub fn saddle_approx(lambda: Complex64, p: f64) -> Result<JStats> {
    saddle_approx_with(lambda, p, SeriesOptions::default().tol)
}

pub fn saddle_approx_with(lambda: Complex64, p: f64, tol: f64) -> Result<JStats> {
    validate_input(lambda, p)?;
    continuum::continuum(lambda, p, tol)
}

/// Route selection for `MethodChoice::Auto`.
pub fn choose_method(lambda: Complex64, p: f64, opts: &SeriesOptions) -> Method {
    match opts.method {
        MethodChoice::Direct => Method::DirectSum,
        MethodChoice::Saddle => Method::SaddleApprox,
        MethodChoice::Auto => {
            if p == 0.0 {
                return Method::DirectSum;
            }
            if let Some(x) = direct::interior_peak(lambda, p) {
                if x > opts.saddle_switch {
                    return Method::SaddleApprox;
                }
            }
            if continuum::layout(lambda, p).end() > opts.saddle_switch {
                Method::SaddleApprox
            } else {
                Method::DirectSum
            }
        }
    }
}

/// Weight statistics by whichever route `opts` selects.
pub fn stats(lambda: Complex64, p: f64, opts: &SeriesOptions) -> Result<JStats> {
    validate_input(lambda, p)?;
    opts.validate()?;
    match choose_method(lambda, p, opts) {
        Method::DirectSum => Ok(direct::direct_sum(lambda, p, opts.tol, opts.max_terms)?.stats),
        Method::SaddleApprox => continuum::continuum(lambda, p, opts.tol),
    }
}

pub fn mean_photon_number(stats: &JStats) -> f64 {
    stats.j_mean / 2.0
}

/// ⟨a₁a₂⟩ from the direct weighted sum.
pub fn pair_moment(
    lambda: Complex64,
    p: f64,
    phi_e: f64,
    opts: &SeriesOptions,
) -> Result<Complex64> {
    validate_input(lambda, p)?;
    opts.validate()?;
    if p == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = direct::direct_sum(lambda, p, opts.tol, opts.max_terms)?;
    Ok(Complex64::from_polar(1.0, phi_e) * d.pair / (2.0 * p.sqrt()))
}

/// ⟨a₁a₂⟩ = e^{iΦ_E}(n/√p)(Λ* + 2n + (p/n)∂n/∂p).
pub fn pair_moment_alt(stats: &JStats, lambda: Complex64, p: f64, phi_e: f64) -> Result<Complex64> {
    if !(p > 0.0) {
        return Err(Error::DegenerateInput("alternative pair form needs p > 0"));
    }
    let n = mean_photon_number(stats);
    if !(n > 0.0) {
        return Err(Error::DegenerateInput("alternative pair form needs n > 0"));
    }
    let r = stats.j_var / (2.0 * n);
    let inner = lambda.conj() + 2.0 * n + r;
    Ok(Complex64::from_polar(1.0, phi_e) * inner * (n / p.sqrt()))
}

/// n − |⟨a₁a₂⟩| from the alternative pair form, evaluated around √(p − (Im Λ)²)
/// so that the result keeps its relative accuracy when n is huge.
pub fn pair_deficit(stats: &JStats, lambda: Complex64, p: f64) -> f64 {
    let n = mean_photon_number(stats);
    if !(p > 0.0) || !(n > 0.0) {
        return n;
    }
    let r = stats.j_var / stats.j_mean;
    let dp = p - lambda.im * lambda.im;
    // q = Re Λ + ⟨j⟩ + Var(j)/⟨j⟩ = Re(Λ* + 2n + (p/n)∂n/∂p)
    let excess = if dp > 0.0 {
        let qs = dp.sqrt();
        let (s, e) = two_sum(lambda.re, stats.j_center);
        let dq = ((s - qs) + e) + stats.j_offset + r;
        dq * (2.0 * qs + dq)
    } else {
        let q = lambda.re + stats.j_mean + r;
        q * q - dp
    };
    let x = excess / p;
    // 1 − √(1+x)
    n * (-x / (1.0 + (1.0 + x).sqrt()))
}

/// All series moments at one point, choosing the route by `opts`.
pub fn evaluate(lambda: Complex64, p: f64, phi_e: f64, opts: &SeriesOptions) -> Result<MomentSet> {
    validate_input(lambda, p)?;
    opts.validate()?;
    if p == 0.0 {
        direct::check_pole(lambda)?;
        return Ok(MomentSet {
            lambda,
            p,
            phi_e,
            n: 0.0,
            pair_moment: Complex64::new(0.0, 0.0),
            p_dn_dp: 0.0,
            deficit: 0.0,
            stats: direct::vacuum_stats(),
            route: Route::SeriesDirect,
        });
    }
    match choose_method(lambda, p, opts) {
        Method::DirectSum => {
            let d = direct::direct_sum(lambda, p, opts.tol, opts.max_terms)?;
            // The deficit uses the unrotated sum so V_min cannot depend on the pump phase.
            let unrotated = d.pair / (2.0 * p.sqrt());
            let pair = Complex64::from_polar(1.0, phi_e) * unrotated;
            let n = mean_photon_number(&d.stats);
            Ok(MomentSet {
                lambda,
                p,
                phi_e,
                n,
                pair_moment: pair,
                p_dn_dp: d.stats.j_var / 2.0,
                deficit: n - unrotated.norm(),
                stats: d.stats,
                route: Route::SeriesDirect,
            })
        }
        Method::SaddleApprox => {
            let st = continuum::continuum(lambda, p, opts.tol)?;
            let n = mean_photon_number(&st);
            let alt = pair_moment_alt(&st, lambda, p, phi_e)?;
            let deficit = pair_deficit(&st, lambda, p);
            let pair = Complex64::from_polar(n - deficit, alt.arg());
            Ok(MomentSet {
                lambda,
                p,
                phi_e,
                n,
                pair_moment: pair,
                p_dn_dp: st.j_var / 2.0,
                deficit,
                stats: st,
                route: Route::AltForm,
            })
        }
    }
}

#[cfg(test)]
mod tests;
