//! Semiclassical photon number, the quantum correction δn = n − n_cl and the
//! far-above-threshold asymptotics.

use crate::error::{Error, Result};
use crate::series::sum::{two_sum, Neumaier};
use crate::series::{evaluate, MomentSet, SeriesOptions};
use num_complex::Complex64;

/// Gaussian window half-width in units of √μ.
pub const WINDOW_WIDTH: f64 = 12.0;
/// Smallest μ accepted by [`gaussian_delta_n`].
pub const MIN_MU: u64 = 100;
/// p/|Λ|² from which [`asymptotic_vmin`] applies.
pub const ASYMPTOTIC_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    BelowThreshold,
    AboveThreshold,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::BelowThreshold => "BelowThreshold",
            Branch::AboveThreshold => "AboveThreshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalPoint {
    pub n_cl: f64,
    /// n − n_cl once a series value is attached.
    pub delta_n: Option<f64>,
    /// Integer part of 2n_cl.
    pub mu: u64,
    /// Fractional part of 2n_cl.
    pub xi: f64,
    pub branch: Branch,
}

/// n_cl = max(0, ½(−Re Λ + √(p − (Im Λ)²))).
pub fn classical_photon_number(lambda: Complex64, p: f64) -> SemiclassicalPoint {
    let dp = p - lambda.im * lambda.im;
    let two_n = if dp > 0.0 {
        (dp.sqrt() - lambda.re).max(0.0)
    } else {
        0.0
    };
    let mu = two_n.floor();
    SemiclassicalPoint {
        n_cl: 0.5 * two_n,
        delta_n: None,
        mu: mu as u64,
        xi: two_n - mu,
        branch: if dp > 0.0 && two_n > 0.0 {
            Branch::AboveThreshold
        } else {
            Branch::BelowThreshold
        },
    }
}

/// δn from an already evaluated moment set, without cancellation between n and n_cl.
pub fn delta_n_of(m: &MomentSet) -> f64 {
    let sc = classical_photon_number(m.lambda, m.p);
    if sc.branch == Branch::BelowThreshold {
        return m.n;
    }
    let qs = (m.p - m.lambda.im * m.lambda.im).sqrt();
    // 2δn = (Re Λ + j_center − q*) + j_offset
    let (s, e) = two_sum(m.lambda.re, m.stats.j_center);
    0.5 * (((s - qs) + e) + m.stats.j_offset)
}

pub fn quantum_correction(lambda: Complex64, p: f64, opts: &SeriesOptions) -> Result<f64> {
    Ok(delta_n_of(&evaluate(lambda, p, 0.0, opts)?))
}

/// Semiclassical point with δn attached.
pub fn semiclassical_point(
    lambda: Complex64,
    p: f64,
    opts: &SeriesOptions,
) -> Result<SemiclassicalPoint> {
    let mut sc = classical_photon_number(lambda, p);
    sc.delta_n = Some(quantum_correction(lambda, p, opts)?);
    Ok(sc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDeltaN {
    pub delta_n: f64,
    /// Window sum Σ N_{μ+j}/N_μ.
    pub norm_window: f64,
    /// Closed form √(πμ) exp((1−2ξ)²/(4μ)), kept as a diagnostic.
    pub norm_closed_form: f64,
    pub mu: u64,
    pub xi: f64,
}

/// Gaussian-window estimate of δn far above threshold.
///
/// Around the semiclassical index the log-ratio of consecutive weights is
/// ln(N_{k+1}/N_k) ≈ −a·u + b·u², u = k + 1 − 2n_cl, with a = 2q*/p and
/// b = 2q*²/p² − 1/p, q* = √(p − (Im Λ)²).
pub fn gaussian_delta_n(lambda: Complex64, p: f64) -> Result<GaussianDeltaN> {
    let sc = classical_photon_number(lambda, p);
    if sc.branch != Branch::AboveThreshold {
        return Err(Error::Domain(
            "gaussian delta n requires the above-threshold branch".into(),
        ));
    }
    if sc.mu < MIN_MU {
        return Err(Error::Domain(format!("mu = {} below {MIN_MU}", sc.mu)));
    }
    let mu = sc.mu as f64;
    let xi = sc.xi;
    let qs = (p - lambda.im * lambda.im).sqrt();
    let a = 2.0 * qs / p;
    let b = 2.0 * qs * qs / (p * p) - 1.0 / p;
    let step = |t: f64| {
        let u = 1.0 + t - xi;
        -a * u + b * u * u
    };
    let half = ((WINDOW_WIDTH * mu.sqrt()).ceil() as u64).min(sc.mu);
    let mut norm = Neumaier::new();
    let mut f = Neumaier::new();
    norm.add(1.0);
    let mut up = 0.0;
    let mut down = 0.0;
    for j in 1..=half {
        let jf = j as f64;
        up += step(jf - 1.0);
        down -= step(-jf);
        let (wu, wd) = (up.exp(), down.exp());
        norm.add(wu + wd);
        f.add(jf * (wu - wd));
    }
    let nv = norm.value();
    Ok(GaussianDeltaN {
        delta_n: f.value() / (2.0 * nv) - 0.5 * xi,
        norm_window: nv,
        norm_closed_form: (std::f64::consts::PI * mu).sqrt()
            * ((1.0 - 2.0 * xi).powi(2) / (4.0 * mu)).exp(),
        mu: sc.mu,
        xi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticVmin {
    /// 0.5 − 2δn.
    pub v_limit: f64,
    pub delta_n: f64,
    pub n: f64,
    /// (p/n) ∂n/∂p.
    pub log_slope: f64,
    /// Q = 2√(p − (Im Λ)²) + 2δn + (p/n)∂n/∂p.
    pub q: f64,
    /// |⟨a₁a₂⟩| = n √(1 + (Q/p)(2δn + (p/n)∂n/∂p)).
    pub pair_modulus_q: f64,
    pub moments: MomentSet,
}

pub fn asymptotic_vmin(lambda: Complex64, p: f64, opts: &SeriesOptions) -> Result<AsymptoticVmin> {
    if !(p >= ASYMPTOTIC_RATIO * lambda.norm_sqr()) {
        return Err(Error::Domain(format!(
            "asymptotic form needs p >= {ASYMPTOTIC_RATIO}|Lambda|^2"
        )));
    }
    let m = evaluate(lambda, p, 0.0, opts)?;
    let dn = delta_n_of(&m);
    let slope = m.p_dn_dp / m.n;
    let s = 2.0 * dn + slope;
    let q = 2.0 * (p - lambda.im * lambda.im).sqrt() + s;
    Ok(AsymptoticVmin {
        v_limit: 0.5 - 2.0 * dn,
        delta_n: dn,
        n: m.n,
        log_slope: slope,
        q,
        pair_modulus_q: m.n * (1.0 + q / p * s).sqrt(),
        moments: m,
    })
}
