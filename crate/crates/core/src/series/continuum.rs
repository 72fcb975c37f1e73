//! Continuum evaluation of the weight family when the relevant index range is far
//! beyond direct summation.
//!
//! The sum over j is replaced by the integral of the analytic interpolant
//! exp L(x), L(x) = x ln p − 2 ln|Γ(Λ+1+x)/Γ(Λ+1)|, plus Euler–Maclaurin end
//! corrections at x = 0. L is evaluated relative to an anchor through a Stirling
//! difference so that no large quantities cancel.

use super::direct::{check_pole, interior_peak};
use super::special::{ln_abs_gamma, polygamma_re, stirling_tail, ASYMPTOTIC_RADIUS};
use super::sum::{two_sum, Neumaier};
use super::{JStats, Method};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Integration windows stop where the weight falls below e^{−CUT} of the maximum.
const CUT: f64 = 80.0;
const PANELS: usize = 128;
const GL_ORDER: usize = 20;
/// Smallest local index scale for which the continuum replacement is accepted.
pub const MIN_SCALE: f64 = 8.0;

fn gauss_legendre() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

/// φ(u) = (1+u) ln(1+u) − u.
fn phi(u: Complex64) -> Complex64 {
    if u.norm() < 0.05 {
        // Σ_{k≥2} (−1)^k u^k / (k(k−1))
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = u * u;
        for k in 2..20 {
            let k = k as f64;
            let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
            acc += pw * (sign / (k * (k - 1.0)));
            pw *= u;
        }
        acc
    } else {
        (u + 1.0) * ln1p_c(u) - u
    }
}

fn ln1p_c(u: Complex64) -> Complex64 {
    Complex64::new(
        0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p(),
        u.im.atan2(1.0 + u.re),
    )
}

fn stirling_ok(z: Complex64) -> bool {
    z.re > 0.0 && z.norm() >= ASYMPTOTIC_RADIUS
}

/// Log-weight L(x) − L(anchor).
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogWeight {
    p: f64,
    lnp: f64,
    anchor: f64,
    z_a: Complex64,
    /// |Λ+1+anchor|² − p, evaluated without cancellation.
    gap_a: f64,
}

impl LogWeight {
    pub fn new(lambda: Complex64, p: f64, anchor: f64) -> Self {
        let dp = p - lambda.im * lambda.im;
        // Re(Λ+1+anchor) as an unevaluated sum s + e.
        let (s1, e1) = two_sum(lambda.re, anchor);
        let (s, e2) = two_sum(s1, 1.0);
        let e = e1 + e2;
        let gap_a = if dp > 0.0 {
            let q = dp.sqrt();
            let d = (s - q) + e;
            d * (2.0 * q + d)
        } else {
            let r = s + e;
            r * r - dp
        };
        LogWeight {
            p,
            lnp: p.ln(),
            anchor,
            z_a: Complex64::new(s + e, lambda.im),
            gap_a,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x - self.anchor;
        if t == 0.0 {
            return 0.0;
        }
        let z = self.z_a + t;
        if stirling_ok(self.z_a) && stirling_ok(z) {
            let u = Complex64::new(t, 0.0) / self.z_a;
            -t * (self.gap_a / self.p).ln_1p() - 2.0 * (self.z_a * phi(u)).re
                + 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p()
                - 2.0 * (stirling_tail(z) - stirling_tail(self.z_a)).re
        } else {
            t * self.lnp - 2.0 * (ln_abs_gamma(z) - ln_abs_gamma(self.z_a))
        }
    }

    /// (L′, L″, L‴) at x.
    pub fn derivs(&self, x: f64) -> (f64, f64, f64) {
        let t = x - self.anchor;
        let z = self.z_a + t;
        let gap = self.gap_a + t * (2.0 * self.z_a.re + t);
        let pg = polygamma_re(z);
        (
            -(gap / self.p).ln_1p() + 2.0 * pg.ln_minus_psi,
            -2.0 * pg.psi1,
            -2.0 * pg.psi2,
        )
    }

    pub fn scale(&self, x: f64) -> f64 {
        let (d1, d2, d3) = self.derivs(x);
        1.0 / (d1.abs() + d2.abs().sqrt() + d3.abs().cbrt())
    }

    /// First point (doubling outward from `from`) where L drops below `level`,
    /// clipped to `limit`. Returns the point and the number of evaluations.
    fn extent(&self, from: f64, dir: f64, level: f64, limit: f64) -> (f64, u64) {
        let mut step = 1.0;
        let mut evals = 0;
        loop {
            let x = from + dir * step;
            if (dir > 0.0 && x >= limit) || (dir < 0.0 && x <= limit) {
                return (limit, evals);
            }
            evals += 1;
            if self.eval(x) < level || step > 1e300 {
                return (x, evals);
            }
            step *= 2.0;
        }
    }
}

/// Euler–Maclaurin correction at x = 0 for G(x) = s(x)^r g(x), s(0) = s.
fn em_correction(r: i32, s: f64, g: [f64; 4]) -> f64 {
    let rf = r as f64;
    let pw = |k: i32| if r - k < 0 { 0.0 } else { s.powi(r - k) };
    let g0 = pw(0) * g[0];
    let g1 = rf * pw(1) * g[0] + pw(0) * g[1];
    let g3 = rf * (rf - 1.0) * (rf - 2.0) * pw(3) * g[0]
        + 3.0 * rf * (rf - 1.0) * pw(2) * g[1]
        + 3.0 * rf * pw(1) * g[2]
        + pw(0) * g[3];
    0.5 * g0 - g1 / 12.0 + g3 / 720.0
}

/// Index range [start, end] and the located modes, shared by the dispatcher.
pub(crate) struct Layout {
    weight: LogWeight,
    lmax: f64,
    windows: Vec<(f64, f64)>,
    boundary_live: bool,
    boundary_is_peak: bool,
    evals: u64,
}

pub(crate) fn layout(lambda: Complex64, p: f64) -> Layout {
    let x_plus = interior_peak(lambda, p);
    let dp = p - lambda.im * lambda.im;
    let x_minus = if dp > 0.0 {
        -lambda.re - 1.0 - dp.sqrt()
    } else {
        f64::NEG_INFINITY
    };
    let anchor = x_plus.unwrap_or(0.0);
    let weight = LogWeight::new(lambda, p, anchor);
    let mut evals = 0;
    let l0 = weight.eval(0.0);
    let bimodal = x_plus.is_some() && x_minus > 0.0;
    let (lmax, boundary_is_peak) = match x_plus {
        None => (0.0, true),
        Some(_) if bimodal => (l0.max(0.0), l0 > 0.0),
        Some(_) => (0.0, false),
    };
    let level = lmax - CUT;
    let mut windows = Vec::new();
    match x_plus {
        Some(xp) => {
            let left_limit = if bimodal { x_minus } else { 0.0 };
            let (lo, e1) = weight.extent(xp, -1.0, level, left_limit);
            let (hi, e2) = weight.extent(xp, 1.0, level, f64::INFINITY);
            evals += e1 + e2;
            if bimodal && l0 >= level {
                let (b, e3) = weight.extent(0.0, 1.0, level, x_minus);
                evals += e3;
                windows.push((0.0, b));
            }
            windows.push((lo, hi));
        }
        None => {
            let (hi, e) = weight.extent(0.0, 1.0, level, f64::INFINITY);
            evals += e;
            windows.push((0.0, hi));
        }
    }
    let boundary_live = windows.iter().any(|w| w.0 == 0.0) && l0 >= level;
    Layout {
        weight,
        lmax,
        windows,
        boundary_live,
        boundary_is_peak,
        evals,
    }
}

impl Layout {
    pub fn end(&self) -> f64 {
        self.windows.iter().map(|w| w.1).fold(0.0, f64::max)
    }
}

/// Continuum statistics; see module docs.
pub(crate) fn continuum(lambda: Complex64, p: f64, tol: f64) -> Result<JStats> {
    check_pole(lambda)?;
    if !(p > 0.0) {
        return Err(Error::Domain("continuum route requires p > 0".into()));
    }
    let lay = layout(lambda, p);
    let w = &lay.weight;
    let mut evals = lay.evals;

    let scale = if lay.boundary_is_peak {
        w.scale(0.0)
    } else {
        w.scale(w.anchor)
    };
    if !(scale >= MIN_SCALE) {
        return Err(Error::Domain(format!(
            "weight scale {scale:.3} below {MIN_SCALE}: use the direct sum"
        )));
    }
    let mut g_em = [0.0; 4];
    let mut em_rem = 0.0;
    if lay.boundary_live {
        let h0 = w.scale(0.0);
        if !(h0 >= MIN_SCALE) {
            return Err(Error::Domain(format!(
                "weight scale {h0:.3} at j = 0 below {MIN_SCALE}: use the direct sum"
            )));
        }
        let (d1, d2, d3) = w.derivs(0.0);
        let g0 = (w.eval(0.0) - lay.lmax).exp();
        g_em = [
            g0,
            d1 * g0,
            (d2 + d1 * d1) * g0,
            (d3 + 3.0 * d1 * d2 + d1 * d1 * d1) * g0,
        ];
        em_rem = g0 / (30240.0 * h0.powi(5));
        evals += 1;
    }

    let nodes = gauss_legendre();
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(lay.windows.len() * PANELS * GL_ORDER);
    for &(a, b) in &lay.windows {
        let h = (b - a) / PANELS as f64;
        for k in 0..PANELS {
            let mid = a + (k as f64 + 0.5) * h;
            for &(x, wt) in nodes {
                let xx = mid + 0.5 * h * x;
                let g = (w.eval(xx) - lay.lmax).exp();
                pts.push((xx - w.anchor, 0.5 * h * wt * g));
            }
        }
    }
    evals += pts.len() as u64;
    let s0 = -w.anchor;
    let mut z = Neumaier::new();
    let mut m1 = Neumaier::new();
    for &(t, gw) in &pts {
        z.add(gw);
        m1.add(t * gw);
    }
    if lay.boundary_live {
        z.add(em_correction(0, s0, g_em));
        m1.add(em_correction(1, s0, g_em));
    }
    let zv = z.value();
    let offset = m1.value() / zv;
    let mut m2 = Neumaier::new();
    for &(t, gw) in &pts {
        let d = t - offset;
        m2.add(d * d * gw);
    }
    if lay.boundary_live {
        m2.add(em_correction(2, s0 - offset, g_em));
    }
    let var = (m2.value() / zv).max(0.0);

    let tail_bound = em_rem / zv + (-CUT).exp();
    if tail_bound > tol {
        return Err(Error::Domain(format!(
            "continuum remainder {tail_bound:e} exceeds tolerance {tol:e}"
        )));
    }
    let log_anchor = if w.anchor == 0.0 {
        0.0
    } else {
        LogWeight::new(lambda, p, 0.0).eval(w.anchor)
    };
    let j_peak = if lay.boundary_is_peak {
        0
    } else {
        w.anchor.round() as u64
    };
    Ok(JStats {
        log_n: log_anchor + lay.lmax + zv.ln(),
        j_mean: (w.anchor + offset).max(0.0),
        j_var: var,
        j_peak,
        terms_used: evals,
        tail_bound,
        method: Method::SaddleApprox,
        j_center: w.anchor,
        j_offset: offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre();
        let s: f64 = nodes.iter().map(|&(x, w)| w * x.powi(38)).sum();
        assert!((s - 2.0 / 39.0).abs() < 1e-14);
        let s: f64 = nodes.iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn phi_branches_agree() {
        for u in [Complex64::new(0.049, 0.0), Complex64::new(0.03, -0.035)] {
            let direct = (u + 1.0) * ln1p_c(u) - u;
            assert!((phi(u) - direct).norm() < 1e-15 * direct.norm().max(1e-300) * 1e3);
        }
    }

    #[test]
    fn stable_log_weight_matches_gamma_difference() {
        let lambda = Complex64::new(144.0, -144.0);
        let p = 1e10;
        let xp = interior_peak(lambda, p).unwrap();
        let w = LogWeight::new(lambda, p, xp);
        for t in [-3000.0, -50.0, 7.0, 2500.0] {
            let z = lambda + 1.0 + xp;
            let exact = t * p.ln() - 2.0 * (ln_abs_gamma(z + t) - ln_abs_gamma(z));
            let v = w.eval(xp + t);
            assert!(
                (v - exact).abs() < 1e-7 * (1.0 + exact.abs()),
                "t={t}: {v} vs {exact}"
            );
        }
    }

    #[test]
    fn log_weight_is_exact_sum_of_logs_for_small_arguments() {
        let lambda = Complex64::new(3.0, 2.0);
        let p = 30.0;
        let w = LogWeight::new(lambda, p, 0.0);
        let mut acc = 0.0;
        for j in 0..20 {
            let z = lambda + 1.0 + j as f64;
            acc += p.ln() - z.norm_sqr().ln();
            assert!((w.eval((j + 1) as f64) - acc).abs() < 1e-11);
        }
    }
}
