//! EPR-type two-mode quadrature variance and the sufficient inseparability test.
//!
//! Quadratures are X_k(θ) = (a_k e^{−iθ} + a_k⁺ e^{iθ})/√2, so the vacuum variance of
//! X₁ − X₂ is 1. With the steady-state selection rule the variance reduces to
//! V = 1 + 2n − 2|⟨a₁a₂⟩| cos(θ₁ + θ₂ − arg⟨a₁a₂⟩).

use crate::error::{Error, Result};
use crate::series::MomentSet;
use std::f64::consts::PI;

/// |⟨a₁a₂⟩| below which the phase is taken from the small-pump limit.
pub const PHASE_LIMIT_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Entangled,
    /// V_min ≥ 1: the criterion is only sufficient, so nothing is concluded.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Entangled => "Entangled",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub v_min: f64,
    pub theta_sum: f64,
    /// Θ = arg⟨a₁a₂⟩ − Φ_E in (−π, π].
    pub theta_relative: f64,
    pub entangled_sufficient: bool,
    pub verdict: Verdict,
    /// Phases come from the analytic small-pump limit −arg(Λ+1).
    pub phase_from_limit: bool,
    pub n_used: f64,
    pub pair_moment_used: num_complex::Complex64,
}

/// Principal value in (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let t = (x + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

/// Variance of X₁(θ₁) − X₂(θ₂).
pub fn variance(theta1: f64, theta2: f64, m: &MomentSet) -> f64 {
    let a = m.pair_moment;
    let c = (theta1 + theta2 - a.arg()).cos();
    if a.norm() == 0.0 {
        return 1.0 + 2.0 * m.n;
    }
    // 1 + 2(n − |a|) + 2|a|(1 − cos), keeping the minimum exact.
    1.0 + 2.0 * m.deficit + 2.0 * a.norm() * (1.0 - c)
}

fn limit_phase(m: &MomentSet) -> f64 {
    -(m.lambda + 1.0).arg()
}

fn in_limit_branch(m: &MomentSet) -> bool {
    m.pair_moment.norm() < PHASE_LIMIT_THRESHOLD
}

pub fn minimized_variance(m: &MomentSet) -> EntanglementResult {
    let v_min = 1.0 + 2.0 * m.deficit;
    let from_limit = in_limit_branch(m);
    let arg = if from_limit {
        limit_phase(m) + m.phi_e
    } else {
        m.pair_moment.arg()
    };
    let entangled = v_min < 1.0;
    EntanglementResult {
        v_min,
        theta_sum: wrap_phase(arg),
        theta_relative: wrap_phase(arg - m.phi_e),
        entangled_sufficient: entangled,
        verdict: if entangled {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        },
        phase_from_limit: from_limit,
        n_used: m.n,
        pair_moment_used: m.pair_moment,
    }
}

/// Θ = arg⟨a₁a₂⟩ − Φ_E.
pub fn relative_phase(m: &MomentSet) -> Result<f64> {
    if in_limit_branch(m) {
        // Only the vacuum-like regime has a meaningful limit.
        if m.n < 1e-290 {
            return Ok(wrap_phase(limit_phase(m)));
        }
        return Err(Error::UndefinedPhase);
    }
    Ok(wrap_phase(m.pair_moment.arg() - m.phi_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{evaluate, SeriesOptions};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn point(lam: Complex64, f: f64, phi: f64) -> MomentSet {
        evaluate(lam, f * lam.norm_sqr(), phi, &SeriesOptions::default()).unwrap()
    }

    #[test]
    fn vacuum() {
        let m = evaluate(
            Complex64::new(144.0, 0.0),
            0.0,
            0.0,
            &SeriesOptions::default(),
        )
        .unwrap();
        assert_eq!(variance(0.3, 1.2, &m), 1.0);
        let r = minimized_variance(&m);
        assert_eq!(r.v_min, 1.0);
        assert!(!r.entangled_sufficient);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.phase_from_limit);
        assert_eq!(relative_phase(&m).unwrap(), 0.0);
        let lam = Complex64::new(128.0, -160.0);
        let m = evaluate(lam, 0.0, 0.2, &SeriesOptions::default()).unwrap();
        assert!((relative_phase(&m).unwrap() + (lam + 1.0).arg()).abs() < 1e-15);
        assert_eq!(
            minimized_variance(&m).theta_sum,
            wrap_phase(0.2 - (lam + 1.0).arg())
        );
    }

    #[test]
    fn optimal_and_anti_squeezed() {
        let m = point(Complex64::new(128.0, -160.0), 0.9, 0.4);
        let a = m.pair_moment;
        let vmin = minimized_variance(&m).v_min;
        assert!((variance(a.arg(), 0.0, &m) - vmin).abs() < 1e-15);
        let anti = variance(a.arg() + PI, 0.0, &m);
        assert!((anti - (1.0 + 2.0 * (m.n + a.norm()))).abs() < 1e-12);
        assert!((vmin - (1.0 + 2.0 * (m.n - a.norm()))).abs() < 1e-13);
    }

    #[test]
    fn far_above_threshold_level() {
        let r = minimized_variance(&point(Complex64::new(144.0, 0.0), 1e4, 0.0));
        assert!((r.v_min - 0.75).abs() < 0.01);
        assert!(r.theta_relative.abs() < 1e-2);
    }

    #[test]
    fn wrap_is_principal() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn variance_bounds_and_pairing(mag in 10.0f64..400.0, arg in -1.4f64..1.4, lf in -3.0f64..1.0,
                                       t1 in -4.0f64..4.0, t2 in -4.0f64..4.0, phi in -3.0f64..3.0) {
            let lam = Complex64::from_polar(mag, arg);
            let m = point(lam, 10f64.powf(lf), phi);
            let r = minimized_variance(&m);
            prop_assert!(r.v_min > 0.0);
            prop_assert!(variance(t1, t2, &m) >= r.v_min - 1e-14);
            let s = variance(t1, t2, &m) + variance(t1 + PI, t2, &m);
            prop_assert!((s - 2.0 * (1.0 + 2.0 * m.n)).abs() <= 1e-12 * (1.0 + m.n));
            prop_assert!((variance(t1, t2, &m) - variance(t1 + 0.7, t2 - 0.7, &m)).abs() < 1e-12 * (1.0 + m.n));
            let rot = minimized_variance(&point(lam, 10f64.powf(lf), phi + 1.1));
            prop_assert!((rot.v_min - r.v_min).abs() < 1e-12);
            prop_assert!((rot.theta_relative - r.theta_relative).abs() < 1e-9);
        }

        #[test]
        fn cauchy_schwarz(mag in 10.0f64..400.0, arg in -1.4f64..1.4, lf in -3.0f64..1.0) {
            let lam = Complex64::from_polar(mag, arg);
            let p = 10f64.powf(lf) * lam.norm_sqr();
            let o = SeriesOptions::default();
            let m = evaluate(lam, p, 0.0, &o).unwrap();
            let mn11 = crate::series::general_moment_mn(lam, p, 1, 1, &o).unwrap();
            prop_assert!(m.pair_moment.norm_sqr() <= (mn11 + m.n) * (1.0 + 1e-12));
        }
    }
}
