//! Near-threshold closed form for the minimized variance in the monostable regime.
//!
//! V_min ≈ 0.5 + c³f₁(c)s + (f₂(c)/s)((I − I_min)/I_th)², I_min = I_th(1 + f₃(c)s),
//! with s = |Λ|^{−1/2}, c = √cos(arg Λ) and I/I_th = p/|Λ|².

use crate::entangle::minimized_variance;
use crate::error::{Error, Result};
use crate::series::{evaluate, SeriesOptions};
use num_complex::Complex64;

/// Published lower bound on the offset coefficient f₁(c).
pub const F1_LOWER_BOUND: f64 = 0.0164;
/// Factor used to read "≫" and "≪" in the validity conditions.
pub const VALIDITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearThresholdParams {
    pub s: f64,
    pub c: f64,
    pub i_over_ith: f64,
    pub f2: f64,
    pub f3: f64,
    pub f1_lower_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    NotMonostable,
    Interjacent,
    /// c⁵ < 10 s.
    NearInterjacent,
    /// |I − I_min|/I_th > s²/10.
    OutsideWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

/// (f₂(c), f₃(c)).
pub fn f_polynomials(c: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("c must lie in [0, 1], got {c}")));
    }
    let f2 = 0.113 + 0.00221 * c - 0.330 * c * c + 0.371 * c.powi(3) - 0.132 * c.powi(4);
    let f3 = -2.219 + 0.217 * c + 2.83 * c * c;
    Ok((f2, f3))
}

fn s_and_c(lambda: Complex64) -> Result<(f64, f64)> {
    let cos = lambda.re / lambda.norm();
    if !(cos > crate::params::INTERJACENT_REL_TOL) {
        return Err(Error::Domain(
            "near-threshold form needs monostable Lambda".into(),
        ));
    }
    Ok((lambda.norm().powf(-0.5), cos.sqrt().min(1.0)))
}

pub fn near_threshold_params(lambda: Complex64, i_over_ith: f64) -> Result<NearThresholdParams> {
    let (s, c) = s_and_c(lambda)?;
    let (f2, f3) = f_polynomials(c)?;
    Ok(NearThresholdParams {
        s,
        c,
        i_over_ith,
        f2,
        f3,
        f1_lower_bound: F1_LOWER_BOUND,
    })
}

/// I_min/I_th = 1 + f₃(c)s.
pub fn predicted_minimum_location(lambda: Complex64) -> Result<f64> {
    let np = near_threshold_params(lambda, 1.0)?;
    Ok(1.0 + np.f3 * np.s)
}

pub fn validity_check(lambda: Complex64, i_over_ith: f64) -> Validity {
    match crate::params::classify(lambda) {
        crate::params::Regime::Bistable => return Validity::Invalid(InvalidReason::NotMonostable),
        crate::params::Regime::Interjacent => return Validity::Invalid(InvalidReason::Interjacent),
        crate::params::Regime::Monostable => {}
    }
    let Ok(np) = near_threshold_params(lambda, i_over_ith) else {
        return Validity::Invalid(InvalidReason::NotMonostable);
    };
    if np.c.powi(5) < VALIDITY_FACTOR * np.s {
        return Validity::Invalid(InvalidReason::NearInterjacent);
    }
    let i_min = 1.0 + np.f3 * np.s;
    if (i_over_ith - i_min).abs() > np.s * np.s / VALIDITY_FACTOR {
        return Validity::Invalid(InvalidReason::OutsideWindow);
    }
    Validity::Valid
}

/// Closed-form V_min with the offset coefficient f₁ supplied by calibration.
pub fn near_threshold_vmin(lambda: Complex64, i_over_ith: f64, f1: f64) -> Result<f64> {
    if let Validity::Invalid(r) = validity_check(lambda, i_over_ith) {
        return Err(Error::Domain(format!(
            "near-threshold form not valid here: {r:?}"
        )));
    }
    if !(f1 >= F1_LOWER_BOUND) {
        return Err(Error::InvalidParams(format!(
            "f1 = {f1} below the lower bound {F1_LOWER_BOUND}"
        )));
    }
    let np = near_threshold_params(lambda, i_over_ith)?;
    let d = i_over_ith - (1.0 + np.f3 * np.s);
    Ok(0.5 + np.c.powi(3) * f1 * np.s + np.f2 / np.s * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMinimum {
    pub i_over_ith: f64,
    pub v_min: f64,
}

/// Minimum of the exact-series V_min over the pump intensity near threshold.
pub fn exact_minimum(lambda: Complex64, opts: &SeriesOptions) -> Result<ExactMinimum> {
    let (s, c) = s_and_c(lambda)?;
    let (_, f3) = f_polynomials(c)?;
    let th = lambda.norm_sqr();
    let v = |x: f64| -> Result<f64> {
        Ok(minimized_variance(&evaluate(lambda, x * th, 0.0, opts)?).v_min)
    };
    let center = 1.0 + f3 * s;
    let span = 12.0 * s;
    let lo = (center - span).max(1e-6);
    let hi = center + span;
    const GRID: usize = 97;
    let h = (hi - lo) / (GRID - 1) as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..GRID {
        let x = lo + h * i as f64;
        let val = v(x)?;
        if val < best.1 {
            best = (x, val);
        }
    }
    // Golden-section refinement inside the neighbouring grid cells.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut v1, mut v2) = (v(x1)?, v(x2)?);
    while b - a > 1e-10 * b {
        if v1 < v2 {
            b = x2;
            x2 = x1;
            v2 = v1;
            x1 = b - g * (b - a);
            v1 = v(x1)?;
        } else {
            a = x1;
            x1 = x2;
            v1 = v2;
            x2 = a + g * (b - a);
            v2 = v(x2)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok(ExactMinimum {
        i_over_ith: x,
        v_min: v(x)?,
    })
}

/// f₁(c) fitted from the exact minimum: (min V_min − 0.5)/(c³ s).
pub fn calibrate_f1(lambda: Complex64, opts: &SeriesOptions) -> Result<f64> {
    let (s, c) = s_and_c(lambda)?;
    Ok((exact_minimum(lambda, opts)?.v_min - 0.5) / (c.powi(3) * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const L144: Complex64 = Complex64::new(144.0, 0.0);

    #[test]
    fn printed_coefficients() {
        let (f2, f3) = f_polynomials(1.0).unwrap();
        assert!((f2 - 0.02421).abs() < 1e-12);
        assert!((f3 - 0.828).abs() < 1e-12);
        assert_eq!(f_polynomials(0.0).unwrap(), (0.113, -2.219));
        assert!(f_polynomials(1.5).is_err());
        let crossings = (0..1000)
            .filter(|&i| {
                let a = f_polynomials(i as f64 / 1000.0).unwrap().1;
                let b = f_polynomials((i + 1) as f64 / 1000.0).unwrap().1;
                a.signum() != b.signum()
            })
            .count();
        assert_eq!(crossings, 1);
    }

    #[test]
    fn location_and_validity() {
        assert!((predicted_minimum_location(L144).unwrap() - (1.0 + 0.828 / 12.0)).abs() < 1e-12);
        let small_c = Complex64::from_polar(1e6, 1.5);
        assert!(predicted_minimum_location(small_c).unwrap() < 1.0);
        let tiny_s = Complex64::new(1e12, 0.0);
        assert!((predicted_minimum_location(tiny_s).unwrap() - 1.0).abs() < 1e-5);
        let imin = predicted_minimum_location(L144).unwrap();
        assert_eq!(validity_check(L144, imin), Validity::Valid);
        assert_eq!(
            validity_check(Complex64::new(0.0, -480.0), 1.0),
            Validity::Invalid(InvalidReason::Interjacent)
        );
        assert_eq!(
            validity_check(L144, imin + 1.0 / 12.0),
            Validity::Invalid(InvalidReason::OutsideWindow)
        );
        assert_eq!(
            validity_check(Complex64::new(-640.0, -1120.0), 1.0),
            Validity::Invalid(InvalidReason::NotMonostable)
        );
        assert!(predicted_minimum_location(Complex64::new(-640.0, -1120.0)).is_err());
    }

    #[test]
    fn closed_form_shape() {
        let imin = predicted_minimum_location(L144).unwrap();
        let s = 1.0 / 12.0;
        let v0 = near_threshold_vmin(L144, imin, 0.2).unwrap();
        assert!((v0 - (0.5 + 0.2 * s)).abs() < 1e-15);
        let d = 5e-4;
        let (f2, _) = f_polynomials(1.0).unwrap();
        let v1 = near_threshold_vmin(L144, imin + d, 0.2).unwrap();
        assert!(((v1 - v0) - f2 / s * d * d).abs() < 1e-14);
        assert!(near_threshold_vmin(L144, imin, 0.01).is_err());
    }

    proptest! {
        #[test]
        fn positivity(mag in 1e4f64..1e8, arg in -0.2f64..0.2, off in -1.0f64..1.0, f1 in 0.0164f64..1.0) {
            let lam = Complex64::from_polar(mag, arg);
            let np = near_threshold_params(lam, 1.0).unwrap();
            let i = 1.0 + np.f3 * np.s + off * np.s * np.s / 10.0;
            if let Ok(v) = near_threshold_vmin(lam, i, f1) {
                prop_assert!(v >= 0.5 + F1_LOWER_BOUND * np.c.powi(3) * np.s);
            }
        }
    }
}
