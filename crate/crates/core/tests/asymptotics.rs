//! Semiclassical and near-threshold behaviour of the exact series.

use nopo_core::entangle::minimized_variance;
use nopo_core::nearthreshold::*;
use nopo_core::semiclassical::*;
use nopo_core::*;
use proptest::prelude::*;

const L144: Complex64 = Complex64::new(144.0, 0.0);

fn opts() -> SeriesOptions {
    SeriesOptions::default()
}

fn lambda_for_kappa(kappa: f64) -> Complex64 {
    derive(&NopoParams::new(kappa, 1.0, 18.0, 0.0, 0.0))
        .unwrap()
        .lambda
}

#[test]
fn correction_is_small_far_above_threshold() {
    for lam in [
        L144,
        Complex64::from_polar(144.0, std::f64::consts::FRAC_PI_4),
        Complex64::new(-640.0, -1120.0),
    ] {
        let p = 1e4 * lam.norm_sqr();
        let sc = semiclassical_point(lam, p, &opts()).unwrap();
        assert!(sc.delta_n.unwrap().abs() / sc.n_cl <= 1e-2);
    }
}

#[test]
fn exact_approaches_asymptote_down_the_ladder() {
    for lam in [
        L144,
        Complex64::from_polar(144.0, std::f64::consts::FRAC_PI_4),
    ] {
        let gaps: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|f| {
                let a = asymptotic_vmin(lam, f * lam.norm_sqr(), &opts()).unwrap();
                (minimized_variance(&a.moments).v_min - a.v_limit).abs()
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }
}

#[test]
fn gaussian_window_converges_with_mu() {
    let mut last = f64::INFINITY;
    for mu in [300.0f64, 3000.0, 30000.0] {
        let p = (mu + 144.0).powi(2);
        let err = (gaussian_delta_n(L144, p).unwrap().delta_n
            - quantum_correction(L144, p, &opts()).unwrap())
        .abs();
        assert!(err < last);
        last = err;
    }
}

#[test]
fn minimum_location_and_offset_laws() {
    for kappa in [0.5, 0.25, 0.125] {
        let lam = lambda_for_kappa(kappa);
        let np = near_threshold_params(lam, 1.0).unwrap();
        assert!(np.c.powi(5) >= VALIDITY_FACTOR * np.s);
        let ex = exact_minimum(lam, &opts()).unwrap();
        let center = 1.0 + np.f3 * np.s;
        assert!(
            (ex.i_over_ith - center).abs() <= 3.0 * np.s * np.s,
            "κ={kappa}: {} vs {center}",
            ex.i_over_ith
        );
        assert!(ex.v_min - 0.5 >= F1_LOWER_BOUND * np.s);
    }
    let off = |k: f64| exact_minimum(lambda_for_kappa(k), &opts()).unwrap().v_min - 0.5;
    let ratio = off(0.5) / off(0.25);
    assert!((ratio - 2.0).abs() <= 0.4, "{ratio}");
}

#[test]
fn closed_form_respects_validity() {
    let lam = lambda_for_kappa(0.25);
    let at = predicted_minimum_location(lam).unwrap();
    assert_eq!(validity_check(lam, at), Validity::Valid);
    assert!(near_threshold_vmin(lam, at, F1_LOWER_BOUND).is_ok());
    assert_eq!(
        validity_check(lam, at + 1.0),
        Validity::Invalid(InvalidReason::OutsideWindow)
    );
    assert_eq!(
        validity_check(Complex64::new(-5.0, 100.0), 1.0),
        Validity::Invalid(InvalidReason::NotMonostable)
    );
    assert!(matches!(
        near_threshold_vmin(lam, at, 0.01),
        Err(Error::InvalidParams(_))
    ));
}

proptest! {
    #[test]
    fn closed_form_never_beats_the_bound(mag in 1e3f64..1e8, arg in -0.3f64..0.3, u in -1.0f64..1.0, f1 in 0.0164f64..1.0) {
        let lam = Complex64::from_polar(mag, arg);
        let np = near_threshold_params(lam, 1.0).unwrap();
        let i = 1.0 + np.f3 * np.s + u * np.s * np.s / VALIDITY_FACTOR;
        if validity_check(lam, i) == Validity::Valid {
            let v = near_threshold_vmin(lam, i, f1).unwrap();
            prop_assert!(v >= 0.5 + F1_LOWER_BOUND * np.c.powi(3) * np.s);
        }
    }
}
