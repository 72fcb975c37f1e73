//! Parameter derivation, regimes and thresholds.

use nopo_core::*;
use proptest::prelude::*;

fn fig(delta: f64) -> NopoParams {
    NopoParams::new(0.5, 1.0, 18.0, delta, 2.0 * delta)
}

#[test]
fn resonant_dark_cavity() {
    let d = derive(&NopoParams::new(0.5, 1.0, 18.0, 0.0, 0.0)).unwrap();
    assert_eq!(d.lambda, Complex64::new(144.0, 0.0));
    assert_eq!((d.p, d.e_s, d.regime), (0.0, 0.0, Regime::Monostable));
    assert_eq!(d.thresholds.p_mono, 20736.0);
    assert!((d.thresholds.e_s_threshold - 2.0).abs() < 1e-15);
    assert_eq!(
        (d.thresholds.p_bistable_lower, d.thresholds.p_bistable_upper),
        (0.0, 20736.0)
    );
}

#[test]
fn figure_curve_regimes() {
    assert_eq!(derive(&fig(1.0)).unwrap().regime, Regime::Monostable);
    assert_eq!(derive(&fig(3.0)).unwrap().regime, Regime::Interjacent);
    assert_eq!(derive(&fig(7.0)).unwrap().regime, Regime::Bistable);
    let th = derive(&fig(1.0)).unwrap().thresholds.e_s_threshold;
    assert!((th - 2.0 * 2f64.sqrt() * 328f64.sqrt() / 18.0).abs() < 1e-12);
}

#[test]
fn rejects_unphysical_rates() {
    for p in [
        NopoParams::new(0.0, 1.0, 18.0, 0.0, 0.0),
        NopoParams::new(0.5, -1.0, 18.0, 0.0, 0.0),
        NopoParams::new(0.5, 1.0, f64::NAN, 0.0, 0.0),
        NopoParams::new(0.5, 1.0, 18.0, f64::INFINITY, 0.0),
    ] {
        assert!(matches!(derive(&p), Err(Error::InvalidParams(_))));
    }
}

proptest! {
    #[test]
    fn detuning_sign_flip_keeps_regime(k in 0.05f64..2.0, g in 0.1f64..3.0, g3 in 1.0f64..40.0,
                                        d in -10.0f64..10.0, d3 in -20.0f64..20.0) {
        let a = derive(&NopoParams::new(k, g, g3, d, d3)).unwrap();
        let b = derive(&NopoParams::new(k, g, g3, -d, -d3)).unwrap();
        prop_assert_eq!(a.regime, b.regime);
        prop_assert_eq!(a.lambda.re, b.lambda.re);
    }

    #[test]
    fn intensity_grows_with_pump(k in 0.05f64..2.0, e in 0.0f64..100.0, de in 1e-3f64..10.0) {
        let base = NopoParams::new(k, 1.0, 18.0, 1.0, 2.0);
        let lo = derive(&NopoParams { pump_amplitude: e, ..base }).unwrap().p;
        let hi = derive(&NopoParams { pump_amplitude: e + de, ..base }).unwrap().p;
        prop_assert!(lo >= 0.0 && hi > lo);
    }

    #[test]
    fn es_and_p_are_consistent(k in 0.05f64..2.0, g in 0.1f64..3.0, g3 in 1.0f64..40.0, es in 0.0f64..50.0) {
        let p = NopoParams::new(k, g, g3, 0.3, 0.1).with_es(es);
        let want = (g * g3 / (k * k)).powi(2) * es * es;
        prop_assert!((p.p() - want).abs() <= 1e-12 * want.max(f64::MIN_POSITIVE));
    }
}
