use super::*;
use proptest::prelude::*;

/// Brute-force reference: explicit products of the Pochhammer factors, no rescaling.
fn brute(lambda: Complex64, p: f64, terms: usize) -> (f64, f64, f64, Complex64) {
    let mut w = 1.0;
    let (mut n, mut m1, mut m2) = (1.0, 0.0, 0.0);
    let mut pair = Complex64::new(0.0, 0.0);
    for j in 1..terms {
        w *= p / (lambda + j as f64).norm_sqr();
        let jj = j as f64;
        n += w;
        m1 += jj * w;
        m2 += jj * jj * w;
        pair += (lambda.conj() + jj) * jj * w;
    }
    (n, m1 / n, m2 / n - (m1 / n).powi(2), pair / n)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn opts() -> SeriesOptions {
    SeriesOptions::default()
}

#[test]
fn vacuum_early_return() {
    let st = j_distribution(Complex64::new(144.0, 0.0), 0.0, 1e-13).unwrap();
    assert_eq!((st.log_n, st.j_mean, st.j_var), (0.0, 0.0, 0.0));
    let m = evaluate(Complex64::new(3.0, -1.0), 0.0, 0.4, &opts()).unwrap();
    assert_eq!(m.n, 0.0);
    assert_eq!(m.pair_moment, Complex64::new(0.0, 0.0));
}

#[test]
fn two_term_hand_sum() {
    let st = j_distribution(Complex64::new(144.0, 0.0), 1.0, 1e-13).unwrap();
    let n1 = 1.0 / (145.0f64 * 145.0);
    let n2 = n1 / (146.0f64 * 146.0);
    let n3 = n2 / (147.0f64 * 147.0);
    let norm = 1.0 + n1 + n2 + n3;
    assert!(rel(st.log_n.exp(), norm) < 1e-15);
    assert!(rel(st.j_mean, (n1 + 2.0 * n2 + 3.0 * n3) / norm) < 1e-12);
    assert!(rel(mean_photon_number(&st), 2.378e-5) < 1e-3);
}

#[test]
fn matches_brute_force_reference() {
    for (lam, p) in [
        (Complex64::new(3.0, 2.0), 50.0),
        (Complex64::new(-4.5, 7.0), 80.0),
        (Complex64::new(10.0, -3.0), 400.0),
    ] {
        let (n, mean, var, pair) = brute(lam, p, 400);
        let st = j_distribution(lam, p, 1e-14).unwrap();
        assert!(rel(st.log_n.exp(), n) < 1e-12);
        assert!(rel(st.j_mean, mean) < 1e-12);
        assert!(rel(st.j_var, var) < 1e-10);
        let a12 = pair_moment(lam, p, 0.0, &opts()).unwrap();
        let expect = pair / (2.0 * p.sqrt());
        assert!((a12 - expect).norm() < 1e-12 * expect.norm());
    }
}

#[test]
fn far_above_threshold_tracks_semiclassics() {
    let lam = Complex64::new(144.0, 0.0);
    let p = 1e4 * lam.norm_sqr();
    let st = j_distribution(lam, p, 1e-13).unwrap();
    let ncl = 0.5 * (-144.0 + p.sqrt());
    assert!(rel(st.j_mean / 2.0, ncl) < 1e-2);
}

#[test]
fn linear_regime_far_below_threshold() {
    let lam = Complex64::new(144.0, 0.0);
    let p = 1e-3 * lam.norm_sqr();
    let n = mean_photon_number(&j_distribution(lam, p, 1e-13).unwrap());
    assert!(rel(n, p / (2.0 * 145.0f64.powi(2))) < 1e-3);
}

#[test]
fn small_pump_pair_limit() {
    let lam = Complex64::new(128.0, -160.0);
    let p = 1e-8;
    let a12 = pair_moment(lam, p, 0.0, &opts()).unwrap();
    let lead = Complex64::new(p.sqrt(), 0.0) / (2.0 * (lam + 1.0));
    assert!((a12 - lead).norm() < 1e-6 * lead.norm());
    assert!((a12.arg() + (lam + 1.0).arg()).abs() < 1e-6);
}

#[test]
fn pair_phase_far_above_threshold() {
    let lam = Complex64::new(144.0, 0.0);
    let a12 = pair_moment(lam, 1e4 * lam.norm_sqr(), 0.0, &opts()).unwrap();
    assert!(a12.arg().abs() < 1e-2);
}

#[test]
fn alt_form_identity() {
    for lam in [
        Complex64::new(144.0, 0.0),
        Complex64::from_polar(144.0, 1.0),
        Complex64::new(-640.0, -1120.0),
    ] {
        for f in [1e-3, 0.3, 1.0, 2.0, 50.0] {
            let p = f * lam.norm_sqr();
            let st = j_distribution(lam, p, 1e-14).unwrap();
            let a = pair_moment(lam, p, 0.7, &opts()).unwrap();
            let b = pair_moment_alt(&st, lam, p, 0.7).unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm(), "{lam} {f}: {a} vs {b}");
        }
    }
}

#[test]
fn alt_form_degenerate() {
    let st = j_distribution(Complex64::new(1.0, 0.0), 0.0, 1e-13).unwrap();
    assert!(matches!(
        pair_moment_alt(&st, Complex64::new(1.0, 0.0), 0.0, 0.0),
        Err(Error::DegenerateInput(_))
    ));
}

#[test]
fn pole_and_ceiling() {
    assert!(matches!(
        j_distribution(Complex64::new(-3.0, 0.0), 1.0, 1e-13),
        Err(Error::PoleInput { index: 2 })
    ));
    assert!(matches!(
        j_distribution(Complex64::new(144.0, 0.0), 1e20, 1e-13),
        Err(Error::Nonconvergence { .. })
    ));
    assert!(matches!(
        j_distribution(Complex64::new(144.0, 0.0), 1.0, 1e-2),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn derivative_matches_finite_difference() {
    let lam = Complex64::from_polar(144.0, 0.6);
    for f in [0.05, 0.8, 1.0, 3.0] {
        let p = f * lam.norm_sqr();
        let h = 1e-5 * p;
        let n = |q: f64| mean_photon_number(&j_distribution(lam, q, 1e-15).unwrap());
        let fd = p * (n(p + h) - n(p - h)) / (2.0 * h);
        let st = j_distribution(lam, p, 1e-15).unwrap();
        assert!(
            rel(st.j_var / 2.0, fd) < 1e-6,
            "f={f}: {} vs {fd}",
            st.j_var / 2.0
        );
    }
}

#[test]
fn tolerance_independence() {
    let lam = Complex64::new(144.0, -144.0);
    for f in [0.2, 1.0, 4.0] {
        let p = f * lam.norm_sqr();
        let a = j_distribution(lam, p, 1e-10).unwrap();
        let b = j_distribution(lam, p, 5e-11).unwrap();
        let dn = (a.j_mean - b.j_mean).abs() / 2.0;
        assert!(
            dn <= (a.tail_bound + 4.0 * f64::EPSILON) * a.j_mean / 2.0,
            "f={f}: {dn}"
        );
        assert!(a.tail_bound <= 1e-10);
    }
}

#[test]
fn general_moment_anchors() {
    let lam = Complex64::new(128.0, -160.0);
    let o = opts();
    for f in [0.01, 0.5, 1.0, 2.0] {
        let p = f * lam.norm_sqr();
        let eps = Complex64::from_polar(0.5 * p.sqrt(), 0.3);
        let kl00 = general_moment_kl(lam, eps, 0, 0, &o).unwrap();
        assert!((kl00 - 1.0).norm() < 1e-12);
        assert!((general_moment_mn(lam, p, 0, 0, &o).unwrap() - 1.0).abs() < 1e-12);
        let n = mean_photon_number(&j_distribution(lam, p, 1e-14).unwrap());
        assert!(rel(general_moment_mn(lam, p, 1, 0, &o).unwrap(), n) < 1e-12);
        assert!(rel(general_moment_mn(lam, p, 0, 1, &o).unwrap(), n) < 1e-12);
        let kl11 = general_moment_kl(lam, eps, 1, 1, &o).unwrap();
        let mn11 = general_moment_mn(lam, p, 1, 1, &o).unwrap();
        assert!((kl11 - mn11).norm() < 1e-12 * mn11);
        let kl10 = general_moment_kl(lam, eps, 1, 0, &o).unwrap();
        let a12 = pair_moment(lam, p, 0.3, &o).unwrap();
        assert!((kl10 - a12.conj()).norm() < 1e-11 * a12.norm());
    }
    assert!(matches!(
        general_moment_mn(lam, 1.0, 31, 0, &o),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn saddle_matches_direct_in_overlap() {
    let lam = Complex64::new(144.0, 0.0);
    let p = 1e6;
    let d = j_distribution(lam, p, 1e-13).unwrap();
    let s = saddle_approx(lam, p).unwrap();
    assert_eq!(s.method, Method::SaddleApprox);
    assert!(rel(s.j_mean, d.j_mean) < 1e-4);
    assert!(rel(s.j_var, d.j_var) < 1e-4);
    assert!(rel(s.log_n, d.log_n) < 1e-8);
}

#[test]
fn saddle_handles_huge_lambda_quickly() {
    let lam = Complex64::new(7.2e13, 0.0);
    let t = std::time::Instant::now();
    let s = saddle_approx(lam, 1.2 * lam.norm_sqr()).unwrap();
    assert!(s.j_mean.is_finite() && s.j_mean > 0.0);
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn saddle_rejects_narrow_weights() {
    assert!(matches!(
        saddle_approx(Complex64::new(144.0, 0.0), 100.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        saddle_approx(Complex64::new(144.0, 0.0), 0.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn auto_route_switches() {
    let lam = Complex64::new(144.0, 0.0);
    assert_eq!(choose_method(lam, 1e6, &opts()), Method::DirectSum);
    assert_eq!(choose_method(lam, 1e16, &opts()), Method::SaddleApprox);
    let m = evaluate(lam, 1e16, 0.0, &opts()).unwrap();
    assert_eq!(m.route, Route::AltForm);
    assert!((m.n - m.pair_moment.norm() - m.deficit).abs() < 1e-6);
}

proptest! {
    #[test]
    fn norm_increases_with_pump(re in -50.0f64..300.0, im in -300.0f64..300.0, f in 1e-3f64..3.0) {
        let lam = Complex64::new(re, im);
        prop_assume!(lam.im.abs() > 1.0 || lam.re > 0.0);
        let p = f * (lam + 1.0).norm_sqr();
        let a = j_distribution(lam, p, 1e-13).unwrap();
        let b = j_distribution(lam, p * 1.01, 1e-13).unwrap();
        prop_assert!(a.log_n >= 0.0 && a.j_var >= 0.0 && a.j_mean >= 0.0);
        prop_assert!(b.log_n > a.log_n);
        prop_assert!(b.j_mean >= a.j_mean);
    }

    #[test]
    fn pair_identity_holds(mag in 5.0f64..500.0, arg in -1.5f64..1.5, lf in -3.0f64..1.5, phi in -3.0f64..3.0) {
        let lam = Complex64::from_polar(mag, arg);
        let p = 10f64.powf(lf) * lam.norm_sqr();
        let st = j_distribution(lam, p, 1e-14).unwrap();
        let a = pair_moment(lam, p, phi, &opts()).unwrap();
        let b = pair_moment_alt(&st, lam, p, phi).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn bitwise_deterministic(mag in 5.0f64..500.0, arg in -1.5f64..1.5, f in 0.01f64..5.0) {
        let lam = Complex64::from_polar(mag, arg);
        let p = f * lam.norm_sqr();
        let a = evaluate(lam, p, 0.0, &opts()).unwrap();
        let b = std::thread::spawn(move || evaluate(lam, p, 0.0, &opts()).unwrap()).join().unwrap();
        prop_assert_eq!(a.n.to_bits(), b.n.to_bits());
        prop_assert_eq!(a.pair_moment.re.to_bits(), b.pair_moment.re.to_bits());
    }
}
