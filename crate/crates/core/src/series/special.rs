//! Real parts of log-gamma and polygamma functions of complex argument, as needed by
//! the continuum route.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Bernoulli numbers B_2 .. B_14.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Magnitude above which the asymptotic expansions are used directly.
pub const ASYMPTOTIC_RADIUS: f64 = 15.0;

/// Σ_k B_{2k} / (2k(2k−1) z^{2k−1}), the correction in Stirling's series for ln Γ.
pub fn stirling_tail(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pw = inv;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = (i + 1) as f64;
        acc += pw * (b / (2.0 * k * (2.0 * k - 1.0)));
        pw *= inv2;
    }
    acc
}

/// ln|sin(πz)|, stable for large |Im z|.
fn ln_abs_sin_pi(z: Complex64) -> f64 {
    let a = 2.0 * PI * z.im.abs();
    let c = (2.0 * PI * z.re).cos();
    if a > 40.0 {
        // cosh(a) − c = e^a/2 · (1 + e^{−2a} − 2c e^{−a})
        0.5 * (a - 2.0 * std::f64::consts::LN_2 + (-2.0 * c * (-a).exp()).ln_1p())
    } else {
        0.5 * ((a.cosh() - c) * 0.5).ln()
    }
}

/// ln|Γ(z)| for complex z away from the poles.
pub fn ln_abs_gamma(z: Complex64) -> f64 {
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0 - z.re, -z.im);
        return PI.ln() - ln_abs_sin_pi(z) - ln_abs_gamma(one_minus);
    }
    let mut w = z;
    let mut shift = 0.0;
    while w.norm() < ASYMPTOTIC_RADIUS {
        shift += w.norm().ln();
        w.re += 1.0;
    }
    let lnw = w.ln();
    let main = (w - 0.5) * lnw - w + stirling_tail(w);
    main.re + 0.5 * (2.0 * PI).ln() - shift
}

/// Real parts of ln z − ψ(z), ψ′(z) and ψ″(z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygammaRe {
    pub ln_minus_psi: f64,
    pub psi1: f64,
    pub psi2: f64,
}

fn asymptotic_polygamma(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let inv = z.inv();
    let inv2 = inv * inv;
    // ln z − ψ(z) = 1/(2z) + Σ B_{2k}/(2k z^{2k})
    let mut lmp = inv * 0.5;
    // ψ′(z) = 1/z + 1/(2z²) + Σ B_{2k}/z^{2k+1}
    let mut p1 = inv + inv2 * 0.5;
    // ψ″(z) = −1/z² − 1/z³ − Σ (2k+1) B_{2k}/z^{2k+2}
    let mut p2 = -inv2 - inv2 * inv;
    let mut pw = inv2;
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = (i + 1) as f64;
        lmp += pw * (b / (2.0 * k));
        p1 += pw * inv * *b;
        p2 -= pw * inv2 * ((2.0 * k + 1.0) * b);
        pw *= inv2;
    }
    (lmp, p1, p2)
}

/// Polygamma real parts; uses upward recurrence for small |z| and reflection for
/// Re z ≪ 0.
pub fn polygamma_re(z: Complex64) -> PolygammaRe {
    if z.norm() >= ASYMPTOTIC_RADIUS && z.re > 0.0 {
        let (l, p1, p2) = asymptotic_polygamma(z);
        return PolygammaRe {
            ln_minus_psi: l.re,
            psi1: p1.re,
            psi2: p2.re,
        };
    }
    if z.re < -1000.0 {
        // ψ(z) = ψ(1−z) − π cot(πz), ψ′(z) = −ψ′(1−z) + π²/sin²(πz),
        // ψ″(z) = ψ″(1−z) − 2π³ cot(πz)/sin²(πz)
        let w = Complex64::new(1.0 - z.re, -z.im);
        let r = polygamma_re(w);
        let (cot, csc2) = if (PI * z.im).abs() > 300.0 {
            (
                Complex64::new(0.0, -z.im.signum()),
                Complex64::new(0.0, 0.0),
            )
        } else {
            let s = (z * PI).sin();
            ((z * PI).cos() / s, (s * s).inv())
        };
        let ln_ratio = z.norm().ln() - w.norm().ln();
        return PolygammaRe {
            ln_minus_psi: ln_ratio + r.ln_minus_psi + (cot * PI).re,
            psi1: -r.psi1 + (csc2 * PI * PI).re,
            psi2: r.psi2 - (cot * csc2 * (2.0 * PI * PI * PI)).re,
        };
    }
    // ψ(z) = ψ(z+1) − 1/z, ψ′(z) = ψ′(z+1) + 1/z², ψ″(z) = ψ″(z+1) − 2/z³
    let mut w = z;
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    while !(w.norm() >= ASYMPTOTIC_RADIUS && w.re > 0.0) {
        let inv = w.inv();
        s0 += inv;
        s1 += inv * inv;
        s2 += inv * inv * inv;
        w.re += 1.0;
    }
    let (l, p1, p2) = asymptotic_polygamma(w);
    PolygammaRe {
        ln_minus_psi: z.norm().ln() - w.norm().ln() + l.re + s0.re,
        psi1: p1.re + s1.re,
        psi2: p2.re - 2.0 * s2.re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_abs_pochhammer(z: Complex64, n: usize) -> f64 {
        (0..n).map(|i| (z + i as f64).norm().ln()).sum()
    }

    #[test]
    fn gamma_real_values() {
        // Γ(5) = 24, Γ(0.5) = √π
        assert!((ln_abs_gamma(Complex64::new(5.0, 0.0)) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_abs_gamma(Complex64::new(0.5, 0.0)) - 0.5 * PI.ln()).abs() < 1e-13);
        // Γ(−0.5) = −2√π
        let v = ln_abs_gamma(Complex64::new(-0.5, 0.0));
        assert!((v - (2.0 * PI.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn gamma_recurrence_complex() {
        for z in [
            Complex64::new(0.3, 2.0),
            Complex64::new(-40.5, 7.0),
            Complex64::new(3.0, -50.0),
        ] {
            let lhs = ln_abs_gamma(z + 6.0) - ln_abs_gamma(z);
            let rhs = ln_abs_pochhammer(z, 6);
            assert!(
                (lhs - rhs).abs() < 1e-11 * (1.0 + rhs.abs()),
                "{z}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn polygamma_matches_finite_differences() {
        for z in [
            Complex64::new(2.0, 1.0),
            Complex64::new(40.0, -30.0),
            Complex64::new(-2000.5, 900.0),
        ] {
            let h = 1e-4 * z.norm().max(1.0);
            let f = |x: f64| ln_abs_gamma(z + x);
            let d1 = (f(h) - f(-h)) / (2.0 * h);
            let pg = polygamma_re(z);
            let psi = z.norm().ln() - pg.ln_minus_psi;
            assert!(
                (psi - d1).abs() < 1e-6 * (1.0 + d1.abs()),
                "{z}: {psi} vs {d1}"
            );
            let g = |x: f64| {
                let w = z + x;
                w.norm().ln() - polygamma_re(w).ln_minus_psi
            };
            let d2 = (g(h) - g(-h)) / (2.0 * h);
            assert!(
                (pg.psi1 - d2).abs() < 1e-6 * (1.0 + d2.abs()),
                "{z}: {} vs {d2}",
                pg.psi1
            );
            let q = |x: f64| polygamma_re(z + x).psi1;
            let d3 = (q(h) - q(-h)) / (2.0 * h);
            assert!(
                (pg.psi2 - d3).abs() < 1e-6 * (1.0 + d3.abs()),
                "{z}: {} vs {d3}",
                pg.psi2
            );
        }
    }
}
