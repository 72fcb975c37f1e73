//! Normally-ordered moments and EPR variance from truncated density operators.

use super::layout::Layout;
use num_complex::Complex64;

/// ⟨b|a⁺ᵏ aˡ|a⟩ for b = a − l + k, or zero when a < l.
fn ladder_coeff(a: usize, k: usize, l: usize) -> f64 {
    if a < l {
        return 0.0;
    }
    let lowered = a - l;
    let mut c = 1.0;
    for v in lowered + 1..=a {
        c *= (v as f64).sqrt();
    }
    for v in lowered + 1..=lowered + k {
        c *= (v as f64).sqrt();
    }
    c
}

/// Sector that carries Tr(ρ a₁⁺ᵏ a₁ˡ a₂⁺ᵐ a₂ⁿ).
pub fn moment_sector(k: u32, l: u32, m: u32, n: u32) -> i32 {
    (l as i32 - k as i32) + (m as i32 - n as i32)
}

/// Tr(X a₁⁺ᵏ a₁ˡ a₂⁺ᵐ a₂ⁿ) restricted to one sector; zero when the operator lives elsewhere.
pub fn sector_moment(
    layout: &Layout,
    x: &[Complex64],
    k: u32,
    l: u32,
    m: u32,
    n: u32,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if moment_sector(k, l, m, n) != layout.d {
        return acc;
    }
    let c = layout.cutoff;
    let (k, l, m, n) = (k as usize, l as usize, m as usize, n as usize);
    for a1 in l..=c {
        let b1 = a1 - l + k;
        if b1 > c {
            continue;
        }
        let c1 = ladder_coeff(a1, k, l);
        for a2 in n..=c {
            let b2 = a2 - n + m;
            if b2 > c {
                continue;
            }
            let coeff = c1 * ladder_coeff(a2, m, n);
            acc += layout.element(x, (a1, a2), (b1, b2)) * coeff;
        }
    }
    acc
}

/// Phase-resolved variance of X₁(θ₁) − X₂(θ₂) from a moment lookup
/// `mom(k, l, m, n) = ⟨a₁⁺ᵏ a₁ˡ a₂⁺ᵐ a₂ⁿ⟩`, with X = (a e^{−iθ} + a⁺ e^{iθ})/√2.
pub fn epr_variance_from(
    mom: impl Fn(u32, u32, u32, u32) -> Complex64,
    theta1: f64,
    theta2: f64,
) -> f64 {
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let x11 = 0.5
        * (mom(0, 2, 0, 0) * e(-2.0 * theta1)
            + mom(2, 0, 0, 0) * e(2.0 * theta1)
            + 2.0 * mom(1, 1, 0, 0)
            + 1.0);
    let x22 = 0.5
        * (mom(0, 0, 0, 2) * e(-2.0 * theta2)
            + mom(0, 0, 2, 0) * e(2.0 * theta2)
            + 2.0 * mom(0, 0, 1, 1)
            + 1.0);
    let x12 = 0.5
        * (mom(0, 1, 0, 1) * e(-(theta1 + theta2))
            + mom(1, 0, 1, 0) * e(theta1 + theta2)
            + mom(0, 1, 1, 0) * e(theta2 - theta1)
            + mom(1, 0, 0, 1) * e(theta1 - theta2));
    let mean = std::f64::consts::FRAC_1_SQRT_2
        * (mom(0, 1, 0, 0) * e(-theta1) + mom(1, 0, 0, 0) * e(theta1)
            - mom(0, 0, 0, 1) * e(-theta2)
            - mom(0, 0, 1, 0) * e(theta2));
    (x11 + x22 - 2.0 * x12).re - mean.re * mean.re
}
