//! Normally-ordered moments of arbitrary order from their hypergeometric-type series.

use super::direct::{check_pole, interior_peak};
use super::sum::Neumaier;
use super::{validate_input, SeriesOptions};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::VecDeque;

/// Largest moment order accepted by the general-moment series.
pub const MAX_MOMENT_ORDER: u32 = 30;

/// Σ_j (j+sa)↓fa (j+sb)↓fb √(N_{j+sa} N_{j+sb}) e^{i(Φ_{j+sb} − Φ_{j+sa})} / Σ_j N_j, where
/// N_j = p^j/|(Λ+1)_j|², Φ_j = Σ_{i<j} arg(Λ+1+i) and x↓f is the falling factorial.
///
/// Numerator and normalization share one log-weight recurrence and one reference
/// offset, so the large common logarithm cancels exactly instead of being subtracted
/// after the fact.
fn weighted_ratio(
    lambda: Complex64,
    p: f64,
    (sa, fa): (u32, u32),
    (sb, fb): (u32, u32),
    opts: &SeriesOptions,
) -> Result<Complex64> {
    let z1 = lambda + 1.0;
    if let Some(x) = interior_peak(lambda, p) {
        if x >= opts.max_terms as f64 {
            return Err(Error::Nonconvergence {
                ceiling: opts.max_terms,
            });
        }
    }
    let lnp = p.ln();
    let depth = sa.max(sb) as usize;
    // (log weight, accumulated phase) for indices m - depth ..= m.
    let mut history: VecDeque<(f64, f64)> = VecDeque::with_capacity(depth + 1);
    let (mut lw, mut phi) = (Neumaier::new(), Neumaier::new());
    let mut reference = 0.0f64;
    let mut norm = Neumaier::new();
    // Numerator terms are stored relative to `reference + num_offset`.
    let mut num_offset = f64::NEG_INFINITY;
    let (mut num_re, mut num_im) = (Neumaier::new(), Neumaier::new());
    let falling = |x: f64, f: u32| (0..f).map(|t| x - t as f64).product::<f64>();
    let mut m = 0u64;
    loop {
        let l_m = lw.value();
        history.push_back((l_m, phi.value()));
        if history.len() > depth + 1 {
            history.pop_front();
        }
        if l_m > reference {
            norm.scale((reference - l_m).exp());
            num_offset -= l_m - reference;
            reference = l_m;
        }
        let w = (l_m - reference).exp();
        norm.add(w);
        let mut num_term = 0.0;
        let mut j = 0.0;
        if m as usize >= depth {
            j = (m as usize - depth) as f64;
            let (la, pa) = history[sa as usize];
            let (lb, pb) = history[sb as usize];
            let poly = falling(j + sa as f64, fa) * falling(j + sb as f64, fb);
            if poly > 0.0 {
                let x = 0.5 * ((la - reference) + (lb - reference)) + poly.ln();
                if x > num_offset {
                    let f = if num_offset.is_finite() {
                        (num_offset - x).exp()
                    } else {
                        0.0
                    };
                    num_re.scale(f);
                    num_im.scale(f);
                    num_offset = x;
                }
                num_term = (x - num_offset).exp();
                let (s, c) = (pb - pa).sin_cos();
                num_re.add(num_term * c);
                num_im.add(num_term * s);
            }
        }
        let zm = z1 + m as f64;
        let r = p / zm.norm_sqr();
        let zj = z1 + j;
        let rj = p / zj.norm_sqr();
        let growth = (falling(j + 1.0 + sa as f64, fa) * falling(j + 1.0 + sb as f64, fb))
            / (falling(j + sa as f64, fa) * falling(j + sb as f64, fb)).max(f64::MIN_POSITIVE);
        let q = rj * growth;
        let monotone = m as f64 >= -lambda.re - 1.0 && j >= -lambda.re - 1.0;
        if monotone && m as usize >= depth && r < 1.0 && q < 1.0 {
            let num_sum = Complex64::new(num_re.value(), num_im.value()).norm();
            let norm_tail = w * r / (1.0 - r);
            let num_tail = num_term * q / (1.0 - q);
            if norm_tail <= opts.tol * norm.value() && num_tail <= opts.tol * num_sum {
                let ratio = Complex64::new(num_re.value(), num_im.value()) / norm.value();
                return Ok(ratio * num_offset.exp());
            }
        }
        if m + 1 >= opts.max_terms {
            return Err(Error::Nonconvergence {
                ceiling: opts.max_terms,
            });
        }
        lw.add(lnp - zm.norm_sqr().ln());
        phi.add(zm.arg());
        m += 1;
    }
}

fn check_orders(a: u32, b: u32) -> Result<()> {
    if a > MAX_MOMENT_ORDER || b > MAX_MOMENT_ORDER {
        return Err(Error::InvalidParams(format!(
            "moment orders must not exceed {MAX_MOMENT_ORDER}, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// ⟨a₁⁺ᵏ a₁ˡ a₂⁺ᵏ a₂ˡ⟩.
pub fn general_moment_kl(
    lambda: Complex64,
    epsilon: Complex64,
    k: u32,
    l: u32,
    opts: &SeriesOptions,
) -> Result<Complex64> {
    check_orders(k, l)?;
    check_pole(lambda)?;
    let p = 4.0 * epsilon.norm_sqr();
    // The zeroth moment is the normalization itself.
    if k == 0 && l == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if p == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    validate_input(lambda, p)?;
    opts.validate()?;
    let pref = Complex64::from_polar(
        (-((k + l) as f64) * std::f64::consts::LN_2).exp(),
        (l as f64 - k as f64) * epsilon.arg(),
    );
    Ok(pref * weighted_ratio(lambda, p, (l, l), (k, k), opts)?)
}

/// ⟨a₁⁺ᵐ a₁ᵐ a₂⁺ⁿ a₂ⁿ⟩ (symmetric in m and n).
pub fn general_moment_mn(
    lambda: Complex64,
    p: f64,
    m: u32,
    n: u32,
    opts: &SeriesOptions,
) -> Result<f64> {
    check_orders(m, n)?;
    check_pole(lambda)?;
    let (m, n) = if n > m { (n, m) } else { (m, n) };
    if m == 0 {
        return Ok(1.0);
    }
    validate_input(lambda, p)?;
    opts.validate()?;
    if p == 0.0 {
        return Ok(0.0);
    }
    let scale = (-((m + n) as f64) * std::f64::consts::LN_2).exp();
    Ok(scale * weighted_ratio(lambda, p, (m, m), (m, n), opts)?.re)
}
