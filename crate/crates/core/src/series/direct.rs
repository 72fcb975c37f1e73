//! Direct log-space summation of the weight family N_j = p^j / |(Λ+1)_j|².

use super::sum::Neumaier;
use super::{JStats, Method};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Normalized sums from one pass over the weights.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DirectSums {
    pub stats: JStats,
    /// Σ j(Λ*+j) N_j / N.
    pub pair: Complex64,
}

pub(crate) fn check_pole(lambda: Complex64) -> Result<()> {
    if lambda.im == 0.0 && lambda.re <= -1.0 && lambda.re.fract() == 0.0 {
        return Err(Error::PoleInput {
            index: (-lambda.re - 1.0) as u64,
        });
    }
    Ok(())
}

/// Continuous location of the interior maximum, |Λ+1+x|² = p, if it lies at x > 0.
pub(crate) fn interior_peak(lambda: Complex64, p: f64) -> Option<f64> {
    let dp = p - lambda.im * lambda.im;
    if dp <= 0.0 {
        return None;
    }
    let x = dp.sqrt() - lambda.re - 1.0;
    (x > 0.0).then_some(x)
}

pub(crate) fn vacuum_stats() -> JStats {
    JStats {
        log_n: 0.0,
        j_mean: 0.0,
        j_var: 0.0,
        j_peak: 0,
        terms_used: 1,
        tail_bound: 0.0,
        method: Method::DirectSum,
        j_center: 0.0,
        j_offset: 0.0,
    }
}

/// Bounds on Σ_{i>j} iᵠ N_i relative to N_j for q = 0, 1, 2, from the geometric ratio bound.
fn weighted_tails(lambda: Complex64, p: f64, j: f64) -> [f64; 3] {
    let r = tail_ratio(lambda, p, j);
    if r >= 1.0 {
        return [f64::INFINITY; 3];
    }
    let g = 1.0 - r;
    // Σ_{k≥1} kᵠ rᵏ for q = 0, 1, 2.
    let (a0, a1, a2) = (r / g, r / (g * g), r * (1.0 + r) / (g * g * g));
    [a0, j * a0 + a1, j * j * a0 + 2.0 * j * a1 + a2]
}

/// Supremum of the term ratio p/|Λ+1+i|² over i > j.
fn tail_ratio(lambda: Complex64, p: f64, j: f64) -> f64 {
    let re1 = lambda.re + 1.0 + j + 1.0;
    let r_next = p / (re1 * re1 + lambda.im * lambda.im);
    // The ratio p/|Λ+1+i|² decreases for i ≥ −Re Λ − 1; before that it is bounded by p/(Im Λ)².
    if j + 1.0 >= -lambda.re - 1.0 {
        r_next
    } else if lambda.im != 0.0 {
        r_next.max(p / (lambda.im * lambda.im))
    } else {
        f64::INFINITY
    }
}

pub(crate) fn direct_sum(
    lambda: Complex64,
    p: f64,
    tol: f64,
    max_terms: u64,
) -> Result<DirectSums> {
    check_pole(lambda)?;
    if p == 0.0 {
        return Ok(DirectSums {
            stats: vacuum_stats(),
            pair: Complex64::new(0.0, 0.0),
        });
    }
    let x_plus = interior_peak(lambda, p);
    if let Some(x) = x_plus {
        if x >= max_terms as f64 {
            return Err(Error::Nonconvergence { ceiling: max_terms });
        }
    }
    let j_rise = x_plus.map_or(0, |x| x.floor() as u64);
    let c = x_plus.map_or(0.0, |x| x.round());
    let lnp = p.ln();
    let re1 = lambda.re + 1.0;
    let im2 = lambda.im * lambda.im;

    let mut log_term = Neumaier::new();
    let mut max_log = 0.0;
    let mut j_peak = 0u64;
    let mut s0 = Neumaier::new();
    let mut s1 = Neumaier::new();
    let mut s2 = Neumaier::new();
    let mut pr = Neumaier::new();
    let mut pi = Neumaier::new();
    s0.add(1.0);
    s1.add(-c);
    s2.add(c * c);

    let mut j = 0u64;
    let mut stop_at: Option<u64> = None;
    let tail_bound;
    loop {
        let x = re1 + j as f64;
        log_term.add(lnp - (x * x + im2).ln());
        j += 1;
        let l = log_term.value();
        if l > max_log {
            let f = (max_log - l).exp();
            for acc in [&mut s0, &mut s1, &mut s2, &mut pr, &mut pi] {
                acc.scale(f);
            }
            max_log = l;
            j_peak = j;
        }
        let w = (l - max_log).exp();
        let jj = j as f64;
        let d = jj - c;
        s0.add(w);
        s1.add(d * w);
        s2.add(d * d * w);
        pr.add(jj * (lambda.re + jj) * w);
        pi.add(jj * w);
        if j + 1 > max_terms {
            return Err(Error::Nonconvergence { ceiling: max_terms });
        }
        let ext = (10.0 * ((j_peak + 10) as f64).sqrt()).ceil() as u64;
        match stop_at {
            None => {
                if j > j_rise && w <= tol * 1e-3 {
                    stop_at = Some(j + ext);
                }
            }
            Some(s) if j >= s => {
                // The dropped tail relative to each of the sums of N_j, jN_j and j²N_j,
                // so that the mean and variance inherit the bound as well as the norm.
                let [t0, t1, t2] = weighted_tails(lambda, p, jj);
                let z = s0.value();
                let m1 = c * z + s1.value();
                let m2 = s2.value() + 2.0 * c * s1.value() + c * c * z;
                let t = (w * t0 / z).max(w * t1 / m1).max(w * t2 / m2);
                if t <= tol {
                    tail_bound = t;
                    break;
                }
                stop_at = Some(j + ext);
            }
            Some(_) => {}
        }
    }
    let z = s0.value();
    let m1 = s1.value() / z;
    let var = (s2.value() / z - m1 * m1).max(0.0);
    let stats = JStats {
        log_n: max_log + z.ln(),
        j_mean: c + m1,
        j_var: var,
        j_peak,
        terms_used: j + 1,
        tail_bound,
        method: Method::DirectSum,
        j_center: c,
        j_offset: m1,
    };
    Ok(DirectSums {
        stats,
        pair: Complex64::new(pr.value() / z, -lambda.im * pi.value() / z),
    })
}
