//! Restarted right-preconditioned GMRES for complex vectors.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOutcome {
    pub iterations: usize,
    /// Final true relative residual ‖b − Ax‖/‖b‖.
    pub residual: f64,
    pub converged: bool,
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Solve A x = b starting from `x`. `apply(v, out)` computes out = A v and
/// `precond(v, out)` computes out = M⁻¹ v.
pub fn gmres(
    mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
    mut precond: impl FnMut(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    restart: usize,
    max_iterations: usize,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    let mut r = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    let mut z = vec![ZERO; n];
    let mut total = 0;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(restart + 1);
    loop {
        apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm(&r);
        let rel = beta / bnorm;
        if rel <= tol || total >= max_iterations {
            return GmresOutcome {
                iterations: total,
                residual: rel,
                converged: rel <= tol,
            };
        }
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![ZERO; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![ZERO; restart];
        let mut g = vec![ZERO; restart + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..restart {
            precond(&basis[j], &mut z);
            apply(&z, &mut w);
            total += 1;
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    h[i][j] += c;
                    axpy(-c, v, &mut w);
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = Complex64::new(hn, 0.0);
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i].conj() * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let (a, bb) = (h[j][j], h[j + 1][j]);
            let t = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if t == 0.0 {
                cs[j] = 1.0;
                sn[j] = ZERO;
            } else if a.norm() == 0.0 {
                cs[j] = 0.0;
                sn[j] = Complex64::new(1.0, 0.0);
            } else {
                cs[j] = a.norm() / t;
                sn[j] = (a / a.norm()) * bb.conj() / t;
            }
            h[j][j] = cs[j] * a + sn[j] * bb;
            h[j + 1][j] = ZERO;
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            used = j + 1;
            let breakdown = hn <= 1e-300;
            if !breakdown {
                basis.push(w.iter().map(|v| v / hn).collect());
            }
            if g[j + 1].norm() / bnorm <= tol * 0.5 || breakdown || total >= max_iterations {
                break;
            }
        }
        // Back-substitution for the least-squares coefficients.
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut v = g[i];
            for k in i + 1..used {
                v -= h[i][k] * y[k];
            }
            y[i] = v / h[i][i];
        }
        w.iter_mut().for_each(|v| *v = ZERO);
        for (yi, v) in y.iter().zip(&basis) {
            axpy(*yi, v, &mut w);
        }
        precond(&w, &mut z);
        axpy(Complex64::new(1.0, 0.0), &z, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let n = 40;
        let a = |i: usize, j: usize| {
            if i == j {
                Complex64::new(4.0 + i as f64 * 0.1, 1.0)
            } else if j == i + 1 {
                Complex64::new(-1.0, 0.5)
            } else if i == j + 3 {
                Complex64::new(0.3, -0.7)
            } else {
                ZERO
            }
        };
        let apply = |v: &[Complex64], out: &mut [Complex64]| {
            for i in 0..n {
                out[i] = (0..n).map(|j| a(i, j) * v[j]).sum();
            }
        };
        let b: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0, i as f64 * 0.01))
            .collect();
        let mut x = vec![ZERO; n];
        let out = gmres(
            apply,
            |v, o| o.copy_from_slice(v),
            &b,
            &mut x,
            1e-13,
            7,
            1000,
        );
        assert!(out.converged, "{out:?}");
        let mut ax = vec![ZERO; n];
        apply(&x, &mut ax);
        let err: f64 = ax
            .iter()
            .zip(&b)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-11);
    }
}
