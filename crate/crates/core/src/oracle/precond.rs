//! Block Sylvester preconditioner: the coherent plus no-jump part of the generator.
//!
//! On each block the generator without jump terms is X ↦ −i(H_k X − X H_kb†). With
//! complex Schur forms H = Q T Q† the shifted equation −i(H_k Z − Z H_kb†) − σZ = R
//! becomes T_k W − W T_kb† = i Q_k† R Q_kb, solved column by column from the last.

use super::generator::Generator;
use super::layout::{group_dim, Layout};
use crate::error::{Error, Result};
use matrixmultiply::CGemmOption;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major Schur factors of one group Hamiltonian.
struct GroupSchur {
    n: usize,
    q: Vec<Complex64>,
    qh: Vec<Complex64>,
    t: Vec<Complex64>,
}

/// C = αAB with strided operands.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: Complex64,
    a: &[Complex64],
    (rsa, csa): (usize, usize),
    b: &[Complex64],
    (rsb, csb): (usize, usize),
    c: &mut [Complex64],
    (rsc, csc): (usize, usize),
) {
    debug_assert!(a.len() > (m.max(1) - 1) * rsa + (k.max(1) - 1) * csa || m * k == 0);
    debug_assert!(b.len() > (k.max(1) - 1) * rsb + (n.max(1) - 1) * csb || k * n == 0);
    debug_assert!(c.len() > (m.max(1) - 1) * rsc + (n.max(1) - 1) * csc || m * n == 0);
    // SAFETY: Complex64 is repr(C) with layout [f64; 2], and the debug assertions above
    // describe the extents the strides address.
    unsafe {
        matrixmultiply::zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.as_ptr() as *const [f64; 2],
            rsa as isize,
            csa as isize,
            b.as_ptr() as *const [f64; 2],
            rsb as isize,
            csb as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            rsc as isize,
            csc as isize,
        );
    }
}

pub struct SylvesterPreconditioner {
    layout: Layout,
    shift: f64,
    /// Factors per |k|; groups k and −k share a Hamiltonian.
    schur: Vec<GroupSchur>,
}

impl SylvesterPreconditioner {
    pub fn new(generator: &Generator, layout: &Layout, shift: f64) -> Result<Self> {
        let c = generator.cutoff;
        let mut schur = Vec::with_capacity(c + 1);
        for k in 0..=c as i32 {
            let h = generator.group_hamiltonian(k);
            let n = group_dim(c, k);
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = h.diag[i];
                if i + 1 < n {
                    m[(i + 1, i)] = h.lower[i];
                    m[(i, i + 1)] = h.upper[i];
                }
            }
            let s = Schur::try_new(m, 1e-15, 10_000).ok_or(Error::SolverFailure {
                iterations: 0,
                residual: f64::NAN,
            })?;
            let (qm, tm) = s.unpack();
            let mut q = vec![ZERO; n * n];
            let mut qh = vec![ZERO; n * n];
            let mut t = vec![ZERO; n * n];
            for i in 0..n {
                for j in 0..n {
                    q[i * n + j] = qm[(i, j)];
                    qh[j * n + i] = qm[(i, j)].conj();
                    t[i * n + j] = if j >= i { tm[(i, j)] } else { ZERO };
                }
            }
            schur.push(GroupSchur { n, q, qh, t });
        }
        Ok(SylvesterPreconditioner {
            layout: layout.clone(),
            shift,
            schur,
        })
    }

    /// z = M⁻¹ r with M[X] = −i(H_k X − X H_kb†) − σX on every block.
    pub fn apply(&self, r: &[Complex64], z: &mut [Complex64]) {
        let l = &self.layout;
        let mut tmp = Vec::new();
        let mut w = Vec::new();
        for (s, &k) in l.ks.iter().enumerate() {
            let kb = k - l.d;
            let a = &self.schur[k.unsigned_abs() as usize];
            let b = &self.schur[kb.unsigned_abs() as usize];
            let (rows, cols) = (a.n, b.n);
            let range = l.offsets[s]..l.offsets[s] + rows * cols;
            tmp.resize(rows * cols, ZERO);
            w.resize(rows * cols, ZERO);
            // tmp = R Q_b (row-major); w = i Q_a† tmp (column-major).
            gemm(
                rows,
                cols,
                cols,
                Complex64::new(1.0, 0.0),
                &r[range.clone()],
                (cols, 1),
                &b.q,
                (cols, 1),
                &mut tmp,
                (cols, 1),
            );
            gemm(
                rows,
                rows,
                cols,
                Complex64::new(0.0, 1.0),
                &a.qh,
                (rows, 1),
                &tmp,
                (cols, 1),
                &mut w,
                (1, rows),
            );
            let shift = Complex64::new(0.0, self.shift);
            for j in (0..cols).rev() {
                let (head, tail) = w.split_at_mut((j + 1) * rows);
                let col = &mut head[j * rows..];
                for i in j + 1..cols {
                    let f = b.t[j * cols + i].conj();
                    if f != ZERO {
                        let other = &tail[(i - j - 1) * rows..(i - j) * rows];
                        for (c, o) in col.iter_mut().zip(other) {
                            *c += f * o;
                        }
                    }
                }
                let tjj = b.t[j * cols + j].conj();
                for rr in (0..rows).rev() {
                    let mut v = col[rr];
                    for cc in rr + 1..rows {
                        v -= a.t[rr * rows + cc] * col[cc];
                    }
                    col[rr] = v / (a.t[rr * rows + rr] - tjj - shift);
                }
            }
            // tmp = Q_a W (row-major); Z = tmp Q_b†.
            gemm(
                rows,
                rows,
                cols,
                Complex64::new(1.0, 0.0),
                &a.q,
                (rows, 1),
                &w,
                (1, rows),
                &mut tmp,
                (cols, 1),
            );
            gemm(
                rows,
                cols,
                cols,
                Complex64::new(1.0, 0.0),
                &tmp,
                (cols, 1),
                &b.qh,
                (cols, 1),
                &mut z[range],
                (cols, 1),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generator::SectorOperator;
    use crate::params::NopoParams;

    #[test]
    fn inverts_the_no_jump_part() {
        // With γ = G = 0 jump terms vanish, so M = L − σ exactly.
        let p = NopoParams::new(0.5, 1.0, 18.0, 0.7, 0.0)
            .with_es(1.1)
            .with_phase(0.3);
        let mut g = Generator::new(&p, 7).unwrap();
        g.gamma = 0.0;
        g.pair_loss = 0.0;
        for layout in [Layout::mirrored(7), Layout::new(7, 2)] {
            let op = SectorOperator::new(&g, layout.clone());
            let pre = SylvesterPreconditioner::new(&g, &layout, 0.3).unwrap();
            let r: Vec<Complex64> = (0..layout.len)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let mut z = vec![ZERO; layout.len];
            pre.apply(&r, &mut z);
            let lz = op.apply_new(&z);
            for i in 0..layout.len {
                let back = lz[i] - 0.3 * z[i];
                assert!((back - r[i]).norm() < 1e-10, "{i}: {back} vs {}", r[i]);
            }
        }
    }
}
