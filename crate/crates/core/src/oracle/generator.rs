//! Action of the two-mode Lindblad generator on one sector of the density operator.
//!
//! dρ/dt = −i[H, ρ] + γ Σᵢ D[aᵢ]ρ + G D[a₁a₂]ρ with D[A]ρ = 2AρA⁺ − A⁺Aρ − ρA⁺A,
//! H = −Δ(N₁ + N₂) + i(λa₁⁺a₂⁺ − λ*a₁a₂), λ = κE/γ₃ and G = κ²/γ₃.
//! The anti-Hermitian part of the evolution is folded into the tridiagonal
//! effective Hamiltonian H_eff = H − i(γ(N₁ + N₂) + G N₁N₂) of each group.

use super::layout::{group_dim, occ, Layout};
use crate::error::{Error, Result};
use crate::params::NopoParams;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub cutoff: usize,
    pub delta: f64,
    pub gamma: f64,
    /// Pair-loss rate κ²/γ₃.
    pub pair_loss: f64,
    /// Pair drive λ = κE/γ₃.
    pub lambda: Complex64,
}

/// Tridiagonal effective Hamiltonian of one group.
#[derive(Debug, Clone)]
pub struct GroupHamiltonian {
    pub diag: Vec<Complex64>,
    /// `lower[i]` = H[i+1][i].
    pub lower: Vec<Complex64>,
    /// `upper[i]` = H[i][i+1].
    pub upper: Vec<Complex64>,
    /// √((n₁+1)(n₂+1)) of each state.
    pub pair_amp: Vec<f64>,
}

impl Generator {
    pub fn new(params: &NopoParams, cutoff: usize) -> Result<Self> {
        params.validate()?;
        if params.delta3 != 0.0 {
            return Err(Error::UnsupportedDetuning {
                delta3: params.delta3,
            });
        }
        if cutoff < 4 {
            return Err(Error::InvalidParams(format!(
                "cutoff must be at least 4, got {cutoff}"
            )));
        }
        Ok(Generator {
            cutoff,
            delta: params.delta,
            gamma: params.gamma,
            pair_loss: params.kappa * params.kappa / params.gamma3,
            lambda: params.pump() * (params.kappa / params.gamma3),
        })
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        Generator {
            cutoff,
            ..self.clone()
        }
    }

    pub fn group_hamiltonian(&self, k: i32) -> GroupHamiltonian {
        let dim = group_dim(self.cutoff, k);
        let mut diag = Vec::with_capacity(dim);
        let mut lower = Vec::with_capacity(dim.saturating_sub(1));
        let mut upper = Vec::with_capacity(dim.saturating_sub(1));
        let mut pair_amp = Vec::with_capacity(dim);
        for m in 0..dim {
            let (n1, n2) = occ(k, m);
            pair_amp.push((((n1 + 1) * (n2 + 1)) as f64).sqrt());
            let tot = (n1 + n2) as f64;
            let prod = (n1 * n2) as f64;
            diag.push(Complex64::new(
                -self.delta * tot,
                -(self.gamma * tot + self.pair_loss * prod),
            ));
            if m + 1 < dim {
                let s = (((n1 + 1) * (n2 + 1)) as f64).sqrt();
                lower.push(I * self.lambda * s);
                upper.push(-I * self.lambda.conj() * s);
            }
        }
        GroupHamiltonian {
            diag,
            lower,
            upper,
            pair_amp,
        }
    }

    /// Cheap upper bound on the spectral radius of the generator.
    pub fn spectral_bound(&self) -> f64 {
        let c = self.cutoff as f64;
        let c1 = c + 1.0;
        2.0 * c * (self.delta.abs() + self.gamma)
            + 2.0 * self.pair_loss * c * c
            + 4.0 * self.lambda.norm() * c1
            + 2.0 * self.pair_loss * c1 * c1
            + 4.0 * self.gamma * c1
    }

    /// y = L[x] on sector `layout`.
    pub fn apply(
        &self,
        layout: &Layout,
        hs: &[GroupHamiltonian],
        x: &[Complex64],
        y: &mut [Complex64],
    ) {
        debug_assert_eq!(layout.cutoff, self.cutoff);
        let c = self.cutoff;
        let two_g = 2.0 * self.pair_loss;
        let two_gamma = 2.0 * self.gamma;
        let root: Vec<f64> = (0..=c + 1).map(|n| (n as f64).sqrt()).collect();
        for (s, &k) in layout.ks.iter().enumerate() {
            let kb = k - layout.d;
            let (rows, cols) = layout.dims(k);
            let hk = &hs[(k + c as i32) as usize];
            let hb = &hs[(kb + c as i32) as usize];
            let xb = &x[layout.offsets[s]..layout.offsets[s] + rows * cols];
            let up = layout.block(x, k + 1);
            let up_cols = group_dim(c, kb + 1);
            let down = layout.block(x, k - 1);
            let down_cols = group_dim(c, kb - 1);
            let out = &mut y[layout.offsets[s]..layout.offsets[s] + rows * cols];
            let hb_diag: Vec<Complex64> = hb.diag.iter().map(|v| v.conj()).collect();
            let hb_lower: Vec<Complex64> = hb.lower.iter().map(|v| v.conj()).collect();
            let hb_upper: Vec<Complex64> = hb.upper.iter().map(|v| v.conj()).collect();
            for i in 0..rows {
                let (n1, n2) = occ(k, i);
                let row = &xb[i * cols..(i + 1) * cols];
                let prev = (i > 0).then(|| &xb[(i - 1) * cols..i * cols]);
                let next = (i + 1 < rows).then(|| &xb[(i + 1) * cols..(i + 2) * cols]);
                let up_row = up.filter(|_| n1 < c).map(|b| {
                    let r = (n1 + 1).min(n2);
                    &b[r * up_cols..(r + 1) * up_cols]
                });
                let down_row = down.filter(|_| n2 < c).map(|b| {
                    let r = n1.min(n2 + 1);
                    &b[r * down_cols..(r + 1) * down_cols]
                });
                let pair_i = two_g * hk.pair_amp[i];
                let up_i = two_gamma * root[n1 + 1];
                let down_i = two_gamma * root[n2 + 1];
                let orow = &mut out[i * cols..(i + 1) * cols];
                for j in 0..cols {
                    let (q1, q2) = occ(kb, j);
                    let xij = row[j];
                    // H X − X H†
                    let mut comm = (hk.diag[i] - hb_diag[j]) * xij;
                    if let Some(p) = prev {
                        comm += hk.lower[i - 1] * p[j];
                    }
                    if let Some(nx) = next {
                        comm += hk.upper[i] * nx[j];
                    }
                    if j > 0 {
                        comm -= row[j - 1] * hb_lower[j - 1];
                    }
                    if j + 1 < cols {
                        comm -= row[j + 1] * hb_upper[j];
                    }
                    let mut v = Complex64::new(comm.im, -comm.re);
                    if let Some(nx) = next {
                        if j + 1 < cols {
                            v += (pair_i * hb.pair_amp[j]) * nx[j + 1];
                        }
                    }
                    if let Some(b) = up_row {
                        if q1 < c {
                            v += (up_i * root[q1 + 1]) * b[(q1 + 1).min(q2)];
                        }
                    }
                    if let Some(b) = down_row {
                        if q2 < c {
                            v += (down_i * root[q2 + 1]) * b[q1.min(q2 + 1)];
                        }
                    }
                    orow[j] = v;
                }
            }
        }
    }

    /// Effective Hamiltonians for every group −C..=C, indexed by k + C.
    pub fn hamiltonians(&self) -> Vec<GroupHamiltonian> {
        let c = self.cutoff as i32;
        (-c..=c).map(|k| self.group_hamiltonian(k)).collect()
    }
}

/// Generator bound to one sector layout.
pub struct SectorOperator<'a> {
    pub generator: &'a Generator,
    pub layout: Layout,
    pub hs: Vec<GroupHamiltonian>,
}

impl<'a> SectorOperator<'a> {
    pub fn new(generator: &'a Generator, layout: Layout) -> Self {
        SectorOperator {
            hs: generator.hamiltonians(),
            generator,
            layout,
        }
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.generator.apply(&self.layout, &self.hs, x, y);
    }

    pub fn apply_new(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; x.len()];
        self.apply(x, &mut y);
        y
    }
}
