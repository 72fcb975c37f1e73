//! Storage layout of one bra-ket sector of the truncated density operator.
//!
//! Fock states |n₁, n₂⟩ with n₁, n₂ ≤ C are grouped by k = n₁ − n₂. Within group k
//! the state with index m is (m + k, m) for k ≥ 0 and (m, m − k) for k < 0, so the
//! group has C + 1 − |k| states. Sector d holds the elements ⟨ket|ρ|bra⟩ with
//! k(ket) − k(bra) = d, stored as dense blocks (ket group k) × (bra group k − d).

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub cutoff: usize,
    pub d: i32,
    /// Only k ≥ 0 is stored; block −k equals block k (mode-swap symmetry, d = 0).
    pub mirror: bool,
    pub ks: Vec<i32>,
    pub offsets: Vec<usize>,
    pub len: usize,
}

#[inline]
pub fn group_dim(cutoff: usize, k: i32) -> usize {
    cutoff + 1 - k.unsigned_abs() as usize
}

/// Occupations of state `m` in group `k`.
#[inline]
pub fn occ(k: i32, m: usize) -> (usize, usize) {
    if k >= 0 {
        (m + k as usize, m)
    } else {
        (m, m + (-k) as usize)
    }
}

impl Layout {
    pub fn new(cutoff: usize, d: i32) -> Self {
        Self::build(cutoff, d, false)
    }

    /// Mode-swap symmetric storage of the d = 0 sector.
    pub fn mirrored(cutoff: usize) -> Self {
        Self::build(cutoff, 0, true)
    }

    fn build(cutoff: usize, d: i32, mirror: bool) -> Self {
        let c = cutoff as i32;
        let ks: Vec<i32> = if mirror {
            (0..=c).collect()
        } else {
            (-c..=c).filter(|k| (k - d).abs() <= c).collect()
        };
        let mut offsets = Vec::with_capacity(ks.len());
        let mut len = 0;
        for &k in &ks {
            offsets.push(len);
            len += group_dim(cutoff, k) * group_dim(cutoff, k - d);
        }
        Layout {
            cutoff,
            d,
            mirror,
            ks,
            offsets,
            len,
        }
    }

    /// Position of block k in `ks`, following the mirror rule.
    #[inline]
    pub fn slot(&self, k: i32) -> Option<usize> {
        let c = self.cutoff as i32;
        if self.mirror {
            let a = k.abs();
            (a <= c).then_some(a as usize)
        } else {
            let kmin = self.ks.first().copied()?;
            let i = k - kmin;
            (i >= 0 && (i as usize) < self.ks.len()).then_some(i as usize)
        }
    }

    #[inline]
    pub fn dims(&self, k: i32) -> (usize, usize) {
        (
            group_dim(self.cutoff, k),
            group_dim(self.cutoff, k - self.d),
        )
    }

    /// Block k of `data` as a row-major slice (rows = ket index).
    #[inline]
    pub fn block<'a>(&self, data: &'a [Complex64], k: i32) -> Option<&'a [Complex64]> {
        let s = self.slot(k)?;
        let kk = self.ks[s];
        let (r, c) = self.dims(kk);
        Some(&data[self.offsets[s]..self.offsets[s] + r * c])
    }

    /// Multiplicity of block `ks[slot]` in the full operator (2 for mirrored k > 0).
    #[inline]
    pub fn weight(&self, slot: usize) -> f64 {
        if self.mirror && self.ks[slot] != 0 {
            2.0
        } else {
            1.0
        }
    }

    /// Element ⟨n₁,n₂|ρ|q₁,q₂⟩, zero when outside this sector or the cutoff.
    pub fn element(
        &self,
        data: &[Complex64],
        ket: (usize, usize),
        bra: (usize, usize),
    ) -> Complex64 {
        let c = self.cutoff;
        if ket.0 > c || ket.1 > c || bra.0 > c || bra.1 > c {
            return Complex64::new(0.0, 0.0);
        }
        let k = ket.0 as i32 - ket.1 as i32;
        let kb = bra.0 as i32 - bra.1 as i32;
        if k - kb != self.d {
            return Complex64::new(0.0, 0.0);
        }
        match self.block(data, k) {
            Some(b) => {
                let cols = group_dim(c, kb);
                b[ket.0.min(ket.1) * cols + bra.0.min(bra.1)]
            }
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Copy `data` stored in `from` into this (larger or equal) layout.
    pub fn embed(&self, from: &Layout, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len];
        for (s, &k) in self.ks.iter().enumerate() {
            let Some(src) = from.block(data, k) else {
                continue;
            };
            let (fr, fc) = from.dims(k);
            let (_, cols) = self.dims(k);
            let dst = &mut out[self.offsets[s]..];
            for i in 0..fr {
                dst[i * cols..i * cols + fc].copy_from_slice(&src[i * fc..(i + 1) * fc]);
            }
        }
        out
    }
}
