//! Steady state of the adiabatically eliminated two-mode master equation in a truncated
//! Fock basis, used as independent ground truth for the series moments.
//!
//! The master equation commutes with the phase rotation a₁ → a₁e^{iθ}, a₂ → a₂e^{−iθ}
//! and with the mode swap, so each bra-ket sector d = (n₁ − n₂) − (n₁′ − n₂′) evolves on
//! its own. The steady state lives in d = 0 and is stored with the mode-swap symmetry.

mod generator;
mod gmres;
mod layout;
mod moments;
mod precond;
mod timestep;

pub use generator::{Generator, GroupHamiltonian, SectorOperator};
pub use gmres::{gmres, GmresOutcome};
pub use layout::{group_dim, occ, Layout};
pub use moments::{epr_variance_from, moment_sector, sector_moment};
pub use precond::SylvesterPreconditioner;

use crate::error::{Error, Result};
use crate::params::NopoParams;
use nalgebra::DMatrix;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tail mass accepted by the cutoff scan.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;
/// Cutoff increment of the convergence scan.
pub const CUTOFF_STEP: usize = 5;
/// Largest total moment order accepted by [`oracle_moment`].
pub const MAX_ORACLE_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    NullSpace,
    TimeStepping,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::NullSpace => "NullSpace",
            SolveMethod::TimeStepping => "TimeStepping",
        }
    }
}

/// Starting point of the time-stepping route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Vacuum,
    /// Truncated product coherent state |α₁, α₂⟩, keeping sectors |d| ≤ `max_sector`.
    Coherent {
        alpha1: Complex64,
        alpha2: Complex64,
        max_sector: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub cutoff: usize,
    /// Absolute 2-norm residual target of the steady-state problem.
    pub solver_tol: f64,
    pub max_cutoff_scan: usize,
    pub method: SolveMethod,
    /// GMRES restart length.
    pub restart: usize,
    /// GMRES iteration or RK4 step budget.
    pub max_iterations: usize,
    /// Preconditioner shift in units of γ.
    pub shift: f64,
    /// Richardson sweeps applied inside the preconditioner.
    pub sweeps: usize,
    pub initial: InitialState,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cutoff: 20,
            solver_tol: 1e-12,
            max_cutoff_scan: 120,
            method: SolveMethod::NullSpace,
            restart: 80,
            max_iterations: 4000,
            shift: 1.0,
            sweeps: 4,
            initial: InitialState::Vacuum,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 4 {
            return Err(Error::InvalidParams(format!(
                "cutoff must be at least 4, got {}",
                self.cutoff
            )));
        }
        if !(self.solver_tol >= 1e-14 && self.solver_tol <= 1e-6) {
            return Err(Error::InvalidParams(format!(
                "solver tolerance must lie in [1e-14, 1e-6], got {}",
                self.solver_tol
            )));
        }
        if self.max_cutoff_scan < self.cutoff {
            return Err(Error::InvalidParams(
                "max cutoff scan below the starting cutoff".into(),
            ));
        }
        if self.restart < 2 || self.max_iterations == 0 || !(self.shift > 0.0) {
            return Err(Error::InvalidParams(
                "restart >= 2, positive iteration budget and positive shift required".into(),
            ));
        }
        Ok(())
    }
}

/// One solve of a cutoff scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanStep {
    pub cutoff: usize,
    pub n: f64,
    pub tail_mass: f64,
}

#[derive(Debug, Clone)]
pub struct OracleState {
    pub cutoff: usize,
    /// Stored sectors; the d = 0 one is always first.
    pub sectors: Vec<(Layout, Vec<Complex64>)>,
    pub trace: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub cutoff_tail_mass: f64,
    /// ‖L[ρ]‖₂ of the returned state.
    pub residual: f64,
    /// GMRES iterations or RK4 steps.
    pub iterations: usize,
    pub method: SolveMethod,
    pub scan: Vec<ScanStep>,
}

pub fn build_generator(params: &NopoParams, config: &OracleConfig) -> Result<Generator> {
    config.validate()?;
    Generator::new(params, config.cutoff)
}

fn weighted_trace(layout: &Layout, x: &[Complex64]) -> Complex64 {
    let mut t = ZERO;
    for (s, &k) in layout.ks.iter().enumerate() {
        let (rows, cols) = layout.dims(k);
        let b = &x[layout.offsets[s]..layout.offsets[s] + rows * cols];
        let tr: Complex64 = (0..rows.min(cols)).map(|i| b[i * cols + i]).sum();
        t += tr * layout.weight(s);
    }
    t
}

fn null_space_solve(
    generator: &Generator,
    config: &OracleConfig,
    warm: Option<&OracleState>,
) -> Result<(Layout, Vec<Complex64>, usize)> {
    let layout = Layout::mirrored(generator.cutoff);
    let op = SectorOperator::new(generator, layout.clone());
    let pre = SylvesterPreconditioner::new(generator, &layout, config.shift * generator.gamma)?;
    let mut b = vec![ZERO; layout.len];
    b[0] = Complex64::new(1.0, 0.0);
    let mut x = match warm {
        Some(w) => layout.embed(&w.sectors[0].0, &w.sectors[0].1),
        None => b.clone(),
    };
    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        op.apply(v, out);
        out[0] += weighted_trace(&layout, v);
    };
    let mut t1 = vec![ZERO; layout.len];
    let mut t2 = vec![ZERO; layout.len];
    // Richardson sweeps on top of the block solve pick up the jump terms.
    let precond = |v: &[Complex64], o: &mut [Complex64]| {
        pre.apply(v, o);
        for _ in 0..config.sweeps {
            apply(o, &mut t1);
            for (r, vi) in t1.iter_mut().zip(v) {
                *r = vi - *r;
            }
            pre.apply(&t1, &mut t2);
            for (oi, ci) in o.iter_mut().zip(&t2) {
                *oi += ci;
            }
        }
    };
    let outcome = gmres(
        apply,
        precond,
        &b,
        &mut x,
        config.solver_tol,
        config.restart,
        config.max_iterations,
    );
    if !outcome.converged {
        return Err(Error::SolverFailure {
            iterations: outcome.iterations,
            residual: outcome.residual,
        });
    }
    Ok((layout, x, outcome.iterations))
}

fn coherent_sectors(
    cutoff: usize,
    a1: Complex64,
    a2: Complex64,
    max_sector: u32,
) -> Vec<(Layout, Vec<Complex64>)> {
    let amps = |a: Complex64| {
        let mut v = vec![Complex64::new(1.0, 0.0)];
        for j in 1..=cutoff {
            let prev = v[j - 1];
            v.push(prev * a / (j as f64).sqrt());
        }
        let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter().map(|z| z / s).collect::<Vec<_>>()
    };
    let (c1, c2) = (amps(a1), amps(a2));
    let m = max_sector as i32;
    let mut out = Vec::new();
    for d in std::iter::once(0).chain((1..=m).flat_map(|d| [d, -d])) {
        let layout = Layout::new(cutoff, d);
        let mut x = vec![ZERO; layout.len];
        for (s, &k) in layout.ks.iter().enumerate() {
            let (rows, cols) = layout.dims(k);
            for i in 0..rows {
                let (n1, n2) = occ(k, i);
                for j in 0..cols {
                    let (q1, q2) = occ(k - d, j);
                    x[layout.offsets[s] + i * cols + j] =
                        c1[n1] * c2[n2] * (c1[q1] * c2[q2]).conj();
                }
            }
        }
        out.push((layout, x));
    }
    out
}

fn time_stepping_solve(
    generator: &Generator,
    config: &OracleConfig,
) -> Result<(Vec<(Layout, Vec<Complex64>)>, usize)> {
    let initial = match config.initial {
        InitialState::Vacuum => {
            let layout = Layout::mirrored(generator.cutoff);
            let mut x = vec![ZERO; layout.len];
            x[0] = Complex64::new(1.0, 0.0);
            vec![(layout, x)]
        }
        InitialState::Coherent {
            alpha1,
            alpha2,
            max_sector,
        } => coherent_sectors(generator.cutoff, alpha1, alpha2, max_sector),
    };
    let ev = timestep::integrate_to_steady_state(
        generator,
        initial,
        config.solver_tol,
        config.max_iterations,
    )?;
    Ok((ev.sectors, ev.steps))
}

/// Largest |ρ − ρ†| element over the stored sectors.
fn hermiticity_defect(sectors: &[(Layout, Vec<Complex64>)]) -> f64 {
    let mut worst = 0.0f64;
    for (layout, x) in sectors {
        let partner = sectors.iter().find(|(l, _)| l.d == -layout.d);
        for (s, &k) in layout.ks.iter().enumerate() {
            let kb = k - layout.d;
            let (rows, cols) = layout.dims(k);
            for i in 0..rows {
                for j in 0..cols {
                    let v = x[layout.offsets[s] + i * cols + j];
                    let w = match partner {
                        Some((pl, px)) => pl.element(px, occ(kb, j), occ(k, i)),
                        None => ZERO,
                    };
                    worst = worst.max((v - w.conj()).norm());
                }
            }
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of ρ, from its d = 0 blocks.
fn min_eigenvalue(layout: &Layout, x: &[Complex64]) -> f64 {
    let mut lo = f64::INFINITY;
    for (s, &k) in layout.ks.iter().enumerate() {
        let (n, _) = layout.dims(k);
        let b = &x[layout.offsets[s]..layout.offsets[s] + n * n];
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (b[i * n + j] + b[j * n + i].conj()));
        for e in m.symmetric_eigenvalues().iter() {
            lo = lo.min(*e);
        }
    }
    lo
}

/// Population with n₁ = C or n₂ = C.
fn tail_mass(layout: &Layout, x: &[Complex64]) -> f64 {
    let mut t = 0.0;
    for (s, &k) in layout.ks.iter().enumerate() {
        let (n, _) = layout.dims(k);
        t += layout.weight(s) * x[layout.offsets[s] + (n - 1) * n + (n - 1)].re;
    }
    t
}

fn finish(
    generator: &Generator,
    sectors: Vec<(Layout, Vec<Complex64>)>,
    iterations: usize,
    method: SolveMethod,
) -> OracleState {
    let (l0, x0) = &sectors[0];
    let trace = weighted_trace(l0, x0).re;
    let mut r2 = 0.0;
    for (l, x) in &sectors {
        let op = SectorOperator::new(generator, l.clone());
        r2 += gmres::norm(&op.apply_new(x)).powi(2);
    }
    let n = sector_moment(l0, x0, 1, 1, 0, 0).re;
    let tail = tail_mass(l0, x0);
    OracleState {
        cutoff: generator.cutoff,
        trace,
        hermiticity_defect: hermiticity_defect(&sectors),
        min_eigenvalue: min_eigenvalue(l0, x0),
        cutoff_tail_mass: tail,
        residual: r2.sqrt(),
        iterations,
        method,
        scan: vec![ScanStep {
            cutoff: generator.cutoff,
            n,
            tail_mass: tail,
        }],
        sectors,
    }
}

/// Steady state at the generator's cutoff.
pub fn steady_state(generator: &Generator, config: &OracleConfig) -> Result<OracleState> {
    steady_state_from(generator, config, None)
}

/// Steady state at the generator's cutoff, optionally warm-started from a smaller cutoff.
pub fn steady_state_from(
    generator: &Generator,
    config: &OracleConfig,
    warm: Option<&OracleState>,
) -> Result<OracleState> {
    config.validate()?;
    match config.method {
        SolveMethod::NullSpace => {
            let (layout, x, it) = null_space_solve(generator, config, warm)?;
            Ok(finish(
                generator,
                vec![(layout, x)],
                it,
                SolveMethod::NullSpace,
            ))
        }
        SolveMethod::TimeStepping => {
            let (sectors, steps) = time_stepping_solve(generator, config)?;
            Ok(finish(generator, sectors, steps, SolveMethod::TimeStepping))
        }
    }
}

/// Raise the cutoff in steps of [`CUTOFF_STEP`] until the tail mass is at most
/// [`TAIL_MASS_LIMIT`]; the scan history is kept in [`OracleState::scan`].
pub fn solve_converged(generator: &Generator, config: &OracleConfig) -> Result<OracleState> {
    config.validate()?;
    let mut cutoff = generator.cutoff.max(config.cutoff);
    let mut scan = Vec::new();
    let mut prev: Option<OracleState> = None;
    loop {
        let g = generator.with_cutoff(cutoff);
        let warm = if config.method == SolveMethod::NullSpace {
            prev.as_ref()
        } else {
            None
        };
        let mut st = steady_state_from(&g, config, warm)?;
        scan.extend(st.scan.iter().copied());
        if st.cutoff_tail_mass <= TAIL_MASS_LIMIT {
            st.scan = scan;
            return Ok(st);
        }
        if cutoff + CUTOFF_STEP > config.max_cutoff_scan {
            return Err(Error::CutoffInsufficient {
                cutoff,
                tail_mass: st.cutoff_tail_mass,
            });
        }
        cutoff += CUTOFF_STEP;
        prev = Some(st);
    }
}

/// Tr(ρ a₁⁺ᵏ a₁ˡ a₂⁺ᵐ a₂ⁿ).
pub fn oracle_moment(state: &OracleState, k: u32, l: u32, m: u32, n: u32) -> Result<Complex64> {
    if k + l + m + n > MAX_ORACLE_ORDER {
        return Err(Error::AccuracyGuard(format!(
            "total order {} exceeds {MAX_ORACLE_ORDER}",
            k + l + m + n
        )));
    }
    let half = state.cutoff as f64 / 2.0;
    if [k, l, m, n].iter().any(|&i| i as f64 >= half) {
        return Err(Error::AccuracyGuard(format!(
            "indices must stay below cutoff/2 = {half}"
        )));
    }
    let d = moment_sector(k, l, m, n);
    Ok(state
        .sectors
        .iter()
        .find(|(layout, _)| layout.d == d)
        .map(|(layout, x)| sector_moment(layout, x, k, l, m, n))
        .unwrap_or(ZERO))
}

/// Variance of X₁(θ₁) − X₂(θ₂) from the oracle moments.
pub fn oracle_variance(state: &OracleState, theta1: f64, theta2: f64) -> Result<f64> {
    oracle_moment(state, 0, 0, 0, 0)?;
    if state.cutoff < 6 {
        return Err(Error::AccuracyGuard("variance needs cutoff >= 6".into()));
    }
    let mom = |k, l, m, n| oracle_moment(state, k, l, m, n).unwrap_or(ZERO);
    Ok(epr_variance_from(mom, theta1, theta2))
}

/// Variance at θ₁ = θ₂ = arg⟨a₁a₂⟩/2, the optimum under the selection rule.
pub fn oracle_vmin(state: &OracleState) -> Result<f64> {
    let a = oracle_moment(state, 0, 1, 0, 1)?;
    let t = 0.5 * a.arg();
    oracle_variance(state, t, t)
}
