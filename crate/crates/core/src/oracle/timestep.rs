//! Classical fourth-order Runge-Kutta integration of the master equation, sector by sector.

use super::generator::{Generator, SectorOperator};
use super::gmres::norm;
use super::layout::Layout;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Fraction of the RK4 stability interval used for the step.
const STEP_SAFETY: f64 = 2.5;

pub struct Evolved {
    pub sectors: Vec<(Layout, Vec<Complex64>)>,
    pub steps: usize,
}

pub fn integrate_to_steady_state(
    generator: &Generator,
    initial: Vec<(Layout, Vec<Complex64>)>,
    tol: f64,
    max_steps: usize,
) -> Result<Evolved> {
    let dt = STEP_SAFETY / generator.spectral_bound();
    let mut work: Vec<(SectorOperator, Vec<Complex64>)> = initial
        .into_iter()
        .map(|(l, x)| (SectorOperator::new(generator, l), x))
        .collect();
    let mut k: Vec<[Vec<Complex64>; 4]> = work
        .iter()
        .map(|(_, x)| std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); x.len()]))
        .collect();
    let mut stage: Vec<Vec<Complex64>> = work.iter().map(|(_, x)| x.clone()).collect();
    let mut residual = f64::INFINITY;
    for step in 0..=max_steps {
        let mut r2 = 0.0;
        for (s, (op, x)) in work.iter().enumerate() {
            op.apply(x, &mut k[s][0]);
            r2 += norm(&k[s][0]).powi(2);
        }
        residual = r2.sqrt();
        if residual < tol {
            return Ok(Evolved {
                sectors: work.into_iter().map(|(op, x)| (op.layout, x)).collect(),
                steps: step,
            });
        }
        if step == max_steps {
            break;
        }
        for (s, (op, x)) in work.iter_mut().enumerate() {
            let ks = &mut k[s];
            for (stage_i, coeff) in [(1usize, 0.5 * dt), (2, 0.5 * dt), (3, dt)] {
                for ((st, xi), ki) in stage[s].iter_mut().zip(x.iter()).zip(&ks[stage_i - 1]) {
                    *st = xi + coeff * ki;
                }
                op.apply(&stage[s], &mut ks[stage_i]);
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += dt / 6.0 * (ks[0][i] + 2.0 * ks[1][i] + 2.0 * ks[2][i] + ks[3][i]);
            }
        }
    }
    Err(Error::SolverFailure {
        iterations: max_steps,
        residual,
    })
}
