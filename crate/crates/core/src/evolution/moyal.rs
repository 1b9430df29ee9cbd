//! Truncation error of the small-momentum-transfer expansion of the
//! collision bracket
//!
//! ```text
//! e^{i q x} e^{k q p} rho e^{k q p} e^{-i q x} - 1/2 { e^{2 k q p}, rho }
//! ```
//!
//! with `k = -beta / 4M`, against its expansion to second order in `q`.

use num_complex::Complex;

use crate::error::Result;
use crate::evolution::grid::{CMatrix, DensityMatrixGrid, PositionOperator};
use crate::kinetic::{GasSpec, ParticleSpec};
use crate::Real;

/// Bracket evaluated exactly; `e^{i q x}` acts as a cyclic shift by `q / dp` nodes.
fn exact_bracket<T: Real>(q: T, kappa: T, state: &DensityMatrixGrid<T>) -> Result<CMatrix<T>> {
    let grid = state.grid;
    let n = grid.len as isize;
    let k = grid.steps_in(q)?;
    let half = T::lit(0.5);
    let exact_q = T::lit(k as f64) * grid.step;
    let factor: Vec<T> = grid.points().map(|p| (kappa * exact_q * p).exp()).collect();
    Ok(CMatrix::from_fn(grid.len, |j, l| {
        let sj = (j as isize - k).rem_euclid(n) as usize;
        let sl = (l as isize - k).rem_euclid(n) as usize;
        let gain = state.rho[(sj, sl)] * (factor[sj] * factor[sl]);
        let loss = state.rho[(j, l)] * (half * (factor[j] * factor[j] + factor[l] * factor[l]));
        gain - loss
    }))
}

/// Second-order expansion of the bracket.
fn expanded_bracket<T: Real>(q: T, kappa: T, state: &DensityMatrixGrid<T>, x: &CMatrix<T>) -> CMatrix<T> {
    let grid = state.grid;
    let rho = &state.rho;
    let iq = Complex::new(T::zero(), q);
    let half = T::lit(0.5);
    let p: Vec<T> = grid.points().collect();
    let minus = |m: &CMatrix<T>| x.commutator(m).scaled_complex(iq);
    let plus = |m: &CMatrix<T>| CMatrix::from_fn(grid.len, |j, l| m[(j, l)] * (kappa * q * (p[j] + p[l])));

    let lm = minus(rho);
    let lm2 = minus(&lm);
    let lp = plus(rho);
    let lp2 = plus(&lp);
    let lm_lp = minus(&lp);
    let quad = CMatrix::from_fn(grid.len, |j, l| {
        rho[(j, l)] * (kappa * kappa * q * q * (p[j] * p[j] + p[l] * p[l]))
    });

    let mut out = lm;
    out.add_scaled(half, &lm2);
    out.add_scaled(T::one(), &lp);
    out.add_scaled(half, &lp2);
    out.add_scaled(T::one(), &lm_lp);
    out.add_scaled(-T::one(), &lp);
    out.add_scaled(-T::one(), &quad);
    out
}

/// Frobenius norm of the difference between the exact bracket and its
/// second-order expansion for the transfer `q` (a multiple of the grid step).
pub fn kramers_moyal_residual<T: Real>(
    q: T,
    state: &DensityMatrixGrid<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Result<T> {
    let kappa = -gas.beta / (T::lit(4.0) * particle.mass);
    let exact = exact_bracket(q, kappa, state)?;
    let x = PositionOperator::new(&state.grid).matrix();
    let approx = expanded_bracket(q, kappa, state, &x);
    Ok(exact.sub(&approx).frobenius_norm())
}
