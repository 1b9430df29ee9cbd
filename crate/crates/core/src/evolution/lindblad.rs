//! Momentum-grid integrator for the collisional Lindblad master equation in
//! the Brownian limit, reduced to one dimension.
//!
//! A collision transfers momentum `q = k dp` to the particle at `p` with rate
//! `w(q) S(q, p)`, `S` the Brownian Maxwell-Boltzmann structure factor. The
//! dissipator is
//!
//! ```text
//! sum_q w(q) [ U(q) sqrt(S) rho sqrt(S) U(q)^+ - 1/2 { S(q, p), rho } ]
//! ```
//!
//! with `U(q)` the grid shift by `+q`. Transitions that would leave the grid
//! are dropped from gain and loss alike, which keeps the finite generator in
//! Lindblad form (trace preserving, completely positive).
//!
//! The 1D weights come from projecting the isotropic 3D collision kernel onto
//! one axis, `|t(q)|^2 -> 2 pi |q| int_|q|^inf |t(k)|^2 e^{-beta (k^2 - q^2) / 8m} dk`,
//! so that the second moment of the jumps reproduces the 3D `D_pp` per axis.

use num_complex::Complex;

use crate::error::{require_positive, Error, Result};
use crate::evolution::grid::{maxwell_weights, CMatrix, DensityMatrixGrid, PositionOperator, UniformGrid};
use crate::evolution::report::{EvolutionReport, Moments};
use crate::kinetic::{s_mb_brownian, GasSpec, ParticleSpec, SfQuery};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::scattering::ScatteringModel;
use crate::Real;

/// Relative kernel weight that may be dropped when truncating the jump set.
pub const DROPPED_WEIGHT_TOL: f64 = 1e-10;
/// Largest per-step trace change before a step is declared unstable.
pub const STEP_TRACE_TOL: f64 = 1e-12;
/// Bound on `dt * max(rate)` for the explicit RK4 stepper.
pub const STABILITY_BOUND: f64 = 0.5;

/// Jump `k` nodes with kernel weight `w(k dp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpWeight<T> {
    pub shift: isize,
    pub q: T,
    pub weight: T,
}

/// Projected 1D kernel weight `w(q)` per unit `dq`, such that the jump rate
/// is `w(q) dq S(q, p)`.
pub fn projected_weight<T: Real>(
    q: T,
    gas: &GasSpec<T>,
    model: &ScatteringModel<T>,
    particle: &ParticleSpec<T>,
) -> Result<T> {
    let q = q.abs();
    let b = gas.beta / (T::lit(8.0) * gas.m);
    // int_0^inf |t(q + s)|^2 e^{-b (2 q s + s^2)} ds
    let mut s_max = (T::lit(40.0) / b).sqrt();
    let mut breaks = vec![T::zero()];
    if let ScatteringModel::Tabulated(table) = model {
        s_max = s_max.min(table.q_last() - q);
        if s_max <= T::zero() {
            return Ok(T::zero());
        }
        breaks.extend(
            table
                .knots()
                .iter()
                .map(|&k| k - q)
                .filter(|&s| s > T::zero() && s < s_max),
        );
    }
    breaks.push(s_max);
    let tail = integrate_with_breaks(
        |s| {
            let k = q + s;
            model.t_tilde_sq(k, particle).value * (-b * s * (T::lit(2.0) * q + s)).exp()
        },
        &breaks,
        &QuadOptions::default(),
    )?;
    let pi = T::PI();
    // 2 pi (2 pi)^3 n * 2 pi |q| * tail
    Ok(T::lit(32.0) * pi.powi(5) * gas.n * q * tail.value)
}

/// The finite-grid Lindblad generator.
#[derive(Debug, Clone)]
pub struct LindbladGenerator<T> {
    grid: UniformGrid<T>,
    energies: Vec<T>,
    jumps: Vec<JumpWeight<T>>,
    /// `sqrt_rates[s][i]`: square root of the rate of jump `s` out of node `i`.
    sqrt_rates: Vec<Vec<T>>,
    loss: Vec<T>,
    beta: T,
    particle: ParticleSpec<T>,
}

impl<T: Real> LindbladGenerator<T> {
    /// Builds the generator using every grid shift whose kernel weight is
    /// not negligible (dropped weight below [`DROPPED_WEIGHT_TOL`]).
    pub fn new(
        gas: &GasSpec<T>,
        particle: &ParticleSpec<T>,
        model: &ScatteringModel<T>,
        grid: UniformGrid<T>,
    ) -> Result<Self> {
        let dq = grid.step;
        let mut weights = Vec::with_capacity(grid.len - 1);
        for k in 1..grid.len {
            let q = T::from_usize_lossy(k) * dq;
            weights.push(projected_weight(q, gas, model, particle)? * dq);
        }
        // weight of the +-q pair at p = 0
        let pair_weight = |k: usize, w: T| -> T {
            let q = T::from_usize_lossy(k) * dq;
            let s = s_mb_brownian(&SfQuery::collinear(q, T::zero()), gas, particle).unwrap_or(T::zero());
            T::lit(2.0) * w * s
        };
        let strengths: Vec<T> = weights.iter().enumerate().map(|(i, &w)| pair_weight(i + 1, w)).collect();
        let total: T = strengths.iter().copied().sum();
        let mut keep = strengths.len();
        let mut dropped = T::zero();
        while keep > 1 {
            let next = dropped + strengths[keep - 1];
            if next > T::lit(DROPPED_WEIGHT_TOL) * total {
                break;
            }
            dropped = next;
            keep -= 1;
        }
        let mut q_grid = Vec::with_capacity(2 * keep);
        for (i, &w) in weights.iter().enumerate().take(keep) {
            let q = T::from_usize_lossy(i + 1) * dq;
            q_grid.push((q, w));
            q_grid.push((-q, w));
        }
        Self::from_weights(gas, particle, grid, &q_grid)
    }

    /// Builds the generator on an explicit momentum-transfer grid of
    /// `(q, w(q) dq)` pairs; every `q` must be a nonzero multiple of the step.
    pub fn from_weights(
        gas: &GasSpec<T>,
        particle: &ParticleSpec<T>,
        grid: UniformGrid<T>,
        q_grid: &[(T, T)],
    ) -> Result<Self> {
        let n = grid.len;
        let mut jumps = Vec::with_capacity(q_grid.len());
        let mut sqrt_rates = Vec::with_capacity(q_grid.len());
        let mut loss = vec![T::zero(); n];
        for &(q, weight) in q_grid {
            let shift = grid.steps_in(q)?;
            if shift == 0 {
                return Err(Error::GridMismatch {
                    q: q.as_f64(),
                    dp: grid.step.as_f64(),
                });
            }
            if weight < T::zero() || !weight.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "jump weight",
                    value: weight.as_f64(),
                    reason: "must be finite and non-negative",
                });
            }
            let mut roots = vec![T::zero(); n];
            for (i, root) in roots.iter_mut().enumerate() {
                let dest = i as isize + shift;
                if dest < 0 || dest >= n as isize {
                    continue;
                }
                let s = s_mb_brownian(&SfQuery::collinear(q, grid.point(i)), gas, particle)?;
                let rate = weight * s;
                loss[i] = loss[i] + rate;
                *root = rate.sqrt();
            }
            jumps.push(JumpWeight { shift, q, weight });
            sqrt_rates.push(roots);
        }
        let energies = grid
            .points()
            .map(|p| p * p / (T::lit(2.0) * particle.mass))
            .collect();
        Ok(Self {
            grid,
            energies,
            jumps,
            sqrt_rates,
            loss,
            beta: gas.beta,
            particle: *particle,
        })
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn jumps(&self) -> &[JumpWeight<T>] {
        &self.jumps
    }

    /// Rate of the jump from node `from` to node `to` (zero if no such jump).
    pub fn rate(&self, from: usize, to: usize) -> T {
        let shift = to as isize - from as isize;
        self.jumps
            .iter()
            .zip(&self.sqrt_rates)
            .filter(|(j, _)| j.shift == shift)
            .map(|(_, r)| r[from] * r[from])
            .sum()
    }

    /// Total escape rate out of each node.
    pub fn loss_rates(&self) -> &[T] {
        &self.loss
    }

    /// Largest rate the time stepper has to resolve: the escape rates and the
    /// spread of free-particle energies.
    pub fn max_rate(&self) -> T {
        let loss = self.loss.iter().copied().fold(T::zero(), T::max);
        let e_min = self.energies.iter().copied().fold(T::infinity(), T::min);
        let e_max = self.energies.iter().copied().fold(T::neg_infinity(), T::max);
        loss.max(e_max - e_min)
    }

    /// `d rho / dt`. The result is exactly Hermitian for Hermitian input.
    pub fn apply(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.grid.len;
        if rho.dim() != n {
            return Err(Error::ShapeMismatch(format!("rho is {0}x{0}, grid has {1} points", rho.dim(), n)));
        }
        let half = T::lit(0.5);
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            for l in j..n {
                let r = rho[(j, l)];
                let coherent = Complex::new(T::zero(), -(self.energies[j] - self.energies[l])) * r;
                let loss = r * (half * (self.loss[j] + self.loss[l]));
                out[(j, l)] = coherent - loss;
            }
        }
        let rho_slice = rho.as_slice();
        for (jump, roots) in self.jumps.iter().zip(&self.sqrt_rates) {
            let k = jump.shift;
            for j in 0..n {
                let src_j = j as isize - k;
                if src_j < 0 || src_j >= n as isize {
                    continue;
                }
                let src_j = src_j as usize;
                let a = roots[src_j];
                if a == T::zero() {
                    continue;
                }
                let row = &rho_slice[src_j * n..(src_j + 1) * n];
                let l_lo = j.max(k.max(0) as usize);
                let l_hi = ((n as isize + k.min(0)) as usize).min(n);
                for l in l_lo..l_hi {
                    let src_l = (l as isize - k) as usize;
                    let b = roots[src_l];
                    out[(j, l)] = out[(j, l)] + row[src_l] * (a * b);
                }
            }
        }
        for j in 0..n {
            let d = out[(j, j)];
            out[(j, j)] = Complex::new(d.re, T::zero());
            for l in j + 1..n {
                out[(l, j)] = out[(j, l)].conj();
            }
        }
        Ok(out)
    }

    /// One classical RK4 step.
    pub fn rk4_step(&self, rho: &CMatrix<T>, dt: T) -> Result<CMatrix<T>> {
        let half = dt / T::lit(2.0);
        let k1 = self.apply(rho)?;
        let mut tmp = rho.clone();
        tmp.add_scaled(half, &k1);
        let k2 = self.apply(&tmp)?;
        let mut tmp = rho.clone();
        tmp.add_scaled(half, &k2);
        let k3 = self.apply(&tmp)?;
        let mut tmp = rho.clone();
        tmp.add_scaled(dt, &k3);
        let k4 = self.apply(&tmp)?;
        let mut next = rho.clone();
        let sixth = dt / T::lit(6.0);
        next.add_scaled(sixth, &k1);
        next.add_scaled(sixth * T::lit(2.0), &k2);
        next.add_scaled(sixth * T::lit(2.0), &k3);
        next.add_scaled(sixth, &k4);
        Ok(next)
    }

    /// Integrates from `rho0` to `t_final` with RK4 steps of (at most) `dt`.
    pub fn evolve(
        &self,
        rho0: &DensityMatrixGrid<T>,
        t_final: T,
        dt: T,
        opts: &LindbladOptions,
    ) -> Result<(DensityMatrixGrid<T>, EvolutionReport<T>)> {
        require_positive("dt", dt)?;
        if !(t_final >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                value: t_final.as_f64(),
                reason: "must be non-negative",
            });
        }
        if rho0.grid != self.grid {
            return Err(Error::ShapeMismatch("initial state lives on a different grid".into()));
        }
        let bound = dt * self.max_rate();
        if bound > T::lit(STABILITY_BOUND) {
            return Err(Error::CflViolation {
                condition: "dt * max rate",
                value: bound.as_f64(),
                limit: STABILITY_BOUND,
            });
        }
        let steps = (t_final / dt).ceil().to_usize().unwrap_or(0);
        let dt = if steps > 0 { t_final / T::from_usize_lossy(steps) } else { dt };
        let sample_every = opts.sample_every.max(1);
        let eig_every = opts.eigen_every.max(1);

        let maxwell = maxwell_weights(self.beta, &self.particle, &self.grid);
        let position = PositionOperator::new(&self.grid);
        let mut report = EvolutionReport::default();
        let mut rho = rho0.rho.clone();
        let trace0 = rho.trace().re;
        let mut sample_count = 0usize;
        let mut record = |step: usize, rho: &CMatrix<T>, report: &mut EvolutionReport<T>| {
            let state = DensityMatrixGrid {
                grid: self.grid,
                rho: rho.clone(),
            };
            let eig = if sample_count % eig_every == 0 || step == steps {
                Some(T::lit(state.min_eigenvalue()))
            } else {
                None
            };
            sample_count += 1;
            let (mean_p, var_p) = state.momentum_moments();
            let (mean_x, second_x) = position.moments(rho);
            report.push(
                T::from_usize_lossy(step) * dt,
                state.trace(),
                eig,
                Moments {
                    mean_x,
                    mean_p,
                    var_x: second_x - mean_x * mean_x,
                    var_p,
                },
                state.population_distance(&maxwell),
            );
        };

        record(0, &rho, &mut report);
        let step_tol = T::lit(10.0 * STEP_TRACE_TOL);
        for step in 1..=steps {
            let before = rho.trace().re;
            rho = self.rk4_step(&rho, dt)?;
            let after = rho.trace().re;
            let drift = (after - before).abs();
            if drift > step_tol || !after.is_finite() {
                return Err(Error::StepUnstable {
                    step,
                    quantity: "trace",
                    drift: drift.as_f64(),
                });
            }
            let herm = rho.hermiticity_defect();
            if herm > step_tol {
                return Err(Error::StepUnstable {
                    step,
                    quantity: "hermiticity",
                    drift: herm.as_f64(),
                });
            }
            if step % sample_every == 0 || step == steps {
                record(step, &rho, &mut report);
            }
        }
        let total_drift = (rho.trace().re - trace0).abs();
        log::debug!("lindblad: {steps} steps, total trace drift {:e}", total_drift.as_f64());
        Ok((
            DensityMatrixGrid {
                grid: self.grid,
                rho,
            },
            report,
        ))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LindbladOptions {
    /// Record the report every this many steps.
    pub sample_every: usize,
    /// Diagonalise the state every this many samples.
    pub eigen_every: usize,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self {
            sample_every: 10,
            eigen_every: 1,
        }
    }
}
