//! Uniform grids, dense complex matrices and the momentum-grid density matrix.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{require_positive, Error, Result};
use crate::kinetic::ParticleSpec;
use crate::Real;

/// Uniform 1D grid `min + i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid<T> {
    pub min: T,
    pub step: T,
    pub len: usize,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(min: T, step: T, len: usize) -> Result<Self> {
        require_positive("grid.step", step)?;
        if len < 2 {
            return Err(Error::InvalidParameter {
                name: "grid.points",
                value: len as f64,
                reason: "need at least two points",
            });
        }
        Ok(Self { min, step, len })
    }

    /// Grid symmetric about zero.
    pub fn symmetric(len: usize, step: T) -> Result<Self> {
        let half_span = T::from_usize_lossy(len.saturating_sub(1)) * step / T::lit(2.0);
        Self::new(-half_span, step, len)
    }

    /// Grid of `len` cells covering `[lo, hi)`, nodes at cell centres.
    pub fn cell_centred(lo: T, hi: T, len: usize) -> Result<Self> {
        let step = (hi - lo) / T::from_usize_lossy(len);
        Self::new(lo + step / T::lit(2.0), step, len)
    }

    #[inline]
    pub fn point(&self, i: usize) -> T {
        self.min + T::from_usize_lossy(i) * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len).map(move |i| self.point(i))
    }

    pub fn max(&self) -> T {
        self.point(self.len - 1)
    }

    /// Extent of one period for a periodic interpretation of the grid.
    pub fn period(&self) -> T {
        T::from_usize_lossy(self.len) * self.step
    }

    /// Number of grid steps in `q`; fails unless `q` is an integer multiple of the step.
    pub fn steps_in(&self, q: T) -> Result<isize> {
        let ratio = q / self.step;
        let k = ratio.round();
        let tol = T::lit(1e-9).max(T::lit(16.0) * T::epsilon()) * k.abs().max(T::one());
        if !ratio.is_finite() || (ratio - k).abs() > tol {
            return Err(Error::GridMismatch {
                q: q.as_f64(),
                dp: self.step.as_f64(),
            });
        }
        Ok(k.to_isize().expect("shift fits isize"))
    }
}

/// Square, row-major, dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).map(|i| self[(i, i)]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn diagonal_re(&self) -> Vec<T> {
        (0..self.n).map(|i| self[(i, i)].re).collect()
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * s;
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scaled_complex(&self, s: Complex<T>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * *b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Smallest eigenvalue of the Hermitian part, computed in double precision.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        let n = self.n;
        let m = nalgebra::DMatrix::<nalgebra::Complex<f64>>::from_fn(n, n, |i, j| {
            let a = self[(i, j)];
            let b = self[(j, i)].conj();
            nalgebra::Complex::new(0.5 * (a.re + b.re).as_f64(), 0.5 * (a.im + b.im).as_f64())
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Position operator on a periodic momentum grid, `x = i d/dp` with the
/// trigonometric (spectral) derivative. `exp(i q x)` is then exactly the
/// cyclic shift by `q / dp` nodes on band-limited states.
#[derive(Debug, Clone)]
pub struct PositionOperator<T> {
    /// Real antisymmetric derivative matrix `d/dp`.
    deriv: Vec<T>,
    n: usize,
}

impl<T: Real> PositionOperator<T> {
    pub fn new(grid: &UniformGrid<T>) -> Self {
        let n = grid.len;
        let scale = T::PI() / grid.period();
        let nf = T::from_usize_lossy(n);
        let mut deriv = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = i as isize - j as isize;
                let sign = if d.rem_euclid(2) == 0 { T::one() } else { -T::one() };
                let angle = T::PI() * T::lit(d as f64) / nf;
                let kernel = if n % 2 == 0 {
                    T::one() / angle.tan()
                } else {
                    T::one() / angle.sin()
                };
                deriv[i * n + j] = scale * sign * kernel;
            }
        }
        Self { deriv, n }
    }

    /// Hermitian matrix of `x`.
    pub fn matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.n, |i, j| Complex::new(T::zero(), self.deriv[i * self.n + j]))
    }

    /// `<x>` and `<x^2>` of a state (not assumed normalised).
    pub fn moments(&self, rho: &CMatrix<T>) -> (T, T) {
        let n = self.n;
        let x = self.matrix();
        let x_rho = x.matmul(rho);
        let tr = rho.trace().re;
        let mean = x_rho.trace().re / tr;
        // Tr(x x rho) = sum_ij x_ij (x rho)_ji
        let mut second = T::zero();
        for i in 0..n {
            for j in 0..n {
                second = second + (x[(i, j)] * x_rho[(j, i)]).re;
            }
        }
        (mean, second / tr)
    }
}

/// Density matrix of the test particle on a uniform momentum grid.
///
/// The trace is the plain sum of the diagonal; no quadrature weight is folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixGrid<T> {
    pub grid: UniformGrid<T>,
    pub rho: CMatrix<T>,
}

/// Tolerances of a valid state.
pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

impl<T: Real> DensityMatrixGrid<T> {
    pub fn new(grid: UniformGrid<T>, rho: CMatrix<T>) -> Result<Self> {
        if rho.dim() != grid.len {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {0}x{0} but grid has {1} points",
                rho.dim(),
                grid.len
            )));
        }
        Ok(Self { grid, rho })
    }

    /// Diagonal state from non-negative populations, normalised to unit trace.
    pub fn from_populations(grid: UniformGrid<T>, populations: &[T]) -> Result<Self> {
        if populations.len() != grid.len {
            return Err(Error::ShapeMismatch(format!(
                "{} populations for {} grid points",
                populations.len(),
                grid.len
            )));
        }
        let total: T = populations.iter().copied().sum();
        if populations.iter().any(|&p| p < T::zero() || !p.is_finite()) || total <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "populations",
                value: total.as_f64(),
                reason: "must be finite, non-negative and not all zero",
            });
        }
        let normalised: Vec<T> = populations.iter().map(|&p| p / total).collect();
        Self::new(grid, CMatrix::from_diagonal(&normalised))
    }

    /// Pure state `|psi><psi|` from momentum amplitudes, normalised.
    pub fn pure(grid: UniformGrid<T>, amplitudes: &[Complex<T>]) -> Result<Self> {
        if amplitudes.len() != grid.len {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for {} grid points",
                amplitudes.len(),
                grid.len
            )));
        }
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        require_positive("state norm", norm)?;
        let rho = CMatrix::from_fn(grid.len, |i, j| amplitudes[i] * amplitudes[j].conj() / norm);
        Self::new(grid, rho)
    }

    pub fn trace(&self) -> T {
        self.rho.trace().re
    }

    pub fn populations(&self) -> Vec<T> {
        self.rho.diagonal_re()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.min_hermitian_eigenvalue()
    }

    /// Checks Hermiticity, unit trace and the eigenvalue floor.
    pub fn validate(&self) -> Result<()> {
        let herm = self.rho.hermiticity_defect().as_f64();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidParameter {
                name: "rho hermiticity defect",
                value: herm,
                reason: "state must be Hermitian",
            });
        }
        let tr = self.trace().as_f64();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidParameter {
                name: "rho trace",
                value: tr,
                reason: "state must have unit trace",
            });
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidParameter {
                name: "rho min eigenvalue",
                value: min,
                reason: "state must be positive semi-definite",
            });
        }
        Ok(())
    }

    /// `<p>` and `Var(p)` of the diagonal.
    pub fn momentum_moments(&self) -> (T, T) {
        let pops = self.populations();
        let tr: T = pops.iter().copied().sum();
        let mean = self.grid.points().zip(&pops).map(|(p, &w)| p * w).sum::<T>() / tr;
        let var = self
            .grid
            .points()
            .zip(&pops)
            .map(|(p, &w)| (p - mean) * (p - mean) * w)
            .sum::<T>()
            / tr;
        (mean, var)
    }

    /// Spatial translation by `a`: `rho(p, p') -> e^{-i a (p - p')} rho(p, p')`.
    pub fn translated(&self, a: T) -> Self {
        let g = self.grid;
        let rho = CMatrix::from_fn(g.len, |i, j| {
            let phase = -a * (g.point(i) - g.point(j));
            self.rho[(i, j)] * Complex::new(phase.cos(), phase.sin())
        });
        Self { grid: g, rho }
    }

    /// L1 distance between the diagonal and normalised weights.
    pub fn population_distance(&self, weights: &[T]) -> T {
        self.populations().iter().zip(weights).map(|(a, b)| (*a - *b).abs()).sum()
    }
}

/// Normalised Maxwell weights `e^{-beta p^2 / 2M}` on the grid nodes.
pub fn maxwell_weights<T: Real>(beta: T, particle: &ParticleSpec<T>, grid: &UniformGrid<T>) -> Vec<T> {
    let raw: Vec<T> = grid
        .points()
        .map(|p| (-beta * p * p / (T::lit(2.0) * particle.mass)).exp())
        .collect();
    let total: T = raw.iter().copied().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Largest boundary weight admitted by [`stationary_state`].
pub const STATIONARY_EDGE_LIMIT: f64 = 1e-12;

/// Diagonal Maxwell state; fails when the edge nodes carry too much weight.
pub fn stationary_state<T: Real>(
    beta: T,
    particle: &ParticleSpec<T>,
    grid: UniformGrid<T>,
) -> Result<DensityMatrixGrid<T>> {
    require_positive("gas.beta", beta)?;
    let weights = maxwell_weights(beta, particle, &grid);
    let edge = weights[0].max(weights[grid.len - 1]);
    if edge >= T::lit(STATIONARY_EDGE_LIMIT) {
        return Err(Error::GridTooNarrow {
            boundary_weight: edge.as_f64(),
            limit: STATIONARY_EDGE_LIMIT,
        });
    }
    DensityMatrixGrid::from_populations(grid, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, dp: f64) -> UniformGrid<f64> {
        UniformGrid::symmetric(n, dp).unwrap()
    }

    #[test]
    fn shift_detection() {
        let g = grid(16, 0.25);
        assert_eq!(g.steps_in(0.75).unwrap(), 3);
        assert_eq!(g.steps_in(-0.5).unwrap(), -2);
        assert!(matches!(g.steps_in(0.3), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn stationary_state_examples() {
        let particle = ParticleSpec::new(2.0).unwrap();
        let beta = 0.5;
        let g = grid(128, 0.25);
        let st = stationary_state(beta, &particle, g).unwrap();
        assert_relative_eq!(st.trace(), 1.0, max_relative = 1e-14);
        let pops = st.populations();
        for i in 0..g.len {
            assert_relative_eq!(pops[i], pops[g.len - 1 - i], max_relative = 1e-13);
        }
        let (mean, var) = st.momentum_moments();
        assert!(mean.abs() < 1e-13);
        assert_relative_eq!(var, 2.0 / 0.5, max_relative = 1e-3);
        st.validate().unwrap();
    }

    #[test]
    fn stationary_state_rejects_narrow_grid() {
        let particle = ParticleSpec::new(1.0).unwrap();
        let err = stationary_state(1.0, &particle, grid(16, 0.25)).unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow { .. }));
    }

    #[test]
    fn position_operator_generates_cyclic_shift() {
        // band-limited smooth state well inside the grid
        let g = grid(96, 0.2);
        let psi: Vec<Complex<f64>> = g
            .points()
            .map(|p| Complex::new((-(p - 0.3) * (p - 0.3) / 2.0).exp(), 0.0))
            .collect();
        let x = PositionOperator::new(&g).matrix();
        // x psi = i psi'
        for (i, p) in g.points().enumerate().skip(16).take(64) {
            let mut xpsi = Complex::new(0.0, 0.0);
            for j in 0..g.len {
                xpsi += x[(i, j)] * psi[j];
            }
            let dpsi = -(p - 0.3) * psi[i].re;
            assert!((xpsi - Complex::new(0.0, dpsi)).norm() < 1e-9, "p {p}");
        }
        assert!(x.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn translation_moves_position_expectation() {
        let g = grid(64, 0.2);
        let psi: Vec<Complex<f64>> = g.points().map(|p| Complex::new((-p * p / 2.0).exp(), 0.0)).collect();
        let st = DensityMatrixGrid::pure(g, &psi).unwrap();
        let op = PositionOperator::new(&g);
        let (x0, _) = op.moments(&st.rho);
        let (x1, _) = op.moments(&st.translated(1.5).rho);
        assert!(x0.abs() < 1e-12);
        assert_relative_eq!(x1, 1.5, max_relative = 1e-9);
    }

    #[test]
    fn eigenvalue_of_projector() {
        let g = grid(8, 1.0);
        let psi: Vec<Complex<f64>> = (0..8).map(|i| Complex::new(i as f64, 1.0)).collect();
        let st = DensityMatrixGrid::pure(g, &psi).unwrap();
        assert!(st.min_eigenvalue().abs() < 1e-12);
        st.validate().unwrap();
    }
}
