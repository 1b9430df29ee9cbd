//! Phase-space solver for the Kramers (quantum Fokker-Planck) equation
//!
//! ```text
//! dW/dt = -(p/M) dW/dx + eta d(pW)/dp + D_pp d2W/dp2 + D_xx d2W/dx2
//! ```
//!
//! on a grid periodic in `x` and absorbing in `p`.
//!
//! One step is `X(dt/2) P(dt) X(dt/2)`. The `x` part advects each momentum
//! row with a semi-Lagrangian cubic interpolant and then diffuses it with an
//! explicit centred stencil. The `p` part is a Crank-Nicolson step of a
//! centred flux discretisation of the Ornstein-Uhlenbeck operator whose
//! diffusion is raised by `eta dp^2 / 4`; with that shift the semi-discrete
//! first and second momentum moments obey the continuum equations exactly.

use crate::error::{require_positive, Error, Result};
use crate::evolution::grid::UniformGrid;
use crate::evolution::report::{EvolutionReport, Moments};
use crate::kinetic::ParticleSpec;
use crate::scattering::TransportCoefficients;
use crate::Real;

/// Allowed drift of the total mass per unit time.
pub const MASS_DRIFT_RATE_TOL: f64 = 1e-8;

/// Real field `W(x, p)`, stored row-major with `p` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid<T> {
    pub x: UniformGrid<T>,
    pub p: UniformGrid<T>,
    w: Vec<T>,
}

impl<T: Real> WignerGrid<T> {
    pub fn new(x: UniformGrid<T>, p: UniformGrid<T>, w: Vec<T>) -> Result<Self> {
        if w.len() != x.len * p.len {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}x{} grid",
                w.len(),
                x.len,
                p.len
            )));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "wigner field",
                value: f64::NAN,
                reason: "values must be finite",
            });
        }
        Ok(Self { x, p, w })
    }

    pub fn from_fn(x: UniformGrid<T>, p: UniformGrid<T>, mut f: impl FnMut(T, T) -> T) -> Result<Self> {
        let mut w = Vec::with_capacity(x.len * p.len);
        for ix in 0..x.len {
            for ip in 0..p.len {
                w.push(f(x.point(ix), p.point(ip)));
            }
        }
        Self::new(x, p, w)
    }

    /// Product Gaussian normalised to unit mass on the grid.
    pub fn gaussian(x: UniformGrid<T>, p: UniformGrid<T>, x0: T, var_x: T, p0: T, var_p: T) -> Result<Self> {
        require_positive("var_x", var_x)?;
        require_positive("var_p", var_p)?;
        let two = T::lit(2.0);
        let mut out = Self::from_fn(x, p, |xv, pv| {
            (-(xv - x0) * (xv - x0) / (two * var_x) - (pv - p0) * (pv - p0) / (two * var_p)).exp()
        })?;
        out.normalise()?;
        Ok(out)
    }

    /// Spatially uniform Maxwell distribution with variance `M / beta`.
    pub fn thermal(x: UniformGrid<T>, p: UniformGrid<T>, beta: T, particle: &ParticleSpec<T>) -> Result<Self> {
        require_positive("gas.beta", beta)?;
        let two = T::lit(2.0);
        let mut out = Self::from_fn(x, p, |_, pv| (-beta * pv * pv / (two * particle.mass)).exp())?;
        out.normalise()?;
        Ok(out)
    }

    fn normalise(&mut self) -> Result<()> {
        let mass = self.mass();
        require_positive("wigner mass", mass)?;
        for v in &mut self.w {
            *v = *v / mass;
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, ix: usize, ip: usize) -> T {
        self.w[ix * self.p.len + ip]
    }

    pub fn values(&self) -> &[T] {
        &self.w
    }

    fn cell(&self) -> T {
        self.x.step * self.p.step
    }

    /// `sum W dx dp`.
    pub fn mass(&self) -> T {
        self.w.iter().copied().sum::<T>() * self.cell()
    }

    /// Momentum marginal `int W dx` at the momentum nodes.
    pub fn momentum_marginal(&self) -> Vec<T> {
        let np = self.p.len;
        let mut out = vec![T::zero(); np];
        for row in self.w.chunks_exact(np) {
            for (o, &v) in out.iter_mut().zip(row) {
                *o = *o + v;
            }
        }
        out.into_iter().map(|v| v * self.x.step).collect()
    }

    /// Position marginal `int W dp` at the position nodes.
    pub fn position_marginal(&self) -> Vec<T> {
        self.w
            .chunks_exact(self.p.len)
            .map(|row| row.iter().copied().sum::<T>() * self.p.step)
            .collect()
    }

    pub fn moments(&self) -> Moments<T> {
        let (mean_p, var_p) = weighted_moments(&self.p, &self.momentum_marginal());
        let (mean_x, var_x) = weighted_moments(&self.x, &self.position_marginal());
        Moments {
            mean_x,
            mean_p,
            var_x,
            var_p,
        }
    }

    /// L1 distance `sum |m(p) - g(p)| dp` of the momentum marginal from the
    /// Maxwell density with variance `M / beta`.
    pub fn thermal_distance(&self, beta: T, particle: &ParticleSpec<T>) -> T {
        let var = particle.mass / beta;
        let norm = (T::lit(2.0) * T::PI() * var).sqrt();
        self.momentum_marginal()
            .iter()
            .zip(self.p.points())
            .map(|(&m, p)| (m - (-p * p / (T::lit(2.0) * var)).exp() / norm).abs())
            .sum::<T>()
            * self.p.step
    }
}

fn weighted_moments<T: Real>(grid: &UniformGrid<T>, density: &[T]) -> (T, T) {
    let total: T = density.iter().copied().sum();
    let mean = grid.points().zip(density).map(|(v, &d)| v * d).sum::<T>() / total;
    let var = grid
        .points()
        .zip(density)
        .map(|(v, &d)| (v - mean) * (v - mean) * d)
        .sum::<T>()
        / total;
    (mean, var)
}

/// Effective momentum diffusion of the discrete friction-diffusion operator.
fn corrected_diffusion<T: Real>(coeffs: &TransportCoefficients<T>, dp: T) -> T {
    coeffs.d_pp + coeffs.eta * dp * dp / T::lit(4.0)
}

/// Tridiagonal matrix of the discrete operator `d(eta p W + D dW/dp)/dp`.
#[derive(Debug, Clone)]
struct OuOperator<T> {
    lower: Vec<T>,
    diag: Vec<T>,
    upper: Vec<T>,
}

impl<T: Real> OuOperator<T> {
    fn new(p: &UniformGrid<T>, coeffs: &TransportCoefficients<T>) -> Self {
        let n = p.len;
        let dp = p.step;
        let d = corrected_diffusion(coeffs, dp);
        let half = T::lit(0.5);
        // face j+1/2 flux = alpha f_j + gamma f_{j+1}
        let face = |j: isize| p.min + (T::lit(j as f64) + half) * dp;
        let alpha = |j: isize| coeffs.eta * face(j) * half - d / dp;
        let gamma = |j: isize| coeffs.eta * face(j) * half + d / dp;
        let mut lower = vec![T::zero(); n];
        let mut diag = vec![T::zero(); n];
        let mut upper = vec![T::zero(); n];
        for j in 0..n {
            let ji = j as isize;
            diag[j] = (alpha(ji) - gamma(ji - 1)) / dp;
            if j > 0 {
                lower[j] = -alpha(ji - 1) / dp;
            }
            if j + 1 < n {
                upper[j] = gamma(ji) / dp;
            }
        }
        Self { lower, diag, upper }
    }

    fn apply(&self, f: &[T], out: &mut [T]) {
        let n = f.len();
        for j in 0..n {
            let mut v = self.diag[j] * f[j];
            if j > 0 {
                v = v + self.lower[j] * f[j - 1];
            }
            if j + 1 < n {
                v = v + self.upper[j] * f[j + 1];
            }
            out[j] = v;
        }
    }
}

/// Pre-factored Crank-Nicolson step `(I - h/2 L) f' = (I + h/2 L) f`.
#[derive(Debug, Clone)]
struct CrankNicolson<T> {
    op: OuOperator<T>,
    half_step: T,
    /// Thomas algorithm: modified upper diagonal and inverse pivots.
    upper_mod: Vec<T>,
    inv_pivot: Vec<T>,
}

impl<T: Real> CrankNicolson<T> {
    fn new(op: OuOperator<T>, h: T) -> Self {
        let n = op.diag.len();
        let hh = h / T::lit(2.0);
        let mut upper_mod = vec![T::zero(); n];
        let mut inv_pivot = vec![T::zero(); n];
        let mut prev_upper = T::zero();
        for j in 0..n {
            let a = -hh * op.lower[j];
            let b = T::one() - hh * op.diag[j];
            let c = -hh * op.upper[j];
            let pivot = b - a * prev_upper;
            inv_pivot[j] = T::one() / pivot;
            upper_mod[j] = c * inv_pivot[j];
            prev_upper = upper_mod[j];
        }
        Self {
            op,
            half_step: hh,
            upper_mod,
            inv_pivot,
        }
    }

    fn step(&self, f: &mut [T], scratch: &mut [T]) {
        let n = f.len();
        self.op.apply(f, scratch);
        for j in 0..n {
            scratch[j] = f[j] + self.half_step * scratch[j];
        }
        // forward sweep
        let mut prev = T::zero();
        for j in 0..n {
            let a = -self.half_step * self.op.lower[j];
            prev = (scratch[j] - a * prev) * self.inv_pivot[j];
            f[j] = prev;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            f[j] = f[j] - self.upper_mod[j] * f[j + 1];
        }
    }
}

/// Cubic Lagrange weights at offset `t` in `[0, 1]` from the node pattern `-1, 0, 1, 2`.
#[inline]
fn cubic_weights<T: Real>(t: T) -> [T; 4] {
    let one = T::one();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    [
        -t * (t - one) * (t - two) / six,
        (t + one) * (t - one) * (t - two) / two,
        -(t + one) * t * (t - two) / two,
        (t + one) * t * (t - one) / six,
    ]
}

/// Periodic semi-Lagrangian shift `f(x) -> f(x - s dx)`.
fn shift_periodic<T: Real>(src: &[T], s: T, dst: &mut [T]) {
    let n = src.len() as isize;
    let k = s.floor();
    let t = T::one() - (s - k);
    let k = k.to_isize().expect("shift fits isize");
    let w = cubic_weights(t);
    for (i, d) in dst.iter_mut().enumerate() {
        let base = i as isize - k - 1;
        let mut v = T::zero();
        for (m, wm) in w.iter().enumerate() {
            let j = (base + m as isize - 1).rem_euclid(n) as usize;
            v = v + *wm * src[j];
        }
        *d = v;
    }
}

/// Discrete right-hand side of the Kramers equation with the solver's
/// spatial operators (centred differences in `x`, corrected flux in `p`).
pub fn kramers_rhs<T: Real>(
    w: &WignerGrid<T>,
    coeffs: &TransportCoefficients<T>,
    particle: &ParticleSpec<T>,
) -> Vec<T> {
    let (nx, np) = (w.x.len, w.p.len);
    let dx = w.x.step;
    let op = OuOperator::new(&w.p, coeffs);
    let mut out = vec![T::zero(); nx * np];
    for ix in 0..nx {
        let row = &w.w[ix * np..(ix + 1) * np];
        op.apply(row, &mut out[ix * np..(ix + 1) * np]);
    }
    let two = T::lit(2.0);
    for ix in 0..nx {
        let left = (ix + nx - 1) % nx;
        let right = (ix + 1) % nx;
        for ip in 0..np {
            let (wl, wc, wr) = (w.get(left, ip), w.get(ix, ip), w.get(right, ip));
            let velocity = w.p.point(ip) / particle.mass;
            let stream = -velocity * (wr - wl) / (two * dx);
            let diffusion = coeffs.d_xx * (wr - two * wc + wl) / (dx * dx);
            out[ix * np + ip] = out[ix * np + ip] + stream + diffusion;
        }
    }
    out
}

/// Mean and variance of the momentum marginal of the OU process started
/// from a distribution with mean `p0` and variance `var0`.
pub fn ou_marginal_exact<T: Real>(
    p0: T,
    var0: T,
    t: T,
    coeffs: &TransportCoefficients<T>,
    particle: &ParticleSpec<T>,
) -> (T, T) {
    let beta = -T::lit(4.0) * coeffs.kappa * particle.mass;
    let thermal = particle.mass / beta;
    let decay = (-coeffs.eta * t).exp();
    let decay2 = decay * decay;
    (p0 * decay, thermal * (T::one() - decay2) + var0 * decay2)
}

/// Strang-split Kramers solver for a fixed grid, time step and coefficients.
#[derive(Debug, Clone)]
pub struct KramersSolver<T> {
    x: UniformGrid<T>,
    p: UniformGrid<T>,
    coeffs: TransportCoefficients<T>,
    particle: ParticleSpec<T>,
    dt: T,
    cn: CrankNicolson<T>,
}

impl<T: Real> KramersSolver<T> {
    /// Validates the stability conditions and factors the momentum step.
    pub fn new(
        x: UniformGrid<T>,
        p: UniformGrid<T>,
        coeffs: TransportCoefficients<T>,
        particle: ParticleSpec<T>,
        dt: T,
    ) -> Result<Self> {
        require_positive("dt", dt)?;
        let half = T::lit(0.5);
        let diffusion_number = coeffs.d_xx * dt / (x.step * x.step);
        if diffusion_number > half {
            return Err(Error::CflViolation {
                condition: "D_xx dt / dx^2",
                value: diffusion_number.as_f64(),
                limit: 0.5,
            });
        }
        let d = corrected_diffusion(&coeffs, p.step);
        let p_edge = p.min.abs().max(p.max().abs()) + half * p.step;
        let peclet = if d > T::zero() {
            coeffs.eta.abs() * p_edge * p.step / (T::lit(2.0) * d)
        } else {
            T::zero()
        };
        if peclet > T::one() {
            return Err(Error::CflViolation {
                condition: "cell Peclet number",
                value: peclet.as_f64(),
                limit: 1.0,
            });
        }
        let op = OuOperator::new(&p, &coeffs);
        let worst = op.diag.iter().copied().fold(T::zero(), T::min);
        let explicit_half = T::one() + half * dt * worst;
        if explicit_half < T::zero() {
            return Err(Error::CflViolation {
                condition: "1 + dt/2 min diag",
                value: explicit_half.as_f64(),
                limit: 0.0,
            });
        }
        Ok(Self {
            x,
            p,
            coeffs,
            particle,
            dt,
            cn: CrankNicolson::new(op, dt),
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn coefficients(&self) -> &TransportCoefficients<T> {
        &self.coeffs
    }

    /// Advection plus diffusion in `x` over `h`.
    fn x_step(&self, w: &mut [T], h: T) {
        let (nx, np) = (self.x.len, self.p.len);
        let mut column = vec![T::zero(); nx];
        let mut moved = vec![T::zero(); nx];
        let r = self.coeffs.d_xx * h / (self.x.step * self.x.step);
        let two = T::lit(2.0);
        for ip in 0..np {
            for ix in 0..nx {
                column[ix] = w[ix * np + ip];
            }
            let s = self.p.point(ip) / self.particle.mass * h / self.x.step;
            shift_periodic(&column, s, &mut moved);
            for ix in 0..nx {
                let l = moved[(ix + nx - 1) % nx];
                let rr = moved[(ix + 1) % nx];
                w[ix * np + ip] = moved[ix] + r * (l - two * moved[ix] + rr);
            }
        }
    }

    fn p_step(&self, w: &mut [T]) {
        let np = self.p.len;
        let mut scratch = vec![T::zero(); np];
        for row in w.chunks_exact_mut(np) {
            self.cn.step(row, &mut scratch);
        }
    }

    /// One full Strang step.
    pub fn step(&self, state: &mut WignerGrid<T>) {
        let half = self.dt / T::lit(2.0);
        self.x_step(&mut state.w, half);
        self.p_step(&mut state.w);
        self.x_step(&mut state.w, half);
    }

    /// Integrates to `t_final` (rounded up to whole steps), recording the
    /// report every `sample_every` steps and at the end.
    pub fn evolve(
        &self,
        w0: &WignerGrid<T>,
        t_final: T,
        sample_every: usize,
    ) -> Result<(WignerGrid<T>, EvolutionReport<T>)> {
        if w0.x != self.x || w0.p != self.p {
            return Err(Error::ShapeMismatch("initial field lives on a different grid".into()));
        }
        if !(t_final >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                value: t_final.as_f64(),
                reason: "must be non-negative",
            });
        }
        let steps = (t_final / self.dt - T::lit(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
        let every = sample_every.max(1);
        let beta = -T::lit(4.0) * self.coeffs.kappa * self.particle.mass;
        let mut state = w0.clone();
        let mut report = EvolutionReport::default();
        let mass0 = state.mass();
        let record = |t: T, s: &WignerGrid<T>, report: &mut EvolutionReport<T>| {
            report.push(t, s.mass(), None, s.moments(), s.thermal_distance(beta, &self.particle));
        };
        record(T::zero(), &state, &mut report);
        for step in 1..=steps {
            self.step(&mut state);
            let t = T::from_usize_lossy(step) * self.dt;
            if step % every == 0 || step == steps {
                let drift = (state.mass() - mass0).abs();
                if !(drift <= T::lit(MASS_DRIFT_RATE_TOL) * t.max(T::one())) {
                    return Err(Error::StepUnstable {
                        step,
                        quantity: "mass",
                        drift: drift.as_f64(),
                    });
                }
                record(t, &state, &mut report);
            }
        }
        Ok((state, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coeffs(d: f64, beta: f64, mass: f64) -> TransportCoefficients<f64> {
        TransportCoefficients::from_parts(d, beta, mass)
    }

    fn grids(n: usize, half_width: f64) -> (UniformGrid<f64>, UniformGrid<f64>) {
        (
            UniformGrid::cell_centred(-half_width, half_width, n).unwrap(),
            UniformGrid::cell_centred(-half_width, half_width, n).unwrap(),
        )
    }

    #[test]
    fn ou_oracle_limits() {
        let c = coeffs(2.0, 1.0, 1.5);
        let particle = ParticleSpec::new(1.5).unwrap();
        assert_eq!(ou_marginal_exact(1.2, 0.3, 0.0, &c, &particle), (1.2, 0.3));
        let (m, v) = ou_marginal_exact(1.2, 0.3, 1e3, &c, &particle);
        assert!(m.abs() < 1e-300);
        assert_relative_eq!(v, 1.5, max_relative = 1e-14);
        let t = std::f64::consts::LN_2 / c.eta;
        assert_relative_eq!(ou_marginal_exact(1.2, 0.3, t, &c, &particle).0, 0.6, max_relative = 1e-14);
    }

    #[test]
    fn cubic_shift_is_exact_for_cubics_and_conserves_mass() {
        let n = 32;
        let src: Vec<f64> = (0..n).map(|i| (i as f64 * 0.4).sin() + 2.0).collect();
        let mut dst = vec![0.0; n];
        shift_periodic(&src, 3.37, &mut dst);
        assert_relative_eq!(src.iter().sum::<f64>(), dst.iter().sum::<f64>(), max_relative = 1e-14);
        shift_periodic(&src, 5.0, &mut dst);
        for i in 0..n {
            assert_relative_eq!(dst[i], src[(i + n - 5) % n], max_relative = 1e-14);
        }
        let w = cubic_weights(0.3f64);
        let nodes = [-1.0f64, 0.0, 1.0, 2.0];
        let interp: f64 = w.iter().zip(nodes).map(|(w, x)| w * x.powi(3)).sum();
        assert_relative_eq!(interp, 0.3f64.powi(3), max_relative = 1e-14);
    }

    #[test]
    fn thermal_state_residual_is_second_order() {
        let particle = ParticleSpec::new(1.0).unwrap();
        let c = coeffs(0.7, 1.0, 1.0);
        let mut prev = None;
        for n in [64, 128, 256] {
            let (x, p) = grids(n, 8.0);
            let w = WignerGrid::thermal(x, p, 1.0, &particle).unwrap();
            let r = kramers_rhs(&w, &c, &particle);
            let err = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if let Some(e) = prev {
                let ratio: f64 = e / err;
                assert!(ratio > 3.5, "ratio {ratio}");
            }
            prev = Some(err);
        }
    }

    #[test]
    fn no_diffusion_gives_free_streaming() {
        let particle = ParticleSpec::new(2.0).unwrap();
        let c = coeffs(0.0, 1.0, 2.0);
        let (x, p) = grids(16, 4.0);
        let w = WignerGrid::gaussian(x, p, 0.3, 0.5, 0.2, 0.7).unwrap();
        let r = kramers_rhs(&w, &c, &particle);
        for ix in 0..16 {
            for ip in 0..16 {
                let l = w.get((ix + 15) % 16, ip);
                let rr = w.get((ix + 1) % 16, ip);
                let expected = -p.point(ip) / 2.0 * (rr - l) / (2.0 * x.step);
                assert_relative_eq!(r[ix * 16 + ip], expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn uniform_in_x_reduces_to_ou() {
        let particle = ParticleSpec::new(1.0).unwrap();
        let c = coeffs(0.9, 1.3, 1.0);
        let (x, p) = grids(8, 6.0);
        let w = WignerGrid::from_fn(x, p, |_, pv| (-(pv - 0.5) * (pv - 0.5)).exp()).unwrap();
        let r = kramers_rhs(&w, &c, &particle);
        let op = OuOperator::new(&p, &c);
        let mut expected = vec![0.0; 8];
        op.apply(&w.values()[..8], &mut expected);
        for ix in 0..8 {
            for ip in 0..8 {
                assert_relative_eq!(r[ix * 8 + ip], expected[ip], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn semi_discrete_moments_are_exact() {
        let c = coeffs(1.1, 1.0, 1.0);
        let x = UniformGrid::cell_centred(-1.0, 1.0, 4).unwrap();
        let p = UniformGrid::cell_centred(-10.0, 10.0, 200).unwrap();
        let w = WignerGrid::gaussian(x, p, 0.0, 1.0, 1.0, 0.4).unwrap();
        let marginal = w.momentum_marginal();
        let mut lf = vec![0.0; 200];
        OuOperator::new(&p, &c).apply(&marginal, &mut lf);
        let m1: f64 = p.points().zip(&marginal).map(|(p, f)| p * f).sum::<f64>() * p.step;
        let m2: f64 = p.points().zip(&marginal).map(|(p, f)| p * p * f).sum::<f64>() * p.step;
        let dm1: f64 = p.points().zip(&lf).map(|(p, f)| p * f).sum::<f64>() * p.step;
        let dm2: f64 = p.points().zip(&lf).map(|(p, f)| p * p * f).sum::<f64>() * p.step;
        assert_relative_eq!(dm1, -c.eta * m1, max_relative = 1e-10);
        assert_relative_eq!(dm2, -2.0 * c.eta * m2 + 2.0 * c.d_pp, max_relative = 1e-10);
    }

    #[test]
    fn evolution_tracks_ou_moments() {
        let particle = ParticleSpec::new(1.0).unwrap();
        let c = coeffs(1.0, 1.0, 1.0);
        let (x, p) = grids(64, 8.0);
        let dt = 0.5 * p.step * p.step / c.d_pp;
        let solver = KramersSolver::new(x, p, c, particle, dt).unwrap();
        let w0 = WignerGrid::gaussian(x, p, 0.0, 1.0, 1.5, 0.25).unwrap();
        let (end, report) = solver.evolve(&w0, 1.0, 50).unwrap();
        let (mean, var) = ou_marginal_exact(1.5, 0.25, *report.times.last().unwrap(), &c, &particle);
        let m = end.moments();
        assert_relative_eq!(m.mean_p, mean, max_relative = 1e-3);
        assert_relative_eq!(m.var_p, var, max_relative = 1e-3);
        assert!((end.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stability_violations_rejected() {
        let particle = ParticleSpec::new(1.0).unwrap();
        let (x, p) = grids(32, 4.0);
        let big_dxx = TransportCoefficients {
            d_pp: 1.0,
            eta: 1.0,
            d_xx: 100.0,
            kappa: -0.25,
        };
        assert!(matches!(
            KramersSolver::new(x, p, big_dxx, particle, 0.01),
            Err(Error::CflViolation { .. })
        ));
        let weak = coeffs(1e-4, 1.0, 1.0);
        let strong_friction = TransportCoefficients { eta: 50.0, ..weak };
        assert!(matches!(
            KramersSolver::new(x, p, strong_friction, particle, 1e-3),
            Err(Error::CflViolation { .. })
        ));
        let c = coeffs(1.0, 1.0, 1.0);
        assert!(matches!(
            KramersSolver::new(x, p, c, particle, 10.0),
            Err(Error::CflViolation { .. })
        ));
    }
}
