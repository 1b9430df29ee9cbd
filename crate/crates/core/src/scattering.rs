//! T-matrix models, the momentum-diffusion coefficient `D_pp` and the
//! transport coefficients of the quantum Fokker-Planck limit.

use std::ops::Neg;

use num_traits::Num;

use crate::error::{require_finite, require_positive, Error, Result};
use crate::kinetic::{GasSpec, ParticleSpec, Statistics};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::Real;

/// Tail fraction of the thermal weight `q^3 e^{-a q^2}` ignored by the cutoff.
const WEIGHT_TAIL: f64 = 1e-14;
/// Largest tail fraction a tabulated T-matrix may leave uncovered.
const TABLE_TAIL_LIMIT: f64 = 1e-8;

/// Energy-independent, isotropic T-matrix of the test-particle/gas collision.
#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringModel<T> {
    /// Fourier transform of `v0 exp(-|x|^2 / r0^2)`.
    Gaussian { v0: T, r0: T },
    /// Zero-range interaction with scattering length `a0`.
    Contact { a0: T },
    Tabulated(TabulatedTMatrix<T>),
}

/// `|t(q)|^2` together with a flag telling whether `q` fell past the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMatrixSample<T> {
    pub value: T,
    pub beyond_table: bool,
}

impl<T: Real> ScatteringModel<T> {
    pub fn gaussian(v0: T, r0: T) -> Result<Self> {
        require_finite("scattering.v0", v0)?;
        require_positive("scattering.r0", r0)?;
        Ok(ScatteringModel::Gaussian { v0, r0 })
    }

    pub fn contact(a0: T) -> Result<Self> {
        require_finite("scattering.a0", a0)?;
        Ok(ScatteringModel::Contact { a0 })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScatteringModel::Gaussian { .. } => "gaussian",
            ScatteringModel::Contact { .. } => "contact",
            ScatteringModel::Tabulated(_) => "tabulated",
        }
    }

    /// Squared modulus of the T-matrix at momentum transfer `q >= 0`.
    ///
    /// The contact model scales with `1/M`, hence the particle argument.
    pub fn t_tilde_sq(&self, q: T, particle: &ParticleSpec<T>) -> TMatrixSample<T> {
        match self {
            ScatteringModel::Gaussian { v0, r0 } => {
                let amp = gaussian_amplitude(*v0, *r0);
                TMatrixSample {
                    value: amp * amp * (-q * q * *r0 * *r0 / T::lit(2.0)).exp(),
                    beyond_table: false,
                }
            }
            ScatteringModel::Contact { a0 } => {
                let amp = contact_amplitude(*a0, particle.mass);
                TMatrixSample {
                    value: amp * amp,
                    beyond_table: false,
                }
            }
            ScatteringModel::Tabulated(table) => {
                let sample = table.eval(q);
                if sample.beyond_table {
                    log::warn!(
                        "T-matrix requested at q = {} beyond last table sample {}; using 0",
                        q,
                        table.q_last()
                    );
                }
                sample
            }
        }
    }
}

/// `pi^{3/2} (2 pi)^{-3} v0 r0^3`.
fn gaussian_amplitude<T: Real>(v0: T, r0: T) -> T {
    let pi = T::PI();
    pi.powf(T::lit(1.5)) / (T::TAU() * T::TAU() * T::TAU()) * v0 * r0 * r0 * r0
}

/// `a0 / (4 pi^2 M)`.
fn contact_amplitude<T: Real>(a0: T, mass: T) -> T {
    a0 / (T::lit(4.0) * T::PI() * T::PI() * mass)
}

/// Sampled `|t(q)|^2` with monotone piecewise-cubic (Fritsch-Carlson) interpolation.
///
/// Below the first sample the first value is held; past the last sample the
/// interpolant is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTMatrix<T> {
    q: Vec<T>,
    values: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> TabulatedTMatrix<T> {
    pub fn new(samples: Vec<(T, T)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidTable(format!(
                "need at least two samples, got {}",
                samples.len()
            )));
        }
        for (i, &(q, v)) in samples.iter().enumerate() {
            if !q.is_finite() || !v.is_finite() || q < T::zero() || v < T::zero() {
                return Err(Error::InvalidTable(format!(
                    "sample {i} = ({q}, {v}) must be finite with q >= 0 and |t|^2 >= 0"
                )));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidTable(format!(
                "q must be strictly increasing (sample {} -> {})",
                i,
                i + 1
            )));
        }
        let (q, values): (Vec<T>, Vec<T>) = samples.into_iter().unzip();
        let slopes = monotone_slopes(&q, &values);
        Ok(Self { q, values, slopes })
    }

    /// Parses two whitespace-separated columns `q |t|^2`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::InvalidTable(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map(T::lit)
                    .map_err(|e| Error::InvalidTable(format!("line {}: `{s}`: {e}", lineno + 1)))
            };
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::new(samples)
    }

    pub fn samples(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.q.iter().copied().zip(self.values.iter().copied())
    }

    pub fn q_last(&self) -> T {
        *self.q.last().expect("table has samples")
    }

    pub fn knots(&self) -> &[T] {
        &self.q
    }

    pub fn eval(&self, q: T) -> TMatrixSample<T> {
        let n = self.q.len();
        if q > self.q[n - 1] {
            return TMatrixSample {
                value: T::zero(),
                beyond_table: true,
            };
        }
        if q <= self.q[0] {
            return TMatrixSample {
                value: self.values[0],
                beyond_table: false,
            };
        }
        // first knot strictly above q
        let hi = self.q.partition_point(|&x| x <= q).min(n - 1);
        let lo = hi - 1;
        let h = self.q[hi] - self.q[lo];
        let t = (q - self.q[lo]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        let value = h00 * self.values[lo]
            + h10 * h * self.slopes[lo]
            + h01 * self.values[hi]
            + h11 * h * self.slopes[hi];
        TMatrixSample {
            // rounding can leave a tiny negative value next to a zero sample
            value: value.max(T::zero()),
            beyond_table: false,
        }
    }
}

fn monotone_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut d = vec![T::zero(); n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > T::zero() {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: T, h1: T, d0: T, d1: T| -> T {
        let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= T::zero() {
            T::zero()
        } else if d0 * d1 <= T::zero() && s.abs() > (three * d0).abs() {
            three * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// Quantum-statistics replacement of the fugacity in `D_pp`.
pub fn zeta<T: Real>(z: T, statistics: Statistics) -> Result<T> {
    statistics.check_fugacity(z)?;
    Ok(match statistics {
        Statistics::MaxwellBoltzmann => z,
        Statistics::BoseEinstein => z / (T::one() - z),
        Statistics::FermiDirac => z / (T::one() + z),
    })
}

/// Thermal de Broglie wavelength `sqrt(2 pi beta / m)`.
pub fn thermal_wavelength<T: Real>(beta: T, m: T) -> T {
    (T::TAU() * beta / m).sqrt()
}

/// `8 pi r0^2 / lambda_T^2`, squared ratio of interaction range to thermal wavelength.
pub fn upsilon<T: Real>(r0: T, lambda_t: T) -> T {
    T::lit(8.0) * T::PI() * r0 * r0 / (lambda_t * lambda_t)
}

#[derive(Debug, Clone, Copy)]
pub struct DppOptions<T> {
    /// Keep the `(1 + 2 alpha)` factor of the thermal exponent.
    pub include_alpha_correction: bool,
    pub quad: QuadOptions<T>,
}

impl<T: Real> Default for DppOptions<T> {
    fn default() -> Self {
        Self {
            include_alpha_correction: false,
            quad: QuadOptions::default(),
        }
    }
}

/// Solves `(1 + s) e^{-s} = tail` for `s`.
fn gaussian_tail_exponent<T: Real>(tail: T) -> T {
    let log_inv = -tail.ln();
    let mut s = log_inv;
    for _ in 0..64 {
        s = log_inv + (T::one() + s).ln();
    }
    s
}

/// Fraction of `int_0^inf q^3 e^{-a q^2} dq` lying beyond `q`.
fn gaussian_tail_fraction<T: Real>(a: T, q: T) -> T {
    let s = a * q * q;
    (T::one() + s) * (-s).exp()
}

/// Thermal exponent coefficient `beta (1 + 2 alpha [flag]) / 8m`.
pub(crate) fn thermal_exponent<T: Real>(gas: &GasSpec<T>, particle: &ParticleSpec<T>, with_alpha: bool) -> T {
    let base = gas.beta / (T::lit(8.0) * gas.m);
    if with_alpha {
        base * (T::one() + T::lit(2.0) * particle.alpha(gas))
    } else {
        base
    }
}

/// Momentum-diffusion coefficient by adaptive quadrature of the isotropic
/// radial integral
/// `zeta (2/3)(pi^2 m^2 / beta) 4 pi int_0^inf q^3 |t(q)|^2 e^{-a q^2} dq`.
pub fn d_pp_quadrature<T: Real>(
    model: &ScatteringModel<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
    opts: &DppOptions<T>,
) -> Result<T> {
    let a = thermal_exponent(gas, particle, opts.include_alpha_correction);
    let mut q_max = (gaussian_tail_exponent(T::lit(WEIGHT_TAIL)) / a).sqrt();
    let mut breaks = vec![T::zero()];
    if let ScatteringModel::Tabulated(table) = model {
        let q_last = table.q_last();
        let tail = gaussian_tail_fraction(a, q_last);
        if tail > T::lit(TABLE_TAIL_LIMIT) {
            return Err(Error::TabulatedRangeTooShort {
                q_last: q_last.as_f64(),
                tail_fraction: tail.as_f64(),
            });
        }
        q_max = q_max.min(q_last);
        breaks.extend(table.knots().iter().copied().filter(|&k| k > T::zero() && k < q_max));
    }
    breaks.push(q_max);

    let radial = integrate_with_breaks(
        |q| q * q * q * model.t_tilde_sq(q, particle).value * (-a * q * q).exp(),
        &breaks,
        &opts.quad,
    )?;
    Ok(dpp_prefactor(gas)? * radial.value)
}

/// `zeta (2/3) (pi^2 m^2 / beta) 4 pi`.
fn dpp_prefactor<T: Real>(gas: &GasSpec<T>) -> Result<T> {
    let pi = T::PI();
    let zeta = zeta(gas.z, gas.statistics)?;
    Ok(zeta * T::lit(2.0 / 3.0) * pi * pi * gas.m * gas.m / gas.beta * T::lit(4.0) * pi)
}

/// Closed form for the Gaussian potential: `zeta v0^2 m upsilon^3 / (48 (1 + upsilon)^2)`.
pub fn d_pp_gaussian_closed<T: Real>(v0: T, r0: T, gas: &GasSpec<T>) -> Result<T> {
    require_finite("scattering.v0", v0)?;
    require_positive("scattering.r0", r0)?;
    let zeta = zeta(gas.z, gas.statistics)?;
    let ups = upsilon(r0, thermal_wavelength(gas.beta, gas.m));
    let one_plus = T::one() + ups;
    Ok(zeta * v0 * v0 * gas.m * ups * ups * ups / (T::lit(48.0) * one_plus * one_plus))
}

/// Closed form for the contact interaction: `zeta (32/3)(m / beta^2) alpha^2 a0^2 / lambda_T^2`.
pub fn d_pp_contact_closed<T: Real>(a0: T, gas: &GasSpec<T>, particle: &ParticleSpec<T>) -> Result<T> {
    require_finite("scattering.a0", a0)?;
    let zeta = zeta(gas.z, gas.statistics)?;
    let alpha = particle.alpha(gas);
    let lambda = thermal_wavelength(gas.beta, gas.m);
    Ok(zeta * T::lit(32.0 / 3.0) * gas.m / (gas.beta * gas.beta) * alpha * alpha * a0 * a0 / (lambda * lambda))
}

/// Closed form for the models that have one.
pub fn d_pp_closed<T: Real>(
    model: &ScatteringModel<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Option<Result<T>> {
    match model {
        ScatteringModel::Gaussian { v0, r0 } => Some(d_pp_gaussian_closed(*v0, *r0, gas)),
        ScatteringModel::Contact { a0 } => Some(d_pp_contact_closed(*a0, gas, particle)),
        ScatteringModel::Tabulated(_) => None,
    }
}

/// Coefficients of the quantum Fokker-Planck (Kramers) equation.
///
/// Generic over any field so the `D_pp / eta = M / beta` identity can be
/// checked exactly on rationals as well as on floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCoefficients<F> {
    /// Momentum diffusion.
    pub d_pp: F,
    /// Friction rate `beta D_pp / M`.
    pub eta: F,
    /// Position diffusion `kappa^2 D_pp`.
    pub d_xx: F,
    /// `-beta / 4M`.
    pub kappa: F,
}

impl<F> TransportCoefficients<F>
where
    F: Clone + Num + Neg<Output = F>,
{
    pub fn from_parts(d_pp: F, beta: F, mass: F) -> Self {
        let four = F::one() + F::one() + F::one() + F::one();
        let kappa = -(beta.clone() / (four * mass.clone()));
        let eta = beta * d_pp.clone() / mass;
        let d_xx = kappa.clone() * kappa.clone() * d_pp.clone();
        Self { d_pp, eta, d_xx, kappa }
    }

    /// `D_pp / eta`; equals `M / beta` whenever `D_pp != 0`.
    pub fn diffusion_friction_ratio(&self) -> F {
        self.d_pp.clone() / self.eta.clone()
    }
}

/// Assembles the transport coefficients from `D_pp`. The friction is rounded
/// so that `D_pp / eta` lands on `M / beta`, or on a neighbouring float when no
/// representable friction achieves that.
pub fn transport_coefficients<T: Real>(
    d_pp: T,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Result<TransportCoefficients<T>> {
    if !(d_pp >= T::zero() && d_pp.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "d_pp",
            value: d_pp.as_f64(),
            reason: "must be finite and non-negative",
        });
    }
    let mut coeffs = TransportCoefficients::from_parts(d_pp, gas.beta, particle.mass);
    if d_pp > T::zero() {
        // pick the friction among its float neighbours that keeps D_pp / eta closest to M / beta
        let target = particle.mass / gas.beta;
        let miss = |eta: T| (d_pp / eta - target).abs();
        let mut best = coeffs.eta;
        for steps in [1, -1, 2, -2, 3, -3, 4, -4] {
            let candidate = coeffs.eta.ulp_step(steps);
            if miss(candidate) < miss(best) {
                best = candidate;
            }
        }
        coeffs.eta = best;
    }
    Ok(coeffs)
}
