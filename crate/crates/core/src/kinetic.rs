//! Gas and test-particle parameters, collision kinematics and the exact
//! dynamic structure factors of an ideal gas.
//!
//! Natural units throughout: `hbar = k_B = 1`. A structure factor is
//! evaluated at momentum transfer `q` for a test particle of momentum `p`;
//! the energy it gains is `E = q^2/2M + p.q/M`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{require_finite, require_positive, Error, Result};
use crate::Real;

/// Quantum statistics of the gas particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    MaxwellBoltzmann,
    BoseEinstein,
    FermiDirac,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [
        Statistics::MaxwellBoltzmann,
        Statistics::BoseEinstein,
        Statistics::FermiDirac,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Statistics::MaxwellBoltzmann => "mb",
            Statistics::BoseEinstein => "be",
            Statistics::FermiDirac => "fd",
        }
    }

    /// Checks the fugacity range: `0 < z < 1` for bosons, `z > 0` otherwise.
    pub fn check_fugacity<T: Real>(self, z: T) -> Result<()> {
        let ok = z > T::zero()
            && z.is_finite()
            && (self != Statistics::BoseEinstein || z < T::one());
        if ok {
            Ok(())
        } else {
            Err(Error::FugacityOutOfRange {
                statistics: self,
                z: z.as_f64(),
            })
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::MaxwellBoltzmann => "Maxwell-Boltzmann",
            Statistics::BoseEinstein => "Bose-Einstein",
            Statistics::FermiDirac => "Fermi-Dirac",
        })
    }
}

impl FromStr for Statistics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mb" | "maxwell-boltzmann" | "boltzmann" => Ok(Statistics::MaxwellBoltzmann),
            "be" | "bose-einstein" | "bose" => Ok(Statistics::BoseEinstein),
            "fd" | "fermi-dirac" | "fermi" => Ok(Statistics::FermiDirac),
            other => Err(format!("unknown statistics `{other}` (expected mb, be or fd)")),
        }
    }
}

/// Ideal background gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasSpec<T> {
    /// Mass of a gas particle.
    pub m: T,
    /// Inverse temperature.
    pub beta: T,
    /// Number density.
    pub n: T,
    /// Fugacity `e^{beta mu}`.
    pub z: T,
    pub statistics: Statistics,
}

impl<T: Real> GasSpec<T> {
    pub fn new(m: T, beta: T, n: T, z: T, statistics: Statistics) -> Result<Self> {
        require_positive("gas.m", m)?;
        require_positive("gas.beta", beta)?;
        require_positive("gas.n", n)?;
        statistics.check_fugacity(z)?;
        Ok(Self {
            m,
            beta,
            n,
            z,
            statistics,
        })
    }

    /// Classical gas with the fugacity fixed by the density.
    pub fn maxwell_boltzmann(m: T, beta: T, n: T) -> Result<Self> {
        require_positive("gas.m", m)?;
        require_positive("gas.beta", beta)?;
        require_positive("gas.n", n)?;
        Self::new(m, beta, n, mb_fugacity(n, beta, m), Statistics::MaxwellBoltzmann)
    }

    /// Same gas with different statistics; the fugacity is re-validated.
    pub fn with_statistics(self, statistics: Statistics) -> Result<Self> {
        Self::new(self.m, self.beta, self.n, self.z, statistics)
    }

    pub fn with_fugacity(self, z: T) -> Result<Self> {
        Self::new(self.m, self.beta, self.n, z, self.statistics)
    }
}

/// Massive test particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSpec<T> {
    pub mass: T,
}

impl<T: Real> ParticleSpec<T> {
    pub fn new(mass: T) -> Result<Self> {
        require_positive("particle.M", mass)?;
        Ok(Self { mass })
    }

    /// Mass ratio `alpha = m / M`.
    pub fn alpha(&self, gas: &GasSpec<T>) -> T {
        gas.m / self.mass
    }
}

/// Plain 3-vector of momenta.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    /// Vector along the first axis.
    pub fn along_x(x: T) -> Self {
        Vec3([x, T::zero(), T::zero()])
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sqr(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Point at which a structure factor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfQuery<T> {
    pub q: Vec3<T>,
    pub p: Vec3<T>,
}

impl<T: Real> SfQuery<T> {
    pub fn new(q: Vec3<T>, p: Vec3<T>) -> Self {
        Self { q, p }
    }

    /// One-dimensional query with both vectors on the first axis.
    pub fn collinear(q: T, p: T) -> Self {
        Self {
            q: Vec3::along_x(q),
            p: Vec3::along_x(p),
        }
    }

    pub fn energy(&self, particle: &ParticleSpec<T>) -> T {
        energy_transfer(&self.q, &self.p, particle)
    }

    /// Query at the same `|q|` whose energy transfer is reversed.
    ///
    /// A particle at `p + q` sending momentum `-q` undoes the original
    /// collision, so `E(-q, p + q) = -E(q, p)`.
    pub fn reversed(&self) -> Self {
        Self {
            q: -self.q,
            p: self.p + self.q,
        }
    }

    fn q_norm(&self) -> Result<T> {
        if !self.q.is_finite() || !self.p.is_finite() {
            return Err(Error::InvalidParameter {
                name: "query",
                value: f64::NAN,
                reason: "momenta must be finite",
            });
        }
        let q = self.q.norm();
        if q > T::zero() {
            Ok(q)
        } else {
            Err(Error::DegenerateQ)
        }
    }
}

/// Energy gained by the test particle: `q^2/2M + p.q/M`.
pub fn energy_transfer<T: Real>(q: &Vec3<T>, p: &Vec3<T>, particle: &ParticleSpec<T>) -> T {
    let two = T::lit(2.0);
    q.norm_sqr() / (two * particle.mass) + p.dot(q) / particle.mass
}

/// `sigma = (q^2 + 2 m E) / 2|q|`, the gas-particle momentum component that
/// makes the collision kinematically allowed.
pub fn sigma<T: Real>(
    q: &Vec3<T>,
    p: &Vec3<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Result<T> {
    let query = SfQuery::new(*q, *p);
    let qn = query.q_norm()?;
    Ok(sigma_from_energy(qn, query.energy(particle), gas.m))
}

#[inline]
fn sigma_from_energy<T: Real>(q: T, energy: T, m: T) -> T {
    let two = T::lit(2.0);
    (q * q + two * m * energy) / (two * q)
}

/// `n (2 pi beta / m)^{3/2}`.
pub fn mb_fugacity<T: Real>(n: T, beta: T, m: T) -> T {
    n * (T::TAU() * beta / m).powf(T::lit(1.5))
}

/// Common prefactor `(2 pi)^{-3} 2 pi m^2 / (n beta q) = m^2 / (4 pi^2 n beta q)`.
#[inline]
fn prefactor<T: Real>(q: T, gas: &GasSpec<T>) -> T {
    let four_pi_sq = T::lit(4.0) * T::PI() * T::PI();
    gas.m * gas.m / (four_pi_sq * gas.n * gas.beta * q)
}

struct Kinematics<T> {
    q: T,
    energy: T,
    sigma: T,
}

fn kinematics<T: Real>(
    query: &SfQuery<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Result<Kinematics<T>> {
    let q = query.q_norm()?;
    let energy = query.energy(particle);
    Ok(Kinematics {
        q,
        energy,
        sigma: sigma_from_energy(q, energy, gas.m),
    })
}

fn finite_or_indeterminate<T: Real>(value: T, k: &Kinematics<T>) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::IndeterminatePoint {
            q: k.q.as_f64(),
            energy: k.energy.as_f64(),
        })
    }
}

/// Maxwell-Boltzmann structure factor.
pub fn s_mb<T: Real>(query: &SfQuery<T>, gas: &GasSpec<T>, particle: &ParticleSpec<T>) -> Result<T> {
    let k = kinematics(query, gas, particle)?;
    let b = gas.beta / (T::lit(2.0) * gas.m);
    let value = prefactor(k.q, gas) * gas.z * (-b * k.sigma * k.sigma).exp();
    finite_or_indeterminate(value, &k)
}

/// Below this `|1 - e^{beta E}|` the logarithmic quotient is summed as a series.
const SERIES_THRESHOLD: f64 = 1e-6;

/// `-ln(1 - u w) / u`, continuous through `u = 0`.
fn neg_log1m_quotient<T: Real>(u: T, w: T) -> T {
    if u.abs() < T::lit(SERIES_THRESHOLD) {
        let x = u * w;
        w * (T::one() + x * (T::lit(0.5) + x * (T::one() / T::lit(3.0) + x * T::lit(0.25))))
    } else {
        -(-u * w).ln_1p() / u
    }
}

/// `ln(1 + u y) / u`, continuous through `u = 0`.
fn log1p_quotient<T: Real>(u: T, y: T) -> T {
    if u.abs() < T::lit(SERIES_THRESHOLD) {
        let x = u * y;
        y * (T::one() - x * (T::lit(0.5) - x * (T::one() / T::lit(3.0) - x * T::lit(0.25))))
    } else {
        (u * y).ln_1p() / u
    }
}

/// Bose-Einstein structure factor of the ideal gas.
///
/// With `a = e^{-b sigma^2}`, `c = e^{-b (sigma - q)^2}`, `b = beta / 2m` and
/// `u = 1 - e^{beta E}` this is `C * [-ln(1 - u z a / (1 - z c)) / u]`.
pub fn s_be<T: Real>(query: &SfQuery<T>, gas: &GasSpec<T>, particle: &ParticleSpec<T>) -> Result<T> {
    Statistics::BoseEinstein.check_fugacity(gas.z)?;
    let k = kinematics(query, gas, particle)?;
    let b = gas.beta / (T::lit(2.0) * gas.m);
    let a = (-b * k.sigma * k.sigma).exp();
    let d = k.sigma - k.q;
    let c = (-b * d * d).exp();
    let u = -(gas.beta * k.energy).exp_m1();
    let w = gas.z * a / (T::one() - gas.z * c);
    let value = prefactor(k.q, gas) * neg_log1m_quotient(u, w);
    finite_or_indeterminate(value, &k)
}

/// Fermi-Dirac structure factor of the ideal gas; sign-flipped partner of [`s_be`].
pub fn s_fd<T: Real>(query: &SfQuery<T>, gas: &GasSpec<T>, particle: &ParticleSpec<T>) -> Result<T> {
    Statistics::FermiDirac.check_fugacity(gas.z)?;
    let k = kinematics(query, gas, particle)?;
    let b = gas.beta / (T::lit(2.0) * gas.m);
    let a = (-b * k.sigma * k.sigma).exp();
    let d = k.sigma - k.q;
    let c = (-b * d * d).exp();
    let u = -(gas.beta * k.energy).exp_m1();
    let y = gas.z * a / (T::one() + gas.z * c);
    let value = prefactor(k.q, gas) * log1p_quotient(u, y);
    finite_or_indeterminate(value, &k)
}

/// Maxwell-Boltzmann structure factor to first order in `alpha = m/M`.
pub fn s_mb_brownian<T: Real>(
    query: &SfQuery<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Result<T> {
    let k = kinematics(query, gas, particle)?;
    let value = prefactor(k.q, gas) * gas.z * brownian_exponential(k.q, k.energy, gas);
    finite_or_indeterminate(value, &k)
}

/// `e^{-beta q^2 / 8m} e^{-beta E / 2}`.
#[inline]
pub(crate) fn brownian_exponential<T: Real>(q: T, energy: T, gas: &GasSpec<T>) -> T {
    let gas_part = gas.beta * q * q / (T::lit(8.0) * gas.m);
    (-(gas_part + T::lit(0.5) * gas.beta * energy)).exp()
}

/// Structure factor for the statistics carried by `gas`.
pub fn structure_factor<T: Real>(
    query: &SfQuery<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
) -> Result<T> {
    match gas.statistics {
        Statistics::MaxwellBoltzmann => s_mb(query, gas, particle),
        Statistics::BoseEinstein => s_be(query, gas, particle),
        Statistics::FermiDirac => s_fd(query, gas, particle),
    }
}

/// Relative violation of `S(q, E) = e^{-beta E} S(q, -E)` at one point.
pub fn detailed_balance_residual<T: Real>(
    query: &SfQuery<T>,
    gas: &GasSpec<T>,
    particle: &ParticleSpec<T>,
    evaluator: fn(&SfQuery<T>, &GasSpec<T>, &ParticleSpec<T>) -> Result<T>,
) -> Result<T> {
    let forward = evaluator(query, gas, particle)?;
    let backward = evaluator(&query.reversed(), gas, particle)?;
    let energy = query.energy(particle);
    let predicted = (-gas.beta * energy).exp() * backward;
    require_finite("detailed balance", predicted)?;
    Ok(((forward - predicted) / forward).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gas(z: f64, statistics: Statistics) -> GasSpec<f64> {
        GasSpec::new(0.3, 1.7, 0.05, z, statistics).unwrap()
    }

    #[test]
    fn energy_transfer_examples() {
        let unit = ParticleSpec::new(1.0).unwrap();
        let zero = energy_transfer(&Vec3::zero(), &Vec3::new(3.0, -1.0, 2.0), &unit);
        assert_eq!(zero, 0.0);
        assert_eq!(energy_transfer(&Vec3::along_x(2.0), &Vec3::zero(), &unit), 2.0);
        let heavy = ParticleSpec::new(2.0).unwrap();
        assert_eq!(energy_transfer(&Vec3::along_x(1.0), &Vec3::along_x(3.0), &heavy), 1.75);
    }

    #[test]
    fn sigma_examples() {
        let g = GasSpec::new(1.0, 1.0, 1.0, 0.5, Statistics::MaxwellBoltzmann).unwrap();
        let equal_mass = ParticleSpec::new(1.0).unwrap();
        let q = Vec3::new(0.0, 1.3, 0.0);
        let p = Vec3::new(2.0, 0.0, -0.7);
        // alpha = 1 and p perpendicular to q
        assert_relative_eq!(sigma(&q, &p, &g, &equal_mass).unwrap(), 1.3, max_relative = 1e-15);

        let very_heavy = ParticleSpec::new(1e12).unwrap();
        assert_relative_eq!(
            sigma(&q, &Vec3::zero(), &g, &very_heavy).unwrap(),
            0.65,
            max_relative = 1e-11
        );

        assert_eq!(sigma(&Vec3::zero(), &p, &g, &equal_mass), Err(Error::DegenerateQ));
    }

    #[test]
    fn sigma_reflects_under_energy_reversal() {
        let g = gas(0.2, Statistics::MaxwellBoltzmann);
        let particle = ParticleSpec::new(2.5).unwrap();
        let query = SfQuery::new(Vec3::new(0.4, -0.2, 0.9), Vec3::new(1.0, 0.3, -2.0));
        let back = query.reversed();
        assert_relative_eq!(back.energy(&particle), -query.energy(&particle), max_relative = 1e-14);
        let s1 = sigma(&query.q, &query.p, &g, &particle).unwrap();
        let s2 = sigma(&back.q, &back.p, &g, &particle).unwrap();
        assert_relative_eq!(s2, query.q.norm() - s1, max_relative = 1e-13, epsilon = 1e-14);
    }

    #[test]
    fn fugacity_examples() {
        let m = 1.3;
        assert_relative_eq!(mb_fugacity(1.0, m / std::f64::consts::TAU, m), 1.0, max_relative = 1e-15);
        let z = mb_fugacity(0.02, 1.0, 1.0);
        assert_relative_eq!(mb_fugacity(0.01, 1.0, 1.0), z / 2.0, max_relative = 1e-15);
        assert_relative_eq!(mb_fugacity(0.01, 1.0, 1.0), 0.157_496_099_457_224_2, max_relative = 1e-12);
    }

    #[test]
    fn maxwell_boltzmann_constructor_matches_fugacity_formula() {
        let g = GasSpec::maxwell_boltzmann(0.4, 2.0, 0.3).unwrap();
        let expected = 0.3 * (std::f64::consts::TAU * 2.0 / 0.4_f64).powf(1.5);
        assert_relative_eq!(g.z, expected, max_relative = 1e-12);
    }

    #[test]
    fn bose_fugacity_bound_enforced() {
        let err = GasSpec::new(1.0, 1.0, 1.0, 1.0, Statistics::BoseEinstein).unwrap_err();
        assert!(matches!(err, Error::FugacityOutOfRange { .. }));
        assert!(GasSpec::new(1.0, 1.0, 1.0, 3.0, Statistics::FermiDirac).is_ok());
        assert!(GasSpec::new(1.0, 1.0, 1.0, 0.0, Statistics::MaxwellBoltzmann).is_err());
        assert!(GasSpec::new(-1.0, 1.0, 1.0, 0.1, Statistics::MaxwellBoltzmann).is_err());
    }

    #[test]
    fn mb_is_linear_in_fugacity() {
        let particle = ParticleSpec::new(4.0).unwrap();
        let query = SfQuery::new(Vec3::new(0.7, 0.1, 0.0), Vec3::new(-0.3, 1.1, 0.2));
        let a = s_mb(&query, &gas(0.1, Statistics::MaxwellBoltzmann), &particle).unwrap();
        let b = s_mb(&query, &gas(0.2, Statistics::MaxwellBoltzmann), &particle).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-15);
    }

    #[test]
    fn low_density_limit() {
        let particle = ParticleSpec::new(3.0).unwrap();
        let g = gas(1e-6, Statistics::MaxwellBoltzmann);
        for &(q, p) in &[(0.3, 0.0), (1.2, -0.8), (2.0, 1.5), (0.05, 4.0)] {
            let query = SfQuery::collinear(q, p);
            let mb = s_mb(&query, &g, &particle).unwrap();
            let be = s_be(&query, &g, &particle).unwrap();
            let fd = s_fd(&query, &g, &particle).unwrap();
            assert!((be / mb - 1.0).abs() < 1e-5);
            assert!((fd / mb - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn removable_singularity_is_continuous() {
        // p = -q/2 gives E = 0 exactly.
        let particle = ParticleSpec::new(1.0).unwrap();
        let g = gas(0.6, Statistics::BoseEinstein);
        let q = 0.8;
        let at = s_be(&SfQuery::collinear(q, -q / 2.0), &g, &particle).unwrap();
        for eps in [1e-4, 1e-7, 1e-9] {
            let near = s_be(&SfQuery::collinear(q, -q / 2.0 + eps), &g, &particle).unwrap();
            assert!((near / at - 1.0).abs() < 10.0 * eps, "eps {eps}: {near} vs {at}");
        }
        let gf = gas(2.0, Statistics::FermiDirac);
        let at = s_fd(&SfQuery::collinear(q, -q / 2.0), &gf, &particle).unwrap();
        let near = s_fd(&SfQuery::collinear(q, -q / 2.0 + 1e-8), &gf, &particle).unwrap();
        assert!((near / at - 1.0).abs() < 1e-7);
    }

    #[test]
    fn brownian_form_in_heavy_limit() {
        let g = gas(0.3, Statistics::MaxwellBoltzmann);
        let particle = ParticleSpec::new(1e14).unwrap();
        let q = 0.9;
        let value = s_mb_brownian(&SfQuery::collinear(q, 0.0), &g, &particle).unwrap();
        let expected = prefactor(q, &g) * g.z * (-g.beta * q * q / (8.0 * g.m)).exp();
        assert_relative_eq!(value, expected, max_relative = 1e-12);
    }

    #[test]
    fn brownian_form_is_first_order_accurate() {
        let particle = ParticleSpec::new(1.0).unwrap();
        for alpha in [1e-2f64, 1e-3, 1e-4] {
            let g = GasSpec::new(alpha, 1.0, 0.1, 0.2, Statistics::MaxwellBoltzmann).unwrap();
            // beta q.p / M = O(alpha): keep q and p of order sqrt(m / beta)
            let query = SfQuery::collinear(alpha.sqrt(), 0.5 * alpha.sqrt());
            let exact = s_mb(&query, &g, &particle).unwrap();
            let brownian = s_mb_brownian(&query, &g, &particle).unwrap();
            assert!((brownian / exact - 1.0).abs() <= alpha, "alpha {alpha}");
        }
    }

    #[test]
    fn degenerate_q_rejected_everywhere() {
        let particle = ParticleSpec::new(1.0).unwrap();
        let query = SfQuery::new(Vec3::zero(), Vec3::along_x(1.0));
        let g = gas(0.5, Statistics::BoseEinstein);
        assert_eq!(s_mb(&query, &g, &particle), Err(Error::DegenerateQ));
        assert_eq!(s_be(&query, &g, &particle), Err(Error::DegenerateQ));
        assert_eq!(s_fd(&query, &g, &particle), Err(Error::DegenerateQ));
        assert_eq!(s_mb_brownian(&query, &g, &particle), Err(Error::DegenerateQ));
    }

    #[test]
    fn statistics_round_trip_through_tag() {
        for s in Statistics::ALL {
            assert_eq!(s.tag().parse::<Statistics>().unwrap(), s);
        }
        assert!("anyon".parse::<Statistics>().is_err());
    }

    #[test]
    fn single_precision_agrees_with_double() {
        let g64 = gas(0.4, Statistics::BoseEinstein);
        let g32 = GasSpec::<f32>::new(0.3, 1.7, 0.05, 0.4, Statistics::BoseEinstein).unwrap();
        let p64 = ParticleSpec::new(2.0).unwrap();
        let p32 = ParticleSpec::new(2.0f32).unwrap();
        let a = s_be(&SfQuery::collinear(0.7, 0.2), &g64, &p64).unwrap();
        let b = s_be(&SfQuery::collinear(0.7f32, 0.2), &g32, &p32).unwrap();
        assert!((b as f64 / a - 1.0).abs() < 1e-5);
    }
}
