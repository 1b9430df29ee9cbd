//! Invariant suite run by the `check` task on the configured gas and model.

use num_complex::Complex;
use qbm_core::evolution::{DensityMatrixGrid, KramersSolver, LindbladGenerator, LindbladOptions, UniformGrid, WignerGrid};
use qbm_core::{
    d_pp_closed, d_pp_quadrature, detailed_balance_residual, rel_diff, s_be, s_fd, s_mb, s_mb_brownian,
    transport_coefficients, DppOptions, GasSpec, ParticleSpec, Result, SfQuery, Statistics, Vec3,
};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub status: Status,
}

fn at_most(name: &'static str, value: f64, limit: f64) -> CheckResult {
    CheckResult {
        name,
        value,
        limit,
        status: if value <= limit { Status::Pass } else { Status::Fail },
    }
}

type Evaluator = fn(&SfQuery<f64>, &GasSpec<f64>, &ParticleSpec<f64>) -> Result<f64>;

/// Structure factors valid for the fugacity of `gas`.
fn evaluators(gas: &GasSpec<f64>) -> Vec<Evaluator> {
    let mut list: Vec<Evaluator> = vec![s_mb, s_fd, s_mb_brownian];
    if Statistics::BoseEinstein.check_fugacity(gas.z).is_ok() {
        list.push(s_be);
    }
    list
}

/// Sample queries on the thermal momentum scales of the gas and the particle.
fn sample_queries(cfg: &RunConfig) -> Vec<SfQuery<f64>> {
    let q_scale = (cfg.gas.m / cfg.gas.beta).sqrt();
    let p_scale = cfg.thermal_width();
    let mut out = Vec::new();
    for &a in &[0.3, 1.0, 2.0] {
        for &b in &[-1.5, 0.0, 0.7] {
            out.push(SfQuery::collinear(a * q_scale, b * p_scale));
            out.push(SfQuery::new(
                Vec3::new(a * q_scale, -0.4 * a * q_scale, 0.2 * q_scale),
                Vec3::new(0.3 * b * p_scale, b * p_scale, -0.5 * p_scale),
            ));
        }
    }
    out
}

/// Runs every invariant. Numerical failures inside a check are propagated.
pub fn run_checks(cfg: &RunConfig) -> Result<Vec<CheckResult>> {
    let tol = &cfg.tolerances;
    let gas = &cfg.gas;
    let particle = &cfg.particle;
    let queries = sample_queries(cfg);
    let mut results = Vec::new();

    let mut smallest = f64::INFINITY;
    let mut balance = 0.0f64;
    for eval in evaluators(gas) {
        for query in &queries {
            smallest = smallest.min(eval(query, gas, particle)?);
            balance = balance.max(detailed_balance_residual(query, gas, particle, eval)?);
        }
    }
    results.push(CheckResult {
        name: "structure_factor_positive",
        value: smallest,
        limit: 0.0,
        status: if smallest > 0.0 { Status::Pass } else { Status::Fail },
    });
    results.push(at_most("detailed_balance", balance, tol.detailed_balance));

    let dilute = gas.with_fugacity(1e-6)?;
    let mut spread = 0.0f64;
    for query in &queries {
        let mb = s_mb(query, &dilute, particle)?;
        spread = spread
            .max(rel_diff(s_be(query, &dilute, particle)?, mb))
            .max(rel_diff(s_fd(query, &dilute, particle)?, mb));
    }
    results.push(at_most("low_density_limit", spread, tol.low_density));

    let mut opts = DppOptions::default();
    opts.quad.rel_tol = tol.quad_rel;
    let d_pp = d_pp_quadrature(&cfg.scattering, gas, particle, &opts)?;
    match d_pp_closed(&cfg.scattering, gas, particle) {
        Some(closed) => results.push(at_most("dpp_closed_form", rel_diff(d_pp, closed?), tol.closed_form)),
        None => results.push(CheckResult {
            name: "dpp_closed_form",
            value: f64::NAN,
            limit: tol.closed_form,
            status: Status::Skip,
        }),
    }

    let coeffs = transport_coefficients(d_pp, gas, particle)?;
    let target = particle.mass / gas.beta;
    let ulps = (coeffs.diffusion_friction_ratio().to_bits() as i64 - target.to_bits() as i64).unsigned_abs();
    results.push(at_most("fluctuation_dissipation_ulps", ulps as f64, 1.0));

    results.extend(lindblad_checks(cfg)?);
    results.extend(kramers_checks(cfg, coeffs)?);
    Ok(results)
}

fn lindblad_checks(cfg: &RunConfig) -> Result<Vec<CheckResult>> {
    let width = cfg.thermal_width();
    let n = 24;
    let grid = UniformGrid::symmetric(n, 12.0 * width / n as f64)?;
    let generator = LindbladGenerator::new(&cfg.gas, &cfg.particle, &cfg.scattering, grid)?;
    let amps: Vec<Complex<f64>> = grid
        .points()
        .map(|p| {
            let u = (p - 0.5 * width) / width;
            let phase = 0.7 * p / width;
            Complex::from_polar((-u * u).exp(), phase)
        })
        .collect();
    let state = DensityMatrixGrid::pure(grid, &amps)?;
    let d = generator.apply(&state.rho)?;
    let scale = d.max_abs().max(f64::MIN_POSITIVE);
    let mut out = vec![
        at_most("lindblad_traceless", d.trace().norm() / scale, 1e-12),
        at_most("lindblad_hermitian", d.hermiticity_defect(), 0.0),
    ];
    let dt = 0.4 / generator.max_rate();
    let opts = LindbladOptions {
        sample_every: 5,
        eigen_every: 1,
    };
    let (_, report) = generator.evolve(&state, 40.0 * dt, dt, &opts)?;
    out.push(at_most("lindblad_trace_drift", report.max_trace_drift(), cfg.tolerances.trace));
    let min_eig = report.min_recorded_eigenvalue().unwrap_or(f64::NAN);
    out.push(CheckResult {
        name: "lindblad_positivity",
        value: min_eig,
        limit: -cfg.tolerances.trace,
        status: if min_eig >= -cfg.tolerances.trace { Status::Pass } else { Status::Fail },
    });
    Ok(out)
}

fn kramers_checks(cfg: &RunConfig, coeffs: qbm_core::TransportCoefficients<f64>) -> Result<Vec<CheckResult>> {
    let width = cfg.thermal_width();
    let x = UniformGrid::cell_centred(-10.0, 10.0, 16)?;
    let p = UniformGrid::cell_centred(-8.0 * width, 8.0 * width, 96)?;
    let mut dt = 0.5 * p.step * p.step / coeffs.d_pp;
    if coeffs.d_xx > 0.0 {
        dt = dt.min(0.45 * x.step * x.step / coeffs.d_xx);
    }
    let solver = KramersSolver::new(x, p, coeffs, cfg.particle, dt)?;
    let w0 = WignerGrid::gaussian(x, p, 0.0, 1.0, width, 0.25 * width * width)?;
    let (end, report) = solver.evolve(&w0, 8.0 / coeffs.eta, 64)?;
    let var = end.moments().var_p;
    Ok(vec![
        at_most("kramers_mass_drift", report.max_trace_drift(), cfg.tolerances.trace),
        at_most("kramers_thermal_variance", (var / (width * width) - 1.0).abs(), 1e-3),
    ])
}
