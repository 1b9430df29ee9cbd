//! Task dispatch.

use std::io::{self, Write};

use num_complex::Complex;
use qbm_core::evolution::{
    write_density_snapshot, write_wigner_snapshot, DensityMatrixGrid, EvolutionReport, KramersSolver,
    LindbladGenerator, LindbladOptions, UniformGrid, WignerGrid,
};
use qbm_core::{
    d_pp_closed, d_pp_quadrature, rel_diff, s_be, s_fd, s_mb, s_mb_brownian, transport_coefficients, DppOptions,
    SfQuery, Statistics, TransportCoefficients,
};

use crate::check::{run_checks, Status};
use crate::config::{DppMethod, RunConfig, TaskKind};
use crate::table::{format_number, write_header, write_metadata, write_row};
use crate::RunError;

/// Where a run writes its artifacts.
pub struct Sinks<'a> {
    pub main: &'a mut dyn Write,
    /// Snapshot stream for the evolve tasks; `None` skips snapshots.
    pub snapshots: Option<&'a mut dyn Write>,
}

/// Result of a run that completed without a numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub failed_invariants: usize,
}

/// Metadata written at the top of every artifact.
pub fn metadata(cfg: &RunConfig, config_hash: &str) -> Vec<(String, String)> {
    let mut meta = vec![
        ("qbm".to_string(), crate::VERSION.to_string()),
        ("config_sha256".to_string(), config_hash.to_string()),
        ("task".to_string(), cfg.task.name().to_string()),
    ];
    if let Some(note) = &cfg.units_note {
        meta.push(("units".to_string(), note.clone()));
    }
    meta
}

pub fn run(cfg: &RunConfig, config_hash: &str, sinks: Sinks<'_>) -> Result<Outcome, RunError> {
    let meta = metadata(cfg, config_hash);
    log::info!("running `{}`", cfg.task);
    match cfg.task {
        TaskKind::Sfactor => sfactor(cfg, &meta, sinks.main),
        TaskKind::Dpp => dpp(cfg, &meta, sinks.main),
        TaskKind::EvolveLindblad => evolve_lindblad(cfg, &meta, sinks),
        TaskKind::EvolveKramers => evolve_kramers(cfg, &meta, sinks),
        TaskKind::Check => check(cfg, &meta, sinks.main),
    }
}

const SUCCESS: Outcome = Outcome { failed_invariants: 0 };

fn sfactor(cfg: &RunConfig, meta: &[(String, String)], out: &mut dyn Write) -> Result<Outcome, RunError> {
    let base = cfg.gas;
    let be_gas = base.with_statistics(Statistics::BoseEinstein).ok();
    if be_gas.is_none() {
        log::warn!("z = {} is outside the Bose-Einstein range; S_be is written as nan", base.z);
    }
    let fd_gas = base.with_statistics(Statistics::FermiDirac)?;
    let mb_gas = base.with_statistics(Statistics::MaxwellBoltzmann)?;
    let particle = &cfg.particle;

    let mut meta = meta.to_vec();
    meta.push(("scan_p".into(), format_number(cfg.scan.p)));
    write_metadata(out, &meta)?;
    write_header(out, &["q", "E", "S_mb", "S_be", "S_fd", "S_mb_inf"])?;
    for q in cfg.scan.q_values() {
        let query = SfQuery::collinear(q, cfg.scan.p);
        let be = match &be_gas {
            Some(g) => s_be(&query, g, particle)?,
            None => f64::NAN,
        };
        write_row(
            out,
            &[
                q,
                query.energy(particle),
                s_mb(&query, &mb_gas, particle)?,
                be,
                s_fd(&query, &fd_gas, particle)?,
                s_mb_brownian(&query, &mb_gas, particle)?,
            ],
        )?;
    }
    Ok(SUCCESS)
}

fn dpp_options(cfg: &RunConfig) -> DppOptions<f64> {
    let mut opts = DppOptions {
        include_alpha_correction: cfg.alpha_correction,
        ..DppOptions::default()
    };
    opts.quad.rel_tol = cfg.tolerances.quad_rel;
    opts
}

/// `D_pp` by the configured method and its closed-form value where one exists.
fn diffusion(cfg: &RunConfig) -> Result<(f64, Option<f64>), RunError> {
    let closed = if cfg.alpha_correction {
        None
    } else {
        d_pp_closed(&cfg.scattering, &cfg.gas, &cfg.particle).transpose()?
    };
    let value = match cfg.dpp_method {
        DppMethod::Quadrature => d_pp_quadrature(&cfg.scattering, &cfg.gas, &cfg.particle, &dpp_options(cfg))?,
        DppMethod::Closed => closed.ok_or_else(|| {
            RunError::Unsupported(format!(
                "no closed form for the `{}` model{}",
                cfg.scattering.name(),
                if cfg.alpha_correction { " with the alpha correction" } else { "" }
            ))
        })?,
    };
    Ok((value, closed))
}

fn coefficients(cfg: &RunConfig) -> Result<TransportCoefficients<f64>, RunError> {
    let (d_pp, _) = diffusion(cfg)?;
    Ok(transport_coefficients(d_pp, &cfg.gas, &cfg.particle)?)
}

fn dpp(cfg: &RunConfig, meta: &[(String, String)], out: &mut dyn Write) -> Result<Outcome, RunError> {
    let (d_pp, closed) = diffusion(cfg)?;
    let c = transport_coefficients(d_pp, &cfg.gas, &cfg.particle)?;
    let rel_err = closed.map_or(f64::NAN, |closed| rel_diff(d_pp, closed));
    write_metadata(out, meta)?;
    write_header(out, &["D_pp", "eta", "D_xx", "kappa", "method", "rel_err_vs_closed_form"])?;
    writeln!(
        out,
        "{} {} {} {} {} {}",
        format_number(c.d_pp),
        format_number(c.eta),
        format_number(c.d_xx),
        format_number(c.kappa),
        cfg.dpp_method.name(),
        format_number(rel_err)
    )?;
    Ok(SUCCESS)
}

/// Splits `[0, t_final]` into `segments` equal pieces.
fn segment_ends(t_final: f64, segments: usize) -> Vec<f64> {
    (1..=segments)
        .map(|k| if k == segments { t_final } else { t_final * k as f64 / segments as f64 })
        .collect()
}

/// Appends `part` to `acc`, shifting its times by `offset` and dropping its
/// first sample (the end of the previous segment).
fn append_report(acc: &mut EvolutionReport<f64>, part: EvolutionReport<f64>, offset: f64) {
    if acc.is_empty() {
        *acc = part;
        return;
    }
    for i in 1..part.len() {
        acc.times.push(part.times[i] + offset);
        acc.trace.push(part.trace[i]);
        acc.min_eigenvalue.push(part.min_eigenvalue[i]);
        acc.mean_x.push(part.mean_x[i]);
        acc.mean_p.push(part.mean_p[i]);
        acc.var_x.push(part.var_x[i]);
        acc.var_p.push(part.var_p[i]);
        acc.distance.push(part.distance[i]);
    }
}

fn lindblad_grid(cfg: &RunConfig) -> Result<UniformGrid<f64>, RunError> {
    let n = cfg.lindblad.points;
    let dp = cfg
        .lindblad
        .dp
        .unwrap_or_else(|| 16.0 * cfg.thermal_width() / n as f64);
    Ok(UniformGrid::symmetric(n, dp)?)
}

fn initial_sigma_p(cfg: &RunConfig) -> f64 {
    cfg.initial.sigma_p.unwrap_or(0.5 * cfg.thermal_width())
}

fn evolve_lindblad(cfg: &RunConfig, meta: &[(String, String)], sinks: Sinks<'_>) -> Result<Outcome, RunError> {
    let grid = lindblad_grid(cfg)?;
    let generator = LindbladGenerator::new(&cfg.gas, &cfg.particle, &cfg.scattering, grid)?;
    let sigma = initial_sigma_p(cfg);
    let (p0, x0) = (cfg.initial.p0, cfg.initial.x0);
    let amps: Vec<Complex<f64>> = grid
        .points()
        .map(|p| {
            let u = (p - p0) / sigma;
            Complex::from_polar((-0.25 * u * u).exp(), -p * x0)
        })
        .collect();
    let mut state = DensityMatrixGrid::pure(grid, &amps)?;
    let dt = cfg.evolve.dt.unwrap_or(0.4 / generator.max_rate());
    let t_final = cfg.evolve.t_final.unwrap_or(0.0);
    let opts = LindbladOptions {
        sample_every: cfg.lindblad.sample_every,
        eigen_every: cfg.lindblad.eigen_every,
    };
    log::info!(
        "lindblad: {} nodes, dp = {:e}, {} jump shifts, dt = {:e}",
        grid.len,
        grid.step,
        generator.jumps().len(),
        dt
    );

    let mut meta = meta.to_vec();
    meta.push(("dt_max".into(), format_number(dt)));
    let mut snapshots = sinks.snapshots;
    if let Some(s) = snapshots.as_deref_mut() {
        write_metadata(s, &meta)?;
        write_header(s, &["p", "rho_pp"])?;
        write_density_snapshot(s, 0.0, &state)?;
    }
    let mut report = EvolutionReport::default();
    let mut t = 0.0;
    for end in segment_ends(t_final, cfg.evolve.snapshots - 1) {
        let (next, part) = generator.evolve(&state, end - t, dt, &opts)?;
        append_report(&mut report, part, t);
        state = next;
        t = end;
        if let Some(s) = snapshots.as_deref_mut() {
            write_density_snapshot(s, t, &state)?;
        }
    }
    log::info!(
        "lindblad: trace drift {:e}, final distance {:e}",
        report.max_trace_drift(),
        report.final_distance().unwrap_or(f64::NAN)
    );
    write_metadata(sinks.main, &meta)?;
    report.write_table(sinks.main)?;
    Ok(SUCCESS)
}

/// Largest step inside the Kramers stability region, at most `requested`.
fn kramers_step(
    x: &UniformGrid<f64>,
    p: &UniformGrid<f64>,
    coeffs: &TransportCoefficients<f64>,
    requested: Option<f64>,
) -> f64 {
    if let Some(dt) = requested {
        return dt;
    }
    let mut dt = 0.5 * p.step * p.step / coeffs.d_pp;
    if coeffs.d_xx > 0.0 {
        dt = dt.min(0.45 * x.step * x.step / coeffs.d_xx);
    }
    dt
}

fn evolve_kramers(cfg: &RunConfig, meta: &[(String, String)], sinks: Sinks<'_>) -> Result<Outcome, RunError> {
    let coeffs = coefficients(cfg)?;
    let k = &cfg.kramers;
    let p_half = k.p_half_width.unwrap_or(8.0 * cfg.thermal_width());
    let x = UniformGrid::cell_centred(-k.x_half_width, k.x_half_width, k.x_points)?;
    let p = UniformGrid::cell_centred(-p_half, p_half, k.p_points)?;
    let t_final = cfg.evolve.t_final.unwrap_or(0.0);
    let segments = cfg.evolve.snapshots - 1;
    // whole number of steps per segment so snapshots land on their times
    let dt_max = kramers_step(&x, &p, &coeffs, cfg.evolve.dt);
    let seg_len = t_final / segments as f64;
    let steps = (seg_len / dt_max).ceil().max(1.0);
    let dt = seg_len / steps;
    let solver = KramersSolver::new(x, p, coeffs, cfg.particle, dt)?;
    let sigma_p = initial_sigma_p(cfg);
    let mut state = WignerGrid::gaussian(
        x,
        p,
        cfg.initial.x0,
        cfg.initial.sigma_x * cfg.initial.sigma_x,
        cfg.initial.p0,
        sigma_p * sigma_p,
    )?;
    log::info!(
        "kramers: {}x{} grid, D_pp = {:e}, eta = {:e}, dt = {:e}",
        x.len,
        p.len,
        coeffs.d_pp,
        coeffs.eta,
        dt
    );

    let mut meta = meta.to_vec();
    meta.push(("dt".into(), format_number(dt)));
    let mut snapshots = sinks.snapshots;
    if let Some(s) = snapshots.as_deref_mut() {
        write_metadata(s, &meta)?;
        write_header(s, &["x", "p", "W"])?;
        write_wigner_snapshot(s, 0.0, &state)?;
    }
    let mut report = EvolutionReport::default();
    let mut t = 0.0;
    for end in segment_ends(t_final, segments) {
        let (next, part) = solver.evolve(&state, end - t, k.sample_every)?;
        append_report(&mut report, part, t);
        state = next;
        t = end;
        if let Some(s) = snapshots.as_deref_mut() {
            write_wigner_snapshot(s, t, &state)?;
        }
    }
    log::info!(
        "kramers: mass drift {:e}, final distance {:e}",
        report.max_trace_drift(),
        report.final_distance().unwrap_or(f64::NAN)
    );
    write_metadata(sinks.main, &meta)?;
    report.write_table(sinks.main)?;
    Ok(SUCCESS)
}

fn check(cfg: &RunConfig, meta: &[(String, String)], out: &mut dyn Write) -> Result<Outcome, RunError> {
    let results = run_checks(cfg)?;
    write_metadata(out, meta)?;
    write_header(out, &["check", "value", "limit", "result"])?;
    let mut failed = 0;
    for r in &results {
        if r.status == Status::Fail {
            failed += 1;
            log::warn!("invariant `{}` failed: {:e} against {:e}", r.name, r.value, r.limit);
        }
        writeln!(
            out,
            "{} {} {} {}",
            r.name,
            format_number(r.value),
            format_number(r.limit),
            r.status.name()
        )?;
    }
    log::info!("check: {} of {} invariants failed", failed, results.len());
    Ok(Outcome {
        failed_invariants: failed,
    })
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Output(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_end_exactly() {
        let ends = segment_ends(1.0, 3);
        assert_eq!(ends.len(), 3);
        assert_eq!(ends[2], 1.0);
        assert!((ends[0] - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn appended_reports_skip_the_seam() {
        let mut a = EvolutionReport::default();
        let m = Default::default();
        a.push(0.0, 1.0, None, m, 0.0);
        a.push(1.0, 1.0, None, m, 0.0);
        let mut b = EvolutionReport::default();
        b.push(0.0, 1.0, None, m, 0.0);
        b.push(0.5, 1.0, None, m, 0.0);
        append_report(&mut a, b, 1.0);
        assert_eq!(a.times, vec![0.0, 1.0, 1.5]);
    }
}
