//! Time series recorded during an evolution and snapshot writers.

use std::io::{self, Write};

use crate::evolution::grid::DensityMatrixGrid;
use crate::evolution::kramers::WignerGrid;
use crate::Real;

/// First and second moments of a state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments<T> {
    pub mean_x: T,
    pub mean_p: T,
    pub var_x: T,
    pub var_p: T,
}

/// Diagnostics sampled along a trajectory. All vectors have one entry per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport<T> {
    pub times: Vec<T>,
    /// Trace (density-matrix engine) or total mass (Wigner engine).
    pub trace: Vec<T>,
    /// Smallest eigenvalue of the state, where it was computed.
    pub min_eigenvalue: Vec<Option<T>>,
    pub mean_x: Vec<T>,
    pub mean_p: Vec<T>,
    pub var_x: Vec<T>,
    pub var_p: Vec<T>,
    /// L1 distance of the momentum distribution from the thermal one.
    pub distance: Vec<T>,
}

impl<T> Default for EvolutionReport<T> {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            trace: Vec::new(),
            min_eigenvalue: Vec::new(),
            mean_x: Vec::new(),
            mean_p: Vec::new(),
            var_x: Vec::new(),
            var_p: Vec::new(),
            distance: Vec::new(),
        }
    }
}

impl<T: Real> EvolutionReport<T> {
    pub fn push(&mut self, time: T, trace: T, min_eigenvalue: Option<T>, moments: Moments<T>, distance: T) {
        self.times.push(time);
        self.trace.push(trace);
        self.min_eigenvalue.push(min_eigenvalue);
        self.mean_x.push(moments.mean_x);
        self.mean_p.push(moments.mean_p);
        self.var_x.push(moments.var_x);
        self.var_p.push(moments.var_p);
        self.distance.push(distance);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest deviation of the trace from its initial value.
    pub fn max_trace_drift(&self) -> T {
        let Some(&first) = self.trace.first() else {
            return T::zero();
        };
        self.trace.iter().map(|&t| (t - first).abs()).fold(T::zero(), T::max)
    }

    /// Smallest recorded eigenvalue, if any were computed.
    pub fn min_recorded_eigenvalue(&self) -> Option<T> {
        self.min_eigenvalue.iter().flatten().copied().reduce(T::min)
    }

    pub fn final_distance(&self) -> Option<T> {
        self.distance.last().copied()
    }

    /// Space-separated table with a header comment line.
    pub fn write_table<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# t trace min_eigenvalue mean_x mean_p var_x var_p distance")?;
        for i in 0..self.len() {
            let eig = match self.min_eigenvalue[i] {
                Some(v) => fmt(v),
                None => "nan".to_string(),
            };
            writeln!(
                out,
                "{} {} {} {} {} {} {} {}",
                fmt(self.times[i]),
                fmt(self.trace[i]),
                eig,
                fmt(self.mean_x[i]),
                fmt(self.mean_p[i]),
                fmt(self.var_x[i]),
                fmt(self.var_p[i]),
                fmt(self.distance[i])
            )?;
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt<T: Real>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

/// Writes `p Re(rho_pp)` rows preceded by `# t=<time>`.
pub fn write_density_snapshot<T: Real, W: Write + ?Sized>(out: &mut W, time: T, state: &DensityMatrixGrid<T>) -> io::Result<()> {
    writeln!(out, "# t={}", fmt(time))?;
    for (p, w) in state.grid.points().zip(state.populations()) {
        writeln!(out, "{} {}", fmt(p), fmt(w))?;
    }
    Ok(())
}

/// Writes `x p W` rows preceded by `# t=<time>`.
pub fn write_wigner_snapshot<T: Real, W: Write + ?Sized>(out: &mut W, time: T, state: &WignerGrid<T>) -> io::Result<()> {
    writeln!(out, "# t={}", fmt(time))?;
    for ix in 0..state.x.len {
        let x = state.x.point(ix);
        for ip in 0..state.p.len {
            writeln!(out, "{} {} {}", fmt(x), fmt(state.p.point(ip)), fmt(state.get(ix, ip)))?;
        }
    }
    Ok(())
}
