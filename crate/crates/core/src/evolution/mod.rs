//! Dynamics of the test particle: the momentum-grid Lindblad engine, the
//! phase-space Kramers engine and the checks that tie them together.

pub mod grid;
pub mod kramers;
pub mod lindblad;
pub mod moyal;
pub mod report;

pub use grid::{
    maxwell_weights, stationary_state, CMatrix, DensityMatrixGrid, PositionOperator, UniformGrid,
};
pub use kramers::{kramers_rhs, ou_marginal_exact, KramersSolver, WignerGrid};
pub use lindblad::{projected_weight, JumpWeight, LindbladGenerator, LindbladOptions};
pub use moyal::kramers_moyal_residual;
pub use report::{write_density_snapshot, write_wigner_snapshot, EvolutionReport, Moments};
