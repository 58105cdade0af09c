//! Substrate shared by every other module: jets for exact x-derivatives,
//! oracle traits, grids, determinants, quadrature and stencils.

pub mod det;
pub mod field;
pub mod grid;
pub mod jet;
pub mod quad;
pub mod residual;
pub mod stencil;

pub use det::{det, det_jets, wronskian, wronskian_jet, wronskian_scale};
pub use field::{
    FieldSum, FreePotential, HarmonicPotential, JetField, PotentialField, SolutionOracle,
    Superposition, ZeroField, ZeroSolution, ANALYTIC_ORDER_CAP, I,
};
pub use grid::{linspace, Interval, SpaceTimeGrid, MIN_STENCIL_NODES};
pub use jet::Jet;
pub use quad::{integrate, quadrature, QuadratureOptions};
pub use stencil::{central_first, central_second, five_point_first, grid_first_derivative};
pub use residual::{fd_schrodinger_residual, residual_convergence, ConvergenceCheck, Residual};
