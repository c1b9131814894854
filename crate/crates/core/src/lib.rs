//! Random trees grown by vertex splitting: weight models, growth engines,
//! limiting degree densities and their closed forms.

pub mod closed_forms;
pub mod experiment;
pub mod growth;
pub mod sampler;
pub mod solver;
pub mod twocolour;
pub mod weights;

pub use solver::{
    fixed_point_densities, residuals, solve_finite, DensitySolution, SolverError, SolverOptions,
    TailClosure,
};
pub use weights::{Family, Regime, SplittingWeights, WeightError, WeightModel};
