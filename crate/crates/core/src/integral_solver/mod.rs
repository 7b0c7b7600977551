//! Discretization and solution of the volume integral equation
//! `G = G⁰ + 𝒦 G` on a cubic voxel grid.

mod born;
mod direct;
mod grid;
mod near;
mod operator;
mod residual;
mod solve;

pub use born::{born_solve, BornOptions, SolveReport};
pub use direct::{direct_solve, Factorization, CONDITION_WARNING};
pub use grid::DomainGrid;
pub use operator::{sphere_integral_g, KernelOperator, SelfTerm, BORN_CAP, DENSE_CAP};
pub use residual::{helmholtz_residual, helmholtz_residual_at, helmholtz_residual_with, reciprocity_check};
pub use solve::{solve_g, solve_g1, solve_gamma, GreenField, GreenSolver, SolverConfig, SolverMethod, VectorField};
