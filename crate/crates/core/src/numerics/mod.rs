//! Truncated Fock-space linear algebra, special functions, and quadrature.

pub mod expm;
pub mod fock;
pub mod grid;
pub mod ode;
pub mod quadrature;
pub mod special;

pub use expm::{matrix_exponential, series_exponential, SeriesSum, SERIES_MAX_TERMS};
pub use fock::{
    annihilator_matrix, creation_matrix, leading_block, momentum_matrix, number_matrix, position_matrix,
    FockOperator, FockVector, DEFAULT_DIM, TAIL_TOL,
};
pub use ode::{dopri5, OdeStats};
pub use grid::{hermite_family, hermite_grid_function, l2_inner, oscillator_basis, Grid, GridFunction};
pub use quadrature::{complex_plane_integral, QuadratureScheme, QuadratureSpec};
