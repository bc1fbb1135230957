//! Periodic grids, continuum-normalized transforms and frequency-side
//! operators shared by every other module.

mod fft;
pub mod field;
pub mod grid;
pub mod projectors;
pub mod window;

pub use field::{derivative, forward_transform, inverse_transform, spatial_derivative, Field, SpectralField};
pub use grid::GridSpec;
pub use projectors::{
    airy_propagator, airy_propagator_spectral, littlewood_paley, riesz_bilinear, riesz_potential,
    unit_cube_project, unit_cube_project_with,
};
pub use window::Window;

pub(crate) use fft::{forward as fft_forward, inverse as fft_inverse};
