//! Spectral toolkit for the complex modified KdV equation
//! `u_t + u_xxx +- 6 |u|^2 u_x = 0` on a large periodic box.

pub mod corpus;
pub mod error;
pub mod illposed;
pub mod norms;
pub mod probe;
pub mod quadrature;
pub mod solitons;
pub mod solver;
pub mod spacetime;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/grids.md")]
    struct Grids;
    #[doc = include_str!("../../../book/src/norms.md")]
    struct Norms;
    #[doc = include_str!("../../../book/src/solitons.md")]
    struct Solitons;
    #[doc = include_str!("../../../book/src/solver.md")]
    struct Solver;
    #[doc = include_str!("../../../book/src/illposedness.md")]
    struct Illposedness;
    #[doc = include_str!("../../../book/src/probes.md")]
    struct Probes;
}
