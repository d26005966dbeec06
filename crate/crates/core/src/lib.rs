//! Numerical laboratory for the mass-critical fourth-order nonlinear
//! Schrödinger equation i∂ₜu + Δ²u + λ|u|^{8/n}u = 0.
//!
//! The crate provides two discretizations (a periodic spectral box for
//! n ≤ 3 and a radial half-line for general n), an exact linear propagator
//! e^{itΔ²}, a Strang-split time integrator with adaptive stepping, a
//! Petviashvili ground-state solver, and the diagnostic functionals used to
//! audit conservation laws, dispersive decay rates, sharp functional
//! inequalities and blow-up rate estimates at desk scale.
//!
//! All numerics are generic over the scalar type through [`scalar::Scalar`]
//! (`f32` or `f64`); concrete `f64` aliases are exported at the crate root.

pub mod conserved;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod field;
pub mod fit;
pub mod grid;
pub mod ground_state;
pub mod lp;
pub mod propagator;
pub mod radial;
pub mod random;
pub mod scalar;
pub mod tridiag;

pub use error::{Error, Result};
pub use scalar::{real, Scalar};

/// Complex sample type of a field over scalar `T`.
pub type C<T> = num_complex::Complex<T>;

/// Default-precision aliases.
pub type SpectralGrid64 = grid::SpectralGrid<f64>;
pub type RadialGrid64 = radial::RadialGrid<f64>;
pub type Field64 = field::ComplexField<f64>;
pub type GroundState64 = ground_state::GroundState<f64>;
pub type TrajectoryRecord64 = evolution::TrajectoryRecord<f64>;

/// Single-precision aliases for reduced-precision experiments.
pub type SpectralGrid32 = grid::SpectralGrid<f32>;
pub type Field32 = field::ComplexField<f32>;
