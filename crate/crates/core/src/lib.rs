//! Quadratic operator pencils `T(λ) = λ² + λD + A₀` of finite-dimensional damped
//! systems.
//!
//! The crate builds the first-order linearization and its spectrum, extracts the
//! real eigenvalues lying to the right of `α` through inertia counting and the
//! Rayleigh functional `p₊`, and ships executable checks of the variational,
//! interlacing, resolvent and energy-decay properties of such pencils. The
//! [`beam`] module discretizes a pinned Euler–Bernoulli beam with distributed
//! damping into such a pencil.

pub mod beam;
pub mod error;
pub mod evolution;
pub mod interlacing;
pub mod linalg;
pub mod linearization;
pub mod optimize;
pub mod pencil;
pub mod random;
pub mod variational;

pub use error::{PencilError, Result};
pub use linearization::{LinearizedSystem, SpectralCluster, SpectrumResult};
pub use pencil::{
    AlphaEstimate, AlphaSearch, Definiteness, DstarCertificate, PencilScalars, QuadraticPencil,
    RayleighPair, SymmetricOperator,
};
pub use variational::{IntervalDelta, VariationalResult};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
