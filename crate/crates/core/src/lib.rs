//! Meromorphic 3D-index state integrals and 3D-index lattice sums.
//!
//! * [`qseries`]: exact truncated q-series and the tetrahedron index.
//! * [`specialfn`]: complex evaluation of `(x;q)_∞`, `G_q`, `θ_q`, `ψ`, `ψ⁰`, `φ_q`.
//! * [`nzdata`]: gluing data, quad systems, angle structures, compiled integrands.
//! * [`integrator`]: torus contours, quadrature, pinch detection, pentagon integrals.
//! * [`index3d`]: lattice sums for the index and their Fourier cross-check.
//! * [`fixtures`]: builtin triangulations and hand-derived integrands.

pub mod error;
pub mod fixtures;
pub mod index3d;
pub mod integrator;
pub mod linalg;
pub mod nzdata;
pub mod qseries;
pub mod report;
pub mod specialfn;

pub use error::{Error, Result};

pub use nzdata::{BalancedIntegrand, GluingData, QuadSystem};
pub use qseries::HalfExpSeries;
pub use specialfn::QContext;
