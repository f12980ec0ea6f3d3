//! Fractional powers of elliptic operators on triangulated surfaces via
//! Padé-accelerated operator products.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the bottom fix the scalar to `f64`.

// `!(x > 0)` is how NaN gets rejected together with the bad values, and
// index loops mirror the formulas they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod fem;
pub mod jacobi;
pub mod mesh;
pub mod oracle;
pub mod pade;
pub mod scalar;
pub mod scheme;
pub mod solver;
pub mod sparse;

pub use fem::{AssembledOperator, CoefficientField, FemError, RhsMethod};
pub use mesh::{MeshError, ProblemMode, SurfaceMesh};
pub use oracle::{OracleError, SpectralDecomposition};
pub use pade::{PadeApproximant, PadeError};
pub use scalar::Real;
pub use scheme::{SchemeError, TimeGrid};
pub use solver::{FracSolveResult, LambdaMax, SolverConfig, SolverError};
pub use sparse::{CgConfig, CgError, CsrMatrix};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Pade = PadeApproximant<f64>;
pub type Grid = TimeGrid<f64>;
pub type Mesh = SurfaceMesh<f64>;
pub type Operator = AssembledOperator<f64>;
pub type Config = SolverConfig<f64>;
