//! Laplacian spectra of finite metric graphs.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`graph`]: multigraphs with edge lengths, Dirichlet vertex sets, surgery
//!   operations (subdivision, contraction, vertex splitting, pendant deletion)
//!   and generators for the standard families.
//! * [`spectral`]: eigenvalues and eigenfunctions under Kirchhoff (Neumann)
//!   and Dirichlet vertex conditions. The secular matrix is authoritative; a
//!   linear finite-element discretization serves as an independent counting
//!   oracle.
//! * [`bounds`]: closed-form eigenvalue bounds in terms of length, Betti
//!   number and pendant count, and seeded verification suites.
//! * [`optimize`]: Nelder–Mead search over metrics of fixed total length for
//!   the extremal constants `sup λ_j·L²` and `inf λ_j·L²`.

pub mod bounds;
pub mod graph;
pub mod optimize;
pub mod output;
pub mod spectral;

pub use bounds::{bound_value, check_bound, BoundKind, BoundParams, BoundReport, Comparison};
pub use graph::{BoundarySpec, Edge, EdgeEnd, End, Family, GraphError, MetricGraph, SurgeryResult};
pub use optimize::{estimate_extremal, Mode, OptimizerConfig, OptimizerResult};
pub use spectral::{
    compute_spectrum, eigenfunctions, fem_spectrum, residual, EigenfunctionBasis, Eigenvalue,
    SpectralError, Spectrum,
};
