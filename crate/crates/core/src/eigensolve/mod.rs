//! Symmetric eigenvalue kernels: Sturm counting, bisection and inverse
//! iteration for real tridiagonal matrices, tridiagonal-diagonal pencils and
//! Hermitian 2x2-block tridiagonal matrices.

mod block;
mod pencil;
mod tridiag;

pub use block::{block_adjoint, block_mul, Block, HermitianBlockTridiag};
pub use pencil::{gen_negative_eig_value, gen_negative_eigs, pencil_vectors, GenEigProblem};
pub use tridiag::{
    eig_interval, inverse_iteration, nearest_eigenpair, sturm_count, SymTridiag, MAX_INVERSE_ITERATIONS,
    PIVOT_FLOOR,
};

/// Default absolute eigenvalue tolerance.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;
/// Default relative residual tolerance.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
