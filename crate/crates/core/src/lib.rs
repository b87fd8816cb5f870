//! Sparse triangular solves with level scheduling on a hybrid ELL/CSR
//! ("HEC") matrix format, and the preconditioners built on them: block
//! ILU(0)/ILU(k)/ILUT and Restricted Additive Schwarz, driven by restarted
//! GMRES.
//!
//! The level-parallel solver runs on CPU threads: rows of one level are
//! split across workers and levels are separated by a barrier.

pub mod bench;
pub mod error;
pub mod formats;
pub mod generate;
pub mod ilu;
pub mod krylov;
pub mod level;
pub mod mm;
mod par;
pub mod precond;
pub mod trisolve;

pub use error::{Error, Result};
pub use formats::{CsrMatrix, EllMatrix, HecMatrix, WidthPolicy};
pub use ilu::{ilu0, ilu_k, ilut, IluFactors};
pub use krylov::{gmres, SolveReport, SolverConfig};
pub use level::{compute_levels, permute_vector, reorder_matrix, unpermute_vector, LevelSchedule};
pub use precond::{
    extend_overlap, partition_graph, BlockPreconditioner, Partition, PrecondConfig, PrecondKind, Preconditioner,
};
pub use trisolve::{serial_backward_solve, serial_forward_solve, LuSolver, PreparedTriangular, TriangleKind};
