//! The two-layer minimisation behind the decay rate: the inner quadratic
//! program, the explicit pieces of `g(t, s)`, the outer minimiser (closed
//! form and numeric oracle) and the local expansion at the minimiser.

pub mod closed_form;
pub mod nelder_mead;
pub mod numeric;
pub mod pieces;
pub mod qp;
pub mod taylor;

pub use closed_form::{minimize_closed_form, OuterSolution, Region};
pub use numeric::{minimize_numeric, NumericOptions};
pub use pieces::{g_eval, g_pieces, GPieces};
pub use qp::{inner_qp, ActiveSet, QpSolution};
pub use taylor::{finite_difference_coeffs, taylor_coefficients, FdOptions, TaylorCase, TaylorCoeffs};
