//! Arithmetic in F₀ = Q_p, in F = F₀(π) with π² = p, and in the quaternion division algebra D.

pub mod arith;
pub mod quad;
pub mod quat;
pub mod scalar;

pub use arith::{eta_minus_one, legendre, smallest_nonresidue, Val};
pub use quad::{solve_norm_f, QuadElt, QuadWire};
pub use quat::{QuatElt, QuatWire};
pub use scalar::{hensel_sqrt, PadicScalar, ScalarWire, DEFAULT_PRECISION};
