//! Reduced Lie-algebra spaces, their invariants, sections, Cayley transforms
//! and orbit representatives.

pub mod bpoint;
pub mod mat;
pub mod reps;
pub mod sred;
pub mod u0;
pub mod u1;

pub use bpoint::{make_bpoint_rs1, BPoint, BPointWire, Side};
pub use mat::{Gl2, Mat3};
pub use reps::{classify_degenerate, n_beta, n_mu, orbit_reps, u0_semisimple, DegenerateCase, OrbitRep, Payload, RepTag, Space};
pub use sred::{section_sigma, section_sigma1, SRedElt, SRedWire};
pub use u0::{U0RedElt, U0RedWire};
pub use u1::{cayley, cayley_inv, U1Elt, U1Group, U1RedElt, U1RedWire, Xi};
