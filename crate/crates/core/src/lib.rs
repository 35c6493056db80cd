//! Generalized Darlington lifts for rational matrix-valued Nevanlinna
//! functions in several variables.
//!
//! Given `f = P/q` with `Im f ⪰ 0` on the upper poly-half-plane `Π^d`,
//! [`darlington::lift`] builds a Cayley inner `g` in `d + 1` variables with
//! `g(z, i) = f(z)`. The [`classes`] module holds sampled checkers and
//! stability falsifiers used to test such claims numerically.

pub mod classes;
pub mod corpus;
pub mod darlington;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod univariate;

pub use darlington::{compress, decompose, lift, realize_1d, restrict_at_i, DarlingtonLift, LftRealization};
pub use linalg::{ComplexMatrix, C64};
pub use poly::{MatrixPoly, MultiIndex};
pub use rational::{identity_equal, RationalMatrixFunction};
