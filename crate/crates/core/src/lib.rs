//! Soliton surfaces immersed in sl(2,R), built from zero-curvature
//! representations of the Painlevé equations P1, P2 and P3.
//!
//! The pipeline is: solve the Painlevé equation ([`painleve`]), evaluate its
//! Lax pair ([`laxpair`]), pick a symmetry of the zero-curvature condition
//! ([`symmetry`]), integrate the wave function and the immersion on a
//! parameter grid ([`frame`]), then measure the surface ([`geometry`]).

pub mod algebra;
pub mod cli;
pub mod config;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod jet;
pub mod laxpair;
pub mod mesh;
pub mod ode;
pub mod painleve;
pub mod special;
pub mod symmetry;
pub mod verify;

pub use algebra::{commutator, decompose, killing, AlgebraVector, Mat2};
pub use error::{Error, Result};
pub use laxpair::{LaxPair, LaxPoint};
pub use painleve::{Equation, Host, PainleveParams, PainleveState, Trajectory};
