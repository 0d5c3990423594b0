//! Exact step-function spaces over finite metric spaces.
//!
//! The crate models the Hartman–Mycielski space of right-open step functions
//! `[0,1) -> X` over a finite metric space `X`, together with:
//!
//! * the integral metric and neighborhood tests ([`stepfn`]),
//! * windowed-average functionals and the pseudometrics they generate
//!   ([`functionals`]),
//! * the splice map `e1`, its simplex iterate `e_n`, the exact midpoint
//!   construction and a uniform-continuity certificate ([`equiconnect`]),
//! * implicit Dugundji systems for the open interval and open square and the
//!   extension operator built from `e_n` ([`dugundji`]),
//! * a seeded property-suite runner ([`suite`]).
//!
//! Every number is an arbitrary-precision rational; nothing is rounded.

pub mod docs;
pub mod dugundji;
pub mod equiconnect;
pub mod error;
pub mod functionals;
pub mod gen;
pub mod rational;
pub mod space;
pub mod stepfn;
pub mod suite;

pub use error::{Error, Result};
pub use rational::{format_rational, parse_rational, Rational};
pub use space::{FiniteMetricSpace, SpaceMap, TestFunctional};
pub use stepfn::StepFunction;
