//! Periodic dispersive evolution with jump-discontinuous initial data.
//!
//! The equation `∂ₓⁿ U = (2πi)^{n-1} ∂ₜ U` on the unit circle is solved
//! exactly at rational times through complete exponential sums, by direct
//! Fourier partial sums at arbitrary times, and near the initial jumps by
//! limiting ringing profiles evaluated with oscillatory quadrature.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classd;
pub mod dd;
pub mod diophantine;
pub mod error;
pub mod expsum;
pub mod io;
pub mod rational;
pub mod ringing;
pub mod series;

pub use classd::{PiecewisePeriodic, ProblemConfig};
pub use dd::DoubleDouble;
pub use diophantine::{DiophantineParams, Fraction};
pub use error::{Error, Result};
pub use expsum::{IntPoly, RealPoly};
pub use rational::{solve_rational, RationalSolution};
pub use ringing::{RingingProfile, Side};
pub use series::{GridField, SmoothCutoff, Time};
