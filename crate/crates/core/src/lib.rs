//! Probabilistic metric and normed spaces over exact step functions.
//!
//! Distance distribution functions are represented as left-continuous step
//! functions ([`Ddf`]), which makes the order, the sup-convolution triangle
//! functions and the Sibley metric exactly computable. On top of that algebra
//! the crate provides finite Menger spaces, E-spaces over finite probability
//! spaces, checkers for (m,k)-B- and (m,k)-C-contractions, syndetic-set and
//! upper Banach density combinatorics, a Picard solver and the probabilistic
//! normed space (E-norm) suite.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod combinatorics;
pub mod contraction;
pub mod ddf;
pub mod espace;
pub mod pm_space;
pub mod pn_space;
pub mod solver;
pub mod tnorm;

mod error;

pub use combinatorics::{Density, FiniteRelation, IndexSet, Periodic, Ratio};
pub use ddf::{Ddf, Extremum, Slack};
pub use error::{
    CombinatoricsError, ContractionError, DdfError, ESpaceError, PnError, SolverError,
    SpaceError, TNormError,
};
pub use espace::{AffineMap, BaseMetric, EPoint, ESpace, Euclidean, MetricTable, ProbSpace};
pub use pm_space::{FinitePmSpace, ProbMetric, SelfMap, TableMap};
pub use pn_space::{FinitePnSpace, Mode, Vector};
pub use tnorm::TNorm;

/// `base^exp` by repeated multiplication.
///
/// Exact whenever every partial product is representable, in particular for
/// powers of two.
pub(crate) fn pow_int(base: f64, exp: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}
