//! Numerical engine for iterating transcendental entire and meromorphic
//! functions of one complex variable.
//!
//! The crate is organised bottom-up:
//!
//! * [`fnkit`] — a small expression language (parser, evaluator, symbolic
//!   derivative, syntactic class detection) for maps built from `z`, complex
//!   constants, field operations, integer powers and `exp`/`sin`/`cos`/`tan`;
//! * [`orbit`] — forward iteration with escape / convergence / cycle / pole
//!   bookkeeping, and backward iteration (preimage sets) via damped Newton
//!   continuation from a seed lattice;
//! * [`periodic`] — periodic point search, multipliers, stability classes;
//! * [`fatou`] — heuristic fate classification of a seed (attracting basin,
//!   parabolic / rotation / Baker / wandering candidates) plus escape-rate
//!   regression checks;
//! * [`julia`] — escape-time and preimage rasters, boundary extraction, and
//!   8-bit PGM output with a JSON sidecar;
//! * [`newton`] — relaxed Newton maps for root finding, critical-orbit
//!   convergence tests, the Newton flow integrator, and basin measurements;
//! * [`bouquet`] — symbolic dynamics on strips for the exponential family
//!   `λ·exp(z)` with `0 < λ < 1/e`: itineraries, hair endpoints, and the
//!   conjugacy check between the map and the shift.
//!
//! All randomised searches take explicit RNG seeds and every parallel kernel
//! (feature `parallel`, on by default) iterates over index ranges, so results
//! are bitwise reproducible at fixed inputs regardless of thread count.

pub mod bouquet;
pub mod consts;
pub mod exec;
pub mod fatou;
pub mod fnkit;
pub mod geom;
pub mod julia;
pub mod newton;
pub mod orbit;
pub mod periodic;
pub(crate) mod rootfind;

pub use fnkit::{ComplexMap, EvalOutcome, FnClass, MeroFn, ParseError};
pub use geom::Rect;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the Riemann sphere: either a finite complex number or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ExtComplex {
    Finite { value: Complex64 },
    Infinity,
}

impl ExtComplex {
    pub fn finite(value: Complex64) -> Self {
        ExtComplex::Finite { value }
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite { value } => Some(*value),
            ExtComplex::Infinity => None,
        }
    }
}

impl std::fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtComplex::Finite { value } => write!(f, "{value}"),
            ExtComplex::Infinity => write!(f, "inf"),
        }
    }
}
