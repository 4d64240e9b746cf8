//! Arithmetic and complex dynamics of split maps `(f_1, ..., f_n)` on `(P^1)^n`
//! over `Q`: certified canonical heights, preperiodicity decisions, periodic
//! cycles, exceptional-map classification, invariant-measure sampling, and a
//! verifier for preperiodic hypersurfaces and curves.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops read closer to the matrix and recurrence formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod config;
pub mod curve;
pub mod error;
pub mod exceptional;
pub mod harness;
pub mod heights;
pub mod hypersurface;
pub mod measure;
pub mod orbits;
pub mod poly;
pub mod proj;
pub mod roots;
pub mod sphere;

pub use config::Caps;
pub use curve::{
    curve_orbit, curve_pushforward, Curve2, CurveOrbit, CurveOrbitOutcome, Pushforward,
};
pub use error::{Error, Result};
pub use exceptional::{classify, Classification, RamificationPortrait, Verdict, Weight};
pub use harness::{mm_verify, MMReport, MmConfig};
pub use heights::{
    canonical_height, decide_preperiodic, CanonicalHeightResult, Place, PlaceContribution,
    PreperiodicityVerdict,
};
pub use hypersurface::Hypersurface;
pub use measure::{EmpiricalMeasure, GreenValue};
pub use orbits::Cycle;
pub use poly::BinaryForm;
pub use proj::{normalize, CriticalPoint, MapJson, ProjectivePoint, RationalMapLift};
pub use sphere::CPoint;
