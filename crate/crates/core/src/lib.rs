//! Square-root-velocity (SRV) distances between piecewise-linear curves of
//! bounded variation, including curves with jumps.
//!
//! The crate is organised bottom-up:
//!
//! * [`curve`]: piecewise-linear SBV curves (nodes with left/right values).
//! * [`measure`]: derivative measures as piecewise-constant density plus atoms,
//!   and the relaxed similarity functional at the measure level.
//! * [`srvt`]: the classical transform, similarity `S` and SRV distance for
//!   absolutely continuous curves.
//! * [`relax`]: the relaxed similarity `Ŝ` and distance `d̂` for curves with jumps.
//! * [`gtransform`]: generalised reparametrisations, the jump-opening transform
//!   `G(c)` and canonical bracket representatives.
//! * [`matching`]: dynamic-programming search for optimal reparametrisation
//!   pairs and the resulting shape distance.
//! * [`oracle`]: independent verification tools (recovery sequences, brute force).
//! * [`io`] and [`plot`]: JSON file formats and SVG output used by the CLI.

pub mod curve;
pub mod error;
pub mod gtransform;
pub mod io;
pub mod matching;
pub mod measure;
pub mod oracle;
pub mod plot;
pub mod relax;
pub mod srvt;
mod vecmath;

pub use curve::{AcCurve, Node, SbvCurve, Side, Violation};
pub use error::{Error, Result};
pub use gtransform::Reparam;
pub use matching::{GridConfig, MatchResult};
pub use measure::PiecewiseMeasure;
