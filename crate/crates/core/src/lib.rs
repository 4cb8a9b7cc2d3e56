//! Repeated-pattern discovery and pattern polling for symbolic music.
//!
//! The crate is organised by capability:
//!
//! - [`model`], [`time`] and [`io`]: exact-time notes, pieces, pattern occurrences, and
//!   ingestion from MIDI, CSV and the pattern interchange JSON.
//! - [`discovery`]: the geometric SIA family (SIA, SIATEC, COSIATEC, SIATECCompress, SIAR,
//!   SIARCT) with compression-ratio and compactness measures.
//! - [`polling`]: the weighted polling curve built from several analyzers' outputs,
//!   Savitzky-Golay smoothing, discrete derivatives and boundary extraction.
//! - [`evaluation`]: boundary precision / recall / F1 under a tolerance, and planted-pattern
//!   recovery.
//! - [`synthesis`]: synthetic pieces with planted patterns and ground truth.
//! - [`analysis`]: features, scaling + PCA, classifiers, repeated cross-validation and
//!   shadow-feature importance.
//! - [`cli`]: the `ppoll` command-line front end.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod discovery;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod model;
pub mod polling;
pub mod synthesis;
pub mod time;

pub use error::{Error, Result};
pub use model::{quantize, PatternOccurrence, PatternRecord, Point, PointSet};
pub use time::{Rational, Time};
