//! Parameter-free clustering of unimodal clusters.
//!
//! The clustering works by repeatedly projecting pairs of clusters onto a line,
//! testing the 1D projection for unimodality with an isotonic-regression variant of
//! the dip test, and then either merging the pair or redistributing its points at
//! the detected density dip.
//!
//! Module map:
//!
//! * [`isotonic`]: monotone, up-down and down-up weighted least-squares fits.
//! * [`dip1d`]: 1D unimodality test and cut-point selection.
//! * [`init`]: k-means++ seeding and Lloyd refinement.
//! * [`cluster`]: the pairwise split/merge loop.
//! * [`synth`]: synthetic Gaussian / skewed mixture generation with ellipsoid packing.
//! * [`metrics`]: confusion matrices and the min(precision, recall) accuracy.

pub mod cluster;
pub mod data;
pub mod dip1d;
mod error;
pub mod init;
pub mod isotonic;
pub mod metrics;
pub mod synth;

pub use cluster::{isosplit, isosplit_detailed, IsosplitOutput, IsosplitParams};
pub use data::{DataMatrix, Labeling};
pub use error::{Error, Result};
