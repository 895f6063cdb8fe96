//! Monte Carlo estimators built on coupled noise paths.
//!
//! Work is split per path index, each path drawing its own random stream;
//! results are always merged in ascending path index, so the thread count
//! never changes a single bit of the output.

mod csv;
mod divergence;
mod fit;
mod moments;
mod strong;

pub use self::csv::{
    write_convergence_csv, write_divergence_csv, write_moments_csv, CONVERGENCE_HEADER, DIVERGENCE_HEADER,
    MOMENTS_HEADER,
};
pub use divergence::{divergence_demo, DivergenceRow, NoiseMode, DIVERGENCE_SCHEMES};
pub use fit::fit_order;
pub use moments::{moment_track, MomentTrack};
pub use strong::{
    sample_errors, strong_error, ConvergenceReport, ErrorSample, ErrorSampleSet, LevelRow, MIN_REFERENCE_FACTOR,
};
