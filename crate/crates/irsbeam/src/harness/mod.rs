//! Experiment driver: config parsing, seeded Monte-Carlo sweeps emitted as
//! CSV, floating-point-operation count models, and the pieces the CLI is
//! assembled from.
//!
//! All sweep functions are pure: they take an [`ExperimentConfig`] and
//! return the CSV text. Trials are independent work units; with the
//! `parallel` feature they run on a worker pool whose size can be pinned
//! with the `IRSBEAM_THREADS` environment variable, and results are always
//! gathered and sorted by `(method, n, trial)` before emission, so the
//! output bytes never depend on the degree of parallelism.

mod config;
mod flops;
mod runs;

pub use config::{dbm_to_watts, parse_config, parse_config_file, ExperimentConfig};
pub use flops::{flop_count, ComplexityParams};
pub use runs::{
    measure_complexity, rate_samples, run_convergence, run_flops, run_rate_vs_n, run_single,
    MeasuredComplexity, RateSample, SingleReport, CONVERGENCE_CSV_HEADER, CONVERGENCE_N,
    FLOPS_CSV_HEADER, RATE_VS_N_CSV_HEADER, SINGLE_TRACE_CSV_HEADER,
};
