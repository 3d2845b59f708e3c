//! Histogram-modification contrast enhancement for grayscale document images,
//! driven by the chicken swarm optimizer (original and improved variants).
//!
//! The quadratic histogram objective has a closed-form minimizer, which the
//! pipeline always computes alongside the swarm result so every run reports
//! how far the metaheuristic landed from the global optimum.

pub mod cli;
pub mod error;
pub mod histogram;
pub mod metrics;
pub mod objective;
pub mod pgm;
pub mod pipeline;
pub mod report;
pub mod swarm;
pub mod tridiag;

pub use error::{Error, Result};
pub use histogram::{GrayImage, Histogram, Lut, Pdf, LEVELS};
pub use metrics::MetricSet;
pub use objective::{DiffMatrix, ObjectiveSpec};
pub use pipeline::{enhance, sweep, EnhancementParams, EnhancementResult, OptimizerMode};
pub use swarm::{minimize, Minimum, SwarmConfig, SwarmState, Variant};
