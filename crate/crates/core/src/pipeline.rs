//! End-to-end enhancement: histogram, optimized histogram, equalization
//! mapping of the optimized histogram, enhanced image and metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{
    apply_lut, compute_histogram, he_lut, normalize, GrayImage, Histogram, Lut, LEVELS,
};
use crate::metrics::MetricSet;
use crate::objective::ObjectiveSpec;
use crate::report::relative_gap;
use crate::swarm::{minimize_with_anchors, SwarmConfig, Variant};

/// How the modified histogram is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMode {
    /// Run the chicken swarm on the histogram cost.
    Metaheuristic,
    /// Solve the tridiagonal system directly.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementParams {
    /// Contrast weight; 0..=20 is the useful range.
    pub lambda: f64,
    /// Smoothness (detail retention) weight; typically 1e3..=1e9.
    pub gamma: f64,
    /// Swarm settings. Dimension and bounds are replaced per image by
    /// 256 bins in `[0, pixel count]`.
    pub swarm: SwarmConfig,
    pub mode: OptimizerMode,
    /// Start one chicken at the input histogram and one at the uniform one.
    pub anchor_init: bool,
}

impl EnhancementParams {
    /// Swarm-driven enhancement with default swarm settings (20 chickens,
    /// 1000 generations).
    pub fn swarm(lambda: f64, gamma: f64, variant: Variant) -> Self {
        let mut swarm = SwarmConfig::new(20, Vec::new(), Vec::new());
        swarm.variant = variant;
        Self {
            lambda,
            gamma,
            swarm,
            mode: OptimizerMode::Metaheuristic,
            anchor_init: true,
        }
    }

    pub fn closed_form(lambda: f64, gamma: f64) -> Self {
        Self {
            mode: OptimizerMode::ClosedForm,
            ..Self::swarm(lambda, gamma, Variant::Icso)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.swarm.seed = seed;
        self
    }

    pub fn with_iters(mut self, iters: usize) -> Self {
        self.swarm.max_iters = iters;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementResult {
    pub output_image: GrayImage,
    /// Optimizer output with negative bins clamped to zero.
    pub optimized_histogram: Histogram,
    pub lut: Lut,
    pub metrics_before: MetricSet,
    pub metrics_after: MetricSet,
    /// Global best cost per generation; empty in closed-form mode.
    pub convergence_history: Vec<f64>,
    pub achieved_cost: f64,
    /// Cost of the closed-form minimizer for the same problem.
    pub oracle_cost: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl EnhancementResult {
    pub fn relative_gap(&self) -> f64 {
        relative_gap(self.achieved_cost, self.oracle_cost)
    }
}

/// Builds the histogram cost for `image`.
pub fn objective_for(image: &GrayImage, lambda: f64, gamma: f64) -> Result<ObjectiveSpec> {
    ObjectiveSpec::new(compute_histogram(image)?, lambda, gamma)
}

/// Swarm settings for optimizing the histogram of an image with `pixels`
/// pixels: one coordinate per gray level, each bounded by the pixel count.
pub fn histogram_swarm(template: &SwarmConfig, pixels: usize) -> SwarmConfig {
    let mut cfg = template.clone();
    cfg.lower_bound = vec![0.0; LEVELS];
    cfg.upper_bound = vec![pixels as f64; LEVELS];
    cfg
}

/// Equalization mapping of a modified histogram, normalized by its own mass.
/// A histogram without mass maps every level to itself.
pub fn equalizing_lut(hist: &Histogram) -> Result<Lut> {
    if hist.total() > 0.0 {
        Ok(he_lut(&normalize(hist)?))
    } else {
        Ok(Lut::identity())
    }
}

pub fn enhance(image: &GrayImage, params: &EnhancementParams) -> Result<EnhancementResult> {
    let spec = objective_for(image, params.lambda, params.gamma)?;
    let oracle = spec.closed_form_tricriteria();
    let oracle_cost = spec.tri_cost(&oracle)?;

    let (solution, achieved_cost, convergence_history) = match params.mode {
        OptimizerMode::ClosedForm => (oracle, oracle_cost, Vec::new()),
        OptimizerMode::Metaheuristic => {
            let cfg = histogram_swarm(&params.swarm, image.len());
            let anchors = if params.anchor_init {
                vec![
                    spec.h_input().counts().to_vec(),
                    spec.u_target().counts().to_vec(),
                ]
            } else {
                Vec::new()
            };
            let cost = |h: &[f64]| spec.tri_cost(h).unwrap_or(f64::NAN);
            let best = minimize_with_anchors(cost, &cfg, &anchors)?;
            (best.position, best.fitness, best.history)
        }
    };

    let optimized_histogram = Histogram::from_clamped(&solution)?;
    let lut = equalizing_lut(&optimized_histogram)?;
    let output_image = apply_lut(image, &lut);

    Ok(EnhancementResult {
        metrics_before: MetricSet::compute(image, image)?,
        metrics_after: MetricSet::compute(image, &output_image)?,
        output_image,
        optimized_histogram,
        lut,
        convergence_history,
        achieved_cost,
        oracle_cost,
        lambda: params.lambda,
        gamma: params.gamma,
    })
}

/// Runs [`enhance`] for every `(lambda, gamma)` pair, lambda-major. Grid
/// point `k` uses swarm seed `seed + k`, so the first point matches a plain
/// `enhance` call. Points are evaluated in parallel.
pub fn sweep(
    image: &GrayImage,
    lambdas: &[f64],
    gammas: &[f64],
    params: &EnhancementParams,
) -> Result<Vec<EnhancementResult>> {
    if lambdas.is_empty() || gammas.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one lambda and one gamma".into(),
        ));
    }
    let grid: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| gammas.iter().map(move |&g| (l, g)))
        .collect();
    grid.par_iter()
        .enumerate()
        .map(|(k, &(lambda, gamma))| {
            let mut p = params.clone();
            p.lambda = lambda;
            p.gamma = gamma;
            p.swarm.seed = params.swarm.seed.wrapping_add(k as u64);
            enhance(image, &p)
        })
        .collect()
}
