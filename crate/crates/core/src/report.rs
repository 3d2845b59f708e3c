//! JSON run reports.
//!
//! Layout: `{ "config": {...}, "runs": [...], "aggregate": {...} }` for a
//! single optimizer and `{ "config": {...}, "sections": [...] }` with one
//! `{ "optimizer", "runs", "aggregate" }` section per optimizer for
//! comparisons. Infinite values are written as the string `"inf"`.

use serde::{Deserialize, Serialize};

use crate::metrics::MetricSet;

/// Serde adapter writing non-finite floats as `"inf"`, `"-inf"` or `"nan"`.
pub mod float_or_inf {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_nan() {
            s.serialize_str("nan")
        } else if *value == f64::INFINITY {
            s.serialize_str("inf")
        } else if *value == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*value)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("invalid float {other:?}"))),
            },
        }
    }
}

/// Settings echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub input: String,
    pub optimizers: Vec<String>,
    pub lambda: f64,
    pub gamma: f64,
    pub iters: usize,
    pub population: usize,
    pub base_seed: u64,
    pub repeats: usize,
    pub anchor_init: bool,
}

/// Relative distance of an achieved cost above the closed-form optimum.
/// Falls back to the absolute difference when the optimum is zero.
pub fn relative_gap(achieved: f64, oracle: f64) -> f64 {
    if oracle == 0.0 {
        achieved - oracle
    } else {
        (achieved - oracle) / oracle.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub achieved_cost: f64,
    pub oracle_cost: f64,
    pub gap: f64,
    pub metrics_before: MetricSet,
    pub metrics_after: MetricSet,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub achieved_cost: f64,
    pub median_achieved_cost: f64,
    pub oracle_cost: f64,
    pub gap: f64,
    pub median_gap: f64,
    pub metrics_before: MetricSet,
    pub metrics_after: MetricSet,
    pub wall_time_s: f64,
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Median (mean of the two middle values for even lengths).
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn mean_metrics<'a>(sets: impl Iterator<Item = &'a MetricSet> + Clone) -> MetricSet {
    MetricSet {
        entropy_bits: mean(sets.clone().map(|m| m.entropy_bits)),
        psnr_db: mean(sets.clone().map(|m| m.psnr_db)),
        mean_intensity: mean(sets.clone().map(|m| m.mean_intensity)),
        variance: mean(sets.clone().map(|m| m.variance)),
        mse: mean(sets.map(|m| m.mse)),
    }
}

impl Aggregate {
    pub fn from_runs(runs: &[RunRecord]) -> Self {
        Self {
            runs: runs.len(),
            achieved_cost: mean(runs.iter().map(|r| r.achieved_cost)),
            median_achieved_cost: median(runs.iter().map(|r| r.achieved_cost)),
            oracle_cost: mean(runs.iter().map(|r| r.oracle_cost)),
            gap: mean(runs.iter().map(|r| r.gap)),
            median_gap: median(runs.iter().map(|r| r.gap)),
            metrics_before: mean_metrics(runs.iter().map(|r| &r.metrics_before)),
            metrics_after: mean_metrics(runs.iter().map(|r| &r.metrics_after)),
            wall_time_s: mean(runs.iter().map(|r| r.wall_time_s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub optimizer: String,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: ReportConfig,
    pub sections: Vec<Section>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(psnr: f64, e: f64) -> MetricSet {
        MetricSet {
            entropy_bits: e,
            psnr_db: psnr,
            mean_intensity: 100.0,
            variance: 10.0,
            mse: 1.0,
        }
    }

    fn run(seed: u64, cost: f64) -> RunRecord {
        RunRecord {
            seed,
            achieved_cost: cost,
            oracle_cost: 10.0,
            gap: relative_gap(cost, 10.0),
            metrics_before: metrics(f64::INFINITY, 6.0),
            metrics_after: metrics(30.0 + seed as f64, 2.0),
            wall_time_s: 0.5,
        }
    }

    #[test]
    fn stats() {
        assert_eq!(median([3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median([4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(Vec::<f64>::new()).is_nan());
        assert_eq!(mean([1.0, 2.0, 6.0]), 3.0);
        assert_eq!(relative_gap(11.0, 10.0), 0.1);
        assert_eq!(relative_gap(0.5, 0.0), 0.5);
    }

    #[test]
    fn aggregate_is_mean_of_runs() {
        let runs: Vec<_> = (0..4).map(|s| run(s, 10.0 + s as f64)).collect();
        let agg = Aggregate::from_runs(&runs);
        assert_eq!(agg.runs, 4);
        assert_eq!(agg.achieved_cost, 11.5);
        assert_eq!(agg.median_achieved_cost, 11.5);
        assert!((agg.gap - 0.15).abs() < 1e-12);
        assert_eq!(agg.metrics_after.psnr_db, 31.5);
        assert!(agg.metrics_before.psnr_db.is_infinite());
    }

    #[test]
    fn infinity_round_trips_as_string() {
        let runs = vec![run(0, 10.0)];
        let report = Report {
            config: ReportConfig {
                input: "in.pgm".into(),
                optimizers: vec!["icso".into()],
                lambda: 5.0,
                gamma: 50000.0,
                iters: 1000,
                population: 20,
                base_seed: 0,
                repeats: 1,
                anchor_init: true,
            },
            aggregate: Aggregate::from_runs(&runs),
            runs,
        };
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"psnr_db\":\"inf\""));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
