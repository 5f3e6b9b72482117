//! The full pipeline: bends, head/tail breaks, power-law fit and box counting,
//! assembled into one report.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bends::{self, BendDecomposition, BendMetric};
use crate::boxcount::{self, BoxCountEstimate};
use crate::error::{Error, Result, StageExt};
use crate::geometry::Polyline;
use crate::headtail::{self, HeadTailResult};
use crate::par::Execution;
use crate::powerlaw::{self, PowerLawFit};

pub const SCHEMA_VERSION: u32 = 1;

/// Below this many positive bends a report is flagged as an insufficient sample.
pub const DEFAULT_MIN_BENDS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub head_limit: f64,
    pub replicates: usize,
    pub box_levels: usize,
    pub metric: BendMetric,
    pub min_bends: usize,
    pub execution: Execution,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            head_limit: headtail::DEFAULT_HEAD_LIMIT,
            replicates: powerlaw::DEFAULT_REPLICATES,
            box_levels: boxcount::DEFAULT_LEVELS,
            metric: BendMetric::Offset,
            min_bends: DEFAULT_MIN_BENDS,
            execution: Execution::default(),
        }
    }
}

impl AnalysisOptions {
    fn record(&self, seed: u64) -> BTreeMap<String, Value> {
        BTreeMap::from([
            ("head_limit".into(), json!(self.head_limit)),
            ("replicates".into(), json!(self.replicates)),
            ("box_levels".into(), json!(self.box_levels)),
            ("bend_metric".into(), json!(self.metric.name())),
            ("exclude_zero_bends".into(), json!(true)),
            ("min_bends".into(), json!(self.min_bends)),
            ("seed".into(), json!(seed)),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub curve_id: String,
    pub n_vertices: usize,
    pub closed: bool,
    /// Bends with positive size; these feed every statistic.
    pub n_bends: usize,
    pub n_zero_bends: usize,
    pub ht_index: u32,
    pub recurrence_count: u32,
    pub breaks: Vec<f64>,
    pub class_counts: Vec<usize>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub xmin: Option<f64>,
    pub ks: Option<f64>,
    pub n_tail: Option<usize>,
    pub box_dimension: f64,
    pub r2: f64,
    pub is_fractal_def3: bool,
    pub insufficient_sample: bool,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

/// Every intermediate product of [`analyze_full`].
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    /// Bends with classes assigned.
    pub decomposition: BendDecomposition,
    pub sizes: Vec<f64>,
    pub head_tail: Option<HeadTailResult>,
    pub power_law: Option<PowerLawFit>,
    pub boxes: BoxCountEstimate,
}

pub fn analyze(curve: &Polyline, curve_id: &str, seed: u64, options: &AnalysisOptions) -> Result<AnalysisReport> {
    Ok(analyze_full(curve, curve_id, seed, options)?.report)
}

pub fn analyze_full(
    curve: &Polyline,
    curve_id: &str,
    seed: u64,
    options: &AnalysisOptions,
) -> Result<Analysis> {
    let mut warnings = Vec::new();
    let decomposition =
        bends::decompose_with(curve, options.metric, options.execution).stage("bends")?;
    let sizes = bends::bend_sizes(&decomposition, true);
    let n_zero_bends = decomposition.bends.len() - sizes.len();

    let (head_tail, decomposition) = if sizes.is_empty() {
        warnings.push("no bend with positive size; ht-index reported as 1".to_string());
        let mut d = decomposition;
        for b in &mut d.bends {
            b.class = Some(1);
        }
        d.ht_index = Some(1);
        (None, d)
    } else {
        let ht = headtail::head_tail_breaks(&sizes, options.head_limit).stage("headtail")?;
        let d = bends::assign_classes(&decomposition, &ht).stage("headtail")?;
        (Some(ht), d)
    };

    let power_law = match powerlaw::fit_with(&sizes, options.replicates, seed, options.execution) {
        Ok(fit) => {
            if fit.p_unstable {
                warnings.push(format!("only {} bootstrap replicates; p is unstable", fit.replicates));
            }
            Some(fit)
        }
        Err(Error::InsufficientData(msg)) => {
            warnings.push(format!("power-law fit skipped: {msg}"));
            None
        }
        Err(e) => return Err(e).stage("powerlaw"),
    };

    let boxes =
        boxcount::box_dimension_with(curve, options.box_levels, options.execution).stage("boxcount")?;
    if !(0.9..=2.0).contains(&boxes.dimension) {
        warnings.push(format!(
            "box-counting dimension {:.4} outside [0.9, 2.0]",
            boxes.dimension
        ));
    }

    let insufficient_sample = sizes.len() < options.min_bends;
    if insufficient_sample {
        warnings.push(format!(
            "insufficient sample: {} bends, fewer than {}",
            sizes.len(),
            options.min_bends
        ));
    }

    let ht_index = head_tail.as_ref().map_or(1, |h| h.ht_index);
    let report = AnalysisReport {
        schema: SCHEMA_VERSION,
        curve_id: curve_id.to_string(),
        n_vertices: curve.len(),
        closed: curve.is_closed(),
        n_bends: sizes.len(),
        n_zero_bends,
        ht_index,
        recurrence_count: ht_index - 1,
        breaks: head_tail.as_ref().map(|h| h.breaks.clone()).unwrap_or_default(),
        class_counts: head_tail.as_ref().map(|h| h.class_counts.clone()).unwrap_or_default(),
        alpha: power_law.map(|f| f.alpha),
        p: power_law.map(|f| f.p),
        xmin: power_law.map(|f| f.xmin),
        ks: power_law.map(|f| f.ks),
        n_tail: power_law.map(|f| f.n_tail),
        box_dimension: boxes.dimension,
        r2: boxes.r2,
        is_fractal_def3: ht_index >= headtail::FRACTAL_HT_INDEX,
        insufficient_sample,
        seed,
        parameters: options.record(seed),
        warnings,
    };
    Ok(Analysis {
        report,
        decomposition,
        sizes,
        head_tail,
        power_law,
        boxes,
    })
}
