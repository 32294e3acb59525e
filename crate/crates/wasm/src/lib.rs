//! Browser bindings for three interactive views over the analysis kernels:
//! averaged correlation heatmaps on a synthetic corpus, the significance of a
//! correlation coefficient as sample size grows, and cross-validated
//! qualification prediction across the twelve feature configurations.
//!
//! Every function returns a JSON string; the demo page parses and renders it.
//! The `*_impl` functions hold the target-independent logic (and the host
//! test surface); the `wasm_bindgen` wrappers only translate errors.
//! Build with `wasm-pack build crates/wasm --target web --out-dir www/pkg`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qualimetrics_core::classify::{cross_validate, feature_configs};
use qualimetrics_core::model::AcademicLevel;
use qualimetrics_core::stats::{level_matrices, r_significance, Tier};
use qualimetrics_core::synth::{generate, SynthConfig};

fn parse_level(token: &str) -> Result<AcademicLevel, String> {
    AcademicLevel::from_token(token)
        .ok_or_else(|| format!("unknown level `{token}`; use full or associate"))
}

fn corpus(seed: u64, candidates_per_field_level: usize) -> SynthConfig {
    SynthConfig {
        seed,
        candidates_per_field_level: candidates_per_field_level.clamp(4, 40),
        ..SynthConfig::default()
    }
}

#[derive(Serialize)]
struct HeatmapCell {
    r: Option<f64>,
    p: Option<f64>,
    se: Option<f64>,
    n: usize,
    n_fields: Option<usize>,
}

#[derive(Serialize)]
struct Heatmap {
    tier: String,
    level: String,
    labels: Vec<String>,
    cells: Vec<Vec<HeatmapCell>>,
    fields: Vec<String>,
}

pub fn correlation_demo_impl(
    seed: u64,
    tier: &str,
    level: &str,
    candidates_per_field_level: usize,
) -> Result<String, String> {
    let tier = Tier::from_token(tier)
        .ok_or_else(|| "unknown tier; use category, metric, source, or author".to_string())?;
    let level = parse_level(level)?;
    let bundle = generate(&corpus(seed, candidates_per_field_level));
    let correlations =
        level_matrices(&bundle.enriched_profiles, tier, level).map_err(|e| e.to_string())?;
    let averaged = correlations.averaged;
    let heatmap = Heatmap {
        tier: averaged.tier.token().to_string(),
        level: averaged.level.token().to_string(),
        labels: averaged.labels.clone(),
        cells: averaged
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| HeatmapCell { r: c.r, p: c.p, se: c.se, n: c.n, n_fields: c.n_fields })
                    .collect()
            })
            .collect(),
        fields: correlations.per_field.iter().map(|m| m.scope.token().to_string()).collect(),
    };
    Ok(serde_json::to_string(&heatmap).expect("heatmap serializes"))
}

/// Averaged correlation matrix for one (tier, level) over a synthetic corpus.
#[wasm_bindgen]
pub fn correlation_demo(
    seed: u64,
    tier: &str,
    level: &str,
    candidates_per_field_level: usize,
) -> Result<String, JsError> {
    correlation_demo_impl(seed, tier, level, candidates_per_field_level)
        .map_err(|e| JsError::new(&e))
}

#[derive(Serialize)]
struct SignificancePoint {
    n: usize,
    t: Option<f64>,
    p: f64,
    se: f64,
}

#[derive(Serialize)]
struct SignificanceCurve {
    r: f64,
    points: Vec<SignificancePoint>,
}

pub fn significance_curve_impl(r: f64, max_n: usize) -> Result<String, String> {
    if !(-1.0..=1.0).contains(&r) {
        return Err("r must lie in [-1, 1]".to_string());
    }
    let max_n = max_n.clamp(3, 2_000);
    let mut points = Vec::with_capacity(max_n - 2);
    for n in 3..=max_n {
        let sig = r_significance(r, n).map_err(|e| e.to_string())?;
        points.push(SignificancePoint {
            n,
            t: sig.t.is_finite().then_some(sig.t),
            p: sig.p,
            se: sig.se,
        });
    }
    Ok(serde_json::to_string(&SignificanceCurve { r, points }).expect("curve serializes"))
}

/// t, two-tailed p, and standard error of a coefficient r as the sample size
/// sweeps 3..=max_n.
#[wasm_bindgen]
pub fn significance_curve(r: f64, max_n: usize) -> Result<String, JsError> {
    significance_curve_impl(r, max_n).map_err(|e| JsError::new(&e))
}

#[derive(Serialize)]
struct ConfigScore {
    config: String,
    precision: f64,
    recall: f64,
    f_measure: f64,
}

#[derive(Serialize)]
struct ClassificationDemo {
    field: String,
    level: String,
    qualified: usize,
    not_qualified: usize,
    scores: Vec<ConfigScore>,
}

pub fn classification_demo_impl(
    seed: u64,
    field: &str,
    level: &str,
    candidates_per_field_level: usize,
) -> Result<String, String> {
    let level = parse_level(level)?;
    let bundle = generate(&corpus(seed, candidates_per_field_level));
    let partition: Vec<_> = bundle
        .enriched_profiles
        .into_iter()
        .filter(|p| p.field.code() == field && p.level == level)
        .collect();
    if partition.is_empty() {
        return Err(format!("no candidates for field `{field}`; the demo corpus has 01-B1 and 13-A1"));
    }
    let qualified = partition
        .iter()
        .filter(|p| p.outcome == Some(qualimetrics_core::model::QualificationOutcome::Qualified))
        .count();
    let mut scores = Vec::new();
    for config in feature_configs() {
        let folds = 10.min(partition.len());
        let report = cross_validate(&partition, &config, 10, folds, seed).map_err(|e| e.to_string())?;
        scores.push(ConfigScore {
            config: config.id().to_string(),
            precision: report.precision,
            recall: report.recall,
            f_measure: report.f_measure,
        });
    }
    let demo = ClassificationDemo {
        field: field.to_string(),
        level: level.token().to_string(),
        qualified,
        not_qualified: partition.len() - qualified,
        scores,
    };
    Ok(serde_json::to_string(&demo).expect("demo serializes"))
}

/// Cross-validated precision/recall/F for all twelve feature configurations
/// on one (field, level) slice of a synthetic corpus.
#[wasm_bindgen]
pub fn classification_demo(
    seed: u64,
    field: &str,
    level: &str,
    candidates_per_field_level: usize,
) -> Result<String, JsError> {
    classification_demo_impl(seed, field, level, candidates_per_field_level)
        .map_err(|e| JsError::new(&e))
}
