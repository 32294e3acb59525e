//! Repeated stratified k-fold cross-validation.
//!
//! Each run derives its own sub-seed from (seed, run index), shuffles within
//! class, and deals members round-robin so per-fold class counts stay within
//! ±1 of the stratified ideal. Per-run precision/recall/F come from the
//! confusion matrix pooled across the run's folds, with `Qualified` as the
//! positive class; the report averages the per-run values. Output is a pure
//! function of (input, seed).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{AcademicLevel, CandidateProfile, QualificationOutcome};
use crate::scholar::candidate_features;

use super::{predict, train, ClassifyError, FeatureConfig};

/// Binary confusion counts with `Qualified` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

/// Precision, recall and F-measure from confusion counts, with the
/// zero-denominator convention p = r = f = 0.
pub fn prf(confusion: Confusion) -> (f64, f64, f64) {
    let tp = confusion.tp as f64;
    let fp = confusion.fp as f64;
    let fn_ = confusion.fn_ as f64;
    let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
    let recall = if tp + fn_ == 0.0 { 0.0 } else { tp / (tp + fn_) };
    let f = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    (precision, recall, f)
}

/// Metrics for one cross-validation run, pooled over its folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub run: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Macro-averaged counterparts (mean of the per-class scores), emitted
    /// alongside for comparison.
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f_measure: f64,
    pub confusion: Confusion,
}

/// Averaged evaluation result for one (field, level, configuration) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub field: String,
    pub level: AcademicLevel,
    pub config: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f_measure: f64,
    pub runs: Vec<RunMetrics>,
    pub seed: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_seed(seed: u64, run: usize) -> u64 {
    splitmix64(seed ^ (run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Stratified partition of example indices into `folds` disjoint test folds.
///
/// Members of each class are shuffled and dealt round-robin; the dealing
/// cursor carries across classes so overall fold sizes stay balanced too.
pub fn stratified_folds(
    outcomes: &[QualificationOutcome],
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut partition = vec![Vec::new(); folds];
    let mut cursor = 0usize;
    for class in [QualificationOutcome::Qualified, QualificationOutcome::NotQualified] {
        let mut members: Vec<usize> =
            (0..outcomes.len()).filter(|&i| outcomes[i] == class).collect();
        members.shuffle(rng);
        for index in members {
            partition[cursor % folds].push(index);
            cursor += 1;
        }
    }
    partition
}

/// Runs `runs` repetitions of stratified `folds`-fold cross-validation over
/// the profiles of one (field, level) with the given feature configuration.
pub fn cross_validate(
    profiles: &[CandidateProfile],
    config: &FeatureConfig,
    runs: usize,
    folds: usize,
    seed: u64,
) -> Result<EvalReport, ClassifyError> {
    let first = profiles.first().ok_or(ClassifyError::EmptyDataset)?;
    let field = first.field.code().to_string();
    let level = first.level;
    if profiles.iter().any(|p| p.field.code() != field || p.level != level) {
        return Err(ClassifyError::MixedPartition);
    }
    if profiles.len() < folds {
        return Err(ClassifyError::TooFewExamples { needed: folds, got: profiles.len() });
    }

    let mut dataset: Vec<(Vec<f64>, QualificationOutcome)> = Vec::with_capacity(profiles.len());
    for profile in profiles {
        let outcome = profile
            .outcome
            .ok_or_else(|| ClassifyError::MissingOutcome { candidate: profile.id.clone() })?;
        dataset.push((candidate_features(profile, config), outcome));
    }
    let outcomes: Vec<QualificationOutcome> = dataset.iter().map(|(_, o)| *o).collect();
    if outcomes.iter().all(|o| *o == outcomes[0]) {
        return Err(ClassifyError::SingleClass);
    }

    let mut run_metrics = Vec::with_capacity(runs);
    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed(seed, run));
        let partition = stratified_folds(&outcomes, folds, &mut rng);
        let mut confusion = Confusion::default();
        for test_fold in &partition {
            let train_set: Vec<(Vec<f64>, QualificationOutcome)> = (0..dataset.len())
                .filter(|i| !test_fold.contains(i))
                .map(|i| dataset[i].clone())
                .collect();
            let model = train(&train_set, None)?;
            for &i in test_fold {
                let (predicted, _) = predict(&model, &dataset[i].0)?;
                match (dataset[i].1, predicted) {
                    (QualificationOutcome::Qualified, QualificationOutcome::Qualified) => confusion.tp += 1,
                    (QualificationOutcome::NotQualified, QualificationOutcome::Qualified) => confusion.fp += 1,
                    (QualificationOutcome::Qualified, QualificationOutcome::NotQualified) => confusion.fn_ += 1,
                    (QualificationOutcome::NotQualified, QualificationOutcome::NotQualified) => confusion.tn += 1,
                }
            }
        }
        let (precision, recall, f_measure) = prf(confusion);
        // per-class scores with the other class as positive, for the macro view
        let flipped = Confusion { tp: confusion.tn, fp: confusion.fn_, fn_: confusion.fp, tn: confusion.tp };
        let (np, nr, nf) = prf(flipped);
        run_metrics.push(RunMetrics {
            run,
            precision,
            recall,
            f_measure,
            macro_precision: (precision + np) / 2.0,
            macro_recall: (recall + nr) / 2.0,
            macro_f_measure: (f_measure + nf) / 2.0,
            confusion,
        });
    }

    let k = run_metrics.len() as f64;
    let mean = |f: fn(&RunMetrics) -> f64| run_metrics.iter().map(f).sum::<f64>() / k;
    Ok(EvalReport {
        field,
        level,
        config: config.id().to_string(),
        precision: mean(|m| m.precision),
        recall: mean(|m| m.recall),
        f_measure: mean(|m| m.f_measure),
        macro_precision: mean(|m| m.macro_precision),
        macro_recall: mean(|m| m.macro_recall),
        macro_f_measure: mean(|m| m.macro_f_measure),
        runs: run_metrics,
        seed,
    })
}
