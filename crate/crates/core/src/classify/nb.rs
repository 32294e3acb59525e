//! Gaussian Naive Bayes over continuous indicator features.
//!
//! Likelihoods are per-dimension normal densities with per-class sample mean
//! and variance; computation is done in log domain and posteriors are
//! normalized with log-sum-exp. Variances are floored at a smoothing epsilon
//! so constant-within-class dimensions cannot produce singularities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::QualificationOutcome;

use super::ClassifyError;

const CLASSES: [QualificationOutcome; 2] =
    [QualificationOutcome::Qualified, QualificationOutcome::NotQualified];

/// A trained Naive Bayes model: class priors plus per-class, per-dimension
/// mean and variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub epsilon: f64,
}

impl NBModel {
    pub fn dimensions(&self) -> usize {
        self.means[0].len()
    }
}

fn sample_mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, variance)
}

/// Trains a model on (feature vector, outcome) pairs.
///
/// When `epsilon` is not given it defaults to 1e-9 × (max global per-dimension
/// variance + 1).
pub fn train(
    dataset: &[(Vec<f64>, QualificationOutcome)],
    epsilon: Option<f64>,
) -> Result<NBModel, ClassifyError> {
    let first = dataset.first().ok_or(ClassifyError::EmptyDataset)?;
    let dims = first.0.len();
    if dataset.iter().any(|(v, _)| v.len() != dims) {
        return Err(ClassifyError::RaggedVectors);
    }

    let epsilon = epsilon.unwrap_or_else(|| {
        let max_global_variance = (0..dims)
            .map(|d| {
                let column: Vec<f64> = dataset.iter().map(|(v, _)| v[d]).collect();
                sample_mean_variance(&column).1
            })
            .fold(0.0, f64::max);
        1e-9 * (max_global_variance + 1.0)
    });

    let mut priors = [0.0; 2];
    let mut means = [vec![0.0; dims], vec![0.0; dims]];
    let mut variances = [vec![epsilon; dims], vec![epsilon; dims]];
    for (ci, class) in CLASSES.iter().enumerate() {
        let members: Vec<&Vec<f64>> =
            dataset.iter().filter(|(_, o)| o == class).map(|(v, _)| v).collect();
        priors[ci] = members.len() as f64 / dataset.len() as f64;
        for d in 0..dims {
            let column: Vec<f64> = members.iter().map(|v| v[d]).collect();
            let (mean, variance) = sample_mean_variance(&column);
            means[ci][d] = mean;
            variances[ci][d] = variance.max(epsilon);
        }
    }

    Ok(NBModel { priors, means, variances, epsilon })
}

fn gaussian_log_density(x: f64, mean: f64, variance: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * variance).ln() - (x - mean).powi(2) / (2.0 * variance)
}

/// Predicts the outcome for one feature vector, returning the argmax class and
/// the normalized posterior for both classes. An exact posterior tie resolves
/// to `NotQualified`.
pub fn predict(
    model: &NBModel,
    features: &[f64],
) -> Result<(QualificationOutcome, BTreeMap<QualificationOutcome, f64>), ClassifyError> {
    if features.len() != model.dimensions() {
        return Err(ClassifyError::DimensionMismatch {
            expected: model.dimensions(),
            got: features.len(),
        });
    }

    let mut log_joint = [0.0f64; 2];
    for ci in 0..2 {
        let mut acc = model.priors[ci].ln();
        for (d, &x) in features.iter().enumerate() {
            acc += gaussian_log_density(x, model.means[ci][d], model.variances[ci][d]);
        }
        log_joint[ci] = acc;
    }

    let max = log_joint[0].max(log_joint[1]);
    let weights = [(log_joint[0] - max).exp(), (log_joint[1] - max).exp()];
    let total = weights[0] + weights[1];
    let posteriors: Vec<f64> = weights.iter().map(|w| w / total).collect();

    let outcome = if posteriors[0] > posteriors[1] {
        QualificationOutcome::Qualified
    } else {
        // covers the exact-tie case: qualification is not granted on a tie
        QualificationOutcome::NotQualified
    };

    let mut map = BTreeMap::new();
    map.insert(CLASSES[0], posteriors[0]);
    map.insert(CLASSES[1], posteriors[1]);
    Ok((outcome, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use QualificationOutcome::{NotQualified, Qualified};

    #[test]
    fn single_class_dataset_gets_unit_prior() {
        let model = train(&[(vec![1.0], Qualified), (vec![2.0], Qualified)], None).unwrap();
        assert_eq!(model.priors, [1.0, 0.0]);
    }

    #[test]
    fn sample_statistics_match_hand_computation() {
        // class A x = {1, 2}: mean 1.5, sample variance 0.5
        let model = train(&[(vec![1.0], Qualified), (vec![2.0], Qualified), (vec![9.0], NotQualified)], None)
            .unwrap();
        assert_eq!(model.means[0][0], 1.5);
        assert!((model.variances[0][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_dimension_floors_to_epsilon() {
        let model = train(
            &[(vec![4.0], Qualified), (vec![4.0], Qualified), (vec![9.0], NotQualified)],
            Some(1e-6),
        )
        .unwrap();
        assert_eq!(model.variances[0][0], 1e-6);
        assert_eq!(model.epsilon, 1e-6);
    }

    #[test]
    fn two_cluster_example_is_confident() {
        // A: {1, 2}, B: {5, 6}; the query 1.5 sits on A's mean
        let model = train(
            &[
                (vec![1.0], Qualified),
                (vec![2.0], Qualified),
                (vec![5.0], NotQualified),
                (vec![6.0], NotQualified),
            ],
            None,
        )
        .unwrap();
        let (outcome, posteriors) = predict(&model, &[1.5]).unwrap();
        assert_eq!(outcome, Qualified);
        assert!(posteriors[&Qualified] > 0.99, "posterior = {}", posteriors[&Qualified]);
    }

    #[test]
    fn symmetric_midpoint_ties_to_not_qualified() {
        let model = train(
            &[
                (vec![1.0], Qualified),
                (vec![2.0], Qualified),
                (vec![4.0], NotQualified),
                (vec![5.0], NotQualified),
            ],
            None,
        )
        .unwrap();
        let (outcome, posteriors) = predict(&model, &[3.0]).unwrap();
        assert_eq!(posteriors[&Qualified], posteriors[&NotQualified]);
        assert_eq!(outcome, NotQualified);
    }

    #[test]
    fn posteriors_sum_to_one() {
        let model = train(
            &[(vec![1.0, 3.0], Qualified), (vec![2.0, 1.0], NotQualified), (vec![0.5, 2.0], Qualified)],
            None,
        )
        .unwrap();
        for features in [[0.0, 0.0], [100.0, -3.0], [1.5, 2.0]] {
            let (_, posteriors) = predict(&model, &features).unwrap();
            let total: f64 = posteriors.values().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_features_fall_back_to_the_majority_class() {
        // likelihoods cancel, so the prior decides
        let model = train(
            &[
                (vec![2.0], Qualified),
                (vec![2.0], NotQualified),
                (vec![2.0], NotQualified),
            ],
            None,
        )
        .unwrap();
        let (outcome, posteriors) = predict(&model, &[2.0]).unwrap();
        assert_eq!(outcome, NotQualified);
        assert!(posteriors[&NotQualified] > posteriors[&Qualified]);

        let flipped = train(
            &[(vec![2.0], Qualified), (vec![2.0], Qualified), (vec![2.0], NotQualified)],
            None,
        )
        .unwrap();
        let (outcome, _) = predict(&flipped, &[2.0]).unwrap();
        assert_eq!(outcome, Qualified);
    }

    #[test]
    fn errors_on_bad_shapes() {
        assert!(matches!(train(&[], None), Err(ClassifyError::EmptyDataset)));
        assert!(matches!(
            train(&[(vec![1.0], Qualified), (vec![1.0, 2.0], NotQualified)], None),
            Err(ClassifyError::RaggedVectors)
        ));
        let model = train(&[(vec![1.0], Qualified), (vec![2.0], NotQualified)], None).unwrap();
        assert!(matches!(
            predict(&model, &[1.0, 2.0]),
            Err(ClassifyError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }
}
