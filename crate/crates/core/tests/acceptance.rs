//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Criteria 8 and 9 exercise the command-line pipeline end to end and live in
//! the CLI crate's `e2e` test target.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qualimetrics_core::classify::{
    cross_validate, feature_configs, predict, stratified_folds, train,
};
use qualimetrics_core::model::{
    AcademicLevel, IndicatorCategory, QualificationOutcome, registered_category,
};
use qualimetrics_core::sampling::{
    ap_scores, select_fields, FieldCounts, MacroMap, Overrides,
};
use qualimetrics_core::scholar::h_index;
use qualimetrics_core::stats::{build_vectors, pearson, r_significance, LabelSpace, Tier};
use qualimetrics_core::synth;

/// Independent Pearson route: the computational formula over raw sums, as
/// opposed to the two-pass centered formula in the implementation.
fn pearson_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let den_x = n * sxx - sx * sx;
    let den_y = n * syy - sy * sy;
    if den_x <= 0.0 || den_y <= 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / (den_x * den_y).sqrt())
}

#[test]
fn criterion_1_pearson_oracle_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..1_000 {
        let len = rng.gen_range(3..=200);
        let x: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..100.0)).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..100.0)).collect();

        let got = pearson(&x, &y).unwrap().expect("random vectors are non-constant");
        let expected = pearson_oracle(&x, &y).expect("random vectors are non-constant");
        assert!(
            (got - expected).abs() < 1e-12,
            "trial {trial}: got {got}, oracle {expected}"
        );
        assert!(got.abs() <= 1.0 + 1e-12);

        // symmetry
        let swapped = pearson(&y, &x).unwrap().unwrap();
        assert!((got - swapped).abs() < 1e-12);

        // affine-sign invariance: pearson(a*x + b, y) = sign(a) * pearson(x, y)
        let a = rng.gen_range(0.1..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b = rng.gen_range(-10.0..10.0);
        let transformed: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let affine = pearson(&transformed, &y).unwrap().unwrap();
        assert!(
            (affine - a.signum() * got).abs() < 1e-12,
            "trial {trial}: affine {affine} vs {}",
            a.signum() * got
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "ran in {elapsed:?}, budget 5 s");
    println!("[PASS] criterion 1: pearson matches the definitional oracle on 1000 pairs ({elapsed:?})");
}

#[test]
fn criterion_2_significance_suite() {
    // closed-form values at r = 0.6, n = 27
    let sig = r_significance(0.6, 27).unwrap();
    assert_eq!(sig.t, 3.75, "t must be exact");
    assert_eq!(sig.se, 0.16, "se must be exact");
    assert!(sig.p > 9.0e-4 && sig.p < 9.8e-4, "p = {}", sig.p);

    // null case
    for n in [3usize, 5, 10, 100] {
        let null = r_significance(0.0, n).unwrap();
        assert_eq!(null.p, 1.0);
        assert_eq!(null.t, 0.0);
    }

    // monotonicity over a 50-point grid: p falls as |r| rises at fixed n
    let mut previous = f64::INFINITY;
    for i in 1..=50 {
        let r = i as f64 * 0.019;
        let p = r_significance(r, 30).unwrap().p;
        assert!(p < previous, "p must strictly decrease in |r| (r = {r})");
        previous = p;
    }
    // and p falls as n rises at fixed r != 0
    let mut previous = f64::INFINITY;
    for i in 0..50 {
        let n = 4 + i * 4;
        let p = r_significance(0.3, n).unwrap().p;
        assert!(p < previous, "p must strictly decrease in n (n = {n})");
        previous = p;
    }
    println!("[PASS] criterion 2: significance matches the t-distribution oracle and monotonicity holds");
}

/// Brute-force h-index: scan h from n down to 0, count entries >= h.
fn h_index_oracle(counts: &[u64]) -> u32 {
    for h in (0..=counts.len()).rev() {
        if counts.iter().filter(|&&c| c >= h as u64).count() >= h {
            return h as u32;
        }
    }
    0
}

#[test]
fn criterion_3_h_index_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for trial in 0..1_000 {
        let len = rng.gen_range(0..=50);
        let counts: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=100)).collect();
        assert_eq!(h_index(&counts), h_index_oracle(&counts), "trial {trial}: {counts:?}");
    }
    // monotonicity under a single count increment
    for trial in 0..1_000 {
        let len = rng.gen_range(1..=50);
        let mut counts: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=100)).collect();
        let before = h_index(&counts);
        let position = rng.gen_range(0..counts.len());
        counts[position] += 1;
        let after = h_index(&counts);
        assert!(after >= before, "trial {trial}: increment lowered h");
        // appending a publication never decreases h either
        counts.push(rng.gen_range(0..=100));
        assert!(h_index(&counts) >= after);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "ran in {elapsed:?}, budget 5 s");
    println!("[PASS] criterion 3: h-index matches the brute-force oracle and is monotone ({elapsed:?})");
}

#[test]
fn criterion_4_hierarchy_consistency() {
    let corpus = synth::generate(&synth::SynthConfig::default());
    let publications: Vec<&qualimetrics_core::model::PublicationRecord> =
        corpus.enriched_profiles.iter().flat_map(|p| p.publications.iter()).collect();

    let categories = build_vectors(&publications, Tier::Category).unwrap();
    let metrics = build_vectors(&publications, Tier::Metric).unwrap();
    let sources = build_vectors(&publications, Tier::Source).unwrap();

    // category of each metric label: registered, or claimed by the corpus values
    let category_of_metric = |label: &str| -> IndicatorCategory {
        registered_category(label).unwrap_or_else(|| {
            publications
                .iter()
                .flat_map(|p| p.indicators.iter())
                .find(|v| v.metric == label)
                .map(|v| v.category)
                .expect("observed metric has a value")
        })
    };

    for (row, publication) in publications.iter().enumerate() {
        // category entries = sums of the metric entries under that category
        for (ci, category_label) in categories.labels.iter().enumerate() {
            if category_label == "scopus_citations" {
                assert_eq!(categories.rows[row][ci], metrics.rows[row][metrics.labels.len() - 1]);
                continue;
            }
            let category = IndicatorCategory::from_token(category_label).unwrap();
            let summed: f64 = metrics
                .labels
                .iter()
                .enumerate()
                .filter(|(_, label)| *label != "scopus_citations")
                .filter(|(_, label)| category_of_metric(label) == category)
                .map(|(mi, _)| metrics.rows[row][mi])
                .sum();
            assert_eq!(
                categories.rows[row][ci] as u64, summed as u64,
                "publication {} category {category_label}", publication.id
            );
        }
        // metric entries = sums of the chain entries under that metric
        for (mi, metric_label) in metrics.labels.iter().enumerate() {
            if metric_label == "scopus_citations" {
                continue;
            }
            let summed: f64 = sources
                .labels
                .iter()
                .enumerate()
                .filter(|(_, label)| {
                    label.split_once(':').is_some_and(|(metric, _)| metric == metric_label)
                })
                .map(|(si, _)| sources.rows[row][si])
                .sum();
            assert_eq!(
                metrics.rows[row][mi] as u64, summed as u64,
                "publication {} metric {metric_label}", publication.id
            );
        }
    }
    println!("[PASS] criterion 4: category = sum(metric) = sum(source chains), exact integer equality");
}

#[test]
fn criterion_5_field_selection_suite() {
    // uniform counts: every AP is zero
    let uniform = vec![
        FieldCounts::new("01-A1", 10, 100, 5, 50),
        FieldCounts::new("01-B1", 10, 100, 5, 50),
        FieldCounts::new("02-A1", 10, 100, 5, 50),
    ];
    let scored = ap_scores(uniform).unwrap();
    assert!(scored.iter().all(|c| c.ap == 0.0));

    // the published selection scenario: five macro fields, with the
    // social-sciences override preferring the non-bibliometric field
    let scenario = vec![
        FieldCounts::with_ap("01-B1", 0.56),
        FieldCounts::with_ap("01-A1", 0.20),
        FieldCounts::with_ap("04-A1", 0.34),
        FieldCounts::with_ap("06-N1", 0.45),
        FieldCounts::with_ap("06-A1", 0.31),
        FieldCounts::with_ap("09-H1", 0.58),
        FieldCounts::with_ap("09-A1", 0.44),
        FieldCounts::with_ap("11-E1", 0.56),
        FieldCounts::with_ap("13-A1", 0.51),
    ];
    let mut overrides = Overrides::new();
    overrides.insert(qualimetrics_core::model::MacroField::SocSciHum, "13-A1".to_string());
    let result = select_fields(&scenario, &MacroMap::builtin(), &overrides).unwrap();
    let mut selected = result.selected_codes();
    selected.sort();
    assert_eq!(selected, vec!["01-B1", "04-A1", "06-N1", "09-H1", "13-A1"]);
    let social = &result.selections[&qualimetrics_core::model::MacroField::SocSciHum];
    assert_eq!(social.overrode.as_ref().unwrap().field, "11-E1");

    // permutation and scale invariance on randomized corpora
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..50 {
        let n = rng.gen_range(3..10);
        let counts: Vec<FieldCounts> = (0..n)
            .map(|i| {
                FieldCounts::new(
                    &format!("0{}-A{}", 1 + i % 9, 1 + i / 9),
                    rng.gen_range(0..500),
                    rng.gen_range(0..5000),
                    rng.gen_range(0..500),
                    rng.gen_range(0..5000),
                )
            })
            .collect();
        let scored = ap_scores(counts.clone()).unwrap();
        assert!(scored.iter().all(|c| (0.0..=1.0).contains(&c.ap)));

        let mut shuffled = counts.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut rng);
        let scored_shuffled = ap_scores(shuffled).unwrap();
        for entry in &scored {
            let other = scored_shuffled.iter().find(|o| o.field == entry.field).unwrap();
            assert!((entry.ap - other.ap).abs() < 1e-12, "permutation changed AP");
        }

        let scale = rng.gen_range(2..20);
        let mut scaled = counts.clone();
        for c in &mut scaled {
            c.p1 *= scale;
        }
        let scored_scaled = ap_scores(scaled).unwrap();
        for (a, b) in scored.iter().zip(&scored_scaled) {
            assert!((a.ap - b.ap).abs() < 1e-12, "scaling one variable changed AP");
        }
    }
    println!("[PASS] criterion 5: AP scoring and per-macro-field selection behave as specified");
}

/// Linear-domain enumeration of the Bayes posterior, independent of the
/// log-domain implementation path.
fn posterior_oracle(
    dataset: &[(Vec<f64>, QualificationOutcome)],
    epsilon: f64,
    query: &[f64],
) -> [f64; 2] {
    let classes = [QualificationOutcome::Qualified, QualificationOutcome::NotQualified];
    let dims = dataset[0].0.len();
    let mut joint = [0.0f64; 2];
    for (ci, class) in classes.iter().enumerate() {
        let members: Vec<&Vec<f64>> = dataset.iter().filter(|(_, o)| o == class).map(|(v, _)| v).collect();
        let prior = members.len() as f64 / dataset.len() as f64;
        let mut likelihood = 1.0f64;
        for d in 0..dims {
            let n = members.len() as f64;
            let mean = if members.is_empty() {
                0.0
            } else {
                members.iter().map(|v| v[d]).sum::<f64>() / n
            };
            let variance = if members.len() < 2 {
                0.0
            } else {
                members.iter().map(|v| (v[d] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            }
            .max(epsilon);
            let density = (-((query[d] - mean).powi(2)) / (2.0 * variance)).exp()
                / (2.0 * std::f64::consts::PI * variance).sqrt();
            likelihood *= density;
        }
        joint[ci] = prior * likelihood;
    }
    let total = joint[0] + joint[1];
    [joint[0] / total, joint[1] / total]
}

#[test]
fn criterion_6_naive_bayes_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);

    // posterior normalization on random inputs
    for _ in 0..200 {
        let n = rng.gen_range(2..30);
        let dims = rng.gen_range(1..5);
        let dataset: Vec<(Vec<f64>, QualificationOutcome)> = (0..n)
            .map(|i| {
                let v: Vec<f64> = (0..dims).map(|_| rng.gen_range(-50.0..50.0)).collect();
                let outcome = if i % 2 == 0 {
                    QualificationOutcome::Qualified
                } else {
                    QualificationOutcome::NotQualified
                };
                (v, outcome)
            })
            .collect();
        let model = train(&dataset, None).unwrap();
        let query: Vec<f64> = (0..dims).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let (_, posteriors) = predict(&model, &query).unwrap();
        let total: f64 = posteriors.values().sum();
        assert!((total - 1.0).abs() < 1e-12, "posterior sum = {total}");
    }

    // enumeration-oracle equivalence on a family of 100 small datasets
    for family in 0..100 {
        let n = rng.gen_range(2..=6);
        let dims = rng.gen_range(1..=2);
        let dataset: Vec<(Vec<f64>, QualificationOutcome)> = (0..n)
            .map(|i| {
                let v: Vec<f64> = (0..dims).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let outcome = if i == 0 || rng.gen_bool(0.5) {
                    QualificationOutcome::Qualified
                } else {
                    QualificationOutcome::NotQualified
                };
                (v, outcome)
            })
            .collect();
        // moderate floor keeps the oracle's linear-domain products representable
        let epsilon = 0.5;
        let model = train(&dataset, Some(epsilon)).unwrap();
        for _ in 0..5 {
            let query: Vec<f64> = (0..dims).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let (_, posteriors) = predict(&model, &query).unwrap();
            let oracle = posterior_oracle(&dataset, epsilon, &query);
            let got = posteriors[&QualificationOutcome::Qualified];
            assert!(
                (got - oracle[0]).abs() < 1e-9,
                "family {family}: got {got}, oracle {}",
                oracle[0]
            );
        }
    }

    // the two-cluster example classifies the near point with confidence
    let dataset = vec![
        (vec![1.0], QualificationOutcome::Qualified),
        (vec![2.0], QualificationOutcome::Qualified),
        (vec![5.0], QualificationOutcome::NotQualified),
        (vec![6.0], QualificationOutcome::NotQualified),
    ];
    let model = train(&dataset, None).unwrap();
    let (outcome, posteriors) = predict(&model, &[1.5]).unwrap();
    assert_eq!(outcome, QualificationOutcome::Qualified);
    assert!(posteriors[&QualificationOutcome::Qualified] > 0.99);
    println!("[PASS] criterion 6: posteriors normalize, match enumeration to 1e-9, and separate the clusters");
}

#[test]
fn criterion_7_cross_validation_suite() {
    let started = Instant::now();
    // fixture shaped like the largest full-professor partition: 75 / 160
    let profiles = synth::classification_fixture("01-B1", AcademicLevel::FullProfessor, 75, 160, 42);
    assert_eq!(profiles.len(), 235);

    // fold partition: disjoint cover with stratification within ±1
    let outcomes: Vec<QualificationOutcome> = profiles.iter().map(|p| p.outcome.unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let partition = stratified_folds(&outcomes, 10, &mut rng);
    let mut all: Vec<usize> = partition.iter().flatten().copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..235).collect::<Vec<_>>(), "folds must partition the dataset");
    for fold in &partition {
        let q = fold.iter().filter(|&&i| outcomes[i] == QualificationOutcome::Qualified).count();
        assert!((7..=8).contains(&q), "stratification off: {q} qualified in a fold");
    }

    // all 12 configurations produce sane averaged metrics, deterministically
    for config in feature_configs() {
        let report_a = cross_validate(&profiles, &config, 10, 10, 42).unwrap();
        let report_b = cross_validate(&profiles, &config, 10, 10, 42).unwrap();
        assert_eq!(
            serde_json::to_vec(&report_a).unwrap(),
            serde_json::to_vec(&report_b).unwrap(),
            "config {} not byte-identical across executions",
            config.id()
        );
        for value in [report_a.precision, report_a.recall, report_a.f_measure] {
            assert!((0.0..=1.0).contains(&value), "config {}: {value}", config.id());
        }
        assert_eq!(report_a.runs.len(), 10);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "ran in {elapsed:?}, budget 10 s");
    println!("[PASS] criterion 7: stratified CV partitions correctly and reports deterministically ({elapsed:?})");
}

#[test]
fn label_space_alignment_is_stable_across_fields() {
    // supporting check for the averaged matrices used in criterion 8
    let corpus = synth::generate(&synth::SynthConfig::default());
    let publications: Vec<&qualimetrics_core::model::PublicationRecord> =
        corpus.enriched_profiles.iter().flat_map(|p| p.publications.iter()).collect();
    let space = LabelSpace::from_publications(publications.iter().copied());
    for tier in [Tier::Category, Tier::Metric, Tier::Source] {
        let labels = space.labels(tier).unwrap();
        assert_eq!(labels.last().map(String::as_str), Some("scopus_citations"));
    }
}
