//! Author-level indicators: the conventional h-index, its altmetric variants,
//! and per-candidate feature extraction for classification.
//!
//! Altmetric h-indexes apply the conventional h-index function to the
//! per-publication category-tier sums, using those sums in place of citation
//! counts. Article-level features are aggregated per candidate by summation
//! (mean aggregation is available behind [`Aggregation`]).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{FeatureConfig, FeatureDescriptor};
use crate::model::{CandidateProfile, HIndexBasis, HIndexScore, IndicatorCategory};
use crate::stats::{IndicatorVectorSet, Tier};

/// Largest h such that at least h entries are greater than or equal to h.
pub fn h_index(counts: &[u64]) -> u32 {
    let mut sorted: Vec<u64> = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut h = 0u32;
    for (i, &count) in sorted.iter().enumerate() {
        if count > i as u64 {
            h = (i as u32) + 1;
        } else {
            break;
        }
    }
    h
}

/// h-index over the candidate's citation-index counts (missing counts are 0).
pub fn citation_h_index(candidate: &CandidateProfile) -> HIndexScore {
    let counts: Vec<u64> =
        candidate.publications.iter().map(|p| p.scopus_citations.unwrap_or(0)).collect();
    HIndexScore { basis: HIndexBasis::ScopusCitations, h: h_index(&counts) }
}

/// h-index over the candidate's per-publication sums for one category.
pub fn alt_h_index(candidate: &CandidateProfile, category: IndicatorCategory) -> HIndexScore {
    let counts: Vec<u64> = candidate.publications.iter().map(|p| p.category_sum(category)).collect();
    HIndexScore { basis: HIndexBasis::Category(category), h: h_index(&counts) }
}

/// How article-level counts are collapsed into one candidate feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Sum,
    Mean,
}

fn aggregate(values: impl Iterator<Item = u64>, aggregation: Aggregation, n_pubs: usize) -> f64 {
    let total: u64 = values.sum();
    match aggregation {
        Aggregation::Sum => total as f64,
        Aggregation::Mean => {
            if n_pubs == 0 {
                0.0
            } else {
                total as f64 / n_pubs as f64
            }
        }
    }
}

/// Extracts the ordered numeric feature vector for one candidate under a
/// feature configuration, using sum aggregation for article-level dimensions.
pub fn candidate_features(candidate: &CandidateProfile, config: &FeatureConfig) -> Vec<f64> {
    candidate_features_with(candidate, config, Aggregation::Sum)
}

/// [`candidate_features`] with an explicit article-level aggregation.
pub fn candidate_features_with(
    candidate: &CandidateProfile,
    config: &FeatureConfig,
    aggregation: Aggregation,
) -> Vec<f64> {
    let n = candidate.publications.len();
    let mut features = Vec::new();
    for descriptor in config.descriptors() {
        match descriptor {
            FeatureDescriptor::ScopusCitations => features.push(aggregate(
                candidate.publications.iter().map(|p| p.scopus_citations.unwrap_or(0)),
                aggregation,
                n,
            )),
            FeatureDescriptor::Captures => features.push(aggregate(
                candidate.publications.iter().map(|p| p.category_sum(IndicatorCategory::Captures)),
                aggregation,
                n,
            )),
            FeatureDescriptor::AllAltmetricCategories => {
                for category in IndicatorCategory::ALL {
                    features.push(aggregate(
                        candidate.publications.iter().map(|p| p.category_sum(category)),
                        aggregation,
                        n,
                    ));
                }
            }
            FeatureDescriptor::HCitations => features.push(citation_h_index(candidate).h as f64),
            FeatureDescriptor::HCaptures => {
                features.push(alt_h_index(candidate, IndicatorCategory::Captures).h as f64)
            }
            FeatureDescriptor::HAllCategories => {
                for category in IndicatorCategory::ALL {
                    features.push(alt_h_index(candidate, category).h as f64);
                }
            }
        }
    }
    features
}

/// Author-level indicator summary for one candidate: h-index scores plus the
/// summed article-level counts per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorIndicatorRow {
    pub candidate: String,
    pub h_citations: HIndexScore,
    pub h_by_category: BTreeMap<IndicatorCategory, HIndexScore>,
    pub sum_scopus_citations: u64,
    pub sums_by_category: BTreeMap<IndicatorCategory, u64>,
}

impl AuthorIndicatorRow {
    pub fn for_candidate(candidate: &CandidateProfile) -> AuthorIndicatorRow {
        let mut h_by_category = BTreeMap::new();
        let mut sums_by_category = BTreeMap::new();
        for category in IndicatorCategory::ALL {
            h_by_category.insert(category, alt_h_index(candidate, category));
            sums_by_category
                .insert(category, candidate.publications.iter().map(|p| p.category_sum(category)).sum());
        }
        AuthorIndicatorRow {
            candidate: candidate.id.clone(),
            h_citations: citation_h_index(candidate),
            h_by_category,
            sum_scopus_citations: candidate
                .publications
                .iter()
                .map(|p| p.scopus_citations.unwrap_or(0))
                .sum(),
            sums_by_category,
        }
    }
}

/// Author-export column order, documented in docs/formats.md.
pub const AUTHOR_EXPORT_HEADER: &str = "candidate,h_citations,h_usage,h_captures,h_mentions,h_social_media,h_plumx_citations,sum_scopus_citations,sum_usage,sum_captures,sum_mentions,sum_social_media,sum_plumx_citations";

/// Delimiter-separated author-indicator table, one row per candidate.
pub fn author_rows_csv(rows: &[AuthorIndicatorRow]) -> String {
    let mut out = String::new();
    out.push_str(AUTHOR_EXPORT_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{}", row.candidate, row.h_citations.h);
        for category in IndicatorCategory::ALL {
            let _ = write!(out, ",{}", row.h_by_category[&category].h);
        }
        let _ = write!(out, ",{}", row.sum_scopus_citations);
        for category in IndicatorCategory::ALL {
            let _ = write!(out, ",{}", row.sums_by_category[&category]);
        }
        out.push('\n');
    }
    out
}

/// Author-tier vectors: one row per candidate, dimensions = h-index scores by
/// basis (citation h first, then the five category h-indexes).
pub fn author_vectors(profiles: &[&CandidateProfile]) -> IndicatorVectorSet {
    let labels: Vec<String> = std::iter::once("h_citations".to_string())
        .chain(IndicatorCategory::ALL.iter().map(|c| format!("h_{}", c.token().replace('-', "_"))))
        .collect();
    let mut rows = Vec::with_capacity(profiles.len());
    let mut row_keys = Vec::with_capacity(profiles.len());
    for profile in profiles {
        let mut row = Vec::with_capacity(labels.len());
        row.push(citation_h_index(profile).h as f64);
        for category in IndicatorCategory::ALL {
            row.push(alt_h_index(profile, category).h as f64);
        }
        row_keys.push(profile.id.clone());
        rows.push(row);
    }
    IndicatorVectorSet { tier: Tier::Author, labels, row_keys, rows }
}
