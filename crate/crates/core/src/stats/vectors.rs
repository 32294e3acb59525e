//! Indicator vector construction at the category, metric and source tiers.
//!
//! Dimension label orders are fixed:
//!
//! * category tier: the five categories in declaration order, then
//!   `scopus_citations`;
//! * metric tier: the registered metrics in hierarchy order, then any
//!   unregistered metrics observed in the corpus (lexicographic), then
//!   `scopus_citations`;
//! * source tier: `metric:source` chain keys — the registered canonical
//!   chains in hierarchy order, then observed non-canonical chains
//!   (lexicographic), then `scopus_citations`.
//!
//! Source dimensions are keyed by the full metric:source chain rather than
//! the bare source name because two registered metrics share the `blog`
//! source; bare source keys would not partition under their metrics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{IndicatorCategory, PublicationRecord, HIERARCHY};

use super::StatsError;

/// Dimension label reserved for the citation-index count, present in every
/// non-author tier.
pub const SCOPUS_LABEL: &str = "scopus_citations";

/// The granularity at which indicator vectors are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Category,
    Metric,
    Source,
    Author,
}

impl Tier {
    pub fn token(&self) -> &'static str {
        match self {
            Tier::Category => "category",
            Tier::Metric => "metric",
            Tier::Source => "source",
            Tier::Author => "author",
        }
    }

    pub fn from_token(s: &str) -> Option<Tier> {
        match s.trim().to_ascii_lowercase().as_str() {
            "category" => Some(Tier::Category),
            "metric" => Some(Tier::Metric),
            "source" => Some(Tier::Source),
            "author" => Some(Tier::Author),
            _ => None,
        }
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

fn chain_key(metric: &str, source: &str) -> String {
    format!("{metric}:{source}")
}

/// The dimension labels for one corpus, shared across fields and levels so
/// that per-field matrices stay comparable and averageable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    metric_labels: Vec<String>,
    chain_labels: Vec<String>,
}

impl LabelSpace {
    /// Derives the label space from the publications of a corpus. Registered
    /// dimensions are always present; unregistered ones only when observed.
    pub fn from_publications<'a, I>(publications: I) -> LabelSpace
    where
        I: IntoIterator<Item = &'a PublicationRecord>,
    {
        let mut extra_metrics = BTreeSet::new();
        let mut extra_chains = BTreeSet::new();
        let registered_metrics: BTreeSet<&str> = HIERARCHY.iter().map(|e| e.metric).collect();
        let registered_chains: BTreeSet<String> =
            HIERARCHY.iter().map(|e| chain_key(e.metric, e.canonical_source)).collect();

        for publication in publications {
            for value in &publication.indicators {
                if !registered_metrics.contains(value.metric.as_str()) {
                    extra_metrics.insert(value.metric.clone());
                }
                let chain = chain_key(&value.metric, &value.source);
                if !registered_chains.contains(&chain) {
                    extra_chains.insert(chain);
                }
            }
        }

        let mut metric_labels: Vec<String> = HIERARCHY.iter().map(|e| e.metric.to_string()).collect();
        metric_labels.extend(extra_metrics);
        let mut chain_labels: Vec<String> =
            HIERARCHY.iter().map(|e| chain_key(e.metric, e.canonical_source)).collect();
        chain_labels.extend(extra_chains);

        LabelSpace { metric_labels, chain_labels }
    }

    /// Ordered dimension labels for a tier, including the trailing
    /// `scopus_citations` dimension.
    pub fn labels(&self, tier: Tier) -> Result<Vec<String>, StatsError> {
        let mut labels: Vec<String> = match tier {
            Tier::Category => IndicatorCategory::ALL.iter().map(|c| c.token().to_string()).collect(),
            Tier::Metric => self.metric_labels.clone(),
            Tier::Source => self.chain_labels.clone(),
            Tier::Author => return Err(StatsError::UnsupportedTier(Tier::Author)),
        };
        labels.push(SCOPUS_LABEL.to_string());
        Ok(labels)
    }
}

/// A set of per-publication (or per-candidate, for the author tier) indicator
/// vectors with a fixed dimension order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorVectorSet {
    pub tier: Tier,
    pub labels: Vec<String>,
    /// One key per row: publication id, or candidate id for the author tier.
    pub row_keys: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl IndicatorVectorSet {
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }
}

/// Builds one vector per publication at the given tier, deriving the label
/// space from the same publications. Missing indicators contribute zero.
pub fn build_vectors(
    publications: &[&PublicationRecord],
    tier: Tier,
) -> Result<IndicatorVectorSet, StatsError> {
    let space = LabelSpace::from_publications(publications.iter().copied());
    build_vectors_in(publications, tier, &space)
}

/// Like [`build_vectors`] but with an externally fixed label space, so that
/// vectors for different fields share dimensions.
pub fn build_vectors_in(
    publications: &[&PublicationRecord],
    tier: Tier,
    space: &LabelSpace,
) -> Result<IndicatorVectorSet, StatsError> {
    let labels = space.labels(tier)?;
    let index_of = |label: &str| labels.iter().position(|l| l == label);

    let mut rows = Vec::with_capacity(publications.len());
    let mut row_keys = Vec::with_capacity(publications.len());
    for publication in publications {
        let mut row = vec![0.0; labels.len()];
        for value in &publication.indicators {
            let label = match tier {
                Tier::Category => value.category.token().to_string(),
                Tier::Metric => value.metric.clone(),
                Tier::Source => chain_key(&value.metric, &value.source),
                Tier::Author => unreachable!("rejected by labels()"),
            };
            let idx = index_of(&label).ok_or(StatsError::LabelMismatch)?;
            row[idx] += value.count as f64;
        }
        row[labels.len() - 1] = publication.scopus_citations.unwrap_or(0) as f64;
        row_keys.push(publication.id.clone());
        rows.push(row);
    }

    Ok(IndicatorVectorSet { tier, labels, row_keys, rows })
}
