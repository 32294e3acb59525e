//! The twelve registered feature configurations.
//!
//! Three indicator sets (citation counts, captures, all altmetric categories)
//! are combined into four article-level configurations, four h-index
//! configurations, and four combined configurations. Captures are never
//! combined with the full altmetric set inside one configuration, because the
//! full set already contains them.

use serde::{Deserialize, Serialize};

/// One feature dimension group available to configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureDescriptor {
    /// Summed citation-index counts (one dimension).
    ScopusCitations,
    /// Summed captures-category counts (one dimension).
    Captures,
    /// Per-category sums for all five altmetric categories (five dimensions).
    AllAltmetricCategories,
    /// h-index over citation-index counts (one dimension).
    HCitations,
    /// h-index over captures-category sums (one dimension).
    HCaptures,
    /// h-indexes over each of the five category sums (five dimensions).
    HAllCategories,
}

impl FeatureDescriptor {
    pub fn dimension_labels(&self) -> Vec<String> {
        use crate::model::IndicatorCategory;
        match self {
            FeatureDescriptor::ScopusCitations => vec!["scopus_citations".to_string()],
            FeatureDescriptor::Captures => vec!["captures".to_string()],
            FeatureDescriptor::AllAltmetricCategories => {
                IndicatorCategory::ALL.iter().map(|c| c.token().to_string()).collect()
            }
            FeatureDescriptor::HCitations => vec!["h_citations".to_string()],
            FeatureDescriptor::HCaptures => vec!["h_captures".to_string()],
            FeatureDescriptor::HAllCategories => IndicatorCategory::ALL
                .iter()
                .map(|c| format!("h_{}", c.token().replace('-', "_")))
                .collect(),
        }
    }
}

/// A registered feature configuration: a stable id plus its ordered feature
/// descriptors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    id: String,
    descriptors: Vec<FeatureDescriptor>,
}

impl FeatureConfig {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.descriptors
    }

    /// Ordered labels of the numeric dimensions this configuration produces.
    pub fn dimension_labels(&self) -> Vec<String> {
        self.descriptors.iter().flat_map(|d| d.dimension_labels()).collect()
    }
}

/// Returns the twelve registered configurations, in stable order with stable
/// ids.
pub fn feature_configs() -> Vec<FeatureConfig> {
    use FeatureDescriptor::*;
    let table: [(&str, &[FeatureDescriptor]); 12] = [
        // article-level indicators
        ("citations", &[ScopusCitations]),
        ("altmetrics", &[AllAltmetricCategories]),
        ("citations-captures", &[ScopusCitations, Captures]),
        ("citations-altmetrics", &[ScopusCitations, AllAltmetricCategories]),
        // h-index indicators
        ("h-citations", &[HCitations]),
        ("h-altmetrics", &[HAllCategories]),
        ("h-citations-h-captures", &[HCitations, HCaptures]),
        ("h-citations-h-altmetrics", &[HCitations, HAllCategories]),
        // combined article- and author-level indicators
        ("citations-h-citations", &[ScopusCitations, HCitations]),
        ("altmetrics-h-altmetrics", &[AllAltmetricCategories, HAllCategories]),
        ("citations-h-citations-captures-h-captures", &[ScopusCitations, HCitations, Captures, HCaptures]),
        (
            "citations-h-citations-altmetrics-h-altmetrics",
            &[ScopusCitations, HCitations, AllAltmetricCategories, HAllCategories],
        ),
    ];
    table
        .iter()
        .map(|(id, descriptors)| FeatureConfig { id: id.to_string(), descriptors: descriptors.to_vec() })
        .collect()
}

/// Looks up one registered configuration by id.
pub fn feature_config(id: &str) -> Option<FeatureConfig> {
    feature_configs().into_iter().find(|c| c.id() == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_twelve_stable_configs() {
        let configs = feature_configs();
        assert_eq!(configs.len(), 12);
        assert_eq!(configs, feature_configs());
        let ids: std::collections::BTreeSet<&str> = configs.iter().map(|c| c.id()).collect();
        assert_eq!(ids.len(), 12);
    }

    #[test]
    fn contains_citations_only_and_altmetrics_only() {
        assert!(feature_config("citations").is_some());
        assert!(feature_config("altmetrics").is_some());
        assert!(feature_config("bogus").is_none());
    }

    #[test]
    fn captures_never_combined_with_full_altmetric_set() {
        for config in feature_configs() {
            let has_captures = config
                .descriptors()
                .iter()
                .any(|d| matches!(d, FeatureDescriptor::Captures | FeatureDescriptor::HCaptures));
            let has_all = config.descriptors().iter().any(|d| {
                matches!(d, FeatureDescriptor::AllAltmetricCategories | FeatureDescriptor::HAllCategories)
            });
            assert!(!(has_captures && has_all), "config {} mixes captures with the full set", config.id());
        }
    }

    #[test]
    fn dimension_labels_match_descriptor_widths() {
        let config = feature_config("citations-h-citations-altmetrics-h-altmetrics").unwrap();
        assert_eq!(config.dimension_labels().len(), 1 + 1 + 5 + 5);
    }
}
