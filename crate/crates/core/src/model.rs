//! Shared domain types and their validation. No I/O happens here.
//!
//! All types are immutable value objects after construction and safe to share
//! across threads.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The two academic levels a candidate can apply to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcademicLevel {
    FullProfessor,
    AssociateProfessor,
}

impl AcademicLevel {
    pub const ALL: [AcademicLevel; 2] = [AcademicLevel::FullProfessor, AcademicLevel::AssociateProfessor];

    /// Short token used in file formats and CLI flags.
    pub fn token(&self) -> &'static str {
        match self {
            AcademicLevel::FullProfessor => "full",
            AcademicLevel::AssociateProfessor => "associate",
        }
    }

    pub fn from_token(s: &str) -> Option<AcademicLevel> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "full-professor" | "fullprofessor" | "1" => Some(AcademicLevel::FullProfessor),
            "associate" | "associate-professor" | "associateprofessor" | "2" => {
                Some(AcademicLevel::AssociateProfessor)
            }
            _ => None,
        }
    }
}

impl fmt::Display for AcademicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The five coarse discipline groups used to pick representative fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MacroField {
    BiomedicalHealth,
    LifeEarth,
    MathCs,
    NatSciEng,
    SocSciHum,
}

impl MacroField {
    pub const ALL: [MacroField; 5] = [
        MacroField::BiomedicalHealth,
        MacroField::LifeEarth,
        MacroField::MathCs,
        MacroField::NatSciEng,
        MacroField::SocSciHum,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            MacroField::BiomedicalHealth => "biomedical-health",
            MacroField::LifeEarth => "life-earth",
            MacroField::MathCs => "math-cs",
            MacroField::NatSciEng => "natsci-eng",
            MacroField::SocSciHum => "socsci-hum",
        }
    }

    pub fn from_token(s: &str) -> Option<MacroField> {
        MacroField::ALL.iter().copied().find(|m| m.token() == s.trim())
    }
}

impl fmt::Display for MacroField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Built-in map from recruitment field code to macro field.
///
/// Codes are grouped by the leading two-digit area; a handful of areas span
/// two macro fields, so the table is kept explicit per prefix.
const FIELD_MACRO_TABLE: &[(&str, MacroField)] = &[
    // area 01 (mathematics and informatics)
    ("01-A1", MacroField::MathCs), ("01-A2", MacroField::MathCs), ("01-A3", MacroField::MathCs),
    ("01-A4", MacroField::MathCs), ("01-A5", MacroField::MathCs), ("01-A6", MacroField::MathCs),
    ("01-B1", MacroField::MathCs),
    // areas 02-03 (physics, chemistry)
    ("02-A1", MacroField::NatSciEng), ("02-A2", MacroField::NatSciEng), ("02-B1", MacroField::NatSciEng),
    ("02-B2", MacroField::NatSciEng), ("02-C1", MacroField::NatSciEng), ("02-D1", MacroField::NatSciEng),
    ("03-A1", MacroField::NatSciEng), ("03-A2", MacroField::NatSciEng), ("03-B1", MacroField::NatSciEng),
    ("03-B2", MacroField::NatSciEng), ("03-C1", MacroField::NatSciEng), ("03-C2", MacroField::NatSciEng),
    ("03-D1", MacroField::NatSciEng), ("03-D2", MacroField::NatSciEng),
    // area 04 (earth sciences)
    ("04-A1", MacroField::LifeEarth), ("04-A2", MacroField::LifeEarth), ("04-A3", MacroField::LifeEarth),
    ("04-A4", MacroField::LifeEarth),
    // area 05 (biology)
    ("05-A1", MacroField::BiomedicalHealth), ("05-A2", MacroField::BiomedicalHealth),
    ("05-B1", MacroField::BiomedicalHealth), ("05-B2", MacroField::BiomedicalHealth),
    ("05-C1", MacroField::BiomedicalHealth), ("05-D1", MacroField::BiomedicalHealth),
    ("05-E1", MacroField::BiomedicalHealth), ("05-E2", MacroField::BiomedicalHealth),
    ("05-E3", MacroField::BiomedicalHealth), ("05-F1", MacroField::BiomedicalHealth),
    ("05-G1", MacroField::BiomedicalHealth), ("05-H1", MacroField::BiomedicalHealth),
    ("05-H2", MacroField::BiomedicalHealth), ("05-I1", MacroField::BiomedicalHealth),
    ("05-I2", MacroField::BiomedicalHealth),
    // area 06 (medicine)
    ("06-A1", MacroField::BiomedicalHealth), ("06-A2", MacroField::BiomedicalHealth),
    ("06-A3", MacroField::BiomedicalHealth), ("06-A4", MacroField::BiomedicalHealth),
    ("06-B1", MacroField::BiomedicalHealth), ("06-C1", MacroField::BiomedicalHealth),
    ("06-D1", MacroField::BiomedicalHealth), ("06-D2", MacroField::BiomedicalHealth),
    ("06-D3", MacroField::BiomedicalHealth), ("06-D4", MacroField::BiomedicalHealth),
    ("06-D5", MacroField::BiomedicalHealth), ("06-D6", MacroField::BiomedicalHealth),
    ("06-E1", MacroField::BiomedicalHealth), ("06-E2", MacroField::BiomedicalHealth),
    ("06-E3", MacroField::BiomedicalHealth), ("06-F1", MacroField::BiomedicalHealth),
    ("06-F2", MacroField::BiomedicalHealth), ("06-F3", MacroField::BiomedicalHealth),
    ("06-F4", MacroField::BiomedicalHealth), ("06-G1", MacroField::BiomedicalHealth),
    ("06-H1", MacroField::BiomedicalHealth), ("06-I1", MacroField::BiomedicalHealth),
    ("06-L1", MacroField::BiomedicalHealth), ("06-M1", MacroField::BiomedicalHealth),
    ("06-M2", MacroField::BiomedicalHealth), ("06-N1", MacroField::BiomedicalHealth),
    ("06-N2", MacroField::BiomedicalHealth),
    // area 07 (agriculture and veterinary)
    ("07-A1", MacroField::LifeEarth), ("07-B1", MacroField::LifeEarth), ("07-B2", MacroField::LifeEarth),
    ("07-C1", MacroField::LifeEarth), ("07-D1", MacroField::LifeEarth), ("07-E1", MacroField::LifeEarth),
    ("07-F1", MacroField::LifeEarth), ("07-G1", MacroField::LifeEarth), ("07-H1", MacroField::LifeEarth),
    ("07-H2", MacroField::LifeEarth), ("07-H3", MacroField::LifeEarth), ("07-H4", MacroField::LifeEarth),
    ("07-H5", MacroField::LifeEarth), ("07-I1", MacroField::LifeEarth),
    // areas 08-09 (civil engineering and architecture, industrial and information engineering)
    ("08-A1", MacroField::NatSciEng), ("08-A2", MacroField::NatSciEng), ("08-A3", MacroField::NatSciEng),
    ("08-A4", MacroField::NatSciEng), ("08-B1", MacroField::NatSciEng), ("08-B2", MacroField::NatSciEng),
    ("08-B3", MacroField::NatSciEng), ("08-C1", MacroField::NatSciEng), ("08-D1", MacroField::NatSciEng),
    ("08-E1", MacroField::NatSciEng), ("08-E2", MacroField::NatSciEng), ("08-F1", MacroField::NatSciEng),
    ("09-A1", MacroField::NatSciEng), ("09-A2", MacroField::NatSciEng), ("09-A3", MacroField::NatSciEng),
    ("09-B1", MacroField::NatSciEng), ("09-B2", MacroField::NatSciEng), ("09-B3", MacroField::NatSciEng),
    ("09-C1", MacroField::NatSciEng), ("09-C2", MacroField::NatSciEng), ("09-D1", MacroField::NatSciEng),
    ("09-D2", MacroField::NatSciEng), ("09-D3", MacroField::NatSciEng), ("09-E1", MacroField::NatSciEng),
    ("09-E2", MacroField::NatSciEng), ("09-E3", MacroField::NatSciEng), ("09-E4", MacroField::NatSciEng),
    ("09-F1", MacroField::NatSciEng), ("09-F2", MacroField::NatSciEng), ("09-G1", MacroField::NatSciEng),
    ("09-G2", MacroField::NatSciEng), ("09-H1", MacroField::NatSciEng),
    // areas 10-14 (humanities, history/philosophy, law, economics/statistics, political and social sciences)
    ("10-A1", MacroField::SocSciHum), ("10-B1", MacroField::SocSciHum), ("10-C1", MacroField::SocSciHum),
    ("10-D1", MacroField::SocSciHum), ("10-D2", MacroField::SocSciHum), ("10-D3", MacroField::SocSciHum),
    ("10-D4", MacroField::SocSciHum), ("10-E1", MacroField::SocSciHum), ("10-F1", MacroField::SocSciHum),
    ("10-F2", MacroField::SocSciHum), ("10-F3", MacroField::SocSciHum), ("10-F4", MacroField::SocSciHum),
    ("10-G1", MacroField::SocSciHum), ("10-H1", MacroField::SocSciHum), ("10-I1", MacroField::SocSciHum),
    ("10-L1", MacroField::SocSciHum), ("10-M1", MacroField::SocSciHum),
    ("11-A1", MacroField::SocSciHum), ("11-A2", MacroField::SocSciHum), ("11-A3", MacroField::SocSciHum),
    ("11-A4", MacroField::SocSciHum), ("11-A5", MacroField::SocSciHum), ("11-B1", MacroField::SocSciHum),
    ("11-C1", MacroField::SocSciHum), ("11-C2", MacroField::SocSciHum), ("11-C3", MacroField::SocSciHum),
    ("11-C4", MacroField::SocSciHum), ("11-C5", MacroField::SocSciHum), ("11-D1", MacroField::SocSciHum),
    ("11-D2", MacroField::SocSciHum), ("11-E1", MacroField::SocSciHum), ("11-E2", MacroField::SocSciHum),
    ("11-E3", MacroField::SocSciHum), ("11-E4", MacroField::SocSciHum),
    ("12-A1", MacroField::SocSciHum), ("12-B1", MacroField::SocSciHum), ("12-B2", MacroField::SocSciHum),
    ("12-C1", MacroField::SocSciHum), ("12-C2", MacroField::SocSciHum), ("12-D1", MacroField::SocSciHum),
    ("12-D2", MacroField::SocSciHum), ("12-E1", MacroField::SocSciHum), ("12-E2", MacroField::SocSciHum),
    ("12-E3", MacroField::SocSciHum), ("12-E4", MacroField::SocSciHum), ("12-F1", MacroField::SocSciHum),
    ("12-G1", MacroField::SocSciHum), ("12-G2", MacroField::SocSciHum), ("12-H1", MacroField::SocSciHum),
    ("12-H2", MacroField::SocSciHum), ("12-H3", MacroField::SocSciHum),
    ("13-A1", MacroField::SocSciHum), ("13-A2", MacroField::SocSciHum), ("13-A3", MacroField::SocSciHum),
    ("13-A4", MacroField::SocSciHum), ("13-A5", MacroField::SocSciHum), ("13-B1", MacroField::SocSciHum),
    ("13-B2", MacroField::SocSciHum), ("13-B3", MacroField::SocSciHum), ("13-B4", MacroField::SocSciHum),
    ("13-B5", MacroField::SocSciHum), ("13-C1", MacroField::SocSciHum), ("13-D1", MacroField::SocSciHum),
    ("13-D2", MacroField::SocSciHum), ("13-D3", MacroField::SocSciHum), ("13-D4", MacroField::SocSciHum),
    ("14-A1", MacroField::SocSciHum), ("14-A2", MacroField::SocSciHum), ("14-B1", MacroField::SocSciHum),
    ("14-B2", MacroField::SocSciHum), ("14-C1", MacroField::SocSciHum), ("14-C2", MacroField::SocSciHum),
    ("14-C3", MacroField::SocSciHum), ("14-D1", MacroField::SocSciHum),
];

/// Returns the built-in macro field for a recruitment field code, if mapped.
pub fn builtin_macro_field(code: &str) -> Option<MacroField> {
    FIELD_MACRO_TABLE.iter().find(|(c, _)| *c == code).map(|(_, m)| *m)
}

/// Iterator over the full built-in field-to-macro map, in table order.
pub fn builtin_field_macro_map() -> impl Iterator<Item = (&'static str, MacroField)> {
    FIELD_MACRO_TABLE.iter().copied()
}

/// A recruitment field code of shape `NN-XN` (e.g. `01-B1`) together with its
/// macro field, when known.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FieldCode {
    code: String,
    macro_field: Option<MacroField>,
}

impl FieldCode {
    /// Parses a field code, assigning the macro field from the built-in map
    /// when the code is listed there.
    pub fn new(code: &str) -> Result<FieldCode, ModelError> {
        let code = code.trim();
        if !Self::valid_shape(code) {
            return Err(ModelError::InvalidFieldCode(code.to_string()));
        }
        Ok(FieldCode { code: code.to_string(), macro_field: builtin_macro_field(code) })
    }

    /// Like [`FieldCode::new`] but with an explicit macro field, for codes that
    /// are not in the built-in map. Rejects assignments contradicting the map.
    pub fn with_macro(code: &str, macro_field: MacroField) -> Result<FieldCode, ModelError> {
        let code = code.trim();
        if !Self::valid_shape(code) {
            return Err(ModelError::InvalidFieldCode(code.to_string()));
        }
        match builtin_macro_field(code) {
            Some(m) if m != macro_field => Err(ModelError::InconsistentMacroField {
                code: code.to_string(),
                expected: m,
                got: macro_field,
            }),
            _ => Ok(FieldCode { code: code.to_string(), macro_field: Some(macro_field) }),
        }
    }

    fn valid_shape(code: &str) -> bool {
        let b = code.as_bytes();
        b.len() == 5
            && b[0].is_ascii_digit()
            && b[1].is_ascii_digit()
            && b[2] == b'-'
            && b[3].is_ascii_uppercase()
            && b[4].is_ascii_digit()
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn macro_field(&self) -> Option<MacroField> {
        self.macro_field
    }
}

impl fmt::Display for FieldCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl TryFrom<String> for FieldCode {
    type Error = ModelError;
    fn try_from(s: String) -> Result<FieldCode, ModelError> {
        FieldCode::new(&s)
    }
}

impl From<FieldCode> for String {
    fn from(f: FieldCode) -> String {
        f.code
    }
}

/// The five indicator categories of the category-metric-source hierarchy.
///
/// The set is closed: vector dimensionality in the stats module depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorCategory {
    Usage,
    Captures,
    Mentions,
    SocialMedia,
    Citations,
}

impl IndicatorCategory {
    pub const ALL: [IndicatorCategory; 5] = [
        IndicatorCategory::Usage,
        IndicatorCategory::Captures,
        IndicatorCategory::Mentions,
        IndicatorCategory::SocialMedia,
        IndicatorCategory::Citations,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            IndicatorCategory::Usage => "usage",
            IndicatorCategory::Captures => "captures",
            IndicatorCategory::Mentions => "mentions",
            IndicatorCategory::SocialMedia => "social-media",
            IndicatorCategory::Citations => "citations",
        }
    }

    pub fn from_token(s: &str) -> Option<IndicatorCategory> {
        IndicatorCategory::ALL.iter().copied().find(|c| c.token() == s.trim())
    }
}

impl fmt::Display for IndicatorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One row of the registered category-metric-source hierarchy.
#[derive(Debug, Clone, Copy)]
pub struct HierarchyEntry {
    pub category: IndicatorCategory,
    pub metric: &'static str,
    pub canonical_source: &'static str,
}

/// The registered hierarchy: eleven metrics, each under exactly one category,
/// with the canonical source it is tracked on. Metrics outside this table are
/// accepted but flagged. Order here fixes the metric-tier dimension order.
pub const HIERARCHY: &[HierarchyEntry] = &[
    HierarchyEntry { category: IndicatorCategory::Captures, metric: "readers", canonical_source: "mendeley" },
    HierarchyEntry { category: IndicatorCategory::Captures, metric: "export-saves", canonical_source: "ebsco" },
    HierarchyEntry { category: IndicatorCategory::Mentions, metric: "blog-mentions", canonical_source: "blog" },
    HierarchyEntry { category: IndicatorCategory::Mentions, metric: "comments", canonical_source: "reddit" },
    HierarchyEntry { category: IndicatorCategory::Mentions, metric: "economic-blog-mentions", canonical_source: "blog" },
    HierarchyEntry { category: IndicatorCategory::Mentions, metric: "links", canonical_source: "wikipedia" },
    HierarchyEntry { category: IndicatorCategory::Mentions, metric: "news-mentions", canonical_source: "news" },
    HierarchyEntry { category: IndicatorCategory::Mentions, metric: "reviews", canonical_source: "amazon" },
    HierarchyEntry { category: IndicatorCategory::SocialMedia, metric: "+1s", canonical_source: "google-plus" },
    HierarchyEntry { category: IndicatorCategory::SocialMedia, metric: "shares-likes-comments", canonical_source: "facebook" },
    HierarchyEntry { category: IndicatorCategory::SocialMedia, metric: "tweets", canonical_source: "twitter" },
];

/// Looks up the registered category for a metric key.
pub fn registered_category(metric: &str) -> Option<IndicatorCategory> {
    HIERARCHY.iter().find(|e| e.metric == metric).map(|e| e.category)
}

/// A single indicator count located in the category-metric-source hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndicatorValue {
    pub category: IndicatorCategory,
    pub metric: String,
    pub source: String,
    pub count: u64,
}

impl IndicatorValue {
    /// Builds an indicator value for a registered metric; the category comes
    /// from the hierarchy table, so it cannot be inconsistent.
    pub fn registered(metric: &str, source: &str, count: u64) -> Result<IndicatorValue, ModelError> {
        let category =
            registered_category(metric).ok_or_else(|| ModelError::UnregisteredMetric(metric.to_string()))?;
        Ok(IndicatorValue { category, metric: metric.to_string(), source: source.to_string(), count })
    }

    /// Builds an indicator value with an explicit category. Used for metrics
    /// outside the registered hierarchy, which are preserved verbatim; a
    /// registered metric must carry its registered category.
    pub fn with_category(
        category: IndicatorCategory,
        metric: &str,
        source: &str,
        count: u64,
    ) -> Result<IndicatorValue, ModelError> {
        if let Some(expected) = registered_category(metric) {
            if expected != category {
                return Err(ModelError::InconsistentHierarchy {
                    metric: metric.to_string(),
                    claimed: category,
                    registered: expected,
                });
            }
        }
        Ok(IndicatorValue { category, metric: metric.to_string(), source: source.to_string(), count })
    }

    /// True when the metric is in the registered hierarchy table.
    pub fn is_registered(&self) -> bool {
        registered_category(&self.metric).is_some()
    }

    /// True when the metric is registered and this source is its canonical one.
    pub fn has_canonical_source(&self) -> bool {
        HIERARCHY
            .iter()
            .any(|e| e.metric == self.metric && e.canonical_source == self.source)
    }
}

/// One bibliographic entry of a candidate's publication list.
///
/// `scopus_citations` is the citation-index count attached during enrichment
/// and is kept separate from any `Citations`-category altmetric values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scopus_citations: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indicators: Vec<IndicatorValue>,
}

impl PublicationRecord {
    /// Sum of indicator counts under one category for this publication.
    pub fn category_sum(&self, category: IndicatorCategory) -> u64 {
        self.indicators.iter().filter(|v| v.category == category).map(|v| v.count).sum()
    }
}

/// Outcome of the peer evaluation for one application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QualificationOutcome {
    Qualified,
    NotQualified,
}

impl QualificationOutcome {
    pub fn token(&self) -> &'static str {
        match self {
            QualificationOutcome::Qualified => "Qualified",
            QualificationOutcome::NotQualified => "NotQualified",
        }
    }

    pub fn from_token(s: &str) -> Option<QualificationOutcome> {
        match s.trim() {
            "Qualified" => Some(QualificationOutcome::Qualified),
            "NotQualified" => Some(QualificationOutcome::NotQualified),
            _ => None,
        }
    }
}

impl fmt::Display for QualificationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A scholar's application to one (field, level), with full publication list.
///
/// The outcome is attached from the outcome file after parsing; a profile must
/// have one before it can enter classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateProfile {
    pub id: String,
    pub field: FieldCode,
    pub level: AcademicLevel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<QualificationOutcome>,
    pub publications: Vec<PublicationRecord>,
}

/// Which counts an h-index score was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HIndexBasis {
    ScopusCitations,
    Category(IndicatorCategory),
}

/// An author-level h-index score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HIndexScore {
    pub basis: HIndexBasis,
    pub h: u32,
}

/// A single invariant violation found by [`validate_profile`].
///
/// `Warning`-severity entries flag data that is preserved but unusual (unknown
/// metrics, non-canonical sources, exact duplicate titles); `Error` entries
/// break a hard invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    InvalidDoi { publication: String, doi: String },
    DuplicatePublicationId { publication: String },
    InconsistentHierarchy { publication: String, metric: String },
    NoPublications,
    UnknownMetric { publication: String, metric: String },
    UnknownSource { publication: String, metric: String, source: String },
    DuplicateTitle { title: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::InvalidDoi { .. }
            | Violation::DuplicatePublicationId { .. }
            | Violation::InconsistentHierarchy { .. }
            | Violation::NoPublications => Severity::Error,
            Violation::UnknownMetric { .. }
            | Violation::UnknownSource { .. }
            | Violation::DuplicateTitle { .. } => Severity::Warning,
        }
    }
}

/// Checks every profile invariant and returns all violations found. Pure and
/// idempotent; an empty list means the profile is valid.
pub fn validate_profile(profile: &CandidateProfile) -> Vec<Violation> {
    let mut violations = Vec::new();

    if profile.publications.is_empty() {
        violations.push(Violation::NoPublications);
    }

    let mut seen_ids = BTreeSet::new();
    let mut seen_titles = BTreeSet::new();
    for publication in &profile.publications {
        if !seen_ids.insert(publication.id.as_str()) {
            violations.push(Violation::DuplicatePublicationId { publication: publication.id.clone() });
        }
        let normalized_title = publication.title.trim().to_lowercase();
        if !normalized_title.is_empty() && !seen_titles.insert(normalized_title) {
            violations.push(Violation::DuplicateTitle { title: publication.title.clone() });
        }
        if let Some(doi) = &publication.doi {
            if !doi.starts_with("10.") {
                violations.push(Violation::InvalidDoi {
                    publication: publication.id.clone(),
                    doi: doi.clone(),
                });
            }
        }
        for value in &publication.indicators {
            match registered_category(&value.metric) {
                Some(expected) if expected != value.category => {
                    violations.push(Violation::InconsistentHierarchy {
                        publication: publication.id.clone(),
                        metric: value.metric.clone(),
                    });
                }
                Some(_) => {
                    if !value.has_canonical_source() {
                        violations.push(Violation::UnknownSource {
                            publication: publication.id.clone(),
                            metric: value.metric.clone(),
                            source: value.source.clone(),
                        });
                    }
                }
                None => {
                    violations.push(Violation::UnknownMetric {
                        publication: publication.id.clone(),
                        metric: value.metric.clone(),
                    });
                }
            }
        }
    }

    violations
}

/// True when the profile has no `Error`-severity violations.
pub fn is_valid_profile(profile: &CandidateProfile) -> bool {
    validate_profile(profile).iter().all(|v| v.severity() != Severity::Error)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("field code `{0}` does not match the NN-XN shape")]
    InvalidFieldCode(String),
    #[error("field code `{code}` is mapped to {expected} but {got} was given")]
    InconsistentMacroField { code: String, expected: MacroField, got: MacroField },
    #[error("metric `{0}` is not in the registered hierarchy")]
    UnregisteredMetric(String),
    #[error("metric `{metric}` is registered under {registered}, not {claimed}")]
    InconsistentHierarchy { metric: String, claimed: IndicatorCategory, registered: IndicatorCategory },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pub_record(id: &str, title: &str, doi: Option<&str>) -> PublicationRecord {
        PublicationRecord {
            id: id.to_string(),
            title: title.to_string(),
            authors: vec!["Doe J.".to_string()],
            venue: Some("Journal of X".to_string()),
            year: Some(2015),
            doi: doi.map(|d| d.to_string()),
            scopus_citations: None,
            indicators: Vec::new(),
        }
    }

    fn profile(pubs: Vec<PublicationRecord>) -> CandidateProfile {
        CandidateProfile {
            id: "c1".to_string(),
            field: FieldCode::new("01-B1").unwrap(),
            level: AcademicLevel::FullProfessor,
            outcome: Some(QualificationOutcome::Qualified),
            publications: pubs,
        }
    }

    #[test]
    fn macro_table_covers_187_fields() {
        assert_eq!(FIELD_MACRO_TABLE.len(), 187);
        // spot checks against the published mapping
        assert_eq!(builtin_macro_field("01-B1"), Some(MacroField::MathCs));
        assert_eq!(builtin_macro_field("04-A1"), Some(MacroField::LifeEarth));
        assert_eq!(builtin_macro_field("06-N1"), Some(MacroField::BiomedicalHealth));
        assert_eq!(builtin_macro_field("09-H1"), Some(MacroField::NatSciEng));
        assert_eq!(builtin_macro_field("13-A1"), Some(MacroField::SocSciHum));
        assert_eq!(builtin_macro_field("11-E1"), Some(MacroField::SocSciHum));
        assert_eq!(builtin_macro_field("99-Z9"), None);
    }

    #[test]
    fn macro_table_has_no_duplicates() {
        let codes: BTreeSet<&str> = FIELD_MACRO_TABLE.iter().map(|(c, _)| *c).collect();
        assert_eq!(codes.len(), FIELD_MACRO_TABLE.len());
    }

    #[test]
    fn field_code_shape_is_enforced() {
        assert!(FieldCode::new("01-B1").is_ok());
        assert!(FieldCode::new("1-B1").is_err());
        assert!(FieldCode::new("01-b1").is_err());
        assert!(FieldCode::new("01B1x").is_err());
        assert!(FieldCode::new("").is_err());
    }

    #[test]
    fn field_code_rejects_contradicting_macro() {
        let err = FieldCode::with_macro("01-B1", MacroField::SocSciHum).unwrap_err();
        assert!(matches!(err, ModelError::InconsistentMacroField { .. }));
        // unmapped codes accept any macro
        let f = FieldCode::with_macro("99-Z9", MacroField::SocSciHum).unwrap();
        assert_eq!(f.macro_field(), Some(MacroField::SocSciHum));
    }

    #[test]
    fn hierarchy_registers_eleven_metrics_once_each() {
        assert_eq!(HIERARCHY.len(), 11);
        let metrics: BTreeSet<&str> = HIERARCHY.iter().map(|e| e.metric).collect();
        assert_eq!(metrics.len(), 11);
        assert_eq!(registered_category("readers"), Some(IndicatorCategory::Captures));
        assert_eq!(registered_category("tweets"), Some(IndicatorCategory::SocialMedia));
        assert_eq!(registered_category("blog-mentions"), Some(IndicatorCategory::Mentions));
        assert_eq!(registered_category("hovers"), None);
    }

    #[test]
    fn indicator_value_constructors_enforce_hierarchy() {
        let v = IndicatorValue::registered("readers", "mendeley", 12).unwrap();
        assert_eq!(v.category, IndicatorCategory::Captures);
        assert!(v.is_registered());
        assert!(v.has_canonical_source());

        let err = IndicatorValue::with_category(IndicatorCategory::Usage, "readers", "mendeley", 1);
        assert!(err.is_err());

        let unknown = IndicatorValue::with_category(IndicatorCategory::Usage, "hovers", "widgetco", 3).unwrap();
        assert!(!unknown.is_registered());
    }

    #[test]
    fn negative_counts_are_rejected_at_the_boundary() {
        // counts are unsigned by construction; a negative count cannot deserialize
        let err = serde_json::from_str::<IndicatorValue>(
            r#"{"category":"captures","metric":"readers","source":"mendeley","count":-3}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn valid_profile_yields_no_violations() {
        let p = profile(vec![pub_record("p1", "A Title", Some("10.1000/xyz123")), pub_record("p2", "Another", None)]);
        assert_eq!(validate_profile(&p), Vec::new());
        // idempotent and pure
        assert_eq!(validate_profile(&p), validate_profile(&p));
    }

    #[test]
    fn invalid_doi_is_reported() {
        let p = profile(vec![pub_record("p1", "A Title", Some("abc"))]);
        let violations = validate_profile(&p);
        assert_eq!(
            violations,
            vec![Violation::InvalidDoi { publication: "p1".to_string(), doi: "abc".to_string() }]
        );
    }

    #[test]
    fn duplicate_publication_id_is_reported() {
        let p = profile(vec![pub_record("p1", "A Title", None), pub_record("p1", "Other Title", None)]);
        let violations = validate_profile(&p);
        assert!(violations.contains(&Violation::DuplicatePublicationId { publication: "p1".to_string() }));
    }

    #[test]
    fn duplicate_title_is_flagged_as_warning() {
        let p = profile(vec![pub_record("p1", "Same Title", None), pub_record("p2", "same title", None)]);
        let violations = validate_profile(&p);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].severity(), Severity::Warning);
        assert!(is_valid_profile(&p));
    }

    #[test]
    fn unknown_metric_is_flagged_not_fatal() {
        let mut record = pub_record("p1", "A Title", None);
        record.indicators.push(IndicatorValue::with_category(IndicatorCategory::Usage, "hovers", "x", 3).unwrap());
        let p = profile(vec![record]);
        let violations = validate_profile(&p);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].severity(), Severity::Warning);
    }

    #[test]
    fn level_and_outcome_tokens_round_trip() {
        for level in AcademicLevel::ALL {
            assert_eq!(AcademicLevel::from_token(level.token()), Some(level));
        }
        for outcome in [QualificationOutcome::Qualified, QualificationOutcome::NotQualified] {
            assert_eq!(QualificationOutcome::from_token(outcome.token()), Some(outcome));
        }
        assert_eq!(QualificationOutcome::from_token("Maybe"), None);
    }
}
