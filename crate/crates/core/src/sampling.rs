//! Representative-field selection from per-field application and publication
//! counts.
//!
//! Four variables are tracked per field: applications and publications at each
//! academic level. Each variable is min-max normalized across fields; a
//! field's spread term for a variable is the squared deviation of its
//! normalized value from the cross-field mean of normalized values, and its
//! AP score is the mean of the four spread terms. Per macro field, the field
//! with the maximum AP score is selected, with explicit overrides available
//! for judgment calls (e.g. preferring a non-bibliometric field).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::model::{builtin_field_macro_map, builtin_macro_field, AcademicLevel, CandidateProfile, MacroField};

#[derive(Debug, thiserror::Error)]
pub enum SamplingError {
    #[error("AP scores need at least 2 fields, got {0}")]
    InsufficientFields(usize),
    #[error("field `{0}` has no macro-field mapping")]
    UnmappedField(String),
    #[error("override for {macro_field} names `{field}`, which is not among that macro-field's fields")]
    UnknownOverrideField { macro_field: MacroField, field: String },
    #[error("macro-map line {line}: {message}")]
    MalformedMacroMap { line: usize, message: String },
    #[error("overrides line {line}: {message}")]
    MalformedOverride { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-field application/publication counts and the derived AP score.
///
/// `a1`/`p1` count the full-professor level, `a2`/`p2` the associate level.
/// The `sigma2_*` terms and `ap` are zero until [`ap_scores`] fills them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldCounts {
    pub field: String,
    pub a1: u64,
    pub p1: u64,
    pub a2: u64,
    pub p2: u64,
    pub sigma2_a1: f64,
    pub sigma2_p1: f64,
    pub sigma2_a2: f64,
    pub sigma2_p2: f64,
    pub ap: f64,
}

impl FieldCounts {
    pub fn new(field: &str, a1: u64, p1: u64, a2: u64, p2: u64) -> FieldCounts {
        FieldCounts {
            field: field.to_string(),
            a1,
            p1,
            a2,
            p2,
            sigma2_a1: 0.0,
            sigma2_p1: 0.0,
            sigma2_a2: 0.0,
            sigma2_p2: 0.0,
            ap: 0.0,
        }
    }

    /// Builds a pre-scored entry, for feeding [`select_fields`] with known AP
    /// values.
    pub fn with_ap(field: &str, ap: f64) -> FieldCounts {
        FieldCounts { ap, ..FieldCounts::new(field, 0, 0, 0, 0) }
    }
}

/// Counts applications (distinct candidates per level) and publications per
/// field. Fields are returned in code order.
pub fn field_counts(profiles: &[CandidateProfile]) -> Vec<FieldCounts> {
    let mut applications: BTreeMap<String, BTreeSet<(String, AcademicLevel)>> = BTreeMap::new();
    let mut publications: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    for profile in profiles {
        let field = profile.field.code().to_string();
        let fresh = applications
            .entry(field.clone())
            .or_default()
            .insert((profile.id.clone(), profile.level));
        let slot = match profile.level {
            AcademicLevel::FullProfessor => 0,
            AcademicLevel::AssociateProfessor => 1,
        };
        if fresh {
            publications.entry(field).or_default()[slot] += profile.publications.len() as u64;
        }
    }
    applications
        .into_iter()
        .map(|(field, apps)| {
            let a1 = apps.iter().filter(|(_, l)| *l == AcademicLevel::FullProfessor).count() as u64;
            let a2 = apps.len() as u64 - a1;
            let [p1, p2] = publications.get(&field).copied().unwrap_or_default();
            FieldCounts::new(&field, a1, p1, a2, p2)
        })
        .collect()
}

fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - min) / (max - min)).collect()
}

fn spread_terms(values: &[f64]) -> Vec<f64> {
    let normalized = min_max_normalize(values);
    let mean = normalized.iter().sum::<f64>() / normalized.len() as f64;
    normalized.iter().map(|v| (v - mean).powi(2)).collect()
}

/// Fills the four spread terms and the AP score for every field.
///
/// Requires at least two fields: the deviation from a cross-field mean needs
/// a population.
pub fn ap_scores(counts: Vec<FieldCounts>) -> Result<Vec<FieldCounts>, SamplingError> {
    if counts.len() < 2 {
        return Err(SamplingError::InsufficientFields(counts.len()));
    }
    let column = |f: fn(&FieldCounts) -> u64| counts.iter().map(|c| f(c) as f64).collect::<Vec<f64>>();
    let sigma2_a1 = spread_terms(&column(|c| c.a1));
    let sigma2_p1 = spread_terms(&column(|c| c.p1));
    let sigma2_a2 = spread_terms(&column(|c| c.a2));
    let sigma2_p2 = spread_terms(&column(|c| c.p2));
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| FieldCounts {
            sigma2_a1: sigma2_a1[i],
            sigma2_p1: sigma2_p1[i],
            sigma2_a2: sigma2_a2[i],
            sigma2_p2: sigma2_p2[i],
            ap: (sigma2_a1[i] + sigma2_p1[i] + sigma2_a2[i] + sigma2_p2[i]) / 4.0,
            ..c
        })
        .collect())
}

/// Field-code-to-macro-field mapping, either the built-in table or one loaded
/// from a `field_code,macro_field` file.
#[derive(Debug, Clone)]
pub struct MacroMap {
    entries: BTreeMap<String, MacroField>,
}

impl MacroMap {
    pub fn builtin() -> MacroMap {
        MacroMap { entries: builtin_field_macro_map().map(|(c, m)| (c.to_string(), m)).collect() }
    }

    pub fn from_reader(reader: impl BufRead) -> Result<MacroMap, SamplingError> {
        let mut entries = BTreeMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "field_code,macro_field" {
                continue;
            }
            let (code, macro_token) = line.split_once(',').ok_or(SamplingError::MalformedMacroMap {
                line: i + 1,
                message: "expected `field_code,macro_field`".to_string(),
            })?;
            let macro_field =
                MacroField::from_token(macro_token).ok_or(SamplingError::MalformedMacroMap {
                    line: i + 1,
                    message: format!("unknown macro field `{macro_token}`"),
                })?;
            entries.insert(code.trim().to_string(), macro_field);
        }
        Ok(MacroMap { entries })
    }

    pub fn lookup(&self, code: &str) -> Option<MacroField> {
        self.entries.get(code).copied().or_else(|| builtin_macro_field(code))
    }

    /// The built-in table in `field_code,macro_field` form.
    pub fn builtin_csv() -> String {
        let mut out = String::from("field_code,macro_field\n");
        for (code, macro_field) in builtin_field_macro_map() {
            let _ = writeln!(out, "{code},{}", macro_field.token());
        }
        out
    }
}

/// Per-macro-field override: replaces the argmax winner with a named field.
pub type Overrides = BTreeMap<MacroField, String>;

/// Parses `macro_field,field_code` override lines.
pub fn overrides_from_reader(reader: impl BufRead) -> Result<Overrides, SamplingError> {
    let mut overrides = Overrides::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "macro_field,field_code" {
            continue;
        }
        let (macro_token, code) = line.split_once(',').ok_or(SamplingError::MalformedOverride {
            line: i + 1,
            message: "expected `macro_field,field_code`".to_string(),
        })?;
        let macro_field = MacroField::from_token(macro_token).ok_or(SamplingError::MalformedOverride {
            line: i + 1,
            message: format!("unknown macro field `{macro_token}`"),
        })?;
        overrides.insert(macro_field, code.trim().to_string());
    }
    Ok(overrides)
}

/// The chosen field for one macro field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub field: String,
    pub ap: f64,
    /// Present when an override displaced the natural argmax winner.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrode: Option<DisplacedWinner>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacedWinner {
    pub field: String,
    pub ap: f64,
}

/// One selected field per macro field present in the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selections: BTreeMap<MacroField, Selection>,
}

impl SelectionResult {
    pub fn selected_codes(&self) -> Vec<&str> {
        self.selections.values().map(|s| s.field.as_str()).collect()
    }

    /// Delimiter-separated report form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("macro_field,field,ap,overrode_field,overrode_ap\n");
        for (macro_field, selection) in &self.selections {
            let (of, oa) = match &selection.overrode {
                Some(d) => (d.field.clone(), format!("{}", d.ap)),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(out, "{},{},{},{},{}", macro_field.token(), selection.field, selection.ap, of, oa);
        }
        out
    }
}

/// Selects, per macro field, the field with the maximum AP score. Ties break
/// to the lexicographically smaller field code; overrides replace the winner
/// and record the displaced field.
pub fn select_fields(
    scored: &[FieldCounts],
    macro_map: &MacroMap,
    overrides: &Overrides,
) -> Result<SelectionResult, SamplingError> {
    let mut groups: BTreeMap<MacroField, Vec<&FieldCounts>> = BTreeMap::new();
    for counts in scored {
        let macro_field = macro_map
            .lookup(&counts.field)
            .ok_or_else(|| SamplingError::UnmappedField(counts.field.clone()))?;
        groups.entry(macro_field).or_default().push(counts);
    }

    let mut selections = BTreeMap::new();
    for (macro_field, fields) in groups {
        let winner = fields
            .iter()
            .copied()
            .max_by(|a, b| {
                a.ap.partial_cmp(&b.ap)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    // on equal AP prefer the lexicographically smaller code
                    .then_with(|| b.field.cmp(&a.field))
            })
            .expect("group is non-empty by construction");
        let selection = match overrides.get(&macro_field) {
            Some(override_code) => {
                let chosen = fields
                    .iter()
                    .copied()
                    .find(|f| &f.field == override_code)
                    .ok_or_else(|| SamplingError::UnknownOverrideField {
                        macro_field,
                        field: override_code.clone(),
                    })?;
                let overrode = (chosen.field != winner.field)
                    .then(|| DisplacedWinner { field: winner.field.clone(), ap: winner.ap });
                Selection { field: chosen.field.clone(), ap: chosen.ap, overrode }
            }
            None => Selection { field: winner.field.clone(), ap: winner.ap, overrode: None },
        };
        selections.insert(macro_field, selection);
    }
    Ok(SelectionResult { selections })
}
