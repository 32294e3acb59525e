//! Parsing of corpus files into candidate profiles.
//!
//! Two input shapes are supported:
//!
//! * the **record line format**: one JSON object per line with keys
//!   `{candidate, field, level, title, authors, venue, year?, doi?}`, and
//! * plain-text **bibliographic lines** following the grammar
//!   `authors-list '(' year ')' '.' title '.' venue '.' [doi-token]`, with
//!   authors `;`-separated and the doi-token either `doi:`-prefixed or a DOI
//!   URL.
//!
//! Malformed lines are quarantined with their line numbers instead of
//! aborting the run; corpora are large and partially dirty.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::model::{AcademicLevel, CandidateProfile, FieldCode, PublicationRecord, QualificationOutcome};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("could not read the input stream: {0}")]
    UnreadableStream(#[from] std::io::Error),
    #[error("no well-formed records in the corpus")]
    EmptyCorpus,
    #[error("no title segment in bibliographic line")]
    MalformedRecord,
    #[error("line {line}: duplicate outcome for ({candidate}, {field}, {level})")]
    DuplicateOutcome { line: usize, candidate: String, field: String, level: AcademicLevel },
    #[error("line {line}: unknown outcome label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {message}")]
    InvalidLine { line: usize, message: String },
}

/// One record line: a single publication attributed to a (candidate, field,
/// level) application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub candidate: String,
    pub field: String,
    pub level: String,
    pub title: String,
    pub authors: Vec<String>,
    pub venue: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doi: Option<String>,
}

/// A quarantined input line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MalformedLine {
    pub line: usize,
    pub content: String,
    pub reason: String,
}

/// Output of [`parse_record_stream`]: grouped profiles plus the side report of
/// malformed lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub profiles: Vec<CandidateProfile>,
    pub malformed: Vec<MalformedLine>,
}

/// Strips `doi:`, `http(s)://doi.org/` and `dx.doi.org/` prefixes and
/// lowercases the suffix. DOIs are case-insensitive by standard.
pub fn normalize_doi(raw: &str) -> String {
    let mut s = raw.trim();
    for prefix in ["doi:", "DOI:", "https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "dx.doi.org/", "doi.org/"] {
        if let Some(rest) = s.strip_prefix(prefix) {
            s = rest;
            break;
        }
    }
    s.trim().to_lowercase()
}

/// Parses a record-line corpus into profiles grouped by (candidate, field,
/// level), preserving publication order. Malformed lines are collected into
/// the side report, never silently dropped.
pub fn parse_record_stream(reader: impl BufRead) -> Result<ParseOutcome, IngestError> {
    let mut groups: BTreeMap<(String, String, AcademicLevel), Vec<RecordLine>> = BTreeMap::new();
    let mut order: Vec<(String, String, AcademicLevel)> = Vec::new();
    let mut malformed = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let record: RecordLine = match serde_json::from_str(trimmed) {
            Ok(r) => r,
            Err(e) => {
                malformed.push(MalformedLine { line: i + 1, content: line.clone(), reason: e.to_string() });
                continue;
            }
        };
        let level = match AcademicLevel::from_token(&record.level) {
            Some(l) => l,
            None => {
                malformed.push(MalformedLine {
                    line: i + 1,
                    content: line.clone(),
                    reason: format!("unknown level `{}`", record.level),
                });
                continue;
            }
        };
        if FieldCode::new(&record.field).is_err() {
            malformed.push(MalformedLine {
                line: i + 1,
                content: line.clone(),
                reason: format!("invalid field code `{}`", record.field),
            });
            continue;
        }
        if record.title.trim().is_empty() {
            malformed.push(MalformedLine {
                line: i + 1,
                content: line,
                reason: "empty title".to_string(),
            });
            continue;
        }
        let key = (record.candidate.clone(), record.field.clone(), level);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(record);
    }

    if groups.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }

    let mut profiles = Vec::with_capacity(order.len());
    for key in order {
        let records = groups.remove(&key).expect("key recorded at insertion");
        let (candidate, field, level) = key;
        let publications = records
            .into_iter()
            .enumerate()
            .map(|(i, r)| PublicationRecord {
                id: format!("{candidate}:{field}:{}:{i}", level.token()),
                title: r.title.trim().to_string(),
                authors: r.authors,
                venue: Some(r.venue).filter(|v| !v.trim().is_empty()),
                year: r.year,
                doi: r.doi.map(|d| normalize_doi(&d)),
                scopus_citations: None,
                indicators: Vec::new(),
            })
            .collect();
        profiles.push(CandidateProfile {
            id: candidate,
            field: FieldCode::new(&field).expect("validated above"),
            level,
            outcome: None,
            publications,
        });
    }
    Ok(ParseOutcome { profiles, malformed })
}

/// Serializes profiles back to the record line format. Enrichment data
/// (citations, indicators) is not part of that format and is not emitted.
pub fn write_record_lines(profiles: &[CandidateProfile]) -> String {
    let mut out = String::new();
    for profile in profiles {
        for publication in &profile.publications {
            let line = RecordLine {
                candidate: profile.id.clone(),
                field: profile.field.code().to_string(),
                level: profile.level.token().to_string(),
                title: publication.title.clone(),
                authors: publication.authors.clone(),
                venue: publication.venue.clone().unwrap_or_default(),
                year: publication.year,
                doi: publication.doi.clone(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("record lines serialize"));
        }
    }
    out
}

/// Fields extracted from one bibliographic line; anything that cannot be
/// matched stays unknown.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PartialRecord {
    pub authors: Vec<String>,
    pub year: Option<i32>,
    pub title: String,
    pub venue: Option<String>,
    pub doi: Option<String>,
}

fn extract_doi_token(text: &str) -> (String, Option<String>) {
    let trimmed = text.trim_end();
    for marker in ["doi:", "DOI:", "https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/"] {
        if let Some(pos) = trimmed.rfind(marker) {
            let token = trimmed[pos..].trim_end_matches(['.', ' ']);
            // only take a trailing token; DOIs inline in a title stay put
            if trimmed[pos..].split_whitespace().count() == 1 {
                return (trimmed[..pos].trim_end().to_string(), Some(normalize_doi(token)));
            }
        }
    }
    (trimmed.to_string(), None)
}

/// Parses one bibliographic line following the grammar
/// `authors-list '(' year ')' '.' title '.' venue '.' [doi-token]`.
///
/// A line with no extractable title is malformed; all other fields degrade to
/// unknown.
pub fn parse_bib_line(text: &str) -> Result<PartialRecord, IngestError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(IngestError::MalformedRecord);
    }

    let (body, doi) = extract_doi_token(text);

    // split the `authors (year).` prefix if present
    let (authors, year, rest) = match find_year_prefix(&body) {
        Some((authors_part, year, rest)) => {
            let authors = authors_part
                .split(';')
                .map(|a| a.trim().trim_end_matches(',').to_string())
                .filter(|a| !a.is_empty())
                .collect();
            (authors, Some(year), rest)
        }
        None => (Vec::new(), None, body.as_str()),
    };

    // title is the first `. `-terminated segment, venue the remainder
    let rest = rest.trim();
    let (title, venue) = match rest.find(". ") {
        Some(pos) => {
            let title = rest[..pos].trim();
            let venue = rest[pos + 2..].trim().trim_end_matches('.').trim();
            (title, (!venue.is_empty()).then(|| venue.to_string()))
        }
        None => (rest.trim_end_matches('.').trim(), None),
    };
    if title.is_empty() {
        return Err(IngestError::MalformedRecord);
    }

    Ok(PartialRecord { authors, year, title: title.to_string(), venue, doi })
}

/// Finds `<authors> (<year>).` and returns (authors text, year, remainder).
fn find_year_prefix(body: &str) -> Option<(&str, i32, &str)> {
    let open = body.find('(')?;
    let close = body[open..].find(')').map(|p| open + p)?;
    let year: i32 = body[open + 1..close].trim().parse().ok()?;
    if !(1000..=9999).contains(&year) {
        return None;
    }
    let after = body[close + 1..].trim_start();
    let rest = after.strip_prefix('.')?;
    Some((body[..open].trim(), year, rest.trim_start()))
}

/// Parses a whole plain-text publication list into one profile, attributing
/// every line to the given (candidate, field, level).
pub fn parse_bib_list(
    text: &str,
    candidate: &str,
    field: &FieldCode,
    level: AcademicLevel,
) -> (Option<CandidateProfile>, Vec<MalformedLine>) {
    let mut publications = Vec::new();
    let mut malformed = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_bib_line(line) {
            Ok(partial) => {
                let index = publications.len();
                publications.push(PublicationRecord {
                    id: format!("{candidate}:{}:{}:{index}", field.code(), level.token()),
                    title: partial.title,
                    authors: partial.authors,
                    venue: partial.venue,
                    year: partial.year,
                    doi: partial.doi,
                    scopus_citations: None,
                    indicators: Vec::new(),
                });
            }
            Err(e) => {
                malformed.push(MalformedLine { line: i + 1, content: line.to_string(), reason: e.to_string() })
            }
        }
    }
    let profile = (!publications.is_empty()).then(|| CandidateProfile {
        id: candidate.to_string(),
        field: field.clone(),
        level,
        outcome: None,
        publications,
    });
    (profile, malformed)
}

/// Key of one outcome entry.
pub type OutcomeKey = (String, String, AcademicLevel);

/// Loads `candidate,field,level,outcome` lines. Duplicate keys and labels
/// outside the two class tokens are errors.
pub fn load_outcomes(reader: impl BufRead) -> Result<BTreeMap<OutcomeKey, QualificationOutcome>, IngestError> {
    let mut outcomes = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed == "candidate,field,level,outcome" {
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').collect();
        if parts.len() != 4 {
            return Err(IngestError::InvalidLine {
                line: i + 1,
                message: format!("expected 4 comma-separated values, got {}", parts.len()),
            });
        }
        let candidate = parts[0].trim().to_string();
        let field = parts[1].trim().to_string();
        let level = AcademicLevel::from_token(parts[2]).ok_or_else(|| IngestError::InvalidLine {
            line: i + 1,
            message: format!("unknown level `{}`", parts[2]),
        })?;
        let outcome = QualificationOutcome::from_token(parts[3]).ok_or_else(|| IngestError::UnknownLabel {
            line: i + 1,
            label: parts[3].trim().to_string(),
        })?;
        if outcomes.insert((candidate.clone(), field.clone(), level), outcome).is_some() {
            return Err(IngestError::DuplicateOutcome { line: i + 1, candidate, field, level });
        }
    }
    Ok(outcomes)
}

/// Attaches outcomes to profiles in place; returns the keys of profiles that
/// had no outcome entry.
pub fn attach_outcomes(
    profiles: &mut [CandidateProfile],
    outcomes: &BTreeMap<OutcomeKey, QualificationOutcome>,
) -> Vec<OutcomeKey> {
    let mut missing = Vec::new();
    for profile in profiles {
        let key = (profile.id.clone(), profile.field.code().to_string(), profile.level);
        match outcomes.get(&key) {
            Some(outcome) => profile.outcome = Some(*outcome),
            None => missing.push(key),
        }
    }
    missing
}

/// Manifest tying together the files of one corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub fields: Vec<String>,
    pub levels: Vec<String>,
    pub records: Vec<String>,
    #[serde(default)]
    pub bibs: Vec<BibListEntry>,
    pub outcomes: String,
}

/// One plain-text publication list and the application it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BibListEntry {
    pub path: String,
    pub candidate: String,
    pub field: String,
    pub level: String,
}

impl CorpusManifest {
    /// Checks that every referenced path exists relative to `base`.
    pub fn verify_paths(&self, base: &std::path::Path) -> Result<(), IngestError> {
        let mut paths: Vec<&str> = self.records.iter().map(|s| s.as_str()).collect();
        paths.extend(self.bibs.iter().map(|b| b.path.as_str()));
        paths.push(&self.outcomes);
        for path in paths {
            if !base.join(path).exists() {
                return Err(IngestError::InvalidLine {
                    line: 0,
                    message: format!("manifest references missing path `{path}`"),
                });
            }
        }
        Ok(())
    }
}
