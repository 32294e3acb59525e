//! In-memory triple store over a fixed schema, with deterministic N-Triples
//! export and a matching importer.
//!
//! The schema (documented in docs/schema.md) emits, per profile: one
//! application edge plus field and level literals; per publication: type,
//! title, creator link and venue, an optional DOI literal, one
//! integer-literal triple per (category, metric, source) indicator key, and
//! an optional citation-count literal. Exports are sorted by
//! (subject, predicate, object), so equal graphs serialize byte-identically.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::model::{CandidateProfile, IndicatorCategory, IndicatorValue};

const ID_BASE: &str = "http://qualimetrics.example/id/";
const NS_BASE: &str = "http://qualimetrics.example/ns/";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("publication `{0}` was already inserted")]
    DuplicateSubject(String),
    #[error("publication `{0}` is not in the graph")]
    UnknownPublication(String),
    #[error("could not write to the sink: {0}")]
    SinkFailure(#[from] std::io::Error),
    #[error("line {line}: not a parseable triple: {message}")]
    ParseError { line: usize, message: String },
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Iri(pub String);

/// Object position of a triple: IRI, string literal, or integer literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Object {
    Iri(Iri),
    Str(String),
    Int(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Object,
}

/// Percent-encodes a string for use as one IRI path segment; everything
/// outside unreserved characters is escaped, so decoding is unambiguous.
fn encode_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for byte in s.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'.' | b'_' | b'~' => out.push(byte as char),
            _ => {
                out.push('%');
                out.push_str(&format!("{byte:02X}"));
            }
        }
    }
    out
}

fn decode_segment(s: &str) -> Option<String> {
    let mut bytes = Vec::with_capacity(s.len());
    let raw = s.as_bytes();
    let mut i = 0;
    while i < raw.len() {
        if raw[i] == b'%' {
            if i + 3 > raw.len() {
                return None;
            }
            let hex = std::str::from_utf8(&raw[i + 1..i + 3]).ok()?;
            bytes.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            bytes.push(raw[i]);
            i += 1;
        }
    }
    String::from_utf8(bytes).ok()
}

fn candidate_iri(id: &str) -> Iri {
    Iri(format!("{ID_BASE}candidate/{}", encode_segment(id)))
}

fn application_iri(profile: &CandidateProfile) -> Iri {
    Iri(format!(
        "{ID_BASE}application/{}/{}/{}",
        encode_segment(&profile.id),
        encode_segment(profile.field.code()),
        profile.level.token()
    ))
}

fn publication_iri(id: &str) -> Iri {
    Iri(format!("{ID_BASE}publication/{}", encode_segment(id)))
}

fn indicator_predicate(category: IndicatorCategory, metric: &str, source: &str) -> Iri {
    Iri(format!(
        "{NS_BASE}indicator/{}/{}/{}",
        category.token(),
        encode_segment(metric),
        encode_segment(source)
    ))
}

fn ns(term: &str) -> Iri {
    Iri(format!("{NS_BASE}{term}"))
}

/// Counts of what the graph holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub triple_count: usize,
    pub publication_count: usize,
    pub indicator_count: usize,
}

/// The in-memory store. Reads are safe concurrently; writes require exclusive
/// access.
#[derive(Debug, Default, Clone)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    publications: BTreeSet<String>,
    indicator_count: usize,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            triple_count: self.triples.len(),
            publication_count: self.publications.len(),
            indicator_count: self.indicator_count,
        }
    }

    fn insert(&mut self, subject: Iri, predicate: Iri, object: Object) {
        self.triples.insert(Triple { subject, predicate, object });
    }

    /// Materializes one profile per the schema mapping. Re-inserting a
    /// publication id is an error.
    pub fn add_profile(&mut self, profile: &CandidateProfile) -> Result<(), GraphError> {
        for publication in &profile.publications {
            if self.publications.contains(&publication.id) {
                return Err(GraphError::DuplicateSubject(publication.id.clone()));
            }
        }

        let candidate = candidate_iri(&profile.id);
        let application = application_iri(profile);
        self.insert(candidate.clone(), ns("application"), Object::Iri(application.clone()));
        self.insert(application.clone(), ns("field"), Object::Str(profile.field.code().to_string()));
        self.insert(application, ns("level"), Object::Str(profile.level.token().to_string()));

        for publication in &profile.publications {
            self.publications.insert(publication.id.clone());
            let subject = publication_iri(&publication.id);
            self.insert(subject.clone(), Iri(RDF_TYPE.to_string()), Object::Iri(ns("Publication")));
            self.insert(subject.clone(), ns("title"), Object::Str(publication.title.clone()));
            self.insert(subject.clone(), ns("creator"), Object::Iri(candidate.clone()));
            self.insert(
                subject.clone(),
                ns("venue"),
                Object::Str(publication.venue.clone().unwrap_or_default()),
            );
            if let Some(doi) = &publication.doi {
                self.insert(subject.clone(), ns("doi"), Object::Str(doi.clone()));
            }
            // values sharing a (category, metric, source) key aggregate into
            // one integer literal
            let mut keyed: BTreeMap<(IndicatorCategory, String, String), u64> = BTreeMap::new();
            for value in &publication.indicators {
                *keyed.entry((value.category, value.metric.clone(), value.source.clone())).or_default() +=
                    value.count;
            }
            for ((category, metric, source), count) in keyed {
                self.insert(
                    subject.clone(),
                    indicator_predicate(category, &metric, &source),
                    Object::Int(count),
                );
                self.indicator_count += 1;
            }
            if let Some(citations) = publication.scopus_citations {
                self.insert(subject.clone(), ns("scopusCitations"), Object::Int(citations));
            }
        }
        Ok(())
    }

    /// Returns the citation count and indicator values stored for one
    /// publication, exactly as inserted (aggregated per key).
    pub fn query_indicators(
        &self,
        publication_id: &str,
    ) -> Result<(Option<u64>, Vec<IndicatorValue>), GraphError> {
        if !self.publications.contains(publication_id) {
            return Err(GraphError::UnknownPublication(publication_id.to_string()));
        }
        let subject = publication_iri(publication_id);
        let indicator_prefix = format!("{NS_BASE}indicator/");
        let scopus_predicate = ns("scopusCitations");
        let mut citations = None;
        let mut indicators = Vec::new();
        for triple in self.triples.range(
            Triple { subject: subject.clone(), predicate: Iri(String::new()), object: Object::Iri(Iri(String::new())) }..,
        ) {
            if triple.subject != subject {
                break;
            }
            if triple.predicate == scopus_predicate {
                if let Object::Int(count) = triple.object {
                    citations = Some(count);
                }
            } else if let Some(rest) = triple.predicate.0.strip_prefix(&indicator_prefix) {
                let mut parts = rest.splitn(3, '/');
                let (category, metric, source) = (parts.next(), parts.next(), parts.next());
                if let (Some(category), Some(metric), Some(source)) = (category, metric, source) {
                    let category = IndicatorCategory::from_token(category).ok_or_else(|| {
                        GraphError::ParseError {
                            line: 0,
                            message: format!("unknown category in predicate `{}`", triple.predicate.0),
                        }
                    })?;
                    if let Object::Int(count) = triple.object {
                        indicators.push(IndicatorValue {
                            category,
                            metric: decode_segment(metric).unwrap_or_else(|| metric.to_string()),
                            source: decode_segment(source).unwrap_or_else(|| source.to_string()),
                            count,
                        });
                    }
                }
            }
        }
        indicators.sort();
        Ok((citations, indicators))
    }

    /// Writes the graph as N-Triples (UTF-8, LF), one triple per line, sorted
    /// lexicographically by (subject, predicate, object). Returns the byte
    /// count written.
    pub fn export(&self, sink: &mut impl Write) -> Result<usize, GraphError> {
        let mut lines: Vec<(String, String, String)> = self
            .triples
            .iter()
            .map(|t| (t.subject.0.clone(), t.predicate.0.clone(), serialize_object(&t.object)))
            .collect();
        lines.sort();
        let mut bytes = 0usize;
        for (subject, predicate, object) in lines {
            let line = format!("<{subject}> <{predicate}> {object} .\n");
            sink.write_all(line.as_bytes())?;
            bytes += line.len();
        }
        Ok(bytes)
    }

    /// Reads back a graph exported by [`Graph::export`].
    pub fn import(reader: impl BufRead) -> Result<Graph, GraphError> {
        let mut graph = Graph::new();
        let publication_prefix = format!("{ID_BASE}publication/");
        let indicator_prefix = format!("{NS_BASE}indicator/");
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(GraphError::SinkFailure)?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let triple = parse_triple_line(trimmed).map_err(|message| GraphError::ParseError {
                line: i + 1,
                message,
            })?;
            if triple.predicate.0 == RDF_TYPE {
                if let Some(encoded) = triple.subject.0.strip_prefix(&publication_prefix) {
                    if let Some(id) = decode_segment(encoded) {
                        graph.publications.insert(id);
                    }
                }
            }
            if triple.predicate.0.starts_with(&indicator_prefix) {
                graph.indicator_count += 1;
            }
            graph.triples.insert(triple);
        }
        Ok(graph)
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape_literal(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('"') => out.push('"'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

fn serialize_object(object: &Object) -> String {
    match object {
        Object::Iri(iri) => format!("<{}>", iri.0),
        Object::Str(s) => format!("\"{}\"", escape_literal(s)),
        Object::Int(n) => format!("\"{n}\"^^<{XSD_INTEGER}>"),
    }
}

fn parse_triple_line(line: &str) -> Result<Triple, String> {
    let line = line.strip_suffix('.').ok_or("missing trailing dot")?.trim_end();
    let rest = line.strip_prefix('<').ok_or("subject must be an IRI")?;
    let (subject, rest) = rest.split_once('>').ok_or("unterminated subject IRI")?;
    let rest = rest.trim_start().strip_prefix('<').ok_or("predicate must be an IRI")?;
    let (predicate, rest) = rest.split_once('>').ok_or("unterminated predicate IRI")?;
    let object_text = rest.trim();
    let object = parse_object(object_text)?;
    Ok(Triple {
        subject: Iri(subject.to_string()),
        predicate: Iri(predicate.to_string()),
        object,
    })
}

fn parse_object(text: &str) -> Result<Object, String> {
    if let Some(rest) = text.strip_prefix('<') {
        let iri = rest.strip_suffix('>').ok_or("unterminated object IRI")?;
        return Ok(Object::Iri(Iri(iri.to_string())));
    }
    let rest = text.strip_prefix('"').ok_or("object must be an IRI or literal")?;
    // find the closing unescaped quote
    let mut end = None;
    let mut escaped = false;
    for (i, c) in rest.char_indices() {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == '"' {
            end = Some(i);
            break;
        }
    }
    let end = end.ok_or("unterminated literal")?;
    let value = unescape_literal(&rest[..end])?;
    let tail = &rest[end + 1..];
    if tail.is_empty() {
        return Ok(Object::Str(value));
    }
    let datatype = tail.strip_prefix("^^<").and_then(|t| t.strip_suffix('>')).ok_or("bad datatype tag")?;
    if datatype == XSD_INTEGER {
        let n: u64 = value.parse().map_err(|_| format!("bad integer literal `{value}`"))?;
        Ok(Object::Int(n))
    } else {
        Ok(Object::Str(value))
    }
}
