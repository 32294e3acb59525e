//! Deterministic synthetic corpus generation.
//!
//! Produces an internally consistent bundle: record lines, an outcome file,
//! provider fixture bodies, and the enriched profiles that running the
//! enrichment pipeline over those inputs must reproduce exactly. Candidate
//! skill drives citation counts, reader counts track citations, and social
//! indicators track blog mentions, so the corpus exhibits the correlation
//! structure the analyses look for.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enrich::{
    map_indicator_entries, normalize_title, AltmetricsResponse, CitationsResponse, DoiItem,
    DoiResponse, IndicatorEntry,
};
use crate::model::{
    AcademicLevel, CandidateProfile, FieldCode, PublicationRecord, QualificationOutcome,
};

/// Shape of a generated corpus.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub fields: Vec<String>,
    pub candidates_per_field_level: usize,
    pub min_publications: usize,
    pub max_publications: usize,
}

impl Default for SynthConfig {
    fn default() -> SynthConfig {
        SynthConfig {
            seed: 42,
            fields: vec!["01-B1".to_string(), "13-A1".to_string()],
            candidates_per_field_level: 15,
            min_publications: 3,
            max_publications: 8,
        }
    }
}

/// A generated corpus bundle.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    /// Profiles as the pipeline would leave them after ingest + outcome
    /// attachment + enrichment against the bundled fixtures.
    pub enriched_profiles: Vec<CandidateProfile>,
    /// Record line format content (pre-enrichment corpus file).
    pub record_lines: String,
    /// `candidate,field,level,outcome` content.
    pub outcome_lines: String,
    /// DOI fixture bodies keyed by normalized title.
    pub doi_fixtures: BTreeMap<String, DoiResponse>,
    /// Citation fixture bodies keyed by DOI.
    pub citation_fixtures: BTreeMap<String, CitationsResponse>,
    /// Altmetrics fixture bodies keyed by DOI.
    pub altmetrics_fixtures: BTreeMap<String, AltmetricsResponse>,
}

const TITLE_WORDS: &[&str] = &[
    "adaptive", "graph", "models", "inference", "scalable", "analysis", "networks", "sparse",
    "estimation", "learning", "systems", "dynamics", "empirical", "methods", "robust", "temporal",
    "structures", "signals", "patterns", "evaluation",
];

const VENUES: &[&str] = &[
    "Journal of Applied Analytics",
    "Proc. of the Workshop on Data Systems",
    "Transactions on Quantitative Methods",
    "Review of Computational Practice",
    "Annals of Empirical Research",
];

const SURNAMES: &[&str] =
    &["Rossi", "Bianchi", "Ferrari", "Russo", "Romano", "Gallo", "Conti", "Greco", "Marino", "Costa"];

fn title_for(rng: &mut ChaCha8Rng, sequence: usize) -> String {
    let pick = |rng: &mut ChaCha8Rng| TITLE_WORDS[rng.gen_range(0..TITLE_WORDS.len())];
    let a = pick(rng);
    let b = pick(rng);
    let c = pick(rng);
    // the sequence number keeps titles unique across the corpus
    format!("{} {} {} no {}", capitalize(a), b, c, sequence)
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

fn authors_for(rng: &mut ChaCha8Rng) -> Vec<String> {
    let count = rng.gen_range(1..=3);
    (0..count)
        .map(|_| {
            let surname = SURNAMES[rng.gen_range(0..SURNAMES.len())];
            let initial = (b'A' + rng.gen_range(0..26u8)) as char;
            format!("{surname} {initial}.")
        })
        .collect()
}

struct GeneratedPublication {
    record: PublicationRecord,
    line_doi: Option<String>,
    entries: Vec<IndicatorEntry>,
    indexed_citations: Option<u64>,
    has_altmetrics_fixture: bool,
    resolvable: bool,
}

fn generate_publication(
    rng: &mut ChaCha8Rng,
    id: String,
    skill: f64,
    sequence: usize,
) -> GeneratedPublication {
    let title = title_for(rng, sequence);
    let authors = authors_for(rng);
    let venue = VENUES[rng.gen_range(0..VENUES.len())].to_string();
    let year = rng.gen_range(2002..=2016);

    let doi = format!("10.{}/{}.{}", 1000 + rng.gen_range(0..9000), "synth", sequence);
    // 80% carry the DOI in the corpus, 15% resolve by title, 5% stay bare
    let roll: f64 = rng.gen();
    let (line_doi, resolvable) =
        if roll < 0.80 { (Some(doi.clone()), true) } else if roll < 0.95 { (None, true) } else { (None, false) };

    // citations scale with candidate skill; readers track citations
    let base = skill * 40.0 * rng.gen_range(0.2..1.8);
    let citations = base.round().max(0.0) as u64;
    let readers = (citations as f64 * rng.gen_range(0.5..0.9) + rng.gen_range(0.0..3.0)).round() as u64;
    let export_saves = (readers as f64 * rng.gen_range(0.0..0.25)).round() as u64;
    let blog_mentions = if rng.gen_bool(0.3) { rng.gen_range(0..4) } else { 0 };
    let tweets =
        (blog_mentions as f64 * rng.gen_range(1.0..4.0) + rng.gen_range(0.0..2.0)).round() as u64;
    let shares = (tweets as f64 * rng.gen_range(0.2..0.8)).round() as u64;
    let plus_ones = if rng.gen_bool(0.2) { rng.gen_range(0..3) } else { 0 };
    let abstract_views =
        (citations as f64 * rng.gen_range(0.5..4.0)).round() as u64 + rng.gen_range(0..30);
    let plumx_citations = (citations as f64 * rng.gen_range(0.7..1.0)).round() as u64;

    let mut entries = Vec::new();
    let mut push = |category: &str, metric: &str, source: &str, count: u64| {
        if count > 0 {
            entries.push(IndicatorEntry {
                category: category.to_string(),
                metric: metric.to_string(),
                source: source.to_string(),
                count,
            });
        }
    };
    push("captures", "readers", "mendeley", readers);
    push("captures", "export-saves", "ebsco", export_saves);
    push("mentions", "blog-mentions", "blog", blog_mentions);
    push("social-media", "tweets", "twitter", tweets);
    push("social-media", "shares-likes-comments", "facebook", shares);
    push("social-media", "+1s", "google-plus", plus_ones);
    // usage and citation-index entries use metrics outside the registered
    // hierarchy, exercising the unknown-metric path end to end
    push("usage", "abstract-views", "ebsco", abstract_views);
    push("citations", "citation-indexes", "scopus", plumx_citations);

    let indexed_citations = rng.gen_bool(0.95).then_some(citations);
    let has_altmetrics_fixture = rng.gen_bool(0.92) && !entries.is_empty();

    let (truth_scopus, truth_indicators) = if resolvable {
        let scopus = Some(indexed_citations.unwrap_or(0));
        let indicators = if has_altmetrics_fixture {
            map_indicator_entries(entries.clone()).0
        } else {
            Vec::new()
        };
        (scopus, indicators)
    } else {
        (None, Vec::new())
    };

    GeneratedPublication {
        record: PublicationRecord {
            id,
            title,
            authors,
            venue: Some(venue),
            year: Some(year),
            doi: resolvable.then(|| doi.clone()),
            scopus_citations: truth_scopus,
            indicators: truth_indicators,
        },
        line_doi,
        entries,
        indexed_citations,
        has_altmetrics_fixture,
        resolvable,
    }
}

/// Generates the full corpus bundle for a configuration.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut corpus = SynthCorpus {
        enriched_profiles: Vec::new(),
        record_lines: String::new(),
        outcome_lines: String::from("candidate,field,level,outcome\n"),
        doi_fixtures: BTreeMap::new(),
        citation_fixtures: BTreeMap::new(),
        altmetrics_fixtures: BTreeMap::new(),
    };
    let mut sequence = 0usize;

    for field in &config.fields {
        let field_code = FieldCode::new(field).expect("synth fields must be valid codes");
        for level in AcademicLevel::ALL {
            let skills: Vec<f64> =
                (0..config.candidates_per_field_level).map(|_| rng.gen()).collect();
            // top 40% by skill qualify, with two labels flipped for noise
            let mut ranked: Vec<usize> = (0..skills.len()).collect();
            ranked.sort_by(|&a, &b| skills[b].partial_cmp(&skills[a]).unwrap());
            let floor = 3.min(skills.len() / 2);
            let qualified_count = ((skills.len() as f64 * 0.4).round() as usize)
                .clamp(floor, skills.len().saturating_sub(floor));
            let mut outcomes = vec![QualificationOutcome::NotQualified; skills.len()];
            for &i in ranked.iter().take(qualified_count) {
                outcomes[i] = QualificationOutcome::Qualified;
            }
            if skills.len() > 6 {
                let flip_a = ranked[qualified_count.saturating_sub(1)];
                let flip_b = ranked[qualified_count];
                outcomes.swap(flip_a, flip_b);
            }

            for (ci, outcome) in outcomes.iter().enumerate() {
                let candidate_id = format!(
                    "cand-{}-{}-{ci:03}",
                    field.to_lowercase().replace('-', ""),
                    level.token()
                );
                let n_pubs = rng.gen_range(config.min_publications..=config.max_publications);
                let skill = skills[ci] * 0.8 + 0.2;
                let mut publications = Vec::with_capacity(n_pubs);
                for pi in 0..n_pubs {
                    let pub_id = format!("{candidate_id}:{field}:{}:{pi}", level.token());
                    let generated = generate_publication(&mut rng, pub_id, skill, sequence);
                    sequence += 1;

                    let line = crate::ingest::RecordLine {
                        candidate: candidate_id.clone(),
                        field: field.clone(),
                        level: level.token().to_string(),
                        title: generated.record.title.clone(),
                        authors: generated.record.authors.clone(),
                        venue: generated.record.venue.clone().unwrap_or_default(),
                        year: generated.record.year,
                        doi: generated.line_doi.clone(),
                    };
                    corpus.record_lines.push_str(&serde_json::to_string(&line).unwrap());
                    corpus.record_lines.push('\n');

                    if generated.resolvable {
                        let doi = generated.record.doi.clone().expect("resolvable implies doi");
                        if generated.line_doi.is_none() {
                            corpus.doi_fixtures.insert(
                                normalize_title(&generated.record.title),
                                DoiResponse {
                                    items: vec![DoiItem {
                                        doi: doi.clone(),
                                        title: generated.record.title.clone(),
                                    }],
                                },
                            );
                        }
                        if let Some(citations) = generated.indexed_citations {
                            corpus
                                .citation_fixtures
                                .insert(doi.clone(), CitationsResponse { doi: doi.clone(), citations });
                        }
                        if generated.has_altmetrics_fixture {
                            corpus.altmetrics_fixtures.insert(
                                doi.clone(),
                                AltmetricsResponse { doi: doi.clone(), indicators: generated.entries.clone() },
                            );
                        }
                    }
                    publications.push(generated.record);
                }

                corpus.outcome_lines.push_str(&format!(
                    "{candidate_id},{field},{},{}\n",
                    level.token(),
                    outcome.token()
                ));
                corpus.enriched_profiles.push(CandidateProfile {
                    id: candidate_id,
                    field: field_code.clone(),
                    level,
                    outcome: Some(*outcome),
                    publications,
                });
            }
        }
    }
    corpus
}

impl SynthCorpus {
    /// Writes the corpus files under `root`: `corpus.jsonl`, `outcomes.csv`
    /// and the three fixture directories.
    pub fn write_to(&self, root: &std::path::Path) -> std::io::Result<()> {
        use crate::enrich::encode_key;
        std::fs::create_dir_all(root)?;
        std::fs::write(root.join("corpus.jsonl"), &self.record_lines)?;
        std::fs::write(root.join("outcomes.csv"), &self.outcome_lines)?;
        let fixture_root = root.join("fixtures");
        for (name, bodies) in [
            ("doi", self.doi_fixtures.iter().map(|(k, v)| (k.clone(), serde_json::to_string_pretty(v).unwrap())).collect::<Vec<_>>()),
            ("citations", self.citation_fixtures.iter().map(|(k, v)| (k.clone(), serde_json::to_string_pretty(v).unwrap())).collect()),
            ("altmetrics", self.altmetrics_fixtures.iter().map(|(k, v)| (k.clone(), serde_json::to_string_pretty(v).unwrap())).collect()),
        ] {
            let dir = fixture_root.join(name);
            std::fs::create_dir_all(&dir)?;
            for (key, body) in bodies {
                std::fs::write(dir.join(format!("{}.json", encode_key(&key))), body)?;
            }
        }
        Ok(())
    }
}

/// Builds a labelled classification fixture with exact class counts, shaped
/// like one (field, level) partition of a qualification dataset.
pub fn classification_fixture(
    field: &str,
    level: AcademicLevel,
    qualified: usize,
    not_qualified: usize,
    seed: u64,
) -> Vec<CandidateProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field_code = FieldCode::new(field).expect("valid field code");
    let mut profiles = Vec::with_capacity(qualified + not_qualified);
    for (class_tag, count, outcome, skill_range) in [
        ("q", qualified, QualificationOutcome::Qualified, 0.45..1.0),
        ("n", not_qualified, QualificationOutcome::NotQualified, 0.0..0.55),
    ] {
        for i in 0..count {
            let candidate_id = format!("fix-{class_tag}{i:03}");
            let skill: f64 = rng.gen_range(skill_range.clone());
            let n_pubs = rng.gen_range(3..=8);
            let publications = (0..n_pubs)
                .map(|pi| {
                    let citations = (skill * 30.0 * rng.gen_range(0.3..1.7)).round() as u64;
                    let readers =
                        (citations as f64 * rng.gen_range(0.5..0.9)).round() as u64 + rng.gen_range(0..2);
                    PublicationRecord {
                        id: format!("{candidate_id}:{field}:{}:{pi}", level.token()),
                        title: format!("Fixture Work {candidate_id} {pi}"),
                        authors: vec!["Rossi M.".to_string()],
                        venue: Some("Journal of Applied Analytics".to_string()),
                        year: Some(2010),
                        doi: None,
                        scopus_citations: Some(citations),
                        indicators: if readers > 0 {
                            vec![crate::model::IndicatorValue::registered("readers", "mendeley", readers)
                                .unwrap()]
                        } else {
                            Vec::new()
                        },
                    }
                })
                .collect();
            profiles.push(CandidateProfile {
                id: candidate_id,
                field: field_code.clone(),
                level,
                outcome: Some(outcome),
                publications,
            });
        }
    }
    profiles
}
