//! DOI resolution and indicator enrichment over pluggable providers.
//!
//! All lookups go through the on-disk cache: a value served from cache is the
//! value the provider originally returned for that key, and a cached key is
//! never re-fetched. Batch enrichment aggregates per-record failures instead
//! of aborting, and its output is deterministic for a fixed fixture set.

mod cache;
mod providers;

#[cfg(feature = "http")]
mod http;

pub use cache::{encode_key, CacheError, MetricsCache};
pub use providers::{
    map_indicator_entries, normalize_title, AltmetricsProvider, AltmetricsResponse, CallCounter,
    CitationLookup, CitationProvider, CitationsResponse, CountedAltmetricsProvider,
    CountedCitationProvider, CountedDoiProvider, DoiItem, DoiProvider, DoiResponse,
    FixtureAltmetricsProvider, FixtureCitationProvider, FixtureDoiProvider, IndicatorEntry,
    ProviderConfig, ProviderError, RateLimiter, RetryPolicy,
};

#[cfg(feature = "http")]
pub use http::{HttpAltmetricsProvider, HttpCitationProvider, HttpDoiProvider};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::model::{CandidateProfile, PublicationRecord};

/// The three provider roles bundled for a batch run.
pub struct Providers<'a> {
    pub doi: &'a dyn DoiProvider,
    pub citations: &'a dyn CitationProvider,
    pub altmetrics: &'a dyn AltmetricsProvider,
}

/// Tuning for [`enrich_all`].
#[derive(Debug, Clone, Copy)]
pub struct EnrichOptions {
    pub max_concurrency: usize,
}

impl Default for EnrichOptions {
    fn default() -> EnrichOptions {
        EnrichOptions { max_concurrency: 4 }
    }
}

/// A single failed enrichment step; the batch keeps going.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFailure {
    pub publication: String,
    pub stage: String,
    pub message: String,
}

/// Counters describing one batch enrichment run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentReport {
    /// Records that started without a DOI and got one resolved.
    pub doi_resolved: usize,
    /// Records that started without a DOI and still lack one.
    pub doi_unresolved: usize,
    pub citations_fetched: usize,
    pub altmetrics_fetched: usize,
    pub provider_errors: usize,
    /// DOIs the citation provider does not index (reported as count 0).
    pub not_indexed: usize,
    /// Indicator values carrying a metric outside the registered hierarchy.
    pub unknown_metric_values: usize,
    pub errors: Vec<RecordFailure>,
}

/// Returns the record's DOI if present (no provider call), otherwise resolves
/// by title through the cache.
pub fn resolve_doi(
    record: &PublicationRecord,
    provider: &dyn DoiProvider,
    cache: &MetricsCache,
) -> Result<Option<String>, ProviderError> {
    if let Some(doi) = &record.doi {
        return Ok(Some(doi.clone()));
    }
    let key = normalize_title(&record.title);
    if let Some(cached) = cache.get::<Option<String>>("doi", &key)? {
        return Ok(cached);
    }
    let resolved = provider.resolve(&record.title, &record.authors)?;
    cache.put("doi", &key, &resolved)?;
    Ok(resolved)
}

/// Citation count for a normalized DOI, served from cache when warm.
pub fn fetch_citation_count(
    doi: &str,
    provider: &dyn CitationProvider,
    cache: &MetricsCache,
) -> Result<CitationLookup, ProviderError> {
    if let Some(cached) = cache.get::<CitationLookup>("citations", doi)? {
        return Ok(cached);
    }
    let lookup = provider.citations(doi)?;
    cache.put("citations", doi, &lookup)?;
    Ok(lookup)
}

/// Altmetric values for a normalized DOI, served from cache when warm.
pub fn fetch_altmetrics(
    doi: &str,
    provider: &dyn AltmetricsProvider,
    cache: &MetricsCache,
) -> Result<Vec<crate::model::IndicatorValue>, ProviderError> {
    if let Some(cached) = cache.get::<Vec<crate::model::IndicatorValue>>("altmetrics", doi)? {
        return Ok(cached);
    }
    let values = provider.altmetrics(doi)?;
    cache.put("altmetrics", doi, &values)?;
    Ok(values)
}

struct TaskResult {
    doi: Option<String>,
    citations: Option<CitationLookup>,
    indicators: Option<Vec<crate::model::IndicatorValue>>,
    started_without_doi: bool,
    failures: Vec<RecordFailure>,
}

fn enrich_one(record: &PublicationRecord, providers: &Providers, cache: &MetricsCache) -> TaskResult {
    let mut result = TaskResult {
        doi: record.doi.clone(),
        citations: None,
        indicators: None,
        started_without_doi: record.doi.is_none(),
        failures: Vec::new(),
    };

    if result.doi.is_none() {
        match resolve_doi(record, providers.doi, cache) {
            Ok(doi) => result.doi = doi,
            Err(e) => result.failures.push(RecordFailure {
                publication: record.id.clone(),
                stage: "resolve-doi".to_string(),
                message: e.to_string(),
            }),
        }
    }

    if let Some(doi) = result.doi.clone() {
        match fetch_citation_count(&doi, providers.citations, cache) {
            Ok(lookup) => result.citations = Some(lookup),
            Err(e) => result.failures.push(RecordFailure {
                publication: record.id.clone(),
                stage: "citations".to_string(),
                message: e.to_string(),
            }),
        }
        match fetch_altmetrics(&doi, providers.altmetrics, cache) {
            Ok(values) => result.indicators = Some(values),
            Err(e) => result.failures.push(RecordFailure {
                publication: record.id.clone(),
                stage: "altmetrics".to_string(),
                message: e.to_string(),
            }),
        }
    }

    result
}

/// Enriches every publication of every profile: resolves missing DOIs, then
/// attaches citation counts and altmetric indicators for each record with a
/// DOI. Records without a resolvable DOI are kept untouched and counted.
///
/// Up to `options.max_concurrency` provider lookups run in flight; results
/// are merged by record position, so output order never depends on
/// scheduling.
pub fn enrich_all(
    profiles: &[CandidateProfile],
    providers: &Providers,
    cache: &MetricsCache,
    options: &EnrichOptions,
) -> (Vec<CandidateProfile>, EnrichmentReport) {
    let records: Vec<(usize, usize, &PublicationRecord)> = profiles
        .iter()
        .enumerate()
        .flat_map(|(pi, profile)| {
            profile.publications.iter().enumerate().map(move |(ri, record)| (pi, ri, record))
        })
        .collect();

    let results: Mutex<Vec<Option<TaskResult>>> =
        Mutex::new((0..records.len()).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    let workers = options.max_concurrency.max(1).min(records.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = cursor.fetch_add(1, Ordering::SeqCst);
                if index >= records.len() {
                    break;
                }
                let (_, _, record) = records[index];
                let result = enrich_one(record, providers, cache);
                results.lock().expect("results mutex poisoned")[index] = Some(result);
            });
        }
    });

    let mut enriched = profiles.to_vec();
    let mut report = EnrichmentReport::default();
    let results = results.into_inner().expect("results mutex poisoned");
    for ((pi, ri, _), result) in records.into_iter().zip(results) {
        let result = result.expect("every task ran");
        let record = &mut enriched[pi].publications[ri];
        if result.started_without_doi {
            if result.doi.is_some() {
                report.doi_resolved += 1;
            } else {
                report.doi_unresolved += 1;
            }
        }
        record.doi = result.doi;
        if let Some(lookup) = result.citations {
            record.scopus_citations = Some(lookup.count);
            report.citations_fetched += 1;
            if !lookup.indexed {
                report.not_indexed += 1;
            }
        }
        if let Some(values) = result.indicators {
            report.unknown_metric_values += values.iter().filter(|v| !v.is_registered()).count();
            record.indicators = values;
            report.altmetrics_fetched += 1;
        }
        report.provider_errors += result.failures.len();
        report.errors.extend(result.failures);
    }
    report.errors.sort_by(|a, b| (&a.publication, &a.stage).cmp(&(&b.publication, &b.stage)));
    (enriched, report)
}
