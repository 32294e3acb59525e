//! Provider interfaces and the fixture-backed implementations.
//!
//! Each provider role ships two implementations: an HTTP client (behind the
//! `http` feature) and a directory-of-fixtures client whose files hold the
//! same response bodies the HTTP client would receive. Tests and the offline
//! mode run entirely on fixtures.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::model::{registered_category, IndicatorCategory, IndicatorValue};

use super::cache::encode_key;

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    /// Transport-level failure after exhausting retries; retry later, the
    /// data itself is not at fault.
    #[error("provider `{provider}` unavailable after {attempts} attempt(s): {message}")]
    Unavailable { provider: String, attempts: u32, message: String },
    #[error("malformed response from `{provider}`: {message}")]
    MalformedResponse { provider: String, message: String },
    #[error(transparent)]
    Cache(#[from] super::cache::CacheError),
}

/// Citation count lookup result; `indexed = false` marks a DOI the provider
/// does not know, reported as count 0 with the flag preserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationLookup {
    pub count: u64,
    pub indexed: bool,
}

/// Resolves missing DOIs from title and authors.
pub trait DoiProvider: Send + Sync {
    fn resolve(&self, title: &str, authors: &[String]) -> Result<Option<String>, ProviderError>;
}

/// Returns the citation-index count for a normalized DOI.
pub trait CitationProvider: Send + Sync {
    fn citations(&self, doi: &str) -> Result<CitationLookup, ProviderError>;
}

/// Returns the altmetric indicator values for a normalized DOI.
pub trait AltmetricsProvider: Send + Sync {
    fn altmetrics(&self, doi: &str) -> Result<Vec<IndicatorValue>, ProviderError>;
}

// response body schemas, shared by HTTP responses and fixture files

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoiResponse {
    pub items: Vec<DoiItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoiItem {
    pub doi: String,
    pub title: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CitationsResponse {
    pub doi: String,
    pub citations: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AltmetricsResponse {
    pub doi: String,
    pub indicators: Vec<IndicatorEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndicatorEntry {
    pub category: String,
    pub metric: String,
    pub source: String,
    pub count: u64,
}

/// Lowercases, strips punctuation and collapses whitespace; the key under
/// which title-based DOI lookups are cached and fixtured.
pub fn normalize_title(title: &str) -> String {
    let mut out = String::with_capacity(title.len());
    for c in title.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else {
            out.push(' ');
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Maps response entries into the five-category hierarchy per the model
/// rules: registered metrics take their registered category (a contradicting
/// claim is corrected), unknown metrics keep the claimed category and stay
/// flagged downstream. Entries whose category token cannot be parsed at all
/// are returned separately.
pub fn map_indicator_entries(entries: Vec<IndicatorEntry>) -> (Vec<IndicatorValue>, Vec<IndicatorEntry>) {
    let mut values = Vec::with_capacity(entries.len());
    let mut rejected = Vec::new();
    for entry in entries {
        let claimed = IndicatorCategory::from_token(&entry.category);
        let category = match (registered_category(&entry.metric), claimed) {
            (Some(registered), _) => registered,
            (None, Some(claimed)) => claimed,
            (None, None) => {
                rejected.push(entry);
                continue;
            }
        };
        values.push(IndicatorValue {
            category,
            metric: entry.metric,
            source: entry.source,
            count: entry.count,
        });
    }
    (values, rejected)
}

fn read_fixture<T: serde::de::DeserializeOwned>(
    dir: &Path,
    provider: &str,
    key: &str,
) -> Result<Option<T>, ProviderError> {
    let path = dir.join(format!("{}.json", encode_key(key)));
    let body = match std::fs::read_to_string(&path) {
        Ok(body) => body,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => {
            return Err(ProviderError::Unavailable {
                provider: provider.to_string(),
                attempts: 1,
                message: format!("{}: {e}", path.display()),
            })
        }
    };
    serde_json::from_str(&body).map(Some).map_err(|e| ProviderError::MalformedResponse {
        provider: provider.to_string(),
        message: format!("{}: {e}", path.display()),
    })
}

/// Fixture-backed DOI resolver: one `DoiResponse` file per normalized title.
#[derive(Debug, Clone)]
pub struct FixtureDoiProvider {
    dir: PathBuf,
}

impl FixtureDoiProvider {
    pub fn new(dir: impl Into<PathBuf>) -> FixtureDoiProvider {
        FixtureDoiProvider { dir: dir.into() }
    }
}

impl DoiProvider for FixtureDoiProvider {
    fn resolve(&self, title: &str, _authors: &[String]) -> Result<Option<String>, ProviderError> {
        let key = normalize_title(title);
        let response: Option<DoiResponse> = read_fixture(&self.dir, "doi", &key)?;
        // the top-ranked item wins; no similarity threshold is applied
        Ok(response
            .and_then(|r| r.items.into_iter().next())
            .map(|item| crate::ingest::normalize_doi(&item.doi)))
    }
}

/// Fixture-backed citation provider: one `CitationsResponse` file per DOI;
/// a missing file means the DOI is not indexed.
#[derive(Debug, Clone)]
pub struct FixtureCitationProvider {
    dir: PathBuf,
}

impl FixtureCitationProvider {
    pub fn new(dir: impl Into<PathBuf>) -> FixtureCitationProvider {
        FixtureCitationProvider { dir: dir.into() }
    }
}

impl CitationProvider for FixtureCitationProvider {
    fn citations(&self, doi: &str) -> Result<CitationLookup, ProviderError> {
        let response: Option<CitationsResponse> = read_fixture(&self.dir, "citations", doi)?;
        Ok(match response {
            Some(r) => CitationLookup { count: r.citations, indexed: true },
            None => CitationLookup { count: 0, indexed: false },
        })
    }
}

/// Fixture-backed altmetrics provider: one `AltmetricsResponse` file per DOI;
/// a missing file means no altmetrics.
#[derive(Debug, Clone)]
pub struct FixtureAltmetricsProvider {
    dir: PathBuf,
}

impl FixtureAltmetricsProvider {
    pub fn new(dir: impl Into<PathBuf>) -> FixtureAltmetricsProvider {
        FixtureAltmetricsProvider { dir: dir.into() }
    }
}

impl AltmetricsProvider for FixtureAltmetricsProvider {
    fn altmetrics(&self, doi: &str) -> Result<Vec<IndicatorValue>, ProviderError> {
        let response: Option<AltmetricsResponse> = read_fixture(&self.dir, "altmetrics", doi)?;
        Ok(match response {
            Some(r) => map_indicator_entries(r.indicators).0,
            None => Vec::new(),
        })
    }
}

/// Enforces a minimum interval between consecutive acquisitions across
/// threads.
#[derive(Debug)]
pub struct RateLimiter {
    min_interval: Duration,
    last: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(min_interval: Duration) -> RateLimiter {
        RateLimiter { min_interval, last: Mutex::new(None) }
    }

    /// Blocks until at least the configured interval has passed since the
    /// previous acquisition.
    pub fn acquire(&self) {
        if self.min_interval.is_zero() {
            return;
        }
        let mut last = self.last.lock().expect("rate limiter mutex poisoned");
        if let Some(previous) = *last {
            let earliest = previous + self.min_interval;
            let now = Instant::now();
            if earliest > now {
                std::thread::sleep(earliest - now);
            }
        }
        *last = Some(Instant::now());
    }
}

/// Retry policy for transport failures: `max_attempts` tries with exponential
/// backoff starting at `backoff_base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub backoff_base: Duration,
}

impl Default for RetryPolicy {
    fn default() -> RetryPolicy {
        RetryPolicy { max_attempts: 3, backoff_base: Duration::from_millis(250) }
    }
}

impl RetryPolicy {
    /// Runs `attempt` until it succeeds or the policy is exhausted, sleeping
    /// `backoff_base * 2^i` between tries.
    pub fn run<T>(
        &self,
        mut attempt: impl FnMut() -> Result<T, ProviderError>,
    ) -> Result<T, ProviderError> {
        let attempts = self.max_attempts.max(1);
        let mut last_error = None;
        for i in 0..attempts {
            match attempt() {
                Ok(value) => return Ok(value),
                Err(e @ ProviderError::Unavailable { .. }) => {
                    last_error = Some(e);
                    if i + 1 < attempts {
                        std::thread::sleep(self.backoff_base * 2u32.pow(i));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Err(match last_error.expect("at least one attempt ran") {
            ProviderError::Unavailable { provider, message, .. } => {
                ProviderError::Unavailable { provider, attempts, message }
            }
            other => other,
        })
    }
}

/// Connection settings for one HTTP provider.
#[derive(Debug, Clone)]
pub struct ProviderConfig {
    pub endpoint: String,
    /// Name of the environment variable holding the API credential, if any.
    pub credential_env: Option<String>,
    pub max_concurrency: usize,
    pub min_interval: Duration,
    pub retry: RetryPolicy,
}

impl ProviderConfig {
    pub fn new(endpoint: impl Into<String>) -> ProviderConfig {
        ProviderConfig {
            endpoint: endpoint.into(),
            credential_env: None,
            max_concurrency: 4,
            min_interval: Duration::ZERO,
            retry: RetryPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.max_concurrency < 1 || self.retry.max_attempts < 1 {
            return Err(ProviderError::MalformedResponse {
                provider: self.endpoint.clone(),
                message: "max_concurrency and retry attempts must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// Wraps a provider and counts how many calls reach it; used to assert cache
/// behaviour.
#[derive(Debug, Default)]
pub struct CallCounter {
    calls: AtomicUsize,
}

impl CallCounter {
    pub fn count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn bump(&self) {
        self.calls.fetch_add(1, Ordering::SeqCst);
    }
}

pub struct CountedDoiProvider<'a, P: DoiProvider> {
    pub inner: P,
    pub counter: &'a CallCounter,
}

impl<P: DoiProvider> DoiProvider for CountedDoiProvider<'_, P> {
    fn resolve(&self, title: &str, authors: &[String]) -> Result<Option<String>, ProviderError> {
        self.counter.bump();
        self.inner.resolve(title, authors)
    }
}

pub struct CountedCitationProvider<'a, P: CitationProvider> {
    pub inner: P,
    pub counter: &'a CallCounter,
}

impl<P: CitationProvider> CitationProvider for CountedCitationProvider<'_, P> {
    fn citations(&self, doi: &str) -> Result<CitationLookup, ProviderError> {
        self.counter.bump();
        self.inner.citations(doi)
    }
}

pub struct CountedAltmetricsProvider<'a, P: AltmetricsProvider> {
    pub inner: P,
    pub counter: &'a CallCounter,
}

impl<P: AltmetricsProvider> AltmetricsProvider for CountedAltmetricsProvider<'_, P> {
    fn altmetrics(&self, doi: &str) -> Result<Vec<IndicatorValue>, ProviderError> {
        self.counter.bump();
        self.inner.altmetrics(doi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_fixture(dir: &Path, key: &str, body: &str) {
        fs::create_dir_all(dir).unwrap();
        fs::write(dir.join(format!("{}.json", encode_key(key))), body).unwrap();
    }

    #[test]
    fn title_normalization() {
        assert_eq!(normalize_title("A Title"), "a title");
        assert_eq!(normalize_title("  A   Title!?  "), "a title");
        assert_eq!(normalize_title("Graph-Based Models: A Survey"), "graph based models a survey");
    }

    #[test]
    fn fixture_doi_provider_returns_top_item() {
        let tmp = tempfile::tempdir().unwrap();
        write_fixture(
            tmp.path(),
            "a title",
            r#"{"items":[{"doi":"10.1000/XYZ123","title":"A Title"},{"doi":"10.2/other","title":"Noise"}]}"#,
        );
        let provider = FixtureDoiProvider::new(tmp.path());
        assert_eq!(provider.resolve("A Title", &[]).unwrap().as_deref(), Some("10.1000/xyz123"));
        assert_eq!(provider.resolve("Unknown Work", &[]).unwrap(), None);
    }

    #[test]
    fn fixture_citations_missing_means_not_indexed() {
        let tmp = tempfile::tempdir().unwrap();
        write_fixture(tmp.path(), "10.1/x", r#"{"doi":"10.1/x","citations":17}"#);
        let provider = FixtureCitationProvider::new(tmp.path());
        assert_eq!(provider.citations("10.1/x").unwrap(), CitationLookup { count: 17, indexed: true });
        assert_eq!(provider.citations("10.9/none").unwrap(), CitationLookup { count: 0, indexed: false });
    }

    #[test]
    fn fixture_altmetrics_map_into_hierarchy() {
        let tmp = tempfile::tempdir().unwrap();
        write_fixture(
            tmp.path(),
            "10.1/x",
            r#"{"doi":"10.1/x","indicators":[
                {"category":"captures","metric":"readers","source":"mendeley","count":12},
                {"category":"usage","metric":"hovers","source":"widgetco","count":3}
            ]}"#,
        );
        let provider = FixtureAltmetricsProvider::new(tmp.path());
        let values = provider.altmetrics("10.1/x").unwrap();
        assert_eq!(values.len(), 2);
        assert_eq!(values[0].category, IndicatorCategory::Captures);
        assert!(!values[1].is_registered());
        assert!(provider.altmetrics("10.9/none").unwrap().is_empty());
    }

    #[test]
    fn entry_mapping_corrects_contradicted_category() {
        let (values, rejected) = map_indicator_entries(vec![IndicatorEntry {
            category: "usage".to_string(),
            metric: "readers".to_string(),
            source: "mendeley".to_string(),
            count: 5,
        }]);
        assert!(rejected.is_empty());
        assert_eq!(values[0].category, IndicatorCategory::Captures);
    }

    #[test]
    fn entry_mapping_rejects_unparseable_category_on_unknown_metric() {
        let (values, rejected) = map_indicator_entries(vec![IndicatorEntry {
            category: "nonsense".to_string(),
            metric: "hovers".to_string(),
            source: "x".to_string(),
            count: 5,
        }]);
        assert!(values.is_empty());
        assert_eq!(rejected.len(), 1);
    }

    #[test]
    fn rate_limiter_spaces_acquisitions() {
        let limiter = std::sync::Arc::new(RateLimiter::new(Duration::from_millis(20)));
        let timestamps = std::sync::Arc::new(Mutex::new(Vec::<Instant>::new()));
        std::thread::scope(|scope| {
            for _ in 0..4 {
                let limiter = limiter.clone();
                let timestamps = timestamps.clone();
                scope.spawn(move || {
                    limiter.acquire();
                    timestamps.lock().unwrap().push(Instant::now());
                });
            }
        });
        let mut stamps = timestamps.lock().unwrap().clone();
        stamps.sort();
        for pair in stamps.windows(2) {
            let gap = pair[1].duration_since(pair[0]);
            assert!(gap >= Duration::from_millis(19), "gap {gap:?} under the minimum interval");
        }
    }

    #[test]
    fn retry_policy_exhausts_and_reports_attempts() {
        let policy = RetryPolicy { max_attempts: 3, backoff_base: Duration::from_millis(1) };
        let tries = AtomicUsize::new(0);
        let result: Result<(), ProviderError> = policy.run(|| {
            tries.fetch_add(1, Ordering::SeqCst);
            Err(ProviderError::Unavailable {
                provider: "p".to_string(),
                attempts: 1,
                message: "down".to_string(),
            })
        });
        assert_eq!(tries.load(Ordering::SeqCst), 3);
        assert!(matches!(result, Err(ProviderError::Unavailable { attempts: 3, .. })));
    }

    #[test]
    fn retry_policy_recovers() {
        let policy = RetryPolicy { max_attempts: 3, backoff_base: Duration::from_millis(1) };
        let tries = AtomicUsize::new(0);
        let result = policy.run(|| {
            if tries.fetch_add(1, Ordering::SeqCst) < 1 {
                Err(ProviderError::Unavailable {
                    provider: "p".to_string(),
                    attempts: 1,
                    message: "down".to_string(),
                })
            } else {
                Ok(7)
            }
        });
        assert_eq!(result.unwrap(), 7);
    }
}
