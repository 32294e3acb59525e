//! HTTP-backed provider clients.
//!
//! Each client issues GET requests against its configured endpoint, expects
//! the same JSON bodies the fixture files hold, honours the configured rate
//! limit, and retries transport failures with exponential backoff. An API
//! credential, when configured, is read from the named environment variable
//! and sent as a bearer token.

use reqwest::blocking::Client;
use reqwest::StatusCode;

use crate::model::IndicatorValue;

use super::providers::{
    map_indicator_entries, normalize_title, AltmetricsProvider, AltmetricsResponse, CitationLookup,
    CitationProvider, CitationsResponse, DoiProvider, DoiResponse, ProviderConfig, ProviderError,
    RateLimiter,
};

struct HttpClient {
    name: &'static str,
    config: ProviderConfig,
    client: Client,
    limiter: RateLimiter,
}

enum Fetched {
    Body(String),
    NotFound,
}

impl HttpClient {
    fn new(name: &'static str, config: ProviderConfig) -> Result<HttpClient, ProviderError> {
        config.validate()?;
        let limiter = RateLimiter::new(config.min_interval);
        let client = Client::builder().build().map_err(|e| ProviderError::Unavailable {
            provider: name.to_string(),
            attempts: 1,
            message: e.to_string(),
        })?;
        Ok(HttpClient { name, config, client, limiter })
    }

    fn unavailable(&self, message: String) -> ProviderError {
        ProviderError::Unavailable { provider: self.name.to_string(), attempts: 1, message }
    }

    fn get(&self, params: &[(&str, &str)]) -> Result<Fetched, ProviderError> {
        let url = reqwest::Url::parse_with_params(&self.config.endpoint, params)
            .map_err(|e| self.unavailable(format!("bad endpoint: {e}")))?;
        self.config.retry.run(|| {
            self.limiter.acquire();
            let mut request = self.client.get(url.clone());
            if let Some(env_name) = &self.config.credential_env {
                if let Ok(token) = std::env::var(env_name) {
                    request = request.bearer_auth(token);
                }
            }
            let response = request.send().map_err(|e| self.unavailable(e.to_string()))?;
            match response.status() {
                StatusCode::NOT_FOUND => Ok(Fetched::NotFound),
                status if status.is_server_error() || status == StatusCode::TOO_MANY_REQUESTS => {
                    Err(self.unavailable(format!("status {status}")))
                }
                status if !status.is_success() => Err(ProviderError::MalformedResponse {
                    provider: self.name.to_string(),
                    message: format!("unexpected status {status}"),
                }),
                _ => Ok(Fetched::Body(response.text().map_err(|e| self.unavailable(e.to_string()))?)),
            }
        })
    }

    fn parse<T: serde::de::DeserializeOwned>(&self, body: &str) -> Result<T, ProviderError> {
        serde_json::from_str(body).map_err(|e| ProviderError::MalformedResponse {
            provider: self.name.to_string(),
            message: e.to_string(),
        })
    }
}

/// DOI resolution over HTTP: `GET {endpoint}?title=<normalized title>`.
pub struct HttpDoiProvider {
    http: HttpClient,
}

impl HttpDoiProvider {
    pub fn new(config: ProviderConfig) -> Result<HttpDoiProvider, ProviderError> {
        Ok(HttpDoiProvider { http: HttpClient::new("doi", config)? })
    }
}

impl DoiProvider for HttpDoiProvider {
    fn resolve(&self, title: &str, _authors: &[String]) -> Result<Option<String>, ProviderError> {
        let key = normalize_title(title);
        match self.http.get(&[("title", key.as_str()), ("rows", "1")])? {
            Fetched::NotFound => Ok(None),
            Fetched::Body(body) => {
                let response: DoiResponse = self.http.parse(&body)?;
                Ok(response
                    .items
                    .into_iter()
                    .next()
                    .map(|item| crate::ingest::normalize_doi(&item.doi)))
            }
        }
    }
}

/// Citation counts over HTTP: `GET {endpoint}?doi=<doi>`; 404 means not
/// indexed.
pub struct HttpCitationProvider {
    http: HttpClient,
}

impl HttpCitationProvider {
    pub fn new(config: ProviderConfig) -> Result<HttpCitationProvider, ProviderError> {
        Ok(HttpCitationProvider { http: HttpClient::new("citations", config)? })
    }
}

impl CitationProvider for HttpCitationProvider {
    fn citations(&self, doi: &str) -> Result<CitationLookup, ProviderError> {
        match self.http.get(&[("doi", doi)])? {
            Fetched::NotFound => Ok(CitationLookup { count: 0, indexed: false }),
            Fetched::Body(body) => {
                let response: CitationsResponse = self.http.parse(&body)?;
                Ok(CitationLookup { count: response.citations, indexed: true })
            }
        }
    }
}

/// Altmetrics over HTTP: `GET {endpoint}?doi=<doi>`; 404 means no altmetrics.
pub struct HttpAltmetricsProvider {
    http: HttpClient,
}

impl HttpAltmetricsProvider {
    pub fn new(config: ProviderConfig) -> Result<HttpAltmetricsProvider, ProviderError> {
        Ok(HttpAltmetricsProvider { http: HttpClient::new("altmetrics", config)? })
    }
}

impl AltmetricsProvider for HttpAltmetricsProvider {
    fn altmetrics(&self, doi: &str) -> Result<Vec<IndicatorValue>, ProviderError> {
        match self.http.get(&[("doi", doi)])? {
            Fetched::NotFound => Ok(Vec::new()),
            Fetched::Body(body) => {
                let response: AltmetricsResponse = self.http.parse(&body)?;
                Ok(map_indicator_entries(response.indicators).0)
            }
        }
    }
}
