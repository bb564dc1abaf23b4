//! Resource fetching behind a trait, so validation and generation stay pure
//! and testable. `file://` URLs and plain paths resolve locally; `http(s)://`
//! needs the `http-fetch` feature.

use std::collections::BTreeMap;
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unreachable resource {url}: {reason}")]
    Unreachable { url: String, reason: String },
    #[error("unsupported URL scheme in {url}")]
    UnsupportedScheme { url: String },
}

impl FetchError {
    pub fn unreachable(url: impl Into<String>, reason: impl ToString) -> Self {
        FetchError::Unreachable {
            url: url.into(),
            reason: reason.to_string(),
        }
    }
}

/// Fetches a UTF-8 text resource by URL. Implementations must be safe to
/// call from multiple threads.
pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &str) -> Result<String, FetchError>;
}

/// In-memory fetcher for tests and fixtures: exact URL → body.
#[derive(Debug, Default, Clone)]
pub struct MapFetcher {
    entries: BTreeMap<String, String>,
}

impl MapFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, url: impl Into<String>, body: impl Into<String>) -> Self {
        self.entries.insert(url.into(), body.into());
        self
    }
}

impl Fetcher for MapFetcher {
    fn fetch(&self, url: &str) -> Result<String, FetchError> {
        self.entries
            .get(url)
            .cloned()
            .ok_or_else(|| FetchError::unreachable(url, "no such entry"))
    }
}

/// Reads `file://` URLs and bare filesystem paths.
#[derive(Debug, Default, Clone)]
pub struct FileFetcher;

impl FileFetcher {
    fn path_of(url: &str) -> &str {
        match url.strip_prefix("file://") {
            // file:///abs/path has an empty authority; keep the leading slash.
            Some(rest) => rest.strip_prefix("localhost").unwrap_or(rest),
            None => url,
        }
    }
}

impl Fetcher for FileFetcher {
    fn fetch(&self, url: &str) -> Result<String, FetchError> {
        std::fs::read_to_string(Self::path_of(url)).map_err(|e| FetchError::unreachable(url, e))
    }
}

/// HTTP(S) fetcher with a global timeout.
#[cfg(feature = "http-fetch")]
#[derive(Debug, Clone)]
pub struct HttpFetcher {
    agent: ureq::Agent,
}

#[cfg(feature = "http-fetch")]
impl HttpFetcher {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build();
        Self {
            agent: config.into(),
        }
    }
}

#[cfg(feature = "http-fetch")]
impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> Result<String, FetchError> {
        let mut response = self
            .agent
            .get(url)
            .call()
            .map_err(|e| FetchError::unreachable(url, e))?;
        if response.status().as_u16() >= 400 {
            return Err(FetchError::unreachable(
                url,
                format!("HTTP {}", response.status()),
            ));
        }
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| FetchError::unreachable(url, e))
    }
}

/// Scheme-dispatching fetcher used by the CLI and the deployer: `file://`
/// and bare paths always work, `http(s)://` when built with `http-fetch`.
pub struct StandardFetcher {
    file: FileFetcher,
    #[cfg(feature = "http-fetch")]
    http: HttpFetcher,
    #[cfg(not(feature = "http-fetch"))]
    _timeout: Duration,
}

impl StandardFetcher {
    pub fn new(timeout: Duration) -> Self {
        Self {
            file: FileFetcher,
            #[cfg(feature = "http-fetch")]
            http: HttpFetcher::new(timeout),
            #[cfg(not(feature = "http-fetch"))]
            _timeout: timeout,
        }
    }
}

impl Fetcher for StandardFetcher {
    fn fetch(&self, url: &str) -> Result<String, FetchError> {
        if url.starts_with("http://") || url.starts_with("https://") {
            #[cfg(feature = "http-fetch")]
            return self.http.fetch(url);
            #[cfg(not(feature = "http-fetch"))]
            return Err(FetchError::UnsupportedScheme {
                url: url.to_string(),
            });
        }
        self.file.fetch(url)
    }
}
