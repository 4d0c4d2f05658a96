//! Polite HTTP fetching: strictly serial per host with a minimum delay
//! between requests, concurrent across hosts.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::Utc;
use log::{debug, info};
use thiserror::Error;
use tokio::sync::Mutex as AsyncMutex;
use tokio::time::Instant;
use url::Url;

use super::robots::Robots;
use super::RawPage;

pub const DEFAULT_POLITENESS: Duration = Duration::from_millis(1000);
pub const USER_AGENT: &str = concat!("paramine/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("`{0}` is not an http(s) URL")]
    InvalidUrl(String),
    #[error("{url}: {reason} (retryable)")]
    Retryable { url: String, reason: String },
    #[error("{url}: HTTP {status}")]
    Permanent { url: String, status: u16 },
    #[error("{url}: disallowed by robots.txt")]
    Disallowed { url: String },
}

impl FetchError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, FetchError::Retryable { .. })
    }
}

#[derive(Default)]
struct HostState {
    last_request: Option<Instant>,
    robots: Option<Robots>,
}

pub struct Fetcher {
    client: reqwest::Client,
    politeness: Duration,
    respect_robots: bool,
    hosts: Mutex<HashMap<String, Arc<AsyncMutex<HostState>>>>,
}

impl Fetcher {
    pub fn new(politeness: Duration) -> Fetcher {
        let client = reqwest::Client::builder()
            .user_agent(USER_AGENT)
            .timeout(Duration::from_secs(30))
            .build()
            .expect("http client");
        Fetcher { client, politeness, respect_robots: true, hosts: Mutex::new(HashMap::new()) }
    }

    pub fn respect_robots(mut self, yes: bool) -> Fetcher {
        self.respect_robots = yes;
        self
    }

    fn host_slot(&self, url: &Url) -> Arc<AsyncMutex<HostState>> {
        let key = format!("{}:{}", url.host_str().unwrap_or(""), url.port_or_known_default().unwrap_or(0));
        let mut hosts = self.hosts.lock().expect("host table poisoned");
        hosts.entry(key).or_default().clone()
    }

    /// Sends one request while holding the host slot, after waiting out
    /// the politeness delay since the previous request to that host.
    async fn polite_get(&self, state: &mut HostState, url: &Url) -> Result<reqwest::Response, FetchError> {
        if let Some(last) = state.last_request {
            tokio::time::sleep_until(last + self.politeness).await;
        }
        debug!("GET {url}");
        let result = self.client.get(url.clone()).send().await;
        state.last_request = Some(Instant::now());
        result.map_err(|e| FetchError::Retryable { url: url.to_string(), reason: e.to_string() })
    }

    pub async fn fetch(&self, raw_url: &str) -> Result<RawPage, FetchError> {
        let url = Url::parse(raw_url).map_err(|_| FetchError::InvalidUrl(raw_url.to_string()))?;
        if !matches!(url.scheme(), "http" | "https") || !url.has_host() {
            return Err(FetchError::InvalidUrl(raw_url.to_string()));
        }
        let slot = self.host_slot(&url);
        let mut state = slot.lock().await;

        if self.respect_robots && state.robots.is_none() {
            let robots_url = url.join("/robots.txt").expect("static path");
            let robots = match self.polite_get(&mut state, &robots_url).await {
                Ok(resp) if resp.status().is_success() => Robots::parse(&resp.text().await.unwrap_or_default()),
                _ => Robots::allow_all(),
            };
            state.robots = Some(robots);
        }
        if let Some(robots) = &state.robots {
            if !robots.is_allowed(USER_AGENT, url.path()) {
                info!("skipping {url}: disallowed by robots.txt");
                return Err(FetchError::Disallowed { url: url.to_string() });
            }
        }

        let resp = self.polite_get(&mut state, &url).await?;
        let status = resp.status();
        if status.is_client_error() {
            return Err(FetchError::Permanent { url: url.to_string(), status: status.as_u16() });
        }
        if !status.is_success() {
            return Err(FetchError::Retryable { url: url.to_string(), reason: format!("HTTP {}", status.as_u16()) });
        }
        let final_url = resp.url().to_string();
        let html = resp
            .bytes()
            .await
            .map_err(|e| FetchError::Retryable { url: url.to_string(), reason: e.to_string() })?
            .to_vec();
        Ok(RawPage { url: final_url, html, fetched_at: Utc::now() })
    }

    /// Fetches `urls` concurrently across hosts, serially within a host.
    /// Results come back in input order.
    pub async fn fetch_all(self: &Arc<Self>, urls: &[String]) -> Vec<Result<RawPage, FetchError>> {
        let mut set = tokio::task::JoinSet::new();
        for (i, u) in urls.iter().enumerate() {
            let me = Arc::clone(self);
            let u = u.clone();
            set.spawn(async move { (i, me.fetch(&u).await) });
        }
        let mut out: Vec<Option<Result<RawPage, FetchError>>> = (0..urls.len()).map(|_| None).collect();
        while let Some(joined) = set.join_next().await {
            let (i, r) = joined.expect("fetch task panicked");
            out[i] = Some(r);
        }
        out.into_iter().map(|r| r.expect("every task reports")).collect()
    }
}
