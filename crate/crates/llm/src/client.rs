//! Blocking chat-completions client with retries and a response cache.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::{ResponseCache, RunRecord};
use crate::LlmError;

/// Environment variable read for the bearer token unless the config names
/// another one.
pub const DEFAULT_KEY_ENV: &str = "DEPBASE_API_KEY";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryPolicy {
    /// Total attempts, the first one included.
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 500,
            max_delay_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    /// Wait before attempt `attempt + 1`, doubling from the base.
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u64 << attempt.saturating_sub(1).min(20);
        Duration::from_millis(self.base_delay_ms.saturating_mul(factor).min(self.max_delay_ms))
    }
}

fn default_key_env() -> String {
    DEFAULT_KEY_ENV.to_string()
}

fn default_timeout() -> u64 {
    300
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    /// Full URL of the chat-completions route.
    pub url: String,
    pub model: String,
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default)]
    pub temperature: f64,
    /// Fixed output budget; by default `16 * n + 256` for an `n`-word target.
    #[serde(default)]
    pub max_tokens: Option<u32>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub retry: RetryPolicy,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            model: model.into(),
            api_key_env: default_key_env(),
            temperature: 0.0,
            max_tokens: None,
            timeout_secs: default_timeout(),
            retry: RetryPolicy::default(),
        }
    }

    pub fn max_tokens_for(&self, n: usize) -> u32 {
        self.max_tokens.unwrap_or((16 * n + 256) as u32)
    }
}

/// One prompt to send.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub ordinal: usize,
    pub prompt: String,
    /// Target length, for the output budget.
    pub words: usize,
}

enum Attempt {
    Done(String),
    Retry(String),
    Fail(LlmError),
}

pub struct Client {
    config: EndpointConfig,
    agent: ureq::Agent,
    cache: Option<Arc<ResponseCache>>,
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
}

impl Client {
    pub fn new(config: EndpointConfig, cache: Option<Arc<ResponseCache>>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .build()
            .into();
        Client {
            config,
            agent,
            cache,
            calls: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
        }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    /// HTTP requests issued so far, retries included.
    pub fn network_calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    /// Most requests that were ever in flight at once.
    pub fn peak_in_flight(&self) -> usize {
        self.peak_in_flight.load(Ordering::SeqCst)
    }

    /// Answer for `job`, from the cache when present. A fresh answer is
    /// written to the cache before it is returned.
    pub fn query(&self, run_id: &str, job: &Job) -> Result<String, LlmError> {
        if let Some(hit) = self
            .cache
            .as_ref()
            .and_then(|c| c.get(&self.config.model, run_id, job.ordinal))
        {
            return Ok(hit.response);
        }
        let max_tokens = self.config.max_tokens_for(job.words);
        let response = self.fetch(&job.prompt, max_tokens)?;
        if let Some(cache) = &self.cache {
            cache.put(RunRecord {
                model: self.config.model.clone(),
                endpoint: self.config.url.clone(),
                run_id: run_id.to_string(),
                ordinal: job.ordinal,
                prompt: job.prompt.clone(),
                response: response.clone(),
                timestamp: chrono::Utc::now().to_rfc3339(),
                temperature: self.config.temperature,
                max_tokens,
            })?;
        }
        Ok(response)
    }

    /// Run every job with at most `concurrency` requests in flight. Results
    /// come back in job order.
    pub fn query_all(&self, run_id: &str, jobs: &[Job], concurrency: usize) -> Vec<Result<String, LlmError>> {
        let next = AtomicUsize::new(0);
        let mut slots: Vec<Option<Result<String, LlmError>>> = (0..jobs.len()).map(|_| None).collect();
        let results = std::sync::Mutex::new(&mut slots);
        thread::scope(|s| {
            for _ in 0..concurrency.max(1).min(jobs.len().max(1)) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(job) = jobs.get(i) else { break };
                    let r = self.query(run_id, job);
                    results.lock().expect("results lock")[i] = Some(r);
                });
            }
        });
        slots.into_iter().map(|r| r.expect("every job ran")).collect()
    }

    fn fetch(&self, prompt: &str, max_tokens: u32) -> Result<String, LlmError> {
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": max_tokens,
        })
        .to_string();
        let key = std::env::var(&self.config.api_key_env).ok();
        let attempts = self.config.retry.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=attempts {
            if attempt > 1 {
                thread::sleep(self.config.retry.delay(attempt - 1));
            }
            match self.attempt(&body, key.as_deref()) {
                Attempt::Done(text) => return Ok(text),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(why) => last = why,
            }
        }
        Err(LlmError::Transport {
            attempts,
            message: last,
        })
    }

    fn attempt(&self, body: &str, key: Option<&str>) -> Attempt {
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak_in_flight.fetch_max(now, Ordering::SeqCst);
        self.calls.fetch_add(1, Ordering::SeqCst);
        let result = self.send(body, key);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        result
    }

    fn send(&self, body: &str, key: Option<&str>) -> Attempt {
        let mut req = self
            .agent
            .post(&self.config.url)
            .header("Content-Type", "application/json");
        if let Some(k) = key {
            req = req.header("Authorization", format!("Bearer {k}"));
        }
        let mut resp = match req.send(body) {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = resp.status().as_u16();
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        if status == 429 || status >= 500 {
            return Attempt::Retry(format!("HTTP {status}: {text}"));
        }
        if !(200..300).contains(&status) {
            return Attempt::Fail(LlmError::Endpoint { status, body: text });
        }
        match extract_content(&text) {
            Some(c) => Attempt::Done(c),
            None => Attempt::Fail(LlmError::BadResponse(text)),
        }
    }
}

/// Assistant text of a chat-completions response.
pub fn extract_content(body: &str) -> Option<String> {
    let v: Value = serde_json::from_str(body).ok()?;
    v.get("choices")?
        .get(0)?
        .get("message")?
        .get("content")?
        .as_str()
        .map(str::to_string)
}
