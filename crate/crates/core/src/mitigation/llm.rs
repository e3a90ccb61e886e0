use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::transport::HttpTransport;
use super::MitigationError;

pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const FIXTURE_DEFAULT_RESPONSE: &str = "FIXTURE-RESPONSE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProviderMode {
    Live,
    Fixture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub api_key_env_name: String,
    pub model_id: String,
    pub endpoint_url: String,
    pub timeout_secs: u64,
    pub provider_mode: ProviderMode,
    /// Canned responses named `<sha256 of prompt>.txt`.
    pub fixture_dir: Option<PathBuf>,
    pub user_agent: String,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            api_key_env_name: DEFAULT_API_KEY_ENV.into(),
            model_id: DEFAULT_MODEL.into(),
            endpoint_url: DEFAULT_ENDPOINT.into(),
            timeout_secs: 60,
            provider_mode: ProviderMode::Live,
            fixture_dir: None,
            user_agent: concat!("hwv2w/", env!("CARGO_PKG_VERSION")).into(),
        }
    }
}

impl LlmConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    pub fn fixture(dir: Option<PathBuf>) -> Self {
        LlmConfig { provider_mode: ProviderMode::Fixture, fixture_dir: dir, ..Self::default() }
    }
}

pub fn prompt_digest(prompt: &str) -> String {
    Sha256::digest(prompt.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub trait CompletionProvider: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, MitigationError>;
}

pub struct FixtureProvider {
    pub dir: Option<PathBuf>,
}

impl CompletionProvider for FixtureProvider {
    fn complete(&self, prompt: &str) -> Result<String, MitigationError> {
        let registered = self
            .dir
            .as_ref()
            .map(|d| d.join(format!("{}.txt", prompt_digest(prompt))))
            .and_then(|p| std::fs::read_to_string(p).ok());
        Ok(registered.unwrap_or_else(|| FIXTURE_DEFAULT_RESPONSE.to_string()))
    }
}

pub struct LiveProvider {
    pub config: LlmConfig,
    pub transport: Arc<dyn HttpTransport>,
}

impl CompletionProvider for LiveProvider {
    fn complete(&self, prompt: &str) -> Result<String, MitigationError> {
        let key = std::env::var(&self.config.api_key_env_name)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| {
                MitigationError::Config(format!("environment variable {} is not set", self.config.api_key_env_name))
            })?;
        let body = json!({
            "model": self.config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "stream": false,
        });
        let url = &self.config.endpoint_url;
        let resp = self.transport.post_json(url, &key, &body)?;
        match resp.status {
            200..=299 => {}
            401 | 403 => return Err(MitigationError::Auth(resp.status)),
            429 => return Err(MitigationError::Quota),
            status => return Err(MitigationError::Http { url: url.clone(), status }),
        }
        let v: serde_json::Value = serde_json::from_slice(&resp.body)
            .map_err(|e| MitigationError::Protocol(format!("response is not JSON: {e}")))?;
        v.pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(str::to_string)
            .ok_or_else(|| MitigationError::Protocol("response has no choices[0].message.content".into()))
    }
}

/// Builds the provider named by `config`; `transport` is only used in live mode.
pub fn provider_for(config: &LlmConfig, transport: Arc<dyn HttpTransport>) -> Box<dyn CompletionProvider> {
    match config.provider_mode {
        ProviderMode::Fixture => Box::new(FixtureProvider { dir: config.fixture_dir.clone() }),
        ProviderMode::Live => Box::new(LiveProvider { config: config.clone(), transport }),
    }
}

pub fn get_llm_response(
    config: &LlmConfig,
    transport: Arc<dyn HttpTransport>,
    prompt: &str,
) -> Result<String, MitigationError> {
    provider_for(config, transport).complete(prompt)
}
