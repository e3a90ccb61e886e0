use std::time::Duration;

use super::MitigationError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

/// The only way this crate reaches the network. Tests substitute a
/// recording double.
pub trait HttpTransport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, MitigationError>;

    fn post_json(
        &self,
        url: &str,
        bearer: &str,
        body: &serde_json::Value,
    ) -> Result<HttpResponse, MitigationError>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new(user_agent: &str, timeout: Duration) -> Result<Self, MitigationError> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(user_agent)
            .timeout(timeout)
            .build()
            .map_err(|e| MitigationError::Config(format!("http client: {e}")))?;
        Ok(ReqwestTransport { client })
    }
}

fn transport_error(url: &str, e: reqwest::Error) -> MitigationError {
    if e.is_timeout() {
        MitigationError::Timeout(url.to_string())
    } else {
        MitigationError::Network { url: url.to_string(), message: e.to_string() }
    }
}

impl HttpTransport for ReqwestTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, MitigationError> {
        let resp = self.client.get(url).send().map_err(|e| transport_error(url, e))?;
        let status = resp.status().as_u16();
        let body = resp.bytes().map_err(|e| transport_error(url, e))?.to_vec();
        Ok(HttpResponse { status, body })
    }

    fn post_json(
        &self,
        url: &str,
        bearer: &str,
        body: &serde_json::Value,
    ) -> Result<HttpResponse, MitigationError> {
        let resp = self
            .client
            .post(url)
            .bearer_auth(bearer)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_string())
            .send()
            .map_err(|e| transport_error(url, e))?;
        let status = resp.status().as_u16();
        let body = resp.bytes().map_err(|e| transport_error(url, e))?.to_vec();
        Ok(HttpResponse { status, body })
    }
}
