#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Mutex;

pub mod oracle;

use hwv2w::mitigation::{HttpResponse, HttpTransport, MitigationError};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn pages_dir() -> PathBuf {
    crate_dir().join("fixtures/mitigation/pages")
}

pub fn responses_dir() -> PathBuf {
    crate_dir().join("fixtures/mitigation/responses")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Call {
    Get(String),
    Post { url: String, bearer: String, body: serde_json::Value },
}

/// Records every request and answers from a fixed script.
pub struct RecordingTransport {
    pub calls: Mutex<Vec<Call>>,
    pub get_status: u16,
    pub get_body: Vec<u8>,
    pub post_status: u16,
    pub post_body: Vec<u8>,
}

impl RecordingTransport {
    pub fn new() -> Self {
        RecordingTransport {
            calls: Mutex::new(Vec::new()),
            get_status: 200,
            get_body: b"<html></html>".to_vec(),
            post_status: 200,
            post_body: br#"{"choices":[{"message":{"role":"assistant","content":"LIVE-TEXT"}}]}"#.to_vec(),
        }
    }

    pub fn calls(&self) -> Vec<Call> {
        self.calls.lock().unwrap().clone()
    }
}

impl HttpTransport for RecordingTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, MitigationError> {
        self.calls.lock().unwrap().push(Call::Get(url.to_string()));
        Ok(HttpResponse { status: self.get_status, body: self.get_body.clone() })
    }

    fn post_json(&self, url: &str, bearer: &str, body: &serde_json::Value) -> Result<HttpResponse, MitigationError> {
        self.calls.lock().unwrap().push(Call::Post {
            url: url.to_string(),
            bearer: bearer.to_string(),
            body: body.clone(),
        });
        Ok(HttpResponse { status: self.post_status, body: self.post_body.clone() })
    }
}
