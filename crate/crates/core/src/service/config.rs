use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::mitigation::LlmConfig;
use crate::severity::TreeConfig;

/// Overrides `llm.api_key_env_name` when set.
pub const API_KEY_ENV_OVERRIDE: &str = "HWV2W_API_KEY_ENV";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// NVD JSON feeds, used when `snapshot` is absent or missing on disk.
    pub nvd_feeds: Vec<PathBuf>,
    pub cwe_catalog: Option<PathBuf>,
    /// One CWE id per line; the bundled list when unset.
    pub hardware_ids: Option<PathBuf>,
    /// Prebuilt snapshot JSON; preferred over the feeds when it exists.
    pub snapshot: Option<PathBuf>,
    /// Prebuilt index; rebuilt in memory when missing or stale.
    pub index: Option<PathBuf>,
    /// N-Triples ontology; built from the snapshot when missing.
    pub ontology: Option<PathBuf>,
    /// Trained tree JSON; trained from the snapshot when missing.
    pub tree: Option<PathBuf>,
    /// Directory overriding the bundled dictionaries file by file.
    pub dictionaries: Option<PathBuf>,
    pub k: usize,
    pub tree_config: TreeConfig,
    pub test_permille: u32,
    pub llm: LlmConfig,
    pub mitigation: MitigationSettings,
    pub bind: String,
    pub cache_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MitigationSettings {
    /// When set, CWE pages are read from `<dir>/CWE-<n>.html` instead of the web.
    pub pages_fixture_dir: Option<PathBuf>,
    pub cache_ttl_secs: u64,
    pub fan_out: usize,
    /// Prompt template file; the published template when unset.
    pub template: Option<PathBuf>,
}

impl Default for MitigationSettings {
    fn default() -> Self {
        MitigationSettings { pages_fixture_dir: None, cache_ttl_secs: 7 * 24 * 3600, fan_out: 4, template: None }
    }
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            nvd_feeds: Vec::new(),
            cwe_catalog: None,
            hardware_ids: None,
            snapshot: None,
            index: None,
            ontology: None,
            tree: None,
            dictionaries: None,
            k: 5,
            tree_config: TreeConfig::default(),
            test_permille: 200,
            llm: LlmConfig::default(),
            mitigation: MitigationSettings::default(),
            bind: "127.0.0.1:8080".into(),
            cache_dir: PathBuf::from(".hwv2w-cache"),
        }
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl EngineConfig {
    pub fn from_toml(text: &str) -> Result<Self, EngineError> {
        let mut cfg: EngineConfig = toml::from_str(text).map_err(|e| EngineError::Config(e.to_string()))?;
        cfg.apply_env();
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EngineError::Input { path: path.to_path_buf(), message: e.to_string() })?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        Ok(cfg)
    }

    pub fn rebase(&mut self, base: &Path) {
        for p in &mut self.nvd_feeds {
            rebase(base, p);
        }
        for p in [
            &mut self.cwe_catalog,
            &mut self.hardware_ids,
            &mut self.snapshot,
            &mut self.index,
            &mut self.ontology,
            &mut self.tree,
            &mut self.dictionaries,
            &mut self.llm.fixture_dir,
            &mut self.mitigation.pages_fixture_dir,
            &mut self.mitigation.template,
        ]
        .into_iter()
        .flatten()
        {
            rebase(base, p);
        }
        rebase(base, &mut self.cache_dir);
    }

    fn apply_env(&mut self) {
        if let Ok(name) = std::env::var(API_KEY_ENV_OVERRIDE) {
            if !name.trim().is_empty() {
                self.llm.api_key_env_name = name.trim().to_string();
            }
        }
    }

    fn check(&self) -> Result<(), EngineError> {
        if self.k == 0 {
            return Err(EngineError::Config("k must be at least 1".into()));
        }
        if self.test_permille > 1000 {
            return Err(EngineError::Config("test_permille must be at most 1000".into()));
        }
        Ok(())
    }
}
