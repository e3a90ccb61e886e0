use std::path::Path;

use serde::{Deserialize, Serialize};

use super::extract::MitigationDoc;
use super::MitigationError;
use crate::corpus::CweId;

pub const DESCRIPTION: &str = "{description}";
pub const MITIGATION_INFO: &str = "{mitigation_info}";

const APPENDIX_TEMPLATE: &str = include_str!("../../data/prompt_template.txt");
const CORRECTED_TEMPLATE: &str = include_str!("../../data/prompt_template_corrected.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    text: String,
}

impl PromptTemplate {
    pub fn new(text: impl Into<String>) -> Result<Self, MitigationError> {
        let text = text.into();
        for p in [DESCRIPTION, MITIGATION_INFO] {
            if !text.contains(p) {
                return Err(MitigationError::Template(format!("missing placeholder {p}")));
            }
        }
        Ok(PromptTemplate { text })
    }

    /// The template exactly as published, spelling included.
    pub fn appendix() -> Self {
        PromptTemplate { text: APPENDIX_TEMPLATE.trim_end_matches('\n').to_string() }
    }

    pub fn corrected() -> Self {
        PromptTemplate { text: CORRECTED_TEMPLATE.trim_end_matches('\n').to_string() }
    }

    pub fn from_file(path: &Path) -> Result<Self, MitigationError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MitigationError::Template(format!("{}: {e}", path.display())))?;
        Self::new(text.trim_end_matches('\n'))
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Single-pass substitution, so placeholder-like text inside the
    /// arguments is left alone.
    pub fn render(&self, description: &str, mitigation_info: &str) -> String {
        let mut out = String::with_capacity(self.text.len() + description.len() + mitigation_info.len());
        let mut rest = self.text.as_str();
        loop {
            let next = [(DESCRIPTION, description), (MITIGATION_INFO, mitigation_info)]
                .into_iter()
                .filter_map(|(p, v)| rest.find(p).map(|i| (i, p, v)))
                .min_by_key(|(i, _, _)| *i);
            match next {
                Some((i, p, v)) => {
                    out.push_str(&rest[..i]);
                    out.push_str(v);
                    rest = &rest[i + p.len()..];
                }
                None => {
                    out.push_str(rest);
                    return out;
                }
            }
        }
    }
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self::appendix()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub template: PromptTemplate,
    pub description: String,
    pub mitigation_blocks: Vec<(CweId, String)>,
    pub rendered: String,
}

/// `- CWE <n> - Potential Mitigation:` followed by the section markup.
pub fn render_block(doc: &MitigationDoc) -> String {
    format!(
        "- CWE {} - Potential Mitigation:\n{}\n",
        doc.cwe_id.number(),
        doc.block_html.as_deref().unwrap_or("")
    )
}

pub fn build_prompt(template: &PromptTemplate, description: &str, docs: &[MitigationDoc]) -> PromptBundle {
    let blocks: Vec<(CweId, String)> = docs.iter().map(|d| (d.cwe_id, render_block(d))).collect();
    let info = blocks.iter().map(|(_, b)| b.as_str()).collect::<Vec<_>>().join("\n");
    PromptBundle {
        template: template.clone(),
        description: description.to_string(),
        rendered: template.render(description, &info),
        mitigation_blocks: blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_placeholder_is_named() {
        let err = PromptTemplate::new("only {description}").unwrap_err();
        assert!(err.to_string().contains("{mitigation_info}"));
    }

    #[test]
    fn render_is_single_pass() {
        let t = PromptTemplate::new("D={description} M={mitigation_info}").unwrap();
        assert_eq!(t.render("{mitigation_info}", "x"), "D={mitigation_info} M=x");
    }

    #[test]
    fn shipped_templates_are_valid() {
        for t in [PromptTemplate::appendix(), PromptTemplate::corrected()] {
            PromptTemplate::new(t.text()).unwrap();
        }
        assert!(PromptTemplate::appendix().text().contains("Vulnerbility Descreption:{description}"));
    }

    #[test]
    fn empty_docs_still_render() {
        let b = build_prompt(&PromptTemplate::appendix(), "x-ray glitch", &[]);
        assert!(b.rendered.ends_with("CWE Mitigation Information(HTML):"));
        assert!(b.mitigation_blocks.is_empty());
    }
}
