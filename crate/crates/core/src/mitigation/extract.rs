use scraper::{ElementRef, Html, Node, Selector};
use serde::{Deserialize, Serialize};

use crate::corpus::CweId;

const SECTION_ID: &str = "Potential_Mitigations";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MitigationSection {
    pub phase: String,
    pub strategy: Option<String>,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub sections: Vec<MitigationSection>,
    /// The section's element exactly as it appears in the page source.
    pub block_html: Option<String>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MitigationDoc {
    pub cwe_id: CweId,
    pub raw_html: Vec<u8>,
    pub sections: Vec<MitigationSection>,
    pub block_html: Option<String>,
    pub warning: Option<String>,
}

impl MitigationDoc {
    pub fn from_page(cwe_id: CweId, raw_html: Vec<u8>) -> MitigationDoc {
        let ex = extract_potential_mitigations(&raw_html);
        MitigationDoc {
            cwe_id,
            raw_html,
            sections: ex.sections,
            block_html: ex.block_html,
            warning: ex.warning,
        }
    }
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn sel(s: &str) -> Selector {
    Selector::parse(s).expect("static selector")
}

fn is_heading(el: &scraper::node::Element) -> bool {
    el.name() == "p" && el.classes().any(|c| c == "subheading" || c == "suboptheading")
}

const BLOCKS: &[&str] = &["div", "p", "td", "tr", "li", "ul", "ol", "br", "table"];

/// Visible text of `el` minus the phase and strategy headings; block
/// boundaries become spaces, inline markup does not.
fn body_text(el: ElementRef) -> String {
    use ego_tree::iter::Edge;
    let mut out = String::new();
    let mut skip = 0usize;
    for edge in el.traverse() {
        match edge {
            Edge::Open(n) => match n.value() {
                Node::Element(e) if is_heading(e) => skip += 1,
                Node::Element(e) if BLOCKS.contains(&e.name()) => out.push(' '),
                Node::Text(t) if skip == 0 => out.push_str(t),
                _ => {}
            },
            Edge::Close(n) => match n.value() {
                Node::Element(e) if is_heading(e) => skip -= 1,
                Node::Element(e) if BLOCKS.contains(&e.name()) => out.push(' '),
                _ => {}
            },
        }
    }
    normalize_ws(&out)
}

fn strip_label<'a>(text: &'a str, labels: &[&str]) -> &'a str {
    let t = text.trim();
    for l in labels {
        if let Some(rest) = t.strip_prefix(l) {
            return rest.trim();
        }
    }
    t
}

/// Slice of `src` covering the element whose start tag contains
/// `id="<id>"`, found by balancing that element's tag name.
fn raw_element(src: &str, id: &str) -> Option<String> {
    let attr = format!("id=\"{id}\"");
    let at = src.find(&attr)?;
    let start = src[..at].rfind('<')?;
    let name: String = src[start + 1..]
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect();
    let (open, close) = (format!("<{name}"), format!("</{name}>"));
    let mut depth = 0usize;
    let mut i = start;
    while i < src.len() {
        let rest = &src[i..];
        if rest.starts_with(&close) {
            depth -= 1;
            if depth == 0 {
                return Some(src[start..i + close.len()].to_string());
            }
            i += close.len();
        } else if rest.starts_with(&open)
            && rest[open.len()..].starts_with(|c: char| c == '>' || c.is_ascii_whitespace())
        {
            depth += 1;
            i += open.len();
        } else {
            i += rest.chars().next().map_or(1, char::len_utf8);
        }
    }
    None
}

pub fn extract_potential_mitigations(raw_html: &[u8]) -> Extraction {
    let src = String::from_utf8_lossy(raw_html);
    let doc = Html::parse_document(&src);
    let Some(root) = doc.select(&sel(&format!("#{SECTION_ID}"))).next() else {
        return Extraction {
            sections: Vec::new(),
            block_html: None,
            warning: Some(format!("page has no {SECTION_ID} section")),
        };
    };
    let phase_sel = sel("p.subheading");
    let strategy_sel = sel("p.suboptheading");
    let mut sections = Vec::new();
    for row in root.select(&sel("tr")) {
        let Some(phase_el) = row.select(&phase_sel).next() else { continue };
        let phase = normalize_ws(strip_label(&phase_el.text().collect::<String>(), &["Phases:", "Phase:"]));
        if phase.is_empty() {
            continue;
        }
        let strategy = row
            .select(&strategy_sel)
            .next()
            .map(|s| normalize_ws(strip_label(&s.text().collect::<String>(), &["Strategy:"])))
            .filter(|s| !s.is_empty());
        sections.push(MitigationSection { phase, strategy, body: body_text(row) });
    }
    let block_html = raw_element(&src, SECTION_ID).or_else(|| Some(root.html()));
    Extraction { sections, block_html, warning: None }
}
