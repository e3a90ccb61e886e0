//! Assemble a mitigation prompt from stored CWE pages and answer it from
//! recorded responses, without touching the network.
//!
//!     cargo run --example mitigation_fixture -- "electromagnetic side-channel" CWE-203

use std::path::Path;
use std::sync::Arc;

use hwv2w::corpus::CweId;
use hwv2w::mitigation::{
    prompt_digest, Advisor, LlmConfig, PageSource, PromptTemplate, ReqwestTransport, DEFAULT_FAN_OUT,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mitigation");
    let mut args = std::env::args().skip(1);
    let description = args.next().unwrap_or_else(|| "electromagnetic side-channel".into());
    let mut ids: Vec<CweId> = args.map(|a| CweId::parse_lenient(&a)).collect::<Result<_, _>>()?;
    if ids.is_empty() {
        ids.push(CweId::new(203));
    }

    let advisor = Advisor {
        pages: PageSource::Fixture { dir: fx.join("pages") },
        llm: LlmConfig::fixture(Some(fx.join("responses"))),
        template: PromptTemplate::appendix(),
        // present for the type, never called in fixture mode
        transport: Arc::new(ReqwestTransport::new("hwv2w-example", std::time::Duration::from_secs(5))?),
        fan_out: DEFAULT_FAN_OUT,
    };
    let s = advisor.suggest(&ids, &description)?;
    println!("prompt: {} bytes, digest {}", s.prompt.len(), prompt_digest(&s.prompt));
    println!("sources: {}", s.source_urls.join(", "));
    for w in &s.warnings {
        println!("warning: {w}");
    }
    println!("\n{}", s.response);
    Ok(())
}
