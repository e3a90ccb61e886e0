//! Command-line front end. Exit codes: 0 success, 1 user error, 2 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::engine::{advisor_from_config, AnalysisReport, Engine};
use super::pipeline;
use super::{EngineConfig, EngineError};
use crate::corpus::CweId;
use crate::entity::{build_index, load_index, save_index};
use crate::mitigation::{LlmConfig, ProviderMode};
use crate::ontology::validate;
use crate::severity::{evaluate, labeled_vectors, split_train_test, Evaluation, TreeConfig};
use crate::text::Dictionaries;

#[derive(Debug, Parser)]
#[command(name = "hwv2w", version, about = "Hardware vulnerability mapping toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse NVD feeds and a CWE catalog into a hardware/IoT snapshot.
    Ingest {
        #[arg(long = "nvd", required = true, num_args = 1..)]
        nvd: Vec<PathBuf>,
        #[arg(long)]
        cwe: Option<PathBuf>,
        /// CWE id list; the bundled list when omitted.
        #[arg(long = "hw-ids")]
        hw_ids: Option<PathBuf>,
        /// Keep every record instead of the hardware/IoT subset.
        #[arg(long)]
        no_filter: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the similarity index for a snapshot.
    BuildIndex {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dicts: Option<PathBuf>,
    },
    /// Extract targets and impacts and write the ontology as N-Triples.
    BuildOntology {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dicts: Option<PathBuf>,
    },
    /// Match a description against the corpus and report CWEs, severity and story.
    Analyze {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long)]
        dicts: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        description: String,
    },
    /// Run a triple-pattern query against an ontology file.
    Query {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        json: bool,
        query_text: String,
    },
    /// Train the severity tree on a snapshot.
    Train {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        /// Share of records (per mille) held out for evaluation.
        #[arg(long, default_value_t = 200)]
        test_permille: u32,
        /// Also print the tree as indented text.
        #[arg(long)]
        text: bool,
    },
    /// Evaluate a trained tree on the held-out part of a snapshot.
    Evaluate {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 200)]
        test_permille: u32,
        /// Evaluate on every labeled record instead of the held-out part.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Ask the language model for mitigation advice.
    Mitigate {
        description: String,
        #[arg(long = "cwe", required = true)]
        cwe: Vec<String>,
        /// Offline mode: pages from `<dir>/pages`, responses from `<dir>/responses`.
        #[arg(long)]
        fixture_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long, default_value_t = 6)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 32)]
    pub max_leaf_nodes: usize,
    #[arg(long, default_value_t = 2)]
    pub min_samples_split: usize,
}

fn dicts(dir: &Option<PathBuf>) -> Result<Dictionaries, EngineError> {
    match dir {
        Some(d) => Dictionaries::from_dir(d).map_err(|e| EngineError::Input { path: e.path, message: e.message }),
        None => Ok(Dictionaries::bundled()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, EngineError> {
    serde_json::to_string_pretty(v).map_err(|e| EngineError::Internal(e.to_string()))
}

fn require(path: &Path) -> Result<(), EngineError> {
    if path.exists() {
        Ok(())
    } else {
        Err(EngineError::Input { path: path.to_path_buf(), message: "file not found".into() })
    }
}

pub fn render_report(r: &AnalysisReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("query: {}\ncorpus: {}\n\nmatches:\n", r.query, r.corpus_version));
    for m in &r.matches {
        let cwes: Vec<String> = m.cwe_ids.iter().map(|c| c.to_string()).collect();
        s.push_str(&format!(
            "  {:<16} {:.4}  {:<8}  {}\n",
            m.cve_id.as_str(),
            m.similarity,
            format!("{:?}", m.relevance_band).to_uppercase(),
            cwes.join(",")
        ));
    }
    s.push_str("\ncwe distribution:\n");
    for (c, n) in &r.cwe_distribution.counts {
        let mark = if r.cwe_distribution.modal == Some(*c) { " *" } else { "" };
        s.push_str(&format!("  {c:<10} {n}{mark}\n"));
    }
    match (&r.predicted_vector, &r.scores) {
        (Some(v), Some(sc)) => s.push_str(&format!(
            "\nvector: {v}\nexploitability {:.1}  impact {:.1}  base {:.1}  {}\n",
            sc.exploitability, sc.impact, sc.base, sc.rating
        )),
        _ => s.push_str("\nvector: none\n"),
    }
    if let Some(t) = r.tree_rating {
        s.push_str(&format!("tree rating: {t}\n"));
    }
    if let Some(story) = &r.story {
        s.push_str(&format!("\nstory for {}:\n", story.start));
        for p in &story.paths {
            s.push_str(&format!("  {} -> {} -> {}\n", p.vulnerability, p.target, p.impact));
        }
    }
    for w in &r.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

fn render_evaluation(e: &Evaluation) -> String {
    let fmt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.4}"));
    let mut s = format!("samples {}  accuracy {:.4}\n", e.samples, e.accuracy);
    for c in &e.per_class {
        s.push_str(&format!(
            "  {:<9} support {:<4} precision {:<9} recall {}\n",
            c.rating.to_string(),
            c.support,
            fmt(c.precision),
            fmt(c.recall)
        ));
    }
    s.push_str(&format!("macro precision {}  macro recall {}\n", fmt(e.macro_precision), fmt(e.macro_recall)));
    if !e.precision_undefined.is_empty() || !e.recall_undefined.is_empty() {
        s.push_str("(classes with undefined values are left out of the macro averages)\n");
    }
    s
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), EngineError> {
    let w = |out: &mut dyn Write, s: &str| {
        out.write_all(s.as_bytes()).map_err(|e| EngineError::Internal(e.to_string()))
    };
    match cli.command {
        Command::Ingest { nvd, cwe, hw_ids, no_filter, out: path } => {
            let (snap, summary) = pipeline::ingest(&nvd, cwe.as_deref(), hw_ids.as_deref(), !no_filter)?;
            pipeline::save_snapshot(&snap, &path)?;
            for warning in &summary.warnings {
                log::warn!("{warning}");
            }
            w(out, &format!(
                "read {} items, skipped {}, kept {} -> {} ({})\n",
                summary.items_read,
                summary.skipped,
                snap.len(),
                path.display(),
                snap.version_tag
            ))
        }
        Command::BuildIndex { snapshot, out: path, dicts: d } => {
            let snap = pipeline::load_snapshot(&snapshot)?;
            let index = build_index(&snap, &dicts(&d)?.stopwords).map_err(EngineError::Entity)?;
            save_index(&index, &path).map_err(|e| pipeline::io_err(&path, e))?;
            w(out, &format!("indexed {} documents -> {}\n", index.len(), path.display()))
        }
        Command::BuildOntology { snapshot, out: path, dicts: d } => {
            let snap = pipeline::load_snapshot(&snapshot)?;
            let (store, warnings) = pipeline::build_ontology(&snap, &dicts(&d)?);
            for warning in &warnings {
                log::warn!("{warning}");
            }
            let report = validate(&store);
            pipeline::save_ontology(&store, &path)?;
            w(out, &format!(
                "{} individuals, {} triples, {} skipped entries, {} errors, {} warnings -> {}\n",
                store.individual_count(),
                store.triple_count(),
                warnings.len(),
                report.error_count(),
                report.warning_count(),
                path.display()
            ))
        }
        Command::Analyze { index, ontology, tree, k, dicts: d, json, description } => {
            require(&index)?;
            require(&ontology)?;
            let idx = load_index(&index).map_err(|e| pipeline::io_err(&index, e))?;
            let store = pipeline::load_ontology(&ontology)?;
            let tree = tree.as_deref().map(pipeline::load_tree).transpose()?;
            let mut engine = Engine::new(idx, store, tree, dicts(&d)?);
            engine.k = k;
            let report = engine.analyze(&description, Some(k))?;
            if json {
                w(out, &(to_json(&report)? + "\n"))
            } else {
                w(out, &render_report(&report))
            }
        }
        Command::Query { ontology, json, query_text } => {
            require(&ontology)?;
            let store = pipeline::load_ontology(&ontology)?;
            let rows = crate::ontology::query_text(&store, &query_text).map_err(EngineError::Query)?;
            if json {
                return w(out, &(to_json(&rows)? + "\n"));
            }
            let mut s = rows.vars.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t") + "\n";
            for r in &rows.rows {
                s.push_str(&r.join("\t"));
                s.push('\n');
            }
            s.push_str(&format!("({} rows)\n", rows.len()));
            w(out, &s)
        }
        Command::Train { snapshot, out: path, tree, test_permille, text } => {
            let snap = pipeline::load_snapshot(&snapshot)?;
            let cfg = TreeConfig {
                max_depth: tree.max_depth,
                max_leaf_nodes: tree.max_leaf_nodes,
                min_samples_split: tree.min_samples_split,
            };
            let t = pipeline::train_on_snapshot(&snap, cfg, test_permille)?;
            pipeline::save_tree(&t, &path)?;
            if text {
                w(out, &t.export_text())?;
            }
            w(out, &format!(
                "{} nodes, {} leaves, depth {} -> {}\n",
                t.nodes.len(),
                t.leaf_count(),
                t.depth(),
                path.display()
            ))
        }
        Command::Evaluate { tree, snapshot, test_permille, all, json } => {
            let t = pipeline::load_tree(&tree)?;
            let snap = pipeline::load_snapshot(&snapshot)?;
            let data = labeled_vectors(&snap);
            let test = if all { data } else { split_train_test(&data, test_permille).1 };
            let pairs: Vec<_> = test.iter().map(|d| (d.vector, d.rating)).collect();
            let e = evaluate(&t, &pairs);
            if json {
                w(out, &(to_json(&e)? + "\n"))
            } else {
                w(out, &render_evaluation(&e))
            }
        }
        Command::Mitigate { description, cwe, fixture_dir, config, json } => {
            let mut cfg = match &config {
                Some(p) => EngineConfig::load(p)?,
                None => EngineConfig::default(),
            };
            if let Some(dir) = fixture_dir {
                cfg.mitigation.pages_fixture_dir = Some(dir.join("pages"));
                cfg.llm = LlmConfig { provider_mode: ProviderMode::Fixture, fixture_dir: Some(dir.join("responses")), ..cfg.llm };
            }
            let ids = cwe
                .iter()
                .map(|c| CweId::parse_lenient(c).map_err(|e| EngineError::Config(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let advisor = advisor_from_config(&cfg, None)?;
            let s = advisor.suggest(&ids, &description).map_err(EngineError::Mitigation)?;
            for warning in &s.warnings {
                log::warn!("{warning}");
            }
            if json {
                w(out, &(to_json(&s)? + "\n"))
            } else {
                w(out, &format!("{}\n\nSources:\n{}\n", s.response.trim_end(), s.source_urls.join("\n")))
            }
        }
        Command::Serve { config } => {
            let cfg = EngineConfig::load(&config)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| EngineError::Internal(e.to_string()))?;
            rt.block_on(super::serve(cfg))
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                1
            } else {
                2
            }
        }
    }
}

