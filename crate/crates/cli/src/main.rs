//! `tabforge`: initialize, serve, lint, export and analyze annotation sessions.
//!
//! Exit codes: 0 success, 1 domain findings (lint violations, blocked
//! export), 2 usage or runtime errors.

use std::collections::BTreeMap;
use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tabforge_core::analysis::{
    dataset_stats, provenance_effect, read_predictions, strategy_effect, variant_effect, PairIndex,
};
use tabforge_core::editor::{default_rules, lint_constraints, lint_session, parse_rules, ConstraintRule, LintReport};
use tabforge_core::initializer::{build_category_map, build_value_pool, init_session, HeuristicTagger};
use tabforge_core::model::{DatasetTag, Hypothesis, Table, Variant};
use tabforge_core::store::{export_dataset, import_bundle, is_safe_id, ExportBundle, StoreError};
use tabforge_core::table_json::parse_table;
use tabforge_core::tsv::read_pair_rows;
use tabforge_core::{AnnotationSession, CategoryMap, ExactEffectReport, InitPolicy, SessionStore};
use tabforge_server::{ServerConfig, CATEGORY_MAP_FILE};

#[derive(Parser)]
#[command(name = "tabforge", version, about = "Counterfactual table annotation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create annotation sessions with automatically perturbed drafts.
    Init {
        /// JSON list of {path, dataset_tag, category}; paths are relative to the manifest.
        #[arg(long)]
        corpus: PathBuf,
        /// Pairs TSV; the `orig` rows become each table's hypotheses.
        #[arg(long)]
        hypotheses: PathBuf,
        /// JSON {perturb_probability, class_weights, seed}. Defaults apply when omitted.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Key → type-group map; inferred from the corpus when omitted.
        #[arg(long)]
        category_map: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Store directory to create sessions in.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "TABFORGE_STORE")]
        store_dir: PathBuf,
        #[arg(long)]
        rules_file: Option<PathBuf>,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
    /// Check a session (or a single table) against date rules.
    Lint {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Write the export bundle for every session in a store.
    Export {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Export even when drafts have structural lint issues.
        #[arg(long)]
        force: bool,
    },
    /// Accuracy-drop reports from a predictions TSV.
    Analyze {
        #[arg(long)]
        export: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// Directory for `{strategy,provenance,variant}.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Table and pair counts of an export.
    Stats {
        #[arg(long)]
        export: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Deserialize)]
struct CorpusEntry {
    path: PathBuf,
    dataset_tag: DatasetTag,
    #[serde(default)]
    category: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Init {
            corpus,
            hypotheses,
            policy,
            category_map,
            seed,
            out,
        } => init(
            &corpus,
            &hypotheses,
            policy.as_deref(),
            category_map.as_deref(),
            seed,
            &out,
        ),
        Command::Serve {
            port,
            host,
            store_dir,
            rules_file,
            ui_dir,
        } => {
            let mut config = ServerConfig::new(store_dir);
            config.rules = load_rules(rules_file.as_deref())?;
            config.ui_dir = ui_dir;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(tabforge_server::serve(config, SocketAddr::new(host, port)))?;
            Ok(0)
        }
        Command::Lint { session, rules } => lint(&session, rules.as_deref()),
        Command::Export {
            store,
            out,
            rules,
            force,
        } => export(&store, &out, rules.as_deref(), force),
        Command::Analyze {
            export,
            predictions,
            out,
            format,
        } => analyze(&export, &predictions, out.as_deref(), format),
        Command::Stats { export } => {
            let sessions = load_export(&export)?;
            print!("{}", dataset_stats(&sessions).render());
            Ok(0)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_rules(path: Option<&Path>) -> Result<Vec<ConstraintRule>> {
    match path {
        Some(p) => parse_rules(&read(p)?).with_context(|| format!("rules file {}", p.display())),
        None => Ok(default_rules()),
    }
}

fn init(
    corpus: &Path,
    hypotheses: &Path,
    policy: Option<&Path>,
    cmap_path: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<u8> {
    let entries: Vec<CorpusEntry> =
        serde_json::from_str(&read(corpus)?).with_context(|| format!("corpus manifest {}", corpus.display()))?;
    let base = corpus.parent().unwrap_or(Path::new("."));
    let mut tables: Vec<(Table, DatasetTag)> = Vec::new();
    for e in &entries {
        let path = base.join(&e.path);
        let text = read(&path)?;
        let mut t = parse_table(&text).with_context(|| format!("table {}", path.display()))?;
        let has_id = serde_json::from_str::<serde_json::Value>(&text).is_ok_and(|v| v["_meta"]["table_id"].is_string());
        if !has_id {
            t.table_id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .context("table file name is not valid UTF-8")?
                .to_owned();
        }
        if !is_safe_id(&t.table_id) {
            bail!("table id {:?} is not usable as a file name", t.table_id);
        }
        if !e.category.is_empty() {
            t.category = e.category.clone();
        }
        tables.push((t, e.dataset_tag));
    }

    let mut policy: InitPolicy = match policy {
        Some(p) => serde_json::from_str(&read(p)?).with_context(|| format!("policy {}", p.display()))?,
        None => InitPolicy::default(),
    };
    if let Some(seed) = seed {
        policy.seed = seed;
    }
    let cmap: CategoryMap = match cmap_path {
        Some(p) => serde_json::from_str(&read(p)?).with_context(|| format!("category map {}", p.display()))?,
        None => build_category_map(tables.iter().map(|(t, _)| t), &HeuristicTagger),
    };

    let rows = read_pair_rows(&read(hypotheses)?).with_context(|| format!("hypotheses {}", hypotheses.display()))?;
    let mut by_table: BTreeMap<&str, Vec<Hypothesis>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.variant == Variant::Orig) {
        by_table.entry(r.table_id.as_str()).or_default().push(Hypothesis::new(
            r.pair_id.clone(),
            r.text.clone(),
            r.label,
        ));
    }

    let pool = build_value_pool(tables.iter().map(|(t, d)| (t, *d)))?;
    let store = SessionStore::open(out)?;
    let mut created = 0;
    for (t, _) in &tables {
        let Some(hyps) = by_table.get(t.table_id.as_str()) else {
            eprintln!("warning: no hypotheses for table {}; skipped", t.table_id);
            continue;
        };
        let session = init_session(t, hyps, &pool, &cmap, &policy).with_context(|| format!("table {}", t.table_id))?;
        store.put_session(&session)?;
        created += 1;
    }
    let mut cmap_text = serde_json::to_string_pretty(&cmap)?;
    cmap_text.push('\n');
    fs::write(out.join(CATEGORY_MAP_FILE), cmap_text)?;
    println!("initialized {created} sessions in {}", out.display());
    Ok(0)
}

fn lint(path: &Path, rules: Option<&Path>) -> Result<u8> {
    let rules = load_rules(rules)?;
    let text = read(path)?;
    let report: LintReport = match AnnotationSession::from_json(&text) {
        Ok(s) => lint_session(&s, &rules),
        Err(_) => {
            let t =
                parse_table(&text).with_context(|| format!("{} is neither a session nor a table", path.display()))?;
            lint_constraints(&t, &rules)
        }
    };
    print!("{}", report.render());
    Ok(u8::from(report.has_violations() || report.blocking().next().is_some()))
}

fn export(store: &Path, out: &Path, rules: Option<&Path>, force: bool) -> Result<u8> {
    let rules = load_rules(rules)?;
    if !store.join("sessions").is_dir() {
        bail!("{} is not a session store", store.display());
    }
    let sessions = SessionStore::open(store)?.load_all()?;
    match export_dataset(&sessions, out, &rules, force) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {}", w.message);
            }
            println!(
                "exported {} sessions, {} tables, {} pairs to {}",
                summary.sessions,
                summary.tables,
                summary.pair_rows,
                out.display()
            );
            Ok(0)
        }
        Err(StoreError::LintBlocked(entries)) => {
            print!("{}", LintReport { entries }.render());
            eprintln!("export blocked by structural lint issues; rerun with --force to export anyway");
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn load_export(dir: &Path) -> Result<Vec<AnnotationSession>> {
    let bundle = ExportBundle::read_from(dir).with_context(|| format!("reading export {}", dir.display()))?;
    Ok(import_bundle(&bundle)?)
}

fn analyze(export: &Path, predictions: &Path, out: Option<&Path>, format: Format) -> Result<u8> {
    let sessions = load_export(export)?;
    let records = read_predictions(&read(predictions)?)?;
    let index = PairIndex::new(&sessions);
    let reports: [(&str, ExactEffectReport); 3] = [
        ("strategy", strategy_effect(&records, &index)?),
        ("provenance", provenance_effect(&records, &index)?),
        ("variant", variant_effect(&records, &index)?),
    ];
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        for (name, rep) in &reports {
            fs::write(dir.join(format!("{name}.csv")), rep.to_csv())?;
        }
    }
    for (i, (name, rep)) in reports.iter().enumerate() {
        if i > 0 {
            println!();
        }
        println!("# {name}");
        match format {
            Format::Text => print!("{}", rep.render()),
            Format::Csv => print!("{}", rep.to_csv()),
        }
    }
    Ok(0)
}
