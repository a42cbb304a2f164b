mod backend;
mod format;

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use patchr_core::{
    apply_instruction, patch_from_turtle, ApplyReport, Patch, PatchBody, PatchFilter, PatchOrder, PatchStatus,
    PatchType, Registry, SparqlDialect,
};
use patchr_rdf::{parse_turtle, serialize_turtle, Graph, Iri, PrefixMap};
use patchr_service::{parse_dataset_registry, ApiConfig};

use backend::Backend;

#[derive(Parser)]
#[command(name = "patchr", version, about = "Collect, review and apply patch requests for RDF datasets")]
struct Cli {
    /// Journal file of a local repository.
    #[arg(long, global = true, env = "PATCHR_JOURNAL", conflicts_with = "endpoint")]
    journal: Option<PathBuf>,
    /// Base URL of a running repository service.
    #[arg(long, global = true, env = "PATCHR_ENDPOINT")]
    endpoint: Option<String>,
    /// Namespace under which patch IRIs are minted.
    #[arg(long, global = true, env = "PATCHR_REPO_BASE", default_value = "http://localhost:8080/")]
    repo_base: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "PATCHR_LISTEN", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Known datasets as `iri=label;iri=label`.
        #[arg(long, env = "PATCHR_DATASETS", default_value = "")]
        datasets: String,
        /// Comma-separated allowed origins, or `*`.
        #[arg(long, env = "PATCHR_CORS_ORIGINS", value_delimiter = ',')]
        cors_origins: Vec<String>,
    },
    /// Submit every patch in a Turtle document (`-` reads stdin).
    Submit {
        file: PathBuf,
        /// Submitting agent; defaults to the patch's involved actor.
        #[arg(long)]
        agent: Option<String>,
    },
    /// List patches.
    Query {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Print the SPARQL update script for one dataset.
    Export {
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "sparql11")]
        dialect: SparqlDialect,
        #[arg(long)]
        min_advocates: Option<usize>,
        /// Status to include, or `any`.
        #[arg(long, default_value = "active")]
        status: String,
        #[arg(long, default_value = "popular")]
        order: PatchOrder,
        /// Omit PREFIX declarations.
        #[arg(long)]
        no_prefixes: bool,
    },
    /// Apply patches to a Turtle graph file in place.
    Apply {
        graph: PathBuf,
        /// Only patches targeting this graph; the file is treated as that graph.
        #[arg(long)]
        graph_name: Option<String>,
        /// Take patches from this Turtle document instead of the repository.
        #[arg(long)]
        patches: Option<PathBuf>,
        #[command(flatten)]
        filter: FilterArgs,
        /// Report what would change without writing.
        #[arg(long)]
        dry_run: bool,
    },
    /// Rank patches by recency or popularity.
    Report {
        #[arg(default_value = "popular")]
        order: PatchOrder,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Check a patch document; prints nothing when it is valid.
    Validate { file: PathBuf },
}

#[derive(Args, Clone)]
struct FilterArgs {
    #[arg(long)]
    dataset: Option<String>,
    /// Defaults to `active` for apply.
    #[arg(long)]
    status: Option<PatchStatus>,
    /// Patch type; repeatable.
    #[arg(long = "type")]
    types: Vec<PatchType>,
    #[arg(long)]
    min_advocates: Option<usize>,
    #[arg(long)]
    subject: Option<String>,
    #[arg(long, default_value = "recent")]
    order: PatchOrder,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value_t = 0)]
    offset: usize,
}

impl FilterArgs {
    fn to_filter(&self) -> anyhow::Result<PatchFilter> {
        let filter = PatchFilter {
            dataset: self.dataset.as_deref().map(iri).transpose()?,
            status: self.status,
            types: (!self.types.is_empty()).then(|| self.types.iter().cloned().collect::<BTreeSet<_>>()),
            min_advocates: self.min_advocates,
            target_subject: self.subject.as_deref().map(iri).transpose()?,
            order: self.order,
            limit: self.limit,
            offset: self.offset,
        };
        filter.validate()?;
        Ok(filter)
    }
}

fn iri(text: &str) -> anyhow::Result<Iri> {
    Iri::new(text).map_err(|e| anyhow!("{text:?} is not an IRI: {e}"))
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

fn emit(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn prefixes_for(base: &Iri) -> PrefixMap {
    let mut prefixes = PrefixMap::new();
    let ns = if base.as_str().ends_with(['/', '#']) {
        base.clone()
    } else {
        Iri::new(format!("{}/", base.as_str())).unwrap_or_else(|_| base.clone())
    };
    let _ = prefixes.insert("repo", ns);
    prefixes
}

/// `--agent`, else the first involved actor, else the first advocate.
fn submitter(agent: Option<&str>, body: &PatchBody) -> anyhow::Result<Iri> {
    if let Some(agent) = agent {
        return iri(agent);
    }
    body.provenance
        .iter()
        .find_map(|e| e.involved_actor.clone())
        .or_else(|| body.advocates.iter().next().cloned())
        .ok_or_else(|| anyhow!("the patch names no actor; pass --agent"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("patchr: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let base = iri(&cli.repo_base)?;
    let prefixes = prefixes_for(&base);
    let backend = || -> anyhow::Result<Backend> {
        match (&cli.journal, &cli.endpoint) {
            (Some(path), _) => Backend::local(path, base.clone()),
            (None, Some(url)) => Backend::remote(url),
            (None, None) => bail!("no repository: pass --journal <file> or --endpoint <url>"),
        }
    };
    match &cli.command {
        Command::Serve { listen, datasets, cors_origins } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
                )
                .init();
            let mut config = ApiConfig::new(base.clone());
            config.listen = *listen;
            config.journal_path = cli.journal.clone();
            config.datasets = parse_dataset_registry(datasets).map_err(|e| anyhow!(e))?;
            config.cors_origins = cors_origins.iter().map(|o| o.trim().to_owned()).filter(|o| !o.is_empty()).collect();
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(patchr_service::serve(config))?;
            Ok(())
        }
        Command::Submit { file, agent } => {
            let patches = patch_from_turtle(&read_input(file)?)?;
            let mut backend = backend()?;
            let mut out = String::new();
            for patch in &patches {
                let agent = submitter(agent.as_deref(), &patch.body)?;
                let done = backend.submit(&patch.body, &agent)?;
                let verb = if done.merged { "merged" } else { "created" };
                out.push_str(&format!("{verb} {}\n", done.patch_id));
            }
            emit(&out)
        }
        Command::Query { filter, format } => {
            let formatters = format::formatters();
            let formatter = formatter(&formatters, format)?;
            let patches = backend()?.patches(&filter.to_filter()?)?;
            emit(&formatter.patches(&patches, &prefixes)?)
        }
        Command::Export { dataset, dialect, min_advocates, status, order, no_prefixes } => {
            let filter = PatchFilter {
                dataset: Some(iri(dataset)?),
                status: match status.as_str() {
                    "any" => None,
                    s => Some(s.parse().map_err(|e: String| anyhow!(e))?),
                },
                min_advocates: *min_advocates,
                order: *order,
                ..PatchFilter::default()
            };
            emit(&backend()?.export(&filter, *dialect, &prefixes, !no_prefixes)?)
        }
        Command::Apply { graph, graph_name, patches, filter, dry_run } => {
            let mut filter = filter.to_filter()?;
            filter.status.get_or_insert(PatchStatus::Active);
            let selected: Vec<Patch> = match patches {
                Some(file) => patch_from_turtle(&read_input(file)?)?
                    .into_iter()
                    .filter(|p| filter.matches(p))
                    .collect(),
                None => backend()?.patches(&filter)?,
            };
            let name = graph_name.as_deref().map(iri).transpose()?;
            let (report, applied) = apply_file(graph, name, &selected, *dry_run)?;
            emit(&format!(
                "added={} removed={} absent={} patches={}{}\n",
                report.added,
                report.removed,
                report.absent_deletions.len(),
                applied,
                if *dry_run { " (dry run)" } else { "" }
            ))
        }
        Command::Report { order, limit, format } => {
            let formatters = format::formatters();
            let formatter = formatter(&formatters, format)?;
            let summaries = backend()?.report(*order, *limit)?;
            emit(&formatter.summaries(&summaries, &prefixes)?)
        }
        Command::Validate { file } => {
            patch_from_turtle(&read_input(file)?)?;
            Ok(())
        }
    }
}

fn formatter<'r>(
    registry: &'r Registry<dyn format::Formatter>,
    name: &str,
) -> anyhow::Result<&'r dyn format::Formatter> {
    registry
        .get(name)
        .ok_or_else(|| anyhow!("unknown format {name:?}; expected one of {}", registry.names().join(", ")))
}

/// Applies `patches` in order and rewrites the file unless `dry_run`.
fn apply_file(
    path: &Path,
    name: Option<Iri>,
    patches: &[Patch],
    dry_run: bool,
) -> anyhow::Result<(ApplyReport, usize)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let (parsed, file_prefixes) =
        parse_turtle(&text, None).with_context(|| format!("{} is not valid Turtle", path.display()))?;
    let mut graph = match &name {
        Some(n) => Graph::named(n.clone()),
        None => Graph::new(),
    };
    for t in parsed.iter() {
        graph.insert(t.clone());
    }
    let mut total = ApplyReport::default();
    let mut applied = 0;
    for patch in patches {
        if name.as_ref().is_some_and(|n| n != &patch.body.update.target_graph) {
            continue;
        }
        let r = apply_instruction(&mut graph, &patch.body.update)?;
        total.added += r.added;
        total.removed += r.removed;
        total.absent_deletions.extend(r.absent_deletions);
        applied += 1;
    }
    if !dry_run {
        let mut prefixes = PrefixMap::new();
        for (p, ns) in file_prefixes.iter() {
            let _ = prefixes.insert(p, ns.clone());
        }
        std::fs::write(path, serialize_turtle(&graph, &prefixes))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok((total, applied))
}
