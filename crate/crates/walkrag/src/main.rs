use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use tracing_subscriber::EnvFilter;
use walkrag::artifacts::{ingest, write_artifacts, IngestError};
use walkrag::config::{Config, ConfigError, IndexModeKind};
use walkrag::corpus::load_corpus;
use walkrag::engine::{build_index, encoder_from_config, Engine, EngineError, RouteError, TurnError};
use walkrag::eval::{load_dataset, run_eval};
use walkrag::index_file::write_index;
use walkrag::service::{serve, AppState};
use walkrag::session::{ConversationState, SessionStore};
use walkrag_core::intent::{extract_preferences, Preference};
use walkrag_core::walkability::IndicatorKind;

const EXIT_FAILURE: u8 = 1;
const EXIT_MISSING_FILE: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;
const EXIT_NO_ROUTE: u8 = 4;

#[derive(Parser)]
#[command(name = "walkrag", version, about = "Walkable itinerary recommendation with retrieval-augmented answers")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "WALKRAG_CONFIG")]
    config: Option<PathBuf>,
    /// Log at debug level.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Approx,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a map extract and gazetteer; write graph, features and stats.
    Ingest {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        gazetteer: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a JSONL corpus and write a vector index file.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
    },
    /// Plan the most walkable route and print its payload.
    Route {
        #[arg(long = "from")]
        origin: String,
        #[arg(long = "to")]
        destination: String,
        /// Indicator (green_area, sidewalk, accessibility, pollution or a keyword such as "green") or POI category.
        #[arg(long)]
        prefer: Vec<String>,
        /// Print GeoJSON instead of the payload.
        #[arg(long)]
        geojson: bool,
    },
    /// Run one conversational turn.
    Ask {
        utterance: String,
        /// Print the full turn as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long)]
        listen: Option<String>,
    },
    /// Run the evaluation harness over a JSONL dataset.
    Eval {
        dataset: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

/// An error with its exit status.
struct Failure(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_FAILURE, e.into())
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| {
        let code = if e.kind() == std::io::ErrorKind::NotFound { EXIT_MISSING_FILE } else { EXIT_FAILURE };
        Failure(code, anyhow::Error::new(e).context(format!("cannot open {}", path.display())))
    })
}

fn load_engine(config: Config) -> Result<Engine, Failure> {
    Engine::from_config(config).map_err(|e| {
        let code = match &e {
            EngineError::Open { source, .. } if source.kind() == std::io::ErrorKind::NotFound => EXIT_MISSING_FILE,
            _ => EXIT_FAILURE,
        };
        Failure(code, e.into())
    })
}

fn parse_preference(value: &str) -> Vec<Preference> {
    let v = value.trim().to_lowercase();
    if let Some(k) = IndicatorKind::parse(&v) {
        return vec![Preference::Indicator(k)];
    }
    let found = extract_preferences(&v.replace('_', " "));
    if found.is_empty() {
        vec![Preference::Category(v)]
    } else {
        found
    }
}

/// Writes to stdout; a closed pipe (`walkrag ... | head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = || {
        Config::load(cli.config.as_deref()).map_err(|e| match e {
            ConfigError::Io { ref source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
                Failure(EXIT_MISSING_FILE, e.into())
            }
            other => Failure::from(other),
        })
    };
    match cli.command {
        Command::Ingest { map, gazetteer, out } => {
            let ingested = ingest(open(&map)?, open(&gazetteer)?).map_err(|e| match e {
                IngestError::Osm(e) => Failure(EXIT_FAILURE, anyhow::Error::new(e).context(map.display().to_string())),
                other => Failure::from(other),
            })?;
            write_artifacts(&out, &ingested).with_context(|| format!("writing {}", out.display()))?;
            let s = &ingested.stats;
            let features: Vec<String> = s.features.iter().map(|(k, v)| format!("{k}={v}")).collect();
            emit(&format!(
                "extract: {} nodes, {} ways\ngraph: {} nodes, {} edges\nfeatures: {}\ngazetteer: {} entries\n",
                s.extract_nodes,
                s.extract_ways,
                s.graph_nodes,
                s.graph_edges,
                features.join(" "),
                s.gazetteer_entries
            ))?;
        }
        Command::Index { corpus, out, mode } => {
            let mut config = config()?;
            config.index_mode = match mode {
                Mode::Exact => IndexModeKind::Exact,
                Mode::Approx => IndexModeKind::Approximate,
            };
            let store = load_corpus(open(&corpus)?).with_context(|| corpus.display().to_string())?;
            let encoder = encoder_from_config(&config);
            let index = build_index(&store, encoder.as_ref(), config.index_mode)?;
            let mut w = BufWriter::new(File::create(&out).with_context(|| format!("cannot create {}", out.display()))?);
            write_index(&index, &mut w)?;
            w.flush()?;
            emit(&format!("indexed {} passages, dimension {}\n", index.len(), index.dimension()))?;
        }
        Command::Route { origin, destination, prefer, geojson } => {
            let engine = load_engine(config()?)?;
            let preferences: Vec<Preference> = prefer.iter().flat_map(|p| parse_preference(p)).collect();
            match engine.plan_route(&origin, &destination, &preferences) {
                Ok(outcome) if geojson => print_json(&outcome.answer.geojson())?,
                Ok(outcome) => emit(&(outcome.answer.payload.to_json_pretty() + "\n"))?,
                Err(e @ RouteError::NotFound(_)) => return Err(Failure(EXIT_NOT_FOUND, e.into())),
                Err(e) => return Err(Failure(EXIT_NO_ROUTE, e.into())),
            }
        }
        Command::Ask { utterance, json } => {
            let engine = load_engine(config()?)?;
            let mut state = ConversationState::default();
            match engine.respond(&mut state, &utterance) {
                Ok(turn) if json => print_json(&turn)?,
                Ok(turn) => emit(&format!("{}\n", turn.answer.trim_end()))?,
                Err(e @ TurnError::EmptyUtterance) => return Err(e.into()),
                Err(TurnError::ClientFailure { message, detail }) => {
                    return Err(Failure(EXIT_FAILURE, anyhow::anyhow!("{message} ({detail})")))
                }
            }
        }
        Command::Serve { listen } => {
            let config = config()?;
            let listen = listen.unwrap_or_else(|| config.listen.clone());
            let sessions = match &config.session_dir {
                Some(dir) => SessionStore::persistent(dir)?,
                None => SessionStore::in_memory(),
            };
            let engine = load_engine(config)?;
            let state = Arc::new(AppState { engine, sessions });
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(serve(state, &listen)).with_context(|| format!("serving on {listen}"))?;
        }
        Command::Eval { dataset, json } => {
            let records = load_dataset(open(&dataset)?).with_context(|| dataset.display().to_string())?;
            let engine = load_engine(config()?)?;
            let report = run_eval(&engine, &records);
            if json {
                print_json(&report)?;
            } else {
                emit(&report.table())?;
            }
        }
    }
    Ok(())
}

/// Error chain joined with ": ", skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if out.contains(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = if cli.verbose { "debug" } else { "warn" };
    let filter = EnvFilter::try_from_env("WALKRAG_LOG").unwrap_or_else(|_| EnvFilter::new(default));
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(code)
        }
    }
}
