//! Pipeline entry point: ingest, enrich, sample, correlate, classify, report,
//! plus a synthetic-corpus generator for offline runs and demos.
//!
//! Every subcommand writes its artifacts under `--out` together with a
//! manifest recording input hashes, the seed, and the tool version; outputs
//! are reproducible byte-for-byte from (inputs, configuration, seed).

mod commands;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "qualimetrics", version, about = "Indicator knowledge graph and analysis pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a corpus, validate it, attach outcomes, and export the graph.
    Ingest {
        /// Record-line corpus files (one JSON object per line).
        #[arg(long, required_unless_present = "manifest", num_args = 1..)]
        corpus: Vec<PathBuf>,
        /// Outcome file (`candidate,field,level,outcome`).
        #[arg(long, required_unless_present = "manifest")]
        outcomes: Option<PathBuf>,
        /// Corpus manifest (JSON) naming record files, bib lists, and outcomes.
        #[arg(long, conflicts_with_all = ["corpus", "outcomes"])]
        manifest: Option<PathBuf>,
        /// Run directory for artifacts.
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolve DOIs and attach citation counts and altmetrics.
    Enrich {
        #[arg(long)]
        out: PathBuf,
        /// Use directory-of-fixtures providers instead of HTTP.
        #[arg(long)]
        offline: bool,
        /// Fixture root holding `doi/`, `citations/`, `altmetrics/`.
        #[arg(long, required_if_eq("offline", "true"))]
        fixtures: Option<PathBuf>,
        /// Provider response cache directory (defaults to `<out>/cache`).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_concurrency: usize,
        /// Minimum interval between live provider requests, in milliseconds.
        #[arg(long, default_value_t = 0)]
        min_interval_ms: u64,
        /// Live endpoints (required without --offline).
        #[arg(long)]
        doi_endpoint: Option<String>,
        #[arg(long)]
        citations_endpoint: Option<String>,
        #[arg(long)]
        altmetrics_endpoint: Option<String>,
    },
    /// Score fields and select one representative per macro field.
    Sample {
        #[arg(long)]
        out: PathBuf,
        /// `field_code,macro_field` file replacing the built-in map.
        #[arg(long)]
        macro_map: Option<PathBuf>,
        /// `macro_field,field_code` override file.
        #[arg(long)]
        overrides: Option<PathBuf>,
    },
    /// Compute per-field and averaged correlation matrices.
    Correlate {
        #[arg(long)]
        out: PathBuf,
        /// category | metric | source | author | all
        #[arg(long, default_value = "all")]
        tier: String,
        /// full | associate | both
        #[arg(long, default_value = "both")]
        level: String,
        /// Restrict to these field codes (comma-separated).
        #[arg(long, value_delimiter = ',')]
        fields: Vec<String>,
        /// Restrict to the fields chosen by a prior `sample` run.
        #[arg(long, conflicts_with = "fields")]
        auto_select: bool,
    },
    /// Evaluate qualification prediction over feature configurations.
    Classify {
        #[arg(long)]
        out: PathBuf,
        /// Configuration id, or `all`.
        #[arg(long, default_value = "all")]
        config: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Restrict to these field codes (comma-separated).
        #[arg(long, value_delimiter = ',')]
        fields: Vec<String>,
        /// full | associate | both
        #[arg(long, default_value = "both")]
        level: String,
    },
    /// Bundle prior outputs into plot-ready long-format tables.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic offline corpus bundle (records, outcomes, fixtures).
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Field codes to populate (comma-separated).
        #[arg(long, value_delimiter = ',', default_values_t = vec!["01-B1".to_string(), "13-A1".to_string()])]
        fields: Vec<String>,
        #[arg(long, default_value_t = 15)]
        candidates_per_field_level: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest { corpus, outcomes, manifest, out } => {
            commands::ingest(&corpus, outcomes.as_deref(), manifest.as_deref(), &out)
        }
        Command::Enrich {
            out,
            offline,
            fixtures,
            cache_dir,
            max_concurrency,
            min_interval_ms,
            doi_endpoint,
            citations_endpoint,
            altmetrics_endpoint,
        } => commands::enrich(commands::EnrichArgs {
            out,
            offline,
            fixtures,
            cache_dir,
            max_concurrency,
            min_interval_ms,
            doi_endpoint,
            citations_endpoint,
            altmetrics_endpoint,
        }),
        Command::Sample { out, macro_map, overrides } => {
            commands::sample(&out, macro_map.as_deref(), overrides.as_deref())
        }
        Command::Correlate { out, tier, level, fields, auto_select } => {
            commands::correlate(&out, &tier, &level, &fields, auto_select)
        }
        Command::Classify { out, config, seed, runs, folds, fields, level } => {
            commands::classify(&out, &config, seed, runs, folds, &fields, &level)
        }
        Command::Report { out } => commands::report(&out),
        Command::Synth { out, seed, fields, candidates_per_field_level } => {
            commands::synth(&out, seed, &fields, candidates_per_field_level)
        }
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
