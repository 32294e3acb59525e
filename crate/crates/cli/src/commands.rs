//! Subcommand implementations. Each reads its inputs from the run directory,
//! writes its artifacts there, and records a manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qualimetrics_core::classify::{self, EvalReport};
use qualimetrics_core::enrich::{
    self, EnrichOptions, FixtureAltmetricsProvider, FixtureCitationProvider, FixtureDoiProvider,
    MetricsCache, ProviderConfig, Providers,
};
use qualimetrics_core::graph::Graph;
use qualimetrics_core::ingest::{self, CorpusManifest};
use qualimetrics_core::model::{validate_profile, AcademicLevel, CandidateProfile, FieldCode, Violation};
use qualimetrics_core::sampling::{self, MacroMap, Overrides};
use qualimetrics_core::scholar;
use qualimetrics_core::stats::{self, CorrelationMatrix, MatrixScope, Tier};
use qualimetrics_core::synth as core_synth;

use crate::manifest::Manifest;

const PROFILES_FILE: &str = "profiles.json";
const ENRICHED_FILE: &str = "profiles_enriched.json";

fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &serde_json::to_string_pretty(value).expect("artifacts serialize"))
}

fn read_profiles(out: &Path) -> Result<Vec<CandidateProfile>> {
    let path = out.join(PROFILES_FILE);
    let body = fs::read_to_string(&path)
        .with_context(|| format!("reading {}; run `ingest` first", path.display()))?;
    serde_json::from_str(&body).with_context(|| format!("parsing {}", path.display()))
}

/// Profiles for the analysis stages: the enriched set when `enrich` has run,
/// the ingested set otherwise.
fn read_analysis_profiles(out: &Path) -> Result<(Vec<CandidateProfile>, PathBuf)> {
    let enriched = out.join(ENRICHED_FILE);
    if enriched.exists() {
        let body = fs::read_to_string(&enriched)?;
        let profiles =
            serde_json::from_str(&body).with_context(|| format!("parsing {}", enriched.display()))?;
        return Ok((profiles, enriched));
    }
    read_profiles(out).map(|p| (p, out.join(PROFILES_FILE)))
}

fn parse_levels(token: &str) -> Result<Vec<AcademicLevel>> {
    match token {
        "both" => Ok(AcademicLevel::ALL.to_vec()),
        other => AcademicLevel::from_token(other)
            .map(|l| vec![l])
            .ok_or_else(|| anyhow::anyhow!("unknown level `{other}` (expected full, associate, or both)")),
    }
}

fn parse_tiers(token: &str) -> Result<Vec<Tier>> {
    match token {
        "all" => Ok(vec![Tier::Category, Tier::Metric, Tier::Source, Tier::Author]),
        other => Tier::from_token(other)
            .map(|t| vec![t])
            .ok_or_else(|| anyhow::anyhow!("unknown tier `{other}` (expected category, metric, source, author, or all)")),
    }
}

/// Validation artifact written by `ingest`.
#[derive(Serialize, Deserialize)]
struct ValidationReport {
    malformed_lines: Vec<ingest::MalformedLine>,
    missing_outcomes: Vec<(String, String, AcademicLevel)>,
    violations: BTreeMap<String, Vec<Violation>>,
}

pub fn ingest(
    corpus: &[PathBuf],
    outcomes: Option<&Path>,
    corpus_manifest: Option<&Path>,
    out: &Path,
) -> Result<()> {
    fs::create_dir_all(out)?;
    let mut manifest = Manifest::new("ingest");

    // resolve the file set from either the flags or a corpus manifest
    let (record_paths, bib_entries, outcomes_path) = match corpus_manifest {
        Some(path) => {
            let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let parsed: CorpusManifest = serde_json::from_str(&body)?;
            let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
            parsed.verify_paths(&base)?;
            manifest.input(path)?;
            (
                parsed.records.iter().map(|p| base.join(p)).collect::<Vec<_>>(),
                parsed
                    .bibs
                    .iter()
                    .map(|b| (base.join(&b.path), b.candidate.clone(), b.field.clone(), b.level.clone()))
                    .collect::<Vec<_>>(),
                base.join(&parsed.outcomes),
            )
        }
        None => {
            let outcomes = outcomes.context("--outcomes is required without --manifest")?;
            (corpus.to_vec(), Vec::new(), outcomes.to_path_buf())
        }
    };

    // one concatenated stream so grouping spans files
    let mut combined = String::new();
    for path in &record_paths {
        manifest.input(path)?;
        combined.push_str(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        );
        if !combined.ends_with('\n') {
            combined.push('\n');
        }
    }
    let mut parsed = if combined.trim().is_empty() && !bib_entries.is_empty() {
        ingest::ParseOutcome { profiles: Vec::new(), malformed: Vec::new() }
    } else {
        ingest::parse_record_stream(combined.as_bytes())?
    };

    for (path, candidate, field, level) in &bib_entries {
        manifest.input(path)?;
        let text = fs::read_to_string(path)?;
        let field = FieldCode::new(field)?;
        let level = AcademicLevel::from_token(level)
            .with_context(|| format!("unknown level `{level}` in corpus manifest"))?;
        let (profile, mut malformed) = ingest::parse_bib_list(&text, candidate, &field, level);
        parsed.malformed.append(&mut malformed);
        if let Some(profile) = profile {
            parsed.profiles.push(profile);
        }
    }
    if parsed.profiles.is_empty() {
        bail!("no well-formed records in the corpus");
    }

    manifest.input(&outcomes_path)?;
    let outcome_map = ingest::load_outcomes(BufReader::new(
        fs::File::open(&outcomes_path).with_context(|| format!("opening {}", outcomes_path.display()))?,
    ))?;
    let missing = ingest::attach_outcomes(&mut parsed.profiles, &outcome_map);

    let mut violations = BTreeMap::new();
    for profile in &parsed.profiles {
        let found = validate_profile(profile);
        if !found.is_empty() {
            violations
                .insert(format!("{}:{}:{}", profile.id, profile.field.code(), profile.level), found);
        }
    }

    let mut graph = Graph::new();
    for profile in &parsed.profiles {
        graph.add_profile(profile)?;
    }
    let graph_path = out.join("graph.nt");
    let mut sink = Vec::new();
    graph.export(&mut sink)?;
    fs::write(&graph_path, &sink)?;
    manifest.output(&graph_path);

    let profiles_path = out.join(PROFILES_FILE);
    write_json(&profiles_path, &parsed.profiles)?;
    manifest.output(&profiles_path);

    let validation_path = out.join("validation.json");
    write_json(
        &validation_path,
        &ValidationReport {
            malformed_lines: parsed.malformed,
            missing_outcomes: missing,
            violations,
        },
    )?;
    manifest.output(&validation_path);
    write_json(&out.join("graph_stats.json"), &graph.stats())?;
    manifest.output(&out.join("graph_stats.json"));
    manifest.write(out)
}

pub struct EnrichArgs {
    pub out: PathBuf,
    pub offline: bool,
    pub fixtures: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub max_concurrency: usize,
    pub min_interval_ms: u64,
    pub doi_endpoint: Option<String>,
    pub citations_endpoint: Option<String>,
    pub altmetrics_endpoint: Option<String>,
}

pub fn enrich(args: EnrichArgs) -> Result<()> {
    let out = &args.out;
    let mut manifest = Manifest::new("enrich");
    manifest.input(&out.join(PROFILES_FILE))?;
    let profiles = read_profiles(out)?;
    let cache = MetricsCache::new(args.cache_dir.clone().unwrap_or_else(|| out.join("cache")));
    let options = EnrichOptions { max_concurrency: args.max_concurrency.max(1) };

    let (enriched, report) = if args.offline {
        let root = args.fixtures.clone().context("--fixtures is required with --offline")?;
        let doi = FixtureDoiProvider::new(root.join("doi"));
        let citations = FixtureCitationProvider::new(root.join("citations"));
        let altmetrics = FixtureAltmetricsProvider::new(root.join("altmetrics"));
        let providers = Providers { doi: &doi, citations: &citations, altmetrics: &altmetrics };
        enrich::enrich_all(&profiles, &providers, &cache, &options)
    } else {
        let endpoint = |name: &str, value: &Option<String>, env: &str| -> Result<ProviderConfig> {
            let endpoint = value
                .clone()
                .with_context(|| format!("--{name}-endpoint is required without --offline"))?;
            let mut config = ProviderConfig::new(endpoint);
            config.credential_env = Some(env.to_string());
            config.max_concurrency = options.max_concurrency;
            config.min_interval = std::time::Duration::from_millis(args.min_interval_ms);
            Ok(config)
        };
        let doi =
            enrich::HttpDoiProvider::new(endpoint("doi", &args.doi_endpoint, "QUALIMETRICS_DOI_TOKEN")?)?;
        let citations = enrich::HttpCitationProvider::new(endpoint(
            "citations",
            &args.citations_endpoint,
            "QUALIMETRICS_CITATIONS_TOKEN",
        )?)?;
        let altmetrics = enrich::HttpAltmetricsProvider::new(endpoint(
            "altmetrics",
            &args.altmetrics_endpoint,
            "QUALIMETRICS_ALTMETRICS_TOKEN",
        )?)?;
        let providers = Providers { doi: &doi, citations: &citations, altmetrics: &altmetrics };
        enrich::enrich_all(&profiles, &providers, &cache, &options)
    };

    let profiles_path = out.join(ENRICHED_FILE);
    write_json(&profiles_path, &enriched)?;
    manifest.output(&profiles_path);
    let report_path = out.join("enrichment_report.json");
    write_json(&report_path, &report)?;
    manifest.output(&report_path);
    manifest.write(out)
}

pub fn sample(out: &Path, macro_map: Option<&Path>, overrides: Option<&Path>) -> Result<()> {
    let mut manifest = Manifest::new("sample");
    let (profiles, source_path) = read_analysis_profiles(out)?;
    manifest.input(&source_path)?;

    let map = match macro_map {
        Some(path) => {
            manifest.input(path)?;
            MacroMap::from_reader(BufReader::new(fs::File::open(path)?))?
        }
        None => MacroMap::builtin(),
    };
    let override_map: Overrides = match overrides {
        Some(path) => {
            manifest.input(path)?;
            sampling::overrides_from_reader(BufReader::new(fs::File::open(path)?))?
        }
        None => Overrides::new(),
    };

    let counts = sampling::field_counts(&profiles);
    let scored = sampling::ap_scores(counts)?;
    let selection = sampling::select_fields(&scored, &map, &override_map)?;

    let mut counts_csv =
        String::from("field,a1,p1,a2,p2,sigma2_a1,sigma2_p1,sigma2_a2,sigma2_p2,ap\n");
    for c in &scored {
        let _ = writeln!(
            counts_csv,
            "{},{},{},{},{},{},{},{},{},{}",
            c.field, c.a1, c.p1, c.a2, c.p2, c.sigma2_a1, c.sigma2_p1, c.sigma2_a2, c.sigma2_p2, c.ap
        );
    }
    let counts_path = out.join("field_counts.csv");
    write_text(&counts_path, &counts_csv)?;
    manifest.output(&counts_path);

    let csv_path = out.join("selection.csv");
    write_text(&csv_path, &selection.to_csv())?;
    manifest.output(&csv_path);
    let json_path = out.join("selection.json");
    write_json(&json_path, &selection)?;
    manifest.output(&json_path);
    manifest.write(out)
}

/// Index of the matrices a `correlate` run wrote, consumed by `report`.
#[derive(Serialize, Deserialize)]
struct CorrelationsIndex {
    files: Vec<String>,
    skipped: Vec<String>,
}

pub fn correlate(out: &Path, tier: &str, level: &str, fields: &[String], auto_select: bool) -> Result<()> {
    let mut manifest = Manifest::new("correlate");
    let (mut profiles, source_path) = read_analysis_profiles(out)?;
    manifest.input(&source_path)?;

    let selected: Vec<String> = if auto_select {
        let path = out.join("selection.json");
        let body = fs::read_to_string(&path)
            .with_context(|| format!("reading {}; run `sample` before --auto-select", path.display()))?;
        manifest.input(&path)?;
        let selection: sampling::SelectionResult = serde_json::from_str(&body)?;
        selection.selected_codes().into_iter().map(String::from).collect()
    } else {
        fields.to_vec()
    };
    if !selected.is_empty() {
        profiles.retain(|p| selected.iter().any(|f| f == p.field.code()));
        if profiles.is_empty() {
            bail!("no profiles left after restricting to fields {selected:?}");
        }
    }

    let tiers = parse_tiers(tier)?;
    let levels = parse_levels(level)?;
    let dir = out.join("correlations");
    fs::create_dir_all(&dir)?;
    let mut index = CorrelationsIndex { files: Vec::new(), skipped: Vec::new() };

    for &tier in &tiers {
        for &level in &levels {
            if !profiles.iter().any(|p| p.level == level) {
                index.skipped.push(format!("{}_{}: no profiles at this level", tier, level));
                continue;
            }
            let result = match stats::level_matrices(&profiles, tier, level) {
                Ok(result) => result,
                Err(stats::StatsError::EmptyInput) | Err(stats::StatsError::InsufficientSamples { .. }) => {
                    index.skipped.push(format!("{}_{}: too few rows", tier, level));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            for matrix in result.per_field.iter().chain(std::iter::once(&result.averaged)) {
                let stem = format!("{}_{}_{}", tier, level, matrix.scope.token());
                let csv_path = dir.join(format!("{stem}.csv"));
                write_text(&csv_path, &matrix.to_csv())?;
                manifest.output(&csv_path);
                let json_path = dir.join(format!("{stem}.json"));
                write_json(&json_path, matrix)?;
                manifest.output(&json_path);
                index.files.push(format!("correlations/{stem}.json"));
            }
            for skipped_field in result.skipped_fields {
                index.skipped.push(format!("{}_{}_{}: fewer than 3 rows", tier, level, skipped_field));
            }
            if tier == Tier::Author {
                let rows: Vec<scholar::AuthorIndicatorRow> = profiles
                    .iter()
                    .filter(|p| p.level == level)
                    .map(scholar::AuthorIndicatorRow::for_candidate)
                    .collect();
                let path = out.join(format!("author_indicators_{level}.csv"));
                write_text(&path, &scholar::author_rows_csv(&rows))?;
                manifest.output(&path);
            }
        }
    }

    let index_path = out.join("correlations_index.json");
    write_json(&index_path, &index)?;
    manifest.output(&index_path);
    manifest.write(out)
}

pub fn classify(
    out: &Path,
    config: &str,
    seed: u64,
    runs: usize,
    folds: usize,
    fields: &[String],
    level: &str,
) -> Result<()> {
    let mut manifest = Manifest::new("classify").seed(seed);
    let (profiles, source_path) = read_analysis_profiles(out)?;
    manifest.input(&source_path)?;
    let levels = parse_levels(level)?;

    let configs = if config == "all" {
        classify::feature_configs()
    } else {
        vec![classify::feature_config(config)
            .ok_or(classify::ClassifyError::UnknownConfig(config.to_string()))?]
    };

    // group profiles into (field, level) partitions
    let mut partitions: BTreeMap<(String, AcademicLevel), Vec<CandidateProfile>> = BTreeMap::new();
    for profile in profiles {
        if !levels.contains(&profile.level) {
            continue;
        }
        if !fields.is_empty() && !fields.iter().any(|f| f == profile.field.code()) {
            continue;
        }
        partitions.entry((profile.field.code().to_string(), profile.level)).or_default().push(profile);
    }
    if partitions.is_empty() {
        bail!("no (field, level) partitions match the requested restriction");
    }

    let mut reports: Vec<EvalReport> = Vec::new();
    for ((field, level), partition) in &partitions {
        for config in &configs {
            let report = classify::cross_validate(partition, config, runs, folds, seed)
                .with_context(|| format!("cross-validating {field}/{level} with `{}`", config.id()))?;
            reports.push(report);
        }
    }

    let dir = out.join("classify");
    fs::create_dir_all(&dir)?;
    let mut eval_csv = String::from("field,level,config,precision,recall,f_measure,seed\n");
    for r in &reports {
        let _ = writeln!(
            eval_csv,
            "{},{},{},{},{},{},{}",
            r.field, r.level, r.config, r.precision, r.recall, r.f_measure, r.seed
        );
    }
    let eval_csv_path = dir.join("eval.csv");
    write_text(&eval_csv_path, &eval_csv)?;
    manifest.output(&eval_csv_path);

    let mut runs_csv = String::from(
        "field,level,config,run,precision,recall,f_measure,macro_precision,macro_recall,macro_f_measure,tp,fp,fn,tn\n",
    );
    for r in &reports {
        for m in &r.runs {
            let _ = writeln!(
                runs_csv,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.field,
                r.level,
                r.config,
                m.run,
                m.precision,
                m.recall,
                m.f_measure,
                m.macro_precision,
                m.macro_recall,
                m.macro_f_measure,
                m.confusion.tp,
                m.confusion.fp,
                m.confusion.fn_,
                m.confusion.tn
            );
        }
    }
    let runs_csv_path = dir.join("runs.csv");
    write_text(&runs_csv_path, &runs_csv)?;
    manifest.output(&runs_csv_path);

    let eval_json_path = dir.join("eval.json");
    write_json(&eval_json_path, &reports)?;
    manifest.output(&eval_json_path);
    manifest.write(out)
}

pub fn report(out: &Path) -> Result<()> {
    let mut manifest = Manifest::new("report");
    let dir = out.join("report");
    fs::create_dir_all(&dir)?;

    // correlation matrices -> long format for heatmaps
    let index_path = out.join("correlations_index.json");
    if index_path.exists() {
        manifest.input(&index_path)?;
        let index: CorrelationsIndex = serde_json::from_str(&fs::read_to_string(&index_path)?)?;
        let mut long = String::from("tier,level,scope,row,col,r,t,p,se,n,n_fields\n");
        for file in &index.files {
            let path = out.join(file);
            manifest.input(&path)?;
            let matrix: CorrelationMatrix = serde_json::from_str(&fs::read_to_string(&path)?)?;
            let scope = match &matrix.scope {
                MatrixScope::Averaged => "averaged".to_string(),
                MatrixScope::Field(code) => code.clone(),
            };
            let opt =
                |v: Option<f64>| v.map(stats::format_float).unwrap_or_else(|| "NA".to_string());
            for (i, row_label) in matrix.labels.iter().enumerate() {
                for (j, col_label) in matrix.labels.iter().enumerate() {
                    let cell = &matrix.cells[i][j];
                    let _ = writeln!(
                        long,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        matrix.tier,
                        matrix.level,
                        scope,
                        row_label,
                        col_label,
                        opt(cell.r),
                        opt(cell.t),
                        opt(cell.p),
                        opt(cell.se),
                        cell.n,
                        cell.n_fields.map(|v| v.to_string()).unwrap_or_else(|| "NA".to_string()),
                    );
                }
            }
        }
        let path = dir.join("correlations_long.csv");
        write_text(&path, &long)?;
        manifest.output(&path);
    }

    // evaluation reports -> long format for bar charts
    let eval_path = out.join("classify").join("eval.json");
    if eval_path.exists() {
        manifest.input(&eval_path)?;
        let reports: Vec<EvalReport> = serde_json::from_str(&fs::read_to_string(&eval_path)?)?;
        let mut long = String::from("field,level,config,measure,value\n");
        for r in &reports {
            for (measure, value) in [
                ("precision", r.precision),
                ("recall", r.recall),
                ("f_measure", r.f_measure),
                ("macro_precision", r.macro_precision),
                ("macro_recall", r.macro_recall),
                ("macro_f_measure", r.macro_f_measure),
            ] {
                let _ = writeln!(long, "{},{},{},{},{}", r.field, r.level, r.config, measure, value);
            }
        }
        let path = dir.join("classification_long.csv");
        write_text(&path, &long)?;
        manifest.output(&path);
    }

    // selection report passes through unchanged
    let selection_path = out.join("selection.csv");
    if selection_path.exists() {
        manifest.input(&selection_path)?;
        let body = fs::read_to_string(&selection_path)?;
        let path = dir.join("selection.csv");
        write_text(&path, &body)?;
        manifest.output(&path);
    }
    manifest.write(out)
}

pub fn synth(out: &Path, seed: u64, fields: &[String], candidates_per_field_level: usize) -> Result<()> {
    let config = core_synth::SynthConfig {
        seed,
        fields: fields.to_vec(),
        candidates_per_field_level,
        ..core_synth::SynthConfig::default()
    };
    let corpus = core_synth::generate(&config);
    corpus.write_to(out)?;
    let mut manifest = Manifest::new("synth").seed(seed);
    for name in ["corpus.jsonl", "outcomes.csv"] {
        manifest.output(&out.join(name));
    }
    manifest.output(&out.join("fixtures"));
    manifest.write(out)
}
