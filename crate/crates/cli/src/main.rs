//! matrag: command-line surface for the recommendation pipeline.
//!
//! Subcommands: ingest, build-kg, embed, recommend, evaluate,
//! score-explanation, version. A JSON config file carries paths and
//! hyperparameters; every hyperparameter is also a flag, and flags beat the
//! file. Diagnostics go to stderr, data to stdout or named output files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matrag::agents::{Constraint, ExplanationMode, FacetSource, PreferenceFacet, UserProfile};
use matrag::backend::BackendKind;
use matrag::config::PipelineConfig;
use matrag::corpus::{ingest_interactions, temporal_split, IngestOptions};
use matrag::error::Error;
use matrag::evalharness::{bleu4, evaluate, EvalOptions, RandomScorer};
use matrag::orchestrator::{Pipeline, PipelineScorer, RecommendationRequest};
use matrag::transparency::{composite, extract_claims, faithfulness_against_text, personalization};

#[derive(Parser)]
#[command(
    name = "matrag",
    version,
    about = "Knowledge-graph-grounded explainable recommendations"
)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Flag-level overrides; every field beats the config file when present.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long, global = true)]
    interactions: Option<PathBuf>,
    #[arg(long, global = true)]
    triples: Option<PathBuf>,
    #[arg(long, global = true)]
    attributes: Option<PathBuf>,
    #[arg(long, global = true)]
    aliases: Option<PathBuf>,
    #[arg(long, global = true)]
    vectors: Option<PathBuf>,

    /// Backend kind: mock or http.
    #[arg(long, global = true)]
    backend: Option<BackendKind>,
    #[arg(long, global = true)]
    endpoint: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    retrieval_k: Option<usize>,
    #[arg(long, global = true)]
    rerank_n: Option<usize>,
    #[arg(long, global = true)]
    k_hop: Option<u32>,
    /// Candidate pool size.
    #[arg(long, global = true)]
    pool: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    w_faith: Option<f64>,
    #[arg(long, global = true)]
    w_coher: Option<f64>,
    #[arg(long, global = true)]
    w_pers: Option<f64>,
    #[arg(long, global = true)]
    half_life_days: Option<f64>,
    #[arg(long, global = true)]
    recent_history: Option<usize>,
    #[arg(long, global = true)]
    max_triples: Option<usize>,
    #[arg(long, global = true)]
    negatives: Option<usize>,
    /// Train/valid/test ratios as `a,b,c`.
    #[arg(long, global = true)]
    ratios: Option<String>,
    #[arg(long, global = true)]
    embed_dim: Option<usize>,
    #[arg(long, global = true)]
    positive_threshold: Option<f64>,
    #[arg(long, global = true)]
    mmr: bool,
    #[arg(long, global = true)]
    mmr_lambda: Option<f64>,
    #[arg(long, global = true)]
    conflict_spread: Option<f64>,
    #[arg(long, global = true)]
    explanation_fraction: Option<f64>,

    #[arg(long, global = true)]
    disable_user_agent: bool,
    #[arg(long, global = true)]
    disable_item_agent: bool,
    #[arg(long, global = true)]
    disable_reasoning_hybrid: bool,
    #[arg(long, global = true)]
    disable_explanation: bool,
    #[arg(long, global = true)]
    disable_kg: bool,
    #[arg(long, global = true)]
    disable_transparency: bool,
}

impl Overrides {
    fn apply(&self, config: &mut PipelineConfig) -> Result<(), Error> {
        let paths = &mut config.paths;
        if let Some(p) = &self.interactions {
            paths.interactions = Some(p.clone());
        }
        if let Some(p) = &self.triples {
            paths.triples = Some(p.clone());
        }
        if let Some(p) = &self.attributes {
            paths.attributes = Some(p.clone());
        }
        if let Some(p) = &self.aliases {
            paths.aliases = Some(p.clone());
        }
        if let Some(p) = &self.vectors {
            paths.vectors = Some(p.clone());
        }

        if let Some(kind) = self.backend {
            config.backend.kind = kind;
        }
        if let Some(endpoint) = &self.endpoint {
            config.backend.endpoint = Some(endpoint.clone());
        }

        let h = &mut config.hyperparameters;
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { h.$field = v; })*
            };
        }
        set!(
            seed,
            retrieval_k,
            rerank_n,
            k_hop,
            alpha,
            beta,
            gamma,
            w_faith,
            w_coher,
            w_pers,
            half_life_days,
            recent_history,
            max_triples,
            negatives,
            embed_dim,
            positive_threshold,
            mmr_lambda,
            conflict_spread,
            explanation_fraction
        );
        if let Some(v) = self.pool {
            h.candidate_pool = v;
        }
        if self.mmr {
            h.mmr_enabled = true;
        }
        if let Some(spec) = &self.ratios {
            let parts: Vec<f64> = spec
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::config("hyperparameters.split_ratios", "expected `a,b,c`"))?;
            if parts.len() != 3 {
                return Err(Error::config(
                    "hyperparameters.split_ratios",
                    "expected three comma-separated ratios",
                ));
            }
            h.split_ratios = (parts[0], parts[1], parts[2]);
        }

        let a = &mut config.ablation;
        a.disable_user_agent |= self.disable_user_agent;
        a.disable_item_agent |= self.disable_item_agent;
        a.disable_reasoning_hybrid |= self.disable_reasoning_hybrid;
        a.disable_explanation |= self.disable_explanation;
        a.disable_kg |= self.disable_kg;
        a.disable_transparency |= self.disable_transparency;
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate and index an interactions file; emit the split manifest.
    Ingest {
        /// Split manifest output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Treat an empty rating field as presence with rating 1.0.
        #[arg(long)]
        implicit_presence: bool,
    },
    /// Load the triples file and report graph counts.
    BuildKg,
    /// Precompute per-item slice vectors into the vector file.
    Embed {
        /// Vector file output path (defaults to paths.vectors).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one recommendation request and print the JSON response.
    Recommend {
        #[arg(long)]
        user: String,
        #[arg(long)]
        query: Option<String>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// concise, detailed, or comparative.
        #[arg(long, default_value = "detailed")]
        mode: String,
        /// Constraints like `genre=comedy,price<=30`.
        #[arg(long)]
        constraints: Option<String>,
        /// Explicit candidate list (makes this a re-rank request).
        #[arg(long, value_delimiter = ',')]
        candidates: Option<Vec<String>>,
    },
    /// Run the 1+N evaluation protocol over the test split.
    Evaluate {
        /// Scoring path: pipeline or random.
        #[arg(long, default_value = "pipeline")]
        scorer: String,
        /// HR/NDCG cutoffs.
        #[arg(long, value_delimiter = ',', default_values_t = vec![5, 10])]
        ks: Vec<usize>,
        /// Write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write per-user `<user>\t<metric>\t<value>` rows here.
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Score a provided explanation against provided evidence.
    ScoreExplanation {
        /// Explanation text file.
        #[arg(long)]
        explanation: PathBuf,
        /// Evidence text file (tagged chain/subgraph lines).
        #[arg(long)]
        evidence: PathBuf,
        /// Optional profile file of `key=value` lines for personalization.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Item id for the report line.
        #[arg(long, default_value = "-")]
        item: String,
        /// Optional reference explanation for BLEU-4.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Print build information.
    Version,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => {
            let content = std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))?;
            serde_json::from_str(&content)
                .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?
        }
        None => PipelineConfig::default(),
    };
    config.apply_env();
    cli.overrides.apply(&mut config)?;
    config.validate()?;
    Ok(config)
}

fn read_text(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = load_config(&cli)?;
    match cli.command {
        Command::Ingest {
            out,
            implicit_presence,
        } => {
            let path = config
                .paths
                .interactions
                .clone()
                .ok_or_else(|| Error::config("paths.interactions", "required for ingest"))?;
            let store = ingest_interactions(&path, IngestOptions { implicit_presence })?;
            eprintln!(
                "ingested {} interactions, {} users, {} items",
                store.len(),
                store.user_count(),
                store.item_count()
            );
            let split = temporal_split(&store, config.hyperparameters.split_ratios)?;
            let (train, valid, test) = split.counts();
            eprintln!("split: train={train} valid={valid} test={test}");
            match out {
                Some(path) => {
                    std::fs::write(&path, split.manifest()).map_err(|e| Error::io(path, e))?
                }
                None => print!("{}", split.manifest()),
            }
        }
        Command::BuildKg => {
            let path = config
                .paths
                .triples
                .clone()
                .ok_or_else(|| Error::config("paths.triples", "required for build-kg"))?;
            let kg = matrag::kg::load_triples(&path)?;
            println!(
                "entities={} relations={} triples={}",
                kg.entity_count(),
                kg.relation_count(),
                kg.triple_count()
            );
        }
        Command::Embed { out } => {
            let target = out
                .or_else(|| config.paths.vectors.clone())
                .ok_or_else(|| {
                    Error::config("paths.vectors", "required for embed (or pass --out)")
                })?;
            let pipeline = Pipeline::from_config(config)?;
            let index = pipeline.precompute_slice_vectors()?;
            index.save(&target)?;
            eprintln!(
                "wrote {} slice vectors to {}",
                index.len(),
                target.display()
            );
        }
        Command::Recommend {
            user,
            query,
            k,
            mode,
            constraints,
            candidates,
        } => {
            let pipeline = Pipeline::from_config(config)?;
            let request = RecommendationRequest {
                user_id: user,
                query,
                k,
                constraints: match constraints {
                    Some(spec) => Constraint::parse_list(&spec)?,
                    None => Vec::new(),
                },
                explanation_mode: mode.parse::<ExplanationMode>()?,
                candidate_pool_size: pipeline.config().hyperparameters.candidate_pool.max(k),
                candidates,
            };
            let response = pipeline.handle_request(&request)?;
            let json = response.to_json(pipeline.kg());
            println!(
                "{}",
                serde_json::to_string_pretty(&json).expect("serializes")
            );
        }
        Command::Evaluate {
            scorer,
            ks,
            json,
            rows,
        } => {
            let pipeline = Pipeline::from_config(config)?;
            let opts = EvalOptions {
                negatives: pipeline.config().hyperparameters.negatives,
                k_values: ks,
                seed: pipeline.config().hyperparameters.seed,
                explanation_fraction: pipeline.config().hyperparameters.explanation_fraction,
            };
            let report = match scorer.as_str() {
                "pipeline" => {
                    let mut s = PipelineScorer::new(&pipeline);
                    evaluate(&mut s, pipeline.store(), pipeline.split(), &opts)?
                }
                "random" => {
                    let mut s = RandomScorer { seed: opts.seed };
                    evaluate(&mut s, pipeline.store(), pipeline.split(), &opts)?
                }
                other => {
                    return Err(Error::Validation(format!(
                        "unknown scorer {other:?} (expected pipeline or random)"
                    )))
                }
            };
            print!("{}", report.table());
            if let Some(path) = json {
                let body = serde_json::to_string_pretty(&report.to_json()).expect("serializes");
                std::fs::write(&path, body).map_err(|e| Error::io(path, e))?;
            }
            if let Some(path) = rows {
                std::fs::write(&path, report.rows_tsv()).map_err(|e| Error::io(path, e))?;
            }
        }
        Command::ScoreExplanation {
            explanation,
            evidence,
            profile,
            item,
            reference,
        } => {
            let backend = config.backend_descriptor().build()?;
            let text = read_text(&explanation)?;
            let evidence_text = read_text(&evidence)?;
            let expl = matrag::agents::Explanation::from_text(
                &item,
                ExplanationMode::Detailed,
                text.trim().to_string(),
            );
            let mut claims = extract_claims(&expl, None);
            let faith = faithfulness_against_text(&mut claims, &evidence_text, &*backend)?;
            let coher = matrag::transparency::coherence(&expl, &*backend)?;
            let pers = match profile {
                Some(path) => {
                    let facets = read_text(&path)?
                        .lines()
                        .filter_map(|line| line.split_once('='))
                        .map(|(k, v)| PreferenceFacet {
                            key: k.trim().to_string(),
                            value: v.trim().to_string(),
                            weight: 1.0,
                            source: FacetSource::Explicit,
                        })
                        .collect();
                    let profile = UserProfile {
                        user_id: "cli".into(),
                        facets,
                        built_at: 0,
                        history_length: 0,
                        degraded: false,
                    };
                    personalization(&expl, &profile, &*backend)?.score
                }
                None => 0.0,
            };
            let score = composite(
                faith.score,
                coher,
                pers,
                config.hyperparameters.transparency_weights(),
            )?;
            println!("{}", score.report_line(&item));
            if let Some(path) = reference {
                let reference_text = read_text(&path)?;
                println!("bleu4\t{:.6}", bleu4(&text, &[reference_text.as_str()]));
            }
        }
        Command::Version => {
            println!("matrag {}", env!("CARGO_PKG_VERSION"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
