use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use icmt::ablate::{require_translations, run_ablation, run_variant, RunConfig};
use icmt::augment::{forward_translate, mix, read_synthetic, write_synthetic};
use icmt::cipher::{encipher_corpus, encipher_lexicon, encipher_sentence, encipher_token};
use icmt::corpus_store::{
    check_disjoint, load_eval_set, load_grammar_table, load_lexicon, load_monolingual, load_parallel_corpus, EvalItem,
};
use icmt::eval::{
    bootstrap_compare, render_significance_table, score_hypotheses, score_records, wilcoxon_rank_sum, Metric,
    SignificanceResult,
};
use icmt::llm::{read_records, CachedBackend, ChatBackend};
use icmt::morphology::{analyze_sentence, render};
use icmt::pipeline::{prepare_prompt, Resources};
use icmt::prompt::PromptSpec;
use icmt::retrieval::build_bm25_index;
use icmt::{Error, Result};

/// In-context machine translation toolkit.
#[derive(Parser)]
#[command(name = "icmt", version)]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// More logging; repeat for debug output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Directory with lexicon.json, corpus.jsonl, grammar.json and eval.jsonl,
    /// used when no configuration is given.
    #[arg(long, global = true)]
    resources: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate resources, check eval/corpus disjointness, build the BM25 index.
    Ingest {
        /// Write the BM25 index here.
        #[arg(long)]
        index_out: Option<PathBuf>,
    },
    /// Print the morphological analysis of a sentence.
    Analyze { sentence: String },
    /// Print the prompt for a sentence.
    Prompt {
        sentence: String,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Translate and score the evaluation set.
    Translate {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Score hypotheses against the evaluation set.
    Evaluate {
        /// Translation records (JSON lines) or plain text, one hypothesis per line.
        hyps: PathBuf,
        #[arg(long)]
        eval: Option<PathBuf>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare two systems' records on the evaluation set.
    Significance {
        baseline: PathBuf,
        variant: PathBuf,
        #[arg(long)]
        eval: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// bootstrap or wilcoxon
        #[arg(long, default_value = "bootstrap")]
        test: String,
    },
    /// Encipher a sentence, or a resource file into a sibling `.enc` file.
    Encipher {
        /// Sentence to encipher (needs the lexicon for its analysis).
        #[arg(long, conflicts_with = "file")]
        text: Option<String>,
        /// lexicon (.json), corpus or eval set (.jsonl), or plain text.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Forward-translate a monolingual corpus into synthetic pairs.
    Augment {
        #[arg(long)]
        mono: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Response cache for resuming an interrupted run.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Mix real and synthetic pairs into a training set.
    Mix {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        synthetic: PathBuf,
        #[arg(long)]
        ratio: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the stage-by-stage component ablation.
    Ablate,
}

#[derive(Args, Default)]
struct SpecArgs {
    /// The best setting: analysis, full dictionary, BM25 examples.
    #[arg(long)]
    best: bool,
    /// Add the morphological analysis (implied by any component).
    #[arg(long)]
    morph: bool,
    /// l, l_s or l_s_c
    #[arg(long)]
    dict: Option<String>,
    /// random, dictionary or bm25
    #[arg(long)]
    parallel: Option<String>,
    #[arg(long)]
    count: Option<usize>,
    /// short, long or long_p
    #[arg(long)]
    grammar: Option<String>,
    /// annotate or annotate_syntax
    #[arg(long)]
    cot: Option<String>,
    #[arg(long)]
    cipher: bool,
}

fn variant<T: DeserializeOwned>(flag: &str, v: &Option<String>) -> Result<Option<T>> {
    v.as_ref()
        .map(|s| {
            serde_json::from_value(serde_json::Value::String(s.clone()))
                .map_err(|_| Error::Config(format!("unknown --{flag} variant {s:?}")))
        })
        .transpose()
}

impl SpecArgs {
    fn best() -> Self {
        SpecArgs {
            best: true,
            ..Default::default()
        }
    }

    fn is_set(&self) -> bool {
        self.best
            || self.morph
            || self.dict.is_some()
            || self.parallel.is_some()
            || self.grammar.is_some()
            || self.cot.is_some()
            || self.cipher
    }

    fn build(&self, cfg: &RunConfig) -> Result<PromptSpec> {
        let base = cfg.base_spec();
        let mut spec = if self.best {
            PromptSpec::best()
        } else {
            base.clone()
        };
        spec.source_language = base.source_language;
        spec.target_language = base.target_language;
        spec.seed = base.seed;
        spec.parallel_count = self.count.unwrap_or(base.parallel_count);
        if let Some(d) = variant("dict", &self.dict)? {
            spec.dict_variant = Some(d);
        }
        if let Some(p) = variant("parallel", &self.parallel)? {
            spec.parallel_variant = Some(p);
        }
        if let Some(g) = variant("grammar", &self.grammar)? {
            spec.grammar_variant = Some(g);
        }
        if let Some(c) = variant("cot", &self.cot)? {
            spec.cot_variant = Some(c);
        }
        spec.cipher |= self.cipher;
        spec.use_morph |= self.morph || spec.has_components();
        spec.validate()?;
        Ok(spec)
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match (&cli.config, &cli.resources) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(dir)) => RunConfig::for_dir(dir),
        (None, None) => return Err(Error::Config("pass --config or --resources".into())),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn eval_set(cfg: Option<&RunConfig>, path: &Option<PathBuf>) -> Result<Vec<EvalItem>> {
    match (path, cfg) {
        (Some(p), _) => Ok(load_eval_set(p)?),
        (None, Some(cfg)) => cfg.load_eval_set(),
        (None, None) => Err(Error::Config("pass --eval, --config or --resources".into())),
    }
}

fn optional_config(cli: &Cli) -> Result<Option<RunConfig>> {
    if cli.config.is_some() || cli.resources.is_some() {
        load_config(cli).map(Some)
    } else {
        Ok(None)
    }
}

/// `dir/name.ext` becomes `dir/name.enc.ext`.
fn enc_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.enc.{}", ext.to_string_lossy()),
        None => format!("{stem}.enc"),
    };
    path.with_file_name(name)
}

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn jsonl<T: serde::Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| serde_json::to_string(x).expect("serializable") + "\n")
        .collect()
}

fn encipher_plain(line: &str) -> String {
    line.split_whitespace().map(encipher_token).collect::<Vec<_>>().join(" ")
}

fn hypotheses(path: &Path, eval: &[EvalItem]) -> Result<(Vec<String>, Vec<String>, Vec<String>)> {
    let ids = eval.iter().map(|e| e.id.clone()).collect();
    let refs = eval.iter().map(|e| e.reference.clone()).collect();
    if let Ok(records) = read_records(path) {
        if !records.is_empty() {
            let by_id: std::collections::HashMap<_, _> =
                records.iter().map(|r| (r.item_id.as_str(), r.scored_hypothesis().to_string())).collect();
            let hyps = eval
                .iter()
                .map(|e| {
                    by_id
                        .get(e.id.as_str())
                        .cloned()
                        .ok_or_else(|| Error::Config(format!("{}: no record for {}", path.display(), e.id)))
                })
                .collect::<Result<_>>()?;
            return Ok((ids, hyps, refs));
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((ids, text.lines().map(str::to_string).collect(), refs))
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest { index_out } => {
            let cfg = load_config(cli)?;
            let lexicon = load_lexicon(&cfg.resources.lexicon)?;
            let corpus = load_parallel_corpus(&cfg.resources.corpus)?;
            let grammar = load_grammar_table(&cfg.resources.grammar)?;
            let eval = cfg.load_eval_set()?;
            println!(
                "lexicon: {} entries, {} suffixes",
                lexicon.entries().len(),
                lexicon.suffixes().len()
            );
            println!("corpus: {} pairs", corpus.len());
            println!("grammar: {} features", grammar.features().len());
            println!("eval: {} items", eval.len());
            let overlap = check_disjoint(&corpus, &eval);
            if !overlap.is_disjoint() {
                for m in &overlap.matches {
                    eprintln!("eval {} repeats corpus {}: {}", m.eval_id, m.corpus_id, m.normalized);
                }
                return Err(Error::Config("evaluation sources overlap the corpus".into()));
            }
            let index = build_bm25_index(&corpus, &lexicon)?;
            if let Some(path) = index_out {
                index.save(path)?;
                println!("index: {}", path.display());
            }
        }
        Command::Analyze { sentence } => {
            let cfg = load_config(cli)?;
            let lexicon = load_lexicon(&cfg.resources.lexicon)?;
            let a = analyze_sentence(sentence, &lexicon)?;
            println!("{}", render(&a));
            if cli.verbose > 0 {
                println!("{}", serde_json::to_string_pretty(&a)?);
            }
        }
        Command::Prompt { sentence, spec } => {
            let cfg = load_config(cli)?;
            let spec = spec.build(&cfg)?;
            let res = Resources::load(&cfg.resources)?;
            let p = prepare_prompt(&spec, sentence, &res)?;
            println!("{}", p.text);
            log::info!("{} (~{} tokens)", p.provenance.join("+"), p.estimated_tokens);
        }
        Command::Translate { spec } => {
            let cfg = load_config(cli)?;
            let specs = if spec.is_set() || cfg.grid.is_empty() {
                let best = SpecArgs::best();
                vec![if spec.is_set() { spec } else { &best }.build(&cfg)?]
            } else {
                cfg.grid.clone()
            };
            let res = Resources::load(&cfg.resources)?;
            let eval = cfg.load_eval_set()?;
            let backend = cfg.backend.build()?;
            let embed = cfg.embedding.build()?;
            let records_dir = cfg.output_dir.join("records");
            for s in &specs {
                let (row, records) = run_variant(
                    s,
                    &res,
                    &eval,
                    &backend,
                    &cfg.params,
                    cfg.backend.max_parallel,
                    &cfg.metrics,
                    embed.as_deref(),
                    &records_dir,
                )?;
                require_translations(&row.tag, &row, &records)?;
                let report = score_records(&records, &eval, &cfg.metrics, embed.as_deref())?;
                println!("# {} -> {}", row.tag, row.records_path.display());
                print!("{}", report.render_table());
            }
        }
        Command::Evaluate { hyps, eval, json } => {
            let cfg = optional_config(cli)?;
            let items = eval_set(cfg.as_ref(), eval)?;
            let (ids, h, refs) = hypotheses(hyps, &items)?;
            let metrics = cfg.as_ref().map(|c| c.metrics.clone()).unwrap_or_default();
            let embed = match &cfg {
                Some(c) => c.embedding.build()?,
                None => None,
            };
            let report = score_hypotheses(&ids, &h, &refs, &metrics, embed.as_deref())?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.render_table());
            }
        }
        Command::Significance {
            baseline,
            variant,
            eval,
            samples,
            test,
        } => {
            let cfg = optional_config(cli)?;
            let seed = cli.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            let items = eval_set(cfg.as_ref(), eval)?;
            let (ids, base, refs) = hypotheses(baseline, &items)?;
            let (_, var, _) = hypotheses(variant, &items)?;
            let metrics = [Metric::Bleu, Metric::Chrf];
            let results: Vec<SignificanceResult> = match test.as_str() {
                "bootstrap" => metrics
                    .iter()
                    .map(|&m| bootstrap_compare(&base, &var, &refs, m, *samples, seed))
                    .collect::<std::result::Result<_, _>>()?,
                "wilcoxon" => {
                    let cfg_m = cfg.as_ref().map(|c| c.metrics.clone()).unwrap_or_default();
                    let a = score_hypotheses(&ids, &base, &refs, &cfg_m, None)?;
                    let b = score_hypotheses(&ids, &var, &refs, &cfg_m, None)?;
                    metrics
                        .iter()
                        .map(|&m| {
                            let pick = |r: &icmt::eval::MetricReport| -> Vec<f64> {
                                r.per_sentence
                                    .iter()
                                    .map(|s| if m == Metric::Bleu { s.bleu } else { s.chrf })
                                    .collect()
                            };
                            Ok(SignificanceResult {
                                metric: m,
                                baseline: a.corpus.get(m).unwrap_or(0.0),
                                variant: b.corpus.get(m).unwrap_or(0.0),
                                p_value: wilcoxon_rank_sum(&pick(&a), &pick(&b))?,
                                n_samples: ids.len(),
                                seed,
                            })
                        })
                        .collect::<Result<_>>()?
                }
                other => return Err(Error::Config(format!("unknown test {other:?}"))),
            };
            for r in &results {
                println!(
                    "{}: baseline {:.2} variant {:.2} p = {:.4}",
                    r.metric.name(),
                    r.baseline,
                    r.variant,
                    r.p_value
                );
            }
            let label = format!("{} vs {}", variant.display(), baseline.display());
            print!("{}", render_significance_table(&[(label, results)]));
        }
        Command::Encipher { text, file } => match (text, file) {
            (Some(sentence), _) => {
                let line = match optional_config(cli)? {
                    Some(cfg) => {
                        let lexicon = load_lexicon(&cfg.resources.lexicon)?;
                        render(&encipher_sentence(&analyze_sentence(sentence, &lexicon)?))
                    }
                    None => encipher_plain(sentence),
                };
                println!("{line}");
            }
            (None, Some(path)) => {
                let out = enc_path(path);
                let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
                let body = match ext {
                    "json" => encipher_lexicon(&load_lexicon(path)?).to_json(),
                    "jsonl" => match load_parallel_corpus(path) {
                        Ok(corpus) => jsonl(encipher_corpus(&corpus).examples()),
                        Err(_) => {
                            let items: Vec<EvalItem> = load_eval_set(path)?
                                .into_iter()
                                .map(|e| EvalItem {
                                    source: encipher_plain(&e.source),
                                    ..e
                                })
                                .collect();
                            jsonl(&items)
                        }
                    },
                    _ => load_monolingual(path)?
                        .iter()
                        .map(|m| encipher_plain(&m.source) + "\n")
                        .collect(),
                };
                write(&out, body)?;
                println!("{}", out.display());
            }
            (None, None) => return Err(Error::Config("pass --text or --file".into())),
        },
        Command::Augment { mono, out, cache, spec } => {
            let cfg = load_config(cli)?;
            let best = SpecArgs::best();
            let spec = if spec.is_set() { spec } else { &best }.build(&cfg)?;
            let res = Resources::load(&cfg.resources)?;
            let sentences = load_monolingual(mono)?;
            let inner = cfg.backend.build()?;
            let backend: Box<dyn ChatBackend> = match cache {
                Some(path) => Box::new(CachedBackend::open(inner, path)?),
                None => inner,
            };
            let result = forward_translate(
                &sentences,
                &spec,
                &res,
                &backend,
                &cfg.params,
                cfg.backend.max_parallel,
                None,
            )?;
            write_synthetic(out, &result.pairs)?;
            println!(
                "{} synthetic pairs, {} dropped -> {}",
                result.pairs.len(),
                result.dropped.len(),
                out.display()
            );
        }
        Command::Mix {
            real,
            synthetic,
            ratio,
            out,
        } => {
            let seed = match cli.seed {
                Some(s) => s,
                None => optional_config(cli)?.map_or(0, |c| c.seed),
            };
            let real = load_parallel_corpus(real)?;
            let synthetic = read_synthetic(synthetic)?;
            let m = mix(&real, &synthetic, *ratio, seed, out)?;
            println!(
                "{} real + {} synthetic -> {}",
                m.real_count,
                m.synthetic_count,
                out.display()
            );
        }
        Command::Ablate => {
            let cfg = load_config(cli)?;
            let res = Resources::load(&cfg.resources)?;
            let eval = cfg.load_eval_set()?;
            let backend = cfg.backend.build()?;
            let embed = cfg.embedding.build()?;
            let report = run_ablation(&cfg, &res, &eval, &backend, embed.as_deref())?;
            print!("{}", report.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
