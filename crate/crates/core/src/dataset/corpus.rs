use std::collections::BTreeMap;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::format::{self, LineWriter, FORMAT_VERSION};
use super::{derive_seed, DOMAIN_BASE, DOMAIN_OBSERVATION, DOMAIN_TARGETED};
use crate::bot::{rollout, Scenario, ScenarioHint, ScenarioKind};
use crate::config::{Config, Format};
use crate::error::DatasetError;
use crate::grammar::{parse_ids, vocabulary_hash, ConceptCategory, Grammar, Tense};
use crate::oracle::Oracle;
use crate::trace::Trace;
use crate::world::OBJECT_FEATURES;

/// One rollout and every sentence true of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode_id: u64,
    pub seed: u64,
    pub scenario: Scenario,
    /// Row-major `T × (1+N) × 39`.
    pub features: Vec<f32>,
    /// Token ids of each true sentence, in universe order.
    pub true_sentences: Vec<Vec<u32>>,
}

impl EpisodeRecord {
    pub fn trace(&self, header: &CorpusHeader) -> Result<Trace, DatasetError> {
        Ok(Trace::from_features(header.episode_len, header.n_objects, self.features.clone())?)
    }

    /// Universe ids of the true sentences.
    pub fn sentence_ids(&self) -> Result<Vec<usize>, DatasetError> {
        let grammar = Grammar::global();
        self.true_sentences
            .iter()
            .map(|ids| {
                let ast = parse_ids(ids)?;
                Ok(grammar.id_of(&ast).expect("parsed sentences are in the universe"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusHeader {
    pub format_version: u32,
    pub episode_len: usize,
    pub n_objects: usize,
    pub feature_width: usize,
    pub vocab_hash: String,
    /// Generating configuration, echoed for provenance.
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub header: CorpusHeader,
    pub records: Vec<EpisodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub id: usize,
    pub sentence: String,
    pub category: ConceptCategory,
    pub positives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryCoverage {
    pub category: ConceptCategory,
    pub descriptions: usize,
    /// Descriptions with at least one positive trace.
    pub covered: usize,
    /// Descriptions with at least `min_per_description` positives.
    pub satisfied: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub min_per_description: usize,
    pub episodes: usize,
    pub base_episodes: usize,
    pub targeted_attempts: usize,
    pub targeted_accepted: usize,
    pub budget_exhausted: bool,
    pub categories: Vec<CategoryCoverage>,
    /// Ids of descriptions below `min_per_description`.
    pub shortfalls: Vec<usize>,
    pub entries: Vec<CoverageEntry>,
}

impl CoverageReport {
    pub fn from_corpus(corpus: &Corpus, min_per_description: usize) -> Result<CoverageReport, DatasetError> {
        let counts = positive_counts(&corpus.records)?;
        Ok(Self::build(&counts, min_per_description, corpus.records.len(), corpus.records.len(), 0, 0, false))
    }

    fn build(
        counts: &[usize],
        min: usize,
        episodes: usize,
        base_episodes: usize,
        targeted_attempts: usize,
        targeted_accepted: usize,
        budget_exhausted: bool,
    ) -> CoverageReport {
        let grammar = Grammar::global();
        let entries: Vec<CoverageEntry> = grammar
            .sentences()
            .iter()
            .enumerate()
            .map(|(id, s)| CoverageEntry {
                id,
                sentence: s.to_string(),
                category: grammar.category_of_id(id),
                positives: counts[id],
            })
            .collect();
        let categories = ConceptCategory::ALL
            .into_iter()
            .map(|category| {
                let range = grammar.category_range(category);
                CategoryCoverage {
                    category,
                    descriptions: range.len(),
                    covered: range.clone().filter(|&i| counts[i] > 0).count(),
                    satisfied: range.filter(|&i| counts[i] >= min).count(),
                }
            })
            .collect();
        CoverageReport {
            min_per_description: min,
            episodes,
            base_episodes,
            targeted_attempts,
            targeted_accepted,
            budget_exhausted,
            categories,
            shortfalls: (0..counts.len()).filter(|&i| counts[i] < min).collect(),
            entries,
        }
    }

    pub fn category(&self, category: ConceptCategory) -> &CategoryCoverage {
        &self.categories[category as usize]
    }

    /// Fraction of descriptions in `categories` with at least one positive.
    pub fn covered_fraction(&self, categories: &[ConceptCategory]) -> f64 {
        let (covered, total) = categories
            .iter()
            .map(|c| self.category(*c))
            .fold((0, 0), |(a, b), c| (a + c.covered, b + c.descriptions));
        if total == 0 {
            0.0
        } else {
            covered as f64 / total as f64
        }
    }

    pub fn to_bytes(&self, config: &serde_json::Value) -> Vec<u8> {
        let mut w = LineWriter::default();
        w.push(&serde_json::json!({
            "format_version": FORMAT_VERSION,
            "vocab_hash": vocabulary_hash(),
            "config": config,
        }));
        w.push(self);
        w.finish()
    }

    pub fn save(&self, config: &serde_json::Value, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        format::write_file(path.as_ref(), &self.to_bytes(config))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CoverageReport, DatasetError> {
        let bytes = format::read_file(path.as_ref())?;
        let lines = format::verified_lines(&bytes)?;
        let [header, body] = lines.as_slice() else {
            return Err(DatasetError::Corrupt { line: lines.len(), message: "expected header and report".into() });
        };
        format::check_version(header)?;
        format::parse_line(body, 2)
    }
}

fn positive_counts(records: &[EpisodeRecord]) -> Result<Vec<usize>, DatasetError> {
    let mut counts = vec![0; Grammar::global().len()];
    for r in records {
        for id in r.sentence_ids()? {
            counts[id] += 1;
        }
    }
    Ok(counts)
}

/// A generated corpus and how well it covers the sentence universe.
#[derive(Debug, Clone)]
pub struct Generated {
    pub corpus: Corpus,
    pub coverage: CoverageReport,
}

/// Rolls out and describes one episode from its seed.
pub fn generate_episode(
    episode_id: u64,
    seed: u64,
    hint: ScenarioHint,
    config: &Config,
    oracle: &Oracle,
) -> Result<EpisodeRecord, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let episode = rollout(&config.world, &config.bot, hint, &mut rng)?;
    let grammar = Grammar::global();
    let true_sentences = oracle
        .describe(&episode.trace)
        .into_iter()
        .map(|id| grammar.sentences()[id].token_ids())
        .collect::<Result<_, _>>()?;
    Ok(EpisodeRecord {
        episode_id,
        seed,
        scenario: episode.scenario,
        features: episode.trace.into_features(),
        true_sentences,
    })
}

fn header_for(config: &Config) -> CorpusHeader {
    CorpusHeader {
        format_version: FORMAT_VERSION,
        episode_len: config.world.episode_len,
        n_objects: config.world.n_objects,
        feature_width: OBJECT_FEATURES,
        vocab_hash: vocabulary_hash(),
        config: serde_json::to_value(config).expect("config serializes"),
    }
}

fn thread_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool")
}

fn generate_many(
    config: &Config,
    oracle: &Oracle,
    seeds: &[(u64, ScenarioHint)],
    first_id: u64,
) -> Result<Vec<EpisodeRecord>, DatasetError> {
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, &(seed, hint))| generate_episode(first_id + i as u64, seed, hint, config, oracle))
        .collect()
}

fn hint_for(id: usize) -> ScenarioHint {
    let ast = Grammar::global().sentences()[id];
    let kind = ScenarioKind::ALL.into_iter().find(|k| k.predicate() == ast.predicate);
    ScenarioHint { kind, past: Some(ast.pred_tense == Tense::Past) }
}

const TARGETED_CHUNK: usize = 256;

/// Generates `config.episodes` rollouts, then spends up to
/// `config.extra_budget` targeted rollouts on descriptions with fewer than
/// `config.min_per_description` positives. Targeted rollouts are kept only
/// when they add a positive to a deficient description.
///
/// Output depends only on the configuration, not on the worker count.
pub fn generate_corpus(config: &Config) -> Result<Generated, DatasetError> {
    if config.episodes == 0 {
        return Err(DatasetError::InvalidParameter("episodes must be at least 1".into()));
    }
    config.world.validate().map_err(crate::error::BotError::from)?;
    let oracle = Oracle::new(config.oracle.clone());
    let pool = thread_pool(config.workers);
    pool.install(|| {
        let base: Vec<(u64, ScenarioHint)> = (0..config.episodes as u64)
            .map(|i| (derive_seed(config.seed, DOMAIN_BASE, i), ScenarioHint::default()))
            .collect();
        let mut records = generate_many(config, &oracle, &base, 0)?;
        let mut counts = positive_counts(&records)?;
        let min = config.min_per_description;

        let mut attempts = 0usize;
        let mut accepted = 0usize;
        let mut counter = 0u64;
        loop {
            let deficient: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] < min).collect();
            if deficient.is_empty() || attempts >= config.extra_budget {
                break;
            }
            let chunk = TARGETED_CHUNK.min(config.extra_budget - attempts);
            let seeds: Vec<(u64, ScenarioHint)> = (0..chunk)
                .map(|k| {
                    let seed = derive_seed(config.seed, DOMAIN_TARGETED, counter + k as u64);
                    (seed, hint_for(deficient[k % deficient.len()]))
                })
                .collect();
            counter += chunk as u64;
            attempts += chunk;
            let candidates: Vec<Result<EpisodeRecord, DatasetError>> = seeds
                .par_iter()
                .map(|&(seed, hint)| generate_episode(0, seed, hint, config, &oracle))
                .collect();
            for candidate in candidates {
                let mut record = match candidate {
                    Ok(r) => r,
                    // a hinted scenario may be infeasible in every sampled world
                    Err(DatasetError::Bot(_)) => continue,
                    Err(e) => return Err(e),
                };
                let ids = record.sentence_ids()?;
                if ids.iter().any(|&i| counts[i] < min) {
                    for &i in &ids {
                        counts[i] += 1;
                    }
                    record.episode_id = records.len() as u64;
                    records.push(record);
                    accepted += 1;
                }
            }
        }
        let exhausted = counts.iter().any(|&c| c < min);
        let coverage =
            CoverageReport::build(&counts, min, records.len(), config.episodes, attempts, accepted, exhausted);
        if exhausted {
            log::warn!(
                "{} descriptions below {} positives after {} targeted rollouts",
                coverage.shortfalls.len(),
                min,
                attempts
            );
        }
        Ok(Generated { corpus: Corpus { header: header_for(config), records }, coverage })
    })
}

/// Fresh rollouts for evaluating train sentences on unseen observations.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    pub corpus: Corpus,
    /// Sentence ids the episodes are paired with.
    pub sentences: Vec<usize>,
}

impl ObservationSet {
    /// `(episode index, sentence id, label)` for every pairing.
    pub fn pairs(&self) -> Result<Vec<(usize, usize, bool)>, DatasetError> {
        let mut out = Vec::with_capacity(self.corpus.records.len() * self.sentences.len());
        for (e, r) in self.corpus.records.iter().enumerate() {
            let truth = r.sentence_ids()?;
            out.extend(self.sentences.iter().map(|&s| (e, s, truth.binary_search(&s).is_ok())));
        }
        Ok(out)
    }
}

/// Generates `episodes` rollouts from a seed stream disjoint from the
/// training corpus and pairs them with `train_sentences`.
pub fn new_observation_testset(
    config: &Config,
    train_sentences: &[usize],
    episodes: usize,
) -> Result<ObservationSet, DatasetError> {
    let oracle = Oracle::new(config.oracle.clone());
    let seeds: Vec<(u64, ScenarioHint)> = (0..episodes as u64)
        .map(|i| (derive_seed(config.seed, DOMAIN_OBSERVATION, i), ScenarioHint::default()))
        .collect();
    let records = thread_pool(config.workers).install(|| generate_many(config, &oracle, &seeds, 0))?;
    let mut sentences = train_sentences.to_vec();
    sentences.sort_unstable();
    sentences.dedup();
    Ok(ObservationSet { corpus: Corpus { header: header_for(config), records }, sentences })
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    #[serde(flatten)]
    header: CorpusHeader,
    mode: Format,
    episodes: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireFeatures {
    Text(Vec<f32>),
    Binary(String),
}

#[derive(Serialize, Deserialize)]
struct WireRecord {
    episode_id: u64,
    seed: u64,
    scenario: Scenario,
    features: WireFeatures,
    true_sentences: Vec<Vec<u32>>,
}

fn encode_binary(values: &[f32]) -> String {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    B64.encode(bytes)
}

fn decode_binary(text: &str, line: usize) -> Result<Vec<f32>, DatasetError> {
    let bytes = B64.decode(text).map_err(|e| DatasetError::Corrupt { line, message: e.to_string() })?;
    if bytes.len() % 4 != 0 {
        return Err(DatasetError::Corrupt { line, message: "feature bytes not a multiple of 4".into() });
    }
    Ok(bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn record_width(&self) -> usize {
        self.header.episode_len * (self.header.n_objects + 1) * self.header.feature_width
    }

    pub fn to_bytes(&self, mode: Format) -> Vec<u8> {
        let mut w = LineWriter::default();
        w.push(&HeaderLine { header: self.header.clone(), mode, episodes: self.records.len() });
        for r in &self.records {
            let features = match mode {
                Format::Text => WireFeatures::Text(r.features.clone()),
                Format::Binary => WireFeatures::Binary(encode_binary(&r.features)),
            };
            w.push(&WireRecord {
                episode_id: r.episode_id,
                seed: r.seed,
                scenario: r.scenario,
                features,
                true_sentences: r.true_sentences.clone(),
            });
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Corpus, DatasetError> {
        let lines = format::verified_lines(bytes)?;
        let first = lines.first().ok_or_else(|| DatasetError::Truncated("no header line".into()))?;
        format::check_version(first)?;
        let head: HeaderLine = format::parse_line(first, 1)?;
        format::check_vocabulary(&head.header.vocab_hash)?;
        let body = &lines[1..];
        if body.len() != head.episodes {
            return Err(DatasetError::Truncated(format!(
                "header announces {} records, found {}",
                head.episodes,
                body.len()
            )));
        }
        let mut corpus = Corpus { header: head.header, records: Vec::with_capacity(body.len()) };
        let width = corpus.record_width();
        for (i, line) in body.iter().enumerate() {
            let number = i + 2;
            let wire: WireRecord = format::parse_line(line, number)?;
            let features = match (head.mode, wire.features) {
                (Format::Text, WireFeatures::Text(v)) => v,
                (Format::Binary, WireFeatures::Binary(s)) => decode_binary(&s, number)?,
                _ => {
                    return Err(DatasetError::Corrupt { line: number, message: "feature encoding differs from header".into() })
                }
            };
            if features.len() != width {
                return Err(DatasetError::Corrupt {
                    line: number,
                    message: format!("expected {width} features, found {}", features.len()),
                });
            }
            corpus.records.push(EpisodeRecord {
                episode_id: wire.episode_id,
                seed: wire.seed,
                scenario: wire.scenario,
                features,
                true_sentences: wire.true_sentences,
            });
        }
        Ok(corpus)
    }

    pub fn save(&self, path: impl AsRef<Path>, mode: Format) -> Result<(), DatasetError> {
        format::write_file(path.as_ref(), &self.to_bytes(mode))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Corpus, DatasetError> {
        Corpus::from_bytes(&format::read_file(path.as_ref())?)
    }

    pub fn stats(&self) -> Result<CorpusStats, DatasetError> {
        let grammar = Grammar::global();
        let universe = grammar.len();
        let mut positives = [0usize; 4];
        let mut covered = vec![false; universe];
        let mut scenarios = BTreeMap::new();
        let mut lengths = BTreeMap::new();
        let mut true_pairs = 0usize;
        for r in &self.records {
            let ids = r.sentence_ids()?;
            true_pairs += ids.len();
            for id in ids {
                positives[grammar.category_of_id(id) as usize] += 1;
                covered[id] = true;
            }
            let key = format!("{}{}", if r.scenario.past { "was_" } else { "" }, kind_name(r.scenario.kind));
            *scenarios.entry(key).or_insert(0) += 1;
            let len = r.features.len() / ((self.header.n_objects + 1) * self.header.feature_width);
            *lengths.entry(len).or_insert(0) += 1;
        }
        let categories = ConceptCategory::ALL
            .into_iter()
            .map(|category| {
                let range = grammar.category_range(category);
                CategoryStats {
                    category,
                    descriptions: range.len(),
                    covered: range.filter(|&i| covered[i]).count(),
                    positive_pairs: positives[category as usize],
                }
            })
            .collect();
        let pairs = self.records.len() * universe;
        Ok(CorpusStats {
            episodes: self.records.len(),
            categories,
            true_pairs,
            label_balance: if pairs == 0 { 0.0 } else { true_pairs as f64 / pairs as f64 },
            trace_lengths: lengths,
            scenarios,
        })
    }
}

fn kind_name(kind: ScenarioKind) -> &'static str {
    kind.predicate().as_str()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub category: ConceptCategory,
    pub descriptions: usize,
    pub covered: usize,
    /// (episode, sentence) pairs labelled true.
    pub positive_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub episodes: usize,
    pub categories: Vec<CategoryStats>,
    pub true_pairs: usize,
    /// Fraction of all (episode, sentence) pairs that are true.
    pub label_balance: f64,
    pub trace_lengths: BTreeMap<usize, usize>,
    pub scenarios: BTreeMap<String, usize>,
}
