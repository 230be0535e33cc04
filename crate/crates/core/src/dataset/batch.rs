use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::corpus::Corpus;
use crate::error::DatasetError;
use crate::grammar::Grammar;
use crate::oracle::{Oracle, Timelines};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeMode {
    /// A false train sentence of a random episode, uniformly.
    #[default]
    Uniform,
    /// A false train sentence sharing the predicate or head word with one
    /// of the episode's true sentences.
    Hard,
}

/// One training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<'a> {
    pub episode: usize,
    pub features: &'a [f32],
    pub sentence: usize,
    pub tokens: Vec<u32>,
    pub label: bool,
}

/// Per-description buffer of positive episodes over a fixed train sentence set.
pub struct BatchSampler<'a> {
    corpus: &'a Corpus,
    oracle: Oracle,
    mode: NegativeMode,
    train: Vec<usize>,
    in_train: Vec<bool>,
    /// Per episode, ascending true sentence ids.
    truth: Vec<Vec<usize>>,
    /// Per usable description, the episodes where it is true.
    buckets: Vec<(usize, Vec<usize>)>,
    excluded: Vec<usize>,
    timelines: Vec<Timelines>,
}

const UNIFORM_TRIES: usize = 64;

impl<'a> BatchSampler<'a> {
    pub fn new(corpus: &'a Corpus, train: &[usize], oracle: Oracle, mode: NegativeMode) -> Result<Self, DatasetError> {
        if corpus.is_empty() {
            return Err(DatasetError::EmptyCorpus);
        }
        let universe = Grammar::global().len();
        let mut train = train.to_vec();
        train.sort_unstable();
        train.dedup();
        if let Some(&bad) = train.iter().find(|&&i| i >= universe) {
            return Err(DatasetError::InvalidParameter(format!("sentence id {bad} outside the universe")));
        }
        let mut in_train = vec![false; universe];
        for &i in &train {
            in_train[i] = true;
        }
        let truth: Vec<Vec<usize>> = corpus.records.iter().map(|r| r.sentence_ids()).collect::<Result<_, _>>()?;
        let mut positives: Vec<Vec<usize>> = vec![Vec::new(); universe];
        for (e, ids) in truth.iter().enumerate() {
            for &i in ids {
                positives[i].push(e);
            }
        }
        let mut buckets = Vec::new();
        let mut excluded = Vec::new();
        for &i in &train {
            if positives[i].is_empty() {
                excluded.push(i);
            } else {
                buckets.push((i, std::mem::take(&mut positives[i])));
            }
        }
        if !excluded.is_empty() {
            log::warn!("{} train descriptions have no positive trace and are excluded from sampling", excluded.len());
        }
        let timelines = match mode {
            NegativeMode::Uniform => Vec::new(),
            NegativeMode::Hard => corpus
                .records
                .iter()
                .map(|r| Ok(oracle.timelines(&r.trace(&corpus.header)?)))
                .collect::<Result<_, DatasetError>>()?,
        };
        Ok(BatchSampler { corpus, oracle, mode, train, in_train, truth, buckets, excluded, timelines })
    }

    /// Train descriptions without any positive trace.
    pub fn excluded(&self) -> &[usize] {
        &self.excluded
    }

    /// Train descriptions that can be sampled as positives.
    pub fn descriptions(&self) -> impl Iterator<Item = usize> + '_ {
        self.buckets.iter().map(|(i, _)| *i)
    }

    fn is_true(&self, episode: usize, sentence: usize) -> bool {
        self.truth[episode].binary_search(&sentence).is_ok()
    }

    fn sample(&self, episode: usize, sentence: usize) -> Sample<'a> {
        let ast = &Grammar::global().sentences()[sentence];
        Sample {
            episode,
            features: &self.corpus.records[episode].features,
            sentence,
            tokens: ast.token_ids().expect("universe sentences render"),
            label: self.is_true(episode, sentence),
        }
    }

    fn uniform_negative<R: Rng + ?Sized>(&self, episode: usize, rng: &mut R) -> Option<usize> {
        for _ in 0..UNIFORM_TRIES {
            let s = *self.train.choose(rng)?;
            if !self.is_true(episode, s) {
                return Some(s);
            }
        }
        let false_ids: Vec<usize> = self.train.iter().copied().filter(|&s| !self.is_true(episode, s)).collect();
        false_ids.choose(rng).copied()
    }

    fn hard_negative<R: Rng + ?Sized>(&self, episode: usize, rng: &mut R) -> Option<usize> {
        let grammar = Grammar::global();
        let anchors: Vec<usize> = self.truth[episode].iter().copied().filter(|&i| self.in_train[i]).collect();
        let anchor = *anchors.choose(rng)?;
        let negative = self
            .oracle
            .hard_negative_among(&self.timelines[episode], &grammar.sentences()[anchor], |i| self.in_train[i], rng)
            .ok()?;
        grammar.id_of(&negative)
    }

    fn negative<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Sample<'a>> {
        for _ in 0..UNIFORM_TRIES {
            let episode = rng.gen_range(0..self.truth.len());
            let picked = match self.mode {
                NegativeMode::Uniform => self.uniform_negative(episode, rng),
                NegativeMode::Hard => {
                    self.hard_negative(episode, rng).or_else(|| self.uniform_negative(episode, rng))
                }
            };
            if let Some(s) = picked {
                return Some(self.sample(episode, s));
            }
        }
        None
    }

    /// A shuffled batch with exactly `round(batch_size * pos_ratio)`
    /// positives. Positives pick a description uniformly, then one of its
    /// episodes uniformly.
    pub fn sample_batch<R: Rng + ?Sized>(
        &self,
        batch_size: usize,
        pos_ratio: f64,
        rng: &mut R,
    ) -> Result<Vec<Sample<'a>>, DatasetError> {
        if !(0.0..=1.0).contains(&pos_ratio) {
            return Err(DatasetError::InvalidParameter(format!("positive ratio {pos_ratio} not in [0, 1]")));
        }
        let n_pos = (batch_size as f64 * pos_ratio).round() as usize;
        if n_pos > 0 && self.buckets.is_empty() {
            return Err(DatasetError::InvalidParameter("no train description has a positive trace".into()));
        }
        let mut batch = Vec::with_capacity(batch_size);
        for _ in 0..n_pos {
            let (sentence, episodes) = self.buckets.choose(rng).expect("checked non-empty");
            let episode = *episodes.choose(rng).expect("buckets hold at least one episode");
            batch.push(self.sample(episode, *sentence));
        }
        for _ in n_pos..batch_size {
            let s = self
                .negative(rng)
                .ok_or_else(|| DatasetError::InvalidParameter("no false train sentence found".into()))?;
            batch.push(s);
        }
        batch.shuffle(rng);
        Ok(batch)
    }
}

/// One-shot batch with uniform negatives.
pub fn sample_batch<'a, R: Rng + ?Sized>(
    corpus: &'a Corpus,
    train: &[usize],
    batch_size: usize,
    pos_ratio: f64,
    rng: &mut R,
) -> Result<Vec<Sample<'a>>, DatasetError> {
    BatchSampler::new(corpus, train, Oracle::default(), NegativeMode::Uniform)?.sample_batch(batch_size, pos_ratio, rng)
}
