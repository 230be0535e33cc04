use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::format::{self, LineWriter, FORMAT_VERSION};
use crate::error::DatasetError;
use crate::grammar::{parse, vocabulary_hash, ConceptCategory, Grammar, SentenceAst, Token};
use crate::world::{Category, ObjectType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    RandomCategoryHoldout,
    ForbiddenCombination,
}

/// A word pattern over the rendered sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Pattern {
    /// The words appear contiguously, in order.
    Contiguous { words: Vec<String> },
    /// `word` appears together with any of `any_of`, anywhere in the sentence.
    CoOccurrence { word: String, any_of: Vec<String> },
}

impl Pattern {
    fn contiguous(words: &str) -> Pattern {
        Pattern::Contiguous { words: words.split(' ').map(str::to_string).collect() }
    }

    pub fn matches(&self, words: &[&str]) -> bool {
        match self {
            Pattern::Contiguous { words: pat } => {
                !pat.is_empty() && words.windows(pat.len()).any(|w| w.iter().zip(pat).all(|(a, b)| a == b))
            }
            Pattern::CoOccurrence { word, any_of } => {
                words.contains(&word.as_str()) && words.iter().any(|w| any_of.iter().any(|a| a == w))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPayload {
    HeldOut(Vec<String>),
    Forbidden(Vec<Pattern>),
}

/// A declarative held-out sentence set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub name: String,
    pub kind: SplitKind,
    pub payload: SplitPayload,
}

fn words(ast: &SentenceAst) -> Vec<&'static str> {
    ast.render().expect("universe sentences render").into_iter().map(Token::as_str).collect()
}

impl SplitSpec {
    /// Ids of the held-out sentences, ascending.
    pub fn held_out(&self) -> Result<Vec<usize>, DatasetError> {
        let grammar = Grammar::global();
        match &self.payload {
            SplitPayload::HeldOut(sentences) => {
                let set: BTreeSet<usize> = sentences
                    .iter()
                    .map(|s| {
                        let ast = parse(s)?;
                        grammar
                            .id_of(&ast)
                            .ok_or_else(|| DatasetError::InvalidParameter(format!("'{s}' is not a description")))
                    })
                    .collect::<Result<_, DatasetError>>()?;
                Ok(set.into_iter().collect())
            }
            SplitPayload::Forbidden(patterns) => Ok(grammar
                .sentences()
                .iter()
                .enumerate()
                .filter(|(_, s)| {
                    let w = words(s);
                    patterns.iter().any(|p| p.matches(&w))
                })
                .map(|(i, _)| i)
                .collect()),
        }
    }

    pub fn resolve(&self) -> Result<ResolvedSplit, DatasetError> {
        let held_out = self.held_out()?;
        let mut is_held = vec![false; Grammar::global().len()];
        for &i in &held_out {
            is_held[i] = true;
        }
        let train = (0..is_held.len()).filter(|&i| !is_held[i]).collect();
        Ok(ResolvedSplit { spec: self.clone(), held_out, train })
    }
}

/// A split with its sentence ids enumerated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedSplit {
    #[serde(flatten)]
    pub spec: SplitSpec,
    pub held_out: Vec<usize>,
    pub train: Vec<usize>,
}

impl ResolvedSplit {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Held-out ids grouped by concept category.
    pub fn test_by_category(&self) -> Vec<(ConceptCategory, Vec<usize>)> {
        let grammar = Grammar::global();
        ConceptCategory::ALL
            .into_iter()
            .map(|c| (c, self.held_out.iter().copied().filter(|&i| grammar.category_of_id(i) == c).collect()))
            .collect()
    }
}

/// Number of sentences held out of a category of `n`, rounding half up.
pub fn holdout_count(n: usize, frac: f64) -> usize {
    (frac * n as f64 + 0.5).floor() as usize
}

/// Holds out `holdout_frac` of every category, sampled uniformly without
/// replacement.
pub fn random_split<R: Rng + ?Sized>(holdout_frac: f64, rng: &mut R) -> Result<SplitSpec, DatasetError> {
    if !(holdout_frac > 0.0 && holdout_frac < 1.0) {
        return Err(DatasetError::InvalidParameter(format!("holdout fraction {holdout_frac} not in (0, 1)")));
    }
    let grammar = Grammar::global();
    let mut held = Vec::new();
    for c in ConceptCategory::ALL {
        let range = grammar.category_range(c);
        let k = holdout_count(range.len(), holdout_frac);
        let mut picked = index::sample(rng, range.len(), k).into_vec();
        picked.sort_unstable();
        held.extend(picked.into_iter().map(|i| grammar.sentences()[range.start + i].to_string()));
    }
    Ok(SplitSpec { name: "random".into(), kind: SplitKind::RandomCategoryHoldout, payload: SplitPayload::HeldOut(held) })
}

fn forbidden(name: &str, patterns: Vec<Pattern>) -> SplitSpec {
    SplitSpec { name: name.into(), kind: SplitKind::ForbiddenCombination, payload: SplitPayload::Forbidden(patterns) }
}

/// The five systematic splits, in order: object attributes, predicate with
/// object category, one-to-one relation, past spatial relation, past
/// predicate.
pub fn systematic_splits() -> Vec<SplitSpec> {
    let plants: Vec<String> = std::iter::once(Category::Plant.as_str().to_string())
        .chain(ObjectType::ALL.iter().filter(|t| t.category() == Category::Plant).map(|t| t.as_str().to_string()))
        .collect();
    vec![
        forbidden(
            "object_attribute",
            vec![Pattern::contiguous("red cat"), Pattern::contiguous("blue door"), Pattern::contiguous("green cactus")],
        ),
        forbidden("predicate_object", vec![Pattern::CoOccurrence { word: "grow".into(), any_of: plants }]),
        forbidden("one_to_one_relation", vec![Pattern::contiguous("right of")]),
        forbidden("past_spatial_relation", vec![Pattern::contiguous("was left of")]),
        forbidden("past_predicate", vec![Pattern::contiguous("was grasp")]),
    ]
}

/// One split forbidding every pattern of `splits`; its train set is the
/// shared train set of all of them.
pub fn combined_split(splits: &[SplitSpec]) -> SplitSpec {
    let patterns = splits
        .iter()
        .flat_map(|s| match &s.payload {
            SplitPayload::Forbidden(p) => p.clone(),
            SplitPayload::HeldOut(_) => Vec::new(),
        })
        .collect();
    forbidden("systematic_combined", patterns)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitsHeader {
    pub format_version: u32,
    pub vocab_hash: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitsFile {
    pub header: SplitsHeader,
    pub splits: Vec<ResolvedSplit>,
}

impl SplitsFile {
    pub fn new(config: serde_json::Value, splits: Vec<ResolvedSplit>) -> SplitsFile {
        SplitsFile {
            header: SplitsHeader { format_version: FORMAT_VERSION, vocab_hash: vocabulary_hash(), config },
            splits,
        }
    }

    pub fn get(&self, name: &str) -> Option<&ResolvedSplit> {
        self.splits.iter().find(|s| s.name() == name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = LineWriter::default();
        w.push(&self.header);
        for s in &self.splits {
            w.push(s);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<SplitsFile, DatasetError> {
        let lines = format::verified_lines(bytes)?;
        let first = lines.first().ok_or_else(|| DatasetError::Truncated("no header line".into()))?;
        format::check_version(first)?;
        let header: SplitsHeader = format::parse_line(first, 1)?;
        format::check_vocabulary(&header.vocab_hash)?;
        let splits = lines[1..]
            .iter()
            .enumerate()
            .map(|(i, l)| format::parse_line(l, i + 2))
            .collect::<Result<_, _>>()?;
        Ok(SplitsFile { header, splits })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        format::write_file(path.as_ref(), &self.to_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SplitsFile, DatasetError> {
        SplitsFile::from_bytes(&format::read_file(path.as_ref())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn contains(split: &ResolvedSplit, s: &str) -> bool {
        let id = Grammar::global().id_of(&parse(s).unwrap()).unwrap();
        split.held_out.binary_search(&id).is_ok()
    }

    #[test]
    fn holdout_rounding() {
        assert_eq!(holdout_count(152, 0.15), 23);
        assert_eq!(holdout_count(156, 0.15), 23);
        assert_eq!(holdout_count(648, 0.15), 97);
        assert_eq!(holdout_count(1716, 0.15), 257);
        assert_eq!(holdout_count(10, 0.25), 3);
    }

    #[test]
    fn random_split_per_category() {
        let spec = random_split(0.15, &mut ChaCha8Rng::seed_from_u64(0)).unwrap().resolve().unwrap();
        let per: Vec<usize> = spec.test_by_category().iter().map(|(_, v)| v.len()).collect();
        assert_eq!(per, vec![23, 23, 97, 257]);
        assert_eq!(spec.held_out.len() + spec.train.len(), 2672);
        assert!(random_split(0.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        assert!(random_split(1.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn systematic_examples() {
        let s: Vec<ResolvedSplit> = systematic_splits().iter().map(|s| s.resolve().unwrap()).collect();
        assert!(contains(&s[0], "grasp red cat"));
        assert!(contains(&s[0], "was shake blue door"));
        assert!(!contains(&s[0], "grasp blue cat"));
        assert!(contains(&s[1], "grow algae"));
        assert!(contains(&s[1], "grow plant"));
        assert!(!contains(&s[1], "grasp algae"));
        assert!(contains(&s[2], "shake thing right of dog"));
        assert!(contains(&s[3], "grasp thing was left of dog"));
        assert!(!contains(&s[3], "was grasp thing left of dog"));
        assert!(contains(&s[4], "was grasp thing left of dog"));
        for split in &s {
            assert!(!contains(split, "grasp thing right most"));
            assert!(!split.held_out.is_empty());
        }
        let combined = combined_split(&systematic_splits()).resolve().unwrap();
        for split in &s {
            for id in &split.held_out {
                assert!(combined.train.binary_search(id).is_err());
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let splits = systematic_splits().iter().map(|s| s.resolve().unwrap()).collect();
        let file = SplitsFile::new(serde_json::json!({"seed": 1}), splits);
        let back = SplitsFile::from_bytes(&file.to_bytes()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.get("past_predicate").unwrap().spec.kind, SplitKind::ForbiddenCombination);
    }

    proptest! {
        #[test]
        fn random_split_partitions(seed in any::<u64>(), frac in 0.01f64..0.99) {
            let r = random_split(frac, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().resolve().unwrap();
            let mut all: Vec<usize> = r.held_out.iter().chain(&r.train).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..2672).collect::<Vec<_>>());
            for (c, ids) in r.test_by_category() {
                let n = Grammar::global().category_range(c).len();
                prop_assert_eq!(ids.len(), holdout_count(n, frac));
            }
        }
    }
}
