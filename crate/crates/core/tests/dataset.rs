use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use temporal_playground::config::{Config, Format};
use temporal_playground::dataset::{
    combined_split, generate_corpus, new_observation_testset, random_split, systematic_splits, BatchSampler, Corpus,
    DatasetError, NegativeMode,
};
use temporal_playground::grammar::{ConceptCategory, Grammar};
use temporal_playground::oracle::Oracle;

fn corpus(seed: u64, episodes: usize) -> Corpus {
    generate_corpus(&Config { seed, episodes, workers: 1, ..Config::default() }).unwrap().corpus
}

#[test]
fn positive_descriptions_are_uniform() {
    let c = corpus(21, 300);
    let basic: Vec<usize> = Grammar::global().category_range(ConceptCategory::Basic).collect();
    let sampler = BatchSampler::new(&c, &basic, Oracle::default(), NegativeMode::Uniform).unwrap();
    let described: Vec<usize> = sampler.descriptions().collect();
    let mut counts = vec![0usize; Grammar::global().len()];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut draws = 0;
    for _ in 0..100 {
        for s in sampler.sample_batch(512, 0.1, &mut rng).unwrap() {
            if s.label {
                counts[s.sentence] += 1;
                draws += 1;
            }
        }
    }
    assert_eq!(draws, 5100);
    let k = described.len() as f64;
    let expected = draws as f64 / k;
    let chi2: f64 = described.iter().map(|&i| (counts[i] as f64 - expected).powi(2) / expected).sum();
    let z = (chi2 - (k - 1.0)) / (2.0 * (k - 1.0)).sqrt();
    assert!(z.abs() < 4.0, "chi-square {chi2:.1} over {k} descriptions, z = {z:.2}");
}

#[test]
fn hard_negatives_share_a_word_with_a_true_sentence() {
    let c = corpus(5, 60);
    let g = Grammar::global();
    let train: Vec<usize> = (0..g.len()).collect();
    let sampler = BatchSampler::new(&c, &train, Oracle::default(), NegativeMode::Hard).unwrap();
    let batch = sampler.sample_batch(200, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    for s in batch {
        assert!(!s.label);
        let neg = &g.sentences()[s.sentence];
        let truth = c.records[s.episode].sentence_ids().unwrap();
        assert!(truth
            .iter()
            .map(|&i| &g.sentences()[i])
            .any(|p| p.predicate == neg.predicate || p.head() == neg.head()));
    }
}

#[test]
fn split_sets_are_disjoint_and_cover_the_universe() {
    let mut specs = systematic_splits();
    specs.push(combined_split(&specs));
    specs.push(random_split(0.15, &mut ChaCha8Rng::seed_from_u64(0)).unwrap());
    for spec in specs {
        let r = spec.resolve().unwrap();
        assert!(r.held_out.iter().all(|i| r.train.binary_search(i).is_err()), "{}", r.name());
        assert_eq!(r.held_out.len() + r.train.len(), 2672);
    }
}

#[test]
fn held_out_counts_are_stable() {
    let counts: Vec<usize> = systematic_splits().iter().map(|s| s.resolve().unwrap().held_out.len()).collect();
    let again: Vec<usize> = systematic_splits().iter().map(|s| s.resolve().unwrap().held_out.len()).collect();
    assert_eq!(counts, again);
    assert!(counts.iter().all(|&n| n > 0));
}

#[test]
fn observation_set_size_is_configurable() {
    let cfg = Config { seed: 8, workers: 1, ..Config::default() };
    for n in [1, 7] {
        let obs = new_observation_testset(&cfg, &[0, 1, 2], n).unwrap();
        assert_eq!(obs.corpus.len(), n);
    }
}

#[test]
fn file_damage_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let c = corpus(1, 5);
    c.save(&path, Format::Text).unwrap();
    let bytes = std::fs::read(&path).unwrap();

    std::fs::write(&path, &bytes[..bytes.len() * 2 / 3]).unwrap();
    assert!(matches!(Corpus::load(&path), Err(DatasetError::Truncated(_))));

    let mut flipped = bytes.clone();
    let at = bytes.len() / 2;
    flipped[at] = if flipped[at] == b'1' { b'2' } else { b'1' };
    std::fs::write(&path, &flipped).unwrap();
    assert!(matches!(Corpus::load(&path), Err(DatasetError::Checksum { .. })));

    assert!(matches!(Corpus::load(dir.path().join("missing")), Err(DatasetError::Io { .. })));
}
