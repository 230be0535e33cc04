//! Acceptance suite. Run with
//! `cargo test -p temporal-playground --test acceptance -- --nocapture`
//! to see one line per criterion.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use temporal_playground::bot::{rollout, ScenarioHint};
use temporal_playground::config::{Config, Format};
use temporal_playground::dataset::{
    combined_split, file_checksum, generate_corpus, random_split, systematic_splits, BatchSampler, Corpus,
    CoverageReport, NegativeMode, ResolvedSplit, SplitsFile,
};
use temporal_playground::grammar::{ConceptCategory, Grammar};
use temporal_playground::oracle::Oracle;
use temporal_playground::trace::Trace;
use temporal_playground::world::{grasp_eligible, init_world, WorldConfig};

struct Outcome {
    name: &'static str,
    status: Status,
    detail: String,
}

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    /// Part of the criterion cannot be measured on this machine.
    Unverified,
}

fn outcome(name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { name, status: if pass { Status::Pass } else { Status::Fail }, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn grammar_enumeration() -> Outcome {
    let start = Instant::now();
    let g = Grammar::global();
    let counts: Vec<usize> = ConceptCategory::ALL.iter().map(|c| g.enumerate(*c).len()).collect();
    let elapsed = start.elapsed();
    let pass = counts == [152, 156, 648, 1716] && g.len() == 2672 && elapsed < Duration::from_secs(1);
    outcome("grammar enumeration", pass, format!("counts {counts:?}, total {}, {}", g.len(), secs(elapsed)))
}

fn oracle_cross_validation() -> Outcome {
    let start = Instant::now();
    let oracle = Oracle::default();
    let world = WorldConfig::default();
    let bot = Default::default();
    let g = Grammar::global();
    let (mut single, mut single_agree, mut mixed, mut mixed_diverge) = (0usize, 0usize, 0usize, 0usize);
    let rollouts = 200;
    for seed in 0..rollouts {
        let ep = rollout(&world, &bot, ScenarioHint::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let operational = oracle.describe_operational(&ep.trace);
        let tl = oracle.timelines(&ep.trace);
        for (id, s) in g.sentences().iter().enumerate() {
            let a = tl.eval(s);
            let b = operational.binary_search(&id).is_ok();
            if s.is_mixed_tense() {
                mixed += 1;
                mixed_diverge += usize::from(a != b);
            } else {
                single += 1;
                single_agree += usize::from(a == b);
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = single_agree == single && elapsed < Duration::from_secs(60);
    outcome(
        "oracle cross-validation",
        pass,
        format!(
            "{rollouts} rollouts, single-tense agreement {single_agree}/{single}, mixed-tense divergence {:.4} ({mixed_diverge}/{mixed}), {}",
            mixed_diverge as f64 / mixed.max(1) as f64,
            secs(elapsed)
        ),
    )
}

fn environment_constants() -> Outcome {
    let world = WorldConfig::default();
    let bot = Default::default();
    let mut problems = Vec::new();
    let mut grasps = 0;
    for seed in 0..1000u64 {
        let init = init_world(&world, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        if init.body.pos.x != 0.0 || init.body.pos.y != 0.0 {
            problems.push(format!("seed {seed}: body not at origin"));
        }
        for (i, a) in init.objects.iter().enumerate() {
            if !(0.2..=0.3).contains(&a.size) {
                problems.push(format!("seed {seed}: initial size {}", a.size));
            }
            for b in &init.objects[i + 1..] {
                let d = ((a.pos.x - b.pos.x).powi(2) + (a.pos.y - b.pos.y).powi(2)).sqrt();
                if d <= 0.3 {
                    problems.push(format!("seed {seed}: initial distance {d}"));
                }
            }
        }
        let ep = rollout(&world, &bot, ScenarioHint::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let tr: &Trace = &ep.trace;
        if tr.len() != 30 || tr.n_objects() != 3 {
            problems.push(format!("seed {seed}: shape {}x{}", tr.len(), tr.n_objects()));
        }
        for t in 0..tr.len() {
            let inside = |x: f32| (-1.0..=1.0).contains(&x);
            let b = tr.body_pos(t);
            if !inside(b.x) || !inside(b.y) {
                problems.push(format!("seed {seed}: body outside at {t}"));
            }
            for o in 0..3 {
                let p = tr.pos(t, o);
                if !inside(p.x) || !inside(p.y) {
                    problems.push(format!("seed {seed}: object {o} outside at {t}"));
                }
                if t > 0 && tr.grasped(t, o) && !tr.grasped(t - 1, o) {
                    grasps += 1;
                    let prev = tr.pos(t - 1, o);
                    let d = ((b.x - prev.x).powi(2) + (b.y - prev.y).powi(2)).sqrt();
                    if d >= (0.05 + tr.size(t - 1, o)) / 2.0 {
                        problems.push(format!("seed {seed}: grasp at distance {d}"));
                    }
                }
            }
        }
        for o in &init.objects {
            let d = o.pos.norm();
            let expected = d < (0.05 + o.size) / 2.0;
            if grasp_eligible(&init.body, o, world.agent_size) != expected {
                problems.push(format!("seed {seed}: eligibility disagrees at distance {d}"));
            }
        }
    }
    let pass = problems.is_empty() && world.agent_size == 0.05 && world.episode_len == 30 && world.n_objects == 3;
    outcome(
        "environment constants",
        pass,
        format!("1000 seeds, {grasps} grasp onsets checked, {} violations {:?}", problems.len(), problems.first()),
    )
}

fn scenario_soundness() -> Outcome {
    let start = Instant::now();
    let oracle = Oracle::default();
    let world = WorldConfig::default();
    let bot = Default::default();
    let mut ok = 0;
    let n = 500;
    for seed in 0..n {
        let ep = rollout(&world, &bot, ScenarioHint::default(), &mut ChaCha8Rng::seed_from_u64(1_000_000 + seed))
            .unwrap();
        if oracle.eval_sentence(&ep.trace, &ep.scenario.sentence(&ep.trace)).unwrap() {
            ok += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome("scenario soundness", ok == n && elapsed < Duration::from_secs(60), format!("{ok}/{n}, {}", secs(elapsed)))
}

fn desk_config(seed: u64, workers: usize) -> Config {
    Config { seed, episodes: 2000, min_per_description: 3, extra_budget: 0, workers, ..Config::default() }
}

fn desk_coverage(dir: &std::path::Path) -> (Vec<Outcome>, Corpus) {
    let start = Instant::now();
    let generated = generate_corpus(&desk_config(0, 1)).unwrap();
    let single = start.elapsed();
    let cov = &generated.coverage;
    let fraction = cov.covered_fraction(&[ConceptCategory::Basic, ConceptCategory::Temporal]);
    let path = dir.join("coverage.jsonl");
    let config = generated.corpus.header.config.clone();
    cov.save(&config, &path).unwrap();
    let reloaded = CoverageReport::load(&path).unwrap();
    let per_cat: Vec<String> = cov
        .categories
        .iter()
        .map(|c| format!("{} {}/{}", c.category.as_str(), c.covered, c.descriptions))
        .collect();
    let coverage = outcome(
        "desk corpus coverage",
        fraction >= 0.95 && reloaded.entries.len() == 2672 && single < Duration::from_secs(300),
        format!(
            "basic+temporal covered {:.4}, {}, report with {} entries, single worker {}",
            fraction,
            per_cat.join(", "),
            reloaded.entries.len(),
            secs(single)
        ),
    );
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let speedup = if cores >= 8 {
        let start = Instant::now();
        let eight = generate_corpus(&desk_config(0, 8)).unwrap();
        let t8 = start.elapsed();
        let ratio = single.as_secs_f64() / t8.as_secs_f64();
        outcome(
            "desk corpus speedup",
            ratio >= 8.0 * 0.8 && eight.corpus == generated.corpus,
            format!("8 workers {}, speedup {:.2}x", secs(t8), ratio),
        )
    } else {
        Outcome {
            name: "desk corpus speedup",
            status: Status::Unverified,
            detail: format!("{cores} core(s) available, 8-worker scaling cannot be measured"),
        }
    };
    (vec![coverage, speedup], generated.corpus)
}

fn split_files(seed: u64) -> (SplitsFile, SplitsFile) {
    let config = serde_json::json!({ "split_seed": seed });
    let random = random_split(0.15, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().resolve().unwrap();
    let mut specs = systematic_splits();
    specs.push(combined_split(&specs));
    let systematic = specs.iter().map(|s| s.resolve().unwrap()).collect();
    (SplitsFile::new(config.clone(), vec![random]), SplitsFile::new(config, systematic))
}

fn determinism(dir: &std::path::Path) -> Outcome {
    let mut sums = Vec::new();
    for run in 0..2 {
        let cfg = Config { seed: 42, episodes: 300, workers: 1, ..Config::default() };
        let g = generate_corpus(&cfg).unwrap();
        let corpus_path = dir.join(format!("det{run}.jsonl"));
        g.corpus.save(&corpus_path, Format::Binary).unwrap();
        let (random, systematic) = split_files(42);
        let rp = dir.join(format!("random{run}.jsonl"));
        let sp = dir.join(format!("systematic{run}.jsonl"));
        random.save(&rp).unwrap();
        systematic.save(&sp).unwrap();
        sums.push([file_checksum(&corpus_path).unwrap(), file_checksum(&rp).unwrap(), file_checksum(&sp).unwrap()]);
    }
    outcome(
        "determinism",
        sums[0] == sums[1],
        format!("corpus {}, random split {}, systematic splits {}", &sums[0][0][..12], &sums[0][1][..12], &sums[0][2][..12]),
    )
}

/// Independent string-level check of the forbidden patterns.
fn forbidden_by_text(split: usize, sentence: &str) -> bool {
    let padded = format!(" {sentence} ");
    let has = |w: &str| padded.contains(&format!(" {w} "));
    const PLANTS: [&str; 11] =
        ["plant", "cactus", "carnivorous", "flower", "tree", "bush", "grass", "algae", "tea", "rose", "bonsai"];
    match split {
        0 => has("red cat") || has("blue door") || has("green cactus"),
        1 => has("grow") && PLANTS.iter().any(|p| has(p)),
        2 => has("right of"),
        3 => has("was left of"),
        4 => has("was grasp"),
        _ => unreachable!(),
    }
}

fn split_correctness(corpus: &Corpus) -> Outcome {
    let g = Grammar::global();
    let splits: Vec<ResolvedSplit> = systematic_splits().iter().map(|s| s.resolve().unwrap()).collect();
    let combined = combined_split(&systematic_splits()).resolve().unwrap();
    let mut details = Vec::new();
    let mut pass = splits.len() == 5;
    for (k, split) in splits.iter().enumerate() {
        let leaked = split.train.iter().filter(|&&i| forbidden_by_text(k, &g.sentences()[i].to_string())).count();
        let expected: Vec<usize> =
            (0..g.len()).filter(|&i| forbidden_by_text(k, &g.sentences()[i].to_string())).collect();
        let in_combined = split.held_out.iter().filter(|i| combined.train.binary_search(i).is_ok()).count();
        pass &= leaked == 0 && !split.held_out.is_empty() && split.held_out == expected && in_combined == 0;
        details.push(format!("{} test {}", split.name(), split.held_out.len()));
    }
    let oracle = Oracle::default();
    let sampler = BatchSampler::new(corpus, &combined.train, oracle.clone(), NegativeMode::Uniform).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut lo, mut hi, mut total_pos, mut mislabeled) = (1.0f64, 0.0f64, 0usize, 0usize);
    for b in 0..100 {
        let batch = sampler.sample_batch(512, 0.1, &mut rng).unwrap();
        let pos = batch.iter().filter(|s| s.label).count();
        total_pos += pos;
        let ratio = pos as f64 / batch.len() as f64;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if b < 10 {
            for s in &batch {
                let trace = corpus.records[s.episode].trace(&corpus.header).unwrap();
                if oracle.eval_sentence(&trace, &g.sentences()[s.sentence]).unwrap() != s.label {
                    mislabeled += 1;
                }
            }
        }
    }
    pass &= (0.08..=0.12).contains(&lo) && (0.08..=0.12).contains(&hi) && mislabeled == 0;
    details.push(format!(
        "batch positive ratio in [{lo:.4}, {hi:.4}], mean {:.4}, {mislabeled} mislabeled in 10 re-checked batches",
        total_pos as f64 / 51_200.0
    ));
    outcome("split correctness", pass, details.join(", "))
}

fn serialization_round_trip(corpus: &Corpus, dir: &std::path::Path) -> Outcome {
    let mut details = Vec::new();
    let mut pass = corpus.len() == 2000;
    for mode in [Format::Text, Format::Binary] {
        let path = dir.join(format!("corpus_{mode:?}.jsonl"));
        corpus.save(&path, mode).unwrap();
        let back = Corpus::load(&path).unwrap();
        let same = &back == corpus;
        pass &= same;
        let bytes = std::fs::metadata(&path).unwrap().len();
        details.push(format!("{mode:?} {} ({bytes} bytes)", if same { "identical" } else { "differs" }));
    }
    outcome("serialization round-trip", pass, format!("{} episodes, {}", corpus.len(), details.join(", ")))
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let mut results = vec![grammar_enumeration(), oracle_cross_validation(), environment_constants(), scenario_soundness()];
    let (coverage, corpus) = desk_coverage(dir.path());
    results.extend(coverage);
    results.push(determinism(dir.path()));
    results.push(split_correctness(&corpus));
    results.push(serialization_round_trip(&corpus, dir.path()));

    for r in &results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unverified => "UNVERIFIED",
        };
        println!("[{tag}] {}: {}", r.name, r.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|r| r.status == Status::Fail).map(|r| r.name).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
