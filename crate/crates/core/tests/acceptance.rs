//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture` to
//! see them) and enforcing its runtime budget.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fbnet::bnet::{infer_crisp, infer_soft, Cpt, CptFragment, TNorm};
use fbnet::eval::{
    compute_metrics, load_dataset, split, DatasetSchema, FbnModel, FbnPipelineConfig, Model,
    NaiveBayesModel, SplitSpec,
};
use fbnet::learn::{recover_known_cpt, CptLearner, LearnConfig, TrainRecord};
use fbnet::rulebase::{enumerate_antecedents, tuple_to_index};
use fbnet::types::{FuzzyVector, GradeDistribution, LinguisticScale, ScaleRef};

fn four() -> ScaleRef {
    LinguisticScale::four_level()
}

fn three_parents() -> Vec<ScaleRef> {
    vec![four(), four(), four()]
}

fn testdata(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("testdata")
        .join(file)
}

fn random_cpt(rng: &mut ChaCha8Rng) -> Cpt {
    let rows = (0..64)
        .map(|_| {
            let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-6).collect();
            GradeDistribution::normalized(four(), &raw).unwrap()
        })
        .collect();
    Cpt::new(three_parents(), four(), rows).unwrap()
}

fn random_distribution(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-6).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

fn finish(criterion: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "{criterion} took {elapsed:?}, budget {budget:?}"
    );
    println!("{criterion}: PASS ({elapsed:?})");
}

/// Criterion 1: the published partial table loads with the well-formed
/// rows intact and the malformed row renormalized (with a repair record).
#[test]
fn c01_cpt_fidelity() {
    let started = Instant::now();
    let text = std::fs::read_to_string(testdata("cpt_fragment.tsv")).unwrap();
    let fragment = CptFragment::parse(&text, &three_parents(), &four()).unwrap();
    assert_eq!(fragment.entries.len(), 6);
    let base = Cpt::uniform(three_parents(), four());
    let (cpt, repairs) = base.with_overrides(&fragment).unwrap();

    // Stored ascending (p, m, g, e); the file lists S=e first.
    assert_eq!(
        cpt.lookup(&[3, 3, 3]).unwrap().probs(),
        &[0.02, 0.03, 0.15, 0.8]
    );
    assert_eq!(
        cpt.lookup(&[3, 2, 3]).unwrap().probs(),
        &[0.02, 0.08, 0.3, 0.6]
    );

    let gpe = cpt.lookup(&[2, 0, 3]).unwrap();
    let sum: f64 = gpe.probs().iter().sum();
    assert!((sum - 1.0).abs() <= 1e-12, "renormalized sum {sum}");
    let repair = repairs
        .iter()
        .find(|r| r.tuple == vec![2, 0, 3])
        .expect("the malformed row is reported");
    assert!((repair.original_sum - 1.25).abs() < 1e-12);
    eprintln!(
        "warning: table row (g,p,e) summed to {}; renormalized",
        repair.original_sum
    );
    finish("criterion 01 cpt-fidelity", started, Duration::from_secs(1));
}

/// Criterion 2: soft inference with one-hot evidence is the crisp result,
/// across 1,000 seeded random tables.
#[test]
fn c02_crisp_soft_consistency() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let cpt = random_cpt(&mut rng);
        let prior = GradeDistribution::new(four(), random_distribution(&mut rng)).unwrap();
        let tuple: Vec<usize> = (0..3).map(|_| rng.random_range(0..4)).collect();
        let evidence: Vec<FuzzyVector> = tuple
            .iter()
            .map(|&level| FuzzyVector::one_hot(four(), level).unwrap())
            .collect();
        let soft = infer_soft(&cpt, &prior, &evidence, TNorm::Min).unwrap();
        let crisp = infer_crisp(&cpt, &prior, &tuple).unwrap();
        for (a, b) in soft.probs().iter().zip(crisp.probs()) {
            assert!((a - b).abs() <= 1e-12, "soft {a} vs crisp {b}");
        }
    }
    finish(
        "criterion 02 crisp-soft-consistency",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 3: soft inference matches an independent brute-force
/// implementation (explicit 64-term weighted sum) on 1,000 random draws.
#[test]
fn c03_oracle_equivalence() {
    fn brute_force(cpt: &Cpt, prior: &[f64], ev: &[FuzzyVector]) -> Vec<f64> {
        let mut scores = vec![0.0f64; 4];
        for (g, score) in scores.iter_mut().enumerate() {
            let mut total = 0.0;
            for a in 0..4 {
                for p in 0..4 {
                    for m in 0..4 {
                        let mut strength = ev[0].degree(a);
                        if ev[1].degree(p) < strength {
                            strength = ev[1].degree(p);
                        }
                        if ev[2].degree(m) < strength {
                            strength = ev[2].degree(m);
                        }
                        total += strength * cpt.lookup(&[a, p, m]).unwrap().prob(g);
                    }
                }
            }
            *score = prior[g] * total;
        }
        let z: f64 = scores.iter().sum();
        scores.into_iter().map(|s| s / z).collect()
    }

    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cpt = random_cpt(&mut rng);
    for i in 0..1000 {
        // Refresh the table periodically so tables and evidence both vary.
        let cpt = if i % 100 == 0 {
            random_cpt(&mut rng)
        } else {
            cpt.clone()
        };
        let prior = random_distribution(&mut rng);
        let prior_dist = GradeDistribution::new(four(), prior.clone()).unwrap();
        let evidence: Vec<FuzzyVector> = (0..3)
            .map(|_| FuzzyVector::normalized(four(), &random_distribution(&mut rng)).unwrap())
            .collect();
        let fast = infer_soft(&cpt, &prior_dist, &evidence, TNorm::Min).unwrap();
        let slow = brute_force(&cpt, &prior, &evidence);
        for (a, b) in fast.probs().iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-12, "engine {a} vs oracle {b}");
        }
    }
    finish(
        "criterion 03 oracle-equivalence",
        started,
        Duration::from_secs(10),
    );
}

/// Criterion 4: with 100k samples per trial and no smoothing, the
/// estimator recovers a known table to L-inf < 0.02 in at least 95 of 100
/// seeded trials.
#[test]
fn c04_mle_recovery() {
    let started = Instant::now();
    // Concentrated rows: dominant grade rotates with the tuple index.
    let rows = (0..64)
        .map(|t| {
            let mut probs = vec![0.01; 4];
            probs[t % 4] = 0.97;
            GradeDistribution::new(four(), probs).unwrap()
        })
        .collect();
    let true_cpt = Cpt::new(three_parents(), four(), rows).unwrap();

    let mut hits = 0;
    for seed in 0..100u64 {
        let err = recover_known_cpt(&true_cpt, 100_000, seed).unwrap();
        if err < 0.02 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "only {hits}/100 trials under 0.02");
    finish(
        &format!("criterion 04 mle-recovery ({hits}/100 trials)"),
        started,
        Duration::from_secs(30),
    );
}

/// Criterion 5: the update loop terminates below tau = 0.001 on a
/// stationary stream, and deltas never increase after the first refit on
/// repeated identical batches.
#[test]
fn c05_convergence_protocol() {
    let started = Instant::now();
    let cfg = LearnConfig {
        smoothing: 1.0,
        tau: 0.001,
        max_iters: 200,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let batch: Vec<TrainRecord> = (0..500)
        .map(|_| TrainRecord {
            levels: (0..3).map(|_| rng.random_range(0..4)).collect(),
            grade: rng.random_range(0..4),
        })
        .collect();
    let mut learner = CptLearner::new(three_parents(), four(), cfg).unwrap();
    let log = learner
        .fit_until_converged(std::iter::repeat_n(batch, cfg.max_iters))
        .unwrap();
    assert!(
        log.converged,
        "did not converge within {} passes",
        cfg.max_iters
    );
    let final_delta = log.final_delta().unwrap();
    assert!(final_delta < 0.001, "final delta {final_delta}");
    for pair in log.entries.windows(2).skip(1) {
        assert!(
            pair[1].delta <= pair[0].delta + 1e-15,
            "delta rose from {} to {}",
            pair[0].delta,
            pair[1].delta
        );
    }

    // Zero smoothing reaches an exact fixed point on the second pass.
    let exact_cfg = LearnConfig {
        smoothing: 0.0,
        ..cfg
    };
    let batch = vec![
        TrainRecord {
            levels: vec![0, 0, 0],
            grade: 0,
        },
        TrainRecord {
            levels: vec![3, 3, 3],
            grade: 3,
        },
    ];
    let mut learner = CptLearner::new(three_parents(), four(), exact_cfg).unwrap();
    let log = learner
        .fit_until_converged(std::iter::repeat_n(batch, 10))
        .unwrap();
    assert_eq!(log.entries.len(), 2);
    assert_eq!(log.entries[1].delta, 0.0);
    finish(
        "criterion 05 convergence-protocol",
        started,
        Duration::from_secs(10),
    );
}

/// Criterion 6: the rule space enumerates completely, uniquely, and in
/// odometer order for (4,4,4) and for arbitrary arity mixes up to six
/// dimensions.
#[test]
fn c06_rulebase_completeness() {
    let started = Instant::now();
    let dims = three_parents();
    let tuples = enumerate_antecedents(&dims).unwrap();
    assert_eq!(tuples.len(), 64);
    let distinct: HashSet<_> = tuples.iter().cloned().collect();
    assert_eq!(distinct.len(), 64);
    let arities = [4usize, 4, 4];
    for (i, t) in tuples.iter().enumerate() {
        assert_eq!(
            tuple_to_index(t, &arities).unwrap(),
            i,
            "odometer order broken"
        );
    }

    // Random arity mixes, 1..=6 dimensions, arities 2..=5.
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..200 {
        let n_dims = rng.random_range(1..=6usize);
        let arities: Vec<usize> = (0..n_dims).map(|_| rng.random_range(2..=5)).collect();
        let dims: Vec<ScaleRef> = arities
            .iter()
            .map(|&a| LinguisticScale::new((0..a).map(|i| format!("l{i}"))).unwrap())
            .collect();
        let tuples = enumerate_antecedents(&dims).unwrap();
        let expected: usize = arities.iter().product();
        assert_eq!(tuples.len(), expected, "arities {arities:?}");
        let distinct: HashSet<_> = tuples.iter().cloned().collect();
        assert_eq!(distinct.len(), expected, "duplicates for {arities:?}");
        for (i, t) in tuples.iter().enumerate() {
            assert_eq!(tuple_to_index(t, &arities).unwrap(), i);
        }
    }
    finish(
        "criterion 06 rulebase-completeness",
        started,
        Duration::from_secs(10),
    );
}

/// Criterion 7: on the 150-record iris file, mean accuracy over ten seeded
/// 120/30 stratified splits reaches at least 0.85, and the pipeline's mean
/// error probability does not exceed the naive-Bayes baseline's.
#[test]
fn c07_iris_benchmark() {
    let started = Instant::now();
    let schema = DatasetSchema::new("species");
    let ds = load_dataset(&testdata("iris.csv"), "iris", &schema).unwrap();
    assert_eq!((ds.len(), ds.n_features()), (150, 4));
    assert_eq!(ds.class_scale.arity(), 3);

    let mut fbn_cep_sum = 0.0;
    let mut nb_cep_sum = 0.0;
    let mut fbn_acc_sum = 0.0;
    for trial in 0..10u64 {
        let spec = SplitSpec::new(0.8, 100 + trial, true).unwrap();
        let (train, test) = split(&ds, &spec).unwrap();
        assert_eq!((train.len(), test.len()), (120, 30));
        let truths: Vec<usize> = test.records.iter().map(|r| r.class).collect();

        let mut fbn = FbnModel::new(FbnPipelineConfig::default());
        fbn.fit(&train, trial).unwrap();
        let report =
            compute_metrics(&fbn.predict(&test).unwrap(), &truths, &test.class_scale).unwrap();
        fbn_cep_sum += report.cep;
        fbn_acc_sum += report.accuracy;

        let mut nb = NaiveBayesModel::new(1.0);
        nb.fit(&train, trial).unwrap();
        let report =
            compute_metrics(&nb.predict(&test).unwrap(), &truths, &test.class_scale).unwrap();
        nb_cep_sum += report.cep;
    }
    let fbn_acc = fbn_acc_sum / 10.0;
    let fbn_cep = fbn_cep_sum / 10.0;
    let nb_cep = nb_cep_sum / 10.0;
    assert!(fbn_acc >= 0.85, "mean accuracy {fbn_acc}");
    assert!(
        fbn_cep <= nb_cep,
        "pipeline error {fbn_cep} exceeds baseline {nb_cep}"
    );
    finish(
        &format!(
            "criterion 07 iris-benchmark (acc {fbn_acc:.4}, cep {fbn_cep:.4} vs nb {nb_cep:.4})"
        ),
        started,
        Duration::from_secs(60),
    );
}

/// Criterion 8: claims that cannot be reproduced from the published
/// material are excluded, with their substitutes exercised instead:
/// - the worked-example output distribution (its full table was never
///   published) -> substituted by criteria 1-3, so here the worked scores
///   must only yield a valid posterior;
/// - the simulated-cohort accuracy comparison (generator unpublished) ->
///   substituted by criterion 7 plus the chance-level baseline checks in
///   the harness tests;
/// - external comparator models -> out of scope entirely.
#[test]
fn c08_excluded_claims_have_substitutes() {
    let started = Instant::now();
    let text = std::fs::read_to_string(testdata("cpt_fragment.tsv")).unwrap();
    let fragment = CptFragment::parse(&text, &three_parents(), &four()).unwrap();
    let (cpt, _) = Cpt::uniform(three_parents(), four())
        .with_overrides(&fragment)
        .unwrap();
    let prior = GradeDistribution::uniform(four());

    // Worked-example scores, fuzzified with the stock parameters.
    let spec = fbnet::fuzzify::IndicatorSpec::default_score("score", four()).unwrap();
    let evidence: Vec<FuzzyVector> = [85.0, 90.0, 75.0]
        .iter()
        .map(|&x| spec.fuzzify(x).unwrap())
        .collect();
    let posterior = infer_soft(&cpt, &prior, &evidence, TNorm::Min).unwrap();
    let sum: f64 = posterior.probs().iter().sum();
    assert!((sum - 1.0).abs() <= 1e-9);
    // No assertion against the unpublished distribution, by design.
    finish(
        "criterion 08 excluded-claims-substituted",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 9: metric computation matches hand-computed confusion-matrix
/// values on twenty fixed cases, with the 0/0 -> 0 convention, and
/// accuracy + CEP is exactly 1 on every case.
#[test]
fn c09_metric_correctness() {
    let started = Instant::now();

    // Independent oracle: per-class tallies counted pair by pair.
    fn oracle(preds: &[usize], truths: &[usize], k: usize) -> (f64, Vec<(f64, f64, f64)>) {
        let n = preds.len() as f64;
        let mut correct = 0.0;
        let mut per_class = Vec::new();
        for c in 0..k {
            let mut tp = 0.0;
            let mut fp = 0.0;
            let mut fn_ = 0.0;
            for (&p, &t) in preds.iter().zip(truths) {
                if p == c && t == c {
                    tp += 1.0;
                } else if p == c {
                    fp += 1.0;
                } else if t == c {
                    fn_ += 1.0;
                }
            }
            let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
            let recall = if tp + fn_ == 0.0 {
                0.0
            } else {
                tp / (tp + fn_)
            };
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            per_class.push((precision, recall, f1));
        }
        for (&p, &t) in preds.iter().zip(truths) {
            if p == t {
                correct += 1.0;
            }
        }
        (correct / n, per_class)
    }

    // Twenty fixed cases: (arity, predictions, truths).
    let cases: Vec<(usize, Vec<usize>, Vec<usize>)> = vec![
        (2, vec![1, 1, 1, 0, 0], vec![1, 1, 0, 1, 0]),
        (2, vec![0, 0], vec![0, 0]),
        (2, vec![1, 0], vec![0, 1]),
        (2, vec![1, 1, 1, 1], vec![0, 1, 0, 1]),
        (2, vec![0, 1, 0, 1, 0, 1], vec![0, 1, 0, 1, 0, 1]),
        (2, vec![0], vec![1]),
        (2, vec![1], vec![1]),
        (3, vec![0, 0, 0], vec![0, 0, 0]),
        (3, vec![0, 1, 2], vec![0, 1, 2]),
        (3, vec![2, 2, 2], vec![0, 1, 2]),
        (3, vec![0, 1, 2, 0, 1, 2], vec![2, 1, 0, 2, 1, 0]),
        (3, vec![1, 1, 0, 2], vec![1, 0, 0, 2]),
        (4, vec![0, 1, 2, 3], vec![0, 1, 2, 3]),
        (4, vec![3, 3, 3, 3], vec![0, 1, 2, 3]),
        (
            4,
            vec![0, 0, 1, 1, 2, 2, 3, 3],
            vec![0, 1, 1, 2, 2, 3, 3, 0],
        ),
        (4, vec![1, 2, 1, 2], vec![2, 1, 2, 1]),
        (2, vec![0, 0, 0, 0, 1], vec![0, 0, 0, 0, 0]),
        (3, vec![1, 1, 1, 1, 1], vec![1, 1, 1, 1, 1]),
        (3, vec![0, 2, 0, 2], vec![1, 1, 1, 1]),
        (5, vec![0, 1, 2, 3, 4, 0, 1], vec![0, 1, 2, 3, 4, 1, 0]),
    ];
    assert_eq!(cases.len(), 20);

    for (i, (arity, preds, truths)) in cases.iter().enumerate() {
        let scale = LinguisticScale::new((0..*arity).map(|c| format!("c{c}"))).unwrap();
        let report = compute_metrics(preds, truths, &scale).unwrap();
        let (acc, per_class) = oracle(preds, truths, *arity);
        assert_eq!(report.accuracy, acc, "case {i} accuracy");
        assert_eq!(report.accuracy + report.cep, 1.0, "case {i} accuracy + cep");
        for (c, (p, r, f1)) in per_class.iter().enumerate() {
            assert!(
                (report.per_class[c].precision - p).abs() < 1e-15,
                "case {i} class {c} precision"
            );
            assert!(
                (report.per_class[c].recall - r).abs() < 1e-15,
                "case {i} class {c} recall"
            );
            assert!(
                (report.per_class[c].f1 - f1).abs() < 1e-15,
                "case {i} class {c} f1"
            );
        }
        let macro_f1: f64 = per_class.iter().map(|m| m.2).sum::<f64>() / *arity as f64;
        assert!(
            (report.macro_f1 - macro_f1).abs() < 1e-15,
            "case {i} macro f1"
        );
    }

    // Hand-frozen spot checks.
    let scale2 = LinguisticScale::new(["neg", "pos"]).unwrap();
    let r = compute_metrics(&[1, 1, 1, 0, 0], &[1, 1, 0, 1, 0], &scale2).unwrap();
    assert!((r.accuracy - 0.6).abs() < 1e-15);
    assert!((r.per_class[1].precision - 2.0 / 3.0).abs() < 1e-15);
    assert!((r.per_class[1].recall - 2.0 / 3.0).abs() < 1e-15);
    assert!((r.per_class[1].f1 - 2.0 / 3.0).abs() < 1e-15);
    assert!((r.per_class[0].precision - 0.5).abs() < 1e-15);
    assert!((r.macro_f1 - 7.0 / 12.0).abs() < 1e-15);

    let r = compute_metrics(&[1, 1, 1, 1], &[0, 1, 0, 1], &scale2).unwrap();
    assert!((r.accuracy - 0.5).abs() < 1e-15);
    assert_eq!(r.per_class[0].precision, 0.0); // 0/0 convention
    assert_eq!(r.per_class[0].recall, 0.0);
    assert!((r.per_class[1].f1 - 2.0 / 3.0).abs() < 1e-15);

    let scale3 = LinguisticScale::new(["a", "b", "c"]).unwrap();
    let r = compute_metrics(&[0, 0, 0], &[0, 0, 0], &scale3).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert!((r.macro_f1 - 1.0 / 3.0).abs() < 1e-15);

    finish(
        "criterion 09 metric-correctness",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 10: two benchmark runs with identical config and seed write
/// byte-identical tables and manifests.
#[test]
fn c10_reproducibility() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bench.toml");
    std::fs::write(
        &config,
        format!(
            "seed = 7\n[benchmark]\ntrials = 10\nmodels = [\"fbn\", \"nb\", \"weighted\"]\n\n\
             [[benchmark.dataset]]\nname = \"iris\"\npath = \"{}\"\nclass_column = \"species\"\n",
            testdata("iris.csv").display()
        ),
    )
    .unwrap();

    let mut captured: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for run in 0..2 {
        let outdir = dir.path().join(format!("results_{run}"));
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_fbnet"))
            .args([
                "benchmark",
                "--config",
                config.to_str().unwrap(),
                "--out",
                outdir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let mut files: Vec<(String, Vec<u8>)> = ["benchmark.txt", "benchmark.tsv", "manifest.txt"]
            .iter()
            .map(|f| (f.to_string(), std::fs::read(outdir.join(f)).unwrap()))
            .collect();
        files.sort();
        captured.push(files);
    }
    assert_eq!(captured[0], captured[1], "outputs differ between runs");
    finish(
        "criterion 10 reproducibility",
        started,
        Duration::from_secs(120),
    );
}
