//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! The property criteria need no data. The reproduction criteria run when
//! `RAMAN_DATA_DIR` names a directory holding `slopp/`, `sloppe/` and
//! `mendeley/` libraries in the layout read by `load_library`; otherwise they
//! are reported as SKIP. The process exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use polyraman::augment::{generate_augmented, ratio_series, reconstruct, AugmentParams, AugmentTarget};
use polyraman::config::{preset, DataConfig, ExperimentConfig};
use polyraman::dataset::{LabeledDataset, PolymerType, Sample, Source, Spectrum};
use polyraman::eval::{run_experiment, run_once, ExperimentData, ExperimentOutcome, RunSpec};
use polyraman::models::{impurity, train_forest, train_tree, ForestParams, KnnModel, SplitCriterion, TreeParams};
use polyraman::preprocess::{
    add_noise, bin_means, build_features, pc_transform, roc_transform, scale_x, shift_positive, PipelineConfig,
    ScaledSpectrum,
};
use polyraman::seed::rng_from_seed;
use polyraman::synthetic::write_synthetic_libraries;
use rand::Rng;

const ALGEBRA_TOL: f64 = 1e-12;
const AUGMENT_REL_TOL: f64 = 1e-9;
const AUGMENT_CASES: usize = 1000;
const ALGEBRA_CASES: usize = 500;
const KNN_INSTANCES: usize = 100;
const KNN_MAX_ROWS: usize = 50;
const TREE_INSTANCES: usize = 100;

const ENSEMBLE_SEEDS: usize = 10;
const ENSEMBLE_BASE_SEED: u64 = 0;
const ABLATION_EXP1_TARGET: f64 = 79.38;
const ABLATION_TOL: f64 = 5.0;
const UNAUGMENTED_SWEEP_TARGET: f64 = 86.59;
const UNAUGMENTED_SWEEP_TOL: f64 = 5.0;
const UNAUGMENTED_BEST_WIDTHS: std::ops::RangeInclusive<usize> = 8..=24;
const AUGMENTED_SWEEP_TARGET: f64 = 91.75;
const AUGMENTED_SWEEP_TOL: f64 = 5.0;
const GINI_COMPARISON_WIDTH: usize = 12;
const FINAL_TARGET: f64 = 93.81;
const FINAL_TOL: f64 = 4.0;
const NOISE_MAX_SPREAD: f64 = 5.0;
const BASELINE_MIN_GAP: f64 = 15.0;

/// Published per-type counts: (type, SLoPP, SLoPP-E after filtering, Mendeley after filtering).
const COUNT_TABLE: &[(&str, usize, usize, usize)] = &[
    ("acrylic", 10, 3, 0),
    ("acrylonitrile butadiene styrene", 10, 1, 1),
    ("cellulose acetate", 4, 3, 0),
    ("cotton", 16, 0, 0),
    ("polyamide", 7, 7, 0),
    ("polycarbonate", 7, 2, 2),
    ("polyester", 10, 12, 16),
    ("polyethylene", 24, 26, 74),
    ("polyethylene terephthalate", 9, 1, 0),
    ("polyethylene vinyl acetate", 5, 0, 0),
    ("polymethyl methacrylate", 1, 3, 0),
    ("polypropylene", 17, 21, 54),
    ("polystyrene", 11, 9, 2),
    ("polyurethane", 6, 6, 0),
    ("polyvinyl chloride", 11, 3, 9),
];
const TRAIN_TOTAL: usize = 306;
const TEST_TOTAL: usize = 97;

#[derive(Default)]
struct Suite {
    passed: usize,
    failed: usize,
    skipped: usize,
}

impl Suite {
    fn record(&mut self, id: &str, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => {
                self.passed += 1;
                println!("PASS  {id:<4} {name}: {detail}");
            }
            Err(detail) => {
                self.failed += 1;
                println!("FAIL  {id:<4} {name}: {detail}");
            }
        }
    }

    fn skip(&mut self, id: &str, name: &str, reason: &str) {
        self.skipped += 1;
        println!("SKIP  {id:<4} {name}: {reason}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn spectrum(points: &[(f64, f64)]) -> Spectrum {
    Spectrum::new(points.to_vec()).expect("valid spectrum")
}

fn grid(values: Vec<f64>) -> ScaledSpectrum {
    let n = values.len() as i64;
    ScaledSpectrum::new(values, 0, n - 1).expect("valid grid")
}

fn scaling_traces() -> Result<String, String> {
    let cases: [(&[(f64, f64)], i64, i64, Vec<f64>); 3] = [
        (&[(5.0, 2.0)], 0, 10, vec![2.0; 11]),
        (&[(2.0, 1.0), (5.0, 3.0)], 0, 7, vec![1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0]),
        (&[(2.0, 1.0), (9.0, 4.0)], 0, 5, vec![1.0; 6]),
    ];
    for (points, lo, hi, expected) in cases {
        let got = scale_x(&spectrum(points), lo, hi).map_err(err)?;
        ensure(got.values() == expected.as_slice(), || {
            format!("{points:?} on {lo}..{hi}: got {:?}, expected {expected:?}", got.values())
        })?;
    }
    Ok("3 traces exact".into())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ALGEBRA_TOL
}

fn algebraic_invariants() -> Result<String, String> {
    ensure(shift_positive(&[-3.0, 0.0, 2.0]) == [1.0, 4.0, 6.0], || "shift example".into())?;
    ensure(roc_transform(&grid(vec![1.0, 3.0, 2.0])).map_err(err)?.values() == [2.0, -1.0], || "ROC example".into())?;
    ensure(pc_transform(&grid(vec![2.0, 4.0, 6.0]), 2).map_err(err)?.values() == [2.0], || "PC example".into())?;
    ensure(bin_means(&[1., 2., 3., 4., 5.], 2).map_err(err)?.bins == [1.5, 3.5, 5.0], || "bin example".into())?;

    let mut rng = rng_from_seed(0xa11);
    for case in 0..ALGEBRA_CASES {
        let n = rng.gen_range(2..300);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();

        let shifted = shift_positive(&y);
        let min = shifted.iter().copied().fold(f64::INFINITY, f64::min);
        ensure(min >= 1.0 - ALGEBRA_TOL, || format!("case {case}: shifted minimum {min}"))?;
        for i in 1..n {
            ensure(close(shifted[i] - shifted[i - 1], y[i] - y[i - 1]), || {
                format!("case {case}: shift changed a difference at {i}")
            })?;
        }

        let c = rng.gen_range(-50.0..50.0);
        let base = roc_transform(&grid(y.clone())).map_err(err)?;
        let moved = roc_transform(&grid(y.iter().map(|v| v + c).collect())).map_err(err)?;
        for (a, b) in base.values().iter().zip(moved.values()) {
            ensure(close(*a, *b), || format!("case {case}: ROC not shift-invariant ({a} vs {b})"))?;
        }

        let level = rng.gen_range(0.1..500.0);
        let window = rng.gen_range(1..n);
        let pc = pc_transform(&grid(vec![level; n]), window).map_err(err)?;
        ensure(pc.values().iter().all(|v| close(*v, 1.0)), || {
            format!("case {case}: PC of constant {level} is not 1")
        })?;

        ensure(bin_means(&y, 1).map_err(err)?.bins == y, || format!("case {case}: width-1 bins differ"))?;
        let whole = bin_means(&y, n + rng.gen_range(0..5)).map_err(err)?.bins;
        let mean = y.iter().sum::<f64>() / n as f64;
        ensure(whole.len() == 1 && close(whole[0], mean), || {
            format!("case {case}: whole-series bin {whole:?} vs mean {mean}")
        })?;
    }
    Ok(format!("{ALGEBRA_CASES} random series within {ALGEBRA_TOL:e}"))
}

fn random_series(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let offset = if rng.gen_bool(0.3) { rng.gen_range(-200.0..0.0) } else { 0.0 };
    (0..n).map(|_| rng.gen_range(0.0..1000.0) + offset).collect()
}

fn augmentation_identity() -> Result<String, String> {
    let mut rng = rng_from_seed(0xa12);
    let mut worst: f64 = 0.0;
    for case in 0..AUGMENT_CASES {
        let n = rng.gen_range(2..200);
        let y = random_series(&mut rng, n);
        let expected = shift_positive(&y);
        let ratios = ratio_series(&y).map_err(err)?;
        let out = reconstruct(&y, &ratios, expected[0], 0.0, 99.0).map_err(err)?;
        for (a, b) in out.iter().zip(&expected) {
            let rel = (a - b).abs() / b.abs();
            worst = worst.max(rel);
            ensure(rel <= AUGMENT_REL_TOL, || format!("case {case}: {a} vs {b}"))?;
        }
    }
    Ok(format!("{AUGMENT_CASES} cases, worst relative error {worst:.2e}"))
}

fn augmentation_envelope() -> Result<String, String> {
    let mut rng = rng_from_seed(0xa13);
    for case in 0..AUGMENT_CASES {
        let n = rng.gen_range(2..200);
        let y = random_series(&mut rng, n);
        let params = AugmentParams {
            random_change: rng.gen_range(0.0..0.5),
            shift: 0.0,
            max_pct_change: rng.gen_range(1.0..99.0),
        };
        let out = polyraman::augment::augment_series(&y, &params, &mut rng).map_err(err)?;
        let reference = shift_positive(&y);
        let p = params.max_pct_change / 100.0;
        for i in 1..y.len() {
            let (lo, hi) = (reference[i] * (1.0 - p), reference[i] * (1.0 + p));
            let slack = ALGEBRA_TOL * reference[i].abs().max(1.0);
            ensure(out[i] >= lo - slack && out[i] <= hi + slack, || {
                format!("case {case}: value {} at {i} outside [{lo}, {hi}]", out[i])
            })?;
        }
    }
    Ok(format!("{AUGMENT_CASES} cases inside the clamp envelope"))
}

fn augmentation_counts() -> Result<String, String> {
    let mut rng = rng_from_seed(0xa14);
    for case in 0..AUGMENT_CASES {
        let mut ds = LabeledDataset::new(Source::Slopp);
        let classes = rng.gen_range(1..4);
        let mut targets = Vec::new();
        for c in 0..classes {
            let polymer = PolymerType::ALL[c * 4];
            for i in 0..rng.gen_range(1..6) {
                let ys = random_series(&mut rng, 12);
                let s = Spectrum::from_grid(100, &ys).map_err(err)?;
                ds.insert(polymer, Sample::original(format!("{c}/{i}"), Source::Slopp, s));
            }
            if rng.gen_bool(0.8) {
                targets.push(AugmentTarget::new(polymer, rng.gen_range(1..12)));
            }
        }
        let out = generate_augmented(&ds, &targets, &AugmentParams::default(), case as u64).map_err(err)?;
        for (polymer, samples) in ds.entries() {
            let target = targets.iter().find(|t| t.polymer == *polymer).map_or(0, |t| t.min_examples);
            let got = out.samples(*polymer);
            ensure(got.len() == samples.len().max(target), || {
                format!("case {case}: {polymer} has {} samples, expected {}", got.len(), samples.len().max(target))
            })?;
            ensure(got[..samples.len()] == samples[..], || format!("case {case}: originals changed"))?;
            ensure(got.iter().all(|s| s.spectrum.wavenumbers() == samples[0].spectrum.wavenumbers()), || {
                format!("case {case}: augmented grid differs from source")
            })?;
        }
    }
    Ok(format!("{AUGMENT_CASES} datasets reach max(count, target)"))
}

fn impurity_boundaries() -> Result<String, String> {
    let cases: [(&[usize], SplitCriterion, f64); 7] = [
        (&[5, 0], SplitCriterion::Entropy, 0.0),
        (&[1, 1], SplitCriterion::Entropy, 1.0),
        (&[1, 1], SplitCriterion::Gini, 0.5),
        (&[7], SplitCriterion::Gini, 0.0),
        (&[2, 2, 2, 2], SplitCriterion::Entropy, 2.0),
        (&[2, 2, 2, 2], SplitCriterion::Gini, 0.75),
        (&[0, 3, 0], SplitCriterion::Entropy, 0.0),
    ];
    for (counts, criterion, expected) in cases {
        let got = impurity(counts, criterion).map_err(err)?;
        ensure(got == expected, || format!("{criterion:?}{counts:?} = {got}, expected {expected}"))?;
    }
    Ok("7 boundary values exact".into())
}

fn knn_oracle(rows: &[Vec<f64>], labels: &[usize], n_classes: usize, k: usize, x: &[f64]) -> usize {
    let mut order: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0; n_classes];
    for &(_, i) in &order[..k] {
        votes[labels[i]] += 1;
    }
    let max = *votes.iter().max().unwrap();
    votes.iter().position(|&v| v == max).unwrap()
}

fn knn_matches_oracle() -> Result<String, String> {
    let example = KnnModel::fit(&[vec![1.0], vec![-1.0], vec![0.5]], &[0, 0, 1], 2, 3).map_err(err)?;
    ensure(example.predict(&[0.0]).map_err(err)? == 0, || "two at distance 1 beat one at 0.5".into())?;

    let mut rng = rng_from_seed(0xa15);
    let mut queries = 0;
    for inst in 0..KNN_INSTANCES {
        let n = rng.gen_range(1..=KNN_MAX_ROWS);
        let d = rng.gen_range(1..6);
        let n_classes = rng.gen_range(2..5);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3..4) as f64).collect()).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_classes)).collect();
        let k = rng.gen_range(1..=n);
        let model = KnnModel::fit(&rows, &labels, n_classes, k).map_err(err)?;
        for _ in 0..10 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-3..4) as f64).collect();
            let got = model.predict(&x).map_err(err)?;
            let want = knn_oracle(&rows, &labels, n_classes, k, &x);
            queries += 1;
            ensure(got == want, || format!("instance {inst}: k={k} query {x:?} gave {got}, oracle {want}"))?;
        }
    }
    Ok(format!("{KNN_INSTANCES} instances, {queries} queries agree"))
}

fn tree_fits_distinct_rows() -> Result<String, String> {
    let xor = [vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    let mut rng = rng_from_seed(0xa16);
    let tree = train_tree(&xor, &[0, 1, 1, 0], 2, SplitCriterion::Entropy, &TreeParams::default(), &mut rng, None)
        .map_err(err)?;
    for (row, label) in xor.iter().zip([0, 1, 1, 0]) {
        ensure(tree.predict(row).map_err(err)? == label, || "XOR not fitted".into())?;
    }

    for inst in 0..TREE_INSTANCES {
        let n = rng.gen_range(1..80);
        let d = rng.gen_range(1..8);
        let n_classes = rng.gen_range(1..6);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_classes)).collect();
        let criterion = if inst % 2 == 0 { SplitCriterion::Entropy } else { SplitCriterion::Gini };
        let tree = train_tree(&rows, &labels, n_classes, criterion, &TreeParams::default(), &mut rng, None)
            .map_err(err)?;
        for (row, &label) in rows.iter().zip(&labels) {
            ensure(tree.predict(row).map_err(err)? == label, || format!("instance {inst}: training row misclassified"))?;
        }
    }
    Ok(format!("XOR plus {TREE_INSTANCES} random instances at 100% train accuracy"))
}

fn synthetic_data(dir: &Path) -> Result<(DataConfig, ExperimentData), String> {
    let libs = write_synthetic_libraries(dir, 23).map_err(err)?;
    let cfg = DataConfig {
        slopp: libs.slopp,
        sloppe: libs.sloppe,
        mendeley: libs.mendeley,
        synonyms: BTreeMap::new(),
    };
    let (data, _) = ExperimentData::load(&cfg).map_err(err)?;
    Ok((cfg, data))
}

fn determinism(data: &ExperimentData) -> Result<String, String> {
    let (_, sample) = data.train.iter().next().unwrap();
    let twice = |f: &dyn Fn() -> Result<String, String>| -> Result<(), String> {
        let a = f()?;
        ensure(a == f()?, || "outputs differ".into())
    };
    let debug = |v: &dyn std::fmt::Debug| format!("{v:?}");

    twice(&|| Ok(debug(&scale_x(&sample.spectrum, 0, 3500).map_err(err)?)))
        .map_err(|e| format!("scale_x: {e}"))?;
    twice(&|| {
        let s = scale_x(&sample.spectrum, 0, 3500).map_err(err)?;
        Ok(debug(&add_noise(&s, 2.0, &mut rng_from_seed(5)).map_err(err)?))
    })
    .map_err(|e| format!("noise: {e}"))?;
    twice(&|| {
        let targets = polyraman::config::final_recipe();
        Ok(debug(&generate_augmented(&data.train, &targets, &AugmentParams::default(), 9).map_err(err)?))
    })
    .map_err(|e| format!("augmentation: {e}"))?;
    let noisy = PipelineConfig {
        noise: true,
        noise_amplitude: 1.5,
        seed: 4,
        ..Default::default()
    };
    twice(&|| Ok(debug(&build_features(&data.train, &noisy).map_err(err)?.rows)))
        .map_err(|e| format!("features: {e}"))?;
    let m = build_features(&data.train, &PipelineConfig::default()).map_err(err)?;
    let params = ForestParams {
        n_trees: 25,
        ..Default::default()
    };
    twice(&|| {
        let f = train_forest(&m.rows, &m.class_indices(), PolymerType::ALL.len(), &params, 77).map_err(err)?;
        serde_json::to_string(&f).map_err(err)
    })
    .map_err(|e| format!("forest: {e}"))?;
    let spec = RunSpec {
        pipeline: PipelineConfig {
            noise: true,
            ..Default::default()
        },
        augment: Some(polyraman::config::AugmentConfig {
            params: AugmentParams::default(),
            targets: polyraman::config::final_recipe(),
        }),
        model: polyraman::models::ModelConfig::RandomForest(params.clone()),
    };
    twice(&|| serde_json::to_string(&run_once(data, &spec, 3, "det").map_err(err)?.0).map_err(err))
        .map_err(|e| format!("experiment run: {e}"))?;
    Ok("scale, noise, augment, features, forest and full run identical across two executions".into())
}

fn synthetic_assembly(data: &ExperimentData) -> Result<String, String> {
    check_counts(data).map(|d| format!("{d} (synthetic libraries with published raw label counts)"))
}

fn check_counts(data: &ExperimentData) -> Result<String, String> {
    ensure(data.train.len() == TRAIN_TOTAL && data.test.len() == TEST_TOTAL, || {
        format!("train {} / test {}", data.train.len(), data.test.len())
    })?;
    let train = data.train.counts();
    let test = data.test.counts();
    for &(name, slopp, sloppe, mendeley) in COUNT_TABLE {
        let t: PolymerType = name.parse().map_err(err)?;
        let from = |src: Source| data.train.samples(t).iter().filter(|s| s.source == src).count();
        let cells = (from(Source::Slopp), test.get(&t).copied().unwrap_or(0), from(Source::Mendeley));
        ensure(cells == (slopp, sloppe, mendeley), || format!("{name}: got {cells:?}, expected {:?}", (slopp, sloppe, mendeley)))?;
        ensure(train.get(&t).copied().unwrap_or(0) == slopp + mendeley, || format!("{name}: train total"))?;
    }
    Ok(format!("{TRAIN_TOTAL} train / {TEST_TOTAL} test, {} cells exact", 3 * COUNT_TABLE.len()))
}

fn pct(x: f64) -> f64 {
    100.0 * x
}

struct Reproduction {
    data_cfg: DataConfig,
    data: ExperimentData,
}

impl Reproduction {
    fn run(&self, name: &str) -> Result<ExperimentOutcome, String> {
        let cfg: ExperimentConfig =
            preset(name, self.data_cfg.clone(), ENSEMBLE_BASE_SEED, ENSEMBLE_SEEDS).map_err(err)?;
        let started = Instant::now();
        let out = run_experiment(&cfg, &self.data).map_err(err)?;
        eprintln!("  {name}: {:.1}s", started.elapsed().as_secs_f64());
        Ok(out)
    }
}

fn point_mean(out: &ExperimentOutcome, key: &str) -> Result<f64, String> {
    out.point(key).map(|p| pct(p.mean_accuracy)).ok_or_else(|| format!("no point `{key}`"))
}

fn reproduction(suite: &mut Suite, data_dir: Option<PathBuf>) {
    let criteria = [
        ("D1", "dataset assembly matches the published counts"),
        ("D2", "ablation ordering and scaling+ROC accuracy"),
        ("D3", "unaugmented bin sweep best accuracy and width"),
        ("D4", "augmented entropy bin sweep best accuracy"),
        ("D5", "gini below entropy at width 12"),
        ("D6", "final recipe accuracy"),
        ("D7", "noise sweep spread"),
        ("D8", "decision tree and knn below the forest"),
    ];
    let Some(root) = data_dir else {
        for (id, name) in criteria {
            suite.skip(id, name, "RAMAN_DATA_DIR not set; public libraries unavailable");
        }
        return;
    };
    let data_cfg = DataConfig {
        slopp: root.join("slopp"),
        sloppe: root.join("sloppe"),
        mendeley: root.join("mendeley"),
        synonyms: BTreeMap::new(),
    };
    let data = match ExperimentData::load(&data_cfg) {
        Ok((d, _)) => d,
        Err(e) => {
            for (id, name) in criteria {
                suite.record(id, name, Err(format!("cannot load {}: {e}", root.display())));
            }
            return;
        }
    };
    suite.record("D1", criteria[0].1, check_counts(&data));
    let r = Reproduction { data_cfg, data };

    suite.record("D2", criteria[1].1, (|| {
        let out = r.run("ablation")?;
        let m: Vec<f64> = ["exp1", "exp2", "exp3", "exp4"].iter().map(|k| point_mean(&out, k)).collect::<Result<_, _>>()?;
        let detail = format!("means {:.2} / {:.2} / {:.2} / {:.2}", m[0], m[1], m[2], m[3]);
        ensure(m[0] > m[2] && m[2] > m[1] && m[1] > m[3], || format!("ordering violated: {detail}"))?;
        ensure((m[0] - ABLATION_EXP1_TARGET).abs() <= ABLATION_TOL, || {
            format!("exp1 {:.2} not within {ABLATION_TOL} of {ABLATION_EXP1_TARGET}; {detail}", m[0])
        })?;
        Ok(detail)
    })());

    suite.record("D3", criteria[2].1, (|| {
        let out = r.run("bins-unaugmented")?;
        let best = out.best().ok_or("empty sweep")?;
        let width: usize = best.key.parse().map_err(err)?;
        let acc = pct(best.mean_accuracy);
        let detail = format!("best {acc:.2} at width {width}");
        ensure((acc - UNAUGMENTED_SWEEP_TARGET).abs() <= UNAUGMENTED_SWEEP_TOL, || {
            format!("{detail}, target {UNAUGMENTED_SWEEP_TARGET} ± {UNAUGMENTED_SWEEP_TOL}")
        })?;
        ensure(UNAUGMENTED_BEST_WIDTHS.contains(&width), || format!("{detail}, width outside {UNAUGMENTED_BEST_WIDTHS:?}"))?;
        Ok(detail)
    })());

    let entropy = r.run("bins-augmented-entropy");
    suite.record("D4", criteria[3].1, (|| {
        let out = entropy.as_ref().map_err(Clone::clone)?;
        let best = out.best().ok_or("empty sweep")?;
        let acc = pct(best.mean_accuracy);
        let detail = format!("best {acc:.2} at width {}", best.key);
        ensure((acc - AUGMENTED_SWEEP_TARGET).abs() <= AUGMENTED_SWEEP_TOL, || {
            format!("{detail}, target {AUGMENTED_SWEEP_TARGET} ± {AUGMENTED_SWEEP_TOL}")
        })?;
        Ok(detail)
    })());

    suite.record("D5", criteria[4].1, (|| {
        let e = point_mean(entropy.as_ref().map_err(Clone::clone)?, &GINI_COMPARISON_WIDTH.to_string())?;
        let g = point_mean(&r.run("bins-augmented-gini")?, &GINI_COMPARISON_WIDTH.to_string())?;
        let detail = format!("gini {g:.2} vs entropy {e:.2}");
        ensure(g < e, || detail.clone())?;
        Ok(detail)
    })());

    let final_run = r.run("final");
    suite.record("D6", criteria[5].1, (|| {
        let out = final_run.as_ref().map_err(Clone::clone)?;
        let acc = point_mean(out, "final")?;
        let detail = format!("mean {acc:.2} over {ENSEMBLE_SEEDS} seeds");
        ensure((acc - FINAL_TARGET).abs() <= FINAL_TOL, || format!("{detail}, target {FINAL_TARGET} ± {FINAL_TOL}"))?;
        Ok(detail)
    })());

    suite.record("D7", criteria[6].1, (|| {
        let out = r.run("noise")?;
        let means: Vec<f64> = out.points.iter().map(|p| pct(p.mean_accuracy)).collect();
        let spread = means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - means.iter().copied().fold(f64::INFINITY, f64::min);
        let detail = format!("spread {spread:.2} points over {} amplitudes", means.len());
        ensure(spread <= NOISE_MAX_SPREAD, || format!("{detail}, limit {NOISE_MAX_SPREAD}"))?;
        Ok(detail)
    })());

    suite.record("D8", criteria[7].1, (|| {
        let out = r.run("model-comparison")?;
        let rf = point_mean(&out, "random-forest")?;
        let dt = point_mean(&out, "decision-tree")?;
        let knn = point_mean(&out, "knn")?;
        let detail = format!("forest {rf:.2}, tree {dt:.2}, knn {knn:.2}");
        ensure(rf - dt >= BASELINE_MIN_GAP && rf - knn >= BASELINE_MIN_GAP, || {
            format!("{detail}, required gap {BASELINE_MIN_GAP}")
        })?;
        Ok(detail)
    })());
}

fn main() {
    let started = Instant::now();
    let mut suite = Suite::default();

    suite.record("P1", "scale_x hand traces", scaling_traces());
    suite.record("P2", "shift / ROC / PC / bin-mean invariants", algebraic_invariants());
    suite.record("P3", "augmentation identity at random_change 0", augmentation_identity());
    suite.record("P4", "augmentation clamp envelope", augmentation_envelope());
    suite.record("P5", "augmentation class-count postcondition", augmentation_counts());
    suite.record("P6", "entropy / gini boundary values", impurity_boundaries());
    suite.record("P7", "knn against brute-force oracle", knn_matches_oracle());
    suite.record("P8", "single tree fits distinct rows", tree_fits_distinct_rows());

    let tmp = tempfile::tempdir().expect("temporary directory");
    match synthetic_data(tmp.path()) {
        Ok((_, data)) => {
            suite.record("P9", "assembly counting on synthetic libraries", synthetic_assembly(&data));
            suite.record("P10", "determinism by double execution", determinism(&data));
        }
        Err(e) => {
            suite.record("P9", "assembly counting on synthetic libraries", Err(e.clone()));
            suite.record("P10", "determinism by double execution", Err(e));
        }
    }

    reproduction(&mut suite, std::env::var_os("RAMAN_DATA_DIR").map(PathBuf::from));

    println!(
        "acceptance: {} passed, {} failed, {} skipped in {:.1}s",
        suite.passed,
        suite.failed,
        suite.skipped,
        started.elapsed().as_secs_f64()
    );
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
