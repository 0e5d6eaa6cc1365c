//! k-fold cross-validation and benchmark tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{build_schema, load_path, Dataset, LoadOptions, RawTable};
use crate::discretize::discretize_table;
use crate::error::{Error, Result};
use crate::learner::{fit, Classifier, LearnerConfig, Mode};
use crate::scalar::Scalar;

/// Fold index of every instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if n < k {
        return Err(Error::Config(format!("{n} instances cannot fill {k} folds")));
    }
    Ok(())
}

/// Shuffle `0..n` with `seed` and cut it into `k` contiguous chunks; the
/// first `n % k` chunks take one extra instance.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    check_k(n, k)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut assignments = vec![0; n];
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &i in &order[pos..pos + size] {
            assignments[i] = fold;
        }
        pos += size;
    }
    Ok(FoldPlan { k, seed, stratified: false, assignments })
}

/// Seeded shuffle, stable sort by class, then deal instances to folds in
/// turn. Each class is spread as evenly as possible and fold sizes still
/// differ by at most one.
pub fn make_stratified_folds(labels: &[u32], k: usize, seed: u64) -> Result<FoldPlan> {
    check_k(labels.len(), k)?;
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.sort_by_key(|&i| labels[i]);
    let mut assignments = vec![0; labels.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { k, seed, stratified: true, assignments })
}

/// Fraction of positions where `predictions` equals `truths`.
pub fn accuracy<T: PartialEq>(predictions: &[T], truths: &[T]) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(Error::Config(format!("{} predictions for {} truths", predictions.len(), truths.len())));
    }
    if predictions.is_empty() {
        return Err(Error::Empty("accuracy of zero predictions".into()));
    }
    let correct = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / predictions.len() as f64)
}

#[derive(Debug, Clone)]
pub struct CvConfig<S> {
    pub learner: LearnerConfig<S>,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl<S: Scalar> Default for CvConfig<S> {
    fn default() -> Self {
        CvConfig { learner: LearnerConfig::default(), k: 10, seed: 1, stratified: true }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub n_correct: usize,
    pub accuracy: f64,
    pub n_rules: usize,
    /// Test rows that no rule covered.
    pub n_default: usize,
    pub n_cuts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub mode: Mode,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub folds: Vec<FoldResult>,
    /// Mean fold accuracy in percent.
    pub mean_accuracy: f64,
    pub min_rules: usize,
    pub max_rules: usize,
    pub mean_rules: f64,
    #[serde(serialize_with = "secs")]
    pub wall_time: Duration,
}

fn secs<Ser: serde::Serializer>(d: &Duration, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl EvalReport {
    /// Mean accuracy as printed in tables, e.g. `71.34`.
    pub fn mean_percent(&self) -> String {
        format!("{:.2}", self.mean_accuracy)
    }
}

/// Classifier trained on `train_rows` alone: cuts, schema and rules never
/// see the other rows.
pub fn fit_partition<S: Scalar>(
    table: &RawTable<S>,
    train_rows: &[usize],
    config: &LearnerConfig<S>,
) -> Result<Classifier<S>> {
    let train = table.subset(train_rows);
    let cuts = discretize_table(&train);
    let schema = build_schema(&train, &cuts)?;
    if schema.n_classes() < table.class_levels.len() {
        let absent: Vec<&str> =
            table.class_levels.iter().map(String::as_str).filter(|l| schema.class_index(l).is_none()).collect();
        log::warn!("{}: training partition lacks classes {absent:?}", table.name);
    }
    let data = Dataset::encode(&train, schema)?;
    fit(&data, config)
}

/// One train/test split. Test rows are encoded leniently, so values unseen
/// in training fall back to the missing category or an all-zero segment.
pub fn evaluate_split<S: Scalar>(
    table: &RawTable<S>,
    train_rows: &[usize],
    test_rows: &[usize],
    config: &LearnerConfig<S>,
) -> Result<(FoldResult, Vec<Option<usize>>)> {
    let clf = fit_partition(table, train_rows, config)?;
    let test = table.subset(test_rows);
    let enc = clf.schema.encoder_for(&test)?;
    let mut matched = Vec::with_capacity(test.n_rows());
    let mut n_correct = 0;
    for row in 0..test.n_rows() {
        let bits = enc.encode_features(&test, row, false)?;
        let p = clf.predict_bits(&bits);
        if clf.class_label(p.class_index) == test.class_label(row) {
            n_correct += 1;
        }
        matched.push(p.rule);
    }
    let result = FoldResult {
        fold: 0,
        n_train: train_rows.len(),
        n_test: test.n_rows(),
        n_correct,
        accuracy: n_correct as f64 / test.n_rows().max(1) as f64,
        n_rules: clf.rules.len(),
        n_default: matched.iter().filter(|m| m.is_none()).count(),
        n_cuts: clf.cuts.len(),
    };
    Ok((result, matched))
}

pub fn plan_folds<S: Scalar>(table: &RawTable<S>, cv: &CvConfig<S>) -> Result<FoldPlan> {
    if cv.stratified {
        make_stratified_folds(&table.classes, cv.k, cv.seed)
    } else {
        make_folds(table.n_rows(), cv.k, cv.seed)
    }
}

/// k-fold cross-validation of one learner configuration. Folds run in
/// parallel; the report does not depend on scheduling.
pub fn cross_validate<S: Scalar>(table: &RawTable<S>, cv: &CvConfig<S>) -> Result<EvalReport> {
    let start = Instant::now();
    cv.learner.validate()?;
    let plan = plan_folds(table, cv)?;
    let folds: Vec<FoldResult> = (0..cv.k)
        .into_par_iter()
        .map(|f| {
            let (mut r, _) = evaluate_split(table, &plan.train_rows(f), &plan.test_rows(f), &cv.learner)?;
            r.fold = f;
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let mean_accuracy = 100.0 * folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    let rules: Vec<usize> = folds.iter().map(|f| f.n_rules).collect();
    Ok(EvalReport {
        dataset: table.name.clone(),
        mode: cv.learner.mode,
        k: cv.k,
        seed: cv.seed,
        stratified: cv.stratified,
        mean_accuracy,
        min_rules: rules.iter().copied().min().unwrap_or(0),
        max_rules: rules.iter().copied().max().unwrap_or(0),
        mean_rules: rules.iter().sum::<usize>() as f64 / rules.len() as f64,
        folds,
        wall_time: start.elapsed(),
    })
}

#[derive(Debug, Clone)]
pub struct BenchSource {
    pub name: String,
    pub path: PathBuf,
    pub options: LoadOptions,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub dataset: String,
    /// One cell per computed mode.
    pub cells: Vec<std::result::Result<EvalReport, String>>,
    /// One cell per published column.
    pub published: Vec<Option<f64>>,
}

/// Accuracy table: computed columns per mode, optionally followed by
/// published reference columns.
#[derive(Debug, Clone)]
pub struct BenchTable {
    pub modes: Vec<Mode>,
    pub published_columns: Vec<String>,
    pub rows: Vec<BenchRow>,
}

/// Published accuracies keyed by dataset, then column.
pub type PublishedTable = BTreeMap<String, BTreeMap<String, f64>>;

/// Cross-validate every dataset under every mode. Load or training failures
/// are recorded in the row and the run continues.
pub fn benchmark<S: Scalar>(datasets: &[BenchSource], modes: &[Mode], cv: &CvConfig<S>) -> Result<BenchTable> {
    if datasets.is_empty() {
        return Err(Error::Empty("benchmark needs at least one dataset".into()));
    }
    if modes.is_empty() {
        return Err(Error::Empty("benchmark needs at least one mode".into()));
    }
    let rows = datasets
        .par_iter()
        .map(|src| {
            let table = load_path::<S>(&src.path, &src.options);
            let cells = modes
                .iter()
                .map(|&mode| {
                    let table = table.as_ref().map_err(|e| e.to_string())?;
                    let cfg = CvConfig { learner: LearnerConfig { mode, ..cv.learner.clone() }, ..cv.clone() };
                    let report = cross_validate(table, &cfg).map_err(|e| e.to_string())?;
                    log::info!(
                        "{} {}: {} ({:.1}s)",
                        src.name,
                        mode,
                        report.mean_percent(),
                        report.wall_time.as_secs_f64()
                    );
                    Ok(report)
                })
                .collect();
            BenchRow { dataset: src.name.clone(), cells, published: Vec::new() }
        })
        .collect();
    Ok(BenchTable { modes: modes.to_vec(), published_columns: Vec::new(), rows })
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

impl BenchTable {
    pub fn attach_published(&mut self, columns: &[String], table: &PublishedTable) {
        self.published_columns = columns.to_vec();
        for row in &mut self.rows {
            let entry = table.get(&row.dataset);
            row.published = columns.iter().map(|c| entry.and_then(|e| e.get(c)).copied()).collect();
        }
    }

    pub fn n_succeeded(&self) -> usize {
        self.rows.iter().filter(|r| r.cells.iter().any(|c| c.is_ok())).count()
    }

    /// Column means over the datasets where every computed cell succeeded;
    /// the count of those datasets comes first.
    pub fn averages(&self) -> (usize, Vec<f64>, Vec<Option<f64>>) {
        let ok: Vec<&BenchRow> = self.rows.iter().filter(|r| r.cells.iter().all(|c| c.is_ok())).collect();
        let n = ok.len();
        let computed = (0..self.modes.len())
            .map(|m| {
                if n == 0 {
                    return f64::NAN;
                }
                ok.iter().map(|r| r.cells[m].as_ref().unwrap().mean_accuracy).sum::<f64>() / n as f64
            })
            .collect();
        let published = (0..self.published_columns.len())
            .map(|p| {
                let vals: Vec<f64> = ok.iter().filter_map(|r| r.published[p]).collect();
                (!vals.is_empty() && vals.len() == n).then(|| vals.iter().sum::<f64>() / n as f64)
            })
            .collect();
        (n, computed, published)
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["dataset".to_string()];
        h.extend(self.modes.iter().map(|m| m.to_string()));
        h.extend(self.published_columns.iter().map(|c| format!("published {c}")));
        h
    }

    fn body(&self, bold_best: bool) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for row in &self.rows {
            let best = row
                .cells
                .iter()
                .filter_map(|c| c.as_ref().ok().map(|r| fmt2(r.mean_accuracy)))
                .max_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
            let mut line = vec![row.dataset.clone()];
            for cell in &row.cells {
                line.push(match cell {
                    Ok(r) => {
                        let v = fmt2(r.mean_accuracy);
                        if bold_best && self.modes.len() > 1 && best.as_deref() == Some(v.as_str()) {
                            format!("**{v}**")
                        } else {
                            v
                        }
                    }
                    Err(_) => "FAILED".into(),
                });
            }
            line.extend(row.published.iter().map(|p| p.map(fmt2).unwrap_or_default()));
            out.push(line);
        }
        let (n, computed, published) = self.averages();
        let mut avg = vec![format!("AVERAGE ({n} of {} datasets)", self.rows.len())];
        avg.extend(computed.into_iter().map(|v| if v.is_nan() { String::new() } else { fmt2(v) }));
        avg.extend(published.into_iter().map(|p| p.map(fmt2).unwrap_or_default()));
        out.push(avg);
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.header())?;
        for line in self.body(false) {
            w.write_record(line)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Markdown table; the best computed accuracy of each row is bold and
    /// published columns are labelled as such.
    pub fn to_markdown(&self) -> String {
        let header = self.header();
        let mut s = String::new();
        let _ = writeln!(s, "| {} |", header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
        for line in self.body(true) {
            let _ = writeln!(s, "| {} |", line.join(" | "));
        }
        for row in &self.rows {
            for (m, cell) in self.modes.iter().zip(&row.cells) {
                if let Err(e) = cell {
                    let _ = writeln!(s, "\n{} ({m}) FAILED: {e}", row.dataset);
                }
            }
        }
        s
    }
}
