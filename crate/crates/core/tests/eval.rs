mod common;

use std::time::Duration;

use common::*;
use proptest::prelude::*;
use rumix::data::{ColumnData, RawColumn};
use rumix::discretize::discretize_table;
use rumix::eval::{
    accuracy, evaluate_split, fit_partition, make_folds, make_stratified_folds, BenchRow, BenchTable, EvalReport,
};
use rumix::{model, LearnerConfig, Mode, RawTable};

#[test]
fn fold_examples() {
    let plan = make_folds(10, 3, 1).unwrap();
    assert_eq!(plan.fold_sizes(), vec![4, 3, 3]);
    assert_eq!(plan, make_folds(10, 3, 1).unwrap());
    assert_ne!(plan.assignments, make_folds(10, 3, 2).unwrap().assignments);
    assert_eq!(make_folds(5, 5, 9).unwrap().fold_sizes(), vec![1; 5]);
    assert!(make_folds(3, 4, 1).is_err());
    assert!(make_folds(10, 1, 1).is_err());
}

proptest! {
    #![proptest_config(cases(500))]

    #[test]
    fn folds_partition_evenly(labels in prop::collection::vec(0u32..4, 2..200), k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(labels.len() >= k);
        for plan in [make_folds(labels.len(), k, seed).unwrap(), make_stratified_folds(&labels, k, seed).unwrap()] {
            let sizes = plan.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let mut all: Vec<usize> = (0..k).flat_map(|f| plan.test_rows(f)).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for f in 0..k {
                prop_assert_eq!(plan.train_rows(f).len() + plan.test_rows(f).len(), labels.len());
            }
        }
        // each class lands in every fold as evenly as possible
        let plan = make_stratified_folds(&labels, k, seed).unwrap();
        for c in 0..4 {
            let mut per_fold = vec![0usize; k];
            for (i, &l) in labels.iter().enumerate() {
                if l == c {
                    per_fold[plan.assignments[i]] += 1;
                }
            }
            prop_assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn accuracy_is_confusion_trace(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..300)) {
        let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
        let mut confusion = [[0usize; 4]; 4];
        for (&p, &t) in pred.iter().zip(&truth) {
            confusion[t][p] += 1;
        }
        let trace: usize = (0..4).map(|c| confusion[c][c]).sum();
        let total: usize = confusion.iter().flatten().sum();
        prop_assert!((accuracy(&pred, &truth).unwrap() - trace as f64 / total as f64).abs() < 1e-15);
    }

    #[test]
    fn average_row_is_column_mean(
        cells in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0, any::<bool>(), prop::option::of(0.0f64..100.0)), 1..12)
    ) {
        let rows: Vec<BenchRow> = cells
            .iter()
            .enumerate()
            .map(|(i, &(a, b, fail, p))| BenchRow {
                dataset: format!("d{i}"),
                cells: vec![Ok(report(a)), if fail { Err("boom".into()) } else { Ok(report(b)) }],
                published: vec![p],
            })
            .collect();
        let table = BenchTable { modes: vec![Mode::Rumc, Mode::Racer], published_columns: vec!["RUMC".into()], rows };
        let ok: Vec<_> = cells.iter().filter(|c| !c.2).collect();
        let (n, computed, published) = table.averages();
        prop_assert_eq!(n, ok.len());
        if !ok.is_empty() {
            let mean_a = ok.iter().map(|c| c.0).sum::<f64>() / ok.len() as f64;
            let mean_b = ok.iter().map(|c| c.1).sum::<f64>() / ok.len() as f64;
            prop_assert!((computed[0] - mean_a).abs() < 1e-9 && (computed[1] - mean_b).abs() < 1e-9);
            if ok.iter().all(|c| c.3.is_some()) {
                let mean_p = ok.iter().map(|c| c.3.unwrap()).sum::<f64>() / ok.len() as f64;
                prop_assert!((published[0].unwrap() - mean_p).abs() < 1e-9);
            } else {
                prop_assert!(published[0].is_none());
            }
        }
        let csv = table.to_csv().unwrap();
        let last = csv.lines().last().unwrap();
        let label = format!("AVERAGE ({} of {} datasets)", ok.len(), cells.len());
        prop_assert!(last.starts_with(&label));
    }
}

fn report(mean: f64) -> EvalReport {
    EvalReport {
        dataset: String::new(),
        mode: Mode::Rumc,
        k: 10,
        seed: 1,
        stratified: true,
        folds: Vec::new(),
        mean_accuracy: mean,
        min_rules: 0,
        max_rules: 0,
        mean_rules: 0.0,
        wall_time: Duration::ZERO,
    }
}

/// Two categorical columns, one numeric; row 7 carries a colour and a
/// number seen nowhere else.
fn canary() -> RawTable {
    let colours = ["red", "blue", "red", "blue", "red", "blue", "red", "violet"];
    let sizes = [1.0, 2.0, 1.5, 2.5, 1.2, 2.2, 1.1, 1.3];
    let classes = vec![0, 1, 0, 1, 0, 1, 0, 1];
    let levels: Vec<String> = ["red", "blue", "violet"].map(String::from).to_vec();
    RawTable::new(
        "canary",
        vec![
            RawColumn {
                name: "colour".into(),
                data: ColumnData::Categorical {
                    codes: colours.iter().map(|c| levels.iter().position(|l| l == c).map(|i| i as u32)).collect(),
                    levels,
                },
            },
            RawColumn { name: "size".into(), data: ColumnData::Numeric(sizes.map(Some).to_vec()) },
        ],
        "class",
        vec!["small".into(), "large".into()],
        classes,
    )
    .unwrap()
}

#[test]
fn unseen_test_category_takes_the_zero_segment_path() {
    let t = canary();
    let train: Vec<usize> = (0..7).collect();
    let cfg = LearnerConfig::default();
    let (result, matched) = evaluate_split(&t, &train, &[7], &cfg).unwrap();
    assert_eq!(result.n_test, 1);
    let clf = fit_partition(&t, &train, &cfg).unwrap();
    assert!(!clf.schema.features[0].domain.iter().any(|d| d == "violet"));
    let bits = clf.schema.encoder_for(&t).unwrap().encode_features(&t, 7, false).unwrap();
    let seg = &clf.schema.features[0];
    assert_eq!(bits.count_ones_in(seg.bit_offset, seg.width), 0);
    // only rules accepting every colour could still fire
    match matched[0] {
        None => assert_eq!(clf.predict_bits(&bits).class_index, clf.default_class),
        Some(i) => assert_eq!(clf.rules[i].bits.count_ones_in(seg.bit_offset, seg.width), seg.width),
    }
    assert!(clf.schema.encoder_for(&t).unwrap().encode_features(&t, 7, true).is_err());
}

#[test]
fn cuts_ignore_rows_outside_training() {
    let t = canary();
    let train: Vec<usize> = (0..7).collect();
    let train_only = t.subset(&train);
    let cfg = LearnerConfig::default();
    let with_test = fit_partition(&t, &train, &cfg).unwrap();
    let without = fit_partition(&train_only, &(0..7).collect::<Vec<_>>(), &cfg).unwrap();
    assert_eq!(with_test.cuts, discretize_table(&train_only));
    assert_eq!(model::to_json(&with_test).unwrap(), model::to_json(&without).unwrap());
    // row 7 would move the cut if it leaked in
    assert_ne!(discretize_table(&t), with_test.cuts);
}
