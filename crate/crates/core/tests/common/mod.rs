#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::Config;
use rumix::data::{build_schema, ColumnData, RawColumn};
use rumix::{BitVec, Dataset, DatasetSchema, RawTable, Rule, WeightProfile};

/// Categorical table description: per-feature level counts, per-row level
/// codes, per-row class codes.
#[derive(Debug, Clone)]
pub struct TableShape {
    pub levels: Vec<usize>,
    pub rows: Vec<Vec<u32>>,
    pub classes: Vec<u32>,
    pub n_classes: usize,
}

/// Up to `max_rows` rows over at most 4 features of at most 3 values each.
pub fn small_table(max_rows: usize) -> impl Strategy<Value = TableShape> {
    (prop::collection::vec(1usize..=3, 1..=4), 2usize..=3, 1..=max_rows).prop_flat_map(|(levels, m, n)| {
        let row = levels.iter().map(|&l| 0..l as u32).collect::<Vec<_>>();
        (prop::collection::vec(row, n), prop::collection::vec(0..m as u32, n))
            .prop_map(move |(rows, classes)| TableShape { levels: levels.clone(), rows, classes, n_classes: m })
    })
}

pub fn table(shape: &TableShape) -> RawTable {
    let features = shape
        .levels
        .iter()
        .enumerate()
        .map(|(f, &l)| RawColumn {
            name: format!("f{f}"),
            data: ColumnData::Categorical {
                levels: (0..l).map(|v| format!("v{v}")).collect(),
                codes: shape.rows.iter().map(|r| Some(r[f])).collect(),
            },
        })
        .collect();
    RawTable::new(
        "random",
        features,
        "class",
        (0..shape.n_classes).map(|c| format!("c{c}")).collect(),
        shape.classes.clone(),
    )
    .unwrap()
}

pub fn dataset(shape: &TableShape) -> Dataset {
    let t = table(shape);
    let schema = build_schema(&t, &[]).unwrap();
    Dataset::encode(&t, schema).unwrap()
}

/// Feature-by-feature coverage check, independent of the library's.
pub fn naive_covers(rule: &BitVec, instance: &BitVec, schema: &DatasetSchema) -> bool {
    schema.features.iter().all(|f| (f.bit_offset..f.bit_offset + f.width).any(|b| rule.get(b) && instance.get(b)))
}

/// Fitness by a per-instance count.
pub fn naive_fitness(bits: &BitVec, class: usize, data: &Dataset, p: &WeightProfile) -> f64 {
    let mut covers = 0usize;
    let mut correct = 0usize;
    for inst in &data.instances {
        if naive_covers(bits, &inst.bits, &data.schema) {
            covers += 1;
            if inst.class_index == class {
                correct += 1;
            }
        }
    }
    if covers == 0 {
        return 0.0;
    }
    p.alpha * (correct as f64 / covers as f64) + p.beta * (covers as f64 / data.len() as f64)
}

/// Greedy replay: try each zero feature bit from the lowest index up and
/// keep it when fitness strictly rises.
pub fn replay_greedy(rule: &Rule, data: &Dataset, p: &WeightProfile) -> Rule {
    let mut bits = rule.bits.clone();
    let mut fit = naive_fitness(&bits, rule.class_index, data, p);
    for b in 0..data.schema.class_offset() {
        if bits.get(b) {
            continue;
        }
        let mut trial = bits.clone();
        trial.set(b);
        let tf = naive_fitness(&trial, rule.class_index, data, p);
        if tf > fit {
            bits = trial;
            fit = tf;
        }
    }
    Rule { bits, class_index: rule.class_index, fitness: Some(fit), seq: rule.seq }
}

/// A random same-width feature pattern with the class bit of `class`.
pub fn rule_with(schema: &DatasetSchema, feature_bits: &[bool], class: usize, seq: u64) -> Rule {
    let mut bits = BitVec::zeros(schema.total_width);
    for (b, &on) in feature_bits.iter().enumerate().take(schema.class_offset()) {
        if on {
            bits.set(b);
        }
    }
    bits.set(schema.class_offset() + class);
    Rule { bits, class_index: class, fitness: None, seq }
}

pub fn cases(n: u32) -> Config {
    Config { cases: n, failure_persistence: None, ..Config::default() }
}

fn entropy_bits(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln() / std::f64::consts::LN_2
        })
        .sum()
}

pub fn split_info(values: &[f64], labels: &[usize], cut: f64) -> f64 {
    let m = labels.iter().max().unwrap() + 1;
    let (mut l, mut r) = (vec![0; m], vec![0; m]);
    for (&v, &c) in values.iter().zip(labels) {
        if v <= cut {
            l[c] += 1
        } else {
            r[c] += 1
        }
    }
    let (nl, nr) = (l.iter().sum::<usize>() as f64, r.iter().sum::<usize>() as f64);
    let n = nl + nr;
    let mut h = 0.0;
    if nl > 0.0 {
        h += nl / n * entropy_bits(&l);
    }
    if nr > 0.0 {
        h += nr / n * entropy_bits(&r);
    }
    h
}

/// Every midpoint of adjacent distinct values, scored from scratch; the
/// smallest one within 1e-9 of the minimum wins.
pub fn exhaustive_split(values: &[f64], labels: &[usize]) -> Option<(f64, f64)> {
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let scored: Vec<(f64, f64)> =
        distinct.windows(2).map(|w| (w[0] + w[1]) / 2.0).map(|m| (m, split_info(values, labels, m))).collect();
    let min = scored.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    scored.into_iter().find(|s| s.1 <= min + 1e-9)
}

/// Values on a coarse grid so that ties and repeats are common.
pub fn split_points() -> impl Strategy<Value = Vec<(u8, usize)>> {
    prop::collection::vec((0u8..8, 0usize..3), 1..=30)
}

pub fn check_best_split(pts: &[(u8, usize)]) -> Result<(), String> {
    let values: Vec<f64> = pts.iter().map(|p| p.0 as f64 * 0.5).collect();
    let labels: Vec<usize> = pts.iter().map(|p| p.1).collect();
    let got = rumix::discretize::best_split(&values, &labels);
    match (exhaustive_split(&values, &labels), got) {
        (None, None) => Ok(()),
        (Some((cut, info)), Some(g)) if g.cut_value == cut && (g.info - info).abs() < 1e-9 => Ok(()),
        (want, got) => Err(format!("best_split {got:?}, exhaustive scan {want:?} on {pts:?}")),
    }
}

/// Mutation and generalization against [`replay_greedy`], from the initial
/// rules and from a mix of initial and already general rules.
pub fn check_flip_replay(shape: &TableShape) -> Result<(), String> {
    use rumix::learner::{generalize, initial_rules, mutate_rules};
    let data = dataset(shape);
    let p = WeightProfile::main();
    let initial = initial_rules(&data, &p);
    let mutated = mutate_rules(initial.clone(), &data, &p);
    if mutated.len() != initial.len() {
        return Err("mutation changed the rule count".into());
    }
    for (got, start) in mutated.iter().zip(&initial) {
        let want = replay_greedy(start, &data, &p);
        if got.bits != want.bits || got.seq != want.seq || (got.fitness.unwrap() - want.fitness.unwrap()).abs() > 1e-12
        {
            return Err(format!("mutation gave {got:?}, replay {want:?}"));
        }
    }
    let mixed: Vec<Rule> =
        mutated.iter().enumerate().map(|(i, r)| if i % 2 == 0 { initial[i].clone() } else { r.clone() }).collect();
    for (got, start) in generalize(mixed.clone(), &data, &p).iter().zip(&mixed) {
        let want = replay_greedy(start, &data, &p);
        if got.bits != want.bits {
            return Err(format!("generalization gave {got:?}, replay {want:?}"));
        }
    }
    Ok(())
}

/// Library fitness (scan and bitmap paths) against a per-instance recount.
pub fn check_fitness(shape: &TableShape, pattern: &[bool], gamma: f64) -> Result<(), String> {
    let data = dataset(shape);
    let class = shape.classes[0] as usize % data.schema.n_classes();
    let rule = rule_with(&data.schema, pattern, class, 0);
    for p in [WeightProfile::main(), WeightProfile::composition(gamma).unwrap()] {
        let got = rumix::fitness::evaluate(&rule, &data, &p).unwrap().fitness;
        let want = naive_fitness(&rule.bits, class, &data, &p);
        if (got - want).abs() > 1e-12 {
            return Err(format!("fitness {got}, recount {want}"));
        }
    }
    for r in rumix::learner::initial_rules(&data, &WeightProfile::main()) {
        let want = naive_fitness(&r.bits, r.class_index, &data, &WeightProfile::main());
        if (r.fitness.unwrap() - want).abs() > 1e-12 {
            return Err(format!("initial rule {} fitness {:?}, recount {want}", r.seq, r.fitness));
        }
    }
    Ok(())
}

pub fn bits_of(pattern: &[bool]) -> BitVec {
    let mut b = BitVec::zeros(pattern.len());
    for (i, &on) in pattern.iter().enumerate() {
        if on {
            b.set(i);
        }
    }
    b
}

pub fn check_or_algebra(a: &[bool], b: &[bool], c: &[bool]) -> Result<(), String> {
    use rumix::rule::{compose, subsumes};
    let rule = |p: &[bool]| Rule { bits: bits_of(p), class_index: 0, fitness: None, seq: 0 };
    let (a, b, c) = (rule(a), rule(b), rule(c));
    let or = |x: &Rule, y: &Rule| compose(x, y, 0).unwrap();
    if or(&a, &a).bits != a.bits {
        return Err("compose is not idempotent".into());
    }
    if or(&a, &b).bits != or(&b, &a).bits {
        return Err("compose is not commutative".into());
    }
    let left = or(&or(&a, &b), &c);
    if left.bits != or(&a, &or(&b, &c)).bits {
        return Err("compose is not associative".into());
    }
    if !(subsumes(&left, &a) && subsumes(&left, &b) && subsumes(&left, &c)) {
        return Err("composition does not subsume its parts".into());
    }
    Ok(())
}

/// Replays a fit's composition log: each composed rule is the OR of its
/// parents and strictly beats both under the composition profile, and every
/// rule removed along the way sits under a surviving rule of its class.
pub fn check_composition_log(data: &Dataset, cfg: &rumix::LearnerConfig) -> Result<usize, String> {
    use rumix::rule::subsumes;
    let (clf, log) = rumix::learner::fit_audited(data, cfg).map_err(|e| e.to_string())?;
    let cp = &cfg.composition_profile;
    for ev in &log.compositions {
        let [p, q] = &ev.parents;
        if p.class_index != q.class_index || ev.composed.bits != p.bits.or(&q.bits) {
            return Err(format!("composed rule {} is not the OR of its parents", ev.composed.seq));
        }
        if !(ev.composed_fitness > ev.parent_fitness[0] && ev.composed_fitness > ev.parent_fitness[1]) {
            return Err(format!("composed rule {} does not beat both parents", ev.composed.seq));
        }
        let recount = [
            (ev.composed_fitness, &ev.composed.bits),
            (ev.parent_fitness[0], &p.bits),
            (ev.parent_fitness[1], &q.bits),
        ];
        for (f, bits) in recount {
            if (f - naive_fitness(bits, p.class_index, data, cp)).abs() > 1e-12 {
                return Err(format!("logged fitness {f} disagrees with a recount"));
            }
        }
        if let Some(s) = ev.subsumed.iter().find(|s| !subsumes(&ev.composed, s)) {
            return Err(format!("rule {} dropped without being subsumed", s.seq));
        }
    }
    if let Some(r) = log.removed_rules().find(|r| !clf.rules.iter().any(|s| subsumes(s, r))) {
        return Err(format!("removed rule {} has no subsuming survivor", r.seq));
    }
    if log.composition_passes.iter().any(|&p| p == 0 || p > cfg.max_composition_passes) {
        return Err(format!("pass counts {:?} out of range", log.composition_passes));
    }
    Ok(log.compositions.len())
}
