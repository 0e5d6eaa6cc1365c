//! Rule induction pipeline.
//!
//! rumc: initial rules -> mutation -> primary generalization -> composition
//! -> secondary generalization -> sort.
//!
//! racer: initial rules -> composition -> generalization -> sort.
//!
//! Every greedy decision requires a strict fitness improvement.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::data::{Dataset, DatasetSchema, EncodedInstance};
use crate::discretize::SplitCut;
use crate::error::{Error, Result};
use crate::fitness::{Counts, CoverIndex, WeightProfile};
use crate::rule::{covers_bits, render, Rule};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rumc,
    Racer,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "rumc" => Ok(Mode::Rumc),
            "racer" => Ok(Mode::Racer),
            _ => Err(Error::Config(format!("unknown mode {s:?} (expected rumc or racer)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rumc => "rumc",
            Mode::Racer => "racer",
        })
    }
}

/// How the mutation phase adopts flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MutationStrategy {
    /// Accept each improving flip as it is found, in ascending bit order.
    #[default]
    Sequential,
    /// Evaluate every single-bit copy of the original rule and adopt the
    /// best one if it improves.
    BestOfCopies,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct LearnerConfig<S> {
    pub mode: Mode,
    pub main_profile: WeightProfile<S>,
    /// Judges compositions. Defaults to the main profile.
    pub composition_profile: WeightProfile<S>,
    pub rng_seed: u64,
    pub max_composition_passes: usize,
    #[serde(default)]
    pub mutation_strategy: MutationStrategy,
}

impl<S: Scalar> Default for LearnerConfig<S> {
    fn default() -> Self {
        LearnerConfig {
            mode: Mode::Rumc,
            main_profile: WeightProfile::main(),
            composition_profile: WeightProfile::main(),
            rng_seed: 1,
            max_composition_passes: 10,
            mutation_strategy: MutationStrategy::Sequential,
        }
    }
}

impl<S: Scalar> LearnerConfig<S> {
    pub fn with_mode(mode: Mode) -> Self {
        LearnerConfig { mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        WeightProfile::new(self.main_profile.alpha, self.main_profile.beta)?;
        WeightProfile::new(self.composition_profile.alpha, self.composition_profile.beta)?;
        if self.max_composition_passes == 0 {
            return Err(Error::Config("max_composition_passes must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Mutation,
    PrimaryGeneralization,
    SecondaryGeneralization,
}

/// One accepted single-bit flip.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipEvent<S> {
    pub phase: Phase,
    pub seq: u64,
    pub bit: usize,
    pub before: S,
    pub after: S,
}

/// One accepted composition and the rules it displaced.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionEvent<S> {
    pub pass: usize,
    pub parents: [Rule<S>; 2],
    /// Composition-profile fitness of the parents and of the result.
    pub parent_fitness: [S; 2],
    pub composed: Rule<S>,
    pub composed_fitness: S,
    /// Same-class rules dropped because `composed` subsumes them.
    pub subsumed: Vec<Rule<S>>,
}

#[derive(Debug, Clone, Default)]
pub struct AuditLog<S> {
    pub initial_rules: usize,
    pub flips: Vec<FlipEvent<S>>,
    pub compositions: Vec<CompositionEvent<S>>,
    /// Composition passes run per class group, in class order.
    pub composition_passes: Vec<usize>,
}

impl<S: Scalar> AuditLog<S> {
    /// Every rule the composition phase removed.
    pub fn removed_rules(&self) -> impl Iterator<Item = &Rule<S>> {
        self.compositions.iter().flat_map(|e| e.parents.iter().chain(e.subsumed.iter()))
    }

    /// Every flip raised fitness, and within a phase each rule's flips chain
    /// (one flip starts where the previous one ended).
    pub fn check_monotone(&self) -> Result<()> {
        let mut last: std::collections::HashMap<(Phase, u64), S> = std::collections::HashMap::new();
        for e in &self.flips {
            if e.after.partial_cmp(&e.before) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Invariant(format!("flip of bit {} on rule {} did not raise fitness", e.bit, e.seq)));
            }
            if let Some(prev) = last.insert((e.phase, e.seq), e.after) {
                if prev != e.before {
                    return Err(Error::Invariant(format!(
                        "rule {} lost fitness between flips ({prev} then {})",
                        e.seq, e.before
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class_index: usize,
    /// Position in the rule list of the first covering rule.
    pub rule: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier<S> {
    /// Decision list: fitness descending, earlier seq first on ties.
    pub rules: Vec<Rule<S>>,
    pub default_class: usize,
    pub schema: DatasetSchema<S>,
    pub cuts: Vec<SplitCut<S>>,
    pub config: LearnerConfig<S>,
}

impl<S: Scalar> Classifier<S> {
    pub fn predict_bits(&self, instance: &BitVec) -> Prediction {
        match self.rules.iter().position(|r| covers_bits(&r.bits, instance, &self.schema)) {
            Some(i) => Prediction { class_index: self.rules[i].class_index, rule: Some(i) },
            None => Prediction { class_index: self.default_class, rule: None },
        }
    }

    pub fn predict(&self, instance: &EncodedInstance) -> usize {
        self.predict_bits(&instance.bits).class_index
    }

    pub fn class_label(&self, class_index: usize) -> &str {
        &self.schema.class_labels[class_index]
    }

    pub fn render_rules(&self) -> Vec<String> {
        self.rules.iter().map(|r| render(r, &self.schema)).collect()
    }

    /// Structural checks: decision-list ordering, well-formed rules,
    /// evaluated fitness and a valid default class.
    pub fn check_invariants(&self) -> Result<()> {
        if self.default_class >= self.schema.n_classes() {
            return Err(Error::Invariant(format!("default class {} out of range", self.default_class)));
        }
        for r in &self.rules {
            r.validate(&self.schema)?;
            if r.fitness.is_none() {
                return Err(Error::Invariant(format!("rule {} has no fitness", r.seq)));
            }
        }
        for w in self.rules.windows(2) {
            let (a, b) = (w[0].fitness.unwrap(), w[1].fitness.unwrap());
            if !(a > b || (a == b && w[0].seq < w[1].seq)) {
                return Err(Error::Invariant(format!(
                    "rules {} and {} are out of order ({a} vs {b})",
                    w[0].seq, w[1].seq
                )));
            }
        }
        Ok(())
    }
}

pub fn predict<S: Scalar>(classifier: &Classifier<S>, instance: &EncodedInstance) -> usize {
    classifier.predict(instance)
}

#[derive(Debug, Clone)]
struct Scored<S> {
    rule: Rule<S>,
    counts: Counts,
}

struct Ctx<'a, S> {
    idx: &'a CoverIndex,
    n: usize,
    schema: &'a DatasetSchema<S>,
}

impl<'a, S: Scalar> Ctx<'a, S> {
    fn score(&self, rules: Vec<Rule<S>>, profile: &WeightProfile<S>) -> Vec<Scored<S>> {
        rules
            .into_par_iter()
            .map(|mut rule| {
                let counts = self.idx.counts(&rule.bits, rule.class_index);
                rule.fitness = Some(profile.score(counts, self.n));
                Scored { rule, counts }
            })
            .collect()
    }
}

/// One rule per distinct encoded record, first occurrence first, each
/// evaluated with `profile`.
pub fn initial_rules<S: Scalar>(data: &Dataset<S>, profile: &WeightProfile<S>) -> Vec<Rule<S>> {
    let idx = CoverIndex::new(data);
    let ctx = Ctx { idx: &idx, n: data.len(), schema: &data.schema };
    unscore(ctx.score(distinct_records(data), profile))
}

fn distinct_records<S: Scalar>(data: &Dataset<S>) -> Vec<Rule<S>> {
    let mut seen = std::collections::HashSet::new();
    data.instances
        .iter()
        .enumerate()
        .filter(|(_, inst)| seen.insert(&inst.bits))
        .map(|(i, inst)| Rule::from_instance(inst, i as u64))
        .collect()
}

fn unscore<S>(v: Vec<Scored<S>>) -> Vec<Rule<S>> {
    v.into_iter().map(|s| s.rule).collect()
}

/// Sequential greedy flip scan over every rule: zero feature bits in
/// ascending order, each improving copy replacing the rule at once.
pub fn mutate_rules<S: Scalar>(rules: Vec<Rule<S>>, data: &Dataset<S>, profile: &WeightProfile<S>) -> Vec<Rule<S>> {
    generalize(rules, data, profile)
}

/// Same control flow as [`mutate_rules`].
pub fn generalize<S: Scalar>(rules: Vec<Rule<S>>, data: &Dataset<S>, profile: &WeightProfile<S>) -> Vec<Rule<S>> {
    let idx = CoverIndex::new(data);
    let ctx = Ctx { idx: &idx, n: data.len(), schema: &data.schema };
    let scored = ctx.score(rules, profile);
    unscore(flip_phase(&ctx, scored, profile, MutationStrategy::Sequential, Phase::PrimaryGeneralization, None))
}

fn flip_phase<S: Scalar>(
    ctx: &Ctx<'_, S>,
    rules: Vec<Scored<S>>,
    profile: &WeightProfile<S>,
    strategy: MutationStrategy,
    phase: Phase,
    audit: Option<&mut Vec<FlipEvent<S>>>,
) -> Vec<Scored<S>> {
    // rule scans are independent of each other, so they run in parallel
    // and are collected back in list order
    let out: Vec<(Scored<S>, Vec<FlipEvent<S>>)> = rules
        .into_par_iter()
        .map(|mut s| {
            let mut events = Vec::new();
            match strategy {
                MutationStrategy::Sequential => greedy_scan(ctx, &mut s, profile, phase, &mut events),
                MutationStrategy::BestOfCopies => best_copy(ctx, &mut s, profile, phase, &mut events),
            }
            s.rule.fitness = Some(profile.score(s.counts, ctx.n));
            (s, events)
        })
        .collect();
    let mut rules = Vec::with_capacity(out.len());
    match audit {
        Some(log) => {
            for (s, ev) in out {
                log.extend(ev);
                rules.push(s);
            }
        }
        None => rules.extend(out.into_iter().map(|(s, _)| s)),
    }
    rules
}

fn segment_unions<S: Scalar>(ctx: &Ctx<'_, S>, bits: &BitVec) -> Vec<BitVec> {
    (0..ctx.idx.n_segments()).map(|f| ctx.idx.segment_union(bits, f)).collect()
}

/// For each segment f, the intersection of every later segment's union.
fn suffix_ands(segs: &[BitVec], n: usize) -> Vec<BitVec> {
    let mut suffix = vec![BitVec::ones(n); segs.len() + 1];
    for f in (0..segs.len()).rev() {
        let mut s = suffix[f + 1].clone();
        s.and_assign(&segs[f]);
        suffix[f] = s;
    }
    suffix
}

fn greedy_scan<S: Scalar>(
    ctx: &Ctx<'_, S>,
    s: &mut Scored<S>,
    profile: &WeightProfile<S>,
    phase: Phase,
    events: &mut Vec<FlipEvent<S>>,
) {
    let n = ctx.n;
    let class = s.rule.class_index;
    let mut segs = segment_unions(ctx, &s.rule.bits);
    // later segments are untouched until the scan reaches them
    let suffix = suffix_ands(&segs, n);
    let mut prefix = BitVec::ones(n);
    let mut fit = profile.score(s.counts, n);
    for (f, seg) in segs.iter_mut().enumerate() {
        let (off, width) = ctx.idx.segment(f);
        if s.rule.bits.count_ones_in(off, width) < width {
            let mut others = prefix.clone();
            others.and_assign(&suffix[f + 1]);
            for b in off..off + width {
                if s.rule.bits.get(b) {
                    continue;
                }
                let c = ctx.idx.flip_counts(&others, seg, b, class);
                let nf = profile.score(c, n);
                if nf > fit {
                    events.push(FlipEvent { phase, seq: s.rule.seq, bit: b, before: fit, after: nf });
                    s.rule.bits.set(b);
                    seg.or_assign(ctx.idx.column(b));
                    s.counts = c;
                    fit = nf;
                }
            }
        }
        prefix.and_assign(seg);
    }
}

fn best_copy<S: Scalar>(
    ctx: &Ctx<'_, S>,
    s: &mut Scored<S>,
    profile: &WeightProfile<S>,
    phase: Phase,
    events: &mut Vec<FlipEvent<S>>,
) {
    let n = ctx.n;
    let class = s.rule.class_index;
    let segs = segment_unions(ctx, &s.rule.bits);
    let suffix = suffix_ands(&segs, n);
    let mut prefix = BitVec::ones(n);
    let fit = profile.score(s.counts, n);
    let mut best: Option<(usize, Counts, S)> = None;
    for (f, seg) in segs.iter().enumerate() {
        let (off, width) = ctx.idx.segment(f);
        let mut others = prefix.clone();
        others.and_assign(&suffix[f + 1]);
        for b in (off..off + width).filter(|&b| !s.rule.bits.get(b)) {
            let c = ctx.idx.flip_counts(&others, seg, b, class);
            let nf = profile.score(c, n);
            if nf > best.map_or(fit, |(_, _, bf)| bf) {
                best = Some((b, c, nf));
            }
        }
        prefix.and_assign(seg);
    }
    if let Some((b, c, nf)) = best {
        events.push(FlipEvent { phase, seq: s.rule.seq, bit: b, before: fit, after: nf });
        s.rule.bits.set(b);
        s.counts = c;
    }
}

/// Pairwise same-class composition with subsumption removal.
///
/// Rules are grouped by class and each group is shuffled once with an rng
/// seeded from `config.rng_seed`. Within a group, R_i and R_j (j > i) are
/// merged when the OR of the two has a composition-profile fitness strictly
/// above both parents; the merged rule takes R_i's place with a fresh seq,
/// R_j and every other rule it subsumes are dropped, and the scan resumes at
/// j = i + 1. Passes repeat until one changes nothing or
/// `max_composition_passes` is reached. Output fitness is main-profile.
pub fn compose_phase<S: Scalar>(rules: Vec<Rule<S>>, data: &Dataset<S>, config: &LearnerConfig<S>) -> Vec<Rule<S>> {
    let idx = CoverIndex::new(data);
    let ctx = Ctx { idx: &idx, n: data.len(), schema: &data.schema };
    let scored = ctx.score(rules, &config.main_profile);
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    unscore(compose_scored(&ctx, scored, config, &mut rng, None))
}

fn compose_scored<S: Scalar>(
    ctx: &Ctx<'_, S>,
    rules: Vec<Scored<S>>,
    config: &LearnerConfig<S>,
    rng: &mut ChaCha8Rng,
    mut audit: Option<&mut AuditLog<S>>,
) -> Vec<Scored<S>> {
    let m = ctx.schema.n_classes();
    let mut next_seq = rules.iter().map(|s| s.rule.seq + 1).max().unwrap_or(0);
    let mut groups: Vec<Vec<Scored<S>>> = vec![Vec::new(); m];
    for s in rules {
        groups[s.rule.class_index].push(s);
    }
    let mut out = Vec::new();
    for mut group in groups {
        group.shuffle(rng);
        let passes = compose_group(ctx, &mut group, config, &mut next_seq, audit.as_deref_mut());
        if let Some(log) = audit.as_deref_mut() {
            log.composition_passes.push(passes);
        }
        out.extend(group);
    }
    for s in &mut out {
        s.rule.fitness = Some(config.main_profile.score(s.counts, ctx.n));
    }
    out
}

/// Minimum number of candidate partners scored per parallel batch.
const COMPOSE_BATCH: usize = 64;

fn compose_group<S: Scalar>(
    ctx: &Ctx<'_, S>,
    group: &mut Vec<Scored<S>>,
    config: &LearnerConfig<S>,
    next_seq: &mut u64,
    mut audit: Option<&mut AuditLog<S>>,
) -> usize {
    let cp = &config.composition_profile;
    let n = ctx.n;
    let batch = COMPOSE_BATCH.max(4 * rayon::current_num_threads());
    let features = ctx.schema.class_offset();
    // segment unions of the current anchor rule, keyed by its seq
    let mut a_segs: Option<(u64, Vec<BitVec>)> = None;
    let mut passes = 0;
    while passes < config.max_composition_passes {
        passes += 1;
        let mut changed = false;
        // anchors whose scan found no partner since the last commit; an
        // identical later anchor sees a subset of the same partners
        let mut dead: HashSet<BitVec> = HashSet::new();
        let mut i = 0;
        while i < group.len() {
            if dead.contains(&group[i].rule.bits) {
                i += 1;
                continue;
            }
            // partners already scored for this anchor; copies share the verdict
            let mut seen: HashSet<BitVec> = HashSet::new();
            let mut j = i + 1;
            while j < group.len() {
                let mut cand = Vec::with_capacity(batch);
                while j < group.len() && cand.len() < batch {
                    if !seen.contains(&group[j].rule.bits) {
                        seen.insert(group[j].rule.bits.clone());
                        cand.push(j);
                    }
                    j += 1;
                }
                // candidates are scored speculatively in parallel; the first
                // accepted partner in scan order is committed
                let a = &group[i];
                let fa = cp.score(a.counts, n);
                if a_segs.as_ref().map(|(seq, _)| *seq) != Some(a.rule.seq) {
                    let segs = (0..ctx.idx.n_segments()).map(|f| ctx.idx.segment_union(&a.rule.bits, f)).collect();
                    a_segs = Some((a.rule.seq, segs));
                }
                let segs = &a_segs.as_ref().expect("just set").1;
                let hit = cand
                    .par_iter()
                    .map(|&k| {
                        let b = &group[k];
                        if a.rule.bits.is_subset_of(&b.rule.bits) || b.rule.bits.is_subset_of(&a.rule.bits) {
                            // the OR equals one parent and cannot beat it
                            return None;
                        }
                        let fb = cp.score(b.counts, n);
                        let extra: Vec<(usize, usize)> = b
                            .rule
                            .bits
                            .iter_ones()
                            .take_while(|&bit| bit < features)
                            .filter(|&bit| !a.rule.bits.get(bit))
                            .map(|bit| (ctx.idx.segment_of(bit), bit))
                            .collect();
                        let counts = ctx.idx.union_counts(segs, &extra, a.rule.class_index);
                        let fc = cp.score(counts, n);
                        (fc > fa && fc > fb).then(|| (k, a.rule.bits.or(&b.rule.bits), counts, fb, fc))
                    })
                    .find_first(|x| x.is_some())
                    .flatten();
                let Some((k, bits, counts, fb, fc)) = hit else {
                    continue;
                };
                let composed = Rule {
                    bits,
                    class_index: group[i].rule.class_index,
                    fitness: Some(config.main_profile.score(counts, n)),
                    seq: *next_seq,
                };
                *next_seq += 1;
                let parent_j = group.remove(k);
                let parent_i = std::mem::replace(&mut group[i], Scored { rule: composed.clone(), counts });
                let mut subsumed = Vec::new();
                let mut pos = 0;
                group.retain(|s| {
                    let keep = pos == i || !s.rule.bits.is_subset_of(&composed.bits);
                    if !keep {
                        subsumed.push(s.rule.clone());
                    }
                    pos += 1;
                    keep
                });
                i = group.iter().position(|s| s.rule.seq == composed.seq).expect("composed rule kept");
                if let Some(log) = audit.as_deref_mut() {
                    log.compositions.push(CompositionEvent {
                        pass: passes,
                        parents: [parent_i.rule, parent_j.rule],
                        parent_fitness: [fa, fb],
                        composed,
                        composed_fitness: fc,
                        subsumed,
                    });
                }
                changed = true;
                dead.clear();
                seen.clear();
                j = i + 1;
            }
            dead.insert(group[i].rule.bits.clone());
            i += 1;
        }
        if !changed {
            break;
        }
    }
    passes
}

/// Train a classifier on `data`.
pub fn fit<S: Scalar>(data: &Dataset<S>, config: &LearnerConfig<S>) -> Result<Classifier<S>> {
    run(data, config, None)
}

/// [`fit`] that also records every accepted flip and composition.
pub fn fit_audited<S: Scalar>(data: &Dataset<S>, config: &LearnerConfig<S>) -> Result<(Classifier<S>, AuditLog<S>)> {
    let mut log =
        AuditLog { initial_rules: 0, flips: Vec::new(), compositions: Vec::new(), composition_passes: Vec::new() };
    let clf = run(data, config, Some(&mut log))?;
    if cfg!(debug_assertions) {
        log.check_monotone()?;
    }
    Ok((clf, log))
}

fn run<S: Scalar>(
    data: &Dataset<S>,
    config: &LearnerConfig<S>,
    mut audit: Option<&mut AuditLog<S>>,
) -> Result<Classifier<S>> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("cannot fit on an empty dataset".into()));
    }
    let idx = CoverIndex::new(data);
    let ctx = Ctx { idx: &idx, n: data.len(), schema: &data.schema };
    let main = &config.main_profile;

    let mut rules = ctx.score(distinct_records(data), main);
    if let Some(log) = audit.as_deref_mut() {
        log.initial_rules = rules.len();
    }
    if config.mode == Mode::Rumc {
        let flips = audit.as_deref_mut().map(|l| &mut l.flips);
        rules = flip_phase(&ctx, rules, main, config.mutation_strategy, Phase::Mutation, flips);
        let flips = audit.as_deref_mut().map(|l| &mut l.flips);
        rules = flip_phase(&ctx, rules, main, MutationStrategy::Sequential, Phase::PrimaryGeneralization, flips);
    }

    let t = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rules = compose_scored(&ctx, rules, config, &mut rng, audit.as_deref_mut());

    log::debug!("composition: {:?}, {} rules", t.elapsed(), rules.len());
    let t = std::time::Instant::now();
    let flips = audit.map(|l| &mut l.flips);
    rules = flip_phase(&ctx, rules, main, MutationStrategy::Sequential, Phase::SecondaryGeneralization, flips);
    log::debug!("secondary generalization: {:?}", t.elapsed());

    let mut rules = unscore(rules);
    rules.sort_by(|a, b| b.fitness.partial_cmp(&a.fitness).expect("finite fitness").then(a.seq.cmp(&b.seq)));
    let clf = Classifier {
        rules,
        default_class: data.majority_class,
        schema: data.schema.clone(),
        cuts: data.schema.cuts(),
        config: config.clone(),
    };
    if cfg!(debug_assertions) {
        clf.check_invariants()?;
    }
    Ok(clf)
}
