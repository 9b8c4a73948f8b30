//! Discount-style given-clause saturation.
//!
//! Passive clauses wait in two queues (by age and by weight) and take no part
//! in simplification. Each activation selects literals of the given clause,
//! adds it to the active index and generates every inference with the active
//! set. Children are normalized, filtered by the retention tests and pushed
//! to the passive set.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use thiserror::Error;

use crate::calculus::{apply_detail, generate_all, InferenceContext, InferenceDetail, Rule};
use crate::clause::{
    is_tautology, literal_weight_sum, normalize_variables, variant_key, Atom, Clause, ClauseId,
    Literal,
};
use crate::index::TermIndexSet;
use crate::ordering::{KboParams, OrderingError};
use crate::selection::{select, ForcedSelection, SelectionContext, SelectionOutcome, StrategyId};
use crate::subst::Matcher;
use crate::term::TermBank;

/// How literals of a given clause are selected.
#[derive(Clone, Debug)]
pub enum SelectionPolicy {
    Strategy(StrategyId),
    /// Fixed table of selections; meant for tests.
    Forced(ForcedSelection),
}

/// Symbol precedence and weight overrides for the term ordering.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrderingOverrides {
    /// Symbol names from greatest to smallest.
    pub precedence: Vec<String>,
    pub weights: Vec<(String, u32)>,
    pub variable_weight: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct SaturationConfig {
    pub selection: SelectionPolicy,
    pub ordering: OrderingOverrides,
    pub polarity_flip: bool,
    pub post_unification_check: bool,
    /// Picks from the age queue and from the weight queue per cycle.
    pub age_weight_ratio: (u32, u32),
    pub time_limit: Option<Duration>,
    pub max_activations: Option<u64>,
    /// Bound on the number of clauses ever stored.
    pub max_clauses: Option<usize>,
    /// Compare each lookahead estimate with the children actually generated.
    pub check_estimates: bool,
    /// Keep every generated child (before retention) in the run record.
    pub record_children: bool,
}

impl SaturationConfig {
    pub fn new(strategy: StrategyId) -> Self {
        SaturationConfig {
            selection: SelectionPolicy::Strategy(strategy),
            ordering: OrderingOverrides::default(),
            polarity_flip: false,
            post_unification_check: false,
            age_weight_ratio: (1, 5),
            time_limit: Some(Duration::from_secs(10)),
            max_activations: None,
            max_clauses: None,
            check_estimates: false,
            record_children: false,
        }
    }

    pub fn forced(table: ForcedSelection) -> Self {
        SaturationConfig {
            selection: SelectionPolicy::Forced(table),
            ..Self::new(StrategyId::new(0).expect("strategy 0 exists"))
        }
    }

    /// Whether the strategy may violate the completeness condition.
    pub fn is_incomplete(&self) -> bool {
        match &self.selection {
            SelectionPolicy::Strategy(s) => s.is_incomplete(),
            SelectionPolicy::Forced(_) => true,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("age:weight ratio must have a positive component")]
    ZeroRatio,
    #[error("input clause set is empty")]
    EmptyInput,
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Position in the input clause list.
    Input(usize),
    Inferred {
        rule: Rule,
        premises: Vec<ClauseId>,
        detail: InferenceDetail,
    },
}

#[derive(Clone, Debug)]
pub struct ProofStep {
    pub id: ClauseId,
    pub literals: Vec<Literal>,
    pub origin: Origin,
}

/// Derivation of the empty clause; every premise precedes its conclusion.
#[derive(Clone, Debug)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {0} cites input {1}, which does not match")]
    InputMismatch(ClauseId, usize),
    #[error("step {0} cites premise {1} before it is derived")]
    MissingPremise(ClauseId, ClauseId),
    #[error("step {0} does not follow from its premises")]
    Mismatch(ClauseId),
    #[error("proof does not end in the empty clause")]
    NoEmptyClause,
}

/// Drops repeated literals, keeping first occurrences.
pub fn dedup_literals(lits: &[Literal]) -> Vec<Literal> {
    let mut out: Vec<Literal> = Vec::with_capacity(lits.len());
    for l in lits {
        if !out.contains(l) {
            out.push(*l);
        }
    }
    out
}

impl Proof {
    /// Recomputes every inferred step from its premises and checks that it
    /// yields the recorded clause up to variable renaming, starting from
    /// `input`.
    pub fn replay(
        &self,
        bank: &mut TermBank,
        ctx: &InferenceContext,
        input: &[Vec<Literal>],
    ) -> Result<(), ReplayError> {
        let mut derived: Vec<(ClauseId, Vec<Literal>)> = Vec::new();
        for step in &self.steps {
            let fresh = match &step.origin {
                Origin::Input(i) => {
                    let source = input
                        .get(*i)
                        .ok_or(ReplayError::InputMismatch(step.id, *i))?;
                    let lits = dedup_literals(source);
                    if variant_key(bank, &lits) != variant_key(bank, &step.literals) {
                        return Err(ReplayError::InputMismatch(step.id, *i));
                    }
                    lits
                }
                Origin::Inferred {
                    premises, detail, ..
                } => {
                    let mut prem: Vec<&[Literal]> = Vec::new();
                    for p in premises {
                        let lits = derived
                            .iter()
                            .find(|(id, _)| id == p)
                            .map(|(_, l)| l.as_slice())
                            .ok_or(ReplayError::MissingPremise(step.id, *p))?;
                        prem.push(lits);
                    }
                    let out = apply_detail(bank, ctx, detail, &prem)
                        .ok_or(ReplayError::Mismatch(step.id))?;
                    let out = dedup_literals(&out);
                    if variant_key(bank, &out) != variant_key(bank, &step.literals) {
                        return Err(ReplayError::Mismatch(step.id));
                    }
                    out
                }
            };
            derived.push((step.id, fresh));
        }
        match derived.last() {
            Some((_, l)) if l.is_empty() => Ok(()),
            _ => Err(ReplayError::NoEmptyClause),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SaturationResult {
    Unsatisfiable(Proof),
    SaturatedSatisfiable,
    SaturatedUnknown,
    ResourceOut,
}

impl SaturationResult {
    /// SZS status word.
    pub fn szs_status(&self) -> &'static str {
        match self {
            SaturationResult::Unsatisfiable(_) => "Unsatisfiable",
            SaturationResult::SaturatedSatisfiable => "Satisfiable",
            SaturationResult::SaturatedUnknown => "Unknown",
            SaturationResult::ResourceOut => "Timeout",
        }
    }

    pub fn is_unsatisfiable(&self) -> bool {
        matches!(self, SaturationResult::Unsatisfiable(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStatistics {
    pub activations: u64,
    /// Children generated, counted before retention.
    pub children_generated: u64,
    pub selection_events: u64,
    pub incomplete_selections: u64,
    pub selection_time: Duration,
    pub total_time: Duration,
    /// Activations whose non-factoring children exceeded the lookahead estimate.
    pub estimate_violations: u64,
    /// Activations where an exact estimate was compared.
    pub estimate_checks: u64,
}

impl RunStatistics {
    pub fn avg_children(&self) -> Ratio<u64> {
        if self.activations == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.children_generated, self.activations)
        }
    }

    /// Fraction of selection events that violated the completeness condition.
    pub fn pct_incomp(&self) -> Ratio<u64> {
        if self.selection_events == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.incomplete_selections, self.selection_events)
        }
    }

    pub fn selection_time_fraction(&self) -> f64 {
        if self.total_time.is_zero() {
            0.0
        } else {
            self.selection_time.as_secs_f64() / self.total_time.as_secs_f64()
        }
    }
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug)]
pub struct SaturationRun {
    pub result: SaturationResult,
    pub stats: RunStatistics,
    /// Every child generated, when requested by the configuration.
    pub children: Vec<Vec<Literal>>,
}

/// Passive clauses ordered both by age and by weight.
#[derive(Clone, Debug)]
pub struct PassiveSet {
    by_age: BTreeSet<(u32, ClauseId)>,
    by_weight: BTreeSet<(u32, ClauseId)>,
    ages: Vec<Option<(u32, u32)>>,
    ratio: (u32, u32),
    tick: u32,
}

impl PassiveSet {
    pub fn new(ratio: (u32, u32)) -> Self {
        assert!(ratio.0 + ratio.1 > 0, "ratio needs a positive component");
        PassiveSet {
            by_age: BTreeSet::new(),
            by_weight: BTreeSet::new(),
            ages: Vec::new(),
            ratio,
            tick: 0,
        }
    }

    pub fn push(&mut self, id: ClauseId, age: u32, weight: u32) {
        let i = id.0 as usize;
        if self.ages.len() <= i {
            self.ages.resize(i + 1, None);
        }
        self.ages[i] = Some((age, weight));
        self.by_age.insert((age, id));
        self.by_weight.insert((weight, id));
    }

    pub fn len(&self) -> usize {
        self.by_age.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_age.is_empty()
    }

    /// Next clause: `a` picks by age, then `w` by weight, repeating.
    pub fn pop(&mut self) -> Option<ClauseId> {
        if self.is_empty() {
            return None;
        }
        let (a, w) = self.ratio;
        let from_age = self.tick % (a + w) < a;
        self.tick = self.tick.wrapping_add(1) % (a + w);
        let id = if from_age {
            self.by_age.iter().next().map(|&(_, id)| id)
        } else {
            self.by_weight.iter().next().map(|&(_, id)| id)
        }?;
        let (age, weight) = self.ages[id.0 as usize]
            .take()
            .expect("queued clause has a key");
        self.by_age.remove(&(age, id));
        self.by_weight.remove(&(weight, id));
        Some(id)
    }
}

/// Why a fresh clause was not kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discard {
    Tautology,
    Duplicate,
    Subsumed(ClauseId),
}

/// Whether `sub` subsumes `target`: some substitution maps the literals of
/// `sub` injectively onto literals of `target`.
pub fn subsumes(bank: &TermBank, sub: &[Literal], target: &[Literal]) -> bool {
    if sub.len() > target.len() {
        return false;
    }
    fn go(
        bank: &TermBank,
        m: &mut Matcher,
        sub: &[Literal],
        target: &[Literal],
        used: &mut Vec<bool>,
    ) -> bool {
        let Some((first, rest)) = sub.split_first() else {
            return true;
        };
        for j in 0..target.len() {
            if used[j] {
                continue;
            }
            let mark = m.mark();
            if m.match_literal(bank, first, &target[j]) {
                used[j] = true;
                if go(bank, m, rest, target, used) {
                    return true;
                }
                used[j] = false;
            }
            m.undo_to(mark);
        }
        false
    }
    let mut used = vec![false; target.len()];
    go(bank, &mut Matcher::new(), sub, target, &mut used)
}

/// Counts that can only grow under substitution: literals per polarity and
/// occurrences per symbol. A clause can only subsume one whose features
/// dominate its own.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Features {
    positive: u32,
    negative: u32,
    /// Sorted by symbol.
    symbols: Vec<(u32, u32)>,
}

impl Features {
    fn of(bank: &TermBank, lits: &[Literal]) -> Self {
        let mut counts: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
        let mut walk = |t| {
            bank.visit_subterms(t, &mut Vec::new(), &mut |_, s| {
                if let Some(f) = bank.head(s) {
                    *counts.entry(f.0).or_default() += 1;
                }
            })
        };
        for l in lits {
            match l.atom {
                Atom::Pred(a) => walk(a),
                Atom::Eq(x, y) => {
                    walk(x);
                    walk(y);
                }
            }
        }
        let positive = lits.iter().filter(|l| l.positive).count() as u32;
        Features {
            positive,
            negative: lits.len() as u32 - positive,
            symbols: counts.into_iter().collect(),
        }
    }

    fn below(&self, other: &Features) -> bool {
        if self.positive > other.positive || self.negative > other.negative {
            return false;
        }
        let mut theirs = other.symbols.iter().peekable();
        self.symbols.iter().all(|&(f, n)| {
            while theirs.peek().is_some_and(|&&(g, _)| g < f) {
                theirs.next();
            }
            matches!(theirs.peek(), Some(&&(g, m)) if g == f && m >= n)
        })
    }
}

struct State<'a> {
    config: &'a SaturationConfig,
    params: KboParams,
    clauses: Vec<Clause>,
    origins: Vec<Origin>,
    passive: PassiveSet,
    active: Vec<(ClauseId, Features)>,
    index: TermIndexSet,
    seen: HashSet<Vec<u32>>,
    stats: RunStatistics,
    children: Vec<Vec<Literal>>,
    incomplete: bool,
}

impl State<'_> {
    fn forward_subsumer(
        &self,
        bank: &TermBank,
        lits: &[Literal],
        skip: Option<ClauseId>,
    ) -> Option<ClauseId> {
        let features = Features::of(bank, lits);
        self.active
            .iter()
            .filter(|(id, f)| Some(*id) != skip && f.below(&features))
            .map(|(id, _)| *id)
            .find(|id| subsumes(bank, &self.clauses[id.0 as usize].literals, lits))
    }

    fn retention(&self, bank: &TermBank, lits: &[Literal], key: &[u32]) -> Option<Discard> {
        if is_tautology(lits) {
            return Some(Discard::Tautology);
        }
        if self.seen.contains(key) {
            return Some(Discard::Duplicate);
        }
        self.forward_subsumer(bank, lits, None)
            .map(Discard::Subsumed)
    }

    /// Stores a clause and queues it unless it is empty; returns its id.
    fn store(
        &mut self,
        bank: &TermBank,
        lits: Vec<Literal>,
        key: Vec<u32>,
        age: u32,
        origin: Origin,
    ) -> ClauseId {
        let id = ClauseId(self.clauses.len() as u32);
        let weight = literal_weight_sum(bank, &lits);
        let empty = lits.is_empty();
        self.clauses.push(Clause::new(id, lits, age));
        self.origins.push(origin);
        self.seen.insert(key);
        if !empty {
            self.passive.push(id, age, weight);
        }
        id
    }

    fn proof(&self, empty: ClauseId) -> Proof {
        let mut needed = BTreeSet::new();
        let mut stack = vec![empty];
        while let Some(id) = stack.pop() {
            if needed.insert(id) {
                if let Origin::Inferred { premises, .. } = &self.origins[id.0 as usize] {
                    stack.extend(premises.iter().copied());
                }
            }
        }
        Proof {
            steps: needed
                .into_iter()
                .map(|id| ProofStep {
                    id,
                    literals: self.clauses[id.0 as usize].literals.clone(),
                    origin: self.origins[id.0 as usize].clone(),
                })
                .collect(),
        }
    }

    fn select(&self, bank: &TermBank, lits: &[Literal]) -> SelectionOutcome {
        let ctx = SelectionContext {
            bank,
            params: &self.params,
            index: &self.index,
            flip: self.config.polarity_flip,
        };
        match &self.config.selection {
            SelectionPolicy::Strategy(s) => select(*s, &ctx, lits),
            SelectionPolicy::Forced(table) => table.select(&ctx, lits),
        }
    }

    fn over_limits(&self, start: Instant) -> bool {
        self.config.time_limit.is_some_and(|t| start.elapsed() >= t)
            || self
                .config
                .max_activations
                .is_some_and(|m| self.stats.activations >= m)
            || self
                .config
                .max_clauses
                .is_some_and(|m| self.clauses.len() >= m)
    }
}

/// Runs the given-clause loop on `input` until a refutation, saturation or a limit.
pub fn saturate(
    bank: &mut TermBank,
    input: &[Vec<Literal>],
    config: &SaturationConfig,
) -> Result<SaturationRun, ConfigError> {
    if input.is_empty() {
        return Err(ConfigError::EmptyInput);
    }
    if config.age_weight_ratio.0 == 0 && config.age_weight_ratio.1 == 0 {
        return Err(ConfigError::ZeroRatio);
    }
    let o = &config.ordering;
    let params = KboParams::with_overrides(
        bank.signature(),
        &o.precedence,
        &o.weights,
        o.variable_weight,
    )?;
    let start = Instant::now();
    let mut st = State {
        config,
        params,
        clauses: Vec::new(),
        origins: Vec::new(),
        passive: PassiveSet::new(config.age_weight_ratio),
        active: Vec::new(),
        index: TermIndexSet::new(),
        seen: HashSet::new(),
        stats: RunStatistics::default(),
        children: Vec::new(),
        incomplete: false,
    };

    let finish = |mut st: State, result: SaturationResult| {
        st.stats.total_time = start.elapsed();
        Ok(SaturationRun {
            result,
            stats: st.stats,
            children: st.children,
        })
    };

    for (i, lits) in input.iter().enumerate() {
        let lits = normalize_variables(bank, &dedup_literals(lits));
        if is_tautology(&lits) {
            continue;
        }
        let key = variant_key(bank, &lits);
        if st.seen.contains(&key) {
            continue;
        }
        let empty = lits.is_empty();
        let id = st.store(bank, lits, key, 0, Origin::Input(i));
        if empty {
            let proof = st.proof(id);
            return finish(st, SaturationResult::Unsatisfiable(proof));
        }
    }

    loop {
        if st.over_limits(start) {
            return finish(st, SaturationResult::ResourceOut);
        }
        let Some(gid) = st.passive.pop() else {
            let result = if st.incomplete {
                SaturationResult::SaturatedUnknown
            } else {
                SaturationResult::SaturatedSatisfiable
            };
            return finish(st, result);
        };
        let given_lits = st.clauses[gid.0 as usize].literals.clone();
        if st.forward_subsumer(bank, &given_lits, Some(gid)).is_some() {
            continue;
        }

        let sel_start = Instant::now();
        let outcome = st.select(bank, &given_lits);
        st.stats.selection_time += sel_start.elapsed();
        st.stats.selection_events += 1;
        if outcome.violated_completeness {
            st.stats.incomplete_selections += 1;
            st.incomplete = true;
        }

        st.clauses[gid.0 as usize].selected = outcome.positions.clone();
        let given = st.clauses[gid.0 as usize].clone();
        st.index.insert_active(bank, &st.params, &given);
        st.active.push((gid, Features::of(bank, &given.literals)));
        st.stats.activations += 1;

        let ctx = InferenceContext {
            params: &st.params,
            flip: config.polarity_flip,
            post_unification_check: config.post_unification_check,
        };
        let inferences = generate_all(bank, &ctx, &given, &st.index, &st.clauses);
        st.stats.children_generated += inferences.len() as u64;
        if config.check_estimates {
            if let (Some(estimate), [_]) = (outcome.estimate, outcome.positions.as_slice()) {
                let generated = inferences
                    .iter()
                    .filter(|inf| !matches!(inf.rule, Rule::Factoring | Rule::EqualityFactoring))
                    .count();
                st.stats.estimate_checks += 1;
                if generated > estimate {
                    st.stats.estimate_violations += 1;
                }
            }
        }

        let child_age = given.age + 1;
        for inf in inferences {
            if config.record_children {
                st.children.push(inf.conclusion.clone());
            }
            let lits = normalize_variables(bank, &dedup_literals(&inf.conclusion));
            let key = variant_key(bank, &lits);
            if st.retention(bank, &lits, &key).is_some() {
                continue;
            }
            let empty = lits.is_empty();
            let origin = Origin::Inferred {
                rule: inf.rule,
                premises: inf.premises,
                detail: inf.detail,
            };
            let id = st.store(bank, lits, key, child_age, origin);
            if empty {
                let proof = st.proof(id);
                return finish(st, SaturationResult::Unsatisfiable(proof));
            }
        }
    }
}

/// Retention verdict for `lits` against a set of active clauses.
pub fn retention_test(
    bank: &TermBank,
    lits: &[Literal],
    active: &[&[Literal]],
    kept: &HashSet<Vec<u32>>,
) -> Option<Discard> {
    if is_tautology(lits) {
        return Some(Discard::Tautology);
    }
    if kept.contains(&variant_key(bank, lits)) {
        return Some(Discard::Duplicate);
    }
    active
        .iter()
        .position(|a| subsumes(bank, a, lits))
        .map(|i| Discard::Subsumed(ClauseId(i as u32)))
}
