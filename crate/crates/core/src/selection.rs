//! Literal selection strategies.
//!
//! A selection assigns a non-empty clause a non-empty set of literal
//! positions; generating inferences only touch selected literals. A
//! selection is *complete* when it picks a negative literal or all maximal
//! literals. Strategies here fall into four families:
//!
//! * quality selections, which rank literals by a lexicographic chain of
//!   preorders ([`QualityOrder`]) and pick the best one, either as is
//!   (possibly incomplete) or through the completion loop in [`select_completed`];
//! * lookahead selections, which rank literals by an index-based estimate of
//!   how many children selecting them would produce;
//! * SPASS- and E-style rules (20-22, 30-35);
//! * total (0) and maximal (1) selection.
//!
//! With polarity flipping on, every polarity test reads predicate literals
//! with their sign inverted; equality literals are read as they are.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clause::{Atom, ClauseId, Literal};
use crate::index::{count_streams, CandidateCount, CountMode, TermIndexSet};
use crate::ordering::{maximal_literals, KboParams};
use crate::term::TermBank;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QualityCriterion {
    /// Heavier is better.
    Weight,
    /// Fewer variable occurrences is better.
    FewerVars,
    /// Fewer variables directly below the predicate (or as an equality side).
    FewerTopVars,
    FewerDistinctVars,
    /// Anything is better than a positive equality.
    NoPosEq,
    /// A negative equality is better than anything else.
    PreferNegEq,
    /// Negative is better than positive.
    PreferNeg,
    /// Fewer estimated children is better.
    LookMin,
    /// More estimated children is better.
    LookMax,
}

impl QualityCriterion {
    fn needs_estimates(self) -> bool {
        matches!(self, QualityCriterion::LookMin | QualityCriterion::LookMax)
    }
}

/// Lexicographic chain of criteria; remaining ties go to [`tie_break`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualityOrder {
    pub criteria: Vec<QualityCriterion>,
}

impl QualityOrder {
    pub fn new(criteria: Vec<QualityCriterion>) -> Self {
        QualityOrder { criteria }
    }

    /// Order 2: weight.
    pub fn order2() -> Self {
        Self::new(vec![QualityCriterion::Weight])
    }

    /// Order 3: no positive equality, then top-level variables, then distinct variables.
    pub fn order3() -> Self {
        use QualityCriterion::*;
        Self::new(vec![NoPosEq, FewerTopVars, FewerDistinctVars])
    }

    /// Order 4: no positive equality, top-level variables, variables, weight.
    pub fn order4() -> Self {
        use QualityCriterion::*;
        Self::new(vec![NoPosEq, FewerTopVars, FewerVars, Weight])
    }

    /// Order 10: negative equality, weight, negative polarity.
    pub fn order10() -> Self {
        use QualityCriterion::*;
        Self::new(vec![PreferNegEq, Weight, PreferNeg])
    }

    /// A lookahead criterion followed by order 3.
    pub fn lookahead(direction: LookaheadDirection) -> Self {
        let mut criteria = vec![match direction {
            LookaheadDirection::Min => QualityCriterion::LookMin,
            LookaheadDirection::Max => QualityCriterion::LookMax,
        }];
        criteria.extend(Self::order3().criteria);
        Self::new(criteria)
    }

    pub fn needs_estimates(&self) -> bool {
        self.criteria.iter().any(|c| c.needs_estimates())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LookaheadDirection {
    Min,
    Max,
}

/// Read-only view of the prover state that selection may consult.
#[derive(Clone, Copy)]
pub struct SelectionContext<'a> {
    pub bank: &'a TermBank,
    pub params: &'a KboParams,
    pub index: &'a TermIndexSet,
    pub flip: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionOutcome {
    pub positions: Vec<usize>,
    /// The selection neither contains a negative literal nor all maximal literals.
    pub violated_completeness: bool,
    /// Exact lookahead estimate of the single selected literal, when one was computed.
    pub estimate: Option<usize>,
}

/// Whether `selected` contains a negative literal or every maximal literal.
pub fn satisfies_completeness(
    ctx: &SelectionContext,
    lits: &[Literal],
    selected: &[usize],
) -> bool {
    selected
        .iter()
        .any(|&i| lits[i].is_negative_under(ctx.flip))
        || maximal_literals(ctx.bank, ctx.params, lits, ctx.flip)
            .iter()
            .all(|m| selected.contains(m))
}

fn outcome(
    ctx: &SelectionContext,
    lits: &[Literal],
    mut positions: Vec<usize>,
    estimate: Option<usize>,
) -> SelectionOutcome {
    positions.sort_unstable();
    positions.dedup();
    debug_assert!(!positions.is_empty());
    let violated_completeness = !satisfies_completeness(ctx, lits, &positions);
    SelectionOutcome {
        positions,
        violated_completeness,
        estimate,
    }
}

fn rank(b: bool) -> u8 {
    b as u8
}

fn criterion_cmp(
    ctx: &SelectionContext,
    c: QualityCriterion,
    lits: &[Literal],
    a: usize,
    b: usize,
    estimates: Option<&[usize]>,
) -> Ordering {
    use QualityCriterion::*;
    let (la, lb) = (&lits[a], &lits[b]);
    let bank = ctx.bank;
    match c {
        Weight => la.weight(bank).cmp(&lb.weight(bank)),
        FewerVars => lb
            .var_measures(bank)
            .occurrences
            .cmp(&la.var_measures(bank).occurrences),
        FewerTopVars => lb
            .var_measures(bank)
            .top_level
            .cmp(&la.var_measures(bank).top_level),
        FewerDistinctVars => lb
            .var_measures(bank)
            .distinct
            .cmp(&la.var_measures(bank).distinct),
        NoPosEq => {
            let ok = |l: &Literal| rank(!(l.is_equality() && l.positive));
            ok(la).cmp(&ok(lb))
        }
        PreferNegEq => {
            let neq = |l: &Literal| rank(l.is_equality() && !l.positive);
            neq(la).cmp(&neq(lb))
        }
        PreferNeg => {
            rank(la.is_negative_under(ctx.flip)).cmp(&rank(lb.is_negative_under(ctx.flip)))
        }
        LookMin | LookMax => {
            let est = estimates.expect("lookahead criterion needs estimates");
            let ord = est[a].cmp(&est[b]);
            if c == LookMin {
                ord.reverse()
            } else {
                ord
            }
        }
    }
}

fn atom_structural_cmp(bank: &TermBank, a: &Atom, b: &Atom) -> Ordering {
    let sorted = |x, y| {
        if bank.structural_cmp(x, y) == Ordering::Greater {
            (y, x)
        } else {
            (x, y)
        }
    };
    match (*a, *b) {
        (Atom::Pred(x), Atom::Pred(y)) => bank.structural_cmp(x, y),
        (Atom::Pred(_), Atom::Eq(..)) => Ordering::Less,
        (Atom::Eq(..), Atom::Pred(_)) => Ordering::Greater,
        (Atom::Eq(x1, y1), Atom::Eq(x2, y2)) => {
            let (s1, t1) = sorted(x1, y1);
            let (s2, t2) = sorted(x2, y2);
            bank.structural_cmp(s1, s2)
                .then_with(|| bank.structural_cmp(t1, t2))
        }
    }
}

/// Fixed total order used after all criteria: negative before positive, then
/// lower predicate id (equality last), heavier, structurally smaller, and
/// finally the lower position. `Greater` means `a` is preferred.
pub fn tie_break(ctx: &SelectionContext, lits: &[Literal], a: usize, b: usize) -> Ordering {
    let (la, lb) = (&lits[a], &lits[b]);
    let bank = ctx.bank;
    let pred_id = |l: &Literal| match l.atom {
        Atom::Pred(t) => bank.head(t).map_or(u32::MAX, |s| s.0),
        Atom::Eq(..) => u32::MAX,
    };
    rank(la.is_negative_under(ctx.flip))
        .cmp(&rank(lb.is_negative_under(ctx.flip)))
        .then_with(|| pred_id(lb).cmp(&pred_id(la)))
        .then_with(|| la.weight(bank).cmp(&lb.weight(bank)))
        .then_with(|| atom_structural_cmp(bank, &lb.atom, &la.atom))
        .then_with(|| b.cmp(&a))
}

/// Compares the literals at positions `a` and `b`; `Greater` means `a` has
/// higher quality. `estimates` (indexed by position) is required when the
/// order contains a lookahead criterion.
pub fn compare_quality(
    ctx: &SelectionContext,
    lits: &[Literal],
    a: usize,
    b: usize,
    order: &QualityOrder,
    estimates: Option<&[usize]>,
) -> Ordering {
    order
        .criteria
        .iter()
        .map(|&c| criterion_cmp(ctx, c, lits, a, b, estimates))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| tie_break(ctx, lits, a, b))
}

fn best_of(
    ctx: &SelectionContext,
    lits: &[Literal],
    candidates: impl IntoIterator<Item = usize>,
    order: &QualityOrder,
    estimates: Option<&[usize]>,
) -> Option<usize> {
    candidates
        .into_iter()
        .max_by(|&a, &b| compare_quality(ctx, lits, a, b, order, estimates))
}

/// The single highest-quality literal.
pub fn select_incomplete(
    ctx: &SelectionContext,
    lits: &[Literal],
    order: &QualityOrder,
) -> SelectionOutcome {
    assert!(
        !order.needs_estimates(),
        "use select_lookahead for lookahead orders"
    );
    let best = best_of(ctx, lits, 0..lits.len(), order, None).expect("non-empty clause");
    outcome(ctx, lits, vec![best], None)
}

/// Completion of a quality selection: prefer the best negative literal,
/// otherwise select all maximal literals.
pub fn select_completed(
    ctx: &SelectionContext,
    lits: &[Literal],
    order: &QualityOrder,
) -> SelectionOutcome {
    assert!(!lits.is_empty(), "selection on the empty clause");
    let maximal = maximal_literals(ctx.bank, ctx.params, lits, ctx.flip);
    let mut pool: Vec<usize> = (0..lits.len()).collect();
    loop {
        let best = best_of(ctx, lits, pool.iter().copied(), order, None)
            .expect("completion loop exhausted its pool");
        if lits[best].is_negative_under(ctx.flip) {
            return outcome(ctx, lits, vec![best], None);
        }
        let negatives_in_max: Vec<usize> = maximal
            .iter()
            .copied()
            .filter(|&m| lits[m].is_negative_under(ctx.flip))
            .collect();
        if maximal.contains(&best) && negatives_in_max.is_empty() {
            return outcome(ctx, lits, maximal, None);
        }
        if !negatives_in_max.is_empty() {
            pool = negatives_in_max;
            continue;
        }
        pool.retain(|&p| p != best);
    }
}

const SCRATCH_CLAUSE: ClauseId = ClauseId(u32::MAX);

/// Candidate counts for `positions`, covering the active index plus the
/// inferences the clause would have with itself once activated with that
/// literal selected.
pub fn lookahead_counts(
    ctx: &SelectionContext,
    lits: &[Literal],
    positions: &[usize],
    mode: CountMode,
) -> Vec<CandidateCount> {
    let scratch: Vec<TermIndexSet> = positions
        .iter()
        .map(|&p| {
            let mut idx = TermIndexSet::new();
            idx.insert_literal(ctx.bank, ctx.params, SCRATCH_CLAUSE, p, &lits[p]);
            idx
        })
        .collect();
    let streams = positions
        .iter()
        .zip(scratch.iter())
        .map(|(&p, own)| {
            let active = ctx.index.literal_candidates(ctx.bank, ctx.params, &lits[p]);
            // equality resolution is already counted by the active stream
            let own = own
                .literal_candidates(ctx.bank, ctx.params, &lits[p])
                .filter(|c| !matches!(c, crate::index::Candidate::EqualityResolution));
            Box::new(active.chain(own).map(|_| ())) as Box<dyn Iterator<Item = ()> + '_>
        })
        .collect();
    count_streams(positions, streams, mode)
}

/// Estimated number of non-factoring children of the clause when the
/// literal at `position` is selected.
pub fn lookahead_children_estimate(
    ctx: &SelectionContext,
    lits: &[Literal],
    position: usize,
) -> usize {
    let counts = lookahead_counts(ctx, lits, &[position], CountMode::Minimize);
    debug_assert!(counts[0].exact);
    counts[0].count
}

/// Lookahead selection. The incomplete variant ranks every literal; the
/// complete one ranks the negative literals plus the maximal literal when it
/// is the only maximal one and positive, and selects all maximal literals
/// when there is nothing negative to pick.
pub fn select_lookahead(
    ctx: &SelectionContext,
    lits: &[Literal],
    direction: LookaheadDirection,
    complete: bool,
) -> SelectionOutcome {
    assert!(!lits.is_empty(), "selection on the empty clause");
    let mut maximal = Vec::new();
    let pool: Vec<usize> = if complete {
        maximal = maximal_literals(ctx.bank, ctx.params, lits, ctx.flip);
        let mut pool: Vec<usize> = (0..lits.len())
            .filter(|&i| lits[i].is_negative_under(ctx.flip))
            .collect();
        if pool.is_empty() {
            return outcome(ctx, lits, maximal, None);
        }
        if let [only] = maximal[..] {
            if lits[only].is_positive_under(ctx.flip) {
                pool.push(only);
                pool.sort_unstable();
            }
        }
        pool
    } else {
        (0..lits.len()).collect()
    };
    let mode = match direction {
        LookaheadDirection::Min => CountMode::Minimize,
        LookaheadDirection::Max => CountMode::Maximize,
    };
    let counts = lookahead_counts(ctx, lits, &pool, mode);
    let mut estimates = vec![0usize; lits.len()];
    for c in &counts {
        estimates[c.position] = c.count;
    }
    let order = QualityOrder::lookahead(direction);
    let winner =
        best_of(ctx, lits, pool.iter().copied(), &order, Some(&estimates)).expect("non-empty pool");
    let exact = counts
        .iter()
        .find(|c| c.position == winner)
        .filter(|c| c.exact)
        .map(|c| c.count);
    if complete && lits[winner].is_positive_under(ctx.flip) {
        // the lone maximal positive literal: selecting all maximal literals is the same set
        return outcome(ctx, lits, maximal, exact);
    }
    outcome(ctx, lits, vec![winner], exact)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("unknown selection strategy {0}")]
    Unknown(String),
}

/// A numbered selection strategy. `1000 + n` is the incomplete variant of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyId(u16);

impl StrategyId {
    pub const ALL: [u16; 23] = [
        0, 1, 2, 3, 4, 10, 11, 12, 20, 21, 22, 30, 31, 32, 33, 34, 35, 1002, 1003, 1004, 1010,
        1011, 1012,
    ];

    pub const COMPLETE: [u16; 17] = [
        0, 1, 2, 3, 4, 10, 11, 12, 20, 21, 22, 30, 31, 32, 33, 34, 35,
    ];

    pub fn new(number: u32) -> Result<Self, StrategyError> {
        u16::try_from(number)
            .ok()
            .filter(|n| Self::ALL.contains(n))
            .map(StrategyId)
            .ok_or_else(|| StrategyError::Unknown(number.to_string()))
    }

    pub fn all() -> Vec<StrategyId> {
        Self::ALL.iter().map(|&n| StrategyId(n)).collect()
    }

    pub fn complete() -> Vec<StrategyId> {
        Self::COMPLETE.iter().map(|&n| StrategyId(n)).collect()
    }

    pub fn number(self) -> u32 {
        self.0 as u32
    }

    pub fn is_incomplete(self) -> bool {
        self.0 >= 1000
    }

    pub fn is_lookahead(self) -> bool {
        matches!(self.0 % 1000, 11 | 12)
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for StrategyId {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .parse::<u32>()
            .map_err(|_| StrategyError::Unknown(s.to_string()))
            .and_then(StrategyId::new)
    }
}

fn all_maximal(ctx: &SelectionContext, lits: &[Literal]) -> Vec<usize> {
    maximal_literals(ctx.bank, ctx.params, lits, ctx.flip)
}

fn negatives(ctx: &SelectionContext, lits: &[Literal]) -> Vec<usize> {
    (0..lits.len())
        .filter(|&i| lits[i].is_negative_under(ctx.flip))
        .collect()
}

/// Highest `key`, ties resolved by [`tie_break`].
fn best_by_key(
    ctx: &SelectionContext,
    lits: &[Literal],
    candidates: &[usize],
    key: impl Fn(usize) -> i64,
) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .max_by(|&a, &b| key(a).cmp(&key(b)).then_with(|| tie_break(ctx, lits, a, b)))
}

/// Weight difference between the two sides, reading `p(t)` as `p(t) = true`.
fn side_weight_difference(bank: &TermBank, l: &Literal) -> i64 {
    match l.atom {
        Atom::Eq(s, t) => (bank.weight(s) as i64 - bank.weight(t) as i64).abs(),
        Atom::Pred(a) => bank.weight(a) as i64 - 1,
    }
}

fn select_spass_e(ctx: &SelectionContext, lits: &[Literal], number: u16) -> Vec<usize> {
    let bank = ctx.bank;
    let neg = negatives(ctx, lits);
    let weight = |i: usize| lits[i].weight(bank) as i64;
    let diff = |i: usize| side_weight_difference(bank, &lits[i]);
    let ground_neg: Vec<usize> = neg
        .iter()
        .copied()
        .filter(|&i| lits[i].is_ground(bank))
        .collect();
    let pick = match number {
        20 => None,
        21 => {
            let maximal = all_maximal(ctx, lits);
            if maximal.len() == 1 {
                return maximal;
            }
            best_by_key(ctx, lits, &neg, weight)
        }
        22 => best_by_key(ctx, lits, &neg, weight),
        30 => {
            if !neg.is_empty() {
                return neg;
            }
            None
        }
        31 => {
            let pure: Vec<usize> = neg
                .iter()
                .copied()
                .filter(
                    |&i| matches!(lits[i].atom, Atom::Eq(s, t) if bank.is_var(s) && bank.is_var(t)),
                )
                .collect();
            best_by_key(ctx, lits, &pure, |_| 0)
        }
        32 => best_by_key(ctx, lits, &neg, |i| -weight(i)),
        33 => best_by_key(ctx, lits, &neg, diff),
        34 => best_by_key(ctx, lits, &ground_neg, diff),
        35 => {
            if ground_neg.is_empty() {
                best_by_key(ctx, lits, &neg, diff)
            } else {
                best_by_key(ctx, lits, &ground_neg, diff)
            }
        }
        _ => unreachable!("not a SPASS/E strategy: {number}"),
    };
    match pick {
        Some(i) => vec![i],
        None => all_maximal(ctx, lits),
    }
}

/// Selects literals of a non-empty clause with a numbered strategy.
pub fn select(strategy: StrategyId, ctx: &SelectionContext, lits: &[Literal]) -> SelectionOutcome {
    assert!(!lits.is_empty(), "selection on the empty clause");
    let n = strategy.0;
    match n {
        0 => outcome(ctx, lits, (0..lits.len()).collect(), None),
        1 => {
            let maximal = all_maximal(ctx, lits);
            let neg_max: Vec<usize> = maximal
                .iter()
                .copied()
                .filter(|&i| lits[i].is_negative_under(ctx.flip))
                .collect();
            match best_by_key(ctx, lits, &neg_max, |_| 0) {
                Some(i) => outcome(ctx, lits, vec![i], None),
                None => outcome(ctx, lits, maximal, None),
            }
        }
        2 | 3 | 4 | 10 => select_completed(ctx, lits, &quality_order(n)),
        1002 | 1003 | 1004 | 1010 => select_incomplete(ctx, lits, &quality_order(n - 1000)),
        11 => select_lookahead(ctx, lits, LookaheadDirection::Min, true),
        12 => select_lookahead(ctx, lits, LookaheadDirection::Max, true),
        1011 => select_lookahead(ctx, lits, LookaheadDirection::Min, false),
        1012 => select_lookahead(ctx, lits, LookaheadDirection::Max, false),
        20..=22 | 30..=35 => {
            let picked = select_spass_e(ctx, lits, n);
            outcome(ctx, lits, picked, None)
        }
        _ => unreachable!("StrategyId is validated on construction"),
    }
}

fn quality_order(n: u16) -> QualityOrder {
    match n {
        2 => QualityOrder::order2(),
        3 => QualityOrder::order3(),
        4 => QualityOrder::order4(),
        10 => QualityOrder::order10(),
        _ => unreachable!(),
    }
}

/// A fixed selection table, for reproducing hand-made selections in tests.
/// Each rule names a clause (as a literal multiset) and the literal to select
/// in it; clauses without a rule get every literal selected.
#[derive(Clone, Debug, Default)]
pub struct ForcedSelection {
    rules: Vec<(Vec<Literal>, Literal)>,
}

impl ForcedSelection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, clause: Vec<Literal>, selected: Literal) {
        self.rules.push((clause, selected));
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn same_multiset(a: &[Literal], b: &[Literal]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let mut used = vec![false; b.len()];
        a.iter()
            .all(|l| match (0..b.len()).find(|&j| !used[j] && b[j] == *l) {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            })
    }

    pub fn select(&self, ctx: &SelectionContext, lits: &[Literal]) -> SelectionOutcome {
        let chosen = self
            .rules
            .iter()
            .find(|(clause, _)| Self::same_multiset(clause, lits))
            .and_then(|(_, sel)| lits.iter().position(|l| l == sel));
        match chosen {
            Some(i) => outcome(ctx, lits, vec![i], None),
            None => outcome(ctx, lits, (0..lits.len()).collect(), None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::Literal;
    use crate::term::{Signature, SymbolKind, TermId};

    struct Fx {
        bank: TermBank,
        params: KboParams,
        index: TermIndexSet,
    }

    impl Fx {
        fn new() -> Self {
            let mut sig = Signature::new();
            for (n, a, k) in [
                ("p", 1, SymbolKind::Predicate),
                ("q", 1, SymbolKind::Predicate),
                ("p0", 0, SymbolKind::Predicate),
                ("q0", 0, SymbolKind::Predicate),
                ("f", 1, SymbolKind::Function),
                ("a", 0, SymbolKind::Function),
                ("b", 0, SymbolKind::Function),
            ] {
                sig.intern(n, a, k).unwrap();
            }
            let params = KboParams::default_for(&sig);
            Fx {
                bank: TermBank::new(sig),
                params,
                index: TermIndexSet::new(),
            }
        }
        fn t(&mut self, n: &str, args: Vec<TermId>) -> TermId {
            let s = self.bank.signature().lookup(n).unwrap();
            self.bank.app(s, args)
        }
        fn ctx(&self) -> SelectionContext<'_> {
            SelectionContext {
                bank: &self.bank,
                params: &self.params,
                index: &self.index,
                flip: false,
            }
        }
    }

    fn sid(n: u32) -> StrategyId {
        StrategyId::new(n).unwrap()
    }

    #[test]
    fn quality_comparisons() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let b = fx.t("b", vec![]);
        let fa = fx.t("f", vec![a]);
        let ffa = fx.t("f", vec![fa]);
        let pffa = fx.t("p", vec![ffa]);
        let x = fx.bank.var(0);
        let qx = fx.t("q", vec![x]);
        let ctx = fx.ctx();
        let lits = [Literal::pred(false, pffa), Literal::pred(true, qx)];
        assert_eq!(
            compare_quality(&ctx, &lits, 0, 1, &QualityOrder::order2(), None),
            Ordering::Greater
        );

        let px = fx.t("p", vec![x]);
        let ctx = fx.ctx();
        let lits = [Literal::pred(true, px), Literal::eq(true, fa, b)];
        let nposeq = QualityOrder::new(vec![QualityCriterion::NoPosEq]);
        assert_eq!(
            compare_quality(&ctx, &lits, 0, 1, &nposeq, None),
            Ordering::Greater
        );

        // identical literals differ only by position
        let lits = [Literal::pred(true, px), Literal::pred(true, px)];
        assert_eq!(
            compare_quality(&ctx, &lits, 0, 1, &QualityOrder::order3(), None),
            Ordering::Greater
        );
        assert_eq!(tie_break(&ctx, &lits, 0, 1), Ordering::Greater);
    }

    #[test]
    fn incomplete_quality_selection() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let x = fx.bank.var(0);
        let fx_ = fx.t("f", vec![x]);
        let pfx = fx.t("p", vec![fx_]);
        let pa = fx.t("p", vec![a]);
        let ctx = fx.ctx();
        let lits = [Literal::pred(false, pfx), Literal::pred(true, pa)];
        let out = select(sid(1010), &ctx, &lits);
        assert_eq!(out.positions, vec![0]);
        assert!(!out.violated_completeness);

        let single = [Literal::pred(true, pa)];
        let out = select_incomplete(&ctx, &single, &QualityOrder::order2());
        assert_eq!(out.positions, vec![0]);
        assert!(!out.violated_completeness);
    }

    #[test]
    fn incomplete_selection_flags_non_maximal_positive() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let fa = fx.t("f", vec![a]);
        let pa = fx.t("p", vec![a]);
        let pfa = fx.t("p", vec![fa]);
        let ctx = fx.ctx();
        // ⊳2 prefers the heavier literal, which here is maximal: no violation
        let lits = [Literal::pred(true, pa), Literal::pred(true, pfa)];
        assert!(!select(sid(1002), &ctx, &lits).violated_completeness);
        // ⊳3 ties on everything, falls to the tie break: lower predicate id and
        // heavier weight pick p(f(a)); with p0/q0 the tie break picks p0
        let p0 = fx.t("p0", vec![]);
        let q0 = fx.t("q0", vec![]);
        let ctx = fx.ctx();
        let lits = [Literal::pred(true, p0), Literal::pred(true, q0)];
        let out = select(sid(1003), &ctx, &lits);
        assert_eq!(out.positions, vec![0]);
        // p0 > q0 in the default precedence, so p0 is the only maximal literal
        assert!(!out.violated_completeness);
        let lits = [Literal::pred(true, q0), Literal::pred(true, p0)];
        let mut forced = ForcedSelection::new();
        forced.add(lits.to_vec(), Literal::pred(true, q0));
        let out = forced.select(&ctx, &lits);
        assert_eq!(out.positions, vec![0]);
        assert!(out.violated_completeness);
    }

    #[test]
    fn completed_selection_examples() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let b = fx.t("b", vec![]);
        let fa = fx.t("f", vec![a]);
        let pa = fx.t("p", vec![a]);
        let pfa = fx.t("p", vec![fa]);
        let qb = fx.t("q", vec![b]);
        let ctx = fx.ctx();

        let all_neg = [Literal::pred(false, pa), Literal::pred(false, pfa)];
        let out = select_completed(&ctx, &all_neg, &QualityOrder::order2());
        assert_eq!(out.positions, vec![1]);

        // all positive, one maximal: order 3 ties and the tie break prefers the
        // heavier p(f(a)), which is maximal, so step 2 fires
        let lits = [Literal::pred(true, pfa), Literal::pred(true, pa)];
        let out = select_completed(&ctx, &lits, &QualityOrder::order3());
        assert_eq!(out.positions, vec![0]);
        // order 2 on the reversed clause also ends on p(f(a))
        let lits = [Literal::pred(true, pa), Literal::pred(true, pfa)];
        let out = select_completed(&ctx, &lits, &QualityOrder::order2());
        assert_eq!(out.positions, vec![1]);

        // ¬q(b) ∨ p(f(a)) with p(f(a)) ranked first and maximal: select it
        let lits = [Literal::pred(false, qb), Literal::pred(true, pfa)];
        let out = select_completed(&ctx, &lits, &QualityOrder::order2());
        assert_eq!(out.positions, vec![1]);
        assert!(!out.violated_completeness);
    }

    #[test]
    fn lookahead_examples() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let b = fx.t("b", vec![]);
        let x = fx.bank.var(0);
        let px = fx.t("p", vec![x]);
        let qx = fx.t("q", vec![x]);
        for (i, t) in [a, b].into_iter().enumerate() {
            let pt = fx.t("p", vec![t]);
            let mut c =
                crate::clause::Clause::new(ClauseId(i as u32), vec![Literal::pred(false, pt)], 0);
            c.selected = vec![0];
            fx.index.insert_active(&fx.bank, &fx.params, &c);
        }
        let ctx = fx.ctx();
        let lits = [Literal::pred(true, px), Literal::pred(true, qx)];
        assert_eq!(lookahead_children_estimate(&ctx, &lits, 0), 2);
        assert_eq!(lookahead_children_estimate(&ctx, &lits, 1), 0);
        let out = select(sid(1011), &ctx, &lits);
        assert_eq!(out.positions, vec![1]);
        assert_eq!(out.estimate, Some(0));
        let out = select(sid(1012), &ctx, &lits);
        assert_eq!(out.positions, vec![0]);

        // complete variant with no negatives selects all maximal literals
        let out = select(sid(11), &ctx, &lits);
        assert!(!out.violated_completeness);
        assert_eq!(out.positions, vec![0]);
    }

    #[test]
    fn lookahead_counts_equality_resolution() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let x = fx.bank.var(0);
        let q0 = fx.t("q0", vec![]);
        let ctx = fx.ctx();
        let lits = [Literal::eq(false, x, a), Literal::pred(true, q0)];
        assert_eq!(lookahead_children_estimate(&ctx, &lits, 0), 1);
        assert_eq!(lookahead_children_estimate(&ctx, &lits, 1), 0);
    }

    #[test]
    fn catalogue_examples() {
        let mut fx = Fx::new();
        let a = fx.t("a", vec![]);
        let b = fx.t("b", vec![]);
        let fa = fx.t("f", vec![a]);
        let ffa = fx.t("f", vec![fa]);
        let x = fx.bank.var(0);
        let y = fx.bank.var(1);
        let p0 = fx.t("p0", vec![]);
        let q0 = fx.t("q0", vec![]);
        let pfa = fx.t("p", vec![fa]);
        let px = fx.t("p", vec![x]);
        let ctx = fx.ctx();

        let lits = [Literal::pred(true, p0), Literal::pred(false, q0)];
        assert_eq!(select(sid(0), &ctx, &lits).positions, vec![0, 1]);

        let lits = [
            Literal::pred(false, pfa),
            Literal::pred(false, q0),
            Literal::pred(true, px),
        ];
        assert_eq!(select(sid(22), &ctx, &lits).positions, vec![0]);
        assert_eq!(select(sid(32), &ctx, &lits).positions, vec![1]);
        assert_eq!(select(sid(30), &ctx, &lits).positions, vec![0, 1]);

        let pa = fx.t("p", vec![a]);
        let ctx = fx.ctx();
        let lits = [Literal::eq(false, x, y), Literal::pred(true, pa)];
        assert_eq!(select(sid(31), &ctx, &lits).positions, vec![0]);

        let lits = [Literal::eq(false, ffa, a), Literal::eq(false, a, b)];
        assert_eq!(select(sid(33), &ctx, &lits).positions, vec![0]);
        assert_eq!(select(sid(34), &ctx, &lits).positions, vec![0]);
        assert_eq!(select(sid(35), &ctx, &lits).positions, vec![0]);
    }

    #[test]
    fn strategy_numbers() {
        assert!(StrategyId::new(999).is_err());
        assert!("1011".parse::<StrategyId>().unwrap().is_incomplete());
        assert!(!sid(11).is_incomplete());
        assert!(sid(1012).is_lookahead());
        assert_eq!(StrategyId::all().len(), 23);
    }
}
