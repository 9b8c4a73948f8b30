//! Retrieval indexes over the active set.
//!
//! Three indexes feed the generating inferences: selected predicate atoms for
//! resolution, the sides of selected positive equalities for superposition
//! from the active set, and non-variable subterms of selected literals for
//! superposition into the active set. Entries are bucketed by top symbol and
//! filtered with full unification, so each stream yields exactly the entries
//! whose key unifies with the query. Ordering side conditions are not checked
//! here; that is the job of the inference rules.

use std::collections::{BTreeMap, BTreeSet};

use crate::clause::{Atom, Clause, ClauseId, Literal, Side};
use crate::ordering::{compare_terms, KboParams, OrderResult};
use crate::subst::{unifiable, Scope};
use crate::term::{SymbolId, TermBank, TermId};

/// Scope of query terms during retrieval.
pub const QUERY_SCOPE: Scope = Scope(0);
/// Scope of indexed terms during retrieval.
pub const INDEX_SCOPE: Scope = Scope(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TopKey {
    Var,
    Sym(SymbolId),
}

impl TopKey {
    pub fn of(bank: &TermBank, t: TermId) -> TopKey {
        match bank.head(t) {
            Some(f) => TopKey::Sym(f),
            None => TopKey::Var,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomEntry {
    pub clause: ClauseId,
    pub literal: usize,
    pub atom: TermId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqSideEntry {
    pub clause: ClauseId,
    pub literal: usize,
    /// Which side of the stored equality is the rewrite lhs.
    pub side: Side,
    pub lhs: TermId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtermEntry {
    pub clause: ClauseId,
    pub literal: usize,
    pub path: Vec<u32>,
    pub term: TermId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermIndexSet {
    atoms: BTreeMap<(SymbolId, bool), Vec<AtomEntry>>,
    eq_sides: BTreeMap<TopKey, Vec<EqSideEntry>>,
    subterms: BTreeMap<SymbolId, Vec<SubtermEntry>>,
    clauses: BTreeSet<ClauseId>,
}

/// Sides of a positive equality usable as a rewrite lhs: those not strictly
/// smaller than the other side.
pub fn rewrite_sides(
    bank: &TermBank,
    params: &KboParams,
    lit: &Literal,
) -> Vec<(Side, TermId, TermId)> {
    match (lit.positive, lit.sides()) {
        (true, Some(sides)) => sides
            .into_iter()
            .filter(|&(_, l, r)| compare_terms(bank, params, l, r) != OrderResult::Less)
            .collect(),
        _ => Vec::new(),
    }
}

impl TermIndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: ClauseId) -> bool {
        self.clauses.contains(&id)
    }

    pub fn clause_ids(&self) -> impl Iterator<Item = ClauseId> + '_ {
        self.clauses.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Indexes the selected literals of `clause`.
    pub fn insert_active(&mut self, bank: &TermBank, params: &KboParams, clause: &Clause) {
        assert!(
            !clause.selected.is_empty() || clause.is_empty(),
            "clause {} inserted without selection",
            clause.id
        );
        let fresh = self.clauses.insert(clause.id);
        assert!(fresh, "clause {} inserted twice", clause.id);
        for &i in &clause.selected {
            self.insert_literal(bank, params, clause.id, i, &clause.literals[i]);
        }
    }

    pub(crate) fn insert_literal(
        &mut self,
        bank: &TermBank,
        params: &KboParams,
        id: ClauseId,
        i: usize,
        lit: &Literal,
    ) {
        if let Atom::Pred(a) = lit.atom {
            let head = bank.head(a).expect("predicate atom has a head");
            self.atoms
                .entry((head, lit.positive))
                .or_default()
                .push(AtomEntry {
                    clause: id,
                    literal: i,
                    atom: a,
                });
        }
        for (side, lhs, _) in rewrite_sides(bank, params, lit) {
            self.eq_sides
                .entry(TopKey::of(bank, lhs))
                .or_default()
                .push(EqSideEntry {
                    clause: id,
                    literal: i,
                    side,
                    lhs,
                });
        }
        for (path, term) in lit.non_variable_positions(bank) {
            let head = bank.head(term).expect("non-variable subterm");
            self.subterms.entry(head).or_default().push(SubtermEntry {
                clause: id,
                literal: i,
                path,
                term,
            });
        }
    }

    pub fn remove_active(&mut self, clause: &Clause) {
        let was = self.clauses.remove(&clause.id);
        assert!(was, "clause {} removed but never inserted", clause.id);
        let id = clause.id;
        self.atoms.retain(|_, v| {
            v.retain(|e| e.clause != id);
            !v.is_empty()
        });
        self.eq_sides.retain(|_, v| {
            v.retain(|e| e.clause != id);
            !v.is_empty()
        });
        self.subterms.retain(|_, v| {
            v.retain(|e| e.clause != id);
            !v.is_empty()
        });
    }

    /// Selected active literals of opposite polarity whose atom unifies with `lit`'s.
    pub fn resolution_candidates<'a>(
        &'a self,
        bank: &'a TermBank,
        lit: &Literal,
    ) -> impl Iterator<Item = &'a AtomEntry> + 'a {
        let (atom, bucket) = match lit.atom {
            Atom::Pred(a) => {
                let head = bank.head(a).expect("predicate atom has a head");
                (Some(a), self.atoms.get(&(head, !lit.positive)))
            }
            Atom::Eq(..) => (None, None),
        };
        bucket
            .into_iter()
            .flatten()
            .filter(move |e| unifiable(bank, atom.unwrap(), QUERY_SCOPE, e.atom, INDEX_SCOPE))
    }

    /// Rewrite sides of selected active positive equalities that unify with
    /// the non-variable term `s`.
    pub fn superposition_from_candidates<'a>(
        &'a self,
        bank: &'a TermBank,
        s: TermId,
    ) -> impl Iterator<Item = &'a EqSideEntry> + 'a {
        debug_assert!(!bank.is_var(s));
        let exact = self.eq_sides.get(&TopKey::of(bank, s));
        let vars = self.eq_sides.get(&TopKey::Var);
        exact
            .into_iter()
            .flatten()
            .chain(vars.into_iter().flatten())
            .filter(move |e| unifiable(bank, s, QUERY_SCOPE, e.lhs, INDEX_SCOPE))
    }

    /// Non-variable subterms of selected active literals that unify with `lhs`.
    pub fn superposition_into_candidates<'a>(
        &'a self,
        bank: &'a TermBank,
        lhs: TermId,
    ) -> Box<dyn Iterator<Item = &'a SubtermEntry> + 'a> {
        let filter =
            move |e: &&'a SubtermEntry| unifiable(bank, lhs, QUERY_SCOPE, e.term, INDEX_SCOPE);
        match bank.head(lhs) {
            Some(f) => Box::new(self.subterms.get(&f).into_iter().flatten().filter(filter)),
            None => Box::new(self.subterms.values().flatten().filter(filter)),
        }
    }

    /// Every candidate partner of `lit` across the three indexes, plus a
    /// marker for equality resolution when it applies.
    pub fn literal_candidates<'a>(
        &'a self,
        bank: &'a TermBank,
        params: &KboParams,
        lit: &Literal,
    ) -> Box<dyn Iterator<Item = Candidate<'a>> + 'a> {
        let eqres = equality_resolution_applies(bank, lit).then_some(Candidate::EqualityResolution);
        let resolution = self
            .resolution_candidates(bank, lit)
            .map(Candidate::Resolution);
        let from: Vec<TermId> = lit
            .non_variable_positions(bank)
            .into_iter()
            .map(|(_, t)| t)
            .collect();
        let from = from.into_iter().flat_map(move |s| {
            self.superposition_from_candidates(bank, s)
                .map(Candidate::SuperpositionFrom)
        });
        let into: Vec<TermId> = rewrite_sides(bank, params, lit)
            .into_iter()
            .map(|(_, l, _)| l)
            .collect();
        let into = into.into_iter().flat_map(move |l| {
            self.superposition_into_candidates(bank, l)
                .map(Candidate::SuperpositionInto)
        });
        Box::new(eqres.into_iter().chain(resolution).chain(from).chain(into))
    }
}

/// One retrieved inference partner.
#[derive(Clone, Copy, Debug)]
pub enum Candidate<'a> {
    EqualityResolution,
    Resolution(&'a AtomEntry),
    SuperpositionFrom(&'a EqSideEntry),
    SuperpositionInto(&'a SubtermEntry),
}

/// A negative equality whose sides unify.
pub fn equality_resolution_applies(bank: &TermBank, lit: &Literal) -> bool {
    match lit.atom {
        Atom::Eq(s, t) if !lit.positive => unifiable(bank, s, Scope(0), t, Scope(0)),
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Minimize,
    Maximize,
}

/// Candidate count for one queried literal position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateCount {
    pub position: usize,
    pub count: usize,
    /// False when counting stopped before this position's streams ran dry;
    /// `count` is then a lower bound.
    pub exact: bool,
}

/// Counts candidates for several literal positions at once, advancing one
/// candidate per position per round.
///
/// In minimize mode counting stops after the first round in which some
/// position runs dry: those positions hold the smallest totals and their
/// counts are exact, every other position already has a strictly larger
/// lower bound. In maximize mode counting stops once at most one position is
/// still producing; that one is strictly larger than all others.
pub fn count_candidates(
    bank: &TermBank,
    params: &KboParams,
    index: &TermIndexSet,
    lits: &[Literal],
    positions: &[usize],
    mode: CountMode,
) -> Vec<CandidateCount> {
    let streams = positions
        .iter()
        .map(|&p| index.literal_candidates(bank, params, &lits[p]).map(|_| ()))
        .map(|s| Box::new(s) as Box<dyn Iterator<Item = ()> + '_>)
        .collect();
    count_streams(positions, streams, mode)
}

pub(crate) fn count_streams<'a>(
    positions: &[usize],
    mut streams: Vec<Box<dyn Iterator<Item = ()> + 'a>>,
    mode: CountMode,
) -> Vec<CandidateCount> {
    assert!(
        !positions.is_empty(),
        "count_candidates needs at least one position"
    );
    let mut counts: Vec<CandidateCount> = positions
        .iter()
        .map(|&position| CandidateCount {
            position,
            count: 0,
            exact: false,
        })
        .collect();
    loop {
        let mut finished_this_round = false;
        for (c, s) in counts.iter_mut().zip(streams.iter_mut()) {
            if c.exact {
                continue;
            }
            match s.next() {
                Some(()) => c.count += 1,
                None => {
                    c.exact = true;
                    finished_this_round = true;
                }
            }
        }
        let running = counts.iter().filter(|c| !c.exact).count();
        match mode {
            CountMode::Minimize if finished_this_round || running == 0 => break,
            CountMode::Maximize if running <= 1 => break,
            _ => {}
        }
    }
    counts
}
