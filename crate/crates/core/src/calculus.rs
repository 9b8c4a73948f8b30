//! Generating inferences of the superposition and resolution calculus.
//!
//! The rule functions take premises as literal slices and check unification
//! and ordering side conditions, but not selection; [`generate_all`] is where
//! selection is enforced. Two-premise rules unify across scopes 0 and 1, so
//! premises never need explicit renaming.

use std::collections::{BTreeMap, HashMap};

use crate::clause::{Atom, Clause, ClauseId, Literal, Side};
use crate::index::{rewrite_sides, TermIndexSet};
use crate::ordering::{compare_literals, compare_terms, KboParams, OrderResult};
use crate::subst::{Renamer, Scope, Unifier};
use crate::term::TermBank;

const LEFT: Scope = Scope(0);
const RIGHT: Scope = Scope(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Resolution,
    Factoring,
    Superposition,
    EqualityResolution,
    EqualityFactoring,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Resolution => "resolution",
            Rule::Factoring => "factoring",
            Rule::Superposition => "superposition",
            Rule::EqualityResolution => "equality_resolution",
            Rule::EqualityFactoring => "equality_factoring",
        }
    }
}

/// Literal positions and sides an inference used, enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InferenceDetail {
    /// Premises are `[positive, negative]`.
    Resolution {
        positive: usize,
        negative: usize,
    },
    Factoring {
        selected: usize,
        other: usize,
    },
    /// Premises are `[from, into]`.
    Superposition {
        equation: usize,
        side: Side,
        target: usize,
        path: Vec<u32>,
    },
    EqualityResolution {
        literal: usize,
    },
    EqualityFactoring {
        literal: usize,
        side: Side,
        other: usize,
        other_side: Side,
    },
}

impl InferenceDetail {
    pub fn rule(&self) -> Rule {
        match self {
            InferenceDetail::Resolution { .. } => Rule::Resolution,
            InferenceDetail::Factoring { .. } => Rule::Factoring,
            InferenceDetail::Superposition { .. } => Rule::Superposition,
            InferenceDetail::EqualityResolution { .. } => Rule::EqualityResolution,
            InferenceDetail::EqualityFactoring { .. } => Rule::EqualityFactoring,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Inference {
    pub rule: Rule,
    pub premises: Vec<ClauseId>,
    pub detail: InferenceDetail,
    pub conclusion: Vec<Literal>,
}

/// Shared parameters of all rules.
#[derive(Clone, Copy, Debug)]
pub struct InferenceContext<'a> {
    pub params: &'a KboParams,
    /// Factoring works on literals that are positive under the flipped reading.
    pub flip: bool,
    /// Re-check maximality of positive premise literals after unification.
    pub post_unification_check: bool,
}

impl<'a> InferenceContext<'a> {
    pub fn new(params: &'a KboParams) -> Self {
        InferenceContext {
            params,
            flip: false,
            post_unification_check: false,
        }
    }
}

/// Access to clauses by id.
pub trait ClauseStore {
    fn clause(&self, id: ClauseId) -> &Clause;
}

impl ClauseStore for HashMap<ClauseId, Clause> {
    fn clause(&self, id: ClauseId) -> &Clause {
        &self[&id]
    }
}

impl ClauseStore for BTreeMap<ClauseId, Clause> {
    fn clause(&self, id: ClauseId) -> &Clause {
        &self[&id]
    }
}

/// Clauses stored at the index equal to their id.
impl ClauseStore for [Clause] {
    fn clause(&self, id: ClauseId) -> &Clause {
        let c = &self[id.0 as usize];
        debug_assert_eq!(c.id, id);
        c
    }
}

impl ClauseStore for Vec<Clause> {
    fn clause(&self, id: ClauseId) -> &Clause {
        self.as_slice().clause(id)
    }
}

fn others<'a>(lits: &'a [Literal], skip: &'a [usize]) -> impl Iterator<Item = &'a Literal> + 'a {
    lits.iter()
        .enumerate()
        .filter(move |(i, _)| !skip.contains(i))
        .map(|(_, l)| l)
}

/// With the optional check enabled: positive literal `idx` of `premise` must
/// not be strictly below another literal once `u` is applied.
fn still_maximal(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    u: &Unifier,
    premise: &[Literal],
    scope: Scope,
    idx: usize,
) -> bool {
    if !ctx.post_unification_check || premise[idx].is_negative_under(ctx.flip) {
        return true;
    }
    let mut ren = Renamer::identity();
    let inst: Vec<Literal> = premise
        .iter()
        .map(|l| u.apply_literal(bank, l, scope, &mut ren))
        .collect();
    (0..inst.len()).all(|j| {
        j == idx
            || compare_literals(bank, ctx.params, &inst[idx], &inst[j], ctx.flip)
                != OrderResult::Less
    })
}

/// `A ∨ C1`, `¬A' ∨ C2`  ⟹  `(C1 ∨ C2)θ` with `θ = mgu(A, A')`.
pub fn resolution(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    pos_clause: &[Literal],
    pos: usize,
    neg_clause: &[Literal],
    neg: usize,
) -> Option<Vec<Literal>> {
    let (l1, l2) = (pos_clause[pos], neg_clause[neg]);
    if !l1.positive || l2.positive || l1.is_equality() || l2.is_equality() {
        return None;
    }
    let mut u = Unifier::new();
    if !u.unify_atoms(bank, &l1.atom, LEFT, &l2.atom, RIGHT) {
        return None;
    }
    if !still_maximal(bank, ctx, &u, pos_clause, LEFT, pos)
        || !still_maximal(bank, ctx, &u, neg_clause, RIGHT, neg)
    {
        return None;
    }
    let mut ren = Renamer::fresh();
    let mut out: Vec<Literal> = others(pos_clause, &[pos])
        .map(|l| u.apply_literal(bank, l, LEFT, &mut ren))
        .collect();
    out.extend(
        others(neg_clause, &[neg])
            .map(|l| u.apply_literal(bank, l, RIGHT, &mut ren))
            .collect::<Vec<_>>(),
    );
    Some(out)
}

/// `A ∨ A' ∨ C` ⟹ `(A ∨ C)θ` for the selected `A` and one other literal `A'`.
pub fn factoring_with(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    clause: &[Literal],
    selected: usize,
    other: usize,
) -> Option<Vec<Literal>> {
    let (a, b) = (clause[selected], clause[other]);
    if selected == other
        || a.is_equality()
        || b.is_equality()
        || !a.is_positive_under(ctx.flip)
        || a.positive != b.positive
    {
        return None;
    }
    let mut u = Unifier::new();
    if !u.unify_atoms(bank, &a.atom, LEFT, &b.atom, LEFT) {
        return None;
    }
    if !still_maximal(bank, ctx, &u, clause, LEFT, selected) {
        return None;
    }
    let mut ren = Renamer::fresh();
    Some(
        others(clause, &[other])
            .map(|l| u.apply_literal(bank, l, LEFT, &mut ren))
            .collect(),
    )
}

/// All factors of `clause` on the literal at `selected`, with the position of
/// the literal merged into it.
pub fn factoring(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    clause: &[Literal],
    selected: usize,
) -> Vec<(usize, Vec<Literal>)> {
    (0..clause.len())
        .filter_map(|j| factoring_with(bank, ctx, clause, selected, j).map(|c| (j, c)))
        .collect()
}

/// Rewrites the subterm of `into[target]` at `path` with the equation
/// `from[equation]` read from `side`. Returns `None` when the terms do not
/// unify or an ordering condition fails.
#[allow(clippy::too_many_arguments)]
pub fn superposition(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    from: &[Literal],
    equation: usize,
    side: Side,
    into: &[Literal],
    target: usize,
    path: &[u32],
) -> Option<Vec<Literal>> {
    let eq = from[equation];
    let (l, r) = match (eq.positive, eq.atom) {
        (true, Atom::Eq(a, b)) => match side {
            Side::Left => (a, b),
            Side::Right => (b, a),
        },
        _ => return None,
    };
    let tl = into[target];
    if matches!(tl.atom, Atom::Pred(_)) && path.is_empty() {
        return None;
    }
    let s = tl.subterm_at(bank, path);
    if bank.is_var(s) {
        return None;
    }
    let mut u = Unifier::new();
    if !u.unify(bank, l, LEFT, s, RIGHT) {
        return None;
    }
    let mut ren = Renamer::fresh();
    let l_inst = u.apply(bank, l, LEFT, &mut ren);
    let r_inst = u.apply(bank, r, LEFT, &mut ren);
    if compare_terms(bank, ctx.params, r_inst, l_inst).is_ge() {
        return None;
    }
    let target_inst = u.apply_literal(bank, &tl, RIGHT, &mut ren);
    if let Atom::Eq(x, y) = target_inst.atom {
        let (t, t_other) = if path[0] == 0 { (x, y) } else { (y, x) };
        if compare_terms(bank, ctx.params, t_other, t).is_ge() {
            return None;
        }
    }
    if !still_maximal(bank, ctx, &u, from, LEFT, equation)
        || !still_maximal(bank, ctx, &u, into, RIGHT, target)
    {
        return None;
    }
    let rewritten = target_inst.replace_at(bank, path, r_inst);
    let mut out = vec![rewritten];
    for lit in others(from, &[equation]) {
        out.push(u.apply_literal(bank, lit, LEFT, &mut ren));
    }
    for lit in others(into, &[target]) {
        out.push(u.apply_literal(bank, lit, RIGHT, &mut ren));
    }
    Some(out)
}

/// `s ≉ t ∨ C` ⟹ `Cθ` with `θ = mgu(s, t)`.
pub fn equality_resolution(
    bank: &mut TermBank,
    clause: &[Literal],
    literal: usize,
) -> Option<Vec<Literal>> {
    let (s, t) = match (clause[literal].positive, clause[literal].atom) {
        (false, Atom::Eq(s, t)) => (s, t),
        _ => return None,
    };
    let mut u = Unifier::new();
    if !u.unify(bank, s, LEFT, t, LEFT) {
        return None;
    }
    let mut ren = Renamer::fresh();
    Some(
        others(clause, &[literal])
            .map(|l| u.apply_literal(bank, l, LEFT, &mut ren))
            .collect(),
    )
}

fn oriented(lit: &Literal, side: Side) -> Option<(crate::term::TermId, crate::term::TermId)> {
    match (lit.positive, lit.atom) {
        (true, Atom::Eq(a, b)) => Some(match side {
            Side::Left => (a, b),
            Side::Right => (b, a),
        }),
        _ => None,
    }
}

/// `s ≈ t ∨ s' ≈ t' ∨ C` ⟹ `(t ≉ t' ∨ s' ≈ t' ∨ C)θ` for one side pairing.
pub fn equality_factoring_with(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    clause: &[Literal],
    literal: usize,
    side: Side,
    other: usize,
    other_side: Side,
) -> Option<Vec<Literal>> {
    if literal == other {
        return None;
    }
    let (s, t) = oriented(&clause[literal], side)?;
    let (s2, t2) = oriented(&clause[other], other_side)?;
    let mut u = Unifier::new();
    if !u.unify(bank, s, LEFT, s2, LEFT) {
        return None;
    }
    let mut ren = Renamer::fresh();
    let s_i = u.apply(bank, s, LEFT, &mut ren);
    let t_i = u.apply(bank, t, LEFT, &mut ren);
    let s2_i = u.apply(bank, s2, LEFT, &mut ren);
    let t2_i = u.apply(bank, t2, LEFT, &mut ren);
    if compare_terms(bank, ctx.params, t_i, s_i).is_ge()
        || compare_terms(bank, ctx.params, t2_i, s2_i).is_ge()
    {
        return None;
    }
    if !still_maximal(bank, ctx, &u, clause, LEFT, literal) {
        return None;
    }
    let mut out = vec![Literal::eq(false, t_i, t2_i), Literal::eq(true, s2_i, t2_i)];
    for l in others(clause, &[literal, other]) {
        out.push(u.apply_literal(bank, l, LEFT, &mut ren));
    }
    Some(out)
}

/// Equality factoring conclusions over all four side pairings.
pub fn equality_factoring(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    clause: &[Literal],
    literal: usize,
    other: usize,
) -> Vec<(Side, Side, Vec<Literal>)> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        for other_side in [Side::Left, Side::Right] {
            if let Some(c) =
                equality_factoring_with(bank, ctx, clause, literal, side, other, other_side)
            {
                out.push((side, other_side, c));
            }
        }
    }
    out
}

/// Re-runs a recorded inference on the given premises.
pub fn apply_detail(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    detail: &InferenceDetail,
    premises: &[&[Literal]],
) -> Option<Vec<Literal>> {
    match detail {
        InferenceDetail::Resolution { positive, negative } => {
            resolution(bank, ctx, premises[0], *positive, premises[1], *negative)
        }
        InferenceDetail::Factoring { selected, other } => {
            factoring_with(bank, ctx, premises[0], *selected, *other)
        }
        InferenceDetail::Superposition {
            equation,
            side,
            target,
            path,
        } => superposition(
            bank,
            ctx,
            premises[0],
            *equation,
            *side,
            premises[1],
            *target,
            path,
        ),
        InferenceDetail::EqualityResolution { literal } => {
            equality_resolution(bank, premises[0], *literal)
        }
        InferenceDetail::EqualityFactoring {
            literal,
            side,
            other,
            other_side,
        } => equality_factoring_with(bank, ctx, premises[0], *literal, *side, *other, *other_side),
    }
}

/// Every conclusion with `given` as a premise. `given` must already be in
/// `index` with its selection, so inferences of `given` with itself are found
/// too; each of those is produced once.
pub fn generate_all<S: ClauseStore + ?Sized>(
    bank: &mut TermBank,
    ctx: &InferenceContext,
    given: &Clause,
    index: &TermIndexSet,
    store: &S,
) -> Vec<Inference> {
    let mut out = Vec::new();
    let g = &given.literals;
    for &i in &given.selected {
        let lit = g[i];
        match lit.atom {
            Atom::Pred(_) => {
                let partners: Vec<_> = index.resolution_candidates(bank, &lit).cloned().collect();
                for e in partners {
                    // a self-resolution is found from both literals; keep the positive one
                    if e.clause == given.id && !lit.positive {
                        continue;
                    }
                    let other = &store.clause(e.clause).literals;
                    let (premises, detail, res) = if lit.positive {
                        (
                            vec![given.id, e.clause],
                            InferenceDetail::Resolution {
                                positive: i,
                                negative: e.literal,
                            },
                            resolution(bank, ctx, g, i, other, e.literal),
                        )
                    } else {
                        (
                            vec![e.clause, given.id],
                            InferenceDetail::Resolution {
                                positive: e.literal,
                                negative: i,
                            },
                            resolution(bank, ctx, other, e.literal, g, i),
                        )
                    };
                    if let Some(conclusion) = res {
                        out.push(Inference {
                            rule: Rule::Resolution,
                            premises,
                            detail,
                            conclusion,
                        });
                    }
                }
                if lit.is_positive_under(ctx.flip) {
                    for (j, conclusion) in factoring(bank, ctx, g, i) {
                        out.push(Inference {
                            rule: Rule::Factoring,
                            premises: vec![given.id],
                            detail: InferenceDetail::Factoring {
                                selected: i,
                                other: j,
                            },
                            conclusion,
                        });
                    }
                }
            }
            Atom::Eq(..) if lit.positive => {
                for (side, lhs, _) in rewrite_sides(bank, ctx.params, &lit) {
                    let targets: Vec<_> = index
                        .superposition_into_candidates(bank, lhs)
                        .cloned()
                        .collect();
                    for e in targets {
                        let into = &store.clause(e.clause).literals;
                        if let Some(conclusion) =
                            superposition(bank, ctx, g, i, side, into, e.literal, &e.path)
                        {
                            out.push(Inference {
                                rule: Rule::Superposition,
                                premises: vec![given.id, e.clause],
                                detail: InferenceDetail::Superposition {
                                    equation: i,
                                    side,
                                    target: e.literal,
                                    path: e.path.clone(),
                                },
                                conclusion,
                            });
                        }
                    }
                }
                for j in 0..g.len() {
                    for (side, other_side, conclusion) in equality_factoring(bank, ctx, g, i, j) {
                        out.push(Inference {
                            rule: Rule::EqualityFactoring,
                            premises: vec![given.id],
                            detail: InferenceDetail::EqualityFactoring {
                                literal: i,
                                side,
                                other: j,
                                other_side,
                            },
                            conclusion,
                        });
                    }
                }
            }
            Atom::Eq(..) => {
                if let Some(conclusion) = equality_resolution(bank, g, i) {
                    out.push(Inference {
                        rule: Rule::EqualityResolution,
                        premises: vec![given.id],
                        detail: InferenceDetail::EqualityResolution { literal: i },
                        conclusion,
                    });
                }
            }
        }
        // given as the clause rewritten into
        for (path, s) in lit.non_variable_positions(bank) {
            let equations: Vec<_> = index
                .superposition_from_candidates(bank, s)
                .cloned()
                .collect();
            for e in equations {
                if e.clause == given.id {
                    // produced above with given as the equation premise
                    continue;
                }
                let from = &store.clause(e.clause).literals;
                if let Some(conclusion) =
                    superposition(bank, ctx, from, e.literal, e.side, g, i, &path)
                {
                    out.push(Inference {
                        rule: Rule::Superposition,
                        premises: vec![e.clause, given.id],
                        detail: InferenceDetail::Superposition {
                            equation: e.literal,
                            side: e.side,
                            target: i,
                            path: path.clone(),
                        },
                        conclusion,
                    });
                }
            }
        }
    }
    out
}
