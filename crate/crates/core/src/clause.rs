//! Atoms, literals and clauses, plus the per-literal measures that selection
//! criteria read.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use smallvec::SmallVec;

use crate::term::{TermBank, TermId, TermNode};

#[derive(Clone, Copy, Debug)]
pub enum Atom {
    /// Predicate atom; the term's head is a predicate symbol.
    Pred(TermId),
    /// Equality. Identity ignores orientation, the stored order is kept for printing.
    Eq(TermId, TermId),
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Atom::Pred(a), Atom::Pred(b)) => a == b,
            (Atom::Eq(a, b), Atom::Eq(c, d)) => (a == c && b == d) || (a == d && b == c),
            _ => false,
        }
    }
}

impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match *self {
            Atom::Pred(a) => {
                0u8.hash(state);
                a.hash(state);
            }
            Atom::Eq(a, b) => {
                1u8.hash(state);
                a.min(b).hash(state);
                a.max(b).hash(state);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u32 {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn from_index(i: u32) -> Side {
        if i == 0 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

/// Variable counts of a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct VarMeasures {
    pub occurrences: u32,
    pub distinct: u32,
    pub top_level: u32,
}

impl Literal {
    pub fn pred(positive: bool, atom: TermId) -> Self {
        Literal {
            positive,
            atom: Atom::Pred(atom),
        }
    }

    pub fn eq(positive: bool, lhs: TermId, rhs: TermId) -> Self {
        Literal {
            positive,
            atom: Atom::Eq(lhs, rhs),
        }
    }

    pub fn is_equality(&self) -> bool {
        matches!(self.atom, Atom::Eq(..))
    }

    /// Polarity as seen by selection and factoring. Flipping swaps the
    /// polarity of predicate literals and leaves equalities alone.
    pub fn is_positive_under(&self, flip: bool) -> bool {
        if flip && !self.is_equality() {
            !self.positive
        } else {
            self.positive
        }
    }

    pub fn is_negative_under(&self, flip: bool) -> bool {
        !self.is_positive_under(flip)
    }

    pub fn negated(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom,
        }
    }

    /// The literal with predicate polarity flipped; equalities unchanged.
    pub fn flipped(&self) -> Literal {
        if self.is_equality() {
            *self
        } else {
            self.negated()
        }
    }

    pub fn weight(&self, bank: &TermBank) -> u32 {
        match self.atom {
            Atom::Pred(a) => bank.weight(a),
            Atom::Eq(l, r) => bank.weight(l) + bank.weight(r),
        }
    }

    /// The argument terms of a predicate atom, or both sides of an equality.
    pub fn top_terms<'a>(&self, bank: &'a TermBank) -> TopTerms<'a> {
        match self.atom {
            Atom::Pred(a) => TopTerms::Args(bank.args(a)),
            Atom::Eq(l, r) => TopTerms::Sides([l, r]),
        }
    }

    pub fn var_measures(&self, bank: &TermBank) -> VarMeasures {
        let mut vars = Vec::new();
        let mut top_level = 0;
        for t in self.top_terms(bank).iter() {
            if bank.is_var(t) {
                top_level += 1;
            }
            bank.collect_vars(t, &mut vars);
        }
        let occurrences = vars.len() as u32;
        let distinct = vars.into_iter().collect::<BTreeSet<_>>().len() as u32;
        VarMeasures {
            occurrences,
            distinct,
            top_level,
        }
    }

    pub fn is_ground(&self, bank: &TermBank) -> bool {
        match self.atom {
            Atom::Pred(a) => bank.is_ground(a),
            Atom::Eq(l, r) => bank.is_ground(l) && bank.is_ground(r),
        }
    }

    pub fn max_var(&self, bank: &TermBank) -> Option<u32> {
        match self.atom {
            Atom::Pred(a) => bank.max_var(a),
            Atom::Eq(l, r) => bank.max_var(l).max(bank.max_var(r)),
        }
    }

    /// Both orientations `(lhs, rhs)` and `(rhs, lhs)` of an equality.
    pub fn sides(&self) -> Option<[(Side, TermId, TermId); 2]> {
        match self.atom {
            Atom::Eq(l, r) => Some([(Side::Left, l, r), (Side::Right, r, l)]),
            Atom::Pred(_) => None,
        }
    }

    /// Subterm at a literal path. For predicate atoms the path indexes into the
    /// atom term; for equalities the first step picks the side.
    pub fn subterm_at(&self, bank: &TermBank, path: &[u32]) -> TermId {
        match self.atom {
            Atom::Pred(a) => bank.subterm_at(a, path),
            Atom::Eq(l, r) => {
                let side = if path[0] == 0 { l } else { r };
                bank.subterm_at(side, &path[1..])
            }
        }
    }

    pub fn replace_at(&self, bank: &mut TermBank, path: &[u32], new: TermId) -> Literal {
        let atom = match self.atom {
            Atom::Pred(a) => {
                assert!(!path.is_empty(), "cannot replace a whole predicate atom");
                Atom::Pred(bank.replace_at(a, path, new))
            }
            Atom::Eq(l, r) => {
                if path[0] == 0 {
                    Atom::Eq(bank.replace_at(l, &path[1..], new), r)
                } else {
                    Atom::Eq(l, bank.replace_at(r, &path[1..], new))
                }
            }
        };
        Literal {
            positive: self.positive,
            atom,
        }
    }

    /// Calls `f(path, term)` for every term position of the literal: every
    /// subterm of a predicate's arguments, or of either equality side. The
    /// predicate atom itself is not a term position.
    pub fn visit_positions(&self, bank: &TermBank, f: &mut dyn FnMut(&[u32], TermId)) {
        let mut path = Vec::new();
        match self.atom {
            Atom::Pred(a) => {
                for (i, &arg) in bank.args(a).iter().enumerate() {
                    path.push(i as u32);
                    bank.visit_subterms(arg, &mut path, f);
                    path.pop();
                }
            }
            Atom::Eq(l, r) => {
                for (i, side) in [l, r].into_iter().enumerate() {
                    path.push(i as u32);
                    bank.visit_subterms(side, &mut path, f);
                    path.pop();
                }
            }
        }
    }

    /// Non-variable term positions, as `(path, subterm)` pairs.
    pub fn non_variable_positions(&self, bank: &TermBank) -> Vec<(Vec<u32>, TermId)> {
        let mut out = Vec::new();
        self.visit_positions(bank, &mut |path, t| {
            if !bank.is_var(t) {
                out.push((path.to_vec(), t));
            }
        });
        out
    }

    pub fn display<'a>(&'a self, bank: &'a TermBank) -> LiteralDisplay<'a> {
        LiteralDisplay { bank, lit: self }
    }
}

pub enum TopTerms<'a> {
    Args(&'a [TermId]),
    Sides([TermId; 2]),
}

impl TopTerms<'_> {
    pub fn iter(&self) -> impl Iterator<Item = TermId> + '_ {
        let slice: &[TermId] = match self {
            TopTerms::Args(a) => a,
            TopTerms::Sides(s) => s,
        };
        slice.iter().copied()
    }
}

pub struct LiteralDisplay<'a> {
    bank: &'a TermBank,
    lit: &'a Literal,
}

impl fmt::Display for LiteralDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lit.atom {
            Atom::Pred(a) => {
                if !self.lit.positive {
                    f.write_str("~")?;
                }
                write!(f, "{}", self.bank.display(a))
            }
            Atom::Eq(l, r) => {
                let op = if self.lit.positive { "=" } else { "!=" };
                write!(
                    f,
                    "{} {} {}",
                    self.bank.display(l),
                    op,
                    self.bank.display(r)
                )
            }
        }
    }
}

pub fn literal_weight_sum(bank: &TermBank, lits: &[Literal]) -> u32 {
    lits.iter().map(|l| l.weight(bank)).sum()
}

/// True iff the literals contain `A` and `¬A`, or some `t = t`.
pub fn is_tautology(lits: &[Literal]) -> bool {
    lits.iter().enumerate().any(|(i, l)| {
        if let (true, Atom::Eq(a, b)) = (l.positive, l.atom) {
            if a == b {
                return true;
            }
        }
        lits[i + 1..]
            .iter()
            .any(|m| m.positive != l.positive && m.atom == l.atom)
    })
}

pub fn max_var(bank: &TermBank, lits: &[Literal]) -> Option<u32> {
    lits.iter().filter_map(|l| l.max_var(bank)).max()
}

/// Renames variables to `0, 1, ...` in order of first occurrence.
pub fn normalize_variables(bank: &mut TermBank, lits: &[Literal]) -> Vec<Literal> {
    let mut map: Vec<Option<u32>> = Vec::new();
    let mut next = 0u32;
    let mut rename = |bank: &mut TermBank, t: TermId| rename_term(bank, t, &mut map, &mut next);
    lits.iter()
        .map(|l| {
            let atom = match l.atom {
                Atom::Pred(a) => Atom::Pred(rename(bank, a)),
                Atom::Eq(x, y) => {
                    let x = rename(bank, x);
                    Atom::Eq(x, rename(bank, y))
                }
            };
            Literal {
                positive: l.positive,
                atom,
            }
        })
        .collect()
}

fn rename_term(
    bank: &mut TermBank,
    t: TermId,
    map: &mut Vec<Option<u32>>,
    next: &mut u32,
) -> TermId {
    if bank.is_ground(t) {
        return t;
    }
    let (f, old): (_, SmallVec<[TermId; 8]>) = match bank.node(t) {
        TermNode::Var(v) => {
            let v = *v as usize;
            if map.len() <= v {
                map.resize(v + 1, None);
            }
            let nv = *map[v].get_or_insert_with(|| {
                *next += 1;
                *next - 1
            });
            return bank.var(nv);
        }
        TermNode::App(f, args) => (*f, args.iter().copied().collect()),
    };
    let new: SmallVec<[TermId; 8]> = old
        .iter()
        .map(|&a| rename_term(bank, a, map, next))
        .collect();
    if new == old {
        t
    } else {
        bank.app_slice(f, &new)
    }
}

const TOK_VAR_BLIND: u32 = u32::MAX;
const TOK_POS: u32 = u32::MAX - 1;
const TOK_NEG: u32 = u32::MAX - 2;
const TOK_EQ: u32 = u32::MAX - 3;
const TOK_END: u32 = u32::MAX - 4;
const VAR_BASE: u32 = 1 << 30;

#[derive(Default)]
struct VarNumbering {
    map: Vec<Option<u32>>,
    next: u32,
}

impl VarNumbering {
    fn number(&mut self, v: u32) -> u32 {
        let v = v as usize;
        if self.map.len() <= v {
            self.map.resize(v + 1, None);
        }
        let next = &mut self.next;
        *self.map[v].get_or_insert_with(|| {
            *next += 1;
            *next - 1
        })
    }
}

/// Serializes `t`; variables become a blind token when `vars` is `None`.
fn push_term(bank: &TermBank, t: TermId, out: &mut Vec<u32>, vars: &mut Option<&mut VarNumbering>) {
    match bank.node(t) {
        TermNode::Var(v) => match vars {
            None => out.push(TOK_VAR_BLIND),
            Some(numbering) => out.push(VAR_BASE + numbering.number(*v)),
        },
        TermNode::App(f, args) => {
            out.push(f.0);
            for &a in args.iter() {
                push_term(bank, a, out, vars);
            }
        }
    }
}

fn blind_literal_key(bank: &TermBank, l: &Literal) -> (Vec<u32>, bool) {
    let mut out = vec![if l.positive { TOK_POS } else { TOK_NEG }];
    let mut swapped = false;
    match l.atom {
        Atom::Pred(a) => push_term(bank, a, &mut out, &mut None),
        Atom::Eq(x, y) => {
            let mut kx = Vec::new();
            let mut ky = Vec::new();
            push_term(bank, x, &mut kx, &mut None);
            push_term(bank, y, &mut ky, &mut None);
            out.push(TOK_EQ);
            if ky < kx {
                swapped = true;
                std::mem::swap(&mut kx, &mut ky);
            }
            out.extend(kx);
            out.extend(ky);
        }
    }
    (out, swapped)
}

/// Key shared by clauses that are variants of each other up to literal order,
/// equality orientation and variable names. Equal keys imply variance; the
/// converse can fail for clauses whose literals differ only in variable
/// patterns, which only costs a missed duplicate.
pub fn variant_key(bank: &TermBank, lits: &[Literal]) -> Vec<u32> {
    let mut keyed: Vec<(Vec<u32>, bool, &Literal)> = lits
        .iter()
        .map(|l| {
            let (k, swapped) = blind_literal_key(bank, l);
            (k, swapped, l)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut numbering = VarNumbering::default();
    let mut vars = Some(&mut numbering);
    let mut out = Vec::new();
    for (_, swapped, l) in keyed {
        out.push(if l.positive { TOK_POS } else { TOK_NEG });
        match l.atom {
            Atom::Pred(a) => push_term(bank, a, &mut out, &mut vars),
            Atom::Eq(x, y) => {
                out.push(TOK_EQ);
                let (x, y) = if swapped { (y, x) } else { (x, y) };
                push_term(bank, x, &mut out, &mut vars);
                push_term(bank, y, &mut out, &mut vars);
            }
        }
        out.push(TOK_END);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseId(pub u32);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of a subterm inside a clause.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Position {
    pub literal: usize,
    pub path: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Clause {
    pub id: ClauseId,
    pub literals: Vec<Literal>,
    /// Derivation depth; input clauses have age 0.
    pub age: u32,
    /// Selected literal positions, empty until activation.
    pub selected: Vec<usize>,
}

impl Clause {
    pub fn new(id: ClauseId, literals: Vec<Literal>, age: u32) -> Self {
        Clause {
            id,
            literals,
            age,
            selected: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn weight(&self, bank: &TermBank) -> u32 {
        literal_weight_sum(bank, &self.literals)
    }

    pub fn is_tautology(&self) -> bool {
        is_tautology(&self.literals)
    }

    pub fn is_selected(&self, pos: usize) -> bool {
        self.selected.contains(&pos)
    }

    pub fn display<'a>(&'a self, bank: &'a TermBank) -> ClauseDisplay<'a> {
        ClauseDisplay {
            bank,
            lits: &self.literals,
        }
    }
}

pub fn display_literals<'a>(bank: &'a TermBank, lits: &'a [Literal]) -> ClauseDisplay<'a> {
    ClauseDisplay { bank, lits }
}

pub struct ClauseDisplay<'a> {
    bank: &'a TermBank,
    lits: &'a [Literal],
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("$false");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}", l.display(self.bank))?;
        }
        Ok(())
    }
}
