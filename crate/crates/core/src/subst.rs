//! Substitutions, unification and one-way matching.
//!
//! Binary inferences unify terms from two premises that share variable
//! indexes. Instead of renaming one premise, [`Unifier`] tags every variable
//! with a [`Scope`]; applying the unifier through a [`Renamer`] produces the
//! renamed-apart conclusion directly.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap as HashMap;
use smallvec::SmallVec;

use crate::clause::{Atom, Literal};
use crate::term::{TermBank, TermId, TermNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scope(pub u8);

type ScopedVar = (Scope, u32);

/// Scoped, triangular unifier with occurs check.
#[derive(Clone, Debug, Default)]
pub struct Unifier {
    bindings: HashMap<ScopedVar, (TermId, Scope)>,
}

impl Unifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    fn deref(&self, bank: &TermBank, mut t: TermId, mut s: Scope) -> (TermId, Scope) {
        while let TermNode::Var(v) = bank.node(t) {
            match self.bindings.get(&(s, *v)) {
                Some(&(bound, bs)) => {
                    t = bound;
                    s = bs;
                }
                None => break,
            }
        }
        (t, s)
    }

    fn occurs(&self, bank: &TermBank, var: ScopedVar, t: TermId, s: Scope) -> bool {
        let (t, s) = self.deref(bank, t, s);
        match bank.node(t) {
            TermNode::Var(v) => (s, *v) == var,
            TermNode::App(_, args) => {
                !bank.is_ground(t) && args.iter().any(|&a| self.occurs(bank, var, a, s))
            }
        }
    }

    /// Extends the unifier so that `a` (in scope `sa`) and `b` (in scope `sb`)
    /// become equal. On failure the unifier is left in an unspecified state.
    pub fn unify(&mut self, bank: &TermBank, a: TermId, sa: Scope, b: TermId, sb: Scope) -> bool {
        let mut stack = vec![(a, sa, b, sb)];
        while let Some((a, sa, b, sb)) = stack.pop() {
            let (a, sa) = self.deref(bank, a, sa);
            let (b, sb) = self.deref(bank, b, sb);
            if a == b && (sa == sb || bank.is_ground(a)) {
                continue;
            }
            match (bank.node(a), bank.node(b)) {
                (TermNode::Var(x), _) => {
                    let x = (sa, *x);
                    if self.occurs(bank, x, b, sb) {
                        return false;
                    }
                    self.bindings.insert(x, (b, sb));
                }
                (_, TermNode::Var(y)) => {
                    let y = (sb, *y);
                    if self.occurs(bank, y, a, sa) {
                        return false;
                    }
                    self.bindings.insert(y, (a, sa));
                }
                (TermNode::App(f, xs), TermNode::App(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    for (&x, &y) in xs.iter().zip(ys.iter()) {
                        stack.push((x, sa, y, sb));
                    }
                }
            }
        }
        true
    }

    /// Unifies two atoms. Equalities are tried in both orientations.
    pub fn unify_atoms(
        &mut self,
        bank: &TermBank,
        a: &Atom,
        sa: Scope,
        b: &Atom,
        sb: Scope,
    ) -> bool {
        match (*a, *b) {
            (Atom::Pred(x), Atom::Pred(y)) => self.unify(bank, x, sa, y, sb),
            (Atom::Eq(l1, r1), Atom::Eq(l2, r2)) => {
                let mut straight = self.clone();
                if straight.unify(bank, l1, sa, l2, sb) && straight.unify(bank, r1, sa, r2, sb) {
                    *self = straight;
                    return true;
                }
                self.unify(bank, l1, sa, r2, sb) && self.unify(bank, r1, sa, l2, sb)
            }
            _ => false,
        }
    }

    /// Applies the unifier to `t` in scope `s`, mapping unbound variables
    /// through `renamer`.
    pub fn apply(&self, bank: &mut TermBank, t: TermId, s: Scope, renamer: &mut Renamer) -> TermId {
        let (t, s) = self.deref(bank, t, s);
        match bank.node(t) {
            TermNode::Var(v) => {
                let v = renamer.rename(s, *v);
                bank.var(v)
            }
            TermNode::App(f, args) => {
                if bank.is_ground(t) {
                    return t;
                }
                let f = *f;
                let old: SmallVec<[TermId; 8]> = args.iter().copied().collect();
                let new: SmallVec<[TermId; 8]> = old
                    .iter()
                    .map(|&a| self.apply(bank, a, s, renamer))
                    .collect();
                if new == old {
                    t
                } else {
                    bank.app_slice(f, &new)
                }
            }
        }
    }

    pub fn apply_literal(
        &self,
        bank: &mut TermBank,
        l: &Literal,
        s: Scope,
        renamer: &mut Renamer,
    ) -> Literal {
        let atom = match l.atom {
            Atom::Pred(a) => Atom::Pred(self.apply(bank, a, s, renamer)),
            Atom::Eq(x, y) => {
                let x = self.apply(bank, x, s, renamer);
                Atom::Eq(x, self.apply(bank, y, s, renamer))
            }
        };
        Literal {
            positive: l.positive,
            atom,
        }
    }
}

/// Maps scoped variables to output variable indexes.
#[derive(Clone, Debug)]
pub struct Renamer {
    map: HashMap<ScopedVar, u32>,
    next: u32,
    identity: bool,
}

impl Renamer {
    /// Fresh numbering `0, 1, ...` in order of first use.
    pub fn fresh() -> Self {
        Renamer {
            map: HashMap::default(),
            next: 0,
            identity: false,
        }
    }

    /// Keeps variable indexes unchanged, ignoring scopes.
    pub fn identity() -> Self {
        Renamer {
            map: HashMap::default(),
            next: 0,
            identity: true,
        }
    }

    pub fn rename(&mut self, s: Scope, v: u32) -> u32 {
        if self.identity {
            return v;
        }
        let next = &mut self.next;
        *self.map.entry((s, v)).or_insert_with(|| {
            *next += 1;
            *next - 1
        })
    }
}

/// A finite map from variables to terms, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<u32, TermId>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: u32, t: TermId) {
        self.bindings.insert(var, t);
    }

    pub fn get(&self, var: u32) -> Option<TermId> {
        self.bindings.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, TermId)> + '_ {
        self.bindings.iter().map(|(&v, &t)| (v, t))
    }

    pub fn apply(&self, bank: &mut TermBank, t: TermId) -> TermId {
        if bank.is_ground(t) {
            return t;
        }
        match bank.node(t).clone() {
            TermNode::Var(v) => self.get(v).unwrap_or(t),
            TermNode::App(f, args) => {
                let args = args.iter().map(|&a| self.apply(bank, a)).collect();
                bank.app(f, args)
            }
        }
    }

    pub fn apply_atom(&self, bank: &mut TermBank, a: &Atom) -> Atom {
        match *a {
            Atom::Pred(t) => Atom::Pred(self.apply(bank, t)),
            Atom::Eq(x, y) => {
                let x = self.apply(bank, x);
                Atom::Eq(x, self.apply(bank, y))
            }
        }
    }

    pub fn apply_literal(&self, bank: &mut TermBank, l: &Literal) -> Literal {
        Literal {
            positive: l.positive,
            atom: self.apply_atom(bank, &l.atom),
        }
    }

    pub fn apply_literals(&self, bank: &mut TermBank, lits: &[Literal]) -> Vec<Literal> {
        lits.iter().map(|l| self.apply_literal(bank, l)).collect()
    }

    fn from_unifier(bank: &mut TermBank, u: &Unifier) -> Substitution {
        let mut vars: Vec<u32> = u.bindings.keys().map(|&(_, v)| v).collect();
        vars.sort_unstable();
        let mut renamer = Renamer::identity();
        let mut sub = Substitution::new();
        for v in vars {
            let var = bank.var(v);
            let t = u.apply(bank, var, Scope(0), &mut renamer);
            sub.bind(v, t);
        }
        sub
    }
}

/// Most general unifier of two terms over one shared variable space.
/// Callers rename premises apart beforehand.
pub fn mgu(bank: &mut TermBank, a: TermId, b: TermId) -> Option<Substitution> {
    let mut u = Unifier::new();
    if !u.unify(bank, a, Scope(0), b, Scope(0)) {
        return None;
    }
    Some(Substitution::from_unifier(bank, &u))
}

pub fn mgu_atoms(bank: &mut TermBank, a: &Atom, b: &Atom) -> Option<Substitution> {
    let mut u = Unifier::new();
    if !u.unify_atoms(bank, a, Scope(0), b, Scope(0)) {
        return None;
    }
    Some(Substitution::from_unifier(bank, &u))
}

/// Cheap unifiability test across two scopes.
pub fn unifiable(bank: &TermBank, a: TermId, sa: Scope, b: TermId, sb: Scope) -> bool {
    Unifier::new().unify(bank, a, sa, b, sb)
}

/// One-way matching: binds variables of the pattern side only, treating the
/// target as rigid. Supports undo through a trail.
#[derive(Clone, Debug, Default)]
pub struct Matcher {
    bindings: HashMap<u32, TermId>,
    trail: Vec<u32>,
}

impl Matcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail underflow");
            self.bindings.remove(&v);
        }
    }

    pub fn match_term(&mut self, bank: &TermBank, pattern: TermId, target: TermId) -> bool {
        let mark = self.mark();
        if self.match_inner(bank, pattern, target) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    fn match_inner(&mut self, bank: &TermBank, pattern: TermId, target: TermId) -> bool {
        match bank.node(pattern) {
            TermNode::Var(v) => match self.bindings.get(v) {
                Some(&t) => t == target,
                None => {
                    self.bindings.insert(*v, target);
                    self.trail.push(*v);
                    true
                }
            },
            TermNode::App(f, xs) => {
                if bank.is_ground(pattern) {
                    return pattern == target;
                }
                match bank.node(target) {
                    TermNode::App(g, ys) if f == g => xs
                        .iter()
                        .zip(ys.iter())
                        .all(|(&x, &y)| self.match_inner(bank, x, y)),
                    _ => false,
                }
            }
        }
    }

    /// Matches literal `pattern` onto `target`; equalities in either orientation.
    pub fn match_literal(&mut self, bank: &TermBank, pattern: &Literal, target: &Literal) -> bool {
        if pattern.positive != target.positive {
            return false;
        }
        match (pattern.atom, target.atom) {
            (Atom::Pred(p), Atom::Pred(t)) => self.match_term(bank, p, t),
            (Atom::Eq(pl, pr), Atom::Eq(tl, tr)) => {
                let mark = self.mark();
                if self.match_term(bank, pl, tl) && self.match_term(bank, pr, tr) {
                    return true;
                }
                self.undo_to(mark);
                if self.match_term(bank, pl, tr) && self.match_term(bank, pr, tl) {
                    return true;
                }
                self.undo_to(mark);
                false
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Signature, SymbolKind};

    fn bank() -> TermBank {
        let mut sig = Signature::new();
        sig.intern("p", 1, SymbolKind::Predicate).unwrap();
        sig.intern("p2", 2, SymbolKind::Predicate).unwrap();
        sig.intern("f", 2, SymbolKind::Function).unwrap();
        sig.intern("g", 1, SymbolKind::Function).unwrap();
        sig.intern("a", 0, SymbolKind::Function).unwrap();
        TermBank::new(sig)
    }

    fn s(b: &TermBank, n: &str) -> crate::term::SymbolId {
        b.signature().lookup(n).unwrap()
    }

    #[test]
    fn apply_is_simultaneous() {
        let mut b = bank();
        let (p2, a) = (s(&b, "p2"), s(&b, "a"));
        let x = b.var(0);
        let y = b.var(1);
        let ca = b.constant(a);
        let pxy = b.app(p2, vec![x, y]);
        let mut th = Substitution::new();
        th.bind(0, ca);
        let r = th.apply(&mut b, pxy);
        assert_eq!(b.display(r).to_string(), "p2(a,X1)");
        assert_eq!(Substitution::new().apply(&mut b, pxy), pxy);

        // f(x, g(x)) {x -> g(y)} = f(g(y), g(g(y)))
        let (f, g) = (s(&b, "f"), s(&b, "g"));
        let gx = b.app(g, vec![x]);
        let t = b.app(f, vec![x, gx]);
        let gy = b.app(g, vec![y]);
        let mut th = Substitution::new();
        th.bind(0, gy);
        let r = th.apply(&mut b, t);
        assert_eq!(b.display(r).to_string(), "f(g(X1),g(g(X1)))");

        // swap bindings are applied at once, not in sequence
        let mut swap = Substitution::new();
        swap.bind(0, y);
        swap.bind(1, x);
        let r = swap.apply(&mut b, pxy);
        assert_eq!(b.display(r).to_string(), "p2(X1,X0)");
    }

    #[test]
    fn mgu_examples() {
        let mut b = bank();
        let (p, p2, g, a) = (s(&b, "p"), s(&b, "p2"), s(&b, "g"), s(&b, "a"));
        let x = b.var(0);
        let y = b.var(1);
        let ca = b.constant(a);
        let px = b.app(p, vec![x]);
        let pa = b.app(p, vec![ca]);
        let th = mgu(&mut b, px, pa).unwrap();
        assert_eq!(th.get(0), Some(ca));

        let gx = b.app(g, vec![x]);
        let l = b.app(p2, vec![x, gx]);
        let r = b.app(p2, vec![ca, y]);
        let th = mgu(&mut b, l, r).unwrap();
        let ga = b.app(g, vec![ca]);
        assert_eq!(th.get(0), Some(ca));
        assert_eq!(th.get(1), Some(ga));

        let pgx = b.app(p, vec![gx]);
        assert!(mgu(&mut b, px, pgx).is_none());
    }

    #[test]
    fn scoped_unification_renames_apart() {
        let mut b = bank();
        let (p, g) = (s(&b, "p"), s(&b, "g"));
        let x = b.var(0);
        let gx = b.app(g, vec![x]);
        let px = b.app(p, vec![x]);
        let pgx = b.app(p, vec![gx]);
        // Same variable index in different scopes is not an occurs-check failure.
        let mut u = Unifier::new();
        assert!(u.unify(&b, px, Scope(0), pgx, Scope(1)));
        let mut ren = Renamer::fresh();
        let r = u.apply(&mut b, px, Scope(0), &mut ren);
        assert_eq!(b.display(r).to_string(), "p(g(X0))");
    }

    #[test]
    fn matching_is_one_way() {
        let mut b = bank();
        let (p, a) = (s(&b, "p"), s(&b, "a"));
        let x = b.var(0);
        let ca = b.constant(a);
        let px = b.app(p, vec![x]);
        let pa = b.app(p, vec![ca]);
        let mut m = Matcher::new();
        assert!(m.match_term(&b, px, pa));
        let mut m = Matcher::new();
        assert!(!m.match_term(&b, pa, px));
    }
}
