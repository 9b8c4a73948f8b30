//! Helpers shared by the integration tests: random clause generation and
//! brute-force reference implementations that avoid the library's own
//! unifier, literal ordering and inference machinery.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use litsel::clause::{Atom, Literal};
use litsel::ordering::{compare_terms, KboParams, OrderResult};
use litsel::term::{Signature, SymbolId, SymbolKind, TermBank, TermId, TermNode};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn soundness_problems() -> Vec<PathBuf> {
    litsel::harness::collect_problems(&corpus_dir().join("soundness")).expect("soundness corpus")
}

/// Random terms and clauses over a fixed small signature.
pub struct Gen {
    pub bank: TermBank,
    pub params: KboParams,
    pub preds: Vec<SymbolId>,
    pub funcs: Vec<SymbolId>,
    pub consts: Vec<SymbolId>,
    pub max_var: u32,
    pub max_depth: u32,
    pub eq_ratio: f64,
}

impl Gen {
    pub fn new() -> Self {
        let mut sig = Signature::new();
        let mut preds = Vec::new();
        let mut funcs = Vec::new();
        let mut consts = Vec::new();
        for (n, a) in [("p", 1), ("q", 2), ("r", 0), ("s", 1)] {
            preds.push(sig.intern(n, a, SymbolKind::Predicate).unwrap());
        }
        for (n, a) in [("f", 1), ("g", 2)] {
            funcs.push(sig.intern(n, a, SymbolKind::Function).unwrap());
        }
        for n in ["a", "b", "c"] {
            consts.push(sig.intern(n, 0, SymbolKind::Function).unwrap());
        }
        let params = KboParams::default_for(&sig);
        Gen {
            bank: TermBank::new(sig),
            params,
            preds,
            funcs,
            consts,
            max_var: 3,
            max_depth: 3,
            eq_ratio: 0.3,
        }
    }

    pub fn arity(&self, s: SymbolId) -> u32 {
        self.bank.signature().symbol(s).arity
    }

    pub fn term(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> TermId {
        let roll: f64 = rng.gen();
        if depth == 0 || roll < 0.35 {
            if rng.gen_bool(0.5) {
                let v = rng.gen_range(0..self.max_var);
                return self.bank.var(v);
            }
            let c = *self.consts.choose(rng).unwrap();
            return self.bank.constant(c);
        }
        let f = *self.funcs.choose(rng).unwrap();
        let args = (0..self.arity(f))
            .map(|_| self.term(rng, depth - 1))
            .collect();
        self.bank.app(f, args)
    }

    pub fn ground_term(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> TermId {
        if depth == 0 || rng.gen_bool(0.4) {
            let c = *self.consts.choose(rng).unwrap();
            return self.bank.constant(c);
        }
        let f = *self.funcs.choose(rng).unwrap();
        let args = (0..self.arity(f))
            .map(|_| self.ground_term(rng, depth - 1))
            .collect();
        self.bank.app(f, args)
    }

    pub fn atom(&mut self, rng: &mut ChaCha8Rng) -> TermId {
        let p = *self.preds.choose(rng).unwrap();
        let d = self.max_depth;
        let args = (0..self.arity(p)).map(|_| self.term(rng, d)).collect();
        self.bank.app(p, args)
    }

    pub fn literal(&mut self, rng: &mut ChaCha8Rng) -> Literal {
        let positive = rng.gen_bool(0.5);
        if rng.gen_bool(self.eq_ratio) {
            let d = self.max_depth;
            let l = self.term(rng, d);
            let r = self.term(rng, d);
            Literal::eq(positive, l, r)
        } else {
            let a = self.atom(rng);
            Literal::pred(positive, a)
        }
    }

    pub fn clause(&mut self, rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Literal> {
        let n = rng.gen_range(1..=max_len);
        (0..n).map(|_| self.literal(rng)).collect()
    }
}

/// Reference unification of `(s, 0)` with `(t, 1)`, without the library unifier.
pub fn naive_unifiable(bank: &TermBank, s: TermId, t: TermId) -> bool {
    naive_unifiable_in(bank, s, 0, t, 1)
}

/// Reference unification with explicit variable scopes.
pub fn naive_unifiable_in(bank: &TermBank, s: TermId, ss: u8, t: TermId, ts: u8) -> bool {
    type Key = (u8, u32);
    fn walk(
        bank: &TermBank,
        sub: &HashMap<Key, (TermId, u8)>,
        mut t: TermId,
        mut sc: u8,
    ) -> (TermId, u8) {
        while let TermNode::Var(v) = bank.node(t) {
            match sub.get(&(sc, *v)) {
                Some(&(u, s2)) => {
                    t = u;
                    sc = s2;
                }
                None => break,
            }
        }
        (t, sc)
    }
    fn occurs(
        bank: &TermBank,
        sub: &HashMap<Key, (TermId, u8)>,
        v: Key,
        t: TermId,
        sc: u8,
    ) -> bool {
        let (t, sc) = walk(bank, sub, t, sc);
        match bank.node(t) {
            TermNode::Var(w) => (sc, *w) == v,
            TermNode::App(_, args) => args.iter().any(|&a| occurs(bank, sub, v, a, sc)),
        }
    }
    let mut sub: HashMap<Key, (TermId, u8)> = HashMap::new();
    let mut stack = vec![((s, ss), (t, ts))];
    while let Some(((a, sa), (b, sb))) = stack.pop() {
        let (a, sa) = walk(bank, &sub, a, sa);
        let (b, sb) = walk(bank, &sub, b, sb);
        if a == b && (sa == sb || bank.is_ground(a)) {
            continue;
        }
        match (bank.node(a), bank.node(b)) {
            (TermNode::Var(v), _) => {
                if occurs(bank, &sub, (sa, *v), b, sb) {
                    return false;
                }
                sub.insert((sa, *v), (b, sb));
            }
            (_, TermNode::Var(w)) => {
                if occurs(bank, &sub, (sb, *w), a, sa) {
                    return false;
                }
                sub.insert((sb, *w), (a, sa));
            }
            (TermNode::App(f, xs), TermNode::App(g, ys)) => {
                if f != g {
                    return false;
                }
                for (&x, &y) in xs.iter().zip(ys.iter()) {
                    stack.push(((x, sa), (y, sb)));
                }
            }
        }
    }
    true
}

/// Non-variable positions of a literal: argument subterms of a predicate
/// atom, or subterms of either equation side (paths start with the side).
pub fn naive_positions(bank: &TermBank, lit: &Literal) -> Vec<(Vec<u32>, TermId)> {
    fn go(bank: &TermBank, t: TermId, path: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, TermId)>) {
        if let TermNode::App(_, args) = bank.node(t) {
            out.push((path.clone(), t));
            for (i, &a) in args.iter().enumerate() {
                path.push(i as u32);
                go(bank, a, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    match lit.atom {
        Atom::Pred(a) => {
            for (i, &x) in bank.args(a).iter().enumerate() {
                go(bank, x, &mut vec![i as u32], &mut out);
            }
        }
        Atom::Eq(l, r) => {
            go(bank, l, &mut vec![0], &mut out);
            go(bank, r, &mut vec![1], &mut out);
        }
    }
    out
}

/// Multiset ordering by definition: `m > n` iff they differ and every
/// element of `n - m` is dominated by some element of `m - n`.
fn multiset_greater(bank: &TermBank, params: &KboParams, m: &[TermId], n: &[TermId]) -> bool {
    let mut m_rest: Vec<TermId> = m.to_vec();
    let mut n_rest: Vec<TermId> = Vec::new();
    for &x in n {
        if let Some(i) = m_rest.iter().position(|&y| y == x) {
            m_rest.swap_remove(i);
        } else {
            n_rest.push(x);
        }
    }
    if m_rest.is_empty() && n_rest.is_empty() {
        return false;
    }
    n_rest.iter().all(|&x| {
        m_rest
            .iter()
            .any(|&y| compare_terms(bank, params, y, x) == OrderResult::Greater)
    })
}

fn literal_multiset(lit: &Literal, flip: bool) -> Vec<TermId> {
    let negative = match lit.atom {
        Atom::Pred(_) => lit.positive == flip,
        Atom::Eq(..) => !lit.positive,
    };
    let base: Vec<TermId> = match lit.atom {
        Atom::Pred(a) => vec![a],
        Atom::Eq(l, r) => vec![l, r],
    };
    if negative {
        base.iter().chain(base.iter()).copied().collect()
    } else {
        base
    }
}

/// Indexes of literals not strictly below another literal.
pub fn naive_maximal(
    bank: &TermBank,
    params: &KboParams,
    lits: &[Literal],
    flip: bool,
) -> Vec<usize> {
    let sets: Vec<Vec<TermId>> = lits.iter().map(|l| literal_multiset(l, flip)).collect();
    (0..lits.len())
        .filter(|&i| {
            !(0..lits.len()).any(|j| j != i && multiset_greater(bank, params, &sets[j], &sets[i]))
        })
        .collect()
}

pub fn is_negative(lit: &Literal, flip: bool) -> bool {
    match lit.atom {
        Atom::Pred(_) => lit.positive == flip,
        Atom::Eq(..) => !lit.positive,
    }
}

/// Whether `selected` holds a negative literal or all maximal literals.
pub fn condition_holds(
    bank: &TermBank,
    params: &KboParams,
    lits: &[Literal],
    selected: &[usize],
    flip: bool,
) -> bool {
    selected.iter().any(|&i| is_negative(&lits[i], flip))
        || naive_maximal(bank, params, lits, flip)
            .iter()
            .all(|m| selected.contains(m))
}

/// Ground satisfiability of a function-free clause set: every partition of
/// the constants fixes the equality relation, clauses are grounded over the
/// classes, and a small DPLL decides the propositional rest.
pub fn function_free_satisfiable(bank: &TermBank, clauses: &[Vec<Literal>]) -> Option<bool> {
    let mut consts = BTreeSet::new();
    for c in clauses {
        for l in c {
            let terms: Vec<TermId> = match l.atom {
                Atom::Pred(a) => bank.args(a).to_vec(),
                Atom::Eq(x, y) => vec![x, y],
            };
            for t in terms {
                match bank.node(t) {
                    TermNode::Var(_) => {}
                    TermNode::App(f, args) if args.is_empty() => {
                        consts.insert(*f);
                    }
                    TermNode::App(..) => return None,
                }
            }
        }
    }
    let consts: Vec<SymbolId> = consts.into_iter().collect();
    // an empty universe still needs one element
    let n = consts.len().max(1);
    let mut sat = false;
    for_each_partition(n, &mut |class: &[usize]| {
        if !sat && ground_and_solve(bank, clauses, &consts, class) {
            sat = true;
        }
    });
    Some(sat)
}

fn for_each_partition(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(i: usize, n: usize, classes: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i == n {
            f(cur);
            return;
        }
        for c in 0..=classes {
            cur.push(c);
            go(i + 1, n, classes.max(c + 1), cur, f);
            cur.pop();
        }
    }
    go(0, n, 0, &mut Vec::new(), f);
}

fn ground_and_solve(
    bank: &TermBank,
    clauses: &[Vec<Literal>],
    consts: &[SymbolId],
    class: &[usize],
) -> bool {
    let domain: Vec<usize> = {
        let mut d: Vec<usize> = class.to_vec();
        d.sort_unstable();
        d.dedup();
        d
    };
    let const_class = |s: SymbolId| class[consts.iter().position(|&c| c == s).unwrap()];
    let mut atom_ids: HashMap<(SymbolId, Vec<usize>), u32> = HashMap::new();
    let mut ground: Vec<Vec<i32>> = Vec::new();
    for c in clauses {
        let mut vars = BTreeSet::new();
        for l in c {
            let ts: Vec<TermId> = match l.atom {
                Atom::Pred(a) => bank.args(a).to_vec(),
                Atom::Eq(x, y) => vec![x, y],
            };
            for t in ts {
                if let Some(v) = bank.as_var(t) {
                    vars.insert(v);
                }
            }
        }
        let vars: Vec<u32> = vars.into_iter().collect();
        let mut choice = vec![0usize; vars.len()];
        loop {
            let val = |t: TermId| -> usize {
                match bank.node(t) {
                    TermNode::Var(v) => domain[choice[vars.iter().position(|w| w == v).unwrap()]],
                    TermNode::App(f, _) => const_class(*f),
                }
            };
            let mut out = Vec::new();
            let mut satisfied = false;
            for l in c {
                match l.atom {
                    Atom::Eq(x, y) => {
                        if (val(x) == val(y)) == l.positive {
                            satisfied = true;
                        }
                    }
                    Atom::Pred(a) => {
                        let key = (
                            bank.head(a).unwrap(),
                            bank.args(a).iter().map(|&t| val(t)).collect(),
                        );
                        let next = atom_ids.len() as u32 + 1;
                        let id = *atom_ids.entry(key).or_insert(next) as i32;
                        out.push(if l.positive { id } else { -id });
                    }
                }
            }
            if !satisfied {
                ground.push(out);
            }
            // next assignment
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < domain.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    dpll(&ground, &mut HashMap::new())
}

fn dpll(clauses: &[Vec<i32>], assign: &mut HashMap<i32, bool>) -> bool {
    let mut trail = Vec::new();
    loop {
        let mut unit = None;
        let mut all_sat = true;
        for c in clauses {
            let mut open = Vec::new();
            let mut sat = false;
            for &l in c {
                match assign.get(&l.abs()) {
                    Some(&v) if v == (l > 0) => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => open.push(l),
                }
            }
            if sat {
                continue;
            }
            all_sat = false;
            match open.len() {
                0 => {
                    for v in trail {
                        assign.remove(&v);
                    }
                    return false;
                }
                1 => {
                    unit = Some(open[0]);
                    break;
                }
                _ => {}
            }
        }
        if all_sat {
            return true;
        }
        match unit {
            Some(l) => {
                assign.insert(l.abs(), l > 0);
                trail.push(l.abs());
            }
            None => break,
        }
    }
    let var = clauses
        .iter()
        .flat_map(|c| c.iter())
        .map(|l| l.abs())
        .find(|v| !assign.contains_key(v))
        .expect("an open clause has an unassigned literal");
    for value in [true, false] {
        assign.insert(var, value);
        if dpll(clauses, assign) {
            return true;
        }
        assign.remove(&var);
    }
    for v in trail {
        assign.remove(&v);
    }
    false
}
