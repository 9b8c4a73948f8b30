//! Knuth-Bendix ordering on terms, its multiset extension to literals, and
//! maximal-literal computation.

use rustc_hash::FxHashMap as HashMap;

use thiserror::Error;

use crate::clause::{Atom, Literal};
use crate::term::{Signature, SymbolId, TermBank, TermId, TermNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderResult {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl OrderResult {
    pub fn reverse(self) -> OrderResult {
        match self {
            OrderResult::Greater => OrderResult::Less,
            OrderResult::Less => OrderResult::Greater,
            other => other,
        }
    }

    /// `⪰`: greater or equal.
    pub fn is_ge(self) -> bool {
        matches!(self, OrderResult::Greater | OrderResult::Equal)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OrderingError {
    #[error("unknown symbol `{0}` in ordering configuration")]
    UnknownSymbol(String),
    #[error("symbol weights must be positive (got 0 for `{0}`)")]
    ZeroWeight(String),
    #[error("variable weight must be positive")]
    ZeroVariableWeight,
}

/// Weights and precedence for KBO.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KboParams {
    symbol_weights: Vec<u32>,
    variable_weight: u32,
    /// Precedence rank per symbol; higher rank means greater symbol.
    rank: Vec<u32>,
    uniform: bool,
}

impl KboParams {
    /// All weights 1; precedence by arity descending, then by first occurrence
    /// (earlier symbols are greater).
    pub fn default_for(sig: &Signature) -> Self {
        let mut order: Vec<(SymbolId, u32)> = sig.iter().map(|(id, s)| (id, s.arity)).collect();
        // greatest first
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let n = order.len();
        let mut rank = vec![0; n];
        for (i, (id, _)) in order.iter().enumerate() {
            rank[id.index()] = (n - i) as u32;
        }
        KboParams {
            symbol_weights: vec![1; n],
            variable_weight: 1,
            rank,
            uniform: true,
        }
    }

    /// Default parameters with user overrides. `precedence` lists symbol
    /// names from greatest to smallest; they are placed above all unlisted
    /// symbols, which keep their default relative order.
    pub fn with_overrides(
        sig: &Signature,
        precedence: &[String],
        weights: &[(String, u32)],
        variable_weight: Option<u32>,
    ) -> Result<Self, OrderingError> {
        let mut params = Self::default_for(sig);
        if !precedence.is_empty() {
            let mut listed = Vec::with_capacity(precedence.len());
            for name in precedence {
                let id = sig
                    .lookup(name)
                    .ok_or_else(|| OrderingError::UnknownSymbol(name.clone()))?;
                if !listed.contains(&id) {
                    listed.push(id);
                }
            }
            let mut rest: Vec<SymbolId> = sig
                .iter()
                .map(|(id, _)| id)
                .filter(|id| !listed.contains(id))
                .collect();
            rest.sort_by(|a, b| params.rank[b.index()].cmp(&params.rank[a.index()]));
            let n = sig.len();
            for (i, id) in listed.iter().chain(rest.iter()).enumerate() {
                params.rank[id.index()] = (n - i) as u32;
            }
        }
        for (name, w) in weights {
            let id = sig
                .lookup(name)
                .ok_or_else(|| OrderingError::UnknownSymbol(name.clone()))?;
            if *w == 0 {
                return Err(OrderingError::ZeroWeight(name.clone()));
            }
            params.symbol_weights[id.index()] = *w;
        }
        if let Some(vw) = variable_weight {
            if vw == 0 {
                return Err(OrderingError::ZeroVariableWeight);
            }
            params.variable_weight = vw;
        }
        params.uniform =
            params.variable_weight == 1 && params.symbol_weights.iter().all(|&w| w == 1);
        Ok(params)
    }

    fn symbol_weight(&self, s: SymbolId) -> u64 {
        self.symbol_weights.get(s.index()).copied().unwrap_or(1) as u64
    }

    fn rank(&self, s: SymbolId) -> u32 {
        self.rank.get(s.index()).copied().unwrap_or(0)
    }

    /// Precedence comparison of two symbols.
    pub fn precedence_cmp(&self, f: SymbolId, g: SymbolId) -> std::cmp::Ordering {
        self.rank(f).cmp(&self.rank(g)).then(g.cmp(&f))
    }

    pub fn term_weight(&self, bank: &TermBank, t: TermId) -> u64 {
        if self.uniform {
            return bank.weight(t) as u64;
        }
        match bank.node(t) {
            TermNode::Var(_) => self.variable_weight as u64,
            TermNode::App(f, args) => {
                self.symbol_weight(*f)
                    + args.iter().map(|&a| self.term_weight(bank, a)).sum::<u64>()
            }
        }
    }
}

/// Tracks `#x(s) - #x(t)` for every variable.
#[derive(Default)]
struct VarBalance {
    diff: HashMap<u32, i64>,
    positive: usize,
    negative: usize,
}

impl VarBalance {
    fn add(&mut self, bank: &TermBank, t: TermId, delta: i64) {
        if bank.is_ground(t) {
            return;
        }
        match bank.node(t) {
            TermNode::Var(v) => {
                let e = self.diff.entry(*v).or_insert(0);
                let before = *e;
                *e += delta;
                let after = *e;
                if before > 0 {
                    self.positive -= 1;
                } else if before < 0 {
                    self.negative -= 1;
                }
                if after > 0 {
                    self.positive += 1;
                } else if after < 0 {
                    self.negative += 1;
                }
            }
            TermNode::App(_, args) => {
                for &a in args.iter() {
                    self.add(bank, a, delta);
                }
            }
        }
    }

    /// Every variable occurs at least as often in `s` as in `t`.
    fn s_covers_t(&self) -> bool {
        self.negative == 0
    }

    fn t_covers_s(&self) -> bool {
        self.positive == 0
    }
}

/// KBO comparison of `s` and `t`.
pub fn compare_terms(bank: &TermBank, params: &KboParams, s: TermId, t: TermId) -> OrderResult {
    if s == t {
        return OrderResult::Equal;
    }
    match (bank.node(s), bank.node(t)) {
        (TermNode::Var(_), TermNode::Var(_)) => return OrderResult::Incomparable,
        (TermNode::Var(x), _) => {
            return if bank.occurs(*x, t) {
                OrderResult::Less
            } else {
                OrderResult::Incomparable
            }
        }
        (_, TermNode::Var(y)) => {
            return if bank.occurs(*y, s) {
                OrderResult::Greater
            } else {
                OrderResult::Incomparable
            }
        }
        _ => {}
    }
    let mut balance = VarBalance::default();
    balance.add(bank, s, 1);
    balance.add(bank, t, -1);
    let ws = params.term_weight(bank, s);
    let wt = params.term_weight(bank, t);
    let by_vars = |dir: OrderResult| match dir {
        OrderResult::Greater if balance.s_covers_t() => OrderResult::Greater,
        OrderResult::Less if balance.t_covers_s() => OrderResult::Less,
        _ => OrderResult::Incomparable,
    };
    if ws != wt {
        return by_vars(if ws > wt {
            OrderResult::Greater
        } else {
            OrderResult::Less
        });
    }
    let (f, xs) = match bank.node(s) {
        TermNode::App(f, xs) => (*f, xs),
        TermNode::Var(_) => unreachable!(),
    };
    let (g, ys) = match bank.node(t) {
        TermNode::App(g, ys) => (*g, ys),
        TermNode::Var(_) => unreachable!(),
    };
    if f != g {
        return match params.precedence_cmp(f, g) {
            std::cmp::Ordering::Greater => by_vars(OrderResult::Greater),
            _ => by_vars(OrderResult::Less),
        };
    }
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        match compare_terms(bank, params, x, y) {
            OrderResult::Equal => continue,
            OrderResult::Incomparable => return OrderResult::Incomparable,
            dir => return by_vars(dir),
        }
    }
    // Same head, same arguments: hash-consing makes this unreachable.
    OrderResult::Equal
}

/// The multiset a literal is compared by: `{A}` / `{A, A}` for positive /
/// negative predicate literals, `{s, t}` / `{s, s, t, t}` for equalities.
/// The doubled form makes a negative literal exceed its positive twin.
fn literal_multiset(l: &Literal, flip: bool) -> Vec<TermId> {
    let neg = l.is_negative_under(flip);
    match l.atom {
        Atom::Pred(a) if neg => vec![a, a],
        Atom::Pred(a) => vec![a],
        Atom::Eq(s, t) if neg => vec![s, s, t, t],
        Atom::Eq(s, t) => vec![s, t],
    }
}

/// Multiset extension of KBO.
pub fn compare_multisets(
    bank: &TermBank,
    params: &KboParams,
    m: &[TermId],
    n: &[TermId],
) -> OrderResult {
    let mut m: Vec<TermId> = m.to_vec();
    let mut n: Vec<TermId> = n.to_vec();
    // drop common elements
    let mut i = 0;
    while i < m.len() {
        if let Some(j) = n.iter().position(|&y| y == m[i]) {
            n.swap_remove(j);
            m.swap_remove(i);
        } else {
            i += 1;
        }
    }
    if m.is_empty() && n.is_empty() {
        return OrderResult::Equal;
    }
    let dominates = |big: &[TermId], small: &[TermId], want: OrderResult| {
        small.iter().all(|&y| {
            big.iter().any(|&x| {
                let r = compare_terms(bank, params, x, y);
                r == want
            })
        })
    };
    if !m.is_empty() && dominates(&m, &n, OrderResult::Greater) {
        return OrderResult::Greater;
    }
    if !n.is_empty() && dominates(&n, &m, OrderResult::Greater) {
        return OrderResult::Less;
    }
    OrderResult::Incomparable
}

/// Literal ordering. With `flip` set, predicate polarity is read flipped.
pub fn compare_literals(
    bank: &TermBank,
    params: &KboParams,
    l1: &Literal,
    l2: &Literal,
    flip: bool,
) -> OrderResult {
    compare_multisets(
        bank,
        params,
        &literal_multiset(l1, flip),
        &literal_multiset(l2, flip),
    )
}

/// Positions of literals not strictly below another literal of the clause.
pub fn maximal_literals(
    bank: &TermBank,
    params: &KboParams,
    lits: &[Literal],
    flip: bool,
) -> Vec<usize> {
    (0..lits.len())
        .filter(|&i| {
            (0..lits.len()).all(|j| {
                i == j
                    || compare_literals(bank, params, &lits[i], &lits[j], flip) != OrderResult::Less
            })
        })
        .collect()
}

/// Whether literal `i` is strictly below no other literal.
pub fn is_maximal(
    bank: &TermBank,
    params: &KboParams,
    lits: &[Literal],
    i: usize,
    flip: bool,
) -> bool {
    (0..lits.len()).all(|j| {
        i == j || compare_literals(bank, params, &lits[i], &lits[j], flip) != OrderResult::Less
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SymbolKind;

    fn setup() -> (TermBank, KboParams) {
        let mut sig = Signature::new();
        sig.intern("p", 1, SymbolKind::Predicate).unwrap();
        sig.intern("q", 1, SymbolKind::Predicate).unwrap();
        sig.intern("f", 1, SymbolKind::Function).unwrap();
        sig.intern("a", 0, SymbolKind::Function).unwrap();
        sig.intern("b", 0, SymbolKind::Function).unwrap();
        let params = KboParams::default_for(&sig);
        (TermBank::new(sig), params)
    }

    fn app(b: &mut TermBank, n: &str, args: Vec<TermId>) -> TermId {
        let s = b.signature().lookup(n).unwrap();
        b.app(s, args)
    }

    #[test]
    fn term_examples() {
        let (mut b, k) = setup();
        let a = app(&mut b, "a", vec![]);
        let fa = app(&mut b, "f", vec![a]);
        let x = b.var(0);
        let fx = app(&mut b, "f", vec![x]);
        assert_eq!(compare_terms(&b, &k, fa, a), OrderResult::Greater);
        assert_eq!(compare_terms(&b, &k, a, x), OrderResult::Incomparable);
        assert_eq!(compare_terms(&b, &k, fx, x), OrderResult::Greater);
        assert_eq!(compare_terms(&b, &k, x, fx), OrderResult::Less);
    }

    #[test]
    fn default_precedence_prefers_arity_then_first_occurrence() {
        let (mut b, k) = setup();
        let a = app(&mut b, "a", vec![]);
        let bb = app(&mut b, "b", vec![]);
        // a occurs before b, same arity: a > b
        assert_eq!(compare_terms(&b, &k, a, bb), OrderResult::Greater);
    }

    #[test]
    fn literal_examples() {
        let (mut b, k) = setup();
        let a = app(&mut b, "a", vec![]);
        let fa = app(&mut b, "f", vec![a]);
        let pfa = app(&mut b, "p", vec![fa]);
        let pa = app(&mut b, "p", vec![a]);
        let l_pfa = Literal::pred(true, pfa);
        let l_pa = Literal::pred(true, pa);
        assert_eq!(
            compare_literals(&b, &k, &l_pfa, &l_pa, false),
            OrderResult::Greater
        );
        assert_eq!(
            compare_literals(&b, &k, &l_pa.negated(), &l_pa, false),
            OrderResult::Greater
        );
        // flipped reading swaps which twin is greater
        assert_eq!(
            compare_literals(&b, &k, &l_pa.negated(), &l_pa, true),
            OrderResult::Less
        );
        let x = b.var(0);
        let y = b.var(1);
        let px = app(&mut b, "p", vec![x]);
        let qy = app(&mut b, "q", vec![y]);
        assert_eq!(
            compare_literals(
                &b,
                &k,
                &Literal::pred(true, px),
                &Literal::pred(true, qy),
                false
            ),
            OrderResult::Incomparable
        );
    }

    #[test]
    fn maximal_literal_examples() {
        let (mut b, k) = setup();
        let a = app(&mut b, "a", vec![]);
        let fa = app(&mut b, "f", vec![a]);
        let pfa = app(&mut b, "p", vec![fa]);
        let pa = app(&mut b, "p", vec![a]);
        let c = [Literal::pred(true, pa), Literal::pred(true, pfa)];
        assert_eq!(maximal_literals(&b, &k, &c, false), vec![1]);
        let x = b.var(0);
        let y = b.var(1);
        let px = app(&mut b, "p", vec![x]);
        let qy = app(&mut b, "q", vec![y]);
        let c = [Literal::pred(true, px), Literal::pred(true, qy)];
        assert_eq!(maximal_literals(&b, &k, &c, false), vec![0, 1]);
        let c = [Literal::pred(true, pa), Literal::pred(true, pa)];
        assert_eq!(maximal_literals(&b, &k, &c, false), vec![0, 1]);
    }

    #[test]
    fn overrides_change_precedence_and_weights() {
        let (mut b, _) = setup();
        let sig = b.signature().clone();
        let k = KboParams::with_overrides(&sig, &["b".into(), "a".into()], &[], None).unwrap();
        let a = app(&mut b, "a", vec![]);
        let bb = app(&mut b, "b", vec![]);
        assert_eq!(compare_terms(&b, &k, bb, a), OrderResult::Greater);
        let k = KboParams::with_overrides(&sig, &[], &[("b".into(), 3)], None).unwrap();
        let fa = app(&mut b, "f", vec![a]);
        assert_eq!(compare_terms(&b, &k, bb, fa), OrderResult::Greater);
        assert!(KboParams::with_overrides(&sig, &["zz".into()], &[], None).is_err());
        assert!(KboParams::with_overrides(&sig, &[], &[("a".into(), 0)], None).is_err());
    }
}
