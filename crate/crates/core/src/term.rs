//! Symbols and hash-consed first-order terms.
//!
//! Every term lives in a [`TermBank`]; structurally equal terms share one
//! [`TermId`], so equality of ids is structural equality. Weight and
//! variable-occurrence counts are computed once at construction.

use std::collections::HashMap;
use std::fmt;
use std::hash::BuildHasher;

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Function,
    Predicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: u32,
    pub kind: SymbolKind,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{name}` used with arity {found}, but it was declared with arity {expected}")]
    ArityClash {
        name: String,
        expected: u32,
        found: u32,
    },
    #[error("symbol `{name}` used both as a function and as a predicate")]
    KindClash { name: String },
}

/// Symbol table. Ids are handed out in first-occurrence order.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(
        &mut self,
        name: &str,
        arity: u32,
        kind: SymbolKind,
    ) -> Result<SymbolId, SignatureError> {
        if let Some(&id) = self.by_name.get(name) {
            let sym = &self.symbols[id.index()];
            if sym.kind != kind {
                return Err(SignatureError::KindClash {
                    name: name.to_string(),
                });
            }
            if sym.arity != arity {
                return Err(SignatureError::ArityClash {
                    name: name.to_string(),
                    expected: sym.arity,
                    found: arity,
                });
            }
            return Ok(id);
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(Symbol {
            name: name.to_string(),
            arity,
            kind,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i as u32), s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermNode {
    Var(u32),
    App(SymbolId, Box<[TermId]>),
}

#[derive(Clone, Debug)]
struct TermData {
    node: TermNode,
    weight: u32,
    var_occurrences: u32,
    max_var: Option<u32>,
}

/// Interning store for terms, together with the signature they are built over.
///
/// Predicate atoms are stored here too: an atom `p(t1..tn)` is an application
/// whose head has [`SymbolKind::Predicate`].
#[derive(Clone, Default)]
pub struct TermBank {
    signature: Signature,
    terms: Vec<TermData>,
    /// Ids keyed by the hash of their node.
    table: HashTable<TermId>,
}

impl fmt::Debug for TermBank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TermBank")
            .field("signature", &self.signature)
            .field("terms", &self.terms.len())
            .finish()
    }
}

fn node_hash(sym: Option<SymbolId>, var: u32, args: &[TermId]) -> u64 {
    FxBuildHasher.hash_one((sym, var, args))
}

impl TermBank {
    pub fn new(signature: Signature) -> Self {
        TermBank {
            signature,
            terms: Vec::new(),
            table: HashTable::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_mut(&mut self) -> &mut Signature {
        &mut self.signature
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn lookup_or_insert(&mut self, sym: Option<SymbolId>, var: u32, args: &[TermId]) -> TermId {
        let hash = node_hash(sym, var, args);
        let terms = &self.terms;
        let same = |id: &TermId| match (&terms[id.index()].node, sym) {
            (TermNode::Var(v), None) => *v == var,
            (TermNode::App(f, xs), Some(g)) => *f == g && **xs == *args,
            _ => false,
        };
        if let Some(&id) = self.table.find(hash, same) {
            return id;
        }
        let (node, weight, var_occurrences, max_var) = match sym {
            None => (TermNode::Var(var), 1, 1, Some(var)),
            Some(f) => {
                let mut w = 1;
                let mut occ = 0;
                let mut max: Option<u32> = None;
                for a in args {
                    let d = &self.terms[a.index()];
                    w = d.weight.saturating_add(w);
                    occ = d.var_occurrences.saturating_add(occ);
                    max = max.max(d.max_var);
                }
                (TermNode::App(f, args.into()), w, occ, max)
            }
        };
        let id = TermId(self.terms.len() as u32);
        self.terms.push(TermData {
            node,
            weight,
            var_occurrences,
            max_var,
        });
        let terms = &self.terms;
        self.table
            .insert_unique(hash, id, |t| match &terms[t.index()].node {
                TermNode::Var(v) => node_hash(None, *v, &[]),
                TermNode::App(f, xs) => node_hash(Some(*f), 0, xs),
            });
        id
    }

    pub fn var(&mut self, index: u32) -> TermId {
        self.lookup_or_insert(None, index, &[])
    }

    pub fn app(&mut self, sym: SymbolId, args: Vec<TermId>) -> TermId {
        self.app_slice(sym, &args)
    }

    pub fn app_slice(&mut self, sym: SymbolId, args: &[TermId]) -> TermId {
        debug_assert_eq!(
            self.signature.symbol(sym).arity as usize,
            args.len(),
            "arity mismatch for {}",
            self.signature.symbol(sym).name
        );
        self.lookup_or_insert(Some(sym), 0, args)
    }

    pub fn constant(&mut self, sym: SymbolId) -> TermId {
        self.app(sym, Vec::new())
    }

    pub fn node(&self, t: TermId) -> &TermNode {
        &self.terms[t.index()].node
    }

    /// Number of symbol and variable occurrences in `t`.
    pub fn weight(&self, t: TermId) -> u32 {
        self.terms[t.index()].weight
    }

    pub fn var_occurrences(&self, t: TermId) -> u32 {
        self.terms[t.index()].var_occurrences
    }

    pub fn max_var(&self, t: TermId) -> Option<u32> {
        self.terms[t.index()].max_var
    }

    pub fn is_ground(&self, t: TermId) -> bool {
        self.terms[t.index()].var_occurrences == 0
    }

    pub fn as_var(&self, t: TermId) -> Option<u32> {
        match self.node(t) {
            TermNode::Var(v) => Some(*v),
            TermNode::App(..) => None,
        }
    }

    pub fn is_var(&self, t: TermId) -> bool {
        self.as_var(t).is_some()
    }

    pub fn head(&self, t: TermId) -> Option<SymbolId> {
        match self.node(t) {
            TermNode::Var(_) => None,
            TermNode::App(f, _) => Some(*f),
        }
    }

    pub fn args(&self, t: TermId) -> &[TermId] {
        match self.node(t) {
            TermNode::Var(_) => &[],
            TermNode::App(_, args) => args,
        }
    }

    /// Appends every variable occurrence of `t` (with repetitions) to `out`.
    pub fn collect_vars(&self, t: TermId, out: &mut Vec<u32>) {
        if self.is_ground(t) {
            return;
        }
        match self.node(t) {
            TermNode::Var(v) => out.push(*v),
            TermNode::App(_, args) => {
                for &a in args.iter() {
                    self.collect_vars(a, out);
                }
            }
        }
    }

    pub fn occurs(&self, var: u32, t: TermId) -> bool {
        if self.is_ground(t) {
            return false;
        }
        match self.node(t) {
            TermNode::Var(v) => *v == var,
            TermNode::App(_, args) => args.iter().any(|&a| self.occurs(var, a)),
        }
    }

    pub fn subterm_at(&self, t: TermId, path: &[u32]) -> TermId {
        path.iter().fold(t, |cur, &i| self.args(cur)[i as usize])
    }

    /// `t` with the subterm at `path` replaced by `new`.
    pub fn replace_at(&mut self, t: TermId, path: &[u32], new: TermId) -> TermId {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let (f, mut args) = match self.node(t) {
                    TermNode::App(f, args) => (*f, args.to_vec()),
                    TermNode::Var(_) => panic!("path runs through a variable"),
                };
                args[i as usize] = self.replace_at(args[i as usize], rest, new);
                self.app(f, args)
            }
        }
    }

    /// Calls `f(path, subterm)` for `t` and all its subterms, pre-order.
    pub fn visit_subterms(
        &self,
        t: TermId,
        path: &mut Vec<u32>,
        f: &mut dyn FnMut(&[u32], TermId),
    ) {
        f(path, t);
        for (i, &a) in self.args(t).iter().enumerate() {
            path.push(i as u32);
            self.visit_subterms(a, path, f);
            path.pop();
        }
    }

    /// Total structural order independent of interning order.
    pub fn structural_cmp(&self, a: TermId, b: TermId) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if a == b {
            return Ordering::Equal;
        }
        match (self.node(a), self.node(b)) {
            (TermNode::Var(x), TermNode::Var(y)) => x.cmp(y),
            (TermNode::Var(_), TermNode::App(..)) => Ordering::Less,
            (TermNode::App(..), TermNode::Var(_)) => Ordering::Greater,
            (TermNode::App(f, xs), TermNode::App(g, ys)) => f
                .cmp(g)
                .then_with(|| xs.len().cmp(&ys.len()))
                .then_with(|| {
                    xs.iter()
                        .zip(ys.iter())
                        .map(|(&x, &y)| self.structural_cmp(x, y))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                }),
        }
    }

    pub fn display(&self, t: TermId) -> TermDisplay<'_> {
        TermDisplay {
            bank: self,
            term: t,
        }
    }
}

/// True when `name` can be printed without quotes in TPTP syntax.
pub fn is_lower_word(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn write_symbol_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_lower_word(name) || name.chars().all(|c| c.is_ascii_digit()) && !name.is_empty() {
        f.write_str(name)
    } else {
        write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

pub struct TermDisplay<'a> {
    bank: &'a TermBank,
    term: TermId,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bank.node(self.term) {
            TermNode::Var(v) => write!(f, "X{v}"),
            TermNode::App(sym, args) => {
                write_symbol_name(f, &self.bank.signature().symbol(*sym).name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, &a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", self.bank.display(a))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}
