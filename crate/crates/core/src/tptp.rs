//! TPTP CNF input and output.
//!
//! Accepts `cnf(name, role, formula).` and `include('file').` statements with
//! `%` and `/* */` comments. Conjectures are read as ordinary clauses, since
//! CNF has no negation step. Errors carry the file and line/column.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::clause::{display_literals, Literal};
use crate::term::{Signature, SignatureError, SymbolKind, TermBank, TermId};

#[derive(Clone, Debug)]
pub struct InputClause {
    pub name: String,
    pub role: String,
    pub literals: Vec<Literal>,
}

#[derive(Debug)]
pub struct Problem {
    pub name: String,
    pub bank: TermBank,
    pub clauses: Vec<InputClause>,
    /// Files read, the main file first.
    pub source_files: Vec<PathBuf>,
}

impl Problem {
    pub fn literal_lists(&self) -> Vec<Vec<Literal>> {
        self.clauses.iter().map(|c| c.literals.clone()).collect()
    }

    /// Whether any clause contains an equality literal.
    pub fn has_equality(&self) -> bool {
        self.clauses
            .iter()
            .any(|c| c.literals.iter().any(|l| l.is_equality()))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{}{line}:{column}: {message}", file.as_ref().map(|f| format!("{}:", f.display())).unwrap_or_default())]
pub struct ParseError {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LowerWord(String),
    UpperWord(String),
    Quoted(String),
    DistinctObject(String),
    Number(String),
    Dollar(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Pipe,
    Tilde,
    Eq,
    Neq,
    Other(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LowerWord(s) | Tok::UpperWord(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "`'{s}'`"),
            Tok::DistinctObject(s) => write!(f, "`\"{s}\"`"),
            Tok::Dollar(s) => write!(f, "`${s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Other(c) => write!(f, "`{c}`"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            file: None,
            line,
            column,
            message: message.into(),
        }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let (line, column) = (self.line, self.column);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
                continue;
            }
            self.bump();
            let tok = match c {
                '/' if self.chars.peek() == Some(&'*') => {
                    self.bump();
                    let mut prev = ' ';
                    loop {
                        match self.bump() {
                            Some('/') if prev == '*' => break,
                            Some(c) => prev = c,
                            None => {
                                return Err(self.err(line, column, "unterminated block comment"))
                            }
                        }
                    }
                    continue;
                }
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '|' => Tok::Pipe,
                '~' => Tok::Tilde,
                '=' => Tok::Eq,
                '!' if self.chars.peek() == Some(&'=') => {
                    self.bump();
                    Tok::Neq
                }
                '\'' | '"' => {
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('\\') => match self.bump() {
                                Some(e) => s.push(e),
                                None => {
                                    return Err(self.err(line, column, "unterminated quoted name"))
                                }
                            },
                            Some(q) if q == c => break,
                            Some(ch) => s.push(ch),
                            None => return Err(self.err(line, column, "unterminated quoted name")),
                        }
                    }
                    if c == '\'' {
                        Tok::Quoted(s)
                    } else {
                        Tok::DistinctObject(s)
                    }
                }
                '$' => Tok::Dollar(self.word(String::new())),
                c if c.is_ascii_lowercase() => Tok::LowerWord(self.word(c.to_string())),
                c if c.is_ascii_uppercase() || c == '_' => Tok::UpperWord(self.word(c.to_string())),
                c if c.is_ascii_digit() => Tok::Number(self.word(c.to_string())),
                c => Tok::Other(c),
            };
            out.push(Spanned { tok, line, column });
        }
        Ok(out)
    }

    fn word(&mut self, mut s: String) -> String {
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}

/// Parse state shared across included files.
struct Loader<'a> {
    bank: TermBank,
    clauses: Vec<InputClause>,
    files: Vec<PathBuf>,
    include_dirs: &'a [PathBuf],
    stack: Vec<PathBuf>,
}

struct FileParser<'l, 'a> {
    loader: &'l mut Loader<'a>,
    toks: Vec<Spanned>,
    pos: usize,
    file: Option<PathBuf>,
    /// Directory includes are resolved against first.
    base: Option<PathBuf>,
    vars: HashMap<String, u32>,
    eof: (usize, usize),
}

enum LitOrFalse {
    Lit(Literal),
    False,
    True,
}

impl FileParser<'_, '_> {
    fn err_at(&self, i: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.toks.get(i).map_or(self.eof, |t| (t.line, t.column));
        ParseError {
            file: self.file.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        self.err_at(self.pos, message)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .map(|t| t.tok.clone())
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of input"))),
        }
    }

    fn run(&mut self) -> Result<(), ParseError> {
        while self.pos < self.toks.len() {
            let start = self.pos;
            let kw = match self.next()? {
                Tok::LowerWord(w) => w,
                t => return Err(self.err_at(start, format!("expected a statement, found {t}"))),
            };
            match kw.as_str() {
                "cnf" => self.cnf()?,
                "include" => self.include(start)?,
                "fof" | "tff" | "thf" | "tcf" | "tpi" => {
                    return Err(self.err_at(
                        start,
                        format!(
                            "`{kw}` formulas are not supported; only the CNF dialect is accepted"
                        ),
                    ))
                }
                _ => return Err(self.err_at(start, format!("unknown statement `{kw}`"))),
            }
        }
        Ok(())
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.next()? {
            Tok::LowerWord(s) | Tok::Quoted(s) | Tok::Number(s) | Tok::UpperWord(s) => Ok(s),
            t => Err(self.err_at(self.pos - 1, format!("expected a name, found {t}"))),
        }
    }

    fn cnf(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::LParen)?;
        let name = self.name()?;
        self.expect(Tok::Comma)?;
        let role = match self.next()? {
            Tok::LowerWord(r) => r,
            t => return Err(self.err_at(self.pos - 1, format!("expected a role, found {t}"))),
        };
        self.expect(Tok::Comma)?;
        self.vars.clear();
        let literals = self.formula()?;
        if self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            self.skip_general_terms()?;
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        if let Some(literals) = literals {
            self.loader.clauses.push(InputClause {
                name,
                role,
                literals,
            });
        }
        Ok(())
    }

    /// Skips annotations up to the closing parenthesis of the statement.
    fn skip_general_terms(&mut self) -> Result<(), ParseError> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                None => return Err(self.err("unexpected end of input in annotations")),
                Some(Tok::LParen | Tok::LBracket) => depth += 1,
                Some(Tok::RParen | Tok::RBracket) if depth == 0 => return Ok(()),
                Some(Tok::RParen | Tok::RBracket) => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// `None` for a clause containing `$true`.
    fn formula(&mut self) -> Result<Option<Vec<Literal>>, ParseError> {
        // CNF has no parenthesized terms, so a `(` here wraps the disjunction
        let parens = self.peek() == Some(&Tok::LParen);
        if parens {
            self.pos += 1;
        }
        let mut items = vec![(self.pos, self.literal()?)];
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            items.push((self.pos, self.literal()?));
        }
        if parens {
            self.expect(Tok::RParen)?;
        }
        let mut lits = Vec::new();
        let mut tautology = false;
        for (at, item) in &items {
            match item {
                LitOrFalse::Lit(l) => lits.push(*l),
                LitOrFalse::True => tautology = true,
                LitOrFalse::False if items.len() > 1 => {
                    return Err(self.err_at(*at, "`$false` is only allowed as the whole clause"));
                }
                LitOrFalse::False => {}
            }
        }
        Ok((!tautology).then_some(lits))
    }

    fn literal(&mut self) -> Result<LitOrFalse, ParseError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.pos += 1;
            let inner = if self.peek() == Some(&Tok::LParen) {
                self.pos += 1;
                let l = self.literal()?;
                self.expect(Tok::RParen)?;
                l
            } else {
                self.literal()?
            };
            return Ok(match inner {
                LitOrFalse::Lit(l) => LitOrFalse::Lit(l.negated()),
                LitOrFalse::False => LitOrFalse::True,
                LitOrFalse::True => LitOrFalse::False,
            });
        }
        let at = self.pos;
        match self.peek() {
            Some(Tok::Dollar(w)) if w == "false" => {
                self.pos += 1;
                return Ok(LitOrFalse::False);
            }
            Some(Tok::Dollar(w)) if w == "true" => {
                self.pos += 1;
                return Ok(LitOrFalse::True);
            }
            _ => {}
        }
        let head = self.raw_term()?;
        match self.peek() {
            Some(Tok::Eq) | Some(Tok::Neq) => {
                let positive = self.next()? == Tok::Eq;
                let rhs = self.raw_term()?;
                let l = self.build(head, SymbolKind::Function)?;
                let r = self.build(rhs, SymbolKind::Function)?;
                Ok(LitOrFalse::Lit(Literal::eq(positive, l, r)))
            }
            _ => {
                if let RawTerm::Var(..) = head {
                    return Err(self.err_at(at, "a variable cannot be used as an atom"));
                }
                let a = self.build(head, SymbolKind::Predicate)?;
                Ok(LitOrFalse::Lit(Literal::pred(true, a)))
            }
        }
    }

    fn raw_term(&mut self) -> Result<RawTerm, ParseError> {
        let at = self.pos;
        let name = match self.next()? {
            Tok::UpperWord(v) => return Ok(RawTerm::Var(v)),
            Tok::LowerWord(s) | Tok::Number(s) => s,
            Tok::Quoted(s) => s,
            Tok::DistinctObject(s) => format!("\"{s}\""),
            t => return Err(self.err_at(at, format!("expected a term, found {t}"))),
        };
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            args.push(self.raw_term()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                args.push(self.raw_term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(RawTerm::App { name, args, at })
    }

    fn build(&mut self, t: RawTerm, kind: SymbolKind) -> Result<TermId, ParseError> {
        match t {
            RawTerm::Var(v) => {
                let next = self.vars.len() as u32;
                let idx = *self.vars.entry(v).or_insert(next);
                Ok(self.loader.bank.var(idx))
            }
            RawTerm::App { name, args, at } => {
                let arity = args.len() as u32;
                let sym = self
                    .loader
                    .bank
                    .signature_mut()
                    .intern(&name, arity, kind)
                    .map_err(|e| self.err_at(at, signature_message(&e, kind)))?;
                let args = args
                    .into_iter()
                    .map(|a| self.build(a, SymbolKind::Function))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self.loader.bank.app(sym, args))
            }
        }
    }

    fn include(&mut self, start: usize) -> Result<(), ParseError> {
        self.expect(Tok::LParen)?;
        let target = match self.next()? {
            Tok::Quoted(s) => s,
            t => {
                return Err(self.err_at(
                    self.pos - 1,
                    format!("expected a quoted file name, found {t}"),
                ))
            }
        };
        if self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            self.skip_general_terms()?;
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        let candidates = self
            .base
            .iter()
            .chain(self.loader.include_dirs.iter())
            .map(|d| d.join(&target))
            .chain(std::iter::once(PathBuf::from(&target)));
        let Some(path) = candidates.into_iter().find(|p| p.is_file()) else {
            return Err(self.err_at(start, format!("cannot resolve include `{target}`")));
        };
        let canon = path.canonicalize().unwrap_or_else(|_| path.clone());
        if self.loader.stack.contains(&canon) {
            return Err(self.err_at(start, format!("include cycle through `{target}`")));
        }
        load_file(self.loader, &path)
    }
}

fn signature_message(e: &SignatureError, kind: SymbolKind) -> String {
    match e {
        SignatureError::ArityClash {
            name,
            expected,
            found,
        } => {
            format!("symbol `{name}` used with arity {found}, but earlier with arity {expected}")
        }
        SignatureError::KindClash { name } => {
            let as_what = match kind {
                SymbolKind::Predicate => "a predicate",
                SymbolKind::Function => "a function",
            };
            format!("symbol `{name}` used as {as_what}, but earlier as the other kind")
        }
    }
}

enum RawTerm {
    Var(String),
    App {
        name: String,
        args: Vec<RawTerm>,
        at: usize,
    },
}

fn parse_text(loader: &mut Loader, text: &str, file: Option<PathBuf>) -> Result<(), ParseError> {
    let toks = Lexer::new(text).tokenize().map_err(|mut e| {
        e.file = file.clone();
        e
    })?;
    let eof = (
        text.lines().count().max(1),
        text.lines().last().map_or(1, |s| s.chars().count() + 1),
    );
    let base = file
        .as_ref()
        .and_then(|f| f.parent().map(Path::to_path_buf));
    let mut p = FileParser {
        loader,
        toks,
        pos: 0,
        file,
        base,
        vars: HashMap::new(),
        eof,
    };
    p.run()
}

fn load_file(loader: &mut Loader, path: &Path) -> Result<(), ParseError> {
    let text = fs::read_to_string(path).map_err(|e| ParseError {
        file: Some(path.to_path_buf()),
        line: 0,
        column: 0,
        message: format!("cannot read file: {e}"),
    })?;
    let canon = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
    loader.stack.push(canon);
    loader.files.push(path.to_path_buf());
    let r = parse_text(loader, &text, Some(path.to_path_buf()));
    loader.stack.pop();
    r
}

/// Parses a bare disjunction of literals over an existing bank, with
/// variables numbered by first occurrence.
pub fn parse_literals(bank: &mut TermBank, text: &str) -> Result<Vec<Literal>, ParseError> {
    let mut loader = Loader {
        bank: std::mem::replace(bank, TermBank::new(Signature::new())),
        clauses: Vec::new(),
        files: Vec::new(),
        include_dirs: &[],
        stack: Vec::new(),
    };
    let r = parse_text(&mut loader, &format!("cnf(l, axiom, ({text}))."), None);
    *bank = loader.bank;
    r?;
    loader
        .clauses
        .pop()
        .map(|c| c.literals)
        .ok_or_else(|| ParseError {
            file: None,
            line: 1,
            column: 1,
            message: "literal list contains `$true`".into(),
        })
}

/// Parses CNF text; includes resolve against `include_dirs` and the current directory.
pub fn parse_str(text: &str, name: &str, include_dirs: &[PathBuf]) -> Result<Problem, ParseError> {
    let mut loader = Loader {
        bank: TermBank::new(Signature::new()),
        clauses: Vec::new(),
        files: Vec::new(),
        include_dirs,
        stack: Vec::new(),
    };
    parse_text(&mut loader, text, None)?;
    Ok(Problem {
        name: name.to_string(),
        bank: loader.bank,
        clauses: loader.clauses,
        source_files: loader.files,
    })
}

/// Parses a CNF file; includes resolve against its directory, then `include_dirs`.
pub fn parse_file(path: &Path, include_dirs: &[PathBuf]) -> Result<Problem, ParseError> {
    let mut loader = Loader {
        bank: TermBank::new(Signature::new()),
        clauses: Vec::new(),
        files: Vec::new(),
        include_dirs,
        stack: Vec::new(),
    };
    load_file(&mut loader, path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(Problem {
        name,
        bank: loader.bank,
        clauses: loader.clauses,
        source_files: loader.files,
    })
}

fn write_name(out: &mut String, name: &str) {
    let plain = crate::term::is_lower_word(name)
        || (!name.is_empty() && name.chars().all(|c| c.is_ascii_digit()));
    if plain {
        out.push_str(name);
    } else {
        let _ = write!(out, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"));
    }
}

/// Prints one clause as a CNF statement.
pub fn print_clause(bank: &TermBank, name: &str, role: &str, lits: &[Literal]) -> String {
    let mut out = String::from("cnf(");
    write_name(&mut out, name);
    let _ = write!(out, ", {role}, ({})).", display_literals(bank, lits));
    out
}

/// Prints a problem as CNF, one statement per line.
pub fn print_problem(problem: &Problem) -> String {
    let mut out = String::new();
    for c in &problem.clauses {
        out.push_str(&print_clause(&problem.bank, &c.name, &c.role, &c.literals));
        out.push('\n');
    }
    out
}
