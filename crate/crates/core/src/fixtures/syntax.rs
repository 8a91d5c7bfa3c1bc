//! Fixture files: syntax tree, parser and canonical printer.
//!
//! ```text
//! [fixture gl2.ps] cite "principal series of GL2" group GL2 infinite
//! param chi in chars
//! build
//!   let chi2 = inv(chi) * alpha
//!   table H top 4
//!     0 = ind(chi)
//!     when chi == conj(chi) * alpha: 1 = nonsplit(dual(ind(chi2)) by ind(chi)^2)
//!     3 = dual(ind(chi2))
//!   end
//!   page P
//!     cd = 9
//!     E2 0 2 = triv
//!   end
//! end
//! expect
//!   iso dual(dual(H[0])) ~ H[0]
//!   dualpair H H2 shift 3
//! end
//! ```
//!
//! Expressions: integers, names (`triv`, `sign`, `sign*`, `alpha`, `one`, `p`,
//! parameters and `let` bindings), calls, `+`, `-`, `*`, `^`, and table
//! lookups `H[n]`. Printing a parsed file and parsing it again gives the same
//! tree.

use std::fmt;

use crate::error::{HeckeError, Result};
use crate::spectral::page::{parse_lines, E2Page};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupTag {
    GL2,
    SL2,
    /// Only spectral-sequence bookkeeping; no algebra is built.
    GL3,
}

impl GroupTag {
    /// Dimension of the group over `Q_p`, the top cohomological degree.
    pub fn cd(self) -> usize {
        match self {
            GroupTag::GL2 => 4,
            GroupTag::SL2 => 3,
            GroupTag::GL3 => 9,
        }
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::GL2 => "GL2",
            GroupTag::SL2 => "SL2",
            GroupTag::GL3 => "GL3",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Name(String),
    Call(String, Vec<Expr>),
    Index(String, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Eq(Expr, Expr),
    Ne(Expr, Expr),
    /// `x in a..b`, with `b` excluded.
    In(Expr, Expr, Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cond {
    pub clauses: Vec<Clause>,
    /// `and` when set, `or` otherwise.
    pub all: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guarded<T> {
    pub when: Option<Cond>,
    pub item: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Range { name: String, lo: Expr, hi: Expr },
    Chars { name: String },
}

impl Param {
    pub fn name(&self) -> &str {
        match self {
            Param::Range { name, .. } | Param::Chars { name } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryExpr {
    Module(Expr),
    Nonsplit { quot: Expr, sub: Expr },
    Either(Vec<EntryExpr>),
    Dim(u64),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildItem {
    Let(Guarded<(String, Expr)>),
    Table { name: String, top: usize, rows: Vec<Guarded<(usize, EntryExpr)>> },
    Page { name: String, page: E2Page },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactSpec {
    Zero(i64),
    Corner(i64, (i64, i64)),
    Diff((i64, i64), (i64, i64)),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expect {
    Iso(Expr, Expr),
    NonIso(Expr, Expr),
    Dim(Expr, u64),
    Hom(Expr, Expr, u64),
    /// Composition factors, bottom first.
    Factors(Expr, Vec<Expr>),
    Simple(Expr),
    Poincare(String),
    DualPair(String, String, Expr),
    Ordinary(String, Vec<Expr>),
    Vanish(String, usize),
    Nonsplit { quot: Expr, sub: Expr },
    KCandidates { base: Expr, extra: Expr, target: Expr, lo: i64, hi: i64, consistent: Vec<i64> },
    /// Exactly these identifications, no more.
    Propagate(String, Vec<FactSpec>),
    /// Propagation with the page's assumptions is contradictory.
    Refute(String),
    /// Every fixture flagged `infinite` has nothing in its top degree.
    TopVanish,
}

impl Expect {
    pub fn kind(&self) -> &'static str {
        match self {
            Expect::Iso(..) => "iso",
            Expect::NonIso(..) => "noniso",
            Expect::Dim(..) => "dim",
            Expect::Hom(..) => "hom",
            Expect::Factors(..) => "factors",
            Expect::Simple(..) => "simple",
            Expect::Poincare(..) => "poincare",
            Expect::DualPair(..) => "dualpair",
            Expect::Ordinary(..) => "ordinary",
            Expect::Vanish(..) => "vanish",
            Expect::Nonsplit { .. } => "nonsplit",
            Expect::KCandidates { .. } => "kcandidates",
            Expect::Propagate(..) => "propagate",
            Expect::Refute(..) => "refute",
            Expect::TopVanish => "topvanish",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureSpec {
    pub id: String,
    pub cite: String,
    pub group: GroupTag,
    pub infinite: bool,
    pub params: Vec<Param>,
    pub build: Vec<BuildItem>,
    pub expect: Vec<Guarded<Expect>>,
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Sym(&'static str),
}

const SYMBOLS: [&str; 20] =
    ["..", "==", "!=", "->", "(", ")", "[", "]", "{", "}", ",", ";", "+", "-", "*", "^", "|", "~", "=", "?"];

fn lex(line: usize, s: &str) -> Result<Vec<Tok>> {
    let err = |msg: String| HeckeError::Parse { line, msg };
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c == '"' {
            let end = chars[k + 1..].iter().position(|&d| d == '"').ok_or_else(|| err("unterminated string".into()))?;
            out.push(Tok::Str(chars[k + 1..k + 1 + end].iter().collect()));
            k += end + 2;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            out.push(Tok::Int(text.parse().map_err(|_| err(format!("integer too large: {text}")))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_' || chars[k] == '.') {
                // `a..b` is a range, not part of a name
                if chars[k] == '.' && chars.get(k + 1) == Some(&'.') {
                    break;
                }
                k += 1;
            }
            let mut text: String = chars[start..k].iter().collect();
            if text == "sign" && chars.get(k) == Some(&'*') {
                text.push('*');
                k += 1;
            }
            out.push(Tok::Ident(text));
        } else {
            let rest: String = chars[k..chars.len().min(k + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| err(format!("unexpected character `{c}`")))?;
            out.push(Tok::Sym(sym));
            k += sym.len();
        }
    }
    Ok(out)
}

struct Cursor {
    line: usize,
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn new(line: usize, text: &str) -> Result<Cursor> {
        Ok(Cursor { line, toks: lex(line, text)?, pos: 0 })
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(HeckeError::Parse { line: self.line, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }


    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("unexpected trailing {t:?}")),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn word(&mut self, w: &str) -> Result<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.err(format!("expected `{w}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            t => self.err(format!("expected a name, found {t:?}")),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            t => self.err(format!("expected an integer, found {t:?}")),
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat_sym("-");
        let n = self.uint()? as i64;
        Ok(if neg { -n } else { n })
    }

    // sum := prod (('+' | '-') prod)*
    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.product()?;
        loop {
            if self.eat_sym("+") {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat_sym("-") {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while self.eat_sym("*") {
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat_sym("^") {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.atom()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n as i64))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat_sym("(") {
                    let args = self.call_args(&name)?;
                    Ok(Expr::Call(name, args))
                } else if self.eat_sym("[") {
                    let k = self.uint()? as usize;
                    self.sym("]")?;
                    Ok(Expr::Index(name, k))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            t => self.err(format!("expected an expression, found {t:?}")),
        }
    }

    /// Arguments after the opening parenthesis. `chi(e1, e2; c1, c2)` takes
    /// `;` between exponents and unramified values.
    fn call_args(&mut self, name: &str) -> Result<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat_sym(")") {
            return Ok(args);
        }
        match name {
            "chi" => {
                let mut exps = vec![self.expr()?];
                while self.eat_sym(",") {
                    exps.push(self.expr()?);
                }
                self.sym(";")?;
                let mut unram = vec![self.expr()?];
                while self.eat_sym(",") {
                    unram.push(self.expr()?);
                }
                if exps.len() != unram.len() {
                    return self.err("chi(...) needs as many unramified values as exponents");
                }
                args.extend(exps);
                args.extend(unram);
            }
            _ => {
                args.push(self.expr()?);
                while self.eat_sym(",") {
                    args.push(self.expr()?);
                }
            }
        }
        self.sym(")")?;
        Ok(args)
    }

    fn clause(&mut self) -> Result<Clause> {
        let lhs = self.expr()?;
        if self.eat_sym("==") {
            Ok(Clause::Eq(lhs, self.expr()?))
        } else if self.eat_sym("!=") {
            Ok(Clause::Ne(lhs, self.expr()?))
        } else if self.eat_word("in") {
            let lo = self.expr()?;
            self.sym("..")?;
            Ok(Clause::In(lhs, lo, self.expr()?))
        } else {
            self.err("expected `==`, `!=` or `in`")
        }
    }

    /// Clauses joined by `and` or by `or`.
    fn cond(&mut self) -> Result<Cond> {
        let mut clauses = vec![self.clause()?];
        let mut all = None;
        loop {
            let join = if self.eat_word("and") {
                true
            } else if self.eat_word("or") {
                false
            } else {
                break;
            };
            if all.is_some_and(|a| a != join) {
                return self.err("mixing `and` and `or` needs separate lines");
            }
            all = Some(join);
            clauses.push(self.clause()?);
        }
        Ok(Cond { clauses, all: all.unwrap_or(true) })
    }

    fn entry(&mut self) -> Result<EntryExpr> {
        if self.eat_sym("?") {
            return Ok(EntryExpr::Unknown);
        }
        if self.eat_word("dim") {
            return Ok(EntryExpr::Dim(self.uint()?));
        }
        if self.is_word("either") && matches!(self.toks.get(self.pos + 1), Some(Tok::Sym("("))) {
            self.pos += 2;
            let mut alts = vec![self.entry()?];
            while self.eat_sym("|") {
                alts.push(self.entry()?);
            }
            self.sym(")")?;
            return Ok(EntryExpr::Either(alts));
        }
        if self.is_word("nonsplit") && matches!(self.toks.get(self.pos + 1), Some(Tok::Sym("("))) {
            self.pos += 2;
            let quot = self.expr()?;
            self.word("by")?;
            let sub = self.expr()?;
            self.sym(")")?;
            return Ok(EntryExpr::Nonsplit { quot, sub });
        }
        Ok(EntryExpr::Module(self.expr()?))
    }

    fn pair(&mut self) -> Result<(i64, i64)> {
        let i = self.int()?;
        self.sym(",")?;
        Ok((i, self.int()?))
    }

    fn fact(&mut self) -> Result<FactSpec> {
        let kind = self.ident()?;
        self.sym("(")?;
        let f = match kind.as_str() {
            "zero" => FactSpec::Zero(self.int()?),
            "corner" => {
                let n = self.int()?;
                self.sym(";")?;
                FactSpec::Corner(n, self.pair()?)
            }
            "diff" => {
                let a = self.pair()?;
                self.sym(";")?;
                FactSpec::Diff(a, self.pair()?)
            }
            other => return self.err(format!("unknown fact `{other}`")),
        };
        self.sym(")")?;
        Ok(f)
    }

    fn expect(&mut self) -> Result<Expect> {
        let kind = self.ident()?;
        let e = match kind.as_str() {
            "iso" | "noniso" => {
                let a = self.expr()?;
                self.sym("~")?;
                let b = self.expr()?;
                if kind == "iso" {
                    Expect::Iso(a, b)
                } else {
                    Expect::NonIso(a, b)
                }
            }
            "dim" => {
                let a = self.expr()?;
                self.sym("=")?;
                Expect::Dim(a, self.uint()?)
            }
            "hom" => {
                let a = self.expr()?;
                self.sym("->")?;
                let b = self.expr()?;
                self.sym("=")?;
                Expect::Hom(a, b, self.uint()?)
            }
            "factors" => {
                let a = self.expr()?;
                self.sym("=")?;
                self.sym("[")?;
                let mut fs = Vec::new();
                if !self.eat_sym("]") {
                    fs.push(self.expr()?);
                    while self.eat_sym(",") {
                        fs.push(self.expr()?);
                    }
                    self.sym("]")?;
                }
                Expect::Factors(a, fs)
            }
            "simple" => Expect::Simple(self.expr()?),
            "poincare" => Expect::Poincare(self.ident()?),
            "dualpair" => {
                let a = self.ident()?;
                let b = self.ident()?;
                self.word("shift")?;
                Expect::DualPair(a, b, self.expr()?)
            }
            "ordinary" => {
                let t = self.ident()?;
                self.word("rows")?;
                let mut rows = vec![self.expr()?];
                while self.eat_sym("|") {
                    rows.push(self.expr()?);
                }
                Expect::Ordinary(t, rows)
            }
            "vanish" => {
                let t = self.ident()?;
                Expect::Vanish(t, self.uint()? as usize)
            }
            "nonsplit" => {
                let quot = self.expr()?;
                self.word("by")?;
                Expect::Nonsplit { quot, sub: self.expr()? }
            }
            "kcandidates" => {
                self.word("base")?;
                let base = self.expr()?;
                self.word("extra")?;
                let extra = self.expr()?;
                self.word("target")?;
                let target = self.expr()?;
                self.word("k")?;
                self.word("in")?;
                let lo = self.int()?;
                self.sym("..")?;
                let hi = self.int()?;
                self.word("consistent")?;
                self.sym("{")?;
                let mut consistent = Vec::new();
                if !self.eat_sym("}") {
                    consistent.push(self.int()?);
                    while self.eat_sym(",") {
                        consistent.push(self.int()?);
                    }
                    self.sym("}")?;
                }
                Expect::KCandidates { base, extra, target, lo, hi, consistent }
            }
            "propagate" => {
                let p = self.ident()?;
                self.sym("=")?;
                self.sym("{")?;
                let mut facts = Vec::new();
                if !self.eat_sym("}") {
                    facts.push(self.fact()?);
                    while self.eat_sym(",") {
                        facts.push(self.fact()?);
                    }
                    self.sym("}")?;
                }
                Expect::Propagate(p, facts)
            }
            "refute" => Expect::Refute(self.ident()?),
            "topvanish" => Expect::TopVanish,
            other => return self.err(format!("unknown expectation `{other}`")),
        };
        Ok(e)
    }
}

/// Splits `when <cond>: <rest>` into its parts.
fn split_when(line: usize, text: &str) -> Result<(Option<Cond>, &str)> {
    let Some(rest) = text.strip_prefix("when ") else {
        return Ok((None, text));
    };
    let (cond, body) = rest.split_once(':').ok_or(HeckeError::Parse { line, msg: "expected `when <cond>: ...`".into() })?;
    let mut c = Cursor::new(line, cond)?;
    let cond = c.cond()?;
    c.finish()?;
    Ok((Some(cond), body.trim()))
}

fn strip_comment(s: &str) -> &str {
    // `#` inside a string is not a comment
    let mut in_str = false;
    for (k, c) in s.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &s[..k],
            _ => {}
        }
    }
    s
}

/// Parses every fixture in a file.
pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureSpec>> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(k, l)| (k + 1, strip_comment(l).trim())).filter(|(_, l)| !l.is_empty()).collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < lines.len() {
        let (ln, header) = lines[k];
        if !header.starts_with("[fixture ") {
            return Err(HeckeError::Parse { line: ln, msg: "expected `[fixture <id>]`".into() });
        }
        let end = lines[k + 1..].iter().position(|(_, l)| l.starts_with("[fixture ")).map_or(lines.len(), |e| e + k + 1);
        out.push(parse_one(&lines[k..end])?);
        k = end;
    }
    Ok(out)
}

fn parse_header(ln: usize, header: &str) -> Result<(String, String, GroupTag, bool)> {
    let err = |msg: &str| HeckeError::Parse { line: ln, msg: msg.into() };
    let rest = header.strip_prefix("[fixture ").ok_or(err("expected `[fixture <id>]`"))?;
    let (id, rest) = rest.split_once(']').ok_or(err("missing `]`"))?;
    let id = id.trim();
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_') {
        return Err(err("fixture ids use letters, digits, `.` and `_`"));
    }
    let mut c = Cursor::new(ln, rest)?;
    c.word("cite")?;
    let cite = match c.peek().cloned() {
        Some(Tok::Str(s)) => {
            c.pos += 1;
            s
        }
        _ => return Err(err("expected a quoted citation")),
    };
    c.word("group")?;
    let group = match c.ident()?.as_str() {
        "GL2" => GroupTag::GL2,
        "SL2" => GroupTag::SL2,
        "GL3" => GroupTag::GL3,
        other => return Err(HeckeError::Parse { line: ln, msg: format!("unknown group `{other}`") }),
    };
    let infinite = c.eat_word("infinite");
    c.finish()?;
    Ok((id.to_string(), cite, group, infinite))
}

fn parse_one(lines: &[(usize, &str)]) -> Result<FixtureSpec> {
    let (ln, header) = lines[0];
    let (id, cite, group, infinite) = parse_header(ln, header)?;
    let mut spec = FixtureSpec { id, cite, group, infinite, params: Vec::new(), build: Vec::new(), expect: Vec::new() };
    let mut k = 1;
    let err = |line: usize, msg: String| HeckeError::Parse { line, msg };
    while k < lines.len() {
        let (ln, text) = lines[k];
        k += 1;
        if let Some(rest) = text.strip_prefix("param ") {
            let mut c = Cursor::new(ln, rest)?;
            let name = c.ident()?;
            c.word("in")?;
            if c.eat_word("chars") {
                spec.params.push(Param::Chars { name });
            } else {
                let lo = c.expr()?;
                c.sym("..")?;
                spec.params.push(Param::Range { name, lo, hi: c.expr()? });
            }
            c.finish()?;
        } else if text == "build" {
            loop {
                let Some(&(ln, text)) = lines.get(k) else { return Err(err(ln, "unterminated build block".into())) };
                k += 1;
                if text == "end" {
                    break;
                }
                if let Some(rest) = text.strip_prefix("table ") {
                    let mut c = Cursor::new(ln, rest)?;
                    let name = c.ident()?;
                    c.word("top")?;
                    let top = c.uint()? as usize;
                    c.finish()?;
                    let mut rows = Vec::new();
                    loop {
                        let Some(&(ln, text)) = lines.get(k) else { return Err(err(ln, "unterminated table".into())) };
                        k += 1;
                        if text == "end" {
                            break;
                        }
                        let (when, body) = split_when(ln, text)?;
                        let mut c = Cursor::new(ln, body)?;
                        let deg = c.uint()? as usize;
                        c.sym("=")?;
                        let entry = c.entry()?;
                        c.finish()?;
                        rows.push(Guarded { when, item: (deg, entry) });
                    }
                    spec.build.push(BuildItem::Table { name, top, rows });
                } else if let Some(rest) = text.strip_prefix("page ") {
                    let mut c = Cursor::new(ln, rest)?;
                    let name = c.ident()?;
                    c.finish()?;
                    let start = k;
                    while lines.get(k).is_some_and(|(_, t)| *t != "end") {
                        k += 1;
                    }
                    if k >= lines.len() {
                        return Err(err(ln, "unterminated page".into()));
                    }
                    let page = parse_lines(lines[start..k].iter().copied())?;
                    k += 1;
                    spec.build.push(BuildItem::Page { name, page });
                } else {
                    let (when, body) = split_when(ln, text)?;
                    let rest = body.strip_prefix("let ").ok_or_else(|| err(ln, format!("unknown build line `{body}`")))?;
                    let mut c = Cursor::new(ln, rest)?;
                    let name = c.ident()?;
                    c.sym("=")?;
                    let e = c.expr()?;
                    c.finish()?;
                    spec.build.push(BuildItem::Let(Guarded { when, item: (name, e) }));
                }
            }
        } else if text == "expect" {
            loop {
                let Some(&(ln, text)) = lines.get(k) else { return Err(err(ln, "unterminated expect block".into())) };
                k += 1;
                if text == "end" {
                    break;
                }
                let (when, body) = split_when(ln, text)?;
                let mut c = Cursor::new(ln, body)?;
                let e = c.expect()?;
                c.finish()?;
                spec.expect.push(Guarded { when, item: e });
            }
        } else {
            return Err(err(ln, format!("unexpected line `{text}`")));
        }
    }
    Ok(spec)
}

/// Parses a single expression, as used in fixture arguments.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut c = Cursor::new(0, text)?;
    let e = c.expr()?;
    c.finish()?;
    Ok(e)
}

impl FixtureSpec {
    pub fn parse(text: &str) -> Result<FixtureSpec> {
        let mut all = parse_fixtures(text)?;
        match all.len() {
            1 => Ok(all.pop().unwrap()),
            n => Err(HeckeError::Parse { line: 0, msg: format!("expected one fixture, found {n}") }),
        }
    }
}

// ---------------------------------------------------------------- printing

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(..) | Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    if prec(e) < min {
        format!("({e})")
    } else {
        e.to_string()
    }
}

fn join<T: fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Name(s) => write!(f, "{s}"),
            Expr::Index(s, k) => write!(f, "{s}[{k}]"),
            Expr::Call(name, args) if name == "chi" && !args.is_empty() && args.len() % 2 == 0 => {
                let h = args.len() / 2;
                write!(f, "chi({}; {})", join(&args[..h], ", "), join(&args[h..], ", "))
            }
            Expr::Call(name, args) => write!(f, "{name}({})", join(args, ", ")),
            // left associative: the right operand needs strictly higher precedence
            Expr::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{} * {}", wrap(a, 2), wrap(b, 3)),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, 3)),
            Expr::Pow(a, b) => write!(f, "{}^{}", wrap(a, 4), wrap(b, 4)),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Eq(a, b) => write!(f, "{a} == {b}"),
            Clause::Ne(a, b) => write!(f, "{a} != {b}"),
            Clause::In(x, a, b) => write!(f, "{x} in {a}..{b}"),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.clauses, if self.all { " and " } else { " or " }))
    }
}

fn when_prefix(c: &Option<Cond>) -> String {
    c.as_ref().map(|c| format!("when {c}: ")).unwrap_or_default()
}

impl fmt::Display for EntryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryExpr::Module(e) => write!(f, "{e}"),
            EntryExpr::Nonsplit { quot, sub } => write!(f, "nonsplit({quot} by {sub})"),
            EntryExpr::Either(alts) => write!(f, "either({})", join(alts, " | ")),
            EntryExpr::Dim(d) => write!(f, "dim {d}"),
            EntryExpr::Unknown => write!(f, "?"),
        }
    }
}

impl fmt::Display for FactSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactSpec::Zero(n) => write!(f, "zero({n})"),
            FactSpec::Corner(n, (i, j)) => write!(f, "corner({n}; {i}, {j})"),
            FactSpec::Diff((a, b), (c, d)) => write!(f, "diff({a}, {b}; {c}, {d})"),
        }
    }
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expect::Iso(a, b) => write!(f, "iso {a} ~ {b}"),
            Expect::NonIso(a, b) => write!(f, "noniso {a} ~ {b}"),
            Expect::Dim(a, n) => write!(f, "dim {a} = {n}"),
            Expect::Hom(a, b, n) => write!(f, "hom {a} -> {b} = {n}"),
            Expect::Factors(a, fs) => write!(f, "factors {a} = [{}]", join(fs, ", ")),
            Expect::Simple(a) => write!(f, "simple {a}"),
            Expect::Poincare(t) => write!(f, "poincare {t}"),
            Expect::DualPair(a, b, s) => write!(f, "dualpair {a} {b} shift {s}"),
            Expect::Ordinary(t, rows) => write!(f, "ordinary {t} rows {}", join(rows, " | ")),
            Expect::Vanish(t, n) => write!(f, "vanish {t} {n}"),
            Expect::Nonsplit { quot, sub } => write!(f, "nonsplit {quot} by {sub}"),
            Expect::KCandidates { base, extra, target, lo, hi, consistent } => write!(
                f,
                "kcandidates base {base} extra {extra} target {target} k in {lo}..{hi} consistent {{{}}}",
                join(consistent, ", ")
            ),
            Expect::Propagate(p, facts) => write!(f, "propagate {p} = {{{}}}", join(facts, ", ")),
            Expect::Refute(p) => write!(f, "refute {p}"),
            Expect::TopVanish => write!(f, "topvanish"),
        }
    }
}

impl fmt::Display for FixtureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[fixture {}] cite \"{}\" group {}", self.id, self.cite, self.group)?;
        if self.infinite {
            write!(f, " infinite")?;
        }
        writeln!(f)?;
        for p in &self.params {
            match p {
                Param::Range { name, lo, hi } => writeln!(f, "param {name} in {lo}..{hi}")?,
                Param::Chars { name } => writeln!(f, "param {name} in chars")?,
            }
        }
        writeln!(f, "build")?;
        for item in &self.build {
            match item {
                BuildItem::Let(g) => writeln!(f, "  {}let {} = {}", when_prefix(&g.when), g.item.0, g.item.1)?,
                BuildItem::Table { name, top, rows } => {
                    writeln!(f, "  table {name} top {top}")?;
                    for r in rows {
                        writeln!(f, "    {}{} = {}", when_prefix(&r.when), r.item.0, r.item.1)?;
                    }
                    writeln!(f, "  end")?;
                }
                BuildItem::Page { name, page } => {
                    writeln!(f, "  page {name}")?;
                    for line in page.to_string().lines() {
                        writeln!(f, "    {line}")?;
                    }
                    writeln!(f, "  end")?;
                }
            }
        }
        writeln!(f, "end")?;
        writeln!(f, "expect")?;
        for e in &self.expect {
            writeln!(f, "  {}{}", when_prefix(&e.when), e.item)?;
        }
        writeln!(f, "end")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[fixture demo.one] cite "a demo" group SL2 infinite   # trailing comment
param r in 0..p
build
  let s = p - 1 - r
  when r == 0 or r == p - 1: let m = ss(0) + ss(p - 1)
  table H top 3
    0 = ss(r)
    1 = either(ind(one) + triv | nonsplit(triv by ind(one)))
    2 = dim 2
    3 = ?
  end
  page P
    cd = 3
    E2 0 0 = triv
  end
end
expect
  iso dual(ss(s)) ~ H[0]
  when r in 1..p - 1: dim ss(r)^2 = 2
  factors ind(chi(0; 1)) = [triv, sign]
  kcandidates base ind(one) + sign* extra ind(alpha) target tchar(one)^2 k in 0..3 consistent {0}
  propagate P = {zero(1), corner(0; 0, 0), diff(7, 3; 9, 2)}
  hom (a + b) * c -> -x^2 = 1
end
"#;

    #[test]
    fn round_trip() {
        let spec = FixtureSpec::parse(SAMPLE).unwrap();
        assert_eq!(spec.params.len(), 1);
        assert_eq!(spec.build.len(), 4);
        assert_eq!(spec.expect.len(), 6);
        let printed = spec.to_string();
        assert_eq!(FixtureSpec::parse(&printed).unwrap(), spec, "{printed}");
    }

    #[test]
    fn operator_printing() {
        for src in ["a - (b - c)", "(a - b) - c", "-(a + b)^2", "(a * b)^c", "a * (b * c)", "x - -1"] {
            let mut c = Cursor::new(1, src).unwrap();
            let e = c.expr().unwrap();
            c.finish().unwrap();
            let mut again = Cursor::new(1, &e.to_string()).unwrap();
            assert_eq!(again.expr().unwrap(), e, "{src} printed as {e}");
        }
    }

    #[test]
    fn errors_have_lines() {
        let bad = "[fixture x] cite \"c\" group GL2\nexpect\n  iso a\nend\n";
        assert!(matches!(FixtureSpec::parse(bad), Err(HeckeError::Parse { line: 3, .. })));
        assert!(FixtureSpec::parse("[fixture x] cite \"c\" group GL5\n").is_err());
    }
}
