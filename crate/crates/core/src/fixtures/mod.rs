//! Example computations recorded as fixture files, and the runner that checks
//! them.
//!
//! The files under `crates/core/fixtures/` are embedded at build time; setting
//! `HECKE_FIXTURE_DIR` loads `*.fix` from another directory instead. The file
//! grammar is described in [`syntax`].

pub mod eval;
pub mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::character::GroupCharacter;
use crate::error::{HeckeError, Result};
use crate::module::{extensions, hom_space, is_isomorphic, HeckeModule, Isomorphism};
use crate::report::{overall, Check, Status};
use crate::spectral::{
    duality_shift_check, k_candidates, ordinary_check, poincare_check, ss_propagate, CohomologyTable, E2Page, FactKind,
    TableEntry,
};

pub use eval::{Ctx, Value};
pub use syntax::{parse_expr, parse_fixtures, BuildItem, EntryExpr, Expect, Expr, FactSpec, FixtureSpec, GroupTag, Param};

include!(concat!(env!("OUT_DIR"), "/registry.rs"));

pub const FIXTURE_DIR_VAR: &str = "HECKE_FIXTURE_DIR";

/// Largest module for which composition series are computed.
const FACTOR_BUDGET: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    pub p: u32,
    /// `q = p^e`.
    pub e: u32,
}

impl Default for Config {
    fn default() -> Config {
        Config { p: 5, e: 1 }
    }
}

impl Config {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Seed for the randomized action spot-checks.
    pub seed: u64,
    /// Propagate pages together with their `assume` lines.
    pub assume_split: bool,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions { seed: 0x5eed, assume_split: false }
    }
}

/// `(file name, contents)` of every fixture file in use.
pub fn sources() -> Result<Vec<(String, String)>> {
    let Some(dir) = std::env::var_os(FIXTURE_DIR_VAR) else {
        return Ok(EMBEDDED.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect());
    };
    let io = |e: std::io::Error| HeckeError::InvalidArgument(format!("{}: {e}", dir.to_string_lossy()));
    let mut out = Vec::new();
    for entry in std::fs::read_dir(&dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|x| x == "fix") {
            let text = std::fs::read_to_string(&path).map_err(io)?;
            out.push((path.file_name().unwrap().to_string_lossy().into_owned(), text));
        }
    }
    out.sort();
    Ok(out)
}

/// Every registered fixture, validated and sorted by id.
pub fn registry() -> Result<Vec<FixtureSpec>> {
    let mut all = Vec::new();
    for (name, text) in sources()? {
        let specs = parse_fixtures(&text).map_err(|e| HeckeError::Fixture { id: name.clone(), msg: e.to_string() })?;
        all.extend(specs);
    }
    all.sort_by(|a, b| a.id.cmp(&b.id));
    for w in all.windows(2) {
        if w[0].id == w[1].id {
            return Err(HeckeError::Fixture { id: w[0].id.clone(), msg: "registered twice".into() });
        }
    }
    for spec in &all {
        validate(spec).map_err(|msg| HeckeError::Fixture { id: spec.id.clone(), msg })?;
    }
    Ok(all)
}

pub fn fixture_ids() -> Result<Vec<String>> {
    Ok(registry()?.into_iter().map(|s| s.id).collect())
}

// ---------------------------------------------------------------- validation

const BUILTIN_NAMES: [&str; 6] = ["triv", "sign", "sign*", "alpha", "one", "p"];

fn arity_ok(group: GroupTag, name: &str, n: usize) -> Option<bool> {
    Some(match name {
        "ind" | "tchar" | "dual" | "R" | "inv" | "conj" | "omega" | "unr" => n == 1,
        "twist" => n == 2,
        "ss" => n == 1 || (n == 2 && group == GroupTag::GL2),
        "chi" => n == 2 * if group == GroupTag::GL2 { 2 } else { 1 },
        _ => return None,
    })
}

struct Names<'a> {
    group: GroupTag,
    vars: BTreeSet<&'a str>,
    tables: BTreeSet<&'a str>,
    pages: BTreeSet<&'a str>,
}

impl Names<'_> {
    fn expr(&self, e: &Expr) -> std::result::Result<(), String> {
        match e {
            Expr::Int(_) => Ok(()),
            Expr::Name(n) => {
                if self.vars.contains(n.as_str()) || BUILTIN_NAMES.contains(&n.as_str()) {
                    Ok(())
                } else {
                    Err(format!("unknown name `{n}`"))
                }
            }
            Expr::Index(t, _) => {
                if self.tables.contains(t.as_str()) {
                    Ok(())
                } else {
                    Err(format!("unknown table `{t}`"))
                }
            }
            Expr::Call(f, args) => {
                match arity_ok(self.group, f, args.len()) {
                    None => return Err(format!("unknown function `{f}`")),
                    Some(false) => return Err(format!("`{f}` does not take {} argument(s) for {}", args.len(), self.group)),
                    Some(true) => {}
                }
                args.iter().try_for_each(|a| self.expr(a))
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Pow(a, b) => {
                self.expr(a)?;
                self.expr(b)
            }
            Expr::Neg(a) => self.expr(a),
        }
    }

    fn cond(&self, c: &Option<syntax::Cond>) -> std::result::Result<(), String> {
        let Some(c) = c else { return Ok(()) };
        for clause in &c.clauses {
            match clause {
                syntax::Clause::Eq(a, b) | syntax::Clause::Ne(a, b) => {
                    self.expr(a)?;
                    self.expr(b)?;
                }
                syntax::Clause::In(x, a, b) => {
                    self.expr(x)?;
                    self.expr(a)?;
                    self.expr(b)?;
                }
            }
        }
        Ok(())
    }

    fn entry(&self, e: &EntryExpr) -> std::result::Result<(), String> {
        match e {
            EntryExpr::Module(x) => self.expr(x),
            EntryExpr::Nonsplit { quot, sub } => {
                self.expr(quot)?;
                self.expr(sub)
            }
            EntryExpr::Either(alts) => alts.iter().try_for_each(|a| self.entry(a)),
            EntryExpr::Dim(_) | EntryExpr::Unknown => Ok(()),
        }
    }

    fn table(&self, t: &str) -> std::result::Result<(), String> {
        if self.tables.contains(t) {
            Ok(())
        } else {
            Err(format!("unknown table `{t}`"))
        }
    }

    fn page(&self, t: &str) -> std::result::Result<(), String> {
        if self.pages.contains(t) {
            Ok(())
        } else {
            Err(format!("unknown page `{t}`"))
        }
    }
}

/// Every expectation must be answerable by a library operation: names,
/// functions, tables and pages it mentions resolve, and bookkeeping-only
/// groups carry no module expressions.
fn validate(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let mut names = Names { group: spec.group, vars: BTreeSet::new(), tables: BTreeSet::new(), pages: BTreeSet::new() };
    let bookkeeping = spec.group == GroupTag::GL3;
    for p in &spec.params {
        if bookkeeping {
            return Err("GL3 fixtures take no parameters".into());
        }
        if let Param::Range { lo, hi, .. } = p {
            names.expr(lo)?;
            names.expr(hi)?;
        }
        names.vars.insert(p.name());
    }
    for item in &spec.build {
        match item {
            BuildItem::Let(g) => {
                if bookkeeping {
                    return Err("GL3 fixtures build pages only".into());
                }
                names.cond(&g.when)?;
                names.expr(&g.item.1)?;
                names.vars.insert(&g.item.0);
            }
            BuildItem::Table { name, top, rows } => {
                if bookkeeping {
                    return Err("GL3 fixtures build pages only".into());
                }
                for r in rows {
                    names.cond(&r.when)?;
                    if r.item.0 > *top {
                        return Err(format!("table {name}: degree {} above top {top}", r.item.0));
                    }
                    names.entry(&r.item.1)?;
                }
                if !names.tables.insert(name) {
                    return Err(format!("table `{name}` defined twice"));
                }
            }
            BuildItem::Page { name, .. } => {
                if !names.pages.insert(name) {
                    return Err(format!("page `{name}` defined twice"));
                }
            }
        }
    }
    for g in &spec.expect {
        names.cond(&g.when)?;
        let e = &g.item;
        let module_expect = !matches!(e, Expect::Propagate(..) | Expect::Refute(..) | Expect::TopVanish);
        if bookkeeping && module_expect {
            return Err(format!("`{}` needs an algebra; GL3 fixtures are bookkeeping only", e.kind()));
        }
        match e {
            Expect::Iso(a, b) | Expect::NonIso(a, b) | Expect::Hom(a, b, _) => {
                names.expr(a)?;
                names.expr(b)?;
            }
            Expect::Nonsplit { quot, sub } => {
                names.expr(quot)?;
                names.expr(sub)?;
            }
            Expect::Dim(a, _) | Expect::Simple(a) => names.expr(a)?,
            Expect::Factors(a, fs) => {
                names.expr(a)?;
                fs.iter().try_for_each(|f| names.expr(f))?;
            }
            Expect::Poincare(t) | Expect::Vanish(t, _) => names.table(t)?,
            Expect::DualPair(a, b, shift) => {
                names.table(a)?;
                names.table(b)?;
                names.expr(shift)?;
            }
            Expect::Ordinary(t, rows) => {
                names.table(t)?;
                if rows.len() > 2 {
                    return Err("ordinary checks take at most two rows".into());
                }
                rows.iter().try_for_each(|r| names.expr(r))?;
            }
            Expect::KCandidates { base, extra, target, lo, hi, .. } => {
                if lo > hi || *lo < 0 {
                    return Err(format!("bad k range {lo}..{hi}"));
                }
                names.expr(base)?;
                names.expr(extra)?;
                names.expr(target)?;
            }
            Expect::Propagate(pg, _) | Expect::Refute(pg) => names.page(pg)?,
            Expect::TopVanish => {}
        }
    }
    if spec.cite.trim().is_empty() {
        return Err("missing citation".into());
    }
    Ok(())
}

// ---------------------------------------------------------------- loading

/// A fixture id split into its registry name, parameter arguments and an
/// optional table degree (`gl2.steinberg.h1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureRef {
    pub base: String,
    pub args: Vec<(String, Expr)>,
    pub degree: Option<usize>,
}

fn degree_suffix(s: &str) -> Option<usize> {
    let d = s.strip_prefix('h')?;
    if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    d.parse().ok()
}

fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (k, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses `name`, `name(x=..., y=...)` and either form followed by `.hN`.
pub fn parse_ref(id: &str, known: &[String]) -> Result<FixtureRef> {
    let bad = |msg: &str| HeckeError::InvalidArgument(format!("fixture id `{id}`: {msg}"));
    let id = id.trim();
    let (head, args, tail) = match id.find('(') {
        Some(open) => {
            let close = id.rfind(')').ok_or_else(|| bad("missing `)`"))?;
            (&id[..open], Some(&id[open + 1..close]), &id[close + 1..])
        }
        None => (id, None, ""),
    };
    let mut base = head.to_string();
    let mut degree = None;
    if let Some(rest) = tail.strip_prefix('.') {
        degree = Some(degree_suffix(rest).ok_or_else(|| bad("expected `.h<degree>` after the arguments"))?);
    } else if !tail.is_empty() {
        return Err(bad("unexpected text after the arguments"));
    }
    if args.is_none() && !known.contains(&base) {
        if let Some((b, last)) = head.rsplit_once('.') {
            if let Some(d) = degree_suffix(last) {
                base = b.to_string();
                degree = Some(d);
            }
        }
    }
    if !known.contains(&base) {
        return Err(HeckeError::UnknownFixture(id.to_string()));
    }
    let mut parsed = Vec::new();
    if let Some(args) = args.filter(|a| !a.trim().is_empty()) {
        for a in split_args(args) {
            let (name, value) = a.split_once('=').ok_or_else(|| bad("arguments are `name=value`"))?;
            parsed.push((name.trim().to_string(), parse_expr(value)?));
        }
    }
    Ok(FixtureRef { base, args: parsed, degree })
}

/// One assignment of the fixture parameters with everything it built.
#[derive(Clone)]
pub struct Instance {
    /// `r=2`, `chi=...`; empty without parameters.
    pub label: String,
    pub vars: BTreeMap<String, Value>,
    pub tables: BTreeMap<String, CohomologyTable>,
    pub pages: BTreeMap<String, E2Page>,
}

pub struct Fixture {
    pub spec: FixtureSpec,
    pub config: Config,
    pub ctx: Ctx,
    pub instances: Vec<Instance>,
    /// Degree selected by a `.hN` suffix, read from the first table.
    pub degree: Option<usize>,
}

impl Fixture {
    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn scope<'a>(&'a self, inst: &Instance) -> eval::Scope<'a> {
        let mut s = eval::Scope::new(&self.ctx);
        s.vars = inst.vars.clone();
        s.tables = inst.tables.clone();
        s.pages = inst.pages.clone();
        s
    }

    fn first_table(&self) -> Option<&str> {
        self.spec.build.iter().find_map(|b| match b {
            BuildItem::Table { name, .. } => Some(name.as_str()),
            _ => None,
        })
    }

    /// The entries selected by the `.hN` suffix, one per instance.
    pub fn selected_entries(&self) -> Vec<(String, TableEntry)> {
        let (Some(d), Some(t)) = (self.degree, self.first_table()) else { return Vec::new() };
        self.instances.iter().filter_map(|i| Some((i.label.clone(), i.tables.get(t)?.entry(d)))).collect()
    }

    /// Every module the fixture constructs: module-valued bindings and the
    /// pieces of every table entry, labelled by where they come from.
    pub fn modules(&self) -> Vec<(String, HeckeModule)> {
        let mut out = Vec::new();
        for inst in &self.instances {
            let tag = if inst.label.is_empty() { String::new() } else { format!("[{}] ", inst.label) };
            for (name, v) in &inst.vars {
                if let Value::Module(m) = v {
                    out.push((format!("{tag}{name}"), m.clone()));
                }
            }
            for (name, t) in &inst.tables {
                for d in 0..=t.top {
                    for (k, m) in t.entry(d).modules().into_iter().enumerate() {
                        if m.dim() > 0 {
                            out.push((format!("{tag}{name}[{d}].{k}"), m));
                        }
                    }
                }
            }
        }
        out
    }
}

fn build_error(id: &str, label: &str, e: HeckeError) -> HeckeError {
    let at = if label.is_empty() { String::new() } else { format!(" at {label}") };
    HeckeError::Fixture { id: id.to_string(), msg: format!("construction failed{at}: {e}") }
}

/// Parameter assignments: the cartesian product of every parameter's range,
/// restricted to the values given in `args`.
fn assignments(spec: &FixtureSpec, ctx: &Ctx, args: &[(String, Expr)]) -> Result<Vec<Vec<(String, Value)>>> {
    let mut out: Vec<Vec<(String, Value)>> = vec![Vec::new()];
    let scope = eval::Scope::new(ctx);
    for (name, _) in args {
        if !spec.params.iter().any(|p| p.name() == name) {
            return Err(HeckeError::InvalidArgument(format!("`{}` has no parameter `{name}`", spec.id)));
        }
    }
    for p in &spec.params {
        let values: Vec<Value> = match args.iter().find(|(n, _)| n == p.name()) {
            Some((_, e)) => vec![scope.eval(e)?],
            None => match p {
                Param::Range { lo, hi, .. } => (scope.int(lo)?..scope.int(hi)?).map(Value::Int).collect(),
                Param::Chars { .. } => ctx.characters()?.into_iter().map(Value::Char).collect(),
            },
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut a = prefix.clone();
                    a.push((p.name().to_string(), v.clone()));
                    a
                })
            })
            .collect();
    }
    Ok(out)
}

fn build_instance(spec: &FixtureSpec, ctx: &Ctx, binding: Vec<(String, Value)>) -> Result<Instance> {
    let label = binding.iter().map(|(n, v)| format!("{n}={}", v.show())).collect::<Vec<_>>().join(", ");
    let mut scope = eval::Scope::new(ctx);
    scope.vars.extend(binding);
    let run = |scope: &mut eval::Scope| -> Result<()> {
        for item in &spec.build {
            match item {
                BuildItem::Let(g) => {
                    if scope.holds(&g.when)? {
                        let v = scope.eval(&g.item.1)?;
                        scope.vars.insert(g.item.0.clone(), v);
                    }
                }
                BuildItem::Table { name, top, rows } => {
                    let mut t = CohomologyTable::new(ctx.alg()?, *top);
                    for r in rows {
                        if scope.holds(&r.when)? {
                            t.set(r.item.0, scope.entry(&r.item.1)?)?;
                        }
                    }
                    scope.tables.insert(name.clone(), t);
                }
                BuildItem::Page { name, page } => {
                    scope.pages.insert(name.clone(), page.clone());
                }
            }
        }
        Ok(())
    };
    run(&mut scope).map_err(|e| build_error(&spec.id, &label, e))?;
    Ok(Instance { label, vars: scope.vars, tables: scope.tables, pages: scope.pages })
}

/// Builds every module a fixture needs, for each parameter assignment.
pub fn load_fixture(id: &str, config: Config) -> Result<Fixture> {
    let specs = registry()?;
    let known: Vec<String> = specs.iter().map(|s| s.id.clone()).collect();
    let r = parse_ref(id, &known)?;
    let spec = specs.into_iter().find(|s| s.id == r.base).expect("parse_ref checks membership");
    if let Some(d) = r.degree {
        let top = spec.build.iter().find_map(|b| match b {
            BuildItem::Table { top, .. } => Some(*top),
            _ => None,
        });
        match top {
            None => return Err(HeckeError::InvalidArgument(format!("{id}: fixture has no table to select from"))),
            Some(top) if d > top => {
                return Err(HeckeError::InvalidArgument(format!("{id}: degree {d} above the top degree {top}")))
            }
            _ => {}
        }
    }
    let ctx = Ctx::new(spec.group, config.p, config.e).map_err(|e| build_error(&spec.id, "", e))?;
    let mut instances = Vec::new();
    for binding in assignments(&spec, &ctx, &r.args).map_err(|e| build_error(&spec.id, "", e))? {
        instances.push(build_instance(&spec, &ctx, binding)?);
    }
    Ok(Fixture { spec, config, ctx, instances, degree: r.degree })
}

// ---------------------------------------------------------------- checking

fn iso_check(name: String, a: &HeckeModule, b: &HeckeModule, want: bool) -> Result<Check> {
    Ok(match (is_isomorphic(a, b)?, want) {
        (Isomorphism::Isomorphic(w), true) => Check::pass(name, format!("intertwiner of rank {}", w.rank())),
        (Isomorphism::Isomorphic(_), false) => Check::fail(name, "the modules are isomorphic"),
        (Isomorphism::NotIsomorphic(why), true) => Check::fail(name, why),
        (Isomorphism::NotIsomorphic(why), false) => Check::pass(name, why),
        (Isomorphism::Inconclusive(why), _) => Check::inconclusive(name, why),
    })
}

fn fact_matches(spec: &FactSpec, kind: &FactKind) -> bool {
    match (spec, kind) {
        (FactSpec::Zero(n), FactKind::AbutmentZero { n: m }) => n == m,
        (FactSpec::Corner(n, e), FactKind::AbutmentIso { n: m, entry }) => n == m && e == entry,
        (FactSpec::Diff(a, b), FactKind::EntryIso { from, to }) => a == from && b == to,
        _ => false,
    }
}

fn top_vanish_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for spec in registry()?.iter().filter(|s| s.infinite) {
        let cd = spec.group.cd();
        for item in &spec.build {
            let BuildItem::Table { name, top, rows } = item else { continue };
            let label = format!("{} {name}: H^{cd} = 0", spec.id);
            if *top != cd {
                out.push(Check::fail(label, format!("table stops at degree {top}, not {cd}")));
                continue;
            }
            let bad: Vec<String> = rows
                .iter()
                .filter(|r| r.item.0 == cd)
                .filter(|r| !matches!(r.item.1, EntryExpr::Module(Expr::Int(0)) | EntryExpr::Dim(0)))
                .map(|r| r.item.1.to_string())
                .collect();
            out.push(if bad.is_empty() {
                Check::pass(label, "no entry in the top degree")
            } else {
                Check::fail(label, format!("top degree holds {}", bad.join(", ")))
            });
        }
    }
    Ok(out)
}

fn expectation(fx: &Fixture, scope: &eval::Scope, e: &Expect, opts: &RunOptions) -> Result<Vec<Check>> {
    let name = e.to_string();
    let datum = || fx.ctx.datum();
    let xi = || -> Result<GroupCharacter> { Ok(GroupCharacter::trivial(fx.ctx.alg()?)) };
    let prefixed = |checks: Vec<Check>| -> Vec<Check> {
        checks.into_iter().map(|mut c| {
            c.name = format!("{name}: {}", c.name);
            c
        }).collect()
    };
    Ok(match e {
        Expect::Iso(a, b) => vec![iso_check(name, &scope.module(a)?, &scope.module(b)?, true)?],
        Expect::NonIso(a, b) => vec![iso_check(name, &scope.module(a)?, &scope.module(b)?, false)?],
        Expect::Dim(a, n) => {
            let d = scope.module(a)?.dim();
            vec![Check::from_bool(name, d as u64 == *n, format!("dim {d}"))]
        }
        Expect::Hom(a, b, n) => {
            let d = hom_space(&scope.module(a)?, &scope.module(b)?)?.dim();
            vec![Check::from_bool(name, d as u64 == *n, format!("dim Hom = {d}"))]
        }
        Expect::Factors(a, fs) => {
            let got = scope.module(a)?.composition_factors(FACTOR_BUDGET)?;
            if got.len() != fs.len() {
                vec![Check::fail(name, format!("{} factors", got.len()))]
            } else {
                let mut status = Status::Pass;
                let mut notes = Vec::new();
                for (k, (g, f)) in got.iter().zip(fs).enumerate() {
                    match is_isomorphic(g, &scope.module(f)?)? {
                        Isomorphism::Isomorphic(_) => {}
                        Isomorphism::NotIsomorphic(why) => {
                            status = Status::Fail;
                            notes.push(format!("factor {k}: {why}"));
                        }
                        Isomorphism::Inconclusive(why) => {
                            if status == Status::Pass {
                                status = Status::Inconclusive;
                            }
                            notes.push(format!("factor {k}: {why}"));
                        }
                    }
                }
                let detail = if notes.is_empty() { format!("{} factors in order", got.len()) } else { notes.join("; ") };
                vec![Check::new(name, status, detail)]
            }
        }
        Expect::Simple(a) => {
            let m = scope.module(a)?;
            vec![Check::from_bool(name, m.is_simple(), format!("dim {}", m.dim()))]
        }
        Expect::Poincare(t) => prefixed(poincare_check(&scope.tables[t], &xi()?)?),
        Expect::DualPair(a, b, shift) => {
            let shift = usize::try_from(scope.int(shift)?).map_err(|_| HeckeError::InvalidArgument("negative shift".into()))?;
            prefixed(duality_shift_check(&scope.tables[a], &scope.tables[b], shift, &xi()?)?)
        }
        Expect::Ordinary(t, rows) => {
            let ord = rows.iter().map(|r| scope.levi_module(r)).collect::<Result<Vec<_>>>()?;
            prefixed(ordinary_check(datum()?, &ord, &scope.tables[t])?)
        }
        Expect::Vanish(t, n) => {
            let entry = scope.tables[t].entry(*n);
            let check = match &entry {
                TableEntry::Module(m) if m.dim() == 0 => Check::pass(name, "zero"),
                TableEntry::Dim(0) => Check::pass(name, "zero"),
                TableEntry::Unknown => Check::inconclusive(name, "entry unknown"),
                other => Check::fail(name, format!("entry is {}", other.describe())),
            };
            vec![check]
        }
        Expect::Nonsplit { quot, sub } => {
            let ext = extensions(&scope.module(sub)?, &scope.module(quot)?)?;
            vec![Check::from_bool(name, ext.ext_dim() > 0, format!("dim Ext^1 = {}", ext.ext_dim()))]
        }
        Expect::KCandidates { base, extra, target, lo, hi, consistent } => {
            let ks = (*lo as usize)..(*hi as usize);
            let got = k_candidates(datum()?, &scope.module(base)?, &scope.module(extra)?, &scope.levi_module(target)?, ks)?;
            let ok: Vec<i64> = got.iter().filter(|(_, b)| *b).map(|(k, _)| *k as i64).collect();
            let mut want = consistent.clone();
            want.sort_unstable();
            vec![Check::from_bool(name, ok == want, format!("consistent k: {ok:?}"))]
        }
        Expect::Propagate(pg, facts) => {
            let prop = ss_propagate(&scope.pages[pg], opts.assume_split)?;
            if let Some(c) = &prop.contradiction {
                vec![Check::fail(name, format!("contradiction at {}; conflicting givens: {}", c.witness, c.conflict.join("; ")))]
            } else {
                let found = prop.identifications();
                let missing: Vec<String> =
                    facts.iter().filter(|f| !found.iter().any(|g| fact_matches(f, &g.kind))).map(|f| f.to_string()).collect();
                let extra: Vec<&str> = found
                    .iter()
                    .filter(|g| !facts.iter().any(|f| fact_matches(f, &g.kind)))
                    .map(|g| g.statement.as_str())
                    .collect();
                let listing = found.iter().map(|g| format!("{} [{}]", g.statement, g.rule)).collect::<Vec<_>>().join("; ");
                if missing.is_empty() && extra.is_empty() {
                    vec![Check::pass(name, listing)]
                } else {
                    vec![Check::fail(name, format!("missing: {missing:?}; unexpected: {extra:?}"))]
                }
            }
        }
        Expect::Refute(pg) => {
            let prop = ss_propagate(&scope.pages[pg], true)?;
            match &prop.contradiction {
                Some(c) => vec![Check::pass(name, format!("contradiction at {}; conflicting givens: {}", c.witness, c.conflict.join("; ")))],
                None => vec![Check::fail(name, "the assumptions are consistent with the page")],
            }
        }
        Expect::TopVanish => prefixed(top_vanish_checks()?),
    })
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// `m(T_u T_v) = m(T_u) m(T_v)` on a few seeded basis pairs of one of the
/// instance's modules.
fn action_spot_check(fx: &Fixture, inst: &Instance, seed: u64) -> Result<Option<Check>> {
    let Some(alg) = fx.ctx.alg.as_ref() else { return Ok(None) };
    let modules: Vec<HeckeModule> = inst
        .vars
        .values()
        .filter_map(|v| if let Value::Module(m) = v { Some(m.clone()) } else { None })
        .chain(inst.tables.values().flat_map(|t| (0..=t.top).flat_map(|d| t.entry(d).modules())))
        .filter(|m| m.dim() > 0 && m.algebra().same_descriptor(alg))
        .collect();
    if modules.is_empty() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(&fx.spec.id) ^ fnv(&inst.label).rotate_left(17));
    let basis = alg.basis_elements(2, &[-1, 0, 1]);
    let m = &modules[rng.random_range(0..modules.len())];
    for _ in 0..3 {
        let u = &basis[rng.random_range(0..basis.len())];
        let v = &basis[rng.random_range(0..basis.len())];
        let lhs = m.act(&alg.basis(u.clone()).mul(&alg.basis(v.clone()))?)?;
        let rhs = m.evaluate(u).mul(&m.evaluate(v));
        if lhs != rhs {
            return Ok(Some(Check::fail("action spot-check", format!("T_{u} T_{v} on a module of dim {}", m.dim()))));
        }
    }
    Ok(Some(Check::pass("action spot-check", format!("3 seeded products on a module of dim {}", m.dim()))))
}

/// Runs every expectation of every instance. Checks are labelled with the
/// instance and carry the fixture citation.
pub fn run_fixture(fx: &Fixture, opts: &RunOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for inst in &fx.instances {
        let scope = fx.scope(inst);
        let tag = if inst.label.is_empty() { String::new() } else { format!("[{}] ", inst.label) };
        let mut local = Vec::new();
        for g in &fx.spec.expect {
            if !scope.holds(&g.when)? {
                continue;
            }
            let produced = expectation(fx, &scope, &g.item, opts)
                .map_err(|e| HeckeError::Fixture { id: fx.spec.id.clone(), msg: format!("{tag}`{}`: {e}", g.item) })?;
            local.extend(produced);
        }
        local.extend(action_spot_check(fx, inst, opts.seed)?);
        for mut c in local {
            c.name = format!("{tag}{}", c.name);
            c.cite = fx.spec.cite.clone();
            checks.push(c);
        }
    }
    Ok(checks)
}

// ---------------------------------------------------------------- reports

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub p: u32,
    pub q: u64,
    pub group: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub config: ConfigEcho,
    /// Wall-clock time; left out of structured output unless requested so
    /// that reports stay byte-identical between runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

pub fn verify(id: &str, config: Config, opts: &RunOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let fx = load_fixture(id, config)?;
    let checks = run_fixture(&fx, opts)?;
    Ok(VerificationReport {
        id: id.to_string(),
        status: overall(&checks),
        config: ConfigEcho { p: config.p, q: config.q(), group: fx.spec.group.to_string() },
        checks,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    })
}

/// Verifies several fixtures on separate threads; reports come back in the
/// order of `ids`.
pub fn verify_many(ids: &[String], config: Config, opts: &RunOptions) -> Vec<Result<VerificationReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|id| s.spawn(move || verify(id, config, opts))).collect();
        handles
            .into_iter()
            .zip(ids)
            .map(|(h, id)| {
                h.join().unwrap_or_else(|_| {
                    Err(HeckeError::Internal(format!("verification of `{id}` panicked")))
                })
            })
            .collect()
    })
}
