//! `E_2` pages and their text format.
//!
//! ```text
//! # comments run to the end of the line
//! cd = 9                  # cohomological dimension; abutment vanishes above it
//! rows = 2 3              # rows in the support (default: rows of listed entries)
//! cols = 0..9             # columns in the support (default: 0..cd)
//! E2 0 2 = triv           # value: a dimension, a module name, name:dim, or ?
//! E2 7 3 >= 6             # bound on an entry: >=, <= or =
//! abutment 2 = ?          # the same for the abutment in total degree n
//! assume split: E2 7 3 >= 6
//! ```
//!
//! Every support position without an explicit value is unknown; positions
//! outside the support are zero. Assumptions are only used on request.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{HeckeError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryValue {
    Dim(u64),
    /// A named module of known dimension.
    Named { name: String, dim: u64 },
    Unknown,
}

impl EntryValue {
    pub fn dim(&self) -> Option<u64> {
        match self {
            EntryValue::Dim(d) | EntryValue::Named { dim: d, .. } => Some(*d),
            EntryValue::Unknown => None,
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            EntryValue::Named { name, .. } => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for EntryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryValue::Dim(d) => write!(f, "{d}"),
            EntryValue::Named { name, dim } => {
                if builtin_dim(name) == Some(*dim) {
                    write!(f, "{name}")
                } else {
                    write!(f, "{name}:{dim}")
                }
            }
            EntryValue::Unknown => write!(f, "?"),
        }
    }
}

/// Dimensions of the one-dimensional characters that may appear by name.
pub fn builtin_dim(name: &str) -> Option<u64> {
    match name {
        "triv" | "sign" | "sign*" => Some(1),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    E2(i64, i64),
    Abutment(i64),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::E2(i, j) => write!(f, "E2 {i} {j}"),
            Target::Abutment(n) => write!(f, "abutment {n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Ge,
    Le,
    Eq,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Ge => ">=",
            Op::Le => "<=",
            Op::Eq => "=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound {
    pub target: Target,
    pub op: Op,
    pub value: u64,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.target, self.op, self.value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Page {
    pub cd: i64,
    pub rows: Vec<i64>,
    pub cols: (i64, i64),
    pub entries: BTreeMap<(i64, i64), EntryValue>,
    pub abutment: BTreeMap<i64, EntryValue>,
    pub bounds: Vec<Bound>,
    pub assumptions: Vec<(String, Bound)>,
}

impl E2Page {
    pub fn new(cd: i64, rows: Vec<i64>, cols: (i64, i64)) -> E2Page {
        E2Page {
            cd,
            rows,
            cols,
            entries: BTreeMap::new(),
            abutment: BTreeMap::new(),
            bounds: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    pub fn in_support(&self, i: i64, j: i64) -> bool {
        self.rows.contains(&j) && (self.cols.0..=self.cols.1).contains(&i)
    }

    /// Support positions in row-major order.
    pub fn support(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for &j in &self.rows {
            for i in self.cols.0..=self.cols.1 {
                out.push((i, j));
            }
        }
        out
    }

    pub fn entry(&self, i: i64, j: i64) -> EntryValue {
        if !self.in_support(i, j) {
            return EntryValue::Dim(0);
        }
        self.entries.get(&(i, j)).cloned().unwrap_or(EntryValue::Unknown)
    }

    /// Alternating sum of the `E_2` dimensions, if they are all known.
    pub fn euler_characteristic(&self) -> Option<i64> {
        let mut acc = 0i64;
        for (i, j) in self.support() {
            let d = self.entry(i, j).dim()? as i64;
            acc += if (i + j) % 2 == 0 { d } else { -d };
        }
        Some(acc)
    }

    pub fn parse(text: &str) -> Result<E2Page> {
        parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }
}

fn err(line: usize, msg: impl Into<String>) -> HeckeError {
    HeckeError::Parse { line, msg: msg.into() }
}

fn parse_int(line: usize, s: &str) -> Result<i64> {
    s.parse().map_err(|_| err(line, format!("expected an integer, found `{s}`")))
}

pub(crate) fn parse_value(line: usize, s: &str) -> Result<EntryValue> {
    if s == "?" {
        return Ok(EntryValue::Unknown);
    }
    if let Ok(d) = s.parse::<u64>() {
        return Ok(EntryValue::Dim(d));
    }
    let (name, dim) = match s.split_once(':') {
        Some((n, d)) => (n, Some(d.parse::<u64>().map_err(|_| err(line, format!("bad dimension in `{s}`")))?)),
        None => (s, None),
    };
    let valid = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "_*.()".contains(c))
        && !name.starts_with(|c: char| c.is_ascii_digit());
    if !valid {
        return Err(err(line, format!("bad module name `{name}`")));
    }
    let dim = dim
        .or_else(|| builtin_dim(name))
        .ok_or_else(|| err(line, format!("module `{name}` needs a dimension, as `{name}:<dim>`")))?;
    Ok(EntryValue::Named { name: name.to_string(), dim })
}

fn parse_op(line: usize, s: &str) -> Result<Op> {
    match s {
        ">=" => Ok(Op::Ge),
        "<=" => Ok(Op::Le),
        "=" => Ok(Op::Eq),
        _ => Err(err(line, format!("expected =, >= or <=, found `{s}`"))),
    }
}

fn parse_target(line: usize, toks: &[&str]) -> Result<(Target, usize)> {
    match toks.first() {
        Some(&"E2") if toks.len() >= 3 => Ok((Target::E2(parse_int(line, toks[1])?, parse_int(line, toks[2])?), 3)),
        Some(&"abutment") if toks.len() >= 2 => Ok((Target::Abutment(parse_int(line, toks[1])?), 2)),
        _ => Err(err(line, "expected `E2 i j` or `abutment n`")),
    }
}

fn parse_bound(line: usize, toks: &[&str]) -> Result<Bound> {
    let (target, used) = parse_target(line, toks)?;
    if toks.len() != used + 2 {
        return Err(err(line, "expected `<target> <op> <value>`"));
    }
    let op = parse_op(line, toks[used])?;
    let value = toks[used + 1]
        .parse()
        .map_err(|_| err(line, format!("bound must be a dimension, found `{}`", toks[used + 1])))?;
    Ok(Bound { target, op, value })
}

/// Parses page lines, each tagged with its line number for error messages.
pub(crate) fn parse_lines<'a>(lines: impl IntoIterator<Item = (usize, &'a str)>) -> Result<E2Page> {
    let mut cd: Option<i64> = None;
    let mut rows: Option<Vec<i64>> = None;
    let mut cols: Option<(i64, i64)> = None;
    let mut page = E2Page::new(0, Vec::new(), (0, 0));
    for (ln, raw) in lines {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let spaced = text.replace(">=", " >= ").replace("<=", " <= ");
        let spaced = if spaced.contains(">=") || spaced.contains("<=") { spaced } else { spaced.replace('=', " = ") };
        let toks: Vec<&str> = spaced.split_whitespace().collect();
        match toks[0] {
            "cd" => {
                if toks.len() != 3 || toks[1] != "=" {
                    return Err(err(ln, "expected `cd = <d>`"));
                }
                cd = Some(parse_int(ln, toks[2])?);
            }
            "rows" => {
                if toks.len() < 3 || toks[1] != "=" {
                    return Err(err(ln, "expected `rows = <j> ...`"));
                }
                rows = Some(toks[2..].iter().map(|t| parse_int(ln, t)).collect::<Result<_>>()?);
            }
            "cols" => {
                let range = toks.get(2).and_then(|t| t.split_once(".."));
                match (toks.len(), toks.get(1), range) {
                    (3, Some(&"="), Some((a, b))) => cols = Some((parse_int(ln, a)?, parse_int(ln, b)?)),
                    _ => return Err(err(ln, "expected `cols = <a>..<b>`")),
                }
            }
            "assume" => {
                let rest = text["assume".len()..].trim();
                let (label, body) = rest.split_once(':').ok_or_else(|| err(ln, "expected `assume <label>: <bound>`"))?;
                let label = label.trim();
                if label.is_empty() || label.contains(char::is_whitespace) {
                    return Err(err(ln, "assumption labels are single words"));
                }
                let spaced = body.replace(">=", " >= ").replace("<=", " <= ");
                let spaced = if spaced.contains(">=") || spaced.contains("<=") { spaced } else { spaced.replace('=', " = ") };
                let btoks: Vec<&str> = spaced.split_whitespace().collect();
                page.assumptions.push((label.to_string(), parse_bound(ln, &btoks)?));
            }
            "E2" | "abutment" => {
                let (target, used) = parse_target(ln, &toks)?;
                if toks.len() != used + 2 {
                    return Err(err(ln, "expected `<target> <op> <value>`"));
                }
                let op = parse_op(ln, toks[used])?;
                if op == Op::Eq {
                    let value = parse_value(ln, toks[used + 1])?;
                    let slot = match target {
                        Target::E2(i, j) => page.entries.insert((i, j), value),
                        Target::Abutment(n) => page.abutment.insert(n, value),
                    };
                    if slot.is_some() {
                        return Err(err(ln, format!("{target} given twice")));
                    }
                } else {
                    page.bounds.push(parse_bound(ln, &toks)?);
                }
            }
            other => return Err(err(ln, format!("unknown directive `{other}`"))),
        }
    }
    page.cd = cd.ok_or_else(|| err(0, "missing `cd = <d>`"))?;
    page.rows = match rows {
        Some(r) => r,
        None => {
            let mut r: Vec<i64> = page.entries.keys().map(|&(_, j)| j).collect();
            r.sort();
            r.dedup();
            r
        }
    };
    page.cols = cols.unwrap_or((0, page.cd));
    for &(i, j) in page.entries.keys() {
        if !page.in_support(i, j) {
            return Err(err(0, format!("E2 {i} {j} lies outside the declared support")));
        }
    }
    Ok(page)
}

impl fmt::Display for E2Page {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cd = {}", self.cd)?;
        let rows: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        writeln!(f, "rows = {}", rows.join(" "))?;
        writeln!(f, "cols = {}..{}", self.cols.0, self.cols.1)?;
        for (&(i, j), v) in &self.entries {
            writeln!(f, "E2 {i} {j} = {v}")?;
        }
        for (n, v) in &self.abutment {
            writeln!(f, "abutment {n} = {v}")?;
        }
        for b in &self.bounds {
            writeln!(f, "{b}")?;
        }
        for (label, b) in &self.assumptions {
            writeln!(f, "assume {label}: {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GL3: &str = "
        # two rows
        cd = 9
        rows = 2 3
        E2 0 2 = triv
        E2 9 2 = triv   # top degree
        assume split: E2 7 3 >= 6
    ";

    #[test]
    fn parse_and_round_trip() {
        let page = E2Page::parse(GL3).unwrap();
        assert_eq!(page.cols, (0, 9));
        assert_eq!(page.entry(0, 2).name(), Some("triv"));
        assert_eq!(page.entry(5, 3), EntryValue::Unknown);
        assert_eq!(page.entry(5, 1), EntryValue::Dim(0));
        assert_eq!(page.assumptions.len(), 1);
        let again = E2Page::parse(&page.to_string()).unwrap();
        assert_eq!(page, again);
    }

    #[test]
    fn errors_carry_lines() {
        let e = E2Page::parse("cd = 3\nE2 0 x = 1").unwrap_err();
        assert_eq!(e, HeckeError::Parse { line: 2, msg: "expected an integer, found `x`".into() });
        assert!(E2Page::parse("cd = 3\nE2 0 0 = foo").is_err());
        assert!(E2Page::parse("cd = 3\nE2 0 0 = foo:2").is_ok());
        assert!(E2Page::parse("rows = 0").is_err());
    }
}
