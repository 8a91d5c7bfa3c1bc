//! Constraint propagation over the dimensions of a first-quadrant spectral
//! sequence.
//!
//! Each support position `x` has an `E_2` dimension and an `E_inf` dimension,
//! each possible differential `x -> y` (bidegree `(r, 1 - r)`, `r >= 2`) has a
//! rank, and each total degree has an abutment dimension. They satisfy
//!
//! ```text
//! e2[x] = einf[x] + sum of ranks of differentials into or out of x
//! a[n]  = sum of einf[x] over i + j = n
//! ```
//!
//! and every nonnegative integer solution is realized by some choice of ranks
//! page by page. Interval bounds are tightened to a fixed point; module-level
//! identifications are only read off in corner situations, where no
//! differential can touch the entry.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::page::{Bound, E2Page, EntryValue, Op, Target};
use crate::error::{HeckeError, Result};

const MAX_ROUNDS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// An antidiagonal with no possibly-nonzero `E_inf` term.
    ZeroAntidiagonal,
    /// An antidiagonal meeting a single entry that no differential touches.
    Corner,
    /// A differential that is the only possibly-nonzero one at both ends and
    /// must kill both entries.
    ExclusiveDifferential,
    Bounds,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::ZeroAntidiagonal => "zero-antidiagonal",
            Rule::Corner => "corner",
            Rule::ExclusiveDifferential => "exclusive-differential",
            Rule::Bounds => "bounds",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactKind {
    AbutmentZero { n: i64 },
    /// `abutment n ≅ E2(entry)` as modules.
    AbutmentIso { n: i64, entry: (i64, i64) },
    /// `E2(from) ≅ E2(to)` through the differential between them.
    EntryIso { from: (i64, i64), to: (i64, i64) },
    EntryZero { entry: (i64, i64) },
    Bound { target: TargetKey, lo: u64, hi: Option<u64> },
}

/// Serializable form of [`Target`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "at", rename_all = "kebab-case")]
pub enum TargetKey {
    E2 { i: i64, j: i64 },
    Abutment { n: i64 },
}

impl From<Target> for TargetKey {
    fn from(t: Target) -> TargetKey {
        match t {
            Target::E2(i, j) => TargetKey::E2 { i, j },
            Target::Abutment(n) => TargetKey::Abutment { n },
        }
    }
}

impl From<TargetKey> for Target {
    fn from(t: TargetKey) -> Target {
        match t {
            TargetKey::E2 { i, j } => Target::E2(i, j),
            TargetKey::Abutment { n } => Target::Abutment(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub kind: FactKind,
    pub rule: Rule,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contradiction {
    /// The quantity whose bounds crossed first.
    pub witness: String,
    /// A minimal set of givens that is already contradictory.
    pub conflict: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Propagation {
    pub facts: Vec<Fact>,
    pub contradiction: Option<Contradiction>,
    /// Final intervals for every entry and abutment degree in range.
    #[serde(skip)]
    pub intervals: BTreeMap<Target, (u64, Option<u64>)>,
}

impl Propagation {
    pub fn interval(&self, t: Target) -> (u64, Option<u64>) {
        match t {
            Target::E2(..) => self.intervals.get(&t).copied().unwrap_or((0, Some(0))),
            Target::Abutment(_) => self.intervals.get(&t).copied().unwrap_or((0, None)),
        }
    }

    /// Facts other than plain bounds.
    pub fn identifications(&self) -> Vec<&Fact> {
        self.facts.iter().filter(|f| !matches!(f.kind, FactKind::Bound { .. } | FactKind::EntryZero { .. })).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Interval {
    lo: u64,
    hi: Option<u64>,
}

impl Interval {
    const FREE: Interval = Interval { lo: 0, hi: None };

    fn meet(self, lo: u64, hi: Option<u64>) -> Interval {
        let hi = match (self.hi, hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Interval { lo: self.lo.max(lo), hi }
    }

    fn empty(self) -> bool {
        self.hi.is_some_and(|h| self.lo > h)
    }

    fn is_zero(self) -> bool {
        self.hi == Some(0)
    }
}

#[derive(Clone, Debug)]
struct Given {
    label: String,
    var: usize,
    lo: u64,
    hi: Option<u64>,
}

/// The variables and equations of a page.
struct System {
    names: Vec<String>,
    positions: Vec<(i64, i64)>,
    e2: Vec<usize>,
    einf: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
    abut: BTreeMap<i64, usize>,
    equations: Vec<Vec<(usize, bool)>>,
}

impl System {
    fn build(page: &E2Page) -> System {
        let positions = page.support();
        let index: BTreeMap<(i64, i64), usize> = positions.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let mut names = Vec::new();
        let mut e2 = Vec::new();
        let mut einf = Vec::new();
        for &(i, j) in &positions {
            e2.push(names.len());
            names.push(format!("E2 {i} {j}"));
            einf.push(names.len());
            names.push(format!("Einf {i} {j}"));
        }
        let max_row = page.rows.iter().copied().max().unwrap_or(0);
        let min_row = page.rows.iter().copied().min().unwrap_or(0);
        let mut edges = Vec::new();
        for (a, &(i, j)) in positions.iter().enumerate() {
            for r in 2..=(max_row - min_row + 1).max(2) {
                if let Some(&b) = index.get(&(i + r, j - r + 1)) {
                    edges.push((a, b, names.len()));
                    names.push(format!("d{r}: {i} {j} -> {} {}", i + r, j - r + 1));
                }
            }
        }
        let top = positions.iter().map(|&(i, j)| i + j).max().unwrap_or(0);
        let mut degrees: Vec<i64> = (0..=top.max(page.cd)).collect();
        degrees.extend(page.abutment.keys().copied());
        degrees.extend(page.bounds.iter().chain(page.assumptions.iter().map(|(_, b)| b)).filter_map(|b| match b.target {
            Target::Abutment(n) => Some(n),
            _ => None,
        }));
        degrees.sort();
        degrees.dedup();
        let mut abut = BTreeMap::new();
        for n in degrees {
            abut.insert(n, names.len());
            names.push(format!("abutment {n}"));
        }

        let mut equations = Vec::new();
        for a in 0..positions.len() {
            let mut eq = vec![(einf[a], true), (e2[a], false)];
            for &(x, y, k) in &edges {
                if x == a || y == a {
                    eq.push((k, true));
                }
            }
            equations.push(eq);
        }
        for (&n, &v) in &abut {
            let mut eq = vec![(v, true)];
            for (a, &(i, j)) in positions.iter().enumerate() {
                if i + j == n {
                    eq.push((einf[a], false));
                }
            }
            equations.push(eq);
        }
        System { names, positions, e2, einf, edges, abut, equations }
    }

    /// `None` for entries outside the support, which are zero.
    fn var_of(&self, t: Target) -> Option<usize> {
        match t {
            Target::E2(i, j) => self.positions.iter().position(|&x| x == (i, j)).map(|a| self.e2[a]),
            Target::Abutment(n) => self.abut.get(&n).copied(),
        }
    }

    /// Tightens intervals to a fixed point. Returns the first variable whose
    /// interval became empty.
    fn tighten(&self, iv: &mut [Interval]) -> Result<Option<usize>> {
        for (v, x) in iv.iter().enumerate() {
            if x.empty() {
                return Ok(Some(v));
            }
        }
        for _ in 0..MAX_ROUNDS {
            let mut changed = false;
            for eq in &self.equations {
                // sum of (sign) * x = 0, sign true meaning +.
                for (k, &(v, sv)) in eq.iter().enumerate() {
                    // x_v = sum over others of (-sign_v * sign_u) x_u
                    let mut lo: i128 = 0;
                    let mut hi: Option<i128> = Some(0);
                    for (l, &(u, su)) in eq.iter().enumerate() {
                        if l == k {
                            continue;
                        }
                        let same = su == sv;
                        let b = iv[u];
                        if same {
                            // contributes -x_u
                            match b.hi {
                                Some(h) => lo -= h as i128,
                                None => lo = i128::MIN / 4,
                            }
                            hi = hi.map(|h| h - b.lo as i128);
                        } else {
                            lo += b.lo as i128;
                            hi = match (hi, b.hi) {
                                (Some(h), Some(x)) => Some(h + x as i128),
                                _ => None,
                            };
                        }
                    }
                    let cur = iv[v];
                    let new_lo = if lo > cur.lo as i128 { lo as u64 } else { cur.lo };
                    let new_hi = match (cur.hi, hi) {
                        (_, Some(h)) if h < 0 => return Ok(Some(v)),
                        (Some(c), Some(h)) => Some(c.min(h as u64)),
                        (None, Some(h)) => Some(h as u64),
                        (c, None) => c,
                    };
                    let next = Interval { lo: new_lo, hi: new_hi };
                    if next != cur {
                        iv[v] = next;
                        changed = true;
                        if next.empty() {
                            return Ok(Some(v));
                        }
                    }
                }
            }
            if !changed {
                return Ok(None);
            }
        }
        Err(HeckeError::BudgetExceeded("propagation did not reach a fixed point".into()))
    }
}

fn bound_interval(op: Op, value: u64) -> (u64, Option<u64>) {
    match op {
        Op::Ge => (value, None),
        Op::Le => (0, Some(value)),
        Op::Eq => (value, Some(value)),
    }
}

fn givens(page: &E2Page, sys: &System, use_assumptions: bool) -> Result<(Vec<Given>, Vec<String>)> {
    let mut out = Vec::new();
    // Givens that are violated outright by the support (nonzero outside it).
    let mut outside = Vec::new();
    let mut push = |label: String, t: Target, lo: u64, hi: Option<u64>, out: &mut Vec<Given>| -> Result<()> {
        match sys.var_of(t) {
            Some(var) => out.push(Given { label, var, lo, hi }),
            None => {
                if lo > 0 {
                    outside.push(label);
                }
            }
        }
        Ok(())
    };
    for (&(i, j), v) in &page.entries {
        if let Some(d) = v.dim() {
            push(format!("E2 {i} {j} = {v}"), Target::E2(i, j), d, Some(d), &mut out)?;
        }
    }
    for (&n, v) in &page.abutment {
        if let Some(d) = v.dim() {
            push(format!("abutment {n} = {v}"), Target::Abutment(n), d, Some(d), &mut out)?;
        }
    }
    for b in &page.bounds {
        let (lo, hi) = bound_interval(b.op, b.value);
        push(b.to_string(), b.target, lo, hi, &mut out)?;
    }
    for (&n, _) in sys.abut.range(page.cd + 1..) {
        if !page.abutment.contains_key(&n) {
            push(format!("abutment {n} = 0 (above cd)"), Target::Abutment(n), 0, Some(0), &mut out)?;
        }
    }
    if use_assumptions {
        for (label, b) in &page.assumptions {
            let (lo, hi) = bound_interval(b.op, b.value);
            push(format!("assume {label}: {b}"), b.target, lo, hi, &mut out)?;
        }
    }
    Ok((out, outside))
}

fn run(sys: &System, active: &[&Given]) -> Result<(Vec<Interval>, Option<usize>)> {
    let mut iv = vec![Interval::FREE; sys.names.len()];
    for g in active {
        iv[g.var] = iv[g.var].meet(g.lo, g.hi);
    }
    let bad = sys.tighten(&mut iv)?;
    Ok((iv, bad))
}

fn show_interval(lo: u64, hi: Option<u64>) -> String {
    match hi {
        Some(h) if h == lo => format!("= {lo}"),
        Some(h) if lo == 0 => format!("<= {h}"),
        Some(h) => format!("in {lo}..={h}"),
        None => format!(">= {lo}"),
    }
}

/// Propagates the constraints of a page. Assumption lines are used only when
/// `use_assumptions` is set.
pub fn ss_propagate(page: &E2Page, use_assumptions: bool) -> Result<Propagation> {
    let sys = System::build(page);
    let (all, outside) = givens(page, &sys, use_assumptions)?;
    if let Some(label) = outside.first() {
        return Ok(Propagation {
            facts: Vec::new(),
            contradiction: Some(Contradiction { witness: "entry outside the support".into(), conflict: vec![label.clone()] }),
            intervals: BTreeMap::new(),
        });
    }
    let refs: Vec<&Given> = all.iter().collect();
    let (iv, bad) = run(&sys, &refs)?;
    if let Some(v) = bad {
        let mut keep: Vec<&Given> = refs.clone();
        let mut k = 0;
        while k < keep.len() {
            let mut trial = keep.clone();
            trial.remove(k);
            if run(&sys, &trial)?.1.is_some() {
                keep = trial;
            } else {
                k += 1;
            }
        }
        return Ok(Propagation {
            facts: Vec::new(),
            contradiction: Some(Contradiction {
                witness: sys.names[v].clone(),
                conflict: keep.iter().map(|g| g.label.clone()).collect(),
            }),
            intervals: BTreeMap::new(),
        });
    }

    let mut intervals = BTreeMap::new();
    for (a, &(i, j)) in sys.positions.iter().enumerate() {
        let x = iv[sys.e2[a]];
        intervals.insert(Target::E2(i, j), (x.lo, x.hi));
    }
    for (&n, &v) in &sys.abut {
        intervals.insert(Target::Abutment(n), (iv[v].lo, iv[v].hi));
    }

    let mut facts = Vec::new();
    let given_zero_abut = |n: i64| page.abutment.get(&n).and_then(EntryValue::dim) == Some(0);
    let edge_zero = |a: usize, except: Option<usize>| {
        sys.edges.iter().all(|&(x, y, k)| (x != a && y != a) || Some(k) == except || iv[k].is_zero())
    };

    for (&n, &v) in sys.abut.range(..=page.cd) {
        if n < 0 {
            continue;
        }
        if iv[v].is_zero() && !given_zero_abut(n) {
            facts.push(Fact {
                kind: FactKind::AbutmentZero { n },
                rule: Rule::ZeroAntidiagonal,
                statement: format!("abutment {n} = 0"),
            });
        }
        let on_diag: Vec<usize> = (0..sys.positions.len()).filter(|&a| sys.positions[a].0 + sys.positions[a].1 == n).collect();
        for &a in &on_diag {
            let others_zero = on_diag.iter().all(|&b| b == a || iv[sys.einf[b]].is_zero());
            if others_zero && edge_zero(a, None) {
                let (i, j) = sys.positions[a];
                facts.push(Fact {
                    kind: FactKind::AbutmentIso { n, entry: (i, j) },
                    rule: Rule::Corner,
                    statement: format!("abutment {n} ≅ E2({i},{j}){}", describe(page, i, j)),
                });
            }
        }
    }

    for &(x, y, k) in &sys.edges {
        if iv[sys.einf[x]].is_zero() && iv[sys.einf[y]].is_zero() && edge_zero(x, Some(k)) && edge_zero(y, Some(k)) {
            let (from, to) = (sys.positions[x], sys.positions[y]);
            facts.push(Fact {
                kind: FactKind::EntryIso { from, to },
                rule: Rule::ExclusiveDifferential,
                statement: format!(
                    "E2({},{}){} ≅ E2({},{}){}",
                    from.0,
                    from.1,
                    describe(page, from.0, from.1),
                    to.0,
                    to.1,
                    describe(page, to.0, to.1)
                ),
            });
        }
    }

    for (a, &(i, j)) in sys.positions.iter().enumerate() {
        if page.entry(i, j) != EntryValue::Unknown {
            continue;
        }
        let x = iv[sys.e2[a]];
        if x.is_zero() {
            facts.push(Fact {
                kind: FactKind::EntryZero { entry: (i, j) },
                rule: Rule::Bounds,
                statement: format!("E2({i},{j}) = 0"),
            });
        } else if x != Interval::FREE {
            facts.push(bound_fact(Target::E2(i, j), x));
        }
    }
    for (&n, &v) in sys.abut.range(..=page.cd) {
        let x = iv[v];
        if n >= 0 && !x.is_zero() && x != Interval::FREE && page.abutment.get(&n).and_then(EntryValue::dim).is_none() {
            facts.push(bound_fact(Target::Abutment(n), x));
        }
    }
    Ok(Propagation { facts, contradiction: None, intervals })
}

fn bound_fact(t: Target, x: Interval) -> Fact {
    Fact {
        kind: FactKind::Bound { target: t.into(), lo: x.lo, hi: x.hi },
        rule: Rule::Bounds,
        statement: format!("dim {t} {}", show_interval(x.lo, x.hi)),
    }
}

fn describe(page: &E2Page, i: i64, j: i64) -> String {
    match page.entry(i, j).name() {
        Some(name) => format!(" = {name}"),
        None => String::new(),
    }
}

/// Whether a page with the given bound added still propagates without
/// contradiction.
pub fn consistent_with(page: &E2Page, extra: Bound) -> Result<bool> {
    let mut p = page.clone();
    p.bounds.push(extra);
    Ok(ss_propagate(&p, false)?.contradiction.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl3() -> E2Page {
        E2Page::parse(
            "cd = 9\nrows = 2 3\ncols = 0..9\nE2 0 2 = triv\nE2 9 2 = triv\nassume split: E2 7 3 >= 2\n",
        )
        .unwrap()
    }

    #[test]
    fn gl3_corner_facts() {
        let prop = ss_propagate(&gl3(), false).unwrap();
        assert!(prop.contradiction.is_none());
        let ids: Vec<FactKind> = prop.identifications().into_iter().map(|f| f.kind.clone()).collect();
        assert_eq!(
            ids,
            vec![
                FactKind::AbutmentZero { n: 0 },
                FactKind::AbutmentZero { n: 1 },
                FactKind::AbutmentIso { n: 2, entry: (0, 2) },
                FactKind::EntryIso { from: (7, 3), to: (9, 2) },
            ]
        );
        assert_eq!(prop.interval(Target::E2(7, 3)), (1, Some(1)));
        assert_eq!(prop.interval(Target::E2(8, 3)), (0, Some(0)));
        assert_eq!(prop.interval(Target::E2(9, 3)), (0, Some(0)));
    }

    #[test]
    fn gl3_split_hypothesis_contradicts() {
        let prop = ss_propagate(&gl3(), true).unwrap();
        let c = prop.contradiction.unwrap();
        assert_eq!(
            c.conflict,
            vec![
                "E2 9 2 = triv".to_string(),
                "abutment 10 = 0 (above cd)".to_string(),
                "assume split: E2 7 3 >= 2".to_string(),
            ]
        );
    }

    #[test]
    fn single_row_degenerates() {
        let page = E2Page::parse("cd = 2\nrows = 0\nE2 0 0 = 1\nE2 1 0 = 2\nE2 2 0 = triv").unwrap();
        let prop = ss_propagate(&page, false).unwrap();
        for n in 0..=2 {
            assert!(prop.facts.iter().any(|f| matches!(f.kind, FactKind::AbutmentIso { n: m, entry } if m == n && entry == (n, 0))));
        }
        assert_eq!(prop.interval(Target::Abutment(1)), (2, Some(2)));
    }
}
