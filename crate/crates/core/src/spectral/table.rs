//! Cohomology tables and the checks run on them: Poincaré-type duality,
//! duality between two tables with a degree shift, and comparison with the
//! abutment of the ordinary-parts spectral sequence.

use std::collections::BTreeMap;

use crate::algebra::Algebra;
use crate::character::GroupCharacter;
use crate::error::{HeckeError, Result};
use crate::functors::{right_adjoint, LeviDatum};
use crate::module::{extensions, is_isomorphic, HeckeModule, Isomorphism};
use crate::report::{Check, Status};

use super::torus::torus_cohomology;

#[derive(Clone)]
pub enum TableEntry {
    Module(HeckeModule),
    /// Some nonsplit extension `0 -> sub -> E -> quot -> 0`, not determined further.
    Extension { sub: HeckeModule, quot: HeckeModule },
    /// One of several candidates (modules or extensions).
    Either(Vec<TableEntry>),
    Dim(usize),
    Unknown,
}

/// A single determined alternative of an entry.
#[derive(Clone)]
enum Alt {
    Module(HeckeModule),
    Extension { sub: HeckeModule, quot: HeckeModule },
}

impl Alt {
    fn dim(&self) -> usize {
        match self {
            Alt::Module(m) => m.dim(),
            Alt::Extension { sub, quot } => sub.dim() + quot.dim(),
        }
    }

    fn dual_twist(&self, xi: &GroupCharacter) -> Result<Alt> {
        Ok(match self {
            Alt::Module(m) => Alt::Module(m.dual()?.twist(xi)?),
            Alt::Extension { sub, quot } => Alt::Extension { sub: quot.dual()?.twist(xi)?, quot: sub.dual()?.twist(xi)? },
        })
    }
}

impl TableEntry {
    fn alternatives(&self) -> Option<Vec<Alt>> {
        match self {
            TableEntry::Module(m) => Some(vec![Alt::Module(m.clone())]),
            TableEntry::Extension { sub, quot } => Some(vec![Alt::Extension { sub: sub.clone(), quot: quot.clone() }]),
            TableEntry::Either(es) => {
                let mut out = Vec::new();
                for e in es {
                    out.extend(e.alternatives()?);
                }
                Some(out)
            }
            TableEntry::Dim(_) | TableEntry::Unknown => None,
        }
    }

    fn dims(&self) -> Option<Vec<usize>> {
        match self {
            TableEntry::Dim(d) => Some(vec![*d]),
            _ => self.alternatives().map(|a| a.iter().map(Alt::dim).collect()),
        }
    }

    /// The module, if the entry is a single determined module.
    pub fn module(&self) -> Option<&HeckeModule> {
        match self {
            TableEntry::Module(m) => Some(m),
            _ => None,
        }
    }

    /// Every module mentioned by the entry, including extension data.
    pub fn modules(&self) -> Vec<HeckeModule> {
        match self {
            TableEntry::Module(m) => vec![m.clone()],
            TableEntry::Extension { sub, quot } => vec![sub.clone(), quot.clone()],
            TableEntry::Either(es) => es.iter().flat_map(TableEntry::modules).collect(),
            _ => Vec::new(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TableEntry::Module(m) => m.describe(),
            TableEntry::Extension { sub, quot } => format!("nonsplit({} by {})", quot.describe(), sub.describe()),
            TableEntry::Either(es) => es.iter().map(TableEntry::describe).collect::<Vec<_>>().join(" | "),
            TableEntry::Dim(d) => format!("dim {d}"),
            TableEntry::Unknown => "?".into(),
        }
    }
}

/// Degrees `0..=top`; degrees without an entry hold the zero module.
#[derive(Clone)]
pub struct CohomologyTable {
    pub alg: Algebra,
    pub top: usize,
    pub entries: BTreeMap<usize, TableEntry>,
}

impl CohomologyTable {
    pub fn new(alg: &Algebra, top: usize) -> CohomologyTable {
        CohomologyTable { alg: alg.clone(), top, entries: BTreeMap::new() }
    }

    pub fn set(&mut self, degree: usize, entry: TableEntry) -> Result<()> {
        if degree > self.top {
            return Err(HeckeError::InvalidArgument(format!("degree {degree} above the top degree {}", self.top)));
        }
        if entry.modules().iter().any(|m| !m.algebra().same_descriptor(&self.alg)) {
            return Err(HeckeError::DescriptorMismatch(format!("entry in degree {degree}")));
        }
        self.entries.insert(degree, entry);
        Ok(())
    }

    pub fn entry(&self, degree: usize) -> TableEntry {
        self.entries.get(&degree).cloned().unwrap_or_else(|| TableEntry::Module(HeckeModule::zero(&self.alg)))
    }
}

enum Verdict {
    Match(String),
    Differ(String),
    Open(String),
}

fn iso_verdict(a: &HeckeModule, b: &HeckeModule) -> Result<Verdict> {
    Ok(match is_isomorphic(a, b)? {
        Isomorphism::Isomorphic(w) => Verdict::Match(format!("intertwiner of rank {}", w.rank())),
        Isomorphism::NotIsomorphic(why) => Verdict::Differ(why),
        Isomorphism::Inconclusive(why) => Verdict::Open(why),
    })
}

/// Compares two determined alternatives. Two nonsplit extensions match when
/// their subobjects and quotients match; a module never matches a nonsplit
/// extension of its own summands.
fn compare_alt(x: &Alt, y: &Alt) -> Result<Verdict> {
    match (x, y) {
        (Alt::Module(a), Alt::Module(b)) => iso_verdict(a, b),
        (Alt::Extension { sub: s1, quot: q1 }, Alt::Extension { sub: s2, quot: q2 }) => {
            match (iso_verdict(s1, s2)?, iso_verdict(q1, q2)?) {
                (Verdict::Match(_), Verdict::Match(_)) => {
                    let ext = extensions(s1, q1)?.ext_dim();
                    Ok(Verdict::Match(format!("nonsplit extensions with matching sub and quotient (Ext^1 of dim {ext})")))
                }
                (Verdict::Differ(w), _) => Ok(Verdict::Differ(format!("subobjects differ: {w}"))),
                (_, Verdict::Differ(w)) => Ok(Verdict::Differ(format!("quotients differ: {w}"))),
                _ => Ok(Verdict::Open("extension data undecided".into())),
            }
        }
        (Alt::Module(m), Alt::Extension { sub, quot }) | (Alt::Extension { sub, quot }, Alt::Module(m)) => {
            if m.dim() != sub.dim() + quot.dim() {
                return Ok(Verdict::Differ(format!("dimensions {} and {}", m.dim(), sub.dim() + quot.dim())));
            }
            match iso_verdict(m, &sub.direct_sum(quot)?)? {
                Verdict::Match(_) => Ok(Verdict::Differ("module is the split extension".into())),
                _ => Ok(Verdict::Open("module against an undetermined nonsplit extension".into())),
            }
        }
    }
}

/// Compares `a` with `twist(dual(b), xi)`; for candidate lists any matching
/// pair passes.
fn compare_dual(name: String, a: &TableEntry, b: &TableEntry, xi: &GroupCharacter) -> Result<Check> {
    match (a.alternatives(), b.alternatives()) {
        (Some(xs), Some(ys)) => {
            let mut notes = Vec::new();
            let mut open = false;
            for (ix, x) in xs.iter().enumerate() {
                for (iy, y) in ys.iter().enumerate() {
                    match compare_alt(x, &y.dual_twist(xi)?)? {
                        Verdict::Match(w) => return Ok(Check::pass(name, format!("candidates {ix}/{iy}: {w}"))),
                        Verdict::Differ(w) => notes.push(format!("{ix}/{iy}: {w}")),
                        Verdict::Open(w) => {
                            open = true;
                            notes.push(format!("{ix}/{iy}: {w}"))
                        }
                    }
                }
            }
            let status = if open { Status::Inconclusive } else { Status::Fail };
            Ok(Check::new(name, status, notes.join("; ")))
        }
        _ => match (a.dims(), b.dims()) {
            (Some(da), Some(db)) if !da.iter().any(|d| db.contains(d)) => {
                Ok(Check::fail(name, format!("dimensions {da:?} and {db:?} cannot match")))
            }
            (Some(_), Some(_)) => Ok(Check::inconclusive(name, "only dimensions are known; they agree")),
            _ => Ok(Check::inconclusive(name, format!("gap: {} vs {}", a.describe(), b.describe()))),
        },
    }
}

/// `H^i ≅ (H^{d-i})^dual(xi)` for every `i`.
pub fn poincare_check(table: &CohomologyTable, xi: &GroupCharacter) -> Result<Vec<Check>> {
    let d = table.top;
    (0..=d)
        .map(|i| compare_dual(format!("H^{i} vs dual H^{}", d - i), &table.entry(i), &table.entry(d - i), xi))
        .collect()
}

/// `a^i ≅ (b^{dim_p - i})^dual(xi)` for `0 <= i <= dim_p`.
pub fn duality_shift_check(
    a: &CohomologyTable,
    b: &CohomologyTable,
    dim_p: usize,
    xi: &GroupCharacter,
) -> Result<Vec<Check>> {
    if !a.alg.same_descriptor(&b.alg) {
        return Err(HeckeError::DescriptorMismatch("tables over different algebras".into()));
    }
    (0..=dim_p)
        .map(|i| compare_dual(format!("H^{i} vs dual H^{} (shift {dim_p})", dim_p - i), &a.entry(i), &b.entry(dim_p - i), xi))
        .collect()
}

/// Compares `R(H^n)` with the abutment of the page
/// `E_2^{i,j} = H^i(Z_p^rank, ord[j]) = ord[j]^{binom(rank, i)}`.
///
/// `ord[j]` is the `j`-th derived ordinary part as a module over the Levi
/// algebra; at most two rows are supported. The abutment is only assembled
/// when at most one row is nonzero, so that the page degenerates.
pub fn ordinary_check(datum: &LeviDatum, ord: &[HeckeModule], big: &CohomologyTable) -> Result<Vec<Check>> {
    if ord.len() > 2 {
        return Err(HeckeError::InvalidArgument("ordinary check supports two rows".into()));
    }
    if ord.iter().any(|m| !m.algebra().same_descriptor(datum.levi())) {
        return Err(HeckeError::DescriptorMismatch("ordinary parts must be Levi modules".into()));
    }
    let rank = match datum.levi().kind() {
        crate::weyl::GroupKind::Torus(n) => n,
        _ => return Err(HeckeError::InvalidArgument("Levi must be a torus".into())),
    };
    let nonzero = ord.iter().filter(|m| m.dim() > 0).count();
    let mut checks = Vec::new();
    for n in 0..=big.top {
        let name = format!("R(H^{n})");
        if nonzero > 1 {
            checks.push(Check::inconclusive(name, "two nonzero rows; degeneration not assumed"));
            continue;
        }
        let mut expected = HeckeModule::zero(datum.levi());
        for (j, m) in ord.iter().enumerate() {
            if n >= j {
                let mult = torus_cohomology(rank, n - j) as usize;
                expected = expected.direct_sum(&m.power(mult))?;
            }
        }
        let Some(cands) = big.entry(n).alternatives() else {
            checks.push(Check::inconclusive(name, format!("gap: H^{n} is {}", big.entry(n).describe())));
            continue;
        };
        let mut notes = Vec::new();
        let mut status = Status::Fail;
        for (k, c) in cands.iter().enumerate() {
            let r = match c {
                Alt::Module(m) => right_adjoint(datum, m)?,
                Alt::Extension { sub, quot } => {
                    // R is exact; its value is determined when the extension
                    // of the images is forced to split.
                    let (rs, rq) = (right_adjoint(datum, sub)?, right_adjoint(datum, quot)?);
                    if extensions(&rs, &rq)?.ext_dim() > 0 {
                        status = Status::Inconclusive;
                        notes.push(format!("candidate {k}: R of the extension is not determined"));
                        continue;
                    }
                    rs.direct_sum(&rq)?
                }
            };
            match is_isomorphic(&r, &expected)? {
                Isomorphism::Isomorphic(_) => {
                    status = Status::Pass;
                    notes.push(format!("candidate {k}: R has dim {}, matches", r.dim()));
                    break;
                }
                Isomorphism::NotIsomorphic(why) => notes.push(format!("candidate {k}: {why}")),
                Isomorphism::Inconclusive(why) => {
                    if status == Status::Fail {
                        status = Status::Inconclusive;
                    }
                    notes.push(format!("candidate {k}: {why}"))
                }
            }
        }
        checks.push(Check::new(name, status, notes.join("; ")));
    }
    Ok(checks)
}

/// For each `k`, whether `R(base ⊕ extra^k) ≅ target`.
pub fn k_candidates(
    datum: &LeviDatum,
    base: &HeckeModule,
    extra: &HeckeModule,
    target: &HeckeModule,
    ks: impl IntoIterator<Item = usize>,
) -> Result<Vec<(usize, bool)>> {
    let mut out = Vec::new();
    for k in ks {
        let candidate = base.direct_sum(&extra.power(k))?;
        let r = right_adjoint(datum, &candidate)?;
        let iso = match is_isomorphic(&r, target)? {
            Isomorphism::Isomorphic(_) => true,
            Isomorphism::NotIsomorphic(_) => false,
            Isomorphism::Inconclusive(why) => {
                return Err(HeckeError::Internal(format!("isomorphism test inconclusive at k = {k}: {why}")))
            }
        };
        out.push((k, iso));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::HeckeAlgebra;
    use crate::character::{alpha_bar, SmoothCharacter};
    use crate::functors::induce_character;
    use crate::module::CharacterKind;
    use crate::weyl::GroupKind;

    #[test]
    fn single_entry_table() {
        let h = HeckeAlgebra::over_prime_field(GroupKind::SL2, 5).unwrap();
        let mut t = CohomologyTable::new(&h, 0);
        t.set(0, TableEntry::Module(HeckeModule::character(&h, CharacterKind::Triv).unwrap())).unwrap();
        let checks = poincare_check(&t, &GroupCharacter::trivial(&h)).unwrap();
        assert_eq!(checks.len(), 1);
        assert_eq!(checks[0].status, Status::Pass);
    }

    #[test]
    fn gl2_trivial_ordinary_parts() {
        let h = HeckeAlgebra::over_prime_field(GroupKind::GL2, 5).unwrap();
        let datum = LeviDatum::torus(&h).unwrap();
        let triv = HeckeModule::character(&h, CharacterKind::Triv).unwrap();
        let abar = alpha_bar(GroupKind::GL2, 5);
        let ind = induce_character(&datum, &abar).unwrap();
        let mut t = CohomologyTable::new(&h, 4);
        t.set(0, TableEntry::Module(triv.clone())).unwrap();
        t.set(1, TableEntry::Module(triv.direct_sum(&ind).unwrap())).unwrap();
        t.set(2, TableEntry::Module(ind.power(2))).unwrap();
        t.set(3, TableEntry::Module(triv.direct_sum(&ind).unwrap())).unwrap();
        t.set(4, TableEntry::Module(triv)).unwrap();
        let ord = vec![
            HeckeModule::zero(datum.levi()),
            HeckeModule::torus_character(datum.levi(), &abar).unwrap(),
        ];
        let checks = ordinary_check(&datum, &ord, &t).unwrap();
        assert!(checks.iter().all(|c| c.status == Status::Pass), "{checks:?}");
        let wrong = vec![HeckeModule::torus_character(datum.levi(), &SmoothCharacter::trivial(2)).unwrap()];
        let checks = ordinary_check(&datum, &wrong, &t).unwrap();
        assert_eq!(checks[0].status, Status::Fail);
    }
}
