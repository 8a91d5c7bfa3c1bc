//! Evaluation of fixture expressions against an algebra.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::algebra::{Algebra, HeckeAlgebra};
use crate::character::{alpha_bar, DetCharacter, SmoothCharacter};
use crate::classify::{supersingular_gl2, supersingular_sl2};
use crate::error::{HeckeError, Result};
use crate::field::Field;
use crate::functors::{induce_character, right_adjoint, LeviDatum};
use crate::module::{CharacterKind, HeckeModule};
use crate::spectral::{CohomologyTable, E2Page, TableEntry};
use crate::weyl::GroupKind;

use super::syntax::{Clause, Cond, EntryExpr, Expr, GroupTag};

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Char(SmoothCharacter),
    Det(DetCharacter),
    Module(HeckeModule),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Char(_) => "torus character",
            Value::Det(_) => "character of Q_p^x",
            Value::Module(_) => "module",
        }
    }

    pub fn show(&self) -> String {
        match self {
            Value::Int(n) => n.to_string(),
            Value::Char(c) => c.to_string(),
            Value::Det(d) => format!("omega^{} unr({})", d.exp, d.unram),
            Value::Module(m) => format!("module of dim {}", m.dim()),
        }
    }
}

/// Algebra data shared by every instance of a fixture.
pub struct Ctx {
    pub tag: GroupTag,
    pub p: u32,
    pub alg: Option<Algebra>,
    pub datum: Option<LeviDatum>,
}

impl Ctx {
    pub fn new(tag: GroupTag, p: u32, e: u32) -> Result<Ctx> {
        let kind = match tag {
            GroupTag::GL2 => Some(GroupKind::GL2),
            GroupTag::SL2 => Some(GroupKind::SL2),
            GroupTag::GL3 => None,
        };
        match kind {
            Some(k) => {
                let alg = HeckeAlgebra::new(k, p, e)?;
                let datum = LeviDatum::torus(&alg)?;
                Ok(Ctx { tag, p, alg: Some(alg), datum: Some(datum) })
            }
            None => Ok(Ctx { tag, p, alg: None, datum: None }),
        }
    }

    pub fn alg(&self) -> Result<&Algebra> {
        self.alg.as_ref().ok_or_else(|| HeckeError::InvalidArgument(format!("no algebra for {}", self.tag)))
    }

    pub fn datum(&self) -> Result<&LeviDatum> {
        self.datum.as_ref().ok_or_else(|| HeckeError::InvalidArgument(format!("no Levi datum for {}", self.tag)))
    }

    fn field(&self) -> Result<&Field> {
        Ok(self.alg()?.field())
    }

    pub fn torus_rank(&self) -> usize {
        match self.tag {
            GroupTag::GL2 => 2,
            GroupTag::SL2 => 1,
            GroupTag::GL3 => 3,
        }
    }

    /// Characters with every finite part and a few unramified parts.
    pub fn characters(&self) -> Result<Vec<SmoothCharacter>> {
        let f = self.field()?;
        let enc = |n: i64| f.from_int(n).value();
        let p = self.p as i64;
        let samples: Vec<Vec<u32>> = match self.tag {
            GroupTag::GL2 => vec![vec![enc(1), enc(1)], vec![enc(p - 1), enc(1)], vec![enc(2), enc(3)]],
            GroupTag::SL2 => vec![vec![enc(1)], vec![enc(p - 1)], vec![enc(2)]],
            GroupTag::GL3 => return Err(HeckeError::InvalidArgument("no characters for GL3 bookkeeping".into())),
        };
        Ok(SmoothCharacter::enumerate(self.p, self.torus_rank(), &samples))
    }
}

type SsKey = (GroupTag, u32, u32, i64);

/// Supersingular modules come out of a brute-force classification; they are
/// shared across fixtures and instances.
fn ss_cache() -> &'static Mutex<HashMap<SsKey, HeckeModule>> {
    static CACHE: OnceLock<Mutex<HashMap<SsKey, HeckeModule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn supersingular(ctx: &Ctx, r: i64) -> Result<HeckeModule> {
    let alg = ctx.alg()?;
    let key = (ctx.tag, alg.p(), alg.field().degree(), r);
    if let Some(m) = ss_cache().lock().unwrap().get(&key) {
        return Ok(m.clone());
    }
    let m = match ctx.tag {
        GroupTag::GL2 => supersingular_gl2(alg, r)?,
        _ => supersingular_sl2(alg, r)?,
    };
    ss_cache().lock().unwrap().insert(key, m.clone());
    Ok(m)
}

pub struct Scope<'a> {
    pub ctx: &'a Ctx,
    pub vars: BTreeMap<String, Value>,
    pub tables: BTreeMap<String, CohomologyTable>,
    pub pages: BTreeMap<String, E2Page>,
}

fn bad(msg: impl Into<String>) -> HeckeError {
    HeckeError::InvalidArgument(msg.into())
}

impl<'a> Scope<'a> {
    pub fn new(ctx: &'a Ctx) -> Scope<'a> {
        Scope { ctx, vars: BTreeMap::new(), tables: BTreeMap::new(), pages: BTreeMap::new() }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Int(n) => Ok(Value::Int(*n)),
            Expr::Name(name) => self.name(name),
            Expr::Index(t, k) => {
                let table = self.tables.get(t).ok_or_else(|| bad(format!("no table `{t}`")))?;
                match table.entry(*k) {
                    TableEntry::Module(m) => Ok(Value::Module(m)),
                    other => Err(bad(format!("{t}[{k}] is {}, not a single module", other.describe()))),
                }
            }
            Expr::Call(name, args) => {
                let vals = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>>>()?;
                self.call(name, vals)
            }
            Expr::Add(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Int(x), Value::Int(y)) => Ok(Value::Int(x + y)),
                (Value::Int(0), Value::Module(m)) | (Value::Module(m), Value::Int(0)) => Ok(Value::Module(m)),
                (Value::Module(x), Value::Module(y)) => Ok(Value::Module(x.direct_sum(&y)?)),
                (x, y) => Err(bad(format!("cannot add {} and {}", x.kind(), y.kind()))),
            },
            Expr::Sub(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Int(x), Value::Int(y)) => Ok(Value::Int(x - y)),
                (x, y) => Err(bad(format!("cannot subtract {} from {}", y.kind(), x.kind()))),
            },
            Expr::Neg(a) => match self.eval(a)? {
                Value::Int(x) => Ok(Value::Int(-x)),
                x => Err(bad(format!("cannot negate a {}", x.kind()))),
            },
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Int(x), Value::Int(y)) => Ok(Value::Int(x * y)),
                (Value::Char(x), Value::Char(y)) => Ok(Value::Char(x.mul(&y, self.ctx.field()?))),
                (Value::Det(x), Value::Det(y)) => {
                    let f = self.ctx.field()?;
                    let unram = f.mul(f.elem(x.unram), f.elem(y.unram)).value();
                    Ok(Value::Det(DetCharacter { exp: (x.exp + y.exp).rem_euclid(self.ctx.p as i64 - 1), unram }))
                }
                (x, y) => Err(bad(format!("cannot multiply {} by {}", x.kind(), y.kind()))),
            },
            Expr::Pow(a, b) => {
                let Value::Int(k) = self.eval(b)? else { return Err(bad("exponents are integers")) };
                match self.eval(a)? {
                    Value::Module(m) if k >= 0 => Ok(Value::Module(m.power(k as usize))),
                    Value::Char(c) => {
                        let f = self.ctx.field()?;
                        let base = if k < 0 { c.inverse(f) } else { c };
                        let mut acc = SmoothCharacter::trivial(base.rank());
                        for _ in 0..k.unsigned_abs() {
                            acc = acc.mul(&base, f);
                        }
                        Ok(Value::Char(acc))
                    }
                    Value::Int(x) if k >= 0 => Ok(Value::Int(x.pow(k as u32))),
                    x => Err(bad(format!("cannot raise a {} to the power {k}", x.kind()))),
                }
            }
        }
    }

    fn name(&self, name: &str) -> Result<Value> {
        if let Some(v) = self.vars.get(name) {
            return Ok(v.clone());
        }
        let ctx = self.ctx;
        match name {
            "p" => Ok(Value::Int(ctx.p as i64)),
            "triv" | "sign" | "sign*" => {
                let kind = match name {
                    "triv" => CharacterKind::Triv,
                    "sign" => CharacterKind::Sign,
                    _ => CharacterKind::SignStar,
                };
                Ok(Value::Module(HeckeModule::character(ctx.alg()?, kind)?))
            }
            "alpha" => Ok(Value::Char(alpha_bar(ctx.alg()?.kind(), ctx.p))),
            "one" => Ok(Value::Char(SmoothCharacter::trivial(ctx.torus_rank()))),
            _ => Err(bad(format!("unknown name `{name}`"))),
        }
    }

    fn call(&self, name: &str, args: Vec<Value>) -> Result<Value> {
        let ctx = self.ctx;
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!("{name} takes {n} argument(s), got {}", args.len())))
            }
        };
        let module = |v: &Value| -> Result<HeckeModule> {
            match v {
                Value::Module(m) => Ok(m.clone()),
                Value::Int(0) => Ok(HeckeModule::zero(ctx.alg()?)),
                x => Err(bad(format!("{name} expects a module, got a {}", x.kind()))),
            }
        };
        let chr = |v: &Value| -> Result<SmoothCharacter> {
            match v {
                Value::Char(c) => Ok(c.clone()),
                x => Err(bad(format!("{name} expects a torus character, got a {}", x.kind()))),
            }
        };
        let int = |v: &Value| -> Result<i64> {
            match v {
                Value::Int(n) => Ok(*n),
                x => Err(bad(format!("{name} expects an integer, got a {}", x.kind()))),
            }
        };
        match name {
            "ind" => {
                arity(1)?;
                Ok(Value::Module(induce_character(ctx.datum()?, &chr(&args[0])?)?))
            }
            "tchar" => {
                arity(1)?;
                Ok(Value::Module(HeckeModule::torus_character(ctx.datum()?.levi(), &chr(&args[0])?)?))
            }
            "dual" => {
                arity(1)?;
                Ok(Value::Module(module(&args[0])?.dual()?))
            }
            "R" => {
                arity(1)?;
                Ok(Value::Module(right_adjoint(ctx.datum()?, &module(&args[0])?)?))
            }
            "twist" => {
                arity(2)?;
                let Value::Det(psi) = args[1] else { return Err(bad("twist expects a character of Q_p^x")) };
                let xi = crate::character::GroupCharacter::from_det(ctx.alg()?, psi);
                Ok(Value::Module(module(&args[0])?.twist(&xi)?))
            }
            "ss" => {
                let r = int(&args.first().cloned().unwrap_or(Value::Int(-1)))?;
                match (args.len(), ctx.tag) {
                    (1, _) => Ok(Value::Module(supersingular(ctx, r)?)),
                    (2, GroupTag::GL2) => {
                        let Value::Det(psi) = args[1] else { return Err(bad("ss(r, psi) expects a character of Q_p^x")) };
                        let xi = crate::character::GroupCharacter::from_det(ctx.alg()?, psi);
                        Ok(Value::Module(supersingular(ctx, r)?.twist(&xi)?))
                    }
                    _ => Err(bad("ss takes (r) or, for GL2, (r, psi)")),
                }
            }
            "inv" => {
                arity(1)?;
                Ok(Value::Char(chr(&args[0])?.inverse(ctx.field()?)))
            }
            "conj" => {
                arity(1)?;
                Ok(Value::Char(chr(&args[0])?.weyl_conjugate(ctx.alg()?.kind(), ctx.field()?)))
            }
            "omega" => {
                arity(1)?;
                Ok(Value::Det(DetCharacter { exp: int(&args[0])?.rem_euclid(ctx.p as i64 - 1), unram: 1 }))
            }
            "unr" => {
                arity(1)?;
                let c = ctx.field()?.from_int(int(&args[0])?);
                if c.is_zero() {
                    return Err(bad("unramified values are nonzero"));
                }
                Ok(Value::Det(DetCharacter::unramified(c.value())))
            }
            "chi" => {
                let h = args.len() / 2;
                if h != ctx.torus_rank() || args.len() % 2 != 0 {
                    return Err(bad(format!("chi takes {} exponents and as many values", ctx.torus_rank())));
                }
                let exps = args[..h].iter().map(int).collect::<Result<Vec<_>>>()?;
                let f = ctx.field()?;
                let mut unram = Vec::new();
                for v in &args[h..] {
                    let c = f.from_int(int(v)?);
                    if c.is_zero() {
                        return Err(bad("unramified values are nonzero"));
                    }
                    unram.push(c.value());
                }
                Ok(Value::Char(SmoothCharacter::new(ctx.p, exps, unram)?))
            }
            _ => Err(bad(format!("unknown function `{name}`"))),
        }
    }

    pub fn module(&self, e: &Expr) -> Result<HeckeModule> {
        match self.eval(e)? {
            Value::Module(m) => Ok(m),
            Value::Int(0) => Ok(HeckeModule::zero(self.ctx.alg()?)),
            v => Err(bad(format!("`{e}` is a {}, not a module", v.kind()))),
        }
    }

    /// A module over the Levi algebra; `0` is the zero module there.
    pub fn levi_module(&self, e: &Expr) -> Result<HeckeModule> {
        match self.eval(e)? {
            Value::Module(m) => Ok(m),
            Value::Int(0) => Ok(HeckeModule::zero(self.ctx.datum()?.levi())),
            v => Err(bad(format!("`{e}` is a {}, not a module", v.kind()))),
        }
    }

    pub fn int(&self, e: &Expr) -> Result<i64> {
        match self.eval(e)? {
            Value::Int(n) => Ok(n),
            v => Err(bad(format!("`{e}` is a {}, not an integer", v.kind()))),
        }
    }

    fn same(&self, a: &Expr, b: &Expr) -> Result<bool> {
        match (self.eval(a)?, self.eval(b)?) {
            (Value::Int(x), Value::Int(y)) => Ok(x == y),
            (Value::Char(x), Value::Char(y)) => Ok(x == y),
            (Value::Det(x), Value::Det(y)) => Ok(x == y),
            (x, y) => Err(bad(format!("cannot compare {} with {}", x.kind(), y.kind()))),
        }
    }

    pub fn holds(&self, cond: &Option<Cond>) -> Result<bool> {
        let Some(c) = cond else { return Ok(true) };
        let mut results = Vec::new();
        for clause in &c.clauses {
            results.push(match clause {
                Clause::Eq(a, b) => self.same(a, b)?,
                Clause::Ne(a, b) => !self.same(a, b)?,
                Clause::In(x, lo, hi) => {
                    let x = self.int(x)?;
                    (self.int(lo)?..self.int(hi)?).contains(&x)
                }
            });
        }
        Ok(if c.all { results.iter().all(|&r| r) } else { results.iter().any(|&r| r) })
    }

    pub fn entry(&self, e: &EntryExpr) -> Result<TableEntry> {
        Ok(match e {
            EntryExpr::Module(x) => TableEntry::Module(self.module(x)?),
            EntryExpr::Nonsplit { quot, sub } => TableEntry::Extension { sub: self.module(sub)?, quot: self.module(quot)? },
            EntryExpr::Either(alts) => TableEntry::Either(alts.iter().map(|a| self.entry(a)).collect::<Result<_>>()?),
            EntryExpr::Dim(d) => TableEntry::Dim(*d as usize),
            EntryExpr::Unknown => TableEntry::Unknown,
        })
    }
}
