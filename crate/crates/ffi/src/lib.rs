//! C ABI for `hecke-core`.
//!
//! Algebras and modules are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`HkStatus`] and writes its result through an out-pointer; on failure
//! `hk_last_error()` describes what went wrong on the calling thread.
//! Strings returned by the library are released with [`hk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hecke_core::algebra::{Algebra, HeckeAlgebra};
use hecke_core::character::SmoothCharacter;
use hecke_core::classify::{supersingular_gl2, supersingular_sl2};
use hecke_core::fixtures::{self, Config, RunOptions};
use hecke_core::functors::{induce_character, right_adjoint, LeviDatum};
use hecke_core::module::{hom_space, is_isomorphic, CharacterKind, HeckeModule, Isomorphism};
use hecke_core::report::Status;
use hecke_core::spectral::{ss_propagate, E2Page};
use hecke_core::weyl::GroupKind;
use hecke_core::HeckeError;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DescriptorMismatch = 4,
    RelationViolated = 5,
    NotPositive = 6,
    BudgetExceeded = 7,
    Parse = 8,
    UnknownFixture = 9,
    Fixture = 10,
    Internal = 11,
    Panic = 12,
}

impl From<&HeckeError> for HkStatus {
    fn from(e: &HeckeError) -> HkStatus {
        match e {
            HeckeError::InvalidArgument(_) => HkStatus::InvalidArgument,
            HeckeError::DimensionMismatch(_) => HkStatus::DimensionMismatch,
            HeckeError::DescriptorMismatch(_) => HkStatus::DescriptorMismatch,
            HeckeError::RelationViolated(_) => HkStatus::RelationViolated,
            HeckeError::NotPositive(_) => HkStatus::NotPositive,
            HeckeError::BudgetExceeded(_) => HkStatus::BudgetExceeded,
            HeckeError::Parse { .. } => HkStatus::Parse,
            HeckeError::UnknownFixture(_) => HkStatus::UnknownFixture,
            HeckeError::Fixture { .. } => HkStatus::Fixture,
            HeckeError::Internal(_) => HkStatus::Internal,
        }
    }
}

/// Answer of [`hk_module_is_isomorphic`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkIso {
    No = 0,
    Yes = 1,
    Inconclusive = 2,
}

/// Built-in one-dimensional characters.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkCharacter {
    Triv = 0,
    Sign = 1,
    SignStar = 2,
}

/// An algebra together with its torus Levi datum.
pub struct HkAlgebra {
    alg: Algebra,
    datum: Option<LeviDatum>,
}

pub struct HkModule(HeckeModule);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null(&'static str),
    Hecke(HeckeError),
}

impl From<HeckeError> for Fail {
    fn from(e: HeckeError) -> Fail {
        Fail::Hecke(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HkStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HkStatus::NullPointer
        }
        Ok(Err(Fail::Hecke(e))) => {
            set_error(e.to_string());
            HkStatus::from(&e)
        }
        Err(_) => {
            set_error("panic inside hecke".into());
            HkStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<T>(p: *mut T, what: &'static str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Hecke(HeckeError::InvalidArgument(format!("{what} is not UTF-8"))))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn module_handle(m: HeckeModule) -> *mut HkModule {
    Box::into_raw(Box::new(HkModule(m)))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn hk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is NULL or a string returned by this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the algebra of `group` ("SL2", "GL2" or "Torus(n)") over `F_{p^e}`.
///
/// # Safety
/// `group` is a NUL-terminated string; `out_alg` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_algebra_new(group: *const c_char, p: u32, e: u32, out_alg: *mut *mut HkAlgebra) -> HkStatus {
    guard(|| {
        let kind: GroupKind = string(group, "group")?.parse()?;
        let alg = HeckeAlgebra::new(kind, p, e)?;
        let datum = if kind.is_torus() { None } else { Some(LeviDatum::torus(&alg)?) };
        out(out_alg, "out_alg", Box::into_raw(Box::new(HkAlgebra { alg, datum })))
    })
}

/// # Safety
/// `alg` is NULL or a handle from [`hk_algebra_new`] that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_algebra_free(alg: *mut HkAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Structure constants of basis products up to `max_length`, as text.
///
/// # Safety
/// `alg` is a live handle; `out_text` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_algebra_structure_constants(
    alg: *const HkAlgebra,
    max_length: usize,
    out_text: *mut *mut c_char,
) -> HkStatus {
    guard(|| {
        let a = deref(alg, "alg")?;
        out(out_text, "out_text", c_string(a.alg.structure_constants(max_length)))
    })
}

/// # Safety
/// `alg` is a live handle; `out_module` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_character(
    alg: *const HkAlgebra,
    which: HkCharacter,
    out_module: *mut *mut HkModule,
) -> HkStatus {
    guard(|| {
        let a = deref(alg, "alg")?;
        let kind = match which {
            HkCharacter::Triv => CharacterKind::Triv,
            HkCharacter::Sign => CharacterKind::Sign,
            HkCharacter::SignStar => CharacterKind::SignStar,
        };
        out(out_module, "out_module", module_handle(HeckeModule::character(&a.alg, kind)?))
    })
}

fn datum(a: &HkAlgebra) -> Result<&LeviDatum, Fail> {
    a.datum.as_ref().ok_or_else(|| Fail::Hecke(HeckeError::InvalidArgument("torus algebras have no induction".into())))
}

/// `Ind(chi)` for the torus character with finite part `exps` and values
/// `unram` on the `p`-power translations, both of length `rank`.
///
/// # Safety
/// `alg` is a live handle; `exps` and `unram` point to `rank` elements;
/// `out_module` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_induced(
    alg: *const HkAlgebra,
    exps: *const i64,
    unram: *const u32,
    rank: usize,
    out_module: *mut *mut HkModule,
) -> HkStatus {
    guard(|| {
        let a = deref(alg, "alg")?;
        if exps.is_null() || unram.is_null() {
            return Err(Fail::Null("character data"));
        }
        let chi = SmoothCharacter::new(
            a.alg.p(),
            std::slice::from_raw_parts(exps, rank).to_vec(),
            std::slice::from_raw_parts(unram, rank).to_vec(),
        )?;
        out(out_module, "out_module", module_handle(induce_character(datum(a)?, &chi)?))
    })
}

/// The simple supersingular module with parameter `r` (GL2: `m(r,0,1)`,
/// SL2: `m_r`).
///
/// # Safety
/// `alg` is a live handle; `out_module` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_supersingular(alg: *const HkAlgebra, r: i64, out_module: *mut *mut HkModule) -> HkStatus {
    guard(|| {
        let a = deref(alg, "alg")?;
        let m = match a.alg.kind() {
            GroupKind::GL2 => supersingular_gl2(&a.alg, r)?,
            GroupKind::SL2 => supersingular_sl2(&a.alg, r)?,
            k => return Err(HeckeError::InvalidArgument(format!("no supersingular modules for {k}")).into()),
        };
        out(out_module, "out_module", module_handle(m))
    })
}

/// # Safety
/// `m` is NULL or a module handle that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_module_free(m: *mut HkModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of a module, or 0 for NULL.
///
/// # Safety
/// `m` is NULL or a live module handle.
#[no_mangle]
pub unsafe extern "C" fn hk_module_dim(m: *const HkModule) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `m` is a live handle; `out_module` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_dual(m: *const HkModule, out_module: *mut *mut HkModule) -> HkStatus {
    guard(|| {
        let m = deref(m, "m")?;
        out(out_module, "out_module", module_handle(m.0.dual()?))
    })
}

/// # Safety
/// `a` and `b` are live handles; `out_module` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_direct_sum(
    a: *const HkModule,
    b: *const HkModule,
    out_module: *mut *mut HkModule,
) -> HkStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        out(out_module, "out_module", module_handle(a.0.direct_sum(&b.0)?))
    })
}

/// `R(m)`, a module over the torus algebra.
///
/// # Safety
/// `alg` is the live algebra `m` was built over; `out_module` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_right_adjoint(
    alg: *const HkAlgebra,
    m: *const HkModule,
    out_module: *mut *mut HkModule,
) -> HkStatus {
    guard(|| {
        let (a, m) = (deref(alg, "alg")?, deref(m, "m")?);
        out(out_module, "out_module", module_handle(right_adjoint(datum(a)?, &m.0)?))
    })
}

/// # Safety
/// `a` and `b` are live handles; `out_iso` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_module_is_isomorphic(a: *const HkModule, b: *const HkModule, out_iso: *mut HkIso) -> HkStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let v = match is_isomorphic(&a.0, &b.0)? {
            Isomorphism::Isomorphic(_) => HkIso::Yes,
            Isomorphism::NotIsomorphic(_) => HkIso::No,
            Isomorphism::Inconclusive(_) => HkIso::Inconclusive,
        };
        out(out_iso, "out_iso", v)
    })
}

/// `dim Hom(a, b)`.
///
/// # Safety
/// `a` and `b` are live handles; `out_dim` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_hom_dim(a: *const HkModule, b: *const HkModule, out_dim: *mut usize) -> HkStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        out(out_dim, "out_dim", hom_space(&a.0, &b.0)?.dim())
    })
}

/// Verifies one fixture and writes its report as JSON. `out_passed` is set to
/// true when no check failed.
///
/// # Safety
/// `id` is a NUL-terminated string; `out_json` and `out_passed` are writable.
#[no_mangle]
pub unsafe extern "C" fn hk_run_fixture(
    id: *const c_char,
    p: u32,
    e: u32,
    seed: u64,
    assume_split: bool,
    out_json: *mut *mut c_char,
    out_passed: *mut bool,
) -> HkStatus {
    guard(|| {
        let id = string(id, "id")?;
        if out_json.is_null() || out_passed.is_null() {
            return Err(Fail::Null("out_json/out_passed"));
        }
        let mut report = fixtures::verify(id, Config { p, e }, &RunOptions { seed, assume_split })?;
        report.elapsed_ms = None;
        let json = serde_json::to_string(&report).map_err(|e| HeckeError::Internal(e.to_string()))?;
        out(out_passed, "out_passed", report.status != Status::Fail)?;
        out(out_json, "out_json", c_string(json))
    })
}

/// Propagates a page given in the page text format and writes the facts and
/// any contradiction as JSON.
///
/// # Safety
/// `page` is a NUL-terminated string; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn hk_ss_solve(page: *const c_char, assume_split: bool, out_json: *mut *mut c_char) -> HkStatus {
    guard(|| {
        let page = E2Page::parse(string(page, "page")?)?;
        let prop = ss_propagate(&page, assume_split)?;
        let json = serde_json::to_string(&prop).map_err(|e| HeckeError::Internal(e.to_string()))?;
        out(out_json, "out_json", c_string(json))
    })
}
