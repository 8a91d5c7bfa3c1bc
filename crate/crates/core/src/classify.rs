//! Brute-force classification of small simple modules with prescribed
//! length-zero action, and the supersingular modules it produces.

use crate::algebra::Algebra;
use crate::character::{DetCharacter, GroupCharacter};
use crate::error::{HeckeError, Result};
use crate::field::{Field, Scalar};
use crate::functors::{is_supersingular, LeviDatum};
use crate::linalg::Matrix;
use crate::module::{is_isomorphic, HeckeModule};
use crate::weyl::{GenKind, GroupKind, WeylElement};

/// Every `d x d` matrix over the field, in a fixed order.
pub fn all_matrices(f: &Field, d: usize) -> Vec<Matrix> {
    let q = f.order() as u64;
    let count = q.pow((d * d) as u32);
    (0..count)
        .map(|mut code| {
            Matrix::from_fn(f, d, d, |_, _| {
                let v = (code % q) as u32;
                code /= q;
                f.elem(v)
            })
        })
        .collect()
}

struct LengthZero<'a> {
    alg: &'a Algebra,
    mats: &'a [Matrix],
    invs: Vec<Matrix>,
}

impl LengthZero<'_> {
    fn eval(&self, w: &WeylElement) -> Matrix {
        let weyl = self.alg.weyl();
        let d = self.mats[0].rows();
        let mut acc = Matrix::identity(self.alg.field(), d);
        for (j, e) in weyl.length_zero_word(w) {
            let base = if e >= 0 { &self.mats[j] } else { &self.invs[j] };
            acc = acc.mul(&base.pow(e.unsigned_abs()));
        }
        acc
    }
}

/// Simple modules of dimension `dim` (1 or 2) on which the length-zero
/// generators act by the given matrices, one per isomorphism class.
pub fn classify_simples(alg: &Algebra, dim: usize, length_zero: &[Matrix]) -> Result<Vec<HeckeModule>> {
    if !(1..=2).contains(&dim) {
        return Err(HeckeError::InvalidArgument(format!("classification supports dimension 1 or 2, not {dim}")));
    }
    if alg.kind().is_torus() {
        return Err(HeckeError::InvalidArgument("classification needs SL2 or GL2".into()));
    }
    let weyl = alg.weyl();
    let gens = &weyl.generators().length_zero;
    if length_zero.len() != gens.len() || length_zero.iter().any(|m| m.rows() != dim || m.cols() != dim) {
        return Err(HeckeError::DimensionMismatch("length-zero matrices do not match the generators".into()));
    }
    let invs = length_zero
        .iter()
        .map(|m| m.inverse().ok_or_else(|| HeckeError::RelationViolated("length-zero matrix not invertible".into())))
        .collect::<Result<Vec<_>>>()?;
    let lz = LengthZero { alg, mats: length_zero, invs };
    let f = alg.field();

    // Candidates for each affine generator, using only the relations that
    // involve that generator alone.
    let all = all_matrices(f, dim);
    let mut candidates: Vec<Vec<Matrix>> = Vec::new();
    for i in 0..alg.num_affine() {
        let s = weyl.affine_generator(i);
        let mut c = Matrix::zeros(f, dim, dim);
        for t in alg.quadratic_terms(i) {
            c = c.add(&lz.eval(t));
        }
        let mut conj = Vec::new();
        for (j, g) in gens.iter().enumerate() {
            let (omega, word) = weyl.reduced_word(&weyl.conjugate(&g.elem, s));
            if word == [i] {
                conj.push((j, lz.eval(&omega)));
            }
        }
        let keep: Vec<Matrix> = all
            .iter()
            .filter(|x| {
                x.mul(x) == c.mul(x)
                    && conj.iter().all(|(j, tau)| length_zero[*j].mul(x) == tau.mul(x).mul(&length_zero[*j]))
            })
            .cloned()
            .collect();
        candidates.push(keep);
    }

    let mut pairs: Vec<(Matrix, Matrix)> = Vec::new();
    if alg.kind() == GroupKind::GL2 {
        let j = gens.iter().position(|g| g.kind == GenKind::Pi).expect("GL2 has Pi");
        for x1 in &candidates[1] {
            let x0 = length_zero[j].mul(x1).mul(&lz.invs[j]);
            pairs.push((x0, x1.clone()));
        }
    } else {
        for x0 in &candidates[0] {
            for x1 in &candidates[1] {
                pairs.push((x0.clone(), x1.clone()));
            }
        }
    }

    let mut out: Vec<HeckeModule> = Vec::new();
    for (x0, x1) in pairs {
        let mut mats = vec![x0, x1];
        mats.extend(length_zero.iter().cloned());
        let Ok(m) = HeckeModule::new(alg, dim, mats) else { continue };
        if !m.is_simple() {
            continue;
        }
        let mut seen = false;
        for n in &out {
            if is_isomorphic(&m, n)?.is_iso() {
                seen = true;
                break;
            }
        }
        if !seen {
            out.push(m);
        }
    }
    Ok(out)
}

fn pow_unit(f: &Field, u: u32, e: i64) -> Scalar {
    f.pow(f.from_prime_unit(u), e)
}

/// Length-zero action on the two-dimensional space with basis `v, v T_Pi`,
/// where the torus acts on `v` by `diag(a, d) -> a^-r` and `T_Pi^2 = 1`.
pub fn supersingular_gl2_length_zero(alg: &Algebra, r: i64) -> Result<Vec<Matrix>> {
    if alg.kind() != GroupKind::GL2 {
        return Err(HeckeError::InvalidArgument("needs GL2".into()));
    }
    let f = alg.field();
    Ok(alg
        .weyl()
        .generators()
        .length_zero
        .iter()
        .map(|g| match g.kind {
            GenKind::Pi => Matrix::from_ints(f, &[&[0, 1], &[1, 0]]),
            _ => {
                let u = g.elem.units();
                let mut m = Matrix::zeros(f, 2, 2);
                m.set(0, 0, pow_unit(f, u[0], -r));
                m.set(1, 1, pow_unit(f, u[1], -r));
                m
            }
        })
        .collect())
}

/// Length-zero action used by `hecke classify`: in dimension one the torus
/// acts by `x -> x^-r` (SL2) or `diag(a, d) -> (ad)^-r` (GL2) and `Pi` by 1;
/// in dimension two (GL2 only) it is [`supersingular_gl2_length_zero`].
pub fn standard_length_zero(alg: &Algebra, dim: usize, r: i64) -> Result<Vec<Matrix>> {
    check_r(alg, r)?;
    let f = alg.field();
    match (alg.kind(), dim) {
        (GroupKind::GL2, 2) => supersingular_gl2_length_zero(alg, r),
        (GroupKind::GL2 | GroupKind::SL2, 1) => Ok(alg
            .weyl()
            .generators()
            .length_zero
            .iter()
            .map(|g| {
                let u = g.elem.units();
                let s = match (g.kind, alg.kind()) {
                    (GenKind::Pi, _) => f.one(),
                    (_, GroupKind::SL2) => pow_unit(f, u[0], -r),
                    _ => u.iter().fold(f.one(), |acc, &x| f.mul(acc, pow_unit(f, x, -r))),
                };
                Matrix::scalar(f, 1, s)
            })
            .collect()),
        (k, d) => Err(HeckeError::InvalidArgument(format!("no standard length-zero action for {k} in dimension {d}"))),
    }
}

fn check_r(alg: &Algebra, r: i64) -> Result<()> {
    if !(0..alg.p() as i64).contains(&r) {
        return Err(HeckeError::InvalidArgument(format!("r = {r} outside 0..=p-1")));
    }
    Ok(())
}

/// The simple supersingular GL2 module `m(r, 0, 1)`, found by classification.
pub fn supersingular_gl2(alg: &Algebra, r: i64) -> Result<HeckeModule> {
    check_r(alg, r)?;
    let datum = LeviDatum::torus(alg)?;
    let lz = supersingular_gl2_length_zero(alg, r)?;
    let mut found = Vec::new();
    for m in classify_simples(alg, 2, &lz)? {
        if is_supersingular(&datum, &m)? {
            found.push(m);
        }
    }
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        n => Err(HeckeError::Internal(format!(
            "expected one simple supersingular module for r = {r}, classification found {n}"
        ))),
    }
}

/// `m(r, 0, psi)`: `m(r, 0, 1)` twisted by `psi o det`.
pub fn supersingular_gl2_twisted(alg: &Algebra, r: i64, psi: DetCharacter) -> Result<HeckeModule> {
    supersingular_gl2(alg, r)?.twist(&GroupCharacter::from_det(alg, psi))
}

/// The one-dimensional supersingular SL2 module `m_r`: the torus acts by
/// `diag(x, x^-1) -> x^-r`, and `T_s1` acts by `-1` when `r = p - 1` and by
/// `0` otherwise.
pub fn supersingular_sl2(alg: &Algebra, r: i64) -> Result<HeckeModule> {
    check_r(alg, r)?;
    if alg.kind() != GroupKind::SL2 {
        return Err(HeckeError::InvalidArgument("needs SL2".into()));
    }
    let f = alg.field();
    let datum = LeviDatum::torus(alg)?;
    let lz: Vec<Matrix> = alg
        .weyl()
        .generators()
        .length_zero
        .iter()
        .map(|g| Matrix::scalar(f, 1, pow_unit(f, g.elem.units()[0], -r)))
        .collect();
    let t1 = if r == alg.p() as i64 - 1 { f.neg(f.one()) } else { f.zero() };
    let mut found = Vec::new();
    for m in classify_simples(alg, 1, &lz)? {
        if is_supersingular(&datum, &m)? && m.affine_matrix(1).get(0, 0) == t1 {
            found.push(m);
        }
    }
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        n => Err(HeckeError::Internal(format!(
            "expected one supersingular character for r = {r}, classification found {n}"
        ))),
    }
}
