//! The pro-p Iwahori–Hecke algebra over `F_q` in characteristic `p`.
//!
//! Multiplication uses the braid rule `T_u T_v = T_{uv}` when lengths add and the
//! quadratic rule `T_s^2 = c_s T_s` (the `q_s T_{s^2}` term vanishes mod p).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{HeckeError, Result};
use crate::field::{Field, Scalar};
use crate::weyl::{GroupDatum, GroupKind, WeylElement, WeylGroup};

/// Descriptor of a Hecke algebra: group datum with fixed lifts, coefficient
/// field and the quadratic data `c_s` of each affine generator.
pub struct HeckeAlgebra {
    weyl: Arc<WeylGroup>,
    field: Field,
    quadratic: Vec<Vec<WeylElement>>,
}

pub type Algebra = Arc<HeckeAlgebra>;

impl fmt::Debug for HeckeAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HeckeAlgebra({}, p = {}, q = {})", self.kind(), self.p(), self.field.order())
    }
}

impl HeckeAlgebra {
    /// Algebra over `F_{p^e}`.
    pub fn new(kind: GroupKind, p: u32, e: u32) -> Result<Algebra> {
        let datum = GroupDatum::new(kind, p)?;
        let weyl = WeylGroup::new(datum)?;
        let field = Field::new(p, e)?;
        let quadratic = weyl
            .generators()
            .affine
            .iter()
            .map(|s| quadratic_support(s, p))
            .collect();
        Ok(Arc::new(HeckeAlgebra { weyl, field, quadratic }))
    }

    pub fn over_prime_field(kind: GroupKind, p: u32) -> Result<Algebra> {
        HeckeAlgebra::new(kind, p, 1)
    }

    pub fn weyl(&self) -> &Arc<WeylGroup> {
        &self.weyl
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn kind(&self) -> GroupKind {
        self.weyl.kind()
    }

    pub fn p(&self) -> u32 {
        self.weyl.p()
    }

    pub fn datum(&self) -> GroupDatum {
        self.weyl.datum()
    }

    pub fn same_descriptor(&self, other: &HeckeAlgebra) -> bool {
        self.datum() == other.datum() && self.field == other.field
    }

    pub(crate) fn check_same(&self, other: &HeckeAlgebra) -> Result<()> {
        if self.same_descriptor(other) {
            Ok(())
        } else {
            Err(HeckeError::DescriptorMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Support of `c_{s_i}`; every coefficient is 1.
    pub fn quadratic_terms(&self, i: usize) -> &[WeylElement] {
        &self.quadratic[i]
    }

    pub fn num_affine(&self) -> usize {
        self.quadratic.len()
    }

    /// `c_{s_i}` as an algebra element.
    pub fn quadratic_element(self: &Arc<Self>, i: usize) -> HeckeElement {
        let mut x = HeckeElement::zero(self);
        for t in &self.quadratic[i] {
            x.add_term(t.clone(), self.field.one());
        }
        x
    }

    pub fn basis(self: &Arc<Self>, w: WeylElement) -> HeckeElement {
        let mut x = HeckeElement::zero(self);
        x.add_term(w, self.field.one());
        x
    }

    pub fn unit(self: &Arc<Self>) -> HeckeElement {
        self.basis(self.weyl.identity())
    }

    fn left_mul_affine(&self, i: usize, terms: &BTreeMap<WeylElement, Scalar>) -> BTreeMap<WeylElement, Scalar> {
        let weyl = &self.weyl;
        let f = &self.field;
        let s = weyl.affine_generator(i);
        let mut out = BTreeMap::new();
        for (w, &c) in terms {
            let sw = weyl.mul(s, w);
            if weyl.length(&sw) > weyl.length(w) {
                add_into(f, &mut out, sw, c);
            } else {
                for t in &self.quadratic[i] {
                    add_into(f, &mut out, weyl.mul(t, w), c);
                }
            }
        }
        out
    }

    /// `T_u T_v` expanded in the basis.
    pub fn basis_product(&self, u: &WeylElement, v: &WeylElement) -> BTreeMap<WeylElement, Scalar> {
        let weyl = &self.weyl;
        let (omega, word) = weyl.reduced_word(u);
        let mut acc = BTreeMap::new();
        acc.insert(v.clone(), self.field.one());
        for &i in word.iter().rev() {
            acc = self.left_mul_affine(i, &acc);
        }
        acc.into_iter().map(|(w, c)| (weyl.mul(&omega, &w), c)).collect()
    }

    /// Plain-text table `T_u * T_v = sum c_w T_w` over the basis elements of
    /// length at most `max_len` (with `Pi^0, Pi^1` for GL2).
    pub fn structure_constants(self: &Arc<Self>, max_len: usize) -> String {
        let basis = self.basis_elements(max_len, &[0, 1]);
        let mut out = String::new();
        out.push_str(&format!(
            "# structure constants for {} at p = {}, q = {}, length <= {}\n",
            self.kind(),
            self.p(),
            self.field.order(),
            max_len
        ));
        for u in &basis {
            for v in &basis {
                let prod = HeckeElement { alg: self.clone(), terms: self.basis_product(u, v) };
                out.push_str(&format!("T[{u}] * T[{v}] = {prod}\n"));
            }
        }
        out
    }

    /// Basis elements `t * Pi^k * s_{i1} ... s_{ij}` with `j <= max_len`,
    /// `t` in the finite torus and `k` from `omega_powers` (GL2 only).
    pub fn basis_elements(&self, max_len: usize, omega_powers: &[i64]) -> Vec<WeylElement> {
        self.basis_elements_with_torus(max_len, omega_powers, &self.weyl.finite_torus())
    }

    pub fn basis_elements_with_torus(
        &self,
        max_len: usize,
        omega_powers: &[i64],
        torus: &[WeylElement],
    ) -> Vec<WeylElement> {
        let weyl = &self.weyl;
        let omegas: Vec<WeylElement> = match (self.kind(), weyl.pi()) {
            (GroupKind::GL2, Some(pi)) => omega_powers
                .iter()
                .map(|&k| {
                    let step = if k >= 0 { pi.clone() } else { weyl.inverse(pi) };
                    (0..k.unsigned_abs()).fold(weyl.identity(), |acc, _| weyl.mul(&acc, &step))
                })
                .collect(),
            _ => vec![weyl.identity()],
        };
        let mut out = Vec::new();
        for word in weyl.affine_words_up_to(max_len) {
            let w = weyl.word_product(&word);
            for om in &omegas {
                for t in torus {
                    out.push(weyl.mul(&weyl.mul(t, om), &w));
                }
            }
        }
        out
    }
}

// For s = antidiag(a p^*, b p^*), c_s = sum over u in F_p^x of T_{diag(-b u, a u^-1)}.
fn quadratic_support(s: &WeylElement, p: u32) -> Vec<WeylElement> {
    let (a, b) = (s.units()[0] as u64, s.units()[1] as u64);
    let p64 = p as u64;
    (1..p)
        .map(|u| {
            let x = (p64 - b * u as u64 % p64) % p64;
            let y = a * crate::weyl::inv_mod(u, p) as u64 % p64;
            WeylElement::diagonal(vec![0, 0], vec![x as u32, y as u32])
        })
        .collect()
}

fn add_into(f: &Field, map: &mut BTreeMap<WeylElement, Scalar>, w: WeylElement, c: Scalar) {
    let entry = map.entry(w).or_insert(Scalar::ZERO);
    *entry = f.add(*entry, c);
}

/// A finitely supported combination of basis elements `T_w`; zero
/// coefficients are never stored.
#[derive(Clone)]
pub struct HeckeElement {
    alg: Algebra,
    terms: BTreeMap<WeylElement, Scalar>,
}

impl PartialEq for HeckeElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_descriptor(&other.alg) && self.terms == other.terms
    }
}

impl Eq for HeckeElement {}

impl HeckeElement {
    pub fn zero(alg: &Algebra) -> HeckeElement {
        HeckeElement { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn from_terms(alg: &Algebra, terms: impl IntoIterator<Item = (WeylElement, Scalar)>) -> HeckeElement {
        let mut x = HeckeElement::zero(alg);
        for (w, c) in terms {
            x.add_term(w, c);
        }
        x
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<WeylElement, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &WeylElement) -> Scalar {
        self.terms.get(w).copied().unwrap_or(Scalar::ZERO)
    }

    pub fn add_term(&mut self, w: WeylElement, c: Scalar) {
        let f = self.alg.field.clone();
        let entry = self.terms.entry(w.clone()).or_insert(Scalar::ZERO);
        *entry = f.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &HeckeElement) -> Result<HeckeElement> {
        self.alg.check_same(&other.alg)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Scalar) -> HeckeElement {
        let f = &self.alg.field;
        HeckeElement::from_terms(&self.alg, self.terms.iter().map(|(w, &c)| (w.clone(), f.mul(s, c))))
    }

    pub fn sub(&self, other: &HeckeElement) -> Result<HeckeElement> {
        let minus = other.scale(self.alg.field.neg(self.alg.field.one()));
        self.add(&minus)
    }

    pub fn mul(&self, other: &HeckeElement) -> Result<HeckeElement> {
        self.alg.check_same(&other.alg)?;
        let f = &self.alg.field;
        let mut out = HeckeElement::zero(&self.alg);
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                let ab = f.mul(a, b);
                for (w, c) in self.alg.basis_product(u, v) {
                    out.add_term(w, f.mul(ab, c));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c == Scalar::ONE {
                write!(f, "T[{w}]")?;
            } else {
                write!(f, "{c}*T[{w}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(kind: GroupKind, p: u32) -> Algebra {
        HeckeAlgebra::over_prime_field(kind, p).unwrap()
    }

    #[test]
    fn unit_and_quadratic() {
        for kind in [GroupKind::SL2, GroupKind::GL2] {
            let h = alg(kind, 5);
            let s1 = h.weyl().affine_generator(1).clone();
            let t1 = h.basis(s1.clone());
            assert_eq!(h.unit().mul(&t1).unwrap(), t1);
            assert_eq!(t1.mul(&h.unit()).unwrap(), t1);
            let sq = t1.mul(&t1).unwrap();
            let expected = h.quadratic_element(1).mul(&t1).unwrap();
            assert_eq!(sq, expected);
            assert_eq!(sq.terms().len(), 4);
        }
    }

    #[test]
    fn braid_product_of_generators() {
        let h = alg(GroupKind::SL2, 5);
        let w = h.weyl();
        let (s0, s1) = (w.affine_generator(0).clone(), w.affine_generator(1).clone());
        let prod = h.basis(s0.clone()).mul(&h.basis(s1.clone())).unwrap();
        assert_eq!(prod, h.basis(w.mul(&s0, &s1)));
    }

    #[test]
    fn length_zero_elements_are_invertible() {
        let h = alg(GroupKind::GL2, 7);
        let w = h.weyl();
        let pi = w.pi().unwrap().clone();
        let t = w.finite_torus()[9].clone();
        for om in [pi.clone(), t.clone(), w.mul(&t, &pi)] {
            let inv = w.inverse(&om);
            assert_eq!(h.basis(om).mul(&h.basis(inv)).unwrap(), h.unit());
        }
    }

    #[test]
    fn quadratic_support_for_sl2_is_coroot_image() {
        let h = alg(GroupKind::SL2, 7);
        for i in 0..2 {
            let mut support: Vec<_> = h.quadratic_terms(i).to_vec();
            support.sort();
            let mut coroot = h.weyl().finite_torus();
            coroot.sort();
            assert_eq!(support, coroot);
        }
    }

    #[test]
    fn descriptor_mismatch() {
        let a = alg(GroupKind::SL2, 5);
        let b = alg(GroupKind::SL2, 7);
        assert!(matches!(a.unit().mul(&b.unit()), Err(HeckeError::DescriptorMismatch(_))));
    }
}
