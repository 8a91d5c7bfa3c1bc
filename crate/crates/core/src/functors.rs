//! Parabolic induction from the torus, its right adjoint, and the adjunction
//! check.
//!
//! `Ind(n) = n (x)_{H_T^+} H` is realized on `n (+) n` with basis
//! `x (x) 1, y (x) T_s1`. `R(m)` is the eventual image of `T_{z^-1}` on `m`,
//! with `T_{z^-1}` inverted there.

use crate::algebra::{Algebra, HeckeAlgebra, HeckeElement};
use crate::character::SmoothCharacter;
use crate::error::{HeckeError, Result};
use crate::linalg::{eventual_image, Matrix};
use crate::module::{hom_space, HeckeModule, HomSpace};
use crate::weyl::{inv_mod, GenKind, GroupKind, WeylElement};

/// The torus Levi of SL2 or GL2, with the element `z` used for localization.
#[derive(Clone, Debug)]
pub struct LeviDatum {
    ambient: Algebra,
    levi: Algebra,
    z: WeylElement,
}

impl LeviDatum {
    pub fn torus(ambient: &Algebra) -> Result<LeviDatum> {
        let (rank, z) = match ambient.kind() {
            GroupKind::GL2 => (2, WeylElement::diagonal(vec![0, 1], vec![1, 1])),
            GroupKind::SL2 => (1, WeylElement::diagonal(vec![-1, 1], vec![1, 1])),
            GroupKind::Torus(_) => {
                return Err(HeckeError::InvalidArgument("the torus has no proper Levi".into()));
            }
        };
        let levi = HeckeAlgebra::new(GroupKind::Torus(rank), ambient.p(), ambient.field().degree())?;
        let datum = LeviDatum { ambient: ambient.clone(), levi, z };
        datum.check_lattice()?;
        Ok(datum)
    }

    pub fn ambient(&self) -> &Algebra {
        &self.ambient
    }

    pub fn levi(&self) -> &Algebra {
        &self.levi
    }

    /// `z` as an element of the ambient `W(1)`.
    pub fn z(&self) -> &WeylElement {
        &self.z
    }

    pub fn z_inverse(&self) -> WeylElement {
        self.ambient.weyl().inverse(&self.z)
    }

    /// Torus element of the Levi, as an element of the ambient `W(1)`.
    pub fn embed(&self, t: &WeylElement) -> WeylElement {
        match self.ambient.kind() {
            GroupKind::SL2 => {
                let u = t.units()[0];
                WeylElement::diagonal(vec![t.vals()[0], -t.vals()[0]], vec![u, inv_mod(u, self.ambient.p())])
            }
            _ => t.clone(),
        }
    }

    /// Inverse of `embed` on diagonal elements.
    pub fn restrict(&self, w: &WeylElement) -> Result<WeylElement> {
        if !w.is_diagonal() {
            return Err(HeckeError::InvalidArgument(format!("{w} is not in the torus")));
        }
        Ok(match self.ambient.kind() {
            GroupKind::SL2 => WeylElement::diagonal(vec![w.vals()[0]], vec![w.units()[0]]),
            _ => w.clone(),
        })
    }

    /// Membership in `M^+`.
    pub fn is_positive(&self, t: &WeylElement) -> bool {
        self.ambient.weyl().is_positive(&self.embed(t)).expect("embedded torus element")
    }

    /// `z^-1` is positive, `z` is not, and every valuation vector in a box is
    /// reached from an antidominant one by a power of `z^-1`.
    pub fn check_lattice(&self) -> Result<()> {
        let weyl = self.ambient.weyl();
        let zi = self.z_inverse();
        let bad = |what: &str| Err(HeckeError::Internal(format!("Levi datum: {what}")));
        if !weyl.is_positive(&zi)? || weyl.is_positive(&self.z)? {
            return bad("z^-1 must be positive and z must not be");
        }
        let rank = self.levi.kind().size() as i64;
        let step = self.restrict(&zi)?.vals().to_vec();
        let mut point = vec![-3i64; rank as usize];
        loop {
            let reached = (0..=12i64).any(|n| {
                let shifted: Vec<i64> = point.iter().zip(&step).map(|(a, s)| a - n * s).collect();
                let t = self.embed(&WeylElement::diagonal(shifted, vec![1; rank as usize]));
                // antidominant means the inverse is positive
                weyl.is_positive(&weyl.inverse(&t)).unwrap_or(false)
            });
            if !reached {
                return bad(&format!("valuation {point:?} not generated by Z^- and z^-1"));
            }
            let mut i = 0;
            loop {
                if i == point.len() {
                    return Ok(());
                }
                point[i] += 1;
                if point[i] <= 3 {
                    break;
                }
                point[i] = -3;
                i += 1;
            }
        }
    }

    /// `theta(T^M_m) = T_m` on elements of `H_T` supported on `M^+`.
    pub fn theta_embed(&self, x: &HeckeElement) -> Result<HeckeElement> {
        self.levi.check_same(x.algebra())?;
        let mut out = HeckeElement::zero(&self.ambient);
        for (t, &c) in x.terms() {
            if !self.is_positive(t) {
                return Err(HeckeError::NotPositive(format!("{t} is not in M+")));
            }
            out.add_term(self.embed(t), c);
        }
        Ok(out)
    }

    // The action of the levi element `t` on an `H_T`-module.
    fn torus_action(&self, n: &HeckeModule, ambient_t: &WeylElement) -> Matrix {
        n.evaluate(&self.restrict(ambient_t).expect("torus element"))
    }
}

/// `Ind(n)` for a module `n` over the torus algebra of the Levi.
pub fn induce(datum: &LeviDatum, n: &HeckeModule) -> Result<HeckeModule> {
    datum.levi.check_same(n.algebra())?;
    let amb = &datum.ambient;
    let weyl = amb.weyl();
    let f = amb.field();
    let d = n.dim();
    let s1 = weyl.affine_generator(1).clone();
    let s1_inv = weyl.inverse(&s1);
    let conj_s1 = |t: &WeylElement| weyl.mul(&weyl.mul(&s1, t), &s1_inv);
    let zero = Matrix::zeros(f, d, d);
    let id = Matrix::identity(f, d);
    let block = |a: &Matrix, b: &Matrix, c: &Matrix, e: &Matrix| a.hstack(b).vstack(&c.hstack(e));
    let sum_over = |terms: &[WeylElement], twist: bool| {
        let mut acc = Matrix::zeros(f, d, d);
        for t in terms {
            let t = if twist { conj_s1(t) } else { t.clone() };
            acc = acc.add(&datum.torus_action(n, &t));
        }
        acc
    };

    let a_s1 = block(&zero, &id, &zero, &sum_over(amb.quadratic_terms(1), false));
    let mut lz = Vec::new();
    let mut a_pi = None;
    for g in &weyl.generators().length_zero {
        let m = match g.kind {
            GenKind::FiniteTorus(_) => {
                let top = datum.torus_action(n, &g.elem);
                let bottom = datum.torus_action(n, &conj_s1(&g.elem));
                top.direct_sum(&bottom)
            }
            GenKind::Pi => {
                let pi = &g.elem;
                let m_plus = WeylElement::diagonal(vec![1, 0], vec![1, 1]);
                let n_plus = datum.torus_action(n, &m_plus);
                let n_plus_inv = n_plus
                    .inverse()
                    .ok_or_else(|| HeckeError::Internal("torus action is not invertible".into()))?;
                let n_pi2 = datum.torus_action(n, &weyl.mul(pi, pi));
                let a = block(&zero, &n_pi2.mul(&n_plus_inv), &n_plus, &zero);
                a_pi = Some(a.clone());
                a
            }
            _ => unreachable!("rank-one groups have no translation generators"),
        };
        lz.push(m);
    }
    let a_s0 = match amb.kind() {
        GroupKind::GL2 => {
            let a_pi = a_pi.expect("GL2 has Pi");
            let a_pi_inv = a_pi.inverse().expect("Pi acts invertibly");
            a_pi.mul(&a_s1).mul(&a_pi_inv)
        }
        _ => {
            let top = sum_over(amb.quadratic_terms(0), true);
            let n_zi = datum.torus_action(n, &datum.z_inverse());
            block(&top, &zero, &n_zi, &zero)
        }
    };
    let mut gens = vec![a_s0, a_s1];
    gens.extend(lz);
    HeckeModule::new(amb, 2 * d, gens)
        .map_err(|e| HeckeError::Internal(format!("induced module fails its audit: {e}")))
}

/// `Ind` of a character of the torus.
pub fn induce_character(datum: &LeviDatum, chi: &SmoothCharacter) -> Result<HeckeModule> {
    induce(datum, &HeckeModule::torus_character(&datum.levi, chi)?)
}

/// Smallest `k >= 0` with `t (z^-1)^k` positive, and that positive element.
fn positive_part(datum: &LeviDatum, t: &WeylElement) -> (u32, WeylElement) {
    let lw = datum.levi.weyl();
    let zi = datum.restrict(&datum.z_inverse()).expect("z is in the torus");
    let mut k = 0;
    let mut m = t.clone();
    while !datum.is_positive(&m) {
        m = lw.mul(&m, &zi);
        k += 1;
    }
    (k, m)
}

/// `R(m)`: the eventual image `E` of `T_{z^-1}` with `T^M_t` acting by
/// `T_{m+} (T_{z^-1}|_E)^-k` for `t = z^k m+`.
pub fn right_adjoint(datum: &LeviDatum, m: &HeckeModule) -> Result<HeckeModule> {
    datum.ambient.check_same(m.algebra())?;
    let a = m.evaluate(&datum.z_inverse());
    let ev = eventual_image(&a)?;
    let e = ev.basis;
    let dim = e.rows();
    let r_inv = ev
        .restricted
        .inverse()
        .ok_or_else(|| HeckeError::Internal("restriction to the eventual image is not invertible".into()))?;
    let lw = datum.levi.weyl();
    let zi = datum.restrict(&datum.z_inverse())?;
    let restrict_to_e = |x: &Matrix| -> Result<Matrix> {
        e.coordinates_of(&e.mul(x))
            .ok_or_else(|| HeckeError::Internal("positive torus element does not preserve the eventual image".into()))
    };
    let mut gens = Vec::new();
    for g in &lw.generators().length_zero {
        let (k, m_plus) = positive_part(datum, &g.elem);
        let act = restrict_to_e(&m.evaluate(&datum.embed(&m_plus)))?.mul(&r_inv.pow(k as u64));
        let m_plus2 = lw.mul(&m_plus, &zi);
        let again = restrict_to_e(&m.evaluate(&datum.embed(&m_plus2)))?.mul(&r_inv.pow(k as u64 + 1));
        if act != again {
            return Err(HeckeError::Internal(format!(
                "action of {} on R(m) depends on the decomposition",
                g.elem
            )));
        }
        gens.push(act);
    }
    if dim == 0 {
        return Ok(HeckeModule::zero(&datum.levi));
    }
    HeckeModule::new(&datum.levi, dim, gens)
        .map_err(|e| HeckeError::Internal(format!("R(m) fails its audit: {e}")))
}

#[derive(Clone, Debug)]
pub struct AdjunctionReport {
    /// `Hom_H(Ind(n), m)`.
    pub lhs: HomSpace,
    /// `Hom_{H_T}(n, R(m))`.
    pub rhs: HomSpace,
}

impl AdjunctionReport {
    pub fn holds(&self) -> bool {
        self.lhs.dim() == self.rhs.dim()
    }
}

pub fn adjunction_check(datum: &LeviDatum, n: &HeckeModule, m: &HeckeModule) -> Result<AdjunctionReport> {
    let ind = induce(datum, n)?;
    let r = right_adjoint(datum, m)?;
    Ok(AdjunctionReport { lhs: hom_space(&ind, m)?, rhs: hom_space(n, &r)? })
}

/// `T_{z^-1}` is nilpotent on `m` and on its involution twist.
pub fn is_supersingular(datum: &LeviDatum, m: &HeckeModule) -> Result<bool> {
    let zi = datum.z_inverse();
    Ok(m.evaluate(&zi).is_nilpotent() && m.involution_twist()?.evaluate(&zi).is_nilpotent())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parabolic {
    /// The upper Borel, with Levi the diagonal torus.
    Borel,
    /// The whole group.
    Whole,
}

/// The character `m -> prod alpha(m) |alpha(m)|_p` over the positive roots
/// outside the Levi, reduced mod p.
pub fn dualizing_character(ambient: GroupKind, parabolic: Parabolic, p: u32) -> Result<SmoothCharacter> {
    let rank = match ambient {
        GroupKind::GL2 => 2,
        GroupKind::SL2 => 1,
        GroupKind::Torus(n) => n,
    };
    match (ambient, parabolic) {
        (_, Parabolic::Whole) => Ok(SmoothCharacter::trivial(rank)),
        (GroupKind::Torus(_), Parabolic::Borel) => {
            Err(HeckeError::InvalidArgument("a torus has no proper Borel".into()))
        }
        (kind, Parabolic::Borel) => Ok(crate::character::alpha_bar(kind, p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{is_isomorphic, CharacterKind};

    fn setup(kind: GroupKind, p: u32) -> LeviDatum {
        LeviDatum::torus(&HeckeAlgebra::over_prime_field(kind, p).unwrap()).unwrap()
    }

    #[test]
    fn theta_rejects_non_positive() {
        let d = setup(GroupKind::GL2, 5);
        let f = d.levi().field().clone();
        let plus = HeckeElement::from_terms(d.levi(), [(WeylElement::diagonal(vec![1, 0], vec![1, 1]), f.one())]);
        assert!(d.theta_embed(&plus).is_ok());
        let minus = HeckeElement::from_terms(d.levi(), [(WeylElement::diagonal(vec![0, 1], vec![1, 1]), f.one())]);
        assert!(matches!(d.theta_embed(&minus), Err(HeckeError::NotPositive(_))));
    }

    #[test]
    fn induced_modules_audit() {
        for kind in [GroupKind::GL2, GroupKind::SL2] {
            let d = setup(kind, 5);
            let rank = d.levi().kind().size();
            for chi in SmoothCharacter::enumerate(5, rank, &[vec![1; rank], vec![2; rank]]) {
                let m = induce_character(&d, &chi).unwrap();
                assert_eq!(m.dim(), 2);
                let r = right_adjoint(&d, &m).unwrap();
                let n = HeckeModule::torus_character(d.levi(), &chi).unwrap();
                assert!(is_isomorphic(&r, &n).unwrap().is_iso(), "{kind} {chi}");
            }
        }
    }

    #[test]
    fn r_of_trivial_vanishes() {
        let d = setup(GroupKind::GL2, 5);
        let triv = HeckeModule::character(d.ambient(), CharacterKind::Triv).unwrap();
        assert_eq!(right_adjoint(&d, &triv).unwrap().dim(), 0);
    }
}
