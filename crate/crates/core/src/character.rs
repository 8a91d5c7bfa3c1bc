//! Characters: smooth characters of split tori, characters of `Q_p^x`
//! composed with the determinant, and characters of `W(1)` used for twisting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Algebra;
use crate::error::{HeckeError, Result};
use crate::field::{Field, Scalar};
use crate::weyl::{GroupKind, WeylElement};

/// A smooth character of `T/T_1` for a split torus of rank `n`:
/// `diag(x_i p^{a_i}) -> prod x_i^{r_i} c_i^{a_i}`, with `x_i` read mod `p`.
///
/// For the SL2 torus the single coordinate is `x p^a` for `diag(x p^a, x^-1 p^-a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SmoothCharacter {
    /// Finite exponents, reduced mod `p - 1`.
    pub exps: Vec<i64>,
    /// Unramified values (field encodings of nonzero elements of `F_q`).
    pub unram: Vec<u32>,
}

impl SmoothCharacter {
    pub fn new(p: u32, exps: Vec<i64>, unram: Vec<u32>) -> Result<SmoothCharacter> {
        if exps.len() != unram.len() {
            return Err(HeckeError::InvalidArgument("exponent and unramified parts differ in rank".into()));
        }
        if unram.iter().any(|&c| c == 0) {
            return Err(HeckeError::InvalidArgument("unramified values must be nonzero".into()));
        }
        let m = (p - 1) as i64;
        Ok(SmoothCharacter { exps: exps.into_iter().map(|e| e.rem_euclid(m)).collect(), unram })
    }

    pub fn trivial(n: usize) -> SmoothCharacter {
        SmoothCharacter { exps: vec![0; n], unram: vec![1; n] }
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    /// Value on a diagonal `W(1)` element of the torus algebra.
    pub fn eval(&self, field: &Field, t: &WeylElement) -> Scalar {
        assert!(t.is_diagonal() && t.size() == self.rank(), "character evaluated off the torus");
        let mut acc = field.one();
        for i in 0..self.rank() {
            let u = field.from_prime_unit(t.units()[i]);
            acc = field.mul(acc, field.pow(u, self.exps[i]));
            acc = field.mul(acc, field.pow(field.elem(self.unram[i]), t.vals()[i]));
        }
        acc
    }

    pub fn mul(&self, other: &SmoothCharacter, field: &Field) -> SmoothCharacter {
        assert_eq!(self.rank(), other.rank());
        let m = (field.characteristic() - 1) as i64;
        SmoothCharacter {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| (a + b).rem_euclid(m)).collect(),
            unram: self
                .unram
                .iter()
                .zip(&other.unram)
                .map(|(&a, &b)| field.mul(field.elem(a), field.elem(b)).value())
                .collect(),
        }
    }

    pub fn inverse(&self, field: &Field) -> SmoothCharacter {
        let m = (field.characteristic() - 1) as i64;
        SmoothCharacter {
            exps: self.exps.iter().map(|a| (-a).rem_euclid(m)).collect(),
            unram: self.unram.iter().map(|&c| field.inv(field.elem(c)).unwrap().value()).collect(),
        }
    }

    /// Conjugate by the nontrivial Weyl element of the ambient rank-one group:
    /// coordinates swap for GL2, and the character is inverted for SL2.
    pub fn weyl_conjugate(&self, ambient: GroupKind, field: &Field) -> SmoothCharacter {
        match ambient {
            GroupKind::GL2 => SmoothCharacter {
                exps: vec![self.exps[1], self.exps[0]],
                unram: vec![self.unram[1], self.unram[0]],
            },
            GroupKind::SL2 => self.inverse(field),
            GroupKind::Torus(_) => self.clone(),
        }
    }

    /// Every smooth character with the given unramified samples, ordered by
    /// finite exponents first.
    pub fn enumerate(p: u32, n: usize, unram_samples: &[Vec<u32>]) -> Vec<SmoothCharacter> {
        let m = (p - 1) as i64;
        let mut exps: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..n {
            exps = exps
                .into_iter()
                .flat_map(|pre| {
                    (0..m).map(move |e| {
                        let mut v = pre.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        let mut out = Vec::new();
        for e in &exps {
            for c in unram_samples {
                out.push(SmoothCharacter { exps: e.clone(), unram: c.clone() });
            }
        }
        out
    }
}

impl fmt::Display for SmoothCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi(r=")?;
        for (i, e) in self.exps.iter().enumerate() {
            write!(f, "{}{e}", if i > 0 { "," } else { "" })?;
        }
        write!(f, "; c=")?;
        for (i, c) in self.unram.iter().enumerate() {
            write!(f, "{}{c}", if i > 0 { "," } else { "" })?;
        }
        write!(f, ")")
    }
}

/// A character `psi` of `Q_p^x` trivial on `1 + p Z_p`: `psi(p^a u) = u^e c^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetCharacter {
    pub exp: i64,
    pub unram: u32,
}

impl DetCharacter {
    pub fn trivial() -> DetCharacter {
        DetCharacter { exp: 0, unram: 1 }
    }

    /// The unramified character sending `p` to `c`.
    pub fn unramified(c: u32) -> DetCharacter {
        DetCharacter { exp: 0, unram: c }
    }

    /// `omega^e`, with `omega` the reduction mod p of the unit part.
    pub fn omega_power(e: i64) -> DetCharacter {
        DetCharacter { exp: e, unram: 1 }
    }

    pub fn eval(&self, field: &Field, val: i64, unit: u32) -> Scalar {
        let u = field.from_prime_unit(unit);
        field.mul(field.pow(u, self.exp), field.pow(field.elem(self.unram), val))
    }

    pub fn eval_det(&self, field: &Field, w: &WeylElement) -> Scalar {
        self.eval(field, w.det_val(), w.det_unit(field.characteristic()))
    }
}

/// A character of `W(1)` given by its values on the generators (affine
/// generators first, then length-zero generators).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCharacter {
    pub values: Vec<Scalar>,
}

impl GroupCharacter {
    pub fn trivial(alg: &Algebra) -> GroupCharacter {
        let n = alg.num_affine() + alg.weyl().generators().length_zero.len();
        GroupCharacter { values: vec![alg.field().one(); n] }
    }

    /// `psi o det` restricted to `W(1)`.
    pub fn from_det(alg: &Algebra, psi: DetCharacter) -> GroupCharacter {
        let f = alg.field();
        let gens = alg.weyl().generators();
        let values = gens
            .affine
            .iter()
            .chain(gens.length_zero.iter().map(|g| &g.elem))
            .map(|w| psi.eval_det(f, w))
            .collect();
        GroupCharacter { values }
    }

    /// Value on an arbitrary element, extended multiplicatively from the
    /// generators through reduced words.
    pub fn eval(&self, alg: &Algebra, w: &WeylElement) -> Scalar {
        let f = alg.field();
        let weyl = alg.weyl();
        let na = alg.num_affine();
        let (omega, word) = weyl.reduced_word(w);
        let mut acc = f.one();
        for (idx, e) in weyl.length_zero_word(&omega) {
            acc = f.mul(acc, f.pow(self.values[na + idx], e));
        }
        for i in word {
            acc = f.mul(acc, self.values[i]);
        }
        acc
    }

    /// Checks that the generator values define a character of `W(1)` whose
    /// twist is an algebra automorphism: the defining relations of `W(1)` hold,
    /// and the value on each `c_s` support element agrees with the value on `s`.
    pub fn validate(&self, alg: &Algebra) -> Result<()> {
        let f = alg.field();
        let weyl = alg.weyl();
        let gens = weyl.generators();
        let na = alg.num_affine();
        if self.values.len() != na + gens.length_zero.len() {
            return Err(HeckeError::InvalidArgument("wrong number of character values".into()));
        }
        if self.values.iter().any(|v| v.is_zero()) {
            return Err(HeckeError::RelationViolated("character values must be units".into()));
        }
        let bad = |what: String| Err(HeckeError::RelationViolated(format!("twist character: {what}")));
        let p = alg.p() as i64;
        for (j, g) in gens.length_zero.iter().enumerate() {
            if g.elem.is_finite_torus() && f.pow(self.values[na + j], p - 1) != f.one() {
                return bad(format!("finite torus generator {j} has value of order not dividing p-1"));
            }
        }
        for i in 0..na {
            let s = weyl.affine_generator(i);
            let sq = weyl.mul(s, s);
            if f.mul(self.values[i], self.values[i]) != self.eval(alg, &sq) {
                return bad(format!("s{i}^2 relation"));
            }
            for t in alg.quadratic_terms(i) {
                if self.eval(alg, t) != self.values[i] {
                    return bad(format!("value on c_s{i} support differs from value on s{i}"));
                }
            }
            for (j, g) in gens.length_zero.iter().enumerate() {
                let conj = weyl.conjugate(&g.elem, s);
                if self.eval(alg, &conj) != self.values[i] {
                    return bad(format!("conjugation of s{i} by length-zero generator {j}"));
                }
            }
        }
        for (j, g) in gens.length_zero.iter().enumerate() {
            for (k, h) in gens.length_zero.iter().enumerate() {
                let conj = weyl.conjugate(&g.elem, &h.elem);
                if self.eval(alg, &conj) != self.values[na + k] {
                    return bad(format!("conjugation of generator {k} by generator {j}"));
                }
            }
        }
        Ok(())
    }
}

/// The character `x-bar y-bar^-1` of the GL2 torus, or `x-bar^2` for SL2.
pub fn alpha_bar(ambient: GroupKind, p: u32) -> SmoothCharacter {
    match ambient {
        GroupKind::GL2 => SmoothCharacter::new(p, vec![1, -1], vec![1, 1]).unwrap(),
        GroupKind::SL2 => SmoothCharacter::new(p, vec![2], vec![1]).unwrap(),
        GroupKind::Torus(n) => SmoothCharacter::trivial(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::HeckeAlgebra;

    #[test]
    fn alpha_bar_values() {
        let f = Field::prime(7).unwrap();
        let a = alpha_bar(GroupKind::GL2, 7);
        let t = WeylElement::diagonal(vec![3, -1], vec![3, 5]);
        // 3 * 5^-1 = 3 * 3 = 9 = 2 mod 7
        assert_eq!(a.eval(&f, &t), f.elem(2));
        let s = alpha_bar(GroupKind::SL2, 7);
        assert_eq!(s.eval(&f, &WeylElement::diagonal(vec![2], vec![3])), f.elem(2));
    }

    #[test]
    fn det_twists_validate() {
        let h = HeckeAlgebra::over_prime_field(GroupKind::GL2, 5).unwrap();
        for e in 0..4 {
            for c in 1..5 {
                let xi = GroupCharacter::from_det(&h, DetCharacter { exp: e, unram: c });
                xi.validate(&h).unwrap();
            }
        }
        let mut bad = GroupCharacter::trivial(&h);
        bad.values[1] = h.field().elem(2);
        assert!(bad.validate(&h).is_err());
    }

    #[test]
    fn sl2_det_twist_is_trivial() {
        let h = HeckeAlgebra::over_prime_field(GroupKind::SL2, 7).unwrap();
        let xi = GroupCharacter::from_det(&h, DetCharacter { exp: 3, unram: 2 });
        assert_eq!(xi, GroupCharacter::trivial(&h));
    }
}
