//! Finite-dimensional right modules over a Hecke algebra.
//!
//! A module is stored as one matrix per generator (affine generators first, then
//! length-zero generators). Vectors are rows and `v . T_g = v A_g`, so
//! `T_u T_v` acts by `A_u A_v`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Algebra, HeckeElement};
use crate::character::{DetCharacter, GroupCharacter, SmoothCharacter};
use crate::error::{HeckeError, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;
use crate::weyl::{GenKind, GroupKind, WeylElement};

#[derive(Clone)]
pub struct HeckeModule {
    alg: Algebra,
    dim: usize,
    gens: Vec<Matrix>,
    lz_inv: Vec<Matrix>,
}

/// Built-in one-dimensional characters of `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharacterKind {
    /// `T_s -> 0`, length-zero `T_w -> 1`.
    Triv,
    /// `T_s -> -1`, length-zero `T_w -> 1`.
    Sign,
    /// `Sign` twisted by the unramified character `p -> -1` of the determinant.
    SignStar,
    /// Explicit values on the generators, affine first.
    Custom(Vec<Scalar>),
}

/// Basis of `Hom(m, n)`: matrices `F` with `A_g(m) F = F A_g(n)` for every
/// generator `g`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub basis: Vec<Matrix>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub enum Isomorphism {
    /// A verified invertible intertwiner.
    Isomorphic(Matrix),
    NotIsomorphic(String),
    Inconclusive(String),
}

impl Isomorphism {
    pub fn is_iso(&self) -> bool {
        matches!(self, Isomorphism::Isomorphic(_))
    }

    pub fn is_non_iso(&self) -> bool {
        matches!(self, Isomorphism::NotIsomorphic(_))
    }
}

/// Random trials before falling back to exhaustive or extension-field search.
const RANDOM_TRIALS: usize = 64;
/// Largest hom space (as a number of points `q^h`) searched exhaustively.
const EXHAUSTIVE_POINTS: u64 = 1 << 20;
/// Evaluations of the determinant over an extension field before declaring it zero.
const ZIPPEL_TRIALS: usize = 16;

pub fn generator_names(alg: &Algebra) -> Vec<String> {
    let gens = alg.weyl().generators();
    (0..alg.num_affine())
        .map(|i| format!("s{i}"))
        .chain(gens.length_zero.iter().map(|g| match g.kind {
            GenKind::FiniteTorus(i) => format!("t{i}"),
            GenKind::Translation(i) => format!("p{i}"),
            GenKind::Pi => "Pi".to_string(),
            GenKind::Affine(i) => format!("s{i}"),
        }))
        .collect()
}

fn num_generators(alg: &Algebra) -> usize {
    alg.num_affine() + alg.weyl().generators().length_zero.len()
}

impl HeckeModule {
    /// Module with the given generator matrices; fails unless every defining
    /// relation holds.
    pub fn new(alg: &Algebra, dim: usize, gens: Vec<Matrix>) -> Result<HeckeModule> {
        let m = HeckeModule::from_parts(alg, dim, gens)?;
        m.audit()?;
        Ok(m)
    }

    fn from_parts(alg: &Algebra, dim: usize, gens: Vec<Matrix>) -> Result<HeckeModule> {
        if gens.len() != num_generators(alg) {
            return Err(HeckeError::InvalidArgument(format!(
                "{} generator matrices given, {} needed",
                gens.len(),
                num_generators(alg)
            )));
        }
        for (g, name) in gens.iter().zip(generator_names(alg)) {
            if g.rows() != dim || g.cols() != dim {
                return Err(HeckeError::DimensionMismatch(format!(
                    "generator {name} is {}x{}, module has dimension {dim}",
                    g.rows(),
                    g.cols()
                )));
            }
            if g.field() != alg.field() {
                return Err(HeckeError::DescriptorMismatch(format!("generator {name} over the wrong field")));
            }
        }
        let na = alg.num_affine();
        let mut lz_inv = Vec::new();
        for (g, name) in gens[na..].iter().zip(generator_names(alg).into_iter().skip(na)) {
            lz_inv.push(g.inverse().ok_or_else(|| {
                HeckeError::RelationViolated(format!("length-zero generator {name} is not invertible"))
            })?);
        }
        Ok(HeckeModule { alg: alg.clone(), dim, gens, lz_inv })
    }

    pub fn zero(alg: &Algebra) -> HeckeModule {
        let f = alg.field();
        let gens = vec![Matrix::zeros(f, 0, 0); num_generators(alg)];
        HeckeModule::from_parts(alg, 0, gens).expect("zero module")
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn field(&self) -> &Field {
        self.alg.field()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generator matrices, affine first.
    pub fn generator_matrices(&self) -> &[Matrix] {
        &self.gens
    }

    pub fn affine_matrix(&self, i: usize) -> &Matrix {
        &self.gens[i]
    }

    pub fn length_zero_matrix(&self, j: usize) -> &Matrix {
        &self.gens[self.alg.num_affine() + j]
    }

    fn lz_power(&self, j: usize, e: i64) -> Matrix {
        let base = if e >= 0 { self.length_zero_matrix(j) } else { &self.lz_inv[j] };
        base.pow(e.unsigned_abs())
    }

    /// Action matrix of `T_w`, expanded through a reduced word of `w`.
    pub fn evaluate(&self, w: &WeylElement) -> Matrix {
        let weyl = self.alg.weyl();
        let (omega, word) = weyl.reduced_word(w);
        let mut acc = Matrix::identity(self.field(), self.dim);
        for (j, e) in weyl.length_zero_word(&omega) {
            if e != 0 {
                acc = acc.mul(&self.lz_power(j, e));
            }
        }
        for i in word {
            acc = acc.mul(&self.gens[i]);
        }
        acc
    }

    /// Action matrix of an arbitrary algebra element.
    pub fn act(&self, x: &HeckeElement) -> Result<Matrix> {
        self.alg.check_same(x.algebra())?;
        let f = self.field();
        let mut acc = Matrix::zeros(f, self.dim, self.dim);
        for (w, &c) in x.terms() {
            acc = acc.add(&self.evaluate(w).scale(c));
        }
        Ok(acc)
    }

    fn quadratic_matrix(&self, i: usize) -> Matrix {
        let mut acc = Matrix::zeros(self.field(), self.dim, self.dim);
        for t in self.alg.quadratic_terms(i) {
            acc = acc.add(&self.evaluate(t));
        }
        acc
    }

    /// `lhs - rhs` for each defining relation of the presentation: orders of
    /// finite-torus generators, conjugation among length-zero generators and
    /// of affine generators by length-zero ones, and the quadratic relations.
    pub fn relation_residuals(&self) -> Vec<(String, Matrix)> {
        let weyl = self.alg.weyl().clone();
        let gens = weyl.generators();
        let names = generator_names(&self.alg);
        let na = self.alg.num_affine();
        let p = self.alg.p() as u64;
        let mut out = Vec::new();
        for (j, g) in gens.length_zero.iter().enumerate() {
            if matches!(g.kind, GenKind::FiniteTorus(_)) {
                let id = Matrix::identity(self.field(), self.dim);
                out.push((format!("{}^(p-1) = 1", names[na + j]), self.length_zero_matrix(j).pow(p - 1).sub(&id)));
            }
        }
        for (j, g) in gens.length_zero.iter().enumerate() {
            let aj = self.length_zero_matrix(j);
            for (k, h) in gens.length_zero.iter().enumerate() {
                let conj = weyl.conjugate(&g.elem, &h.elem);
                let lhs = aj.mul(self.length_zero_matrix(k));
                let rhs = self.evaluate(&conj).mul(aj);
                out.push((format!("conjugation of {} by {}", names[na + k], names[na + j]), lhs.sub(&rhs)));
            }
            for i in 0..na {
                let conj = weyl.conjugate(&g.elem, weyl.affine_generator(i));
                let lhs = aj.mul(&self.gens[i]);
                let rhs = self.evaluate(&conj).mul(aj);
                out.push((format!("conjugation of {} by {}", names[i], names[na + j]), lhs.sub(&rhs)));
            }
        }
        for i in 0..na {
            let a = &self.gens[i];
            out.push((format!("quadratic relation for {}", names[i]), a.mul(a).sub(&self.quadratic_matrix(i).mul(a))));
        }
        out
    }

    /// Checks the defining relations, then braid instances `T_u T_v = T_uv`
    /// of total length at most 3 as a consistency check on `evaluate`.
    pub fn audit(&self) -> Result<()> {
        for (name, r) in self.relation_residuals() {
            if !r.is_zero() {
                return Err(HeckeError::RelationViolated(name));
            }
        }
        let weyl = self.alg.weyl().clone();
        if self.alg.num_affine() == 0 {
            return Ok(());
        }
        let mut samples: Vec<WeylElement> = Vec::new();
        for word in weyl.affine_words_up_to(2) {
            let w = weyl.word_product(&word);
            samples.push(w.clone());
            for g in &weyl.generators().length_zero {
                samples.push(weyl.mul(&g.elem, &w));
            }
        }
        for u in &samples {
            let lu = weyl.length(u);
            let eu = self.evaluate(u);
            for v in &samples {
                let lv = weyl.length(v);
                if lu + lv > 3 {
                    continue;
                }
                let uv = weyl.mul(u, v);
                if weyl.length(&uv) == lu + lv && eu.mul(&self.evaluate(v)) != self.evaluate(&uv) {
                    return Err(HeckeError::RelationViolated(format!("braid relation T[{u}] T[{v}] = T[{uv}]")));
                }
            }
        }
        Ok(())
    }

    /// One-dimensional characters of `H`.
    pub fn character(alg: &Algebra, kind: CharacterKind) -> Result<HeckeModule> {
        let f = alg.field();
        let na = alg.num_affine();
        let nl = alg.weyl().generators().length_zero.len();
        let one = |s: Scalar| Matrix::scalar(f, 1, s);
        let minus_one = f.neg(f.one());
        match kind {
            CharacterKind::Triv => {
                let gens = (0..na).map(|_| one(f.zero())).chain((0..nl).map(|_| one(f.one()))).collect();
                HeckeModule::new(alg, 1, gens)
            }
            CharacterKind::Sign | CharacterKind::SignStar if alg.kind().is_torus() => Err(
                HeckeError::InvalidArgument("sign characters need affine generators".into()),
            ),
            CharacterKind::Sign => {
                let gens = (0..na).map(|_| one(minus_one)).chain((0..nl).map(|_| one(f.one()))).collect();
                HeckeModule::new(alg, 1, gens)
            }
            CharacterKind::SignStar => {
                let sign = HeckeModule::character(alg, CharacterKind::Sign)?;
                let nr = DetCharacter::unramified(minus_one.value());
                sign.twist(&GroupCharacter::from_det(alg, nr))
            }
            CharacterKind::Custom(values) => {
                if values.len() != na + nl {
                    return Err(HeckeError::InvalidArgument(format!(
                        "{} character values given, {} needed",
                        values.len(),
                        na + nl
                    )));
                }
                HeckeModule::new(alg, 1, values.into_iter().map(one).collect())
            }
        }
    }

    /// The one-dimensional module of a torus Hecke algebra on which `T_t` acts by `chi(t)`.
    pub fn torus_character(alg: &Algebra, chi: &SmoothCharacter) -> Result<HeckeModule> {
        let GroupKind::Torus(n) = alg.kind() else {
            return Err(HeckeError::InvalidArgument("torus characters need a torus algebra".into()));
        };
        if chi.rank() != n {
            return Err(HeckeError::InvalidArgument(format!("character of rank {} on Torus({n})", chi.rank())));
        }
        let f = alg.field();
        let gens = alg
            .weyl()
            .generators()
            .length_zero
            .iter()
            .map(|g| Matrix::scalar(f, 1, chi.eval(f, &g.elem)))
            .collect();
        HeckeModule::new(alg, 1, gens)
    }

    /// The dual module: `T_g` acts by the transpose of the action of `T_{g^-1}`.
    pub fn dual(&self) -> Result<HeckeModule> {
        let weyl = self.alg.weyl();
        let gens = weyl.generators();
        let elems = gens.affine.iter().chain(gens.length_zero.iter().map(|g| &g.elem));
        let mats = elems.map(|g| self.evaluate(&weyl.inverse(g)).transpose()).collect();
        HeckeModule::new(&self.alg, self.dim, mats)
            .map_err(|e| HeckeError::Internal(format!("dual module fails its audit: {e}")))
    }

    /// Twist: `T_g` acts by `xi(g)^-1 T_g`.
    pub fn twist(&self, xi: &GroupCharacter) -> Result<HeckeModule> {
        xi.validate(&self.alg)?;
        let f = self.field();
        let mats = self
            .gens
            .iter()
            .zip(&xi.values)
            .map(|(a, &v)| a.scale(f.inv(v).expect("character values are units")))
            .collect();
        HeckeModule::new(&self.alg, self.dim, mats)
    }

    pub fn direct_sum(&self, other: &HeckeModule) -> Result<HeckeModule> {
        self.alg.check_same(&other.alg)?;
        let mats = self.gens.iter().zip(&other.gens).map(|(a, b)| a.direct_sum(b)).collect();
        HeckeModule::from_parts(&self.alg, self.dim + other.dim, mats)
    }

    /// `self^{(+) n}`.
    pub fn power(&self, n: usize) -> HeckeModule {
        let mut acc = HeckeModule::zero(&self.alg);
        for _ in 0..n {
            acc = acc.direct_sum(self).expect("same algebra");
        }
        acc
    }

    /// Module in which `T_s` acts by `c_s - T_s` and length-zero elements act as before.
    pub fn involution_twist(&self) -> Result<HeckeModule> {
        let mut mats = self.gens.clone();
        for (i, m) in mats.iter_mut().enumerate().take(self.alg.num_affine()) {
            *m = self.quadratic_matrix(i).sub(m);
        }
        HeckeModule::new(&self.alg, self.dim, mats)
    }

    /// Row basis of the smallest submodule containing the given rows.
    pub fn span_closure(&self, vectors: &Matrix) -> Matrix {
        let mut basis = vectors.row_basis();
        loop {
            let mut stacked = basis.clone();
            for g in &self.gens {
                stacked = stacked.vstack(&basis.mul(g));
            }
            let next = stacked.row_basis();
            if next.rows() == basis.rows() {
                return basis;
            }
            basis = next;
        }
    }

    /// The submodule with the given row basis.
    pub fn submodule(&self, basis: &Matrix) -> Result<HeckeModule> {
        let mut mats = Vec::new();
        for g in &self.gens {
            mats.push(basis.coordinates_of(&basis.mul(g)).ok_or_else(|| {
                HeckeError::InvalidArgument("subspace is not stable under the action".into())
            })?);
        }
        HeckeModule::from_parts(&self.alg, basis.rows(), mats)
    }

    /// The quotient by the submodule with the given row basis.
    pub fn quotient(&self, basis: &Matrix) -> Result<HeckeModule> {
        let comp = basis.complement_rows();
        let full = basis.vstack(&comp);
        let k = basis.rows();
        let mut mats = Vec::new();
        for g in &self.gens {
            let coords = full
                .coordinates_of(&comp.mul(g))
                .ok_or_else(|| HeckeError::Internal("complement does not span".into()))?;
            if !basis.coordinates_of(&basis.mul(g)).is_some() {
                return Err(HeckeError::InvalidArgument("subspace is not stable under the action".into()));
            }
            mats.push(coords.submatrix(0..comp.rows(), k..k + comp.rows()));
        }
        HeckeModule::from_parts(&self.alg, comp.rows(), mats)
    }

    /// Every line of `F_q^dim`, by a representative with leading coefficient 1.
    fn lines(&self) -> Vec<Matrix> {
        let f = self.field();
        let q = f.order();
        let d = self.dim;
        let mut out = Vec::new();
        for lead in 0..d {
            let free = d - lead - 1;
            let count = (q as u64).pow(free as u32);
            for code in 0..count {
                let mut v = Matrix::zeros(f, 1, d);
                v.set(0, lead, f.one());
                let mut c = code;
                for j in (lead + 1)..d {
                    v.set(0, j, f.elem((c % q as u64) as u32));
                    c /= q as u64;
                }
                out.push(v);
            }
        }
        out
    }

    /// Row basis of a simple submodule: a cyclic submodule of least dimension,
    /// found by going through every line.
    pub fn minimal_submodule(&self) -> Option<Matrix> {
        let mut best: Option<Matrix> = None;
        for v in self.lines() {
            let s = self.span_closure(&v);
            if best.as_ref().is_none_or(|b| s.rows() < b.rows()) {
                let done = s.rows() == 1;
                best = Some(s);
                if done {
                    break;
                }
            }
        }
        best
    }

    pub fn is_simple(&self) -> bool {
        self.dim > 0 && self.minimal_submodule().is_some_and(|s| s.rows() == self.dim)
    }

    /// Composition factors, bottom of the series first.
    pub fn composition_factors(&self, budget: usize) -> Result<Vec<HeckeModule>> {
        if self.dim > budget {
            return Err(HeckeError::BudgetExceeded(format!(
                "composition factors of a {}-dimensional module (budget {budget})",
                self.dim
            )));
        }
        let mut out = Vec::new();
        let mut current = self.clone();
        while current.dim > 0 {
            let s = current.minimal_submodule().expect("nonzero module has lines");
            if s.rows() == current.dim {
                out.push(current);
                break;
            }
            out.push(current.submodule(&s)?);
            current = current.quotient(&s)?;
        }
        Ok(out)
    }

    /// Pretty-printed generator matrices.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "module over {} (p = {}, q = {}), dim {}\n",
            self.alg.kind(),
            self.alg.p(),
            self.field().order(),
            self.dim
        );
        for (name, m) in generator_names(&self.alg).iter().zip(&self.gens) {
            s.push_str(&format!("  T[{name}] = {m}\n"));
        }
        s
    }
}

impl fmt::Debug for HeckeModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// Solves `A_g(m) F = F A_g(n)` for all generators.
pub fn hom_space(m: &HeckeModule, n: &HeckeModule) -> Result<HomSpace> {
    m.alg.check_same(&n.alg)?;
    let f = m.field();
    let (dm, dn) = (m.dim, n.dim);
    let vars = dm * dn;
    if vars == 0 {
        return Ok(HomSpace { domain_dim: dm, codomain_dim: dn, basis: Vec::new() });
    }
    let ngen = m.gens.len();
    let mut sys = Matrix::zeros(f, ngen * vars, vars);
    for (gi, (a, b)) in m.gens.iter().zip(&n.gens).enumerate() {
        for i in 0..dm {
            for j in 0..dn {
                let row = gi * vars + i * dn + j;
                for k in 0..dm {
                    let c = a.get(i, k);
                    if !c.is_zero() {
                        let col = k * dn + j;
                        sys.set(row, col, f.add(sys.get(row, col), c));
                    }
                }
                for l in 0..dn {
                    let c = b.get(l, j);
                    if !c.is_zero() {
                        let col = i * dn + l;
                        sys.set(row, col, f.sub(sys.get(row, col), c));
                    }
                }
            }
        }
    }
    let ker = sys.kernel();
    let basis = (0..ker.cols())
        .map(|c| Matrix::from_fn(f, dm, dn, |i, j| ker.get(i * dn + j, c)))
        .collect();
    Ok(HomSpace { domain_dim: dm, codomain_dim: dn, basis })
}

fn is_intertwiner(m: &HeckeModule, n: &HeckeModule, x: &Matrix) -> bool {
    m.gens.iter().zip(&n.gens).all(|(a, b)| a.mul(x) == x.mul(b))
}

fn combination(f: &Field, basis: &[Matrix], coeffs: &[Scalar]) -> Matrix {
    let mut acc = Matrix::zeros(f, basis[0].rows(), basis[0].cols());
    for (b, &c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

// Ranks of (A - lambda)^k: a similarity invariant used to reject quickly.
fn similarity_profile(a: &Matrix, lambdas: &[Scalar]) -> Vec<usize> {
    let f = a.field();
    let n = a.rows();
    let mut out = Vec::new();
    for &l in lambdas {
        let shifted = a.sub(&Matrix::scalar(f, n, l));
        let mut p = Matrix::identity(f, n);
        for _ in 0..n {
            p = p.mul(&shifted);
            out.push(p.rank());
        }
    }
    out
}

/// Decides whether `m` and `n` are isomorphic. Positive answers always carry a
/// verified witness.
pub fn is_isomorphic(m: &HeckeModule, n: &HeckeModule) -> Result<Isomorphism> {
    m.alg.check_same(&n.alg)?;
    if m.dim != n.dim {
        return Ok(Isomorphism::NotIsomorphic(format!("dimensions {} and {}", m.dim, n.dim)));
    }
    let f = m.field().clone();
    if m.dim == 0 {
        return Ok(Isomorphism::Isomorphic(Matrix::zeros(&f, 0, 0)));
    }
    let lambdas: Vec<Scalar> = if f.order() <= 64 { f.elements().collect() } else { vec![f.zero()] };
    let names = generator_names(&m.alg);
    for (i, (a, b)) in m.gens.iter().zip(&n.gens).enumerate() {
        if similarity_profile(a, &lambdas) != similarity_profile(b, &lambdas) {
            return Ok(Isomorphism::NotIsomorphic(format!("generator {} acts by non-similar matrices", names[i])));
        }
    }
    let hom = hom_space(m, n)?;
    if hom.dim() == 0 {
        return Ok(Isomorphism::NotIsomorphic("Hom(m, n) = 0".into()));
    }
    let end = hom_space(m, m)?;
    if end.dim() != hom.dim() {
        return Ok(Isomorphism::NotIsomorphic(format!(
            "dim Hom(m, n) = {} but dim End(m) = {}",
            hom.dim(),
            end.dim()
        )));
    }
    let h = hom.dim();
    let q = f.order() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1507_3a11);
    let verified = |x: Matrix| -> Option<Matrix> {
        (x.is_invertible() && is_intertwiner(m, n, &x)).then_some(x)
    };
    if h == 1 {
        return Ok(match verified(hom.basis[0].clone()) {
            Some(x) => Isomorphism::Isomorphic(x),
            None => Isomorphism::NotIsomorphic("the one-dimensional Hom(m, n) has no invertible element".into()),
        });
    }
    for _ in 0..RANDOM_TRIALS {
        let coeffs: Vec<Scalar> = (0..h).map(|_| f.elem(rng.random_range(0..f.order()))).collect();
        if let Some(x) = verified(combination(&f, &hom.basis, &coeffs)) {
            return Ok(Isomorphism::Isomorphic(x));
        }
    }
    let points = q.checked_pow(h as u32).filter(|&n| n <= EXHAUSTIVE_POINTS);
    if let Some(points) = points {
        for code in 0..points {
            let mut c = code;
            let coeffs: Vec<Scalar> = (0..h)
                .map(|_| {
                    let v = (c % q) as u32;
                    c /= q;
                    f.elem(v)
                })
                .collect();
            if let Some(x) = verified(combination(&f, &hom.basis, &coeffs)) {
                return Ok(Isomorphism::Isomorphic(x));
            }
        }
        return Ok(Isomorphism::NotIsomorphic(format!(
            "no invertible element among all {points} elements of Hom(m, n)"
        )));
    }
    zippel_fallback(m, n, &hom, &mut rng)
}

// When Hom is too large to enumerate: the determinant on Hom(m, n) is a
// polynomial of degree dim m. If it vanishes at many random points of a large
// extension field it is zero, and then no isomorphism exists even after
// extending scalars. If it does not vanish, an isomorphism exists over F_q as
// well, and a longer random search looks for it.
fn zippel_fallback(
    m: &HeckeModule,
    n: &HeckeModule,
    hom: &HomSpace,
    rng: &mut ChaCha8Rng,
) -> Result<Isomorphism> {
    let f = m.field().clone();
    if f.degree() != 1 {
        return Ok(Isomorphism::Inconclusive(format!(
            "Hom(m, n) has dimension {} over a non-prime field",
            hom.dim()
        )));
    }
    let p = f.characteristic();
    let mut k = 1u32;
    while (p as u64).pow(k) < 4096 {
        k += 1;
    }
    let ext = Field::new(p, k)?;
    let lifted: Vec<Matrix> = hom
        .basis
        .iter()
        .map(|b| Matrix::from_fn(&ext, b.rows(), b.cols(), |i, j| ext.elem(b.get(i, j).value())))
        .collect();
    let mut nonzero = false;
    for _ in 0..ZIPPEL_TRIALS {
        let coeffs: Vec<Scalar> = (0..hom.dim()).map(|_| ext.elem(rng.random_range(0..ext.order()))).collect();
        if combination(&ext, &lifted, &coeffs).is_invertible() {
            nonzero = true;
            break;
        }
    }
    if !nonzero {
        return Ok(Isomorphism::NotIsomorphic(format!(
            "determinant on Hom(m, n) vanishes at {ZIPPEL_TRIALS} random points of F_{}",
            ext.order()
        )));
    }
    for _ in 0..(RANDOM_TRIALS * 64) {
        let coeffs: Vec<Scalar> = (0..hom.dim()).map(|_| f.elem(rng.random_range(0..f.order()))).collect();
        let x = combination(&f, &hom.basis, &coeffs);
        if x.is_invertible() && is_intertwiner(m, n, &x) {
            return Ok(Isomorphism::Isomorphic(x));
        }
    }
    Ok(Isomorphism::Inconclusive(
        "isomorphic after extending scalars, but no witness over F_q was found".into(),
    ))
}

/// Matches two lists of simple modules up to isomorphism and order.
pub fn same_multiset(a: &[HeckeModule], b: &[HeckeModule]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let mut found = false;
        for (j, y) in b.iter().enumerate() {
            if !used[j] && is_isomorphic(x, y)?.is_iso() {
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extensions `0 -> sub -> E -> quot -> 0`, realized on `sub (+) quot` with
/// generator matrices `[[S_g, 0], [C_g, Q_g]]`.
#[derive(Clone, Debug)]
pub struct ExtensionSpace {
    /// Dimension of the space of cocycles `(C_g)`.
    pub cocycles: usize,
    /// Dimension of the coboundaries `C_g = X S_g - Q_g X`.
    pub coboundaries: usize,
    /// One nonsplit extension for each vector of a basis of `Ext^1` (in the
    /// chosen complement of the coboundaries).
    pub nonsplit: Vec<HeckeModule>,
}

impl ExtensionSpace {
    pub fn ext_dim(&self) -> usize {
        self.cocycles - self.coboundaries
    }
}

fn block_module(sub: &HeckeModule, quot: &HeckeModule, c: &[Matrix]) -> Result<HeckeModule> {
    let f = sub.field();
    let (ns, nq) = (sub.dim, quot.dim);
    let mats = sub
        .gens
        .iter()
        .zip(&quot.gens)
        .zip(c)
        .map(|((s, q), c)| s.hstack(&Matrix::zeros(f, ns, nq)).vstack(&c.hstack(q)))
        .collect();
    HeckeModule::from_parts(&sub.alg, ns + nq, mats)
}

fn flatten_residuals(m: &HeckeModule) -> Vec<Scalar> {
    m.relation_residuals().into_iter().flat_map(|(_, r)| r.entries().to_vec()).collect()
}

pub fn extensions(sub: &HeckeModule, quot: &HeckeModule) -> Result<ExtensionSpace> {
    sub.alg.check_same(&quot.alg)?;
    let f = sub.field().clone();
    let (ns, nq) = (sub.dim, quot.dim);
    let ngen = sub.gens.len();
    let per = nq * ns;
    let nvars = ngen * per;
    let unpack = |v: &dyn Fn(usize) -> Scalar| -> Vec<Matrix> {
        (0..ngen)
            .map(|g| Matrix::from_fn(&f, nq, ns, |i, j| v(g * per + i * ns + j)))
            .collect()
    };
    if nvars == 0 {
        return Ok(ExtensionSpace { cocycles: 0, coboundaries: 0, nonsplit: Vec::new() });
    }
    // The residuals are linear in the C_g: every product of block lower
    // triangular matrices has an off-diagonal block with exactly one C factor.
    let base = flatten_residuals(&block_module(sub, quot, &unpack(&|_| f.zero()))?);
    if base.iter().any(|x| !x.is_zero()) {
        return Err(HeckeError::Internal("direct sum violates the relations".into()));
    }
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(nvars);
    for k in 0..nvars {
        let c = unpack(&|idx| if idx == k { f.one() } else { f.zero() });
        columns.push(flatten_residuals(&block_module(sub, quot, &c)?));
    }
    let rows = columns[0].len();
    let lin = Matrix::from_fn(&f, rows, nvars, |i, j| columns[j][i]);
    let z = lin.kernel();
    // coboundaries: X -> (X S_g - Q_g X)_g
    let mut cob_cols: Vec<Vec<Scalar>> = Vec::new();
    for k in 0..per {
        let x = Matrix::from_fn(&f, nq, ns, |i, j| if i * ns + j == k { f.one() } else { f.zero() });
        let mut col = Vec::with_capacity(nvars);
        for (s, q) in sub.gens.iter().zip(&quot.gens) {
            col.extend_from_slice(x.mul(s).sub(&q.mul(&x)).entries());
        }
        cob_cols.push(col);
    }
    let cob = Matrix::from_fn(&f, per, nvars, |i, j| cob_cols[i][j]).row_basis();
    let zt = z.transpose();
    let coboundaries = cob.rows();
    let mut chosen = cob.clone();
    let mut nonsplit = Vec::new();
    for r in 0..zt.rows() {
        let row = zt.submatrix(r..r + 1, 0..nvars);
        let stacked = chosen.vstack(&row);
        if stacked.rank() > chosen.rows() {
            chosen = stacked;
            let c = unpack(&|idx| row.get(0, idx));
            let m = block_module(sub, quot, &c)?;
            m.audit()
                .map_err(|e| HeckeError::Internal(format!("extension fails its audit: {e}")))?;
            nonsplit.push(m);
        }
    }
    Ok(ExtensionSpace { cocycles: zt.rows(), coboundaries, nonsplit })
}
