//! The pro-p extended affine Weyl group `W(1)` for SL2, GL2 and split tori.
//!
//! Elements are monomial matrices with entries `u * p^a`, `u` a unit residue mod
//! `p`. Lengths come from a breadth-first search over words in the affine
//! reflections `s0, s1`, after the length-zero part has been split off.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{HeckeError, Result};
use crate::field::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    SL2,
    GL2,
    /// The diagonal torus of `GL_n`.
    Torus(usize),
}

impl GroupKind {
    /// Matrix size of elements of `W(1)`.
    pub fn size(self) -> usize {
        match self {
            GroupKind::SL2 | GroupKind::GL2 => 2,
            GroupKind::Torus(n) => n,
        }
    }

    pub fn is_torus(self) -> bool {
        matches!(self, GroupKind::Torus(_))
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::SL2 => write!(f, "SL2"),
            GroupKind::GL2 => write!(f, "GL2"),
            GroupKind::Torus(n) => write!(f, "Torus({n})"),
        }
    }
}

impl std::str::FromStr for GroupKind {
    type Err = HeckeError;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_uppercase().as_str() {
            "SL2" => return Ok(GroupKind::SL2),
            "GL2" => return Ok(GroupKind::GL2),
            _ => {}
        }
        let lower = t.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("torus(").and_then(|r| r.strip_suffix(')')) {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| HeckeError::InvalidArgument(format!("bad torus rank in `{s}`")))?;
            return Ok(GroupKind::Torus(n));
        }
        Err(HeckeError::InvalidArgument(format!("unknown group `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDatum {
    pub kind: GroupKind,
    pub p: u32,
}

impl GroupDatum {
    pub fn new(kind: GroupKind, p: u32) -> Result<GroupDatum> {
        if !crate::field::is_prime(p) || p < 5 {
            return Err(HeckeError::InvalidArgument(format!("p must be a prime >= 5, got {p}")));
        }
        if let GroupKind::Torus(n) = kind {
            if n == 0 {
                return Err(HeckeError::InvalidArgument("torus rank must be >= 1".into()));
            }
        }
        Ok(GroupDatum { kind, p })
    }
}

/// An element of `W(1)`: row `i` has the single entry `units[i] * p^vals[i]`
/// in column `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    perm: Vec<u8>,
    vals: Vec<i64>,
    units: Vec<u32>,
}

impl WeylElement {
    pub fn identity(n: usize) -> WeylElement {
        WeylElement { perm: (0..n as u8).collect(), vals: vec![0; n], units: vec![1; n] }
    }

    /// Monomial matrix from its rows; panics on an invalid permutation or a
    /// zero unit.
    pub fn new(perm: Vec<u8>, vals: Vec<i64>, units: Vec<u32>) -> WeylElement {
        let n = perm.len();
        assert!(vals.len() == n && units.len() == n);
        let mut seen = vec![false; n];
        for &c in &perm {
            assert!((c as usize) < n && !seen[c as usize], "not a permutation");
            seen[c as usize] = true;
        }
        assert!(units.iter().all(|&u| u != 0), "units must be nonzero");
        WeylElement { perm, vals, units }
    }

    pub fn diagonal(vals: Vec<i64>, units: Vec<u32>) -> WeylElement {
        let n = vals.len();
        WeylElement::new((0..n as u8).collect(), vals, units)
    }

    /// 2x2 antidiagonal element with entries `(u0 p^a0)` in row 0 and
    /// `(u1 p^a1)` in row 1.
    pub fn antidiagonal(a0: i64, u0: u32, a1: i64, u1: u32) -> WeylElement {
        WeylElement::new(vec![1, 0], vec![a0, a1], vec![u0, u1])
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[u8] {
        &self.perm
    }

    pub fn vals(&self) -> &[i64] {
        &self.vals
    }

    pub fn units(&self) -> &[u32] {
        &self.units
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &c)| i == c as usize)
    }

    /// Diagonal with trivial valuations: an element of the finite torus `T(F_p)`.
    pub fn is_finite_torus(&self) -> bool {
        self.is_diagonal() && self.vals.iter().all(|&a| a == 0)
    }

    /// Valuation of the determinant.
    pub fn det_val(&self) -> i64 {
        self.vals.iter().sum()
    }

    /// Unit part of the determinant (including the permutation sign) mod `p`.
    pub fn det_unit(&self, p: u32) -> u32 {
        let mut u = 1u64;
        for &x in &self.units {
            u = u * x as u64 % p as u64;
        }
        if perm_sign(&self.perm) < 0 {
            u = (p as u64 - u) % p as u64;
        }
        u as u32
    }

    fn shape(&self) -> Shape {
        Shape { perm: self.perm.clone(), vals: self.vals.clone() }
    }

    /// Monomial-matrix product `self * other` with units reduced mod `p`.
    pub fn mul_mod(&self, other: &WeylElement, p: u32) -> WeylElement {
        assert_eq!(self.size(), other.size(), "size mismatch in W(1) product");
        let n = self.size();
        let mut perm = vec![0u8; n];
        let mut vals = vec![0i64; n];
        let mut units = vec![0u32; n];
        for i in 0..n {
            let j = self.perm[i] as usize;
            perm[i] = other.perm[j];
            vals[i] = self.vals[i] + other.vals[j];
            units[i] = ((self.units[i] as u64 * other.units[j] as u64) % p as u64) as u32;
        }
        WeylElement { perm, vals, units }
    }

    pub fn inverse_mod(&self, p: u32) -> WeylElement {
        let n = self.size();
        let mut perm = vec![0u8; n];
        let mut vals = vec![0i64; n];
        let mut units = vec![0u32; n];
        for i in 0..n {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            vals[j] = -self.vals[i];
            units[j] = inv_mod(self.units[i], p);
        }
        WeylElement { perm, vals, units }
    }
}

fn perm_sign(perm: &[u8]) -> i32 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

pub(crate) fn inv_mod(u: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = u as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn fmt_entry(f: &mut fmt::Formatter<'_>, a: i64, u: u32) -> fmt::Result {
    match (a, u) {
        (0, u) => write!(f, "{u}"),
        (1, 1) => write!(f, "p"),
        (a, 1) => write!(f, "p^{a}"),
        (1, u) => write!(f, "{u}*p"),
        (a, u) => write!(f, "{u}*p^{a}"),
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        if self.is_diagonal() {
            write!(f, "diag(")?;
        } else if n == 2 {
            write!(f, "anti(")?;
        } else {
            write!(f, "mono[")?;
            for (i, c) in self.perm.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "](")?;
        }
        for i in 0..n {
            if i > 0 {
                write!(f, ", ")?;
            }
            fmt_entry(f, self.vals[i], self.units[i])?;
        }
        write!(f, ")")
    }
}

/// Image of an element in the extended affine Weyl group `W` (units forgotten).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Shape {
    perm: Vec<u8>,
    vals: Vec<i64>,
}

impl Shape {
    fn mul(&self, other: &Shape) -> Shape {
        let n = self.perm.len();
        let mut perm = vec![0u8; n];
        let mut vals = vec![0i64; n];
        for i in 0..n {
            let j = self.perm[i] as usize;
            perm[i] = other.perm[j];
            vals[i] = self.vals[i] + other.vals[j];
        }
        Shape { perm, vals }
    }

    fn identity(n: usize) -> Shape {
        Shape { perm: (0..n as u8).collect(), vals: vec![0; n] }
    }
}

/// Index of a generator inside a [`GeneratorSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    /// Affine reflection `s_i`.
    Affine(usize),
    /// Generator of the finite torus: the primitive root in coordinate `i`
    /// (for SL2, `diag(g, g^-1)`).
    FiniteTorus(usize),
    /// `p` in coordinate `i` of a split torus.
    Translation(usize),
    /// `Pi` for GL2.
    Pi,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub kind: GenKind,
    pub elem: WeylElement,
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub affine: Vec<WeylElement>,
    pub length_zero: Vec<Generator>,
}

#[derive(Default)]
struct WordCache {
    levels: Vec<Vec<Shape>>,
    words: HashMap<Shape, Vec<u8>>,
}

/// `W(1)` for a fixed group datum, with its fixed generator lifts and a
/// memoized word table for the affine Weyl group.
pub struct WeylGroup {
    datum: GroupDatum,
    field: Field,
    gens: GeneratorSet,
    pi: Option<WeylElement>,
    cache: Mutex<WordCache>,
}

impl fmt::Debug for WeylGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeylGroup").field("datum", &self.datum).finish()
    }
}

impl WeylGroup {
    pub fn new(datum: GroupDatum) -> Result<Arc<WeylGroup>> {
        let GroupDatum { kind, p } = GroupDatum::new(datum.kind, datum.p)?;
        let field = Field::prime(p)?;
        let g = field.prime_root();
        let m1 = p - 1;
        let (affine, length_zero, pi) = match kind {
            GroupKind::SL2 => {
                let s1 = WeylElement::antidiagonal(0, 1, 0, m1);
                let s0 = WeylElement::antidiagonal(-1, m1, 1, 1);
                let t = WeylElement::diagonal(vec![0, 0], vec![g, inv_mod(g, p)]);
                (vec![s0, s1], vec![Generator { kind: GenKind::FiniteTorus(0), elem: t }], None)
            }
            GroupKind::GL2 => {
                let s1 = WeylElement::antidiagonal(0, 1, 0, 1);
                let pi = WeylElement::antidiagonal(0, 1, 1, 1);
                let s0 = pi.mul_mod(&s1, p).mul_mod(&pi.inverse_mod(p), p);
                let t0 = WeylElement::diagonal(vec![0, 0], vec![g, 1]);
                let t1 = WeylElement::diagonal(vec![0, 0], vec![1, g]);
                (
                    vec![s0, s1],
                    vec![
                        Generator { kind: GenKind::FiniteTorus(0), elem: t0 },
                        Generator { kind: GenKind::FiniteTorus(1), elem: t1 },
                        Generator { kind: GenKind::Pi, elem: pi.clone() },
                    ],
                    Some(pi),
                )
            }
            GroupKind::Torus(n) => {
                let mut gens = Vec::new();
                for i in 0..n {
                    let mut units = vec![1; n];
                    units[i] = g;
                    gens.push(Generator {
                        kind: GenKind::FiniteTorus(i),
                        elem: WeylElement::diagonal(vec![0; n], units),
                    });
                }
                for i in 0..n {
                    let mut vals = vec![0; n];
                    vals[i] = 1;
                    gens.push(Generator {
                        kind: GenKind::Translation(i),
                        elem: WeylElement::diagonal(vals, vec![1; n]),
                    });
                }
                (Vec::new(), gens, None)
            }
        };
        Ok(Arc::new(WeylGroup {
            datum: GroupDatum { kind, p },
            field,
            gens: GeneratorSet { affine, length_zero },
            pi,
            cache: Mutex::new(WordCache::default()),
        }))
    }

    pub fn datum(&self) -> GroupDatum {
        self.datum
    }

    pub fn kind(&self) -> GroupKind {
        self.datum.kind
    }

    pub fn p(&self) -> u32 {
        self.datum.p
    }

    pub fn size(&self) -> usize {
        self.datum.kind.size()
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    /// The fixed lift of the affine reflection `s_i`.
    pub fn affine_generator(&self, i: usize) -> &WeylElement {
        &self.gens.affine[i]
    }

    pub fn pi(&self) -> Option<&WeylElement> {
        self.pi.as_ref()
    }

    pub fn prime_field(&self) -> &Field {
        &self.field
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement::identity(self.size())
    }

    /// Checks that `w` is a valid element for this datum.
    pub fn validate(&self, w: &WeylElement) -> Result<()> {
        let p = self.p();
        if w.size() != self.size() {
            return Err(HeckeError::DescriptorMismatch(format!(
                "element {w} has size {} but {} needs size {}",
                w.size(),
                self.kind(),
                self.size()
            )));
        }
        if w.units.iter().any(|&u| u == 0 || u >= p) {
            return Err(HeckeError::InvalidArgument(format!("element {w} has units outside F_{p}^x")));
        }
        match self.kind() {
            GroupKind::SL2 => {
                if w.det_val() != 0 || w.det_unit(p) != 1 {
                    return Err(HeckeError::InvalidArgument(format!("element {w} is not in SL2")));
                }
            }
            GroupKind::Torus(_) => {
                if !w.is_diagonal() {
                    return Err(HeckeError::InvalidArgument(format!("element {w} is not diagonal")));
                }
            }
            GroupKind::GL2 => {}
        }
        Ok(())
    }

    pub fn multiply(&self, u: &WeylElement, v: &WeylElement) -> Result<WeylElement> {
        self.validate(u)?;
        self.validate(v)?;
        Ok(self.mul(u, v))
    }

    pub(crate) fn mul(&self, u: &WeylElement, v: &WeylElement) -> WeylElement {
        u.mul_mod(v, self.p())
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        w.inverse_mod(self.p())
    }

    pub fn conjugate(&self, g: &WeylElement, x: &WeylElement) -> WeylElement {
        self.mul(&self.mul(g, x), &self.inverse(g))
    }

    /// All elements of the finite torus `T(F_p)` for this datum.
    pub fn finite_torus(&self) -> Vec<WeylElement> {
        let p = self.p();
        let n = self.size();
        match self.kind() {
            GroupKind::SL2 => (1..p)
                .map(|u| WeylElement::diagonal(vec![0, 0], vec![u, inv_mod(u, p)]))
                .collect(),
            _ => {
                let mut out = vec![Vec::new()];
                for _ in 0..n {
                    out = out
                        .into_iter()
                        .flat_map(|pre: Vec<u32>| {
                            (1..p).map(move |u| {
                                let mut v = pre.clone();
                                v.push(u);
                                v
                            })
                        })
                        .collect();
                }
                out.into_iter().map(|u| WeylElement::diagonal(vec![0; n], u)).collect()
            }
        }
    }

    fn pi_shape_power(&self, k: i64) -> Shape {
        let pi = self.pi.as_ref().expect("Pi exists for GL2").shape();
        let base = if k >= 0 {
            pi
        } else {
            self.inverse(self.pi.as_ref().unwrap()).shape()
        };
        let mut s = Shape::identity(2);
        for _ in 0..k.unsigned_abs() {
            s = s.mul(&base);
        }
        s
    }

    /// The exponent `k` with `w` in `Pi^k W_aff(1)` (always 0 except for GL2).
    pub fn omega_index(&self, w: &WeylElement) -> i64 {
        match self.kind() {
            GroupKind::GL2 => w.det_val(),
            _ => 0,
        }
    }

    fn affine_shape(&self, w: &WeylElement) -> Shape {
        match self.kind() {
            GroupKind::GL2 => self.pi_shape_power(-self.omega_index(w)).mul(&w.shape()),
            _ => w.shape(),
        }
    }

    fn affine_word(&self, target: &Shape) -> Vec<u8> {
        let n = self.size();
        let bound = {
            let (a, b) = (target.vals[0], target.vals[1]);
            (a - b).unsigned_abs() as usize + 2
        };
        let gens: Vec<Shape> = self.gens.affine.iter().map(|s| s.shape()).collect();
        let mut cache = self.cache.lock().expect("word cache poisoned");
        if cache.levels.is_empty() {
            let id = Shape::identity(n);
            cache.words.insert(id.clone(), Vec::new());
            cache.levels.push(vec![id]);
        }
        loop {
            if let Some(w) = cache.words.get(target) {
                return w.clone();
            }
            let depth = cache.levels.len();
            assert!(
                depth <= bound + 1,
                "element of W_aff not found within length bound {bound}"
            );
            let mut next: Vec<(Vec<u8>, Shape)> = Vec::new();
            let mut found: HashMap<Shape, Vec<u8>> = HashMap::new();
            let last = cache.levels[depth - 1].clone();
            for (i, s) in gens.iter().enumerate() {
                for x in &last {
                    let y = s.mul(x);
                    if cache.words.contains_key(&y) {
                        continue;
                    }
                    let mut word = vec![i as u8];
                    word.extend_from_slice(&cache.words[x]);
                    match found.get(&y) {
                        Some(w) if *w <= word => {}
                        _ => {
                            found.insert(y.clone(), word);
                        }
                    }
                }
            }
            for (y, w) in found {
                next.push((w, y));
            }
            next.sort();
            for (w, y) in &next {
                cache.words.insert(y.clone(), w.clone());
            }
            cache.levels.push(next.into_iter().map(|(_, y)| y).collect());
        }
    }

    /// Length of the image of `w` in the affine Weyl group.
    pub fn length(&self, w: &WeylElement) -> usize {
        if self.kind().is_torus() {
            return 0;
        }
        self.affine_word(&self.affine_shape(w)).len()
    }

    /// `w = omega * s_{i1} ... s_{ik}` with `k = length(w)`, `omega` of length zero.
    pub fn reduced_word(&self, w: &WeylElement) -> (WeylElement, Vec<usize>) {
        if self.kind().is_torus() {
            return (w.clone(), Vec::new());
        }
        let word: Vec<usize> = self
            .affine_word(&self.affine_shape(w))
            .into_iter()
            .map(|i| i as usize)
            .collect();
        let prod = self.word_product(&word);
        let omega = self.mul(w, &self.inverse(&prod));
        (omega, word)
    }

    /// Product of the fixed lifts `s_{i1} ... s_{ik}`.
    pub fn word_product(&self, word: &[usize]) -> WeylElement {
        word.iter()
            .fold(self.identity(), |acc, &i| self.mul(&acc, &self.gens.affine[i]))
    }

    /// Expresses a length-zero element as a product of powers of the length-zero
    /// generators, in the order they are listed (finite torus first, then
    /// translations or `Pi`).
    pub fn length_zero_word(&self, omega: &WeylElement) -> Vec<(usize, i64)> {
        let field = &self.field;
        match self.kind() {
            GroupKind::SL2 => {
                debug_assert!(omega.is_finite_torus());
                vec![(0, field.prime_log(omega.units[0]) as i64)]
            }
            GroupKind::GL2 => {
                let k = omega.det_val();
                let pi = self.pi.as_ref().unwrap();
                let mut pk = self.identity();
                let step = if k >= 0 { pi.clone() } else { self.inverse(pi) };
                for _ in 0..k.unsigned_abs() {
                    pk = self.mul(&pk, &step);
                }
                let t = self.mul(omega, &self.inverse(&pk));
                debug_assert!(t.is_finite_torus(), "{omega} is not of length zero");
                vec![
                    (0, field.prime_log(t.units[0]) as i64),
                    (1, field.prime_log(t.units[1]) as i64),
                    (2, k),
                ]
            }
            GroupKind::Torus(n) => {
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..n {
                    out.push((i, field.prime_log(omega.units[i]) as i64));
                }
                for i in 0..n {
                    out.push((n + i, omega.vals[i]));
                }
                out
            }
        }
    }

    /// Membership in the positive monoid for the upper Borel: valuations weakly
    /// decreasing down the diagonal.
    pub fn is_positive(&self, t: &WeylElement) -> Result<bool> {
        if !t.is_diagonal() {
            return Err(HeckeError::InvalidArgument(format!("{t} is not a torus element")));
        }
        Ok(t.vals.windows(2).all(|w| w[0] >= w[1]))
    }

    /// Affine Weyl group elements of length at most `max_len`, each as its
    /// reduced word.
    pub fn affine_words_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        if self.kind().is_torus() {
            return vec![Vec::new()];
        }
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for i in 0..self.gens.affine.len() {
                    if w.first() == Some(&i) {
                        continue;
                    }
                    let mut nw = vec![i];
                    nw.extend_from_slice(w);
                    next.push(nw);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}
