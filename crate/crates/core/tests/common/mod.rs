//! Oracles shared by the integration tests. None of them go through the code
//! paths they are compared against.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hecke_core::algebra::Algebra;
use hecke_core::field::{Field, Scalar};
use hecke_core::linalg::Matrix;
use hecke_core::module::HeckeModule;
use hecke_core::spectral::{E2Page, FactKind, Target};
use hecke_core::weyl::WeylElement;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Spectral sequences: enumerate every choice of differential ranks page by page.

pub struct Model {
    pub einf: Vec<u64>,
    /// Rank of each arrow, indexed like `PageModel::arrows`.
    pub ranks: Vec<u64>,
}

pub struct PageModel {
    pub positions: Vec<(i64, i64)>,
    pub e2: Vec<u64>,
    /// `(page r, source, target)` for `d_r: (i, j) -> (i + r, j - r + 1)`.
    pub arrows: Vec<(i64, usize, usize)>,
    pub models: Vec<Model>,
}

/// Every `E_inf` configuration of a page whose entries are all explicit
/// dimensions, filtered by the abutment data (including vanishing above cd).
pub fn enumerate_page(page: &E2Page) -> PageModel {
    let positions = page.support();
    let e2: Vec<u64> = positions.iter().map(|&(i, j)| page.entry(i, j).dim().expect("explicit entries")).collect();
    let index: BTreeMap<(i64, i64), usize> = positions.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let span = page.rows.iter().max().unwrap() - page.rows.iter().min().unwrap();
    let mut arrows = Vec::new();
    for r in 2..=span + 1 {
        for (a, &(i, j)) in positions.iter().enumerate() {
            if let Some(&b) = index.get(&(i + r, j - r + 1)) {
                arrows.push((r, a, b));
            }
        }
    }
    let mut models = Vec::new();
    let mut ranks = vec![0; arrows.len()];
    pages(&arrows, 2, span + 1, e2.clone(), &mut ranks, &mut models);

    let top = positions.iter().map(|&(i, j)| i + j).max().unwrap_or(0);
    models.retain(|m| {
        let abut = |n: i64| -> u64 {
            positions.iter().zip(&m.einf).filter(|(&(i, j), _)| i + j == n).map(|(_, &d)| d).sum()
        };
        (page.cd + 1..=top).all(|n| abut(n) == 0)
            && page.abutment.iter().all(|(&n, v)| v.dim().is_none_or(|d| abut(n) == d))
    });
    PageModel { positions, e2, arrows, models }
}

fn pages(
    arrows: &[(i64, usize, usize)],
    r: i64,
    last: i64,
    cur: Vec<u64>,
    ranks: &mut Vec<u64>,
    out: &mut Vec<Model>,
) {
    if r > last {
        out.push(Model { einf: cur, ranks: ranks.clone() });
        return;
    }
    let on_page: Vec<usize> = (0..arrows.len()).filter(|&k| arrows[k].0 == r).collect();
    choose(arrows, &on_page, 0, r, last, &cur, &mut vec![0; cur.len()], ranks, out);
}

#[allow(clippy::too_many_arguments)]
fn choose(
    arrows: &[(i64, usize, usize)],
    on_page: &[usize],
    k: usize,
    r: i64,
    last: i64,
    cur: &[u64],
    used: &mut Vec<u64>,
    ranks: &mut Vec<u64>,
    out: &mut Vec<Model>,
) {
    if k == on_page.len() {
        let next: Vec<u64> = cur.iter().zip(used.iter()).map(|(c, u)| c - u).collect();
        pages(arrows, r + 1, last, next, ranks, out);
        return;
    }
    let a = on_page[k];
    let (_, x, y) = arrows[a];
    let room = (cur[x] - used[x]).min(cur[y] - used[y]);
    for rank in 0..=room {
        ranks[a] = rank;
        used[x] += rank;
        used[y] += rank;
        choose(arrows, on_page, k + 1, r, last, cur, used, ranks, out);
        used[x] -= rank;
        used[y] -= rank;
    }
    ranks[a] = 0;
}

impl PageModel {
    pub fn abutment(&self, m: &Model, n: i64) -> u64 {
        self.positions.iter().zip(&m.einf).filter(|(&(i, j), _)| i + j == n).map(|(_, &d)| d).sum()
    }

    fn quiet(&self, m: &Model, x: usize, except: Option<usize>) -> bool {
        self.arrows.iter().enumerate().all(|(k, &(_, a, b))| (a != x && b != x) || Some(k) == except || m.ranks[k] == 0)
    }

    /// The identifications that hold in every model: vanishing abutments not
    /// already given, corner isomorphisms and exclusive differentials.
    pub fn forced_facts(&self, page: &E2Page) -> BTreeSet<FactKind> {
        let mut out = BTreeSet::new();
        let all = |f: &dyn Fn(&Model) -> bool| self.models.iter().all(f);
        for n in 0..=page.cd {
            let given_zero = page.abutment.get(&n).and_then(|v| v.dim()) == Some(0);
            if !given_zero && all(&|m| self.abutment(m, n) == 0) {
                out.insert(FactKind::AbutmentZero { n });
            }
            let diag: Vec<usize> = (0..self.positions.len()).filter(|&a| self.positions[a].0 + self.positions[a].1 == n).collect();
            for &a in &diag {
                if all(&|m| diag.iter().all(|&b| b == a || m.einf[b] == 0) && self.quiet(m, a, None)) {
                    out.insert(FactKind::AbutmentIso { n, entry: self.positions[a] });
                }
            }
        }
        for (k, &(_, x, y)) in self.arrows.iter().enumerate() {
            if all(&|m| m.einf[x] == 0 && m.einf[y] == 0 && self.quiet(m, x, Some(k)) && self.quiet(m, y, Some(k))) {
                out.insert(FactKind::EntryIso { from: self.positions[x], to: self.positions[y] });
            }
        }
        out
    }

    /// Smallest and largest abutment dimension in degree `n` over all models.
    pub fn abutment_range(&self, n: i64) -> (u64, u64) {
        let vals = self.models.iter().map(|m| self.abutment(m, n));
        (vals.clone().min().unwrap_or(0), vals.max().unwrap_or(0))
    }
}

/// A random page with every support entry explicit and total dimension at most `budget`.
pub fn random_page(rng: &mut ChaCha8Rng, budget: u64) -> E2Page {
    let cd = rng.random_range(2..=6i64);
    let mut rows: Vec<i64> = (0..=3).filter(|_| rng.random_bool(0.5)).collect();
    if rows.is_empty() {
        rows.push(rng.random_range(0..=3));
    }
    let cols = (0, rng.random_range(1..=cd));
    let mut page = E2Page::new(cd, rows, cols);
    let mut left = budget;
    for (i, j) in page.support() {
        let d = if left > 0 && rng.random_bool(0.4) { rng.random_range(1..=left.min(3)) } else { 0 };
        left -= d;
        page.entries.insert((i, j), hecke_core::spectral::EntryValue::Dim(d));
    }
    for n in 0..=cd {
        if rng.random_bool(0.25) {
            page.abutment.insert(n, hecke_core::spectral::EntryValue::Dim(rng.random_range(0..=2)));
        }
    }
    page
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Compares `ss_propagate` with the enumerator on one page; `Err` describes
/// the first disagreement.
pub fn compare_with_enumerator(page: &E2Page) -> Result<(), String> {
    let prop = hecke_core::spectral::ss_propagate(page, false).map_err(|e| e.to_string())?;
    let model = enumerate_page(page);
    if model.models.is_empty() != prop.contradiction.is_some() {
        return Err(format!(
            "consistency: {} models, contradiction {:?}\n{page}",
            model.models.len(),
            prop.contradiction
        ));
    }
    if model.models.is_empty() {
        return Ok(());
    }
    let ours: BTreeSet<FactKind> = prop.identifications().into_iter().map(|f| f.kind.clone()).collect();
    let forced = model.forced_facts(page);
    if ours != forced {
        return Err(format!("facts differ\npropagation: {ours:?}\nenumerator: {forced:?}\n{page}"));
    }
    for n in 0..=page.cd {
        let (lo, hi) = model.abutment_range(n);
        let (plo, phi) = prop.interval(Target::Abutment(n));
        if plo > lo || phi.is_some_and(|h| h < hi) {
            return Err(format!("abutment {n}: interval {plo}..{phi:?} excludes realized {lo}..{hi}\n{page}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Modules.

/// Whether some line of `F_q^2` is stable under every generator matrix.
pub fn has_stable_line(m: &HeckeModule) -> bool {
    assert_eq!(m.dim(), 2);
    stable_line(m.field(), m.generator_matrices())
}

pub fn stable_line(f: &Field, gens: &[Matrix]) -> bool {
    let mut lines = vec![Matrix::from_fn(f, 1, 2, |_, j| if j == 0 { f.zero() } else { f.one() })];
    for x in f.elements() {
        lines.push(Matrix::from_fn(f, 1, 2, |_, j| if j == 0 { f.one() } else { x }));
    }
    lines.iter().any(|v| {
        gens.iter().all(|g| {
            let w = v.mul(g);
            // v and vg are dependent iff the 2x2 determinant vanishes
            f.sub(f.mul(v.get(0, 0), w.get(0, 1)), f.mul(v.get(0, 1), w.get(0, 0))).is_zero()
        })
    })
}

/// Every invertible `d x d` matrix, for `d <= 2`.
pub fn general_linear(f: &Field, d: usize) -> Vec<Matrix> {
    hecke_core::classify::all_matrices(f, d).into_iter().filter(Matrix::is_invertible).collect()
}

/// Isomorphism by searching `GL_d` for a conjugating matrix.
pub fn conjugate_by_search(a: &[Matrix], b: &[Matrix], gl: &[Matrix]) -> bool {
    gl.iter().any(|p| a.iter().zip(b).all(|(x, y)| x.mul(p) == p.mul(y)))
}

/// Representation data: length-zero elements reachable from the generators
/// (with valuations in `-2..=2`) and their matrices.
pub struct LengthZeroTable {
    pub mats: BTreeMap<WeylElement, Matrix>,
}

impl LengthZeroTable {
    pub fn build(alg: &Algebra, gens: &[Matrix]) -> LengthZeroTable {
        let weyl = alg.weyl();
        let d = gens[0].rows();
        let f = alg.field();
        let mut steps = Vec::new();
        for (g, m) in weyl.generators().length_zero.iter().zip(gens) {
            steps.push((g.elem.clone(), m.clone()));
            steps.push((weyl.inverse(&g.elem), m.inverse().expect("length-zero matrices are invertible")));
        }
        let mut mats = BTreeMap::new();
        mats.insert(weyl.identity(), Matrix::identity(f, d));
        let mut frontier = vec![weyl.identity()];
        while let Some(w) = frontier.pop() {
            let mw = mats[&w].clone();
            for (s, ms) in &steps {
                let x = weyl.multiply(&w, s).unwrap();
                if x.vals().iter().any(|v| v.abs() > 2) || mats.contains_key(&x) {
                    continue;
                }
                mats.insert(x.clone(), mw.mul(ms));
                frontier.push(x);
            }
        }
        LengthZeroTable { mats }
    }

    /// The matrix of `T_w` for `w` of length zero or one, given the affine
    /// generator matrices.
    pub fn eval(&self, alg: &Algebra, affine: &[Matrix], w: &WeylElement) -> Option<Matrix> {
        if let Some(m) = self.mats.get(w) {
            return Some(m.clone());
        }
        let weyl = alg.weyl();
        for (j, s) in weyl.generators().affine.iter().enumerate() {
            let t = weyl.multiply(w, &weyl.inverse(s)).unwrap();
            if let Some(m) = self.mats.get(&t) {
                return Some(m.mul(&affine[j]));
            }
        }
        None
    }
}

/// Simple modules of dimension `d` with the given length-zero action, found by
/// running through all affine generator matrices and testing the defining
/// relations read off from basis products. Returns generator lists (affine
/// first), one per isomorphism class.
pub fn classify_by_relations(alg: &Algebra, d: usize, length_zero: &[Matrix]) -> Vec<Vec<Matrix>> {
    let f = alg.field();
    let weyl = alg.weyl();
    let table = LengthZeroTable::build(alg, length_zero);
    let na = alg.num_affine();
    let affine: Vec<WeylElement> = weyl.generators().affine.clone();
    let all = hecke_core::classify::all_matrices(f, d);

    // Relation T_s T_s = sum c_w T_w, every term of length <= 1.
    let square = |i: usize, x: &Matrix| -> bool {
        let mut rhs = Matrix::zeros(f, d, d);
        let mut gens = vec![Matrix::zeros(f, d, d); na];
        gens[i] = x.clone();
        for (w, c) in alg.basis_product(&affine[i], &affine[i]) {
            let Some(m) = table.eval(alg, &gens, &w) else { return false };
            rhs = rhs.add(&m.scale(c));
        }
        x.mul(x) == rhs
    };
    // T_g T_s = T_{g s} for length-zero g, with g s = s_j h, h of length zero.
    let mut conj: Vec<(usize, Matrix, usize, Matrix)> = Vec::new();
    for (g, mg) in table.mats.iter() {
        if g.vals().iter().any(|v| v.abs() > 1) {
            continue;
        }
        for (i, s) in affine.iter().enumerate() {
            let gs = weyl.multiply(g, s).unwrap();
            for (j, sj) in affine.iter().enumerate() {
                let h = weyl.multiply(&weyl.inverse(sj), &gs).unwrap();
                if let Some(mh) = table.mats.get(&h) {
                    conj.push((i, mg.clone(), j, mh.clone()));
                }
            }
        }
    }
    let mut cands: Vec<Vec<Matrix>> = Vec::new();
    for i in 0..na {
        cands.push(
            all.iter()
                .filter(|x| square(i, x) && conj.iter().filter(|c| c.0 == i && c.2 == i).all(|(_, g, _, h)| g.mul(x) == x.mul(h)))
                .cloned()
                .collect(),
        );
    }
    let gl = general_linear(f, d);
    let mut out: Vec<Vec<Matrix>> = Vec::new();
    for x0 in &cands[0] {
        for x1 in &cands[1] {
            let xs = [x0, x1];
            if !conj.iter().all(|(i, g, j, h)| g.mul(xs[*i]) == xs[*j].mul(h)) {
                continue;
            }
            let mut gens = vec![x0.clone(), x1.clone()];
            gens.extend(length_zero.iter().cloned());
            let simple = d == 1 || !stable_line(f, &gens);
            if simple && !out.iter().any(|o| conjugate_by_search(o, &gens, &gl)) {
                out.push(gens);
            }
        }
    }
    out
}

pub fn scalar_matrix(f: &Field, s: Scalar) -> Matrix {
    Matrix::scalar(f, 1, s)
}
