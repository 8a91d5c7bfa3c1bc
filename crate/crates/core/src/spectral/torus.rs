//! Cohomology of `Z_p^n` with trivial coefficients.

use crate::field::Field;
use crate::linalg::Matrix;

/// `dim H^i(Z_p^n, F) = binom(n, i)`.
pub fn torus_cohomology(n: usize, i: usize) -> u64 {
    if i > n {
        return 0;
    }
    let i = i.min(n - i) as u64;
    let mut acc: u64 = 1;
    for k in 0..i {
        acc = acc * (n as u64 - k) / (k + 1);
    }
    acc
}

/// Subsets of `0..n` of size `k` as bitmasks, in increasing order.
fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

/// Koszul differential `Λ^k -> Λ^{k+1}`, `ω -> Σ_l (g_l - 1) e_l ∧ ω`, for
/// commuting scalars `g_l` by which the generators act.
fn koszul_differential(f: &Field, action: &[u32], k: usize) -> Matrix {
    let n = action.len();
    let src = subsets(n, k);
    let dst = subsets(n, k + 1);
    let mut d = Matrix::zeros(f, src.len(), dst.len());
    for (a, &s) in src.iter().enumerate() {
        for (l, &g) in action.iter().enumerate() {
            if s & (1 << l) != 0 {
                continue;
            }
            let coeff = f.sub(f.elem(g), f.one());
            // sign of moving e_l past the basis vectors below it
            let sign = if (s & ((1 << l) - 1)).count_ones() % 2 == 0 { coeff } else { f.neg(coeff) };
            let b = dst.iter().position(|&t| t == s | (1 << l)).unwrap();
            d.set(a, b, f.add(d.get(a, b), sign));
        }
    }
    d
}

/// Dimensions of the cohomology of the Koszul complex of `Z^n` acting on a
/// line through the given scalars, computed from ranks. With trivial action
/// these are the dimensions of `H^i(Z_p^n, F)`.
pub fn koszul_cohomology(f: &Field, action: &[u32]) -> Vec<u64> {
    let n = action.len();
    let ranks: Vec<usize> = (0..n).map(|k| koszul_differential(f, action, k).rank()).collect();
    (0..=n)
        .map(|k| {
            let dim = torus_cohomology(n, k) as usize;
            let out = if k < n { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            (dim - out - inc) as u64
        })
        .collect()
}
