//! Independent check of the quadratic relation: the finite reflection lift
//! reduces to the Hecke algebra of GL2(F_p) or SL2(F_p) with respect to the
//! upper unipotent subgroup, where `T_n * T_n` can be computed by counting.

use hecke_core::algebra::HeckeAlgebra;
use hecke_core::weyl::{GroupKind, WeylElement};

type M2 = [[u32; 2]; 2];

fn mul(a: &M2, b: &M2, p: u32) -> M2 {
    let mut c = [[0u32; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % p;
        }
    }
    c
}

fn det(a: &M2, p: u32) -> u32 {
    (a[0][0] * a[1][1] + p * p - a[0][1] * a[1][0] % p) % p
}

fn inv(a: &M2, p: u32) -> M2 {
    let d = det(a, p);
    let di = (1..p).find(|&x| x * d % p == 1).unwrap();
    [
        [a[1][1] * di % p, (p - a[0][1]) % p * di % p],
        [(p - a[1][0]) % p * di % p, a[0][0] * di % p],
    ]
}

fn group(p: u32, special: bool) -> Vec<M2> {
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = [[a, b], [c, d]];
                    let dt = det(&m, p);
                    if dt != 0 && (!special || dt == 1) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

fn unipotent(p: u32) -> Vec<M2> {
    (0..p).map(|x| [[1, x], [0, 1]]).collect()
}

fn double_coset(n: &M2, p: u32) -> Vec<M2> {
    let u = unipotent(p);
    let mut out = Vec::new();
    for a in &u {
        for b in &u {
            let m = mul(&mul(a, n, p), b, p);
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

// Coefficient of T_g in T_n * T_n, reduced mod p.
fn square_coefficient(n: &M2, g: &M2, p: u32, special: bool) -> u32 {
    let cell = double_coset(n, p);
    let mut count = 0u32;
    for h in group(p, special) {
        if cell.contains(&h) && cell.contains(&mul(&inv(&h, p), g, p)) {
            count += 1;
        }
    }
    assert_eq!(count % p, 0, "count is a multiple of |U|");
    (count / p) % p
}

fn to_m2(w: &WeylElement, p: u32) -> M2 {
    assert!(w.vals().iter().all(|&a| a == 0));
    let mut m = [[0u32; 2]; 2];
    for i in 0..2 {
        m[i][w.perm()[i] as usize] = w.units()[i] % p;
    }
    m
}

fn check(kind: GroupKind, p: u32) {
    let special = kind == GroupKind::SL2;
    let h = HeckeAlgebra::over_prime_field(kind, p).unwrap();
    let weyl = h.weyl();
    let s = weyl.affine_generator(1).clone();
    let n = to_m2(&s, p);
    let support = h.quadratic_terms(1);
    for t in weyl.finite_torus() {
        let g = mul(&to_m2(&t, p), &n, p);
        let expected = u32::from(support.contains(&t));
        assert_eq!(square_coefficient(&n, &g, p, special), expected, "{kind} t = {t}");
    }
    // q_s = p vanishes in the coefficient field.
    let n2 = mul(&n, &n, p);
    assert_eq!(square_coefficient(&n, &n2, p, special) % p, 0);
}

#[test]
fn gl2_quadratic_coefficient_matches_counting() {
    check(GroupKind::GL2, 5);
}

#[test]
fn sl2_quadratic_coefficient_matches_counting() {
    check(GroupKind::SL2, 5);
    check(GroupKind::SL2, 7);
}
