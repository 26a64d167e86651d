//! Independent oracles shared by the integration tests. None of these call
//! into the library code paths they are used to check.
#![allow(dead_code)]

use std::collections::BTreeMap;

use diagflow::lattice::UnimodularLattice;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 3×3 (or n×n) unimodular lattice with condition number at most
/// `max_cond`. Entries are uniform in [-1, 1] before det normalisation.
pub fn random_lattice(rng: &mut ChaCha8Rng, n: usize, max_cond: f64) -> UnimodularLattice {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let sv = m.singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        if lo <= 0.0 || hi / lo > max_cond {
            continue;
        }
        if let Ok(l) = UnimodularLattice::new(m) {
            return l;
        }
    }
}

/// Brute-force short vectors on the raw basis. The box radius is twice the
/// bound `‖B⁻¹‖_op · r`, so it is deliberately wasteful.
/// Returns the ± classes (first nonzero coordinate positive) with lengths.
pub fn brute_force_short(basis: &DMatrix<f64>, bound: f64) -> BTreeMap<Vec<i64>, f64> {
    let n = basis.nrows();
    let inv = basis.clone().try_inverse().expect("invertible");
    let op = inv.singular_values().max();
    let r = (2.0 * op * bound).ceil() as i64;
    let side = 2 * r + 1;
    let total = (side as u64).pow(n as u32);
    let mut out = BTreeMap::new();
    let mut c = vec![0i64; n];
    for idx in 0..total {
        let mut k = idx;
        for slot in c.iter_mut() {
            *slot = (k % side as u64) as i64 - r;
            k /= side as u64;
        }
        let first = c.iter().find(|&&x| x != 0);
        if !first.is_some_and(|&x| x > 0) {
            continue;
        }
        let mut len2 = 0.0;
        for i in 0..n {
            let w: f64 = (0..n).map(|j| basis[(i, j)] * c[j] as f64).sum();
            len2 += w * w;
        }
        let len = len2.sqrt();
        if len <= bound * (1.0 + 1e-12) {
            out.insert(c.clone(), len);
        }
    }
    out
}

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of p and q (coefficients from the leading term down).
pub fn sylvester(p: &[BigInt], q: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (dp, dq) = (p.len() - 1, q.len() - 1);
    let size = dp + dq;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for r in 0..dq {
        for (k, c) in p.iter().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..dp {
        for (k, c) in q.iter().enumerate() {
            m[dq + r][r + k] = c.clone();
        }
    }
    m
}

/// Discriminant of a polynomial via Res(p, p'), with the usual sign
/// `(−1)^{n(n−1)/2}` and division by the leading coefficient.
pub fn resultant_discriminant(p: &[BigInt]) -> BigInt {
    let n = p.len() - 1;
    let dp: Vec<BigInt> = p[..n]
        .iter()
        .enumerate()
        .map(|(k, c)| c * BigInt::from((n - k) as i64))
        .collect();
    let res = bareiss_det(sylvester(p, &dp));
    let signed = if (n * (n - 1) / 2) % 2 == 0 { res } else { -res };
    signed / &p[0]
}

/// All complex roots of a monic polynomial (coefficients from the leading
/// term down) by Durand–Kerner iteration.
pub fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let c: Vec<f64> = coeffs.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let bound = 1.0 + c[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / z[i].norm().max(1.0));
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Monomial expansion of `N(x₀ + x₁θ + x₂θ²) = det M` where `M` is the
/// multiplication matrix on the basis (1, θ, θ²) and `θ³ = −c₂θ² − c₁θ − c₀`.
/// Keys are exponent vectors (e₀, e₁, e₂); values are integers.
pub fn norm_form_by_multiplication(c2: i64, c1: i64, c0: i64) -> BTreeMap<Vec<u32>, i64> {
    // a polynomial in x0,x1,x2 as exponent map
    type Poly = BTreeMap<[u32; 3], i64>;
    let var = |k: usize| -> Poly {
        let mut e = [0u32; 3];
        e[k] = 1;
        BTreeMap::from([(e, 1)])
    };
    let add = |a: &Poly, b: &Poly| -> Poly {
        let mut r = a.clone();
        for (k, v) in b {
            *r.entry(*k).or_insert(0) += v;
        }
        r.retain(|_, v| *v != 0);
        r
    };
    let scale = |a: &Poly, s: i64| -> Poly {
        let mut r: Poly = a.iter().map(|(k, v)| (*k, v * s)).collect();
        r.retain(|_, v| *v != 0);
        r
    };
    let mul = |a: &Poly, b: &Poly| -> Poly {
        let mut r = Poly::new();
        for (ka, va) in a {
            for (kb, vb) in b {
                let k = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
                *r.entry(k).or_insert(0) += va * vb;
            }
        }
        r.retain(|_, v| *v != 0);
        r
    };
    // columns: α·1, α·θ, α·θ² expressed in (1, θ, θ²); reduce θ^k with the minimal polynomial
    let reduce = |v: [Poly; 5]| -> [Poly; 3] {
        let mut v = v;
        for deg in (3..5).rev() {
            let top = v[deg].clone();
            v[deg - 1] = add(&v[deg - 1], &scale(&top, -c2));
            v[deg - 2] = add(&v[deg - 2], &scale(&top, -c1));
            v[deg - 3] = add(&v[deg - 3], &scale(&top, -c0));
            v[deg] = Poly::new();
        }
        [v[0].clone(), v[1].clone(), v[2].clone()]
    };
    let x = [var(0), var(1), var(2)];
    let mut cols: Vec<[Poly; 3]> = Vec::new();
    for shift in 0..3 {
        let mut v: [Poly; 5] = Default::default();
        for (k, xk) in x.iter().enumerate() {
            v[k + shift] = add(&v[k + shift], xk);
        }
        cols.push(reduce(v));
    }
    let m = |i: usize, j: usize| cols[j][i].clone();
    let minor = |i1, j1, i2, j2| add(&mul(&m(i1, j1), &m(i2, j2)), &scale(&mul(&m(i1, j2), &m(i2, j1)), -1));
    let det = add(
        &add(&mul(&m(0, 0), &minor(1, 1, 2, 2)), &scale(&mul(&m(0, 1), &minor(1, 0, 2, 2)), -1)),
        &mul(&m(0, 2), &minor(1, 0, 2, 1)),
    );
    det.into_iter().map(|(k, v)| (k.to_vec(), v)).collect()
}

pub fn eval_integer_poly(p: &BTreeMap<Vec<u32>, i64>, x: &[i64]) -> i128 {
    p.iter()
        .map(|(e, c)| {
            e.iter()
                .zip(x)
                .fold(*c as i128, |acc, (&k, &xi)| acc * (xi as i128).pow(k))
        })
        .sum()
}

pub fn squarefree_up_to(n: i64) -> Vec<i64> {
    (1..=n)
        .filter(|&d| (2..=d).take_while(|p| p * p <= d).all(|p| d % (p * p) != 0))
        .collect()
}
