//! Spin algebra: angular momentum matrices, rotations and Clebsch-Gordan coefficients.
//!
//! Spins are passed doubled (`two_j = 2j`) so half-integers stay exact. Basis
//! vectors within a spin block are ordered by descending m.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::hermitian::{eig_hermitian, ComplexMatrix, C64, I};

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Angular momentum matrices (Jx, Jy, Jz) in the |j, m⟩ basis, m descending.
pub fn spin_matrices(two_j: u32) -> [ComplexMatrix; 3] {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m_of = |k: usize| j - k as f64;
    let mut jp = ComplexMatrix::zeros(d, d);
    for k in 1..d {
        let m = m_of(k);
        jp[(k - 1, k)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale_real(0.5);
    let jy = (&jp - &jm).scale(C64::new(0.0, -0.5));
    let jz = ComplexMatrix::from_diag(&(0..d).map(m_of).collect::<Vec<_>>());
    [jx, jy, jz]
}

/// exp(−iθ n·J) for a unit axis n.
pub fn rotation(two_j: u32, angle: f64, axis: [f64; 3]) -> ComplexMatrix {
    let [jx, jy, jz] = spin_matrices(two_j);
    let mut gen = jx.scale_real(axis[0]);
    gen.axpy(C64::new(axis[1], 0.0), &jy);
    gen.axpy(C64::new(axis[2], 0.0), &jz);
    let eig = eig_hermitian(&gen).expect("spin generator is Hermitian");
    let d = gen.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, &lam) in eig.values.iter().enumerate() {
        let ph = (-I * (angle * lam)).exp();
        let v = eig.vector(k);
        for a in 0..d {
            let va = v[a] * ph;
            for b in 0..d {
                out[(a, b)] += va * v[b].conj();
            }
        }
    }
    out
}

/// exp(−iπ Jy), the real matrix relating a spin block to its conjugate.
pub fn conjugation_intertwiner(two_j: u32) -> ComplexMatrix {
    let mut y = rotation(two_j, core::f64::consts::PI, [0.0, 1.0, 0.0]);
    for z in y.data_mut() {
        *z = C64::new(z.re, 0.0);
    }
    y
}

/// ⟨j1 m1; j2 m2 | J M⟩ with all arguments doubled (Condon-Shortley phases).
pub fn clebsch_gordan(two_j1: i64, two_m1: i64, two_j2: i64, two_m2: i64, two_j: i64, two_m: i64) -> f64 {
    if two_m1 + two_m2 != two_m {
        return 0.0;
    }
    if two_m1.abs() > two_j1 || two_m2.abs() > two_j2 || two_m.abs() > two_j {
        return 0.0;
    }
    if two_j < (two_j1 - two_j2).abs() || two_j > two_j1 + two_j2 || (two_j1 + two_j2 + two_j) % 2 != 0 {
        return 0.0;
    }
    if (two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 || (two_j + two_m) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i64| x / 2;
    let a = h(two_j1 + two_j2 - two_j);
    let b = h(two_j1 - two_m1);
    let c = h(two_j2 + two_m2);
    let e = h(two_j - two_j2 + two_m1);
    let f = h(two_j - two_j1 - two_m2);
    let pre = ((two_j + 1) as f64 * factorial(h(two_j + two_j1 - two_j2)) * factorial(h(two_j - two_j1 + two_j2)) * factorial(a)
        / factorial(h(two_j1 + two_j2 + two_j) + 1))
    .sqrt();
    let pre2 = (factorial(h(two_j + two_m))
        * factorial(h(two_j - two_m))
        * factorial(b)
        * factorial(h(two_j1 + two_m1))
        * factorial(h(two_j2 - two_m2))
        * factorial(c))
    .sqrt();
    let kmin = 0.max(-e).max(-f);
    let kmax = a.min(b).min(c);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = factorial(k) * factorial(a - k) * factorial(b - k) * factorial(c - k) * factorial(e + k) * factorial(f + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / den;
    }
    pre * pre2 * sum
}

/// Unit quaternions of the binary tetrahedral group, as (angle, axis) rotations.
pub fn binary_tetrahedral() -> Vec<(f64, [f64; 3])> {
    let mut quats: Vec<[f64; 4]> = Vec::with_capacity(24);
    for k in 0..4 {
        for s in [1.0, -1.0] {
            let mut q = [0.0; 4];
            q[k] = s;
            quats.push(q);
        }
    }
    for bits in 0..16u32 {
        let sg = |i: u32| if bits >> i & 1 == 1 { -0.5 } else { 0.5 };
        quats.push([sg(0), sg(1), sg(2), sg(3)]);
    }
    quats
        .into_iter()
        .map(|q| {
            let half = q[0].clamp(-1.0, 1.0).acos();
            let s = half.sin();
            let axis = if s.abs() < 1e-12 { [0.0, 0.0, 1.0] } else { [q[1] / s, q[2] / s, q[3] / s] };
            (2.0 * half, axis)
        })
        .collect()
}

/// Dimension of a spin block.
pub fn block_dim(two_j: u32) -> usize {
    two_j as usize + 1
}
