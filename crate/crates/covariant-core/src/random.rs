//! Seeded sampling of states, directions and Hermitian operators.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{ComplexMatrix, DensityMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Uniformly distributed unit vector in ℝⁿ.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Haar-random pure state vector.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random state GG†/tr(GG†) from a d×k Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(d, k, |_, _| complex_gaussian(rng));
    let m = g.matmul(&g.adjoint());
    DensityMatrix::normalized(&m).expect("Ginibre product is a valid unnormalized state")
}

/// Full-rank random state.
pub fn random_mixed_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    random_state(d, d, rng)
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&random_ket(d, rng)).expect("nonzero ket")
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    g.hermitian_part()
}

/// Random traceless Hermitian matrix with unit operator norm.
pub fn random_traceless_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let mut h = random_hermitian(d, rng);
        let t = h.trace().re / d as f64;
        for i in 0..d {
            h[(i, i)] -= C64::new(t, 0.0);
        }
        let n = h.op_norm();
        if n > 1e-12 {
            return h.scale_real(1.0 / n);
        }
    }
}

/// Random qubit Bloch vector drawn uniformly from the unit ball.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let u = unit_vector(3, rng);
    let r = rng.random::<f64>().cbrt();
    [r * u[0], r * u[1], r * u[2]]
}
