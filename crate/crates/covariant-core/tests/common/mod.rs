#![allow(dead_code)]

use covariant_core::hermitian::{ComplexMatrix, DensityMatrix, C64};
use covariant_core::random::{complex_gaussian, random_mixed_state, random_pure_state, SeededRng};
use covariant_core::symmetry::{cyclic_shift_group, pauli_group, symmetric_group_s3, Representation};
use rand::Rng;

pub fn u1_qubit() -> Representation {
    Representation::u1(vec![1, -1]).unwrap()
}

pub fn u1_qutrit() -> Representation {
    Representation::u1(vec![1, 0, -1]).unwrap()
}

pub fn su2_qubit() -> Representation {
    Representation::su2(vec![1]).unwrap()
}

/// One variant per group family and shape.
pub fn variants() -> Vec<(&'static str, Representation)> {
    vec![
        ("u1 qubit", u1_qubit()),
        ("u1 qutrit", u1_qutrit()),
        ("u1 degenerate", Representation::u1(vec![1, 1, -1]).unwrap()),
        ("su2 spin-1/2", su2_qubit()),
        ("su2 spin-1", Representation::su2(vec![2]).unwrap()),
        ("su2 0+1/2", Representation::su2(vec![0, 1]).unwrap()),
        ("z3", cyclic_shift_group(3).unwrap()),
        ("s3", symmetric_group_s3().unwrap()),
        ("pauli", pauli_group().unwrap()),
    ]
}

/// Variants whose irreps are all one-dimensional.
pub fn abelian_variants() -> Vec<(&'static str, Representation)> {
    vec![("u1 qubit", u1_qubit()), ("u1 qutrit", u1_qutrit()), ("z3", cyclic_shift_group(3).unwrap()), ("pauli", pauli_group().unwrap())]
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Pure or full-rank mixed with equal odds.
pub fn random_state(d: usize, rng: &mut SeededRng) -> DensityMatrix {
    if rng.random::<bool>() {
        random_pure_state(d, rng)
    } else {
        random_mixed_state(d, rng)
    }
}

pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
