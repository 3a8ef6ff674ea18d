mod common;

use common::{random_state, variants};
use covariant_core::entropy::{delta_h, partially_depolarize, phi_eta, phi_of_operator, PhiOptions, Setting};
use covariant_core::hermitian::{generalized_trace_distance, ComplexMatrix, DensityMatrix};
use covariant_core::random::seeded;
use covariant_core::symmetry::{GroupElement, Representation};
use proptest::prelude::*;
use rand::Rng;

fn variant() -> impl Strategy<Value = usize> {
    0..variants().len()
}

fn phi(eta: &DensityMatrix, tau: &DensityMatrix, rep: &Representation) -> f64 {
    phi_eta(eta, tau, &rep.dual(), rep, &PhiOptions::default()).unwrap().phi
}

/// (G_R ⊗ id)(M) for M on R⊗A, twirling each R block.
fn twirl_reference(m: &ComplexMatrix, rep: &Representation, da: usize) -> ComplexMatrix {
    let dr = rep.dim();
    let tw = rep.twirl();
    let mut out = ComplexMatrix::zeros(dr * da, dr * da);
    for k in 0..da {
        for l in 0..da {
            let block = ComplexMatrix::from_fn(dr, dr, |i, j| m[(i * da + k, j * da + l)]);
            let t = tw.apply(&block);
            for i in 0..dr {
                for j in 0..dr {
                    out[(i * da + k, j * da + l)] = t[(i, j)];
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convex_in_reference(seed in any::<u64>(), k in variant(), p in 0.0f64..=1.0) {
        let (_, rep) = &variants()[k];
        let mut rng = seeded(seed);
        let d = rep.dim();
        let (e0, e1, tau) = (random_state(d, &mut rng), random_state(d, &mut rng), random_state(d, &mut rng));
        let mixed = e1.mix(&e0, p).unwrap();
        let bound = p * phi(&e0, &tau, rep) + (1.0 - p) * phi(&e1, &tau, rep);
        prop_assert!(phi(&mixed, &tau, rep) <= bound + 1e-8);
    }

    #[test]
    fn reference_orbit_invariance(seed in any::<u64>(), k in 0usize..3, step in 0usize..16) {
        let (_, rep) = &variants()[k];
        let mut rng = seeded(seed);
        let (eta, rho) = (random_state(rep.dim(), &mut rng), random_state(rep.dim(), &mut rng));
        let reference = rep.dual();
        let t = core::f64::consts::TAU * step as f64 / 16.0;
        let v = reference.unitary(&GroupElement::Phase(t)).unwrap();
        let moved = DensityMatrix::new(v.matmul(&eta).matmul(&v.adjoint())).unwrap();
        prop_assert!((phi(&moved, &rho, rep) - phi(&eta, &rho, rep)).abs() <= 1e-8);
    }

    #[test]
    fn depolarized_reference_is_affine(seed in any::<u64>(), k in variant()) {
        let (_, rep) = &variants()[k];
        let mut rng = seeded(seed);
        let (eta, tau) = (random_state(rep.dim(), &mut rng), random_state(rep.dim(), &mut rng));
        let base = phi(&eta, &tau, rep);
        for p in [0.0, 0.3, 0.7, 1.0] {
            let lhs = phi(&partially_depolarize(&eta, p), &tau, rep);
            let rhs = p * base + (1.0 - p) / rep.dim() as f64;
            prop_assert!((lhs - rhs).abs() <= 1e-8, "p = {p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn continuity_in_reference(seed in any::<u64>(), k in variant(), small in any::<bool>()) {
        let (_, rep) = &variants()[k];
        let eps = if small { 1e-3 } else { 1e-2 };
        let mut rng = seeded(seed);
        let d = rep.dim();
        let setting = Setting::same(rep.clone()).unwrap();
        let (eta, rho, sigma, xi) = (random_state(d, &mut rng), random_state(d, &mut rng), random_state(d, &mut rng), random_state(d, &mut rng));
        let near = eta.mix(&xi, eps * rng.random::<f64>()).unwrap();
        let dist = generalized_trace_distance(&eta, &near).unwrap();
        prop_assert!(dist <= eps);
        let opts = PhiOptions::default();
        let change = (delta_h(&near, &rho, &sigma, &setting, &opts).unwrap() - delta_h(&eta, &rho, &sigma, &setting, &opts).unwrap()).abs();
        let bound = 2.0 * (d * d) as f64 * dist / (core::f64::consts::LN_2 * (1.0 - 2.0 * dist));
        prop_assert!(change <= bound + 1e-9, "{change} > {bound}");
    }

    #[test]
    fn reference_twirl_processing(seed in any::<u64>(), k in variant()) {
        let (_, rep) = &variants()[k];
        let mut rng = seeded(seed);
        let d = rep.dim();
        let m = random_state(d * d, &mut rng).into_matrix();
        let opts = PhiOptions::default();
        let before = phi_of_operator(&m, (d, d), &opts).unwrap().phi;
        let after = phi_of_operator(&twirl_reference(&m, &rep.dual(), d), (d, d), &opts).unwrap().phi;
        prop_assert!(after <= before + 1e-8, "{after} > {before}");
    }
}
