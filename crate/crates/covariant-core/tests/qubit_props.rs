mod common;

use common::u1_qubit;
use covariant_core::entropy::{delta_phi, PhiOptions, Setting};
use covariant_core::hermitian::{DensityMatrix, C64};
use covariant_core::interconversion::{choi_feasibility, FeasibilityOptions, Verdict};
use covariant_core::qubit::{phi_u1_qubit, u1_qubit_feasible, u1_qubit_margin, QubitStateParams};
use covariant_core::random::{random_ball_point, seeded};
use proptest::prelude::*;

fn ball_state(seed: u64) -> (QubitStateParams, QubitStateParams) {
    let mut rng = seeded(seed);
    let r = random_ball_point(&mut rng);
    let s = random_ball_point(&mut rng);
    (QubitStateParams::from_bloch(r[0], r[1], r[2]).unwrap(), QubitStateParams::from_bloch(s[0], s[1], s[2]).unwrap())
}

/// Φ_ρ − Φ_σ at η with Bloch vector (sin θ, 0, cos θ).
fn delta_at(rho: &QubitStateParams, sigma: &QubitStateParams, theta: f64) -> f64 {
    let x = [theta.sin(), 0.0, theta.cos()];
    phi_u1_qubit(rho, x) - phi_u1_qubit(sigma, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cylindrical_symmetry(seed in any::<u64>()) {
        let (tau, _) = ball_state(seed);
        let x = random_ball_point(&mut seeded(seed ^ 1));
        let r = x[0].hypot(x[1]);
        prop_assert_eq!(phi_u1_qubit(&tau, x), phi_u1_qubit(&tau, [r, 0.0, x[2]]));
    }

    #[test]
    fn flip_relation(seed in any::<u64>()) {
        let (tau, _) = ball_state(seed);
        let flipped = QubitStateParams::new(1.0 - tau.p, tau.c.conj()).unwrap();
        let [x, y, z] = random_ball_point(&mut seeded(seed ^ 1));
        prop_assert!((phi_u1_qubit(&flipped, [x, y, z]) - phi_u1_qubit(&tau, [x, -y, -z])).abs() <= 1e-12);
    }

    #[test]
    fn curvature_at_the_poles(seed in any::<u64>()) {
        let (rho, sigma) = ball_state(seed);
        let margin = u1_qubit_margin(&rho, &sigma);
        prop_assume!(margin.abs() > 1e-6);
        let h = 1e-3;
        let curvature = |t: f64| delta_at(&rho, &sigma, t + h) + delta_at(&rho, &sigma, t - h) - 2.0 * delta_at(&rho, &sigma, t);
        let convex = curvature(0.0) >= 0.0 && curvature(core::f64::consts::PI) >= 0.0;
        prop_assert_eq!(convex, u1_qubit_feasible(&rho, &sigma));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn criterion_matches_oracle(seed in any::<u64>()) {
        let (rho, sigma) = ball_state(seed);
        let margin = u1_qubit_margin(&rho, &sigma);
        prop_assume!(margin.abs() > 1e-7);
        let rep = u1_qubit();
        let report = choi_feasibility(&rho.to_state().unwrap(), &sigma.to_state().unwrap(), &rep, &rep, &FeasibilityOptions::default()).unwrap();
        prop_assert_eq!(report.verdict == Verdict::Feasible, margin > 0.0);
        prop_assert_ne!(report.verdict, Verdict::Borderline);
    }

    #[test]
    fn two_near_pole_references_suffice(seed in any::<u64>()) {
        let (rho, sigma) = ball_state(seed);
        let margin = u1_qubit_margin(&rho, &sigma);
        prop_assume!(margin.abs() > 1e-2);
        let setting = Setting::same(u1_qubit()).unwrap();
        let theta: f64 = 2e-3;
        let opts = PhiOptions::default();
        let ok = [1.0, -1.0].iter().all(|&pole| {
            let eta = DensityMatrix::qubit(theta.sin(), 0.0, pole * theta.cos()).unwrap();
            delta_phi(&eta, &rho.to_state().unwrap(), &sigma.to_state().unwrap(), &setting, &opts).unwrap() >= 0.0
        });
        prop_assert_eq!(ok, margin > 0.0);
    }
}

#[test]
fn flip_keeps_coherence_magnitude() {
    let tau = QubitStateParams::new(0.3, C64::new(0.2, -0.1)).unwrap();
    let flipped = QubitStateParams::new(0.7, tau.c.conj()).unwrap();
    assert_eq!(flipped.c.norm(), tau.c.norm());
}
