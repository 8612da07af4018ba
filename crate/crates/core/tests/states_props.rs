use std::f64::consts::PI;

use coherent2d::specialfn::gauss_laguerre;
use coherent2d::states::{
    classical_center, coherent_2d, eigenstate, energy, initial_state, Chirality, ModeIndex, PacketParams,
};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn eigenstates_orthonormal_up_to_n8() {
    let rule = gauss_laguerre(40).unwrap();
    let phis: Vec<f64> = (0..48).map(|k| 2.0 * PI * k as f64 / 48.0).collect();
    let modes: Vec<ModeIndex> = ModeIndex::up_to(8).collect();
    for &a in &modes {
        for &b in &modes {
            let mut total = Complex64::new(0.0, 0.0);
            for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
                let rho = u.sqrt();
                for &phi in &phis {
                    let f = eigenstate(a, rho, phi).conj() * eigenstate(b, rho, phi);
                    // ∫ ρ dρ dφ = ∫ du/2 dφ with the e^{-u} weight divided out
                    total += f * (0.5 * w * u.exp() * 2.0 * PI / phis.len() as f64);
                }
            }
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((total - expect).norm() < 1e-12, "{a} {b} {total}");
        }
    }
}

#[test]
fn energies_depend_on_principal_number() {
    for mode in ModeIndex::up_to(12) {
        assert_eq!(energy(mode), (mode.principal() + 1) as f64);
    }
    assert_eq!(ModeIndex::shell(5).count(), 6);
}

#[test]
fn packet_returns_after_one_period() {
    let p = PacketParams::new(1.3, 0.7).unwrap();
    for (x, e) in [(0.2, -0.4), (1.1, 0.9), (-1.5, 0.3)] {
        let a = coherent_2d(&p, x, e, 0.9);
        let b = coherent_2d(&p, x, e, 0.9 + 2.0 * PI);
        assert!((a.norm() - b.norm()).abs() < 1e-13);
    }
}

#[test]
fn time_zero_is_initial_state_up_to_phase() {
    for chirality in [Chirality::Retarded, Chirality::Advanced] {
        let p = PacketParams::new(0.8, 1.9).unwrap().with_chirality(chirality);
        for (x, e) in [(0.0, 0.0), (0.5, -1.0), (2.0, 1.5)] {
            let a = coherent_2d(&p, x, e, 0.0);
            let b = initial_state(&p, x, e) * chirality.constant_phase();
            assert!((a - b).norm() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn density_is_displaced_ground_state(
        x in 0.0f64..3.0, e in 0.0f64..3.0, t in 0.0f64..20.0,
        dx in -3.0f64..3.0, dy in -3.0f64..3.0, adv in any::<bool>(),
    ) {
        let chirality = if adv { Chirality::Advanced } else { Chirality::Retarded };
        let p = PacketParams::new(x, e).unwrap().with_chirality(chirality);
        let (cx, cy) = classical_center(&p, t);
        let d = coherent_2d(&p, cx + dx, cy + dy, t).norm_sqr();
        let expect = (-(dx * dx + dy * dy)).exp() / PI;
        prop_assert!((d - expect).abs() < 1e-13);
    }

    #[test]
    fn chirality_mirrors_density(x in 0.0f64..3.0, e in 0.0f64..3.0, t in 0.0f64..7.0, xi in -5.0f64..5.0, eta in -5.0f64..5.0) {
        let r = PacketParams::new(x, e).unwrap();
        let a = r.with_chirality(Chirality::Advanced);
        let dr = coherent_2d(&r, xi, -eta, t).norm_sqr();
        let da = coherent_2d(&a, xi, eta, t).norm_sqr();
        prop_assert!((dr - da).abs() < 1e-14);
    }
}
