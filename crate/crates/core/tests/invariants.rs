use braidkit::braid::braiding_index_roots;
use braidkit::circuit::{
    correspondence_residual, disorder_model, disorder_params, greens_reconstruct, laplacian_real, synthesize, CircuitParams,
};
use braidkit::model::ModelSpec;
use braidkit::spectra::{real_space_matrix, BoundaryCondition};
use braidkit::C64;
use proptest::prelude::*;

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.05f64, 0.05..3.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correspondence_holds_for_any_representable_model(cm in coupling(), cn in coupling(), m in 1usize..4, n in 1usize..3) {
        let model = ModelSpec::h1(1.0, cm, cn, m, n).unwrap();
        let mut p = synthesize(&model, 2.2e-9, Some(150e3)).unwrap();
        p.r0 = None;
        prop_assert!(!p.detuned());
        prop_assert!((p.resonant_frequency() / 150e3 - 1.0).abs() < 1e-12);
        prop_assert!(correspondence_residual(&p, 64).unwrap() < 1e-10);
    }

    #[test]
    fn obc_laplacian_is_scaled_chain(cm in coupling(), cn in coupling(), cells in 5usize..12) {
        let model = ModelSpec::h1(1.0, cm, cn, 2, 1).unwrap();
        let mut p = synthesize(&model, 1e-9, None).unwrap();
        p.r0 = None;
        let w = p.omega_r();
        let j = laplacian_real(&p, w, cells, BoundaryCondition::Obc).unwrap();
        let h = real_space_matrix(&p.to_model().unwrap(), cells, BoundaryCondition::Obc).unwrap();
        let want = h.matrix.scale(C64::new(0.0, -w));
        prop_assert!(j.sub(&want).norm_fro() < 1e-12 * want.norm_fro());
    }

    #[test]
    fn greens_round_trip_with_r0(cm in coupling(), cn in coupling(), obc in any::<bool>()) {
        let model = ModelSpec::h1(1.0, cm, cn, 2, 1).unwrap();
        let p = synthesize(&model, 4.7e-9, None).unwrap();
        let bc = if obc { BoundaryCondition::Obc } else { BoundaryCondition::Pbc };
        let r = greens_reconstruct(&p, p.omega_r(), 10, bc).unwrap();
        prop_assert!(r.error < 1e-8);
    }

    #[test]
    fn disorder_factors_stay_in_band(seed in any::<u64>(), pct in 0.0..49.9f64) {
        let model = ModelSpec::h1(1.0, 1.4, 1.6, 3, 1).unwrap();
        let d = disorder_model(&model, pct, seed).unwrap();
        let u = d.unidirectional().unwrap();
        let t = pct / 100.0 + 1e-12;
        for (x, y) in [(u.c_ab0.re, 1.0), (u.c_ab_neg_m.re, 1.4), (u.c_ba_n.re, 1.6)] {
            prop_assert!((x / y - 1.0).abs() <= t);
        }
        let p = CircuitParams::phase_preset(1).unwrap();
        let q = disorder_params(&p, pct, seed).unwrap();
        prop_assert!((q.c0 / p.c0 - 1.0).abs() <= t && (q.l_b / p.l_b - 1.0).abs() <= t);
        prop_assert_eq!(q, disorder_params(&p, pct, seed).unwrap());
    }
}

#[test]
fn near_boundary_disorder_can_flip_xi() {
    let model = ModelSpec::h1(1.0, 0.995, 0.5, 3, 1).unwrap();
    let base = braiding_index_roots(&model).unwrap().xi;
    let flipped = (0..100)
        .filter(|&s| braiding_index_roots(&disorder_model(&model, 5.0, s).unwrap()).unwrap().xi != base)
        .count();
    assert!(flipped > 0);
}

#[test]
fn pbc_laplacian_on_resonance_eigenfrequency_is_singular() {
    // E = 0 lies on the PBC spectrum at k = π when C_BA,n = C_AB,0
    let model = ModelSpec::h1(1.0, 0.3, 1.0, 2, 1).unwrap();
    let mut p = synthesize(&model, 1e-9, None).unwrap();
    p.r0 = None;
    assert!(greens_reconstruct(&p, p.omega_r(), 10, BoundaryCondition::Pbc).is_err());
    p.r0 = Some(20.0);
    assert!(greens_reconstruct(&p, p.omega_r(), 10, BoundaryCondition::Pbc).is_ok());
}
