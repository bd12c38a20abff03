use std::f64::consts::PI;

use proptest::prelude::*;
use tqd_sim::cavity::{self, CouplingForm, HybridSystem, Ladder};
use tqd_sim::gates;
use tqd_sim::linalg::{self, c, CMatrix, CVector, C64};
use tqd_sim::lindblad::{self, DecoherenceRates, Generator};
use tqd_sim::tqd::{self, TqdParams};

const GHZ: f64 = 2.0 * PI * 1e9;
const MHZ: f64 = 2.0 * PI * 1e6;

fn density_from(re: &[f64], im: &[f64], n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |i, j| C64::new(re[i * n + j], im[i * n + j]));
    let rho = &a * a.adjoint();
    let tr = linalg::trace(&rho);
    rho / tr
}

fn system(g1: f64, g2: f64, delta: f64, alpha: f64, ladder: Ladder, coupling: CouplingForm) -> HybridSystem {
    HybridSystem {
        omega: [1.7 * GHZ + delta; 2],
        g: [g1, g2],
        omega_osc: 1.7 * GHZ,
        n_max: 3,
        alpha,
        ladder,
        coupling,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trace_distance_is_contractive(
        re_a in proptest::collection::vec(-1.0f64..1.0, 16),
        im_a in proptest::collection::vec(-1.0f64..1.0, 16),
        re_b in proptest::collection::vec(-1.0f64..1.0, 16),
        im_b in proptest::collection::vec(-1.0f64..1.0, 16),
        gphi in 0.5f64..5.0,
        ga in 0.5f64..5.0,
    ) {
        // A qubit and a two-level oscillator.
        let n = 4;
        let rho_a = density_from(&re_a, &im_a, n);
        let rho_b = density_from(&re_b, &im_b, n);
        let sz = linalg::sigma_z();
        let id2 = linalg::identity(2);
        let h = sz.kronecker(&id2) * c(0.5 * GHZ)
            + (linalg::sigma_x().kronecker(&linalg::sigma_x())) * c(20.0 * MHZ);
        let channels = vec![
            linalg::LindbladChannel::new("d", sz.kronecker(&id2), 0.5 * gphi * MHZ).unwrap(),
            linalg::LindbladChannel::new("a", id2.kronecker(&linalg::sigma_minus()), ga * MHZ).unwrap(),
        ];
        let grid = lindblad::uniform_grid(200e-9, 40);
        let ta = lindblad::integrate(&rho_a, Generator::Constant(&h), &channels, &grid, 1e-10).unwrap();
        let tb = lindblad::integrate(&rho_b, Generator::Constant(&h), &channels, &grid, 1e-10).unwrap();
        let d: Vec<f64> = ta.states.iter().zip(&tb.states).map(|(x, y)| lindblad::trace_distance(x, y)).collect();
        for w in d.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-8, "trace distance grew {} -> {}", w[0], w[1]);
        }
        prop_assert!(ta.diagnostics.within_bounds());
        prop_assert!(tb.diagnostics.within_bounds());
    }

    #[test]
    fn hybrid_hamiltonian_is_hermitian(
        g1 in -100.0f64..100.0,
        g2 in -100.0f64..100.0,
        delta in -1.0f64..1.0,
        alpha in 0.0f64..1.0,
        uniform in any::<bool>(),
        rwa in any::<bool>(),
    ) {
        let ladder = if uniform { Ladder::Uniform } else { Ladder::Harmonic };
        let coupling = if rwa { CouplingForm::Rwa } else { CouplingForm::Full };
        let sys = system(g1 * MHZ, g2 * MHZ, delta * GHZ, alpha * GHZ, ladder, coupling);
        let h = sys.hamiltonian().unwrap();
        prop_assert_eq!(h.nrows(), 4 * sys.levels());
        prop_assert!(linalg::hermiticity_error(&h) <= 1e-12 * linalg::max_abs(&h));
    }

    #[test]
    fn rwa_conserves_excitation_number(
        g1 in -100.0f64..100.0,
        g2 in -100.0f64..100.0,
        delta in -1.0f64..1.0,
    ) {
        let sys = system(g1 * MHZ, g2 * MHZ, delta * GHZ, 0.0, Ladder::Harmonic, CouplingForm::Rwa);
        let h = sys.hamiltonian().unwrap();
        let n = sys.excitation_number();
        prop_assert!(linalg::max_abs(&linalg::commutator(&h, &n)) <= 1e-12 * linalg::max_abs(&h));
    }

    #[test]
    fn bright_and_dark_states_are_orthonormal(g1 in -100.0f64..100.0, g2 in -100.0f64..100.0) {
        prop_assume!(g1.abs() + g2.abs() > 1e-3);
        let bd = gates::bright_dark(g1 * MHZ, g2 * MHZ).unwrap();
        for (a, b) in [(&bd.bright, &bd.dark), (&bd.bright_s2, &bd.dark_s2)] {
            prop_assert!((a.norm() - 1.0).abs() < 1e-12);
            prop_assert!((b.norm() - 1.0).abs() < 1e-12);
            prop_assert!(a.dotc(b).norm() < 1e-12);
        }
        prop_assert!(bd.phi_mix > -PI && bd.phi_mix <= PI);
        // The dark state is annihilated by the interaction in the single-excitation block.
        let h = cavity::rwa_interaction([g1 * MHZ, g2 * MHZ]);
        let s1 = cavity::block(&h, &cavity::subspace::S1);
        let img = &s1 * &bd.dark;
        prop_assert!(img.norm() <= 1e-12 * bd.omega);
    }

    #[test]
    fn eigensystem_is_orthonormal_and_ordered(
        eps_d in -5.0f64..5.0,
        eps_q in -50.0f64..50.0,
        t_p in 0.1f64..10.0,
        t_m in -5.0f64..5.0,
    ) {
        let p = TqdParams::from_tp_tm(eps_d * GHZ, eps_q * GHZ, t_p * GHZ, t_m * GHZ);
        let e = tqd::eigensystem_numeric(&p).unwrap();
        prop_assert!(e.e_g <= e.e_e && e.e_e <= e.e_f);
        let v = &e.vectors;
        let gram = v.adjoint() * v;
        prop_assert!(linalg::max_abs(&(gram - linalg::identity(3))) < 1e-12);
        let h = tqd::h_even_odd(&p);
        let scale = linalg::max_abs(&h);
        for (k, en) in [e.e_g, e.e_e, e.e_f].into_iter().enumerate() {
            let col: CVector = v.column(k).into_owned();
            let res = &h * &col - &col * c(en);
            prop_assert!(res.norm() <= 1e-12 * scale);
        }
        let tr = linalg::trace(&h).re;
        prop_assert!((e.e_g + e.e_e + e.e_f - tr).abs() <= 1e-12 * scale);
    }

    #[test]
    fn gate_runs_stay_physical(scale in 0.0f64..3.0, alpha_over_g in 0.0f64..12.0) {
        let g = 66.0 * MHZ;
        let sys = HybridSystem {
            omega: [1.7 * GHZ; 2],
            g: [g; 2],
            omega_osc: 1.7 * GHZ,
            n_max: 3,
            alpha: alpha_over_g * g,
            ladder: Ladder::Uniform,
            coupling: CouplingForm::Full,
        };
        let rates = DecoherenceRates::transmon_preset().scaled(scale);
        let rho0 = linalg::projector(sys.dim(), sys.index(0, 1, 1));
        let opts = gates::ProtocolOptions { samples: 50, ..Default::default() };
        let run = gates::run_holonomic_protocol(&sys, &rates, &rho0, &opts).unwrap();
        prop_assert!(run.trajectory.diagnostics.within_bounds());
        for f in &run.fidelity_series {
            prop_assert!((-1e-8..=1.0 + 1e-8).contains(f));
        }
    }
}

#[test]
fn stronger_dephasing_lowers_iswap_fidelity() {
    let g = 66.0 * MHZ;
    let mut sys = HybridSystem::symmetric(1.7 * GHZ, 6.0 * g, g, 2);
    sys.coupling = CouplingForm::Rwa;
    let rho0 = linalg::projector(sys.dim(), sys.index(0, 1, 0));
    let opts = gates::ProtocolOptions { samples: 10, ..Default::default() };
    let mut last = f64::INFINITY;
    for scale in [0.0, 0.5, 1.0, 2.0] {
        let rates = DecoherenceRates::resonator_preset().scaled(scale);
        let f = gates::run_iswap_protocol(&sys, &rates, &rho0, &opts).unwrap().fidelity;
        assert!(f < last, "fidelity {f} at scale {scale} did not drop below {last}");
        last = f;
    }
}

#[test]
fn noiseless_rwa_iswap_is_near_perfect_deep_in_the_dispersive_regime() {
    let g = 66.0 * MHZ;
    let mut sys = HybridSystem::symmetric(1.7 * GHZ, 20.0 * g, g, 2);
    sys.coupling = CouplingForm::Rwa;
    let rho0 = linalg::projector(sys.dim(), sys.index(0, 1, 0));
    let opts = gates::ProtocolOptions { samples: 10, ..Default::default() };
    let f = gates::run_iswap_protocol(&sys, &DecoherenceRates::zero(), &rho0, &opts).unwrap().fidelity;
    assert!(f >= 0.999, "F = {f}");
}
