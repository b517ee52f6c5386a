use proptest::prelude::*;

use secondlaw::channels::{sample_relaxation, ThermalizationParams};
use secondlaw::operator::HermitianOperator;
use secondlaw::process::{
    cumulative_ledger, entropy_flow, entropy_production, heat, minimal_work_check, work, work_partition, Trajectory,
};
use secondlaw::state::{relative_entropy_to_gibbs, QuantumState, ThermalContext};

/// Diagonal qubit driven as `ω(t) = ω0 + a t`, population `n(t) = n0 + b t`.
fn driven(omega0: f64, a: f64, n0: f64, b: f64, beta: f64, steps: usize) -> Trajectory {
    let times: Vec<f64> = (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect();
    let states = times.iter().map(|&t| QuantumState::qubit(n0 + b * t).unwrap()).collect();
    let hs = times
        .iter()
        .map(|&t| HermitianOperator::qubit_hamiltonian(omega0 + a * t))
        .collect();
    Trajectory::new(times, states, hs, ThermalContext::new(beta).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_balance(omega0 in 0.5..3.0f64, a in -0.4..0.4f64, n0 in 0.1..0.9f64, b in -0.05..0.05f64, beta in 0.2..4.0f64) {
        let traj = driven(omega0, a, n0, b, beta, 301);
        let e = traj.energies().unwrap();
        prop_assert!((heat(&traj).unwrap() + work(&traj).unwrap() - (e[300] - e[0])).abs() < 1e-12);
        let p = work_partition(&traj).unwrap();
        let w = work(&traj).unwrap();
        prop_assert!((w - p.reversible - p.irreversible).abs() < 1e-12 * w.abs().max(1.0));
        let s = |rho: &QuantumState| secondlaw::state::von_neumann_entropy(rho);
        let ds = s(traj.last_state()) - s(traj.first_state());
        let total = entropy_production(&traj).unwrap() + entropy_flow(&traj).unwrap();
        prop_assert!((total - ds).abs() < 1e-12);
    }

    #[test]
    fn ledger_ends_at_whole_trajectory_values(omega0 in 0.5..3.0f64, a in -0.4..0.4f64, n0 in 0.1..0.9f64, b in -0.05..0.05f64) {
        let traj = driven(omega0, a, n0, b, 1.3, 101);
        let ledger = cumulative_ledger(&traj).unwrap();
        let last = ledger.last().unwrap();
        prop_assert_eq!(last.heat, heat(&traj).unwrap());
        prop_assert_eq!(last.work, work(&traj).unwrap());
        prop_assert!((last.entropy_production - entropy_production(&traj).unwrap()).abs() < 1e-14);
        prop_assert_eq!(ledger[0].heat, 0.0);
        prop_assert_eq!(ledger[0].entropy_production, 0.0);
    }

    #[test]
    fn markovian_relaxation_never_produces_negative_entropy(
        omega in 0.5..3.0f64, t in 0.2..5.0f64, n0 in 0.0..1.0f64, gamma in 0.05..3.0f64, duration in 0.1..6.0f64,
    ) {
        let h = HermitianOperator::qubit_hamiltonian(omega);
        let ctx = ThermalContext::from_temperature(t).unwrap();
        let rho0 = QuantumState::qubit(n0).unwrap();
        let traj = sample_relaxation(&rho0, &h, &ctx, &ThermalizationParams::markovian(gamma).unwrap(), duration, 101).unwrap();
        let ledger = cumulative_ledger(&traj).unwrap();
        for pair in ledger.windows(2) {
            prop_assert!(pair[1].entropy_production >= pair[0].entropy_production - 1e-12);
        }
        prop_assert!(!minimal_work_check(&traj).unwrap().violated);
        let information: Vec<f64> = traj.states().iter().map(|r| relative_entropy_to_gibbs(r, &h, &ctx).unwrap()).collect();
        prop_assert!(information.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn window_functionals_add(n0 in 0.05..0.3f64, split in 1usize..99) {
        let h = HermitianOperator::qubit_hamiltonian(2.0);
        let ctx = ThermalContext::new(1.0).unwrap();
        let params = ThermalizationParams::non_markovian(0.3, 2.0).unwrap();
        let traj = sample_relaxation(&QuantumState::qubit(n0).unwrap(), &h, &ctx, &params, 2.0, 101).unwrap();
        let left = traj.window(0..=split).unwrap();
        let right = traj.window(split..=100).unwrap();
        let sum = entropy_production(&left).unwrap() + entropy_production(&right).unwrap();
        prop_assert!((sum - entropy_production(&traj).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn pure_endpoint_keeps_production_finite() {
    let h = HermitianOperator::qubit_hamiltonian(1.0);
    let ctx = ThermalContext::new(1.0).unwrap();
    let traj = Trajectory::new(
        vec![0.0, 1.0],
        vec![QuantumState::qubit(0.3).unwrap(), QuantumState::qubit(1.0).unwrap()],
        vec![h.clone(), h],
        ctx,
    )
    .unwrap();
    let dis = entropy_production(&traj).unwrap();
    assert!(dis.is_finite(), "a pure state still has finite relative entropy to a full-rank Gibbs state: {dis}");
    assert!(!work_partition(&traj).unwrap().irreversible.is_nan());
}
