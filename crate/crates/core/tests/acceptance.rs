//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::path::{Path, PathBuf};
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secondlaw::channels::{relax_derivative, sample_relaxation, ThermalizationParams};
use secondlaw::cli::{parse_config, Scenario};
use secondlaw::engines::{
    classical_endoreversible, engine_condition, otto_closed_form, run_otto, single_reservoir_cycle, single_reservoir_orbit,
    OttoConfig,
};
use secondlaw::feedback::{
    classical_measurement_entropy_change, demon_forces, measure, qc_mutual_information, shannon_entropy, Povm,
};
use secondlaw::operator::{ComplexMatrix, HermitianOperator};
use secondlaw::process::{
    cumulative_ledger, entropy_production, force_flow_rate, heat, irr_work_via_free_energy, minimal_work_check, work,
    work_partition, Trajectory,
};
use secondlaw::state::{von_neumann_entropy, QuantumState, ThermalContext};

const TRAJECTORIES: usize = 200;
const GRID: usize = 1000;
const SCAN: usize = 10_000;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn err(e: impl std::fmt::Display) -> Outcome {
    outcome(false, format!("error: {e}"))
}

/// Smooth random curve `c0 + Σ a_j sin(2π f_j t + φ_j)`.
struct Curve {
    c0: f64,
    terms: Vec<(f64, f64, f64)>,
}

impl Curve {
    fn random(rng: &mut ChaCha8Rng, c0: f64, amplitude: f64) -> Self {
        let terms = (0..3)
            .map(|_| {
                (
                    rng.gen_range(-amplitude..amplitude),
                    rng.gen_range(0.2..2.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        Self { c0, terms }
    }

    fn at(&self, t: f64) -> f64 {
        self.c0
            + self
                .terms
                .iter()
                .map(|&(a, f, p)| a * (std::f64::consts::TAU * f * t + p).sin())
                .sum::<f64>()
    }
}

fn bloch_state(x: f64, y: f64, z: f64) -> QuantumState {
    let rows = vec![
        vec![Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
        vec![Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
    ];
    QuantumState::new(HermitianOperator::new(ComplexMatrix::from_rows(&rows).unwrap()).unwrap()).unwrap()
}

fn qubit_operator(z: f64, x: f64, y: f64) -> HermitianOperator {
    let rows = vec![
        vec![Complex64::new(z, 0.0), Complex64::new(x, -y)],
        vec![Complex64::new(x, y), Complex64::new(-z, 0.0)],
    ];
    HermitianOperator::new(ComplexMatrix::from_rows(&rows).unwrap()).unwrap()
}

/// Gently driven qubit with coherences: `H_t = (ω_t/2)σz + g_x σx + g_y σy`,
/// Bloch vector kept inside radius 0.9.
fn random_driven_trajectory(rng: &mut ChaCha8Rng) -> Trajectory {
    let omega0 = rng.gen_range(1.0..3.0);
    let omega = Curve::random(rng, omega0, 0.2);
    let gx = Curve::random(rng, 0.0, 0.15);
    let gy = Curve::random(rng, 0.0, 0.15);
    let r: Vec<Curve> = (0..3)
        .map(|_| {
            let c0 = rng.gen_range(-0.4..0.4);
            Curve::random(rng, c0, 0.1)
        })
        .collect();
    let beta = rng.gen_range(0.3..3.0);
    let times: Vec<f64> = (0..GRID).map(|i| i as f64 / (GRID - 1) as f64).collect();
    let mut states = Vec::with_capacity(GRID);
    let mut hamiltonians = Vec::with_capacity(GRID);
    for &t in &times {
        let mut v = [r[0].at(t), r[1].at(t), r[2].at(t)];
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.9 {
            v.iter_mut().for_each(|c| *c *= 0.9 / norm);
        }
        states.push(bloch_state(v[0], v[1], v[2]));
        hamiltonians.push(qubit_operator(0.5 * omega.at(t), gx.at(t), gy.at(t)));
    }
    Trajectory::new(times, states, hamiltonians, ThermalContext::new(beta).unwrap()).unwrap()
}

/// Criteria 1-3 share one set of trajectories.
fn driven_identities() -> [Outcome; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut partition = 0.0f64;
    let mut routes = 0.0f64;
    let mut first_law = 0.0f64;
    let mut failure = None;
    for _ in 0..TRAJECTORIES {
        let traj = random_driven_trajectory(&mut rng);
        let result = (|| -> secondlaw::Result<()> {
            let w = work(&traj)?;
            let q = heat(&traj)?;
            let p = work_partition(&traj)?;
            if !p.finite {
                partition = f64::INFINITY;
            }
            partition = partition.max((w - (p.reversible + p.irreversible)).abs() / w.abs().max(1.0));
            let irr = irr_work_via_free_energy(&traj)?;
            routes = routes.max((irr - entropy_production(&traj)? / traj.bath().beta()).abs());
            let e = traj.energies()?;
            first_law = first_law.max((q + w - (e[e.len() - 1] - e[0])).abs());
            Ok(())
        })();
        if let Err(e) = result {
            failure = Some(e.to_string());
            break;
        }
    }
    if let Some(e) = failure {
        return [err(&e), err(&e), err(&e)];
    }
    [
        outcome(partition <= 1e-6, format!("max |W - (W_rev + W_irr)|/max(1,|W|) = {partition:.3e}")),
        outcome(routes <= 1e-6, format!("max |W_irr(F) - Δ_iS/β| = {routes:.3e}")),
        outcome(first_law <= 1e-6, format!("max |ΔQ + ΔW - ΔE| = {first_law:.3e}")),
    ]
}

fn markovian_second_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_production = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut violated = 0;
    for _ in 0..TRAJECTORIES {
        let h = HermitianOperator::qubit_hamiltonian(rng.gen_range(0.5..3.0));
        let ctx = ThermalContext::from_temperature(rng.gen_range(0.3..3.0)).unwrap();
        let rho0 = QuantumState::qubit(rng.gen_range(0.01..0.99)).unwrap();
        let params = ThermalizationParams::markovian(rng.gen_range(0.1..2.0)).unwrap();
        let duration = rng.gen_range(0.5..5.0);
        let result = (|| -> secondlaw::Result<()> {
            let traj = sample_relaxation(&rho0, &h, &ctx, &params, duration, 501)?;
            for row in cumulative_ledger(&traj)? {
                min_production = min_production.min(row.entropy_production);
            }
            let check = minimal_work_check(&traj)?;
            min_margin = min_margin.min(check.margin);
            violated += usize::from(check.violated);
            Ok(())
        })();
        if let Err(e) = result {
            return err(e);
        }
    }
    outcome(
        min_production >= -1e-9 && violated == 0,
        format!("min cumulative Δ_iS = {min_production:.3e}, min work margin = {min_margin:.3e}, violations = {violated}"),
    )
}

fn non_markovian_violation() -> Outcome {
    let text = match std::fs::read_to_string(configs_dir().join("nm1.conf")) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let p = match parse_config(&text).map(|c| c.runs[0].scenario.clone()) {
        Ok(Scenario::Process(p)) => p,
        Ok(_) => return err("nm1.conf is not a process scenario"),
        Err(e) => return err(e),
    };
    let result = (|| -> secondlaw::Result<Outcome> {
        let h = HermitianOperator::qubit_hamiltonian(p.omega);
        let ctx = ThermalContext::from_temperature(p.temperature)?;
        let rho0 = QuantumState::qubit(p.n0)?;
        let traj = sample_relaxation(&rho0, &h, &ctx, &p.params, p.duration, p.steps)?;
        let ledger = cumulative_ledger(&traj)?;
        // most negative production over any window [j, k]
        let (mut worst, mut start, mut end, mut peak) = (f64::INFINITY, 0, 0, 0);
        for k in 1..ledger.len() {
            if ledger[k - 1].entropy_production > ledger[peak].entropy_production {
                peak = k - 1;
            }
            let d = ledger[k].entropy_production - ledger[peak].entropy_production;
            if d < worst {
                (worst, start, end) = (d, peak, k);
            }
        }
        let window = traj.window(start..=end)?;
        let direct = entropy_production(&window)?;
        let check = minimal_work_check(&window)?;
        Ok(outcome(
            direct < -1e-3 && check.violated,
            format!(
                "Δ_iS on [{:.3}, {:.3}] = {direct:.5} (ledger {worst:.5}), work margin = {:.3e}, flagged = {}",
                traj.times()[start],
                traj.times()[end],
                check.margin,
                check.violated
            ),
        ))
    })();
    result.unwrap_or_else(err)
}

fn markov_otto(omega0: f64, omega1: f64, th: f64, tc: f64) -> OttoConfig {
    OttoConfig {
        omega0,
        omega1,
        th,
        tc,
        stroke_duration: 40.0,
        steps: 41,
        params_h: ThermalizationParams::markovian(1.0).unwrap(),
        params_c: ThermalizationParams::markovian(1.0).unwrap(),
    }
}

fn otto_closed_form_agreement() -> Outcome {
    let cases = [(2.0, 1.0, 4.0, 1.0), (3.0, 1.0, 6.0, 0.5), (1.5, 1.0, 2.0, 1.0), (2.0, 1.0, 1.5, 1.0)];
    let mut field_err = 0.0f64;
    let mut eta_err = 0.0f64;
    for (omega0, omega1, th, tc) in cases {
        let r = match run_otto(&markov_otto(omega0, omega1, th, tc)) {
            Ok(r) => r,
            Err(e) => return err(e),
        };
        let c = otto_closed_form(omega0, omega1, r.t1, r.t3);
        for (a, b) in [(r.qh, c.qh), (r.qc, c.qc), (r.w_total, c.w)] {
            field_err = field_err.max((a - b).abs());
        }
        if r.eta.is_some() != c.eta.is_some() {
            return outcome(false, format!("engine flags disagree at Th = {th}, Tc = {tc}"));
        }
        if let Some(eta) = r.eta {
            eta_err = eta_err.max((eta - (1.0 - omega1 / omega0)).abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut engines = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..SCAN {
        let omega1 = rng.gen_range(0.1..5.0);
        let omega0 = omega1 * rng.gen_range(1.01..5.0);
        let t1 = rng.gen_range(0.1..10.0);
        let t3 = rng.gen_range(0.1..10.0);
        if engine_condition(omega0, omega1, t1, t3) {
            engines += 1;
            let eta = otto_closed_form(omega0, omega1, t1, t3).eta.unwrap_or(f64::NAN);
            worst_gap = worst_gap.max(eta - (1.0 - t3 / t1));
        }
    }
    let pass = field_err <= 1e-6 && eta_err <= 1e-9 && engines > 0 && worst_gap <= 1e-12;
    outcome(
        pass,
        format!(
            "max field err = {field_err:.3e}, max η err = {eta_err:.3e}, scan: {engines} engines, max η - (1 - T3/T1) = {worst_gap:.3e}"
        ),
    )
}

fn markovian_threshold() -> Outcome {
    let produces_work = |ratio: f64| -> secondlaw::Result<bool> { Ok(run_otto(&markov_otto(2.0, 1.0, ratio, 1.0))?.w_total < 0.0) };
    let (mut lo, mut hi) = (1.1, 4.0);
    match (produces_work(lo), produces_work(hi)) {
        (Ok(false), Ok(true)) => {}
        (Err(e), _) | (_, Err(e)) => return err(e),
        _ => return outcome(false, "threshold not bracketed by [1.1, 4]".into()),
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        match produces_work(mid) {
            Ok(true) => hi = mid,
            Ok(false) => lo = mid,
            Err(e) => return err(e),
        }
    }
    let threshold = 0.5 * (lo + hi);
    outcome((threshold - 2.0).abs() <= 1e-4, format!("Th/Tc threshold = {threshold:.7}"))
}

fn super_carnot() -> Outcome {
    let text = match std::fs::read_to_string(configs_dir().join("super_carnot.conf")) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let config = match parse_config(&text).map(|c| c.runs[0].scenario.clone()) {
        Ok(Scenario::Otto(p)) => p.config,
        Ok(_) => return err("super_carnot.conf is not an otto scenario"),
        Err(e) => return err(e),
    };
    let r = match run_otto(&config) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    let margins = [config.tc - r.t3, config.th - config.tc, r.t1 - config.th];
    let eta = r.eta.unwrap_or(f64::NAN);
    let pass = margins.iter().all(|&m| m > 1e-3) && eta - r.eta_carnot > 1e-3 && r.w_irr < 0.0;
    outcome(
        pass,
        format!(
            "T3 = {:.4} ≤ Tc = {} ≤ Th = {} ≤ T1 = {:.4}, η = {eta:.6}, η_C = {:.6}, W_irr = {:.5}",
            r.t3, config.tc, config.th, r.t1, r.eta_carnot, r.w_irr
        ),
    )
}

fn classical_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..SCAN {
        let tc = rng.gen_range(0.1..5.0);
        let th = tc * rng.gen_range(1.05..5.0);
        let t3 = rng.gen_range(tc..th);
        let t1 = rng.gen_range(t3..th);
        if t3 >= t1 {
            continue;
        }
        match classical_endoreversible(th, tc, t1, t3, rng.gen_range(0.1..10.0)) {
            Ok(r) if r.physical => worst = worst.max(r.identity_residual.abs()),
            Ok(_) => return outcome(false, format!("input flagged unphysical: {th} {tc} {t1} {t3}")),
            Err(e) => return err(e),
        }
    }
    let mut reversible_exact = true;
    for _ in 0..100 {
        let tc = rng.gen_range(0.1..5.0);
        let th = tc * rng.gen_range(1.05..5.0);
        match classical_endoreversible(th, tc, th, tc, 1.0) {
            Ok(r) => reversible_exact &= r.eta_e == r.eta_carnot,
            Err(e) => return err(e),
        }
    }
    outcome(
        worst <= 1e-12 && reversible_exact,
        format!("max identity residual = {worst:.3e}, reversible η_e == η_C: {reversible_exact}"),
    )
}

fn kelvin_planck() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut min_markov = f64::INFINITY;
    for _ in 0..TRAJECTORIES {
        let omega0 = rng.gen_range(0.5..3.0);
        let omega1 = rng.gen_range(0.5..3.0);
        let ctx = ThermalContext::from_temperature(rng.gen_range(0.3..3.0)).unwrap();
        let p0 = ThermalizationParams::markovian(rng.gen_range(0.1..2.0)).unwrap();
        let p1 = ThermalizationParams::markovian(rng.gen_range(0.1..2.0)).unwrap();
        let duration = rng.gen_range(0.2..3.0);
        let w = single_reservoir_orbit(omega0, omega1, &ctx, &p0, &p1, duration, 101).and_then(|(rho0, rho1)| {
            single_reservoir_cycle(
                &HermitianOperator::qubit_hamiltonian(omega0),
                &HermitianOperator::qubit_hamiltonian(omega1),
                &rho0,
                &rho1,
                &ctx,
            )
        });
        match w {
            Ok(w) => min_markov = min_markov.min(w),
            Err(e) => return err(e),
        }
    }

    let nm = (|| -> secondlaw::Result<f64> {
        let ctx = ThermalContext::from_temperature(1.0)?;
        let p0 = ThermalizationParams::non_markovian(0.2, 1.0)?.with_kick(1.0)?;
        let p1 = ThermalizationParams::non_markovian(0.2, 1.0)?.with_kick(-0.6)?;
        let (rho0, rho1) = single_reservoir_orbit(2.0, 1.0, &ctx, &p0, &p1, 1.0, 101)?;
        single_reservoir_cycle(
            &HermitianOperator::qubit_hamiltonian(2.0),
            &HermitianOperator::qubit_hamiltonian(1.0),
            &rho0,
            &rho1,
            &ctx,
        )
    })();
    match nm {
        Ok(w_nm) => outcome(
            min_markov >= -1e-9 && w_nm < -1e-3,
            format!("min Markovian ΔW = {min_markov:.3e}, non-Markovian ΔW = {w_nm:.5}"),
        ),
        Err(e) => err(e),
    }
}

fn diagonal_effects(weights: &[Vec<f64>]) -> Povm {
    Povm::from_effects(
        weights
            .iter()
            .map(|w| HermitianOperator::from_real_diagonal(w).unwrap())
            .collect(),
    )
    .unwrap()
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn feedback_limits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let result = (|| -> secondlaw::Result<Outcome> {
        let mut uninformative = 0.0f64;
        let mut projective = 0.0f64;
        for _ in 0..100 {
            let r = rng.gen_range(0.0..0.95);
            let (theta, phi) = (rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..std::f64::consts::TAU));
            let rho = bloch_state(r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos());
            let povm = Povm::uninformative(rng.gen_range(1..5), 2)?;
            uninformative = uninformative.max(qc_mutual_information(&rho, &povm)?.abs());

            let dim = rng.gen_range(2..5);
            let diag = QuantumState::from_populations(&random_distribution(&mut rng, dim))?;
            let info = qc_mutual_information(&diag, &Povm::computational_basis(dim))?;
            projective = projective.max((info - von_neumann_entropy(&diag)).abs());
        }

        let mut out_of_range = 0;
        for _ in 0..1000 {
            let dim = rng.gen_range(2..5);
            let outcomes = rng.gen_range(2..5);
            let columns: Vec<Vec<f64>> = (0..dim).map(|_| random_distribution(&mut rng, outcomes)).collect();
            let weights: Vec<Vec<f64>> = (0..outcomes).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
            let povm = diagonal_effects(&weights);
            let rho = QuantumState::from_populations(&random_distribution(&mut rng, dim))?;
            let info = qc_mutual_information(&rho, &povm)?;
            let h = shannon_entropy(&measure(&rho, &povm)?.probabilities)?;
            if !(info >= -1e-9 && info <= h + 1e-9) {
                out_of_range += 1;
            }
        }

        let mut max_change = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let states = rng.gen_range(2..5);
            let outcomes = rng.gen_range(2..5);
            let prior = random_distribution(&mut rng, states);
            let channel: Vec<Vec<f64>> = (0..states).map(|_| random_distribution(&mut rng, outcomes)).collect();
            max_change = max_change.max(classical_measurement_entropy_change(&prior, &channel)?);
        }
        Ok(outcome(
            uninformative <= 1e-9 && projective <= 1e-9 && out_of_range == 0 && max_change <= 0.0,
            format!(
                "|I| uninformative ≤ {uninformative:.3e}, |I - S| projective ≤ {projective:.3e}, out of [0, H(p)]: {out_of_range}, max ΔS_meas = {max_change:.3e}"
            ),
        ))
    })();
    result.unwrap_or_else(err)
}

fn force_flow_consistency() -> Outcome {
    let result = (|| -> secondlaw::Result<Outcome> {
        let mut worst_flow = 0.0f64;
        let cases = [
            ThermalizationParams::markovian(0.8)?,
            ThermalizationParams::non_markovian(0.5, 2.0)?,
            ThermalizationParams::non_markovian(0.1, std::f64::consts::PI)?,
        ];
        for params in &cases {
            let h = HermitianOperator::qubit_hamiltonian(2.0);
            let ctx = ThermalContext::new(1.0)?;
            let rho0 = QuantumState::qubit(0.1)?;
            let traj = sample_relaxation(&rho0, &h, &ctx, params, 2.0, 2001)?;
            let ledger = cumulative_ledger(&traj)?;
            let t = traj.times();
            for k in 1..traj.len() - 1 {
                let fd = (ledger[k + 1].entropy_production - ledger[k - 1].entropy_production) / (t[k + 1] - t[k - 1]);
                let rho_dot = relax_derivative(&rho0, &h, &ctx, params, t[k])?;
                let rate = force_flow_rate(&traj.states()[k], &rho_dot, &h, &ctx)?;
                worst_flow = worst_flow.max((rate - fd).abs());
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut worst_demon = 0.0f64;
        for _ in 0..100 {
            let dim = rng.gen_range(2..5);
            let outcomes = rng.gen_range(2..4);
            let columns: Vec<Vec<f64>> = (0..dim).map(|_| random_distribution(&mut rng, outcomes)).collect();
            let weights: Vec<Vec<f64>> = (0..outcomes).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
            let povm = diagonal_effects(&weights);
            let p = random_distribution(&mut rng, dim);
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.05..0.05)).collect();
            let mean = v.iter().sum::<f64>() / dim as f64;
            v.iter_mut().for_each(|x| *x -= mean);
            let ctx = ThermalContext::new(rng.gen_range(0.3..3.0))?;
            let h = HermitianOperator::zeros(dim);
            let at = |s: f64| -> secondlaw::Result<f64> {
                let pops: Vec<f64> = p.iter().zip(&v).map(|(a, b)| a + s * b).collect();
                qc_mutual_information(&QuantumState::from_populations(&pops)?, &povm)
            };
            let step = 1e-5;
            let fd = -(at(step)? - at(-step)?) / (2.0 * step) / ctx.beta();
            let rho = QuantumState::from_populations(&p)?;
            let rates = demon_forces(&rho, &HermitianOperator::from_real_diagonal(&v)?, &povm, &ctx, &h)?;
            worst_demon = worst_demon.max((rates.total() - fd).abs());
        }
        Ok(outcome(
            worst_flow <= 1e-5 && worst_demon <= 1e-5,
            format!("max |force·flow - dΔ_iS/dt| = {worst_flow:.3e}, max |demon sum - FD| = {worst_demon:.3e}"),
        ))
    })();
    result.unwrap_or_else(err)
}

fn run_cli(config: &Path, out_dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_secondlaw-lab"))
        .arg("run")
        .arg(config)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{}: {}", config.display(), String::from_utf8_lossy(&status.stderr).trim()))
    }
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let configs = ["super_carnot.conf", "nm1.conf", "th_sweep.conf", "demon.conf", "gibbs.conf"];
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return err(e),
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for name in configs {
        let config = configs_dir().join(name);
        for out in [&a, &b] {
            if let Err(e) = run_cli(&config, out) {
                return err(e);
            }
        }
    }
    let files = csv_files(&a);
    if files.is_empty() || files != csv_files(&b) {
        return outcome(false, "runs produced different file sets".into());
    }
    let differing: Vec<_> = files
        .iter()
        .filter(|f| std::fs::read(a.join(f)).ok() != std::fs::read(b.join(f)).ok())
        .collect();
    outcome(
        differing.is_empty(),
        format!("{} CSV files from {} configs, {} differ", files.len(), configs.len(), differing.len()),
    )
}

fn main() {
    let [c1, c2, c3] = driven_identities();
    let results = [
        ("1 partition identity", c1),
        ("2 route agreement", c2),
        ("3 first law", c3),
        ("4 Markovian second law", markovian_second_law()),
        ("5 non-Markovian violation", non_markovian_violation()),
        ("6 Otto closed form", otto_closed_form_agreement()),
        ("7 Markovian engine threshold", markovian_threshold()),
        ("8 super-Carnot demonstration", super_carnot()),
        ("9 classical identity", classical_identity()),
        ("10 single-reservoir Kelvin-Planck", kelvin_planck()),
        ("11 feedback limits", feedback_limits()),
        ("12 force/flow consistency", force_flow_consistency()),
        ("13 CLI determinism", cli_determinism()),
    ];
    let mut failures = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failures, results.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
