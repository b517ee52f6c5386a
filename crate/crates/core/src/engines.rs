//! Engine cycles built from thermal and adiabatic strokes.
//!
//! The Otto cycle on a qubit runs A → B → C → D → A:
//!
//! 1. hot isochore at `ω0` against `Th` (heat `Qh`),
//! 2. adiabatic expansion `ω0 → ω1`,
//! 3. cold isochore at `ω1` against `Tc` (heat `Qc`),
//! 4. adiabatic compression `ω1 → ω0`.
//!
//! `T1`, `T2`, `T3`, `T0` are the effective temperatures at B, C, D and A.

use crate::channels::{
    adiabatic_rescale, equilibrium_population, relaxed_population, sample_relaxation,
    ThermalizationParams,
};
use crate::operator::HermitianOperator;
use crate::process::{entropy_production, heat, work, work_partition, Trajectory};
use crate::state::{
    effective_temperature, gibbs_state, relative_entropy_to_gibbs, QuantumState, ThermalContext,
};
use crate::{Error, Result};

/// Fixed-point iteration cap for closing a cycle.
pub const FIXED_POINT_MAX_ITERATIONS: usize = 10_000;
/// Fixed-point step tolerance on the excited population.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;
const CLOSURE_TOLERANCE: f64 = 1e-6;
const ENGINE_CONDITION_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct OttoConfig {
    pub omega0: f64,
    pub omega1: f64,
    pub th: f64,
    pub tc: f64,
    pub stroke_duration: f64,
    pub steps: usize,
    pub params_h: ThermalizationParams,
    pub params_c: ThermalizationParams,
}

impl OttoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega1.is_finite() && self.omega1 > 0.0 && self.omega0.is_finite() && self.omega0 > self.omega1) {
            return Err(Error::InvalidParameter(format!(
                "need omega0 > omega1 > 0, got omega0 = {}, omega1 = {}",
                self.omega0, self.omega1
            )));
        }
        for (name, t) in [("Th", self.th), ("Tc", self.tc)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {t}")));
            }
        }
        if !(self.stroke_duration.is_finite() && self.stroke_duration > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stroke duration must be positive, got {}",
                self.stroke_duration
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 steps, got {}", self.steps)));
        }
        Ok(())
    }

    pub fn hot_bath(&self) -> Result<ThermalContext> {
        Ok(ThermalContext::from_temperature(self.th)?.with_label("hot"))
    }

    pub fn cold_bath(&self) -> Result<ThermalContext> {
        Ok(ThermalContext::from_temperature(self.tc)?.with_label("cold"))
    }

    pub fn h0(&self) -> HermitianOperator {
        HermitianOperator::qubit_hamiltonian(self.omega0)
    }

    pub fn h1(&self) -> HermitianOperator {
        HermitianOperator::qubit_hamiltonian(self.omega1)
    }

    /// The cold Gibbs state at `ω1`: a cycle seed that needs no tuning.
    pub fn default_seed(&self) -> Result<QuantumState> {
        Ok(gibbs_state(&self.h1(), &self.cold_bath()?))
    }

    /// Excited population at A after one full cycle started from `x` at A.
    fn cycle_map(&self, x: f64, n_hot: f64, n_cold: f64) -> f64 {
        let b = relaxed_population(x, n_hot, &self.params_h, self.stroke_duration);
        relaxed_population(b, n_cold, &self.params_c, self.stroke_duration)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleReport {
    pub qh: f64,
    pub qc: f64,
    pub w_expansion: f64,
    pub w_compression: f64,
    pub w_total: f64,
    pub w_rev: f64,
    pub w_irr: f64,
    /// `-W_total/Qh`, present only when [`CycleReport::is_engine`].
    pub eta: Option<f64>,
    pub eta_carnot: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t0: f64,
    pub dis_h: f64,
    pub dis_c: f64,
    pub is_engine: bool,
    /// `Th < Tc`.
    pub reversed_gradient: bool,
    pub start_population: f64,
    pub end_population: f64,
}

impl CycleReport {
    pub fn closure_residual(&self) -> f64 {
        (self.end_population - self.start_population).abs()
    }
}

/// Otto cycle at its closed-orbit fixed point.
pub fn run_otto(config: &OttoConfig) -> Result<CycleReport> {
    config.validate()?;
    let n_hot = equilibrium_population(&config.h0(), &config.hot_bath()?)?;
    let n_cold = equilibrium_population(&config.h1(), &config.cold_bath()?)?;
    let mut x = config.default_seed()?.excited_population();
    let mut step = f64::INFINITY;
    for _ in 0..FIXED_POINT_MAX_ITERATIONS {
        let next = config.cycle_map(x, n_hot, n_cold);
        step = (next - x).abs();
        x = next;
        if step <= FIXED_POINT_TOLERANCE {
            break;
        }
    }
    if step.is_nan() || step > FIXED_POINT_TOLERANCE {
        return Err(Error::Convergence {
            what: "Otto cycle fixed point",
            iterations: FIXED_POINT_MAX_ITERATIONS,
            residual: step,
        });
    }
    let start = QuantumState::qubit(x).map_err(|_| Error::Amplitude {
        population: x,
        time: 0.0,
    })?;
    let report = run_cycle(config, &start)?;
    if report.closure_residual() > CLOSURE_TOLERANCE {
        return Err(Error::Convergence {
            what: "Otto cycle closure",
            iterations: FIXED_POINT_MAX_ITERATIONS,
            residual: report.closure_residual(),
        });
    }
    Ok(report)
}

/// The first `cycles` cycles started from `seed` at A, without seeking closure.
pub fn cycle_transient(config: &OttoConfig, seed: &QuantumState, cycles: usize) -> Result<Vec<CycleReport>> {
    config.validate()?;
    let mut state = seed.clone();
    let mut out = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        let report = run_cycle(config, &state)?;
        state = QuantumState::qubit(report.end_population)?;
        out.push(report);
    }
    Ok(out)
}

/// The four stroke trajectories of one cycle starting at A.
pub fn cycle_strokes(config: &OttoConfig, start: &QuantumState) -> Result<[Trajectory; 4]> {
    config.validate()?;
    let hot = config.hot_bath()?;
    let cold = config.cold_bath()?;
    let stroke1 = sample_relaxation(start, &config.h0(), &hot, &config.params_h, config.stroke_duration, config.steps)?;
    let stroke2 = adiabatic_rescale(stroke1.last_state(), config.omega0, config.omega1, config.steps, &hot)?;
    let stroke3 = sample_relaxation(
        stroke2.last_state(),
        &config.h1(),
        &cold,
        &config.params_c,
        config.stroke_duration,
        config.steps,
    )?;
    let stroke4 = adiabatic_rescale(stroke3.last_state(), config.omega1, config.omega0, config.steps, &cold)?;
    Ok([stroke1, stroke2, stroke3, stroke4])
}

fn run_cycle(config: &OttoConfig, start: &QuantumState) -> Result<CycleReport> {
    let strokes = cycle_strokes(config, start)?;
    let [s1, s2, s3, s4] = &strokes;
    let qh = heat(s1)?;
    let qc = heat(s3)?;
    let w_expansion = work(s2)?;
    let w_compression = work(s4)?;
    let w_total = w_expansion + w_compression;
    let dis_h = entropy_production(s1)?;
    let dis_c = entropy_production(s3)?;
    let w_irr = config.th * dis_h + config.tc * dis_c;
    let mut w_rev = 0.0;
    for s in &strokes {
        w_rev += work_partition(s)?.reversible;
    }
    let is_engine = qh > 0.0 && w_total < 0.0;
    let t_eff = |rho: &QuantumState, omega: f64| effective_temperature(rho, omega).map(|t| t.temperature);
    Ok(CycleReport {
        qh,
        qc,
        w_expansion,
        w_compression,
        w_total,
        w_rev,
        w_irr,
        eta: is_engine.then(|| -w_total / qh),
        eta_carnot: 1.0 - config.tc / config.th,
        t1: t_eff(s1.last_state(), config.omega0)?,
        t2: t_eff(s2.last_state(), config.omega1)?,
        t3: t_eff(s3.last_state(), config.omega1)?,
        t0: t_eff(s4.last_state(), config.omega0)?,
        dis_h,
        dis_c,
        is_engine,
        reversed_gradient: config.th < config.tc,
        start_population: start.excited_population(),
        end_population: s4.last_state().excited_population(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OttoClosedForm {
    pub qh: f64,
    pub qc: f64,
    pub w: f64,
    /// `1 - ω1/ω0`, present when [`engine_condition`] holds.
    pub eta: Option<f64>,
}

/// Otto ledger from the stroke-end effective temperatures `T1` (after the hot
/// stroke) and `T3` (after the cold stroke).
pub fn otto_closed_form(omega0: f64, omega1: f64, t1: f64, t3: f64) -> OttoClosedForm {
    let bracket = (omega1 / (2.0 * t3)).tanh() - (omega0 / (2.0 * t1)).tanh();
    OttoClosedForm {
        qh: 0.5 * omega0 * bracket,
        qc: -0.5 * omega1 * bracket,
        w: 0.5 * (omega1 - omega0) * bracket,
        eta: engine_condition(omega0, omega1, t1, t3).then(|| 1.0 - omega1 / omega0),
    }
}

/// `ω1/T3 ≥ ω0/T1`, boundary inclusive.
pub fn engine_condition(omega0: f64, omega1: f64, t1: f64, t3: f64) -> bool {
    omega1 / t3 >= omega0 / t1 - ENGINE_CONDITION_SLACK
}

/// `η = -W_rev/Qh - (Δ_iS_h/β_h + Δ_iS_c/β_c)/Qh`.
pub fn generic_efficiency(w_rev: f64, qh: f64, dis_h: f64, dis_c: f64, beta_h: f64, beta_c: f64) -> Result<f64> {
    if qh.is_nan() || qh <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "efficiency needs absorbed heat Qh > 0, got {qh}"
        )));
    }
    for beta in [beta_h, beta_c] {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("inverse temperature must be positive, got {beta}")));
        }
    }
    Ok(-w_rev / qh - (dis_h / beta_h + dis_c / beta_c) / qh)
}

/// Net work on a two-stroke cycle against one bath: `ρ0 → ρ1` at fixed `H0`,
/// quench to `H1`, `ρ1 → ρ0` at fixed `H1`, quench back.
///
/// Around a closed cycle `ΔF^β` and `ΔI` cancel, so the work is the total
/// irreversible work
/// `T [S(ρ0‖ρ0^β) − S(ρ1‖ρ0^β) + S(ρ1‖ρ1^β) − S(ρ0‖ρ1^β)]`.
/// An infinite term yields `±∞` (`NaN` if infinities of both signs meet).
pub fn single_reservoir_cycle(
    h0: &HermitianOperator,
    h1: &HermitianOperator,
    rho0: &QuantumState,
    rho1: &QuantumState,
    ctx: &ThermalContext,
) -> Result<f64> {
    for d in [h1.dim(), rho0.dim(), rho1.dim()] {
        if d != h0.dim() {
            return Err(Error::DimensionMismatch { left: h0.dim(), right: d });
        }
    }
    let terms = [
        relative_entropy_to_gibbs(rho0, h0, ctx)?,
        -relative_entropy_to_gibbs(rho1, h0, ctx)?,
        relative_entropy_to_gibbs(rho1, h1, ctx)?,
        -relative_entropy_to_gibbs(rho0, h1, ctx)?,
    ];
    Ok(ctx.temperature() * terms.iter().sum::<f64>())
}

/// Closed orbit `(ρ0, ρ1)` of the two-stroke single-reservoir cycle with
/// qubit splittings `omega0`, `omega1` and stroke duration `duration`.
pub fn single_reservoir_orbit(
    omega0: f64,
    omega1: f64,
    ctx: &ThermalContext,
    params0: &ThermalizationParams,
    params1: &ThermalizationParams,
    duration: f64,
    steps: usize,
) -> Result<(QuantumState, QuantumState)> {
    let h0 = HermitianOperator::qubit_hamiltonian(omega0);
    let h1 = HermitianOperator::qubit_hamiltonian(omega1);
    let a0 = equilibrium_population(&h0, ctx)?;
    let a1 = equilibrium_population(&h1, ctx)?;
    // x = map1(map0(x)) is affine in x: solve it directly
    let c = relaxed_population(relaxed_population(0.0, a0, params0, duration), a1, params1, duration);
    let slope = relaxed_population(relaxed_population(1.0, a0, params0, duration), a1, params1, duration) - c;
    if (1.0 - slope).abs() < 1e-12 {
        return Err(Error::Convergence {
            what: "single-reservoir orbit",
            iterations: 0,
            residual: slope,
        });
    }
    let x = c / (1.0 - slope);
    let rho0 = QuantumState::qubit(x).map_err(|_| Error::Amplitude { population: x, time: 0.0 })?;
    let stroke0 = sample_relaxation(&rho0, &h0, ctx, params0, duration, steps)?;
    let rho1 = stroke0.last_state().clone();
    let stroke1 = sample_relaxation(&rho1, &h1, ctx, params1, duration, steps)?;
    let residual = (stroke1.last_state().excited_population() - x).abs();
    if residual > CLOSURE_TOLERANCE {
        return Err(Error::Convergence {
            what: "single-reservoir orbit closure",
            iterations: 1,
            residual,
        });
    }
    Ok((rho0, rho1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalReport {
    /// Heat rejected to the cold reservoir (positive).
    pub qc: f64,
    pub eta_e: f64,
    pub eta_carnot: f64,
    pub dis: f64,
    /// `(η_e − η_C) + Tc Δ_iS / Qh`, zero up to rounding.
    pub identity_residual: f64,
    /// `Th > Tc` and `Tc ≤ T3 < T1 ≤ Th`.
    pub physical: bool,
}

/// Endoreversible engine with reservoir temperatures `Th`, `Tc` and working
/// temperatures `T1` (hot side) and `T3` (cold side).
pub fn classical_endoreversible(th: f64, tc: f64, t1: f64, t3: f64, qh: f64) -> Result<ClassicalReport> {
    for (name, v) in [("Th", th), ("Tc", tc), ("T1", t1), ("T3", t3)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if !(qh.is_finite() && qh > 0.0) {
        return Err(Error::InvalidParameter(format!("Qh must be positive, got {qh}")));
    }
    let qc = qh * t3 / t1;
    let eta_e = 1.0 - t3 / t1;
    let eta_carnot = 1.0 - tc / th;
    let dis = qc / tc - qh / th;
    Ok(ClassicalReport {
        qc,
        eta_e,
        eta_carnot,
        dis,
        identity_residual: (eta_e - eta_carnot) + tc * dis / qh,
        physical: th > tc && tc <= t3 && t3 < t1 && t1 <= th,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn asymptotic(th: f64, tc: f64) -> OttoConfig {
        OttoConfig {
            omega0: 2.0,
            omega1: 1.0,
            th,
            tc,
            stroke_duration: 40.0,
            steps: 101,
            params_h: ThermalizationParams::markovian(1.0).unwrap(),
            params_c: ThermalizationParams::markovian(1.0).unwrap(),
        }
    }

    #[test]
    fn closed_form_examples() {
        let zero = otto_closed_form(2.0, 1.0, 2.0, 1.0);
        assert_eq!((zero.qh, zero.qc, zero.w), (0.0, 0.0, 0.0));
        assert_eq!(zero.eta, Some(0.5));

        let c = otto_closed_form(2.0, 1.0, 4.0, 1.0);
        let bracket = 0.5f64.tanh() - 0.25f64.tanh();
        assert_abs_diff_eq!(c.qh, bracket, epsilon = 1e-15);
        assert_abs_diff_eq!(c.qh, 0.21720, epsilon = 1e-5);
        assert_abs_diff_eq!(c.qc, -0.10860, epsilon = 1e-5);
        assert_abs_diff_eq!(c.w, -0.10860, epsilon = 1e-5);
        assert_eq!(c.eta, Some(0.5));
    }

    #[test]
    fn engine_condition_examples() {
        assert!(engine_condition(2.0, 1.0, 4.0, 1.0));
        assert!(!engine_condition(2.0, 1.0, 2.0, 1.5));
        assert!(engine_condition(2.0, 1.0, 2.0, 1.0));
    }

    #[test]
    fn asymptotic_otto_matches_closed_form() {
        let r = run_otto(&asymptotic(4.0, 1.0)).unwrap();
        let c = otto_closed_form(2.0, 1.0, 4.0, 1.0);
        assert_abs_diff_eq!(r.t1, 4.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.t3, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.qh, c.qh, epsilon = 1e-6);
        assert_abs_diff_eq!(r.qc, c.qc, epsilon = 1e-6);
        assert_abs_diff_eq!(r.w_total, c.w, epsilon = 1e-6);
        assert_abs_diff_eq!(r.eta.unwrap(), 0.5, epsilon = 1e-9);
        assert!(r.eta.unwrap() <= 1.0 - r.t3 / r.t1);
        assert_abs_diff_eq!(r.eta_carnot, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(r.w_total, -(r.qh + r.qc), epsilon = 1e-8);
        assert_abs_diff_eq!(r.t2, r.t1 * 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.t0, r.t3 * 2.0, epsilon = 1e-9);
    }

    #[test]
    fn report_matches_generic_efficiency() {
        let mut cfg = asymptotic(4.0, 1.0);
        cfg.stroke_duration = 1.5;
        let r = run_otto(&cfg).unwrap();
        assert!(r.dis_h > 0.0 && r.dis_c > 0.0);
        let eta = generic_efficiency(r.w_rev, r.qh, r.dis_h, r.dis_c, 1.0 / cfg.th, 1.0 / cfg.tc).unwrap();
        assert_abs_diff_eq!(r.eta.unwrap(), eta, epsilon = 1e-8);
        assert_abs_diff_eq!(r.w_rev + r.w_irr, r.w_total, epsilon = 1e-10);
        assert!(r.eta.unwrap() <= r.eta_carnot);
    }

    #[test]
    fn fixed_point_is_invariant() {
        let mut cfg = asymptotic(3.0, 1.0);
        cfg.stroke_duration = 0.7;
        let r = run_otto(&cfg).unwrap();
        let again = cycle_transient(&cfg, &QuantumState::qubit(r.start_population).unwrap(), 1).unwrap();
        assert!(again[0].closure_residual() <= 1e-9);
    }

    #[test]
    fn transient_approaches_fixed_point() {
        let mut cfg = asymptotic(3.0, 1.0);
        cfg.stroke_duration = 0.5;
        let seed = cfg.default_seed().unwrap();
        let runs = cycle_transient(&cfg, &seed, 30).unwrap();
        assert_eq!(runs.len(), 30);
        let r = run_otto(&cfg).unwrap();
        assert_abs_diff_eq!(runs[29].qh, r.qh, epsilon = 1e-6);
        for pair in runs.windows(2) {
            assert_eq!(pair[0].end_population, pair[1].start_population);
        }
    }

    #[test]
    fn reversed_gradient_is_flagged() {
        let r = run_otto(&asymptotic(1.0, 2.0)).unwrap();
        assert!(r.reversed_gradient);
        assert!(!r.is_engine);
        assert!(r.eta.is_none());
    }

    #[test]
    fn threshold_at_twice_tc() {
        assert!(run_otto(&asymptotic(2.1, 1.0)).unwrap().is_engine);
        assert!(!run_otto(&asymptotic(1.9, 1.0)).unwrap().is_engine);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = asymptotic(2.0, 1.0);
        cfg.omega1 = 3.0;
        assert!(run_otto(&cfg).is_err());
        let mut cfg = asymptotic(2.0, 1.0);
        cfg.tc = -1.0;
        assert!(run_otto(&cfg).is_err());
        let mut cfg = asymptotic(2.0, 1.0);
        cfg.steps = 1;
        assert!(run_otto(&cfg).is_err());
    }

    #[test]
    fn generic_efficiency_reductions() {
        assert_eq!(generic_efficiency(-0.3, 1.0, 0.0, 0.0, 1.0, 2.0).unwrap(), 0.3);
        let base = generic_efficiency(-0.3, 1.0, 0.01, 0.02, 1.0, 2.0).unwrap();
        let more = generic_efficiency(-0.3, 1.0, 0.02, 0.02, 1.0, 2.0).unwrap();
        assert!(more < base && base < 0.3);
        assert!(generic_efficiency(-0.3, 0.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }

    fn kl(p: f64, q: f64) -> f64 {
        p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
    }

    fn boltzmann_excited(omega: f64, beta: f64) -> f64 {
        1.0 / (1.0 + (beta * omega).exp())
    }

    #[test]
    fn single_reservoir_examples() {
        let h0 = HermitianOperator::from_real_diagonal(&[1.0, -1.0]).unwrap();
        let h1 = HermitianOperator::from_real_diagonal(&[0.5, -0.5]).unwrap();
        let b = ThermalContext::new(1.0).unwrap();
        let rho0 = QuantumState::qubit(0.3).unwrap();
        let rho1 = QuantumState::qubit(0.2).unwrap();
        assert_abs_diff_eq!(single_reservoir_cycle(&h0, &h1, &rho0, &rho0, &b).unwrap(), 0.0, epsilon = 1e-15);
        let g0 = gibbs_state(&h0, &b);
        assert_abs_diff_eq!(single_reservoir_cycle(&h0, &h0, &g0, &g0, &b).unwrap(), 0.0, epsilon = 1e-15);

        let (a0, a1) = (boltzmann_excited(2.0, 1.0), boltzmann_excited(1.0, 1.0));
        let oracle = kl(0.3, a0) - kl(0.2, a0) + kl(0.2, a1) - kl(0.3, a1);
        let w = single_reservoir_cycle(&h0, &h1, &rho0, &rho1, &b).unwrap();
        assert_abs_diff_eq!(w, oracle, epsilon = 1e-12);
        assert!(w > 0.0);
    }

    #[test]
    fn markovian_single_reservoir_orbit_costs_work() {
        let b = ThermalContext::new(1.0).unwrap();
        let m = ThermalizationParams::markovian(0.8).unwrap();
        let (rho0, rho1) = single_reservoir_orbit(2.0, 1.0, &b, &m, &m, 1.0, 11).unwrap();
        let w = single_reservoir_cycle(
            &HermitianOperator::qubit_hamiltonian(2.0),
            &HermitianOperator::qubit_hamiltonian(1.0),
            &rho0,
            &rho1,
            &b,
        )
        .unwrap();
        assert!(w > 0.0);
    }

    #[test]
    fn classical_examples() {
        let r = classical_endoreversible(500.0, 250.0, 400.0, 320.0, 100.0).unwrap();
        assert_abs_diff_eq!(r.qc, 80.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eta_e, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(r.eta_carnot, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.dis, 0.12, epsilon = 1e-15);
        assert!(r.identity_residual.abs() <= 1e-12);
        assert!(r.physical);

        let rev = classical_endoreversible(500.0, 250.0, 500.0, 250.0, 100.0).unwrap();
        assert_eq!(rev.dis, 0.0);
        assert_eq!(rev.eta_e, rev.eta_carnot);
        assert!(classical_endoreversible(500.0, 0.0, 400.0, 320.0, 100.0).is_err());
        assert!(classical_endoreversible(500.0, 250.0, 400.0, 320.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_efficiency_below_stroke_carnot(
            omega0 in 0.1f64..5.0,
            ratio in 0.05f64..0.99,
            t1 in 0.05f64..10.0,
            t3 in 0.05f64..10.0,
        ) {
            let omega1 = omega0 * ratio;
            prop_assume!(engine_condition(omega0, omega1, t1, t3));
            let c = otto_closed_form(omega0, omega1, t1, t3);
            prop_assert!(c.eta.unwrap() <= 1.0 - t3 / t1 + 1e-12);
            prop_assert!(c.qh >= -1e-12 && c.qc <= 1e-12 && c.w <= 1e-12);
        }

        #[test]
        fn markovian_otto_respects_carnot(
            th in 0.3f64..5.0,
            tc in 0.2f64..3.0,
            ratio in 0.2f64..0.9,
            gamma_h in 0.2f64..3.0,
            gamma_c in 0.2f64..3.0,
            duration in 0.2f64..3.0,
        ) {
            let cfg = OttoConfig {
                omega0: 2.0,
                omega1: 2.0 * ratio,
                th,
                tc,
                stroke_duration: duration,
                steps: 21,
                params_h: ThermalizationParams::markovian(gamma_h).unwrap(),
                params_c: ThermalizationParams::markovian(gamma_c).unwrap(),
            };
            let r = run_otto(&cfg).unwrap();
            prop_assert!(r.dis_h >= -1e-9 && r.dis_c >= -1e-9);
            if let Some(eta) = r.eta {
                prop_assert!(eta <= r.eta_carnot + 1e-9);
            }
            prop_assert!((r.w_total + r.qh + r.qc).abs() <= 1e-8);
        }

        #[test]
        fn classical_identity_holds(
            tc in 1.0f64..500.0,
            span in 1.0f64..500.0,
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
            qh in 0.1f64..1000.0,
        ) {
            let th = tc + span;
            let t3 = tc + a * span * 0.5;
            let t1 = th - b * span * 0.5;
            let r = classical_endoreversible(th, tc, t1, t3, qh).unwrap();
            prop_assert!(r.identity_residual.abs() <= 1e-12);
            prop_assert!(r.eta_e <= r.eta_carnot + 1e-12);
            prop_assert!(r.dis >= -1e-12);
        }
    }
}
