//! Qubit thermalization and adiabatic rescaling.
//!
//! States are σ_z-diagonal, `ρ = diag(n, 1 - n)` with `n` the excited
//! population. A thermal stroke against a bath with Gibbs population `n_eq`
//! evolves
//!
//! ```text
//! n(t) = n_eq + (n_0 - n_eq) f(t) + κ g(t)
//! ```
//!
//! with memory factor `f` and, for memory-bearing baths only, an initial
//! population velocity `κ` carried by `g(t) = e^{-γt} sin(ω_mem t) / ω_mem`.
//! `f` and `g` are the two fundamental solutions of a damped oscillator, so
//! `κ = 0` recovers the plain memory-factor model.

use crate::operator::HermitianOperator;
use crate::process::Trajectory;
use crate::state::{gibbs_state, QuantumState, ThermalContext};
use crate::{Error, Result};

const DIAGONAL_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Markovian,
    NonMarkovian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalizationParams {
    gamma: f64,
    omega_mem: f64,
    kick: f64,
    mode: Mode,
}

impl ThermalizationParams {
    pub fn markovian(gamma: f64) -> Result<Self> {
        check_rate(gamma)?;
        Ok(Self {
            gamma,
            omega_mem: 0.0,
            kick: 0.0,
            mode: Mode::Markovian,
        })
    }

    pub fn non_markovian(gamma: f64, omega_mem: f64) -> Result<Self> {
        check_rate(gamma)?;
        if !(omega_mem.is_finite() && omega_mem > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "memory frequency must be positive for non-Markovian relaxation, got {omega_mem}"
            )));
        }
        Ok(Self {
            gamma,
            omega_mem,
            kick: 0.0,
            mode: Mode::NonMarkovian,
        })
    }

    /// Builds either mode; `omega_mem` is ignored for [`Mode::Markovian`].
    pub fn new(mode: Mode, gamma: f64, omega_mem: f64) -> Result<Self> {
        match mode {
            Mode::Markovian => Self::markovian(gamma),
            Mode::NonMarkovian => Self::non_markovian(gamma, omega_mem),
        }
    }

    /// Sets the initial population velocity κ (1/time). Non-Markovian only.
    pub fn with_kick(mut self, kick: f64) -> Result<Self> {
        if !kick.is_finite() {
            return Err(Error::InvalidParameter(format!("kick must be finite, got {kick}")));
        }
        if self.mode == Mode::Markovian && kick != 0.0 {
            return Err(Error::InvalidParameter(
                "a Markovian bath carries no memory; kick must be 0".into(),
            ));
        }
        self.kick = kick;
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega_mem(&self) -> f64 {
        self.omega_mem
    }

    pub fn kick(&self) -> f64 {
        self.kick
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "relaxation rate must be positive, got {gamma}"
        )));
    }
    Ok(())
}

/// `f(t)`: `e^{-γt}` or `e^{-γt} cos(ω_mem t)`.
pub fn memory_factor(params: &ThermalizationParams, t: f64) -> f64 {
    let decay = (-params.gamma * t).exp();
    match params.mode {
        Mode::Markovian => decay,
        Mode::NonMarkovian => decay * (params.omega_mem * t).cos(),
    }
}

fn memory_factor_rate(params: &ThermalizationParams, t: f64) -> f64 {
    let decay = (-params.gamma * t).exp();
    match params.mode {
        Mode::Markovian => -params.gamma * decay,
        Mode::NonMarkovian => {
            let (s, c) = (params.omega_mem * t).sin_cos();
            -decay * (params.gamma * c + params.omega_mem * s)
        }
    }
}

fn kick_response(params: &ThermalizationParams, t: f64) -> f64 {
    match params.mode {
        Mode::Markovian => 0.0,
        Mode::NonMarkovian => (-params.gamma * t).exp() * (params.omega_mem * t).sin() / params.omega_mem,
    }
}

fn kick_response_rate(params: &ThermalizationParams, t: f64) -> f64 {
    match params.mode {
        Mode::Markovian => 0.0,
        Mode::NonMarkovian => {
            let (s, c) = (params.omega_mem * t).sin_cos();
            (-params.gamma * t).exp() * (c - params.gamma * s / params.omega_mem)
        }
    }
}

/// Excited population after time `t`, without range checks.
pub fn relaxed_population(n0: f64, n_eq: f64, params: &ThermalizationParams, t: f64) -> f64 {
    n_eq + (n0 - n_eq) * memory_factor(params, t) + params.kick * kick_response(params, t)
}

fn relaxed_population_rate(n0: f64, n_eq: f64, params: &ThermalizationParams, t: f64) -> f64 {
    (n0 - n_eq) * memory_factor_rate(params, t) + params.kick * kick_response_rate(params, t)
}

/// Gibbs excited population of a diagonal qubit Hamiltonian.
pub fn equilibrium_population(h: &HermitianOperator, ctx: &ThermalContext) -> Result<f64> {
    check_diagonal_qubit("Hamiltonian", h)?;
    Ok(gibbs_state(h, ctx).excited_population())
}

fn check_diagonal_qubit(what: &str, op: &HermitianOperator) -> Result<()> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: 2,
        });
    }
    let off = op.off_diagonal_max();
    if off > DIAGONAL_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "{what} must be σ_z-diagonal, off-diagonal magnitude is {off:e}"
        )));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

fn checked_population(n: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n) {
        return Err(Error::Amplitude { population: n, time: t });
    }
    Ok(n)
}

/// Thermal stroke of duration `t` against `ctx` with fixed Hamiltonian `h`.
///
/// Fails with [`Error::Amplitude`] instead of clamping when the population
/// would leave `[0, 1]`.
pub fn relax(
    rho0: &QuantumState,
    h: &HermitianOperator,
    ctx: &ThermalContext,
    params: &ThermalizationParams,
    t: f64,
) -> Result<QuantumState> {
    check_time(t)?;
    check_diagonal_qubit("state", rho0.density())?;
    let n_eq = equilibrium_population(h, ctx)?;
    let n0 = rho0.excited_population();
    if params.mode == Mode::Markovian && n0 == n_eq {
        return Ok(rho0.clone());
    }
    let n = checked_population(relaxed_population(n0, n_eq, params, t), t)?;
    QuantumState::qubit(n)
}

/// `ρ̇` at time `t` along the stroke started from `rho0`.
pub fn relax_derivative(
    rho0: &QuantumState,
    h: &HermitianOperator,
    ctx: &ThermalContext,
    params: &ThermalizationParams,
    t: f64,
) -> Result<HermitianOperator> {
    check_time(t)?;
    check_diagonal_qubit("state", rho0.density())?;
    let n_eq = equilibrium_population(h, ctx)?;
    let rate = relaxed_population_rate(rho0.excited_population(), n_eq, params, t);
    HermitianOperator::from_real_diagonal(&[rate, -rate])
}

/// Uniform-grid trajectory of [`relax`] over `[0, duration]` with `steps` samples.
pub fn sample_relaxation(
    rho0: &QuantumState,
    h: &HermitianOperator,
    ctx: &ThermalContext,
    params: &ThermalizationParams,
    duration: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_grid(duration, steps)?;
    check_diagonal_qubit("state", rho0.density())?;
    let times = uniform_grid(duration, steps);
    let mut states = Vec::with_capacity(steps);
    states.push(rho0.clone());
    for &t in &times[1..] {
        states.push(relax(rho0, h, ctx, params, t)?);
    }
    Trajectory::new(times, states, vec![h.clone(); steps], ctx.clone())
}

fn check_grid(duration: f64, steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 steps, got {steps}")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be positive so sample times increase strictly, got {duration}"
        )));
    }
    Ok(())
}

pub(crate) fn uniform_grid(duration: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps).map(|i| duration * i as f64 / last).collect()
}

/// Adiabatic stroke: `ρ` frozen while `H_t = (ω(t)/2) σ_z` with `ω` linear
/// from `omega_from` to `omega_to` over unit time.
///
/// The bath only labels the trajectory; no heat flows along it.
pub fn adiabatic_rescale(
    rho: &QuantumState,
    omega_from: f64,
    omega_to: f64,
    steps: usize,
    bath: &ThermalContext,
) -> Result<Trajectory> {
    for omega in [omega_from, omega_to] {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "level splitting must be positive, got {omega}"
            )));
        }
    }
    check_diagonal_qubit("state", rho.density())?;
    check_grid(1.0, steps)?;
    let times = uniform_grid(1.0, steps);
    let hamiltonians = times
        .iter()
        .map(|&s| HermitianOperator::qubit_hamiltonian(omega_from + (omega_to - omega_from) * s))
        .collect();
    Trajectory::new(times, vec![rho.clone(); steps], hamiltonians, bath.clone())
}
