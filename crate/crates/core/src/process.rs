//! Thermodynamic functionals over time-sampled trajectories.
//!
//! Sign conventions: heat `ΔQ > 0` flows into the system, work `ΔW > 0` is
//! done on the system by the drive (engine output is `-ΔW`).
//!
//! Every time integral uses the trapezoid rule on the trajectory's own grid
//! with centered finite differences for the time derivative (one-sided at the
//! endpoints). For integrands of the form `tr{Ẋ_t Y_t}` the grid spacings
//! cancel between the trapezoid weights and the difference quotients, leaving
//!
//! ```text
//! ∫ tr{Ẋ Y} dt  ≈  ½ Σ_i tr{(X_{i+1} − X_{i−1}) Y_i}
//! ```
//!
//! with `X_{-1} := X_0` and `X_{N+1} := X_N`. This form telescopes exactly
//! whenever `Y` is constant, which is what makes the fixed-Hamiltonian
//! identities hold to rounding error independent of the grid.

use std::ops::RangeInclusive;

use crate::operator::{common_eigenbasis, trace_product, HermitianOperator, SUPPORT_CUTOFF};
use crate::state::{
    equilibrium_free_energy, log_gibbs_state, nonequilibrium_free_energy,
    relative_entropy_to_gibbs, von_neumann_entropy, QuantumState, ThermalContext,
};
use crate::{Error, Result};

/// Tolerance on the bound `ΔW ≥ ΔF^β + ΔI/β`.
pub const MINIMAL_WORK_TOLERANCE: f64 = 1e-9;
const COMMUTING_TOLERANCE: f64 = 1e-8;

/// Time-sampled path `(t_i, ρ_i, H_i)` in contact with a single bath.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<QuantumState>,
    hamiltonians: Vec<HermitianOperator>,
    bath: ThermalContext,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<QuantumState>,
        hamiltonians: Vec<HermitianOperator>,
        bath: ThermalContext,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a trajectory needs at least 2 samples, got {}",
                times.len()
            )));
        }
        if states.len() != times.len() || hamiltonians.len() != times.len() {
            return Err(Error::InvalidParameter(format!(
                "sample counts differ: {} times, {} states, {} hamiltonians",
                times.len(),
                states.len(),
                hamiltonians.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("sample times must be finite".into()));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "sample times must be strictly increasing (t[{}] = {}, t[{}] = {})",
                i,
                times[i],
                i + 1,
                times[i + 1]
            )));
        }
        let dim = states[0].dim();
        for d in states
            .iter()
            .map(QuantumState::dim)
            .chain(hamiltonians.iter().map(HermitianOperator::dim))
        {
            if d != dim {
                return Err(Error::DimensionMismatch { left: dim, right: d });
            }
        }
        Ok(Self {
            times,
            states,
            hamiltonians,
            bath,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    pub fn hamiltonians(&self) -> &[HermitianOperator] {
        &self.hamiltonians
    }

    pub fn bath(&self) -> &ThermalContext {
        &self.bath
    }

    pub fn first_state(&self) -> &QuantumState {
        &self.states[0]
    }

    pub fn last_state(&self) -> &QuantumState {
        &self.states[self.len() - 1]
    }

    /// Sub-trajectory over the inclusive sample range.
    pub fn window(&self, range: RangeInclusive<usize>) -> Result<Self> {
        let (start, end) = (*range.start(), *range.end());
        if end >= self.len() || end <= start {
            return Err(Error::InvalidParameter(format!(
                "window {start}..={end} is not a valid range of {} samples",
                self.len()
            )));
        }
        Self::new(
            self.times[range.clone()].to_vec(),
            self.states[range.clone()].to_vec(),
            self.hamiltonians[range].to_vec(),
            self.bath.clone(),
        )
    }

    pub fn energies(&self) -> Result<Vec<f64>> {
        self.states
            .iter()
            .zip(&self.hamiltonians)
            .map(|(rho, h)| trace_product(rho.density(), h))
            .collect()
    }

    fn has_constant_hamiltonian(&self) -> bool {
        let h0 = &self.hamiltonians[0];
        self.hamiltonians.iter().all(|h| h == h0)
    }
}

/// Per-sample terms of `½ Σ_i tr{(X_{i+1} − X_{i−1}) Y_i}`.
///
/// Returns `(interior, endpoint)` where `interior[i]` is the full-trajectory
/// term for sample `i < N` and `endpoint[k]` (for `k ≥ 1`) is the one-sided
/// closing term when the trajectory is truncated at sample `k`. The integral
/// over samples `0..=k` is `Σ_{i<k} interior[i] + endpoint[k]`.
fn pairing_terms(
    xs: &[HermitianOperator],
    ys: &[HermitianOperator],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = xs.len();
    let mut interior = Vec::with_capacity(n - 1);
    let mut endpoint = vec![0.0; n];
    for i in 0..n - 1 {
        let lower = &xs[i.saturating_sub(1)];
        interior.push(0.5 * trace_product(&xs[i + 1].sub(lower), &ys[i])?);
    }
    for k in 1..n {
        endpoint[k] = 0.5 * trace_product(&xs[k].sub(&xs[k - 1]), &ys[k])?;
    }
    Ok((interior, endpoint))
}

fn pairing_integral(xs: &[HermitianOperator], ys: &[HermitianOperator]) -> Result<f64> {
    let (interior, endpoint) = pairing_terms(xs, ys)?;
    Ok(interior.iter().sum::<f64>() + endpoint[xs.len() - 1])
}

fn pairing_prefixes(xs: &[HermitianOperator], ys: &[HermitianOperator]) -> Result<Vec<f64>> {
    let (interior, endpoint) = pairing_terms(xs, ys)?;
    let mut out = Vec::with_capacity(xs.len());
    out.push(0.0);
    let mut running = 0.0;
    for k in 1..xs.len() {
        running += interior[k - 1];
        out.push(running + endpoint[k]);
    }
    Ok(out)
}

fn densities(traj: &Trajectory) -> Vec<HermitianOperator> {
    traj.states.iter().map(|s| s.density().clone()).collect()
}

/// `ΔQ = ∫ tr{ρ̇_t H_t} dt`.
pub fn heat(traj: &Trajectory) -> Result<f64> {
    pairing_integral(&densities(traj), &traj.hamiltonians)
}

/// `ΔW = ∫ tr{ρ_t Ḣ_t} dt`.
pub fn work(traj: &Trajectory) -> Result<f64> {
    pairing_integral(&traj.hamiltonians, &densities(traj))
}

/// `I(t) = S(ρ_t ‖ ρ_t^β)` at one sample.
fn information(rho: &QuantumState, h: &HermitianOperator, bath: &ThermalContext) -> Result<f64> {
    relative_entropy_to_gibbs(rho, h, bath)
}

fn boundary_difference(i0: f64, i_end: f64) -> f64 {
    match (i0.is_infinite(), i_end.is_infinite()) {
        (false, false) => i0 - i_end,
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (true, true) => f64::NAN,
    }
}

/// `Δ_iS = S(ρ_0‖ρ_0^β) − S(ρ_τ‖ρ_τ^β) − ∫ tr{ρ_t ∂_t ln ρ_t^β} dt`.
///
/// An infinite boundary relative entropy propagates as `±∞` (`NaN` when both
/// boundaries diverge).
pub fn entropy_production(traj: &Trajectory) -> Result<f64> {
    let bath = &traj.bath;
    let i0 = information(traj.first_state(), &traj.hamiltonians[0], bath)?;
    let i_end = information(traj.last_state(), &traj.hamiltonians[traj.len() - 1], bath)?;
    let boundary = boundary_difference(i0, i_end);
    if traj.has_constant_hamiltonian() {
        return Ok(boundary);
    }
    let logs: Vec<HermitianOperator> = traj
        .hamiltonians
        .iter()
        .map(|h| log_gibbs_state(h, bath))
        .collect();
    Ok(boundary - pairing_integral(&logs, &densities(traj))?)
}

/// `Δ_eS = β ΔQ`.
pub fn entropy_flow(traj: &Trajectory) -> Result<f64> {
    Ok(traj.bath.beta() * heat(traj)?)
}

/// The split `ΔW = ΔW_rev + ΔW_irr`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkPartition {
    /// `ΔI/β + ΔF^β`.
    pub reversible: f64,
    /// `Δ_iS/β`.
    pub irreversible: f64,
    /// False when a boundary relative entropy diverged; both parts are then infinite.
    pub finite: bool,
}

/// Reversible/irreversible work partition with `I(t) = S(ρ_t‖ρ_t^β)`.
pub fn work_partition(traj: &Trajectory) -> Result<WorkPartition> {
    let bath = &traj.bath;
    let last = traj.len() - 1;
    let i0 = information(traj.first_state(), &traj.hamiltonians[0], bath)?;
    let i_end = information(traj.last_state(), &traj.hamiltonians[last], bath)?;
    if i0.is_infinite() || i_end.is_infinite() {
        return Ok(WorkPartition {
            reversible: f64::INFINITY,
            irreversible: f64::INFINITY,
            finite: false,
        });
    }
    let delta_f = equilibrium_free_energy(&traj.hamiltonians[last], bath)
        - equilibrium_free_energy(&traj.hamiltonians[0], bath);
    Ok(WorkPartition {
        reversible: (i_end - i0) / bath.beta() + delta_f,
        irreversible: entropy_production(traj)? / bath.beta(),
        finite: true,
    })
}

/// `ΔW − [F(ρ_τ, H_τ) − F(ρ_0, H_0)]` with the non-equilibrium free energy.
pub fn irr_work_via_free_energy(traj: &Trajectory) -> Result<f64> {
    let bath = &traj.bath;
    let last = traj.len() - 1;
    let f_end = nonequilibrium_free_energy(traj.last_state(), &traj.hamiltonians[last], bath)?;
    let f0 = nonequilibrium_free_energy(traj.first_state(), &traj.hamiltonians[0], bath)?;
    Ok(work(traj)? - (f_end - f0))
}

/// Outcome of the generalized minimal-work test `ΔW ≥ ΔF^β + ΔI/β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimalWorkReport {
    pub work: f64,
    /// `ΔF^β + ΔI/β`.
    pub bound: f64,
    /// `work − bound`.
    pub margin: f64,
    /// True when the bound is violated beyond [`MINIMAL_WORK_TOLERANCE`].
    pub violated: bool,
}

pub fn minimal_work_check(traj: &Trajectory) -> Result<MinimalWorkReport> {
    let bath = &traj.bath;
    let last = traj.len() - 1;
    let i0 = information(traj.first_state(), &traj.hamiltonians[0], bath)?;
    let i_end = information(traj.last_state(), &traj.hamiltonians[last], bath)?;
    let delta_f = equilibrium_free_energy(&traj.hamiltonians[last], bath)
        - equilibrium_free_energy(&traj.hamiltonians[0], bath);
    let bound = delta_f - boundary_difference(i0, i_end) / bath.beta();
    let w = work(traj)?;
    let margin = w - bound;
    Ok(MinimalWorkReport {
        work: w,
        bound,
        margin,
        violated: margin.is_nan() || margin < -MINIMAL_WORK_TOLERANCE,
    })
}

/// Entropy-production rate `tr{F_th V_th}` in the commuting case:
/// `Σ_i ρ̇_ii (ln ρ^β_ii − ln ρ_ii)` in a basis diagonalizing ρ, ρ̇ and H.
///
/// Multiply by `1/β` for the irreversible-work rate. Non-commuting inputs are
/// rejected: the operator ordering is ambiguous there.
pub fn force_flow_rate(
    rho: &QuantumState,
    rho_dot: &HermitianOperator,
    h: &HermitianOperator,
    ctx: &ThermalContext,
) -> Result<f64> {
    check_traceless(rho_dot)?;
    let basis = common_eigenbasis(&[rho.density(), rho_dot, h], COMMUTING_TOLERANCE)?;
    let populations = basis.diagonal_of(rho.density());
    let flows = basis.diagonal_of(rho_dot);
    let energies = basis.diagonal_of(h);
    let log_gibbs = log_boltzmann(&energies, ctx.beta());

    let mut rate = 0.0;
    for ((&p, &v), &lg) in populations.iter().zip(&flows).zip(&log_gibbs) {
        if v == 0.0 {
            continue;
        }
        let log_p = if p < SUPPORT_CUTOFF { f64::NEG_INFINITY } else { p.ln() };
        rate += v * (lg - log_p);
    }
    Ok(rate)
}

pub(crate) fn check_traceless(op: &HermitianOperator) -> Result<()> {
    let tr = op.trace();
    if tr.abs() > 1e-10 * op.matrix().max_abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "state derivative must be traceless, trace is {tr:e}"
        )));
    }
    Ok(())
}

/// `ln(e^{-βE_i}/Z)` for a list of energies.
fn log_boltzmann(energies: &[f64], beta: f64) -> Vec<f64> {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let log_z = -beta * e_min
        + energies
            .iter()
            .map(|&e| (-beta * (e - e_min)).exp())
            .sum::<f64>()
            .ln();
    energies.iter().map(|&e| -beta * e - log_z).collect()
}

/// Running values of every trajectory functional, one row per sample.
///
/// Row `k` holds the functionals of the prefix trajectory over samples `0..=k`
/// (zero at `k = 0`), so the last row equals the whole-trajectory values.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub time: f64,
    pub energy: f64,
    pub entropy: f64,
    pub information: f64,
    pub heat: f64,
    pub work: f64,
    pub entropy_production: f64,
    pub reversible_work: f64,
    pub irreversible_work: f64,
}

pub fn cumulative_ledger(traj: &Trajectory) -> Result<Vec<LedgerRow>> {
    let bath = &traj.bath;
    let beta = bath.beta();
    let rhos = densities(traj);
    let heat = pairing_prefixes(&rhos, &traj.hamiltonians)?;
    let work = pairing_prefixes(&traj.hamiltonians, &rhos)?;
    let drive = if traj.has_constant_hamiltonian() {
        vec![0.0; traj.len()]
    } else {
        let logs: Vec<HermitianOperator> = traj
            .hamiltonians
            .iter()
            .map(|h| log_gibbs_state(h, bath))
            .collect();
        pairing_prefixes(&logs, &rhos)?
    };
    let energies = traj.energies()?;
    let informations: Vec<f64> = traj
        .states
        .iter()
        .zip(&traj.hamiltonians)
        .map(|(rho, h)| information(rho, h, bath))
        .collect::<Result<_>>()?;
    let free_energies: Vec<f64> = traj
        .hamiltonians
        .iter()
        .map(|h| equilibrium_free_energy(h, bath))
        .collect();

    let mut rows = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let production = boundary_difference(informations[0], informations[k]) - drive[k];
        let finite = informations[0].is_finite() && informations[k].is_finite();
        let (reversible, irreversible) = if finite {
            (
                (informations[k] - informations[0]) / beta + free_energies[k] - free_energies[0],
                production / beta,
            )
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        rows.push(LedgerRow {
            time: traj.times[k],
            energy: energies[k],
            entropy: von_neumann_entropy(&traj.states[k]),
            information: informations[k],
            heat: heat[k],
            work: work[k],
            entropy_production: production,
            reversible_work: reversible,
            irreversible_work: irreversible,
        });
    }
    Ok(rows)
}
