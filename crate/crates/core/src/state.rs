//! Density matrices and the static thermodynamic vocabulary: Gibbs states,
//! entropies, free energies and qubit effective temperatures.

use crate::operator::{eig_hermitian, trace_product, HermitianOperator, SUPPORT_CUTOFF};
use crate::{Error, Result};

const TRACE_TOLERANCE: f64 = 1e-10;
const POSITIVITY_TOLERANCE: f64 = 1e-10;
/// ρ-weight on a σ-null direction above this makes `S(ρ‖σ)` infinite.
const SUPPORT_WEIGHT_TOLERANCE: f64 = 1e-10;
const DIAGONAL_TOLERANCE: f64 = 1e-8;

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    density: HermitianOperator,
}

impl QuantumState {
    pub fn new(density: HermitianOperator) -> Result<Self> {
        let trace = density.trace();
        if !trace.is_finite() || (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let spectrum = eig_hermitian(&density);
        let min = spectrum.eigenvalues[0];
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { density })
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(populations)?)
    }

    /// Qubit state `diag(n, 1 - n)` with excited population `n` (σ_z = +1 level first).
    pub fn qubit(excited_population: f64) -> Result<Self> {
        Self::from_populations(&[excited_population, 1.0 - excited_population])
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            density: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub(crate) fn from_operator_unchecked(density: HermitianOperator) -> Self {
        Self { density }
    }

    pub fn density(&self) -> &HermitianOperator {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    /// Population of level 0, the excited level of a qubit in the σ_z convention.
    pub fn excited_population(&self) -> f64 {
        self.density.get(0, 0).re
    }

    /// Eigenvalues with everything below the support cutoff set to zero.
    pub fn clamped_eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.density)
            .eigenvalues
            .into_iter()
            .map(|p| if p < SUPPORT_CUTOFF { 0.0 } else { p })
            .collect()
    }
}

/// A heat bath, identified by its inverse temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalContext {
    beta: f64,
    label: String,
}

impl ThermalContext {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature must be finite and positive, got {beta}"
            )));
        }
        Ok(Self {
            beta,
            label: String::from("bath"),
        })
    }

    pub fn from_temperature(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be finite and positive, got {temperature}"
            )));
        }
        Self::new(1.0 / temperature)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `ln Z` for `Z = tr exp(-βH)`, evaluated with the spectrum shifted by its minimum.
pub fn log_partition_function(h: &HermitianOperator, ctx: &ThermalContext) -> f64 {
    let spectrum = eig_hermitian(h);
    let e_min = spectrum.eigenvalues[0];
    let shifted: f64 = spectrum
        .eigenvalues
        .iter()
        .map(|&e| (-ctx.beta * (e - e_min)).exp())
        .sum();
    -ctx.beta * e_min + shifted.ln()
}

/// `ρ^β = exp(-βH)/Z`.
pub fn gibbs_state(h: &HermitianOperator, ctx: &ThermalContext) -> QuantumState {
    let spectrum = eig_hermitian(h);
    let e_min = spectrum.eigenvalues[0];
    let boltzmann: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .map(|&e| (-ctx.beta * (e - e_min)).exp())
        .collect();
    let z: f64 = boltzmann.iter().sum();
    let weights: Vec<f64> = boltzmann.iter().map(|w| w / z).collect();
    QuantumState::from_operator_unchecked(spectrum.compose(&weights))
}

/// `ln ρ^β = -βH - (ln Z) I`, built directly from `H`.
pub fn log_gibbs_state(h: &HermitianOperator, ctx: &ThermalContext) -> HermitianOperator {
    let log_z = log_partition_function(h, ctx);
    h.scale(-ctx.beta)
        .sub(&HermitianOperator::identity(h.dim()).scale(log_z))
}

/// `F^β = -(1/β) ln Z`.
pub fn equilibrium_free_energy(h: &HermitianOperator, ctx: &ThermalContext) -> f64 {
    -log_partition_function(h, ctx) / ctx.beta
}

/// `S(ρ) = -tr ρ ln ρ` in nats, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &QuantumState) -> f64 {
    rho.clamped_eigenvalues()
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// `S(ρ‖σ) = tr ρ ln ρ - tr ρ ln σ`.
///
/// Returns `f64::INFINITY` when ρ carries weight on the kernel of σ.
pub fn relative_entropy(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let sigma_spectrum = eig_hermitian(sigma.density());
    let weights = sigma_spectrum.diagonal_of(rho.density());
    let mut cross = 0.0;
    for (&s, &w) in sigma_spectrum.eigenvalues.iter().zip(&weights) {
        if s < SUPPORT_CUTOFF {
            if w > SUPPORT_WEIGHT_TOLERANCE {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * s.ln();
    }
    Ok(-von_neumann_entropy(rho) - cross)
}

/// `S(ρ‖ρ^β)` against the Gibbs state of `h`, evaluated in the eigenbasis of
/// `h` with `ln ρ^β` taken from the energies rather than from `ρ^β`.
///
/// Same support rule as [`relative_entropy`]: a Gibbs weight below the
/// support cutoff that carries ρ-weight yields `f64::INFINITY`.
pub fn relative_entropy_to_gibbs(
    rho: &QuantumState,
    h: &HermitianOperator,
    ctx: &ThermalContext,
) -> Result<f64> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: h.dim(),
        });
    }
    let spectrum = eig_hermitian(h);
    let log_z = log_partition_function(h, ctx);
    let weights = spectrum.diagonal_of(rho.density());
    let mut cross = 0.0;
    for (&e, &w) in spectrum.eigenvalues.iter().zip(&weights) {
        let log_g = -ctx.beta * e - log_z;
        if log_g.exp() < SUPPORT_CUTOFF {
            if w > SUPPORT_WEIGHT_TOLERANCE {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * log_g;
    }
    Ok(-von_neumann_entropy(rho) - cross)
}

/// `F(ρ, H) = tr{ρH} - S(ρ)/β`.
pub fn nonequilibrium_free_energy(
    rho: &QuantumState,
    h: &HermitianOperator,
    ctx: &ThermalContext,
) -> Result<f64> {
    let energy = trace_product(rho.density(), h)?;
    Ok(energy - von_neumann_entropy(rho) / ctx.beta)
}

/// Effective temperature of a diagonal qubit state.
///
/// `temperature` is `+∞` at `⟨σ_z⟩ = 0` and negative when the populations
/// are inverted (`⟨σ_z⟩ > 0`), in which case `inverted` is set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveTemperature {
    pub temperature: f64,
    pub inverted: bool,
}

impl EffectiveTemperature {
    pub fn is_infinite(&self) -> bool {
        self.temperature.is_infinite()
    }
}

/// `T_eff = -ω / (2 atanh⟨σ_z⟩)` for a σ_z-diagonal qubit state.
pub fn effective_temperature(rho: &QuantumState, omega: f64) -> Result<EffectiveTemperature> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("level splitting must be positive, got {omega}")));
    }
    let off = rho.density().off_diagonal_max();
    if off > DIAGONAL_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "state has coherence {off:e} in the σ_z basis"
        )));
    }
    let sz = trace_product(rho.density(), &HermitianOperator::pauli_z())?;
    if sz.abs() >= 1.0 - 1e-12 {
        return Err(Error::PureState { expectation: sz });
    }
    if sz.abs() <= 1e-12 {
        return Ok(EffectiveTemperature {
            temperature: f64::INFINITY,
            inverted: false,
        });
    }
    Ok(EffectiveTemperature {
        temperature: -omega / (2.0 * sz.atanh()),
        inverted: sz > 0.0,
    })
}
