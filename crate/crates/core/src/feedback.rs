//! Measurement records and feedback (demon) information quantities.
//!
//! Information is measured in nats. The quantum-classical mutual information
//! of a measurement `{D_k}` on `ρ` is
//!
//! ```text
//! I(ρ:X) = S(ρ) + H({p_k}) − H(ρ:X),   H(ρ:X) = −Σ_k tr{σ_k ln σ_k}
//! ```
//!
//! with `p_k = tr{D_k ρ}` and `σ_k = √D_k ρ √D_k`. It vanishes for effects
//! proportional to the identity and equals `S(ρ)` for a rank-one projective
//! measurement in the eigenbasis of `ρ`.

use crate::operator::{
    common_eigenbasis, eig_hermitian, matrix_function, ComplexMatrix, HermitianOperator, SUPPORT_CUTOFF,
};
use crate::process::check_traceless;
use crate::state::{von_neumann_entropy, QuantumState, ThermalContext};
use crate::{Error, Result};

const COMPLETENESS_TOLERANCE: f64 = 1e-10;
const POSITIVITY_TOLERANCE: f64 = 1e-10;
const DISTRIBUTION_TOLERANCE: f64 = 1e-8;
const COMMUTING_TOLERANCE: f64 = 1e-8;
/// Tolerance on the feedback bound `ΔW ≥ ΔF − I/β`.
pub const FEEDBACK_BOUND_TOLERANCE: f64 = 1e-9;

/// Measurement operators `M_k` with effects `D_k = M_k† M_k` summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    operators: Vec<ComplexMatrix>,
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let effects = operators
            .iter()
            .map(|m| HermitianOperator::new(&m.adjoint() * m))
            .collect::<Result<Vec<_>>>()?;
        Self::validate(&effects)?;
        Ok(Self { operators, effects })
    }

    /// POVM with measurement operators `M_k = √D_k`.
    pub fn from_effects(effects: Vec<HermitianOperator>) -> Result<Self> {
        Self::validate(&effects)?;
        let operators = effects
            .iter()
            .map(|d| square_root(d).map(HermitianOperator::into_matrix))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { operators, effects })
    }

    /// Rank-one projectors onto the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|k| {
                let mut diag = vec![0.0; dim];
                diag[k] = 1.0;
                HermitianOperator::from_real_diagonal(&diag).expect("diagonal is Hermitian")
            })
            .collect::<Vec<_>>();
        Self {
            operators: effects.iter().map(|d| d.matrix().clone()).collect(),
            effects,
        }
    }

    /// `outcomes` effects all equal to `I/outcomes`: a measurement that learns nothing.
    pub fn uninformative(outcomes: usize, dim: usize) -> Result<Self> {
        if outcomes == 0 || dim == 0 {
            return Err(Error::InvalidParameter("POVM needs at least one outcome and dim ≥ 1".into()));
        }
        let d = HermitianOperator::identity(dim).scale(1.0 / outcomes as f64);
        Self::from_effects(vec![d; outcomes])
    }

    fn validate(effects: &[HermitianOperator]) -> Result<()> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidParameter("POVM needs at least one outcome".into()))?;
        let dim = first.dim();
        let mut total = HermitianOperator::zeros(dim);
        for (k, d) in effects.iter().enumerate() {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: d.dim() });
            }
            let min = eig_hermitian(d).eigenvalues[0];
            if min < -POSITIVITY_TOLERANCE {
                return Err(Error::InvalidParameter(format!(
                    "effect {k} is not positive semidefinite (eigenvalue {min:e})"
                )));
            }
            total = total.add(d);
        }
        let deviation = total.max_abs_diff(&HermitianOperator::identity(dim));
        if deviation > COMPLETENESS_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "effects do not sum to the identity (deviation {deviation:e})"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }
}

fn square_root(d: &HermitianOperator) -> Result<HermitianOperator> {
    matrix_function(d, f64::sqrt, Some(SUPPORT_CUTOFF))
}

/// Outcome probabilities and unnormalized post-measurement operators.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub probabilities: Vec<f64>,
    /// `σ_k = √D_k ρ √D_k`.
    pub post_measurement: Vec<HermitianOperator>,
}

pub fn measure(rho: &QuantumState, povm: &Povm) -> Result<MeasurementRecord> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: povm.dim(),
        });
    }
    let mut probabilities = Vec::with_capacity(povm.len());
    let mut post_measurement = Vec::with_capacity(povm.len());
    for d in povm.effects() {
        let sigma = rho.density().sandwich(&square_root(d)?);
        probabilities.push(sigma.trace());
        post_measurement.push(sigma);
    }
    Ok(MeasurementRecord {
        probabilities,
        post_measurement,
    })
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidParameter("empty distribution".into()));
    }
    if let Some(&bad) = p.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!("probability {bad} is not in [0, 1]")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p < SUPPORT_CUTOFF {
        0.0
    } else {
        p * p.ln()
    }
}

/// `H({p_k}) = -Σ p_k ln p_k`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(-p.iter().map(|&x| plogp(x)).sum::<f64>())
}

/// `ΔS_meas = H(X|M) − H(X) = −I(X:M)` for a prior `p(x)` and a classical
/// measurement channel `channel[x][m] = p(m|x)`.
pub fn classical_measurement_entropy_change(prior: &[f64], channel: &[Vec<f64>]) -> Result<f64> {
    check_distribution(prior)?;
    if channel.len() != prior.len() {
        return Err(Error::DimensionMismatch {
            left: prior.len(),
            right: channel.len(),
        });
    }
    let outcomes = channel[0].len();
    for row in channel {
        if row.len() != outcomes {
            return Err(Error::DimensionMismatch {
                left: outcomes,
                right: row.len(),
            });
        }
        check_distribution(row)?;
    }
    let joint: Vec<Vec<f64>> = prior
        .iter()
        .zip(channel)
        .map(|(&px, row)| row.iter().map(|&pm| px * pm).collect())
        .collect();
    let marginal: Vec<f64> = (0..outcomes).map(|m| joint.iter().map(|row| row[m]).sum()).collect();
    let mut mutual = 0.0;
    for (row, &px) in joint.iter().zip(prior) {
        for (&pxm, &pm) in row.iter().zip(&marginal) {
            if pxm >= SUPPORT_CUTOFF {
                mutual += pxm * (pxm / (px * pm)).ln();
            }
        }
    }
    Ok(-mutual)
}

/// `-Σ λ ln λ` over the spectrum of a positive semidefinite operator.
fn operator_entropy(sigma: &HermitianOperator) -> f64 {
    -eig_hermitian(sigma).eigenvalues.iter().map(|&l| plogp(l)).sum::<f64>()
}

/// `I(ρ:X) = S(ρ) + H({p_k}) − H(ρ:X)`.
pub fn qc_mutual_information(rho: &QuantumState, povm: &Povm) -> Result<f64> {
    let record = measure(rho, povm)?;
    let joint: f64 = record.post_measurement.iter().map(operator_entropy).sum();
    let outcome_entropy = -record.probabilities.iter().map(|&p| plogp(p)).sum::<f64>();
    Ok(von_neumann_entropy(rho) + outcome_entropy - joint)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeedbackBound {
    /// `ΔW − (ΔF − I/β)`.
    pub margin: f64,
    pub satisfied: bool,
}

/// Checks `ΔW ≥ ΔF − I/β`; a violation is reported, not raised.
pub fn feedback_bound_check(delta_w: f64, delta_f: f64, beta: f64, info: f64) -> Result<FeedbackBound> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if !(info.is_finite() && info >= -FEEDBACK_BOUND_TOLERANCE) {
        return Err(Error::InvalidParameter(format!("information must be non-negative, got {info}")));
    }
    let margin = delta_w - (delta_f - info / beta);
    Ok(FeedbackBound {
        margin,
        satisfied: margin >= -FEEDBACK_BOUND_TOLERANCE,
    })
}

/// The three demon entropy-flow rates, kept separate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemonRates {
    /// `(1/β) tr{ρ̇ ln ρ}`.
    pub system: f64,
    /// `(1/β) Σ_k ṗ_k ln p_k`.
    pub outcomes: f64,
    /// `−(1/β) Σ_k tr{√D_k ρ̇ √D_k ln σ_k}`.
    pub post_measurement: f64,
}

impl DemonRates {
    /// Equals `−(1/β) dI(ρ:X)/dt`.
    pub fn total(&self) -> f64 {
        self.system + self.outcomes + self.post_measurement
    }
}

/// Demon force/flow rates in the commuting case: `ρ`, `ρ̇`, `H` and every
/// effect must be diagonal in one common basis.
pub fn demon_forces(
    rho: &QuantumState,
    rho_dot: &HermitianOperator,
    povm: &Povm,
    ctx: &ThermalContext,
    h: &HermitianOperator,
) -> Result<DemonRates> {
    check_traceless(rho_dot)?;
    let mut ops = vec![rho.density(), rho_dot, h];
    ops.extend(povm.effects());
    let basis = common_eigenbasis(&ops, COMMUTING_TOLERANCE)?;
    let populations: Vec<f64> = basis.diagonal_of(rho.density()).into_iter().map(|p| p.max(0.0)).collect();
    let flows = basis.diagonal_of(rho_dot);
    let inv_beta = 1.0 / ctx.beta();

    let log_term = |v: f64, p: f64| if v == 0.0 { 0.0 } else if p < SUPPORT_CUTOFF { -v * f64::INFINITY } else { v * p.ln() };

    let system: f64 = flows.iter().zip(&populations).map(|(&v, &p)| log_term(v, p)).sum();
    let mut outcomes = 0.0;
    let mut post = 0.0;
    for d in povm.effects() {
        let weights: Vec<f64> = basis.diagonal_of(d).into_iter().map(|w| w.max(0.0)).collect();
        let p: f64 = weights.iter().zip(&populations).map(|(w, r)| w * r).sum();
        let p_dot: f64 = weights.iter().zip(&flows).map(|(w, v)| w * v).sum();
        outcomes += log_term(p_dot, p);
        for ((&w, &r), &v) in weights.iter().zip(&populations).zip(&flows) {
            post += log_term(w * v, w * r);
        }
    }
    Ok(DemonRates {
        system: inv_beta * system,
        outcomes: inv_beta * outcomes,
        post_measurement: -inv_beta * post,
    })
}
