//! Gibbs states and partition functions at scaled temperature `τ = kT/|J|`.
//!
//! All Boltzmann factors are taken relative to the ground energy, so nothing
//! overflows however small `τ` gets. Ratios, and therefore every normalized
//! quantity, are unchanged by the shift.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{b_plus_minus, closed_form_spectrum, EigenSystem, ModelParams};

/// Default ground-manifold width, in units of `|J|`.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    pub tau: f64,
}

impl ThermalParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::NonPositiveTau(tau));
        }
        Ok(Self { tau })
    }

    /// `β = 1/kT = 1/(τ|J|)`.
    pub fn beta(&self, j: f64) -> f64 {
        1.0 / (self.tau * j.abs())
    }
}

/// Boltzmann factors `exp(−β(E_i − E_min))` and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedWeights {
    pub factors: Vec<f64>,
    pub z_shifted: f64,
    pub e_min: f64,
}

pub fn shifted_boltzmann(energies: &[f64], beta: f64) -> ShiftedWeights {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let factors: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - e_min)).exp())
        .collect();
    let z_shifted = factors.iter().sum();
    ShiftedWeights {
        factors,
        z_shifted,
        e_min,
    }
}

#[derive(Debug, Clone)]
pub struct GibbsState {
    pub rho: ComplexMatrix,
    /// `Z · exp(β E_min)`.
    pub z_shifted: f64,
    pub e_min: f64,
}

/// `ρ = Σ_i exp(−β(E_i − E_min)) |φ_i><φ_i| / Z_shifted`.
pub fn gibbs_state(sys: &EigenSystem, tp: &ThermalParams) -> Result<GibbsState> {
    let tp = ThermalParams::new(tp.tau)?;
    let w = shifted_boltzmann(&sys.energies, tp.beta(sys.params.j));
    let probs: Vec<f64> = w.factors.iter().map(|f| f / w.z_shifted).collect();
    Ok(GibbsState {
        rho: ComplexMatrix::from_spectral(&probs, &sys.vector_matrix())?,
        z_shifted: w.z_shifted,
        e_min: w.e_min,
    })
}

/// Equal-weight mixture over the eigenstates within `degeneracy_tol·|J|` of
/// the ground energy; the `τ → 0` limit of [`gibbs_state`].
pub fn ground_state_mixture(sys: &EigenSystem, degeneracy_tol: f64) -> Result<GibbsState> {
    if !(degeneracy_tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "degeneracy tolerance must be positive, got {degeneracy_tol}"
        )));
    }
    let e_min = sys.ground_energy();
    let width = degeneracy_tol * sys.params.j.abs();
    let indicator: Vec<f64> = sys
        .energies
        .iter()
        .map(|&e| if e - e_min <= width { 1.0 } else { 0.0 })
        .collect();
    let count: f64 = indicator.iter().sum();
    let probs: Vec<f64> = indicator.iter().map(|x| x / count).collect();
    Ok(GibbsState {
        rho: ComplexMatrix::from_spectral(&probs, &sys.vector_matrix())?,
        z_shifted: count,
        e_min,
    })
}

/// A partition function carried as `Z = shifted · exp(−β·e_min)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionFunction {
    pub shifted: f64,
    pub e_min: f64,
    pub beta: f64,
}

impl PartitionFunction {
    pub fn ln(&self) -> f64 {
        self.shifted.ln() - self.beta * self.e_min
    }

    /// The plain value of `Z`, when it fits in an `f64`.
    pub fn unshifted(&self) -> Option<f64> {
        let z = self.ln().exp();
        (z.is_finite() && z > 0.0).then_some(z)
    }
}

fn ln1p_exp_neg(x: f64) -> f64 {
    // ln(1 + e^{-x}) for x >= 0
    (-x).exp().ln_1p()
}

/// The factorized closed-form partition function
/// `Z = 2(1 + e^{βJ}) cosh(βJB) + 2e^{−βJ/2}[cosh(βJB₊/2) + cosh(βJB₋/2)]`.
///
/// Each of the two groups is evaluated in log space as `β·L + c`, where `L`
/// is the energy that dominates the group and `c` an O(1) correction, so the
/// ground-energy shift can be applied to `L` before multiplying by `β`.
pub fn partition_function_closed(
    params: &ModelParams,
    tp: &ThermalParams,
) -> Result<PartitionFunction> {
    let tp = ThermalParams::new(tp.tau)?;
    let energies = closed_form_spectrum(params)?;
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let (j, b) = (params.j, params.b);
    let beta = tp.beta(j);
    let (bp, bm) = b_plus_minus(b);

    // 2(1 + e^{βJ}) cosh(βJB): ln = β(max(J,0) + |JB|) + ln1p(e^{-β|J|}) + ln1p(e^{-2β|JB|})
    let lead_1 = j.max(0.0) + (j * b).abs();
    let corr_1 = ln1p_exp_neg(beta * j.abs()) + ln1p_exp_neg(2.0 * beta * (j * b).abs());

    // 2e^{-βJ/2}[cosh(x) + cosh(y)], |x| >= |y|:
    // ln = -βJ/2 + |x| + ln1p(e^{-2|x|}) + ln1p(cosh(y)/cosh(x))
    let big = 0.5 * j.abs() * bp.max(bm);
    let small = 0.5 * j.abs() * bp.min(bm);
    let lead_2 = -0.5 * j + big;
    let (x, y) = (beta * big, beta * small);
    let ln_cosh_ratio = (y - x) + ln1p_exp_neg(2.0 * y) - ln1p_exp_neg(2.0 * x);
    let corr_2 = ln1p_exp_neg(2.0 * x) + ln_cosh_ratio.exp().ln_1p();

    let t1 = beta * (lead_1 + e_min) + corr_1;
    let t2 = beta * (lead_2 + e_min) + corr_2;
    let hi = t1.max(t2);
    let ln_shifted = hi + ((t1 - hi).exp() + (t2 - hi).exp()).ln();
    Ok(PartitionFunction {
        shifted: ln_shifted.exp(),
        e_min,
        beta,
    })
}

/// `½ Σ |eig(ρ − σ)|`.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let diff = (rho - sigma).hermitian_part();
    let eig = crate::linalg::hermitian_eigen(&diff)?;
    Ok(0.5 * eig.values.iter().map(|x| x.abs()).sum::<f64>())
}
