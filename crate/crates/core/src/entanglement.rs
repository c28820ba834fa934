//! Pairwise entanglement of the thermal state.
//!
//! Two routes are provided. The closed-form route assembles the five
//! independent entries of the reduced X-shaped density matrix straight from
//! the eigensystem and applies the X-state concurrence formula. The general
//! route takes any 4×4 density matrix and computes the Wootters concurrence
//! from its spin-flipped partner.
//!
//! Reduced matrices for a pair `(a, b)` with `a < b` use the basis
//! `|s_a s_b>`, `s_a` being the more significant bit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, pauli_y, psd_sqrt, ComplexMatrix};
use crate::model::{closed_form_eigensystem, EigenSystem, ModelParams};
use crate::thermal::{shifted_boltzmann, ThermalParams};

/// Tolerance for the X-state positivity and trace checks, relative to `z`.
pub const X_STATE_TOL: f64 = 1e-12;
const DENSITY_TRACE_TOL: f64 = 1e-9;
const DENSITY_HERMITIAN_TOL: f64 = 1e-10;

/// Which pair of ring sites to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    P12,
    P13,
    /// Equal to [`Pair::P13`] by the 1 ↔ 2 exchange symmetry.
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    /// One-based site labels.
    pub fn sites(self) -> (usize, usize) {
        match self {
            Pair::P12 => (1, 2),
            Pair::P13 => (1, 3),
            Pair::P23 => (2, 3),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.sites();
        write!(f, "{a}{b}")
    }
}

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "12" => Ok(Pair::P12),
            "13" => Ok(Pair::P13),
            "23" => Ok(Pair::P23),
            other => Err(Error::InvalidInput(format!(
                "pair must be one of 12, 13, 23 (got {other:?})"
            ))),
        }
    }
}

/// Unnormalized entries of an X-shaped two-qubit state
/// `(1/z)·[[u,0,0,0],[0,w1,y,0],[0,y,w2,0],[0,0,0,v]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XElements {
    pub u: f64,
    pub v: f64,
    pub w1: f64,
    pub w2: f64,
    pub y: f64,
    pub z: f64,
}

impl XElements {
    /// The normalized 4×4 density matrix.
    pub fn density_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::from_diagonal(&[
            self.u / self.z,
            self.w1 / self.z,
            self.w2 / self.z,
            self.v / self.z,
        ]);
        m[(1, 2)] = Complex64::new(self.y / self.z, 0.0);
        m[(2, 1)] = Complex64::new(self.y / self.z, 0.0);
        m
    }

    /// `(|y| − √(uv)) / z`; positive exactly when the pair is entangled.
    pub fn entanglement_margin(&self) -> f64 {
        (self.y.abs() - (self.u * self.v).sqrt()) / self.z
    }

    /// Checks positivity, unit trace and `|y| <= √(w1 w2)`.
    pub fn validate(&self) -> Result<()> {
        let Self { u, v, w1, w2, y, z } = *self;
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidXState(format!("normalizer z = {z}")));
        }
        let slack = X_STATE_TOL * z;
        if [u, v, w1, w2, y].iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidXState("non-finite element".into()));
        }
        if u < -slack || v < -slack || w1 < -slack || w2 < -slack {
            return Err(Error::InvalidXState(format!(
                "negative population (u={u}, v={v}, w1={w1}, w2={w2})"
            )));
        }
        if ((u + v + w1 + w2) - z).abs() > slack {
            return Err(Error::InvalidXState(format!(
                "u + v + w1 + w2 = {} but z = {z}",
                u + v + w1 + w2
            )));
        }
        let bound = (w1.max(0.0) * w2.max(0.0)).sqrt();
        if y.abs() > bound + slack {
            return Err(Error::InvalidXState(format!(
                "|y| = {} exceeds sqrt(w1 w2) = {bound}",
                y.abs()
            )));
        }
        Ok(())
    }
}

/// Reduces an `n`-qubit state to the two sites in `keep` (one-based, any
/// order) by summing over the remaining sites.
pub fn partial_trace(
    rho: &ComplexMatrix,
    n_sites: usize,
    keep: (usize, usize),
) -> Result<ComplexMatrix> {
    let (a, b) = (keep.0.min(keep.1), keep.0.max(keep.1));
    if a == b || a < 1 || b > n_sites {
        return Err(Error::BadSiteIndex(format!(
            "cannot keep sites {keep:?} of a {n_sites}-site register"
        )));
    }
    let dim = 1usize << n_sites;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{n_sites} sites need a {dim}x{dim} matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let shift_a = n_sites - a;
    let shift_b = n_sites - b;
    let kept_mask = (1usize << shift_a) | (1usize << shift_b);
    let traced_mask = (dim - 1) & !kept_mask;
    let local = |idx: usize| (((idx >> shift_a) & 1) << 1) | ((idx >> shift_b) & 1);

    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..dim {
        for j in 0..dim {
            if (i ^ j) & traced_mask == 0 {
                out[(local(i), local(j))] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Closed-form elements of the reduced state of sites 1 and 2.
///
/// Boltzmann factors are shifted by the ground energy, so `z` is the
/// shifted partition function.
pub fn reduced_elements_12(sys: &EigenSystem, tp: &ThermalParams) -> Result<XElements> {
    let tp = ThermalParams::new(tp.tau)?;
    let w = shifted_boltzmann(&sys.energies, tp.beta(sys.params.j));
    let e = &w.factors;
    let (n1, n4, n5, n6) = (sys.n1.powi(2), sys.n4.powi(2), sys.n5.powi(2), sys.n6.powi(2));
    let one_magnon = n1 * e[1] + n4 * e[4] + n5 * e[5] + n6 * e[6];
    let singlets = 0.5 * e[2] + 0.5 * e[3];
    let w_pop = one_magnon + singlets;
    Ok(XElements {
        u: e[0] + sys.a1.powi(2) * n1 * e[1] + sys.a5.powi(2) * n5 * e[5],
        v: e[7] + sys.a4.powi(2) * n4 * e[4] + sys.a6.powi(2) * n6 * e[6],
        w1: w_pop,
        w2: w_pop,
        y: one_magnon - singlets,
        z: w.z_shifted,
    })
}

/// Closed-form elements of the reduced state of sites 1 and 3.
pub fn reduced_elements_13(sys: &EigenSystem, tp: &ThermalParams) -> Result<XElements> {
    let tp = ThermalParams::new(tp.tau)?;
    let w = shifted_boltzmann(&sys.energies, tp.beta(sys.params.j));
    let e = &w.factors;
    let (a1, a4, a5, a6) = (sys.a1, sys.a4, sys.a5, sys.a6);
    let (n1, n4, n5, n6) = (sys.n1.powi(2), sys.n4.powi(2), sys.n5.powi(2), sys.n6.powi(2));
    Ok(XElements {
        u: e[0] + n1 * e[1] + 0.5 * e[2] + n5 * e[5],
        v: e[7] + 0.5 * e[3] + n4 * e[4] + n6 * e[6],
        w1: a1 * a1 * n1 * e[1] + 0.5 * e[3] + n4 * e[4] + a5 * a5 * n5 * e[5] + n6 * e[6],
        w2: n1 * e[1] + 0.5 * e[2] + a4 * a4 * n4 * e[4] + n5 * e[5] + a6 * a6 * n6 * e[6],
        y: a1 * n1 * e[1] + a4 * n4 * e[4] + a5 * n5 * e[5] + a6 * n6 * e[6],
        z: w.z_shifted,
    })
}

/// Closed-form elements for any pair; 2–3 reuses the 1–3 expressions.
pub fn reduced_elements(sys: &EigenSystem, tp: &ThermalParams, pair: Pair) -> Result<XElements> {
    match pair {
        Pair::P12 => reduced_elements_12(sys, tp),
        Pair::P13 | Pair::P23 => reduced_elements_13(sys, tp),
    }
}

/// `C = (2/z)·max{|y| − √(uv), 0}`.
pub fn concurrence_x(e: &XElements) -> Result<f64> {
    e.validate()?;
    let raw = 2.0 * (e.y.abs() - (e.u.max(0.0) * e.v.max(0.0)).sqrt()) / e.z;
    Ok(raw.max(0.0).min(1.0))
}

/// `σʸ⊗σʸ`, real in the computational basis.
fn spin_flip_operator() -> ComplexMatrix {
    kron(&pauli_y(), &pauli_y())
}

/// `ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = spin_flip_operator();
    &(&yy * &rho.conj()) * &yy
}

fn check_two_qubit_state(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::NotDensityMatrix(format!(
            "expected 4x4, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let herm = rho.hermiticity_deviation();
    if !(herm <= DENSITY_HERMITIAN_TOL) {
        return Err(Error::NotDensityMatrix(format!(
            "not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = rho.trace().re;
    if !((tr - 1.0).abs() <= DENSITY_TRACE_TOL) {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    Ok(())
}

/// The Wootters `λ_i` in descending order.
///
/// They are the singular values of `√ρ·√ρ̃`, read off as the non-negative
/// eigenvalues of the Hermitian dilation `[[0, A], [A^H, 0]]`. Working with
/// `A` directly rather than with `A·A^H = √ρ ρ̃ √ρ` keeps the small `λ_i`
/// accurate to machine precision instead of its square root.
pub fn wootters_lambdas(rho: &ComplexMatrix) -> Result<[f64; 4]> {
    check_two_qubit_state(rho)?;
    let sqrt_rho = psd_sqrt(&rho.hermitian_part()).map_err(|err| match err {
        Error::NotPositiveSemidefinite { min_eigenvalue } => Error::NotDensityMatrix(format!(
            "not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
        )),
        other => other,
    })?;
    let yy = spin_flip_operator();
    // √ρ̃ = (σʸ⊗σʸ) (√ρ)* (σʸ⊗σʸ); the trailing unitary does not change singular values
    let a = &(&sqrt_rho * &yy) * &sqrt_rho.conj();
    let a_adj = a.adjoint();
    let mut dilation = ComplexMatrix::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            dilation[(i, j + 4)] = a[(i, j)];
            dilation[(i + 4, j)] = a_adj[(i, j)];
        }
    }
    let eig = hermitian_eigen(&dilation.hermitian_part())?;
    let mut lambdas = [0.0; 4];
    for (slot, &x) in lambdas.iter_mut().zip(eig.values.iter().rev()) {
        *slot = x.max(0.0);
    }
    Ok(lambdas)
}

/// Wootters concurrence `max{λ1 − λ2 − λ3 − λ4, 0}` of a two-qubit state.
pub fn concurrence_general(rho: &ComplexMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0).min(1.0))
}

/// Thermal concurrence of `pair` via the closed-form elements.
pub fn concurrence_pair(params: &ModelParams, tp: &ThermalParams, pair: Pair) -> Result<f64> {
    let sys = closed_form_eigensystem(params)?;
    concurrence_x(&reduced_elements(&sys, tp, pair)?)
}

/// Zero-temperature limit of `C12` for a non-degenerate ground state:
/// 1 for `J > 0`, `2/(2 + a_4²)` for `J < 0`.
pub fn c12_zero_t_limit(params: &ModelParams) -> Result<f64> {
    if params.b == 0.0 {
        return Err(Error::DegenerateLimit);
    }
    if params.j > 0.0 {
        return Ok(1.0);
    }
    // C is even in B; at B < 0 the ground state is the mirror of φ_4.
    let sys = closed_form_eigensystem(&ModelParams {
        b: params.b.abs(),
        ..*params
    })?;
    Ok(2.0 / (2.0 + sys.a4 * sys.a4))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowTemperatureApprox {
    pub value: f64,
    /// Whether `10τ <= |B| <= 0.1`, where the approximation is meant to hold.
    pub in_regime: bool,
}

/// Low-temperature, weak-field approximation of ferromagnetic `C13`,
/// `(2/3)[1 − e^{B/3τ} / (1 + e^{2B/3τ})]`.
pub fn c13_low_t_approx(b: f64, tau: f64) -> LowTemperatureApprox {
    // e^{x}/(1 + e^{2x}) = 1/(2 cosh x)
    let x = b / (3.0 * tau);
    let value = 2.0 / 3.0 * (1.0 - 0.5 / x.cosh());
    let in_regime = tau > 0.0 && 10.0 * tau <= b.abs() && b.abs() <= 0.1;
    LowTemperatureApprox { value, in_regime }
}

/// Entanglement of formation `h((1 + √(1 − C²))/2)` with `h` the binary
/// entropy in bits.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange(c));
    }
    let x = 0.5 * (1.0 + (1.0 - c * c).sqrt());
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    Ok(h(x) + h(1.0 - x))
}
