//! The XX ring with a z-field impurity on site 3.
//!
//! `H = (J/2) Σ_i (σˣ_i σˣ_{i+1} + σʸ_i σʸ_{i+1}) + BJ·σᶻ_3` on a three-site ring.
//! The closed-form spectrum and eigenvectors live here together with a
//! generic dense Hamiltonian builder used by the numeric cross-check.
//!
//! Basis convention: site 1 is the leftmost tensor factor and the most
//! significant bit, `|abc>` has index `4a + 2b + c`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{embed, pauli_x, pauli_y, pauli_z, ComplexMatrix};

/// Number of sites of the closed-form model.
pub const RING_SITES: usize = 3;
/// Supported range for the dense builder.
pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Exchange coupling; sets the energy unit. Positive is antiferromagnetic.
    pub j: f64,
    /// Dimensionless impurity strength; the physical field is `b * j`.
    pub b: f64,
    pub n_sites: usize,
}

impl ModelParams {
    /// Three-site ring with coupling `j` and impurity strength `b`.
    pub fn new(j: f64, b: f64) -> Result<Self> {
        Self::with_sites(j, b, RING_SITES)
    }

    pub fn with_sites(j: f64, b: f64, n_sites: usize) -> Result<Self> {
        if j == 0.0 || !j.is_finite() {
            return Err(Error::InvalidCoupling(j));
        }
        if !b.is_finite() {
            return Err(Error::InvalidInput(format!("field strength {b} is not finite")));
        }
        if !(MIN_SITES..=MAX_SITES).contains(&n_sites) {
            return Err(Error::UnsupportedSize(n_sites));
        }
        Ok(Self { j, b, n_sites })
    }

    /// Same coupling, field `-b`.
    pub fn negated_field(&self) -> Self {
        Self { b: -self.b, ..*self }
    }

    /// Per-site z-fields reproducing the closed-form model in the
    /// `σᶻ = diag(1, -1)` basis used by [`build_hamiltonian`].
    ///
    /// The closed-form eigenstates place `|000>` at energy `-BJ`, so the
    /// impurity acts with `σᶻ|0> = -|0>`; in this crate's basis that is a
    /// field of `-B·J` on the last site.
    pub fn impurity_fields(&self) -> Vec<f64> {
        let mut fields = vec![0.0; self.n_sites];
        fields[self.n_sites - 1] = -self.b * self.j;
        fields
    }

    fn require_ring(&self) -> Result<()> {
        if self.n_sites != RING_SITES {
            return Err(Error::UnsupportedSize(self.n_sites));
        }
        Ok(())
    }
}

/// Dense `2^n × 2^n` Hamiltonian `(J/2) Σ_cyclic (σˣσˣ + σʸσʸ) + Σ_i fields[i] σᶻ_i`.
///
/// The cyclic sum runs over `i = 1..=n` with `i + 1` taken mod `n`, so a
/// two-site ring counts its single bond twice.
pub fn build_hamiltonian(params: &ModelParams, fields: &[f64]) -> Result<ComplexMatrix> {
    let n = params.n_sites;
    if !(MIN_SITES..=MAX_SITES).contains(&n) {
        return Err(Error::UnsupportedSize(n));
    }
    if fields.len() != n {
        return Err(Error::BadFieldLength {
            expected: n,
            got: fields.len(),
        });
    }
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    let half_j = Complex64::new(params.j / 2.0, 0.0);
    for i in 0..n {
        let k = (i + 1) % n;
        let xx = embed(&[(i, &x), (k, &x)], n);
        let yy = embed(&[(i, &y), (k, &y)], n);
        h = &h + &(&xx + &yy).scale(half_j);
    }
    for (i, &f) in fields.iter().enumerate() {
        if f != 0.0 {
            h = &h + &embed(&[(i, &z)], n).scale(Complex64::new(f, 0.0));
        }
    }
    Ok(h)
}

/// `(B₊, B₋) = ((4B² + 4B + 9)^½, (4B² − 4B + 9)^½)`.
pub fn b_plus_minus(b: f64) -> (f64, f64) {
    let base = 4.0 * b * b + 9.0;
    ((base + 4.0 * b).sqrt(), (base - 4.0 * b).sqrt())
}

/// Closed-form energies `E_0..E_7`.
///
/// At `B = 0` these are simply the degenerate values of the same formulas.
pub fn closed_form_spectrum(params: &ModelParams) -> Result<[f64; 8]> {
    params.require_ring()?;
    let (j, b) = (params.j, params.b);
    let (bp, bm) = b_plus_minus(b);
    Ok([
        -j * b,
        0.5 * j * (1.0 + bm),
        -j * (1.0 + b),
        -j * (1.0 - b),
        0.5 * j * (1.0 + bp),
        0.5 * j * (1.0 - bm),
        0.5 * j * (1.0 - bp),
        j * b,
    ])
}

/// Closed-form eigenpairs of the impurity ring.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub params: ModelParams,
    /// `E_0..E_7` in the same energy unit as `params.j`.
    pub energies: [f64; 8],
    pub b_plus: f64,
    pub b_minus: f64,
    pub a1: f64,
    pub a4: f64,
    pub a5: f64,
    pub a6: f64,
    pub n1: f64,
    pub n4: f64,
    pub n5: f64,
    pub n6: f64,
    /// `|φ_0>..|φ_7>` in the computational basis.
    pub vectors: [Vec<Complex64>; 8],
}

impl EigenSystem {
    pub fn ground_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Eigenvectors as the columns of an 8×8 matrix.
    pub fn vector_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors).expect("eight 8-vectors")
    }

    /// `max_i |H φ_i − E_i φ_i|_∞`.
    pub fn max_residual(&self, h: &ComplexMatrix) -> f64 {
        self.vectors
            .iter()
            .zip(&self.energies)
            .map(|(v, &e)| {
                h.mat_vec(v)
                    .iter()
                    .zip(v)
                    .map(|(hv, x)| (hv - x * e).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max |<φ_i|φ_k> − δ_ik|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = self.vector_matrix();
        (&v.adjoint() * &v).max_abs_diff(&ComplexMatrix::identity(8))
    }
}

fn ket(bits: &str) -> Vec<Complex64> {
    let idx = usize::from_str_radix(bits, 2).expect("binary label");
    let mut v = vec![Complex64::new(0.0, 0.0); 8];
    v[idx] = Complex64::new(1.0, 0.0);
    v
}

fn combine(terms: &[(f64, &str)]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 8];
    for &(coef, bits) in terms {
        for (x, k) in v.iter_mut().zip(ket(bits)) {
            *x += k * coef;
        }
    }
    v
}

/// Roots `(positive, negative)` of `a² + p·a − 2 = 0` given `disc = √(p² + 8)`,
/// each taken from the branch that avoids cancellation.
fn amplitude_roots(p: f64, disc: f64) -> (f64, f64) {
    if p >= 0.0 {
        let neg = -0.5 * (p + disc);
        (-2.0 / neg, neg)
    } else {
        let pos = 0.5 * (disc - p);
        (pos, -2.0 / pos)
    }
}

fn norm_for(a: f64) -> f64 {
    (2.0 + a * a).sqrt().recip()
}

/// Full closed-form eigensystem with real amplitudes.
pub fn closed_form_eigensystem(params: &ModelParams) -> Result<EigenSystem> {
    let energies = closed_form_spectrum(params)?;
    let b = params.b;
    let (b_plus, b_minus) = b_plus_minus(b);
    // a_1, a_5 = -1/2 ± B₋/2 + B and a_4, a_6 = -1/2 ± B₊/2 - B
    let (a1, a5) = amplitude_roots(1.0 - 2.0 * b, b_minus);
    let (a4, a6) = amplitude_roots(1.0 + 2.0 * b, b_plus);
    let (n1, n4, n5, n6) = (norm_for(a1), norm_for(a4), norm_for(a5), norm_for(a6));
    let r = std::f64::consts::FRAC_1_SQRT_2;

    let vectors = [
        ket("000"),
        combine(&[(n1, "100"), (n1, "010"), (n1 * a1, "001")]),
        combine(&[(r, "010"), (-r, "100")]),
        combine(&[(r, "101"), (-r, "011")]),
        combine(&[(n4 * a4, "110"), (n4, "101"), (n4, "011")]),
        combine(&[(n5, "100"), (n5, "010"), (n5 * a5, "001")]),
        combine(&[(n6 * a6, "110"), (n6, "101"), (n6, "011")]),
        ket("111"),
    ];

    Ok(EigenSystem {
        params: *params,
        energies,
        b_plus,
        b_minus,
        a1,
        a4,
        a5,
        a6,
        n1,
        n4,
        n5,
        n6,
        vectors,
    })
}

/// Index map `i -> k` with `E_i(+B) = E_k(-B)`.
pub const B_NEGATION_PERMUTATION: [usize; 8] = [7, 4, 3, 2, 1, 6, 5, 0];
const MAPPING_TOL: f64 = 1e-12;

/// Checks the `B ↔ −B` relabelling of energies and amplitudes and returns
/// the energy permutation.
pub fn spectrum_b_negation_map(plus: &EigenSystem, minus: &EigenSystem) -> Result<[usize; 8]> {
    if plus.params.j != minus.params.j || plus.params.b != -minus.params.b {
        return Err(Error::InvalidInput(format!(
            "expected systems at (J, B) and (J, -B), got ({}, {}) and ({}, {})",
            plus.params.j, plus.params.b, minus.params.j, minus.params.b
        )));
    }
    let mut worst = (String::new(), 0.0_f64);
    let mut track = |label: String, dev: f64| {
        if !(dev <= worst.1) {
            worst = (label, dev);
        }
    };
    for (i, &k) in B_NEGATION_PERMUTATION.iter().enumerate() {
        track(
            format!("E_{i} <-> E_{k}"),
            (plus.energies[i] - minus.energies[k]).abs(),
        );
    }
    let amps = [
        ("a_1 <-> a_4", plus.a1, minus.a4),
        ("a_4 <-> a_1", plus.a4, minus.a1),
        ("a_5 <-> a_6", plus.a5, minus.a6),
        ("a_6 <-> a_5", plus.a6, minus.a5),
    ];
    for (label, x, y) in amps {
        track(label.to_string(), (x - y).abs());
    }
    if worst.1 > MAPPING_TOL {
        return Err(Error::MappingViolation {
            pair: worst.0,
            deviation: worst.1,
        });
    }
    Ok(B_NEGATION_PERMUTATION)
}
