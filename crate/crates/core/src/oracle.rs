//! Brute-force reference pipeline and the harness comparing it with the
//! closed-form results.
//!
//! The numeric route builds the dense Hamiltonian, diagonalizes it with the
//! Jacobi solver, forms the Gibbs state from the numeric eigenpairs, traces
//! out one site by index summation and applies the general Wootters formula.
//! It shares nothing with the closed-form route except [`crate::linalg`].

use std::fmt;

use rayon::prelude::*;

use crate::entanglement::{
    concurrence_general, concurrence_x, partial_trace, reduced_elements, Pair,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::model::{build_hamiltonian, closed_form_eigensystem, EigenSystem, ModelParams};
use crate::thermal::{partition_function_closed, ThermalParams};

pub const SPECTRUM_TOL: f64 = 1e-10;
pub const Z_REL_TOL: f64 = 1e-12;
pub const ELEMENTS_TOL: f64 = 1e-10;
pub const CONCURRENCE_TOL: f64 = 1e-9;

/// Thermal state obtained by dense diagonalization.
#[derive(Debug, Clone)]
pub struct NumericThermalState {
    pub hamiltonian: ComplexMatrix,
    /// Ascending numeric eigenvalues.
    pub energies: Vec<f64>,
    pub rho: ComplexMatrix,
    pub z_shifted: f64,
    pub e_min: f64,
}

pub fn numeric_thermal_state(params: &ModelParams, tp: &ThermalParams) -> Result<NumericThermalState> {
    let tp = ThermalParams::new(tp.tau)?;
    let hamiltonian = build_hamiltonian(params, &params.impurity_fields())?;
    let eig = hermitian_eigen(&hamiltonian)?;
    let beta = 1.0 / (tp.tau * params.j.abs());
    let e_min = eig.values[0];
    let factors: Vec<f64> = eig
        .values
        .iter()
        .map(|&e| (-beta * (e - e_min)).exp())
        .collect();
    let z_shifted: f64 = factors.iter().sum();
    let probs: Vec<f64> = factors.iter().map(|f| f / z_shifted).collect();
    let rho = ComplexMatrix::from_spectral(&probs, &eig.vectors)?;
    Ok(NumericThermalState {
        hamiltonian,
        energies: eig.values,
        rho,
        z_shifted,
        e_min,
    })
}

/// Numeric two-site reduced state; pair 2–3 is traced out explicitly.
pub fn numeric_reduced_state(params: &ModelParams, tp: &ThermalParams, pair: Pair) -> Result<ComplexMatrix> {
    let state = numeric_thermal_state(params, tp)?;
    partial_trace(&state.rho, params.n_sites, pair.sites())
}

pub fn numeric_concurrence(params: &ModelParams, tp: &ThermalParams, pair: Pair) -> Result<f64> {
    concurrence_general(&numeric_reduced_state(params, tp, pair)?)
}

/// Cartesian parameter grid; points are enumerated with `J` outermost,
/// then `B`, then `τ`, then the pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub j_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    pub pairs: Vec<Pair>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            j_values: vec![1.0, -1.0],
            b_values: vec![0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0],
            tau_values: vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0],
            pairs: vec![Pair::P12, Pair::P13],
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &j in &self.j_values {
            for &b in &self.b_values {
                for &tau in &self.tau_values {
                    for &pair in &self.pairs {
                        out.push(GridPoint { j, b, tau, pair });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.j_values.len() * self.b_values.len() * self.tau_values.len() * self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn describe(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let pairs: Vec<String> = self.pairs.iter().map(Pair::to_string).collect();
        format!(
            "J ∈ {{{}}}, B ∈ {{{}}}, tau ∈ {{{}}}, pairs {{{}}} ({} points)",
            list(&self.j_values),
            list(&self.b_values),
            list(&self.tau_values),
            pairs.join(", "),
            self.len()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub j: f64,
    pub b: f64,
    pub tau: f64,
    pub pair: Pair,
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(J={}, B={}, tau={}, pair {})",
            self.j, self.b, self.tau, self.pair
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointDeviation {
    pub point: GridPoint,
    /// Energies as multisets, together with the closed-form eigenvector residual.
    pub spectrum: f64,
    /// Relative deviation of the shifted partition functions.
    pub partition_function: f64,
    /// Entrywise deviation of the reduced density matrices.
    pub elements: f64,
    pub concurrence: f64,
    pub closed_concurrence: f64,
    pub oracle_concurrence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Spectrum,
    PartitionFunction,
    Elements,
    Concurrence,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Spectrum,
        Quantity::PartitionFunction,
        Quantity::Elements,
        Quantity::Concurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Spectrum => "spectrum",
            Quantity::PartitionFunction => "partition function (rel)",
            Quantity::Elements => "reduced elements",
            Quantity::Concurrence => "concurrence",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Quantity::Spectrum => SPECTRUM_TOL,
            Quantity::PartitionFunction => Z_REL_TOL,
            Quantity::Elements => ELEMENTS_TOL,
            Quantity::Concurrence => CONCURRENCE_TOL,
        }
    }

    fn of(self, d: &PointDeviation) -> f64 {
        match self {
            Quantity::Spectrum => d.spectrum,
            Quantity::PartitionFunction => d.partition_function,
            Quantity::Elements => d.elements,
            Quantity::Concurrence => d.concurrence,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub grid: String,
    /// One entry per grid point, in grid order.
    pub points: Vec<PointDeviation>,
}

impl CrossCheckReport {
    /// Worst point for a quantity; NaN deviations rank as worst.
    pub fn worst(&self, q: Quantity) -> Option<&PointDeviation> {
        self.points.iter().max_by(|a, b| {
            let (x, y) = (q.of(a), q.of(b));
            match (x.is_nan(), y.is_nan()) {
                (true, false) => std::cmp::Ordering::Greater,
                (false, true) => std::cmp::Ordering::Less,
                _ => x.total_cmp(&y),
            }
        })
    }

    /// Fails with the worst offender of the first quantity out of tolerance.
    pub fn verify(&self) -> Result<()> {
        for q in Quantity::ALL {
            if let Some(d) = self.worst(q) {
                let dev = q.of(d);
                if !(dev <= q.tolerance()) {
                    return Err(Error::ToleranceExceeded {
                        quantity: q.name(),
                        point: d.point.to_string(),
                        deviation: dev,
                        tolerance: q.tolerance(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn passed(&self) -> bool {
        self.verify().is_ok()
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "grid: {}", self.grid)?;
        for q in Quantity::ALL {
            if let Some(d) = self.worst(q) {
                let dev = q.of(d);
                let verdict = if dev <= q.tolerance() { "ok" } else { "FAIL" };
                writeln!(
                    f,
                    "  {:<26} max {:>10.3e}  tol {:>8.1e}  {:<4}  at {}",
                    q.name(),
                    dev,
                    q.tolerance(),
                    verdict,
                    d.point
                )?;
            }
        }
        write!(
            f,
            "result: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn compare_point<F>(point: GridPoint, closed_form: &F) -> Result<PointDeviation>
where
    F: Fn(&ModelParams) -> Result<EigenSystem>,
{
    let params = ModelParams::new(point.j, point.b)?;
    let tp = ThermalParams::new(point.tau)?;
    let sys = closed_form(&params)?;
    let numeric = numeric_thermal_state(&params, &tp)?;

    let spectrum = sorted(&sys.energies)
        .iter()
        .zip(&numeric.energies)
        .map(|(a, b)| (a - b).abs())
        .fold(sys.max_residual(&numeric.hamiltonian), f64::max);

    let z_closed = partition_function_closed(&params, &tp)?;
    let partition_function = (z_closed.shifted - numeric.z_shifted).abs() / numeric.z_shifted;

    let elements = reduced_elements(&sys, &tp, point.pair)?;
    let reduced = partial_trace(&numeric.rho, params.n_sites, point.pair.sites())?;
    let elements_dev = elements.density_matrix().max_abs_diff(&reduced);

    let closed_concurrence = concurrence_x(&elements)?;
    let oracle_concurrence = concurrence_general(&reduced)?;

    Ok(PointDeviation {
        point,
        spectrum,
        partition_function,
        elements: elements_dev,
        concurrence: (closed_concurrence - oracle_concurrence).abs(),
        closed_concurrence,
        oracle_concurrence,
    })
}

/// Evaluates every grid point against a supplied closed-form eigensystem
/// provider. Points run in parallel; the report keeps grid order.
pub fn evaluate_grid<F>(grid: &Grid, closed_form: F) -> Result<CrossCheckReport>
where
    F: Fn(&ModelParams) -> Result<EigenSystem> + Sync,
{
    let points = grid
        .points()
        .into_par_iter()
        .map(|p| compare_point(p, &closed_form))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossCheckReport {
        grid: grid.describe(),
        points,
    })
}

/// Cross-checks the closed-form pipeline against the numeric one and fails
/// with [`Error::ToleranceExceeded`] on the worst offender.
pub fn cross_check(grid: &Grid) -> Result<CrossCheckReport> {
    let report = evaluate_grid(grid, closed_form_eigensystem)?;
    report.verify()?;
    Ok(report)
}

const THRESHOLD_SCAN_STEPS: usize = 2000;
const THRESHOLD_BISECTION_WIDTH: f64 = 1e-10;

/// Largest temperature in `tau_range` at which the pair stops being
/// entangled, located by bisection on the sign of `|y| − √(uv)`.
pub fn threshold_scan(params: &ModelParams, pair: Pair, tau_range: (f64, f64)) -> Result<f64> {
    threshold_scan_with(params, pair, tau_range, THRESHOLD_SCAN_STEPS)
}

pub fn threshold_scan_with(
    params: &ModelParams,
    pair: Pair,
    tau_range: (f64, f64),
    steps: usize,
) -> Result<f64> {
    let (lo, hi) = tau_range;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || steps == 0 {
        return Err(Error::InvalidInput(format!(
            "bad temperature range ({lo}, {hi}) with {steps} steps"
        )));
    }
    let sys = closed_form_eigensystem(params)?;
    let margin = |tau: f64| -> Result<f64> {
        Ok(reduced_elements(&sys, &ThermalParams::new(tau)?, pair)?.entanglement_margin())
    };

    let taus: Vec<f64> = (0..=steps)
        .map(|k| lo + (hi - lo) * k as f64 / steps as f64)
        .collect();
    let margins = taus.iter().map(|&t| margin(t)).collect::<Result<Vec<_>>>()?;

    let bracket = (0..steps)
        .rev()
        .find(|&k| margins[k] > 0.0 && margins[k + 1] <= 0.0)
        .ok_or(Error::NoThresholdFound)?;
    let (mut a, mut b) = (taus[bracket], taus[bracket + 1]);
    while b - a > THRESHOLD_BISECTION_WIDTH {
        let mid = 0.5 * (a + b);
        if margin(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence_pair;

    fn tp(tau: f64) -> ThermalParams {
        ThermalParams::new(tau).unwrap()
    }

    #[test]
    fn numeric_matches_closed_at_reference_point() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let a = numeric_concurrence(&p, &tp(0.5), Pair::P12).unwrap();
        let b = concurrence_pair(&p, &tp(0.5), Pair::P12).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn numeric_high_temperature_is_separable() {
        let p = ModelParams::new(-1.0, 3.0).unwrap();
        for pair in Pair::ALL {
            assert_eq!(numeric_concurrence(&p, &tp(1e6), pair).unwrap(), 0.0);
        }
    }

    #[test]
    fn numeric_low_temperature_singlet() {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        let c = numeric_concurrence(&p, &tp(0.01), Pair::P12).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn default_grid_size() {
        let g = Grid::default();
        assert_eq!(g.len(), 196);
        assert_eq!(g.points().len(), 196);
        assert_eq!(
            g.points()[0],
            GridPoint { j: 1.0, b: 0.0, tau: 0.05, pair: Pair::P12 }
        );
    }

    #[test]
    fn cross_check_default_grid_passes() {
        let report = cross_check(&Grid::default()).unwrap();
        assert_eq!(report.points.len(), 196);
        for (p, q) in report.points.iter().zip(Grid::default().points()) {
            assert_eq!(p.point, q);
        }
    }

    #[test]
    fn cross_check_detects_corrupted_energy() {
        let corrupted = |p: &ModelParams| -> Result<EigenSystem> {
            let mut sys = closed_form_eigensystem(p)?;
            sys.energies[5] += 1e-3;
            Ok(sys)
        };
        let grid = Grid {
            b_values: vec![1.0],
            tau_values: vec![0.5],
            ..Grid::default()
        };
        let report = evaluate_grid(&grid, corrupted).unwrap();
        match report.verify() {
            Err(Error::ToleranceExceeded { quantity, .. }) => assert_eq!(quantity, "spectrum"),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn pair_23_is_traced_separately() {
        let p = ModelParams::new(-1.0, 0.5).unwrap();
        let r13 = numeric_reduced_state(&p, &tp(0.3), Pair::P13).unwrap();
        let r23 = numeric_reduced_state(&p, &tp(0.3), Pair::P23).unwrap();
        let r12 = numeric_reduced_state(&p, &tp(0.3), Pair::P12).unwrap();
        assert!(r13.max_abs_diff(&r23) < 1e-12);
        assert!(r13.max_abs_diff(&r12) > 1e-3);
    }

    #[test]
    fn zero_field_threshold() {
        let p = ModelParams::new(-1.0, 0.0).unwrap();
        let t = threshold_scan(&p, Pair::P12, (0.05, 3.0)).unwrap();
        // x^3 - 3x - 4 = 0 by Cardano, tau* = 1/ln x
        let x = (2.0 + 3f64.sqrt()).cbrt() + (2.0 - 3f64.sqrt()).cbrt();
        assert!((x.powi(3) - 3.0 * x - 4.0).abs() < 1e-12);
        assert!((t - 1.0 / x.ln()).abs() < 1e-6, "{t}");
        let refined = threshold_scan_with(&p, Pair::P12, (0.05, 3.0), 4000).unwrap();
        assert!((t - refined).abs() < 1e-6);
    }

    #[test]
    fn zero_field_antiferromagnet_has_no_threshold() {
        let p = ModelParams::new(1.0, 0.0).unwrap();
        assert_eq!(
            threshold_scan(&p, Pair::P12, (0.05, 3.0)),
            Err(Error::NoThresholdFound)
        );
    }

    #[test]
    fn strong_field_threshold() {
        let p = ModelParams::new(1.0, 10.0).unwrap();
        let t = threshold_scan(&p, Pair::P12, (0.05, 10.0)).unwrap();
        // independent dense diagonalization with root bracketing
        assert!((t - 1.0790359).abs() < 1e-6, "{t}");
        let below = concurrence_pair(&p, &tp(t - 1e-4), Pair::P12).unwrap();
        let above = concurrence_pair(&p, &tp(t + 1e-4), Pair::P12).unwrap();
        assert!(below > 0.0);
        assert_eq!(above, 0.0);
    }

    #[test]
    fn threshold_rejects_bad_range() {
        let p = ModelParams::new(1.0, 0.0).unwrap();
        assert!(matches!(
            threshold_scan(&p, Pair::P12, (1.0, 0.5)),
            Err(Error::InvalidInput(_))
        ));
    }
}
