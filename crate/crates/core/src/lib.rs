//! Thermal pairwise entanglement of the three-qubit XX ring with a z-field
//! impurity on one site.
//!
//! The closed-form route ([`model`], [`thermal`], [`entanglement`]) evaluates
//! the analytic spectrum, Gibbs weights and reduced-state elements. The
//! [`oracle`] module recomputes everything by dense diagonalization and
//! compares the two.

pub mod cli;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod sweep;
pub mod thermal;

pub use entanglement::{
    c12_zero_t_limit, c13_low_t_approx, concurrence_general, concurrence_pair, concurrence_x,
    eof_from_concurrence, partial_trace, reduced_elements, reduced_elements_12,
    reduced_elements_13, Pair, XElements,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eigen, kron, psd_sqrt, ComplexMatrix, EigenDecomposition};
pub use model::{
    b_plus_minus, build_hamiltonian, closed_form_eigensystem, closed_form_spectrum,
    spectrum_b_negation_map, EigenSystem, ModelParams,
};
pub use oracle::{cross_check, numeric_concurrence, threshold_scan, CrossCheckReport, Grid};
pub use thermal::{
    gibbs_state, ground_state_mixture, partition_function_closed, GibbsState, ThermalParams,
};
