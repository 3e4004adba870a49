//! Measurements on integrators: trajectories and energy errors, successive
//! errors and convergence slopes, symmetry and symplecticity defects, and
//! leading-term extraction for linear methods.

mod convergence;
mod defects;
mod fit;
mod trajectory;

pub use convergence::{
    final_energy_error, steps_for, successive_error, successive_errors, sweep, SweepPoint,
    STEP_COUNT_TOLERANCE,
};
pub use defects::{
    defect_report, determinant_fit, ho_table_row, jacobian, matrix_defect_report,
    symmetry_defect, symmetry_matrix_fit, symplectic_form_defect, symplecticity_defect,
    truncation_matrix_fit, DefectReport, HoTableRow, JACOBIAN_STEP,
};
pub use fit::{
    leading_term, order_slope, power_law_fit, windowed_power_law_fit, LeadingTerm, PowerLawFit,
    WINDOW_LOG_RESIDUAL,
};
pub use trajectory::{
    energy_error_series, integrate, propagate, secular_drift_rate, signed_energy_error_series,
    Observable, Trajectory,
};

/// Roundoff committed per step, relative to the solution size.
pub const ROUNDOFF: f64 = 1e-15;

/// Noise floor of quantities measured from single evaluations, such as the
/// entries of a method's matrix.
pub const EVALUATION_FLOOR: f64 = 100.0 * ROUNDOFF;

/// Roundoff accumulated over `n_steps` steps on a solution of size `scale`,
/// assuming it grows linearly.
pub fn accumulated_roundoff(scale: f64, n_steps: usize) -> f64 {
    ROUNDOFF * scale.max(1e-300) * n_steps as f64
}
