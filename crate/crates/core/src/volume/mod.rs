//! Volume-profile comparison: `F` and its derivatives, the `F₀`/`G₀`
//! comparison, the ODI, the `φ_λ` window, the kernel integral scan,
//! and the distance-Laplacian envelope.

mod comparison;
mod envelope;
mod profile;

pub use comparison::{
    comparison_trace, default_lambda_grid, kernel_integral_scan, kernel_integral, kernel_f, kernel_i1,
    kernel_i2_bound, log_grid, odi_residual, odi_sides, phi, phi_derivative, phi_window_check,
    profile_f, profile_f_all, profile_f_with, t_lambda, ComparisonTrace, FValues, KernelIntegralPoint,
    KernelIntegralScan, Sign, TraceRow, WindowReport, RELATION_TOLERANCE, WINDOW_RELATIVE_SLACK,
};
pub use envelope::{
    growth_condition_check, laplacian_envelope_check, EnvelopeInput, EnvelopeReport, GrowthCheck,
};
pub use profile::{Invariant, ProfileKind, ValidationReport, Violation, VolumeProfile};
