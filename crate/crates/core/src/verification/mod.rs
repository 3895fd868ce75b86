//! Checks that the eliminated solver is the intended scheme and that it
//! behaves as claimed: refinement studies, the discrete a priori bound, a
//! dense coupled reference step, and the ABC-versus-large-domain comparison.

mod audit;
mod convergence;
mod oracle;
mod truncation;

pub use audit::{stability_audit, AuditRow, StabilityAudit};
pub use convergence::{
    convergence_study, ladder, max_node_error, AbcSettings, ConvergenceEntry, ConvergenceReport, RefinementMode,
};
pub use oracle::{dense_oracle_step, scheme_residuals, SchemeResiduals};
pub use truncation::{
    dirichlet_profiles, domain_truncation_compare, TruncationComparison, TruncationRow, TruncationSettings,
};
