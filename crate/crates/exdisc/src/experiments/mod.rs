//! Named end-to-end scenarios binding grids, operators and spectral
//! measurements to pass/fail criteria with pinned tolerances.

pub mod biharmonic;
pub mod config;
pub mod krein_identity;
pub mod negligibility;
pub mod report;
pub mod union;
pub mod weyl;

pub use biharmonic::run_biharmonic;
pub use config::{ExperimentConfig, ExperimentKind};
pub use krein_identity::run_krein_identity;
pub use negligibility::run_negligibility;
pub use report::{CriterionResult, ExperimentReport};
pub use union::run_union;
pub use weyl::run_weyl;

use crate::error::Result;

/// Runs the experiment selected by the configuration's kind.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.kind {
        ExperimentKind::KreinIdentity => run_krein_identity(cfg),
        ExperimentKind::Weyl => run_weyl(cfg),
        ExperimentKind::Negligibility => run_negligibility(cfg),
        ExperimentKind::Union => run_union(cfg),
        ExperimentKind::Biharmonic => run_biharmonic(cfg),
    }
}
