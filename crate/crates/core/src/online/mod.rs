//! Online linear optimization: Follow the Leader, scripted adversaries and
//! regret certificates checked on the realized trace.

mod adversary;
mod ftl;
mod hints;
mod regret;

pub use adversary::{Adversary, AdversaryKind, NoisePattern, Schedule};
pub use ftl::{ftl_step, play_game, FtlLearner, GameTrace, Learner};
pub use hints::{hints_reduction, HintsReduction, HintsReport};
pub use regret::{
    log_estimate_check, nonneg_linearization, CERTIFICATES, regret_report, running_rows, Certificate,
    CertificateStatus, LogEstimate, Linearization, RegretParams, RegretReport, RunningRow,
};
