//! Intermittent-communication execution and trace audits.

mod audit;
mod engine;
mod export;
mod progress_check;

pub use audit::{
    audit_s_budget, audit_zero_respecting, track_s_budget, AuditReport, SBudgetAudit,
    SBudgetAuditor, Violation, ZeroRespectingAudit, ZeroRespectingAuditor,
};
pub use engine::{run, run_spec, AlgorithmSpec, AuditFlags, SimConfig};
pub use export::{run_result_json, trace_csv, write_trace_header, write_trace_rows, TRACE_HEADER};
pub use progress_check::{empirical_progress_check, s_budget_samples};
