//! Trace audits: the S-budget recursion, zero-respecting supports, and the
//! progress-versus-budget comparison.

use crate::error::{Error, Result};
use crate::progress::support;
use crate::types::{Outcome, TraceEntry};
use serde::{Deserialize, Serialize};

/// Where an audit first failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub machine: usize,
    pub round: usize,
    pub k: usize,
}

impl Violation {
    fn of(e: &TraceEntry) -> Self {
        Violation {
            machine: e.machine,
            round: e.round,
            k: e.k,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroRespectingAudit {
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
}

impl ZeroRespectingAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `prog <= s_budget`, checked only where the information set holds no
/// `Z2` draw; the inequality is only promised on that event.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SBudgetAudit {
    pub checked: usize,
    pub excluded: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
    pub max_s_budget: usize,
}

impl SBudgetAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_respecting: Option<ZeroRespectingAudit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_budget: Option<SBudgetAudit>,
}

fn check_order(prev: Option<(usize, usize, usize)>, e: &TraceEntry) -> Result<()> {
    let cur = (e.round, e.machine, e.k);
    if prev.is_some_and(|p| p >= cur) {
        return Err(Error::InvalidParameter(format!(
            "trace must be sorted by (round, machine, k); got {cur:?} after {prev:?}"
        )));
    }
    Ok(())
}

/// Online zero-respecting checker; entries must arrive ordered by
/// `(round, machine, k)`.
#[derive(Clone, Debug)]
pub struct ZeroRespectingAuditor {
    seen_before_round: Vec<bool>,
    seen_this_round: Vec<bool>,
    local: Vec<bool>,
    position: Option<(usize, usize, usize)>,
    report: ZeroRespectingAudit,
}

impl ZeroRespectingAuditor {
    pub fn new(dim: usize) -> Self {
        ZeroRespectingAuditor {
            seen_before_round: vec![false; dim],
            seen_this_round: vec![false; dim],
            local: vec![false; dim],
            position: None,
            report: ZeroRespectingAudit::default(),
        }
    }

    pub fn feed(&mut self, e: &TraceEntry) -> Result<()> {
        check_order(self.position, e)?;
        let (round, machine) = match self.position {
            Some((r, m, _)) => (Some(r), Some(m)),
            None => (None, None),
        };
        if round != Some(e.round) {
            for (a, b) in self
                .seen_before_round
                .iter_mut()
                .zip(&mut self.seen_this_round)
            {
                *a |= *b;
                *b = false;
            }
        }
        if round != Some(e.round) || machine != Some(e.machine) {
            self.local.clone_from(&self.seen_before_round);
        }
        self.position = Some((e.round, e.machine, e.k));

        self.report.checked += 1;
        let ok = support(&e.query)
            .into_iter()
            .all(|j| self.local.get(j - 1).copied().unwrap_or(false));
        if !ok {
            self.report.violations += 1;
            self.report.first_violation.get_or_insert(Violation::of(e));
        }
        for j in support(&e.gradient) {
            if let Some(slot) = self.local.get_mut(j - 1) {
                *slot = true;
            }
            if let Some(slot) = self.seen_this_round.get_mut(j - 1) {
                *slot = true;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> ZeroRespectingAudit {
        self.report
    }
}

/// Checks every query's support against the supports of the gradients
/// available to its machine: all machines' answers from earlier rounds and
/// its own earlier answers this round.
pub fn audit_zero_respecting(trace: &[TraceEntry]) -> Result<ZeroRespectingAudit> {
    let dim = trace
        .iter()
        .map(|e| e.query.dim().max(e.gradient.dim()))
        .max()
        .unwrap_or(0);
    let mut a = ZeroRespectingAuditor::new(dim);
    for e in trace {
        a.feed(e)?;
    }
    Ok(a.finish())
}

/// Fill `s_budget` for one round's entries (sorted by machine, then k) given
/// the carried-over count from earlier rounds. Returns the largest per-machine
/// `Z1` count in this round.
pub(crate) fn annotate_round(
    entries: &mut [TraceEntry],
    carried: usize,
    dim: usize,
) -> Result<usize> {
    let mut best = 0;
    let mut machine = None;
    let mut count = 0;
    for e in entries.iter_mut() {
        let z = e.z.ok_or(Error::MissingOutcome {
            machine: e.machine,
            round: e.round,
            k: e.k,
        })?;
        if machine != Some(e.machine) {
            machine = Some(e.machine);
            count = 0;
        }
        e.s_budget = dim.min(count + carried);
        if z == Outcome::Z1 {
            count += 1;
        }
        best = best.max(count);
    }
    Ok(best)
}

/// `S^m_{k,r} = min{d, #Z1 on machine m before k in round r
///                  + sum_{r' < r} max_m #Z1 on machine m in round r'}`.
pub fn track_s_budget(trace: &mut [TraceEntry], dim: usize) -> Result<()> {
    let mut prev = None;
    for e in trace.iter() {
        check_order(prev, e)?;
        prev = Some((e.round, e.machine, e.k));
    }
    let mut carried = 0;
    let mut start = 0;
    while start < trace.len() {
        let round = trace[start].round;
        let end = start
            + trace[start..]
                .iter()
                .take_while(|e| e.round == round)
                .count();
        carried += annotate_round(&mut trace[start..end], carried, dim)?;
        start = end;
    }
    Ok(())
}

/// Online `prog <= s_budget` checker over annotated entries ordered by
/// `(round, machine, k)`.
#[derive(Clone, Debug, Default)]
pub struct SBudgetAuditor {
    tainted_before_round: bool,
    tainted_this_round: bool,
    tainted_local: bool,
    position: Option<(usize, usize, usize)>,
    report: SBudgetAudit,
}

impl SBudgetAuditor {
    pub fn feed(&mut self, e: &TraceEntry) -> Result<()> {
        check_order(self.position, e)?;
        let (round, machine) = match self.position {
            Some((r, m, _)) => (Some(r), Some(m)),
            None => (None, None),
        };
        if round != Some(e.round) {
            self.tainted_before_round |= self.tainted_this_round;
            self.tainted_this_round = false;
        }
        if round != Some(e.round) || machine != Some(e.machine) {
            self.tainted_local = self.tainted_before_round;
        }
        self.position = Some((e.round, e.machine, e.k));
        self.report.max_s_budget = self.report.max_s_budget.max(e.s_budget);

        if self.tainted_local {
            self.report.excluded += 1;
        } else {
            self.report.checked += 1;
            if e.prog > e.s_budget {
                self.report.violations += 1;
                self.report.first_violation.get_or_insert(Violation::of(e));
            }
        }
        if e.z == Some(Outcome::Z2) {
            self.tainted_local = true;
            self.tainted_this_round = true;
        }
        Ok(())
    }

    pub fn finish(self) -> SBudgetAudit {
        self.report
    }
}

pub fn audit_s_budget(trace: &[TraceEntry]) -> Result<SBudgetAudit> {
    let mut a = SBudgetAuditor::default();
    for e in trace {
        a.feed(e)?;
    }
    Ok(a.finish())
}
