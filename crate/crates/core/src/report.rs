//! The succinctness table: quantum machine sizes against classical
//! state-count bounds for a range of `m`.

use crate::baselines::{lower_bound, BaselineError, BoundRow, Model};
use crate::machines::{Family, MachineError};
use crate::numerics::{rational_to_string, Rational};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("report needs the aeq or twin-m family, got {0}")]
    Family(String),
}

/// A table cell with the provenance of its value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub value: String,
    pub provenance: &'static str,
}

impl Cell {
    fn exact(v: impl ToString) -> Cell {
        Cell { value: v.to_string(), provenance: "exact" }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub family: String,
    pub m: u64,
    #[serde(with = "crate::numerics::serde_rational")]
    pub epsilon: Rational,
    pub qs: Cell,
    pub cs: Cell,
    /// Composition formula `CS(A₁) + QS(A₁) + CS(A₂)`.
    pub cs_formula: Cell,
    /// Lower bound on DFA size.
    pub dfa: Cell,
    pub two_dfa: BoundRow,
    pub two_nfa: BoundRow,
    pub two_pfa: BoundRow,
}

impl ReportRow {
    pub const HEADER: [&'static str; 13] = [
        "family", "m", "epsilon", "qs", "cs", "cs_formula", "dfa", "2dfa", "2dfa_floor", "2nfa", "2nfa_floor",
        "2pfa", "2pfa_floor",
    ];

    /// Values in [`ReportRow::HEADER`] order.
    pub fn values(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            self.m.to_string(),
            rational_to_string(&self.epsilon),
            self.qs.value.clone(),
            self.cs.value.clone(),
            self.cs_formula.value.clone(),
            self.dfa.value.clone(),
            self.two_dfa.states.to_string(),
            format!("{:.4}", self.two_dfa.floor),
            self.two_nfa.states.to_string(),
            format!("{:.4}", self.two_nfa.floor),
            self.two_pfa.states.to_string(),
            format!("{:.4}", self.two_pfa.floor),
        ]
    }

    /// Whether every two-way bound is at least its floor.
    pub fn meets_floors(&self) -> bool {
        self.two_dfa.meets_floor && self.two_nfa.meets_floor && self.two_pfa.meets_floor
    }

    /// Whether every two-way bound is strictly above its floor.
    pub fn exceeds_floors(&self) -> bool {
        self.two_dfa.exceeds_floor && self.two_nfa.exceeds_floor && self.two_pfa.exceeds_floor
    }
}

/// One row per `m`: the built machine's `QS`, `CS`, the DFA lower bound
/// (`2m+2` or `2ᵐ`) and the smallest 2DFA/2NFA/2PFA sizes compatible with
/// it (2PFA constant `b`).
pub fn succinctness_report(family: &str, ms: &[u64], eps: &Rational, b: u32) -> Result<Vec<ReportRow>, ReportError> {
    let twin = match family {
        "aeq" => false,
        "twin-m" | "twin" => true,
        other => return Err(ReportError::Family(other.into())),
    };
    let mut rows = Vec::new();
    for &m in ms {
        let fam = if twin { Family::TwinM(m) } else { Family::Aeq(m) };
        let card = fam.build(eps)?;
        let dfa = if twin { lower_bound(true, m, Model::TwoDfa)?.dfa_bound } else { (2 * m + 2).to_string() };
        rows.push(ReportRow {
            family: fam.name().into(),
            m,
            epsilon: eps.clone(),
            qs: Cell::exact(card.qs),
            cs: Cell::exact(card.cs),
            cs_formula: Cell::exact(card.cs_formula.map(|c| c.to_string()).unwrap_or_default()),
            dfa: Cell::exact(dfa),
            two_dfa: lower_bound(twin, m, Model::TwoDfa)?,
            two_nfa: lower_bound(twin, m, Model::TwoNfa)?,
            two_pfa: lower_bound(twin, m, Model::TwoPfa { b })?,
        });
    }
    Ok(rows)
}
