//! Protocol duration against the relaxation and coherence times.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A run fails once it uses this fraction of the tightest budget.
pub const BUDGET_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineEvent {
    pub name: String,
    pub duration_us: f64,
    /// Mobile spins are outside their cages during this event.
    #[serde(default)]
    pub mobile_exposed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolTimeline {
    pub events: Vec<TimelineEvent>,
    pub t1_budget_us: f64,
    pub t2_budget_us: f64,
    /// How much faster a mobile spin decoheres than a caged one.
    pub mobile_decoherence_factor: f64,
}

impl ProtocolTimeline {
    /// `gates` exposed gate events of `t_g`, then a transport event.
    pub fn standard(t_g: f64, gates: usize, transport_us: f64, t1: f64, t2: f64, factor: f64) -> Self {
        let mut events: Vec<TimelineEvent> = (0..gates)
            .map(|i| TimelineEvent {
                name: format!("gate_{}", i + 1),
                duration_us: t_g,
                mobile_exposed: true,
            })
            .collect();
        events.push(TimelineEvent {
            name: "transport".into(),
            duration_us: transport_us,
            mobile_exposed: true,
        });
        Self {
            events,
            t1_budget_us: t1,
            t2_budget_us: t2,
            mobile_decoherence_factor: factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.events {
            if !(e.duration_us >= 0.0 && e.duration_us.is_finite()) {
                return Err(invalid("timeline.events", format!("event `{}` has duration {}", e.name, e.duration_us)));
            }
        }
        if !(self.t1_budget_us > 0.0) {
            return Err(invalid("budget.t1_us", format!("must be positive, got {}", self.t1_budget_us)));
        }
        if !(self.t2_budget_us > 0.0) {
            return Err(invalid("budget.t2_us", format!("must be positive, got {}", self.t2_budget_us)));
        }
        if !(self.mobile_decoherence_factor >= 1.0) {
            return Err(invalid(
                "budget.mobile_decoherence_factor",
                format!("must be at least 1, got {}", self.mobile_decoherence_factor),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub total_us: f64,
    /// Total with mobile-exposed time scaled by the decoherence factor.
    pub weighted_total_us: f64,
    pub t1_ratio: f64,
    pub t2_ratio: f64,
    /// Unweighted total over the tightest budget.
    pub raw_ratio: f64,
    /// Weighted total over the tightest budget; compared against the limit.
    pub weighted_ratio: f64,
    pub limit: f64,
    pub pass: bool,
}

pub fn time_budget(timeline: &ProtocolTimeline) -> Result<BudgetReport> {
    timeline.validate()?;
    let total: f64 = timeline.events.iter().map(|e| e.duration_us).sum();
    let weighted: f64 = timeline
        .events
        .iter()
        .map(|e| {
            if e.mobile_exposed {
                e.duration_us * timeline.mobile_decoherence_factor
            } else {
                e.duration_us
            }
        })
        .sum();
    let tightest = timeline.t1_budget_us.min(timeline.t2_budget_us);
    let weighted_ratio = weighted / tightest;
    Ok(BudgetReport {
        total_us: total,
        weighted_total_us: weighted,
        t1_ratio: weighted / timeline.t1_budget_us,
        t2_ratio: weighted / timeline.t2_budget_us,
        raw_ratio: total / tightest,
        weighted_ratio,
        limit: BUDGET_FRACTION,
        pass: weighted_ratio < BUDGET_FRACTION,
    })
}
