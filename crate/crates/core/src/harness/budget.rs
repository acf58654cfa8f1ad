//! Static power budget of the controller blocks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quantities::{ScenarioConfig, ValidationReport, Watt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Block {
    #[serde(rename = "RO")]
    Ro,
    CurrentSensor,
    #[serde(rename = "FSM")]
    Fsm,
    Comparator,
    ChargePumpControl,
    Misc,
}

impl Block {
    pub const ALL: [Block; 6] = [
        Block::Ro,
        Block::CurrentSensor,
        Block::Fsm,
        Block::Comparator,
        Block::ChargePumpControl,
        Block::Misc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Block::Ro => "RO",
            Block::CurrentSensor => "CurrentSensor",
            Block::Fsm => "FSM",
            Block::Comparator => "Comparator",
            Block::ChargePumpControl => "ChargePumpControl",
            Block::Misc => "Misc",
        }
    }
}

/// Per-block power draw, overridable from the `[budget]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub ro: Watt,
    pub current_sensor: Watt,
    pub fsm: Watt,
    pub comparator: Watt,
    pub charge_pump_control: Watt,
    pub misc: Watt,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            ro: Watt(12.0e-6),
            current_sensor: Watt(5.6e-6),
            fsm: Watt(2.0e-6),
            comparator: Watt(1.2e-6),
            charge_pump_control: Watt(0.8e-6),
            misc: Watt(0.4e-6),
        }
    }
}

impl BudgetConfig {
    pub fn get(&self, block: Block) -> Watt {
        match block {
            Block::Ro => self.ro,
            Block::CurrentSensor => self.current_sensor,
            Block::Fsm => self.fsm,
            Block::Comparator => self.comparator,
            Block::ChargePumpControl => self.charge_pump_control,
            Block::Misc => self.misc,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        for block in Block::ALL {
            let w = self.get(block).0;
            if !(w.is_finite() && w >= 0.0) {
                r.push(
                    format!("budget.{}", field_name(block)),
                    "block power must be non-negative",
                );
            }
        }
        r
    }
}

fn field_name(block: Block) -> &'static str {
    match block {
        Block::Ro => "ro",
        Block::CurrentSensor => "current_sensor",
        Block::Fsm => "fsm",
        Block::Comparator => "comparator",
        Block::ChargePumpControl => "charge_pump_control",
        Block::Misc => "misc",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerBudget {
    pub per_block: Vec<(Block, Watt)>,
    pub total: Watt,
}

impl PowerBudget {
    /// Fraction of the total drawn by `blocks`; 0 for an empty budget.
    pub fn share(&self, blocks: &[Block]) -> f64 {
        if self.total.0 == 0.0 {
            return 0.0;
        }
        let part: Watt = self
            .per_block
            .iter()
            .filter(|(b, _)| blocks.contains(b))
            .map(|(_, w)| *w)
            .sum();
        part / self.total
    }
}

impl fmt::Display for PowerBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (block, w) in &self.per_block {
            let pct = if self.total.0 > 0.0 {
                100.0 * (*w / self.total)
            } else {
                0.0
            };
            writeln!(
                f,
                "{:<18} {:>8.3} uW  {:>5.1} %",
                block.name(),
                w.0 * 1e6,
                pct
            )?;
        }
        write!(f, "{:<18} {:>8.3} uW", "total", self.total.0 * 1e6)
    }
}

pub fn power_budget(cfg: &ScenarioConfig) -> PowerBudget {
    let per_block: Vec<_> = Block::ALL.iter().map(|&b| (b, cfg.budget.get(b))).collect();
    let total = per_block.iter().map(|(_, w)| *w).sum();
    PowerBudget { per_block, total }
}
