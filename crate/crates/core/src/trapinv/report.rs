use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Safe,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Safe => "SAFE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub index: usize,
    #[serde(rename = "type")]
    pub ty: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    /// States of the bad-state automaton plus those of the flipped invariant automaton.
    pub states: usize,
    pub transitions: usize,
    pub inclusion_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub property: String,
    pub min_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessEntry>>,
    pub stats: Stats,
    pub assumptions: Vec<String>,
    /// Windows whose Ashcroft invariants strengthened the check.
    pub windows: Vec<String>,
}

impl VerificationReport {
    /// Size of the witness system.
    pub fn witness_size(&self) -> Option<usize> {
        self.witness.as_ref().map(|w| w.iter().map(|e| e.index + 1).max().unwrap_or(0))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (n >= {})", self.property, self.verdict, self.min_size)?;
        if !self.windows.is_empty() {
            write!(f, " with windows {}", self.windows.join(", "))?;
        }
        if let (Some(w), Some(n)) = (&self.witness, self.witness_size()) {
            let states: Vec<String> = w.iter().map(|e| format!("{}.{}@{}", e.ty, e.state, e.index)).collect();
            write!(f, "\n  witness (n = {n}): {}", states.join(" "))?;
        }
        write!(
            f,
            "\n  automata: {} states, {} transitions; inclusion: {} steps",
            self.stats.states, self.stats.transitions, self.stats.inclusion_steps
        )?;
        for a in &self.assumptions {
            write!(f, "\n  assuming {a}")?;
        }
        Ok(())
    }
}
