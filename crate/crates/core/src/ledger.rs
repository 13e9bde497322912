//! Event ledger tracking who holds which subsystem and what they did.
//!
//! Every protocol run appends gate, transmission, classical-message and
//! measurement events to an [`OwnershipLedger`]. The ledger can serialize a
//! tab-separated transcript and replay itself to check that no party ever
//! touched a subsystem it did not hold at the time.

use std::collections::BTreeMap;
use std::fmt;

/// Protocol participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn as_str(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Register label: A is the sender's channel half, B the receiver's half,
/// C the sender's ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    A,
    B,
    C,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::A => "A",
            Label::B => "B",
            Label::C => "C",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What happened in one ledger step.
#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Gate {
        gate: &'static str,
        subsystems: Vec<Label>,
    },
    Transmission {
        subsystem: Label,
    },
    ClassicalMessage {
        about: Label,
        outcome: usize,
    },
    Measurement {
        subsystem: Label,
        outcome: usize,
    },
}

/// One timestamped action by one party.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub step: usize,
    pub party: Party,
    pub kind: EventKind,
}

/// Current subsystem owners plus the full event history.
#[derive(Debug, Clone)]
pub struct OwnershipLedger {
    owners: BTreeMap<Label, Party>,
    events: Vec<Event>,
}

impl Default for OwnershipLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl OwnershipLedger {
    /// Starts with the sender holding A and C and the receiver holding B.
    pub fn new() -> Self {
        let mut owners = BTreeMap::new();
        owners.insert(Label::A, Party::Alice);
        owners.insert(Label::B, Party::Bob);
        owners.insert(Label::C, Party::Alice);
        Self {
            owners,
            events: Vec::new(),
        }
    }

    pub fn owner(&self, label: Label) -> Party {
        self.owners[&label]
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    fn push(&mut self, party: Party, kind: EventKind) {
        let step = self.events.len() + 1;
        self.events.push(Event { step, party, kind });
    }

    pub fn record_gate(&mut self, party: Party, gate: &'static str, subsystems: Vec<Label>) {
        self.push(party, EventKind::Gate { gate, subsystems });
    }

    /// Hands `subsystem` from its current owner to the other party.
    pub fn record_transmission(&mut self, subsystem: Label) {
        let sender = self.owner(subsystem);
        self.owners.insert(subsystem, sender.other());
        self.push(sender, EventKind::Transmission { subsystem });
    }

    pub fn record_message(&mut self, from: Party, about: Label, outcome: usize) {
        self.push(from, EventKind::ClassicalMessage { about, outcome });
    }

    pub fn record_measurement(&mut self, party: Party, subsystem: Label, outcome: usize) {
        self.push(party, EventKind::Measurement { subsystem, outcome });
    }

    /// Tab-separated transcript, one line per event:
    /// step, party, kind, subsystems, payload.
    pub fn serialize_transcript(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            let (kind, subsystems, payload) = match &ev.kind {
                EventKind::Gate { gate, subsystems } => {
                    let joined = subsystems
                        .iter()
                        .map(|l| l.as_str())
                        .collect::<Vec<_>>()
                        .join(",");
                    ("gate", joined, (*gate).to_string())
                }
                EventKind::Transmission { subsystem } => (
                    "transmission",
                    subsystem.as_str().to_string(),
                    subsystem.as_str().to_string(),
                ),
                EventKind::ClassicalMessage { about, outcome } => (
                    "classical-message",
                    about.as_str().to_string(),
                    outcome.to_string(),
                ),
                EventKind::Measurement { subsystem, outcome } => (
                    "measurement",
                    subsystem.as_str().to_string(),
                    outcome.to_string(),
                ),
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                ev.step, ev.party, kind, subsystems, payload
            ));
        }
        out
    }
}

/// Outcome of replaying a ledger against the ownership rules.
#[derive(Debug, Clone)]
pub struct LocalityReport {
    pub checked_events: usize,
    pub violations: Vec<String>,
}

impl LocalityReport {
    pub fn is_local(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays the ledger from the initial ownership assignment and records every
/// event in which a party acted on a subsystem it did not hold.
pub fn assert_locality(ledger: &OwnershipLedger) -> LocalityReport {
    let mut owners = BTreeMap::new();
    owners.insert(Label::A, Party::Alice);
    owners.insert(Label::B, Party::Bob);
    owners.insert(Label::C, Party::Alice);

    let mut violations = Vec::new();
    for ev in ledger.events() {
        match &ev.kind {
            EventKind::Gate { gate, subsystems } => {
                for &s in subsystems {
                    if owners[&s] != ev.party {
                        violations.push(format!(
                            "step {}: {} applied {} on {} held by {}",
                            ev.step, ev.party, gate, s, owners[&s]
                        ));
                    }
                }
            }
            EventKind::Transmission { subsystem } => {
                if owners[subsystem] != ev.party {
                    violations.push(format!(
                        "step {}: {} transmitted {} held by {}",
                        ev.step, ev.party, subsystem, owners[subsystem]
                    ));
                }
                owners.insert(*subsystem, owners[subsystem].other());
            }
            EventKind::ClassicalMessage { .. } => {
                // Classical communication is always allowed.
            }
            EventKind::Measurement { subsystem, .. } => {
                if owners[subsystem] != ev.party {
                    violations.push(format!(
                        "step {}: {} measured {} held by {}",
                        ev.step, ev.party, subsystem, owners[subsystem]
                    ));
                }
            }
        }
    }
    LocalityReport {
        checked_events: ledger.events().len(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_ledger() -> OwnershipLedger {
        let mut ledger = OwnershipLedger::new();
        ledger.record_gate(Party::Alice, "controlled-add", vec![Label::A, Label::C]);
        ledger.record_transmission(Label::A);
        ledger.record_gate(Party::Bob, "controlled-add", vec![Label::A, Label::B]);
        ledger.record_measurement(Party::Alice, Label::C, 1);
        ledger.record_message(Party::Alice, Label::C, 1);
        ledger.record_measurement(Party::Bob, Label::A, 0);
        ledger
    }

    #[test]
    fn transcript_is_stable() {
        let expected = "1\talice\tgate\tA,C\tcontrolled-add\n\
                        2\talice\ttransmission\tA\tA\n\
                        3\tbob\tgate\tA,B\tcontrolled-add\n\
                        4\talice\tmeasurement\tC\t1\n\
                        5\talice\tclassical-message\tC\t1\n\
                        6\tbob\tmeasurement\tA\t0\n";
        assert_eq!(sample_ledger().serialize_transcript(), expected);
    }

    #[test]
    fn ownership_flips_on_transmission() {
        let ledger = sample_ledger();
        assert_eq!(ledger.owner(Label::A), Party::Bob);
        assert_eq!(ledger.owner(Label::B), Party::Bob);
        assert_eq!(ledger.owner(Label::C), Party::Alice);
    }

    #[test]
    fn legal_sequence_is_local() {
        let report = assert_locality(&sample_ledger());
        assert_eq!(report.checked_events, 6);
        assert!(report.is_local());
    }

    #[test]
    fn remote_gate_is_flagged() {
        let mut ledger = OwnershipLedger::new();
        ledger.record_gate(Party::Alice, "controlled-add", vec![Label::A, Label::B]);
        let report = assert_locality(&ledger);
        assert!(!report.is_local());
        assert!(report.violations[0].contains("held by bob"));
    }

    #[test]
    fn gate_after_handover_is_flagged() {
        let mut ledger = OwnershipLedger::new();
        ledger.record_transmission(Label::A);
        ledger.record_gate(Party::Alice, "completion", vec![Label::A, Label::C]);
        let report = assert_locality(&ledger);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("step 2"));
    }

    #[test]
    fn measurement_by_non_owner_is_flagged() {
        let mut ledger = OwnershipLedger::new();
        ledger.record_measurement(Party::Bob, Label::C, 0);
        assert!(!assert_locality(&ledger).is_local());
    }
}
