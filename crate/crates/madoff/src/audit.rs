//! Post-game no-reneging audit, working from the text log alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A committed order was not among the adjudicated orders of its phase.
    MissingCommitment { deal: String, phase: String, order: String },
    /// A bound power moved into a province demilitarized for it.
    DmzEntered { deal: String, phase: String, order: String },
    /// A deal line the audit could not read.
    Unparsable { line: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingCommitment { deal, phase, order } => {
                write!(f, "{deal}: `{order}` promised for {phase} was not played")
            }
            Violation::DmzEntered { deal, phase, order } => {
                write!(f, "{deal}: `{order}` entered a DMZ in {phase}")
            }
            Violation::Unparsable { line } => write!(f, "cannot parse `{line}`"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub binding_deals: usize,
    pub commitments_checked: usize,
    pub dmzs_checked: usize,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
struct DealText {
    commitments: Vec<(String, String)>,
    dmzs: Vec<(String, BTreeSet<String>, BTreeSet<String>)>,
}

/// Splits `OC[...]` / `DMZ[...]` groups out of a PROPOSE line tail.
fn parse_components(tail: &str) -> Option<DealText> {
    let mut out = DealText::default();
    let mut rest = tail.trim();
    while !rest.is_empty() {
        let (tag, after) = rest.split_once('[')?;
        let (body, after) = after.split_once(']')?;
        let mut words = body.splitn(3, ' ');
        let phase = format!("{} {}", words.next()?, words.next()?);
        let payload = words.next()?;
        match tag.trim() {
            "OC" => out.commitments.push((phase, payload.to_string())),
            "DMZ" => {
                let (powers, provinces) = payload.split_once(' ')?;
                let set = |s: &str, key: &str| -> Option<BTreeSet<String>> {
                    let inner = s.strip_prefix(key)?.strip_prefix('{')?.strip_suffix('}')?;
                    Some(inner.split(',').filter(|x| !x.is_empty()).map(String::from).collect())
                };
                out.dmzs
                    .push((phase, set(powers, "powers=")?, set(provinces, "provinces=")?));
            }
            _ => return None,
        }
        rest = after.trim();
    }
    Some(out)
}

/// Checks every BINDING deal in `log` against the RESULT lines of the
/// phases it concerns.
pub fn audit_log<S: AsRef<str>>(log: &[S]) -> AuditReport {
    let mut report = AuditReport::default();
    let mut proposed: BTreeMap<String, DealText> = BTreeMap::new();
    let mut binding: Vec<String> = Vec::new();
    // phase -> (power, order notation) of every adjudicated order
    let mut played: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    let mut phase = String::new();

    for line in log.iter().map(AsRef::as_ref) {
        if let Some(p) = line.strip_prefix("PHASE ") {
            phase = p.to_string();
        } else if let Some(rest) = line.strip_prefix("DEAL ") {
            let Some((id, rest)) = rest.split_once(' ') else {
                report.violations.push(Violation::Unparsable { line: line.into() });
                continue;
            };
            if let Some(tail) = rest.strip_prefix("PROPOSE ") {
                let tail = tail.split_once(' ').map_or("", |(_, t)| t);
                match parse_components(tail) {
                    Some(d) => {
                        proposed.insert(id.to_string(), d);
                    }
                    None => report.violations.push(Violation::Unparsable { line: line.into() }),
                }
            } else if rest == "BINDING" {
                binding.push(id.to_string());
            }
        } else if let Some(rest) = line.strip_prefix("RESULT ") {
            let Some((power, rest)) = rest.split_once(' ') else { continue };
            let Some((order, _outcome)) = rest.rsplit_once(' ') else { continue };
            played
                .entry(phase.clone())
                .or_default()
                .push((power.to_string(), order.to_string()));
        }
    }

    let none = Vec::new();
    for id in &binding {
        report.binding_deals += 1;
        let Some(deal) = proposed.get(id) else {
            report.violations.push(Violation::Unparsable {
                line: format!("DEAL {id} BINDING without a proposal"),
            });
            continue;
        };
        for (ph, order) in &deal.commitments {
            report.commitments_checked += 1;
            let orders = played.get(ph).unwrap_or(&none);
            if !orders.iter().any(|(_, o)| o == order) {
                report.violations.push(Violation::MissingCommitment {
                    deal: id.clone(),
                    phase: ph.clone(),
                    order: order.clone(),
                });
            }
        }
        for (ph, powers, provinces) in &deal.dmzs {
            report.dmzs_checked += 1;
            for (power, order) in played.get(ph).unwrap_or(&none) {
                if !powers.contains(power) {
                    continue;
                }
                let target = order.split_once(" - ").map(|(_, to)| to);
                let is_move = order.split(' ').count() == 4;
                if is_move && target.is_some_and(|t| provinces.contains(t)) {
                    report.violations.push(Violation::DmzEntered {
                        deal: id.clone(),
                        phase: ph.clone(),
                        order: order.clone(),
                    });
                }
            }
        }
    }
    report
}
