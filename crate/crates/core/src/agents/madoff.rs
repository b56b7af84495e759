use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Agent, PhaseReport, PhaseView};
use crate::acceptance::{evaluate_deal, Decision, Perspective};
use crate::bidding::{BidContext, BidRecord, Bidder, DEFAULT_FAVOR_UTILITY};
use crate::board::GameState;
use crate::deal::{binding_constraints, DealId, Ledger};
use crate::hostility::HostilityMatrix;
use crate::map::WorldMap;
use crate::session::{AgentError, Message, MessageKind, RoundInfo};
use crate::tactician::{anticipate_all, plan, Plan};
use crate::token::Power;
use crate::utility::{compute_utilities, UtilityTable};

/// Inbound messages handled in the last round before the deadline.
pub const FINAL_ROUND_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MadoffConfig {
    pub favor_utility: f64,
    pub final_round_cap: usize,
}

impl Default for MadoffConfig {
    fn default() -> Self {
        MadoffConfig {
            favor_utility: DEFAULT_FAVOR_UTILITY,
            final_round_cap: FINAL_ROUND_CAP,
        }
    }
}

struct PhaseMemory {
    state: GameState,
    anticipated: BTreeMap<Power, Plan>,
    bidder: Bidder,
    rejected: BTreeSet<DealId>,
}

pub struct MadoffAgent {
    power: Power,
    map: Arc<WorldMap>,
    rng: ChaCha8Rng,
    config: MadoffConfig,
    utilities: UtilityTable,
    hostility: HostilityMatrix,
    phase: Option<PhaseMemory>,
    records: Vec<BidRecord>,
}

impl MadoffAgent {
    pub fn new(power: Power, map: Arc<WorldMap>, seed: u64, config: MadoffConfig) -> Self {
        let utilities = compute_utilities(&map);
        let hostility = HostilityMatrix::new(map.powers());
        MadoffAgent {
            power,
            map,
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
            utilities,
            hostility,
            phase: None,
            records: Vec::new(),
        }
    }

    pub fn hostility(&self) -> &HostilityMatrix {
        &self.hostility
    }
}

impl Agent for MadoffAgent {
    fn power(&self) -> Power {
        self.power
    }

    fn name(&self) -> &'static str {
        "madoff"
    }

    fn on_phase_start(&mut self, view: &PhaseView<'_>) {
        let state = view.state.clone();
        self.phase = Some(PhaseMemory {
            anticipated: anticipate_all(view.map, &state, &self.utilities),
            bidder: Bidder::new(self.power, state.phase_key(), state.unit_count(self.power)),
            rejected: BTreeSet::new(),
            state,
        });
    }

    fn on_round(
        &mut self,
        inbound: &[Message],
        round: RoundInfo,
        ledger: &Ledger,
    ) -> Result<Vec<Message>, AgentError> {
        let mem = self
            .phase
            .as_mut()
            .ok_or_else(|| AgentError(format!("{} asked to negotiate before the phase began", self.power)))?;
        let constraints = binding_constraints(ledger, self.power, mem.state.phase_key());
        let my_plan = plan(&self.map, &mem.state, self.power, &constraints, &self.utilities)
            .map_err(|e| AgentError(format!("{e}")))?;
        let me = Perspective {
            power: self.power,
            map: &self.map,
            state: &mem.state,
            utilities: &self.utilities,
            hostility: &self.hostility,
            plan: &my_plan,
        };

        let mut out = Vec::new();
        let mut handled = 0;
        for m in inbound {
            match &m.kind {
                MessageKind::Propose(deal) => {
                    if round.is_final() && handled >= self.config.final_round_cap {
                        continue;
                    }
                    handled += 1;
                    match evaluate_deal(&me, &mem.anticipated, deal, &mut self.rng) {
                        Decision::Accept => out.push(Message::accept(self.power, deal.id)),
                        Decision::Reject => {
                            log::debug!("{} rejects {}", self.power, deal.id);
                            out.push(Message::reject(self.power, deal.id));
                        }
                    }
                }
                MessageKind::Reject(id) if id.proposer == self.power => {
                    mem.rejected.insert(*id);
                }
                _ => {}
            }
        }

        let ctx = BidContext {
            me,
            anticipated: &mem.anticipated,
            ledger,
            favor_utility: self.config.favor_utility,
        };
        out.extend(mem.bidder.generate_proposals(&ctx, &mem.rejected));
        self.records.extend(mem.bidder.take_records());
        Ok(out)
    }

    fn on_phase_end(&mut self, report: &PhaseReport<'_>) {
        self.hostility
            .update_from_resolution(report.state_before, report.resolution);
        self.phase = None;
    }

    fn bid_records(&self) -> &[BidRecord] {
        &self.records
    }
}
