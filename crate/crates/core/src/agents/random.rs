use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Agent, PhaseView};
use crate::adjudicate::{adjudicate, apply_movement, legal_orders};
use crate::board::{GameState, Season, Unit};
use crate::deal::{binding_constraints, BasicDeal, DealId, Ledger, OrderCommitment};
use crate::map::WorldMap;
use crate::order::Order;
use crate::session::{AgentError, Message, MessageKind, RoundInfo};
use crate::tactician::{anticipate_all, Plan};
use crate::token::{Power, ProvinceId};
use crate::utility::{compute_utilities, UtilityTable};

pub const CANDIDATES: usize = 10;

/// Accepts half of what it is offered and proposes the best of ten random
/// single-order commitments.
pub struct RandomAgent {
    power: Power,
    map: Arc<WorldMap>,
    rng: ChaCha8Rng,
    utilities: UtilityTable,
    state: Option<GameState>,
    anticipated: BTreeMap<Power, Plan>,
    seq: u32,
}

impl RandomAgent {
    pub fn new(power: Power, map: Arc<WorldMap>, seed: u64) -> Self {
        let utilities = compute_utilities(&map);
        RandomAgent {
            power,
            map,
            rng: ChaCha8Rng::seed_from_u64(seed),
            utilities,
            state: None,
            anticipated: BTreeMap::new(),
            seq: 0,
        }
    }

    /// Centers we would own if `order` replaced our unit's anticipated order
    /// and everyone else played as anticipated. Ownership only changes after
    /// a Fall move, so in Spring this is the current count.
    fn projected_centers(&self, state: &GameState, order: &Order) -> usize {
        if state.phase != Season::Fall {
            return state.sc_count(self.power);
        }
        let orders: Vec<Order> = self
            .anticipated
            .values()
            .flat_map(|p| p.orders())
            .map(|o| if o.unit == order.unit { *order } else { *o })
            .collect();
        let Ok(resolution) = adjudicate(&self.map, state, &orders) else {
            return 0;
        };
        let after = apply_movement(&self.map, state, &resolution);
        self.map
            .provinces()
            .iter()
            .filter(|p| p.is_supply_center)
            .filter(|p| match after.unit_at(p.id) {
                Some(u) => u.power == self.power,
                None => state.owner_of(p.id) == Some(self.power),
            })
            .count()
    }

    fn propose(&mut self, state: &GameState, ledger: &Ledger) -> Option<BasicDeal> {
        let phase = state.phase_key();
        let fixed: Vec<ProvinceId> = binding_constraints(ledger, self.power, phase)
            .fixed
            .iter()
            .map(|o| o.unit.location)
            .collect();
        let free: Vec<Unit> = state
            .units_of(self.power)
            .filter(|u| !fixed.contains(&u.location))
            .copied()
            .collect();
        if free.is_empty() {
            return None;
        }
        let mut best: Option<(Order, usize)> = None;
        for _ in 0..CANDIDATES {
            let unit = *free.choose(&mut self.rng)?;
            let options = legal_orders(&self.map, state, &unit).ok()?;
            let order = *options.choose(&mut self.rng)?;
            let score = self.projected_centers(state, &order);
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((order, score));
            }
        }
        let (order, _) = best?;
        let id = DealId {
            proposer: self.power,
            phase,
            seq: self.seq,
        };
        self.seq += 1;
        Some(BasicDeal::new(id, vec![OrderCommitment::new(phase, order)], Vec::new()))
    }
}

impl Agent for RandomAgent {
    fn power(&self) -> Power {
        self.power
    }

    fn name(&self) -> &'static str {
        "random"
    }

    fn on_phase_start(&mut self, view: &PhaseView<'_>) {
        self.anticipated = anticipate_all(view.map, view.state, &self.utilities);
        self.state = Some(view.state.clone());
        self.seq = 0;
    }

    fn on_round(
        &mut self,
        inbound: &[Message],
        _round: RoundInfo,
        ledger: &Ledger,
    ) -> Result<Vec<Message>, AgentError> {
        let state = self
            .state
            .take()
            .ok_or_else(|| AgentError("round before phase start".into()))?;
        let mut out = Vec::new();
        for m in inbound {
            if let MessageKind::Propose(d) = &m.kind {
                if self.rng.gen_bool(0.5) {
                    out.push(Message::accept(self.power, d.id));
                } else {
                    out.push(Message::reject(self.power, d.id));
                }
            }
        }
        if let Some(deal) = self.propose(&state, ledger) {
            out.push(Message::propose(deal));
        }
        self.state = Some(state);
        Ok(out)
    }
}
