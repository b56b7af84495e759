use alloc::vec::Vec;

use super::{Agent, PhaseView};
use crate::deal::Ledger;
use crate::session::{AgentError, Message, MessageKind, RoundInfo};
use crate::token::Power;

/// Never proposes and turns every proposal down.
#[derive(Debug, Clone)]
pub struct SilentAgent {
    power: Power,
}

impl SilentAgent {
    pub fn new(power: Power) -> Self {
        SilentAgent { power }
    }
}

impl Agent for SilentAgent {
    fn power(&self) -> Power {
        self.power
    }

    fn name(&self) -> &'static str {
        "silent"
    }

    fn on_phase_start(&mut self, _view: &PhaseView<'_>) {}

    fn on_round(
        &mut self,
        inbound: &[Message],
        _round: RoundInfo,
        _ledger: &Ledger,
    ) -> Result<Vec<Message>, AgentError> {
        Ok(inbound
            .iter()
            .filter_map(|m| match &m.kind {
                MessageKind::Propose(d) => Some(Message::reject(self.power, d.id)),
                _ => None,
            })
            .collect())
    }
}
