//! The agent interface and the three built-in negotiators.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::adjudicate::{GameStatus, Resolution};
use crate::bidding::BidRecord;
use crate::board::GameState;
use crate::deal::Ledger;
use crate::hostility::HostilityMatrix;
use crate::map::WorldMap;
use crate::session::{AgentError, Message, RoundInfo};
use crate::token::Power;

mod madoff;
mod random;
mod silent;

pub use madoff::{MadoffAgent, MadoffConfig, FINAL_ROUND_CAP};
pub use random::RandomAgent;
pub use silent::SilentAgent;

/// Read-only view handed to agents at the start of a movement phase.
#[derive(Clone, Copy)]
pub struct PhaseView<'a> {
    pub map: &'a WorldMap,
    pub state: &'a GameState,
    pub ledger: &'a Ledger,
    pub hostility: &'a HostilityMatrix,
}

/// Public record of an adjudicated movement phase.
#[derive(Clone, Copy)]
pub struct PhaseReport<'a> {
    pub state_before: &'a GameState,
    pub resolution: &'a Resolution,
}

pub trait Agent {
    fn power(&self) -> Power;

    fn name(&self) -> &'static str;

    fn on_phase_start(&mut self, view: &PhaseView<'_>);

    /// Handles one round. Messages leave the agent only through the return
    /// value.
    fn on_round(
        &mut self,
        inbound: &[Message],
        round: RoundInfo,
        ledger: &Ledger,
    ) -> Result<Vec<Message>, AgentError>;

    fn on_phase_end(&mut self, _report: &PhaseReport<'_>) {}

    fn on_game_end(&mut self, _status: &GameStatus) {}

    /// Proposal bookkeeping, for agents that keep it.
    fn bid_records(&self) -> &[BidRecord] {
        &[]
    }
}

pub const AGENT_NAMES: [&str; 3] = ["madoff", "random", "silent"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown agent `{0}` (expected madoff, random or silent)")]
pub struct UnknownAgent(pub String);

/// Per-agent seed from the game seed and the agent's power (splitmix64 over
/// the power name).
pub fn derive_seed(game_seed: u64, power: Power) -> u64 {
    let mut z = game_seed;
    for b in power.as_str().bytes() {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(u64::from(b));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

pub fn create_agent(
    name: &str,
    power: Power,
    map: Arc<WorldMap>,
    game_seed: u64,
) -> Result<Box<dyn Agent>, UnknownAgent> {
    let seed = derive_seed(game_seed, power);
    match name {
        "madoff" => Ok(Box::new(MadoffAgent::new(power, map, seed, MadoffConfig::default()))),
        "random" => Ok(Box::new(RandomAgent::new(power, map, seed))),
        "silent" => Ok(Box::new(SilentAgent::new(power))),
        other => Err(UnknownAgent(String::from(other))),
    }
}
