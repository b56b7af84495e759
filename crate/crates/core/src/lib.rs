//! Deterministic Diplomacy engine with binding deals and the Madoff
//! negotiation strategy.
//!
//! The crate is `no_std` (it needs `alloc`). File IO, the game driver and
//! the command line live in the `madoff` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod acceptance;
pub mod adjudicate;
pub mod agents;
pub mod bidding;
pub mod board;
pub mod deal;
pub mod hostility;
pub mod map;
pub mod order;
pub mod session;
pub mod tactician;
pub mod token;
pub mod utility;

pub use adjudicate::{adjudicate, GameStatus, OrderOutcome, Resolution};
pub use agents::{create_agent, Agent};
pub use board::{GameState, PhaseKey, Season, Unit, UnitKind};
pub use deal::{BasicDeal, DealId, Dmz, Ledger, OrderCommitment};
pub use hostility::HostilityMatrix;
pub use map::{standard_map, WorldMap};
pub use order::{Adjustment, Command, Order, RetreatOrder};
pub use session::{run_session, Message, MessageKind};
pub use token::{Power, ProvinceId};
pub use utility::{compute_utilities, UtilityTable};
