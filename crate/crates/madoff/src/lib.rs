//! Game driver, log audit and tournament runner for `madoff-core`.

pub mod audit;
pub mod game;
pub mod tournament;

pub use audit::{audit_log, AuditReport, Violation};
pub use game::{load_map, run_game, ConfigError, GameConfig, GameError, GameResult, Outcome};
pub use tournament::{run_tournament, TournamentSpec, TournamentSummary};
