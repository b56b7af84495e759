//! Drives one game from the 1901 setup to a solo or the year limit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use madoff_core::adjudicate::{
    adjudicate, apply_movement, game_status, resolve_retreats, resolve_winter, GameStatus,
    Resolution,
};
use madoff_core::agents::{create_agent, Agent, PhaseReport, PhaseView};
use madoff_core::bidding::BidRecord;
use madoff_core::board::{GameState, Season};
use madoff_core::deal::{binding_constraints, Ledger};
use madoff_core::hostility::HostilityMatrix;
use madoff_core::map::{standard_map, MapError, WorldMap};
use madoff_core::order::{Adjustment, RetreatOrder};
use madoff_core::session::{run_session, DEFAULT_ROUNDS};
use madoff_core::tactician::{plan, plan_adjustments, plan_retreats};
use madoff_core::token::Power;
use madoff_core::utility::{compute_utilities, UtilityTable};

pub const DEFAULT_MAX_YEAR: u16 = 1920;

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub map: Arc<WorldMap>,
    /// `standard` or the path the map was read from; only used in the log.
    pub map_label: String,
    /// Agent name per power, in the map's power order.
    pub agents: Vec<String>,
    pub seed: u64,
    pub rounds: u32,
    /// First year that is not played.
    pub max_year: u16,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("expected {expected} agents, one per power, got {got}")]
    AgentCount { expected: usize, got: usize },
    #[error("unknown agent `{0}` (expected madoff, random or silent)")]
    UnknownAgent(String),
    #[error("rounds must be at least 1")]
    ZeroRounds,
    #[error("max year {0} leaves nothing to play")]
    MaxYear(u16),
    #[error("cannot read map {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad map {path}: {source}")]
    Map { path: String, source: MapError },
}

#[derive(Debug, thiserror::Error)]
pub enum GameError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("engine fault in {phase}: {message}")]
    Engine { phase: String, message: String },
}

impl GameConfig {
    /// Standard map, default rounds and year limit.
    pub fn standard<S: AsRef<str>>(agents: &[S], seed: u64) -> Self {
        GameConfig {
            map: Arc::new(standard_map()),
            map_label: "standard".into(),
            agents: agents.iter().map(|a| a.as_ref().to_string()).collect(),
            seed,
            rounds: DEFAULT_ROUNDS,
            max_year: DEFAULT_MAX_YEAR,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let expected = self.map.powers().len();
        if self.agents.len() != expected {
            return Err(ConfigError::AgentCount {
                expected,
                got: self.agents.len(),
            });
        }
        if let Some(bad) = self
            .agents
            .iter()
            .find(|a| !madoff_core::agents::AGENT_NAMES.contains(&a.as_str()))
        {
            return Err(ConfigError::UnknownAgent(bad.clone()));
        }
        if self.rounds == 0 {
            return Err(ConfigError::ZeroRounds);
        }
        if self.max_year <= madoff_core::board::FIRST_YEAR {
            return Err(ConfigError::MaxYear(self.max_year));
        }
        Ok(())
    }

    pub fn agent_of(&self, power: Power) -> Option<&str> {
        let i = self.map.powers().iter().position(|p| *p == power)?;
        self.agents.get(i).map(String::as_str)
    }
}

/// Loads `standard` or a map file.
pub fn load_map(spec: &str) -> Result<(Arc<WorldMap>, String), ConfigError> {
    if spec == "standard" {
        return Ok((Arc::new(standard_map()), "standard".into()));
    }
    let text = std::fs::read_to_string(Path::new(spec)).map_err(|source| ConfigError::Io {
        path: spec.into(),
        source,
    })?;
    let map = WorldMap::parse(&text).map_err(|source| ConfigError::Map {
        path: spec.into(),
        source,
    })?;
    Ok((Arc::new(map), spec.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Solo(Power),
    YearLimit,
}

#[derive(Debug, Clone)]
pub struct GameResult {
    pub seed: u64,
    pub outcome: Outcome,
    /// Agent name per power.
    pub agents: BTreeMap<Power, String>,
    pub final_centers: BTreeMap<Power, usize>,
    /// Year in whose winter the power was last seen alive.
    pub elimination_year: BTreeMap<Power, u16>,
    pub final_year: u16,
    pub log: Vec<String>,
    pub ledger: Ledger,
    pub bids: BTreeMap<Power, Vec<BidRecord>>,
}

impl GameResult {
    pub fn log_text(&self) -> String {
        let mut s = String::new();
        for line in &self.log {
            s.push_str(line);
            s.push('\n');
        }
        s
    }

    pub fn survived(&self, power: Power) -> bool {
        !self.elimination_year.contains_key(&power)
    }
}

struct Driver<'a> {
    config: &'a GameConfig,
    map: &'a WorldMap,
    utilities: UtilityTable,
    state: GameState,
    ledger: Ledger,
    hostility: HostilityMatrix,
    agents: BTreeMap<Power, Box<dyn Agent>>,
    log: Vec<String>,
    elimination_year: BTreeMap<Power, u16>,
}

impl Driver<'_> {
    fn line(&mut self, s: String) {
        self.log.push(s);
    }

    fn fault(&self, message: impl std::fmt::Display) -> GameError {
        GameError::Engine {
            phase: self.state.phase_key().to_string(),
            message: message.to_string(),
        }
    }

    fn movement(&mut self) -> Result<Resolution, GameError> {
        let phase = self.state.phase_key();
        {
            let view = PhaseView {
                map: self.map,
                state: &self.state,
                ledger: &self.ledger,
                hostility: &self.hostility,
            };
            for (p, a) in self.agents.iter_mut() {
                if self.state.alive.contains(p) {
                    a.on_phase_start(&view);
                }
            }
        }
        let session = run_session(
            self.map,
            &self.state,
            &mut self.ledger,
            &mut self.agents,
            self.config.rounds,
        )
        .map_err(|e| self.fault(e))?;
        for ev in &session.events {
            self.log.push(ev.to_string());
        }

        let mut orders = Vec::new();
        for p in self.state.alive_powers() {
            let constraints = binding_constraints(&self.ledger, p, phase);
            let planned = plan(self.map, &self.state, p, &constraints, &self.utilities)
                .map_err(|e| self.fault(e))?;
            for o in planned.orders() {
                self.log.push(format!("ORDER {p} {o}"));
            }
            orders.extend(planned.orders().copied());
        }
        let resolution = adjudicate(self.map, &self.state, &orders).map_err(|e| self.fault(e))?;
        for (o, outcome) in &resolution.orders {
            self.log
                .push(format!("RESULT {} {o} {}", o.unit.power, outcome.keyword()));
        }
        for d in &resolution.dislodged {
            self.log.push(format!(
                "DISLODGED {} {} BY {} FROM {}",
                d.unit.power, d.unit, d.attacker, d.attacker_origin
            ));
        }
        self.hostility.update_from_resolution(&self.state, &resolution);
        let report = PhaseReport {
            state_before: &self.state,
            resolution: &resolution,
        };
        for (p, a) in self.agents.iter_mut() {
            if self.state.alive.contains(p) {
                a.on_phase_end(&report);
            }
        }
        self.state = apply_movement(self.map, &self.state, &resolution);
        Ok(resolution)
    }

    fn retreats(&mut self, resolution: &Resolution) -> Result<(), GameError> {
        let mut retreats: Vec<RetreatOrder> = Vec::new();
        let powers: Vec<Power> = self.map.powers().to_vec();
        for p in powers {
            for r in plan_retreats(self.map, &self.state, resolution, p, &self.utilities) {
                self.line(format!("RETREAT {p} {r}"));
                retreats.push(r);
            }
        }
        self.state = resolve_retreats(self.map, &self.state, resolution, &retreats)
            .map_err(|e| self.fault(e))?;
        Ok(())
    }

    fn winter(&mut self) -> Result<(), GameError> {
        let mut requests: BTreeMap<Power, Vec<Adjustment>> = BTreeMap::new();
        for p in self.state.alive_powers() {
            requests.insert(p, plan_adjustments(self.map, &self.state, p, &self.utilities));
        }
        let report = resolve_winter(self.map, &self.state, &requests).map_err(|e| self.fault(e))?;
        for a in &report.applied {
            self.log.push(format!("ADJUST {a}"));
        }
        for (a, why) in &report.ignored {
            self.log.push(format!("IGNORED {a} {why}"));
        }
        let powers = self.map.powers();
        for o in powers {
            for s in powers.iter().filter(|s| *s != o) {
                self.log
                    .push(format!("HOSTILITY {o} {s} {}", self.hostility.raw(*o, *s)));
            }
        }
        for p in powers {
            self.log.push(format!(
                "CENTERS {p} {} UNITS {}",
                report.state.sc_count(*p),
                report.state.unit_count(*p)
            ));
        }
        let year = self.state.year;
        self.state = report.state;
        for p in powers {
            if !self.state.alive.contains(p) && !self.elimination_year.contains_key(p) {
                self.elimination_year.insert(*p, year);
                self.log.push(format!("ELIMINATED {p} {year}"));
            }
        }
        Ok(())
    }
}

/// Plays one game. The log is a pure function of `config`.
pub fn run_game(config: &GameConfig) -> Result<GameResult, GameError> {
    config.validate()?;
    let map: &WorldMap = &config.map;
    let mut agents: BTreeMap<Power, Box<dyn Agent>> = BTreeMap::new();
    let mut names = BTreeMap::new();
    for (p, name) in map.powers().iter().zip(&config.agents) {
        let agent = create_agent(name, *p, Arc::clone(&config.map), config.seed)
            .map_err(|e| ConfigError::UnknownAgent(e.0))?;
        agents.insert(*p, agent);
        names.insert(*p, name.clone());
    }
    let state = GameState::initial(map);
    let mut d = Driver {
        config,
        map,
        utilities: compute_utilities(map),
        state,
        ledger: Ledger::new(),
        hostility: HostilityMatrix::new(map.powers()),
        agents,
        log: Vec::new(),
        elimination_year: BTreeMap::new(),
    };
    d.line(format!(
        "GAME seed={} map={} rounds={} max_year={}",
        config.seed, config.map_label, config.rounds, config.max_year
    ));
    for (p, n) in &names {
        d.line(format!("AGENT {p} {n}"));
    }

    let mut last: Option<Resolution> = None;
    let status = loop {
        let status = game_status(map, &d.state, config.max_year);
        if status != GameStatus::Ongoing {
            break status;
        }
        d.line(format!("PHASE {}", d.state.phase_key()));
        match d.state.phase {
            Season::Spring | Season::Fall => last = Some(d.movement()?),
            Season::Summer | Season::Autumn => {
                let r = last.take().ok_or_else(|| d.fault("retreat phase without a movement"))?;
                d.retreats(&r)?;
            }
            Season::Winter => d.winter()?,
        }
    };

    let outcome = match status {
        GameStatus::Solo(p) => Outcome::Solo(p),
        _ => Outcome::YearLimit,
    };
    for a in d.agents.values_mut() {
        a.on_game_end(&status);
    }
    match outcome {
        Outcome::Solo(p) => d.line(format!("OUTCOME SOLO {p}")),
        Outcome::YearLimit => d.line("OUTCOME YEAR_LIMIT".into()),
    }
    let final_centers: BTreeMap<Power, usize> =
        map.powers().iter().map(|p| (*p, d.state.sc_count(*p))).collect();
    let mut summary = String::from("FINAL");
    for (p, n) in &final_centers {
        let _ = write!(summary, " {p}={n}");
    }
    d.line(summary);
    let bids = d
        .agents
        .iter()
        .map(|(p, a)| (*p, a.bid_records().to_vec()))
        .collect();
    Ok(GameResult {
        seed: config.seed,
        outcome,
        agents: names,
        final_centers,
        elimination_year: d.elimination_year,
        final_year: d.state.year,
        log: d.log,
        ledger: d.ledger,
        bids,
    })
}
