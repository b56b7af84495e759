//! Batches of seeded games and their per-agent summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::game::{run_game, GameConfig, GameResult, Outcome};

#[derive(Debug, Clone)]
pub struct TournamentSpec {
    pub base: GameConfig,
    pub games: usize,
    /// Game `i` uses seed `base.seed + i * seed_stride`.
    pub seed_stride: u64,
    /// Rotate the agent list by `i` seats in game `i`, so each agent plays
    /// every power over a long enough run.
    pub rotate_seats: bool,
}

impl TournamentSpec {
    pub fn new(base: GameConfig, games: usize) -> Self {
        TournamentSpec {
            base,
            games,
            seed_stride: 1,
            rotate_seats: true,
        }
    }

    pub fn config(&self, index: usize) -> GameConfig {
        let mut c = self.base.clone();
        c.seed = self
            .base
            .seed
            .wrapping_add((index as u64).wrapping_mul(self.seed_stride));
        if self.rotate_seats && !c.agents.is_empty() {
            let n = c.agents.len();
            c.agents.rotate_right(index % n);
        }
        c
    }
}

/// One line per game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRow {
    pub index: usize,
    pub seed: u64,
    pub result: Result<GameLine, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameLine {
    pub outcome: Outcome,
    pub final_year: u16,
    /// `(power, agent, centers)` in power order.
    pub seats: Vec<(String, String, usize)>,
    pub binding_deals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentStats {
    pub name: String,
    pub seats: usize,
    pub mean_centers: f64,
    pub solos: usize,
    pub survival_rate: f64,
    /// Mean over eliminated seats only.
    pub mean_elimination_year: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TournamentSummary {
    pub games: Vec<GameRow>,
    pub agents: Vec<AgentStats>,
    pub failed: usize,
}

fn line_of(r: &GameResult) -> GameLine {
    GameLine {
        outcome: r.outcome,
        final_year: r.final_year,
        seats: r
            .agents
            .iter()
            .map(|(p, a)| (p.to_string(), a.clone(), r.final_centers[p]))
            .collect(),
        binding_deals: r.ledger.len(),
    }
}

#[derive(Default)]
struct Acc {
    seats: usize,
    centers: usize,
    solos: usize,
    survived: usize,
    eliminated: usize,
    elimination_years: u64,
}

/// Aggregates finished games. Failed games are counted, not averaged.
pub fn summarize(results: &[(usize, u64, Result<GameResult, String>)]) -> TournamentSummary {
    let mut acc: BTreeMap<String, Acc> = BTreeMap::new();
    let mut games = Vec::new();
    let mut failed = 0;
    for (index, seed, r) in results {
        match r {
            Ok(g) => {
                for (p, name) in &g.agents {
                    let a = acc.entry(name.clone()).or_default();
                    a.seats += 1;
                    a.centers += g.final_centers[p];
                    if g.outcome == Outcome::Solo(*p) {
                        a.solos += 1;
                    }
                    match g.elimination_year.get(p) {
                        None => a.survived += 1,
                        Some(y) => {
                            a.eliminated += 1;
                            a.elimination_years += u64::from(*y);
                        }
                    }
                }
                games.push(GameRow {
                    index: *index,
                    seed: *seed,
                    result: Ok(line_of(g)),
                });
            }
            Err(e) => {
                failed += 1;
                games.push(GameRow {
                    index: *index,
                    seed: *seed,
                    result: Err(e.clone()),
                });
            }
        }
    }
    let agents = acc
        .into_iter()
        .map(|(name, a)| AgentStats {
            name,
            seats: a.seats,
            mean_centers: a.centers as f64 / a.seats as f64,
            solos: a.solos,
            survival_rate: a.survived as f64 / a.seats as f64,
            mean_elimination_year: (a.eliminated > 0)
                .then(|| a.elimination_years as f64 / a.eliminated as f64),
        })
        .collect();
    TournamentSummary {
        games,
        agents,
        failed,
    }
}

/// Runs every game of `spec`. With `threads > 1` games run on a dedicated
/// pool of that size; results are joined by game index either way, so the
/// summary does not depend on `threads`.
pub fn run_tournament(spec: &TournamentSpec, threads: usize) -> TournamentSummary {
    let play = |i: usize| {
        let c = spec.config(i);
        let seed = c.seed;
        (i, seed, run_game(&c).map_err(|e| e.to_string()))
    };
    let results: Vec<_> = if threads <= 1 {
        (0..spec.games).map(play).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| (0..spec.games).into_par_iter().map(play).collect())
    };
    summarize(&results)
}

fn outcome_text(o: Outcome) -> String {
    match o {
        Outcome::Solo(p) => format!("SOLO {p}"),
        Outcome::YearLimit => "YEAR_LIMIT".into(),
    }
}

impl TournamentSummary {
    /// Aligned text table: per-game lines, then per-agent aggregates.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        for g in &self.games {
            match &g.result {
                Ok(l) => {
                    let _ = write!(
                        s,
                        "game {:>4} seed {:>20} {:<12} {} deals={:<4}",
                        g.index,
                        g.seed,
                        outcome_text(l.outcome),
                        l.final_year,
                        l.binding_deals
                    );
                    for (p, a, n) in &l.seats {
                        let _ = write!(s, " {p}:{a}={n}");
                    }
                    s.push('\n');
                }
                Err(e) => {
                    let _ = writeln!(s, "game {:>4} seed {:>20} FAILED {e}", g.index, g.seed);
                }
            }
        }
        s.push('\n');
        let _ = writeln!(
            s,
            "{:<10} {:>6} {:>12} {:>6} {:>9} {:>13}",
            "agent", "seats", "mean_centers", "solos", "survival", "mean_elim_yr"
        );
        for a in &self.agents {
            let elim = a
                .mean_elimination_year
                .map_or_else(|| "-".to_string(), |y| format!("{y:.2}"));
            let _ = writeln!(
                s,
                "{:<10} {:>6} {:>12.3} {:>6} {:>9.3} {:>13}",
                a.name, a.seats, a.mean_centers, a.solos, a.survival_rate, elim
            );
        }
        let _ = writeln!(s, "failed games: {}", self.failed);
        s
    }

    /// Per-agent aggregates as CSV.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "agent",
            "seats",
            "mean_centers",
            "solos",
            "survival_rate",
            "mean_elimination_year",
        ])?;
        for a in &self.agents {
            w.write_record([
                a.name.clone(),
                a.seats.to_string(),
                format!("{:.6}", a.mean_centers),
                a.solos.to_string(),
                format!("{:.6}", a.survival_rate),
                a.mean_elimination_year
                    .map_or_else(String::new, |y| format!("{y:.6}")),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
