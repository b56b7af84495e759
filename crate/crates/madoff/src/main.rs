use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use madoff::game::DEFAULT_MAX_YEAR;
use madoff::{audit_log, load_map, run_game, run_tournament, GameConfig, TournamentSpec};
use madoff_core::session::DEFAULT_ROUNDS;
use madoff_core::utility::compute_utilities;

#[derive(Parser)]
#[command(name = "madoff", version, about = "Seeded Diplomacy games with binding-deal negotiation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GameArgs {
    /// `standard` or a map file
    #[arg(long, default_value = "standard")]
    map: String,
    /// One agent name per power, comma separated (madoff, random, silent)
    #[arg(long, value_delimiter = ',', default_value = "madoff,random,random,random,random,random,random")]
    agents: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Negotiation rounds per movement phase
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    rounds: u32,
    /// First year not played
    #[arg(long, default_value_t = DEFAULT_MAX_YEAR)]
    max_year: u16,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and write its log
    Play {
        #[command(flatten)]
        game: GameArgs,
        /// Log file (stdout if omitted)
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Play a batch of games and summarize per agent
    Tournament {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 10)]
        games: usize,
        #[arg(long, default_value_t = 1)]
        seed_stride: u64,
        /// Keep every agent on its listed power instead of rotating seats
        #[arg(long)]
        fixed_seats: bool,
        /// Worker threads (1 = serial)
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// CSV summary file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print raw and normalized province utilities
    Utilities {
        #[arg(long, default_value = "standard")]
        map: String,
    },
}

fn config(args: &GameArgs) -> Result<GameConfig, String> {
    let (map, label) = load_map(&args.map).map_err(|e| e.to_string())?;
    let c = GameConfig {
        map,
        map_label: label,
        agents: args.agents.iter().map(|a| a.trim().to_string()).collect(),
        seed: args.seed,
        rounds: args.rounds,
        max_year: args.max_year,
    };
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Play { game, log } => {
            let c = config(&game)?;
            let result = run_game(&c).map_err(|e| e.to_string())?;
            let text = result.log_text();
            match log {
                Some(path) => fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?,
                None => print!("{text}"),
            }
            let audit = audit_log(&result.log);
            for v in &audit.violations {
                eprintln!("audit: {v}");
            }
            eprintln!(
                "{} binding deals, {} commitments and {} DMZs audited, {} violations",
                audit.binding_deals,
                audit.commitments_checked,
                audit.dmzs_checked,
                audit.violations.len()
            );
        }
        Command::Tournament {
            game,
            games,
            seed_stride,
            fixed_seats,
            threads,
            out,
        } => {
            if games == 0 {
                return Err("--games must be at least 1".into());
            }
            let spec = TournamentSpec {
                base: config(&game)?,
                games,
                seed_stride,
                rotate_seats: !fixed_seats,
            };
            let summary = run_tournament(&spec, threads);
            print!("{}", summary.to_table());
            if let Some(path) = out {
                let csv = summary.to_csv().map_err(|e| e.to_string())?;
                fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
            }
        }
        Command::Utilities { map } => {
            let (map, _) = load_map(&map).map_err(|e| e.to_string())?;
            for (id, raw, norm) in compute_utilities(&map).iter() {
                println!("{id:<4} {raw:>8.3} {norm:>8.4}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
