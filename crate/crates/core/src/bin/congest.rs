use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use congestion_core::io::{run_command, Command};

/// Composite congestion games on two parallel arcs.
#[derive(Debug, Parser)]
#[command(name = "congest", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Validate the game and report its canonical form.
    Check { game: PathBuf },
    /// Compute the composite equilibrium.
    Solve { game: PathBuf },
    /// Classify the regime and find the optimal decentralization of a player.
    Decentralize {
        game: PathBuf,
        /// 1-based atomic player number.
        #[arg(long)]
        player: usize,
    },
    /// Solve the game with the given player as Stackelberg leader.
    Stackelberg {
        game: PathBuf,
        #[arg(long)]
        player: usize,
    },
    /// Compare a decentralization strategy against not decentralizing.
    Impact {
        game: PathBuf,
        #[arg(long)]
        player: usize,
        /// TOML or JSON file with `nonatomic` and `atomic` parts.
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Tabulate equilibria over single-atomic strategies as CSV.
    Sweep {
        game: PathBuf,
        #[arg(long)]
        player: usize,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (game, command) = match cli.command {
        Cmd::Check { game } => (game, Command::Check),
        Cmd::Solve { game } => (game, Command::Solve),
        Cmd::Decentralize { game, player } => (game, Command::Decentralize { player }),
        Cmd::Stackelberg { game, player } => (game, Command::Stackelberg { player }),
        Cmd::Impact {
            game,
            player,
            strategy,
        } => (game, Command::Impact { player, strategy }),
        Cmd::Sweep {
            game,
            player,
            grid,
            out,
        } => (game, Command::Sweep { player, grid, out }),
    };
    let output = run_command(&command, &game);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(output.stdout.as_bytes());
    ExitCode::from(output.exit_code as u8)
}
