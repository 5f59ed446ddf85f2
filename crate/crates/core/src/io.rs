//! Game files, structured reports and command dispatch for the `congest`
//! binary.
//!
//! A game file is TOML:
//!
//! ```toml
//! [[arcs]]
//! label = "a"
//! coefficients = [10.0, 1.0]   # c(t) = 10 + t, ascending degree
//!
//! [[arcs]]
//! label = "b"
//! coefficients = [1.0, 10.0]
//! # kind = "tabulated"          # [c(0), c'(knot_0), ..., c'(knot_K)]
//! # domain_bound = 5.0          # defaults to twice the total mass
//!
//! [players]
//! nonatomic = 0.0
//! atomic = [0.5, 0.5]
//!
//! [options]
//! tolerance = 1e-10
//! ```
//!
//! Reports are JSON objects with `schema_version`, `command`, `status` and
//! either `result` or `error`. Every number carries at most 12 significant
//! digits and every per-arc pair is given in the file's arc order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::analysis::{impact_report, sweep};
use crate::cost_model::{ArcCost, AssumptionCase, CanonicalNetwork};
use crate::decentralization::{
    optimal_strategy_with, CaseClassification, DecentralizationStrategy, Regime,
};
use crate::equilibrium::{
    classify_mode, residuals, solve_ce_bisection, AtomicOutcome, EquilibriumOutcome, GameInstance,
    Mode, Origin, PlayerProfile,
};
use crate::error::Error;
use crate::oracle::OracleConfig;
use crate::stackelberg::solve_spne_with;

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable overriding the default iteration tolerance.
pub const TOLERANCE_ENV: &str = "CONGEST_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Parse { .. } | CliError::Input(_) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) => EXIT_SOLVER,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_IO => "io",
            EXIT_VALIDATION => "validation",
            _ => "solver",
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` at 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{}", round12(x))
}

fn r2(p: [f64; 2]) -> [f64; 2] {
    [round12(p[0]), round12(p[1])]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKindSpec {
    #[default]
    Polynomial,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub label: String,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub kind: ArcKindSpec,
    pub domain_bound: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayersSpec {
    #[serde(default)]
    pub nonatomic: f64,
    #[serde(default)]
    pub atomic: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    /// Best-response iteration tolerance of the oracles.
    pub tolerance: Option<f64>,
    /// Grid step of the SA-strategy oracle, relative to the player weight.
    pub sa_grid_resolution: Option<f64>,
    /// Grid step of the leader-flow oracle, relative to the leader weight.
    pub leader_grid_resolution: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub arcs: Vec<ArcSpec>,
    pub players: PlayersSpec,
    #[serde(default)]
    pub options: OptionsSpec,
}

/// A parsed and validated game with its presentation metadata.
#[derive(Debug, Clone)]
pub struct LoadedGame {
    pub game: GameInstance,
    /// Arc labels in file order.
    pub labels: [String; 2],
    pub oracle: OracleConfig,
}

impl LoadedGame {
    fn net(&self) -> &CanonicalNetwork {
        self.game.network()
    }

    /// Canonical pair to file order.
    fn user_pair(&self, p: [f64; 2]) -> [f64; 2] {
        r2(self.net().to_user(p))
    }

    fn canonical_label(&self, canonical_arc: usize) -> &str {
        let idx = if self.net().swapped() {
            1 - canonical_arc
        } else {
            canonical_arc
        };
        &self.labels[idx]
    }

    fn player_count(&self) -> usize {
        self.game.profile().user_count()
    }

    /// Converts a 1-based player number into a 0-based user index.
    pub fn player_index(&self, player: usize) -> Result<usize, CliError> {
        if player == 0 || player > self.player_count() {
            return Err(CliError::Input(format!(
                "player must be in 1..={}, got {player}",
                self.player_count()
            )));
        }
        Ok(player - 1)
    }
}

fn build_arc(spec: &ArcSpec, default_bound: f64) -> Result<ArcCost, CliError> {
    if spec.coefficients.is_empty() {
        return Err(CliError::Input(format!(
            "arc {:?} has no coefficients",
            spec.label
        )));
    }
    let bound = spec.domain_bound.unwrap_or(default_bound);
    Ok(match spec.kind {
        ArcKindSpec::Polynomial => ArcCost::polynomial(&spec.coefficients, bound),
        ArcKindSpec::Tabulated => {
            ArcCost::tabulated(spec.coefficients[0], &spec.coefficients[1..], bound)
        }
    })
}

/// Oracle settings from file options, then `CONGEST_TOL`, then defaults.
fn oracle_config(options: &OptionsSpec) -> Result<OracleConfig, CliError> {
    let mut cfg = OracleConfig::default();
    if let Ok(raw) = std::env::var(TOLERANCE_ENV) {
        cfg.tolerance = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{TOLERANCE_ENV}={raw:?} is not a number")))?;
    }
    if let Some(t) = options.tolerance {
        cfg.tolerance = t;
    }
    if let Some(r) = options.sa_grid_resolution {
        cfg.grid_resolution = r;
    }
    if let Some(r) = options.leader_grid_resolution {
        cfg.leader_resolution = r;
    }
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(cfg.tolerance) || cfg.tolerance > 1e-7 {
        return Err(CliError::Input(format!(
            "tolerance must lie in (0, 1e-7], got {}",
            cfg.tolerance
        )));
    }
    if !positive(cfg.grid_resolution) || !positive(cfg.leader_resolution) {
        return Err(CliError::Input("grid resolutions must be positive".into()));
    }
    Ok(cfg)
}

/// Parses and validates game-file text. `origin` names the source in errors.
pub fn parse_game_str(text: &str, origin: &str) -> Result<LoadedGame, CliError> {
    let file: GameFile = toml::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    load_game(&file)
}

/// Validates a deserialized game file.
pub fn load_game(file: &GameFile) -> Result<LoadedGame, CliError> {
    if file.arcs.len() != 2 {
        return Err(CliError::Input(format!(
            "exactly two arcs are required, got {}",
            file.arcs.len()
        )));
    }
    let labels = [file.arcs[0].label.clone(), file.arcs[1].label.clone()];
    if labels.iter().any(|l| l.is_empty()) || labels[0] == labels[1] {
        return Err(CliError::Input(
            "arc labels must be non-empty and distinct".into(),
        ));
    }
    let profile = PlayerProfile::new(file.players.nonatomic, &file.players.atomic)?;
    let default_bound = 2.0 * profile.mass();
    let a = build_arc(&file.arcs[0], default_bound)?;
    let b = build_arc(&file.arcs[1], default_bound)?;
    let game = GameInstance::from_arcs(a, b, profile)?;
    Ok(LoadedGame {
        game,
        labels,
        oracle: oracle_config(&file.options)?,
    })
}

pub fn parse_game_file(path: &Path) -> Result<LoadedGame, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_game_str(&text, &path.display().to_string())
}

/// Reads a `{nonatomic, atomic}` strategy; `.json` files are JSON, anything
/// else TOML.
pub fn parse_strategy_file(path: &Path) -> Result<DecentralizationStrategy, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let parse_err = |message: String| CliError::Parse {
        path: path.display().to_string(),
        message,
    };
    let spec: PlayersSpec = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?
    } else {
        toml::from_str(&text).map_err(|e| parse_err(e.to_string()))?
    };
    Ok(DecentralizationStrategy::new(spec.nonatomic, spec.atomic)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerReport {
    /// `p<i>` for the file's atomic player `i`, `p<i>.d<j>` for deputies.
    pub id: String,
    pub weight: f64,
    pub flow: [f64; 2],
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonatomicReport {
    pub mass: f64,
    /// Part of `mass` held by nonatomic deputies.
    pub deputy_share: f64,
    pub flow: [f64; 2],
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeReport {
    pub arcs: [String; 2],
    pub mode: Mode,
    pub xi: [f64; 2],
    pub arc_costs: [f64; 2],
    pub social_cost: f64,
    pub nonatomic: NonatomicReport,
    pub players: Vec<PlayerReport>,
}

fn player_id(origin: Origin, decentralizer: Option<usize>) -> String {
    match origin {
        Origin::User(i) => format!("p{}", i + 1),
        Origin::Deputy(d) => format!("p{}.d{}", decentralizer.map_or(0, |i| i + 1), d + 1),
    }
}

fn order_key(origin: Origin) -> (usize, usize) {
    match origin {
        Origin::User(i) => (0, i),
        Origin::Deputy(d) => (1, d),
    }
}

impl OutcomeReport {
    fn new(
        loaded: &LoadedGame,
        outcome: &EquilibriumOutcome,
        decentralizer: Option<usize>,
    ) -> Self {
        let mut atomic: Vec<&AtomicOutcome> = outcome.atomic.iter().collect();
        atomic.sort_by_key(|p| order_key(p.origin));
        OutcomeReport {
            arcs: loaded.labels.clone(),
            mode: outcome.mode,
            xi: loaded.user_pair(outcome.xi),
            arc_costs: loaded.user_pair(outcome.arc_costs),
            social_cost: round12(outcome.social_cost),
            nonatomic: NonatomicReport {
                mass: round12(outcome.nonatomic_mass),
                deputy_share: round12(outcome.deputy_nonatomic),
                flow: loaded.user_pair(outcome.nonatomic_flow),
                cost: round12(outcome.nonatomic_cost),
            },
            players: atomic
                .into_iter()
                .map(|p| PlayerReport {
                    id: player_id(p.origin, decentralizer),
                    weight: round12(p.weight),
                    flow: loaded.user_pair(p.flow),
                    cost: round12(p.cost),
                })
                .collect(),
        }
    }

    /// Checks feasibility and cost bookkeeping at relative tolerance `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<(), String> {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
        let mut xi = self.nonatomic.flow;
        if !close(
            self.nonatomic.flow[0] + self.nonatomic.flow[1],
            self.nonatomic.mass,
        ) {
            return Err("nonatomic flows do not add up to the nonatomic mass".into());
        }
        for p in &self.players {
            if p.flow.iter().any(|f| *f < -tol) {
                return Err(format!("{} has a negative flow", p.id));
            }
            if !close(p.flow[0] + p.flow[1], p.weight) {
                return Err(format!("flows of {} do not add up to its weight", p.id));
            }
            if !close(
                p.cost,
                p.flow[0] * self.arc_costs[0] + p.flow[1] * self.arc_costs[1],
            ) {
                return Err(format!("cost of {} does not match its flows", p.id));
            }
            xi[0] += p.flow[0];
            xi[1] += p.flow[1];
        }
        if !close(xi[0], self.xi[0]) || !close(xi[1], self.xi[1]) {
            return Err("aggregate flows do not match the per-player flows".into());
        }
        let cs = self.xi[0] * self.arc_costs[0] + self.xi[1] * self.arc_costs[1];
        if !close(cs, self.social_cost) {
            return Err("social cost does not match the aggregate flows".into());
        }
        Ok(())
    }

    /// Rebuilds the canonical-order outcome on `net` so that the CE
    /// conditions can be re-checked.
    pub fn to_outcome(&self, net: &CanonicalNetwork) -> Result<EquilibriumOutcome, String> {
        let pair = |p: [f64; 2]| net.from_user(p);
        let mut atomic = Vec::with_capacity(self.players.len());
        for p in &self.players {
            let origin = parse_player_id(&p.id).ok_or_else(|| format!("bad player id {}", p.id))?;
            atomic.push(AtomicOutcome {
                weight: p.weight,
                origin,
                flow: pair(p.flow),
                cost: p.cost,
            });
        }
        atomic.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        let mut outcome = EquilibriumOutcome {
            atomic,
            nonatomic_mass: self.nonatomic.mass,
            deputy_nonatomic: self.nonatomic.deputy_share,
            nonatomic_flow: pair(self.nonatomic.flow),
            xi: pair(self.xi),
            arc_costs: pair(self.arc_costs),
            nonatomic_cost: self.nonatomic.cost,
            social_cost: self.social_cost,
            mode: self.mode,
        };
        outcome.mode = classify_mode(&outcome).map_err(|e| e.to_string())?;
        Ok(outcome)
    }
}

fn parse_player_id(id: &str) -> Option<Origin> {
    let rest = id.strip_prefix('p')?;
    match rest.split_once(".d") {
        Some((_, d)) => Some(Origin::Deputy(d.parse::<usize>().ok()?.checked_sub(1)?)),
        None => Some(Origin::User(rest.parse::<usize>().ok()?.checked_sub(1)?)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub arcs: [String; 2],
    pub mass: f64,
    pub case: AssumptionCase,
    pub swapped: bool,
    /// Label of the arc playing the role of arc 1.
    pub canonical_arc1: String,
    /// Crossing point as flow on `canonical_arc1`.
    pub xi_hat: Option<f64>,
    pub big_h: f64,
    pub big_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub case: AssumptionCase,
    pub swapped: bool,
    pub outcome: OutcomeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub regime: Regime,
    pub big_h: f64,
    pub xi_hat: Option<f64>,
    pub l0: Option<usize>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub plateau_edge: f64,
    pub breakpoints: Vec<f64>,
}

impl From<&CaseClassification> for ClassificationReport {
    fn from(c: &CaseClassification) -> Self {
        let o = |v: Option<f64>| v.map(round12);
        ClassificationReport {
            regime: c.regime,
            big_h: round12(c.big_h),
            xi_hat: o(c.xi_hat),
            l0: c.l0,
            c0: o(c.c0),
            c1: o(c.c1),
            c2: o(c.c2),
            plateau_edge: round12(c.plateau_edge),
            breakpoints: c.breakpoints.iter().map(|b| round12(*b)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecentralizeReport {
    pub player: usize,
    pub weight: f64,
    pub classification: ClassificationReport,
    /// Weight of the single atomic deputy; the rest goes nonatomic.
    pub optimal_s: f64,
    pub cost: f64,
    pub oracle_s: f64,
    pub oracle_cost: f64,
    pub outcome: OutcomeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackelbergReport {
    pub leader: usize,
    pub leader_flow: [f64; 2],
    pub leader_cost: f64,
    pub optimal_s: f64,
    /// Numeric optimum as flow on the file's first arc.
    pub oracle_flow: [f64; 2],
    pub oracle_cost: f64,
    pub followers: OutcomeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactReportOut {
    pub player: usize,
    pub regime: Regime,
    pub delta_social: f64,
    pub delta_decentralizer: f64,
    /// `(player number, cost change)` pairs.
    pub delta_opponent_costs: Vec<(usize, f64)>,
    pub baseline: OutcomeReport,
    pub treated: OutcomeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub command: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

fn ok_json<T: Serialize>(command: &str, result: T) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        status: "ok".into(),
        result: Some(result),
        error: None,
    };
    serde_json::to_string_pretty(&env).expect("reports serialize") + "\n"
}

pub fn error_json(command: &str, err: &CliError) -> String {
    let env: Envelope<()> = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        status: "error".into(),
        result: None,
        error: Some(ErrorInfo {
            kind: err.kind().into(),
            message: err.to_string(),
            exit_code: err.exit_code(),
        }),
    };
    serde_json::to_string_pretty(&env).expect("reports serialize") + "\n"
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Check,
    Solve,
    /// Player numbers are 1-based.
    Decentralize {
        player: usize,
    },
    Stackelberg {
        player: usize,
    },
    Impact {
        player: usize,
        strategy: PathBuf,
    },
    Sweep {
        player: usize,
        grid: usize,
        out: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Solve => "solve",
            Command::Decentralize { .. } => "decentralize",
            Command::Stackelberg { .. } => "stackelberg",
            Command::Impact { .. } => "impact",
            Command::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub stdout: String,
}

/// Runs one command on the game at `game_path`. Failures produce an error
/// report and a nonzero exit code.
pub fn run_command(cmd: &Command, game_path: &Path) -> CommandOutput {
    match parse_game_file(game_path).and_then(|g| execute(cmd, &g)) {
        Ok(stdout) => CommandOutput {
            exit_code: EXIT_OK,
            stdout,
        },
        Err(e) => CommandOutput {
            exit_code: e.exit_code(),
            stdout: error_json(cmd.name(), &e),
        },
    }
}

/// Runs one command on an already loaded game and returns its output text.
pub fn execute(cmd: &Command, loaded: &LoadedGame) -> Result<String, CliError> {
    let name = cmd.name();
    let game = &loaded.game;
    let net = game.network();
    match cmd {
        Command::Check => {
            let aux = net.aux();
            Ok(ok_json(
                name,
                CheckReport {
                    arcs: loaded.labels.clone(),
                    mass: round12(net.mass),
                    case: net.case(),
                    swapped: net.swapped(),
                    canonical_arc1: loaded.canonical_label(0).to_string(),
                    xi_hat: aux.xi_hat.map(round12),
                    big_h: round12(aux.big_h),
                    big_a: aux.big_a.map(round12),
                },
            ))
        }
        Command::Solve => {
            let outcome = solve_ce_bisection(game)?;
            Ok(ok_json(name, solve_report(loaded, &outcome)))
        }
        Command::Decentralize { player } => {
            let i = loaded.player_index(*player)?;
            let opt = optimal_strategy_with(game, i, &loaded.oracle)?;
            let (weight, _) = crate::decentralization::split_profile(game, i)?;
            let outcome = crate::decentralization::induced_outcome(
                game,
                i,
                &DecentralizationStrategy::from_sa(opt.strategy, weight),
            )?;
            Ok(ok_json(
                name,
                DecentralizeReport {
                    player: *player,
                    weight: round12(weight),
                    classification: (&opt.classification).into(),
                    optimal_s: round12(opt.strategy.s),
                    cost: round12(opt.cost),
                    oracle_s: round12(opt.oracle_s),
                    oracle_cost: round12(opt.oracle_cost),
                    outcome: OutcomeReport::new(loaded, &outcome, Some(i)),
                },
            ))
        }
        Command::Stackelberg { player } => {
            let i = loaded.player_index(*player)?;
            let sol = solve_spne_with(game, i, &loaded.oracle)?;
            let weight = sol.leader_flow.x1 + sol.leader_flow.x2;
            Ok(ok_json(
                name,
                StackelbergReport {
                    leader: *player,
                    leader_flow: loaded.user_pair([sol.leader_flow.x1, sol.leader_flow.x2]),
                    leader_cost: round12(sol.leader_cost),
                    optimal_s: round12(sol.strategy.s),
                    oracle_flow: loaded.user_pair([sol.oracle_x1, weight - sol.oracle_x1]),
                    oracle_cost: round12(sol.oracle_cost),
                    followers: OutcomeReport::new(loaded, &sol.follower_outcome, None),
                },
            ))
        }
        Command::Impact { player, strategy } => {
            let i = loaded.player_index(*player)?;
            let alpha = parse_strategy_file(strategy)?;
            let r = impact_report(game, i, &alpha)?;
            Ok(ok_json(
                name,
                ImpactReportOut {
                    player: *player,
                    regime: r.regime.regime,
                    delta_social: round12(r.delta_social),
                    delta_decentralizer: round12(r.delta_decentralizer),
                    delta_opponent_costs: r
                        .delta_opponent_costs
                        .iter()
                        .map(|(j, d)| (j + 1, round12(*d)))
                        .collect(),
                    baseline: OutcomeReport::new(loaded, &r.baseline, Some(i)),
                    treated: OutcomeReport::new(loaded, &r.treated, Some(i)),
                },
            ))
        }
        Command::Sweep { player, grid, out } => {
            let i = loaded.player_index(*player)?;
            let table = sweep(game, i, *grid)?;
            let csv = table.to_csv(loaded.canonical_label(0), |j| format!("p{}", j + 1));
            match out {
                Some(path) => {
                    fs::write(path, &csv).map_err(|e| CliError::Io {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
    }
}

/// Solve report for an outcome of `loaded`'s game.
pub fn solve_report(loaded: &LoadedGame, outcome: &EquilibriumOutcome) -> SolveReport {
    let net = loaded.game.network();
    SolveReport {
        case: net.case(),
        swapped: net.swapped(),
        outcome: OutcomeReport::new(loaded, outcome, None),
    }
}

/// Parses a serialized solve report and re-checks it against `loaded`:
/// bookkeeping, CE conditions and the cost ordering of the cheaper arc.
pub fn verify_solve_report(loaded: &LoadedGame, json: &str, tol: f64) -> Result<(), String> {
    let env: Envelope<SolveReport> = serde_json::from_str(json).map_err(|e| e.to_string())?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(format!("unexpected schema version {}", env.schema_version));
    }
    let report = env.result.ok_or("report carries no result")?;
    if report.outcome.arcs != loaded.labels {
        return Err("arc labels changed".into());
    }
    report.outcome.check_invariants(tol)?;
    let net = loaded.game.network();
    let outcome = report.outcome.to_outcome(net)?;
    let scale = outcome.arc_costs[0].abs().max(1.0);
    let r = residuals(&**net, &outcome);
    if r.atomic > tol * scale || r.nonatomic > tol * scale {
        return Err(format!("CE conditions violated: {r:?}"));
    }
    Ok(())
}
