//! C ABI over `congestion-core`.
//!
//! Games and outcomes are opaque heap handles released with their `_free`
//! functions. Every fallible call returns a [`CongestStatus`]; on failure the
//! message is available from [`congest_last_error`] on the same thread.
//! Arc pairs are reported in the order the arcs were given, and players are
//! addressed by their 0-based position in the input weights.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use congestion_core::decentralization::optimal_strategy_with;
use congestion_core::io::{parse_game_file, parse_game_str, CliError};
use congestion_core::stackelberg::solve_spne_with;
use congestion_core::{
    solve_ce_bisection, ArcCost, EquilibriumOutcome, Error, GameInstance, OracleConfig,
    PlayerProfile,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CongestStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Solver = 3,
    Io = 4,
    InvalidIndex = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// A validated game.
pub struct CongestGame {
    game: GameInstance,
    oracle: OracleConfig,
}

/// A composite equilibrium of a [`CongestGame`].
pub struct CongestOutcome {
    outcome: EquilibriumOutcome,
    swapped: bool,
}

impl CongestOutcome {
    fn user_pair(&self, p: [f64; 2]) -> [f64; 2] {
        if self.swapped {
            [p[1], p[0]]
        } else {
            p
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn core_status(e: &Error) -> CongestStatus {
    if e.is_validation() {
        CongestStatus::Validation
    } else {
        CongestStatus::Solver
    }
}

fn cli_status(e: &CliError) -> CongestStatus {
    match e.exit_code() {
        2 => CongestStatus::Validation,
        4 => CongestStatus::Io,
        _ => CongestStatus::Solver,
    }
}

/// Runs `f`, recording any error message and turning panics into
/// [`CongestStatus::Panic`].
fn guard<F>(f: F) -> CongestStatus
where
    F: FnOnce() -> Result<(), (CongestStatus, String)>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CongestStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CongestStatus::Panic
        }
    }
}

fn null_error(name: &str) -> (CongestStatus, String) {
    (CongestStatus::NullPointer, format!("`{name}` is null"))
}

fn from_core(e: Error) -> (CongestStatus, String) {
    (core_status(&e), e.to_string())
}

fn from_cli(e: CliError) -> (CongestStatus, String) {
    (cli_status(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (CongestStatus, String)> {
    if p.is_null() {
        return Err(null_error(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (CongestStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

unsafe fn read_slice<'a>(
    p: *const f64,
    len: usize,
    name: &str,
) -> Result<&'a [f64], (CongestStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null_error(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn game_ref<'a>(
    game: *const CongestGame,
) -> Result<&'a CongestGame, (CongestStatus, String)> {
    game.as_ref().ok_or_else(|| null_error("game"))
}

unsafe fn outcome_ref<'a>(
    outcome: *const CongestOutcome,
) -> Result<&'a CongestOutcome, (CongestStatus, String)> {
    outcome.as_ref().ok_or_else(|| null_error("outcome"))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (CongestStatus, String)> {
    if out.is_null() {
        return Err(null_error(name));
    }
    out.write(value);
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), (CongestStatus, String)> {
    if out.is_null() {
        return Err(null_error("out"));
    }
    Ok(())
}

/// Stores a new game handle in `out`, which must already be checked.
unsafe fn store_game(out: *mut *mut CongestGame, game: GameInstance, oracle: OracleConfig) {
    out.write(Box::into_raw(Box::new(CongestGame { game, oracle })));
}

fn player_check(game: &CongestGame, player: usize) -> Result<(), (CongestStatus, String)> {
    let n = game.game.profile().user_count();
    if player >= n {
        return Err((
            CongestStatus::InvalidIndex,
            format!("player {player} out of range for {n} atomic players"),
        ));
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn congest_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a game from TOML text in the CLI's game-file format.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn congest_game_from_toml(
    toml: *const c_char,
    out: *mut *mut CongestGame,
) -> CongestStatus {
    guard(|| {
        let text = read_str(toml, "toml")?;
        check_out(out)?;
        let loaded = parse_game_str(text, "<memory>").map_err(from_cli)?;
        store_game(out, loaded.game, loaded.oracle);
        Ok(())
    })
}

/// Reads a TOML game file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn congest_game_load(
    path: *const c_char,
    out: *mut *mut CongestGame,
) -> CongestStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        check_out(out)?;
        let loaded = parse_game_file(Path::new(path)).map_err(from_cli)?;
        store_game(out, loaded.game, loaded.oracle);
        Ok(())
    })
}

/// Builds a game from two polynomial arc costs, given as ascending-degree
/// coefficients, a nonatomic mass and atomic weights. Costs are validated on
/// `[0, 2 M]`.
///
/// # Safety
/// Each array must hold at least its stated number of elements and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn congest_game_new(
    arc_a: *const f64,
    arc_a_len: usize,
    arc_b: *const f64,
    arc_b_len: usize,
    nonatomic: f64,
    weights: *const f64,
    weights_len: usize,
    out: *mut *mut CongestGame,
) -> CongestStatus {
    guard(|| {
        let a = read_slice(arc_a, arc_a_len, "arc_a")?;
        let b = read_slice(arc_b, arc_b_len, "arc_b")?;
        let w = read_slice(weights, weights_len, "weights")?;
        check_out(out)?;
        if a.is_empty() || b.is_empty() {
            return Err((
                CongestStatus::Validation,
                "arc costs need coefficients".into(),
            ));
        }
        let profile = PlayerProfile::new(nonatomic, w).map_err(from_core)?;
        let bound = 2.0 * profile.mass();
        let game = GameInstance::from_arcs(
            ArcCost::polynomial(a, bound),
            ArcCost::polynomial(b, bound),
            profile,
        )
        .map_err(from_core)?;
        store_game(out, game, OracleConfig::default());
        Ok(())
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn congest_game_free(game: *mut CongestGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of atomic players in the game as given.
///
/// # Safety
/// `game` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn congest_game_player_count(
    game: *const CongestGame,
    out: *mut usize,
) -> CongestStatus {
    guard(|| {
        let g = game_ref(game)?;
        write_out(out, g.game.profile().user_count(), "out")
    })
}

/// Computes the composite equilibrium.
///
/// # Safety
/// `game` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn congest_solve(
    game: *const CongestGame,
    out: *mut *mut CongestOutcome,
) -> CongestStatus {
    guard(|| {
        let g = game_ref(game)?;
        check_out(out)?;
        let outcome = solve_ce_bisection(&g.game).map_err(from_core)?;
        let handle = Box::into_raw(Box::new(CongestOutcome {
            outcome,
            swapped: g.game.network().swapped(),
        }));
        out.write(handle);
        Ok(())
    })
}

/// Releases an outcome. Null is ignored.
///
/// # Safety
/// `outcome` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn congest_outcome_free(outcome: *mut CongestOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Aggregate flow on each arc.
///
/// # Safety
/// `outcome` must be a live handle and `flows` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn congest_outcome_aggregate(
    outcome: *const CongestOutcome,
    flows: *mut f64,
) -> CongestStatus {
    guard(|| {
        let o = outcome_ref(outcome)?;
        write_out(flows.cast::<[f64; 2]>(), o.user_pair(o.outcome.xi), "flows")
    })
}

/// Per-unit cost of each arc.
///
/// # Safety
/// `outcome` must be a live handle and `costs` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn congest_outcome_arc_costs(
    outcome: *const CongestOutcome,
    costs: *mut f64,
) -> CongestStatus {
    guard(|| {
        let o = outcome_ref(outcome)?;
        write_out(
            costs.cast::<[f64; 2]>(),
            o.user_pair(o.outcome.arc_costs),
            "costs",
        )
    })
}

/// Social cost of the outcome.
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn congest_outcome_social_cost(
    outcome: *const CongestOutcome,
    out: *mut f64,
) -> CongestStatus {
    guard(|| {
        let o = outcome_ref(outcome)?;
        write_out(out, o.outcome.social_cost, "out")
    })
}

/// Flow of atomic player `player` on each arc, and that player's cost.
///
/// # Safety
/// `outcome` must be a live handle, `flows` must hold two doubles and `cost`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn congest_outcome_player(
    outcome: *const CongestOutcome,
    player: usize,
    flows: *mut f64,
    cost: *mut f64,
) -> CongestStatus {
    guard(|| {
        let o = outcome_ref(outcome)?;
        let p = o.outcome.user_player(player).ok_or_else(|| {
            (
                CongestStatus::InvalidIndex,
                format!("no atomic player {player}"),
            )
        })?;
        write_out(flows.cast::<[f64; 2]>(), o.user_pair(p.flow), "flows")?;
        write_out(cost, p.cost, "cost")
    })
}

/// Optimal single-atomic decentralization of `player`: the weight of the
/// one atomic deputy and the resulting cost.
///
/// # Safety
/// `game` must be a live handle; `s` and `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn congest_optimal_strategy(
    game: *const CongestGame,
    player: usize,
    s: *mut f64,
    cost: *mut f64,
) -> CongestStatus {
    guard(|| {
        let g = game_ref(game)?;
        player_check(g, player)?;
        let opt = optimal_strategy_with(&g.game, player, &g.oracle).map_err(from_core)?;
        write_out(s, opt.strategy.s, "s")?;
        write_out(cost, opt.cost, "cost")
    })
}

/// Stackelberg solution with `player` as leader: the leader's flow on each
/// arc and its cost.
///
/// # Safety
/// `game` must be a live handle, `flows` must hold two doubles and `cost`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn congest_stackelberg(
    game: *const CongestGame,
    player: usize,
    flows: *mut f64,
    cost: *mut f64,
) -> CongestStatus {
    guard(|| {
        let g = game_ref(game)?;
        player_check(g, player)?;
        let spne = solve_spne_with(&g.game, player, &g.oracle).map_err(from_core)?;
        let x = g
            .game
            .network()
            .to_user([spne.leader_flow.x1, spne.leader_flow.x2]);
        write_out(flows.cast::<[f64; 2]>(), x, "flows")?;
        write_out(cost, spne.leader_cost, "cost")
    })
}
