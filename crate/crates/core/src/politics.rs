//! The two-player zero-sum stochastic game over a graph and a tree target.
//!
//! Each round: player I declares an opposition target `o_k` and collects
//! `d_T(o_k, t_{k−1})`; player II declares a new target `t_k` and collects
//! `d_T(o_k, t_k)`; a fair coin decides who moves the game position to an
//! adjacent vertex (self-loops permitted). The game ends on arrival in the
//! terminal set `Y`, when player I additionally collects `d_T(f(x_K), t_K)`.
//! Under optimal play the expected total payoff to player I equals
//! `d_T(f̃(x₀), t₀)` for the infinity-harmonic extension `f̃` of `f`.
//!
//! Randomness discipline: one pseudorandom stream per trial, derived from
//! the master seed by trial index, consumed in a fixed order (coin first,
//! then any strategy randomness), so traces are seed-stable and estimates
//! are identical at any parallelism level.

use std::collections::BTreeSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{PartialVertexMap, SimplicialGraph, VertexId};
use crate::harmonic::{extend_inf_harmonic, TiePolicy};
use crate::targets::{MetricTree, TreePoint};
use crate::GEOM_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn name(self) -> &'static str {
        match self {
            Player::One => "I",
            Player::Two => "II",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub graph: SimplicialGraph,
    pub terminal_set: BTreeSet<VertexId>,
    pub target: MetricTree,
    pub terminal_values: PartialVertexMap<TreePoint>,
    pub start_vertex: VertexId,
    pub start_target: TreePoint,
    pub max_rounds: u32,
    pub master_seed: u64,
}

impl GameConfig {
    fn validate(&self) -> Result<()> {
        if self.terminal_set.is_empty() {
            return Err(Error::input("terminal set must be nonempty"));
        }
        if self.terminal_set.contains(&self.start_vertex) {
            return Err(Error::input("start vertex must lie outside the terminal set"));
        }
        if self.start_vertex.0 >= self.graph.vertex_count() {
            return Err(Error::input("start vertex out of range"));
        }
        for v in &self.terminal_set {
            if self.terminal_values.get(*v).is_none() {
                return Err(Error::input(format!(
                    "terminal vertex {:?} has no value",
                    self.graph.vertex_name(*v)
                )));
            }
        }
        self.target.canonicalize(&self.start_target)?;
        Ok(())
    }
}

/// Precomputed play data: the extension `f̃`, the maximal neighbor image
/// distance `δ`, and a deterministic midpoint-witness pair per free vertex.
#[derive(Debug, Clone)]
pub struct GameTable {
    pub values: Vec<TreePoint>,
    pub delta: Vec<f64>,
    pub witness_pair: Vec<Option<(usize, usize)>>,
    pub tree_diameter: f64,
}

/// Extends the terminal data over the whole graph and derives `δ` and the
/// witness pairs used by the optimal strategies. Self-loops are stripped for
/// the extension (they carry no geometry) but participate in `δ`.
pub fn vertex_amle(config: &GameConfig) -> Result<GameTable> {
    config.validate()?;
    let stripped = config.graph.without_self_loops();
    let mut boundary = PartialVertexMap::new();
    for v in &config.terminal_set {
        boundary.insert(*v, config.target.canonicalize(config.terminal_values.get(*v).unwrap())?);
    }
    let ext = extend_inf_harmonic(&stripped, &boundary, &config.target, TiePolicy::Lexicographic)?;
    let n = config.graph.vertex_count();
    let values: Vec<TreePoint> = (0..n).map(|i| *ext.map.get(VertexId(i)).unwrap()).collect();

    let mut delta = vec![0.0; n];
    let mut witness_pair = vec![None; n];
    for v in 0..n {
        if config.terminal_set.contains(&VertexId(v)) {
            continue;
        }
        let nbhd = config.graph.neighborhood_for_game(VertexId(v));
        let dists: Vec<f64> =
            nbhd.iter().map(|&u| config.target.distance(&values[u], &values[v])).collect();
        let m = dists.iter().cloned().fold(0.0, f64::max);
        delta[v] = m;
        let mut found = None;
        'outer: for (i, &u) in nbhd.iter().enumerate() {
            if (dists[i] - m).abs() > GEOM_TOL {
                continue;
            }
            for (j, &w) in nbhd.iter().enumerate().skip(i) {
                if (dists[j] - m).abs() > GEOM_TOL {
                    continue;
                }
                if (config.target.distance(&values[u], &values[w]) - 2.0 * m).abs() <= GEOM_TOL {
                    found = Some((u, w));
                    break 'outer;
                }
            }
        }
        witness_pair[v] = Some(found.ok_or_else(|| {
            Error::invariant(format!(
                "no midpoint witness pair at {:?}; the extension must be infinity-harmonic there",
                config.graph.vertex_name(VertexId(v))
            ))
        })?);
    }
    Ok(GameTable { values, delta, witness_pair, tree_diameter: config.target.diameter() })
}

/// Value predicted for the configured start state: `d_T(f̃(x₀), t₀)`.
pub fn predicted_value(config: &GameConfig, table: &GameTable) -> f64 {
    config.target.distance(&table.values[config.start_vertex.0], &config.start_target)
}

#[derive(Debug, Clone)]
pub struct GameState {
    pub round: u32,
    pub position: VertexId,
    pub target_point: TreePoint,
    pub last_opposition: Option<TreePoint>,
    pub payoff_to_one: f64,
    pub terminated: bool,
}

pub struct GameContext<'a> {
    pub config: &'a GameConfig,
    pub table: &'a GameTable,
}

/// A way of choosing moves. `choose_position` is consulted only for the
/// coin-toss winner and receives its role, since the proof's optimal play
/// moves toward the player's own declared point.
pub trait Strategy {
    fn choose_opposition(
        &mut self,
        state: &GameState,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> TreePoint;

    fn choose_target(
        &mut self,
        state: &GameState,
        opposition: &TreePoint,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> TreePoint;

    fn choose_position(
        &mut self,
        state: &GameState,
        role: Player,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> VertexId;
}

#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub round: u32,
    pub from: VertexId,
    pub opposition: TreePoint,
    pub old_target: TreePoint,
    pub new_target: TreePoint,
    pub coin_won_by_one: bool,
    pub to: VertexId,
    pub net_to_one: f64,
    /// `d_T(f̃(x_k), t_k)` plus the cumulative payoff to player I after the
    /// round — the quantity whose drift the optimal strategies control.
    pub monitored: f64,
}

/// Plays one round in place. The coin is drawn before either strategy
/// consumes randomness.
pub fn play_round(
    state: &mut GameState,
    ctx: &GameContext,
    one: &mut dyn Strategy,
    two: &mut dyn Strategy,
    rng: &mut dyn RngCore,
) -> Result<RoundRecord> {
    if state.terminated {
        return Err(Error::input("the game already ended"));
    }
    let coin_won_by_one = rng.random_bool(0.5);
    let from = state.position;
    let old_target = state.target_point;

    let opposition = one.choose_opposition(state, ctx, rng);
    let gain_one = ctx.config.target.distance(&opposition, &old_target);
    let new_target = two.choose_target(state, &opposition, ctx, rng);
    let gain_two = ctx.config.target.distance(&opposition, &new_target);

    state.last_opposition = Some(opposition);
    state.target_point = new_target;
    state.payoff_to_one += gain_one - gain_two;

    let (mover, role): (&mut dyn Strategy, Player) = if coin_won_by_one {
        (one, Player::One)
    } else {
        (two, Player::Two)
    };
    let to = mover.choose_position(state, role, ctx, rng);
    if !ctx.config.graph.is_move_legal(from, to) {
        return Err(Error::StrategyFault {
            player: role.name(),
            reason: format!(
                "moved from {:?} to non-adjacent {:?}",
                ctx.config.graph.vertex_name(from),
                ctx.config.graph.vertex_name(to)
            ),
        });
    }
    state.position = to;
    state.round += 1;
    if ctx.config.terminal_set.contains(&to) {
        let terminal = ctx.config.terminal_values.get(to).unwrap();
        state.payoff_to_one += ctx.config.target.distance(terminal, &new_target);
        state.terminated = true;
    }
    let monitored =
        ctx.config.target.distance(&ctx.table.values[to.0], &new_target) + state.payoff_to_one;
    Ok(RoundRecord {
        round: state.round,
        from,
        opposition,
        old_target,
        new_target,
        coin_won_by_one,
        to,
        net_to_one: gain_one - gain_two,
        monitored,
    })
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    /// Payoff accumulated so far; for censored trials this is what had been
    /// collected when the round cap hit, and it is excluded from value
    /// estimates.
    pub payoff_to_one: f64,
    pub rounds: u32,
    pub censored: bool,
    pub trace: Option<Vec<RoundRecord>>,
}

pub fn initial_state(config: &GameConfig) -> GameState {
    GameState {
        round: 0,
        position: config.start_vertex,
        target_point: config.start_target,
        last_opposition: None,
        payoff_to_one: 0.0,
        terminated: false,
    }
}

/// Plays a full game, stopping at the round cap; deterministic given the
/// rng state.
pub fn simulate_game(
    config: &GameConfig,
    table: &GameTable,
    one: &mut dyn Strategy,
    two: &mut dyn Strategy,
    rng: &mut dyn RngCore,
    want_trace: bool,
) -> Result<TrialResult> {
    let ctx = GameContext { config, table };
    let mut state = initial_state(config);
    let mut trace = want_trace.then(Vec::new);
    while !state.terminated && state.round < config.max_rounds {
        let rec = play_round(&mut state, &ctx, one, two, rng)?;
        if let Some(t) = trace.as_mut() {
            t.push(rec);
        }
    }
    Ok(TrialResult {
        payoff_to_one: state.payoff_to_one,
        rounds: state.round,
        censored: !state.terminated,
        trace,
    })
}

/// The per-trial random stream: a fixed-seed generator switched to the
/// trial's own stream.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// The strategy from the value proof: declare the element of
/// `{f̃(y), f̃(z)}` farthest from the reference point (ties toward `f̃(y)`),
/// and on a won toss move onto the vertex whose image is the declared point.
#[derive(Debug, Clone, Copy, Default)]
pub struct OptimalStrategy;

impl OptimalStrategy {
    fn extreme(
        state: &GameState,
        ctx: &GameContext,
        reference: &TreePoint,
    ) -> TreePoint {
        let (y, z) = ctx.table.witness_pair[state.position.0]
            .expect("optimal strategies act only at non-terminal positions");
        let fy = ctx.table.values[y];
        let fz = ctx.table.values[z];
        if ctx.config.target.distance(&fz, reference) > ctx.config.target.distance(&fy, reference)
        {
            fz
        } else {
            fy
        }
    }
}

impl Strategy for OptimalStrategy {
    fn choose_opposition(
        &mut self,
        state: &GameState,
        ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> TreePoint {
        Self::extreme(state, ctx, &state.target_point)
    }

    fn choose_target(
        &mut self,
        state: &GameState,
        opposition: &TreePoint,
        ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> TreePoint {
        Self::extreme(state, ctx, opposition)
    }

    fn choose_position(
        &mut self,
        state: &GameState,
        role: Player,
        ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> VertexId {
        let desired = match role {
            Player::One => state.last_opposition.unwrap(),
            Player::Two => state.target_point,
        };
        let (y, z) = ctx.table.witness_pair[state.position.0]
            .expect("optimal strategies act only at non-terminal positions");
        if ctx.table.values[z] == desired && ctx.table.values[y] != desired {
            VertexId(z)
        } else {
            VertexId(y)
        }
    }
}

/// Adversary: uniform choices among precomputed candidate points and legal
/// moves.
#[derive(Debug, Clone)]
pub struct UniformRandomStrategy {
    candidates: Vec<TreePoint>,
}

impl UniformRandomStrategy {
    pub fn new(config: &GameConfig, table: &GameTable) -> Self {
        let mut candidates: Vec<TreePoint> =
            (0..config.target.vertex_count())
                .map(|i| TreePoint::Vertex(crate::targets::TreeVertexId(i)))
                .collect();
        for v in &table.values {
            if !candidates.contains(v) {
                candidates.push(*v);
            }
        }
        UniformRandomStrategy { candidates }
    }

    fn pick(&self, rng: &mut dyn RngCore) -> TreePoint {
        self.candidates[(rng.next_u64() % self.candidates.len() as u64) as usize]
    }
}

impl Strategy for UniformRandomStrategy {
    fn choose_opposition(
        &mut self,
        _state: &GameState,
        _ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> TreePoint {
        self.pick(rng)
    }

    fn choose_target(
        &mut self,
        _state: &GameState,
        _opposition: &TreePoint,
        _ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> TreePoint {
        self.pick(rng)
    }

    fn choose_position(
        &mut self,
        state: &GameState,
        _role: Player,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> VertexId {
        let moves = ctx.config.graph.neighborhood_for_game(state.position);
        VertexId(moves[(rng.next_u64() % moves.len() as u64) as usize])
    }
}

/// Adversary: never fights over targets (declares the standing target and
/// concedes to the opposition) and always steps toward the terminal set.
#[derive(Debug, Clone)]
pub struct PullToTerminalStrategy {
    dist_to_terminal: Vec<u32>,
}

impl PullToTerminalStrategy {
    pub fn new(config: &GameConfig) -> Self {
        PullToTerminalStrategy { dist_to_terminal: distances_to_set(&config.graph, &config.terminal_set) }
    }
}

impl Strategy for PullToTerminalStrategy {
    fn choose_opposition(
        &mut self,
        state: &GameState,
        _ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> TreePoint {
        state.target_point
    }

    fn choose_target(
        &mut self,
        _state: &GameState,
        opposition: &TreePoint,
        _ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> TreePoint {
        *opposition
    }

    fn choose_position(
        &mut self,
        state: &GameState,
        _role: Player,
        ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> VertexId {
        step_by_key(ctx, state.position, |v| self.dist_to_terminal[v])
    }
}

/// Adversary: keeps targets where they are and runs away from the terminal
/// set whenever it wins the toss.
#[derive(Debug, Clone)]
pub struct EvadeTerminalStrategy {
    dist_to_terminal: Vec<u32>,
}

impl EvadeTerminalStrategy {
    pub fn new(config: &GameConfig) -> Self {
        EvadeTerminalStrategy { dist_to_terminal: distances_to_set(&config.graph, &config.terminal_set) }
    }
}

impl Strategy for EvadeTerminalStrategy {
    fn choose_opposition(
        &mut self,
        state: &GameState,
        _ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> TreePoint {
        state.target_point
    }

    fn choose_target(
        &mut self,
        state: &GameState,
        _opposition: &TreePoint,
        _ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> TreePoint {
        state.target_point
    }

    fn choose_position(
        &mut self,
        state: &GameState,
        _role: Player,
        ctx: &GameContext,
        _rng: &mut dyn RngCore,
    ) -> VertexId {
        step_by_key(ctx, state.position, |v| u32::MAX - self.dist_to_terminal[v].min(u32::MAX - 1))
    }
}

fn distances_to_set(graph: &SimplicialGraph, set: &BTreeSet<VertexId>) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    for v in set {
        dist[v.0] = 0;
        queue.push_back(v.0);
    }
    while let Some(v) = queue.pop_front() {
        for &u in graph.neighbors(VertexId(v)) {
            if dist[u] == u32::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

fn step_by_key(ctx: &GameContext, from: VertexId, key: impl Fn(usize) -> u32) -> VertexId {
    let moves = ctx.config.graph.neighborhood_for_game(from);
    VertexId(
        moves
            .iter()
            .copied()
            .min_by_key(|&v| (key(v), v))
            .expect("connected graph has a legal move"),
    )
}

/// Wrapper that plays its base strategy until the monitored quantity has
/// drifted more than twice the tree diameter from its start, then forces
/// termination: targets stop moving and every won toss steps toward a fixed
/// terminal vertex. The switch costs less than the drift that triggered it.
pub struct ForcingStrategy<B> {
    base: B,
    baseline: Option<f64>,
    active: bool,
    dist_to_terminal: Vec<u32>,
}

impl<B: Strategy> ForcingStrategy<B> {
    pub fn new(config: &GameConfig, base: B) -> Self {
        ForcingStrategy {
            base,
            baseline: None,
            active: false,
            dist_to_terminal: distances_to_set(&config.graph, &config.terminal_set),
        }
    }

    fn update_mode(&mut self, state: &GameState, ctx: &GameContext) {
        let monitored = ctx.config.target.distance(
            &ctx.table.values[state.position.0],
            &state.target_point,
        ) + state.payoff_to_one;
        let baseline = *self.baseline.get_or_insert(monitored);
        if !self.active && (monitored - baseline).abs() > 2.0 * ctx.table.tree_diameter {
            self.active = true;
        }
    }
}

impl<B: Strategy> Strategy for ForcingStrategy<B> {
    fn choose_opposition(
        &mut self,
        state: &GameState,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> TreePoint {
        self.update_mode(state, ctx);
        if self.active {
            state.target_point
        } else {
            self.base.choose_opposition(state, ctx, rng)
        }
    }

    fn choose_target(
        &mut self,
        state: &GameState,
        opposition: &TreePoint,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> TreePoint {
        self.update_mode(state, ctx);
        if self.active {
            *opposition
        } else {
            self.base.choose_target(state, opposition, ctx, rng)
        }
    }

    fn choose_position(
        &mut self,
        state: &GameState,
        role: Player,
        ctx: &GameContext,
        rng: &mut dyn RngCore,
    ) -> VertexId {
        self.update_mode(state, ctx);
        if self.active {
            step_by_key(ctx, state.position, |v| self.dist_to_terminal[v])
        } else {
            self.base.choose_position(state, role, ctx, rng)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValueEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub censored_fraction: f64,
    pub trials: usize,
    pub uncensored: usize,
}

fn aggregate(payoffs: &[(f64, bool)]) -> ValueEstimate {
    let trials = payoffs.len();
    let kept: Vec<f64> =
        payoffs.iter().filter(|(_, censored)| !censored).map(|&(p, _)| p).collect();
    let m = kept.len();
    let mean = if m > 0 { kept.iter().sum::<f64>() / m as f64 } else { f64::NAN };
    let std_error = if m > 1 {
        let var = kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        (var / m as f64).sqrt()
    } else {
        f64::INFINITY
    };
    ValueEstimate {
        mean,
        std_error,
        censored_fraction: (trials - m) as f64 / trials.max(1) as f64,
        trials,
        uncensored: m,
    }
}

fn run_one_trial(config: &GameConfig, table: &GameTable, index: u64) -> Result<(f64, bool)> {
    let mut rng = trial_rng(config.master_seed, index);
    let mut one = OptimalStrategy;
    let mut two = OptimalStrategy;
    let trial = simulate_game(config, table, &mut one, &mut two, &mut rng, false)?;
    Ok((trial.payoff_to_one, trial.censored))
}

/// Monte-Carlo value estimate under optimal play on both sides. Trials use
/// per-index streams and are aggregated in trial order, so the result is
/// bit-identical at any parallelism level (including the sequential
/// fallback build).
pub fn estimate_value(
    config: &GameConfig,
    trials: usize,
    jobs: Option<usize>,
) -> Result<ValueEstimate> {
    if trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let table = vertex_amle(config)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || -> Result<Vec<(f64, bool)>> {
            (0..trials as u64)
                .into_par_iter()
                .map(|i| run_one_trial(config, &table, i))
                .collect()
        };
        let payoffs = match jobs {
            Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::invariant(format!("thread pool: {e}")))?
                .install(run),
            _ => run(),
        }?;
        Ok(aggregate(&payoffs))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        estimate_value_seq_with_table(config, &table, trials)
    }
}

/// Sequential estimator, always available; the parallel entry point must
/// agree with it bit for bit.
pub fn estimate_value_seq(config: &GameConfig, trials: usize) -> Result<ValueEstimate> {
    if trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let table = vertex_amle(config)?;
    estimate_value_seq_with_table(config, &table, trials)
}

fn estimate_value_seq_with_table(
    config: &GameConfig,
    table: &GameTable,
    trials: usize,
) -> Result<ValueEstimate> {
    let mut payoffs = Vec::with_capacity(trials);
    for i in 0..trials as u64 {
        payoffs.push(run_one_trial(config, table, i)?);
    }
    Ok(aggregate(&payoffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Path 0 — 1 — 2 with terminal data at the segment endpoints.
    pub(crate) fn path_fixture() -> GameConfig {
        let graph = SimplicialGraph::new(
            &["0", "1", "2"],
            &[("0", "1"), ("1", "2")],
            false,
        )
        .unwrap();
        let target = MetricTree::new(&["a", "b"], &[("a", "b", 3.0)]).unwrap();
        let mut terminal_values = PartialVertexMap::new();
        let v = |s: &str| graph.vertex_id(s).unwrap();
        terminal_values.insert(v("0"), target.vertex_point("a").unwrap());
        terminal_values.insert(v("2"), target.vertex_point("b").unwrap());
        let start_target = target.vertex_point("a").unwrap();
        GameConfig {
            terminal_set: [v("0"), v("2")].into_iter().collect(),
            start_vertex: v("1"),
            graph,
            target,
            terminal_values,
            start_target,
            max_rounds: 10_000,
            master_seed: 42,
        }
    }

    #[test]
    fn table_has_midpoint_and_witness_pair() {
        let config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        let mid = table.values[config.graph.vertex_id("1").unwrap().0];
        let (e, _) = config.target.edge_between("a", "b").unwrap();
        assert_eq!(mid, config.target.point_on_edge(e, 1.5).unwrap());
        assert!((table.delta[1] - 1.5).abs() < 1e-12);
        assert_eq!(table.witness_pair[1], Some((0, 2)));
        assert!((predicted_value(&config, &table) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn optimal_choices_and_tie_breaks() {
        let config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        let ctx = GameContext { config: &config, table: &table };
        let state = initial_state(&config);
        let mut opt = OptimalStrategy;
        let mut rng = trial_rng(0, 0);
        // t0 = f(0): the opposition goes to the far endpoint f(2)
        let o = opt.choose_opposition(&state, &ctx, &mut rng);
        assert_eq!(o, config.target.vertex_point("b").unwrap());
        // the new target then flees to f(0)
        let t = opt.choose_target(&state, &o, &ctx, &mut rng);
        assert_eq!(t, config.target.vertex_point("a").unwrap());
        // equidistant reference breaks toward the y-side (vertex 0 here)
        let mut st2 = initial_state(&config);
        st2.target_point = table.values[1];
        let o2 = opt.choose_opposition(&st2, &ctx, &mut rng);
        assert_eq!(o2, config.target.vertex_point("a").unwrap());
    }

    #[test]
    fn one_round_hand_trace() {
        let config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        let ctx = GameContext { config: &config, table: &table };
        for seed in 0..8u64 {
            let mut rng = trial_rng(seed, 0);
            let mut state = initial_state(&config);
            let mut one = OptimalStrategy;
            let mut two = OptimalStrategy;
            let rec = play_round(&mut state, &ctx, &mut one, &mut two, &mut rng).unwrap();
            // net round payoff 3 - 3 = 0, then the coin moves x to 0 or 2
            assert!((rec.net_to_one - 0.0).abs() < 1e-12);
            assert!(state.terminated);
            if rec.coin_won_by_one {
                // I steps onto 2 (image b); terminal pickup d(f(2), t1 = a) = 3
                assert_eq!(state.position, config.graph.vertex_id("2").unwrap());
                assert!((state.payoff_to_one - 3.0).abs() < 1e-12);
            } else {
                assert_eq!(state.position, config.graph.vertex_id("0").unwrap());
                assert!((state.payoff_to_one - 0.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn estimate_matches_value_formula() {
        let config = path_fixture();
        let est = estimate_value(&config, 4_000, None).unwrap();
        assert!(est.censored_fraction == 0.0);
        assert!((est.mean - 1.5).abs() <= 3.0 * est.std_error, "mean={}", est.mean);
        // parallel and sequential agree bit for bit
        let seq = estimate_value_seq(&config, 4_000).unwrap();
        assert_eq!(est.mean.to_bits(), seq.mean.to_bits());
        assert_eq!(est.std_error.to_bits(), seq.std_error.to_bits());
    }

    #[test]
    fn optimal_declarations_never_coincide_at_live_positions() {
        // whenever δ(x_{k−1}) > 0, the two declared points differ
        let config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        for i in 0..200u64 {
            let mut rng = trial_rng(0x0707, i);
            let mut one = OptimalStrategy;
            let mut two = OptimalStrategy;
            let trial =
                simulate_game(&config, &table, &mut one, &mut two, &mut rng, true).unwrap();
            for rec in trial.trace.unwrap() {
                if table.delta[rec.from.0] > 0.0 {
                    assert_ne!(rec.opposition, rec.new_target);
                }
            }
        }
    }

    #[test]
    fn zero_round_cap_censors_with_zero_payoff() {
        let mut config = path_fixture();
        config.max_rounds = 0;
        let table = vertex_amle(&config).unwrap();
        let mut one = OptimalStrategy;
        let mut two = OptimalStrategy;
        let mut rng = trial_rng(1, 0);
        let trial =
            simulate_game(&config, &table, &mut one, &mut two, &mut rng, false).unwrap();
        assert!(trial.censored);
        assert_eq!(trial.rounds, 0);
        assert_eq!(trial.payoff_to_one, 0.0);
    }

    #[test]
    fn starting_on_the_extension_value_gives_zero() {
        let mut config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        config.start_target = table.values[config.start_vertex.0];
        assert_eq!(predicted_value(&config, &table), 0.0);
        let est = estimate_value(&config, 2_000, None).unwrap();
        assert!(est.mean.abs() <= 3.0 * est.std_error.max(1e-12), "mean={}", est.mean);
    }

    #[test]
    fn terminal_pulling_opponents_still_reach_the_end() {
        let config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        for i in 0..100u64 {
            let mut rng = trial_rng(0xD00D, i);
            let mut one = OptimalStrategy;
            let mut two = PullToTerminalStrategy::new(&config);
            let trial =
                simulate_game(&config, &table, &mut one, &mut two, &mut rng, true).unwrap();
            assert!(!trial.censored);
            for rec in trial.trace.unwrap() {
                assert!(config.graph.is_move_legal(rec.from, rec.to));
                assert!(rec.monitored.is_finite());
            }
        }
    }

    #[test]
    fn scaling_the_tree_scales_the_estimate() {
        let config = path_fixture();
        let scaled_tree = config.target.scaled(2.0).unwrap();
        let mut scaled_values = PartialVertexMap::new();
        for (v, p) in config.terminal_values.iter() {
            scaled_values.insert(v, config.target.scale_point(p, 2.0));
        }
        let scaled = GameConfig {
            graph: config.graph.clone(),
            terminal_set: config.terminal_set.clone(),
            start_target: config.target.scale_point(&config.start_target, 2.0),
            target: scaled_tree,
            terminal_values: scaled_values,
            start_vertex: config.start_vertex,
            max_rounds: config.max_rounds,
            master_seed: config.master_seed,
        };
        let base = estimate_value(&config, 2_000, None).unwrap();
        let twice = estimate_value(&scaled, 2_000, None).unwrap();
        assert!((twice.mean - 2.0 * base.mean).abs() < 1e-9);
    }

    #[test]
    fn illegal_moves_are_attributed() {
        struct Teleport;
        impl Strategy for Teleport {
            fn choose_opposition(
                &mut self,
                state: &GameState,
                _ctx: &GameContext,
                _rng: &mut dyn RngCore,
            ) -> TreePoint {
                state.target_point
            }
            fn choose_target(
                &mut self,
                _state: &GameState,
                opposition: &TreePoint,
                _ctx: &GameContext,
                _rng: &mut dyn RngCore,
            ) -> TreePoint {
                *opposition
            }
            fn choose_position(
                &mut self,
                _state: &GameState,
                _role: Player,
                _ctx: &GameContext,
                _rng: &mut dyn RngCore,
            ) -> VertexId {
                VertexId(0) // not adjacent when starting from 1 on a 5-path
            }
        }
        let graph = SimplicialGraph::new(
            &["0", "1", "2", "3", "4"],
            &[("0", "1"), ("1", "2"), ("2", "3"), ("3", "4")],
            false,
        )
        .unwrap();
        let target = MetricTree::new(&["a", "b"], &[("a", "b", 1.0)]).unwrap();
        let v = |s: &str| graph.vertex_id(s).unwrap();
        let mut terminal_values = PartialVertexMap::new();
        terminal_values.insert(v("0"), target.vertex_point("a").unwrap());
        terminal_values.insert(v("4"), target.vertex_point("b").unwrap());
        let config = GameConfig {
            terminal_set: [v("0"), v("4")].into_iter().collect(),
            start_vertex: v("2"),
            start_target: target.vertex_point("a").unwrap(),
            graph,
            target,
            terminal_values,
            max_rounds: 10,
            master_seed: 0,
        };
        let table = vertex_amle(&config).unwrap();
        let ctx = GameContext { config: &config, table: &table };
        let mut state = initial_state(&config);
        let mut one = Teleport;
        let mut two = OptimalStrategy;
        let mut rng = trial_rng(0, 0);
        // run rounds until player I wins a toss and teleports
        let mut saw_fault = false;
        for _ in 0..20 {
            match play_round(&mut state, &ctx, &mut one, &mut two, &mut rng) {
                Err(Error::StrategyFault { player, .. }) => {
                    assert_eq!(player, "I");
                    saw_fault = true;
                    break;
                }
                Ok(_) if state.terminated => break,
                Ok(_) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(saw_fault || state.terminated);
    }

    #[test]
    fn self_loops_are_legal_moves() {
        let graph = SimplicialGraph::new(
            &["0", "1", "2"],
            &[("0", "1"), ("1", "2"), ("1", "1")],
            true,
        )
        .unwrap();
        let target = MetricTree::new(&["a", "b"], &[("a", "b", 2.0)]).unwrap();
        let v = |s: &str| graph.vertex_id(s).unwrap();
        let mut terminal_values = PartialVertexMap::new();
        terminal_values.insert(v("0"), target.vertex_point("a").unwrap());
        terminal_values.insert(v("2"), target.vertex_point("b").unwrap());
        let config = GameConfig {
            terminal_set: [v("0"), v("2")].into_iter().collect(),
            start_vertex: v("1"),
            start_target: target.vertex_point("a").unwrap(),
            graph,
            target,
            terminal_values,
            max_rounds: 1_000,
            master_seed: 9,
        };
        let table = vertex_amle(&config).unwrap();
        // δ at the looped vertex includes the vertex itself (distance 0, harmless)
        assert!(table.delta[1] > 0.0);
        let mut one = UniformRandomStrategy::new(&config, &table);
        let mut two = UniformRandomStrategy::new(&config, &table);
        let mut rng = trial_rng(3, 0);
        let trial = simulate_game(&config, &table, &mut one, &mut two, &mut rng, true).unwrap();
        // the trace only contains legal steps, some of which may loop at "1"
        for rec in trial.trace.unwrap() {
            assert!(config.graph.is_move_legal(rec.from, rec.to));
        }
    }

    #[test]
    fn forcing_wrapper_terminates_against_an_evader() {
        let config = path_fixture();
        let table = vertex_amle(&config).unwrap();
        let mut censored = 0;
        for i in 0..50u64 {
            let mut rng = trial_rng(17, i);
            let mut one = ForcingStrategy::new(&config, OptimalStrategy);
            let mut two = EvadeTerminalStrategy::new(&config);
            let trial =
                simulate_game(&config, &table, &mut one, &mut two, &mut rng, false).unwrap();
            if trial.censored {
                censored += 1;
            }
        }
        assert_eq!(censored, 0);
    }
}
