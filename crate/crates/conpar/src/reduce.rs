//! Reductions to turn-based games, and the class dispatcher built on them.
//!
//! The bounded classes are solved by reduction: restricting player 1 to
//! pure moves, or to mixtures whose probabilities are fractions with
//! denominator at most `b`, yields a turn-based stochastic game in which
//! player 1 first commits to a (now atomic) choice and player 2 replies.
//! In turn-based games the almost-sure and limit-sure sets coincide and
//! pure memoryless strategies suffice for both players, so one solver
//! covers every bounded class.

use std::collections::HashSet;

use crate::error::Error;
use crate::game::{
    normalize_priorities, preferred_case, serialize_game, CaseTag, ConcurrentGame, SuccessorDist,
};
use crate::mdp::{fix_strategy, mc_almost_parity, mdp_positive_witness};
use crate::mucalc::{eval_formula, FormulaInstance, FormulaKind};
use crate::stateset::StateSet;
use crate::strategy::{extract_uniform_almost, MemorylessStrategy, StateChoice};

/// A turn-based stochastic game in the shared document shape: at a state
/// owned by one player, the other player's move set is the placeholder
/// singleton. `back_map` points reduction copies at their source states
/// (`None` for auxiliary states and for games parsed from files).
#[derive(Clone, Debug)]
pub struct TurnBasedGame {
    pub game: ConcurrentGame,
    /// 1 or 2 per state.
    pub owner: Vec<u8>,
    pub back_map: Vec<Option<usize>>,
}

impl TurnBasedGame {
    /// Project a set of turn-based states onto the source game.
    pub fn project(&self, set: &StateSet, source: &ConcurrentGame) -> StateSet {
        StateSet::from_indices(
            source.n_states(),
            set.iter().filter_map(|s| self.back_map[s]),
        )
    }
}

/// Serialize in the game document format with per-state `owner` fields.
pub fn serialize_turn_based(tb: &TurnBasedGame) -> String {
    serialize_game(&tb.game, Some(&tb.owner))
}

const PLACEHOLDER: &str = "-";

fn unique_name(taken: &mut HashSet<String>, base: String) -> String {
    let mut name = base;
    while !taken.insert(name.clone()) {
        name.push('\'');
    }
    name
}

/// Builder accumulating the turn-based game parts.
struct TbBuilder {
    names: Vec<String>,
    taken: HashSet<String>,
    priority: Vec<u32>,
    actions1: Vec<Vec<String>>,
    actions2: Vec<Vec<String>>,
    delta: Vec<Vec<Vec<SuccessorDist>>>,
    owner: Vec<u8>,
    back_map: Vec<Option<usize>>,
}

impl TbBuilder {
    fn new() -> Self {
        TbBuilder {
            names: Vec::new(),
            taken: HashSet::new(),
            priority: Vec::new(),
            actions1: Vec::new(),
            actions2: Vec::new(),
            delta: Vec::new(),
            owner: Vec::new(),
            back_map: Vec::new(),
        }
    }

    fn add_state(
        &mut self,
        base_name: String,
        priority: u32,
        owner: u8,
        back: Option<usize>,
    ) -> usize {
        let name = unique_name(&mut self.taken, base_name);
        self.names.push(name);
        self.priority.push(priority);
        self.owner.push(owner);
        self.back_map.push(back);
        self.actions1.push(Vec::new());
        self.actions2.push(Vec::new());
        self.delta.push(Vec::new());
        self.names.len() - 1
    }

    fn finish(self) -> TurnBasedGame {
        TurnBasedGame {
            game: ConcurrentGame::assemble(
                self.names,
                self.priority,
                self.actions1,
                self.actions2,
                self.delta,
            ),
            owner: self.owner,
            back_map: self.back_map,
        }
    }
}

/// Restrict player 1 to pure moves.
///
/// Every source state keeps its name and priority and becomes player-1
/// owned, with one successor state per move that hands the reply to
/// player 2. The state count is the source count plus the total move count.
pub fn reduce_pure(g: &ConcurrentGame) -> TurnBasedGame {
    let n = g.n_states();
    let probs = (0..n).any(|s| {
        (0..g.n1(s)).any(|a| (0..g.n2(s)).any(|b| g.dist(s, a, b).has_probabilities()))
    });
    let dirac_p = if probs { Some(1.0) } else { None };
    let mut tb = TbBuilder::new();
    for s in 0..n {
        tb.add_state(g.state_name(s).to_string(), g.priority(s), 1, Some(s));
    }
    for s in 0..n {
        let mut move_names = Vec::with_capacity(g.n1(s));
        let mut dirac = Vec::with_capacity(g.n1(s));
        for a in 0..g.n1(s) {
            let aux = tb.add_state(
                format!("({},{})", g.state_name(s), g.action1_name(s, a)),
                g.priority(s),
                2,
                None,
            );
            tb.actions1[aux] = vec![PLACEHOLDER.to_string()];
            tb.actions2[aux] = (0..g.n2(s))
                .map(|b| g.action2_name(s, b).to_string())
                .collect();
            tb.delta[aux] = vec![(0..g.n2(s)).map(|b| g.dist(s, a, b).clone()).collect()];
            move_names.push(g.action1_name(s, a).to_string());
            dirac.push(vec![SuccessorDist::new(vec![(aux, dirac_p)])]);
        }
        tb.actions1[s] = move_names;
        tb.actions2[s] = vec![PLACEHOLDER.to_string()];
        tb.delta[s] = dirac;
    }
    tb.finish()
}

// ---------------------------------------------------------------------------
// Finite precision
// ---------------------------------------------------------------------------

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

const DENOM_LIMIT: u128 = 1_000_000_000_000;
const WORK_LIMIT: u128 = 10_000_000;

fn lcm_upto(b: u32) -> u128 {
    let mut l: u128 = 1;
    for j in 2..=b as u128 {
        l = l / gcd(l as u64, j as u64) as u128 * j;
        if l > DENOM_LIMIT {
            return l;
        }
    }
    l
}

/// Numerators over `l` whose value is expressible as i/j with j <= b,
/// descending.
fn allowed_numerators(b: u32, l: u64) -> Vec<u64> {
    let mut vals: Vec<u64> = (1..=b as u64)
        .flat_map(|j| (0..=j).map(move |i| i * (l / j)))
        .collect();
    vals.sort_unstable_by(|x, y| y.cmp(x));
    vals.dedup();
    vals
}

/// Count the weight vectors of length `m` over `allowed` summing to `rem`.
/// Aborts once the count passes `limit` or the visited nodes pass the work
/// budget (`None`); a zero remainder completes in exactly one way.
fn count_vectors(m: usize, rem: u64, allowed: &[u64], limit: u128, work: &mut u128) -> Option<u128> {
    *work += 1;
    if *work > WORK_LIMIT {
        return None;
    }
    if rem == 0 || m == 0 {
        return Some((rem == 0) as u128);
    }
    let mut total: u128 = 0;
    for &v in allowed {
        if v > rem {
            continue;
        }
        total += count_vectors(m - 1, rem - v, allowed, limit, work)?;
        if total > limit {
            return Some(total);
        }
    }
    Some(total)
}

fn enumerate_vectors(m: usize, rem: u64, allowed: &[u64], prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if rem == 0 {
        let mut full = prefix.clone();
        full.resize(prefix.len() + m, 0);
        out.push(full);
        return;
    }
    if m == 0 {
        return;
    }
    for &v in allowed {
        if v > rem {
            continue;
        }
        prefix.push(v);
        enumerate_vectors(m - 1, rem - v, allowed, prefix, out);
        prefix.pop();
    }
}

fn fraction_label(num: u64, l: u64) -> String {
    if num == 0 {
        "0".to_string()
    } else if num == l {
        "1".to_string()
    } else {
        let d = gcd(num, l);
        format!("{}/{}", num / d, l / d)
    }
}

/// Restrict player 1 to mixtures whose probabilities are fractions with
/// denominator at most `b`.
///
/// Every such mixture becomes one atomic player-1 move leading to an
/// auxiliary player-2 state whose replies apply the mixed transition. The
/// total number of mixtures across states is capped at 10^6.
pub fn reduce_finite_precision(g: &ConcurrentGame, b: u32) -> Result<TurnBasedGame, Error> {
    assert!(b >= 1, "precision bound must be at least 1");
    let l_wide = lcm_upto(b);
    if l_wide > DENOM_LIMIT {
        return Err(Error::BlowupGuard {
            what: "precision denominator".into(),
            count: l_wide,
            limit: DENOM_LIMIT,
        });
    }
    let l = l_wide as u64;
    let allowed = allowed_numerators(b, l);
    const LIMIT: u128 = 1_000_000;
    let n = g.n_states();
    let mut total: u128 = 0;
    let mut work: u128 = 0;
    for s in 0..n {
        total += count_vectors(g.n1(s), l, &allowed, LIMIT, &mut work).ok_or(
            // The enumeration tree itself is too large to walk, so the
            // mixture count is unknowable within budget; refuse.
            Error::BlowupGuard {
                what: "finite-precision enumeration work".into(),
                count: WORK_LIMIT + 1,
                limit: WORK_LIMIT,
            },
        )?;
        if total > LIMIT {
            return Err(Error::BlowupGuard {
                what: "finite-precision mixtures".into(),
                count: total,
                limit: LIMIT,
            });
        }
    }
    let mut tb = TbBuilder::new();
    for s in 0..n {
        tb.add_state(g.state_name(s).to_string(), g.priority(s), 1, Some(s));
    }
    for s in 0..n {
        let mut vectors = Vec::new();
        enumerate_vectors(g.n1(s), l, &allowed, &mut Vec::new(), &mut vectors);
        let mut move_names = Vec::with_capacity(vectors.len());
        let mut dirac = Vec::with_capacity(vectors.len());
        for f in &vectors {
            let label = format!(
                "f[{}]",
                f.iter()
                    .map(|&num| fraction_label(num, l))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let aux = tb.add_state(
                format!("({},{})", g.state_name(s), label),
                g.priority(s),
                2,
                None,
            );
            tb.actions1[aux] = vec![PLACEHOLDER.to_string()];
            tb.actions2[aux] = (0..g.n2(s))
                .map(|bb| g.action2_name(s, bb).to_string())
                .collect();
            // One merged distribution per reply: the f-mixture of the rows.
            tb.delta[aux] = vec![(0..g.n2(s))
                .map(|bb| {
                    let mut merged: std::collections::BTreeMap<usize, f64> = Default::default();
                    for (a, &num) in f.iter().enumerate() {
                        if num == 0 {
                            continue;
                        }
                        let w = num as f64 / l as f64;
                        for (t, p) in g.dist(s, a, bb).numeric() {
                            *merged.entry(t).or_insert(0.0) += w * p;
                        }
                    }
                    SuccessorDist::new(merged.into_iter().map(|(t, p)| (t, Some(p))).collect())
                })
                .collect()];
            move_names.push(label);
            dirac.push(vec![SuccessorDist::new(vec![(aux, Some(1.0))])]);
        }
        tb.actions1[s] = move_names;
        tb.actions2[s] = vec![PLACEHOLDER.to_string()];
        tb.delta[s] = dirac;
    }
    Ok(tb.finish())
}

// ---------------------------------------------------------------------------
// Turn-based solving
// ---------------------------------------------------------------------------

/// Qualitative solution of a turn-based game: player 1's almost-sure (equal
/// here to limit-sure) winning set and pure memoryless witnesses for both
/// players, verified internally on the induced chain.
#[derive(Clone, Debug)]
pub struct TbSolution {
    pub win1: StateSet,
    /// Winning move per player-1 state on `win1`; 0 elsewhere.
    pub strat1: Vec<usize>,
    /// Spoiling move per player-2 state outside `win1`; 0 elsewhere.
    pub strat2: Vec<usize>,
}

/// Solve a turn-based stochastic parity game.
///
/// The winning set comes from the almost-sure expression over the game read
/// concurrently; at owned states the good-set witnesses collapse to single
/// moves. Player 2's spoiler is a positive best response in the MDP left
/// after fixing player 1. Both are checked on the induced chain before
/// returning: `win1` must satisfy the objective almost surely, its
/// complement must not.
pub fn tb_qual_parity(tb: &TurnBasedGame) -> Result<TbSolution, Error> {
    let g = &tb.game;
    let n = g.n_states();
    for s in 0..n {
        let ok = match tb.owner[s] {
            1 => g.n2(s) == 1,
            2 => g.n1(s) == 1,
            _ => false,
        };
        assert!(ok, "state {} is not turn-based", g.state_name(s));
    }
    let (gn, _) = normalize_priorities(g, preferred_case(g));
    let kind = match preferred_case(g) {
        CaseTag::Case1 => FormulaKind::AlmostCase1,
        CaseTag::Case2 => FormulaKind::AlmostCase2,
    };
    let res = eval_formula(&gn, &FormulaInstance::plain(kind, &gn))?;
    let win1 = res.winning.clone();

    let sigma1 = extract_uniform_almost(&gn, &res)?;
    let mut strat1 = vec![0usize; n];
    for s in win1.iter() {
        if let StateChoice::Support(u) = &sigma1.choices[s] {
            // At a player-1 state the reply is fixed, so a single move
            // suffices and the smallest witness is a singleton.
            debug_assert!(tb.owner[s] != 1 || u.len() == 1);
            strat1[s] = u[0];
        }
    }

    // Player 2 best-responds in the MDP obtained by fixing player 1.
    let m2 = fix_strategy(&gn, &sigma1, None)?;
    let (pos2, strat2) = mdp_positive_witness(&m2, false);
    if !win1.complement().is_subset(&pos2) {
        let s = win1.complement().difference(&pos2).iter().next().unwrap();
        return Err(Error::InternalSoundness {
            state: g.state_name(s).to_string(),
        });
    }

    // Fixing both strategies leaves a chain; check the claims on it.
    let chain = m2.restrict_to_policy(&strat2);
    let almost_even = mc_almost_parity(&chain, true);
    if !win1.is_subset(&almost_even) || win1.complement().intersects(&almost_even) {
        let s = win1
            .difference(&almost_even)
            .iter()
            .chain(win1.complement().intersect(&almost_even).iter())
            .next()
            .unwrap();
        return Err(Error::InternalSoundness {
            state: g.state_name(s).to_string(),
        });
    }
    Ok(TbSolution {
        win1,
        strat1,
        strat2,
    })
}

// ---------------------------------------------------------------------------
// Class dispatcher
// ---------------------------------------------------------------------------

/// The strategy classes with decidable qualitative winning sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyClass {
    /// Pure memoryless, almost-sure.
    PureMemoryless,
    /// Uniform-mixture memoryless, almost-sure.
    UniformMemoryless,
    /// Mixtures with probability denominators at most the bound, almost-sure.
    FinitePrecision(u32),
    /// Memoryless with arbitrary precision, limit-sure.
    LimitInfinite,
}

/// Winning set of player 1 for a class, over the source game's states.
pub fn solve_class(g: &ConcurrentGame, class: StrategyClass) -> Result<StateSet, Error> {
    match class {
        StrategyClass::UniformMemoryless => {
            let tag = preferred_case(g);
            let (gn, _) = normalize_priorities(g, tag);
            let kind = match tag {
                CaseTag::Case1 => FormulaKind::AlmostCase1,
                CaseTag::Case2 => FormulaKind::AlmostCase2,
            };
            Ok(eval_formula(&gn, &FormulaInstance::plain(kind, &gn))?.winning)
        }
        StrategyClass::LimitInfinite => {
            let (gn, _) = normalize_priorities(g, CaseTag::Case2);
            Ok(eval_formula(&gn, &FormulaInstance::plain(FormulaKind::LimitIPM, &gn))?.winning)
        }
        StrategyClass::PureMemoryless => {
            let tb = reduce_pure(g);
            let sol = tb_qual_parity(&tb)?;
            Ok(tb.project(&sol.win1, g))
        }
        StrategyClass::FinitePrecision(b) => {
            let tb = reduce_finite_precision(g, b)?;
            let sol = tb_qual_parity(&tb)?;
            Ok(tb.project(&sol.win1, g))
        }
    }
}

/// Forget rank structure, keeping supports.
pub fn uniformize(strat: &MemorylessStrategy) -> MemorylessStrategy {
    strat.uniformize()
}
