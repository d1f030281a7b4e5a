//! One-player analysis: the models obtained by fixing a player-1 strategy.
//!
//! Fixing a memoryless player-1 strategy turns the game into a finite MDP
//! whose controller is player 2, the best-responding adversary. Soundness
//! checks and oracles all reduce to questions about these MDPs: can the
//! adversary reach an end component whose maximal priority has the wrong
//! parity, and with what probability.
//!
// Index-coupled loops over per-state action tables read better than their
// enumerate() forms here.
#![allow(clippy::needless_range_loop)]
//! Quantitative values are computed by value iteration to a tight residual
//! followed by policy iteration with exact linear solves, so the returned
//! vector is correct to solver precision rather than to the iteration
//! residual.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::Error;
use crate::game::ConcurrentGame;
use crate::stateset::StateSet;
use crate::strategy::{MemorylessStrategy, StateChoice};

/// Finite MDP with one action set per state and numeric transition
/// probabilities. Support-only games get the uniform substitution when the
/// model is built; `explicit` records whether the source carried real
/// numbers.
#[derive(Clone, Debug)]
pub struct Mdp {
    acts: Vec<usize>,
    /// trans[s][a]: sparse distribution, ascending state index.
    trans: Vec<Vec<Vec<(usize, f64)>>>,
    priority: Vec<u32>,
    explicit: bool,
}

/// Per-state probabilities, within 1e-9 of the true optimum.
pub type ValueVector = Vec<f64>;

impl Mdp {
    pub(crate) fn new(
        trans: Vec<Vec<Vec<(usize, f64)>>>,
        priority: Vec<u32>,
        explicit: bool,
    ) -> Mdp {
        let acts = trans.iter().map(|t| t.len()).collect();
        Mdp {
            acts,
            trans,
            priority,
            explicit,
        }
    }

    pub fn n_states(&self) -> usize {
        self.acts.len()
    }

    pub fn n_actions(&self, s: usize) -> usize {
        self.acts[s]
    }

    pub fn succ(&self, s: usize, a: usize) -> &[(usize, f64)] {
        &self.trans[s][a]
    }

    pub fn priority(&self, s: usize) -> u32 {
        self.priority[s]
    }

    /// Restrict to a single action per state (a Markov chain).
    pub fn restrict_to_policy(&self, policy: &[usize]) -> Mdp {
        let trans = policy
            .iter()
            .enumerate()
            .map(|(s, &a)| vec![self.trans[s][a].clone()])
            .collect();
        Mdp::new(trans, self.priority.clone(), self.explicit)
    }
}

/// Fix a player-1 memoryless strategy, leaving player 2 as the controller.
///
/// Support choices mix uniformly; rank choices mix proportionally to
/// `eps^rank` and need `eps` in (0,1).
pub fn fix_strategy(
    g: &ConcurrentGame,
    strat: &MemorylessStrategy,
    eps: Option<f64>,
) -> Result<Mdp, Error> {
    if strat.choices.len() != g.n_states() {
        return Err(Error::BadStrategy(format!(
            "strategy covers {} states, game has {}",
            strat.choices.len(),
            g.n_states()
        )));
    }
    if let Some(e) = eps {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::BadStrategy(format!("eps {e} is outside (0,1)")));
        }
    }
    let n = g.n_states();
    let mut trans = Vec::with_capacity(n);
    let mut explicit = true;
    for s in 0..n {
        let weights: Vec<(usize, f64)> = match &strat.choices[s] {
            StateChoice::Support(u) => {
                if u.is_empty() {
                    return Err(Error::BadStrategy(format!(
                        "empty support at state {}",
                        g.state_name(s)
                    )));
                }
                let w = 1.0 / u.len() as f64;
                u.iter().map(|&a| (a, w)).collect()
            }
            StateChoice::Ranks(ra) => {
                if ra.ranks.is_empty() {
                    return Err(Error::BadStrategy(format!(
                        "empty rank domain at state {}",
                        g.state_name(s)
                    )));
                }
                let e = eps.ok_or(Error::MissingEps)?;
                let raw: Vec<(usize, f64)> = ra
                    .ranks
                    .iter()
                    .map(|(&a, &r)| (a, e.powi(r as i32)))
                    .collect();
                let total: f64 = raw.iter().map(|(_, w)| w).sum();
                raw.into_iter().map(|(a, w)| (a, w / total)).collect()
            }
        };
        for &(a, _) in &weights {
            if a >= g.n1(s) {
                return Err(Error::BadStrategy(format!(
                    "action index {a} out of range at state {}",
                    g.state_name(s)
                )));
            }
        }
        let mut per_b = Vec::with_capacity(g.n2(s));
        for b in 0..g.n2(s) {
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for &(a, w) in &weights {
                let dist = g.dist(s, a, b);
                explicit &= dist.has_probabilities();
                for (t, p) in dist.numeric() {
                    *merged.entry(t).or_insert(0.0) += w * p;
                }
            }
            per_b.push(merged.into_iter().collect::<Vec<_>>());
        }
        trans.push(per_b);
    }
    Ok(Mdp::new(trans, (0..n).map(|s| g.priority(s)).collect(), explicit))
}

// ---------------------------------------------------------------------------
// Graph helpers
// ---------------------------------------------------------------------------

fn scc_components(
    m: &Mdp,
    alive: &StateSet,
    retained: &[Vec<bool>],
) -> Vec<Vec<usize>> {
    let n = m.n_states();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for s in alive.iter() {
        for a in 0..m.n_actions(s) {
            if retained[s][a] {
                for &(t, _) in m.succ(s, a) {
                    graph.add_edge(nodes[s], nodes[t], ());
                }
            }
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|comp| {
            comp.into_iter()
                .map(|ix| ix.index())
                .filter(|s| alive.contains(*s))
                .collect::<Vec<_>>()
        })
        .filter(|comp: &Vec<usize>| !comp.is_empty())
        .collect()
}

/// Maximal end components of the sub-MDP on `states` with `allowed` actions.
/// Returns the component state sets plus the retained action mask.
fn max_end_components(
    m: &Mdp,
    states: &StateSet,
    allowed: &[Vec<bool>],
) -> (Vec<StateSet>, Vec<Vec<bool>>) {
    let n = m.n_states();
    let mut alive = states.clone();
    let mut retained: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            (0..m.n_actions(s))
                .map(|a| alive.contains(s) && allowed[s][a])
                .collect()
        })
        .collect();
    loop {
        let mut changed = false;
        // Retire actions whose support leaves the live set.
        for s in alive.iter().collect::<Vec<_>>() {
            for a in 0..m.n_actions(s) {
                if retained[s][a] && m.succ(s, a).iter().any(|&(t, _)| !alive.contains(t)) {
                    retained[s][a] = false;
                    changed = true;
                }
            }
        }
        let comps = scc_components(m, &alive, &retained);
        let mut comp_of = vec![usize::MAX; n];
        for (i, comp) in comps.iter().enumerate() {
            for &s in comp {
                comp_of[s] = i;
            }
        }
        // Retire actions that cross components.
        for s in alive.iter().collect::<Vec<_>>() {
            for a in 0..m.n_actions(s) {
                if retained[s][a]
                    && m.succ(s, a).iter().any(|&(t, _)| comp_of[t] != comp_of[s])
                {
                    retained[s][a] = false;
                    changed = true;
                }
            }
        }
        // Drop states with no actions left.
        for s in alive.iter().collect::<Vec<_>>() {
            if (0..m.n_actions(s)).all(|a| !retained[s][a]) {
                alive.remove(s);
                changed = true;
            }
        }
        if !changed {
            let comps = scc_components(m, &alive, &retained)
                .into_iter()
                .map(|c| StateSet::from_indices(n, c))
                .collect();
            return (comps, retained);
        }
    }
}

/// States inside end components whose maximal priority has the requested
/// parity, found by peeling maximal-priority states of the wrong parity and
/// recursing. Also reports, per accepted component, its retained action mask
/// and one maximal-priority state, for witness construction.
fn winning_end_components(
    m: &Mdp,
    states: &StateSet,
    allowed: &[Vec<bool>],
    want_even: bool,
    accepted: &mut Vec<(StateSet, Vec<Vec<bool>>, usize)>,
) -> StateSet {
    let n = m.n_states();
    let mut out = StateSet::empty(n);
    if states.is_empty() {
        return out;
    }
    let (comps, retained) = max_end_components(m, states, allowed);
    for comp in comps {
        let d = comp.iter().map(|s| m.priority(s)).max().unwrap();
        if (d % 2 == 0) == want_even {
            let target = comp.iter().find(|&s| m.priority(s) == d).unwrap();
            accepted.push((comp.clone(), retained.clone(), target));
            out.union_with(&comp);
        } else {
            let keep =
                StateSet::from_indices(n, comp.iter().filter(|&s| m.priority(s) != d));
            out.union_with(&winning_end_components(m, &keep, &retained, want_even, accepted));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Markov chain analysis
// ---------------------------------------------------------------------------

/// Almost-sure parity satisfaction in a Markov chain (an MDP with exactly
/// one action everywhere): the states from which every reachable bottom SCC
/// has a maximal priority of the requested parity.
pub fn mc_almost_parity(m: &Mdp, want_even: bool) -> StateSet {
    assert!(
        (0..m.n_states()).all(|s| m.n_actions(s) == 1),
        "chain analysis needs a single action per state"
    );
    let n = m.n_states();
    let all = StateSet::full(n);
    let retained: Vec<Vec<bool>> = (0..n).map(|_| vec![true]).collect();
    let comps = scc_components(m, &all, &retained);
    let mut comp_of = vec![0usize; n];
    for (i, comp) in comps.iter().enumerate() {
        for &s in comp {
            comp_of[s] = i;
        }
    }
    let mut bad = StateSet::empty(n);
    for comp in &comps {
        let bottom = comp.iter().all(|&s| {
            m.succ(s, 0)
                .iter()
                .all(|&(t, _)| comp_of[t] == comp_of[s])
        });
        if bottom {
            let d = comp.iter().map(|&s| m.priority(s)).max().unwrap();
            if (d % 2 == 0) != want_even {
                for &s in comp {
                    bad.insert(s);
                }
            }
        }
    }
    // Everything that can reach a bad bottom component fails.
    let mut tainted = bad;
    loop {
        let mut grew = false;
        for s in 0..n {
            if !tainted.contains(s)
                && m.succ(s, 0).iter().any(|&(t, _)| tainted.contains(t))
            {
                tainted.insert(s);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    tainted.complement()
}

// ---------------------------------------------------------------------------
// Qualitative MDP analysis
// ---------------------------------------------------------------------------

fn all_allowed(m: &Mdp) -> Vec<Vec<bool>> {
    (0..m.n_states()).map(|s| vec![true; m.n_actions(s)]).collect()
}

/// (almost-sure, positive) winning sets of the controller for the parity
/// objective of the requested polarity.
pub fn mdp_qual_parity(m: &Mdp, want_even: bool) -> (StateSet, StateSet) {
    let n = m.n_states();
    let mut accepted = Vec::new();
    let target = winning_end_components(m, &StateSet::full(n), &all_allowed(m), want_even, &mut accepted);
    (almost_reach(m, &target), positive_reach(m, &target).0)
}

/// Positive winning set together with a pure memoryless witness policy: on
/// the set, the policy gives positive probability of satisfying the parity
/// objective against the chain dynamics.
pub fn mdp_positive_witness(m: &Mdp, want_even: bool) -> (StateSet, Vec<usize>) {
    let n = m.n_states();
    let mut accepted = Vec::new();
    let target = winning_end_components(m, &StateSet::full(n), &all_allowed(m), want_even, &mut accepted);
    let mut choice = vec![0usize; n];
    // Inside an accepted component, steer toward one maximal-priority state
    // through retained actions; every closed recurrent class of the induced
    // chain then contains it, so the maximal priority seen infinitely often
    // is exactly the component's.
    for (comp, retained, target_state) in &accepted {
        let mut marked = StateSet::empty(n);
        marked.insert(*target_state);
        loop {
            let mut grew = false;
            for s in comp.iter() {
                if marked.contains(s) {
                    continue;
                }
                if let Some(a) = (0..m.n_actions(s)).find(|&a| {
                    retained[s][a] && m.succ(s, a).iter().any(|&(t, _)| marked.contains(t))
                }) {
                    marked.insert(s);
                    choice[s] = a;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        debug_assert_eq!(&marked, comp, "component is strongly connected");
        // The target state itself stays inside the component.
        let a = (0..m.n_actions(*target_state))
            .find(|&a| retained[*target_state][a])
            .expect("accepted component retains an action");
        choice[*target_state] = a;
    }
    let (positive, reach_choice) = positive_reach(m, &target);
    for s in positive.iter() {
        if !target.contains(s) {
            choice[s] = reach_choice[s];
        }
    }
    (positive, choice)
}

/// Almost-sure reachability of `target`: the usual two-level fixpoint that
/// keeps only states never forced to leave the candidate set before hitting
/// the target.
fn almost_reach(m: &Mdp, target: &StateSet) -> StateSet {
    let n = m.n_states();
    let mut x = StateSet::full(n);
    loop {
        let mut y = target.clone();
        loop {
            let mut grew = false;
            for s in 0..n {
                if y.contains(s) {
                    continue;
                }
                let ok = (0..m.n_actions(s)).any(|a| {
                    let succ = m.succ(s, a);
                    succ.iter().all(|&(t, _)| x.contains(t))
                        && succ.iter().any(|&(t, _)| y.contains(t))
                });
                if ok {
                    y.insert(s);
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        if y == x {
            return x;
        }
        x = y;
    }
}

/// Positive reachability plus the action that first connects each state.
fn positive_reach(m: &Mdp, target: &StateSet) -> (StateSet, Vec<usize>) {
    let n = m.n_states();
    let mut z = target.clone();
    let mut choice = vec![0usize; n];
    loop {
        let mut grew = false;
        for s in 0..n {
            if z.contains(s) {
                continue;
            }
            if let Some(a) =
                (0..m.n_actions(s)).find(|&a| m.succ(s, a).iter().any(|&(t, _)| z.contains(t)))
            {
                z.insert(s);
                choice[s] = a;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    (z, choice)
}

// ---------------------------------------------------------------------------
// Quantitative MDP analysis
// ---------------------------------------------------------------------------

/// Optimal parity value per state. Refuses support-only sources unless
/// uniform substitution is explicitly allowed.
pub fn mdp_value_parity(
    m: &Mdp,
    want_even: bool,
    substitute_uniform: bool,
) -> Result<ValueVector, Error> {
    if !m.explicit && !substitute_uniform {
        return Err(Error::NoProbabilities);
    }
    let n = m.n_states();
    let mut accepted = Vec::new();
    let target = winning_end_components(m, &StateSet::full(n), &all_allowed(m), want_even, &mut accepted);
    // The parity value equals the maximal probability of reaching the
    // winning end components.
    let (can_reach, _) = positive_reach(m, &target);

    let mut v = vec![0.0f64; n];
    for s in target.iter() {
        v[s] = 1.0;
    }
    // Value iteration to get close, then policy iteration for exactness.
    for _ in 0..200_000 {
        let mut residual = 0.0f64;
        for s in 0..n {
            if target.contains(s) || !can_reach.contains(s) {
                continue;
            }
            let best = (0..m.n_actions(s))
                .map(|a| m.succ(s, a).iter().map(|&(t, p)| p * v[t]).sum::<f64>())
                .fold(0.0f64, f64::max);
            residual = residual.max((best - v[s]).abs());
            v[s] = best;
        }
        if residual < 1e-12 {
            break;
        }
    }
    let mut policy: Vec<usize> = (0..n)
        .map(|s| {
            (0..m.n_actions(s))
                .max_by(|&a, &b| {
                    let qa: f64 = m.succ(s, a).iter().map(|&(t, p)| p * v[t]).sum();
                    let qb: f64 = m.succ(s, b).iter().map(|&(t, p)| p * v[t]).sum();
                    qa.partial_cmp(&qb).unwrap()
                })
                .unwrap_or(0)
        })
        .collect();
    for _ in 0..10_000 {
        v = evaluate_reach_policy(m, &policy, &target);
        let mut changed = false;
        for s in 0..n {
            if target.contains(s) || !can_reach.contains(s) {
                continue;
            }
            let cur: f64 = m.succ(s, policy[s]).iter().map(|&(t, p)| p * v[t]).sum();
            let (best_a, best_q) = (0..m.n_actions(s))
                .map(|a| {
                    (
                        a,
                        m.succ(s, a).iter().map(|&(t, p)| p * v[t]).sum::<f64>(),
                    )
                })
                .fold((policy[s], cur), |acc, (a, q)| {
                    if q > acc.1 + 1e-12 {
                        (a, q)
                    } else {
                        acc
                    }
                });
            if best_a != policy[s] && best_q > cur + 1e-12 {
                policy[s] = best_a;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for x in v.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    Ok(v)
}

/// Exact reach probabilities of a fixed policy, by linear solve on the
/// states that reach the target at all.
fn evaluate_reach_policy(m: &Mdp, policy: &[usize], target: &StateSet) -> Vec<f64> {
    let n = m.n_states();
    // Reachability of the target under the policy alone.
    let mut reaches = target.clone();
    loop {
        let mut grew = false;
        for s in 0..n {
            if !reaches.contains(s)
                && m.succ(s, policy[s]).iter().any(|&(t, _)| reaches.contains(t))
            {
                reaches.insert(s);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let interior: Vec<usize> = (0..n)
        .filter(|&s| reaches.contains(s) && !target.contains(s))
        .collect();
    let mut v = vec![0.0f64; n];
    for s in target.iter() {
        v[s] = 1.0;
    }
    if interior.is_empty() {
        return v;
    }
    let pos: BTreeMap<usize, usize> = interior.iter().copied().zip(0..).collect();
    let k = interior.len();
    let mut a = DMatrix::<f64>::identity(k, k);
    let mut b = DVector::<f64>::zeros(k);
    for (i, &s) in interior.iter().enumerate() {
        for &(t, p) in m.succ(s, policy[s]) {
            if target.contains(t) {
                b[i] += p;
            } else if let Some(&j) = pos.get(&t) {
                a[(i, j)] -= p;
            }
        }
    }
    let x = a
        .lu()
        .solve(&b)
        .expect("reach system is nonsingular on the reaching set");
    for (i, &s) in interior.iter().enumerate() {
        v[s] = x[i];
    }
    v
}
