//! Game model, validation, serialization, and random instance generation.
//!
//! A concurrent game structure has a finite set of states; at each state both
//! players simultaneously pick one of their available actions, and the joint
//! pick selects a distribution over successor states. Action identity is
//! scoped per `(player, state)`: two states may reuse the same action name
//! without any relation between them.
//!
//! Games come in two probability modes. Either every transition carries
//! explicit probabilities, or none does (support-only). Qualitative winning
//! sets depend only on supports, so support-only games are first-class;
//! operations that need numbers substitute the uniform distribution over each
//! support.

use std::collections::BTreeMap;
use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::stateset::StateSet;

/// Probabilities, when present, must sum to 1 within this tolerance.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// Distribution over successor states, or just its support.
///
/// Entries are pairwise distinct states. Either every entry carries a
/// probability in `(0,1]` (and they sum to 1), or none does.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessorDist {
    entries: Vec<(usize, Option<f64>)>,
}

impl SuccessorDist {
    /// Build from entries; invariants are the caller's responsibility
    /// (parse/gen validate them).
    pub(crate) fn new(entries: Vec<(usize, Option<f64>)>) -> Self {
        debug_assert!(!entries.is_empty());
        SuccessorDist { entries }
    }

    pub fn entries(&self) -> &[(usize, Option<f64>)] {
        &self.entries
    }

    /// Support as state indices, in entry order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(t, _)| t)
    }

    pub fn has_probabilities(&self) -> bool {
        self.entries.first().is_some_and(|&(_, p)| p.is_some())
    }

    /// Numeric entries; support-only distributions become uniform.
    pub fn numeric(&self) -> Vec<(usize, f64)> {
        let k = self.entries.len() as f64;
        self.entries
            .iter()
            .map(|&(t, p)| (t, p.unwrap_or(1.0 / k)))
            .collect()
    }
}

/// A concurrent game structure with parity priorities.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrentGame {
    state_names: Vec<String>,
    priority: Vec<u32>,
    actions1: Vec<Vec<String>>,
    actions2: Vec<Vec<String>>,
    /// delta[s][a][b], total over a in moves1(s), b in moves2(s).
    delta: Vec<Vec<Vec<SuccessorDist>>>,
}

impl ConcurrentGame {
    /// Assemble from parts; invariants (distinct names, totality, nonempty
    /// move sets) are the caller's responsibility. The reductions build
    /// their games this way.
    pub(crate) fn assemble(
        state_names: Vec<String>,
        priority: Vec<u32>,
        actions1: Vec<Vec<String>>,
        actions2: Vec<Vec<String>>,
        delta: Vec<Vec<Vec<SuccessorDist>>>,
    ) -> ConcurrentGame {
        ConcurrentGame {
            state_names,
            priority,
            actions1,
            actions2,
            delta,
        }
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.state_names[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn priority(&self, s: usize) -> u32 {
        self.priority[s]
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    /// Number of player-1 actions at `s`; indices are `0..n1(s)`.
    pub fn n1(&self, s: usize) -> usize {
        self.actions1[s].len()
    }

    /// Number of player-2 actions at `s`.
    pub fn n2(&self, s: usize) -> usize {
        self.actions2[s].len()
    }

    pub fn action1_name(&self, s: usize, a: usize) -> &str {
        &self.actions1[s][a]
    }

    pub fn action2_name(&self, s: usize, b: usize) -> &str {
        &self.actions2[s][b]
    }

    pub fn action1_index(&self, s: usize, name: &str) -> Option<usize> {
        self.actions1[s].iter().position(|n| n == name)
    }

    pub fn dist(&self, s: usize, a: usize, b: usize) -> &SuccessorDist {
        &self.delta[s][a][b]
    }

    /// States with priority exactly `prio`.
    pub fn priority_class(&self, prio: u32) -> StateSet {
        StateSet::from_indices(
            self.n_states(),
            (0..self.n_states()).filter(|&s| self.priority[s] == prio),
        )
    }

    /// Same game with one priority value replaced (used by normalization).
    pub(crate) fn with_priorities(&self, priority: Vec<u32>) -> ConcurrentGame {
        ConcurrentGame {
            priority,
            ..self.clone()
        }
    }

    /// Same game with different transition distributions (same supports or
    /// not; used by tests and the support-perturbation harness).
    pub fn with_delta(&self, delta: Vec<Vec<Vec<SuccessorDist>>>) -> ConcurrentGame {
        ConcurrentGame {
            delta,
            ..self.clone()
        }
    }

    /// Re-randomize all probabilities, keeping every support fixed.
    ///
    /// Qualitative outputs must be invariant under this transformation.
    pub fn perturb_probabilities(&self, seed: u64) -> ConcurrentGame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = self
            .delta
            .iter()
            .map(|per_a| {
                per_a
                    .iter()
                    .map(|per_b| {
                        per_b
                            .iter()
                            .map(|dist| {
                                let support: Vec<usize> = dist.support().collect();
                                let mut weights: Vec<f64> =
                                    support.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
                                let total: f64 = weights.iter().sum();
                                for w in &mut weights {
                                    *w /= total;
                                }
                                SuccessorDist::new(
                                    support
                                        .iter()
                                        .zip(&weights)
                                        .map(|(&t, &w)| (t, Some(w)))
                                        .collect(),
                                )
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        self.with_delta(delta)
    }
}

// ---------------------------------------------------------------------------
// Priority normalization
// ---------------------------------------------------------------------------

/// Which of the two normal forms a priority function has been brought into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// `p: S -> [0..2n-1]`, maximum priority odd.
    Case1,
    /// `p: S -> [1..2n]`, maximum priority even.
    Case2,
}

/// Record of a priority normalization: the target form, its `n`, the even
/// shift applied, and which classes in the target range have no states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseForm {
    pub case_tag: CaseTag,
    pub n: u32,
    pub shift: u32,
    pub padded_classes: Vec<u32>,
}

impl CaseForm {
    /// Priority values of the normalized range, ascending.
    pub fn range(&self) -> std::ops::RangeInclusive<u32> {
        match self.case_tag {
            CaseTag::Case1 => 0..=(2 * self.n - 1),
            CaseTag::Case2 => 1..=(2 * self.n),
        }
    }
}

/// Shift priorities by an even constant and pad the range with empty classes
/// so it is exactly `[0..2n-1]` (Case1) or `[1..2n]` (Case2).
///
/// An even shift preserves the parity of the maximum priority seen infinitely
/// often along every play, and empty classes never fire, so the parity
/// objective is unchanged.
pub fn normalize_priorities(g: &ConcurrentGame, target: CaseTag) -> (ConcurrentGame, CaseForm) {
    let max_p = g.max_priority();
    let min_p = g.priority.iter().copied().min().unwrap_or(0);
    let shift = match target {
        CaseTag::Case1 => 0,
        // Case2 needs priorities >= 1; an even shift keeps parity.
        CaseTag::Case2 => {
            if min_p == 0 {
                2
            } else {
                0
            }
        }
    };
    let shifted_max = max_p + shift;
    let n = match target {
        // Smallest n >= 1 with 2n-1 >= shifted_max.
        CaseTag::Case1 => (shifted_max / 2 + 1).max(1),
        // Smallest n >= 1 with 2n >= shifted_max.
        CaseTag::Case2 => (shifted_max.div_ceil(2)).max(1),
    };
    let priority: Vec<u32> = g.priority.iter().map(|&p| p + shift).collect();
    let range = match target {
        CaseTag::Case1 => 0..=(2 * n - 1),
        CaseTag::Case2 => 1..=(2 * n),
    };
    let padded_classes = range
        .filter(|v| !priority.contains(v))
        .collect();
    (
        g.with_priorities(priority),
        CaseForm {
            case_tag: target,
            n,
            shift,
            padded_classes,
        },
    )
}

/// Pick the normal form with fewer fixpoint variables for this game's
/// priorities: `2n+1` for Case1 against `2n` for Case2, ties to Case2.
pub fn preferred_case(g: &ConcurrentGame) -> CaseTag {
    let (_, c1) = normalize_priorities(g, CaseTag::Case1);
    let (_, c2) = normalize_priorities(g, CaseTag::Case2);
    if 2 * c1.n + 1 < 2 * c2.n {
        CaseTag::Case1
    } else {
        CaseTag::Case2
    }
}

// ---------------------------------------------------------------------------
// JSON interface
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    states: Vec<RawState>,
    moves1: BTreeMap<String, Vec<String>>,
    moves2: BTreeMap<String, Vec<String>>,
    delta: Vec<RawTransition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    owner: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    name: String,
    priority: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    owner: Option<u8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    from: String,
    a1: String,
    a2: String,
    succ: Vec<RawSucc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSucc {
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
}

/// Parse and validate a game document.
///
/// The order of the `states` array is authoritative for state indices, and
/// the order of each move list for action indices, which makes all outputs
/// reproducible from the file alone.
pub fn parse_game(text: &str) -> Result<ConcurrentGame, ParseError> {
    let raw: RawGame = serde_json::from_str(text)?;
    build_game(raw).map(|(g, _)| g)
}

/// As [`parse_game`], also returning per-state owners when the document is a
/// serialized turn-based game.
pub fn parse_game_with_owners(
    text: &str,
) -> Result<(ConcurrentGame, Option<Vec<u8>>), ParseError> {
    let raw: RawGame = serde_json::from_str(text)?;
    build_game(raw)
}

fn build_game(raw: RawGame) -> Result<(ConcurrentGame, Option<Vec<u8>>), ParseError> {
    if raw.states.is_empty() {
        return Err(ParseError::NoStates);
    }
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, st) in raw.states.iter().enumerate() {
        if index.insert(st.name.clone(), i).is_some() {
            return Err(ParseError::DuplicateState(st.name.clone()));
        }
    }
    let n = raw.states.len();
    let state_names: Vec<String> = raw.states.iter().map(|s| s.name.clone()).collect();
    let priority: Vec<u32> = raw.states.iter().map(|s| s.priority).collect();
    let owners: Option<Vec<u8>> = if raw.states.iter().any(|s| s.owner.is_some()) {
        Some(raw.states.iter().map(|s| s.owner.unwrap_or(1)).collect())
    } else {
        None
    };

    for name in raw.moves1.keys().chain(raw.moves2.keys()) {
        if !index.contains_key(name) {
            return Err(ParseError::UnknownState(name.clone()));
        }
    }
    let read_moves = |table: &BTreeMap<String, Vec<String>>,
                      player: u8|
     -> Result<Vec<Vec<String>>, ParseError> {
        let mut out = vec![Vec::new(); n];
        for (s, names) in table {
            let si = index[s];
            let mut seen = Vec::new();
            for a in names {
                if seen.contains(&a) {
                    return Err(ParseError::DuplicateAction {
                        state: s.clone(),
                        action: a.clone(),
                        player,
                    });
                }
                seen.push(a);
            }
            out[si] = names.clone();
        }
        for (si, acts) in out.iter().enumerate() {
            if acts.is_empty() {
                return Err(ParseError::EmptyMoveSet(state_names[si].clone()));
            }
        }
        Ok(out)
    };
    let actions1 = read_moves(&raw.moves1, 1)?;
    let actions2 = read_moves(&raw.moves2, 2)?;

    // Collect transitions into the dense (s,a,b) table, checking totality.
    let mut delta: Vec<Vec<Vec<Option<SuccessorDist>>>> = (0..n)
        .map(|s| vec![vec![None; actions2[s].len()]; actions1[s].len()])
        .collect();
    for tr in &raw.delta {
        let s = *index
            .get(&tr.from)
            .ok_or_else(|| ParseError::UnknownState(tr.from.clone()))?;
        let a = actions1[s]
            .iter()
            .position(|x| *x == tr.a1)
            .ok_or_else(|| ParseError::UnknownAction {
                state: tr.from.clone(),
                action: tr.a1.clone(),
                player: 1,
            })?;
        let b = actions2[s]
            .iter()
            .position(|x| *x == tr.a2)
            .ok_or_else(|| ParseError::UnknownAction {
                state: tr.from.clone(),
                action: tr.a2.clone(),
                player: 2,
            })?;
        let at = (tr.from.clone(), tr.a1.clone(), tr.a2.clone());
        if delta[s][a][b].is_some() {
            return Err(ParseError::DuplicateTransition {
                state: at.0,
                a1: at.1,
                a2: at.2,
            });
        }
        if tr.succ.is_empty() {
            return Err(ParseError::EmptySupport {
                state: at.0,
                a1: at.1,
                a2: at.2,
            });
        }
        let mut entries = Vec::with_capacity(tr.succ.len());
        let with_p = tr.succ[0].p.is_some();
        let mut sum = 0.0;
        for e in &tr.succ {
            let t = *index
                .get(&e.to)
                .ok_or_else(|| ParseError::UnknownState(e.to.clone()))?;
            if entries.iter().any(|&(u, _)| u == t) {
                return Err(ParseError::DuplicateSuccessor {
                    state: at.0,
                    a1: at.1,
                    a2: at.2,
                    to: e.to.clone(),
                });
            }
            if e.p.is_some() != with_p {
                return Err(ParseError::MixedProbabilityMode {
                    state: at.0,
                    a1: at.1,
                    a2: at.2,
                });
            }
            if let Some(p) = e.p {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(ParseError::BadProbabilityValue {
                        state: at.0,
                        a1: at.1,
                        a2: at.2,
                        p,
                    });
                }
                sum += p;
            }
            entries.push((t, e.p));
        }
        if with_p && (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(ParseError::BadProbabilitySum {
                state: at.0,
                a1: at.1,
                a2: at.2,
                sum,
            });
        }
        delta[s][a][b] = Some(SuccessorDist::new(entries));
    }
    let mut full = Vec::with_capacity(n);
    for s in 0..n {
        let mut per_a = Vec::with_capacity(actions1[s].len());
        for a in 0..actions1[s].len() {
            let mut per_b = Vec::with_capacity(actions2[s].len());
            for b in 0..actions2[s].len() {
                match delta[s][a][b].take() {
                    Some(d) => per_b.push(d),
                    None => {
                        return Err(ParseError::MissingTransition {
                            state: state_names[s].clone(),
                            a1: actions1[s][a].clone(),
                            a2: actions2[s][b].clone(),
                        })
                    }
                }
            }
            per_a.push(per_b);
        }
        full.push(per_a);
    }
    Ok((
        ConcurrentGame {
            state_names,
            priority,
            actions1,
            actions2,
            delta: full,
        },
        owners,
    ))
}

/// Serialize a game to the document format; `owners`, when given, adds the
/// per-state `owner` field used by turn-based games.
pub fn serialize_game(g: &ConcurrentGame, owners: Option<&[u8]>) -> String {
    let raw = RawGame {
        states: (0..g.n_states())
            .map(|s| RawState {
                name: g.state_names[s].clone(),
                priority: g.priority[s],
                owner: owners.map(|o| o[s]),
            })
            .collect(),
        moves1: (0..g.n_states())
            .map(|s| (g.state_names[s].clone(), g.actions1[s].clone()))
            .collect(),
        moves2: (0..g.n_states())
            .map(|s| (g.state_names[s].clone(), g.actions2[s].clone()))
            .collect(),
        delta: (0..g.n_states())
            .flat_map(|s| {
                (0..g.n1(s)).flat_map(move |a| {
                    (0..g.n2(s)).map(move |b| RawTransition {
                        from: g.state_names[s].clone(),
                        a1: g.actions1[s][a].clone(),
                        a2: g.actions2[s][b].clone(),
                        succ: g.delta[s][a][b]
                            .entries()
                            .iter()
                            .map(|&(t, p)| RawSucc {
                                to: g.state_names[t].clone(),
                                p,
                            })
                            .collect(),
                    })
                })
            })
            .collect(),
        owner: None,
    };
    serde_json::to_string_pretty(&raw).expect("game serialization cannot fail")
}

/// Render a state set as the output format: a JSON array of state names
/// sorted by state index.
pub fn stateset_to_json(g: &ConcurrentGame, set: &StateSet) -> serde_json::Value {
    serde_json::Value::Array(
        set.iter()
            .map(|s| serde_json::Value::String(g.state_names[s].clone()))
            .collect(),
    )
}

/// Parse a state set given as a JSON array of state names.
pub fn stateset_from_json(g: &ConcurrentGame, text: &str) -> Result<StateSet, ParseError> {
    let names: Vec<String> = serde_json::from_str(text)?;
    let mut set = StateSet::empty(g.n_states());
    for name in names {
        match g.state_index(&name) {
            Some(i) => set.insert(i),
            None => return Err(ParseError::UnknownState(name)),
        }
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// Random instance generation
// ---------------------------------------------------------------------------

/// Generate a random game, deterministic in `seed`.
///
/// Every state gets 1..=max_act actions per player, every joint action
/// 1..=max_succ distinct successors with uniform probabilities, and a
/// priority uniform in `0..=max_prio`.
pub fn gen_random(
    n_states: usize,
    max_act: usize,
    max_succ: usize,
    max_prio: u32,
    seed: u64,
) -> ConcurrentGame {
    assert!(n_states >= 1 && max_act >= 1 && max_succ >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state_names: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    let priority: Vec<u32> = (0..n_states).map(|_| rng.gen_range(0..=max_prio)).collect();
    let actions1: Vec<Vec<String>> = (0..n_states)
        .map(|_| {
            let k = rng.gen_range(1..=max_act);
            (0..k).map(|j| format!("a{j}")).collect()
        })
        .collect();
    let actions2: Vec<Vec<String>> = (0..n_states)
        .map(|_| {
            let k = rng.gen_range(1..=max_act);
            (0..k).map(|j| format!("b{j}")).collect()
        })
        .collect();
    let delta = (0..n_states)
        .map(|s| {
            (0..actions1[s].len())
                .map(|_| {
                    (0..actions2[s].len())
                        .map(|_| {
                            let k = rng.gen_range(1..=max_succ.min(n_states));
                            let picks = rand::seq::index::sample(&mut rng, n_states, k);
                            let p = 1.0 / k as f64;
                            SuccessorDist::new(
                                picks.into_iter().map(|t| (t, Some(p))).collect(),
                            )
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    ConcurrentGame {
        state_names,
        priority,
        actions1,
        actions2,
        delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const PENNIES: &str = include_str!("../fixtures/matching_pennies.json");
    pub const THREE_PRIORITY: &str = include_str!("../fixtures/three_priority.json");

    #[test]
    fn parses_matching_pennies() {
        let g = parse_game(PENNIES).unwrap();
        assert_eq!(g.n_states(), 2);
        assert_eq!(g.n1(0), 2);
        assert_eq!(g.n2(0), 2);
        assert_eq!(g.action1_name(0, 0), "a");
        assert_eq!(g.action2_name(0, 1), "d");
        assert_eq!(g.priority(0), 1);
        assert_eq!(g.priority(1), 2);
        // (a,c) matches -> s1; (a,d) mismatches -> s0.
        assert_eq!(g.dist(0, 0, 0).support().collect::<Vec<_>>(), vec![1]);
        assert_eq!(g.dist(0, 0, 1).support().collect::<Vec<_>>(), vec![0]);
        assert!(!g.dist(0, 0, 0).has_probabilities());
    }

    #[test]
    fn parses_three_priority_game() {
        let g = parse_game(THREE_PRIORITY).unwrap();
        assert_eq!(g.n_states(), 3);
        assert_eq!(
            (g.priority(0), g.priority(1), g.priority(2)),
            (1, 2, 3)
        );
    }

    #[test]
    fn missing_transition_is_rejected() {
        // Drop delta(s0, b, d) from the pennies document.
        let doc: serde_json::Value = serde_json::from_str(PENNIES).unwrap();
        let mut doc = doc;
        let delta = doc["delta"].as_array_mut().unwrap();
        delta.retain(|t| !(t["a1"] == "b" && t["a2"] == "d"));
        let err = parse_game(&doc.to_string()).unwrap_err();
        assert!(matches!(err, ParseError::MissingTransition { .. }), "{err}");
    }

    #[test]
    fn mixed_probability_mode_is_rejected() {
        let text = r#"{
          "states": [{"name":"x","priority":0},{"name":"y","priority":0}],
          "moves1": {"x":["a"],"y":["a"]},
          "moves2": {"x":["b"],"y":["b"]},
          "delta": [
            {"from":"x","a1":"a","a2":"b","succ":[{"to":"x","p":0.5},{"to":"y"}]},
            {"from":"y","a1":"a","a2":"b","succ":[{"to":"y"}]}
          ]
        }"#;
        let err = parse_game(text).unwrap_err();
        assert!(matches!(err, ParseError::MixedProbabilityMode { .. }), "{err}");
    }

    #[test]
    fn bad_probability_sum_is_rejected() {
        let text = r#"{
          "states": [{"name":"x","priority":0}],
          "moves1": {"x":["a"]},
          "moves2": {"x":["b"]},
          "delta": [
            {"from":"x","a1":"a","a2":"b","succ":[{"to":"x","p":0.5}]}
          ]
        }"#;
        let err = parse_game(text).unwrap_err();
        match err {
            ParseError::BadProbabilitySum { sum, .. } => assert!((sum - 0.5).abs() < 1e-12),
            other => panic!("expected BadProbabilitySum, got {other}"),
        }
    }

    #[test]
    fn unknown_state_is_rejected() {
        let text = r#"{
          "states": [{"name":"x","priority":0}],
          "moves1": {"x":["a"]},
          "moves2": {"x":["b"]},
          "delta": [
            {"from":"x","a1":"a","a2":"b","succ":[{"to":"zz"}]}
          ]
        }"#;
        assert!(matches!(
            parse_game(text).unwrap_err(),
            ParseError::UnknownState(n) if n == "zz"
        ));
    }

    #[test]
    fn serialize_round_trip_is_identical() {
        for text in [PENNIES, THREE_PRIORITY] {
            let g = parse_game(text).unwrap();
            let again = parse_game(&serialize_game(&g, None)).unwrap();
            assert_eq!(g, again);
        }
    }

    #[test]
    fn normalize_case1_pads_empty_bottom_class() {
        let g = parse_game(THREE_PRIORITY).unwrap();
        let (ng, form) = normalize_priorities(&g, CaseTag::Case1);
        assert_eq!(form.case_tag, CaseTag::Case1);
        assert_eq!(form.n, 2);
        assert_eq!(form.shift, 0);
        assert_eq!(form.padded_classes, vec![0]);
        assert_eq!(ng.max_priority(), 3);
        assert_eq!(ng.priority_class(0).len(), 0);
    }

    #[test]
    fn normalize_case2_shifts_evenly() {
        let mut g = parse_game(PENNIES).unwrap();
        g.priority = vec![0, 1];
        let (ng, form) = normalize_priorities(&g, CaseTag::Case2);
        assert_eq!(form.shift, 2);
        assert_eq!(form.n, 2);
        assert_eq!(ng.priority, vec![2, 3]);
        assert_eq!(form.padded_classes, vec![1, 4]);
        // Parity class per state is preserved by the even shift.
        for s in 0..g.n_states() {
            assert_eq!(g.priority(s) % 2, ng.priority(s) % 2);
        }
    }

    #[test]
    fn normalize_case2_in_form_is_identity() {
        let g = parse_game(PENNIES).unwrap();
        let (ng, form) = normalize_priorities(&g, CaseTag::Case2);
        assert_eq!(form.n, 1);
        assert_eq!(form.shift, 0);
        assert!(form.padded_classes.is_empty());
        assert_eq!(ng, g);
    }

    #[test]
    fn normalize_changes_only_priorities() {
        let g = gen_random(5, 3, 2, 4, 11);
        for tag in [CaseTag::Case1, CaseTag::Case2] {
            let (ng, form) = normalize_priorities(&g, tag);
            assert_eq!(form.shift % 2, 0);
            assert_eq!(ng.state_names, g.state_names);
            assert_eq!(ng.actions1, g.actions1);
            assert_eq!(ng.actions2, g.actions2);
            assert_eq!(ng.delta, g.delta);
            for p in form.padded_classes {
                assert!(ng.priority_class(p).is_empty());
            }
        }
    }

    #[test]
    fn gen_random_is_deterministic_and_valid() {
        let a = gen_random(4, 2, 2, 3, 7);
        let b = gen_random(4, 2, 2, 3, 7);
        assert_eq!(a, b);
        let again = parse_game(&serialize_game(&a, None)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn gen_random_minimal_instance() {
        let g = gen_random(1, 1, 1, 0, 5);
        assert_eq!(g.n_states(), 1);
        assert_eq!(g.priority(0), 0);
        assert_eq!(g.dist(0, 0, 0).support().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn stateset_json_is_sorted_by_index() {
        let g = parse_game(THREE_PRIORITY).unwrap();
        let set = StateSet::from_indices(3, [2, 0]);
        assert_eq!(
            stateset_to_json(&g, &set).to_string(),
            r#"["s0","s2"]"#
        );
        let back = stateset_from_json(&g, r#"["s2","s0"]"#).unwrap();
        assert_eq!(back, set);
    }
}
