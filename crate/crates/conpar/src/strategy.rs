//! Witness strategies: extraction from solver admissions, verification
//! against the best-responding adversary, and the on-disk format.
//!
//! Extraction composes the per-state witnesses captured during fixpoint
//! evaluation. For almost-sure results the witness support is played
//! uniformly. For limit results the witness ranks must be merged across
//! admission rounds: a state admitted in a later round of the outermost
//! least fixpoint leans on states admitted earlier, so its risky actions
//! get their ranks shifted upward by the round index times a common stride.
//! Rank-0 actions stay at rank 0; a uniform shift of every rank would
//! cancel out after per-state normalization and is therefore applied to the
//! nonzero ranks only. The instantiation parameter for the shifted ranks is
//! then certified by a verification-driven search that halves eps until the
//! measured best-response failure meets the requested bound.

use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::game::ConcurrentGame;
use crate::mdp::{fix_strategy, mdp_qual_parity, mdp_value_parity, ValueVector};
use crate::mucalc::{admission_chain, FormulaKind, SolveResult};
use crate::pred::{
    all_good_sets, good_set_verifies, rank_assignments, ranks_verify, RankAssignment,
    StateWitness, SupportCtx,
};
use crate::stateset::StateSet;

/// One state's prescription.
#[derive(Clone, Debug, PartialEq)]
pub enum StateChoice {
    /// Play these actions uniformly.
    Support(Vec<usize>),
    /// Play action `a` with weight proportional to `eps^rank(a)`.
    Ranks(RankAssignment),
}

/// A memoryless strategy for player 1, one choice per state.
#[derive(Clone, Debug, PartialEq)]
pub struct MemorylessStrategy {
    pub choices: Vec<StateChoice>,
}

impl MemorylessStrategy {
    pub fn is_ranked(&self) -> bool {
        self.choices
            .iter()
            .any(|c| matches!(c, StateChoice::Ranks(_)))
    }

    /// Forget rank information, keeping each state's action set.
    pub fn uniformize(&self) -> MemorylessStrategy {
        MemorylessStrategy {
            choices: self
                .choices
                .iter()
                .map(|c| match c {
                    StateChoice::Support(u) => StateChoice::Support(u.clone()),
                    StateChoice::Ranks(ra) => StateChoice::Support(ra.domain().collect()),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// Turn an almost-sure solve result into a uniform witness strategy.
///
/// Each winning state plays its admission's good set uniformly. The recorded
/// witness is re-verified against the admission valuation; if it fails, the
/// remaining good sets at that valuation are tried in witness order before
/// the extraction reports an internal soundness failure.
pub fn extract_uniform_almost(
    g: &ConcurrentGame,
    result: &SolveResult,
) -> Result<MemorylessStrategy, Error> {
    assert!(
        matches!(
            result.kind,
            FormulaKind::AlmostCase1 | FormulaKind::AlmostCase2
        ),
        "uniform extraction expects an almost-sure result"
    );
    let ctx = SupportCtx::new(g);
    let mut choices = vec![StateChoice::Support(vec![0]); g.n_states()];
    for s in result.winning.iter() {
        let adm = result.admit[s]
            .as_ref()
            .ok_or_else(|| Error::InternalSoundness {
                state: g.state_name(s).to_string(),
            })?;
        let t = match adm.term {
            // Admitted through the target set: any play is fine there.
            None => continue,
            Some(t) => t,
        };
        let chain = admission_chain(result.kind, result.n, t, &adm.valuation);
        let recorded = match &adm.witness {
            Some(StateWitness::GoodSet(u)) => Some(u.clone()),
            _ => None,
        };
        let verified = recorded
            .filter(|u| good_set_verifies(&ctx, s, u, &chain))
            .or_else(|| all_good_sets(&ctx, s, &chain).into_iter().next());
        match verified {
            Some(u) => choices[s] = StateChoice::Support(u),
            None => {
                return Err(Error::InternalSoundness {
                    state: g.state_name(s).to_string(),
                })
            }
        }
    }
    Ok(MemorylessStrategy { choices })
}

/// Turn a limit solve result into a ranked witness strategy plus the
/// certified failure bound at the returned instantiation.
///
/// The composed ranks are verified empirically: eps starts at the requested
/// bound and halves until the measured best-response failure probability on
/// the winning set drops to the bound, up to 60 halvings.
/// A rank-family strategy certified at a concrete instantiation point:
/// playing `strategy` with weights `eps^rank` at `eps` keeps the best
/// response failure at `achieved_bound` on the claimed set.
#[derive(Clone, Debug)]
pub struct LimitWitness {
    pub strategy: MemorylessStrategy,
    pub eps: f64,
    pub achieved_bound: f64,
}

pub fn extract_limit_eps(
    g: &ConcurrentGame,
    result: &SolveResult,
    eps_target: f64,
) -> Result<LimitWitness, Error> {
    assert!(
        result.kind == FormulaKind::LimitIPM,
        "limit extraction expects a limit result"
    );
    if !(eps_target > 0.0 && eps_target < 1.0) {
        return Err(Error::BadStrategy(format!(
            "eps target {eps_target} is outside (0,1)"
        )));
    }
    let ctx = SupportCtx::new(g);
    let chunk_var = result.outer_mu_index();
    // Collect verified local witnesses first to learn the global stride.
    let mut locals: Vec<Option<(RankAssignment, u32)>> = vec![None; g.n_states()];
    for s in result.winning.iter() {
        let adm = result.admit[s]
            .as_ref()
            .ok_or_else(|| Error::InternalSoundness {
                state: g.state_name(s).to_string(),
            })?;
        let t = match adm.term {
            None => {
                locals[s] = Some((
                    RankAssignment {
                        ranks: [(0usize, 0u32)].into_iter().collect(),
                    },
                    0,
                ));
                continue;
            }
            Some(t) => t,
        };
        let chain = admission_chain(result.kind, result.n, t, &adm.valuation);
        let recorded = match &adm.witness {
            Some(StateWitness::Ranks(ra)) => Some(ra.clone()),
            _ => None,
        };
        let verified = recorded
            .filter(|ra| ranks_verify(&ctx, s, ra, &chain))
            .or_else(|| {
                rank_assignments(g.n1(s))
                    .into_iter()
                    .find(|ra| ranks_verify(&ctx, s, ra, &chain))
            });
        match verified {
            Some(ra) => locals[s] = Some((ra, adm.levels[chunk_var])),
            None => {
                return Err(Error::InternalSoundness {
                    state: g.state_name(s).to_string(),
                })
            }
        }
    }
    let stride = 1 + locals
        .iter()
        .flatten()
        .map(|(ra, _)| ra.max_rank())
        .max()
        .unwrap_or(0);
    let mut choices = vec![StateChoice::Support(vec![0]); g.n_states()];
    for (s, local) in locals.iter().enumerate() {
        if let Some((ra, chunk)) = local {
            let composed = RankAssignment {
                ranks: ra
                    .ranks
                    .iter()
                    .map(|(&a, &r)| (a, if r == 0 { 0 } else { r + chunk * stride }))
                    .collect(),
            };
            choices[s] = StateChoice::Ranks(composed);
        }
    }
    let strat = MemorylessStrategy { choices };
    let mut eps = eps_target;
    for _ in 0..=60 {
        let vals = verify_value(g, &strat, Some(eps), &result.winning)?;
        let bound = result
            .winning
            .iter()
            .map(|s| vals[s])
            .fold(0.0f64, f64::max);
        if bound <= eps_target + 1e-12 {
            return Ok(LimitWitness {
                strategy: strat,
                eps,
                achieved_bound: bound,
            });
        }
        eps /= 2.0;
    }
    Err(Error::EpsSearchExhausted {
        halvings: 60,
        target: eps_target,
    })
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Does the strategy win almost surely from every claimed state?
///
/// Rank choices are flattened to their supports: almost-sure winning is a
/// property of the played support alone. The claim holds iff the
/// best-responding adversary has no positive-probability way to make the
/// co-objective hold from any claimed state.
pub fn verify_almost(
    g: &ConcurrentGame,
    strat: &MemorylessStrategy,
    claim: &StateSet,
) -> Result<bool, Error> {
    let m = fix_strategy(g, &strat.uniformize(), None)?;
    let (_, positive_odd) = mdp_qual_parity(&m, false);
    Ok(!claim.intersects(&positive_odd))
}

/// Best-response failure probability per state at a concrete instantiation:
/// the adversary's maximal probability of the odd co-objective once the
/// strategy is fixed. The claim argument only fixes the universe callers
/// judge against; values are returned for every state.
pub fn verify_value(
    g: &ConcurrentGame,
    strat: &MemorylessStrategy,
    eps: Option<f64>,
    claim: &StateSet,
) -> Result<ValueVector, Error> {
    if claim.universe() != g.n_states() {
        return Err(Error::BadStrategy(
            "claim universe does not match the game".into(),
        ));
    }
    let m = fix_strategy(g, strat, eps)?;
    mdp_value_parity(&m, false, true)
}

// ---------------------------------------------------------------------------
// Strategy documents
// ---------------------------------------------------------------------------

/// Serialize to the flat JSON object format: a `kind` tag, optional `eps`
/// and `achieved_bound`, then one entry per state name. State names equal
/// to a header key cannot be represented and are rejected.
pub fn serialize_strategy(
    g: &ConcurrentGame,
    strat: &MemorylessStrategy,
    eps: Option<f64>,
    achieved_bound: Option<f64>,
) -> Result<String, Error> {
    let mut doc = Map::new();
    doc.insert(
        "kind".into(),
        Value::String(if strat.is_ranked() { "ranked" } else { "uniform" }.into()),
    );
    if let Some(e) = eps {
        doc.insert("eps".into(), json!(e));
    }
    if let Some(b) = achieved_bound {
        doc.insert("achieved_bound".into(), json!(b));
    }
    for s in 0..g.n_states() {
        let name = g.state_name(s);
        if doc.contains_key(name) {
            return Err(Error::BadStrategy(format!(
                "state name {name:?} collides with a document header key"
            )));
        }
        let entry = match &strat.choices[s] {
            StateChoice::Support(u) => {
                let names: Vec<Value> = u
                    .iter()
                    .map(|&a| Value::String(g.action1_name(s, a).to_string()))
                    .collect();
                json!({ "support": names })
            }
            StateChoice::Ranks(ra) => {
                let mut ranks = Map::new();
                for (&a, &r) in &ra.ranks {
                    ranks.insert(g.action1_name(s, a).to_string(), json!(r));
                }
                Value::Object([("ranks".to_string(), Value::Object(ranks))].into_iter().collect())
            }
        };
        doc.insert(name.to_string(), entry);
    }
    Ok(serde_json::to_string_pretty(&Value::Object(doc)).expect("strategy serializes") + "\n")
}

/// Header fields of a strategy document.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyMeta {
    pub kind: String,
    pub eps: Option<f64>,
    pub achieved_bound: Option<f64>,
}

/// Parse the flat JSON object format against a game. Every state must be
/// covered; action names must exist at their state.
pub fn parse_strategy(
    g: &ConcurrentGame,
    text: &str,
) -> Result<(MemorylessStrategy, StrategyMeta), Error> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::BadStrategy(format!("not valid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::BadStrategy("document is not an object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::BadStrategy("missing \"kind\"".into()))?
        .to_string();
    if kind != "uniform" && kind != "ranked" {
        return Err(Error::BadStrategy(format!("unknown kind {kind:?}")));
    }
    let get_f64 = |key: &str| -> Result<Option<f64>, Error> {
        match obj.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::BadStrategy(format!("{key:?} is not a number"))),
        }
    };
    let meta = StrategyMeta {
        kind,
        eps: get_f64("eps")?,
        achieved_bound: get_f64("achieved_bound")?,
    };
    let mut choices: Vec<Option<StateChoice>> = vec![None; g.n_states()];
    for (key, value) in obj {
        if key == "kind" || key == "eps" || key == "achieved_bound" {
            continue;
        }
        let s = g
            .state_index(key)
            .ok_or_else(|| Error::BadStrategy(format!("unknown state {key:?}")))?;
        let entry = value
            .as_object()
            .ok_or_else(|| Error::BadStrategy(format!("entry for {key:?} is not an object")))?;
        let choice = match (entry.get("support"), entry.get("ranks")) {
            (Some(sup), None) => {
                let arr = sup
                    .as_array()
                    .ok_or_else(|| Error::BadStrategy(format!("{key:?}: support is not a list")))?;
                let mut actions = Vec::with_capacity(arr.len());
                for v in arr {
                    let name = v.as_str().ok_or_else(|| {
                        Error::BadStrategy(format!("{key:?}: support entry is not a string"))
                    })?;
                    let a = g.action1_index(s, name).ok_or_else(|| {
                        Error::BadStrategy(format!("{key:?}: unknown action {name:?}"))
                    })?;
                    if actions.contains(&a) {
                        return Err(Error::BadStrategy(format!(
                            "{key:?}: action {name:?} listed twice"
                        )));
                    }
                    actions.push(a);
                }
                if actions.is_empty() {
                    return Err(Error::BadStrategy(format!("{key:?}: empty support")));
                }
                actions.sort_unstable();
                StateChoice::Support(actions)
            }
            (None, Some(ranks)) => {
                let map = ranks
                    .as_object()
                    .ok_or_else(|| Error::BadStrategy(format!("{key:?}: ranks is not a map")))?;
                let mut ra = RankAssignment {
                    ranks: Default::default(),
                };
                for (name, rv) in map {
                    let a = g.action1_index(s, name).ok_or_else(|| {
                        Error::BadStrategy(format!("{key:?}: unknown action {name:?}"))
                    })?;
                    let r = rv.as_u64().ok_or_else(|| {
                        Error::BadStrategy(format!("{key:?}: rank of {name:?} is not an integer"))
                    })?;
                    ra.ranks.insert(a, r as u32);
                }
                if ra.ranks.is_empty() {
                    return Err(Error::BadStrategy(format!("{key:?}: empty rank map")));
                }
                StateChoice::Ranks(ra)
            }
            _ => {
                return Err(Error::BadStrategy(format!(
                    "{key:?}: entry needs exactly one of \"support\" or \"ranks\""
                )))
            }
        };
        choices[s] = Some(choice);
    }
    let mut out = Vec::with_capacity(g.n_states());
    for (s, c) in choices.into_iter().enumerate() {
        match c {
            Some(c) => out.push(c),
            None => {
                return Err(Error::BadStrategy(format!(
                    "no entry for state {:?}",
                    g.state_name(s)
                )))
            }
        }
    }
    Ok((MemorylessStrategy { choices: out }, meta))
}
