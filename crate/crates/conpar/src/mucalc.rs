//! Nested fixpoint expressions over the predecessor operators.
//!
//! Each expression form is a quantifier prefix over set variables plus a
//! body that unions, over priority classes, the class intersected with a
//! combined predecessor operator applied to a slice of the variables. The
//! almost-sure forms additionally union a target set into the body, so the
//! same machinery covers plain reachability.
//!
//! Evaluation is the textbook nested iteration: greatest fixpoints start at
//! the full set, least fixpoints at the empty set, and the innermost
//! variable stabilizes first. Admission data (which term first admitted a
//! state, under which valuation, with which action-level witness) is
//! captured while iterating: a least fixpoint records during its growth, a
//! greatest fixpoint first stabilizes silently and then replays its body
//! once at the fixpoint. Every recorded admission therefore sees all
//! enclosing greatest variables at locally consistent fixpoints and all
//! least variables at monotone iterates, which is exactly the shape the
//! witness-to-strategy constructions need.
//!
//! The dual forms swap the quantifiers and replace each operator by the
//! complement of the player-1 operator on complemented arguments. Because
//! the priority classes partition the state space, the complemented body
//! keeps the union-over-classes shape, so one engine serves both readings.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::Error;
use crate::game::ConcurrentGame;
use crate::pred::{
    combined_pred1_ctx, combined_pred1_limit_ctx, good_set_verifies, ranks_verify, ApreChain,
    PredWitness, StateWitness, SupportCtx,
};
use crate::stateset::StateSet;

/// Shared operator outcome: the admitted set with its action witnesses.
type OpResult = Rc<(StateSet, PredWitness)>;

/// Expression forms. `AlmostCase1` expects priorities in `[0, 2n-1]`,
/// the other primal forms expect `[1, 2n]`; `n` is derived from the range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaKind {
    AlmostCase1,
    AlmostCase2,
    LimitIPM,
    PositiveCase1,
    PositiveCase2,
    LimitComplement,
}

impl FormulaKind {
    pub fn is_dual(self) -> bool {
        matches!(
            self,
            FormulaKind::PositiveCase1 | FormulaKind::PositiveCase2 | FormulaKind::LimitComplement
        )
    }

    pub fn is_limit(self) -> bool {
        matches!(self, FormulaKind::LimitIPM | FormulaKind::LimitComplement)
    }

    fn needs_case2_range(self) -> bool {
        !matches!(self, FormulaKind::AlmostCase1 | FormulaKind::PositiveCase1)
    }
}

/// An expression plus its target set (empty for plain parity analysis).
#[derive(Clone, Debug)]
pub struct FormulaInstance {
    pub kind: FormulaKind,
    pub target: StateSet,
}

impl FormulaInstance {
    pub fn plain(kind: FormulaKind, g: &ConcurrentGame) -> Self {
        FormulaInstance {
            kind,
            target: StateSet::empty(g.n_states()),
        }
    }
}

/// Fixpoint quantifier of one variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Nu,
    Mu,
}

/// Why and when a state entered the winning set.
#[derive(Clone, Debug)]
pub struct Admission {
    /// Index into the body's term list (descending priority class order);
    /// `None` means the state was admitted through the target set.
    pub term: Option<usize>,
    /// Completed iteration counts of every variable, outermost first.
    pub levels: Vec<u32>,
    /// Action-level witness from the admitting operator (primal forms only).
    pub witness: Option<StateWitness>,
    /// Variable values in force at admission, outermost first.
    pub valuation: Vec<StateSet>,
}

/// Result of evaluating one expression.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub kind: FormulaKind,
    /// Half the priority-class count; fixes the variable and term layout.
    pub n: u32,
    pub quants: Vec<Quant>,
    pub winning: StateSet,
    pub admit: Vec<Option<Admission>>,
}

impl SolveResult {
    /// Iteration counters recorded at a state's admission, outermost first.
    pub fn levels(&self, s: usize) -> Option<&[u32]> {
        self.admit[s].as_ref().map(|a| a.levels.as_slice())
    }

    /// Index of the outermost least-fixpoint variable; its counter is the
    /// chunk index used when composing rank witnesses across admissions.
    pub fn outer_mu_index(&self) -> usize {
        1
    }
}

// ---------------------------------------------------------------------------
// Shape construction
// ---------------------------------------------------------------------------

struct TermSpec {
    class: u32,
    /// (y, x) variable indices, outermost pair first.
    pairs: Vec<(usize, usize)>,
    pre_var: Option<usize>,
    lpre_vars: Option<(usize, usize)>,
}

struct Shape {
    quants: Vec<Quant>,
    terms: Vec<TermSpec>,
}

/// Case-1 layout: variables `Y_n X_n ... Y_1 X_1 Y_0`, classes `2n-1 .. 0`.
fn shape_case1(n: u32) -> Shape {
    let n = n as usize;
    let y = |j: usize| 2 * (n - j);
    let x = |j: usize| 2 * (n - j) + 1;
    let mut quants = Vec::new();
    for _ in 0..n {
        quants.push(Quant::Nu);
        quants.push(Quant::Mu);
    }
    quants.push(Quant::Nu); // Y_0
    let mut terms = Vec::new();
    for j in (0..n).rev() {
        let pairs: Vec<(usize, usize)> = (j + 1..=n).rev().map(|k| (y(k), x(k))).collect();
        terms.push(TermSpec {
            class: (2 * j + 1) as u32,
            pairs: pairs.clone(),
            pre_var: None,
            lpre_vars: None,
        });
        terms.push(TermSpec {
            class: (2 * j) as u32,
            pairs,
            pre_var: Some(y(j)),
            lpre_vars: None,
        });
    }
    Shape {
        quants,
        terms,
    }
}

/// Case-2 layout: variables `Y_{n-1} X_{n-1} ... Y_0 X_0`, classes `2n .. 1`.
/// `var_base` shifts the indices to make room for enclosing variables.
fn case2_terms(n: usize, var_base: usize) -> Vec<TermSpec> {
    let y = |j: usize| var_base + 2 * (n - 1 - j);
    let x = |j: usize| var_base + 2 * (n - 1 - j) + 1;
    let mut terms = Vec::new();
    for c in (1..=2 * n).rev() {
        if c % 2 == 0 {
            let j = c / 2; // n ..= 1
            terms.push(TermSpec {
                class: c as u32,
                pairs: (j..n).rev().map(|k| (y(k), x(k))).collect(),
                pre_var: Some(y(j - 1)),
                lpre_vars: None,
            });
        } else {
            let j = c / 2; // n-1 ..= 0
            terms.push(TermSpec {
                class: c as u32,
                pairs: (j..n).rev().map(|k| (y(k), x(k))).collect(),
                pre_var: None,
                lpre_vars: None,
            });
        }
    }
    terms
}

fn shape_case2(n: u32) -> Shape {
    let n = n as usize;
    let mut quants = Vec::new();
    for _ in 0..n {
        quants.push(Quant::Nu);
        quants.push(Quant::Mu);
    }
    Shape {
        quants,
        terms: case2_terms(n, 0),
    }
}

/// Limit layout: `Y_n X_n` wrap the case-2 variables and every term gains
/// the limit disjunct on that outer pair.
fn shape_limit(n: u32) -> Shape {
    let n_us = n as usize;
    let mut quants = vec![Quant::Nu, Quant::Mu];
    for _ in 0..n_us {
        quants.push(Quant::Nu);
        quants.push(Quant::Mu);
    }
    let mut terms = case2_terms(n_us, 2);
    for t in &mut terms {
        t.lpre_vars = Some((0, 1));
    }
    Shape { quants, terms }
}

fn shape_for(kind: FormulaKind, n: u32) -> Shape {
    let mut shape = match kind {
        FormulaKind::AlmostCase1 | FormulaKind::PositiveCase1 => shape_case1(n),
        FormulaKind::AlmostCase2 | FormulaKind::PositiveCase2 => shape_case2(n),
        FormulaKind::LimitIPM | FormulaKind::LimitComplement => shape_limit(n),
    };
    if kind.is_dual() {
        for q in &mut shape.quants {
            *q = match q {
                Quant::Nu => Quant::Mu,
                Quant::Mu => Quant::Nu,
            };
        }
    }
    shape
}

/// Derive `n` from the game's priority range, or report the mismatch.
fn derive_n(g: &ConcurrentGame, kind: FormulaKind) -> Result<u32, Error> {
    let maxp = g.max_priority();
    if kind.needs_case2_range() {
        let minp = (0..g.n_states()).map(|s| g.priority(s)).min().unwrap_or(1);
        if minp == 0 {
            return Err(Error::CaseMismatch {
                expected: "priorities within [1, 2n]".into(),
                found: "a state with priority 0".into(),
            });
        }
        Ok(maxp.div_ceil(2).max(1))
    } else {
        Ok((maxp / 2) + 1)
    }
}

/// Build the operator argument list of one term under a valuation. Dual
/// forms complement every referenced set.
fn term_chain(term: &TermSpec, vals: &[StateSet], dual: bool) -> ApreChain {
    let grab = |i: usize| -> StateSet {
        if dual {
            vals[i].complement()
        } else {
            vals[i].clone()
        }
    };
    ApreChain {
        pairs: term.pairs.iter().map(|&(y, x)| (grab(y), grab(x))).collect(),
        pre_set: term.pre_var.map(grab),
        lpre_pair: term.lpre_vars.map(|(y, x)| (grab(y), grab(x))),
    }
}

// ---------------------------------------------------------------------------
// Evaluation engine
// ---------------------------------------------------------------------------

struct Engine<'g> {
    ctx: SupportCtx<'g>,
    shape: Shape,
    kind: FormulaKind,
    class_sets: Vec<StateSet>,
    target: StateSet,
    vals: Vec<StateSet>,
    counters: Vec<u32>,
    admit: Vec<Option<Admission>>,
    /// (term, chain signature) -> operator result. Valuations repeat heavily
    /// across fixpoint rounds, so operator calls are memoized exactly.
    memo: HashMap<(usize, Vec<u64>), OpResult>,
    body_evals: u128,
    budget: u128,
}

impl<'g> Engine<'g> {
    fn new(g: &'g ConcurrentGame, kind: FormulaKind, target: StateSet, shape: Shape) -> Self {
        let n_states = g.n_states();
        let class_sets = shape
            .terms
            .iter()
            .map(|t| g.priority_class(t.class))
            .collect();
        let nvars = shape.quants.len();
        // Each variable re-stabilizes at most n_states+1 times per enclosing
        // round, and each greatest fixpoint replays once for recording.
        let budget = ((n_states as u128) + 2)
            .saturating_pow(nvars as u32)
            .saturating_mul(1 << nvars.min(32));
        Engine {
            ctx: SupportCtx::new(g),
            shape,
            kind,
            class_sets,
            target,
            vals: vec![StateSet::empty(n_states); nvars],
            counters: vec![0; nvars],
            admit: vec![None; n_states],
            memo: HashMap::new(),
            body_evals: 0,
            budget,
        }
    }

    fn term_result(&mut self, t: usize) -> OpResult {
        let chain = term_chain(&self.shape.terms[t], &self.vals, self.kind.is_dual());
        let key = (t, chain.signature());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let computed = if self.kind.is_limit() {
            combined_pred1_limit_ctx(&self.ctx, &chain)
        } else {
            combined_pred1_ctx(&self.ctx, &chain)
        };
        let rc = Rc::new(computed);
        self.memo.insert(key, rc.clone());
        rc
    }

    fn body(&mut self, recording: bool) -> StateSet {
        self.body_evals += 1;
        assert!(
            self.body_evals <= self.budget,
            "fixpoint iteration budget exceeded"
        );
        let n_states = self.ctx.g.n_states();
        let dual = self.kind.is_dual();
        let mut out = if dual {
            StateSet::empty(n_states)
        } else {
            self.target.clone()
        };
        if recording && !dual {
            for s in self.target.iter() {
                if self.admit[s].is_none() {
                    self.admit[s] = Some(Admission {
                        term: None,
                        levels: self.counters.clone(),
                        witness: None,
                        valuation: self.vals.clone(),
                    });
                }
            }
        }
        for t in 0..self.shape.terms.len() {
            if self.class_sets[t].is_empty() {
                continue;
            }
            let rc = self.term_result(t);
            let term_set = if dual {
                self.class_sets[t].difference(&rc.0)
            } else {
                self.class_sets[t].intersect(&rc.0)
            };
            if recording {
                for s in term_set.iter() {
                    if self.admit[s].is_none() {
                        self.admit[s] = Some(Admission {
                            term: Some(t),
                            levels: self.counters.clone(),
                            witness: if dual { None } else { rc.1.per_state[s].clone() },
                            valuation: self.vals.clone(),
                        });
                    }
                }
            }
            out.union_with(&term_set);
        }
        out
    }

    fn solve(&mut self, level: usize, recording: bool) -> StateSet {
        if level == self.shape.quants.len() {
            return self.body(recording);
        }
        let n_states = self.ctx.g.n_states();
        let nu = self.shape.quants[level] == Quant::Nu;
        self.vals[level] = if nu {
            StateSet::full(n_states)
        } else {
            StateSet::empty(n_states)
        };
        self.counters[level] = 0;
        loop {
            let next = self.solve(level + 1, recording && !nu);
            if next == self.vals[level] {
                break;
            }
            self.vals[level] = next;
            self.counters[level] += 1;
        }
        if nu && recording {
            // One replay at the fixpoint to capture admissions under a
            // locally consistent valuation.
            let replay = self.solve(level + 1, true);
            debug_assert_eq!(replay, self.vals[level], "replay left the fixpoint");
        }
        self.vals[level].clone()
    }
}

/// Evaluate an expression and capture winning set, per-variable iteration
/// levels, and per-state admission witnesses.
pub fn eval_formula(g: &ConcurrentGame, inst: &FormulaInstance) -> Result<SolveResult, Error> {
    if inst.kind.is_dual() && !inst.target.is_empty() {
        return Err(Error::TargetUnsupported);
    }
    let n = derive_n(g, inst.kind)?;
    let shape = shape_for(inst.kind, n);
    let quants = shape.quants.clone();
    let mut engine = Engine::new(g, inst.kind, inst.target.clone(), shape);
    let winning = engine.solve(0, true);
    debug_assert!(engine
        .admit
        .iter()
        .enumerate()
        .all(|(s, a)| a.is_some() == winning.contains(s)));
    Ok(SolveResult {
        kind: inst.kind,
        n,
        quants,
        winning,
        admit: engine.admit,
    })
}

/// Rebuild every admitted state's operator argument list and re-verify its
/// witness. Returns false on any inconsistency: a winning state without an
/// admission, a witness that no longer verifies at its recorded valuation, a
/// state outside its admitting priority class, or malformed shapes.
pub fn eval_with_levels_replay(
    g: &ConcurrentGame,
    inst: &FormulaInstance,
    result: &SolveResult,
) -> bool {
    let n = match derive_n(g, inst.kind) {
        Ok(n) => n,
        Err(_) => return false,
    };
    if n != result.n || inst.kind != result.kind {
        return false;
    }
    let shape = shape_for(inst.kind, n);
    if result.quants != shape.quants || result.admit.len() != g.n_states() {
        return false;
    }
    let ctx = SupportCtx::new(g);
    let class_sets: Vec<StateSet> = shape
        .terms
        .iter()
        .map(|t| g.priority_class(t.class))
        .collect();
    let dual = inst.kind.is_dual();
    let nvars = shape.quants.len();
    for s in 0..g.n_states() {
        let adm = match (&result.admit[s], result.winning.contains(s)) {
            (Some(a), true) => a,
            (None, false) => continue,
            _ => return false,
        };
        if adm.valuation.len() != nvars || adm.levels.len() != nvars {
            return false;
        }
        if adm
            .valuation
            .iter()
            .any(|v| v.universe() != g.n_states())
        {
            return false;
        }
        let t = match adm.term {
            None => {
                // Admitted through the target set.
                if dual || !inst.target.contains(s) {
                    return false;
                }
                continue;
            }
            Some(t) => t,
        };
        if t >= shape.terms.len() || !class_sets[t].contains(s) {
            return false;
        }
        let chain = term_chain(&shape.terms[t], &adm.valuation, dual);
        let ok = match (&adm.witness, dual, inst.kind.is_limit()) {
            (Some(StateWitness::GoodSet(u)), false, false) => good_set_verifies(&ctx, s, u, &chain),
            (Some(StateWitness::Ranks(r)), false, true) => ranks_verify(&ctx, s, r, &chain),
            (None, true, limit) => {
                // Dual terms carry no witness; recompute the membership.
                let (set, _) = if limit {
                    combined_pred1_limit_ctx(&ctx, &chain)
                } else {
                    combined_pred1_ctx(&ctx, &chain)
                };
                !set.contains(s)
            }
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Rebuild the operator argument list a state was admitted under.
/// Dual complementation is already applied, mirroring evaluation.
pub(crate) fn admission_chain(
    kind: FormulaKind,
    n: u32,
    term: usize,
    valuation: &[StateSet],
) -> ApreChain {
    let shape = shape_for(kind, n);
    term_chain(&shape.terms[term], valuation, kind.is_dual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{gen_random, normalize_priorities, parse_game, CaseTag};

    fn pennies() -> ConcurrentGame {
        parse_game(include_str!("../fixtures/matching_pennies.json")).unwrap()
    }

    fn buchi_limit() -> ConcurrentGame {
        parse_game(include_str!("../fixtures/buchi_limit.json")).unwrap()
    }

    fn names(g: &ConcurrentGame, set: &StateSet) -> Vec<String> {
        set.iter().map(|s| g.state_name(s).to_string()).collect()
    }

    #[test]
    fn shapes_have_expected_layout() {
        let s1 = shape_case1(2);
        assert_eq!(s1.quants.len(), 5);
        assert_eq!(s1.terms.len(), 4);
        assert_eq!(s1.terms[0].class, 3);
        assert_eq!(s1.terms[0].pairs, vec![(0, 1)]);
        assert_eq!(s1.terms[3].class, 0);
        assert_eq!(s1.terms[3].pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(s1.terms[3].pre_var, Some(4));

        let s2 = shape_case2(2);
        assert_eq!(s2.quants.len(), 4);
        assert_eq!(s2.terms.len(), 4);
        assert_eq!(s2.terms[0].class, 4);
        assert!(s2.terms[0].pairs.is_empty());
        assert_eq!(s2.terms[0].pre_var, Some(0));
        assert_eq!(s2.terms[1].class, 3);
        assert_eq!(s2.terms[1].pairs, vec![(0, 1)]);
        assert_eq!(s2.terms[2].class, 2);
        assert_eq!(s2.terms[2].pairs, vec![(0, 1)]);
        assert_eq!(s2.terms[2].pre_var, Some(2));
        assert_eq!(s2.terms[3].class, 1);
        assert_eq!(s2.terms[3].pairs, vec![(0, 1), (2, 3)]);

        let sl = shape_limit(1);
        assert_eq!(sl.quants.len(), 4);
        assert_eq!(sl.terms.len(), 2);
        assert_eq!(sl.terms[0].lpre_vars, Some((0, 1)));
        assert_eq!(sl.terms[0].pre_var, Some(2));
        assert_eq!(sl.terms[1].pairs, vec![(2, 3)]);
    }

    #[test]
    fn pennies_uniform_almost_is_everything() {
        let g = pennies();
        let res = eval_formula(&g, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g)).unwrap();
        assert_eq!(names(&g, &res.winning), vec!["s0", "s1"]);
        // s0 needs both actions; the witness is the full support.
        match &res.admit[0].as_ref().unwrap().witness {
            Some(StateWitness::GoodSet(u)) => assert_eq!(u, &vec![0, 1]),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn pennies_case1_and_case2_agree() {
        let g = pennies();
        let (g1, _) = normalize_priorities(&g, CaseTag::Case1);
        let (g2, _) = normalize_priorities(&g, CaseTag::Case2);
        let r1 = eval_formula(&g1, &FormulaInstance::plain(FormulaKind::AlmostCase1, &g1)).unwrap();
        let r2 = eval_formula(&g2, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g2)).unwrap();
        assert_eq!(r1.winning, r2.winning);
    }

    #[test]
    fn case_mismatch_reported() {
        // A priority-0 state is outside the case-2 range [1, 2n].
        let g = pennies().with_priorities(vec![0, 2]);
        let err = eval_formula(&g, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g));
        assert!(matches!(err, Err(Error::CaseMismatch { .. })));
    }

    #[test]
    fn buchi_limit_uniform_vs_limit() {
        let g = buchi_limit();
        let um = eval_formula(&g, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g)).unwrap();
        assert_eq!(names(&g, &um.winning), vec!["s1"]);
        let lim = eval_formula(&g, &FormulaInstance::plain(FormulaKind::LimitIPM, &g)).unwrap();
        assert_eq!(names(&g, &lim.winning), vec!["s0", "s1", "s3"]);
        // s0's witness plays the safe action at rank 0 and the risky one at 1.
        match &lim.admit[0].as_ref().unwrap().witness {
            Some(StateWitness::Ranks(r)) => {
                assert_eq!(r.ranks.get(&0), Some(&0));
                assert_eq!(r.ranks.get(&1), Some(&1));
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn buchi_trap_has_no_winners() {
        let g = parse_game(include_str!("../fixtures/buchi_trap.json")).unwrap();
        let um = eval_formula(&g, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g)).unwrap();
        let lim = eval_formula(&g, &FormulaInstance::plain(FormulaKind::LimitIPM, &g)).unwrap();
        assert!(um.winning.is_empty());
        assert!(lim.winning.is_empty());
    }

    #[test]
    fn three_priority_all_classes_lose() {
        let g = parse_game(include_str!("../fixtures/three_priority.json")).unwrap();
        let um = eval_formula(&g, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g)).unwrap();
        let lim = eval_formula(&g, &FormulaInstance::plain(FormulaKind::LimitIPM, &g)).unwrap();
        assert!(um.winning.is_empty());
        assert!(lim.winning.is_empty());
    }

    #[test]
    fn positive_forms_complement_almost() {
        for seed in 0..20 {
            let g = gen_random(4, 2, 2, 4, seed);
            let (g2, _) = normalize_priorities(&g, CaseTag::Case2);
            let a = eval_formula(&g2, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g2))
                .unwrap();
            let p = eval_formula(&g2, &FormulaInstance::plain(FormulaKind::PositiveCase2, &g2))
                .unwrap();
            assert_eq!(p.winning, a.winning.complement(), "seed {seed}");
            let (g1, _) = normalize_priorities(&g, CaseTag::Case1);
            let a1 = eval_formula(&g1, &FormulaInstance::plain(FormulaKind::AlmostCase1, &g1))
                .unwrap();
            let p1 = eval_formula(&g1, &FormulaInstance::plain(FormulaKind::PositiveCase1, &g1))
                .unwrap();
            assert_eq!(p1.winning, a1.winning.complement(), "seed {seed}");
            let l = eval_formula(&g2, &FormulaInstance::plain(FormulaKind::LimitIPM, &g2)).unwrap();
            let lc = eval_formula(&g2, &FormulaInstance::plain(FormulaKind::LimitComplement, &g2))
                .unwrap();
            assert_eq!(lc.winning, l.winning.complement(), "seed {seed}");
        }
    }

    #[test]
    fn target_reachability_through_case2() {
        let g = pennies();
        // With the whole space as target everything wins trivially.
        let inst = FormulaInstance {
            kind: FormulaKind::AlmostCase2,
            target: StateSet::full(2),
        };
        let res = eval_formula(&g, &inst).unwrap();
        assert_eq!(res.winning, StateSet::full(2));
        assert!(res.admit[0].as_ref().unwrap().term.is_none());
    }

    #[test]
    fn dual_forms_refuse_targets() {
        let g = pennies();
        let inst = FormulaInstance {
            kind: FormulaKind::PositiveCase2,
            target: StateSet::full(2),
        };
        assert!(matches!(
            eval_formula(&g, &inst),
            Err(Error::TargetUnsupported)
        ));
    }

    #[test]
    fn replay_accepts_genuine_results() {
        for seed in 0..10 {
            let g = gen_random(4, 2, 2, 4, seed);
            let (g2, _) = normalize_priorities(&g, CaseTag::Case2);
            for kind in [
                FormulaKind::AlmostCase2,
                FormulaKind::LimitIPM,
                FormulaKind::PositiveCase2,
            ] {
                let inst = FormulaInstance::plain(kind, &g2);
                let res = eval_formula(&g2, &inst).unwrap();
                assert!(eval_with_levels_replay(&g2, &inst, &res), "seed {seed}");
            }
        }
    }

    #[test]
    fn replay_rejects_tampered_results() {
        let mut hit_swap = false;
        for seed in 0..40 {
            let g = gen_random(4, 2, 2, 4, seed);
            let (g2, _) = normalize_priorities(&g, CaseTag::Case2);
            let inst = FormulaInstance::plain(FormulaKind::AlmostCase2, &g2);
            let res = eval_formula(&g2, &inst).unwrap();
            // Claiming an extra winner without admission data must fail.
            if let Some(loser) = res.winning.complement().iter().next() {
                let mut forged = res.clone();
                forged.winning.insert(loser);
                assert!(!eval_with_levels_replay(&g2, &inst, &forged));
            }
            // Swapping two admissions moves witnesses to wrong states.
            let winners: Vec<usize> = res.winning.iter().collect();
            for (i, &a) in winners.iter().enumerate() {
                for &b in &winners[i + 1..] {
                    let mut forged = res.clone();
                    forged.admit.swap(a, b);
                    if !eval_with_levels_replay(&g2, &inst, &forged) {
                        hit_swap = true;
                    }
                }
            }
        }
        assert!(hit_swap, "no admission swap was ever rejected");
    }
}
