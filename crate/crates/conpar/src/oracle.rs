//! Brute-force reference procedures and the differential-testing driver.
//!
//! The oracles decide the bounded classes by strategy enumeration: a state
//! wins iff some globally fixed memoryless strategy of the class leaves the
//! adversary no positive-probability spoiler in the induced decision
//! process. They deliberately bypass the fixpoint machinery so the two
//! routes share nothing but the game structure and the Markov analysis.
//!
//! The limit oracle is grid-approximate: it samples the rank strategies at
//! finitely many `eps` values and accepts a vanishing-failure trend. It is
//! a cross-check, not a decision procedure.

use std::collections::BTreeMap;
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::game::{
    gen_random, normalize_priorities, preferred_case, serialize_game, stateset_to_json, CaseTag,
    ConcurrentGame,
};
use crate::mdp::{fix_strategy, mdp_qual_parity, mdp_value_parity};
use crate::mucalc::{eval_formula, FormulaInstance, FormulaKind};
use crate::pred::{
    combined_pred1_limit, dual_complement, fpre2_direct, rank_assignments, ApreChain, DualKind,
    Fpre2Mode,
};
use crate::reduce::{solve_class, StrategyClass};
use crate::stateset::StateSet;
use crate::strategy::{MemorylessStrategy, StateChoice};

const SUPPORT_LIMIT: u128 = 100_000;
const PATTERN_LIMIT: u128 = 10_000;

fn advance(idx: &mut [usize], sizes: &[usize]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < sizes[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// Union over globally fixed support profiles of the states the adversary
/// cannot spoil with positive probability.
fn oracle_almost_supports(
    g: &ConcurrentGame,
    per_state: &[Vec<Vec<usize>>],
) -> StateSet {
    let n = g.n_states();
    let sizes: Vec<usize> = per_state.iter().map(|v| v.len()).collect();
    let full = StateSet::full(n);
    let mut win = StateSet::empty(n);
    let mut idx = vec![0usize; n];
    loop {
        let strat = MemorylessStrategy {
            choices: (0..n)
                .map(|s| StateChoice::Support(per_state[s][idx[s]].clone()))
                .collect(),
        };
        let m = fix_strategy(g, &strat, None).expect("enumerated supports are valid");
        let (_, positive_odd) = mdp_qual_parity(&m, false);
        win.union_with(&positive_odd.complement());
        if win == full || !advance(&mut idx, &sizes) {
            return win;
        }
    }
}

fn nonempty_subsets(m: usize) -> Vec<Vec<usize>> {
    (1..=m).flat_map(|size| (0..m).combinations(size)).collect()
}

/// States from which some uniform memoryless strategy wins almost surely.
pub fn oracle_almost_um(g: &ConcurrentGame) -> Result<StateSet, Error> {
    let mut count: u128 = 1;
    for s in 0..g.n_states() {
        count = count.saturating_mul((1u128 << g.n1(s)) - 1);
        if count > SUPPORT_LIMIT {
            return Err(Error::BlowupGuard {
                what: "uniform support profiles".into(),
                count,
                limit: SUPPORT_LIMIT,
            });
        }
    }
    let per_state: Vec<Vec<Vec<usize>>> =
        (0..g.n_states()).map(|s| nonempty_subsets(g.n1(s))).collect();
    Ok(oracle_almost_supports(g, &per_state))
}

/// States from which some pure memoryless strategy wins almost surely.
pub fn oracle_almost_pm(g: &ConcurrentGame) -> Result<StateSet, Error> {
    let mut count: u128 = 1;
    for s in 0..g.n_states() {
        count = count.saturating_mul(g.n1(s) as u128);
        if count > SUPPORT_LIMIT {
            return Err(Error::BlowupGuard {
                what: "pure strategy profiles".into(),
                count,
                limit: SUPPORT_LIMIT,
            });
        }
    }
    let per_state: Vec<Vec<Vec<usize>>> = (0..g.n_states())
        .map(|s| (0..g.n1(s)).map(|a| vec![a]).collect())
        .collect();
    Ok(oracle_almost_supports(g, &per_state))
}

/// Ordered set partitions of a d-element set.
fn fubini(d: usize) -> u128 {
    let mut a = vec![0u128; d + 1];
    a[0] = 1;
    for n in 1..=d {
        let mut binom: u128 = 1;
        for k in 1..=n {
            binom = binom * (n - k + 1) as u128 / k as u128;
            a[n] = a[n].saturating_add(binom.saturating_mul(a[n - k]));
        }
    }
    a[d]
}

/// Number of rank assignments over m actions: a nonempty domain together
/// with a contiguous ranking, i.e. an ordered set partition of the domain.
fn rank_pattern_count(m: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for d in 1..=m {
        binom = binom * (m - d + 1) as u128 / d as u128;
        total = total.saturating_add(binom.saturating_mul(fubini(d)));
    }
    total
}

/// Grid-approximate limit oracle: a state qualifies iff some global rank
/// pattern drives the adversary's best failure probability toward zero
/// along the grid (nonincreasing within 1e-9, final value below the
/// smallest grid point).
pub fn oracle_limit_ipm(g: &ConcurrentGame, eps_grid: &[f64]) -> Result<StateSet, Error> {
    assert!(!eps_grid.is_empty(), "the eps grid must be nonempty");
    assert!(
        eps_grid.iter().all(|e| *e > 0.0 && *e < 1.0),
        "grid points must lie in (0, 1)"
    );
    let mut grid = eps_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    grid.dedup();
    let min_eps = *grid.last().unwrap();

    let n = g.n_states();
    let mut count: u128 = 1;
    for s in 0..n {
        count = count.saturating_mul(rank_pattern_count(g.n1(s)));
        if count > PATTERN_LIMIT {
            return Err(Error::BlowupGuard {
                what: "rank patterns".into(),
                count,
                limit: PATTERN_LIMIT,
            });
        }
    }
    let per_state: Vec<_> = (0..n).map(|s| rank_assignments(g.n1(s))).collect();
    let sizes: Vec<usize> = per_state.iter().map(|v| v.len()).collect();
    debug_assert_eq!(
        sizes.iter().map(|&c| c as u128).product::<u128>(),
        count,
        "closed-form pattern count must match the enumeration"
    );

    let full = StateSet::full(n);
    let mut win = StateSet::empty(n);
    let mut idx = vec![0usize; n];
    loop {
        let strat = MemorylessStrategy {
            choices: (0..n)
                .map(|s| StateChoice::Ranks(per_state[s][idx[s]].clone()))
                .collect(),
        };
        let mut trend: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
        for &eps in &grid {
            let m = fix_strategy(g, &strat, Some(eps))?;
            trend.push(mdp_value_parity(&m, false, true)?);
        }
        for s in 0..n {
            if win.contains(s) {
                continue;
            }
            let monotone = trend.windows(2).all(|w| w[1][s] <= w[0][s] + 1e-9);
            if monotone && trend.last().unwrap()[s] < min_eps {
                win.insert(s);
            }
        }
        if win == full || !advance(&mut idx, &sizes) {
            return Ok(win);
        }
    }
}

// ---------------------------------------------------------------------------
// Differential driver
// ---------------------------------------------------------------------------

/// Shape of a differential run. All randomness derives from `seed`.
#[derive(Clone, Debug)]
pub struct DiffConfig {
    pub count: u32,
    pub states: usize,
    pub actions: usize,
    pub successors: usize,
    pub priorities: u32,
    pub seed: u64,
    /// Worker threads; instances are partitioned, the report is
    /// order-independent.
    pub jobs: usize,
}

impl DiffConfig {
    pub fn new(count: u32, states: usize, actions: usize, seed: u64) -> Self {
        DiffConfig {
            count,
            states,
            actions,
            successors: 2,
            priorities: 3,
            seed,
            jobs: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CheckTally {
    pub pass: u32,
    pub fail: u32,
}

/// One disagreement, carrying both answers and the offending game.
#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub seed: u64,
    pub check: String,
    pub left: String,
    pub right: String,
    pub game: serde_json::Value,
}

/// Outcome of a differential run. Wall time is informational and excluded
/// from the serialized form so reports stay byte-deterministic.
#[derive(Debug, Serialize)]
pub struct DiffReport {
    pub instances: u32,
    pub checks: BTreeMap<String, CheckTally>,
    pub mismatches: Vec<Mismatch>,
    #[serde(skip)]
    pub wall_ms: u64,
}

impl DiffReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

fn splitmix(seed: u64, i: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(i.wrapping_mul(0xD1B54A32D192ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

type SetEval = fn(&ConcurrentGame) -> Result<StateSet, Error>;

fn default_um(g: &ConcurrentGame) -> Result<StateSet, Error> {
    solve_class(g, StrategyClass::UniformMemoryless)
}

/// Outcome of one check, with errors flattened to text so results clone.
type CheckResult = Result<StateSet, String>;

fn checkable(r: Result<StateSet, Error>) -> CheckResult {
    r.map_err(|e| e.to_string())
}

struct CheckOutcome {
    check: &'static str,
    ok: bool,
    left: String,
    right: String,
}

fn render(g: &ConcurrentGame, r: &CheckResult) -> String {
    match r {
        Ok(s) => stateset_to_json(g, s).to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn compare(
    out: &mut Vec<CheckOutcome>,
    g: &ConcurrentGame,
    check: &'static str,
    left: CheckResult,
    right: CheckResult,
) {
    let ok = matches!((&left, &right), (Ok(a), Ok(b)) if a == b);
    out.push(CheckOutcome {
        check,
        ok,
        left: render(g, &left),
        right: render(g, &right),
    });
}

fn rand_set(rng: &mut ChaCha8Rng, n: usize) -> StateSet {
    StateSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

/// Ascending chain of `len` sets built by cumulative union.
fn ascending_sets(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<StateSet> {
    let mut out = Vec::with_capacity(len);
    let mut cur = rand_set(rng, n);
    out.push(cur.clone());
    for _ in 1..len {
        cur.union_with(&rand_set(rng, n));
        out.push(cur.clone());
    }
    out
}

fn primal_chain(asc: &[StateSet], k: usize, with_pre: bool) -> ApreChain {
    // Slots ascend as X[0] .. X[k-1], pre, Y[k-1] .. Y[0].
    let total = asc.len();
    debug_assert_eq!(total, 2 * k + with_pre as usize);
    let pairs = (0..k)
        .map(|j| (asc[total - 1 - j].clone(), asc[j].clone()))
        .collect();
    ApreChain {
        pairs,
        pre_set: with_pre.then(|| asc[k].clone()),
        lpre_pair: None,
    }
}

fn complement_chain(chain: &ApreChain) -> ApreChain {
    ApreChain {
        pairs: chain
            .pairs
            .iter()
            .map(|(y, x)| (y.complement(), x.complement()))
            .collect(),
        pre_set: chain.pre_set.as_ref().map(|p| p.complement()),
        lpre_pair: chain
            .lpre_pair
            .as_ref()
            .map(|(y, x)| (y.complement(), x.complement())),
    }
}

/// Operator-level duality on random nested tuples: the direct player-2
/// computation, the complement route, and the fractional complement route
/// must all line up.
fn duality_checks(g: &ConcurrentGame, seed: u64, out: &mut Vec<CheckOutcome>) {
    let n = g.n_states();
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed, 0x5eed));
    for round in 0..3 {
        let k = 1 + (round % 2);
        for with_pre in [false, true] {
            let primal = primal_chain(&ascending_sets(&mut rng, n, 2 * k + with_pre as usize), k, with_pre);
            let chain2 = complement_chain(&primal);
            let mode = if with_pre { Fpre2Mode::Even } else { Fpre2Mode::Odd };
            let kind = if with_pre { DualKind::FpreEven } else { DualKind::FpreOdd };
            let direct = fpre2_direct(g, &chain2, mode);
            compare(
                out,
                g,
                "fpre2_duality",
                Ok(direct),
                checkable(dual_complement(g, &chain2, kind)),
            );
        }
        // Fractional family: lpre pair wraps the chain.
        for with_pre in [false, true] {
            let asc = ascending_sets(&mut rng, n, 2 * k + with_pre as usize + 2);
            let core = primal_chain(&asc[1..asc.len() - 1], k, with_pre);
            let primal = ApreChain {
                lpre_pair: Some((asc.last().unwrap().clone(), asc[0].clone())),
                ..core
            };
            let (limit_set, _) = combined_pred1_limit(g, &primal);
            let chain2 = {
                let c = complement_chain(&primal);
                let (ly, lx) = c.lpre_pair.clone().unwrap();
                let mut pairs = vec![(ly, lx)];
                pairs.extend(c.pairs);
                ApreChain {
                    pairs,
                    pre_set: c.pre_set,
                    lpre_pair: None,
                }
            };
            let kind = if with_pre { DualKind::FrpreEven } else { DualKind::FrpreOdd };
            compare(
                out,
                g,
                "frpre_duality",
                Ok(limit_set.complement()),
                checkable(dual_complement(g, &chain2, kind)),
            );
        }
    }
}

fn formula_set(g: &ConcurrentGame, tag: CaseTag, kind: FormulaKind) -> Result<StateSet, Error> {
    let (gn, _) = normalize_priorities(g, tag);
    Ok(eval_formula(&gn, &FormulaInstance::plain(kind, &gn))?.winning)
}

fn instance_checks(g: &ConcurrentGame, seed: u64, um_eval: SetEval) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let um = checkable(um_eval(g));
    compare(
        &mut out,
        g,
        "um_formula_vs_oracle",
        um.clone(),
        checkable(oracle_almost_um(g)),
    );

    let pm = checkable(solve_class(g, StrategyClass::PureMemoryless));
    compare(
        &mut out,
        g,
        "pm_reduction_vs_oracle",
        pm.clone(),
        checkable(oracle_almost_pm(g)),
    );

    duality_checks(g, seed, &mut out);

    // Formula-level complementation: the dual expressions compute exact
    // complements.
    let tag = preferred_case(g);
    let (a_kind, p_kind) = match tag {
        CaseTag::Case1 => (FormulaKind::AlmostCase1, FormulaKind::PositiveCase1),
        CaseTag::Case2 => (FormulaKind::AlmostCase2, FormulaKind::PositiveCase2),
    };
    compare(
        &mut out,
        g,
        "almost_complementation",
        checkable(formula_set(g, tag, a_kind)).map(|s| s.complement()),
        checkable(formula_set(g, tag, p_kind)),
    );
    let limit = checkable(formula_set(g, CaseTag::Case2, FormulaKind::LimitIPM));
    compare(
        &mut out,
        g,
        "limit_complementation",
        limit.clone().map(|s| s.complement()),
        checkable(formula_set(g, CaseTag::Case2, FormulaKind::LimitComplement)),
    );

    // Class inclusion chain.
    if let (Ok(pm), Ok(um), Ok(lim)) = (&pm, &um, &limit) {
        let ok = pm.is_subset(um) && um.is_subset(lim);
        out.push(CheckOutcome {
            check: "inclusion_chain",
            ok,
            left: format!(
                "P-M {} ⊆ U-M {}",
                stateset_to_json(g, pm),
                stateset_to_json(g, um)
            ),
            right: format!("⊆ limit {}", stateset_to_json(g, lim)),
        });
    }

    // Precision sweep: nondecreasing in b, equal to U-M at the action count.
    let max_m = (0..g.n_states()).map(|s| g.n1(s)).max().unwrap_or(1) as u32;
    let mut fp_sets = Vec::new();
    let mut guard_hit = false;
    for b in 1..=3.max(max_m) {
        match solve_class(g, StrategyClass::FinitePrecision(b)) {
            Ok(s) => fp_sets.push((b, s)),
            Err(Error::BlowupGuard { .. }) => {
                guard_hit = true;
                break;
            }
            Err(e) => {
                out.push(CheckOutcome {
                    check: "fp_sweep",
                    ok: false,
                    left: format!("FP-M({b})"),
                    right: format!("error: {e}"),
                });
                guard_hit = true;
                break;
            }
        }
    }
    if !guard_hit {
        let mono = fp_sets.windows(2).all(|w| w[0].1.is_subset(&w[1].1));
        let at_max = fp_sets.iter().find(|(b, _)| *b == max_m).map(|(_, s)| s);
        let matches_um = match (&um, at_max) {
            (Ok(u), Some(s)) => s == u,
            _ => false,
        };
        out.push(CheckOutcome {
            check: "fp_sweep",
            ok: mono && matches_um,
            left: fp_sets
                .iter()
                .map(|(b, s)| format!("b={b}:{}", stateset_to_json(g, s)))
                .collect::<Vec<_>>()
                .join(" "),
            right: format!("U-M {}", render(g, &um)),
        });
    }

    // Support independence: re-randomized probabilities, same answers.
    let gp = g.perturb_probabilities(splitmix(seed, 0x9e2b));
    compare(
        &mut out,
        g,
        "support_independence_um",
        um,
        checkable(um_eval(&gp)),
    );
    compare(
        &mut out,
        g,
        "support_independence_limit",
        limit,
        checkable(formula_set(&gp, CaseTag::Case2, FormulaKind::LimitIPM)),
    );

    out
}

fn run_instance(cfg: &DiffConfig, i: u32, um_eval: SetEval) -> (u64, serde_json::Value, Vec<CheckOutcome>) {
    let seed = splitmix(cfg.seed, i as u64);
    let g = gen_random(cfg.states, cfg.actions, cfg.successors, cfg.priorities, seed);
    let doc = serde_json::from_str(&serialize_game(&g, None)).expect("game serializes");
    (seed, doc, instance_checks(&g, seed, um_eval))
}

fn run_differential_with(cfg: &DiffConfig, um_eval: SetEval) -> DiffReport {
    let start = Instant::now();
    let jobs = cfg.jobs.max(1).min(cfg.count.max(1) as usize);
    let mut results: Vec<(u64, serde_json::Value, Vec<CheckOutcome>)> = if jobs <= 1 {
        (0..cfg.count).map(|i| run_instance(cfg, i, um_eval)).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let cfg = &*cfg;
                    scope.spawn(move || {
                        (w as u32..cfg.count)
                            .step_by(jobs)
                            .map(|i| run_instance(cfg, i, um_eval))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    results.sort_by_key(|(seed, _, _)| *seed);

    let mut checks: BTreeMap<String, CheckTally> = BTreeMap::new();
    let mut mismatches = Vec::new();
    for (seed, doc, outcomes) in results {
        for o in outcomes {
            let tally = checks.entry(o.check.to_string()).or_default();
            if o.ok {
                tally.pass += 1;
            } else {
                tally.fail += 1;
                mismatches.push(Mismatch {
                    seed,
                    check: o.check.to_string(),
                    left: o.left,
                    right: o.right,
                    game: doc.clone(),
                });
            }
        }
    }
    DiffReport {
        instances: cfg.count,
        checks,
        mismatches,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}

/// Run the differential suite described by the config.
pub fn run_differential(cfg: &DiffConfig) -> DiffReport {
    run_differential_with(cfg, default_um)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;

    fn pennies() -> ConcurrentGame {
        parse_game(include_str!("../fixtures/matching_pennies.json")).unwrap()
    }

    fn buchi_limit() -> ConcurrentGame {
        parse_game(include_str!("../fixtures/buchi_limit.json")).unwrap()
    }

    fn three_priority() -> ConcurrentGame {
        parse_game(include_str!("../fixtures/three_priority.json")).unwrap()
    }

    fn buchi_trap() -> ConcurrentGame {
        parse_game(include_str!("../fixtures/buchi_trap.json")).unwrap()
    }

    fn set(universe: usize, xs: &[usize]) -> StateSet {
        StateSet::from_indices(universe, xs.iter().copied())
    }

    #[test]
    fn pennies_oracles() {
        let g = pennies();
        assert_eq!(oracle_almost_um(&g).unwrap(), StateSet::full(2));
        assert_eq!(oracle_almost_pm(&g).unwrap(), set(2, &[1]));
    }

    #[test]
    fn hard_fixtures_are_empty() {
        let g3 = three_priority();
        assert!(oracle_almost_um(&g3).unwrap().is_empty());
        assert!(oracle_limit_ipm(&g3, &[0.1, 0.01, 0.001]).unwrap().is_empty());
        let g4 = buchi_trap();
        assert!(oracle_almost_um(&g4).unwrap().is_empty());
        assert!(oracle_limit_ipm(&g4, &[0.1, 0.01, 0.001]).unwrap().is_empty());
    }

    #[test]
    fn limit_oracle_confirms_buchi_limit() {
        let g = buchi_limit();
        let win = oracle_limit_ipm(&g, &[0.1, 0.01, 0.001]).unwrap();
        assert_eq!(win, set(4, &[0, 1, 3]));
        assert_eq!(oracle_almost_pm(&g).unwrap(), set(4, &[1]));
    }

    #[test]
    fn pm_within_um() {
        for seed in 0..10 {
            let g = gen_random(4, 2, 2, 3, seed);
            let pm = oracle_almost_pm(&g).unwrap();
            let um = oracle_almost_um(&g).unwrap();
            assert!(pm.is_subset(&um), "seed {seed}");
        }
    }

    #[test]
    fn pattern_count_matches_enumeration() {
        for m in 1..=5 {
            assert_eq!(rank_pattern_count(m), rank_assignments(m).len() as u128);
        }
    }

    #[test]
    fn guards_fire() {
        let g = gen_random(12, 4, 2, 3, 3);
        assert!(matches!(
            oracle_almost_um(&g),
            Err(Error::BlowupGuard { .. })
        ));
        assert!(matches!(
            oracle_limit_ipm(&g, &[0.1]),
            Err(Error::BlowupGuard { .. })
        ));
    }

    #[test]
    fn empty_run_passes() {
        let report = run_differential(&DiffConfig::new(0, 4, 2, 1));
        assert!(report.pass());
        assert_eq!(report.instances, 0);
        assert!(report.checks.is_empty());
    }

    #[test]
    fn small_run_is_clean_and_deterministic() {
        let cfg = DiffConfig::new(6, 4, 2, 1);
        let r1 = run_differential(&cfg);
        assert!(r1.pass(), "mismatches: {}", r1.to_json());
        let r2 = run_differential(&cfg);
        assert_eq!(r1.to_json(), r2.to_json());
        let mut par = cfg.clone();
        par.jobs = 3;
        let r3 = run_differential(&par);
        assert_eq!(r1.to_json(), r3.to_json());
    }

    #[test]
    fn corrupted_evaluator_is_detected() {
        fn corrupt(g: &ConcurrentGame) -> Result<StateSet, Error> {
            default_um(g).map(|s| s.complement())
        }
        let report = run_differential_with(&DiffConfig::new(3, 4, 2, 1), corrupt);
        assert!(!report.pass());
        assert!(report.checks["um_formula_vs_oracle"].fail > 0);
    }
}
