//! Randomized invariants over the public API. Games come from seeded
//! generation so every case shrinks to a smaller seed/size combination.

use conpar::game::{
    gen_random, normalize_priorities, parse_game, parse_game_with_owners, preferred_case,
    serialize_game, CaseTag, ConcurrentGame,
};
use conpar::mucalc::{
    eval_formula, eval_with_levels_replay, FormulaInstance, FormulaKind, SolveResult,
};
use conpar::pred::{
    combined_pred1, combined_pred1_limit, dual_complement, fpre2_direct, ApreChain, DualKind,
    Fpre2Mode,
};
use conpar::reduce::{reduce_pure, serialize_turn_based, solve_class, StrategyClass};
use conpar::stateset::StateSet;
use conpar::strategy::{
    extract_limit_eps, extract_uniform_almost, parse_strategy, serialize_strategy, verify_almost,
    verify_value,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_game(max_states: usize, max_act: usize) -> impl Strategy<Value = ConcurrentGame> {
    (
        1..=max_states,
        1..=max_act,
        1usize..=2,
        0u32..=3,
        any::<u64>(),
    )
        .prop_map(|(n, a, su, p, seed)| gen_random(n, a, su, p, seed))
}

fn rand_set(rng: &mut ChaCha8Rng, n: usize) -> StateSet {
    StateSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

/// Ascending chain by cumulative union.
fn ascending(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<StateSet> {
    let mut out = Vec::with_capacity(len);
    let mut cur = rand_set(rng, n);
    out.push(cur.clone());
    for _ in 1..len {
        cur.union_with(&rand_set(rng, n));
        out.push(cur.clone());
    }
    out
}

/// Slots ascend as X[0] .. X[k-1], pre, Y[k-1] .. Y[0].
fn primal(asc: &[StateSet], k: usize, with_pre: bool) -> ApreChain {
    assert_eq!(asc.len(), 2 * k + with_pre as usize);
    ApreChain {
        pairs: (0..k)
            .map(|j| (asc[asc.len() - 1 - j].clone(), asc[j].clone()))
            .collect(),
        pre_set: with_pre.then(|| asc[k].clone()),
        lpre_pair: None,
    }
}

fn comp_chain(chain: &ApreChain) -> ApreChain {
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

fn almost_kind(tag: CaseTag) -> FormulaKind {
    match tag {
        CaseTag::Case1 => FormulaKind::AlmostCase1,
        CaseTag::Case2 => FormulaKind::AlmostCase2,
    }
}

fn positive_kind(tag: CaseTag) -> FormulaKind {
    match tag {
        CaseTag::Case1 => FormulaKind::PositiveCase1,
        CaseTag::Case2 => FormulaKind::PositiveCase2,
    }
}

fn eval_plain(g: &ConcurrentGame, tag: CaseTag, kind: FormulaKind) -> SolveResult {
    let (gn, _) = normalize_priorities(g, tag);
    eval_formula(&gn, &FormulaInstance::plain(kind, &gn)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Enlarging every slot of a nested tuple can only grow the one-step
    /// operators.
    #[test]
    fn pred_operators_monotone(
        g in small_game(5, 3),
        seed in any::<u64>(),
        k in 1usize..=2,
        with_pre in any::<bool>(),
    ) {
        let n = g.n_states();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 2 * k + with_pre as usize;
        let lo = ascending(&mut rng, n, len);
        let extra = ascending(&mut rng, n, len);
        let hi: Vec<StateSet> = lo
            .iter()
            .zip(&extra)
            .map(|(a, b)| {
                let mut u = a.clone();
                u.union_with(b);
                u
            })
            .collect();
        let (small, _) = combined_pred1(&g, &primal(&lo, k, with_pre));
        let (big, _) = combined_pred1(&g, &primal(&hi, k, with_pre));
        prop_assert!(small.is_subset(&big), "plain operator not monotone");

        let wrap = |asc: &[StateSet], inner: &[StateSet]| ApreChain {
            lpre_pair: Some((asc.last().unwrap().clone(), asc[0].clone())),
            ..primal(inner, k, with_pre)
        };
        let lo2 = ascending(&mut rng, n, len + 2);
        let extra2 = ascending(&mut rng, n, len + 2);
        let hi2: Vec<StateSet> = lo2
            .iter()
            .zip(&extra2)
            .map(|(a, b)| {
                let mut u = a.clone();
                u.union_with(b);
                u
            })
            .collect();
        let (small, _) =
            combined_pred1_limit(&g, &wrap(&lo2, &lo2[1..lo2.len() - 1]));
        let (big, _) = combined_pred1_limit(&g, &wrap(&hi2, &hi2[1..hi2.len() - 1]));
        prop_assert!(small.is_subset(&big), "limit operator not monotone");
    }

    /// Treating the outermost pair as one more plain pair only shrinks the
    /// result: rank witnesses generalize uniform good sets, never the other
    /// way around.
    #[test]
    fn plain_chain_within_limit_chain(
        g in small_game(5, 3),
        seed in any::<u64>(),
        k in 1usize..=2,
        with_pre in any::<bool>(),
    ) {
        let n = g.n_states();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let asc = ascending(&mut rng, n, 2 * k + with_pre as usize + 2);
        let inner = &asc[1..asc.len() - 1];
        let outer = (asc.last().unwrap().clone(), asc[0].clone());

        let limit_chain = ApreChain {
            lpre_pair: Some(outer.clone()),
            ..primal(inner, k, with_pre)
        };
        let mut plain_pairs = vec![outer];
        plain_pairs.extend(primal(inner, k, with_pre).pairs);
        let plain_chain = ApreChain {
            pairs: plain_pairs,
            pre_set: limit_chain.pre_set.clone(),
            lpre_pair: None,
        };

        let (plain, _) = combined_pred1(&g, &plain_chain);
        let (limit, _) = combined_pred1_limit(&g, &limit_chain);
        prop_assert!(plain.is_subset(&limit), "plain escaped the limit operator");
    }

    /// The player-2 operators equal the complement route on every nested
    /// tuple, for all four dual kinds.
    #[test]
    fn operator_duality(
        g in small_game(5, 3),
        seed in any::<u64>(),
        k in 1usize..=2,
        with_pre in any::<bool>(),
    ) {
        let n = g.n_states();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let chain2 = comp_chain(&primal(
            &ascending(&mut rng, n, 2 * k + with_pre as usize),
            k,
            with_pre,
        ));
        let (mode, kind) = if with_pre {
            (Fpre2Mode::Even, DualKind::FpreEven)
        } else {
            (Fpre2Mode::Odd, DualKind::FpreOdd)
        };
        let direct = fpre2_direct(&g, &chain2, mode);
        let via_dual = dual_complement(&g, &chain2, kind).unwrap();
        prop_assert_eq!(direct, via_dual, "fpre2 duality broke");

        let asc = ascending(&mut rng, n, 2 * k + with_pre as usize + 2);
        let frpre_primal = ApreChain {
            lpre_pair: Some((asc.last().unwrap().clone(), asc[0].clone())),
            ..primal(&asc[1..asc.len() - 1], k, with_pre)
        };
        let (limit_set, _) = combined_pred1_limit(&g, &frpre_primal);
        let frpre_chain2 = {
            let c = comp_chain(&frpre_primal);
            let (ly, lx) = c.lpre_pair.clone().unwrap();
            let mut pairs = vec![(ly, lx)];
            pairs.extend(c.pairs);
            ApreChain { pairs, pre_set: c.pre_set, lpre_pair: None }
        };
        let kind = if with_pre { DualKind::FrpreEven } else { DualKind::FrpreOdd };
        let via_dual = dual_complement(&g, &frpre_chain2, kind).unwrap();
        prop_assert_eq!(limit_set.complement(), via_dual, "frpre duality broke");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Almost-sure and positive sets partition the states, in both the plain
    /// and the limit families.
    #[test]
    fn winning_sets_partition(g in small_game(4, 2)) {
        let tag = preferred_case(&g);
        let almost = eval_plain(&g, tag, almost_kind(tag)).winning;
        let positive2 = eval_plain(&g, tag, positive_kind(tag)).winning;
        prop_assert_eq!(&positive2, &almost.complement(), "almost/positive overlap or gap");

        let limit = eval_plain(&g, CaseTag::Case2, FormulaKind::LimitIPM).winning;
        let limit_comp = eval_plain(&g, CaseTag::Case2, FormulaKind::LimitComplement).winning;
        prop_assert_eq!(&limit_comp, &limit.complement(), "limit complement mismatch");
    }

    /// Both priority normal forms give the same almost-sure set.
    #[test]
    fn case_forms_agree(g in small_game(4, 2)) {
        let a1 = eval_plain(&g, CaseTag::Case1, FormulaKind::AlmostCase1).winning;
        let a2 = eval_plain(&g, CaseTag::Case2, FormulaKind::AlmostCase2).winning;
        prop_assert_eq!(a1, a2, "case forms disagree");
    }

    /// Qualitative answers depend on transition supports only.
    #[test]
    fn support_independence(g in small_game(4, 2), seed in any::<u64>()) {
        let h = g.perturb_probabilities(seed);
        let tag = preferred_case(&g);
        prop_assert_eq!(
            eval_plain(&g, tag, almost_kind(tag)).winning,
            eval_plain(&h, tag, almost_kind(tag)).winning,
            "almost set moved under perturbation"
        );
        prop_assert_eq!(
            eval_plain(&g, CaseTag::Case2, FormulaKind::LimitIPM).winning,
            eval_plain(&h, CaseTag::Case2, FormulaKind::LimitIPM).winning,
            "limit set moved under perturbation"
        );
    }

    /// More expressive strategy classes win from no fewer states, and
    /// precision max_s |moves1(s)| already reaches the uniform class.
    #[test]
    fn class_inclusion_chain(g in small_game(4, 2)) {
        let pm = solve_class(&g, StrategyClass::PureMemoryless).unwrap();
        let um = solve_class(&g, StrategyClass::UniformMemoryless).unwrap();
        let lim = solve_class(&g, StrategyClass::LimitInfinite).unwrap();
        prop_assert!(pm.is_subset(&um), "P-M outside U-M");
        prop_assert!(um.is_subset(&lim), "U-M outside IP-M-limit");

        let max_m = (0..g.n_states()).map(|s| g.n1(s)).max().unwrap() as u32;
        let mut prev = pm;
        for b in 1..=max_m {
            let fp = solve_class(&g, StrategyClass::FinitePrecision(b)).unwrap();
            prop_assert!(prev.is_subset(&fp), "FP-M({b}) lost states over FP-M({})", b - 1);
            prev = fp;
        }
        prop_assert_eq!(prev, um, "FP-M at maximal support size must match U-M");
    }

    /// Uniform witnesses extracted from the almost-sure result always verify
    /// on the full winning set.
    #[test]
    fn uniform_extraction_sound(g in small_game(4, 2)) {
        let tag = preferred_case(&g);
        let (gn, _) = normalize_priorities(&g, tag);
        let res = eval_formula(&gn, &FormulaInstance::plain(almost_kind(tag), &gn)).unwrap();
        let strat = extract_uniform_almost(&gn, &res).unwrap();
        prop_assert!(verify_almost(&gn, &strat, &res.winning).unwrap());
    }

    /// Ranked witnesses instantiated by the eps search meet the requested
    /// bound at every claimed state.
    #[test]
    fn ranked_extraction_meets_bound(g in small_game(4, 2)) {
        let (gn, _) = normalize_priorities(&g, CaseTag::Case2);
        let res = eval_formula(&gn, &FormulaInstance::plain(FormulaKind::LimitIPM, &gn)).unwrap();
        if res.winning.is_empty() {
            return Ok(());
        }
        let w = extract_limit_eps(&gn, &res, 0.05).unwrap();
        prop_assert!(w.achieved_bound <= 0.05 + 1e-9);
        let vals = verify_value(&gn, &w.strategy, Some(w.eps), &res.winning).unwrap();
        for s in res.winning.iter() {
            prop_assert!(
                vals[s] <= 0.05 + 1e-6,
                "state {} fails with probability {}",
                gn.state_name(s),
                vals[s]
            );
        }
    }

    /// Admission records replay: genuine results verify, tampered ones are
    /// rejected.
    #[test]
    fn replay_validation(g in small_game(4, 2)) {
        let tag = preferred_case(&g);
        let (gn, _) = normalize_priorities(&g, tag);
        let inst = FormulaInstance::plain(almost_kind(tag), &gn);
        let res = eval_formula(&gn, &inst).unwrap();
        prop_assert!(eval_with_levels_replay(&gn, &inst, &res), "genuine result rejected");

        if let Some(s) = res.winning.iter().next() {
            let mut forged = res.clone();
            forged.admit[s] = None;
            prop_assert!(
                !eval_with_levels_replay(&gn, &inst, &forged),
                "missing admission accepted"
            );
        }
        let mut forged = res.clone();
        let s = forged.winning.iter().next();
        match s {
            Some(s) => forged.winning.remove(s),
            None => forged.winning.insert(0),
        }
        prop_assert!(
            !eval_with_levels_replay(&gn, &inst, &forged),
            "winning-set edit accepted"
        );
    }

    /// Game documents survive serialize/parse exactly, with and without
    /// owner annotations.
    #[test]
    fn serialization_round_trips(g in small_game(4, 2)) {
        let text = serialize_game(&g, None);
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(&serialize_game(&back, None), &text, "game round-trip drifted");

        let tb = reduce_pure(&g);
        let tb_text = serialize_turn_based(&tb);
        let (tb_back, owners) = parse_game_with_owners(&tb_text).unwrap();
        prop_assert_eq!(owners.as_deref(), Some(&tb.owner[..]), "owners lost");
        prop_assert_eq!(
            serialize_game(&tb_back, owners.as_deref()),
            tb_text,
            "turn-based round-trip drifted"
        );
    }

    /// Strategy documents round-trip with their header fields bit-exact.
    #[test]
    fn strategy_round_trips(g in small_game(4, 2)) {
        let tag = preferred_case(&g);
        let (gn, _) = normalize_priorities(&g, tag);
        let res = eval_formula(&gn, &FormulaInstance::plain(almost_kind(tag), &gn)).unwrap();
        let strat = extract_uniform_almost(&gn, &res).unwrap();
        let text = serialize_strategy(&gn, &strat, None, None).unwrap();
        let (back, meta) = parse_strategy(&gn, &text).unwrap();
        prop_assert_eq!(&back, &strat, "uniform strategy drifted");
        prop_assert_eq!(meta.kind.as_str(), "uniform");

        let (gn, _) = normalize_priorities(&g, CaseTag::Case2);
        let res = eval_formula(&gn, &FormulaInstance::plain(FormulaKind::LimitIPM, &gn)).unwrap();
        if res.winning.is_empty() {
            return Ok(());
        }
        let w = extract_limit_eps(&gn, &res, 0.05).unwrap();
        let text =
            serialize_strategy(&gn, &w.strategy, Some(w.eps), Some(w.achieved_bound)).unwrap();
        let (back, meta) = parse_strategy(&gn, &text).unwrap();
        prop_assert_eq!(&back, &w.strategy, "ranked strategy drifted");
        prop_assert_eq!(meta.eps, Some(w.eps), "eps header drifted");
        prop_assert_eq!(meta.achieved_bound, Some(w.achieved_bound), "bound header drifted");
    }
}
