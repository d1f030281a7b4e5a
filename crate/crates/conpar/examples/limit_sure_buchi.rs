//! Limit-sure winning beyond almost-sure: a Buechi game where no single
//! memoryless strategy wins with probability 1 from the start state, yet for
//! every eps some memoryless strategy wins with probability 1 - eps.

use conpar::game::{normalize_priorities, parse_game, stateset_to_json, CaseTag};
use conpar::mucalc::{eval_formula, FormulaInstance, FormulaKind};
use conpar::strategy::{extract_limit_eps, serialize_strategy, verify_value};

fn main() {
    let g = parse_game(include_str!("../fixtures/buchi_limit.json")).unwrap();
    let (gn, _) = normalize_priorities(&g, CaseTag::Case2);

    let almost = eval_formula(&gn, &FormulaInstance::plain(FormulaKind::AlmostCase2, &gn))
        .unwrap()
        .winning;
    let res = eval_formula(&gn, &FormulaInstance::plain(FormulaKind::LimitIPM, &gn)).unwrap();
    println!("almost-sure (uniform memoryless): {}", stateset_to_json(&gn, &almost));
    println!("limit-sure (any precision):       {}", stateset_to_json(&gn, &res.winning));
    assert!(almost.is_subset(&res.winning) && almost != res.winning);

    // The witness is a rank family: action weights scale like eps^rank, so
    // one rank table instantiates a strategy for every tolerance.
    for target in [0.1, 0.01, 0.001] {
        let w = extract_limit_eps(&gn, &res, target).unwrap();
        let replay = verify_value(&gn, &w.strategy, Some(w.eps), &res.winning).unwrap();
        let worst = res.winning.iter().map(|s| replay[s]).fold(0.0f64, f64::max);
        println!(
            "\ntarget {target}: instantiated at eps {:.3e}, certified failure bound {:.3e} (replayed {worst:.3e})",
            w.eps, w.achieved_bound
        );
        if target == 0.001 {
            print!(
                "{}",
                serialize_strategy(&gn, &w.strategy, Some(w.eps), Some(w.achieved_bound)).unwrap()
            );
        }
    }
}
