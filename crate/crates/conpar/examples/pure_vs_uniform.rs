//! The matching-pennies gap: pure memoryless strategies lose the coin-flip
//! state, uniform mixtures win it.

use conpar::game::{parse_game, stateset_to_json};
use conpar::reduce::{solve_class, StrategyClass};
use conpar::strategy::{extract_uniform_almost, serialize_strategy, verify_almost};
use conpar::game::{normalize_priorities, preferred_case, CaseTag};
use conpar::mucalc::{eval_formula, FormulaInstance, FormulaKind};

fn main() {
    let g = parse_game(include_str!("../fixtures/matching_pennies.json")).unwrap();

    let pure = solve_class(&g, StrategyClass::PureMemoryless).unwrap();
    let uniform = solve_class(&g, StrategyClass::UniformMemoryless).unwrap();
    println!("pure memoryless winning set:    {}", stateset_to_json(&g, &pure));
    println!("uniform memoryless winning set: {}", stateset_to_json(&g, &uniform));

    // Any pure choice at s0 is countered by the matching reply, so only the
    // absorbing goal state survives; the fair coin neutralizes every reply.
    assert!(!pure.contains(0) && uniform.contains(0));

    let tag = preferred_case(&g);
    assert_eq!(tag, CaseTag::Case2);
    let (gn, _) = normalize_priorities(&g, tag);
    let res = eval_formula(&gn, &FormulaInstance::plain(FormulaKind::AlmostCase2, &gn)).unwrap();
    let strat = extract_uniform_almost(&gn, &res).unwrap();
    assert!(verify_almost(&gn, &strat, &res.winning).unwrap());
    println!("\nwitness strategy (verified almost-sure on its claim):");
    print!("{}", serialize_strategy(&gn, &strat, None, None).unwrap());
}
