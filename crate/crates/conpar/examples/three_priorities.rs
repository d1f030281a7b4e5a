//! A three-priority game player 1 cannot win under any bounded class, not
//! even in the limit: the complement expression certifies that player 2
//! wins positively from everywhere.

use conpar::game::{normalize_priorities, parse_game, preferred_case, stateset_to_json, CaseTag};
use conpar::mucalc::{eval_formula, FormulaInstance, FormulaKind};
use conpar::reduce::{solve_class, StrategyClass};

fn main() {
    let g = parse_game(include_str!("../fixtures/three_priority.json")).unwrap();

    for (label, class) in [
        ("P-M", StrategyClass::PureMemoryless),
        ("U-M", StrategyClass::UniformMemoryless),
        ("IP-M-limit", StrategyClass::LimitInfinite),
    ] {
        let win = solve_class(&g, class).unwrap();
        println!("{label:<11} {}", stateset_to_json(&g, &win));
        assert!(win.is_empty());
    }

    // The dual expressions print the complement directly: both partitions
    // cover the whole state space.
    let tag = preferred_case(&g);
    let (gn, _) = normalize_priorities(&g, tag);
    let kind = match tag {
        CaseTag::Case1 => FormulaKind::PositiveCase1,
        CaseTag::Case2 => FormulaKind::PositiveCase2,
    };
    let pos2 = eval_formula(&gn, &FormulaInstance::plain(kind, &gn)).unwrap().winning;
    println!("complement  {}", stateset_to_json(&gn, &pos2));
    assert_eq!(pos2.len(), gn.n_states());

    let (g2, _) = normalize_priorities(&g, CaseTag::Case2);
    let limc = eval_formula(&g2, &FormulaInstance::plain(FormulaKind::LimitComplement, &g2))
        .unwrap()
        .winning;
    assert_eq!(limc.len(), g2.n_states());
    println!("\nplayer 2 spoils every state with positive probability, even");
    println!("against strategies that may depend on eps.");
}
