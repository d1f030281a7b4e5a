//! Strategies are documents: extract one, serialize it, parse it back, and
//! check it against a claimed winning set through the decision process it
//! leaves the adversary.

use conpar::game::{parse_game, stateset_to_json};
use conpar::mucalc::{eval_formula, FormulaInstance, FormulaKind};
use conpar::stateset::StateSet;
use conpar::strategy::{
    extract_uniform_almost, parse_strategy, serialize_strategy, verify_almost,
};

fn main() {
    let g = parse_game(include_str!("../fixtures/matching_pennies.json")).unwrap();
    let res = eval_formula(&g, &FormulaInstance::plain(FormulaKind::AlmostCase2, &g)).unwrap();
    let strat = extract_uniform_almost(&g, &res).unwrap();

    let text = serialize_strategy(&g, &strat, None, None).unwrap();
    println!("strategy document:\n{text}");

    let (parsed, meta) = parse_strategy(&g, &text).unwrap();
    assert_eq!(parsed, strat);
    assert_eq!(meta.kind, "uniform");

    let claim = res.winning;
    println!("claim {}: verified = {}", stateset_to_json(&g, &claim), verify_almost(&g, &parsed, &claim).unwrap());

    // A strategy that commits to one penny side cannot back the same claim:
    // the matching reply traps the play below the goal.
    let bad = {
        let doc = r#"{"kind": "uniform", "s0": {"support": ["a"]}, "s1": {"support": ["a"]}}"#;
        parse_strategy(&g, doc).unwrap().0
    };
    let verdict = verify_almost(&g, &bad, &claim).unwrap();
    println!("pure-a strategy on the same claim: verified = {verdict}");
    assert!(!verdict);

    let safe = StateSet::from_indices(g.n_states(), [1usize]);
    println!(
        "pure-a strategy on {}: verified = {}",
        stateset_to_json(&g, &safe),
        verify_almost(&g, &bad, &safe).unwrap()
    );
}
