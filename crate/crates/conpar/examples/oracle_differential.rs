//! Two routes to every answer: the fixpoint solvers against brute-force
//! strategy enumeration, operator duality against direct computation, plus
//! complementation, inclusion and support-independence checks on a batch of
//! seeded random games.

use conpar::game::parse_game;
use conpar::oracle::{oracle_almost_pm, oracle_almost_um, oracle_limit_ipm, run_differential, DiffConfig};
use conpar::game::stateset_to_json;

fn main() {
    // The oracles alone, on the pennies fixture.
    let g = parse_game(include_str!("../fixtures/matching_pennies.json")).unwrap();
    println!("pennies oracle U-M:   {}", stateset_to_json(&g, &oracle_almost_um(&g).unwrap()));
    println!("pennies oracle P-M:   {}", stateset_to_json(&g, &oracle_almost_pm(&g).unwrap()));
    println!(
        "pennies oracle limit: {}",
        stateset_to_json(&g, &oracle_limit_ipm(&g, &[0.1, 0.01, 0.001]).unwrap())
    );

    // A small differential batch; the acceptance suite runs 200.
    let cfg = DiffConfig::new(25, 4, 2, 42);
    let report = run_differential(&cfg);
    println!(
        "\n{} instances, {} ms, mismatches: {}",
        report.instances,
        report.wall_ms,
        report.mismatches.len()
    );
    for (check, tally) in &report.checks {
        println!("  {check:<26} pass {:>4}  fail {}", tally.pass, tally.fail);
    }
    assert!(report.pass());
}
