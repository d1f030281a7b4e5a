//! Seeded random games, and the support-equivalence fact that justifies
//! testing with them: qualitative winning sets survive any re-randomization
//! of the transition probabilities that keeps the supports.

use conpar::game::{gen_random, serialize_game, stateset_to_json};
use conpar::reduce::{solve_class, StrategyClass};

fn main() {
    let g = gen_random(5, 2, 2, 3, 7);
    print!("{}", serialize_game(&g, None));

    let um = solve_class(&g, StrategyClass::UniformMemoryless).unwrap();
    let lim = solve_class(&g, StrategyClass::LimitInfinite).unwrap();
    println!("\nU-M   = {}", stateset_to_json(&g, &um));
    println!("limit = {}", stateset_to_json(&g, &lim));

    for seed in [1u64, 2, 3] {
        let gp = g.perturb_probabilities(seed);
        let um_p = solve_class(&gp, StrategyClass::UniformMemoryless).unwrap();
        let lim_p = solve_class(&gp, StrategyClass::LimitInfinite).unwrap();
        assert_eq!(um, um_p);
        assert_eq!(lim, lim_p);
        println!("perturbation {seed}: same winning sets");
    }
}
