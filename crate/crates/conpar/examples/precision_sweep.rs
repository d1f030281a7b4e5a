//! How much probability precision does player 1 need? Sweeping the
//! b-finite-precision classes shows pennies saturating at b = 2 while the
//! limit-sure Buechi game never saturates at any finite precision.

use conpar::error::Error;
use conpar::game::{parse_game, stateset_to_json};
use conpar::reduce::{reduce_finite_precision, solve_class, StrategyClass};

fn sweep(name: &str, text: &str) {
    let g = parse_game(text).unwrap();
    println!("{name}:");
    let um = solve_class(&g, StrategyClass::UniformMemoryless).unwrap();
    let lim = solve_class(&g, StrategyClass::LimitInfinite).unwrap();
    for b in 1..=3 {
        let fp = solve_class(&g, StrategyClass::FinitePrecision(b)).unwrap();
        let tb = reduce_finite_precision(&g, b).unwrap();
        println!(
            "  FP-M({b}) = {}  ({} turn-based states)",
            stateset_to_json(&g, &fp),
            tb.game.n_states()
        );
        assert!(fp.is_subset(&um));
    }
    println!("  U-M     = {}", stateset_to_json(&g, &um));
    println!("  limit   = {}", stateset_to_json(&g, &lim));
}

fn main() {
    sweep("matching pennies", include_str!("../fixtures/matching_pennies.json"));
    println!();
    sweep("limit-sure Buechi", include_str!("../fixtures/buchi_limit.json"));

    // The reduction counts every representable mixture, so it refuses games
    // where that count explodes instead of grinding forever.
    let big = conpar::game::gen_random(8, 5, 2, 3, 11);
    match reduce_finite_precision(&big, 40) {
        Err(Error::BlowupGuard { what, count, limit }) => {
            println!("\nprecision 40 on an 8-state game: refused ({what}: {count} > {limit})");
        }
        Ok(tb) => println!(
            "\nprecision 40 on an 8-state game: {} turn-based states",
            tb.game.n_states()
        ),
        Err(e) => panic!("unexpected error {e}"),
    }
}
