//! Reductions make the bounded classes decidable: committing player 1 to a
//! pure move (or a fixed-precision mixture) turns each round into two
//! half-moves of a turn-based stochastic game, solved with pure strategies
//! on both sides.

use conpar::game::{parse_game, stateset_to_json};
use conpar::reduce::{reduce_pure, serialize_turn_based, tb_qual_parity};

fn main() {
    let g = parse_game(include_str!("../fixtures/matching_pennies.json")).unwrap();
    let tb = reduce_pure(&g);

    println!(
        "{} concurrent states become {} turn-based states:",
        g.n_states(),
        tb.game.n_states()
    );
    for s in 0..tb.game.n_states() {
        println!(
            "  {:<8} owner {}  from {:?}",
            tb.game.state_name(s),
            tb.owner[s],
            tb.back_map[s].map(|o| g.state_name(o))
        );
    }

    let sol = tb_qual_parity(&tb).unwrap();
    println!("\nturn-based winning set: {}", stateset_to_json(&tb.game, &sol.win1));
    println!("projected to the source: {}", stateset_to_json(&g, &tb.project(&sol.win1, &g)));
    for s in sol.win1.iter() {
        if tb.owner[s] == 1 && tb.game.n1(s) > 1 {
            println!(
                "  winning move at {}: {}",
                tb.game.state_name(s),
                tb.game.action1_name(s, sol.strat1[s])
            );
        }
    }

    println!("\nserialized reduction (owner field marks whose turn it is):");
    print!("{}", serialize_turn_based(&tb));
}
