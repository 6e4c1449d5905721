//! Public states of the mini poker game along the always-bet line.

use gamecheck::corpus;
use gamecheck::partitions::{induce_all, public_states};

fn main() {
    let entry = corpus::mini_poker();
    let game = &entry.game;
    let parts = induce_all(game, entry.obs("coarse").unwrap());
    let public = public_states(game.len(), &parts);
    println!("{} histories, {} public states", game.len(), public.len());
    let line = corpus::mini_poker_bet_line(game, "J", "Q");
    for h in line {
        let b = public.block_of(h).unwrap();
        println!(
            "  ({:<22}) public state {b:>2} of size {}",
            game.history(h).to_string(),
            public.blocks()[b].len()
        );
    }
}
