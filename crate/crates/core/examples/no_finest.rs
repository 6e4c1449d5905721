//! A game without a finest valid partition: the maximal refinements of the
//! classical one are pairwise incomparable.

use gamecheck::corpus;
use gamecheck::partitions::{compare, enumerate_max_refinements, DEFAULT_NODE_LIMIT};

fn main() {
    let entry = corpus::no_finest_game();
    let game = &entry.game;
    let maximal = enumerate_max_refinements(
        game,
        entry.classical.as_ref().unwrap(),
        1,
        DEFAULT_NODE_LIMIT,
    )
    .unwrap();
    for (k, p) in maximal.iter().enumerate() {
        let blocks: Vec<String> = p
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&h| format!("({})", game.history(h)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        println!("#{k}: {{{}}}", blocks.join("} {"));
    }
    for i in 0..maximal.len() {
        for j in i + 1..maximal.len() {
            println!("#{i} vs #{j}: {:?}", compare(&maximal[i], &maximal[j]));
        }
    }
}
