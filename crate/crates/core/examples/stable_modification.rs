//! Stabilizes the sneaking game and the padding family; the padding sizes
//! grow quadratically.

use gamecheck::corpus;
use gamecheck::observations::{iso_cl_obs, Variant};
use gamecheck::properties::verify_lemma_stab;
use gamecheck::transforms::stable_modification;

fn main() {
    let entry = corpus::sneaking_game();
    let obs = iso_cl_obs(
        &entry.game,
        entry.classical.as_ref().unwrap(),
        Variant::Sequence,
    );
    println!(
        "sneaking: stable before? {}",
        verify_lemma_stab(&entry.game, &obs)
            .verdicts
            .iter()
            .all(|v| v.stab)
    );
    let m = stable_modification(&entry.game, &obs).expect("sequence observations");
    let after = verify_lemma_stab(&m.game, m.obs.as_ref().unwrap());
    println!(
        "  {} -> {} nodes, stable after? {}",
        entry.game.len(),
        m.game.len(),
        after.verdicts.iter().all(|v| v.stab)
    );
    for h in m.game.nodes().filter(|&h| !m.embedding.contains(&h)) {
        println!("  inserted ({})", m.game.history(h));
    }

    println!("padding(N):");
    for n in 1..=8 {
        let p = corpus::padding_game(n);
        let obs = p.obs("padding").unwrap().with_variant(Variant::Sequence);
        let m = stable_modification(&p.game, &obs).unwrap();
        println!("  N={n}: {:>3} -> {:>3} nodes", p.game.len(), m.game.len());
    }
}
