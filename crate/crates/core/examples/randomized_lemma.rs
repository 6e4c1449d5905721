//! Randomized check that TSIP, STAB and "WBD plus own-observation
//! deducibility" coincide. Usage: `randomized_lemma [COUNT] [SEED]`.

use gamecheck::corpus::{self, RandomConfig};
use gamecheck::properties::verify_lemma_stab;

fn main() {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = RandomConfig::default();
    let (mut stable, mut unstable) = (0, 0);
    for k in 0..count {
        let (game, obs) = corpus::random_instance(seed.wrapping_add(k), &cfg);
        let report = verify_lemma_stab(&game, &obs);
        if let Some(cx) = report.counterexample {
            println!(
                "disagreement at seed {}: minimized to {} histories",
                seed + k,
                cx.game.len()
            );
            continue;
        }
        for v in &report.verdicts {
            if v.stab {
                stable += 1
            } else {
                unstable += 1
            }
        }
    }
    println!(
        "{count} instances: {stable} stable and {unstable} unstable player views, all in agreement"
    );
}
