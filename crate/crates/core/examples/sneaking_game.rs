//! The sneaking game: iso+cl observations break consistency as sets but only
//! stability as sequences.

use gamecheck::corpus;
use gamecheck::observations::{iso_cl_obs, Variant};
use gamecheck::properties::{check_all, Property};

fn main() {
    let entry = corpus::sneaking_game();
    let cl = entry.classical.as_ref().unwrap();
    for variant in [Variant::Set, Variant::Sequence] {
        let obs = iso_cl_obs(&entry.game, cl, variant);
        println!("{} variant:", variant.name());
        for p in [Property::Cons, Property::Aps, Property::Iso, Property::Stab] {
            for r in check_all(p, &entry.game, &obs, Some(cl)) {
                let verdict = if r.holds { "holds" } else { "fails" };
                let why = r
                    .witness
                    .map(|w| format!(" — {}", w.describe(&entry.game)))
                    .unwrap_or_default();
                println!("  {:<5} P{} {verdict}{why}", p.name(), r.player);
            }
        }
    }
}
