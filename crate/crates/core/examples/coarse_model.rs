//! Builds the coarse observation model of unfair matching pennies and checks
//! it against the full property suite and the conjecture.

use gamecheck::corpus;
use gamecheck::observations::Variant;
use gamecheck::properties::{check_all, verify_conjecture, Property};
use gamecheck::transforms::coarse_model;

fn main() {
    let entry = corpus::unfair_matching_pennies();
    let cl = entry.classical.as_ref().unwrap();
    for variant in [Variant::Set, Variant::Sequence] {
        let m = coarse_model(&entry.game, cl, variant).expect("perfect recall");
        let obs = m.obs.as_ref().unwrap();
        println!("{} variant, {} dummy nodes", variant.name(), m.added);
        for p in [
            Property::ObservationModel,
            Property::Cons,
            Property::Aps,
            Property::Iso,
            Property::Stab,
        ] {
            let ok = check_all(p, &m.game, obs, m.classical.as_ref())
                .iter()
                .all(|r| r.holds);
            println!("  {:<8} {}", p.name(), if ok { "holds" } else { "fails" });
        }
        let c = verify_conjecture(&m.game, obs).unwrap();
        println!(
            "  conjecture: {}",
            if c.holds() { "consistent" } else { "violated" }
        );
    }
    let h = entry.game.id_of("order12 Heads").unwrap();
    let m = coarse_model(&entry.game, cl, Variant::Set).unwrap();
    println!(
        "P2 at (order12 Heads) observes: {:?}",
        m.obs
            .unwrap()
            .get(2, m.embedding[h])
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
    );
}
