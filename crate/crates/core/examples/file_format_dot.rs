//! Round-trips a game through the JSON file format and renders the induced
//! partition of player 1 as DOT. Pass a path to write the DOT file.

use gamecheck::cli::{dot, format::GameFile};
use gamecheck::corpus;
use gamecheck::partitions::induce_partition;

fn main() {
    let entry = corpus::betting_game(false);
    let obs = entry.obs("observed").unwrap();
    let text = GameFile::from_model(&entry.game, entry.classical.as_ref(), Some(obs)).to_json();
    let model = GameFile::parse(&text)
        .and_then(|f| f.to_model())
        .expect("canonical files parse");
    assert_eq!(model.game, entry.game);
    println!("{text}");

    let p = induce_partition(&model.game, model.obs.as_ref().unwrap(), 2);
    let rendered = dot::to_dot(&model.game, Some(&p), "betting game, player 2");
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, rendered).expect("write DOT"),
        None => print!("{rendered}"),
    }
}
