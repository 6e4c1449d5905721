use gamecheck::corpus::{self, RandomConfig};
use gamecheck::game::validate_tree;
use gamecheck::observations::{iso_cl_obs, Variant};
use gamecheck::partitions::{
    compare, induce_all, induce_partition, public_states, Partition, Refinement,
};
use gamecheck::properties::{can_deduce, check_perfect_recall};

#[test]
fn every_golden_reverifies() {
    for entry in corpus::all_entries() {
        let mismatches = entry.verify();
        assert!(mismatches.is_empty(), "{mismatches:#?}");
        for (name, obs) in &entry.observations {
            obs.check_shape(&entry.game)
                .unwrap_or_else(|e| panic!("{} {name}: {e}", entry.name));
        }
    }
}

#[test]
fn every_entry_exports() {
    use gamecheck::cli::format::GameFile;
    for entry in corpus::all_entries() {
        for (_, obs) in entry
            .observations
            .iter()
            .map(|(n, o)| (n, Some(o)))
            .chain([(&String::new(), None)])
        {
            let text = GameFile::from_model(&entry.game, entry.classical.as_ref(), obs).to_json();
            let model = GameFile::parse(&text).unwrap().to_model().unwrap();
            assert_eq!(model.game, entry.game);
        }
        let dot = gamecheck::cli::dot::to_dot(&entry.game, None, &entry.name);
        assert_eq!(dot.matches("shape=").count(), entry.game.len());
    }
}

#[test]
fn betting_eyes_open_refines_eyes_closed() {
    let open = corpus::betting_game(false);
    let closed = corpus::betting_game(true);
    assert_eq!(open.game, closed.game);
    assert_eq!(open.classical, closed.classical);
    let p_open = induce_partition(&open.game, open.obs("observed").unwrap(), 2);
    let p_closed = induce_partition(&closed.game, closed.obs("observed").unwrap(), 2);
    assert_eq!(compare(&p_open, &p_closed), Refinement::Finer);
    // The difference shows up where P1 decides.
    let a = open.game.id_of("A").unwrap();
    let b = open.game.id_of("B").unwrap();
    assert!(p_closed.same_block(a, b));
    assert!(!p_open.same_block(a, b));
}

#[test]
fn iso_fail_block_has_three_histories() {
    let entry = corpus::iso_fail_game();
    let obs = iso_cl_obs(&entry.game, entry.classical.as_ref().unwrap(), Variant::Set);
    let p = induce_partition(&entry.game, &obs, 1);
    let largest = p.blocks().iter().map(Vec::len).max().unwrap();
    assert_eq!(largest, 3);
}

/// Closure by repeated pairwise merging of overlapping blocks.
fn merge_closure(n: usize, parts: &[Partition]) -> usize {
    let mut blocks: Vec<std::collections::BTreeSet<usize>> = (0..n).map(|h| [h].into()).collect();
    for p in parts {
        for b in p.blocks() {
            blocks.push(b.iter().copied().collect());
        }
    }
    loop {
        let mut merged = false;
        'scan: for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !blocks[i].is_disjoint(&blocks[j]) {
                    let b = blocks.swap_remove(j);
                    blocks[i].extend(b);
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            return blocks.len();
        }
    }
}

#[test]
fn mini_poker_public_states() {
    let entry = corpus::mini_poker();
    let game = &entry.game;
    let parts = induce_all(game, entry.obs("coarse").unwrap());
    let public = public_states(game.len(), &parts);
    assert_eq!(public.len(), merge_closure(game.len(), &parts));

    let line = corpus::mini_poker_bet_line(game, "J", "Q");
    let on_line: std::collections::BTreeSet<usize> =
        line.iter().map(|&h| public.block_of(h).unwrap()).collect();
    assert!(on_line.len() < line.len());

    // Before the showdown, every public state mixes each player's card.
    let card = |h: usize, k: usize| {
        game.history(h)
            .actions()
            .get(k)
            .map(|a| a.as_str().to_string())
    };
    for block in public.blocks() {
        if block
            .iter()
            .any(|&h| game.is_terminal(h) || game.depth(h) < 2)
        {
            continue;
        }
        for k in 0..2 {
            let cards: std::collections::BTreeSet<_> = block.iter().map(|&h| card(h, k)).collect();
            assert!(cards.len() > 1, "public state {:?} reveals card {k}", block);
        }
    }

    let revealed: Vec<Partition> = (0..2).map(|_| Partition::singletons(game.len())).collect();
    assert_eq!(public_states(game.len(), &revealed).len(), game.len());
    let whole: Vec<Partition> = (0..2).map(|_| Partition::whole(game.len())).collect();
    assert_eq!(public_states(game.len(), &whole).len(), 1);
}

#[test]
fn unfair_mp_betrayal_is_its_own_public_state() {
    let entry = corpus::unfair_matching_pennies();
    let game = &entry.game;
    let parts = induce_all(game, entry.obs("coarse").unwrap());
    let public = public_states(game.len(), &parts);
    assert_eq!(public.len(), merge_closure(game.len(), &parts));
    for betrayal in ["order12 Heads", "order21 Heads"] {
        let h = game.id_of(betrayal).unwrap();
        let b = public.block_of(h).unwrap();
        let quiet = game
            .id_of(if betrayal.starts_with("order12") {
                "order12 Tails"
            } else {
                "order21 Tails"
            })
            .unwrap();
        assert_ne!(public.block_of(quiet), Some(b));
    }
}

/// Whether the first mover can tell they were betrayed depends on the model:
/// with iso+cl observations a Heads-chooser cannot tell whether they moved
/// first; in the coarse model the end-of-game observation arrives right after
/// the second mover's action, which reveals the order.
#[test]
fn betrayal_detectability() {
    let entry = corpus::unfair_matching_pennies();
    let game = &entry.game;
    for i in 1..=2 {
        let f = corpus::betrayal_feature(game, i).unwrap();
        assert!(!can_deduce(game, entry.obs("iso_cl_set").unwrap(), i, &f, None).holds);
        assert!(!can_deduce(game, entry.obs("iso_cl_seq").unwrap(), i, &f, None).holds);
        assert!(can_deduce(game, entry.obs("coarse").unwrap(), i, &f, None).holds);
    }
    assert!(corpus::betrayal_feature(&corpus::sneaking_game().game, 1).is_none());
}

#[test]
fn thick_infoset_history_length_never_deducible() {
    use gamecheck::partitions::enumerate_valid_partitions;
    let entry = corpus::thick_infoset_game();
    let valid =
        enumerate_valid_partitions(&entry.game, entry.classical.as_ref().unwrap(), 1, 14).unwrap();
    assert!(!valid.is_empty());
    for p in &valid {
        let thick = p.blocks().iter().any(|b| {
            b.iter()
                .any(|&g| b.iter().any(|&h| entry.game.parent(h) == Some(g)))
        });
        assert!(thick);
    }
}

#[test]
fn random_generators() {
    let cfg = RandomConfig::default();
    for seed in 0..200 {
        let (game, obs) = corpus::random_instance(seed, &cfg);
        assert_eq!(corpus::random_instance(seed, &cfg), (game.clone(), obs));
        assert!(game.len() <= cfg.max_nodes);
        validate_tree(&game.to_raw()).unwrap();
        let (game, cl) = corpus::random_classical(seed, &cfg, true);
        for i in 1..=game.num_players() {
            assert!(check_perfect_recall(&game, &cl, i).holds, "seed {seed}");
        }
    }
}
