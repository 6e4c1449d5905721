//! Model transformations that insert single-action chance nodes: the WBD
//! repair, the stable modification and the coarse observation-based model.

use std::collections::HashSet;

use crate::error::GameError;
use crate::game::{ActionLabel, ClassicalPartition, GameTree, History, NodeId, PlayerId, RawNode};
use crate::observations::{
    canonical_number, increment, ObsEntry, ObservationAssignment, ObservationHistories, Token,
    Variant,
};
use crate::partitions::{induce_partition, Partition};
use crate::properties::check_perfect_recall;

pub const NOOP: &str = "noop";

/// A transformed model together with the embedding of the original tree.
#[derive(Debug, Clone)]
pub struct ModificationResult {
    pub game: GameTree,
    pub obs: Option<ObservationAssignment>,
    pub classical: Option<ClassicalPartition>,
    /// Old history id → new history id.
    pub embedding: Vec<NodeId>,
    /// Number of inserted chance nodes.
    pub added: usize,
}

struct Rebuilt {
    game: GameTree,
    embedding: Vec<NodeId>,
    /// `chain[h]`: new ids of the nodes inserted above old `h`, top first.
    chain: Vec<Vec<NodeId>>,
}

/// Inserts `inserts[h]` single-action chance nodes on the edge into `h`. The
/// original action now leads to the first inserted node.
fn rebuild(game: &GameTree, inserts: &[usize]) -> Rebuilt {
    let noop = ActionLabel::new(NOOP).unwrap();
    let mut raw = game.to_raw();
    let mut paths: Vec<History> = Vec::with_capacity(game.len());
    let mut chain_paths: Vec<Vec<History>> = vec![Vec::new(); game.len()];
    for h in game.nodes() {
        let path = match game.parent_action(h) {
            None => History::root(),
            Some((p, a)) => {
                let mut path = paths[p].child(a.clone());
                for _ in 0..inserts[h] {
                    chain_paths[h].push(path.clone());
                    path = path.child(noop.clone());
                }
                path
            }
        };
        raw.nodes[h].history = path.clone();
        paths.push(path);
    }
    for hs in &chain_paths {
        for path in hs {
            raw.nodes.push(RawNode {
                history: path.clone(),
                player: Some(PlayerId::Chance),
                chance: Some([(noop.clone(), 1.0)].into_iter().collect()),
                utilities: None,
            });
        }
    }
    let new = raw
        .build()
        .expect("inserting chance nodes keeps the tree valid");
    let embedding = paths.iter().map(|p| new.id(p).unwrap()).collect();
    let chain = chain_paths
        .iter()
        .map(|hs| hs.iter().map(|p| new.id(p).unwrap()).collect())
        .collect();
    Rebuilt {
        game: new,
        embedding,
        chain,
    }
}

/// Carries a classical partition through an embedding.
pub fn transport_classical(
    classical: &ClassicalPartition,
    embedding: &[NodeId],
    game: &GameTree,
) -> ClassicalPartition {
    let raw = classical
        .players()
        .iter()
        .map(|p| {
            p.blocks()
                .iter()
                .map(|b| b.iter().map(|&h| embedding[h]).collect())
                .collect()
        })
        .collect();
    crate::game::validate_classical(game, raw).expect("embedding preserves the classical partition")
}

/// Carries observations through an embedding; inserted nodes observe nothing.
pub fn transport_obs(
    obs: &ObservationAssignment,
    embedding: &[NodeId],
    new_len: usize,
) -> ObservationAssignment {
    let map: Vec<Option<NodeId>> = embedding.iter().map(|&h| Some(h)).collect();
    crate::properties::restrict_obs(obs, &map, new_len)
}

/// Carries a partition through an embedding (inserted nodes uncovered).
pub fn transport_partition(p: &Partition, embedding: &[NodeId], new_len: usize) -> Partition {
    p.map_nodes(new_len, |h| Some(embedding[h]))
}

/// Edges `(h → ha)` for `h ∈ I`, `a ∈ A(I)` whose (block, action) pair has
/// successors both inside and outside `direct`; returns the children to
/// precede with a chance node.
fn repair_targets(
    game: &GameTree,
    classical: &ClassicalPartition,
    direct: impl Fn(usize, NodeId) -> bool,
) -> Vec<usize> {
    let mut inserts = vec![0; game.len()];
    for i in 1..=game.num_players() {
        for block in classical.player(i).blocks() {
            for a in game.actions(block[0]) {
                let succ: Vec<NodeId> = block.iter().map(|&h| game.child(h, a).unwrap()).collect();
                let inside = succ.iter().filter(|&&c| direct(i, c)).count();
                if inside > 0 && inside < succ.len() {
                    for c in succ.into_iter().filter(|&c| direct(i, c)) {
                        inserts[c] = 1;
                    }
                }
            }
        }
    }
    inserts
}

fn apply_repair(
    game: &GameTree,
    classical: &ClassicalPartition,
    inserts: &[usize],
) -> ModificationResult {
    let rebuilt = rebuild(game, inserts);
    let classical = transport_classical(classical, &rebuilt.embedding, &rebuilt.game);
    ModificationResult {
        added: inserts.iter().sum(),
        game: rebuilt.game,
        obs: None,
        classical: Some(classical),
        embedding: rebuilt.embedding,
    }
}

/// Inserts a `noop` chance node after every (block, action) pair violating
/// classical WBD, on the branches leading directly to the player's own nodes.
pub fn repair_wbd(game: &GameTree, classical: &ClassicalPartition) -> ModificationResult {
    let inserts = repair_targets(game, classical, |i, c| game.is_acting(c, i));
    apply_repair(game, classical, &inserts)
}

/// Stronger repair used for sequence-variant coarse models: own decision
/// nodes and leaves both count as "direct" successors.
pub fn repair_wbd_with_leaves(
    game: &GameTree,
    classical: &ClassicalPartition,
) -> ModificationResult {
    let inserts = repair_targets(game, classical, |i, c| {
        game.is_acting(c, i) || game.is_terminal(c)
    });
    apply_repair(game, classical, &inserts)
}

/// Splits every player's per-history increment at each point where the
/// partial observation history is already realized elsewhere, and emits the
/// pieces at freshly inserted chance nodes. Sequence variant only.
pub fn stable_modification(
    game: &GameTree,
    obs: &ObservationAssignment,
) -> Result<ModificationResult, GameError> {
    if obs.variant() != Variant::Sequence {
        return Err(GameError::SetVariant);
    }
    obs.check_shape(game)?;
    let n = game.num_players();

    // segments[h][i]: player i's token segments for the chain into h
    let mut segments: Vec<Vec<Vec<Vec<Token>>>> = vec![vec![Vec::new(); n]; game.len()];
    let mut inserts = vec![0usize; game.len()];
    let mut bound_blocks = 0usize;
    for i in 1..=n {
        let hist = ObservationHistories::compute(game, obs, i);
        let realized: HashSet<u32> = game.nodes().map(|h| hist.id(h)).collect();
        bound_blocks += realized.len();
        for h in game.nodes() {
            let entries = increment(game, obs, i, h);
            let mut segs: Vec<Vec<Token>> = Vec::new();
            let mut cur: Vec<Token> = Vec::new();
            let mut id = game.parent(h).map_or(0, |p| hist.id(p));
            for (k, e) in entries.iter().enumerate() {
                if k > 0 && realized.contains(&id) {
                    segs.push(std::mem::take(&mut cur));
                }
                if let ObsEntry::Token(t) = e {
                    cur.push(t.clone());
                }
                id = hist.step(id, e).expect("increment lies on the trie");
            }
            if !entries.is_empty() {
                segs.push(cur);
            }
            segments[h][i - 1] = segs;
        }
    }
    for h in game.nodes() {
        let m = segments[h].iter().map(Vec::len).max().unwrap_or(0).max(1);
        if game.parent(h).is_some() {
            inserts[h] = m - 1;
        }
    }

    let rebuilt = rebuild(game, &inserts);
    let mut out = ObservationAssignment::for_game(Variant::Sequence, &rebuilt.game);
    for h in game.nodes() {
        let mut chain = rebuilt.chain[h].clone();
        chain.push(rebuilt.embedding[h]);
        for i in 1..=n {
            for (seg, &c) in segments[h][i - 1].iter().zip(&chain) {
                out.set(i, c, seg.clone());
            }
        }
    }
    let added: usize = inserts.iter().sum();
    let bound = game.len() + game.len() * bound_blocks;
    if rebuilt.game.len() > bound {
        return Err(GameError::SizeBound {
            actual: rebuilt.game.len(),
            bound,
        });
    }
    Ok(ModificationResult {
        game: rebuilt.game,
        obs: Some(out),
        classical: None,
        embedding: rebuilt.embedding,
        added,
    })
}

/// The domain-agnostic observation-based model of a perfect-recall classical
/// game: after a WBD repair, each player observes their last own action, the
/// current infoset and its actions when acting, and their utility at leaves.
pub fn coarse_model(
    game: &GameTree,
    classical: &ClassicalPartition,
    variant: Variant,
) -> Result<ModificationResult, GameError> {
    for i in 1..=game.num_players() {
        let r = check_perfect_recall(game, classical, i);
        if let Some(w) = r.witness {
            return Err(GameError::ImperfectRecall(format!(
                "player {i}: {}",
                w.describe(game)
            )));
        }
    }
    let mut result = match variant {
        Variant::Set => repair_wbd(game, classical),
        Variant::Sequence => repair_wbd_with_leaves(game, classical),
    };
    let g = &result.game;
    let cl = result.classical.as_ref().unwrap();
    let mut obs = ObservationAssignment::for_game(variant, g);
    for h in g.nodes() {
        for i in 1..=g.num_players() {
            let mut tokens = Vec::new();
            if let Some((p, a)) = g.parent_action(h) {
                if g.is_acting(p, i) {
                    tokens.push(Token::Action(a.clone()));
                }
            }
            if let Some(b) = cl.block_of(i, h) {
                tokens.push(Token::feature("current_infoset", cl.player(i).label(b, g)));
                let mut labels: Vec<&str> = g.actions(h).map(ActionLabel::as_str).collect();
                labels.sort_unstable();
                tokens.push(Token::feature("available_actions", labels.join(" ")));
            }
            if let Some(u) = g.utilities(h) {
                tokens.push(Token::feature("utility", canonical_number(u[i - 1])));
            }
            obs.set(i, h, tokens);
        }
    }
    result.obs = Some(obs);
    Ok(result)
}

/// Whether `embedding` preserves every player's induced partition blockwise:
/// original histories share a block before iff they share one after.
pub fn preserves_blocks(
    game: &GameTree,
    obs: &ObservationAssignment,
    result: &ModificationResult,
) -> bool {
    let new_obs = result.obs.as_ref().expect("result carries observations");
    (1..=game.num_players()).all(|i| {
        let before = induce_partition(game, obs, i);
        let after = induce_partition(&result.game, new_obs, i);
        game.nodes().all(|g| {
            game.nodes().all(|h| {
                before.same_block(g, h)
                    == after.same_block(result.embedding[g], result.embedding[h])
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RawGame;
    use crate::properties::{check_stab, check_wbd};

    fn mixed_branch() -> (GameTree, ClassicalPartition) {
        // chance picks l/r; P1 can't tell; after `go`, l leads to P1 again, r to a leaf
        let mut raw = RawGame::new(1);
        raw.chance("", &[("l", 0.5), ("r", 0.5)])
            .decision("l", 1)
            .decision("r", 1)
            .decision("l go", 1)
            .terminal("l go x", &[1.0])
            .terminal("r go", &[0.0]);
        let game = raw.build().unwrap();
        let cl =
            ClassicalPartition::from_paths(&game, &[vec![vec!["l", "r"], vec!["l go"]]]).unwrap();
        (game, cl)
    }

    #[test]
    fn repair_inserts_one_node() {
        let (game, cl) = mixed_branch();
        assert!(!check_wbd(&game, &cl, 1).holds);
        let r = repair_wbd(&game, &cl);
        assert_eq!(r.added, 1);
        assert_eq!(r.game.len(), game.len() + 1);
        assert!(r.game.id_of("l go noop").is_ok());
        assert!(check_wbd(&r.game, r.classical.as_ref().unwrap(), 1).holds);
        // already repaired: identity
        let again = repair_wbd(&r.game, r.classical.as_ref().unwrap());
        assert_eq!(again.added, 0);
    }

    #[test]
    fn stable_modification_rejects_set_variant() {
        let (game, _) = mixed_branch();
        let obs = ObservationAssignment::for_game(Variant::Set, &game);
        assert_eq!(
            stable_modification(&game, &obs).unwrap_err(),
            GameError::SetVariant
        );
    }

    #[test]
    fn stable_modification_splits_at_realized_prefix() {
        // one path emits "x" then "y" at two nodes; the other emits "x y" at once
        let mut raw = RawGame::new(1);
        raw.chance("", &[("a", 0.5), ("b", 0.5)])
            .chance("a", &[("n", 1.0)])
            .terminal("a n", &[0.0])
            .terminal("b", &[0.0]);
        let game = raw.build().unwrap();
        let mut obs = ObservationAssignment::for_game(Variant::Sequence, &game);
        let (x, y) = (Token::symbol("x"), Token::symbol("y"));
        obs.set(1, game.id_of("a").unwrap(), vec![x.clone()]);
        obs.set(1, game.id_of("a n").unwrap(), vec![y.clone()]);
        obs.set(1, game.id_of("b").unwrap(), vec![x, y]);
        assert!(!check_stab(&game, &obs, 1).holds);
        let r = stable_modification(&game, &obs).unwrap();
        assert_eq!(r.added, 1);
        assert!(check_stab(&r.game, r.obs.as_ref().unwrap(), 1).holds);
        assert!(preserves_blocks(&game, &obs, &r));
        let again = stable_modification(&r.game, r.obs.as_ref().unwrap()).unwrap();
        assert_eq!(again.added, 0);
    }

    #[test]
    fn coarse_model_requires_recall() {
        // P1 forgets their own first action
        let mut raw = RawGame::new(1);
        raw.decision("", 1).decision("a", 1).decision("b", 1);
        for p in ["a x", "b x"] {
            raw.terminal(p, &[0.0]);
        }
        let game = raw.build().unwrap();
        let cl = ClassicalPartition::from_paths(&game, &[vec![vec![""], vec!["a", "b"]]]).unwrap();
        assert!(matches!(
            coarse_model(&game, &cl, Variant::Set),
            Err(GameError::ImperfectRecall(_))
        ));
    }
}
