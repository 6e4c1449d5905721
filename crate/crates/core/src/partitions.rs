//! Information partitions: induction from observation histories, refinement
//! comparison, public-state closure and exhaustive search for maximal
//! consistent, stable partitions.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::error::{GameError, TreeViolation, ValidationErrors};
use crate::game::{validate_classical, ActionLabel, ClassicalPartition, GameTree, NodeId};
use crate::observations::{ObservationAssignment, ObservationHistories};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("node {0} appears in more than one block")]
pub struct Overlap(pub NodeId);

/// A set of disjoint blocks of node ids. Blocks are kept in canonical form:
/// members sorted, blocks ordered by least member. Whether it covers every
/// history depends on how it was built; see [`Partition::is_total`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<NodeId>>,
    block_of: Vec<Option<usize>>,
}

impl Partition {
    pub fn from_blocks(n: usize, blocks: Vec<Vec<NodeId>>) -> Result<Self, Overlap> {
        let mut blocks: Vec<Vec<NodeId>> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![None; n];
        for (idx, block) in blocks.iter().enumerate() {
            for w in block.windows(2) {
                if w[0] == w[1] {
                    return Err(Overlap(w[0]));
                }
            }
            for &h in block {
                if block_of[h].replace(idx).is_some() {
                    return Err(Overlap(h));
                }
            }
        }
        Ok(Partition { blocks, block_of })
    }

    /// Groups `ids` by `key`; nodes not listed stay uncovered.
    pub fn group_by<K, F>(n: usize, ids: impl IntoIterator<Item = NodeId>, mut key: F) -> Self
    where
        K: Hash + Eq,
        F: FnMut(NodeId) -> K,
    {
        let mut groups: HashMap<K, Vec<NodeId>> = HashMap::new();
        for h in ids {
            groups.entry(key(h)).or_default().push(h);
        }
        Partition::from_blocks(n, groups.into_values().collect()).expect("grouping is disjoint")
    }

    /// The partition of `0..n` into singletons.
    pub fn singletons(n: usize) -> Self {
        Partition::from_blocks(n, (0..n).map(|h| vec![h]).collect()).unwrap()
    }

    /// One block holding `0..n`.
    pub fn whole(n: usize) -> Self {
        Partition::from_blocks(n, vec![(0..n).collect()]).unwrap()
    }

    pub fn num_nodes(&self) -> usize {
        self.block_of.len()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<NodeId>] {
        &self.blocks
    }

    pub fn block(&self, idx: usize) -> &[NodeId] {
        &self.blocks[idx]
    }

    pub fn block_of(&self, h: NodeId) -> Option<usize> {
        self.block_of[h]
    }

    /// Members of the block containing `h` (empty when uncovered).
    pub fn block_containing(&self, h: NodeId) -> &[NodeId] {
        self.block_of[h]
            .map(|b| self.blocks[b].as_slice())
            .unwrap_or(&[])
    }

    pub fn same_block(&self, g: NodeId, h: NodeId) -> bool {
        matches!((self.block_of[g], self.block_of[h]), (Some(a), Some(b)) if a == b)
    }

    pub fn is_covered(&self, h: NodeId) -> bool {
        self.block_of[h].is_some()
    }

    pub fn is_total(&self) -> bool {
        self.block_of.iter().all(Option::is_some)
    }

    /// Stable label: the least member history.
    pub fn label(&self, idx: usize, game: &GameTree) -> String {
        game.history(self.blocks[idx][0]).to_string()
    }

    /// Blocks intersected with `keep`, empties dropped.
    pub fn restrict(&self, keep: impl Fn(NodeId) -> bool) -> Partition {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().copied().filter(|&h| keep(h)).collect())
            .collect();
        Partition::from_blocks(self.num_nodes(), blocks).unwrap()
    }

    /// Common refinement (pairwise intersections of blocks).
    pub fn meet(&self, other: &Partition) -> Partition {
        let ids = (0..self.num_nodes()).filter(|&h| self.is_covered(h) && other.is_covered(h));
        Partition::group_by(self.num_nodes(), ids, |h| {
            (self.block_of[h], other.block_of[h])
        })
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.blocks.iter().all(|b| {
            let target = other.block_of[b[0]];
            target.is_some() && b.iter().all(|&h| other.block_of[h] == target)
        })
    }

    /// Maps node ids through `f`, dropping nodes mapped to `None`.
    pub fn map_nodes(&self, n: usize, f: impl Fn(NodeId) -> Option<NodeId>) -> Partition {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().filter_map(|&h| f(h)).collect())
            .collect();
        Partition::from_blocks(n, blocks).expect("injective map keeps blocks disjoint")
    }
}

/// Result of [`compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    Equal,
    /// The first argument is strictly finer.
    Finer,
    /// The first argument is strictly coarser.
    Coarser,
    Incomparable,
}

pub fn compare(p: &Partition, q: &Partition) -> Refinement {
    match (p.refines(q), q.refines(p)) {
        (true, true) => Refinement::Equal,
        (true, false) => Refinement::Finer,
        (false, true) => Refinement::Coarser,
        (false, false) => Refinement::Incomparable,
    }
}

/// `ℐ^𝒪_i`: histories grouped by equal observation history.
pub fn induce_partition(game: &GameTree, obs: &ObservationAssignment, player: usize) -> Partition {
    let histories = ObservationHistories::compute(game, obs, player);
    Partition::group_by(game.len(), game.nodes(), |h| histories.id(h))
}

/// Induced partitions for every player (index 0 = player 1).
pub fn induce_all(game: &GameTree, obs: &ObservationAssignment) -> Vec<Partition> {
    (1..=game.num_players())
        .map(|i| induce_partition(game, obs, i))
        .collect()
}

/// Blocks intersected with `ℋ_player`, checked for uniform action sets.
pub fn restrict_to_acting(
    partition: &Partition,
    game: &GameTree,
    player: usize,
) -> Result<Partition, ValidationErrors> {
    let restricted = partition.restrict(|h| game.is_acting(h, player));
    let mut errors = Vec::new();
    for block in restricted.blocks() {
        let first: Vec<&ActionLabel> = game.actions(block[0]).collect();
        for &h in &block[1..] {
            if game.actions(h).collect::<Vec<_>>() != first {
                errors.push(TreeViolation::ActionSetMismatch {
                    player,
                    first: game.history(block[0]).to_string(),
                    other: game.history(h).to_string(),
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(restricted)
    } else {
        Err(ValidationErrors(errors))
    }
}

/// Restricts every player's induced partition and validates the result as a
/// classical model.
pub fn classical_from_induced(
    game: &GameTree,
    partitions: &[Partition],
) -> Result<ClassicalPartition, ValidationErrors> {
    let mut raw = Vec::new();
    let mut errors = Vec::new();
    for (idx, p) in partitions.iter().enumerate() {
        match restrict_to_acting(p, game, idx + 1) {
            Ok(r) => raw.push(r.blocks().to_vec()),
            Err(e) => errors.extend(e.0),
        }
    }
    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }
    validate_classical(game, raw)
}

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Finest partition coarser than every given (total) partition.
pub fn public_states(n: usize, partitions: &[Partition]) -> Partition {
    let mut sets = DisjointSets::new(n);
    for p in partitions {
        for block in p.blocks() {
            for &h in &block[1..] {
                sets.union(block[0], h);
            }
        }
    }
    Partition::group_by(n, 0..n, |h| sets.find(h))
}

/// Default search limit for [`enumerate_max_refinements`].
pub const DEFAULT_NODE_LIMIT: usize = 14;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Entry {
    Label(usize),
    Action(usize),
}

struct BlockInfo {
    key: Vec<Entry>,
    acting: bool,
}

struct Search<'a> {
    game: &'a GameTree,
    player: usize,
    classical: &'a Partition,
    action_ids: HashMap<&'a ActionLabel, usize>,
    assign: Vec<usize>,
    keys: Vec<Vec<Entry>>,
    blocks: Vec<BlockInfo>,
    classical_block: Vec<Option<usize>>,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, h: NodeId) {
        if h == self.game.len() {
            self.found.push(self.assign.clone());
            return;
        }
        let acting = self.game.is_acting(h, self.player);
        let (base, parent_block) = match self.game.parent_action(h) {
            None => (Vec::new(), None),
            Some((p, a)) => {
                let mut base = self.keys[p].clone();
                if self.game.is_acting(p, self.player) {
                    base.push(Entry::Action(self.action_ids[a]));
                }
                (base, Some(self.assign[p]))
            }
        };

        let mut options: Vec<usize> = Vec::new();
        if acting {
            let cb = self
                .classical
                .block_of(h)
                .expect("classical covers acting nodes");
            if let Some(b) = self.classical_block[cb] {
                options.push(b);
            }
        } else {
            if let Some(pb) = parent_block {
                if !self.blocks[pb].acting && base == self.blocks[pb].key {
                    options.push(pb);
                }
            }
            for (b, info) in self.blocks.iter().enumerate() {
                if Some(b) != parent_block
                    && !info.acting
                    && info.key.len() == base.len() + 1
                    && info.key[..base.len()] == base[..]
                    && info.key[base.len()] == Entry::Label(b)
                {
                    options.push(b);
                }
            }
        }

        for b in options {
            let key = if Some(b) == parent_block {
                base.clone()
            } else {
                let mut k = base.clone();
                k.push(Entry::Label(b));
                k
            };
            if key != self.blocks[b].key {
                continue;
            }
            self.assign[h] = b;
            self.keys[h] = key;
            self.run(h + 1);
        }

        let needs_new =
            !acting || self.classical_block[self.classical.block_of(h).unwrap()].is_none();
        if needs_new {
            let b = self.blocks.len();
            let mut key = base;
            key.push(Entry::Label(b));
            self.blocks.push(BlockInfo {
                key: key.clone(),
                acting,
            });
            if acting {
                self.classical_block[self.classical.block_of(h).unwrap()] = Some(b);
            }
            self.assign[h] = b;
            self.keys[h] = key;
            self.run(h + 1);
            self.blocks.pop();
            if acting {
                self.classical_block[self.classical.block_of(h).unwrap()] = None;
            }
        }
    }
}

/// Every partition of `ℋ` for `player` that is consistent with the classical
/// partition, separates acting histories, and is the partition induced by its
/// own canonical observations; returns those that admit no strictly finer
/// such partition, in canonical order.
pub fn enumerate_max_refinements(
    game: &GameTree,
    classical: &ClassicalPartition,
    player: usize,
    node_limit: usize,
) -> Result<Vec<Partition>, GameError> {
    let valid = enumerate_valid_partitions(game, classical, player, node_limit)?;
    let mut by_size: Vec<&Partition> = valid.iter().collect();
    by_size.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut maximal: Vec<Partition> = valid
        .iter()
        .filter(|p| !by_size.iter().any(|q| q.len() > p.len() && q.refines(p)))
        .cloned()
        .collect();
    maximal.sort();
    maximal.dedup();
    Ok(maximal)
}

/// All partitions accepted by the search in [`enumerate_max_refinements`].
pub fn enumerate_valid_partitions(
    game: &GameTree,
    classical: &ClassicalPartition,
    player: usize,
    node_limit: usize,
) -> Result<Vec<Partition>, GameError> {
    if game.len() > node_limit {
        return Err(GameError::NodeLimit {
            nodes: game.len(),
            limit: node_limit,
        });
    }
    let mut action_ids = HashMap::new();
    for h in game.nodes() {
        for a in game.actions(h) {
            let next = action_ids.len();
            action_ids.entry(a).or_insert(next);
        }
    }
    let cl = classical.player(player);
    let mut search = Search {
        game,
        player,
        classical: cl,
        action_ids,
        assign: vec![0; game.len()],
        keys: vec![Vec::new(); game.len()],
        blocks: Vec::new(),
        classical_block: vec![None; cl.len()],
        found: Vec::new(),
    };
    search.run(0);
    let mut out: Vec<Partition> = search
        .found
        .iter()
        .map(|assign| Partition::group_by(game.len(), game.nodes(), |h| assign[h]))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}
