//! The underlying perfect-information game tree and classical information
//! partitions.
//!
//! Histories are identified by their full action path. Nodes are stored in
//! lexicographic order of their paths, so the root is node `0` and every
//! parent precedes its children.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{GameError, TreeViolation, ValidationErrors};
use crate::partitions::Partition;

/// Absolute tolerance for chance distributions summing to one.
pub const CHANCE_TOLERANCE: f64 = 1e-9;

/// Index of a history inside a [`GameTree`].
pub type NodeId = usize;

/// A single action label. Nonempty and free of whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionLabel(String);

impl ActionLabel {
    pub fn new(label: impl Into<String>) -> Result<Self, TreeViolation> {
        let label = label.into();
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(TreeViolation::InvalidLabel(label));
        }
        Ok(ActionLabel(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A history: the sequence of actions leading from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History(Vec<ActionLabel>);

impl History {
    pub fn root() -> Self {
        History(Vec::new())
    }

    pub fn from_labels(labels: Vec<ActionLabel>) -> Self {
        History(labels)
    }

    /// Parses a space-separated path. The empty string is the root.
    pub fn parse(path: &str) -> Result<Self, TreeViolation> {
        path.split_whitespace()
            .map(ActionLabel::new)
            .collect::<Result<Vec<_>, _>>()
            .map(History)
    }

    pub fn actions(&self) -> &[ActionLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ⊑ other`: non-strict prefix test.
    pub fn is_prefix_of(&self, other: &History) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Splits `h = h'a`. `None` at the root.
    pub fn split_last(&self) -> Option<(History, &ActionLabel)> {
        let (last, init) = self.0.split_last()?;
        Some((History(init.to_vec()), last))
    }

    pub fn child(&self, action: ActionLabel) -> History {
        let mut path = self.0.clone();
        path.push(action);
        History(path)
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(a.as_str())?;
        }
        Ok(())
    }
}

/// Who acts at a non-terminal history. Players are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlayerId {
    Player(usize),
    Chance,
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerId::Player(i) => write!(f, "{i}"),
            PlayerId::Chance => f.write_str("c"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Decision(usize),
    /// Chance distribution in child order.
    Chance(Vec<f64>),
    Terminal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    history: History,
    parent: Option<NodeId>,
    children: Vec<(ActionLabel, NodeId)>,
    kind: NodeKind,
}

impl Node {
    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[(ActionLabel, NodeId)] {
        &self.children
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }
}

/// One unvalidated node description.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNode {
    pub history: History,
    pub player: Option<PlayerId>,
    pub chance: Option<BTreeMap<ActionLabel, f64>>,
    pub utilities: Option<Vec<f64>>,
}

/// Unvalidated game description, as read from a file or assembled in code.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawGame {
    pub num_players: usize,
    pub nodes: Vec<RawNode>,
}

impl RawGame {
    pub fn new(num_players: usize) -> Self {
        RawGame {
            num_players,
            nodes: Vec::new(),
        }
    }

    fn push(&mut self, path: &str, node: impl FnOnce(History) -> RawNode) -> &mut Self {
        let history = History::parse(path).expect("builder paths must use valid labels");
        self.nodes.push(node(history));
        self
    }

    pub fn decision(&mut self, path: &str, player: usize) -> &mut Self {
        self.push(path, |history| RawNode {
            history,
            player: Some(PlayerId::Player(player)),
            chance: None,
            utilities: None,
        })
    }

    pub fn chance(&mut self, path: &str, dist: &[(&str, f64)]) -> &mut Self {
        let dist = dist
            .iter()
            .map(|(a, p)| (ActionLabel::new(*a).expect("valid label"), *p))
            .collect();
        self.push(path, |history| RawNode {
            history,
            player: Some(PlayerId::Chance),
            chance: Some(dist),
            utilities: None,
        })
    }

    pub fn terminal(&mut self, path: &str, utilities: &[f64]) -> &mut Self {
        let utilities = utilities.to_vec();
        self.push(path, |history| RawNode {
            history,
            player: None,
            chance: None,
            utilities: Some(utilities),
        })
    }

    pub fn build(&self) -> Result<GameTree, ValidationErrors> {
        validate_tree(self)
    }
}

/// A validated, immutable perfect-information game tree.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTree {
    num_players: usize,
    nodes: Vec<Node>,
    index: HashMap<History, NodeId>,
}

/// Validates a raw description, reporting every violation found.
pub fn validate_tree(raw: &RawGame) -> Result<GameTree, ValidationErrors> {
    let mut errors = Vec::new();
    if raw.num_players < 1 {
        errors.push(TreeViolation::NoPlayers);
    }
    if raw.nodes.is_empty() {
        errors.push(TreeViolation::Empty);
        return Err(ValidationErrors(errors));
    }

    let mut by_history: BTreeMap<&History, &RawNode> = BTreeMap::new();
    for node in &raw.nodes {
        if by_history.insert(&node.history, node).is_some() {
            errors.push(TreeViolation::DuplicateHistory(node.history.to_string()));
        }
    }

    let mut children: BTreeMap<&History, Vec<ActionLabel>> = BTreeMap::new();
    for history in by_history.keys() {
        if let Some((parent, action)) = history.split_last() {
            match by_history.get_key_value(&parent) {
                Some((p, _)) => children.entry(*p).or_default().push(action.clone()),
                None => errors.push(TreeViolation::MissingPrefix {
                    history: history.to_string(),
                    missing: parent.to_string(),
                }),
            }
        }
    }

    for (history, node) in &by_history {
        let h = history.to_string();
        let kids = children.get(history).map(Vec::as_slice).unwrap_or(&[]);
        if kids.is_empty() {
            match &node.utilities {
                None => errors.push(TreeViolation::LeafWithoutUtilities(h.clone())),
                Some(u) => {
                    if u.len() != raw.num_players {
                        errors.push(TreeViolation::UtilityCount {
                            history: h.clone(),
                            expected: raw.num_players,
                            found: u.len(),
                        });
                    }
                    if u.iter().any(|x| !x.is_finite()) {
                        errors.push(TreeViolation::NonFiniteUtility(h.clone()));
                    }
                }
            }
            if node.player.is_some() {
                errors.push(TreeViolation::PlayerAtLeaf(h.clone()));
            }
            if node.chance.is_some() {
                errors.push(TreeViolation::ChanceAtNonChance(h));
            }
            continue;
        }
        if node.utilities.is_some() {
            errors.push(TreeViolation::UtilitiesAtInternal(h.clone()));
        }
        match node.player {
            None => errors.push(TreeViolation::MissingPlayer(h.clone())),
            Some(PlayerId::Player(i)) => {
                if i < 1 || i > raw.num_players {
                    errors.push(TreeViolation::PlayerOutOfRange {
                        history: h.clone(),
                        player: i,
                    });
                }
                if node.chance.is_some() {
                    errors.push(TreeViolation::ChanceAtNonChance(h.clone()));
                }
            }
            Some(PlayerId::Chance) => match &node.chance {
                None => errors.push(TreeViolation::MissingChanceDistribution(h.clone())),
                Some(dist) => {
                    let labels: Vec<&ActionLabel> = dist.keys().collect();
                    let expected: Vec<&ActionLabel> = kids.iter().collect();
                    if labels != expected {
                        errors.push(TreeViolation::ChanceSupportMismatch(h.clone()));
                    }
                    if dist.values().any(|p| !(*p > 0.0) || !p.is_finite()) {
                        errors.push(TreeViolation::NonPositiveProbability(h.clone()));
                    }
                    let sum: f64 = dist.values().sum();
                    if (sum - 1.0).abs() > CHANCE_TOLERANCE {
                        errors.push(TreeViolation::ChanceNotNormalized {
                            history: h.clone(),
                            sum,
                        });
                    }
                }
            },
        }
    }

    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }

    // BTreeMap order is lexicographic on label paths: parents first.
    let ids: HashMap<History, NodeId> = by_history
        .keys()
        .enumerate()
        .map(|(id, h)| ((*h).clone(), id))
        .collect();
    let nodes = by_history
        .iter()
        .map(|(history, raw_node)| {
            let parent = history.split_last().map(|(p, _)| ids[&p]);
            let kids: Vec<(ActionLabel, NodeId)> = children
                .get(history)
                .map(|ks| {
                    ks.iter()
                        .map(|a| (a.clone(), ids[&history.child(a.clone())]))
                        .collect()
                })
                .unwrap_or_default();
            let kind = if kids.is_empty() {
                NodeKind::Terminal(raw_node.utilities.clone().unwrap_or_default())
            } else {
                match raw_node.player {
                    Some(PlayerId::Player(i)) => NodeKind::Decision(i),
                    _ => {
                        let dist = raw_node.chance.as_ref().expect("validated");
                        NodeKind::Chance(kids.iter().map(|(a, _)| dist[a]).collect())
                    }
                }
            };
            Node {
                history: (*history).clone(),
                parent,
                children: kids,
                kind,
            }
        })
        .collect();
    Ok(GameTree {
        num_players: raw.num_players,
        nodes,
        index: ids,
    })
}

impl GameTree {
    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        0..self.nodes.len()
    }

    pub fn id(&self, history: &History) -> Result<NodeId, GameError> {
        self.index
            .get(history)
            .copied()
            .ok_or_else(|| GameError::UnknownHistory(history.to_string()))
    }

    /// Looks up a history given as a space-separated path.
    pub fn id_of(&self, path: &str) -> Result<NodeId, GameError> {
        let history = History::parse(path).map_err(|_| GameError::UnknownHistory(path.into()))?;
        self.id(&history)
    }

    pub fn history(&self, id: NodeId) -> &History {
        &self.nodes[id].history
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    /// `h = h'a` decomposition.
    pub fn parent_action(&self, id: NodeId) -> Option<(NodeId, &ActionLabel)> {
        let parent = self.nodes[id].parent?;
        let action = self.nodes[id].history.actions().last().expect("non-root");
        Some((parent, action))
    }

    pub fn children(&self, id: NodeId) -> &[(ActionLabel, NodeId)] {
        &self.nodes[id].children
    }

    pub fn child(&self, id: NodeId, action: &ActionLabel) -> Option<NodeId> {
        self.nodes[id]
            .children
            .iter()
            .find(|(a, _)| a == action)
            .map(|(_, c)| *c)
    }

    pub fn actions(&self, id: NodeId) -> impl Iterator<Item = &ActionLabel> {
        self.nodes[id].children.iter().map(|(a, _)| a)
    }

    pub fn player(&self, id: NodeId) -> Option<PlayerId> {
        match self.nodes[id].kind {
            NodeKind::Decision(i) => Some(PlayerId::Player(i)),
            NodeKind::Chance(_) => Some(PlayerId::Chance),
            NodeKind::Terminal(_) => None,
        }
    }

    pub fn is_terminal(&self, id: NodeId) -> bool {
        matches!(self.nodes[id].kind, NodeKind::Terminal(_))
    }

    /// Membership in `ℋ_i`.
    pub fn is_acting(&self, id: NodeId, player: usize) -> bool {
        self.nodes[id].kind == NodeKind::Decision(player)
    }

    pub fn acting_nodes(&self, player: usize) -> Vec<NodeId> {
        self.nodes()
            .filter(|&h| self.is_acting(h, player))
            .collect()
    }

    pub fn utilities(&self, id: NodeId) -> Option<&[f64]> {
        match &self.nodes[id].kind {
            NodeKind::Terminal(u) => Some(u),
            _ => None,
        }
    }

    pub fn chance_probability(&self, id: NodeId, action: &ActionLabel) -> Option<f64> {
        match &self.nodes[id].kind {
            NodeKind::Chance(dist) => {
                let pos = self.nodes[id]
                    .children
                    .iter()
                    .position(|(a, _)| a == action)?;
                Some(dist[pos])
            }
            _ => None,
        }
    }

    /// `g ⊑ h` on node ids.
    pub fn is_prefix(&self, g: NodeId, h: NodeId) -> bool {
        let mut cur = Some(h);
        while let Some(c) = cur {
            if c == g {
                return true;
            }
            if c < g {
                return false;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    /// Node ids on the path root..=h.
    pub fn path(&self, h: NodeId) -> Vec<NodeId> {
        let mut path = vec![h];
        let mut cur = h;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn depth(&self, h: NodeId) -> usize {
        self.nodes[h].history.len()
    }

    /// Converts back into the raw description (for serialization and edits).
    pub fn to_raw(&self) -> RawGame {
        let nodes = self
            .nodes
            .iter()
            .map(|n| RawNode {
                history: n.history.clone(),
                player: match n.kind {
                    NodeKind::Decision(i) => Some(PlayerId::Player(i)),
                    NodeKind::Chance(_) => Some(PlayerId::Chance),
                    NodeKind::Terminal(_) => None,
                },
                chance: match &n.kind {
                    NodeKind::Chance(dist) => Some(
                        n.children
                            .iter()
                            .map(|(a, _)| a.clone())
                            .zip(dist.iter().copied())
                            .collect(),
                    ),
                    _ => None,
                },
                utilities: match &n.kind {
                    NodeKind::Terminal(u) => Some(u.clone()),
                    _ => None,
                },
            })
            .collect();
        RawGame {
            num_players: self.num_players,
            nodes,
        }
    }

    /// Keeps the prefix-closed set `keep` (must contain the root). Nodes that
    /// lose every child become leaves with zero utilities; chance nodes that
    /// lose some children are renormalized. Returns the old→new id map.
    pub fn restrict(&self, keep: &[bool]) -> (GameTree, Vec<Option<NodeId>>) {
        assert!(keep[0], "restriction must keep the root");
        let mut raw = RawGame::new(self.num_players);
        for h in self.nodes() {
            if !keep[h] {
                continue;
            }
            debug_assert!(self.parent(h).is_none_or(|p| keep[p]));
            let kept: Vec<&(ActionLabel, NodeId)> =
                self.children(h).iter().filter(|(_, c)| keep[*c]).collect();
            let history = self.history(h).clone();
            let node = if kept.is_empty() {
                let utilities = self
                    .utilities(h)
                    .map(<[f64]>::to_vec)
                    .unwrap_or_else(|| vec![0.0; self.num_players]);
                RawNode {
                    history,
                    player: None,
                    chance: None,
                    utilities: Some(utilities),
                }
            } else {
                match &self.nodes[h].kind {
                    NodeKind::Decision(i) => RawNode {
                        history,
                        player: Some(PlayerId::Player(*i)),
                        chance: None,
                        utilities: None,
                    },
                    NodeKind::Chance(_) => {
                        let total: f64 = kept
                            .iter()
                            .map(|(a, _)| self.chance_probability(h, a).unwrap())
                            .sum();
                        let dist = kept
                            .iter()
                            .map(|(a, _)| {
                                (a.clone(), self.chance_probability(h, a).unwrap() / total)
                            })
                            .collect();
                        let dist = normalize_last(dist);
                        RawNode {
                            history,
                            player: Some(PlayerId::Chance),
                            chance: Some(dist),
                            utilities: None,
                        }
                    }
                    NodeKind::Terminal(_) => unreachable!(),
                }
            };
            raw.nodes.push(node);
        }
        let game = validate_tree(&raw).expect("restriction of a valid tree is valid");
        let map = self
            .nodes()
            .map(|h| {
                if keep[h] {
                    Some(game.id(self.history(h)).unwrap())
                } else {
                    None
                }
            })
            .collect();
        (game, map)
    }
}

/// Absorbs rounding error into the last probability so sums stay within tolerance.
fn normalize_last(mut dist: BTreeMap<ActionLabel, f64>) -> BTreeMap<ActionLabel, f64> {
    let sum: f64 = dist.values().sum();
    if let Some((_, last)) = dist.iter_mut().next_back() {
        *last += 1.0 - sum;
    }
    dist
}

/// Per-player classical information partitions; blocks cover exactly `ℋ_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalPartition {
    players: Vec<Partition>,
}

impl ClassicalPartition {
    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    /// Player `i`'s partition (1-based), covering `ℋ_i` only.
    pub fn player(&self, i: usize) -> &Partition {
        &self.players[i - 1]
    }

    pub fn players(&self) -> &[Partition] {
        &self.players
    }

    /// `I_i^cl(h)` as a block index, `None` when `h ∉ ℋ_i`.
    pub fn block_of(&self, i: usize, h: NodeId) -> Option<usize> {
        self.players[i - 1].block_of(h)
    }

    /// Singleton blocks for every acting history: the perfect-information model.
    pub fn singletons(game: &GameTree) -> Self {
        let players = (1..=game.num_players())
            .map(|i| {
                let blocks = game.acting_nodes(i).into_iter().map(|h| vec![h]).collect();
                Partition::from_blocks(game.len(), blocks).expect("disjoint")
            })
            .collect();
        ClassicalPartition { players }
    }

    /// Builds from history-path blocks per player (index 0 = player 1).
    pub fn from_paths(
        game: &GameTree,
        blocks: &[Vec<Vec<&str>>],
    ) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();
        let mut raw = Vec::new();
        for player_blocks in blocks {
            let mut pb = Vec::new();
            for block in player_blocks {
                let mut ids = Vec::new();
                for path in block {
                    match game.id_of(path) {
                        Ok(id) => ids.push(id),
                        Err(_) => errors.push(TreeViolation::UnknownHistory(path.to_string())),
                    }
                }
                pb.push(ids);
            }
            raw.push(pb);
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        validate_classical(game, raw)
    }
}

/// Validates raw blocks (node ids, per player, index 0 = player 1).
pub fn validate_classical(
    game: &GameTree,
    raw: Vec<Vec<Vec<NodeId>>>,
) -> Result<ClassicalPartition, ValidationErrors> {
    let mut errors = Vec::new();
    if raw.len() != game.num_players() {
        errors.push(TreeViolation::ClassicalPlayerCount {
            expected: game.num_players(),
            found: raw.len(),
        });
        return Err(ValidationErrors(errors));
    }
    let mut players = Vec::new();
    for (idx, blocks) in raw.into_iter().enumerate() {
        let i = idx + 1;
        let mut seen = vec![false; game.len()];
        for block in &blocks {
            if block.is_empty() {
                errors.push(TreeViolation::EmptyBlock { player: i });
            }
            for &h in block {
                if !game.is_acting(h, i) {
                    errors.push(TreeViolation::NotActing {
                        player: i,
                        history: game.history(h).to_string(),
                    });
                }
                if std::mem::replace(&mut seen[h], true) {
                    errors.push(TreeViolation::Overlap {
                        player: i,
                        history: game.history(h).to_string(),
                    });
                }
            }
            if let Some((&first, rest)) = block.split_first() {
                let actions: Vec<&ActionLabel> = game.actions(first).collect();
                for &h in rest {
                    if game.actions(h).collect::<Vec<_>>() != actions {
                        errors.push(TreeViolation::ActionSetMismatch {
                            player: i,
                            first: game.history(first).to_string(),
                            other: game.history(h).to_string(),
                        });
                    }
                }
            }
        }
        for h in game.acting_nodes(i) {
            if !seen[h] {
                errors.push(TreeViolation::Uncovered {
                    player: i,
                    history: game.history(h).to_string(),
                });
            }
        }
        if errors.is_empty() {
            let blocks: Vec<Vec<NodeId>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
            players.push(Partition::from_blocks(game.len(), blocks).expect("checked disjoint"));
        }
    }
    if errors.is_empty() {
        Ok(ClassicalPartition { players })
    } else {
        Err(ValidationErrors(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> GameTree {
        let mut raw = RawGame::new(2);
        raw.decision("", 1)
            .decision("x", 2)
            .terminal("x y", &[1.0, -1.0]);
        raw.build().unwrap()
    }

    #[test]
    fn single_root_is_valid() {
        let mut raw = RawGame::new(2);
        raw.terminal("", &[0.0, 0.0]);
        let game = raw.build().unwrap();
        assert_eq!(game.len(), 1);
        assert!(game.is_terminal(game.root()));
        assert_eq!(game.parent_action(0), None);
    }

    #[test]
    fn missing_prefix_is_reported() {
        let mut raw = RawGame::new(1);
        raw.decision("", 1).terminal("a b", &[0.0]);
        let err = raw.build().unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, TreeViolation::MissingPrefix { missing, .. } if missing == "a")));
        assert!(err.to_string().contains("prefix not closed"));
    }

    #[test]
    fn all_violations_are_collected() {
        let mut raw = RawGame::new(2);
        raw.chance("", &[("a", 0.5), ("b", 0.4)])
            .decision("a", 1)
            .terminal("b", &[0.0, 0.0]);
        raw.terminal("b", &[1.0, 1.0]);
        let err = raw.build().unwrap_err();
        let kinds: Vec<_> = err.0.iter().map(|e| e.to_string()).collect();
        assert!(kinds.iter().any(|k| k.contains("duplicate")), "{kinds:?}");
        assert!(kinds.iter().any(|k| k.contains("sums to")), "{kinds:?}");
        assert!(
            kinds.iter().any(|k| k.contains("without utilities")),
            "{kinds:?}"
        );
    }

    #[test]
    fn zero_probability_rejected() {
        let mut raw = RawGame::new(1);
        raw.chance("", &[("a", 1.0), ("b", 0.0)])
            .terminal("a", &[0.0])
            .terminal("b", &[0.0]);
        let err = raw.build().unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, TreeViolation::NonPositiveProbability(_))));
    }

    #[test]
    fn invalid_labels() {
        assert!(ActionLabel::new("").is_err());
        assert!(ActionLabel::new("a b").is_err());
        assert!(ActionLabel::new("noop#1").is_ok());
    }

    #[test]
    fn queries() {
        let game = chain();
        let x = game.id_of("x").unwrap();
        let xy = game.id_of("x y").unwrap();
        assert!(game.is_prefix(x, x));
        assert!(game.is_prefix(0, xy));
        assert!(!game.is_prefix(xy, x));
        assert_eq!(
            game.parent_action(xy).map(|(p, a)| (p, a.as_str())),
            Some((x, "y"))
        );
        assert_eq!(game.player(x), Some(PlayerId::Player(2)));
        assert_eq!(
            game.actions(0).map(|a| a.as_str()).collect::<Vec<_>>(),
            vec!["x"]
        );
        assert!(game.id_of("z").is_err());
        assert_eq!(game.path(xy), vec![0, x, xy]);
    }

    #[test]
    fn classical_validation() {
        let game = chain();
        let ok = ClassicalPartition::singletons(&game);
        assert_eq!(ok.player(1).len(), 1);
        let err = validate_classical(&game, vec![vec![vec![0, 1]], vec![vec![]]]).unwrap_err();
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, TreeViolation::NotActing { .. })));
        assert!(err
            .0
            .iter()
            .any(|e| matches!(e, TreeViolation::Uncovered { .. })));
    }

    #[test]
    fn classical_rejects_chance_in_block() {
        let mut raw = RawGame::new(1);
        raw.chance("", &[("a", 1.0)])
            .decision("a", 1)
            .terminal("a b", &[0.0]);
        let game = raw.build().unwrap();
        assert!(validate_classical(&game, vec![vec![vec![0, 1]]]).is_err());
    }

    #[test]
    fn restrict_renormalizes_chance() {
        let mut raw = RawGame::new(1);
        raw.chance("", &[("a", 0.25), ("b", 0.75)])
            .terminal("a", &[1.0])
            .terminal("b", &[2.0]);
        let game = raw.build().unwrap();
        let (small, map) = game.restrict(&[true, false, true]);
        assert_eq!(small.len(), 2);
        assert_eq!(map, vec![Some(0), None, Some(1)]);
        let b = ActionLabel::new("b").unwrap();
        assert!((small.chance_probability(0, &b).unwrap() - 1.0).abs() < 1e-12);
    }
}
