//! Observation functions (set and sequence variants), observation histories
//! and the standard derived observation functions.

use std::collections::HashMap;
use std::fmt;

use crate::error::GameError;
use crate::game::{ActionLabel, ClassicalPartition, GameTree, NodeId};
use crate::partitions::Partition;

/// An elementary observation. Tokens carry no meaning beyond equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Token {
    Symbol(String),
    Action(ActionLabel),
    Infoset(String),
    Feature { name: String, value: String },
}

impl Token {
    pub fn symbol(s: impl Into<String>) -> Self {
        Token::Symbol(s.into())
    }

    pub fn feature(name: impl Into<String>, value: impl Into<String>) -> Self {
        Token::Feature {
            name: name.into(),
            value: value.into(),
        }
    }

    /// Parses `sym:NAME`, `act:LABEL`, `iset:ID` or `feat:NAME=VALUE`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("token {s:?} lacks a tag"))?;
        match tag {
            "sym" => Ok(Token::Symbol(rest.to_string())),
            "act" => ActionLabel::new(rest)
                .map(Token::Action)
                .map_err(|e| e.to_string()),
            "iset" => Ok(Token::Infoset(rest.to_string())),
            "feat" => {
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| format!("feature token {s:?} lacks '='"))?;
                Ok(Token::feature(name, value))
            }
            other => Err(format!("unknown token tag {other:?}")),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Symbol(s) => write!(f, "sym:{s}"),
            Token::Action(a) => write!(f, "act:{a}"),
            Token::Infoset(id) => write!(f, "iset:{id}"),
            Token::Feature { name, value } => write!(f, "feat:{name}={value}"),
        }
    }
}

/// Shortest round-trip decimal, with `-0` folded into `0`.
pub fn canonical_number(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Each history's observation is a set; players see where it ends.
    Set,
    /// Observations are token sequences concatenated into one stream.
    Sequence,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Set => "set",
            Variant::Sequence => "seq",
        }
    }
}

/// Per-player, per-history observations. Absent entries are empty.
/// Set-variant observations are stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationAssignment {
    variant: Variant,
    obs: Vec<Vec<Vec<Token>>>,
}

impl ObservationAssignment {
    pub fn empty(variant: Variant, num_players: usize, num_nodes: usize) -> Self {
        ObservationAssignment {
            variant,
            obs: vec![vec![Vec::new(); num_nodes]; num_players],
        }
    }

    pub fn for_game(variant: Variant, game: &GameTree) -> Self {
        Self::empty(variant, game.num_players(), game.len())
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn num_players(&self) -> usize {
        self.obs.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.obs.first().map_or(0, Vec::len)
    }

    /// `O_i(h)`.
    pub fn get(&self, player: usize, h: NodeId) -> &[Token] {
        &self.obs[player - 1][h]
    }

    pub fn set(&mut self, player: usize, h: NodeId, tokens: Vec<Token>) {
        let slot = &mut self.obs[player - 1][h];
        *slot = tokens;
        if self.variant == Variant::Set {
            slot.sort();
            slot.dedup();
        }
    }

    pub fn push(&mut self, player: usize, h: NodeId, token: Token) {
        let slot = &mut self.obs[player - 1][h];
        match self.variant {
            Variant::Sequence => slot.push(token),
            Variant::Set => {
                if let Err(pos) = slot.binary_search(&token) {
                    slot.insert(pos, token);
                }
            }
        }
    }

    /// Same tokens reinterpreted under another variant.
    pub fn with_variant(&self, variant: Variant) -> Self {
        let mut out = ObservationAssignment {
            variant,
            obs: self.obs.clone(),
        };
        if variant == Variant::Set {
            for slot in out.obs.iter_mut().flatten() {
                slot.sort();
                slot.dedup();
            }
        }
        out
    }

    pub fn check_shape(&self, game: &GameTree) -> Result<(), GameError> {
        if self.num_players() != game.num_players() || self.num_nodes() != game.len() {
            return Err(GameError::ShapeMismatch(format!(
                "{} players x {} histories vs {} x {}",
                self.num_players(),
                self.num_nodes(),
                game.num_players(),
                game.len()
            )));
        }
        Ok(())
    }
}

/// `O + O'`: union (set variant) or concatenation (sequence variant).
pub fn add_observations(
    a: &ObservationAssignment,
    b: &ObservationAssignment,
) -> Result<ObservationAssignment, GameError> {
    if a.variant != b.variant {
        return Err(GameError::VariantMismatch);
    }
    if a.num_players() != b.num_players() || a.num_nodes() != b.num_nodes() {
        return Err(GameError::ShapeMismatch("summands differ in shape".into()));
    }
    let mut out = a.clone();
    for i in 1..=a.num_players() {
        for h in 0..a.num_nodes() {
            for t in b.get(i, h) {
                out.push(i, h, t.clone());
            }
        }
    }
    Ok(out)
}

/// One element of an observation history.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObsEntry {
    /// The player's memory of their own action.
    Action(ActionLabel),
    /// A whole set-variant observation.
    Set(Vec<Token>),
    /// One sequence-variant token.
    Token(Token),
}

impl fmt::Display for ObsEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsEntry::Action(a) => write!(f, "do:{a}"),
            ObsEntry::Token(t) => write!(f, "{t}"),
            ObsEntry::Set(ts) => {
                f.write_str("{")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// `vec O_i(h)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ObservationHistory(pub Vec<ObsEntry>);

impl ObservationHistory {
    pub fn entries(&self) -> &[ObsEntry] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &ObservationHistory) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for ObservationHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Entries appended at `h`: the action memory (when the parent is the
/// player's decision node) followed by the observation payload.
pub fn increment(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
    h: NodeId,
) -> Vec<ObsEntry> {
    let mut out = Vec::new();
    if let Some((p, a)) = game.parent_action(h) {
        if game.is_acting(p, player) {
            out.push(ObsEntry::Action(a.clone()));
        }
    }
    let payload = obs.get(player, h);
    if !payload.is_empty() {
        match obs.variant() {
            Variant::Set => out.push(ObsEntry::Set(payload.to_vec())),
            Variant::Sequence => out.extend(payload.iter().cloned().map(ObsEntry::Token)),
        }
    }
    out
}

/// Computes `vec O_i(h)` by walking the path from the root.
pub fn obs_history(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
    h: NodeId,
) -> ObservationHistory {
    let entries = game
        .path(h)
        .into_iter()
        .flat_map(|g| increment(game, obs, player, g))
        .collect();
    ObservationHistory(entries)
}

/// Interned observation histories for one player: equal ids mean equal
/// `vec O_i`.
#[derive(Debug, Clone)]
pub struct ObservationHistories {
    ids: Vec<u32>,
    last_growth: Vec<NodeId>,
    trie: HashMap<(u32, ObsEntry), u32>,
}

impl ObservationHistories {
    pub fn compute(game: &GameTree, obs: &ObservationAssignment, player: usize) -> Self {
        let mut trie: HashMap<(u32, ObsEntry), u32> = HashMap::new();
        let mut ids = vec![0u32; game.len()];
        let mut last_growth = vec![0; game.len()];
        for h in game.nodes() {
            let mut id = game.parent(h).map_or(0, |p| ids[p]);
            let start = id;
            for entry in increment(game, obs, player, h) {
                let next = trie.len() as u32 + 1;
                id = *trie.entry((id, entry)).or_insert(next);
            }
            ids[h] = id;
            last_growth[h] = match game.parent(h) {
                Some(p) if id == start => last_growth[p],
                _ => h,
            };
        }
        ObservationHistories {
            ids,
            last_growth,
            trie,
        }
    }

    pub fn id(&self, h: NodeId) -> u32 {
        self.ids[h]
    }

    /// Id of the history extending `id` by `entry`, if any history has it as
    /// a prefix. The empty history has id 0.
    pub fn step(&self, id: u32, entry: &ObsEntry) -> Option<u32> {
        self.trie.get(&(id, entry.clone())).copied()
    }

    /// Whether `vec O_i` changed when entering `h` (the root always counts).
    pub fn grew_at(&self, h: NodeId) -> bool {
        self.last_growth[h] == h
    }

    /// Deepest `g ⊑ h` at which the observation history last changed.
    pub fn last_growth(&self, h: NodeId) -> NodeId {
        self.last_growth[h]
    }
}

/// `O^cl`: the classical infoset label at each decision node. With the turn
/// marker, other histories observe `sym:not_your_turn` (the memoryless model).
pub fn classical_obs(
    game: &GameTree,
    classical: &ClassicalPartition,
    with_turn_marker: bool,
    variant: Variant,
) -> ObservationAssignment {
    let mut out = ObservationAssignment::for_game(variant, game);
    for i in 1..=game.num_players() {
        let part = classical.player(i);
        for h in game.nodes() {
            match part.block_of(h) {
                Some(b) => out.push(i, h, Token::Infoset(part.label(b, game))),
                None if with_turn_marker => out.push(i, h, Token::symbol("not_your_turn")),
                None => {}
            }
        }
    }
    out
}

/// `O^iso`: each player observes their own action right after taking it.
pub fn iso_obs(game: &GameTree, variant: Variant) -> ObservationAssignment {
    let mut out = ObservationAssignment::for_game(variant, game);
    for h in game.nodes() {
        if let Some((p, a)) = game.parent_action(h) {
            if let Some(crate::game::PlayerId::Player(i)) = game.player(p) {
                out.push(i, h, Token::Action(a.clone()));
            }
        }
    }
    out
}

/// `O^iso+cl = O^iso + O^cl` (no turn marker).
pub fn iso_cl_obs(
    game: &GameTree,
    classical: &ClassicalPartition,
    variant: Variant,
) -> ObservationAssignment {
    add_observations(
        &iso_obs(game, variant),
        &classical_obs(game, classical, false, variant),
    )
    .expect("same variant and shape")
}

/// `O^ℐ`: the block label is emitted on entering a new block, compared
/// against the longest covered proper prefix. Uncovered histories observe
/// nothing. `partitions[i - 1]` belongs to player `i`.
pub fn obs_from_partition(
    game: &GameTree,
    partitions: &[Partition],
    variant: Variant,
) -> ObservationAssignment {
    let mut out = ObservationAssignment::for_game(variant, game);
    for (idx, part) in partitions.iter().enumerate() {
        let i = idx + 1;
        // nearest covered strict ancestor, per node
        let mut covered_above: Vec<Option<NodeId>> = vec![None; game.len()];
        for h in game.nodes() {
            if let Some(p) = game.parent(h) {
                covered_above[h] = if part.is_covered(p) {
                    Some(p)
                } else {
                    covered_above[p]
                };
            }
            let Some(b) = part.block_of(h) else { continue };
            let entered = match covered_above[h] {
                None => true,
                Some(g) => part.block_of(g) != Some(b),
            };
            if entered {
                out.push(i, h, Token::Infoset(part.label(b, game)));
            }
        }
    }
    out
}

/// Memoryless partition: histories grouped by their current observation only.
pub fn memoryless_induce(game: &GameTree, obs: &ObservationAssignment, player: usize) -> Partition {
    Partition::group_by(game.len(), game.nodes(), |h| obs.get(player, h).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RawGame;

    fn two_step() -> GameTree {
        // P1 acts twice in a row.
        let mut raw = RawGame::new(1);
        raw.decision("", 1).decision("a", 1).terminal("a b", &[0.0]);
        raw.build().unwrap()
    }

    #[test]
    fn token_round_trip() {
        for s in ["sym:x", "act:go", "iset:a b", "feat:Your utility=3"] {
            assert_eq!(Token::parse(s).unwrap().to_string(), s);
        }
        assert!(Token::parse("nope").is_err());
        assert!(Token::parse("feat:x").is_err());
        assert!(Token::parse("act:a b").is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(canonical_number(3.0), "3");
        assert_eq!(canonical_number(-0.0), "0");
        assert_eq!(canonical_number(0.5), "0.5");
        assert_eq!(canonical_number(-1.25), "-1.25");
    }

    #[test]
    fn empty_root_gives_empty_history() {
        let game = two_step();
        let obs = ObservationAssignment::for_game(Variant::Set, &game);
        assert!(obs_history(&game, &obs, 1, 0).0.is_empty());
        // empty observation after own action only records the action
        let a = game.id_of("a").unwrap();
        assert_eq!(
            obs_history(&game, &obs, 1, a).0,
            vec![ObsEntry::Action(ActionLabel::new("a").unwrap())]
        );
    }

    #[test]
    fn iso_on_chain() {
        let game = two_step();
        let obs = iso_obs(&game, Variant::Sequence);
        let a = game.id_of("a").unwrap();
        assert_eq!(
            obs.get(1, a),
            &[Token::Action(ActionLabel::new("a").unwrap())]
        );
        assert!(obs.get(1, 0).is_empty());
    }

    #[test]
    fn single_node_iso_is_empty() {
        let mut raw = RawGame::new(2);
        raw.terminal("", &[0.0, 0.0]);
        let game = raw.build().unwrap();
        let obs = iso_obs(&game, Variant::Set);
        assert!(obs.get(1, 0).is_empty() && obs.get(2, 0).is_empty());
    }

    #[test]
    fn add_identity_and_idempotence() {
        let game = two_step();
        let iso = iso_obs(&game, Variant::Set);
        let empty = ObservationAssignment::for_game(Variant::Set, &game);
        assert_eq!(add_observations(&iso, &empty).unwrap(), iso);
        assert_eq!(add_observations(&iso, &iso).unwrap(), iso);
        let seq = iso_obs(&game, Variant::Sequence);
        assert_eq!(
            add_observations(&iso, &seq),
            Err(GameError::VariantMismatch)
        );
        let doubled = add_observations(&seq, &seq).unwrap();
        assert_eq!(doubled.get(1, 1).len(), 2);
    }

    #[test]
    fn partition_observations_on_thick_block() {
        let game = two_step();
        // {root, a} thick block, leaf alone
        let p = Partition::from_blocks(3, vec![vec![0, 1], vec![2]]).unwrap();
        let obs = obs_from_partition(&game, &[p], Variant::Set);
        assert_eq!(obs.get(1, 0), &[Token::Infoset(String::new())]);
        assert!(obs.get(1, 1).is_empty());
        assert_eq!(obs.get(1, 2), &[Token::Infoset("a b".into())]);
    }

    #[test]
    fn partition_observations_singletons() {
        let game = two_step();
        let obs = obs_from_partition(&game, &[Partition::singletons(3)], Variant::Set);
        for h in game.nodes() {
            assert_eq!(obs.get(1, h).len(), 1);
        }
    }

    #[test]
    fn memoryless_constant_is_one_block() {
        let game = two_step();
        let mut obs = ObservationAssignment::for_game(Variant::Set, &game);
        for h in game.nodes() {
            obs.push(1, h, Token::symbol("x"));
        }
        assert_eq!(memoryless_induce(&game, &obs, 1).len(), 1);
    }

    #[test]
    fn trie_growth_tracking() {
        let mut raw = RawGame::new(1);
        raw.chance("", &[("x", 1.0)])
            .chance("x", &[("y", 1.0)])
            .terminal("x y", &[0.0]);
        let game = raw.build().unwrap();
        let mut obs = ObservationAssignment::for_game(Variant::Sequence, &game);
        obs.push(1, 1, Token::symbol("s"));
        let hs = ObservationHistories::compute(&game, &obs, 1);
        assert!(hs.grew_at(0) && hs.grew_at(1) && !hs.grew_at(2));
        assert_eq!(hs.last_growth(2), 1);
        assert_eq!(hs.id(1), hs.id(2));
        assert_ne!(hs.id(0), hs.id(1));
    }
}
