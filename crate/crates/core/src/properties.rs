//! Checkers for the desiderata on observation-based models, each returning a
//! verdict with a smallest witness, plus the randomized-harness drivers.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::GameError;
use crate::game::{ActionLabel, ClassicalPartition, GameTree, NodeId};
use crate::observations::{
    add_observations, canonical_number, iso_obs, obs_from_partition, obs_history,
    ObservationAssignment, ObservationHistories, ObservationHistory, Variant,
};
use crate::partitions::{classical_from_induced, compare, induce_partition, Partition, Refinement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Cons,
    Aps,
    Iso,
    Tsip,
    Stab,
    Wbd,
    WbdObserved,
    Recall,
    Deduce,
    ObservationModel,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Cons => "cons",
            Property::Aps => "aps",
            Property::Iso => "iso",
            Property::Tsip => "tsip",
            Property::Stab => "stab",
            Property::Wbd => "wbd",
            Property::WbdObserved => "wbd_observed",
            Property::Recall => "recall",
            Property::Deduce => "deduce",
            Property::ObservationModel => "obsmodel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "cons" => Property::Cons,
            "aps" => Property::Aps,
            "iso" => Property::Iso,
            "tsip" => Property::Tsip,
            "stab" => Property::Stab,
            "wbd" => Property::Wbd,
            "wbd_observed" => Property::WbdObserved,
            "recall" => Property::Recall,
            "deduce" => Property::Deduce,
            "obsmodel" => Property::ObservationModel,
            _ => return None,
        })
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Built-in features. `Custom` carries explicit values (`None` = outside the
/// domain).
#[derive(Debug, Clone, PartialEq)]
pub enum Feature {
    Utility,
    PlayerFunction,
    IsMyTurn,
    AvailableActions,
    IsTerminal,
    OwnObservation,
    HistoryLength,
    Custom {
        name: String,
        values: Vec<Option<String>>,
    },
}

impl Feature {
    pub fn name(&self) -> &str {
        match self {
            Feature::Utility => "utility",
            Feature::PlayerFunction => "player_function",
            Feature::IsMyTurn => "is_my_turn",
            Feature::AvailableActions => "available_actions",
            Feature::IsTerminal => "is_terminal",
            Feature::OwnObservation => "own_observation",
            Feature::HistoryLength => "history_length",
            Feature::Custom { name, .. } => name,
        }
    }

    /// Built-in features by name.
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "utility" => Feature::Utility,
            "player_function" => Feature::PlayerFunction,
            "is_my_turn" => Feature::IsMyTurn,
            "available_actions" => Feature::AvailableActions,
            "is_terminal" => Feature::IsTerminal,
            "own_observation" => Feature::OwnObservation,
            "history_length" => Feature::HistoryLength,
            _ => return None,
        })
    }

    /// Canonical value at every history for `player`; `None` outside the domain.
    pub fn values(
        &self,
        game: &GameTree,
        obs: &ObservationAssignment,
        player: usize,
    ) -> Vec<Option<String>> {
        let flag = |b: bool| Some(if b { "1" } else { "0" }.to_string());
        match self {
            Feature::Custom { values, .. } => values.clone(),
            Feature::OwnObservation => {
                let hs = ObservationHistories::compute(game, obs, player);
                game.nodes()
                    .map(|h| {
                        let tokens: Vec<String> = obs
                            .get(player, hs.last_growth(h))
                            .iter()
                            .map(|t| t.to_string())
                            .collect();
                        Some(serde_json::to_string(&tokens).expect("strings serialize"))
                    })
                    .collect()
            }
            _ => game
                .nodes()
                .map(|h| match self {
                    Feature::Utility => game.utilities(h).map(|u| canonical_number(u[player - 1])),
                    Feature::PlayerFunction => game.player(h).map(|p| p.to_string()),
                    Feature::IsMyTurn => flag(game.is_acting(h, player)),
                    Feature::AvailableActions => {
                        if game.is_terminal(h) {
                            None
                        } else {
                            let mut labels: Vec<&str> =
                                game.actions(h).map(ActionLabel::as_str).collect();
                            labels.sort_unstable();
                            Some(labels.join(" "))
                        }
                    }
                    Feature::IsTerminal => flag(game.is_terminal(h)),
                    Feature::HistoryLength => Some(game.depth(h).to_string()),
                    Feature::OwnObservation | Feature::Custom { .. } => unreachable!(),
                })
                .collect(),
        }
    }
}

/// Evidence that a property fails. Node pairs are ordered `(smaller, larger)`
/// unless the roles differ.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Same classical block, different observed blocks.
    Split { g: NodeId, h: NodeId },
    /// Same observed block, different classical blocks.
    Merge { g: NodeId, h: NodeId },
    /// An acting and a non-acting history share a block.
    Mixed { acting: NodeId, other: NodeId },
    /// `h` follows the player's own action, which `O_i(h)` does not contain.
    MissingAction { h: NodeId },
    /// Two members of one block entered from different parent blocks.
    TwoParents { g: NodeId, h: NodeId },
    /// Entry histories of a cycle among distinct blocks: the parent of each
    /// lies in the block of the next.
    Cycle { entries: Vec<NodeId> },
    /// The partition before and after re-deriving observations disagrees on
    /// this pair; `merged` tells whether the original partition joins them.
    Unstable { g: NodeId, h: NodeId, merged: bool },
    /// Same block, the action leads into `ℋ_i` from `into` but not from `away`.
    NonUniform {
        into: NodeId,
        away: NodeId,
        action: ActionLabel,
    },
    /// Same observed block entered from outside, once from an own decision
    /// node (`from_acting`) and once not.
    EntryMismatch { from_acting: NodeId, other: NodeId },
    /// Same classical block, different own-history traces.
    Recall { g: NodeId, h: NodeId },
    /// Same observed block, different feature values (or `g` outside the domain).
    Undeducible {
        feature: String,
        g: NodeId,
        h: NodeId,
    },
}

impl Witness {
    /// The histories named by the witness.
    pub fn histories(&self) -> Vec<NodeId> {
        match self {
            Witness::Split { g, h }
            | Witness::Merge { g, h }
            | Witness::TwoParents { g, h }
            | Witness::Unstable { g, h, .. }
            | Witness::Recall { g, h }
            | Witness::Undeducible { g, h, .. } => vec![*g, *h],
            Witness::Mixed { acting, other } => vec![*acting, *other],
            Witness::MissingAction { h } => vec![*h],
            Witness::Cycle { entries } => entries.clone(),
            Witness::NonUniform { into, away, .. } => vec![*into, *away],
            Witness::EntryMismatch { from_acting, other } => vec![*from_acting, *other],
        }
    }

    pub fn describe(&self, game: &GameTree) -> String {
        let q = |h: &NodeId| format!("({})", game.history(*h));
        match self {
            Witness::Split { g, h } => format!(
                "{} and {} share a classical block but are observed apart",
                q(g),
                q(h)
            ),
            Witness::Merge { g, h } => format!(
                "{} and {} are observed alike but lie in different classical blocks",
                q(g),
                q(h)
            ),
            Witness::Mixed { acting, other } => format!(
                "acting {} shares a block with non-acting {}",
                q(acting),
                q(other)
            ),
            Witness::MissingAction { h } => {
                format!("own action leading to {} is not observed", q(h))
            }
            Witness::TwoParents { g, h } => format!(
                "{} and {} enter one block from different parent blocks",
                q(g),
                q(h)
            ),
            Witness::Cycle { entries } => {
                let hs: Vec<String> = entries.iter().map(q).collect();
                format!("blocks entered at {} form a cycle", hs.join(", "))
            }
            Witness::Unstable { g, h, merged } => format!(
                "{} and {} are {} originally but not after re-deriving observations",
                q(g),
                q(h),
                if *merged { "joined" } else { "separated" }
            ),
            Witness::NonUniform { into, away, action } => {
                format!(
                    "action {action} leads into own nodes from {} but not from {}",
                    q(into),
                    q(away)
                )
            }
            Witness::EntryMismatch { from_acting, other } => {
                format!(
                    "block entered from an own node at {} but from elsewhere at {}",
                    q(from_acting),
                    q(other)
                )
            }
            Witness::Recall { g, h } => format!(
                "{} and {} share a block but their own histories differ",
                q(g),
                q(h)
            ),
            Witness::Undeducible { feature, g, h } => {
                format!(
                    "{feature} differs between {} and {} in one block",
                    q(g),
                    q(h)
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub property: Property,
    pub player: usize,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Which conjunct failed, for composite checks.
    pub note: Option<String>,
}

impl PropertyReport {
    fn verdict(property: Property, player: usize, witness: Option<Witness>) -> Self {
        PropertyReport {
            property,
            player,
            holds: witness.is_none(),
            witness,
            note: None,
        }
    }
}

fn same_block_pairs_first<T: PartialEq>(
    members: &[NodeId],
    key: impl Fn(NodeId) -> T,
) -> Option<(NodeId, NodeId)> {
    let first = *members.first()?;
    let k = key(first);
    members
        .iter()
        .skip(1)
        .find(|&&h| key(h) != k)
        .map(|&h| (first, h))
}

/// `(CONS)`: `ℐ^𝒪_i|ℋ_i = ℐ^cl_i`.
pub fn check_cons(
    game: &GameTree,
    obs: &ObservationAssignment,
    classical: &ClassicalPartition,
    player: usize,
) -> PropertyReport {
    let induced = induce_partition(game, obs, player);
    PropertyReport::verdict(
        Property::Cons,
        player,
        cons_witness(game, &induced, classical.player(player), player),
    )
}

fn cons_witness(
    game: &GameTree,
    induced: &Partition,
    cl: &Partition,
    player: usize,
) -> Option<Witness> {
    let acting = game.acting_nodes(player);
    let mut best: Option<(NodeId, NodeId, bool)> = None;
    for (x, &g) in acting.iter().enumerate() {
        for &h in &acting[x + 1..] {
            let observed = induced.same_block(g, h);
            let classical = cl.same_block(g, h);
            if observed != classical {
                best = Some((g, h, classical));
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.map(|(g, h, classical)| {
        if classical {
            Witness::Split { g, h }
        } else {
            Witness::Merge { g, h }
        }
    })
}

/// `(APS)`: no block mixes `ℋ_i` with other histories.
pub fn check_aps(game: &GameTree, obs: &ObservationAssignment, player: usize) -> PropertyReport {
    let induced = induce_partition(game, obs, player);
    PropertyReport::verdict(Property::Aps, player, aps_witness(game, &induced, player))
}

fn aps_witness(game: &GameTree, induced: &Partition, player: usize) -> Option<Witness> {
    let mut best: Option<(NodeId, NodeId)> = None;
    for block in induced.blocks() {
        if let Some((a, b)) = same_block_pairs_first(block, |h| game.is_acting(h, player)) {
            let (acting, other) = if game.is_acting(a, player) {
                (a, b)
            } else {
                (b, a)
            };
            if best
                .is_none_or(|(x, y)| (acting.min(other), acting.max(other)) < (x.min(y), x.max(y)))
            {
                best = Some((acting, other));
            }
        }
    }
    best.map(|(acting, other)| Witness::Mixed { acting, other })
}

/// `(ISO)`: the player's own action is a token of the next observation.
pub fn check_iso(game: &GameTree, obs: &ObservationAssignment, player: usize) -> PropertyReport {
    let witness = game.nodes().find_map(|h| {
        let (p, a) = game.parent_action(h)?;
        let token = crate::observations::Token::Action(a.clone());
        (game.is_acting(p, player) && !obs.get(player, h).contains(&token))
            .then_some(Witness::MissingAction { h })
    });
    PropertyReport::verdict(Property::Iso, player, witness)
}

/// `(TSIP)` for the partition induced by `obs`.
pub fn check_tsip(game: &GameTree, obs: &ObservationAssignment, player: usize) -> PropertyReport {
    check_tsip_partition(game, &induce_partition(game, obs, player), player)
}

/// `(TSIP)` for an arbitrary partition covering `ℋ`: the relation between
/// distinct blocks is antisymmetric and every block but the root block has
/// exactly one parent block.
pub fn check_tsip_partition(
    game: &GameTree,
    partition: &Partition,
    player: usize,
) -> PropertyReport {
    assert!(
        partition.is_total(),
        "tsip needs a partition of all histories"
    );
    let nb = partition.len();
    let block = |h: NodeId| partition.block_of(h).unwrap();
    // first entry history from each parent block, per block
    let mut parents: Vec<Vec<(usize, NodeId)>> = vec![Vec::new(); nb];
    for h in game.nodes() {
        if let Some(p) = game.parent(h) {
            let (bp, bh) = (block(p), block(h));
            if bp != bh && !parents[bh].iter().any(|&(b, _)| b == bp) {
                parents[bh].push((bp, h));
            }
        }
    }
    if let Some(entries) = find_cycle(nb, &parents) {
        return PropertyReport::verdict(Property::Tsip, player, Some(Witness::Cycle { entries }));
    }
    let root_block = block(game.root());
    let witness = (0..nb)
        .filter(|&b| b != root_block)
        .find_map(|b| match parents[b].as_slice() {
            [(_, g), (_, h), ..] => Some(Witness::TwoParents { g: *g, h: *h }),
            _ => None,
        });
    PropertyReport::verdict(Property::Tsip, player, witness)
}

/// A cycle in the parent-block graph, as entry histories.
fn find_cycle(nb: usize, parents: &[Vec<(usize, NodeId)>]) -> Option<Vec<NodeId>> {
    // colour: 0 unvisited, 1 on stack, 2 done
    let mut colour = vec![0u8; nb];
    let mut stack: Vec<(usize, usize, NodeId)> = Vec::new();
    for start in 0..nb {
        if colour[start] != 0 {
            continue;
        }
        let mut path: Vec<(usize, NodeId)> = Vec::new();
        colour[start] = 1;
        stack.push((start, 0, usize::MAX));
        while let Some(top) = stack.len().checked_sub(1) {
            let (b, next, _) = stack[top];
            if next < parents[b].len() {
                let (p, entry) = parents[b][next];
                stack[top].1 += 1;
                match colour[p] {
                    0 => {
                        colour[p] = 1;
                        path.push((b, entry));
                        stack.push((p, 0, entry));
                    }
                    1 => {
                        // cycle: p ... b along the stack, then b -> p via entry
                        let pos = stack.iter().position(|&(x, _, _)| x == p).unwrap();
                        let mut entries: Vec<NodeId> =
                            path[pos..].iter().map(|&(_, e)| e).collect();
                        entries.push(entry);
                        return Some(entries);
                    }
                    _ => {}
                }
            } else {
                colour[b] = 2;
                stack.pop();
                path.pop();
            }
        }
    }
    None
}

/// `(STAB)`: `ℐ^𝒪 = ℐ^{𝒪*}` with `𝒪* = 𝒪^{ℐ^𝒪}` in the same variant.
pub fn check_stab(game: &GameTree, obs: &ObservationAssignment, player: usize) -> PropertyReport {
    let induced = induce_partition(game, obs, player);
    let star = star_obs(game, obs, player, &induced);
    let reinduced = induce_partition(game, &star, player);
    PropertyReport::verdict(
        Property::Stab,
        player,
        partition_disagreement(&induced, &reinduced),
    )
}

/// `𝒪*` for one player; other players observe nothing.
fn star_obs(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
    induced: &Partition,
) -> ObservationAssignment {
    let mut parts: Vec<Partition> = (1..=game.num_players())
        .map(|_| Partition::from_blocks(game.len(), vec![]).unwrap())
        .collect();
    parts[player - 1] = induced.clone();
    obs_from_partition(game, &parts, obs.variant())
}

fn partition_disagreement(original: &Partition, other: &Partition) -> Option<Witness> {
    let n = original.num_nodes();
    for g in 0..n {
        for h in g + 1..n {
            let a = original.same_block(g, h);
            if a != other.same_block(g, h) {
                return Some(Witness::Unstable { g, h, merged: a });
            }
        }
    }
    None
}

/// Classical `(WBD)`: in each block, each action's successors are uniformly
/// inside or outside `ℋ_i`.
pub fn check_wbd(game: &GameTree, classical: &ClassicalPartition, player: usize) -> PropertyReport {
    let mut witness = None;
    'blocks: for block in classical.player(player).blocks() {
        for a in game.actions(block[0]) {
            let into_own =
                |h| game.is_acting(game.child(h, a).expect("uniform action sets"), player);
            if let Some((g, h)) = same_block_pairs_first(block, into_own) {
                let (into, away) = if into_own(g) { (g, h) } else { (h, g) };
                witness = Some(Witness::NonUniform {
                    into,
                    away,
                    action: a.clone(),
                });
                break 'blocks;
            }
        }
    }
    PropertyReport::verdict(Property::Wbd, player, witness)
}

/// Observation-level `(WBD)`: within each block of `ℐ^𝒪_i`, the members
/// entered from outside the block agree on whether they were entered from an
/// own decision node.
pub fn check_wbd_observed(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
) -> PropertyReport {
    PropertyReport::verdict(
        Property::WbdObserved,
        player,
        wbd_observed_witness(game, &induce_partition(game, obs, player), player),
    )
}

fn wbd_observed_witness(game: &GameTree, induced: &Partition, player: usize) -> Option<Witness> {
    for block in induced.blocks() {
        let entries: Vec<NodeId> = block
            .iter()
            .copied()
            .filter(|&h| game.parent(h).is_some_and(|p| !induced.same_block(p, h)))
            .collect();
        let from_acting = |h: NodeId| game.is_acting(game.parent(h).unwrap(), player);
        if let Some((g, h)) = same_block_pairs_first(&entries, from_acting) {
            let (a, o) = if from_acting(g) { (g, h) } else { (h, g) };
            return Some(Witness::EntryMismatch {
                from_acting: a,
                other: o,
            });
        }
    }
    None
}

/// Perfect recall: `𝒪^{ℐ^cl}` (partial coverage) satisfies `(CONS)`.
pub fn check_perfect_recall(
    game: &GameTree,
    classical: &ClassicalPartition,
    player: usize,
) -> PropertyReport {
    let obs = obs_from_partition(game, classical.players(), Variant::Set);
    let mut report = check_cons(game, &obs, classical, player);
    report.property = Property::Recall;
    report.witness = report.witness.map(|w| match w {
        Witness::Split { g, h } | Witness::Merge { g, h } => Witness::Recall { g, h },
        other => other,
    });
    report
}

/// Whether `player` can deduce `feature` on `subset` (default: all of `ℋ`).
pub fn can_deduce(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
    feature: &Feature,
    subset: Option<&dyn Fn(NodeId) -> bool>,
) -> PropertyReport {
    let induced = induce_partition(game, obs, player);
    let values = feature.values(game, obs, player);
    let in_h = |h: NodeId| subset.is_none_or(|f| f(h));
    let mut witness = None;
    'outer: for block in induced.blocks() {
        let members: Vec<NodeId> = block.iter().copied().filter(|&h| in_h(h)).collect();
        for &h in &members {
            let Some(v) = &values[h] else { continue };
            if let Some(&g) = members.iter().find(|&&g| values[g].as_ref() != Some(v)) {
                witness = Some(Witness::Undeducible {
                    feature: feature.name().to_string(),
                    g,
                    h,
                });
                break 'outer;
            }
        }
    }
    let mut report = PropertyReport::verdict(Property::Deduce, player, witness);
    report.note = Some(feature.name().to_string());
    report
}

/// Conjunction defining an observation-based model for one player.
pub fn check_observation_model(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
) -> PropertyReport {
    let acting = |h: NodeId| game.is_acting(h, player);
    let terminal = |h: NodeId| game.is_terminal(h);
    let mut parts: Vec<(&str, PropertyReport)> =
        vec![("wbd", check_wbd_observed(game, obs, player))];
    let features: [(Feature, Option<&dyn Fn(NodeId) -> bool>); 5] = [
        (Feature::OwnObservation, None),
        (Feature::IsMyTurn, None),
        (Feature::AvailableActions, Some(&acting)),
        (Feature::IsTerminal, None),
        (Feature::Utility, Some(&terminal)),
    ];
    for (f, subset) in &features {
        parts.push((f.name(), can_deduce(game, obs, player, f, *subset)));
    }
    match parts.into_iter().find(|(_, r)| !r.holds) {
        None => PropertyReport::verdict(Property::ObservationModel, player, None),
        Some((name, r)) => PropertyReport {
            property: Property::ObservationModel,
            player,
            holds: false,
            witness: r.witness,
            note: Some(name.to_string()),
        },
    }
}

/// Runs one property for every player.
pub fn check_all(
    property: Property,
    game: &GameTree,
    obs: &ObservationAssignment,
    classical: Option<&ClassicalPartition>,
) -> Vec<PropertyReport> {
    (1..=game.num_players())
        .map(|i| match property {
            Property::Cons => check_cons(
                game,
                obs,
                classical.expect("cons needs a classical partition"),
                i,
            ),
            Property::Aps => check_aps(game, obs, i),
            Property::Iso => check_iso(game, obs, i),
            Property::Tsip => check_tsip(game, obs, i),
            Property::Stab => check_stab(game, obs, i),
            Property::Wbd => {
                check_wbd(game, classical.expect("wbd needs a classical partition"), i)
            }
            Property::WbdObserved => check_wbd_observed(game, obs, i),
            Property::Recall => check_perfect_recall(
                game,
                classical.expect("recall needs a classical partition"),
                i,
            ),
            Property::Deduce => can_deduce(game, obs, i, &Feature::OwnObservation, None),
            Property::ObservationModel => check_observation_model(game, obs, i),
        })
        .collect()
}

/// Inputs needed to re-evaluate a witness from scratch.
pub struct RecheckContext<'a> {
    pub game: &'a GameTree,
    pub obs: Option<&'a ObservationAssignment>,
    pub classical: Option<&'a ClassicalPartition>,
    pub player: usize,
}

impl RecheckContext<'_> {
    fn vec(&self, h: NodeId) -> ObservationHistory {
        obs_history(
            self.game,
            self.obs.expect("witness needs observations"),
            self.player,
            h,
        )
    }

    fn vec_with(&self, obs: &ObservationAssignment, h: NodeId) -> ObservationHistory {
        obs_history(self.game, obs, self.player, h)
    }

    /// Induced partition grouped by explicit observation histories.
    fn explicit_partition(&self, obs: &ObservationAssignment) -> Partition {
        let mut ids: HashMap<ObservationHistory, usize> = HashMap::new();
        Partition::group_by(self.game.len(), self.game.nodes(), |h| {
            let next = ids.len();
            *ids.entry(self.vec_with(obs, h)).or_insert(next)
        })
    }
}

impl Witness {
    /// Re-evaluates the witness with explicit observation histories; true
    /// iff it still demonstrates a violation of `property`.
    pub fn recheck(&self, property: Property, ctx: &RecheckContext<'_>) -> bool {
        let game = ctx.game;
        let i = ctx.player;
        let cl = || {
            ctx.classical
                .expect("witness needs a classical partition")
                .player(i)
        };
        match (property, self) {
            (Property::Cons, Witness::Split { g, h }) => {
                game.is_acting(*g, i) && cl().same_block(*g, *h) && ctx.vec(*g) != ctx.vec(*h)
            }
            (Property::Cons, Witness::Merge { g, h }) => {
                game.is_acting(*g, i)
                    && game.is_acting(*h, i)
                    && !cl().same_block(*g, *h)
                    && ctx.vec(*g) == ctx.vec(*h)
            }
            (Property::Aps, Witness::Mixed { acting, other }) => {
                game.is_acting(*acting, i)
                    && !game.is_acting(*other, i)
                    && ctx.vec(*acting) == ctx.vec(*other)
            }
            (Property::Iso, Witness::MissingAction { h }) => {
                game.parent_action(*h).is_some_and(|(p, a)| {
                    game.is_acting(p, i)
                        && !ctx
                            .obs
                            .unwrap()
                            .get(i, *h)
                            .contains(&crate::observations::Token::Action(a.clone()))
                })
            }
            (Property::Tsip, Witness::TwoParents { g, h }) => {
                let (pg, ph) = (game.parent(*g).unwrap(), game.parent(*h).unwrap());
                let (vg, vh, vpg, vph) = (ctx.vec(*g), ctx.vec(*h), ctx.vec(pg), ctx.vec(ph));
                vg == vh && vpg != vg && vph != vh && vpg != vph
            }
            (Property::Tsip, Witness::Cycle { entries }) => {
                let k = entries.len();
                k >= 2
                    && (0..k).all(|x| {
                        let e = entries[x];
                        let next = entries[(x + 1) % k];
                        let p = game.parent(e).unwrap();
                        ctx.vec(p) != ctx.vec(e) && ctx.vec(p) == ctx.vec(next)
                    })
            }
            (Property::Stab, Witness::Unstable { g, h, merged }) => {
                let obs = ctx.obs.unwrap();
                let original = ctx.explicit_partition(obs);
                let star = star_obs(game, obs, i, &original);
                let joined = original.same_block(*g, *h);
                let rejoined = ctx.vec_with(&star, *g) == ctx.vec_with(&star, *h);
                joined == *merged && joined != rejoined
            }
            (Property::Wbd, Witness::NonUniform { into, away, action }) => {
                let succ = |h: NodeId| game.child(h, action).is_some_and(|c| game.is_acting(c, i));
                cl().same_block(*into, *away) && succ(*into) && !succ(*away)
            }
            (
                Property::WbdObserved | Property::ObservationModel,
                Witness::EntryMismatch { from_acting, other },
            ) => {
                let entered = |h: NodeId| game.parent(h).is_some_and(|p| ctx.vec(p) != ctx.vec(h));
                ctx.vec(*from_acting) == ctx.vec(*other)
                    && entered(*from_acting)
                    && entered(*other)
                    && game.is_acting(game.parent(*from_acting).unwrap(), i)
                    && !game.is_acting(game.parent(*other).unwrap(), i)
            }
            (Property::Recall, Witness::Recall { g, h }) => {
                cl().same_block(*g, *h)
                    && own_trace(game, ctx.classical.unwrap(), i, *g)
                        != own_trace(game, ctx.classical.unwrap(), i, *h)
            }
            (
                Property::Deduce | Property::ObservationModel,
                Witness::Undeducible { feature, g, h },
            ) => {
                // values are recomputed; the feature must be a built-in
                let f = builtin_feature(feature);
                let Some(f) = f else { return false };
                let vals = f.values(game, ctx.obs.unwrap(), i);
                ctx.vec(*g) == ctx.vec(*h) && vals[*h].is_some() && vals[*g] != vals[*h]
            }
            _ => false,
        }
    }
}

fn builtin_feature(name: &str) -> Option<Feature> {
    Some(match name {
        "utility" => Feature::Utility,
        "player_function" => Feature::PlayerFunction,
        "is_my_turn" => Feature::IsMyTurn,
        "available_actions" => Feature::AvailableActions,
        "is_terminal" => Feature::IsTerminal,
        "own_observation" => Feature::OwnObservation,
        "history_length" => Feature::HistoryLength,
        _ => return None,
    })
}

/// Sequence of (classical block, action) pairs at the player's own strict
/// ancestors.
pub fn own_trace(
    game: &GameTree,
    classical: &ClassicalPartition,
    player: usize,
    h: NodeId,
) -> Vec<(usize, ActionLabel)> {
    let path = game.path(h);
    path.windows(2)
        .filter(|w| game.is_acting(w[0], player))
        .map(|w| {
            let (_, a) = game.parent_action(w[1]).unwrap();
            (classical.block_of(player, w[0]).unwrap(), a.clone())
        })
        .collect()
}

/// Per-player verdicts of the three formulations of stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityVerdicts {
    pub tsip: bool,
    pub stab: bool,
    pub wbd_and_deduce: bool,
}

impl StabilityVerdicts {
    pub fn agree(&self) -> bool {
        self.tsip == self.stab && self.stab == self.wbd_and_deduce
    }
}

pub fn stability_verdicts(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
) -> StabilityVerdicts {
    StabilityVerdicts {
        tsip: check_tsip(game, obs, player).holds,
        stab: check_stab(game, obs, player).holds,
        wbd_and_deduce: check_wbd_observed(game, obs, player).holds
            && can_deduce(game, obs, player, &Feature::OwnObservation, None).holds,
    }
}

/// A (possibly minimized) instance exhibiting a failure.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub game: GameTree,
    pub obs: ObservationAssignment,
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub verdicts: Vec<StabilityVerdicts>,
    pub counterexample: Option<Counterexample>,
}

impl LemmaReport {
    pub fn agrees(&self) -> bool {
        self.verdicts.iter().all(StabilityVerdicts::agree)
    }
}

/// Evaluates TSIP, STAB and WBD ∧ deducibility of own observations for
/// each player; on disagreement returns a minimized counterexample.
pub fn verify_lemma_stab(game: &GameTree, obs: &ObservationAssignment) -> LemmaReport {
    let disagree = |g: &GameTree, o: &ObservationAssignment| {
        (1..=g.num_players()).any(|i| !stability_verdicts(g, o, i).agree())
    };
    let verdicts: Vec<StabilityVerdicts> = (1..=game.num_players())
        .map(|i| stability_verdicts(game, obs, i))
        .collect();
    let counterexample = verdicts
        .iter()
        .any(|v| !v.agree())
        .then(|| minimize(game, obs, disagree));
    LemmaReport {
        verdicts,
        counterexample,
    }
}

#[derive(Debug, Clone)]
pub struct ConjectureReport {
    /// APS, TSIP and STAB for every player.
    pub aps_tsip_stab: bool,
    /// Adding `𝒪^iso` leaves every induced partition unchanged.
    pub iso_redundant: bool,
    /// The restriction to acting histories is a valid classical partition
    /// with perfect recall, consistent with `𝒪`.
    pub classical_with_recall: bool,
    pub failures: Vec<String>,
    pub counterexample: Option<Counterexample>,
}

impl ConjectureReport {
    pub fn holds(&self) -> bool {
        self.aps_tsip_stab && self.iso_redundant && self.classical_with_recall
    }
}

fn conjecture_items(
    game: &GameTree,
    obs: &ObservationAssignment,
) -> (bool, bool, bool, Vec<String>) {
    let mut failures = Vec::new();
    let players = 1..=game.num_players();
    let mut item1 = true;
    for i in players.clone() {
        for r in [
            check_aps(game, obs, i),
            check_tsip(game, obs, i),
            check_stab(game, obs, i),
        ] {
            if !r.holds {
                item1 = false;
                failures.push(format!("player {i}: {} fails", r.property));
            }
        }
    }
    let with_iso = add_observations(obs, &iso_obs(game, obs.variant())).expect("same variant");
    let mut item2 = true;
    for i in players.clone() {
        if compare(
            &induce_partition(game, obs, i),
            &induce_partition(game, &with_iso, i),
        ) != Refinement::Equal
        {
            item2 = false;
            failures.push(format!(
                "player {i}: adding own-action observations refines the partition"
            ));
        }
    }
    let induced: Vec<Partition> = players
        .clone()
        .map(|i| induce_partition(game, obs, i))
        .collect();
    let item3 = match classical_from_induced(game, &induced) {
        Err(e) => {
            failures.push(format!("restriction is not a classical partition: {e}"));
            false
        }
        Ok(cl) => {
            let mut ok = true;
            for i in players {
                if !check_perfect_recall(game, &cl, i).holds {
                    ok = false;
                    failures.push(format!(
                        "player {i}: restricted partition lacks perfect recall"
                    ));
                }
                if !check_cons(game, obs, &cl, i).holds {
                    ok = false;
                    failures.push(format!(
                        "player {i}: observations inconsistent with the restriction"
                    ));
                }
            }
            ok
        }
    };
    (item1, item2, item3, failures)
}

fn is_observation_model(game: &GameTree, obs: &ObservationAssignment) -> Result<(), String> {
    for i in 1..=game.num_players() {
        let r = check_observation_model(game, obs, i);
        if !r.holds {
            return Err(format!(
                "player {i}: {} not satisfied",
                r.note.unwrap_or_default()
            ));
        }
    }
    Ok(())
}

/// Checks the three items of the conjecture on an observation-based model.
pub fn verify_conjecture(
    game: &GameTree,
    obs: &ObservationAssignment,
) -> Result<ConjectureReport, GameError> {
    is_observation_model(game, obs).map_err(GameError::NotObservationModel)?;
    let (a, b, c, failures) = conjecture_items(game, obs);
    let mut report = ConjectureReport {
        aps_tsip_stab: a,
        iso_redundant: b,
        classical_with_recall: c,
        failures,
        counterexample: None,
    };
    if !report.holds() {
        report.counterexample = Some(minimize(game, obs, |g, o| {
            is_observation_model(g, o).is_ok() && {
                let (a, b, c, _) = conjecture_items(g, o);
                !(a && b && c)
            }
        }));
    }
    Ok(report)
}

/// Carries observations over to a restricted tree.
pub fn restrict_obs(
    obs: &ObservationAssignment,
    map: &[Option<NodeId>],
    new_len: usize,
) -> ObservationAssignment {
    let mut out = ObservationAssignment::empty(obs.variant(), obs.num_players(), new_len);
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = *new {
            for i in 1..=obs.num_players() {
                out.set(i, new, obs.get(i, old).to_vec());
            }
        }
    }
    out
}

/// Greedy subtree deletion keeping `bad` true; best effort.
pub fn minimize(
    game: &GameTree,
    obs: &ObservationAssignment,
    bad: impl Fn(&GameTree, &ObservationAssignment) -> bool,
) -> Counterexample {
    let mut cur = Counterexample {
        game: game.clone(),
        obs: obs.clone(),
    };
    loop {
        let mut improved = false;
        // try deeper subtrees last so big cuts come first
        for cut in 1..cur.game.len() {
            let keep: Vec<bool> = cur
                .game
                .nodes()
                .map(|h| !cur.game.is_prefix(cut, h))
                .collect();
            let (g, map) = cur.game.restrict(&keep);
            let o = restrict_obs(&cur.obs, &map, g.len());
            if bad(&g, &o) {
                cur = Counterexample { game: g, obs: o };
                improved = true;
                break;
            }
        }
        if !improved {
            return cur;
        }
    }
}

/// Relation of an induced partition to a user-supplied target partition,
/// used to annotate immediate observability by hand.
pub fn compare_annotation(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
    target: &Partition,
) -> Refinement {
    compare(&induce_partition(game, obs, player), target)
}

/// Distinct observation histories per player, handy for reporting.
pub fn observation_history_count(
    game: &GameTree,
    obs: &ObservationAssignment,
    player: usize,
) -> usize {
    let hs = ObservationHistories::compute(game, obs, player);
    game.nodes()
        .map(|h| hs.id(h))
        .collect::<BTreeSet<_>>()
        .len()
}
