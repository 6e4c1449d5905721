//! Example domains with golden verdicts, and seeded random generators for
//! the property harnesses.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{validate_classical, ClassicalPartition, GameTree, NodeId, PlayerId, RawGame};
use crate::observations::{iso_cl_obs, ObservationAssignment, Token, Variant};
use crate::properties::{check_all, check_observation_model, Feature, Property};
use crate::transforms::coarse_model;

/// An expected verdict. `player: None` means "for every player".
#[derive(Debug, Clone, PartialEq)]
pub struct Golden {
    /// Name of the observation assignment, `None` for classical-only checks.
    pub obs: Option<String>,
    pub property: Property,
    pub player: Option<usize>,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub game: GameTree,
    pub classical: Option<ClassicalPartition>,
    pub observations: Vec<(String, ObservationAssignment)>,
    pub goldens: Vec<Golden>,
}

impl CorpusEntry {
    fn new(name: impl Into<String>, game: GameTree, classical: ClassicalPartition) -> Self {
        CorpusEntry {
            name: name.into(),
            game,
            classical: Some(classical),
            observations: Vec::new(),
            goldens: Vec::new(),
        }
    }

    fn with_obs(mut self, name: &str, obs: ObservationAssignment) -> Self {
        self.observations.push((name.to_string(), obs));
        self
    }

    fn expect(
        mut self,
        obs: Option<&str>,
        player: Option<usize>,
        checks: &[(Property, bool)],
    ) -> Self {
        for &(property, holds) in checks {
            self.goldens.push(Golden {
                obs: obs.map(str::to_string),
                property,
                player,
                holds,
            });
        }
        self
    }

    /// Adds both iso+cl variants under the names `iso_cl_set` / `iso_cl_seq`.
    fn with_iso_cl(self) -> Self {
        let cl = self.classical.clone().expect("classical partition");
        let set = iso_cl_obs(&self.game, &cl, Variant::Set);
        let seq = iso_cl_obs(&self.game, &cl, Variant::Sequence);
        self.with_obs("iso_cl_set", set).with_obs("iso_cl_seq", seq)
    }

    pub fn obs(&self, name: &str) -> Option<&ObservationAssignment> {
        self.observations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
    }

    /// Re-runs every golden; returns a description of each mismatch.
    pub fn verify(&self) -> Vec<String> {
        let mut mismatches = Vec::new();
        for golden in &self.goldens {
            let empty;
            let obs = match &golden.obs {
                Some(name) => match self.obs(name) {
                    Some(o) => o,
                    None => {
                        mismatches.push(format!(
                            "{}: unknown observation assignment {name}",
                            self.name
                        ));
                        continue;
                    }
                },
                None => {
                    empty = ObservationAssignment::for_game(Variant::Set, &self.game);
                    &empty
                }
            };
            let reports = check_all(golden.property, &self.game, obs, self.classical.as_ref());
            let actual = match golden.player {
                Some(i) => reports[i - 1].holds,
                None => reports.iter().all(|r| r.holds),
            };
            if actual != golden.holds {
                mismatches.push(format!(
                    "{}: {} on {} for player {} expected {}, got {}",
                    self.name,
                    golden.property,
                    golden.obs.as_deref().unwrap_or("classical model"),
                    golden.player.map_or("*".to_string(), |i| i.to_string()),
                    golden.holds,
                    actual
                ));
            }
        }
        mismatches
    }
}

/// Builds a classical partition from explicit blocks per player (index 0 =
/// player 1); acting histories left out become singletons.
fn classical(game: &GameTree, blocks: &[&[&[&str]]]) -> ClassicalPartition {
    let mut raw = Vec::new();
    for i in 1..=game.num_players() {
        let explicit: Vec<Vec<NodeId>> = blocks
            .get(i - 1)
            .map(|bs| {
                bs.iter()
                    .map(|b| {
                        b.iter()
                            .map(|p| game.id_of(p).expect("corpus path"))
                            .collect()
                    })
                    .collect()
            })
            .unwrap_or_default();
        let covered: Vec<NodeId> = explicit.iter().flatten().copied().collect();
        let mut pb = explicit;
        pb.extend(
            game.acting_nodes(i)
                .into_iter()
                .filter(|h| !covered.contains(h))
                .map(|h| vec![h]),
        );
        raw.push(pb);
    }
    validate_classical(game, raw).expect("corpus classical partition is valid")
}

fn sneaking_raw(modified: bool) -> RawGame {
    let mut raw = RawGame::new(2);
    let sloppy = if modified {
        "sloppy approach noop"
    } else {
        "sloppy approach"
    };
    raw.decision("", 2)
        .decision("alert", 1)
        .decision("sloppy", 1)
        .decision("alert approach", 2);
    if modified {
        raw.chance("sloppy approach", &[("noop", 1.0)]);
    }
    raw.decision(sloppy, 1);
    raw.terminal(&format!("{sloppy} quiet"), &[1.0, -1.0])
        .terminal(&format!("{sloppy} loud"), &[-1.0, 1.0]);
    for (guard, quiet) in [("guard", -1.0), ("chase", 1.0)] {
        let h = format!("alert approach {guard}");
        raw.decision(&h, 1);
        raw.terminal(&format!("{h} quiet"), &[quiet, -quiet])
            .terminal(&format!("{h} loud"), &[-quiet, quiet]);
    }
    raw
}

/// P2 is alert or sloppy (hidden from P1); P1 approaches, and a sloppy
/// guard lets P1 strike immediately while an alert one reacts first.
pub fn sneaking_game() -> CorpusEntry {
    let game = sneaking_raw(false).build().unwrap();
    let cl = classical(
        &game,
        &[&[
            &["alert", "sloppy"],
            &[
                "sloppy approach",
                "alert approach guard",
                "alert approach chase",
            ],
        ]],
    );
    CorpusEntry::new("sneaking", game, cl)
        .with_iso_cl()
        .expect(
            None,
            Some(1),
            &[(Property::Wbd, false), (Property::Recall, true)],
        )
        .expect(Some("iso_cl_set"), Some(1), &[(Property::Cons, false)])
        .expect(
            Some("iso_cl_seq"),
            Some(1),
            &[
                (Property::Cons, true),
                (Property::Aps, true),
                (Property::Stab, false),
                (Property::Tsip, false),
                (Property::WbdObserved, false),
            ],
        )
}

/// The sneaking game with one dummy chance node after (sloppy approach).
pub fn sneaking_game_modified() -> CorpusEntry {
    let game = sneaking_raw(true).build().unwrap();
    let cl = classical(
        &game,
        &[&[
            &["alert", "sloppy"],
            &[
                "sloppy approach noop",
                "alert approach guard",
                "alert approach chase",
            ],
        ]],
    );
    let all = [
        (Property::Cons, true),
        (Property::Aps, true),
        (Property::Iso, true),
        (Property::Stab, true),
        (Property::Tsip, true),
    ];
    CorpusEntry::new("sneaking_modified", game, cl)
        .with_iso_cl()
        .expect(
            None,
            None,
            &[(Property::Wbd, true), (Property::Recall, true)],
        )
        .expect(Some("iso_cl_set"), None, &all)
        .expect(Some("iso_cl_seq"), None, &all)
}

/// Perfect information: P1 moves, P2 branches twice in a row, P1 moves last.
pub fn iso_fail_game() -> CorpusEntry {
    let mut raw = RawGame::new(2);
    raw.decision("", 1).decision("go", 2);
    for x in ["l", "r"] {
        raw.decision(&format!("go {x}"), 2);
        for y in ["l", "r"] {
            let h = format!("go {x} {y}");
            raw.decision(&h, 1)
                .terminal(&format!("{h} stop"), &[0.0, 0.0]);
        }
    }
    let game = raw.build().unwrap();
    let cl = ClassicalPartition::singletons(&game);
    let ok = [
        (Property::Cons, true),
        (Property::Stab, true),
        (Property::Aps, true),
    ];
    CorpusEntry::new("iso_fail", game, cl)
        .with_iso_cl()
        .expect(
            None,
            None,
            &[(Property::Recall, true), (Property::Wbd, true)],
        )
        .expect(Some("iso_cl_set"), None, &ok)
        .expect(Some("iso_cl_seq"), None, &ok)
}

/// Chance chains of different lengths lead into one P1 infoset.
pub fn no_finest_game() -> CorpusEntry {
    let mut raw = RawGame::new(1);
    raw.chance("", &[("p", 0.5), ("q", 0.5)])
        .chance("p", &[("n", 1.0)])
        .chance("p n", &[("n", 1.0)])
        .decision("p n n", 1)
        .terminal("p n n go", &[1.0])
        .chance("q", &[("n", 1.0)])
        .chance("q n", &[("n", 1.0)])
        .chance("q n n", &[("n", 1.0)])
        .decision("q n n n", 1)
        .terminal("q n n n go", &[0.0]);
    let game = raw.build().unwrap();
    let cl = classical(&game, &[&[&["p n n", "q n n n"]]]);
    CorpusEntry::new("no_finest", game, cl).expect(
        None,
        None,
        &[(Property::Recall, true), (Property::Wbd, true)],
    )
}

/// Two paths of different length into P1's second infoset; every valid
/// augmented partition must be thick.
pub fn thick_infoset_game() -> CorpusEntry {
    let mut raw = RawGame::new(1);
    raw.chance("", &[("p", 0.5), ("q", 0.5)])
        .decision("p", 1)
        .decision("q", 1)
        .chance("p a", &[("n", 1.0)])
        .chance("p a n", &[("n", 1.0)])
        .decision("p a n n", 1)
        .terminal("p a n n x", &[1.0])
        .chance("q a", &[("n", 1.0)])
        .decision("q a n", 1)
        .terminal("q a n x", &[0.0])
        .decision("p b", 1)
        .terminal("p b y", &[0.0])
        .terminal("q b", &[1.0]);
    let game = raw.build().unwrap();
    let cl = classical(&game, &[&[&["p", "q"], &["p a n n", "q a n"]]]);
    CorpusEntry::new("thick_infoset", game, cl).expect(
        None,
        None,
        &[(Property::Wbd, false), (Property::Recall, true)],
    )
}

/// Chance picks branch `k`; its first node reveals `t1..tk`, the shared P1
/// infoset reveals the rest `t(k+1)..tN`. Size `3N+1`.
pub fn padding_game(n: usize) -> CorpusEntry {
    assert!(n >= 1, "padding needs at least one branch");
    let mut raw = RawGame::new(1);
    let p = 1.0 / n as f64;
    let labels: Vec<String> = (1..=n).map(|k| format!("k{k}")).collect();
    let mut dist: Vec<(&str, f64)> = labels.iter().map(|l| (l.as_str(), p)).collect();
    let last = dist.len() - 1;
    dist[last].1 = 1.0 - p * last as f64;
    raw.chance("", &dist);
    for l in &labels {
        raw.chance(l, &[("n", 1.0)])
            .decision(&format!("{l} n"), 1)
            .terminal(&format!("{l} n go"), &[0.0]);
    }
    let game = raw.build().unwrap();
    let acting: Vec<String> = labels.iter().map(|l| format!("{l} n")).collect();
    let block: Vec<&str> = acting.iter().map(String::as_str).collect();
    let cl = classical(&game, &[&[&block]]);
    let mut obs = ObservationAssignment::for_game(Variant::Sequence, &game);
    let t = |j: usize| Token::symbol(format!("t{j}"));
    for (k, l) in labels.iter().enumerate() {
        let k = k + 1;
        obs.set(1, game.id_of(l).unwrap(), (1..=k).map(t).collect());
        obs.set(
            1,
            game.id_of(&format!("{l} n")).unwrap(),
            (k + 1..=n).map(t).collect(),
        );
    }
    CorpusEntry::new(format!("padding({n})"), game, cl)
        .with_obs("padding", obs)
        .expect(
            Some("padding"),
            Some(1),
            &[(Property::Stab, n == 1), (Property::Cons, true)],
        )
}

fn unfair_mp_raw(forgetful: bool) -> RawGame {
    let mut raw = RawGame::new(2);
    raw.chance("", &[("order12", 0.5), ("order21", 0.5)])
        .decision("order12", 1)
        .decision("order21", 2);
    let coins = ["Heads", "Tails"];
    for (order, second) in [("order12", 2), ("order21", 1)] {
        for x in coins {
            raw.decision(&format!("{order} {x}"), second);
            for y in coins {
                let h = format!("{order} {x} {y}");
                let u = if x == y { 1.0 } else { -1.0 };
                if forgetful && order == "order12" {
                    raw.decision(&h, 1).terminal(&format!("{h} end"), &[u, -u]);
                } else {
                    raw.terminal(&h, &[u, -u]);
                }
            }
        }
    }
    raw
}

fn unfair_mp_classical(game: &GameTree, forgetful: bool) -> ClassicalPartition {
    let p1_end: &[&str] = &[
        "order12 Heads Heads",
        "order12 Heads Tails",
        "order12 Tails Heads",
        "order12 Tails Tails",
    ];
    let p1: Vec<&[&str]> = if forgetful {
        vec![&["order12", "order21 Tails"], &["order21 Heads"], p1_end]
    } else {
        vec![&["order12", "order21 Tails"], &["order21 Heads"]]
    };
    classical(
        game,
        &[&p1, &[&["order21", "order12 Tails"], &["order12 Heads"]]],
    )
}

/// Chance picks who moves first; the referee tells the second mover when the
/// first chose Heads. Matching pays (+1, −1).
pub fn unfair_matching_pennies() -> CorpusEntry {
    let game = unfair_mp_raw(false).build().unwrap();
    let cl = unfair_mp_classical(&game, false);
    let coarse = coarse_model(&game, &cl, Variant::Set)
        .expect("perfect recall")
        .obs
        .unwrap();
    let all = [
        (Property::ObservationModel, true),
        (Property::Cons, true),
        (Property::Aps, true),
        (Property::Iso, true),
        (Property::Stab, true),
        (Property::Tsip, true),
    ];
    CorpusEntry::new("unfair_mp", game, cl)
        .with_obs("coarse", coarse)
        .with_iso_cl()
        .expect(
            None,
            None,
            &[(Property::Recall, true), (Property::Wbd, true)],
        )
        .expect(Some("coarse"), None, &all)
}

/// Whether `player` was betrayed: defined once they have moved, `1` iff
/// they moved first and chose Heads. `None` unless `game` has the unfair
/// matching pennies shape.
pub fn betrayal_feature(game: &GameTree, player: usize) -> Option<Feature> {
    let first = match player {
        1 => "order12",
        2 => "order21",
        _ => return None,
    };
    game.id_of(first).ok()?;
    game.id_of(&format!("{first} Heads")).ok()?;
    let values = game
        .nodes()
        .map(|h| {
            let moved = game
                .path(h)
                .windows(2)
                .any(|w| game.is_acting(w[0], player));
            moved.then(|| {
                let a = game.history(h).actions();
                let betrayed = a[0].as_str() == first && a[1].as_str() == "Heads";
                if betrayed { "1" } else { "0" }.to_string()
            })
        })
        .collect();
    Some(Feature::Custom {
        name: "betrayed".into(),
        values,
    })
}

/// Unfair matching pennies with a final P1 move that forgets P1's coin.
pub fn unfair_mp_forgetful() -> CorpusEntry {
    let game = unfair_mp_raw(true).build().unwrap();
    let cl = unfair_mp_classical(&game, true);
    CorpusEntry::new("unfair_mp_forgetful", game, cl)
        .expect(None, Some(1), &[(Property::Recall, false)])
        .expect(None, Some(2), &[(Property::Recall, true)])
}

/// The referee draws and reveals a card; P1 then P2 bet or give up. With
/// eyes open P2 sees the card when drawn, otherwise only at their turn.
pub fn betting_game(eyes_closed: bool) -> CorpusEntry {
    let mut raw = RawGame::new(2);
    raw.chance("", &[("A", 0.5), ("B", 0.5)]);
    for card in ["A", "B"] {
        raw.decision(card, 1);
        let win = if card == "A" { 1.0 } else { -1.0 };
        for first in ["bet", "giveup"] {
            let h = format!("{card} {first}");
            raw.decision(&h, 2);
            for second in ["bet", "giveup"] {
                let u = match (first, second) {
                    ("bet", "bet") => 2.0 * win,
                    ("bet", "giveup") => 1.0,
                    ("giveup", "bet") => -1.0,
                    _ => 0.0,
                };
                raw.terminal(&format!("{h} {second}"), &[u, -u]);
            }
        }
    }
    let game = raw.build().unwrap();
    let cl = ClassicalPartition::singletons(&game);
    let mut obs = iso_cl_obs(&game, &cl, Variant::Set);
    if !eyes_closed {
        for card in ["A", "B"] {
            obs.push(
                2,
                game.id_of(card).unwrap(),
                Token::symbol(format!("card_{card}")),
            );
        }
    }
    let name = if eyes_closed {
        "betting_closed"
    } else {
        "betting_open"
    };
    CorpusEntry::new(name, game, cl)
        .with_obs("observed", obs)
        .expect(Some("observed"), None, &[(Property::Cons, true)])
}

/// Two private cards from {J, Q}, then two rounds of bet/check for P1 and P2.
pub fn mini_poker() -> CorpusEntry {
    let mut raw = RawGame::new(2);
    raw.chance("", &[("J", 0.5), ("Q", 0.5)]);
    let rank = |c: &str| if c == "Q" { 1 } else { 0 };
    for c1 in ["J", "Q"] {
        raw.chance(c1, &[("J", 0.5), ("Q", 0.5)]);
        for c2 in ["J", "Q"] {
            let deal = format!("{c1} {c2}");
            let mut frontier = vec![(deal, 0usize, [1.0f64, 1.0])];
            while let Some((h, depth, pot)) = frontier.pop() {
                if depth == 4 {
                    let u = match rank(c1).cmp(&rank(c2)) {
                        std::cmp::Ordering::Greater => pot[1],
                        std::cmp::Ordering::Less => -pot[0],
                        std::cmp::Ordering::Equal => 0.0,
                    };
                    raw.terminal(&h, &[u, -u]);
                    continue;
                }
                let mover = depth % 2;
                raw.decision(&h, mover + 1);
                for a in ["bet", "check"] {
                    let mut next = pot;
                    if a == "bet" {
                        next[mover] += 1.0;
                    }
                    frontier.push((format!("{h} {a}"), depth + 1, next));
                }
            }
        }
    }
    let game = raw.build().unwrap();
    // each player knows their own card and the betting so far
    let mut raw_cl: Vec<Vec<Vec<NodeId>>> = vec![Vec::new(), Vec::new()];
    for i in 1..=2 {
        let mut groups: std::collections::BTreeMap<(String, Vec<String>), Vec<NodeId>> =
            Default::default();
        for h in game.acting_nodes(i) {
            let acts: Vec<String> = game
                .history(h)
                .actions()
                .iter()
                .map(|a| a.to_string())
                .collect();
            let card = acts[i - 1].clone();
            groups
                .entry((card, acts[2..].to_vec()))
                .or_default()
                .push(h);
        }
        raw_cl[i - 1] = groups.into_values().collect();
    }
    let cl = validate_classical(&game, raw_cl).unwrap();
    let coarse = coarse_model(&game, &cl, Variant::Set)
        .expect("perfect recall")
        .obs
        .unwrap();
    CorpusEntry::new("mini_poker", game, cl)
        .with_obs("coarse", coarse)
        .expect(
            None,
            None,
            &[(Property::Recall, true), (Property::Wbd, true)],
        )
        .expect(
            Some("coarse"),
            None,
            &[
                (Property::ObservationModel, true),
                (Property::Cons, true),
                (Property::Tsip, true),
            ],
        )
}

/// Histories along the always-bet line of [`mini_poker`] for the given deal.
pub fn mini_poker_bet_line(game: &GameTree, c1: &str, c2: &str) -> Vec<NodeId> {
    let mut path = vec![String::new(), c1.to_string(), format!("{c1} {c2}")];
    for _ in 0..4 {
        path.push(format!("{} bet", path.last().unwrap()));
    }
    path.iter().map(|p| game.id_of(p).unwrap()).collect()
}

/// Every fixed entry plus `padding(2..=4)`.
pub fn all_entries() -> Vec<CorpusEntry> {
    let mut out = vec![
        sneaking_game(),
        sneaking_game_modified(),
        iso_fail_game(),
        no_finest_game(),
        thick_infoset_game(),
        unfair_matching_pennies(),
        unfair_mp_forgetful(),
        betting_game(false),
        betting_game(true),
        mini_poker(),
    ];
    out.extend((1..=4).map(padding_game));
    out
}

pub const NAMES: &[&str] = &[
    "sneaking",
    "sneaking_modified",
    "iso_fail",
    "no_finest",
    "thick_infoset",
    "padding(N)",
    "unfair_mp",
    "unfair_mp_forgetful",
    "betting_open",
    "betting_closed",
    "mini_poker",
];

pub fn by_name(name: &str) -> Option<CorpusEntry> {
    Some(match name {
        "sneaking" => sneaking_game(),
        "sneaking_modified" => sneaking_game_modified(),
        "iso_fail" => iso_fail_game(),
        "no_finest" => no_finest_game(),
        "thick_infoset" => thick_infoset_game(),
        "unfair_mp" | "unfair_matching_pennies" => unfair_matching_pennies(),
        "unfair_mp_forgetful" => unfair_mp_forgetful(),
        "betting_open" => betting_game(false),
        "betting_closed" => betting_game(true),
        "mini_poker" => mini_poker(),
        _ => {
            let n: usize = name
                .strip_prefix("padding(")?
                .strip_suffix(')')?
                .parse()
                .ok()?;
            if n == 0 || n > 64 {
                return None;
            }
            padding_game(n)
        }
    })
}

/// Shape parameters for random trees.
#[derive(Debug, Clone, Copy)]
pub struct RandomConfig {
    pub max_nodes: usize,
    pub num_players: usize,
    /// Probability that a history gets random symbol tokens.
    pub richness: f64,
    /// Fixed variant, or random per instance.
    pub variant: Option<Variant>,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_nodes: 30,
            num_players: 2,
            richness: 0.4,
            variant: None,
        }
    }
}

const LABELS: [&str; 3] = ["a", "b", "c"];

/// Random tree: frontier histories are expanded in random order while the
/// node budget lasts. Actions are prefixes of `a b c`; chance is uniform;
/// utilities are integers in `-2..=2`.
pub fn random_tree(rng: &mut ChaCha8Rng, max_nodes: usize, num_players: usize) -> GameTree {
    assert!((1..=64).contains(&max_nodes), "max_nodes must be in 1..=64");
    let mut raw = RawGame::new(num_players);
    let mut frontier = vec![String::new()];
    let mut count = 1;
    while !frontier.is_empty() {
        let h = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        let k = *[1usize, 2, 2, 3].choose(rng).unwrap();
        let expand = count + k <= max_nodes && (h.is_empty() || rng.gen_bool(0.75));
        if !expand {
            let u: Vec<f64> = (0..num_players)
                .map(|_| rng.gen_range(-2..=2) as f64)
                .collect();
            raw.terminal(&h, &u);
            continue;
        }
        let child = |a: &str| {
            if h.is_empty() {
                a.to_string()
            } else {
                format!("{h} {a}")
            }
        };
        if rng.gen_bool(0.25) {
            let p = 1.0 / k as f64;
            let mut dist: Vec<(&str, f64)> = LABELS[..k].iter().map(|a| (*a, p)).collect();
            dist[k - 1].1 = 1.0 - p * (k - 1) as f64;
            raw.chance(&h, &dist);
        } else {
            raw.decision(&h, rng.gen_range(1..=num_players));
        }
        for a in &LABELS[..k] {
            frontier.push(child(a));
        }
        count += k;
    }
    raw.build().expect("generated trees are valid")
}

/// A random tree with random observations: symbol noise, optionally mixed
/// with own-action tokens and turn markers.
pub fn random_instance(seed: u64, cfg: &RandomConfig) -> (GameTree, ObservationAssignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let game = random_tree(&mut rng, cfg.max_nodes, cfg.num_players);
    let variant = cfg.variant.unwrap_or_else(|| {
        if rng.gen_bool(0.5) {
            Variant::Set
        } else {
            Variant::Sequence
        }
    });
    let with_iso = rng.gen_bool(0.5);
    let with_turn = rng.gen_bool(0.5);
    let mut obs = ObservationAssignment::for_game(variant, &game);
    for h in game.nodes() {
        for i in 1..=game.num_players() {
            if with_iso {
                if let Some((p, a)) = game.parent_action(h) {
                    if game.is_acting(p, i) {
                        obs.push(i, h, Token::Action(a.clone()));
                    }
                }
            }
            if with_turn && game.is_acting(h, i) {
                obs.push(i, h, Token::symbol("turn"));
            }
            if rng.gen_bool(cfg.richness) {
                for _ in 0..rng.gen_range(1..=2) {
                    obs.push(i, h, Token::symbol(format!("s{}", rng.gen_range(0..3))));
                }
            }
        }
    }
    (game, obs)
}

/// A random tree with a random classical partition. With `perfect_recall`,
/// acting histories are grouped only within classes of equal own-trace and
/// action set; otherwise only action sets must agree.
pub fn random_classical(
    seed: u64,
    cfg: &RandomConfig,
    perfect_recall: bool,
) -> (GameTree, ClassicalPartition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let game = random_tree(&mut rng, cfg.max_nodes, cfg.num_players);
    let mut block_of: Vec<Option<usize>> = vec![None; game.len()];
    let mut blocks: Vec<Vec<Vec<NodeId>>> = vec![Vec::new(); game.num_players()];
    // per player: class key -> block indices
    let mut classes: Vec<HashMap<(Vec<(usize, String)>, usize), Vec<usize>>> =
        vec![HashMap::new(); game.num_players()];
    for h in game.nodes() {
        let Some(PlayerId::Player(i)) = game.player(h) else {
            continue;
        };
        let trace: Vec<(usize, String)> = if perfect_recall {
            let path = game.path(h);
            path.windows(2)
                .filter(|w| game.is_acting(w[0], i))
                .map(|w| {
                    (
                        block_of[w[0]].unwrap(),
                        game.parent_action(w[1]).unwrap().1.to_string(),
                    )
                })
                .collect()
        } else {
            Vec::new()
        };
        let key = (trace, game.children(h).len());
        let candidates = classes[i - 1].entry(key).or_default();
        // absent-mindedness is impossible with traces; without them, avoid
        // joining a block that contains an ancestor
        let usable: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&b| !blocks[i - 1][b].iter().any(|&g| game.is_prefix(g, h)))
            .collect();
        let b = if !usable.is_empty() && rng.gen_bool(0.6) {
            *usable.choose(&mut rng).unwrap()
        } else {
            blocks[i - 1].push(Vec::new());
            let b = blocks[i - 1].len() - 1;
            candidates.push(b);
            b
        };
        blocks[i - 1][b].push(h);
        block_of[h] = Some(b);
    }
    let cl = validate_classical(&game, blocks).expect("generated partitions are valid");
    (game, cl)
}

/// A random observation-based model: the coarse model of a random
/// perfect-recall game, plus symbol noise kept only if the result is still
/// an observation-based model.
pub fn random_observation_model(
    seed: u64,
    cfg: &RandomConfig,
) -> (GameTree, ObservationAssignment) {
    let (game, cl) = random_classical(seed, cfg, true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let variant = cfg.variant.unwrap_or_else(|| {
        if rng.gen_bool(0.5) {
            Variant::Set
        } else {
            Variant::Sequence
        }
    });
    let model = coarse_model(&game, &cl, variant).expect("generated games have perfect recall");
    let (game, base) = (model.game, model.obs.unwrap());
    let mut noisy = base.clone();
    for h in game.nodes() {
        for i in 1..=game.num_players() {
            if rng.gen_bool(cfg.richness / 2.0) {
                noisy.push(i, h, Token::symbol(format!("s{}", rng.gen_range(0..3))));
            }
        }
    }
    let ok = (1..=game.num_players()).all(|i| check_observation_model(&game, &noisy, i).holds);
    (game, if ok { noisy } else { base })
}
