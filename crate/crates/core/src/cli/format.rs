//! The JSON game file: tree, optional classical infosets, optional
//! observations. Canonical output has sorted keys and histories.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::game::{
    validate_classical, ActionLabel, ClassicalPartition, GameTree, History, PlayerId, RawGame,
    RawNode,
};
use crate::observations::{ObservationAssignment, Token, Variant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub h: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chance: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilities: Option<Vec<f64>>,
}

/// `{"variant": "set"|"seq", "<player>": {"<history>": ["<token>", …]}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationsEntry {
    pub variant: String,
    #[serde(flatten)]
    pub players: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: usize,
    pub nodes: Vec<NodeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_infosets: Option<BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<ObservationsEntry>,
}

/// A parsed and validated game file.
#[derive(Debug, Clone)]
pub struct Model {
    pub game: GameTree,
    pub classical: Option<ClassicalPartition>,
    pub obs: Option<ObservationAssignment>,
}

fn player_key(key: &str, players: usize) -> Result<usize, String> {
    match key.parse::<usize>() {
        Ok(i) if (1..=players).contains(&i) => Ok(i),
        _ => Err(format!("unknown player key {key:?}")),
    }
}

impl GameFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed game file: {e}"))
    }

    /// Canonical pretty JSON (keys sorted by the `serde_json` map type).
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("game files serialize");
        let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn from_model(
        game: &GameTree,
        classical: Option<&ClassicalPartition>,
        obs: Option<&ObservationAssignment>,
    ) -> Self {
        let raw = game.to_raw();
        let nodes = raw
            .nodes
            .iter()
            .map(|n| NodeEntry {
                h: n.history.to_string(),
                player: n.player.map(|p| p.to_string()),
                chance: n
                    .chance
                    .as_ref()
                    .map(|d| d.iter().map(|(a, p)| (a.to_string(), *p)).collect()),
                utilities: n.utilities.clone(),
            })
            .collect();
        let classical_infosets = classical.map(|cl| {
            cl.players()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let blocks = p
                        .blocks()
                        .iter()
                        .map(|b| b.iter().map(|&h| game.history(h).to_string()).collect())
                        .collect();
                    ((i + 1).to_string(), blocks)
                })
                .collect()
        });
        let observations = obs.map(|o| ObservationsEntry {
            variant: o.variant().name().to_string(),
            players: (1..=o.num_players())
                .map(|i| {
                    let per: BTreeMap<String, Vec<String>> = game
                        .nodes()
                        .filter(|&h| !o.get(i, h).is_empty())
                        .map(|h| {
                            (
                                game.history(h).to_string(),
                                o.get(i, h).iter().map(Token::to_string).collect(),
                            )
                        })
                        .collect();
                    (i.to_string(), per)
                })
                .collect(),
        });
        GameFile {
            players: game.num_players(),
            nodes,
            classical_infosets,
            observations,
        }
    }

    pub fn to_model(&self) -> Result<Model, String> {
        let mut errors = Vec::new();
        let mut raw = RawGame::new(self.players);
        for n in &self.nodes {
            let history = match History::parse(&n.h) {
                Ok(h) => h,
                Err(e) => {
                    errors.push(e.to_string());
                    continue;
                }
            };
            let player = match n.player.as_deref() {
                None => None,
                Some("c") => Some(PlayerId::Chance),
                Some(s) => match s.parse::<usize>() {
                    Ok(i) => Some(PlayerId::Player(i)),
                    Err(_) => {
                        errors.push(format!("history {:?}: bad player {s:?}", n.h));
                        continue;
                    }
                },
            };
            let chance = match &n.chance {
                None => None,
                Some(d) => {
                    let mut dist = BTreeMap::new();
                    for (a, p) in d {
                        match ActionLabel::new(a.clone()) {
                            Ok(a) => {
                                dist.insert(a, *p);
                            }
                            Err(e) => errors.push(e.to_string()),
                        }
                    }
                    Some(dist)
                }
            };
            raw.nodes.push(RawNode {
                history,
                player,
                chance,
                utilities: n.utilities.clone(),
            });
        }
        if !errors.is_empty() {
            return Err(errors.join("; "));
        }
        let game = raw.build().map_err(|e| e.to_string())?;

        let classical = match &self.classical_infosets {
            None => None,
            Some(map) => {
                let mut blocks = vec![Vec::new(); self.players];
                for (key, bs) in map {
                    let i = player_key(key, self.players)?;
                    for b in bs {
                        let ids: Result<Vec<_>, _> = b.iter().map(|p| game.id_of(p)).collect();
                        blocks[i - 1].push(ids.map_err(|e| e.to_string())?);
                    }
                }
                Some(validate_classical(&game, blocks).map_err(|e| e.to_string())?)
            }
        };

        let obs = match &self.observations {
            None => None,
            Some(entry) => {
                let variant = match entry.variant.as_str() {
                    "set" => Variant::Set,
                    "seq" => Variant::Sequence,
                    v => return Err(format!("unknown observation variant {v:?}")),
                };
                let mut obs = ObservationAssignment::for_game(variant, &game);
                for (key, per) in &entry.players {
                    let i = player_key(key, self.players)?;
                    for (path, tokens) in per {
                        let h = game.id_of(path).map_err(|e| e.to_string())?;
                        let tokens: Result<Vec<Token>, String> =
                            tokens.iter().map(|t| Token::parse(t)).collect();
                        obs.set(i, h, tokens?);
                    }
                }
                Some(obs)
            }
        };
        Ok(Model {
            game,
            classical,
            obs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn round_trip_is_canonical() {
        for entry in corpus::all_entries() {
            let obs = entry.observations.first().map(|(_, o)| o);
            let file = GameFile::from_model(&entry.game, entry.classical.as_ref(), obs);
            let text = file.to_json();
            let model = GameFile::parse(&text).unwrap().to_model().unwrap();
            assert_eq!(model.game, entry.game);
            assert_eq!(model.classical, entry.classical);
            assert_eq!(model.obs.as_ref(), obs);
            let again =
                GameFile::from_model(&model.game, model.classical.as_ref(), model.obs.as_ref())
                    .to_json();
            assert_eq!(again, text);
        }
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{"players": 1, "nodes": [{"h": "", "utilities": [0]}], "extra": 1}"#;
        assert!(GameFile::parse(text).is_err());
        let text = r#"{"players": 1, "nodes": [{"h": "", "utilities": [0], "colour": "red"}]}"#;
        assert!(GameFile::parse(text).is_err());
        let text = r#"{"players": 1, "nodes": [{"h": "", "utilities": [0]}], "observations": {"variant": "set", "7": {}}}"#;
        assert!(GameFile::parse(text).unwrap().to_model().is_err());
    }

    #[test]
    fn validation_errors_are_listed() {
        let text = r#"{"players": 1, "nodes": [{"h": "a b", "utilities": [0]}, {"h": "", "player": "1"}]}"#;
        let err = GameFile::parse(text).unwrap().to_model().unwrap_err();
        assert!(err.contains("prefix not closed"), "{err}");
    }
}
