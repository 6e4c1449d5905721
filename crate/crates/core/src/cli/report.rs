//! Machine (JSON) and human renderings of property reports.

use serde::Serialize;

use crate::game::{ClassicalPartition, GameTree};
use crate::observations::{obs_from_partition, obs_history, ObservationAssignment, Variant};
use crate::properties::{Property, PropertyReport};

#[derive(Debug, Clone, Serialize)]
pub struct WitnessHistory {
    pub history: String,
    /// Observation history under the checked assignment (or the one the
    /// classical partition induces, for classical-only properties).
    pub observation_history: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessEntry {
    pub description: String,
    pub histories: Vec<WitnessHistory>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEntry {
    pub property: String,
    pub player: usize,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub game: String,
    pub observations: Option<String>,
    pub all_hold: bool,
    pub reports: Vec<ReportEntry>,
}

impl ReportFile {
    pub fn new(
        game_name: &str,
        obs_name: Option<&str>,
        game: &GameTree,
        obs: Option<&ObservationAssignment>,
        classical: Option<&ClassicalPartition>,
        reports: &[PropertyReport],
    ) -> Self {
        let entries = reports
            .iter()
            .map(|r| {
                let witness = r.witness.as_ref().map(|w| {
                    let shown = match r.property {
                        Property::Wbd | Property::Recall => {
                            classical.map(|cl| obs_from_partition(game, cl.players(), Variant::Set))
                        }
                        _ => obs.cloned(),
                    };
                    WitnessEntry {
                        description: w.describe(game),
                        histories: w
                            .histories()
                            .into_iter()
                            .map(|h| WitnessHistory {
                                history: game.history(h).to_string(),
                                observation_history: shown
                                    .as_ref()
                                    .map(|o| obs_history(game, o, r.player, h).to_string()),
                            })
                            .collect(),
                    }
                });
                ReportEntry {
                    property: r.property.name().to_string(),
                    player: r.player,
                    verdict: if r.holds { "holds" } else { "fails" },
                    note: r.note.clone(),
                    witness,
                }
            })
            .collect();
        ReportFile {
            game: game_name.to_string(),
            observations: obs_name.map(str::to_string),
            all_hold: reports.iter().all(|r| r.holds),
            reports: entries,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("game: {}\n", self.game);
        if let Some(o) = &self.observations {
            out.push_str(&format!("observations: {o}\n"));
        }
        for r in &self.reports {
            let note = r
                .note
                .as_ref()
                .map(|n| format!(" [{n}]"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{:<10} player {}  {}{note}\n",
                r.property,
                r.player,
                r.verdict.to_uppercase()
            ));
            if let Some(w) = &r.witness {
                out.push_str(&format!("    {}\n", w.description));
                for h in &w.histories {
                    match &h.observation_history {
                        Some(v) => out.push_str(&format!("    ({}) observes {v}\n", h.history)),
                        None => out.push_str(&format!("    ({})\n", h.history)),
                    }
                }
            }
        }
        out.push_str(if self.all_hold {
            "result: all properties hold\n"
        } else {
            "result: some properties fail\n"
        });
        out
    }
}
