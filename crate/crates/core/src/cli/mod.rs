//! Command-line driver. Exit codes: 0 pass, 1 property failure, 2 input
//! error, 3 internal assertion.

pub mod dot;
pub mod format;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{self, RandomConfig};
use crate::error::GameError;
use crate::game::{ClassicalPartition, GameTree};
use crate::observations::{
    classical_obs, iso_cl_obs, iso_obs, obs_history, ObservationAssignment, Variant,
};
use crate::partitions::{enumerate_max_refinements, induce_all, public_states, DEFAULT_NODE_LIMIT};
use crate::properties::{
    can_deduce, check_all, verify_conjecture, verify_lemma_stab, Feature, Property,
};
use crate::transforms::{
    coarse_model, repair_wbd, stable_modification, transport_obs, ModificationResult,
};

use format::GameFile;
use report::ReportFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gamecheck",
    about = "Check observation-based models of imperfect-information games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Set,
    Seq,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Set => Variant::Set,
            VariantArg::Seq => Variant::Sequence,
        }
    }
}

#[derive(Debug, Args)]
struct ObsArgs {
    /// Observation assignment: a corpus name, `file`, or builtin:iso+cl|builtin:cl|builtin:iso.
    #[arg(long)]
    obs: Option<String>,
    /// Variant for builtin observations; reinterprets others.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    Stabilize,
    RepairWbd,
    Coarse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShowKind {
    Partitions,
    Public,
    Tree,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check properties of a model.
    Check {
        /// Path to a game file, or corpus:NAME.
        file: String,
        #[arg(long)]
        player: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "cons,aps,iso,tsip,stab")]
        properties: Vec<String>,
        /// Feature for the `deduce` property: a built-in name or `betrayed`.
        #[arg(long, default_value = "own_observation")]
        feature: String,
        #[command(flatten)]
        obs: ObsArgs,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Apply a transformation and write the new game file.
    Transform {
        file: String,
        #[arg(value_enum)]
        kind: TransformKind,
        #[command(flatten)]
        obs: ObsArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render partitions, public states or the tree.
    Show {
        file: String,
        #[arg(value_enum)]
        what: ShowKind,
        #[arg(long)]
        player: Option<usize>,
        #[command(flatten)]
        obs: ObsArgs,
        /// Also write GraphViz output here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Randomized harnesses and exhaustive enumeration.
    Harness {
        #[arg(long, group = "mode")]
        lemma_stab: bool,
        #[arg(long, group = "mode")]
        conjecture: bool,
        /// Enumerate maximal refinements for the given file.
        #[arg(long, group = "mode", value_name = "FILE")]
        enumerate: Option<String>,
        /// Master seed (defaults to $GAMECHECK_SEED, then 0).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Tree size for random instances, or the enumeration node limit.
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        player: Option<usize>,
        /// Directory for minimized counterexamples.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Failure modes mapped to exit codes.
#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

/// A loaded model with its named observation assignments.
struct Loaded {
    name: String,
    game: GameTree,
    classical: Option<ClassicalPartition>,
    observations: Vec<(String, ObservationAssignment)>,
}

fn load(spec: &str) -> Result<Loaded, CliError> {
    if let Some(name) = spec.strip_prefix("corpus:") {
        let entry = corpus::by_name(name).ok_or_else(|| {
            CliError::Input(format!(
                "unknown corpus entry {name:?}; known: {}",
                corpus::NAMES.join(", ")
            ))
        })?;
        return Ok(Loaded {
            name: spec.to_string(),
            game: entry.game,
            classical: entry.classical,
            observations: entry.observations,
        });
    }
    let text =
        std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    let model = GameFile::parse(&text)
        .and_then(|f| f.to_model())
        .map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    Ok(Loaded {
        name: spec.to_string(),
        game: model.game,
        classical: model.classical,
        observations: model
            .obs
            .into_iter()
            .map(|o| ("file".to_string(), o))
            .collect(),
    })
}

impl Loaded {
    fn classical(&self) -> Result<&ClassicalPartition, CliError> {
        self.classical
            .as_ref()
            .ok_or_else(|| CliError::Input(format!("{} has no classical infosets", self.name)))
    }

    /// Resolves `--obs/--variant`; `None` when nothing is available.
    fn obs(&self, args: &ObsArgs) -> Result<Option<(String, ObservationAssignment)>, CliError> {
        let variant = args.variant.map(Variant::from);
        let builtin = |kind: &str| -> Result<ObservationAssignment, CliError> {
            let v = variant.unwrap_or(Variant::Set);
            Ok(match kind {
                "iso+cl" => iso_cl_obs(&self.game, self.classical()?, v),
                "cl" => classical_obs(&self.game, self.classical()?, false, v),
                "iso" => iso_obs(&self.game, v),
                other => {
                    return Err(CliError::Input(format!(
                        "unknown builtin observations {other:?}"
                    )))
                }
            })
        };
        let picked = match args.obs.as_deref() {
            Some(spec) => match spec.strip_prefix("builtin:") {
                Some(kind) => return Ok(Some((spec.to_string(), builtin(kind)?))),
                None => self
                    .observations
                    .iter()
                    .find(|(n, _)| n == spec)
                    .cloned()
                    .ok_or_else(|| {
                        CliError::Input(format!("{} has no observations named {spec:?}", self.name))
                    })?,
            },
            None => match self.observations.first() {
                Some(first) => first.clone(),
                None => return Ok(None),
            },
        };
        let (name, obs) = picked;
        Ok(Some(match variant {
            Some(v) if v != obs.variant() => (name, obs.with_variant(v)),
            _ => (name, obs),
        }))
    }

    fn require_obs(&self, args: &ObsArgs) -> Result<(String, ObservationAssignment), CliError> {
        self.obs(args)?.ok_or_else(|| {
            CliError::Input(format!("{} has no observations; pass --obs", self.name))
        })
    }
}

fn check_player(game: &GameTree, player: Option<usize>) -> Result<Vec<usize>, CliError> {
    match player {
        None => Ok((1..=game.num_players()).collect()),
        Some(i) if (1..=game.num_players()).contains(&i) => Ok(vec![i]),
        Some(i) => Err(CliError::Input(format!(
            "player {i} out of range 1..={}",
            game.num_players()
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    out: &mut dyn Write,
    file: &str,
    player: Option<usize>,
    properties: &[String],
    feature: &str,
    obs_args: &ObsArgs,
    report_out: Option<&Path>,
    json: bool,
) -> CliResult {
    let model = load(file)?;
    let players = check_player(&model.game, player)?;
    let mut props = Vec::new();
    for p in properties {
        props.push(
            Property::parse(p.trim())
                .ok_or_else(|| CliError::Input(format!("unknown property {p:?}")))?,
        );
    }
    let needs_obs = props
        .iter()
        .any(|p| !matches!(p, Property::Wbd | Property::Recall));
    let needs_cl = props
        .iter()
        .any(|p| matches!(p, Property::Cons | Property::Wbd | Property::Recall));
    let classical = if needs_cl {
        Some(model.classical()?)
    } else {
        model.classical.as_ref()
    };
    let obs = if needs_obs {
        Some(model.require_obs(obs_args)?)
    } else {
        model.obs(obs_args)?
    };
    let empty = ObservationAssignment::for_game(Variant::Set, &model.game);
    let o = obs.as_ref().map_or(&empty, |(_, o)| o);
    if o.check_shape(&model.game).is_err() {
        return Err(CliError::Input("observations do not match the game".into()));
    }
    let mut reports = Vec::new();
    for p in &props {
        if *p == Property::Deduce {
            for &i in &players {
                let f = match Feature::parse(feature) {
                    Some(f) => f,
                    None if feature == "betrayed" => corpus::betrayal_feature(&model.game, i)
                        .ok_or_else(|| {
                            CliError::Input(
                                "`betrayed` needs the unfair matching pennies tree".into(),
                            )
                        })?,
                    None => return Err(CliError::Input(format!("unknown feature {feature:?}"))),
                };
                reports.push(can_deduce(&model.game, o, i, &f, None));
            }
            continue;
        }
        let all = check_all(*p, &model.game, o, classical);
        reports.extend(all.into_iter().filter(|r| players.contains(&r.player)));
    }
    let file_report = ReportFile::new(
        &model.name,
        obs.as_ref().map(|(n, _)| n.as_str()),
        &model.game,
        obs.as_ref().map(|(_, o)| o),
        classical,
        &reports,
    );
    if json {
        out.write_all(file_report.to_json().as_bytes())?;
    } else {
        out.write_all(file_report.to_text().as_bytes())?;
    }
    if let Some(path) = report_out {
        std::fs::write(path, file_report.to_json())?;
    }
    Ok(if file_report.all_hold {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn cmd_transform(
    out: &mut dyn Write,
    file: &str,
    kind: TransformKind,
    obs_args: &ObsArgs,
    dest: Option<&Path>,
) -> CliResult {
    let model = load(file)?;
    let game = &model.game;
    let mut bound = None;
    let result: ModificationResult = match kind {
        TransformKind::Stabilize => {
            // The construction is defined for sequence observations only, so
            // that is the default reinterpretation here.
            let args = ObsArgs {
                obs: obs_args.obs.clone(),
                variant: Some(obs_args.variant.unwrap_or(VariantArg::Seq)),
            };
            let (_, obs) = model.require_obs(&args)?;
            if obs.variant() != Variant::Sequence {
                return Err(CliError::Input(
                    "stabilize needs sequence-variant observations (--variant seq)".into(),
                ));
            }
            let blocks: usize = induce_all(game, &obs).iter().map(|p| p.len()).sum();
            bound = Some(game.len() + game.len() * blocks);
            let mut r = match stable_modification(game, &obs) {
                Ok(r) => r,
                Err(e @ GameError::SizeBound { .. }) => {
                    return Err(CliError::Internal(e.to_string()))
                }
                Err(e) => return Err(CliError::Input(e.to_string())),
            };
            if let Some(cl) = &model.classical {
                r.classical = Some(crate::transforms::transport_classical(
                    cl,
                    &r.embedding,
                    &r.game,
                ));
            }
            r
        }
        TransformKind::RepairWbd => {
            let mut r = repair_wbd(game, model.classical()?);
            if let Some((_, obs)) = model.obs(obs_args)? {
                r.obs = Some(transport_obs(&obs, &r.embedding, r.game.len()));
            }
            r
        }
        TransformKind::Coarse => {
            let variant = obs_args.variant.map_or(Variant::Set, Variant::from);
            coarse_model(game, model.classical()?, variant)
                .map_err(|e| CliError::Input(e.to_string()))?
        }
    };
    let text = GameFile::from_model(&result.game, result.classical.as_ref(), result.obs.as_ref())
        .to_json();
    let embedding: std::collections::BTreeMap<String, String> = game
        .nodes()
        .map(|h| {
            (
                game.history(h).to_string(),
                result.game.history(result.embedding[h]).to_string(),
            )
        })
        .collect();
    let summary = serde_json::json!({
        "added_nodes": result.added,
        "nodes_before": game.len(),
        "nodes_after": result.game.len(),
        "size_bound": bound,
        "embedding": embedding,
    });
    match dest {
        Some(path) => {
            std::fs::write(path, text)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary).unwrap())?;
        }
        None => {
            out.write_all(text.as_bytes())?;
            eprintln!("added_nodes={}", result.added);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_show(
    out: &mut dyn Write,
    file: &str,
    what: ShowKind,
    player: Option<usize>,
    obs_args: &ObsArgs,
    dot_path: Option<&Path>,
) -> CliResult {
    let model = load(file)?;
    let game = &model.game;
    let label = |h: usize| format!("({})", game.history(h));
    let dot = match what {
        ShowKind::Tree => {
            for h in game.nodes() {
                let kind = match game.player(h) {
                    Some(p) => format!("player {p}"),
                    None => {
                        let u: Vec<String> = game
                            .utilities(h)
                            .unwrap()
                            .iter()
                            .map(|x| crate::observations::canonical_number(*x))
                            .collect();
                        format!("leaf [{}]", u.join(", "))
                    }
                };
                writeln!(out, "{}  {kind}", label(h))?;
            }
            dot::to_dot(game, None, &model.name)
        }
        ShowKind::Partitions => {
            let (name, obs) = model.require_obs(obs_args)?;
            let players = check_player(game, player)?;
            let parts = induce_all(game, &obs);
            writeln!(out, "observations: {name} ({})", obs.variant().name())?;
            for &i in &players {
                let p = &parts[i - 1];
                writeln!(out, "player {i}: {} blocks", p.len())?;
                for (idx, block) in p.blocks().iter().enumerate() {
                    let members: Vec<String> = block.iter().map(|&h| label(h)).collect();
                    writeln!(
                        out,
                        "  [{}] {}  observes {}",
                        idx,
                        members.join(" "),
                        obs_history(game, &obs, i, block[0])
                    )?;
                }
            }
            dot::to_dot(
                game,
                Some(&parts[players[0] - 1]),
                &format!("{} player {}", model.name, players[0]),
            )
        }
        ShowKind::Public => {
            let (name, obs) = model.require_obs(obs_args)?;
            let public = public_states(game.len(), &induce_all(game, &obs));
            writeln!(out, "observations: {name}")?;
            writeln!(out, "public states: {}", public.len())?;
            for (idx, block) in public.blocks().iter().enumerate() {
                let members: Vec<String> = block.iter().map(|&h| label(h)).collect();
                writeln!(out, "  [{idx}] {}", members.join(" "))?;
            }
            dot::to_dot(
                game,
                Some(&public),
                &format!("{} public states", model.name),
            )
        }
    };
    if let Some(path) = dot_path {
        std::fs::write(path, dot)?;
    }
    Ok(EXIT_OK)
}

fn default_seed() -> u64 {
    std::env::var("GAMECHECK_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Per-instance seed derived from the master seed, independent of order.
fn instance_seed(master: u64, k: u64) -> u64 {
    let mut x = master ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[allow(clippy::too_many_arguments)]
fn cmd_harness(
    out: &mut dyn Write,
    lemma: bool,
    conjecture: bool,
    enumerate: Option<&str>,
    seed: Option<u64>,
    count: u64,
    max_nodes: Option<usize>,
    player: Option<usize>,
    dir: &Path,
) -> CliResult {
    if let Some(file) = enumerate {
        let model = load(file)?;
        let cl = model.classical()?;
        let limit = max_nodes.unwrap_or(DEFAULT_NODE_LIMIT);
        for i in check_player(&model.game, player)? {
            let maximal = enumerate_max_refinements(&model.game, cl, i, limit)
                .map_err(|e| CliError::Input(e.to_string()))?;
            writeln!(out, "player {i}: {} maximal partitions", maximal.len())?;
            for (k, p) in maximal.iter().enumerate() {
                let blocks: Vec<String> = p
                    .blocks()
                    .iter()
                    .map(|b| {
                        let hs: Vec<String> = b
                            .iter()
                            .map(|&h| format!("({})", model.game.history(h)))
                            .collect();
                        format!("{{{}}}", hs.join(" "))
                    })
                    .collect();
                writeln!(out, "  #{k}: {}", blocks.join(" "))?;
            }
        }
        return Ok(EXIT_OK);
    }
    if !lemma && !conjecture {
        return Err(CliError::Input(
            "choose one of --lemma-stab, --conjecture, --enumerate".into(),
        ));
    }
    let master = seed.unwrap_or_else(default_seed);
    let max_nodes = max_nodes.unwrap_or(30);
    if !(1..=64).contains(&max_nodes) {
        return Err(CliError::Input("--max-nodes must be in 1..=64".into()));
    }
    let mut violations = 0;
    for k in 0..count {
        let s = instance_seed(master, k);
        let cfg = RandomConfig {
            max_nodes,
            num_players: 2 + (s % 2) as usize,
            ..RandomConfig::default()
        };
        let cx = if lemma {
            let (game, obs) = corpus::random_instance(s, &cfg);
            verify_lemma_stab(&game, &obs).counterexample
        } else {
            let (game, obs) = corpus::random_observation_model(s, &cfg);
            match verify_conjecture(&game, &obs) {
                Ok(r) => r.counterexample,
                Err(e) => {
                    return Err(CliError::Internal(format!(
                        "generator produced a non-model: {e}"
                    )))
                }
            }
        };
        if let Some(cx) = cx {
            violations += 1;
            let path = dir.join(format!("counterexample_{master}_{k}.json"));
            std::fs::write(
                &path,
                GameFile::from_model(&cx.game, None, Some(&cx.obs)).to_json(),
            )?;
            writeln!(
                out,
                "violation at instance {k} (seed {s}); minimized to {}",
                path.display()
            )?;
        }
    }
    let mode = if lemma { "lemma-stab" } else { "conjecture" };
    writeln!(
        out,
        "harness {mode}: seed={master} instances={count} violations={violations}"
    )?;
    Ok(if violations == 0 { EXIT_OK } else { EXIT_FAIL })
}

/// Runs the CLI on `args` (including the program name), writing to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Check {
            file,
            player,
            properties,
            feature,
            obs,
            out: report_out,
            json,
        } => cmd_check(
            out,
            file,
            *player,
            properties,
            feature,
            obs,
            report_out.as_deref(),
            *json,
        ),
        Command::Transform {
            file,
            kind,
            obs,
            out: dest,
        } => cmd_transform(out, file, *kind, obs, dest.as_deref()),
        Command::Show {
            file,
            what,
            player,
            obs,
            dot,
        } => cmd_show(out, file, *what, *player, obs, dot.as_deref()),
        Command::Harness {
            lemma_stab,
            conjecture,
            enumerate,
            seed,
            count,
            max_nodes,
            player,
            out: dir,
        } => cmd_harness(
            out,
            *lemma_stab,
            *conjecture,
            enumerate.as_deref(),
            *seed,
            *count,
            *max_nodes,
            *player,
            dir,
        ),
    };
    finish(result, out)
}

fn finish(result: CliResult, out: &mut dyn Write) -> i32 {
    match result {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            EXIT_INPUT
        }
        Err(CliError::Internal(msg)) => {
            let _ = writeln!(out, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}
