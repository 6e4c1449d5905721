//! GraphViz export. Blocks of a partition become clusters.

use std::fmt::Write;

use crate::game::{GameTree, NodeKind};
use crate::partitions::Partition;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn node_line(game: &GameTree, h: usize) -> String {
    let history = game.history(h).to_string();
    let label = if history.is_empty() {
        "∅".to_string()
    } else {
        history
    };
    let (shape, extra) = match game.node(h).kind() {
        NodeKind::Decision(i) => ("circle", format!("\\nP{i}")),
        NodeKind::Chance(_) => ("diamond", String::new()),
        NodeKind::Terminal(u) => {
            let us: Vec<String> = u
                .iter()
                .map(|x| crate::observations::canonical_number(*x))
                .collect();
            ("box", format!("\\n({})", us.join(", ")))
        }
    };
    format!("n{h} [label=\"{}{extra}\", shape={shape}];", escape(&label))
}

/// DOT for the tree; with a partition, each block of two or more histories
/// is drawn as a labelled cluster.
pub fn to_dot(game: &GameTree, partition: Option<&Partition>, title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(title)).unwrap();
    writeln!(out, "  node [fontsize=10];").unwrap();
    let mut clustered = vec![false; game.len()];
    if let Some(p) = partition {
        for (idx, block) in p.blocks().iter().enumerate() {
            if block.len() < 2 {
                continue;
            }
            writeln!(out, "  subgraph cluster_{idx} {{").unwrap();
            let label = p.label(idx, game);
            writeln!(
                out,
                "    label=\"{}\"; style=dashed;",
                escape(if label.is_empty() { "∅" } else { &label })
            )
            .unwrap();
            for &h in block {
                writeln!(out, "    {}", node_line(game, h)).unwrap();
                clustered[h] = true;
            }
            writeln!(out, "  }}").unwrap();
        }
    }
    for h in game.nodes().filter(|&h| !clustered[h]) {
        writeln!(out, "  {}", node_line(game, h)).unwrap();
    }
    for h in game.nodes() {
        for (a, c) in game.children(h) {
            writeln!(out, "  n{h} -> n{c} [label=\"{}\"];", escape(a.as_str())).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RawGame;

    #[test]
    fn single_node() {
        let mut raw = RawGame::new(1);
        raw.terminal("", &[1.0]);
        let game = raw.build().unwrap();
        let dot = to_dot(&game, None, "g");
        assert_eq!(dot.matches("shape=").count(), 1);
        assert!(!dot.contains("->"));
    }

    #[test]
    fn clusters_blocks() {
        let mut raw = RawGame::new(1);
        raw.chance("", &[("x", 0.5), ("y", 0.5)])
            .terminal("x", &[0.0])
            .terminal("y", &[1.0]);
        let game = raw.build().unwrap();
        let p = Partition::from_blocks(3, vec![vec![0], vec![1, 2]]).unwrap();
        let dot = to_dot(&game, Some(&p), "g");
        assert_eq!(dot.matches("subgraph cluster_").count(), 1);
        assert_eq!(dot.matches("->").count(), 2);
    }
}
