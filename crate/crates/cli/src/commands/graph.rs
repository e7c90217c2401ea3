use anyhow::{Context, Result};
use serde_json::json;

use gradient_core::graph::TransitionGraph;

use super::{parse_emotion, print_json};
use crate::args::GraphCommand;
use crate::{backends, Ctx};

pub fn run(cmd: GraphCommand, ctx: &Ctx) -> Result<()> {
    match cmd {
        GraphCommand::Export { graph, out } => {
            let g = backends::graph(graph.as_deref(), &ctx.config)?;
            match out {
                Some(path) => std::fs::write(&path, g.to_json())
                    .with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{}", g.to_json());
                    Ok(())
                }
            }
        }
        GraphCommand::Validate { file } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let g = TransitionGraph::load(&text)
                .with_context(|| format!("{} is not a valid transition graph", file.display()))?;
            print_json(&json!({
                "valid": true,
                "nodes": g.node_count(),
                "edges": g.edge_count(),
                "acyclic": g.is_acyclic(),
            }))
        }
        GraphCommand::Suggest {
            emotion,
            graph,
            json,
        } => {
            let g = backends::graph(graph.as_deref(), &ctx.config)?;
            let src = parse_emotion(&emotion)?;
            let suggestions = g.targets_of(src);
            if json {
                return print_json(&json!({"source": src, "suggestions": suggestions}));
            }
            if suggestions.is_empty() {
                println!("{src} has no outgoing transitions");
            }
            let width = suggestions
                .iter()
                .map(|s| s.target.name().len())
                .max()
                .unwrap_or(0);
            for s in suggestions {
                println!(
                    "{:<width$}  {:>2}  {}",
                    s.target.name(),
                    s.hops,
                    s.rationale.label()
                );
            }
            Ok(())
        }
    }
}
