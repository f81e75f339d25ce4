//! Graphviz rendering of a transition graph.

use ixsys::analyzer::TransitionGraph;
use ixsys::{ActionSpace, HistorylessSystem, State};

/// Letters when every node has at most 26 actions (`a` is action 0),
/// otherwise the tuple form.
fn name(space: &ActionSpace, state: &State) -> String {
    if space.sizes().iter().all(|&k| k <= 26) {
        state.iter().map(|&x| (b'a' + x as u8) as char).collect()
    } else {
        state.to_string()
    }
}

/// One line per state and one per labelled edge, sorted so that the output
/// depends only on the graph.
pub fn export_dot(graph: &TransitionGraph<'_, HistorylessSystem>) -> String {
    let system = graph.system();
    let space = system.space();
    let label = |v: u64| name(space, &space.decode(v));
    let mut lines: Vec<String> = (0..graph.state_count() as u64)
        .map(|v| format!("  \"{}\";", label(v)))
        .collect();
    lines.extend(
        graph
            .edges()
            .map(|(a, s, b)| format!("  \"{}\" -> \"{}\" [label=\"{s}\"];", label(a), label(b))),
    );
    lines.sort();
    let mut out = String::from("digraph transitions {\n");
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ixsys::reductions::fixture;

    #[test]
    fn fig1_contains_the_swap_edge() {
        let sys = fixture("fig1", None).unwrap().into_system().unwrap();
        let g = TransitionGraph::build(&sys).unwrap();
        let dot = export_dot(&g);
        assert!(dot.contains("  \"ab\" -> \"ba\" [label=\"{1,2}\"];\n"), "{dot}");
        assert_eq!(dot.lines().count(), 2 + 4 + 16);
        assert_eq!(dot, export_dot(&g));
    }

    #[test]
    fn single_state_identity() {
        let sys = HistorylessSystem::identity(ActionSpace::uniform(1, 1).unwrap());
        let g = TransitionGraph::build(&sys).unwrap();
        assert_eq!(
            export_dot(&g),
            "digraph transitions {\n  \"a\" -> \"a\" [label=\"{1}\"];\n  \"a\" -> \"a\" [label=\"{}\"];\n  \"a\";\n}\n"
        );
    }
}
