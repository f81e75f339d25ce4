use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ActionSpace, HistorylessSystem};

/// Undirected friendship graph over users `0..users`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialGraph {
    pub users: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Action 0 is X, action 1 is Y. A user picks X when at least half of its
/// friends use X; users without friends always pick X.
pub fn build_majority(graph: &SocialGraph) -> Result<HistorylessSystem> {
    let mut friends = vec![Vec::new(); graph.users];
    for &(u, v) in &graph.edges {
        if u >= graph.users || v >= graph.users {
            return Err(invalid(format!("edge ({u},{v}) names a missing user")));
        }
        if u == v {
            return Err(invalid(format!("self-loop at user {u}")));
        }
        if !friends[u].contains(&v) {
            friends[u].push(v);
            friends[v].push(u);
        }
    }
    let space = ActionSpace::uniform(graph.users, 2)?;
    Ok(HistorylessSystem::from_node_rule(space, move |i, a| {
        let xs = friends[i].iter().filter(|&&j| a[j] == 0).count();
        usize::from(2 * xs < friends[i].len())
    }))
}
