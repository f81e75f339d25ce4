use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ActionSpace, HistorylessSystem};

/// AS `from` does not announce `route` to neighbor `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportDeny {
    pub from: usize,
    pub to: usize,
    pub route: Vec<usize>,
}

/// ASes are numbered `1..=ases`; the destination is `0`. `routes[i - 1]`
/// ranks the permitted routes of AS `i`, best first. A route lists the
/// hops from the AS itself down to `0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgpInstance {
    pub ases: usize,
    pub links: Vec<(usize, usize)>,
    pub routes: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub deny: Vec<ExportDeny>,
}

impl BgpInstance {
    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.links
            .iter()
            .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    fn validate(&self) -> Result<()> {
        if self.ases == 0 {
            return Err(invalid("a BGP instance needs at least one AS"));
        }
        if self.routes.len() != self.ases {
            return Err(invalid(format!(
                "{} route rankings for {} ASes",
                self.routes.len(),
                self.ases
            )));
        }
        for &(u, v) in &self.links {
            if u > self.ases || v > self.ases || u == v {
                return Err(invalid(format!("bad link ({u},{v})")));
            }
        }
        for (k, ranking) in self.routes.iter().enumerate() {
            let i = k + 1;
            for (r, route) in ranking.iter().enumerate() {
                if route.first() != Some(&i) || route.last() != Some(&0) {
                    return Err(invalid(format!(
                        "route {route:?} of AS {i} must start at {i} and end at 0"
                    )));
                }
                let mut seen = route.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != route.len() {
                    return Err(invalid(format!("route {route:?} of AS {i} is not simple")));
                }
                if route.windows(2).any(|h| !self.adjacent(h[0], h[1])) {
                    return Err(invalid(format!("route {route:?} of AS {i} skips a link")));
                }
                if ranking[..r].contains(route) {
                    return Err(invalid(format!("route {route:?} of AS {i} is ranked twice")));
                }
            }
        }
        Ok(())
    }

    fn exports(&self, from: usize, to: usize, route: &[usize]) -> bool {
        !self
            .deny
            .iter()
            .any(|d| d.from == from && d.to == to && d.route == route)
    }
}

/// Node `i - 1` is AS `i`. Its action `r < len` is its `r`-th ranked route;
/// the last action is the empty route.
pub fn build_bgp(instance: &BgpInstance) -> Result<HistorylessSystem> {
    instance.validate()?;
    let space = ActionSpace::new(instance.routes.iter().map(|r| r.len() + 1).collect())?;
    let inst = instance.clone();
    Ok(HistorylessSystem::from_node_rule(space, move |node, a| {
        let i = node + 1;
        let ranking = &inst.routes[node];
        let available = |route: &Vec<usize>| {
            let next = route[1];
            if next == 0 {
                return route.len() == 2;
            }
            let theirs = inst.routes[next - 1].get(a[next - 1]);
            theirs.is_some_and(|r| !r.contains(&i) && r[..] == route[1..] && inst.exports(next, i, r))
        };
        ranking
            .iter()
            .position(available)
            .unwrap_or(ranking.len())
    }))
}
