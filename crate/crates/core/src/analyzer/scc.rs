//! Iterative Tarjan over implicit graphs with a fixed out-degree.

pub(crate) const UNSEEN: u32 = u32::MAX;

pub(crate) struct Components {
    /// Component id per node, `UNSEEN` if no root reaches it. Ids are in
    /// reverse topological order: an edge `u -> w` across components has
    /// `comp[w] < comp[u]`.
    pub comp: Vec<u32>,
    pub count: u32,
}

impl Components {
    /// Members grouped by component, each group sorted ascending.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut groups = vec![Vec::new(); self.count as usize];
        for (v, &c) in self.comp.iter().enumerate() {
            if c != UNSEEN {
                groups[c as usize].push(v as u32);
            }
        }
        groups
    }
}

/// `edge(v, j)` for `j < degree` is the `j`-th out-edge of `v`, or `None`
/// if that slot is absent.
pub(crate) fn tarjan<R, E>(size: usize, degree: usize, roots: R, mut edge: E) -> Components
where
    R: IntoIterator<Item = u32>,
    E: FnMut(u32, usize) -> Option<u32>,
{
    let mut index = vec![UNSEEN; size];
    let mut low = vec![0u32; size];
    let mut comp = vec![UNSEEN; size];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next = 0u32;
    let mut count = 0u32;

    for root in roots {
        if index[root as usize] != UNSEEN {
            continue;
        }
        index[root as usize] = next;
        low[root as usize] = next;
        next += 1;
        stack.push(root);
        call.push((root, 0));
        while let Some(&(v, j)) = call.last() {
            if j < degree {
                call.last_mut().expect("nonempty").1 += 1;
                let Some(w) = edge(v, j) else { continue };
                let wi = w as usize;
                if index[wi] == UNSEEN {
                    index[wi] = next;
                    low[wi] = next;
                    next += 1;
                    stack.push(w);
                    call.push((w, 0));
                } else if comp[wi] == UNSEEN {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u as usize] = low[u as usize].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    loop {
                        let w = stack.pop().expect("v is on the stack");
                        comp[w as usize] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    Components { comp, count }
}
