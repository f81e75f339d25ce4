use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{ActionSpace, HistorylessSystem, State};

/// Node expansions allowed in one snake search.
pub const DEFAULT_SNAKE_BUDGET: u64 = 200_000_000;

const MAX_DIMENSION: usize = 7;

/// A chordless cycle in the `dimension`-cube. Vertex bit `dimension - 1 - i`
/// is coordinate `i`, so numeric order is lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snake {
    pub dimension: usize,
    pub vertices: Vec<u32>,
}

impl Snake {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vertices.contains(&v)
    }

    pub fn position(&self, v: u32) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }

    /// The same cycle with every vertex XORed by `mask`.
    pub fn relabeled(&self, mask: u32) -> Snake {
        Snake {
            dimension: self.dimension,
            vertices: self.vertices.iter().map(|v| v ^ mask).collect(),
        }
    }

    /// Rotates the cycle so that `v` comes first.
    fn starting_at(mut self, v: u32) -> Snake {
        if let Some(p) = self.position(v) {
            self.vertices.rotate_left(p);
        }
        self
    }
}

fn adjacent(u: u32, v: u32) -> bool {
    (u ^ v).count_ones() == 1
}

/// Simple, closed under single-bit steps, and without chords.
pub fn is_snake(dimension: usize, vertices: &[u32]) -> bool {
    let m = vertices.len();
    if m < 4 || dimension >= 32 || vertices.iter().any(|&v| v >> dimension != 0) {
        return false;
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != m {
        return false;
    }
    (0..m).all(|i| {
        (0..m).all(|j| {
            let neighbours = (i + 1) % m == j || (j + 1) % m == i;
            adjacent(vertices[i], vertices[j]) == neighbours
        })
    })
}

struct Search {
    z: usize,
    budget: u64,
    spent: u64,
    /// Path vertices adjacent to each vertex.
    touch: Vec<u8>,
    on_path: Vec<bool>,
    path: Vec<u32>,
    best: Vec<u32>,
}

impl Search {
    fn push(&mut self, v: u32) {
        self.on_path[v as usize] = true;
        self.path.push(v);
        for b in 0..self.z {
            self.touch[(v ^ 1 << b) as usize] += 1;
        }
    }

    fn pop(&mut self) {
        let v = self.path.pop().expect("nonempty");
        self.on_path[v as usize] = false;
        for b in 0..self.z {
            self.touch[(v ^ 1 << b) as usize] -= 1;
        }
    }

    /// `used` is the number of dimensions touched so far; a fresh dimension
    /// may only be the next unused one.
    fn extend(&mut self, used: usize) -> Result<()> {
        self.spent += 1;
        if self.spent > self.budget {
            return Err(Error::BudgetExceeded {
                what: "snake search expansions",
                size: self.spent as u128,
                budget: self.budget,
            });
        }
        let u = *self.path.last().expect("nonempty");
        let mut next: Vec<u32> = (0..self.z.min(used + 1)).map(|b| u ^ 1 << b).collect();
        next.sort_unstable();
        for v in next {
            if self.on_path[v as usize] {
                continue;
            }
            let closes = self.path.len() >= 3 && adjacent(v, 0);
            let touches = self.touch[v as usize];
            if touches == 1 && !closes {
                let b = (u ^ v).trailing_zeros() as usize;
                self.push(v);
                self.extend(used.max(b + 1))?;
                self.pop();
            } else if touches == 2 && closes && self.path.len() + 1 > self.best.len() {
                self.best = self.path.clone();
                self.best.push(v);
            }
        }
        Ok(())
    }
}

pub fn longest_snake(dimension: usize) -> Result<Snake> {
    longest_snake_within(dimension, DEFAULT_SNAKE_BUDGET)
}

/// Exhaustive backtracking from vertex 0. Neighbors are tried in increasing
/// order and dimensions are introduced in increasing order, so the result
/// is the first longest cycle in that order.
pub fn longest_snake_within(dimension: usize, budget: u64) -> Result<Snake> {
    if dimension < 2 {
        return Err(invalid("snakes need dimension at least 2"));
    }
    if dimension > MAX_DIMENSION {
        return Err(Error::BudgetExceeded {
            what: "snake search dimension",
            size: dimension as u128,
            budget: MAX_DIMENSION as u64,
        });
    }
    let size = 1usize << dimension;
    let mut s = Search {
        z: dimension,
        budget,
        spent: 0,
        touch: vec![0; size],
        on_path: vec![false; size],
        path: Vec::new(),
        best: Vec::new(),
    };
    s.push(0);
    s.extend(0)?;
    Ok(Snake {
        dimension,
        vertices: s.best,
    })
}

/// The longest snake, relabeled so that it contains `0` and, where some
/// relabeling allows it, avoids the all-ones vertex.
fn gadget_snake(dimension: usize) -> Result<Snake> {
    let snake = longest_snake(dimension)?;
    let ones = (1u32 << dimension) - 1;
    let mask = snake
        .vertices
        .iter()
        .copied()
        .filter(|&c| !snake.contains(c ^ ones))
        .min()
        .unwrap_or(0);
    Ok(snake.relabeled(mask).starting_at(0))
}

/// Where each cube vertex points: along the cycle on the snake, otherwise
/// toward the least neighbor on the snake, otherwise the least neighbor.
pub fn snake_map(snake: &Snake) -> Vec<u32> {
    let z = snake.dimension;
    (0..1u32 << z)
        .map(|v| {
            if let Some(p) = snake.position(v) {
                return snake.vertices[(p + 1) % snake.len()];
            }
            let neighbours = (0..z).map(|b| v ^ 1 << b);
            neighbours
                .clone()
                .filter(|&u| snake.contains(u))
                .min()
                .or_else(|| neighbours.min())
                .expect("z >= 1")
        })
        .collect()
}

fn cube_of(a: &State, z: usize) -> u32 {
    (0..z).fold(0, |acc, i| acc << 1 | a[2 + i] as u32)
}

fn coordinate(v: u32, z: usize, i: usize) -> usize {
    (v >> (z - 1 - i) & 1) as usize
}

fn check_range(n: usize) -> Result<usize> {
    if !(5..=MAX_DIMENSION + 2).contains(&n) {
        return Err(invalid(format!("node count {n} outside 5..=9")));
    }
    Ok(n - 2)
}

/// Two gate nodes and an `(n-2)`-cube walking the snake. The unique stable
/// state is all ones; oscillating needs fairness slack as large as the snake.
pub fn build_snake_system(n: usize) -> Result<HistorylessSystem> {
    let z = check_range(n)?;
    let g = snake_map(&gadget_snake(z)?);
    let space = ActionSpace::uniform(n, 2)?;
    Ok(HistorylessSystem::from_node_rule(space, move |i, a| {
        if i < 2 {
            let rest_zero = (0..n).filter(|&j| j != i).all(|j| a[j] == 0);
            return usize::from(!rest_zero);
        }
        if a[0] == 1 && a[1] == 1 {
            1
        } else {
            coordinate(g[cube_of(a, z) as usize], z, i - 2)
        }
    }))
}

/// The snake and default vertex shared by every disjointness instance of
/// one size. Element `j` of the ground set is the snake's `j`-th vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointnessLayout {
    pub nodes: usize,
    pub snake: Snake,
    /// Where the cube heads once either gate node plays 1; always off the
    /// snake.
    pub default_vertex: u32,
}

impl DisjointnessLayout {
    pub fn new(nodes: usize) -> Result<Self> {
        let z = check_range(nodes)?;
        let snake = gadget_snake(z)?;
        let ones = (1u32 << z) - 1;
        let default_vertex = if snake.contains(ones) {
            (0..=ones).find(|&v| !snake.contains(v)).ok_or_else(|| {
                invalid("the snake covers the whole cube")
            })?
        } else {
            ones
        };
        Ok(DisjointnessLayout {
            nodes,
            snake,
            default_vertex,
        })
    }

    /// Size of the ground set.
    pub fn q(&self) -> usize {
        self.snake.len()
    }

    /// Node 1 plays 0 only while the cube sits on an element of `a` and node
    /// 2 plays 1; node 2 likewise with `b`. The cube walks the snake while
    /// both gate nodes play 0.
    pub fn build(&self, a: &[usize], b: &[usize]) -> Result<HistorylessSystem> {
        let q = self.q();
        if let Some(j) = a.iter().chain(b).find(|&&j| j >= q) {
            return Err(invalid(format!("element {j} outside 0..{q}")));
        }
        let mark = |set: &[usize]| {
            let mut m = vec![false; 1 << self.snake.dimension];
            for &j in set {
                m[self.snake.vertices[j] as usize] = true;
            }
            m
        };
        let (in_a, in_b) = (mark(a), mark(b));
        let z = self.snake.dimension;
        let g = snake_map(&self.snake);
        let p = self.default_vertex;
        let space = ActionSpace::uniform(self.nodes, 2)?;
        Ok(HistorylessSystem::from_node_rule(space, move |i, s| {
            let c = cube_of(s, z) as usize;
            match i {
                0 => usize::from(!(in_a[c] && s[1] == 1)),
                1 => usize::from(!(in_b[c] && s[0] == 1)),
                _ if s[0] == 0 && s[1] == 0 => coordinate(g[c], z, i - 2),
                _ => coordinate(p, z, i - 2),
            }
        }))
    }
}

pub fn build_disjointness(n: usize, a: &[usize], b: &[usize]) -> Result<HistorylessSystem> {
    DisjointnessLayout::new(n)?.build(a, b)
}
