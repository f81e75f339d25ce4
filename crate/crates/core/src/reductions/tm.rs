use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ActionSpace, HistorylessSystem, State};

/// In state `state` reading `read`: write `write`, move by `shift`, go to
/// `next`. Moves past either end of the tape are clamped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmRule {
    pub state: usize,
    pub read: usize,
    pub next: usize,
    pub write: usize,
    pub shift: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmDescription {
    pub states: usize,
    pub halting: Vec<usize>,
    pub alphabet: usize,
    pub tape: usize,
    pub rules: Vec<TmRule>,
}

/// `Literal` keeps the head's action space at `Q x Γ x [n] x {-1,0,1}`.
/// `Ticked` adds a bit that flips whenever the head applies a transition,
/// so a machine stuck repeating the same transition keeps changing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TmEncoding {
    Literal,
    #[default]
    Ticked,
}

impl TmEncoding {
    fn ticks(self) -> usize {
        match self {
            TmEncoding::Literal => 1,
            TmEncoding::Ticked => 2,
        }
    }
}

/// Head node action: the control state, the symbol it wants written at
/// `position`, and the pending move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadAction {
    pub state: usize,
    pub symbol: usize,
    pub position: usize,
    pub shift: i8,
    pub tick: bool,
}

impl TmDescription {
    pub fn is_halting(&self, q: usize) -> bool {
        self.halting.contains(&q)
    }

    fn validate(&self) -> Result<Vec<Option<TmRule>>> {
        if self.states == 0 || self.alphabet == 0 || self.tape == 0 {
            return Err(invalid("states, alphabet and tape must be nonempty"));
        }
        if let Some(q) = self.halting.iter().find(|&&q| q >= self.states) {
            return Err(invalid(format!("halting state {q} out of range")));
        }
        let mut delta = vec![None; self.states * self.alphabet];
        for r in &self.rules {
            if r.state >= self.states
                || r.next >= self.states
                || r.read >= self.alphabet
                || r.write >= self.alphabet
                || !(-1..=1).contains(&r.shift)
            {
                return Err(invalid(format!("rule {r:?} out of range")));
            }
            if self.is_halting(r.state) {
                return Err(invalid(format!("rule {r:?} leaves a halting state")));
            }
            let slot = &mut delta[r.state * self.alphabet + r.read];
            if slot.is_some() {
                return Err(invalid(format!(
                    "two rules for state {} reading {}",
                    r.state, r.read
                )));
            }
            *slot = Some(*r);
        }
        for q in (0..self.states).filter(|&q| !self.is_halting(q)) {
            for x in 0..self.alphabet {
                if delta[q * self.alphabet + x].is_none() {
                    return Err(invalid(format!("no rule for state {q} reading {x}")));
                }
            }
        }
        Ok(delta)
    }

    pub fn head_actions(&self, encoding: TmEncoding) -> usize {
        self.states * self.alphabet * self.tape * 3 * encoding.ticks()
    }

    pub fn head_index(&self, encoding: TmEncoding, h: &HeadAction) -> usize {
        let base = ((h.state * self.alphabet + h.symbol) * self.tape + h.position) * 3
            + (h.shift + 1) as usize;
        match encoding {
            TmEncoding::Literal => base,
            TmEncoding::Ticked => base * 2 + usize::from(h.tick),
        }
    }

    pub fn head_action(&self, encoding: TmEncoding, mut index: usize) -> HeadAction {
        let tick = match encoding {
            TmEncoding::Literal => false,
            TmEncoding::Ticked => {
                let t = index % 2 == 1;
                index /= 2;
                t
            }
        };
        let shift = (index % 3) as i8 - 1;
        index /= 3;
        let position = index % self.tape;
        index /= self.tape;
        HeadAction {
            state: index / self.alphabet,
            symbol: index % self.alphabet,
            position,
            shift,
            tick,
        }
    }
}

pub fn build_tm(tm: &TmDescription) -> Result<HistorylessSystem> {
    build_tm_with(tm, TmEncoding::default())
}

/// Nodes `0..tape` are cells over the alphabet; node `tape` is the head.
/// A cell takes the head's symbol when the head points at it. Once its
/// symbol is written, the head moves and applies the transition for the
/// symbol it lands on.
pub fn build_tm_with(tm: &TmDescription, encoding: TmEncoding) -> Result<HistorylessSystem> {
    let delta = tm.validate()?;
    let n = tm.tape;
    let mut sizes = vec![tm.alphabet; n];
    sizes.push(tm.head_actions(encoding));
    let space = ActionSpace::new(sizes)?;
    let tm = tm.clone();
    Ok(HistorylessSystem::from_node_rule(space, move |i, a: &State| {
        let h = tm.head_action(encoding, a[n]);
        if i < n {
            return if h.position == i { h.symbol } else { a[i] };
        }
        if tm.is_halting(h.state) || a[h.position] != h.symbol {
            return a[n];
        }
        let j = (h.position as i64 + i64::from(h.shift)).clamp(0, n as i64 - 1) as usize;
        let r = delta[h.state * tm.alphabet + a[j]].expect("validated");
        tm.head_index(
            encoding,
            &HeadAction {
                state: r.next,
                symbol: r.write,
                position: j,
                shift: r.shift,
                tick: !h.tick,
            },
        )
    }))
}
