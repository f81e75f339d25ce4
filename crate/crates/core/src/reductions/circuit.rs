use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ActionSpace, HistorylessSystem, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wire {
    Input(usize),
    Gate(usize),
}

/// `table[x]` is the output when the inputs read `x`, first wire as the
/// most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub inputs: Vec<Wire>,
    pub table: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub inputs: Vec<bool>,
    pub gates: Vec<Gate>,
}

/// Nodes: inputs (constant), then gates, then one identity node for every
/// gate that reads its own output.
pub fn build_circuit(circuit: &Circuit) -> Result<HistorylessSystem> {
    let ni = circuit.inputs.len();
    let ng = circuit.gates.len();
    let mut relay_of = vec![None; ng];
    let mut relays = Vec::new();
    for (g, gate) in circuit.gates.iter().enumerate() {
        if gate.table.len() != 1 << gate.inputs.len() {
            return Err(invalid(format!(
                "gate {g} has {} inputs but a truth table of {} rows",
                gate.inputs.len(),
                gate.table.len()
            )));
        }
        for w in &gate.inputs {
            match *w {
                Wire::Input(i) if i >= ni => {
                    return Err(invalid(format!("gate {g} reads missing input {i}")))
                }
                Wire::Gate(h) if h >= ng => {
                    return Err(invalid(format!("gate {g} reads missing gate {h}")))
                }
                Wire::Gate(h) if h == g && relay_of[g].is_none() => {
                    relay_of[g] = Some(ni + ng + relays.len());
                    relays.push(g);
                }
                _ => {}
            }
        }
    }
    let n = ni + ng + relays.len();
    if n == 0 {
        return Err(invalid("a circuit needs at least one input or gate"));
    }
    let wiring: Vec<Vec<usize>> = circuit
        .gates
        .iter()
        .enumerate()
        .map(|(g, gate)| {
            gate.inputs
                .iter()
                .map(|w| match *w {
                    Wire::Input(i) => i,
                    Wire::Gate(h) if h == g => relay_of[g].expect("assigned above"),
                    Wire::Gate(h) => ni + h,
                })
                .collect()
        })
        .collect();
    let inputs = circuit.inputs.clone();
    let tables: Vec<Vec<bool>> = circuit.gates.iter().map(|g| g.table.clone()).collect();
    let space = ActionSpace::uniform(n, 2)?;
    Ok(HistorylessSystem::from_node_rule(space, move |node, a: &State| {
        if node < ni {
            usize::from(inputs[node])
        } else if node < ni + ng {
            let g = node - ni;
            let x = wiring[g].iter().fold(0, |acc, &src| acc << 1 | a[src]);
            usize::from(tables[g][x])
        } else {
            a[ni + relays[node - ni - ng]]
        }
    }))
}
