use super::topology::{DeviceTopology, QubitMapping};
use crate::circuit::{Circuit, GateOp};
use crate::error::{domain, Error};
use crate::Result;

/// Routed circuit over physical qubits together with the layouts before and
/// after execution.
#[derive(Debug, Clone)]
pub struct Routed {
    pub circuit: Circuit,
    /// Initial layout completed to a bijection over every physical qubit.
    pub initial: QubitMapping,
    pub final_mapping: QubitMapping,
    pub swaps: usize,
}

/// Greedy nearest-neighbour SWAP insertion.
///
/// Gates are processed in program order. When a two-qubit gate spans a
/// non-edge, one endpoint is swapped one hop closer to the other; among the
/// candidate swaps the one minimising the summed distance of the current gate
/// and the next layer of two-qubit gates wins, ties going to the lowest
/// physical pair.
pub fn route(c: &Circuit, topo: &DeviceTopology, initial: &QubitMapping) -> Result<Routed> {
    let n_phys = topo.num_qubits();
    if c.num_qubits() > n_phys {
        return Err(Error::Compile(format!("{} logical qubits do not fit on {n_phys} physical", c.num_qubits())));
    }
    if initial.len() < c.num_qubits() {
        return Err(domain!("initial mapping covers {} of {} logical qubits", initial.len(), c.num_qubits()));
    }
    let initial = initial.extend_to(n_phys)?;
    let dist = topo.distances();
    let mut layout = initial.clone();
    let mut out = Circuit::new(n_phys, c.label.clone())?;
    let mut swaps = 0;
    let ops = c.ops();

    for (i, op) in ops.iter().enumerate() {
        match op.arity() {
            1 => {}
            2 => {
                let (la, lb) = (op.qubits[0], op.qubits[1]);
                if dist[layout.physical(la)][layout.physical(lb)] == usize::MAX {
                    return Err(Error::Compile(format!(
                        "physical qubits {} and {} are disconnected",
                        layout.physical(la),
                        layout.physical(lb)
                    )));
                }
                let lookahead = next_layer(&ops[i + 1..]);
                while dist[layout.physical(la)][layout.physical(lb)] > 1 {
                    let (p1, p2) = best_swap(topo, &dist, &layout, (la, lb), &lookahead);
                    out.push(GateOp::swap(p1, p2))?;
                    layout.swap_physical(p1, p2);
                    swaps += 1;
                }
            }
            k => {
                return Err(Error::Compile(format!(
                    "{k}-qubit {} must be decomposed before routing",
                    op.gate.name()
                )))
            }
        }
        let mapped = op.qubits.iter().map(|&q| layout.physical(q)).collect();
        out.push(GateOp::new(op.gate.clone(), mapped)?)?;
    }
    Ok(Routed { circuit: out, initial, final_mapping: layout, swaps })
}

/// Two-qubit gates of the next layer: scanned in order until a qubit repeats.
fn next_layer(rest: &[GateOp]) -> Vec<(usize, usize)> {
    let mut busy = Vec::new();
    let mut layer = Vec::new();
    for op in rest {
        if op.qubits.iter().any(|q| busy.contains(q)) {
            break;
        }
        busy.extend(op.qubits.iter().copied());
        if op.arity() == 2 {
            layer.push((op.qubits[0], op.qubits[1]));
        }
    }
    layer
}

fn best_swap(
    topo: &DeviceTopology,
    dist: &[Vec<usize>],
    layout: &QubitMapping,
    gate: (usize, usize),
    lookahead: &[(usize, usize)],
) -> (usize, usize) {
    let (pa, pb) = (layout.physical(gate.0), layout.physical(gate.1));
    let current = dist[pa][pb];
    let mut best: Option<((usize, usize), usize)> = None;
    for (moving, other) in [(pa, pb), (pb, pa)] {
        for nb in topo.neighbors(moving) {
            if dist[nb][other] >= current {
                continue;
            }
            let mut trial = layout.clone();
            trial.swap_physical(moving, nb);
            let score = std::iter::once(gate)
                .chain(lookahead.iter().copied())
                .map(|(x, y)| dist[trial.physical(x)][trial.physical(y)].min(n_cap(topo)))
                .sum::<usize>();
            let pair = (moving.min(nb), moving.max(nb));
            let better = match best {
                None => true,
                Some((bp, bs)) => score < bs || (score == bs && pair < bp),
            };
            if better {
                best = Some((pair, score));
            }
        }
    }
    best.expect("a connected pair at distance > 1 always has a shortening swap").0
}

// caps unreachable lookahead pairs so they do not dominate the score
fn n_cap(topo: &DeviceTopology) -> usize {
    topo.num_qubits()
}
