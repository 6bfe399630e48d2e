use super::{Circuit, Gate, GateKind, GateRef};
use crate::error::Result;

/// Rewrites every `NAND(a, a)` as `NOT(a)`. Gate positions are unchanged.
pub fn normalize(c: &Circuit) -> Circuit {
    let gates = c
        .gates()
        .iter()
        .map(|g| {
            if g.kind == GateKind::Nand && g.in1 == g.in2 {
                Gate::not(g.in1)
            } else {
                *g
            }
        })
        .collect();
    Circuit { n: c.n(), gates }
}

/// Shape required by the 3-block construction: a NAND is read only by NOT
/// gates. Any NAND read by another NAND gets a `NOT, NOT` pair inserted right
/// after it and those readers are rerouted to the second NOT. NAND outputs
/// are repositioned behind a trailing NOT pair.
pub fn normalize_three_block(c: &Circuit) -> Result<Circuit> {
    let c = normalize(c);
    let consumers = c.consumers();
    let needs_buffer: Vec<bool> = c
        .gates()
        .iter()
        .enumerate()
        .map(|(t, g)| {
            g.kind == GateKind::Nand
                && consumers[t]
                    .iter()
                    .any(|&u| c.gate(u).kind == GateKind::Nand)
        })
        .collect();

    let mut gates: Vec<Gate> = Vec::with_capacity(c.m());
    let mut direct = vec![0usize; c.m()];
    let mut buffered = vec![0usize; c.m()];
    for (t, g) in c.gates().iter().enumerate() {
        let map = |r: GateRef, via_buffer: bool| match r {
            GateRef::Gate(u) if via_buffer && needs_buffer[u] => GateRef::Gate(buffered[u]),
            GateRef::Gate(u) => GateRef::Gate(direct[u]),
            input => input,
        };
        let ng = match g.kind {
            GateKind::Not => Gate::not(map(g.in1, false)),
            GateKind::Nand => Gate::nand(map(g.in1, true), map(g.in2, true)),
        };
        direct[t] = gates.len();
        gates.push(ng);
        if needs_buffer[t] {
            gates.push(Gate::not(GateRef::Gate(direct[t])));
            gates.push(Gate::not(GateRef::Gate(direct[t] + 1)));
            buffered[t] = direct[t] + 2;
        }
    }

    let n = c.n();
    let outputs: Vec<usize> = (0..n).map(|i| direct[c.output_gate(i)]).collect();
    let trailing_ok = outputs
        .iter()
        .enumerate()
        .all(|(i, &o)| o == gates.len() - n + i)
        && outputs.iter().all(|&o| gates[o].kind == GateKind::Not);
    if !trailing_ok {
        let base = gates.len();
        for &o in &outputs {
            gates.push(Gate::not(GateRef::Gate(o)));
        }
        for i in 0..n {
            gates.push(Gate::not(GateRef::Gate(base + i)));
        }
    }
    Circuit::new(n, gates)
}
