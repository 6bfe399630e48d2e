use std::collections::HashMap;

use super::{Circuit, Gate, GateKind, GateRef, StrongLabelTable};
use crate::error::{Error, Result};

/// A value under construction: either a folded constant or a real wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Wire {
    Const(bool),
    Ref(GateRef),
}

/// Gate emitter with constant folding and structural sharing. Only NOT and
/// NAND gates are ever emitted; `NAND(x, x)` is never produced.
pub struct Builder {
    n: usize,
    gates: Vec<Gate>,
    cache: HashMap<Gate, usize>,
}

impl Builder {
    pub fn new(n: usize) -> Self {
        Builder {
            n,
            gates: Vec::new(),
            cache: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Input coordinate (i, j), 0-based.
    pub fn input(&self, i: usize, j: usize) -> Wire {
        Wire::Ref(GateRef::Input { i, j })
    }

    fn emit(&mut self, g: Gate) -> GateRef {
        if let Some(&t) = self.cache.get(&g) {
            return GateRef::Gate(t);
        }
        let t = self.gates.len();
        self.gates.push(g);
        self.cache.insert(g, t);
        GateRef::Gate(t)
    }

    fn negation_of(&self, r: GateRef) -> Option<GateRef> {
        match r {
            GateRef::Gate(t) if self.gates[t].kind == GateKind::Not => Some(self.gates[t].in1),
            _ => None,
        }
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        match a {
            Wire::Const(v) => Wire::Const(!v),
            Wire::Ref(r) => match self.negation_of(r) {
                Some(inner) => Wire::Ref(inner),
                None => Wire::Ref(self.emit(Gate::not(r))),
            },
        }
    }

    pub fn nand(&mut self, a: Wire, b: Wire) -> Wire {
        match (a, b) {
            (Wire::Const(false), _) | (_, Wire::Const(false)) => Wire::Const(true),
            (Wire::Const(true), x) | (x, Wire::Const(true)) => self.not(x),
            (Wire::Ref(x), Wire::Ref(y)) => {
                if x == y {
                    return self.not(a);
                }
                if self.negation_of(x) == Some(y) || self.negation_of(y) == Some(x) {
                    return Wire::Const(true);
                }
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                Wire::Ref(self.emit(Gate::nand(x, y)))
            }
        }
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        let t = self.nand(a, b);
        self.not(t)
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        let na = self.not(a);
        let nb = self.not(b);
        self.nand(na, nb)
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        let t = self.nand(a, b);
        let l = self.nand(a, t);
        let r = self.nand(b, t);
        self.nand(l, r)
    }

    /// `a` when `sel` is +1, otherwise `b`.
    pub fn mux(&mut self, sel: Wire, a: Wire, b: Wire) -> Wire {
        let ns = self.not(sel);
        let l = self.nand(sel, a);
        let r = self.nand(ns, b);
        self.nand(l, r)
    }

    pub fn or_all(&mut self, ws: &[Wire]) -> Wire {
        ws.iter()
            .fold(Wire::Const(false), |acc, &w| self.or(acc, w))
    }

    /// Turns a wire into a real gate reference, realising constants as
    /// `NAND(x, NOT x)` on input (1,1).
    pub fn materialize(&mut self, w: Wire) -> GateRef {
        match w {
            Wire::Ref(r) => r,
            Wire::Const(v) => {
                let x = GateRef::Input { i: 0, j: 0 };
                let nx = self.emit(Gate::not(x));
                let t = self.emit(Gate::nand(x, nx));
                if v {
                    t
                } else {
                    self.emit(Gate::not(t))
                }
            }
        }
    }

    /// Sorts wires so that all +1 values come first.
    pub fn sort_descending(&mut self, wires: &[Wire]) -> Vec<Wire> {
        let mut w = wires.to_vec();
        for (a, b) in batcher_pairs(w.len()) {
            let hi = self.or(w[a], w[b]);
            let lo = self.and(w[a], w[b]);
            w[a] = hi;
            w[b] = lo;
        }
        w
    }

    /// Places `outputs` in the last N slots via appended NOT pairs.
    pub fn finish(mut self, outputs: &[Wire]) -> Result<Circuit> {
        if outputs.len() != self.n {
            return Err(Error::Circuit(format!(
                "{} outputs for N = {}",
                outputs.len(),
                self.n
            )));
        }
        let refs: Vec<GateRef> = outputs.iter().map(|&w| self.materialize(w)).collect();
        let base = self.gates.len();
        for &r in &refs {
            self.gates.push(Gate::not(r));
        }
        for i in 0..self.n {
            self.gates.push(Gate::not(GateRef::Gate(base + i)));
        }
        Circuit::new(self.n, self.gates)
    }
}

/// Comparator schedule of Batcher's odd-even merge sort for any length.
pub fn batcher_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut p = 1;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < n {
                for i in 0..k.min(n - j - k) {
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        pairs.push((i + j, i + j + k));
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
    pairs
}

/// For b = 1..=8, the least number of +1 entries in a row of 7N bits that
/// gives φ ≥ b.
pub fn phi_thresholds(n: usize) -> [usize; 8] {
    let n = n as i64;
    let mut t = [0usize; 8];
    for b in 2..=8i64 {
        // φ ≥ b  iff  2N + 1 + 4c > 4N(b − 1)
        let rhs = 4 * n * (b - 1) - 2 * n - 1;
        t[(b - 1) as usize] = (rhs.div_euclid(4) + 1).max(0) as usize;
    }
    t
}

/// One-hot indicators [φ_i = b] for b = 1..=8 from the 7N row bits.
pub fn build_phi_bucket_indicators(b: &mut Builder, row: &[Wire]) -> Vec<Wire> {
    let n = b.n();
    let sorted = b.sort_descending(row);
    let ge: Vec<Wire> = phi_thresholds(n)
        .iter()
        .map(|&c| match c {
            0 => Wire::Const(true),
            c if c > sorted.len() => Wire::Const(false),
            c => sorted[c - 1],
        })
        .chain(std::iter::once(Wire::Const(false)))
        .collect();
    (0..8)
        .map(|k| {
            let above = b.not(ge[k + 1]);
            b.and(ge[k], above)
        })
        .collect()
}

/// Builds λ̂ on N×7N inputs with outputs λ(φ(x)).
pub fn build_lambda_hat(table: &StrongLabelTable) -> Result<Circuit> {
    let n = table.n();
    if table.dims.iter().any(|&m| m != 8) {
        return Err(Error::Circuit(format!(
            "label table must live on [8]^N, got {:?}",
            table.dims
        )));
    }
    let mut b = Builder::new(n);
    let indicators: Vec<Vec<Wire>> = (0..n)
        .map(|i| {
            let row: Vec<Wire> = (0..7 * n).map(|j| b.input(i, j)).collect();
            build_phi_bucket_indicators(&mut b, &row)
        })
        .collect();
    let mut outputs = Vec::with_capacity(n);
    let mut point = vec![0usize; n];
    for d in 0..n {
        outputs.push(lookup(&mut b, table, &indicators, d, 0, &mut point));
    }
    b.finish(&outputs)
}

fn lookup(
    b: &mut Builder,
    table: &StrongLabelTable,
    ind: &[Vec<Wire>],
    d: usize,
    depth: usize,
    point: &mut Vec<usize>,
) -> Wire {
    if depth == point.len() {
        return Wire::Const(table.get(point) >> d & 1 == 1);
    }
    let mut children = Vec::with_capacity(8);
    for v in 1..=8 {
        point[depth] = v;
        children.push(lookup(b, table, ind, d, depth + 1, point));
    }
    if children.iter().all(|&c| c == children[0]) {
        return children[0];
    }
    let terms: Vec<Wire> = children
        .iter()
        .zip(&ind[depth])
        .map(|(&c, &i)| b.and(i, c))
        .collect();
    b.or_all(&terms)
}
