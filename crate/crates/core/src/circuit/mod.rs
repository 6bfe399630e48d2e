//! NOT/NAND circuits over {-1,+1} bits, the unary decoder φ, and the
//! modified circuit λ̂ that evaluates a label table at φ(x).
//!
//! Bits are carried as `bool` internally (`true` is +1) and exposed as `i8`
//! signs at the API boundary.

mod builder;
mod json;
mod transform;

use rand::Rng;

pub use builder::{
    batcher_pairs, build_lambda_hat, build_phi_bucket_indicators, phi_thresholds, Builder, Wire,
};
pub use transform::{normalize, normalize_three_block};

use crate::error::{Error, Result};

/// Input coordinate or earlier gate feeding a gate. Indices are 0-based in
/// memory and 1-based in files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateRef {
    Input { i: usize, j: usize },
    Gate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Nand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub in1: GateRef,
    /// Equal to `in1` for NOT gates.
    pub in2: GateRef,
}

impl Gate {
    pub fn not(a: GateRef) -> Self {
        Gate {
            kind: GateKind::Not,
            in1: a,
            in2: a,
        }
    }

    pub fn nand(a: GateRef, b: GateRef) -> Self {
        Gate {
            kind: GateKind::Nand,
            in1: a,
            in2: b,
        }
    }

    pub fn inputs(&self) -> impl Iterator<Item = GateRef> {
        let second = (self.kind == GateKind::Nand).then_some(self.in2);
        std::iter::once(self.in1).chain(second)
    }
}

/// Input matrix x ∈ {-1,+1}^{N × 7N}, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n == 0 || bits.len() != n * 7 * n {
            return Err(Error::Shape {
                expected: format!("{} x {}", n, 7 * n),
                got: format!("{} entries", bits.len()),
            });
        }
        Ok(BitMatrix { n, bits })
    }

    pub fn from_signs(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        let mut bits = Vec::with_capacity(n * 7 * n);
        for row in rows {
            if row.len() != 7 * n {
                return Err(Error::Shape {
                    expected: format!("{} x {}", n, 7 * n),
                    got: format!("row of length {}", row.len()),
                });
            }
            for &s in row {
                match s {
                    1 => bits.push(true),
                    -1 => bits.push(false),
                    _ => return Err(Error::Format(format!("entry {s} is not ±1"))),
                }
            }
        }
        BitMatrix::new(n, bits)
    }

    pub fn filled(n: usize, sign: i8) -> Self {
        BitMatrix {
            n,
            bits: vec![sign > 0; n * 7 * n],
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        BitMatrix {
            n,
            bits: (0..n * 7 * n).map(|_| rng.gen()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        7 * self.n
    }

    pub fn bit(&self, i: usize, j: usize) -> bool {
        self.bits[i * 7 * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        if self.bit(i, j) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let c = 7 * self.n;
        self.bits[i * c + j] = v;
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let c = 7 * self.n;
        self.bits[i * c + j] ^= true;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        let c = 7 * self.n;
        &self.bits[i * c..(i + 1) * c]
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        self.row(i).iter().map(|&b| if b { 1 } else { -1 }).sum()
    }

    pub fn negated(&self) -> Self {
        BitMatrix {
            n: self.n,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// φ for one row from its sum: the unique b with
/// (b−1)·4N < 16N + 1 + 2S ≤ b·4N.
pub fn phi_from_sum(n: usize, sum: i64) -> usize {
    let n = n as i64;
    let num = 16 * n + 1 + 2 * sum;
    let den = 4 * n;
    let b = num.div_euclid(den) + i64::from(num.rem_euclid(den) != 0);
    b.clamp(1, 8) as usize
}

/// φ(x) ∈ [8]^N, exact integer arithmetic.
pub fn phi(x: &BitMatrix) -> Vec<usize> {
    (0..x.n())
        .map(|i| phi_from_sum(x.n(), x.row_sum(i)))
        .collect()
}

/// Row-major table λ: [m_1]×…×[m_N] → {-1,+1}^N. A label is a bitmask with
/// bit i set when coordinate i is +1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongLabelTable {
    pub dims: Vec<usize>,
    pub labels: Vec<u64>,
}

impl StrongLabelTable {
    pub fn new(dims: Vec<usize>, labels: Vec<u64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if dims.is_empty() || dims.len() > 64 || labels.len() != size {
            return Err(Error::Shape {
                expected: format!("{size} labels over {} dimensions", dims.len()),
                got: format!("{}", labels.len()),
            });
        }
        Ok(StrongLabelTable { dims, labels })
    }

    pub fn constant(n: usize, label: u64) -> Self {
        StrongLabelTable {
            dims: vec![8; n],
            labels: vec![label; 8usize.pow(n as u32)],
        }
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    /// Label at a 1-based point.
    pub fn get(&self, p: &[usize]) -> u64 {
        let mut idx = 0;
        for (&x, &m) in p.iter().zip(&self.dims) {
            idx = idx * m + (x - 1);
        }
        self.labels[idx]
    }
}

/// Converts a bitmask label to a ±1 vector of length `n`.
pub fn mask_to_signs(mask: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
        .collect()
}

pub fn signs_to_mask(signs: &[i8]) -> u64 {
    signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Acyclic NOT/NAND circuit whose i-th output is gate `m − N + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Circuit("N must be positive".into()));
        }
        if gates.len() < n {
            return Err(Error::Circuit(format!(
                "{} gates but {} outputs",
                gates.len(),
                n
            )));
        }
        for (t, g) in gates.iter().enumerate() {
            for r in g.inputs() {
                match r {
                    GateRef::Gate(u) if u >= t => {
                        return Err(Error::Circuit(format!(
                            "gate {} reads gate {} which is not earlier",
                            t + 1,
                            u + 1
                        )))
                    }
                    GateRef::Input { i, j } if i >= n || j >= 7 * n => {
                        return Err(Error::Circuit(format!(
                            "gate {} reads input ({}, {}) outside {} x {}",
                            t + 1,
                            i + 1,
                            j + 1,
                            n,
                            7 * n
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(Circuit { n, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, t: usize) -> &Gate {
        &self.gates[t]
    }

    /// 0-based index of the i-th output gate.
    pub fn output_gate(&self, i: usize) -> usize {
        self.gates.len() - self.n + i
    }

    /// Value of every gate on input `x`.
    pub fn eval_all(&self, x: &BitMatrix) -> Result<Vec<bool>> {
        if x.n() != self.n {
            return Err(Error::Shape {
                expected: format!("{} x {}", self.n, 7 * self.n),
                got: format!("{} x {}", x.n(), x.cols()),
            });
        }
        let mut vals: Vec<bool> = Vec::with_capacity(self.gates.len());
        let read = |vals: &[bool], r: GateRef| match r {
            GateRef::Input { i, j } => x.bit(i, j),
            GateRef::Gate(u) => vals[u],
        };
        for g in &self.gates {
            let v = match g.kind {
                GateKind::Not => !read(&vals, g.in1),
                GateKind::Nand => !(read(&vals, g.in1) && read(&vals, g.in2)),
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Gates that read gate `t`.
    pub fn consumers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.gates.len()];
        for (t, g) in self.gates.iter().enumerate() {
            let mut seen = None;
            for r in g.inputs() {
                if let GateRef::Gate(u) = r {
                    if seen != Some(u) {
                        out[u].push(t);
                        seen = Some(u);
                    }
                }
            }
        }
        out
    }
}

/// Circuit outputs on `x` as ±1 signs.
pub fn eval_circuit(c: &Circuit, x: &BitMatrix) -> Result<Vec<i8>> {
    let vals = c.eval_all(x)?;
    Ok(vals[c.m() - c.n()..]
        .iter()
        .map(|&b| if b { 1 } else { -1 })
        .collect())
}
