//! Construction of the consensus-halving instance CH_ε(λ) from a circuit λ̂:
//! region layout, gate/auxiliary/feedback agents, and the 3-block uniform
//! variant with its output region.
//!
//! Positions are built on [0, L] with unit-length named intervals. Indices
//! are 0-based in memory and 1-based in files.

mod agents;
pub mod gadget;
mod instance;

use serde::{Deserialize, Serialize};

pub use agents::{
    build_auxiliary_agent, build_feedback_agent, build_feedback_agent_3block, build_nand_agent,
    build_nand_agent_3block, build_not_agent, build_not_follower, build_output_copy_agent, Agent,
    AgentKind,
};
pub use instance::{
    build_instance, build_instance_3block, default_epsilon, delta, scale_to_unit, CHInstance,
};

use crate::circuit::GateRef;
use crate::error::{Error, Result};
use crate::numeric::{Interval, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "3block")]
    ThreeBlock,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "3block" | "three_block" => Ok(Variant::ThreeBlock),
            other => Err(Error::Format(format!("unknown variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::ThreeBlock => "3block",
        })
    }
}

/// Unit sub-intervals of a gate region C^k_t, or of an output region O^k_i
/// (which has no auxiliary part).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    L,
    C,
    R,
    A,
}

impl Part {
    fn offset(self) -> usize {
        match self {
            Part::L => 0,
            Part::C => 1,
            Part::R => 2,
            Part::A => 3,
        }
    }
}

/// Region layout: I (i-major, then j, then copy), then O (3-block only,
/// i-major then copy, each ℓ c r), then C (copy-major, then gate, each
/// ℓ c r a).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub variant: Variant,
    pub n: usize,
    pub m: usize,
    pub copies: usize,
    /// Length of one named interval: 1 on the built domain, 1/L after
    /// scaling to [0, 1].
    pub unit: Rational,
}

impl Layout {
    pub fn new(n: usize, m: usize, variant: Variant) -> Result<Self> {
        if n == 0 {
            return Err(Error::Layout("N must be positive".into()));
        }
        if m < n {
            return Err(Error::Layout(format!(
                "circuit has {m} gates but needs at least N = {n}"
            )));
        }
        let copies = match variant {
            Variant::Standard => 3 * n,
            Variant::ThreeBlock => 20 * n,
        };
        Ok(Layout {
            variant,
            n,
            m,
            copies,
            unit: Rational::one(),
        })
    }

    pub fn input_len(&self) -> usize {
        7 * self.n * self.n * self.copies
    }

    pub fn output_len(&self) -> usize {
        match self.variant {
            Variant::Standard => 0,
            Variant::ThreeBlock => 3 * self.n * self.copies,
        }
    }

    pub fn circuit_len(&self) -> usize {
        4 * self.m * self.copies
    }

    /// Ambient length in units.
    pub fn length(&self) -> usize {
        self.input_len() + self.output_len() + self.circuit_len()
    }

    pub fn ambient(&self) -> Interval {
        Interval::new(Rational::zero(), Rational::from(self.length()) * &self.unit)
            .expect("nonnegative")
    }

    fn unit_at(&self, pos: usize) -> Interval {
        let lo = Rational::from(pos) * &self.unit;
        let hi = &lo + &self.unit;
        Interval::new(lo, hi).expect("ordered")
    }

    fn span_at(&self, pos: usize, len: usize) -> Interval {
        let lo = Rational::from(pos) * &self.unit;
        let hi = Rational::from(pos + len) * &self.unit;
        Interval::new(lo, hi).expect("ordered")
    }

    pub fn input_pos(&self, i: usize, j: usize, k: usize) -> usize {
        (i * 7 * self.n + j) * self.copies + k
    }

    /// I^k_{i,j}.
    pub fn input(&self, i: usize, j: usize, k: usize) -> Interval {
        self.unit_at(self.input_pos(i, j, k))
    }

    /// I_i, the whole row of dimension i.
    pub fn input_row(&self, i: usize) -> Interval {
        self.span_at(i * 7 * self.n * self.copies, 7 * self.n * self.copies)
    }

    pub fn input_region(&self) -> Interval {
        self.span_at(0, self.input_len())
    }

    fn output_pos(&self, i: usize, k: usize) -> usize {
        self.input_len() + (i * self.copies + k) * 3
    }

    /// O^k_{i,part}; `part` is ℓ, c or r.
    pub fn output(&self, i: usize, k: usize, part: Part) -> Interval {
        debug_assert!(part != Part::A);
        self.unit_at(self.output_pos(i, k) + part.offset())
    }

    /// O^k_i = ℓ ∪ c ∪ r.
    pub fn output_span(&self, i: usize, k: usize) -> Interval {
        self.span_at(self.output_pos(i, k), 3)
    }

    /// O_i, all copies.
    pub fn output_row(&self, i: usize) -> Interval {
        self.span_at(self.output_pos(i, 0), 3 * self.copies)
    }

    fn gate_pos(&self, k: usize, t: usize) -> usize {
        self.input_len() + self.output_len() + (k * self.m + t) * 4
    }

    /// C^k_{t,part}.
    pub fn gate(&self, k: usize, t: usize, part: Part) -> Interval {
        self.unit_at(self.gate_pos(k, t) + part.offset())
    }

    /// C^k_{t,ℓ} ∪ C^k_{t,c} ∪ C^k_{t,r}.
    pub fn gate_span(&self, k: usize, t: usize) -> Interval {
        self.span_at(self.gate_pos(k, t), 3)
    }

    /// C^k, the whole circuit copy.
    pub fn copy_region(&self, k: usize) -> Interval {
        self.span_at(self.gate_pos(k, 0), 4 * self.m)
    }

    /// A_r: the interval holding the value of gate or input `r` in copy k.
    pub fn source(&self, k: usize, r: GateRef) -> Interval {
        match r {
            GateRef::Input { i, j } => self.input(i, j, k),
            GateRef::Gate(t) => self.gate(k, t, Part::C),
        }
    }

    /// J_t: length δ, centred on the ℓ/c boundary of gate t in copy k.
    pub fn j_interval(&self, k: usize, t: usize, delta: &Rational) -> Interval {
        let center = self.gate(k, t, Part::C).lo;
        Interval::centered(&center, &(delta * &self.unit))
    }

    /// Intervals whose interiors make up C̄^k: the copy region, the inputs
    /// of the copy and, in the 3-block variant, its output intervals.
    pub fn closure_parts(&self, k: usize) -> Vec<Interval> {
        let mut parts = vec![self.copy_region(k)];
        for i in 0..self.n {
            for j in 0..7 * self.n {
                parts.push(self.input(i, j, k));
            }
        }
        if self.variant == Variant::ThreeBlock {
            for i in 0..self.n {
                parts.push(self.output_span(i, k));
            }
        }
        parts
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct LayoutRepr {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub copies: usize,
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(default = "Rational::one", skip_serializing_if = "is_one")]
    pub unit: Rational,
}

fn is_one(r: &Rational) -> bool {
    *r == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;

    #[test]
    fn standard_sizes() {
        let l = Layout::new(2, 10, Variant::Standard).unwrap();
        assert_eq!(l.input_len(), 168);
        assert_eq!(l.circuit_len(), 240);
        assert_eq!(l.length(), 21 * 8 + 12 * 10 * 2);
        assert_eq!(l.input(0, 0, 0), Interval::new(q(0, 1), q(1, 1)).unwrap());
        assert_eq!(l.gate(0, 0, Part::L).lo, q(168, 1));
    }

    #[test]
    fn named_intervals_disjoint_and_ordered() {
        for variant in [Variant::Standard, Variant::ThreeBlock] {
            let l = Layout::new(1, 3, variant).unwrap();
            let mut all = Vec::new();
            for i in 0..l.n {
                for j in 0..7 * l.n {
                    for k in 0..l.copies {
                        all.push(l.input(i, j, k));
                    }
                }
            }
            if variant == Variant::ThreeBlock {
                for i in 0..l.n {
                    for k in 0..l.copies {
                        for p in [Part::L, Part::C, Part::R] {
                            all.push(l.output(i, k, p));
                        }
                    }
                }
            }
            for k in 0..l.copies {
                for t in 0..l.m {
                    for p in [Part::L, Part::C, Part::R, Part::A] {
                        all.push(l.gate(k, t, p));
                    }
                }
            }
            assert_eq!(all.len(), l.length());
            for (idx, iv) in all.iter().enumerate() {
                assert_eq!(iv.len(), q(1, 1));
                assert_eq!(iv.lo, Rational::from(idx));
            }
        }
    }

    #[test]
    fn too_few_gates() {
        assert!(Layout::new(3, 2, Variant::Standard).is_err());
    }
}
