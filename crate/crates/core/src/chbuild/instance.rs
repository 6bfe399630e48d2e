use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::agents::*;
use super::{Layout, LayoutRepr, Variant};
use crate::circuit::{normalize, normalize_three_block, Circuit, GateKind, GateRef};
use crate::error::{Error, Result};
use crate::numeric::{q, Rational};

/// ε = 199/1000.
pub fn default_epsilon() -> Rational {
    q(199, 1000)
}

/// A built instance. `circuit` is the (normalized) circuit the gate agents
/// were generated from; it is kept so that solutions can be synthesized
/// from the instance file alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CHInstance {
    pub variant: Variant,
    pub epsilon: Rational,
    pub layout: Layout,
    pub agents: Vec<Agent>,
    pub circuit: Circuit,
}

impl CHInstance {
    pub fn n(&self) -> usize {
        self.layout.n
    }

    /// Number of agents, which is also the number of cuts a solution uses.
    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    /// Length of the J intervals and follower blocks.
    pub fn delta(&self) -> Rational {
        delta(&self.epsilon)
    }

    /// Index of the agent serving gate t of copy k.
    pub fn gate_agent(&self, k: usize, t: usize) -> usize {
        2 * (k * self.layout.m + t)
    }

    pub fn aux_agent(&self, k: usize, t: usize) -> usize {
        2 * (k * self.layout.m + t) + 1
    }

    pub fn feedback_agent(&self, i: usize) -> usize {
        self.agents.len() - self.layout.n + i
    }

    /// Index of the output-copy agent for (i, k); 3-block only.
    pub fn output_copy_agent(&self, i: usize, k: usize) -> usize {
        2 * self.layout.copies * self.layout.m + i * self.layout.copies + k
    }
}

/// δ = (1/5 − ε)/2.
pub fn delta(epsilon: &Rational) -> Rational {
    (q(1, 5) - epsilon) / q(2, 1)
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if epsilon.is_negative() || *epsilon >= q(1, 5) {
        return Err(Error::EpsilonOutOfRange(format!(
            "epsilon out of range: {epsilon} not in [0, 1/5)"
        )));
    }
    Ok(())
}

/// CH_ε(λ) with K = 3N circuit copies: a gate agent and an auxiliary agent
/// per gate and copy, then N feedback agents.
pub fn build_instance(circuit: &Circuit, epsilon: &Rational) -> Result<CHInstance> {
    check_epsilon(epsilon)?;
    let circuit = normalize(circuit);
    let layout = Layout::new(circuit.n(), circuit.m(), Variant::Standard)?;
    let mut agents = Vec::with_capacity(2 * layout.copies * layout.m + layout.n);
    for k in 0..layout.copies {
        for (t, g) in circuit.gates().iter().enumerate() {
            agents.push(match g.kind {
                GateKind::Not => build_not_agent(&layout, k, t, g.in1)?,
                GateKind::Nand => build_nand_agent(&layout, k, t, g.in1, g.in2)?,
            });
            agents.push(build_auxiliary_agent(&layout, k, t));
        }
    }
    for i in 0..layout.n {
        agents.push(build_feedback_agent(&layout, i));
    }
    Ok(CHInstance {
        variant: Variant::Standard,
        epsilon: epsilon.clone(),
        layout,
        agents,
        circuit,
    })
}

/// The 3-block uniform variant: K = 20N copies of the normalized circuit,
/// NOT gates reading a NAND read its J interval instead, an output-copy
/// agent per (i, k), and uniform feedback over each O_i.
pub fn build_instance_3block(circuit: &Circuit, epsilon: &Rational) -> Result<CHInstance> {
    check_epsilon(epsilon)?;
    let circuit = normalize_three_block(circuit)?;
    let layout = Layout::new(circuit.n(), circuit.m(), Variant::ThreeBlock)?;
    let d = delta(epsilon);
    let mut agents =
        Vec::with_capacity(2 * layout.copies * layout.m + layout.n * (layout.copies + 1));
    for k in 0..layout.copies {
        for (t, g) in circuit.gates().iter().enumerate() {
            agents.push(match (g.kind, g.in1) {
                (GateKind::Not, GateRef::Gate(u)) if circuit.gate(u).kind == GateKind::Nand => {
                    build_not_follower(&layout, k, t, u, &d)?
                }
                (GateKind::Not, src) => build_not_agent(&layout, k, t, src)?,
                (GateKind::Nand, _) => build_nand_agent_3block(&layout, k, t, g.in1, g.in2)?,
            });
            agents.push(build_auxiliary_agent(&layout, k, t));
        }
    }
    for i in 0..layout.n {
        for k in 0..layout.copies {
            agents.push(build_output_copy_agent(&layout, i, k));
        }
    }
    for i in 0..layout.n {
        agents.push(build_feedback_agent_3block(&layout, i));
    }
    Ok(CHInstance {
        variant: Variant::ThreeBlock,
        epsilon: epsilon.clone(),
        layout,
        agents,
        circuit,
    })
}

/// Rescales the instance onto [0, 1]; every density keeps its mass.
pub fn scale_to_unit(inst: &CHInstance) -> CHInstance {
    let factor = inst.layout.ambient().hi.recip();
    let mut out = inst.clone();
    out.layout.unit = &inst.layout.unit * &factor;
    for a in &mut out.agents {
        a.density = a.density.scaled(&factor);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    variant: Variant,
    epsilon: Rational,
    layout: LayoutRepr,
    agents: Vec<Agent>,
    circuit: Circuit,
}

impl Serialize for CHInstance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let l = &self.layout;
        InstanceRepr {
            variant: self.variant,
            epsilon: self.epsilon.clone(),
            layout: LayoutRepr {
                n: l.n,
                m: l.m,
                copies: l.copies,
                length: l.length(),
                unit: l.unit.clone(),
            },
            agents: self.agents.clone(),
            circuit: self.circuit.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CHInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = InstanceRepr::deserialize(deserializer)?;
        let mut layout =
            Layout::new(r.layout.n, r.layout.m, r.variant).map_err(D::Error::custom)?;
        if layout.copies != r.layout.copies || layout.length() != r.layout.length {
            return Err(D::Error::custom(format!(
                "layout mismatch: K = {}, L = {} but N = {}, m = {} give K = {}, L = {}",
                r.layout.copies,
                r.layout.length,
                r.layout.n,
                r.layout.m,
                layout.copies,
                layout.length()
            )));
        }
        if !r.layout.unit.is_positive() {
            return Err(D::Error::custom("layout unit must be positive"));
        }
        layout.unit = r.layout.unit;
        if r.circuit.n() != layout.n || r.circuit.m() != layout.m {
            return Err(D::Error::custom("circuit shape does not match layout"));
        }
        let expected = match r.variant {
            Variant::Standard => 2 * layout.copies * layout.m + layout.n,
            Variant::ThreeBlock => 2 * layout.copies * layout.m + layout.n * (layout.copies + 1),
        };
        if r.agents.len() != expected {
            return Err(D::Error::custom(format!(
                "expected {expected} agents, found {}",
                r.agents.len()
            )));
        }
        Ok(CHInstance {
            variant: r.variant,
            epsilon: r.epsilon,
            layout,
            agents: r.agents,
            circuit: r.circuit,
        })
    }
}
