use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Layout, Part};
use crate::circuit::GateRef;
use crate::error::{Error, Result};
use crate::numeric::{q, Block, Interval, PiecewiseDensity, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Auxiliary,
    NotGate,
    NandGate,
    Feedback,
    NotFollower,
    OutputCopy,
}

/// One agent: a unit-mass density plus the copy/gate/dimension it serves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub kind: AgentKind,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub i: Option<usize>,
    pub density: PiecewiseDensity,
}

impl Agent {
    fn new(
        kind: AgentKind,
        k: Option<usize>,
        t: Option<usize>,
        i: Option<usize>,
        blocks: Vec<(Interval, Rational)>,
    ) -> Self {
        let blocks = blocks
            .into_iter()
            .map(|(iv, h)| Block::new(iv, h).expect("positive height"))
            .collect();
        let density = PiecewiseDensity::new(blocks).expect("agent blocks are disjoint");
        Agent {
            kind,
            k,
            t,
            i,
            density,
        }
    }

    pub fn label(&self) -> String {
        let kind = serde_json::to_value(self.kind)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        let mut s = kind;
        for (name, v) in [("k", self.k), ("t", self.t), ("i", self.i)] {
            if let Some(v) = v {
                s.push_str(&format!(" {name}={}", v + 1));
            }
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct AgentRepr {
    kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    blocks: PiecewiseDensity,
}

impl Serialize for Agent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AgentRepr {
            kind: self.kind,
            k: self.k.map(|v| v + 1),
            t: self.t.map(|v| v + 1),
            i: self.i.map(|v| v + 1),
            blocks: self.density.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Agent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = AgentRepr::deserialize(deserializer)?;
        let dec = |v: Option<usize>| -> std::result::Result<Option<usize>, D::Error> {
            match v {
                Some(0) => Err(serde::de::Error::custom("agent indices are 1-based")),
                v => Ok(v.map(|x| x - 1)),
            }
        };
        Ok(Agent {
            kind: r.kind,
            k: dec(r.k)?,
            t: dec(r.t)?,
            i: dec(r.i)?,
            density: r.blocks,
        })
    }
}

fn check_source(layout: &Layout, t: usize, r: GateRef) -> Result<()> {
    match r {
        GateRef::Gate(u) if u >= t => Err(Error::Circuit(format!(
            "gate {} reads later gate {}",
            t + 1,
            u + 1
        ))),
        GateRef::Input { i, j } if i >= layout.n || j >= 7 * layout.n => Err(Error::Circuit(
            format!("gate {} reads missing input ({}, {})", t + 1, i + 1, j + 1),
        )),
        _ => Ok(()),
    }
}

/// Height 1 on C^k_{t,a}.
pub fn build_auxiliary_agent(layout: &Layout, k: usize, t: usize) -> Agent {
    let h = layout.unit.recip();
    Agent::new(
        AgentKind::Auxiliary,
        Some(k),
        Some(t),
        None,
        vec![(layout.gate(k, t, Part::A), h)],
    )
}

/// Height 1/3 on A_{t₁}, C^k_{t,ℓ} and C^k_{t,r}.
pub fn build_not_agent(layout: &Layout, k: usize, t: usize, src: GateRef) -> Result<Agent> {
    check_source(layout, t, src)?;
    let h = q(1, 3) / &layout.unit;
    Ok(Agent::new(
        AgentKind::NotGate,
        Some(k),
        Some(t),
        None,
        vec![
            (layout.source(k, src), h.clone()),
            (layout.gate(k, t, Part::L), h.clone()),
            (layout.gate(k, t, Part::R), h),
        ],
    ))
}

/// Height 1/5 on A_{t₁}, A_{t₂}, C^k_{t,ℓ}; height 2/5 on C^k_{t,r}.
pub fn build_nand_agent(
    layout: &Layout,
    k: usize,
    t: usize,
    a: GateRef,
    b: GateRef,
) -> Result<Agent> {
    check_source(layout, t, a)?;
    check_source(layout, t, b)?;
    if a == b {
        return Err(Error::Circuit(format!(
            "gate {} is NAND(x, x); normalize first",
            t + 1
        )));
    }
    let h = q(1, 5) / &layout.unit;
    Ok(Agent::new(
        AgentKind::NandGate,
        Some(k),
        Some(t),
        None,
        vec![
            (layout.source(k, a), h.clone()),
            (layout.source(k, b), h.clone()),
            (layout.gate(k, t, Part::L), h.clone()),
            (layout.gate(k, t, Part::R), q(2, 5) / &layout.unit),
        ],
    ))
}

/// Height 1/(3N) on the output centres C^k_{m−N+i,c} of every copy.
pub fn build_feedback_agent(layout: &Layout, i: usize) -> Agent {
    let t = layout.m - layout.n + i;
    let h = Rational::one() / (Rational::from(layout.copies) * &layout.unit);
    let blocks = (0..layout.copies)
        .map(|k| (layout.gate(k, t, Part::C), h.clone()))
        .collect();
    Agent::new(AgentKind::Feedback, None, None, Some(i), blocks)
}

/// 3-block NAND: height 1/5 on A_{t₁}, A_{t₂} and the length-3 span ℓ∪c∪r.
pub fn build_nand_agent_3block(
    layout: &Layout,
    k: usize,
    t: usize,
    a: GateRef,
    b: GateRef,
) -> Result<Agent> {
    check_source(layout, t, a)?;
    check_source(layout, t, b)?;
    if a == b {
        return Err(Error::Circuit(format!(
            "gate {} is NAND(x, x); normalize first",
            t + 1
        )));
    }
    let h = q(1, 5) / &layout.unit;
    Ok(Agent::new(
        AgentKind::NandGate,
        Some(k),
        Some(t),
        None,
        vec![
            (layout.source(k, a), h.clone()),
            (layout.source(k, b), h.clone()),
            (layout.gate_span(k, t), h),
        ],
    ))
}

/// NOT reading a NAND's J interval: three blocks of length δ and height
/// 1/(3δ), on J_{t₁} and centred in C^k_{t,ℓ} and C^k_{t,r}.
pub fn build_not_follower(
    layout: &Layout,
    k: usize,
    t: usize,
    nand: usize,
    delta: &Rational,
) -> Result<Agent> {
    check_source(layout, t, GateRef::Gate(nand))?;
    let len = delta * &layout.unit;
    let h = Rational::one() / (Rational::from(3i64) * &len);
    let l = layout.gate(k, t, Part::L).midpoint();
    let r = layout.gate(k, t, Part::R).midpoint();
    Ok(Agent::new(
        AgentKind::NotFollower,
        Some(k),
        Some(t),
        None,
        vec![
            (layout.j_interval(k, nand, delta), h.clone()),
            (Interval::centered(&l, &len), h.clone()),
            (Interval::centered(&r, &len), h),
        ],
    ))
}

/// NOT copying output i of copy k into O^k_i: height 1/3 on the output
/// centre C^k_{m−N+i,c}, O^k_{i,ℓ} and O^k_{i,r}. O^k_{i,c} ends up holding
/// the negated output.
pub fn build_output_copy_agent(layout: &Layout, i: usize, k: usize) -> Agent {
    let t = layout.m - layout.n + i;
    let h = q(1, 3) / &layout.unit;
    Agent::new(
        AgentKind::OutputCopy,
        Some(k),
        None,
        Some(i),
        vec![
            (layout.gate(k, t, Part::C), h.clone()),
            (layout.output(i, k, Part::L), h.clone()),
            (layout.output(i, k, Part::R), h),
        ],
    )
}

/// Uniform over O_i: height 1/(3K) = 1/(60N).
pub fn build_feedback_agent_3block(layout: &Layout, i: usize) -> Agent {
    let h = Rational::one() / (Rational::from(3 * layout.copies) * &layout.unit);
    Agent::new(
        AgentKind::Feedback,
        None,
        None,
        Some(i),
        vec![(layout.output_row(i), h)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chbuild::Variant;
    use crate::numeric::{signed_value, CutSet};

    #[test]
    fn auxiliary_discrepancies() {
        let l = Layout::new(1, 1, Variant::Standard).unwrap();
        let a = build_auxiliary_agent(&l, 0, 0);
        let aux = l.gate(0, 0, Part::A);
        let eval = |cuts: Vec<Rational>| {
            signed_value(&a.density, &CutSet::new(cuts, l.ambient()).unwrap())
                .unwrap()
                .abs()
        };
        assert_eq!(eval(vec![]), q(1, 1));
        assert_eq!(eval(vec![aux.midpoint()]), q(0, 1));
        assert_eq!(eval(vec![&aux.lo + q(2, 5)]), q(1, 5));
    }

    #[test]
    fn masses_are_one() {
        let l = Layout::new(2, 4, Variant::ThreeBlock).unwrap();
        let d = q(1, 2000);
        let agents = [
            build_auxiliary_agent(&l, 1, 2),
            build_not_agent(&l, 0, 1, GateRef::Input { i: 1, j: 3 }).unwrap(),
            build_nand_agent(&l, 0, 2, GateRef::Gate(0), GateRef::Gate(1)).unwrap(),
            build_nand_agent_3block(&l, 0, 2, GateRef::Gate(0), GateRef::Gate(1)).unwrap(),
            build_not_follower(&l, 0, 3, 2, &d).unwrap(),
            build_output_copy_agent(&l, 1, 5),
            build_feedback_agent_3block(&l, 0),
        ];
        for a in &agents {
            assert_eq!(a.density.total_mass(), q(1, 1), "{}", a.label());
        }
        let s = Layout::new(2, 4, Variant::Standard).unwrap();
        assert_eq!(build_feedback_agent(&s, 1).density.total_mass(), q(1, 1));
    }

    #[test]
    fn forward_reference_rejected() {
        let l = Layout::new(1, 3, Variant::Standard).unwrap();
        assert!(build_not_agent(&l, 0, 1, GateRef::Gate(1)).is_err());
        assert!(build_nand_agent(&l, 0, 1, GateRef::Gate(0), GateRef::Gate(2)).is_err());
    }

    #[test]
    fn json_is_one_based() {
        let l = Layout::new(1, 1, Variant::Standard).unwrap();
        let a = build_auxiliary_agent(&l, 0, 0);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"auxiliary","k":1,"t":1,"blocks":[{"lo":"24","hi":"25","height":"1"}]}"#
        );
        let back: Agent = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
