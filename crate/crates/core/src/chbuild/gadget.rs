//! Single-gadget scenes: one agent placed in a real layout, with its input
//! intervals forced to chosen values and at most one cut inside its gate
//! span. Used to sweep cut offsets and check the gadget truth tables.

use super::agents::*;
use super::{delta, Layout, Part, Variant};
use crate::circuit::GateRef;
use crate::error::{Error, Result};
use crate::numeric::{signed_value, CutSet, Interval, Rational};

#[derive(Clone, Debug)]
pub struct GadgetScene {
    pub agent: Agent,
    /// Intervals the agent reads, in the order values are supplied.
    pub inputs: Vec<Interval>,
    /// The span that receives the gadget's cut (ℓ∪c∪r of a gate or output).
    pub span: Interval,
    /// Where the gadget's result is read: C_c, or J for a 3-block NAND.
    pub read: Interval,
    ambient: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetOutcome {
    /// |signed value| of the agent.
    pub discrepancy: Rational,
    /// Sign of the read interval when it is pure.
    pub output: Option<i8>,
}

fn standard(m: usize) -> Layout {
    Layout::new(1, m, Variant::Standard).expect("valid layout")
}

fn three_block(m: usize) -> Layout {
    Layout::new(1, m, Variant::ThreeBlock).expect("valid layout")
}

impl GadgetScene {
    /// Gate 2 of copy 1 as NOT(gate 1).
    pub fn not_gate() -> Self {
        let l = standard(2);
        let agent = build_not_agent(&l, 0, 1, GateRef::Gate(0)).expect("valid source");
        GadgetScene {
            agent,
            inputs: vec![l.gate(0, 0, Part::C)],
            span: l.gate_span(0, 1),
            read: l.gate(0, 1, Part::C),
            ambient: l.ambient(),
        }
    }

    /// Gate 3 of copy 1 as NAND(gate 1, gate 2).
    pub fn nand_gate() -> Self {
        let l = standard(3);
        let agent =
            build_nand_agent(&l, 0, 2, GateRef::Gate(0), GateRef::Gate(1)).expect("valid sources");
        GadgetScene {
            agent,
            inputs: vec![l.gate(0, 0, Part::C), l.gate(0, 1, Part::C)],
            span: l.gate_span(0, 2),
            read: l.gate(0, 2, Part::C),
            ambient: l.ambient(),
        }
    }

    /// 3-block NAND(gate 1, gate 2) as gate 3; its result is read on J.
    pub fn nand_gate_3block(epsilon: &Rational) -> Self {
        let l = three_block(3);
        let agent = build_nand_agent_3block(&l, 0, 2, GateRef::Gate(0), GateRef::Gate(1))
            .expect("valid sources");
        GadgetScene {
            agent,
            inputs: vec![l.gate(0, 0, Part::C), l.gate(0, 1, Part::C)],
            span: l.gate_span(0, 2),
            read: l.j_interval(0, 2, &delta(epsilon)),
            ambient: l.ambient(),
        }
    }

    /// NOT following the NAND at gate 1, as gate 2.
    pub fn not_follower(epsilon: &Rational) -> Self {
        let l = three_block(2);
        let d = delta(epsilon);
        let agent = build_not_follower(&l, 0, 1, 0, &d).expect("valid source");
        GadgetScene {
            agent,
            inputs: vec![l.j_interval(0, 0, &d)],
            span: l.gate_span(0, 1),
            read: l.gate(0, 1, Part::C),
            ambient: l.ambient(),
        }
    }

    /// Output copy of gate 2 (the single output) into O^1_1; the input lies
    /// to the right of the span.
    pub fn output_copy() -> Self {
        let l = three_block(2);
        let agent = build_output_copy_agent(&l, 0, 0);
        GadgetScene {
            agent,
            inputs: vec![l.gate(0, 1, Part::C)],
            span: l.output_span(0, 0),
            read: l.output(0, 0, Part::C),
            ambient: l.ambient(),
        }
    }

    pub fn span_len(&self) -> Rational {
        self.span.len()
    }

    /// Cut set realizing the scene: each input interval pure with the given
    /// value, sign `entering` just left of the gadget cut, and the gadget
    /// cut at `span.lo + offset` (none when `offset` is `None`). Separator
    /// cuts go in the gaps between the constrained intervals, where the
    /// agent has no density.
    pub fn cuts(&self, values: &[i8], entering: i8, offset: Option<&Rational>) -> Result<CutSet> {
        if values.len() != self.inputs.len() {
            return Err(Error::Shape {
                expected: format!("{} input values", self.inputs.len()),
                got: values.len().to_string(),
            });
        }
        let gadget_cut = match offset {
            Some(o) if o.is_negative() || *o > self.span.len() => {
                return Err(Error::CutOutOfRange(format!("offset {o} outside the span")));
            }
            Some(o) => Some(&self.span.lo + o),
            None => None,
        };
        // (interval, sign wanted at its left end, sign wanted at its right end)
        let mut items: Vec<(Interval, i8, i8)> = self
            .inputs
            .iter()
            .zip(values)
            .map(|(iv, &v)| (iv.clone(), v, v))
            .collect();
        let right = if gadget_cut.is_some() {
            -entering
        } else {
            entering
        };
        items.push((self.span.clone(), entering, right));
        items.sort_by(|a, b| a.0.lo.cmp(&b.0.lo));

        let mut cuts: Vec<Rational> = gadget_cut.into_iter().collect();
        let mut cur = 1i8;
        let mut bound = self.ambient.hi.clone();
        for (iv, left, right) in items.iter().rev() {
            if cur != *right {
                if iv.hi >= bound {
                    return Err(Error::Layout("constrained intervals are adjacent".into()));
                }
                cuts.push((&iv.hi + &bound) / Rational::from(2i64));
            }
            cur = *left;
            bound = iv.lo.clone();
        }
        CutSet::from_unsorted(cuts, self.ambient.clone())
    }

    pub fn evaluate(
        &self,
        values: &[i8],
        entering: i8,
        offset: Option<&Rational>,
    ) -> Result<GadgetOutcome> {
        let cuts = self.cuts(values, entering, offset)?;
        Ok(GadgetOutcome {
            discrepancy: signed_value(&self.agent.density, &cuts)?.abs(),
            output: cuts.pure_sign(&self.read),
        })
    }
}
