//! Solving and checking CH instances: exact verification, the constructive
//! synthesizer, decoding a cut set back to a StrongTucker solution, and a
//! brute-force solver for tiny instances.

mod decode;
mod synth;
mod tiny;

use serde::{Deserialize, Serialize};

pub use decode::{decode, roundtrip, DecodeResult, RoundtripReport};
pub use synth::{find_plan, synthesize, synthesize_cuts, SynthesisPlan};
pub use tiny::{solve_tiny, TINY_MAX_AGENTS, TINY_MAX_BLOCKS};

use crate::chbuild::CHInstance;
use crate::error::{Error, Result};
use crate::numeric::{signed_value, CutSet, Rational};

/// On-disk cut set: `{"cuts": ["p/q", ...]}` on the instance's ambient
/// interval with the rightmost region positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub cuts: Vec<Rational>,
}

impl Solution {
    pub fn from_cuts(cuts: &CutSet) -> Self {
        Solution {
            cuts: cuts.cuts().to_vec(),
        }
    }

    pub fn to_cuts(&self, inst: &CHInstance) -> Result<CutSet> {
        CutSet::new(self.cuts.clone(), inst.layout.ambient())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub num_cuts: usize,
    pub num_agents: usize,
    pub epsilon: Rational,
    pub max_discrepancy: Rational,
    /// Agent with the largest discrepancy (0-based), if any agent exists.
    pub worst_agent: Option<usize>,
    /// Agents whose discrepancy exceeds ε (0-based).
    pub violations: Vec<usize>,
    pub discrepancies: Vec<Rational>,
}

/// Exact check that at most n cuts give every agent |v(R⁺) − v(R⁻)| ≤ ε.
pub fn verify(inst: &CHInstance, cuts: &CutSet) -> Result<VerificationReport> {
    if *cuts.ambient() != inst.layout.ambient() {
        return Err(Error::CutOutOfRange(format!(
            "cut set lives on [{}, {}], instance on [{}, {}]",
            cuts.ambient().lo,
            cuts.ambient().hi,
            inst.layout.ambient().lo,
            inst.layout.ambient().hi
        )));
    }
    let discrepancies = inst
        .agents
        .iter()
        .map(|a| signed_value(&a.density, cuts).map(|v| v.abs()))
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<usize> = discrepancies
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > inst.epsilon)
        .map(|(i, _)| i)
        .collect();
    let worst_agent = discrepancies
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i);
    let max_discrepancy = worst_agent
        .map(|i| discrepancies[i].clone())
        .unwrap_or_else(Rational::zero);
    let num_cuts = cuts.len();
    Ok(VerificationReport {
        ok: violations.is_empty() && num_cuts <= inst.num_agents(),
        num_cuts,
        num_agents: inst.num_agents(),
        epsilon: inst.epsilon.clone(),
        max_discrepancy,
        worst_agent,
        violations,
        discrepancies,
    })
}
