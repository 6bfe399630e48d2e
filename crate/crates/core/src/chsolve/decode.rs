use serde::{Deserialize, Serialize};

use super::{find_plan, synthesize, verify, SynthesisPlan, VerificationReport};
use crate::chbuild::{build_instance, build_instance_3block, CHInstance, Part, Variant};
use crate::circuit::{build_lambda_hat, phi_from_sum, signs_to_mask, StrongLabelTable};
use crate::error::{Error, Result};
use crate::numeric::{cuts_in_interior, interval_value, CutSet, Rational};
use crate::tucker::{
    lemma_r_to_n, linf, verify_strong_solution, Label, StrongSolution, StrongTuckerInstance,
};

/// Everything read off a cut set. Copy indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Cuts strictly inside each C̄^k.
    pub closure_cuts: Vec<usize>,
    /// Copies with at most 2m (3-block: 2m + N) cuts inside C̄^k.
    pub good: Vec<usize>,
    /// Cuts strictly inside the input region I.
    pub input_cuts: usize,
    /// φ(x^k) for every copy whose inputs are all pure.
    pub phi: Vec<Option<Vec<usize>>>,
    /// Output values y^k_i ∈ [−1, 1].
    pub outputs: Vec<Vec<Rational>>,
    /// Good copies with pure inputs and outputs: their decoded points and labels.
    pub decoded: Vec<(usize, Vec<usize>, Label)>,
    /// Pairwise ‖Δφ‖∞ ≤ 1 over the decoded copies.
    pub phi_close: bool,
    pub solution: StrongSolution,
}

fn sign_of(v: &Rational) -> Option<i8> {
    if *v == 1 {
        Some(1)
    } else if *v == -1 {
        Some(-1)
    } else {
        None
    }
}

/// Reads x^k, G, φ(x^k) and y^k from the cut set and reduces the labels of
/// the good copies to at most N points.
pub fn decode(inst: &CHInstance, cuts: &CutSet) -> Result<DecodeResult> {
    let layout = &inst.layout;
    let (n, kk, m) = (layout.n, layout.copies, layout.m);
    let threshold = match inst.variant {
        Variant::Standard => 2 * m,
        Variant::ThreeBlock => 2 * m + n,
    };
    let unit_cuts = cuts.scaled(&layout.unit.recip());
    let mut unit_layout = layout.clone();
    unit_layout.unit = Rational::one();
    let layout = &unit_layout;
    let cuts = &unit_cuts;

    let closure_cuts: Vec<usize> = (0..kk)
        .map(|k| {
            layout
                .closure_parts(k)
                .iter()
                .map(|p| cuts_in_interior(p, cuts))
                .sum()
        })
        .collect();
    let good: Vec<usize> = (0..kk).filter(|&k| closure_cuts[k] <= threshold).collect();
    let input_cuts = cuts_in_interior(&layout.input_region(), cuts);

    let mut phi = Vec::with_capacity(kk);
    let mut outputs = Vec::with_capacity(kk);
    for k in 0..kk {
        let mut point = Some(Vec::with_capacity(n));
        for i in 0..n {
            let mut sum = 0i64;
            for j in 0..7 * n {
                match sign_of(&interval_value(&layout.input(i, j, k), cuts)?) {
                    Some(s) => sum += i64::from(s),
                    None => point = None,
                }
            }
            if let Some(p) = point.as_mut() {
                p.push(phi_from_sum(n, sum));
            }
        }
        phi.push(point);
        let y = (0..n)
            .map(|i| match inst.variant {
                Variant::Standard => interval_value(&layout.gate(k, m - n + i, Part::C), cuts),
                Variant::ThreeBlock => {
                    interval_value(&layout.output(i, k, Part::C), cuts).map(|v| -v)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        outputs.push(y);
    }

    let mut decoded: Vec<(usize, Vec<usize>, Label)> = Vec::new();
    for &k in &good {
        let Some(p) = &phi[k] else { continue };
        let signs: Option<Vec<i8>> = outputs[k].iter().map(sign_of).collect();
        if let Some(signs) = signs {
            decoded.push((k, p.clone(), signs_to_mask(&signs)));
        }
    }
    let phi_close = decoded
        .iter()
        .enumerate()
        .all(|(a, (_, p, _))| decoded[a + 1..].iter().all(|(_, q, _)| linf(p, q) <= 1));

    let mut distinct: Vec<(Vec<usize>, Label)> = Vec::new();
    for (_, p, l) in &decoded {
        if !distinct.iter().any(|(q, ml)| q == p && ml == l) {
            distinct.push((p.clone(), *l));
        }
    }
    let labels: Vec<Label> = distinct.iter().map(|(_, l)| *l).collect();
    let keep = lemma_r_to_n(&labels, n).map_err(|_| Error::NoCoverExtracted)?;
    let solution = StrongSolution {
        points: keep.into_iter().map(|i| distinct[i].0.clone()).collect(),
    };

    Ok(DecodeResult {
        closure_cuts,
        good,
        input_cuts,
        phi,
        outputs,
        decoded,
        phi_close,
        solution,
    })
}

/// Outcome of build → plan → synthesize → verify → decode → check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub variant: Variant,
    pub num_agents: usize,
    pub gates: usize,
    pub plan: SynthesisPlan,
    pub verification: VerificationReport,
    pub decode: DecodeResult,
    pub solution_valid: bool,
}

pub fn roundtrip(
    lambda: &StrongLabelTable,
    variant: Variant,
    epsilon: &Rational,
) -> Result<RoundtripReport> {
    let circuit = build_lambda_hat(lambda)?;
    let inst = match variant {
        Variant::Standard => build_instance(&circuit, epsilon)?,
        Variant::ThreeBlock => build_instance_3block(&circuit, epsilon)?,
    };
    let plan = find_plan(lambda, &inst.layout)?;
    let cuts = synthesize(&inst, &plan)?;
    let verification = verify(&inst, &cuts)?;
    let decode = decode(&inst, &cuts)?;
    let tucker = StrongTuckerInstance::new(lambda.dims.clone(), lambda.labels.clone())?;
    let solution_valid = verify_strong_solution(&tucker, &decode.solution)?;
    Ok(RoundtripReport {
        variant,
        num_agents: inst.num_agents(),
        gates: inst.layout.m,
        plan,
        verification,
        decode,
        solution_valid,
    })
}
