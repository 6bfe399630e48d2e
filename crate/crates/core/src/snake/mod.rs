//! Snake embedding: pad a dimension to width 3s+1, fold it into width s+3
//! plus a new dimension of width 8, and map solutions back.
//!
//! In the fold, column `j` of the folded dimension and row `m` of the new
//! dimension select either a cap or a snake cell that copies ray `t` of the
//! input. The outgoing arm uses rows 2–3, the return arm rows 4–5 and the
//! final arm rows 6–7. Cells of the lower layer get new coordinate +1, the
//! upper layer −1. The layer split inside each arm alternates so that the
//! antipodal image of a lower cell is always an upper cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tucker::{
    check_antipodality, full_mask, lemma_r_to_n, map_2dtucker_to_strong, Label, StrongSolution,
    StrongTuckerInstance, Tucker2D, TuckerPair,
};

/// Grids above this many cells are refused by the explicit pipeline.
pub const MAX_CELLS: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Pad,
    Fold,
    Pad16,
}

/// One pipeline stage. `dim` is 0-based in memory and 1-based on disk.
/// For pads, `s` is the fold parameter of the padded width.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub kind: StageKind,
    #[serde(with = "one_based")]
    pub dim: usize,
    pub s: usize,
    pub pad_counts: [usize; 2],
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = usize::deserialize(d)?;
        v.checked_sub(1)
            .ok_or_else(|| serde::de::Error::custom("dimensions are 1-based"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pipeline {
    pub records: Vec<FoldRecord>,
}

/// What a cell (j, m) of a folded dimension holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldCell {
    BottomCap,
    TopCap,
    Snake { t: usize, lower: bool },
}

/// Cell contents for fold parameter `s`, column `j ∈ [s+3]`, row `m ∈ [8]`.
pub fn fold_cell(s: usize, j: usize, m: usize) -> FoldCell {
    debug_assert!((1..=s + 3).contains(&j) && (1..=8).contains(&m));
    if (m == 1 && j <= s + 2) || (j == s + 3 && m <= 5) {
        return FoldCell::BottomCap;
    }
    if (m == 8 && j >= 2) || (j == 1 && m >= 4) {
        return FoldCell::TopCap;
    }
    let t = match m {
        2 | 3 if j <= s + 1 => j,
        2 | 3 => s + 1,
        4 | 5 if j == s + 2 => s + 2,
        4 | 5 if j >= 3 => 2 * s + 3 - j,
        4 | 5 => 2 * s,
        _ if j == 2 => 2 * s + 1,
        _ => 2 * s - 2 + j,
    };
    let lower = match m {
        2 => true,
        3 | 4 => j == s + 2,
        5 | 6 => j != 2,
        _ => false,
    };
    FoldCell::Snake { t, lower }
}

fn check_size(dims: &[usize]) -> Result<()> {
    match dims.iter().try_fold(1usize, |a, &m| a.checked_mul(m)) {
        Some(c) if c <= MAX_CELLS => Ok(()),
        _ => Err(Error::TooLarge(format!(
            "grid {dims:?} exceeds {MAX_CELLS} cells"
        ))),
    }
}

/// Copies `left` boundary rays before ray 1 and `right` after the last one.
pub fn pad_dim(
    inst: &StrongTuckerInstance,
    dim: usize,
    left: usize,
    right: usize,
) -> Result<StrongTuckerInstance> {
    let w = inst.dims()[dim];
    let mut dims = inst.dims().to_vec();
    dims[dim] = w + left + right;
    check_size(&dims)?;
    StrongTuckerInstance::from_fn(dims, |p| {
        let mut src = p.to_vec();
        src[dim] = (p[dim] as i64 - left as i64).clamp(1, w as i64) as usize;
        inst.label(&src)
    })
}

/// Number of rays copied on each side to reach the form 3s+1.
pub fn pad_amount(width: usize) -> usize {
    match width % 3 {
        1 => 0,
        2 => 1,
        _ => 2,
    }
}

/// Pads `dim` to width 3s+1 by copying boundary rays symmetrically.
pub fn pad_width(
    inst: &StrongTuckerInstance,
    dim: usize,
) -> Result<(StrongTuckerInstance, FoldRecord)> {
    let c = pad_amount(inst.dims()[dim]);
    let out = pad_dim(inst, dim, c, c)?;
    let s = (out.dims()[dim] - 1) / 3;
    Ok((
        out,
        FoldRecord {
            kind: StageKind::Pad,
            dim,
            s,
            pad_counts: [c, c],
        },
    ))
}

/// Folds `dim` (width 3s+1) into width s+3 and appends a width-8 dimension.
pub fn fold(inst: &StrongTuckerInstance, dim: usize) -> Result<(StrongTuckerInstance, FoldRecord)> {
    let w = inst.dims()[dim];
    if w % 3 != 1 || w < 4 {
        return Err(Error::PadFirst(w));
    }
    let s = (w - 1) / 3;
    let k = inst.n();
    let mut dims = inst.dims().to_vec();
    dims[dim] = s + 3;
    dims.push(8);
    check_size(&dims)?;
    let full = full_mask(k + 1);
    let out = StrongTuckerInstance::from_fn(dims, |p| match fold_cell(s, p[dim], p[k]) {
        FoldCell::BottomCap => full,
        FoldCell::TopCap => 0,
        FoldCell::Snake { t, lower } => {
            let mut src = p[..k].to_vec();
            src[dim] = t;
            inst.label(&src) | if lower { 1 << k } else { 0 }
        }
    })?;
    Ok((
        out,
        FoldRecord {
            kind: StageKind::Fold,
            dim,
            s,
            pad_counts: [0, 0],
        },
    ))
}

/// Applies one recorded stage.
pub fn apply(inst: &StrongTuckerInstance, rec: &FoldRecord) -> Result<StrongTuckerInstance> {
    if rec.dim >= inst.n() {
        return Err(Error::Format(format!(
            "stage dimension {} out of range",
            rec.dim + 1
        )));
    }
    match rec.kind {
        StageKind::Pad | StageKind::Pad16 => {
            pad_dim(inst, rec.dim, rec.pad_counts[0], rec.pad_counts[1])
        }
        StageKind::Fold => {
            let (out, got) = fold(inst, rec.dim)?;
            if got.s != rec.s {
                return Err(Error::Format(format!(
                    "fold record says s = {}, width gives {}",
                    rec.s, got.s
                )));
            }
            Ok(out)
        }
    }
}

fn reduce(pre: &StrongTuckerInstance, mut points: Vec<Vec<usize>>) -> Result<StrongSolution> {
    points.sort();
    points.dedup();
    let labels: Vec<Label> = points.iter().map(|p| pre.label(p)).collect();
    let keep = lemma_r_to_n(&labels, pre.n())?;
    Ok(StrongSolution {
        points: keep.into_iter().map(|i| points[i].clone()).collect(),
    })
}

/// Maps a solution of the stage output back to a solution of `pre`, the
/// stage input.
pub fn map_solution_back(
    rec: &FoldRecord,
    pre: &StrongTuckerInstance,
    sol: &StrongSolution,
) -> Result<StrongSolution> {
    let d = rec.dim;
    let points = match rec.kind {
        StageKind::Pad | StageKind::Pad16 => {
            let w = pre.dims()[d] as i64;
            sol.points
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    q[d] = (p[d] as i64 - rec.pad_counts[0] as i64).clamp(1, w) as usize;
                    q
                })
                .collect()
        }
        StageKind::Fold => {
            let k = pre.n();
            let mut out = Vec::with_capacity(sol.points.len());
            for p in &sol.points {
                match fold_cell(rec.s, p[d], p[k]) {
                    FoldCell::Snake { t, .. } => {
                        let mut q = p[..k].to_vec();
                        q[d] = t;
                        out.push(q);
                    }
                    _ => return Err(Error::CapPoint(p.clone())),
                }
            }
            out
        }
    };
    reduce(pre, points)
}

fn ensure_antipodal(inst: &StrongTuckerInstance) -> Result<()> {
    match check_antipodality(inst) {
        (true, _) => Ok(()),
        (false, w) => Err(Error::NotAntipodal(w.unwrap_or_default())),
    }
}

/// Pads and folds until every width is exactly 8.
pub fn pipeline_from_strong(
    inst: &StrongTuckerInstance,
) -> Result<(StrongTuckerInstance, Pipeline)> {
    ensure_antipodal(inst)?;
    let mut cur = inst.clone();
    let mut records = Vec::new();
    loop {
        let dims = cur.dims();
        let widest = (0..dims.len())
            .filter(|&i| dims[i] > 8)
            .max_by(|&a, &b| dims[a].cmp(&dims[b]).then(b.cmp(&a)));
        if let Some(d) = widest {
            let (padded, rec) = pad_width(&cur, d)?;
            if rec.pad_counts != [0, 0] {
                ensure_antipodal(&padded)?;
                records.push(rec);
            }
            let (folded, rec) = fold(&padded, d)?;
            ensure_antipodal(&folded)?;
            records.push(rec);
            cur = folded;
            continue;
        }
        let Some(d) = (0..dims.len()).find(|&i| dims[i] < 8) else {
            break;
        };
        let w = dims[d];
        if w % 2 == 1 {
            return Err(Error::ParityViolation {
                dim: d + 1,
                width: w,
            });
        }
        let c = (16 - w) / 2;
        let padded = pad_dim(&cur, d, c, c)?;
        ensure_antipodal(&padded)?;
        records.push(FoldRecord {
            kind: StageKind::Pad16,
            dim: d,
            s: 5,
            pad_counts: [c, c],
        });
        let (folded, rec) = fold(&padded, d)?;
        ensure_antipodal(&folded)?;
        records.push(rec);
        cur = folded;
    }
    Ok((cur, Pipeline { records }))
}

/// Tucker2D → 2D-StrongTucker → all widths 8.
pub fn pipeline_to_width8(t: &Tucker2D) -> Result<(StrongTuckerInstance, Pipeline)> {
    if !t.is_antipodal() {
        return Err(Error::NotAntipodal(vec![]));
    }
    pipeline_from_strong(&map_2dtucker_to_strong(t))
}

impl Pipeline {
    /// Every intermediate instance, starting with `input` and ending with the
    /// final one.
    pub fn replay(&self, input: &StrongTuckerInstance) -> Result<Vec<StrongTuckerInstance>> {
        let mut out = vec![input.clone()];
        for rec in &self.records {
            let next = apply(out.last().expect("nonempty"), rec)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Maps a solution of the final instance back to `input`.
    pub fn map_back(
        &self,
        input: &StrongTuckerInstance,
        sol: &StrongSolution,
    ) -> Result<StrongSolution> {
        let stages = self.replay(input)?;
        let mut cur = sol.clone();
        for (rec, pre) in self.records.iter().zip(&stages).rev() {
            cur = map_solution_back(rec, pre, &cur)?;
        }
        Ok(cur)
    }
}

/// Reads a back-mapped 2D solution as a Tucker2D pair.
pub fn to_tucker_pair(sol: &StrongSolution) -> Result<TuckerPair> {
    match sol.points.as_slice() {
        [p, q] if p.len() == 2 && q.len() == 2 => Ok(TuckerPair {
            p: [p[0], p[1]],
            q: [q[0], q[1]],
        }),
        _ => Err(Error::Format(format!(
            "expected two 2D points, got {:?}",
            sol.points
        ))),
    }
}
