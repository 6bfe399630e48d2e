use serde::{Deserialize, Serialize};

use super::{full_mask, linf, Label, StrongTuckerInstance};
use crate::error::{Error, Result};

/// At most N grid points, pairwise within L∞ distance 1, whose labels cover
/// every (coordinate, sign) pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrongSolution {
    pub points: Vec<Vec<usize>>,
}

/// Labels cover all labels: each coordinate takes both signs.
pub fn covers(labels: &[Label], n: usize) -> bool {
    let or = labels.iter().fold(0, |a, &l| a | l);
    let and = labels.iter().fold(full_mask(n), |a, &l| a & l);
    or == full_mask(n) && and == 0
}

/// Reduces a covering multiset of labels to at most `n` of them, returning
/// indices into `labels` in increasing order.
///
/// Starts from the first label and adds, for each coordinate, the earliest
/// label disagreeing with it there. If that gives N+1 labels, one of them can
/// be dropped; the first droppable one (in index order) is.
pub fn lemma_r_to_n(labels: &[Label], n: usize) -> Result<Vec<usize>> {
    if !covers(labels, n) {
        return Err(Error::NotACover);
    }
    if labels.len() <= n {
        return Ok((0..labels.len()).collect());
    }
    let z1 = labels[0];
    let mut picked = vec![0usize];
    for j in 0..n {
        let k = labels
            .iter()
            .position(|&l| (l ^ z1) >> j & 1 == 1)
            .expect("cover guarantees a flip partner");
        picked.push(k);
    }
    picked.sort_unstable();
    picked.dedup();
    if picked.len() <= n {
        return Ok(picked);
    }
    for drop in 0..picked.len() {
        let rest: Vec<Label> = picked
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, &k)| labels[k])
            .collect();
        if covers(&rest, n) {
            let mut out = picked.clone();
            out.remove(drop);
            return Ok(out);
        }
    }
    unreachable!("N+1 covering labels always have a covering N-subset")
}

/// Pairwise L∞ ≤ 1 and the labels cover all labels.
pub fn verify_strong_solution(inst: &StrongTuckerInstance, sol: &StrongSolution) -> Result<bool> {
    for p in &sol.points {
        inst.grid().check(p)?;
    }
    let close = sol
        .points
        .iter()
        .enumerate()
        .all(|(a, p)| sol.points[a + 1..].iter().all(|q| linf(p, q) <= 1));
    let labels: Vec<Label> = sol.points.iter().map(|p| inst.label(p)).collect();
    Ok(close && covers(&labels, inst.n()))
}

/// Scans every anchor cell {a_i, min(a_i + 1, m_i)} and yields the reduced
/// solution of each covering cell. Cells are visited in row-major order of
/// their anchor.
pub fn enumerate_strong_solutions(
    inst: &StrongTuckerInstance,
) -> impl Iterator<Item = StrongSolution> + '_ {
    let g = inst.grid();
    let n = inst.n();
    (0..g.size()).filter_map(move |idx| {
        let anchor = g.point(idx);
        let cell = cell_points(&anchor, g.dims());
        let labels: Vec<Label> = cell.iter().map(|p| inst.label(p)).collect();
        if !covers(&labels, n) {
            return None;
        }
        let keep = lemma_r_to_n(&labels, n).ok()?;
        Some(StrongSolution {
            points: keep.into_iter().map(|k| cell[k].clone()).collect(),
        })
    })
}

/// Distinct points of the cell anchored at `a`, in row-major order.
pub fn cell_points(a: &[usize], dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::with_capacity(a.len())];
    for (&x, &m) in a.iter().zip(dims) {
        let hi = (x + 1).min(m);
        let opts: &[usize] = if hi == x { &[x] } else { &[x, hi] };
        out = out
            .into_iter()
            .flat_map(|p| {
                opts.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}
