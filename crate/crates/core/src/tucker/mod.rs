//! Tucker grids: antipodal labellings, StrongTucker solutions, the
//! r-to-N extraction and brute-force enumeration.
//!
//! Points are 1-based coordinate vectors. A label in {-1,+1}^N is a bitmask
//! with bit i set when coordinate i is +1.

mod instance;
mod solve;

pub use instance::{
    check_antipodality, label_2d_to_mask, map_2dtucker_to_strong, random_antipodal_instance,
    random_tucker2d, StrongTuckerInstance, Tucker2D, TuckerPair,
};
pub use solve::{
    cell_points, covers, enumerate_strong_solutions, lemma_r_to_n, verify_strong_solution,
    StrongSolution,
};

use crate::error::{Error, Result};

pub type Label = u64;

pub fn full_mask(n: usize) -> Label {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn negate_label(l: Label, n: usize) -> Label {
    !l & full_mask(n)
}

/// Row-major grid [m_1] × … × [m_N]; the last coordinate varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    dims: Vec<usize>,
    size: usize,
}

impl Grid {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 64 {
            return Err(Error::Grid(format!(
                "dimension count {} not in 1..=64",
                dims.len()
            )));
        }
        if let Some(&m) = dims.iter().find(|&&m| m < 2) {
            return Err(Error::Grid(format!("side length {m} < 2")));
        }
        let size = dims
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| Error::TooLarge(format!("grid {dims:?}")))?;
        Ok(Grid { dims, size })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, p: &[usize]) -> bool {
        p.len() == self.dims.len() && p.iter().zip(&self.dims).all(|(&x, &m)| x >= 1 && x <= m)
    }

    pub fn check(&self, p: &[usize]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutOfGrid(p.to_vec()))
        }
    }

    /// Row-major index of an in-grid point.
    pub fn index(&self, p: &[usize]) -> usize {
        p.iter()
            .zip(&self.dims)
            .fold(0, |idx, (&x, &m)| idx * m + (x - 1))
    }

    pub fn point(&self, mut idx: usize) -> Vec<usize> {
        let mut p = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            p[k] = idx % self.dims[k] + 1;
            idx /= self.dims[k];
        }
        p
    }

    pub fn antipode(&self, p: &[usize]) -> Vec<usize> {
        p.iter().zip(&self.dims).map(|(&x, &m)| m - x + 1).collect()
    }

    pub fn is_boundary(&self, p: &[usize]) -> bool {
        p.iter().zip(&self.dims).any(|(&x, &m)| x == 1 || x == m)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size).map(move |i| self.point(i))
    }
}

/// Largest coordinate difference between two points.
pub fn linf(a: &[usize], b: &[usize]) -> usize {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.abs_diff(y))
        .max()
        .unwrap_or(0)
}
