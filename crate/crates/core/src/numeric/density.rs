use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` of the line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Density(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    /// Caller guarantees `lo <= hi`.
    pub(crate) fn raw(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn unit_at(lo: Rational) -> Self {
        let hi = &lo + Rational::one();
        Interval { lo, hi }
    }

    pub fn len(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from(2i64)
    }

    pub fn contains(&self, p: &Rational) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn interior_contains(&self, p: &Rational) -> bool {
        &self.lo < p && p < &self.hi
    }

    /// Sub-interval of length `len` centred on `center`.
    pub fn centered(center: &Rational, len: &Rational) -> Self {
        let half = len / Rational::from(2i64);
        Interval {
            lo: center - &half,
            hi: center + &half,
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Interval {
            lo: &self.lo * factor,
            hi: &self.hi * factor,
        }
    }
}

/// A constant-density piece: `height` mass per unit length over `interval`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    #[serde(flatten)]
    pub interval: Interval,
    pub height: Rational,
}

impl Block {
    pub fn new(interval: Interval, height: Rational) -> Result<Self> {
        if height.is_negative() {
            return Err(Error::Density(format!("negative height {height}")));
        }
        if height.is_positive() && interval.lo == interval.hi {
            return Err(Error::Density(format!(
                "degenerate block at {}",
                interval.lo
            )));
        }
        Ok(Block { interval, height })
    }

    pub fn mass(&self) -> Rational {
        &self.height * self.interval.len()
    }
}

/// Piecewise-constant density stored as maximal disjoint blocks, sorted by
/// position. Adjacent blocks of equal height are merged and zero blocks are
/// dropped, so the block count is a syntactic property of the valuation.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Block>", into = "Vec<Block>")]
pub struct PiecewiseDensity {
    blocks: Vec<Block>,
}

impl PiecewiseDensity {
    pub fn new(mut blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            if b.height.is_negative() || b.interval.lo > b.interval.hi {
                return Err(Error::Density(format!("invalid block {b:?}")));
            }
            if b.height.is_positive() && b.interval.lo == b.interval.hi {
                return Err(Error::Density(format!("degenerate block {b:?}")));
            }
        }
        blocks.retain(|b| b.height.is_positive());
        blocks.sort_by(|a, b| a.interval.lo.cmp(&b.interval.lo));
        let mut merged: Vec<Block> = Vec::with_capacity(blocks.len());
        for b in blocks {
            if let Some(last) = merged.last_mut() {
                if b.interval.lo < last.interval.hi {
                    return Err(Error::Density(format!(
                        "overlapping blocks at {} and {}",
                        last.interval.lo, b.interval.lo
                    )));
                }
                if b.interval.lo == last.interval.hi && b.height == last.height {
                    last.interval.hi = b.interval.hi;
                    continue;
                }
            }
            merged.push(b);
        }
        Ok(PiecewiseDensity { blocks: merged })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn total_mass(&self) -> Rational {
        self.blocks.iter().map(Block::mass).sum()
    }

    /// Maximal blocks all share one height and there are at most three of them.
    pub fn is_three_block_uniform(&self) -> bool {
        self.blocks.len() <= 3 && self.blocks.windows(2).all(|w| w[0].height == w[1].height)
    }

    /// Smallest interval containing every block, if any.
    pub fn support(&self) -> Option<Interval> {
        let first = self.blocks.first()?;
        let last = self.blocks.last()?;
        Some(Interval::raw(
            first.interval.lo.clone(),
            last.interval.hi.clone(),
        ))
    }

    /// Rescale positions by `factor`, keeping every block's mass.
    pub fn scaled(&self, factor: &Rational) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                interval: b.interval.scaled(factor),
                height: &b.height / factor,
            })
            .collect();
        PiecewiseDensity { blocks }
    }
}

impl TryFrom<Vec<Block>> for PiecewiseDensity {
    type Error = Error;
    fn try_from(blocks: Vec<Block>) -> Result<Self> {
        PiecewiseDensity::new(blocks)
    }
}

impl From<PiecewiseDensity> for Vec<Block> {
    fn from(d: PiecewiseDensity) -> Self {
        d.blocks
    }
}

/// Total mass Σ height·length, exact.
pub fn total_mass(d: &PiecewiseDensity) -> Rational {
    d.total_mass()
}
