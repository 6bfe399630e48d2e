use super::{Interval, PiecewiseDensity, Rational};
use crate::error::{Error, Result};

/// Strictly increasing cut positions inside an ambient interval `R`.
///
/// A point `p` has sign `rightmost_sign · (-1)^(#cuts > p)`. Regions are
/// treated as half-open, so endpoint conventions only affect measure-zero
/// sets and never change a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    cuts: Vec<Rational>,
    ambient: Interval,
    rightmost_sign: i8,
}

impl CutSet {
    pub fn new(cuts: Vec<Rational>, ambient: Interval) -> Result<Self> {
        for c in &cuts {
            if !ambient.contains(c) {
                return Err(Error::CutOutOfRange(c.to_string()));
            }
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedCuts);
        }
        Ok(CutSet {
            cuts,
            ambient,
            rightmost_sign: 1,
        })
    }

    /// Sorts the positions first; duplicates are still rejected.
    pub fn from_unsorted(mut cuts: Vec<Rational>, ambient: Interval) -> Result<Self> {
        cuts.sort();
        CutSet::new(cuts, ambient)
    }

    pub fn cuts(&self) -> &[Rational] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn ambient(&self) -> &Interval {
        &self.ambient
    }

    pub fn rightmost_sign(&self) -> i8 {
        self.rightmost_sign
    }

    /// Same cuts with R⁺ and R⁻ swapped.
    pub fn flipped(&self) -> Self {
        CutSet {
            rightmost_sign: -self.rightmost_sign,
            ..self.clone()
        }
    }

    pub fn without(&self, index: usize) -> Self {
        let mut cuts = self.cuts.clone();
        cuts.remove(index);
        CutSet {
            cuts,
            ..self.clone()
        }
    }

    /// Number of cuts strictly greater than `p`.
    pub fn count_greater(&self, p: &Rational) -> usize {
        self.cuts.len() - self.cuts.partition_point(|c| c <= p)
    }

    /// Sign (+1/-1) of points just to the right of `p`.
    pub fn sign_right_of(&self, p: &Rational) -> i8 {
        if self.count_greater(p) % 2 == 0 {
            self.rightmost_sign
        } else {
            -self.rightmost_sign
        }
    }

    /// Cuts lying strictly inside `(lo, hi)`.
    pub fn interior_cuts(&self, j: &Interval) -> &[Rational] {
        let start = self.cuts.partition_point(|c| c <= &j.lo);
        let end = self.cuts.partition_point(|c| c < &j.hi);
        if start >= end {
            &[]
        } else {
            &self.cuts[start..end]
        }
    }

    /// μ(J ∩ R⁺) − μ(J ∩ R⁻) for an arbitrary interval `J`.
    pub fn signed_length(&self, j: &Interval) -> Rational {
        let inner = self.interior_cuts(j);
        let mut sign = self.sign_right_of(&j.lo);
        let mut acc = Rational::zero();
        let mut prev = j.lo.clone();
        for c in inner.iter().chain(std::iter::once(&j.hi)) {
            let seg = c - &prev;
            if sign > 0 {
                acc += seg;
            } else {
                acc -= &seg;
            }
            sign = -sign;
            prev = c.clone();
        }
        acc
    }

    /// Sign of `J` when no cut lies in its interior; `None` otherwise.
    pub fn pure_sign(&self, j: &Interval) -> Option<i8> {
        if self.interior_cuts(j).is_empty() {
            Some(self.sign_right_of(&j.lo))
        } else {
            None
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        CutSet {
            cuts: self.cuts.iter().map(|c| c * factor).collect(),
            ambient: self.ambient.scaled(factor),
            rightmost_sign: self.rightmost_sign,
        }
    }
}

/// v(R⁺) − v(R⁻) for density `d` under cut set `s`, exact.
pub fn signed_value(d: &PiecewiseDensity, s: &CutSet) -> Result<Rational> {
    let mut acc = Rational::zero();
    for b in d.blocks() {
        if !s.ambient().contains_interval(&b.interval) {
            return Err(Error::CutOutOfRange(format!(
                "block [{}, {}] outside ambient [{}, {}]",
                b.interval.lo,
                b.interval.hi,
                s.ambient().lo,
                s.ambient().hi
            )));
        }
        acc += &b.height * s.signed_length(&b.interval);
    }
    Ok(acc)
}

/// val_S(J) for a unit-length interval `J`; lies in `[-1, 1]`.
pub fn interval_value(j: &Interval, s: &CutSet) -> Result<Rational> {
    if j.len() != 1 {
        return Err(Error::NonUnitInterval(j.len().to_string()));
    }
    Ok(s.signed_length(j))
}

/// Number of cuts strictly inside `J`; cuts at the endpoints are not counted.
pub fn cuts_in_interior(j: &Interval, s: &CutSet) -> usize {
    s.interior_cuts(j).len()
}
