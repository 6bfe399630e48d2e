//! Exact rational arithmetic, intervals, piecewise-constant densities and
//! cut sets.

mod cuts;
mod density;
mod rational;

pub use cuts::{cuts_in_interior, interval_value, signed_value, CutSet};
pub use density::{total_mass, Block, Interval, PiecewiseDensity};
pub use rational::{q, Rational};
