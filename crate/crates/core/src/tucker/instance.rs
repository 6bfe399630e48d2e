use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{full_mask, negate_label, Grid, Label};
use crate::circuit::{mask_to_signs, signs_to_mask, StrongLabelTable};
use crate::error::{Error, Result};

/// Explicit labelling λ: grid → {-1,+1}^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongTuckerInstance {
    grid: Grid,
    labels: Vec<Label>,
}

impl StrongTuckerInstance {
    pub fn new(dims: Vec<usize>, labels: Vec<Label>) -> Result<Self> {
        let grid = Grid::new(dims)?;
        if labels.len() != grid.size() {
            return Err(Error::Shape {
                expected: format!("{} labels", grid.size()),
                got: format!("{}", labels.len()),
            });
        }
        let full = full_mask(grid.n());
        if let Some(l) = labels.iter().find(|&&l| l & !full != 0) {
            return Err(Error::Format(format!(
                "label mask {l:#b} has bits beyond N"
            )));
        }
        Ok(StrongTuckerInstance { grid, labels })
    }

    pub fn from_fn(dims: Vec<usize>, f: impl Fn(&[usize]) -> Label) -> Result<Self> {
        let grid = Grid::new(dims)?;
        let labels = grid.points().map(|p| f(&p)).collect();
        StrongTuckerInstance::new(grid.dims().to_vec(), labels)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        self.grid.dims()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, p: &[usize]) -> Label {
        self.labels[self.grid.index(p)]
    }

    pub fn label_signs(&self, p: &[usize]) -> Vec<i8> {
        mask_to_signs(self.label(p), self.n())
    }

    pub fn set_label(&mut self, p: &[usize], l: Label) {
        let i = self.grid.index(p);
        self.labels[i] = l;
    }

    pub fn label_table(&self) -> StrongLabelTable {
        StrongLabelTable {
            dims: self.dims().to_vec(),
            labels: self.labels.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    dims: Vec<usize>,
    labels: Vec<Vec<i8>>,
}

impl Serialize for StrongTuckerInstance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        InstanceRepr {
            dims: self.dims().to_vec(),
            labels: self.labels.iter().map(|&l| mask_to_signs(l, n)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StrongTuckerInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = InstanceRepr::deserialize(deserializer)?;
        let n = repr.dims.len();
        let mut labels = Vec::with_capacity(repr.labels.len());
        for v in &repr.labels {
            if v.len() != n || v.iter().any(|&s| s != 1 && s != -1) {
                return Err(D::Error::custom(format!(
                    "label {v:?} is not a ±1 vector of length {n}"
                )));
            }
            labels.push(signs_to_mask(v));
        }
        StrongTuckerInstance::new(repr.dims, labels).map_err(D::Error::custom)
    }
}

/// First boundary point (row-major order) whose antipode does not carry the
/// negated label, if any.
pub fn check_antipodality(inst: &StrongTuckerInstance) -> (bool, Option<Vec<usize>>) {
    let g = inst.grid();
    let n = inst.n();
    for p in g.points() {
        if g.is_boundary(&p) && inst.label(&g.antipode(&p)) != negate_label(inst.label(&p), n) {
            return (false, Some(p));
        }
    }
    (true, None)
}

/// Deterministic antipodal instance: boundary labels are drawn for the first
/// point of each antipodal pair and mirrored, interior labels are free.
pub fn random_antipodal_instance(dims: &[usize], seed: u64) -> Result<StrongTuckerInstance> {
    let grid = Grid::new(dims.to_vec())?;
    let n = grid.n();
    let full = full_mask(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<Label> = vec![0; grid.size()];
    for idx in 0..grid.size() {
        let p = grid.point(idx);
        let twin = grid.index(&grid.antipode(&p));
        labels[idx] = if grid.is_boundary(&p) && twin < idx {
            negate_label(labels[twin], n)
        } else {
            rng.gen::<u64>() & full
        };
    }
    StrongTuckerInstance::new(dims.to_vec(), labels)
}

/// Two-dimensional Tucker instance with labels in {-2,-1,+1,+2}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tucker2D {
    pub m: usize,
    /// Row-major: entry (i−1)·m + (j−1) is λ(i, j).
    pub labels: Vec<i8>,
}

/// Two adjacent points with opposite labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuckerPair {
    pub p: [usize; 2],
    pub q: [usize; 2],
}

impl Tucker2D {
    pub fn new(m: usize, labels: Vec<i8>) -> Result<Self> {
        if m < 2 || labels.len() != m * m {
            return Err(Error::Shape {
                expected: format!("{} labels, m >= 2", m * m),
                got: labels.len().to_string(),
            });
        }
        if let Some(l) = labels.iter().find(|&&l| !matches!(l, -2 | -1 | 1 | 2)) {
            return Err(Error::Format(format!("label {l} not in {{-2,-1,1,2}}")));
        }
        Ok(Tucker2D { m, labels })
    }

    pub fn label(&self, i: usize, j: usize) -> i8 {
        self.labels[(i - 1) * self.m + (j - 1)]
    }

    /// Boundary condition λ(i,1) = −λ(m−i+1,m) and λ(1,j) = −λ(m,m−j+1).
    pub fn is_antipodal(&self) -> bool {
        let m = self.m;
        (1..=m).all(|i| self.label(i, 1) == -self.label(m - i + 1, m))
            && (1..=m).all(|j| self.label(1, j) == -self.label(m, m - j + 1))
    }

    pub fn is_solution(&self, pair: &TuckerPair) -> bool {
        let inside = |p: &[usize; 2]| p.iter().all(|&x| (1..=self.m).contains(&x));
        inside(&pair.p)
            && inside(&pair.q)
            && pair.p[0].abs_diff(pair.q[0]) <= 1
            && pair.p[1].abs_diff(pair.q[1]) <= 1
            && self.label(pair.p[0], pair.p[1]) == -self.label(pair.q[0], pair.q[1])
    }

    /// All solution pairs with `p` before `q` in row-major order.
    pub fn solutions(&self) -> Vec<TuckerPair> {
        let m = self.m;
        let mut out = Vec::new();
        for i in 1..=m {
            for j in 1..=m {
                for (di, dj) in [(0, 1), (1, 0), (1, 1), (1, -1)] {
                    let (i2, j2) = (i as i64 + di, j as i64 + dj);
                    if i2 < 1 || j2 < 1 || i2 > m as i64 || j2 > m as i64 {
                        continue;
                    }
                    let pair = TuckerPair {
                        p: [i, j],
                        q: [i2 as usize, j2 as usize],
                    };
                    if self.is_solution(&pair) {
                        out.push(pair);
                    }
                }
            }
        }
        out
    }
}

pub fn label_2d_to_mask(l: i8) -> Label {
    match l {
        2 => 0b11,
        -2 => 0b00,
        1 => 0b01,
        _ => 0b10,
    }
}

/// +2 → (+,+), −2 → (−,−), +1 → (+,−), −1 → (−,+).
pub fn map_2dtucker_to_strong(t: &Tucker2D) -> StrongTuckerInstance {
    let labels = t.labels.iter().map(|&l| label_2d_to_mask(l)).collect();
    StrongTuckerInstance::new(vec![t.m, t.m], labels).expect("valid Tucker2D shape")
}

/// Random antipodal Tucker2D instance, deterministic per seed.
pub fn random_tucker2d(m: usize, seed: u64) -> Result<Tucker2D> {
    if m < 2 {
        return Err(Error::Grid(format!("side length {m} < 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ALPHABET: [i8; 4] = [-2, -1, 1, 2];
    let mut labels = vec![0i8; m * m];
    for i in 1..=m {
        for j in 1..=m {
            let idx = (i - 1) * m + (j - 1);
            let twin = (m - i) * m + (m - j);
            let boundary = i == 1 || j == 1 || i == m || j == m;
            labels[idx] = if boundary && twin < idx {
                -labels[twin]
            } else {
                ALPHABET[rng.gen_range(0..4)]
            };
        }
    }
    Tucker2D::new(m, labels)
}
