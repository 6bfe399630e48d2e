use crate::error::{Error, Result};
use crate::numeric::{signed_value, CutSet, Interval, PiecewiseDensity, Rational};

pub const TINY_MAX_AGENTS: usize = 3;
pub const TINY_MAX_BLOCKS: usize = 24;

/// Reduced row echelon form of [A | b]; `None` when inconsistent.
/// Returns the reduced rows and the pivot column of each.
fn rref(mut rows: Vec<Vec<Rational>>, cols: usize) -> Option<(Vec<Vec<Rational>>, Vec<usize>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=cols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    rows.truncate(r);
    Some((rows, pivots))
}

/// Next non-decreasing index sequence over `0..cells`, in lexicographic order.
fn advance(seq: &mut [usize], cells: usize) -> bool {
    for pos in (0..seq.len()).rev() {
        if seq[pos] + 1 < cells {
            seq[pos] += 1;
            for later in pos + 1..seq.len() {
                seq[later] = seq[pos];
            }
            return true;
        }
    }
    false
}

/// Exact consensus halving (all discrepancies 0) for at most three agents
/// with at most 24 blocks in total, using as few cuts as possible.
///
/// For a fixed assignment of cuts to the cells between density breakpoints
/// every signed value is affine in the cut positions, so each assignment is
/// a small linear system. Free variables try the ends and midpoint of their
/// cell.
pub fn solve_tiny(agents: &[PiecewiseDensity], ambient: &Interval) -> Result<CutSet> {
    let blocks: usize = agents.iter().map(|a| a.blocks().len()).sum();
    if agents.len() > TINY_MAX_AGENTS || blocks > TINY_MAX_BLOCKS {
        return Err(Error::TooLarge(format!(
            "{} agents with {blocks} blocks",
            agents.len()
        )));
    }
    let mut pts = vec![ambient.lo.clone(), ambient.hi.clone()];
    for a in agents {
        for b in a.blocks() {
            if !ambient.contains_interval(&b.interval) {
                return Err(Error::CutOutOfRange(format!(
                    "block at {} outside the ambient interval",
                    b.interval.lo
                )));
            }
            pts.push(b.interval.lo.clone());
            pts.push(b.interval.hi.clone());
        }
    }
    pts.sort();
    pts.dedup();
    let cells: Vec<Interval> = pts
        .windows(2)
        .map(|w| Interval::new(w[0].clone(), w[1].clone()).expect("sorted"))
        .collect();
    // height[a][c] on cell c, and cumulative mass cum[a][c] up to its left end
    let height: Vec<Vec<Rational>> = agents
        .iter()
        .map(|a| {
            cells
                .iter()
                .map(|cell| {
                    a.blocks()
                        .iter()
                        .find(|b| b.interval.contains_interval(cell))
                        .map(|b| b.height.clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect()
        })
        .collect();
    let cum: Vec<Vec<Rational>> = height
        .iter()
        .map(|h| {
            let mut acc = Rational::zero();
            let mut out = Vec::with_capacity(cells.len());
            for (c, cell) in cells.iter().enumerate() {
                out.push(acc.clone());
                acc += &h[c] * cell.len();
            }
            out
        })
        .collect();
    let mass: Vec<Rational> = agents.iter().map(|a| a.total_mass()).collect();
    let two = Rational::from(2i64);

    for count in 0..=agents.len() {
        let mut seq = vec![0usize; count];
        loop {
            // D_a = mass_a + Σ_j 2·σ_j·F_a(x_j), σ_j the sign just left of cut j
            let mut rows = Vec::with_capacity(agents.len());
            for a in 0..agents.len() {
                let mut row = Vec::with_capacity(count + 1);
                let mut rhs = -mass[a].clone();
                for (j, &c) in seq.iter().enumerate() {
                    let sigma = if (count - j) % 2 == 0 {
                        two.clone()
                    } else {
                        -two.clone()
                    };
                    row.push(&sigma * &height[a][c]);
                    rhs -= &(&sigma * &(&cum[a][c] - &(&height[a][c] * &cells[c].lo)));
                }
                row.push(rhs);
                rows.push(row);
            }
            if let Some(found) = try_system(rows, &seq, &cells, ambient, agents) {
                return Ok(found);
            }
            if count == 0 || !advance(&mut seq, cells.len()) {
                break;
            }
        }
    }
    Err(Error::Synthesis("no exact solution found".into()))
}

fn try_system(
    rows: Vec<Vec<Rational>>,
    seq: &[usize],
    cells: &[Interval],
    ambient: &Interval,
    agents: &[PiecewiseDensity],
) -> Option<CutSet> {
    let count = seq.len();
    let (reduced, pivots) = rref(rows, count)?;
    let free: Vec<usize> = (0..count).filter(|c| !pivots.contains(c)).collect();
    let choices = 3usize.pow(free.len() as u32);
    for code in 0..choices {
        let mut x = vec![Rational::zero(); count];
        let mut c = code;
        for &f in &free {
            let cell = &cells[seq[f]];
            x[f] = match c % 3 {
                0 => cell.lo.clone(),
                1 => cell.midpoint(),
                _ => cell.hi.clone(),
            };
            c /= 3;
        }
        for (row, &p) in reduced.iter().zip(&pivots) {
            let mut v = row[count].clone();
            for &f in &free {
                v -= &(&row[f] * &x[f]);
            }
            x[p] = v;
        }
        let in_cells = x.iter().zip(seq).all(|(v, &c)| cells[c].contains(v));
        let increasing = x.windows(2).all(|w| w[0] < w[1]);
        if !in_cells || !increasing {
            continue;
        }
        let Ok(cuts) = CutSet::new(x, ambient.clone()) else {
            continue;
        };
        if agents
            .iter()
            .all(|a| signed_value(a, &cuts).map(|v| v.is_zero()).unwrap_or(false))
        {
            return Some(cuts);
        }
    }
    None
}
