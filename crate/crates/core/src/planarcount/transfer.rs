//! Column transfer matrix for perfect matchings of graphs on a torus.
//! Vertices are grouped by the first label coordinate; edges whose shift
//! moves one column forward cross to the next column.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graphkit::UndirectedGraph;

pub const DEFAULT_WIDTH_CAP: usize = 12;

struct Column {
    /// intra-column neighbours (local index, multiplicity)
    intra: Vec<Vec<(usize, u32)>>,
    /// forward neighbours in the next column
    forward: Vec<Vec<(usize, u32)>>,
}

/// Exact number of perfect matchings. Each vertex label must carry
/// coordinates and each non-loop edge a shift.
pub fn count_toral_matchings(g: &UndirectedGraph, width_cap: usize) -> Result<BigUint> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(BigUint::one());
    }
    let mut col = Vec::with_capacity(n);
    for l in &g.labels {
        let c = l.coords().ok_or_else(|| Error::Structure(format!("vertex {l} has no coordinates")))?;
        if c[0] < 0 {
            return Err(Error::Structure("negative column coordinate".into()));
        }
        col.push(c[0] as usize);
    }
    let ncol = col.iter().copied().max().unwrap() + 1;
    let mut local = vec![0; n];
    let mut sizes = vec![0; ncol];
    for v in 0..n {
        local[v] = sizes[col[v]];
        sizes[col[v]] += 1;
    }
    if sizes.iter().any(|&s| s > 63) {
        return Err(Error::Capacity("a column has more than 63 vertices".into()));
    }
    let mut cols: Vec<Column> = sizes
        .iter()
        .map(|&s| Column { intra: vec![Vec::new(); s], forward: vec![Vec::new(); s] })
        .collect();
    for e in &g.edges {
        if e.is_loop() {
            continue;
        }
        let shift = e.shift.as_ref().ok_or_else(|| Error::Structure("edge without shift".into()))?;
        let r = shift[0].rem_euclid(ncol as i64) as usize;
        let (a, b) = (e.a, e.b);
        if ncol == 1 || r == 0 {
            if col[a] != col[b] {
                return Err(Error::Structure("edge shift disagrees with columns".into()));
            }
            cols[col[a]].intra[local[a]].push((local[b], e.mult));
            cols[col[a]].intra[local[b]].push((local[a], e.mult));
        } else if r == 1 || r == ncol - 1 {
            let (from, to) = if r == 1 { (a, b) } else { (b, a) };
            if (col[from] + 1) % ncol != col[to] {
                return Err(Error::Structure("edge shift disagrees with columns".into()));
            }
            cols[col[from]].forward[local[from]].push((local[to], e.mult));
        } else {
            return Err(Error::Structure("edge jumps over a column".into()));
        }
    }
    let receivable = |c: usize| -> u64 {
        let prev = &cols[(c + ncol - 1) % ncol];
        prev.forward.iter().flatten().fold(0u64, |m, &(j, _)| m | 1 << j)
    };
    let width = (0..ncol).map(|c| receivable(c).count_ones() as usize).max().unwrap_or(0);
    if width > width_cap {
        return Err(Error::Capacity(format!("transfer width {width} exceeds cap {width_cap}")));
    }

    let mut memo: Vec<HashMap<u64, Vec<(u64, BigUint)>>> = vec![HashMap::new(); ncol];
    let start_mask = receivable(0);
    let mut states: BTreeMap<(u64, u64), BigUint> = BTreeMap::new();
    let mut sub = start_mask;
    loop {
        states.insert((sub, sub), BigUint::one());
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & start_mask;
    }
    for c in 0..ncol {
        let mut next: BTreeMap<(u64, u64), BigUint> = BTreeMap::new();
        for ((s0, cur), count) in states {
            let trans = memo[c].entry(cur).or_insert_with(|| transitions(&cols[c], cur));
            for (out, w) in trans.iter() {
                *next.entry((s0, *out)).or_insert_with(BigUint::zero) += &count * w;
            }
        }
        states = next;
    }
    Ok(states
        .into_iter()
        .filter(|((s0, cur), _)| s0 == cur)
        .map(|(_, c)| c)
        .sum())
}

/// All ways to finish column vertices not yet matched (`used`), as
/// (mask of next-column vertices taken, weight).
fn transitions(col: &Column, used: u64) -> Vec<(u64, BigUint)> {
    let mut out: BTreeMap<u64, BigUint> = BTreeMap::new();
    let size = col.intra.len();
    fn go(col: &Column, size: usize, used: u64, next: u64, w: BigUint, out: &mut BTreeMap<u64, BigUint>) {
        let Some(v) = (0..size).find(|&v| used & (1 << v) == 0) else {
            *out.entry(next).or_insert_with(BigUint::zero) += w;
            return;
        };
        let used = used | 1 << v;
        for &(u, m) in &col.intra[v] {
            if used & (1 << u) == 0 {
                go(col, size, used | 1 << u, next, &w * m, out);
            }
        }
        for &(j, m) in &col.forward[v] {
            if next & (1 << j) == 0 {
                go(col, size, used, next | 1 << j, &w * m, out);
            }
        }
    }
    go(col, size, used, 0, BigUint::one(), &mut out);
    out.into_iter().collect()
}
