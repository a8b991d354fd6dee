//! Backtracking over displacement fields with an injectivity constraint.

use num_bigint::BigUint;

use super::{add, BoxShape, RestrictingSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Targets must stay inside the box.
    Box,
    /// Targets wrap around the torus.
    Torus,
}

/// Enumerates bijective displacement fields on a box or torus. Cells are
/// visited in index order and displacements in the stored order of A.
#[derive(Clone, Debug)]
pub struct FieldSearch {
    /// (displacement index, target cell) per cell
    choices: Vec<Vec<(usize, usize)>>,
    /// targets whose last possible preimage is this cell
    closing: Vec<Vec<usize>>,
    orphan_target: bool,
}

impl FieldSearch {
    pub fn new(set: &RestrictingSet, shape: &BoxShape, mode: SearchMode) -> Self {
        let n = shape.volume();
        let mut choices = Vec::with_capacity(n);
        for i in 0..n {
            let c = shape.coord(i);
            let mut row = Vec::new();
            for (k, a) in set.vectors().iter().enumerate() {
                let p = add(&c, a);
                let t = match mode {
                    SearchMode::Box => shape.index(&p),
                    SearchMode::Torus => Some(shape.wrap_index(&p)),
                };
                if let Some(t) = t {
                    row.push((k, t));
                }
            }
            choices.push(row);
        }
        Self::from_choices(n, choices)
    }

    /// Generic form: `choices[i]` lists (label, target) options for cell i.
    pub fn from_choices(targets: usize, choices: Vec<Vec<(usize, usize)>>) -> Self {
        let mut last = vec![None; targets];
        for (i, row) in choices.iter().enumerate() {
            for &(_, t) in row {
                last[t] = Some(i);
            }
        }
        let mut closing = vec![Vec::new(); choices.len()];
        let mut orphan_target = targets != choices.len();
        for (t, l) in last.iter().enumerate() {
            match l {
                Some(i) => closing[*i].push(t),
                None => orphan_target = true,
            }
        }
        Self { choices, closing, orphan_target }
    }

    /// Number of bijective fields. `budget` bounds visited search nodes.
    pub fn count(&self, budget: u64) -> Result<BigUint> {
        let mut total = 0u128;
        self.for_each(budget, |_| total += 1)?;
        Ok(BigUint::from(total))
    }

    /// Calls `visit` with every bijective field (values are labels).
    /// Returns the number of search nodes used.
    pub fn for_each(&self, budget: u64, mut visit: impl FnMut(&[usize])) -> Result<u64> {
        if self.orphan_target {
            return Ok(0);
        }
        let n = self.choices.len();
        let mut used = vec![false; n];
        let mut field = vec![0usize; n];
        let mut nodes = 0u64;
        self.descend(0, &mut used, &mut field, &mut nodes, budget, &mut visit)?;
        Ok(nodes)
    }

    fn descend(
        &self,
        i: usize,
        used: &mut [bool],
        field: &mut [usize],
        nodes: &mut u64,
        budget: u64,
        visit: &mut impl FnMut(&[usize]),
    ) -> Result<()> {
        if i == self.choices.len() {
            visit(field);
            return Ok(());
        }
        for &(k, t) in &self.choices[i] {
            if used[t] {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::Capacity(format!("search budget of {budget} nodes exhausted")));
            }
            used[t] = true;
            if self.closing[i].iter().all(|&c| used[c]) {
                field[i] = k;
                self.descend(i + 1, used, field, nodes, budget, visit)?;
            }
            used[t] = false;
        }
        Ok(())
    }
}
