//! Maximum bipartite matching with a Hall-violator extractor.

/// Left vertex i may be matched to any right vertex in `adj[i]`.
#[derive(Clone, Debug)]
pub struct Bipartite {
    pub adj: Vec<Vec<usize>>,
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxMatching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
}

impl MaxMatching {
    pub fn is_left_perfect(&self) -> bool {
        self.left_to_right.iter().all(Option::is_some)
    }
}

impl Bipartite {
    pub fn new(adj: Vec<Vec<usize>>, right: usize) -> Self {
        Self { adj, right }
    }

    /// Kuhn's algorithm. `hint` seeds the matching greedily first.
    pub fn max_matching(&self, hint: Option<&[Option<usize>]>) -> MaxMatching {
        let n = self.adj.len();
        let mut l2r = vec![None; n];
        let mut r2l = vec![None; self.right];
        if let Some(h) = hint {
            for (i, &r) in h.iter().enumerate() {
                if let Some(r) = r {
                    if r2l[r].is_none() && self.adj[i].contains(&r) {
                        l2r[i] = Some(r);
                        r2l[r] = Some(i);
                    }
                }
            }
        }
        let mut stamp = vec![usize::MAX; self.right];
        for i in 0..n {
            if l2r[i].is_none() {
                self.augment(i, i, &mut stamp, &mut l2r, &mut r2l);
            }
        }
        MaxMatching { left_to_right: l2r, right_to_left: r2l }
    }

    fn augment(
        &self,
        root: usize,
        start: usize,
        stamp: &mut [usize],
        l2r: &mut [Option<usize>],
        r2l: &mut [Option<usize>],
    ) -> bool {
        // iterative DFS over alternating paths
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut via: Vec<usize> = Vec::new();
        while let Some(&mut (u, ref mut k)) = stack.last_mut() {
            if *k >= self.adj[u].len() {
                stack.pop();
                via.pop();
                continue;
            }
            let r = self.adj[u][*k];
            *k += 1;
            if stamp[r] == root {
                continue;
            }
            stamp[r] = root;
            via.push(r);
            match r2l[r] {
                None => {
                    for (&(l, _), &rr) in stack.iter().zip(&via) {
                        l2r[l] = Some(rr);
                        r2l[rr] = Some(l);
                    }
                    return true;
                }
                Some(next) => stack.push((next, 0)),
            }
        }
        false
    }

    /// For an unmatched left vertex, the left set reachable by alternating
    /// paths and its neighbourhood; the neighbourhood is one smaller.
    pub fn hall_violator(&self, m: &MaxMatching, free_left: usize) -> (Vec<usize>, Vec<usize>) {
        let mut seen_l = vec![false; self.adj.len()];
        let mut seen_r = vec![false; self.right];
        let mut queue = vec![free_left];
        seen_l[free_left] = true;
        while let Some(u) = queue.pop() {
            for &r in &self.adj[u] {
                if !seen_r[r] {
                    seen_r[r] = true;
                    if let Some(l) = m.right_to_left[r] {
                        if !seen_l[l] {
                            seen_l[l] = true;
                            queue.push(l);
                        }
                    }
                }
            }
        }
        let left = (0..self.adj.len()).filter(|&i| seen_l[i]).collect();
        let right = (0..self.right).filter(|&i| seen_r[i]).collect();
        (left, right)
    }
}
