//! The finite bijections: Ψ (toral permutations and perfect matchings of the
//! I/O double cover), Φ (permutations of a symmetric bipartite graph and
//! pairs of matchings) and A_L patterns as perfect covers.

use std::collections::{BTreeMap, BTreeSet};

use crate::admissibility;
use crate::error::{Error, Result};
use crate::graphkit::{
    io_double_cover, parity, torus_quotient, undirected_version, Side, UndirectedGraph, VertexLabel,
};
use crate::lattice::{add, BoxShape, Pattern, Point, RestrictingSet, ToralPermutation};

/// Edge ids of a perfect matching, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectMatching {
    pub edges: Vec<usize>,
}

impl PerfectMatching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        Self { edges }
    }

    pub fn is_valid(&self, host: &UndirectedGraph) -> bool {
        let all: Vec<usize> = (0..host.vertex_count()).collect();
        is_perfect_cover(host, &all, &self.edges)
    }

    /// Partner of each vertex.
    pub fn partners(&self, host: &UndirectedGraph) -> Vec<Option<usize>> {
        let mut p = vec![None; host.vertex_count()];
        for &e in &self.edges {
            let ed = &host.edges[e];
            p[ed.a] = Some(ed.b);
            p[ed.b] = Some(ed.a);
        }
        p
    }

    pub fn export(&self, host: &UndirectedGraph) -> String {
        let mut out = String::from("# matching\n");
        for &e in &self.edges {
            out.push_str(&host.edge_line(&host.edges[e]));
        }
        out
    }
}

/// Edges covering every target vertex exactly once, vertex-disjoint, each
/// meeting the target.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectCover {
    pub target: Vec<usize>,
    pub edges: Vec<usize>,
}

impl PerfectCover {
    pub fn new(mut target: Vec<usize>, mut edges: Vec<usize>) -> Self {
        target.sort_unstable();
        edges.sort_unstable();
        Self { target, edges }
    }

    pub fn is_valid(&self, host: &UndirectedGraph) -> bool {
        is_perfect_cover(host, &self.target, &self.edges)
    }

    pub fn export(&self, host: &UndirectedGraph) -> String {
        let t: Vec<String> = self.target.iter().map(usize::to_string).collect();
        let mut out = format!("# cover target={}\n", t.join(","));
        for &e in &self.edges {
            out.push_str(&host.edge_line(&host.edges[e]));
        }
        out
    }
}

/// Checks the three cover conditions directly.
pub fn is_perfect_cover(host: &UndirectedGraph, target: &[usize], edges: &[usize]) -> bool {
    let mut in_target = vec![false; host.vertex_count()];
    for &v in target {
        in_target[v] = true;
    }
    let mut used = vec![false; host.vertex_count()];
    let mut seen = BTreeSet::new();
    for &e in edges {
        if !seen.insert(e) {
            return false;
        }
        let Some(ed) = host.edges.get(e) else { return false };
        if ed.is_loop() || !(in_target[ed.a] || in_target[ed.b]) {
            return false;
        }
        for v in [ed.a, ed.b] {
            if std::mem::replace(&mut used[v], true) {
                return false;
            }
        }
    }
    target.iter().all(|&v| used[v])
}

/// The I/O double cover of G_A on a torus, with the edge of (cell, a) at
/// index cell·|A| + a.
#[derive(Clone, Debug)]
pub struct PsiHost {
    pub set: RestrictingSet,
    pub shape: BoxShape,
    pub graph: UndirectedGraph,
}

impl PsiHost {
    pub fn new(set: &RestrictingSet, shape: &BoxShape) -> Self {
        let graph = io_double_cover(&torus_quotient(set, shape));
        Self { set: set.clone(), shape: shape.clone(), graph }
    }

    pub fn edge(&self, cell: usize, a: usize) -> usize {
        cell * self.set.len() + a
    }

    /// Ψ(π) = {{(O,v),(I,π(v))}}.
    pub fn psi(&self, perm: &ToralPermutation) -> Result<PerfectMatching> {
        if perm.set() != &self.set || perm.shape() != &self.shape {
            return Err(Error::Domain("permutation does not live on this host".into()));
        }
        Ok(PerfectMatching::new(
            perm.field().iter().enumerate().map(|(i, &a)| self.edge(i, a)).collect(),
        ))
    }

    pub fn psi_inverse(&self, m: &PerfectMatching) -> Result<ToralPermutation> {
        if !m.is_valid(&self.graph) {
            return Err(Error::Domain("not a perfect matching of the host".into()));
        }
        let k = self.set.len();
        let mut field = vec![0; self.shape.volume()];
        for &e in &m.edges {
            field[e / k] = e % k;
        }
        ToralPermutation::new(self.set.clone(), self.shape.clone(), field)
    }

    /// Moves every matching edge by `t`.
    pub fn translate(&self, m: &PerfectMatching, t: &[i64]) -> PerfectMatching {
        let k = self.set.len();
        PerfectMatching::new(
            m.edges
                .iter()
                .map(|&e| {
                    let c = self.shape.wrap_index(&add(&self.shape.coord(e / k), t));
                    self.edge(c, e % k)
                })
                .collect(),
        )
    }
}

/// The undirected torus graph of a symmetric set whose moves all flip the
/// checkerboard colour. Black is even coordinate sum.
#[derive(Clone, Debug)]
pub struct PhiHost {
    pub set: RestrictingSet,
    pub shape: BoxShape,
    pub graph: UndirectedGraph,
    lookup: BTreeMap<(usize, usize, Point), usize>,
}

impl PhiHost {
    pub fn new(set: &RestrictingSet, shape: &BoxShape) -> Result<Self> {
        if set.dim() != 2 {
            return Err(Error::Structure("planar sets only".into()));
        }
        if !set.is_symmetric() {
            return Err(Error::Structure("restricting set is not symmetric".into()));
        }
        if set.vectors().iter().any(|a| !parity(a)) || shape.dims().iter().any(|n| n % 2 == 1) {
            return Err(Error::Structure("torus graph is not bipartite by checkerboard".into()));
        }
        let q = torus_quotient(set, shape);
        let graph = undirected_version(&q);
        let mut lookup = BTreeMap::new();
        for (i, e) in graph.edges.iter().enumerate() {
            let s = e.shift.clone().expect("torus edges carry shifts");
            let neg: Point = s.iter().map(|v| -v).collect();
            lookup.insert((e.a, e.b, s), i);
            lookup.insert((e.b, e.a, neg), i);
        }
        Ok(Self { set: set.clone(), shape: shape.clone(), graph, lookup })
    }

    pub fn is_black(&self, cell: usize) -> bool {
        !parity(&self.shape.coord(cell))
    }

    fn edge_of(&self, cell: usize, shift: &[i64]) -> usize {
        let to = self.shape.wrap_index(&add(&self.shape.coord(cell), shift));
        self.lookup[&(cell, to, shift.to_vec())]
    }

    /// (M¹, M²): the edges {v, π(v)} from black and from white cells.
    pub fn phi(&self, perm: &ToralPermutation) -> Result<(PerfectMatching, PerfectMatching)> {
        if perm.set() != &self.set || perm.shape() != &self.shape {
            return Err(Error::Domain("permutation does not live on this host".into()));
        }
        let (mut m1, mut m2) = (Vec::new(), Vec::new());
        for i in 0..self.shape.volume() {
            let e = self.edge_of(i, perm.displacement(i));
            if self.is_black(i) {
                m1.push(e);
            } else {
                m2.push(e);
            }
        }
        let (m1, m2) = (PerfectMatching::new(m1), PerfectMatching::new(m2));
        if !m1.is_valid(&self.graph) || !m2.is_valid(&self.graph) {
            return Err(Error::Internal("phi produced a non-matching".into()));
        }
        Ok((m1, m2))
    }

    /// π(x) = M₁(x) for black x, M₂(x) for white x.
    pub fn phi_inverse(&self, m1: &PerfectMatching, m2: &PerfectMatching) -> Result<ToralPermutation> {
        if !m1.is_valid(&self.graph) || !m2.is_valid(&self.graph) {
            return Err(Error::Domain("not perfect matchings of the host".into()));
        }
        let mut field = vec![0; self.shape.volume()];
        for (m, black) in [(m1, true), (m2, false)] {
            for &e in &m.edges {
                let ed = &self.graph.edges[e];
                let s = ed.shift.as_ref().expect("torus edges carry shifts");
                let (x, v): (usize, Point) = if self.is_black(ed.a) == black {
                    (ed.a, s.clone())
                } else {
                    (ed.b, s.iter().map(|c| -c).collect())
                };
                field[x] = self.set.index_of(&v).expect("edge shift lies in A");
            }
        }
        ToralPermutation::new(self.set.clone(), self.shape.clone(), field)
    }

    pub fn translate(&self, m: &PerfectMatching, t: &[i64]) -> PerfectMatching {
        PerfectMatching::new(
            m.edges
                .iter()
                .map(|&e| {
                    let ed = &self.graph.edges[e];
                    let a = self.shape.wrap_index(&add(&self.shape.coord(ed.a), t));
                    self.edge_of(a, ed.shift.as_ref().unwrap())
                })
                .collect(),
        )
    }
}

/// A finite host graph with plot coordinates and a target vertex set.
#[derive(Clone, Debug)]
pub struct CoverWindow {
    pub graph: UndirectedGraph,
    pub positions: Vec<(i64, i64)>,
    pub target: Vec<usize>,
}

/// The A_L window for [n] x [m]: O-cells of the box, I-cells of box + A_L,
/// edges O(c) -- I(c + a). The edge of (cell i, a) has id 3i + a. Target is
/// V̂_{n,m} = O x box ∪ I x [1,n) x [1,m).
pub fn a_l_window(n: usize, m: usize) -> Result<CoverWindow> {
    let shape = BoxShape::planar(n, m)?;
    let set = RestrictingSet::a_l();
    let mut graph = UndirectedGraph::default();
    let mut positions = Vec::new();
    for c in shape.cells() {
        positions.push((3 * c[0], 3 * c[1]));
        graph.add_vertex(VertexLabel::Io(Side::Out, c));
    }
    let mut inputs: BTreeSet<(i64, i64)> = BTreeSet::new();
    for c in shape.cells() {
        for a in set.vectors() {
            let t = add(&c, a);
            inputs.insert((t[1], t[0]));
        }
    }
    let mut index = BTreeMap::new();
    for &(y, x) in &inputs {
        let v = graph.add_vertex(VertexLabel::Io(Side::In, vec![x, y]));
        positions.push((3 * x - 1, 3 * y - 1));
        index.insert(vec![x, y], v);
    }
    for (i, c) in shape.cells().enumerate() {
        for a in set.vectors() {
            graph.add_edge(i, index[&add(&c, a)], 1, Some(a.clone()));
        }
    }
    graph.bipartition = Some((0..graph.vertex_count()).map(|v| v >= shape.volume()).collect());
    let mut target: Vec<usize> = (0..shape.volume()).collect();
    for (p, &v) in &index {
        if p[0] >= 1 && p[0] < n as i64 && p[1] >= 1 && p[1] < m as i64 {
            target.push(v);
        }
    }
    target.sort_unstable();
    Ok(CoverWindow { graph, positions, target })
}

/// The Z² window for [n] x [m]: box cells plus their outside neighbours,
/// with the induced square-lattice edges. Target is the box.
pub fn square_window(n: usize, m: usize) -> Result<CoverWindow> {
    let shape = BoxShape::planar(n, m)?;
    let mut cells: Vec<Point> = shape.cells().collect();
    let mut outside = BTreeSet::new();
    for c in shape.cells() {
        for d in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            let t = add(&c, &d);
            if !shape.contains(&t) {
                outside.insert((t[1], t[0]));
            }
        }
    }
    cells.extend(outside.into_iter().map(|(y, x)| vec![x, y]));
    Ok(square_cells_window(&cells, shape.volume()))
}

/// Square-lattice graph induced on `cells`; the first `inner` cells are the
/// target.
pub fn square_cells_window(cells: &[Point], inner: usize) -> CoverWindow {
    let index: BTreeMap<&Point, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut graph = UndirectedGraph::new(cells.iter().cloned().map(VertexLabel::Cell).collect());
    for (i, c) in cells.iter().enumerate() {
        for d in [[1, 0], [0, 1]] {
            if let Some(&j) = index.get(&add(c, &d)) {
                graph.add_edge(i, j, 1, Some(d.to_vec()));
            }
        }
    }
    graph.bipartition = Some(cells.iter().map(|c| parity(c)).collect());
    CoverWindow {
        graph,
        positions: cells.iter().map(|c| (c[0], c[1])).collect(),
        target: (0..inner).collect(),
    }
}

/// Encodes f_v as the cover {O(c), I(c + v(c))} of the A_L window.
pub fn pattern_to_cover(pat: &Pattern, n: usize, m: usize) -> Result<(CoverWindow, PerfectCover)> {
    let shape = BoxShape::planar(n, m)?;
    if *pat.set() != RestrictingSet::a_l() {
        return Err(Error::Domain("pattern is not over A_L".into()));
    }
    let field = pat
        .box_field(&shape)
        .ok_or_else(|| Error::Domain("pattern domain is not the box".into()))?;
    let diag = admissibility::necessary_condition(pat);
    if !diag.ok {
        return Err(Error::NotAdmissible(diag.describe()));
    }
    let window = a_l_window(n, m)?;
    let edges = field.iter().enumerate().map(|(i, &a)| 3 * i + a).collect();
    let cover = PerfectCover::new(window.target.clone(), edges);
    if !cover.is_valid(&window.graph) {
        return Err(Error::Internal("encoded cover is invalid".into()));
    }
    Ok((window, cover))
}

pub fn cover_to_pattern(cover: &PerfectCover, n: usize, m: usize) -> Result<Pattern> {
    let shape = BoxShape::planar(n, m)?;
    let window = a_l_window(n, m)?;
    if cover.target != window.target || !cover.is_valid(&window.graph) {
        return Err(Error::Domain("not a perfect cover of the A_L window".into()));
    }
    let mut field = vec![0; shape.volume()];
    for &e in &cover.edges {
        field[e / 3] = e % 3;
    }
    Pattern::on_box(RestrictingSet::a_l(), &shape, &field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{FieldSearch, SearchMode};

    fn fix_set(set: &RestrictingSet, shape: &BoxShape) -> Vec<ToralPermutation> {
        let mut out = Vec::new();
        FieldSearch::new(set, shape, SearchMode::Torus)
            .for_each(u64::MAX, |f| {
                out.push(ToralPermutation::new(set.clone(), shape.clone(), f.to_vec()).unwrap())
            })
            .unwrap();
        out
    }

    #[test]
    fn psi_identity_uses_vertical_edges() {
        let shape = BoxShape::square(2).unwrap();
        let host = PsiHost::new(&RestrictingSet::a_l(), &shape);
        let id = ToralPermutation::identity(RestrictingSet::a_l(), shape).unwrap();
        let m = host.psi(&id).unwrap();
        assert_eq!(m.edges, vec![0, 3, 6, 9]);
        assert!(m.is_valid(&host.graph));
    }

    #[test]
    fn psi_constant_shift() {
        let east = RestrictingSet::planar(&[(1, 0)]).unwrap();
        let shape = BoxShape::planar(3, 1).unwrap();
        let host = PsiHost::new(&east, &shape);
        let p = ToralPermutation::new(east, shape, vec![0; 3]).unwrap();
        let m = host.psi(&p).unwrap();
        assert_eq!(m.edges.len(), 3);
        assert_eq!(host.psi_inverse(&m).unwrap(), p);
    }

    #[test]
    fn phi_on_swaps_gives_equal_matchings() {
        let shape = BoxShape::square(2).unwrap();
        let a = RestrictingSet::a_plus();
        let host = PhiHost::new(&a, &shape).unwrap();
        // swap along one horizontal edge per row
        let (e, w) = (a.index_of(&[1, 0]).unwrap(), a.index_of(&[-1, 0]).unwrap());
        let p = ToralPermutation::new(a, shape, vec![e, w, e, w]).unwrap();
        let (m1, m2) = host.phi(&p).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(host.phi_inverse(&m1, &m2).unwrap(), p);
    }

    #[test]
    fn phi_rejects_odd_and_asymmetric() {
        let s3 = BoxShape::square(3).unwrap();
        assert!(matches!(PhiHost::new(&RestrictingSet::a_plus(), &s3), Err(Error::Structure(_))));
        let s2 = BoxShape::square(2).unwrap();
        assert!(matches!(PhiHost::new(&RestrictingSet::a_l(), &s2), Err(Error::Structure(_))));
    }

    #[test]
    fn psi_round_trips_a_l() {
        let shape = BoxShape::square(2).unwrap();
        let host = PsiHost::new(&RestrictingSet::a_l(), &shape);
        let all = fix_set(&RestrictingSet::a_l(), &shape);
        let images: BTreeSet<_> = all.iter().map(|p| host.psi(p).unwrap()).collect();
        assert_eq!(images.len(), all.len());
        for p in &all {
            assert_eq!(&host.psi_inverse(&host.psi(p).unwrap()).unwrap(), p);
        }
    }

    #[test]
    fn single_cell_window() {
        let w = a_l_window(1, 1).unwrap();
        assert_eq!(w.target, vec![0]);
        assert_eq!(w.graph.edges.len(), 3);
        let p = Pattern::on_box(RestrictingSet::a_l(), &BoxShape::square(1).unwrap(), &[0]).unwrap();
        let (_, c) = pattern_to_cover(&p, 1, 1).unwrap();
        assert_eq!(c.edges, vec![0]);
        assert_eq!(cover_to_pattern(&c, 1, 1).unwrap(), p);
    }

    #[test]
    fn window_target_size() {
        for (n, m) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
            let w = a_l_window(n, m).unwrap();
            assert_eq!(w.target.len(), 2 * n * m - n - m + 1);
        }
    }
}
