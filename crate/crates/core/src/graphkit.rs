//! Finite graphs used by the correspondences: I/O double covers, undirected
//! versions, torus quotients and the named lattices.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{add, fmt_point, BoxShape, Point, RestrictingSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Out,
    In,
}

/// Structured vertex label. Linear algebra uses the vertex index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexLabel {
    Cell(Point),
    Io(Side, Point),
    /// Honeycomb vertex; `true` is the black class.
    Hex(bool, Point),
    /// Slot 0..4 of the gadget standing in for vertex `site`.
    Gadget { site: usize, slot: u8 },
    Aux(usize),
}

impl VertexLabel {
    /// Lattice coordinates carried by the label, if any.
    pub fn coords(&self) -> Option<&Point> {
        match self {
            VertexLabel::Cell(p) | VertexLabel::Io(_, p) | VertexLabel::Hex(_, p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Cell(p) => write!(f, "{}", fmt_point(p)),
            VertexLabel::Io(Side::Out, p) => write!(f, "O{}", fmt_point(p)),
            VertexLabel::Io(Side::In, p) => write!(f, "I{}", fmt_point(p)),
            VertexLabel::Hex(true, p) => write!(f, "b{}", fmt_point(p)),
            VertexLabel::Hex(false, p) => write!(f, "w{}", fmt_point(p)),
            VertexLabel::Gadget { site, slot } => write!(f, "T{}.{}", site, slot + 1),
            VertexLabel::Aux(i) => write!(f, "aux{i}"),
        }
    }
}

/// Directed edge record. `shift` is the lattice displacement that produced
/// the edge, so parallel edges stay distinguishable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub shift: Option<Point>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteGraph {
    pub labels: Vec<VertexLabel>,
    pub arcs: Vec<Arc>,
    pub bipartition: Option<Vec<bool>>,
}

impl FiniteGraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.from == v).count()
    }

    /// (v,u) ∈ E implies (u,v) ∈ E, counting parallel arcs.
    pub fn is_symmetric(&self) -> bool {
        let mut count: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for a in &self.arcs {
            *count.entry((a.from, a.to)).or_default() += 1;
        }
        count
            .iter()
            .all(|(&(u, v), &c)| count.get(&(v, u)).copied().unwrap_or(0) == c)
    }
}

/// Undirected edge record with a multiplicity tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub mult: u32,
    pub shift: Option<Point>,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    pub labels: Vec<VertexLabel>,
    pub edges: Vec<Edge>,
    /// `Some(side)` per vertex when the graph is known to be bipartite
    pub bipartition: Option<Vec<bool>>,
}

impl UndirectedGraph {
    pub fn new(labels: Vec<VertexLabel>) -> Self {
        Self { labels, edges: Vec::new(), bipartition: None }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn add_vertex(&mut self, label: VertexLabel) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, mult: u32, shift: Option<Point>) -> usize {
        self.edges.push(Edge { a, b, mult, shift });
        self.edges.len() - 1
    }

    pub fn vertex_of(&self, label: &VertexLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label_index(&self) -> BTreeMap<VertexLabel, usize> {
        self.labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()
    }

    /// Edge ids incident to each vertex (a loop is listed once).
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.a].push(i);
            if e.b != e.a {
                inc[e.b].push(i);
            }
        }
        inc
    }

    /// Degree counting multiplicity; a loop counts twice.
    pub fn degree(&self, v: usize) -> u32 {
        self.edges
            .iter()
            .map(|e| e.mult * ((e.a == v) as u32 + (e.b == v) as u32))
            .sum()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.edges.iter().map(|e| e.mult).sum()
    }

    /// Proper 2-colouring if one exists (loops rule it out).
    pub fn two_colouring(&self) -> Option<Vec<bool>> {
        let n = self.vertex_count();
        let inc = self.incidence();
        let mut colour: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                let c = colour[v].unwrap();
                for &e in &inc[v] {
                    let u = self.edges[e].other(v);
                    match colour[u] {
                        None => {
                            colour[u] = Some(!c);
                            stack.push(u);
                        }
                        Some(cu) if cu == c => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(Option::unwrap).collect())
    }

    /// Adjacency text format: `v <id> <label>` then `e <a> <b> [mult]`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("v {i} {l}\n"));
        }
        for e in &self.edges {
            out.push_str(&self.edge_line(e));
        }
        out
    }

    pub(crate) fn edge_line(&self, e: &Edge) -> String {
        if e.mult == 1 {
            format!("e {} {}\n", e.a, e.b)
        } else {
            format!("e {} {} {}\n", e.a, e.b, e.mult)
        }
    }

    /// Edge multiset as sorted label pairs with shift and multiplicity, for
    /// comparing our own constructions.
    pub fn canonical_edges(&self, relabel: impl Fn(&VertexLabel) -> VertexLabel) -> Vec<(VertexLabel, VertexLabel, Option<Point>, u32)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (x, y) = (relabel(&self.labels[e.a]), relabel(&self.labels[e.b]));
                if x <= y {
                    (x, y, e.shift.clone(), e.mult)
                } else {
                    (y, x, e.shift.as_ref().map(|s| s.iter().map(|v| -v).collect()), e.mult)
                }
            })
            .collect();
        out.sort();
        out
    }
}

/// G' on {O,I} x V: each arc (v,u) becomes the edge {(O,v),(I,u)}.
/// O-vertices come first, then I-vertices.
pub fn io_double_cover(g: &FiniteGraph) -> UndirectedGraph {
    let n = g.vertex_count();
    let io = |side: Side, l: &VertexLabel| match l.coords() {
        Some(p) => VertexLabel::Io(side, p.clone()),
        None => VertexLabel::Io(side, vec![0]),
    };
    let mut labels: Vec<VertexLabel> = g.labels.iter().map(|l| io(Side::Out, l)).collect();
    labels.extend(g.labels.iter().map(|l| io(Side::In, l)));
    let mut h = UndirectedGraph::new(labels);
    for a in &g.arcs {
        h.add_edge(a.from, n + a.to, 1, a.shift.clone());
    }
    h.bipartition = Some((0..2 * n).map(|i| i >= n).collect());
    h
}

/// Merges each arc with its reverse (same geometric edge) into one edge.
pub fn undirected_version(g: &FiniteGraph) -> UndirectedGraph {
    let mut h = UndirectedGraph::new(g.labels.clone());
    let mut seen: BTreeMap<(usize, usize, Option<Point>), ()> = BTreeMap::new();
    for a in &g.arcs {
        let neg = a.shift.as_ref().map(|s| s.iter().map(|v| -v).collect::<Point>());
        let key = (a.from, a.to, a.shift.clone());
        let rev = (a.to, a.from, neg);
        let canon = if key <= rev { key } else { rev };
        if seen.insert(canon, ()).is_none() {
            h.add_edge(a.from, a.to, 1, a.shift.clone());
        }
    }
    h.bipartition = g.bipartition.clone();
    h
}

/// G_A on the torus [n]: arcs m -> (m + a) mod n, one per a ∈ A.
pub fn torus_quotient(set: &RestrictingSet, shape: &BoxShape) -> FiniteGraph {
    let labels = shape.cells().map(VertexLabel::Cell).collect();
    let mut arcs = Vec::with_capacity(shape.volume() * set.len());
    for i in 0..shape.volume() {
        let c = shape.coord(i);
        for a in set.vectors() {
            arcs.push(Arc { from: i, to: shape.wrap_index(&add(&c, a)), shift: Some(a.clone()) });
        }
    }
    FiniteGraph { labels, arcs, bipartition: None }
}

/// G_A restricted to a finite window: arcs from `sources` to `sources + A`.
/// Vertices are the sources followed by the new targets.
pub fn window_graph(set: &RestrictingSet, sources: &[Point]) -> FiniteGraph {
    let mut labels: Vec<VertexLabel> = sources.iter().cloned().map(VertexLabel::Cell).collect();
    let mut index: BTreeMap<Point, usize> = sources.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut arcs = Vec::new();
    for (i, s) in sources.iter().enumerate() {
        for a in set.vectors() {
            let t = add(s, a);
            let j = *index.entry(t.clone()).or_insert_with(|| {
                labels.push(VertexLabel::Cell(t));
                labels.len() - 1
            });
            arcs.push(Arc { from: i, to: j, shift: Some(a.clone()) });
        }
    }
    FiniteGraph { labels, arcs, bipartition: None }
}

/// L_{H,n}: black b(x,y) joined to white w(x,y), w(x+1,y), w(x,y+1) mod n.
/// Blacks are vertices 0..n², whites follow.
pub fn honeycomb_torus(n: usize) -> UndirectedGraph {
    let shape = BoxShape::square(n).expect("n >= 1");
    let nn = n * n;
    let mut labels: Vec<VertexLabel> = shape.cells().map(|c| VertexLabel::Hex(true, c)).collect();
    labels.extend(shape.cells().map(|c| VertexLabel::Hex(false, c)));
    let mut g = UndirectedGraph::new(labels);
    for i in 0..nn {
        let c = shape.coord(i);
        for d in [[0, 0], [1, 0], [0, 1]] {
            let j = shape.wrap_index(&add(&c, &d));
            g.add_edge(i, nn + j, 1, Some(d.to_vec()));
        }
    }
    g.bipartition = Some((0..2 * nn).map(|i| i >= nn).collect());
    g
}

/// L_{S,shape}: the grid graph on the box.
pub fn square_grid(shape: &BoxShape) -> UndirectedGraph {
    let mut g = UndirectedGraph::new(shape.cells().map(VertexLabel::Cell).collect());
    for i in 0..shape.volume() {
        let c = shape.coord(i);
        for d in [[1, 0], [0, 1]] {
            if let Some(j) = shape.index(&add(&c, &d)) {
                g.add_edge(i, j, 1, Some(d.to_vec()));
            }
        }
    }
    g.bipartition = Some(shape.cells().map(|c| parity(&c)).collect());
    g
}

/// L^T_{S,n}: the square lattice mod n. Wrap-around edges are separate
/// records, so n = 2 has doubled edges; n = 1 has none (only loops).
pub fn square_torus(n: usize) -> UndirectedGraph {
    let shape = BoxShape::square(n).expect("n >= 1");
    let mut g = UndirectedGraph::new(shape.cells().map(VertexLabel::Cell).collect());
    for i in 0..shape.volume() {
        let c = shape.coord(i);
        for d in [[1, 0], [0, 1]] {
            let j = shape.wrap_index(&add(&c, &d));
            if j != i {
                g.add_edge(i, j, 1, Some(d.to_vec()));
            }
        }
    }
    if n % 2 == 0 {
        g.bipartition = Some(shape.cells().map(|c| parity(&c)).collect());
    }
    g
}

/// Checkerboard colour: `false` (black) for even coordinate sum.
pub fn parity(c: &[i64]) -> bool {
    c.iter().sum::<i64>().rem_euclid(2) == 1
}


/// A graph read from text, with optional plot positions and target set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: UndirectedGraph,
    pub positions: Option<Vec<(i64, i64)>>,
    pub target: Vec<usize>,
}

fn parse_label(id: usize, s: &str) -> VertexLabel {
    let coords = |body: &str| -> Option<Point> {
        let inner = body.strip_prefix('(')?.strip_suffix(')')?;
        inner.split(',').map(|x| x.trim().parse().ok()).collect()
    };
    if let Some(p) = coords(s) {
        return VertexLabel::Cell(p);
    }
    for (tag, side) in [("O", Side::Out), ("I", Side::In)] {
        if let Some(p) = s.strip_prefix(tag).and_then(coords) {
            return VertexLabel::Io(side, p);
        }
    }
    VertexLabel::Aux(id)
}

/// Reads `v <id> <label> [x y]`, `e <a> <b> [mult]` and `t <id>...` lines;
/// `#` starts a comment. Vertex ids must be 0..n in order. Positions are
/// used only when every vertex has one.
pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let bad = |line: usize, msg: &str| Error::Parse(format!("graph line {}: {msg}", line + 1));
    let mut graph = UndirectedGraph::default();
    let mut positions = Vec::new();
    let mut target = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<usize> {
            f.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad(ln, "expected a nonnegative integer"))
        };
        match f[0] {
            "v" => {
                let id = num(1)?;
                if id != graph.vertex_count() {
                    return Err(bad(ln, "vertex ids must be consecutive from 0"));
                }
                let label = f.get(2).map_or(VertexLabel::Aux(id), |s| parse_label(id, s));
                graph.add_vertex(label);
                if f.len() >= 5 {
                    let x = f[3].parse().map_err(|_| bad(ln, "bad x position"))?;
                    let y = f[4].parse().map_err(|_| bad(ln, "bad y position"))?;
                    positions.push((x, y));
                }
            }
            "e" => {
                let (a, b) = (num(1)?, num(2)?);
                let mult = if f.len() > 3 { num(3)? as u32 } else { 1 };
                if a >= graph.vertex_count() || b >= graph.vertex_count() {
                    return Err(bad(ln, "edge names an undeclared vertex"));
                }
                if mult == 0 {
                    return Err(bad(ln, "multiplicity must be positive"));
                }
                graph.add_edge(a, b, mult, None);
            }
            "t" => {
                for i in 1..f.len() {
                    target.push(num(i)?);
                }
            }
            _ => return Err(bad(ln, "unknown record type")),
        }
    }
    if target.iter().any(|&t| t >= graph.vertex_count()) {
        return Err(Error::Parse("target names an undeclared vertex".into()));
    }
    target.sort_unstable();
    target.dedup();
    let positions = (positions.len() == graph.vertex_count() && !positions.is_empty()).then_some(positions);
    Ok(GraphFile { graph, positions, target })
}
