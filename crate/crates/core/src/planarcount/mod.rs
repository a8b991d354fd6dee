//! Polynomial-time counting: rotation systems, Pfaffian orientations,
//! exact Pfaffians, the T-gadget for perfect covers and a transfer matrix
//! for toral matchings.
//!
//! Darts of embedded edge `e` are `2e` (a -> b) and `2e + 1` (b -> a).
//! Rotations are counter-clockwise and the face after dart `d` is entered
//! by the rotation successor of its twin, so every face lies to the right
//! of its darts: bounded faces are walked clockwise.

mod gadget;
mod transfer;

pub use gadget::{build_cover_gadget, count_perfect_covers, CoverGadget};
pub use transfer::{count_toral_matchings, DEFAULT_WIDTH_CAP};

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graphkit::UndirectedGraph;
use crate::linalg;

/// Exact rational weight per host edge; missing edges weigh 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeWeights {
    weights: BTreeMap<usize, BigRational>,
}

impl EdgeWeights {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn set(&mut self, edge: usize, w: BigRational) {
        self.weights.insert(edge, w);
    }

    pub fn get(&self, edge: usize) -> BigRational {
        self.weights.get(&edge).cloned().unwrap_or_else(BigRational::one)
    }
}

/// A host graph with a rotation system. Parallel host edges between the
/// same two vertices may share one embedded edge.
#[derive(Clone, Debug)]
pub struct PlanarEmbedding {
    host: UndirectedGraph,
    ends: Vec<(usize, usize)>,
    records: Vec<Vec<usize>>,
    rotation: Vec<Vec<usize>>,
    positions: Option<Vec<(i64, i64)>>,
    /// preferred outer dart per component root, for embeddings without
    /// coordinates
    outer_hint: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<usize>,
}

fn half(x: i64, y: i64) -> u8 {
    if y > 0 || (y == 0 && x > 0) {
        0
    } else {
        1
    }
}

/// Counter-clockwise angular order starting at the positive x axis.
fn angle_cmp(a: (i64, i64), b: (i64, i64)) -> Ordering {
    half(a.0, a.1).cmp(&half(b.0, b.1)).then_with(|| {
        let cross = a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128;
        0.cmp(&cross)
    })
}

impl PlanarEmbedding {
    /// Straight-line embedding from integer coordinates. Parallel records
    /// are merged; loops are dropped since no matching uses them.
    pub fn from_positions(host: &UndirectedGraph, positions: &[(i64, i64)]) -> Result<Self> {
        if positions.len() != host.vertex_count() {
            return Err(Error::Embedding("one position per vertex required".into()));
        }
        let mut merged: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut ends = Vec::new();
        let mut records: Vec<Vec<usize>> = Vec::new();
        for (i, e) in host.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            match merged.get(&key) {
                Some(&k) => records[k].push(i),
                None => {
                    merged.insert(key, ends.len());
                    ends.push((e.a, e.b));
                    records.push(vec![i]);
                }
            }
        }
        let dir = |d: usize| {
            let (a, b) = ends[d / 2];
            let (t, h) = if d % 2 == 0 { (a, b) } else { (b, a) };
            (positions[h].0 - positions[t].0, positions[h].1 - positions[t].1)
        };
        let rotation = Self::sorted_rotation(host.vertex_count(), &ends, dir)?;
        Ok(Self {
            host: host.clone(),
            ends,
            records,
            rotation,
            positions: Some(positions.to_vec()),
            outer_hint: Vec::new(),
        })
    }

    /// One embedded edge per host record, with the direction of each dart
    /// supplied by the caller (used for drawings on other surfaces).
    pub fn from_directions(host: &UndirectedGraph, dir: impl Fn(usize, bool) -> (i64, i64)) -> Result<Self> {
        let mut ends = Vec::new();
        let mut records = Vec::new();
        for (i, e) in host.edges.iter().enumerate() {
            if !e.is_loop() {
                ends.push((e.a, e.b));
                records.push(vec![i]);
            }
        }
        let rec = records.clone();
        let rotation = Self::sorted_rotation(host.vertex_count(), &ends, |d| dir(rec[d / 2][0], d % 2 == 0))?;
        Ok(Self { host: host.clone(), ends, records, rotation, positions: None, outer_hint: Vec::new() })
    }

    /// Explicit rotation system.
    pub fn from_rotation(
        host: UndirectedGraph,
        ends: Vec<(usize, usize)>,
        records: Vec<Vec<usize>>,
        rotation: Vec<Vec<usize>>,
        outer_hint: Vec<usize>,
    ) -> Result<Self> {
        let emb = Self { host, ends, records, rotation, positions: None, outer_hint };
        emb.check_rotation()?;
        Ok(emb)
    }

    fn sorted_rotation(n: usize, ends: &[(usize, usize)], dir: impl Fn(usize) -> (i64, i64)) -> Result<Vec<Vec<usize>>> {
        let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (e, &(a, b)) in ends.iter().enumerate() {
            rot[a].push(2 * e);
            rot[b].push(2 * e + 1);
        }
        for darts in rot.iter_mut() {
            darts.sort_by(|&x, &y| angle_cmp(dir(x), dir(y)).then(x.cmp(&y)));
            for w in darts.windows(2) {
                if angle_cmp(dir(w[0]), dir(w[1])) == Ordering::Equal {
                    return Err(Error::Embedding("two edges leave a vertex in the same direction".into()));
                }
            }
        }
        Ok(rot)
    }

    fn check_rotation(&self) -> Result<()> {
        let mut seen = vec![false; 2 * self.ends.len()];
        for (v, darts) in self.rotation.iter().enumerate() {
            for &d in darts {
                if d >= seen.len() || self.tail(d) != v || std::mem::replace(&mut seen[d], true) {
                    return Err(Error::Embedding(format!("rotation at vertex {v} is inconsistent")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Embedding("some edge end is missing from the rotation".into()));
        }
        Ok(())
    }

    pub fn host(&self) -> &UndirectedGraph {
        &self.host
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn records(&self, e: usize) -> &[usize] {
        &self.records[e]
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn positions(&self) -> Option<&[(i64, i64)]> {
        self.positions.as_deref()
    }

    pub fn tail(&self, d: usize) -> usize {
        let (a, b) = self.ends[d / 2];
        if d % 2 == 0 {
            a
        } else {
            b
        }
    }

    pub fn head(&self, d: usize) -> usize {
        self.tail(d ^ 1)
    }

    /// Combined weight of an embedded edge: Σ multiplicity · weight.
    pub fn weight(&self, e: usize, w: &EdgeWeights) -> BigRational {
        self.records[e]
            .iter()
            .map(|&r| w.get(r) * BigRational::from_integer(self.host.edges[r].mult.into()))
            .sum()
    }

    /// Connected component id per vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &d in &self.rotation[v] {
                    let u = self.head(d);
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    fn next_dart(&self, pos: &[usize], d: usize) -> usize {
        let t = d ^ 1;
        let v = self.tail(t);
        let r = &self.rotation[v];
        r[(pos[t] + 1) % r.len()]
    }

    fn dart_positions(&self) -> Vec<usize> {
        let mut pos = vec![0; 2 * self.ends.len()];
        for r in &self.rotation {
            for (i, &d) in r.iter().enumerate() {
                pos[d] = i;
            }
        }
        pos
    }

    /// Twice the signed area of a face walk; needs coordinates.
    fn face_area(&self, f: &Face) -> Option<i128> {
        let p = self.positions.as_ref()?;
        Some(
            f.darts
                .iter()
                .map(|&d| {
                    let (a, b) = (p[self.tail(d)], p[self.head(d)]);
                    a.0 as i128 * b.1 as i128 - b.0 as i128 * a.1 as i128
                })
                .sum(),
        )
    }
}

/// Face walks, checked against Euler's formula on every component.
pub fn compute_faces(emb: &PlanarEmbedding) -> Result<Vec<Face>> {
    emb.check_rotation()?;
    let pos = emb.dart_positions();
    let mut face_of = vec![usize::MAX; 2 * emb.edge_count()];
    let mut faces = Vec::new();
    for start in 0..face_of.len() {
        if face_of[start] != usize::MAX {
            continue;
        }
        let mut darts = Vec::new();
        let mut d = start;
        loop {
            face_of[d] = faces.len();
            darts.push(d);
            d = emb.next_dart(&pos, d);
            if d == start {
                break;
            }
            if face_of[d] != usize::MAX {
                return Err(Error::Embedding("face walk does not close".into()));
            }
        }
        faces.push(Face { darts });
    }
    let comp = emb.components();
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut v = vec![0i64; ncomp];
    let mut e = vec![0i64; ncomp];
    let mut f = vec![0i64; ncomp];
    for &c in &comp {
        v[c] += 1;
    }
    for &(a, _) in &emb.ends {
        e[comp[a]] += 1;
    }
    for face in &faces {
        f[comp[emb.tail(face.darts[0])]] += 1;
    }
    for c in 0..ncomp {
        if e[c] > 0 && v[c] - e[c] + f[c] != 2 {
            return Err(Error::Embedding(format!(
                "Euler check failed: V - E + F = {} on a component",
                v[c] - e[c] + f[c]
            )));
        }
    }
    Ok(faces)
}

/// Index of the outer face for each component that has edges.
pub fn outer_faces(emb: &PlanarEmbedding, faces: &[Face]) -> BTreeMap<usize, usize> {
    let comp = emb.components();
    let mut best: BTreeMap<usize, (i128, usize)> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        let c = comp[emb.tail(f.darts[0])];
        let hinted = f.darts.iter().any(|d| emb.outer_hint.contains(d));
        let score = match emb.face_area(f) {
            Some(a) => a,
            None if hinted => i128::MAX,
            None => f.darts.len() as i128,
        };
        let entry = best.entry(c).or_insert((score, i));
        if score > entry.0 {
            *entry = (score, i);
        }
    }
    best.into_iter().map(|(c, (_, i))| (c, i)).collect()
}

/// Orientation bit per embedded edge: `true` means a -> b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfaffianOrientation {
    pub forward: Vec<bool>,
    pub tree: Vec<bool>,
}

impl PfaffianOrientation {
    fn agrees(&self, d: usize) -> bool {
        self.forward[d / 2] == (d % 2 == 0)
    }

    /// Edges pointing clockwise along a face, i.e. along its walk.
    pub fn clockwise_count(&self, face: &Face) -> usize {
        face.darts.iter().filter(|&&d| self.agrees(d)).count()
    }

    /// Every bounded face has an odd clockwise count.
    pub fn is_valid(&self, emb: &PlanarEmbedding) -> Result<bool> {
        let faces = compute_faces(emb)?;
        let outer: Vec<usize> = outer_faces(emb, &faces).into_values().collect();
        Ok(faces
            .iter()
            .enumerate()
            .filter(|(i, _)| !outer.contains(i))
            .all(|(_, f)| self.clockwise_count(f) % 2 == 1))
    }
}

/// Spanning-tree edges keep an arbitrary direction; each remaining edge is
/// fixed when the last face it borders (leaves of the dual tree first) is
/// closed off.
pub fn pfaffian_orientation(emb: &PlanarEmbedding) -> Result<PfaffianOrientation> {
    let faces = compute_faces(emb)?;
    let outer = outer_faces(emb, &faces);
    let m = emb.edge_count();
    let n = emb.vertex_count();
    let mut forward = vec![true; m];
    let mut tree = vec![false; m];
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &d in emb.rotation(v) {
                let u = emb.head(d);
                if !seen[u] {
                    seen[u] = true;
                    tree[d / 2] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let mut face_of = vec![0; 2 * m];
    for (i, f) in faces.iter().enumerate() {
        for &d in &f.darts {
            face_of[d] = i;
        }
    }
    // dual BFS over non-tree edges from each outer face
    let mut parent_dart: Vec<Option<usize>> = vec![None; faces.len()];
    let mut visited = vec![false; faces.len()];
    let mut order = Vec::new();
    for &root in outer.values() {
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            order.push(f);
            for &d in &faces[f].darts {
                if tree[d / 2] {
                    continue;
                }
                let g = face_of[d ^ 1];
                if !visited[g] {
                    visited[g] = true;
                    parent_dart[g] = Some(d ^ 1);
                    queue.push_back(g);
                }
            }
        }
    }
    if visited.iter().any(|v| !v) {
        return Err(Error::Embedding("dual of the cotree is not connected".into()));
    }
    let mut orient = PfaffianOrientation { forward, tree };
    for &f in order.iter().rev() {
        let Some(pd) = parent_dart[f] else { continue };
        let others = faces[f]
            .darts
            .iter()
            .filter(|&&d| d / 2 != pd / 2 && orient.agrees(d))
            .count();
        // the parent edge may also appear twice on this face (a bridge),
        // which cannot happen for a cotree edge
        let want_agree = others % 2 == 0;
        orient.forward[pd / 2] = want_agree == (pd % 2 == 0);
    }
    forward = orient.forward.clone();
    let _ = forward;
    Ok(orient)
}

/// Weighted perfect-matching count |Pf(A)| of a planar embedded graph.
pub fn count_matchings_planar(emb: &PlanarEmbedding, weights: &EdgeWeights) -> Result<BigRational> {
    let orient = pfaffian_orientation(emb)?;
    count_with_orientation(emb, &orient, weights)
}

/// |Pf| of the signed adjacency for a given orientation; equals the
/// matching count exactly when the orientation is Pfaffian.
pub fn count_with_orientation(emb: &PlanarEmbedding, orient: &PfaffianOrientation, weights: &EdgeWeights) -> Result<BigRational> {
    let comp = emb.components();
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut total = BigRational::one();
    for c in 0..ncomp {
        let verts: Vec<usize> = (0..emb.vertex_count()).filter(|&v| comp[v] == c).collect();
        if verts.len() % 2 == 1 {
            return Ok(BigRational::zero());
        }
        let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize, BigRational)> = (0..emb.edge_count())
            .filter(|&e| comp[emb.ends(e).0] == c)
            .map(|e| {
                let (a, b) = emb.ends(e);
                let w = emb.weight(e, weights);
                let (a, b) = if orient.forward[e] { (a, b) } else { (b, a) };
                (local[&a], local[&b], w)
            })
            .collect();
        let pf = component_pfaffian(verts.len(), &edges)?;
        if pf.is_zero() {
            return Ok(pf);
        }
        total *= pf;
    }
    Ok(total)
}

/// |Pf| for one component; (i, j, w) means i -> j with weight w.
fn component_pfaffian(n: usize, edges: &[(usize, usize, BigRational)]) -> Result<BigRational> {
    let scale = edges
        .iter()
        .fold(BigInt::one(), |acc, (_, _, w)| acc.lcm(w.denom()));
    let int_w = |w: &BigRational| (w * BigRational::from_integer(scale.clone())).to_integer();
    let colour = two_colour(n, edges);
    let half = n / 2;
    let scale_pow = num_traits::pow(BigRational::from_integer(scale.clone()), half);

    let full = |check: bool| -> Result<BigInt> {
        let mut a = vec![vec![BigInt::zero(); n]; n];
        for (i, j, w) in edges {
            let w = int_w(w);
            a[*i][*j] += &w;
            a[*j][*i] -= &w;
        }
        let det = linalg::bareiss_determinant(a);
        linalg::exact_sqrt(&det).ok_or_else(|| {
            Error::Internal(format!(
                "determinant {det} is not a perfect square{}",
                if check { " (cross-check)" } else { "" }
            ))
        })
    };

    let value = match colour {
        Some(col) if col.iter().filter(|&&c| c).count() == half => {
            let black: Vec<usize> = (0..n).filter(|&v| !col[v]).collect();
            let white: Vec<usize> = (0..n).filter(|&v| col[v]).collect();
            let bi: BTreeMap<usize, usize> = black.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let wi: BTreeMap<usize, usize> = white.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut k = vec![vec![BigInt::zero(); half]; half];
            for (i, j, w) in edges {
                let w = int_w(w);
                if let (Some(&r), Some(&s)) = (bi.get(i), wi.get(j)) {
                    k[r][s] += w;
                } else {
                    k[bi[j]][wi[i]] -= w;
                }
            }
            let det = linalg::bareiss_determinant(k).abs();
            if n <= 64 {
                let pf = full(true)?;
                if pf != det {
                    return Err(Error::Internal("bi-adjacency and Pfaffian paths disagree".into()));
                }
            }
            det
        }
        Some(_) => BigInt::zero(),
        None => full(false)?,
    };
    Ok(BigRational::from_integer(value) / scale_pow)
}

fn two_colour(n: usize, edges: &[(usize, usize, BigRational)]) -> Option<Vec<bool>> {
    let mut adj = vec![Vec::new(); n];
    for (i, j, _) in edges {
        adj[*i].push(*j);
        adj[*j].push(*i);
    }
    let mut col: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if col[s].is_some() {
            continue;
        }
        col[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                match col[u] {
                    None => {
                        col[u] = Some(!col[v].unwrap());
                        stack.push(u);
                    }
                    Some(c) if c == col[v].unwrap() => return None,
                    _ => {}
                }
            }
        }
    }
    Some(col.into_iter().map(Option::unwrap).collect())
}

/// Integer value of an exact count that must be a whole number.
pub fn to_integer_count(x: &BigRational) -> Result<BigUint> {
    if !x.is_integer() || x.is_negative() {
        return Err(Error::Internal(format!("count {x} is not a nonnegative integer")));
    }
    x.to_integer()
        .to_biguint()
        .ok_or_else(|| Error::Internal("negative count".into()))
}

/// Unweighted planar matching count.
pub fn count_planar_unweighted(emb: &PlanarEmbedding) -> Result<BigUint> {
    to_integer_count(&count_matchings_planar(emb, &EdgeWeights::unit())?)
}

/// Small helper for tests and reports.
pub fn approx(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}
