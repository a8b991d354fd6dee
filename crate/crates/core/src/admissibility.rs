//! Pattern admissibility: boundary and interior, the necessary condition,
//! forbidden-pattern checks, periodic extension certificates and Hall
//! obstructions.

use std::collections::{BTreeMap, BTreeSet};

use crate::bipartite::Bipartite;
use crate::error::{Error, Result};
use crate::lattice::{add, fmt_point, sub, BoxShape, Pattern, Point, RestrictingSet, ToralPermutation};

/// ∂(U,A): cells u with u − A ⊄ U.
pub fn boundary(u: &BTreeSet<Point>, set: &RestrictingSet) -> BTreeSet<Point> {
    u.iter()
        .filter(|c| set.vectors().iter().any(|a| !u.contains(&sub(c, a))))
        .cloned()
        .collect()
}

pub fn interior(u: &BTreeSet<Point>, set: &RestrictingSet) -> BTreeSet<Point> {
    u.iter()
        .filter(|c| set.vectors().iter().all(|a| u.contains(&sub(c, a))))
        .cloned()
        .collect()
}

/// Outcome of the necessary condition with the first failure found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessaryDiagnostics {
    pub ok: bool,
    /// two cells with the same image, and that image
    pub collision: Option<(Point, Point, Point)>,
    /// an interior cell nobody maps to
    pub uncovered: Option<Point>,
}

impl NecessaryDiagnostics {
    pub fn describe(&self) -> String {
        if let Some((a, b, t)) = &self.collision {
            format!("cells {} and {} both map to {}", fmt_point(a), fmt_point(b), fmt_point(t))
        } else if let Some(c) = &self.uncovered {
            format!("interior cell {} has no preimage", fmt_point(c))
        } else {
            "injective and covers the interior".into()
        }
    }
}

/// f_v injective and Int(U,A) ⊆ f_v(U).
pub fn necessary_condition(pat: &Pattern) -> NecessaryDiagnostics {
    let mut images: BTreeMap<Point, Point> = BTreeMap::new();
    for c in pat.domain() {
        let t = pat.image_of(c).expect("cell in domain");
        if let Some(prev) = images.insert(t.clone(), c.clone()) {
            return NecessaryDiagnostics { ok: false, collision: Some((prev, c.clone(), t)), uncovered: None };
        }
    }
    let int = interior(&pat.domain_set(), pat.set());
    if let Some(c) = int.into_iter().find(|c| !images.contains_key(c)) {
        return NecessaryDiagnostics { ok: false, collision: None, uncovered: Some(c) };
    }
    NecessaryDiagnostics { ok: true, collision: None, uncovered: None }
}

/// A finite list of forbidden patterns, each a map cell -> displacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenSet {
    pub name: String,
    pub patterns: Vec<BTreeMap<Point, Point>>,
}

impl ForbiddenSet {
    pub fn empty() -> Self {
        Self { name: "empty".into(), patterns: Vec::new() }
    }

    /// Patterns on −A where the number of cells sent to the origin is not 1.
    pub fn surjectivity(set: &RestrictingSet) -> Self {
        let cells: Vec<Point> = set.negated().vectors().to_vec();
        let k = set.len();
        let mut patterns = Vec::new();
        let mut digits = vec![0usize; cells.len()];
        loop {
            let hits = cells
                .iter()
                .zip(&digits)
                .filter(|(c, &d)| add(c, set.get(d)).iter().all(|&x| x == 0))
                .count();
            if hits != 1 {
                patterns.push(
                    cells.iter().cloned().zip(digits.iter().map(|&d| set.get(d).to_vec())).collect(),
                );
            }
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < k {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        Self { name: format!("F{set}"), patterns }
    }

    /// The surjectivity patterns plus every pair of cells −a, −b (a ≠ b)
    /// both sent to the origin.
    pub fn with_collisions(set: &RestrictingSet) -> Self {
        let mut f = Self::surjectivity(set);
        for a in set.vectors() {
            for b in set.vectors() {
                if a < b {
                    let na: Point = a.iter().map(|x| -x).collect();
                    let nb: Point = b.iter().map(|x| -x).collect();
                    f.patterns.push([(na, a.clone()), (nb, b.clone())].into_iter().collect());
                }
            }
        }
        f.name = format!("F'{set}");
        f
    }

    pub fn a_plus() -> Self {
        Self::surjectivity(&RestrictingSet::a_plus())
    }

    pub fn a_plus_prime() -> Self {
        Self::with_collisions(&RestrictingSet::a_plus())
    }
}

/// No translate of a forbidden pattern occurs in `pat`.
pub fn local_admissibility(pat: &Pattern, forbidden: &ForbiddenSet) -> bool {
    !forbidden.patterns.iter().any(|w| occurs(pat, w))
}

fn occurs(pat: &Pattern, w: &BTreeMap<Point, Point>) -> bool {
    let Some((c0, _)) = w.iter().next() else { return true };
    pat.domain().any(|p| {
        let t = sub(p, c0);
        w.iter().all(|(c, v)| pat.value(&add(c, &t)) == Some(v.as_slice()))
    })
}

/// A toral permutation whose restriction to the pattern's domain, moved by
/// `offset`, is the pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCertificate {
    pub torus: ToralPermutation,
    /// torus position of the domain's origin
    pub offset: Point,
}

impl ExtensionCertificate {
    /// Independent re-check: distinct residues, bijectivity, agreement.
    pub fn verify(&self, pat: &Pattern) -> bool {
        let shape = self.torus.shape();
        if self.torus.set() != pat.set() || !pat.set().distinct_mod(shape) {
            return false;
        }
        let mut cells = BTreeSet::new();
        for (c, k) in pat.entries() {
            let i = shape.wrap_index(&add(c, &self.offset));
            if !cells.insert(i) || self.torus.field()[i] != k {
                return false;
            }
        }
        ToralPermutation::new(self.torus.set().clone(), shape.clone(), self.torus.field().to_vec()).is_ok()
    }
}

/// Closes a pattern into a toral permutation by bipartite matching on a
/// torus with `margin` free cells around the domain's bounding box.
/// `fixed` pre-assigns torus cells (index -> displacement index).
fn close_on_torus(pat: &Pattern, margin: usize, fixed: &BTreeMap<Point, usize>) -> Option<ExtensionCertificate> {
    let set = pat.set();
    let (lo, hi) = pat.bounding_box();
    let reach = set.vectors().iter().flatten().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
    let dims: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize + 2 * margin + 2 * reach).collect();
    let shape = BoxShape::new(dims).ok()?;
    if !set.distinct_mod(&shape) {
        return None;
    }
    let offset: Point = lo.iter().map(|&l| -l + (margin + reach) as i64).collect();
    let n = shape.volume();
    let mut field: Vec<Option<usize>> = vec![None; n];
    let mut hit = vec![false; n];
    let assign = |cell: &Point, k: usize, field: &mut Vec<Option<usize>>, hit: &mut Vec<bool>| -> bool {
        let i = shape.wrap_index(&add(cell, &offset));
        let t = shape.wrap_index(&add(&add(cell, &offset), set.get(k)));
        if field[i].is_some() || hit[t] {
            return false;
        }
        field[i] = Some(k);
        hit[t] = true;
        true
    };
    for (c, k) in pat.entries() {
        if !assign(c, k, &mut field, &mut hit) {
            return None;
        }
    }
    for (c, &k) in fixed {
        if !assign(c, k, &mut field, &mut hit) {
            return None;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| field[i].is_none()).collect();
    let targets: Vec<usize> = (0..n).filter(|&t| !hit[t]).collect();
    let mut tpos = vec![usize::MAX; n];
    for (j, &t) in targets.iter().enumerate() {
        tpos[t] = j;
    }
    let mut adj = Vec::with_capacity(free.len());
    let mut labels = Vec::with_capacity(free.len());
    let mut hint = Vec::with_capacity(free.len());
    let zero = set.index_of(&vec![0; set.dim()]);
    for &i in &free {
        let c = shape.coord(i);
        let mut row = Vec::new();
        let mut lab = Vec::new();
        for k in 0..set.len() {
            let t = shape.wrap_index(&add(&c, set.get(k)));
            let j = tpos[t];
            if j != usize::MAX {
                row.push(j);
                lab.push((j, k));
            }
        }
        hint.push(zero.map(|z| tpos[shape.wrap_index(&add(&c, set.get(z)))]).filter(|&j| j != usize::MAX));
        adj.push(row);
        labels.push(lab);
    }
    let g = Bipartite::new(adj, targets.len());
    let m = g.max_matching(Some(&hint));
    if free.len() != targets.len() || !m.is_left_perfect() {
        return None;
    }
    for (fi, &i) in free.iter().enumerate() {
        let j = m.left_to_right[fi].unwrap();
        let k = labels[fi].iter().find(|(jj, _)| *jj == j).unwrap().1;
        field[i] = Some(k);
    }
    let field: Vec<usize> = field.into_iter().map(Option::unwrap).collect();
    let torus = ToralPermutation::new(set.clone(), shape, field).ok()?;
    let cert = ExtensionCertificate { torus, offset };
    cert.verify(pat).then_some(cert)
}

/// Tries growing tori until a periodic extension is found.
pub fn extend_by_matching(pat: &Pattern, max_margin: usize) -> Option<ExtensionCertificate> {
    (1..=max_margin).find_map(|m| close_on_torus(pat, m, &BTreeMap::new()))
}

/// Periodic extension of a box pattern over A_L or A_⊕ satisfying the
/// necessary condition. Cells pushed out of the box start outward rays,
/// holes are fed by inward rays, adjacent exit/hole pairs swap directly;
/// the rest of the torus is closed by matching.
pub fn extend_rectangular(pat: &Pattern, shape: &BoxShape) -> Result<ExtensionCertificate> {
    let set = pat.set();
    if *set != RestrictingSet::a_l() && *set != RestrictingSet::a_oplus() {
        return Err(Error::Domain("extension is implemented for A_L and A_oplus".into()));
    }
    if !pat.is_box(shape) {
        return Err(Error::Domain("pattern domain is not the box".into()));
    }
    let diag = necessary_condition(pat);
    if !diag.ok {
        return Err(Error::NotAdmissible(diag.describe()));
    }
    let fixed = ray_starts(pat, shape);
    let small = shape.dims().iter().copied().max().unwrap_or(0) + 2;
    let margin = shape.dims().iter().sum::<usize>() + 2;
    for m in [small, margin, 2 * margin] {
        if let Some(c) = close_on_torus(pat, m, &fixed) {
            return Ok(c);
        }
    }
    for m in [margin, 2 * margin] {
        if let Some(c) = close_on_torus(pat, m, &BTreeMap::new()) {
            return Ok(c);
        }
    }
    Err(Error::Internal("no periodic extension found for a pattern passing the criterion".into()))
}

/// First steps outside the box: pairs, outward rays and inward rays.
fn ray_starts(pat: &Pattern, shape: &BoxShape) -> BTreeMap<Point, usize> {
    let set = pat.set();
    let images: BTreeSet<Point> = pat.domain().map(|c| pat.image_of(c).unwrap()).collect();
    let exits: Vec<Point> = images.iter().filter(|t| !shape.contains(t)).cloned().collect();
    let mut holes: Vec<Point> = shape.cells().filter(|c| !images.contains(c)).collect();
    let mut fixed: BTreeMap<Point, usize> = BTreeMap::new();
    let mut fed: BTreeSet<Point> = BTreeSet::new();
    let outward = |p: &Point| -> Option<Point> {
        let d = shape.dims();
        if p[0] < 0 {
            Some(vec![-1, 0])
        } else if p[0] >= d[0] as i64 {
            Some(vec![1, 0])
        } else if p[1] < 0 {
            Some(vec![0, -1])
        } else if p[1] >= d[1] as i64 {
            Some(vec![0, 1])
        } else {
            None
        }
    };
    // pairs
    for m in &exits {
        if let Some(h) = holes.iter().find(|h| !fed.contains(*h) && set.contains(&sub(h, m))) {
            fixed.insert(m.clone(), set.index_of(&sub(h, m)).unwrap());
            fed.insert(h.clone());
        }
    }
    holes.retain(|h| !fed.contains(h));
    // outward rays
    for m in &exits {
        if fixed.contains_key(m) {
            continue;
        }
        if let Some(e) = outward(m).and_then(|e| set.index_of(&e)) {
            fixed.insert(m.clone(), e);
        }
    }
    // inward rays, horizontal first
    for h in &holes {
        for e in [vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]] {
            let Some(k) = set.index_of(&e) else { continue };
            let src = sub(h, &e);
            if !shape.contains(&src) && !fixed.contains_key(&src) && !images.contains(&src) {
                fixed.insert(src, k);
                break;
            }
        }
    }
    fixed
}

/// A set of demanded cells with too few possible preimages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub cells: Vec<Point>,
    pub candidates: Vec<Point>,
}

impl Obstruction {
    /// Recomputes the candidate set from scratch and checks the deficit.
    pub fn verify(&self, pat: &Pattern) -> bool {
        let images: BTreeSet<Point> = pat.domain().map(|c| pat.image_of(c).unwrap()).collect();
        if self.cells.iter().any(|c| images.contains(c)) {
            return false;
        }
        let cand: BTreeSet<Point> = self
            .cells
            .iter()
            .flat_map(|t| preimage_candidates(pat, t))
            .collect();
        cand.len() < self.cells.len() && cand == self.candidates.iter().cloned().collect()
    }
}

fn preimage_candidates(pat: &Pattern, t: &[i64]) -> Vec<Point> {
    pat.set()
        .vectors()
        .iter()
        .map(|a| sub(t, a))
        .filter(|x| !pat.contains(x))
        .collect()
}

/// Hall-condition search: every cell within `radius` (sup norm) of the
/// domain that the pattern does not hit needs a distinct free preimage.
pub fn obstruction_search(pat: &Pattern, radius: usize) -> Option<Obstruction> {
    let images: BTreeSet<Point> = pat.domain().map(|c| pat.image_of(c).unwrap()).collect();
    let r = radius as i64;
    let mut window: BTreeSet<Point> = BTreeSet::new();
    for c in pat.domain() {
        let side = BoxShape::new(vec![2 * radius + 1; c.len()]).unwrap();
        for d in side.cells() {
            let off: Point = d.iter().map(|x| x - r).collect();
            window.insert(add(c, &off));
        }
    }
    let demands: Vec<Point> = window.into_iter().filter(|t| !images.contains(t)).collect();
    let mut cand_index: BTreeMap<Point, usize> = BTreeMap::new();
    let mut adj = Vec::with_capacity(demands.len());
    for t in &demands {
        let row = preimage_candidates(pat, t)
            .into_iter()
            .map(|x| {
                let n = cand_index.len();
                *cand_index.entry(x).or_insert(n)
            })
            .collect();
        adj.push(row);
    }
    let g = Bipartite::new(adj, cand_index.len());
    let m = g.max_matching(None);
    let free = m.left_to_right.iter().position(Option::is_none)?;
    let (left, right) = g.hall_violator(&m, free);
    let by_id: BTreeMap<usize, &Point> = cand_index.iter().map(|(p, &i)| (i, p)).collect();
    let mut cells: Vec<Point> = left.into_iter().map(|i| demands[i].clone()).collect();
    let mut candidates: Vec<Point> = right.into_iter().map(|j| by_id[&j].clone()).collect();
    cells.sort();
    candidates.sort();
    let ob = Obstruction { cells, candidates };
    ob.verify(pat).then_some(ob)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalVerdict {
    Yes(ExtensionCertificate),
    /// failed the necessary condition
    Violates(NecessaryDiagnostics),
    No(Obstruction),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityVerdict {
    pub necessary: NecessaryDiagnostics,
    /// (forbidden set name, verdict)
    pub local: Option<(String, bool)>,
    pub global: GlobalVerdict,
}

/// Full check: necessary condition, optional forbidden set, then a
/// certificate (rectangles over A_L/A_⊕ or matching closure) or a Hall
/// obstruction.
pub fn check_pattern(pat: &Pattern, radius: usize, forbidden: Option<&ForbiddenSet>) -> AdmissibilityVerdict {
    let necessary = necessary_condition(pat);
    let local = forbidden.map(|f| (f.name.clone(), local_admissibility(pat, f)));
    let global = if !necessary.ok {
        GlobalVerdict::Violates(necessary.clone())
    } else if let Some(c) = rectangular_certificate(pat) {
        GlobalVerdict::Yes(c)
    } else if let Some(ob) = obstruction_search(pat, radius) {
        GlobalVerdict::No(ob)
    } else if let Some(c) = extend_by_matching(pat, 3) {
        GlobalVerdict::Yes(c)
    } else {
        GlobalVerdict::Unknown
    };
    AdmissibilityVerdict { necessary, local, global }
}

fn rectangular_certificate(pat: &Pattern) -> Option<ExtensionCertificate> {
    let set = pat.set();
    if set.dim() != 2 || (*set != RestrictingSet::a_l() && *set != RestrictingSet::a_oplus()) {
        return None;
    }
    let (lo, hi) = pat.bounding_box();
    let shape = BoxShape::planar((hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize).ok()?;
    if shape.volume() != pat.len() {
        return None;
    }
    let moved = Pattern::from_indices(set.clone(), pat.entries().map(|(c, k)| (sub(c, &lo), k))).ok()?;
    let mut cert = extend_rectangular(&moved, &shape).ok()?;
    cert.offset = sub(&cert.offset, &lo);
    cert.verify(pat).then_some(cert)
}
