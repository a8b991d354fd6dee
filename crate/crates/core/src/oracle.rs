//! Brute-force reference counts. Every fast counter in the crate has a twin
//! here; all of them refuse (CapacityError) rather than truncate.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::admissibility::{extend_by_matching, necessary_condition, obstruction_search};
use crate::correspond::{PerfectCover, PerfectMatching};
use crate::error::{Error, Result};
use crate::graphkit::{square_torus, UndirectedGraph};
use crate::lattice::{add, BoxShape, FieldSearch, Pattern, Point, RestrictingSet, SearchMode, ToralPermutation};

pub const BUDGET_ENV: &str = "PERMLATTICE_BUDGET";

/// Search limits shared by all oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// search nodes (or candidate fields) visited before giving up
    pub nodes: u64,
    /// graphs with at most this many edges use the subset scan
    pub subset_edges: usize,
    /// maximum number of witnesses kept in memory
    pub witnesses: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { nodes: 50_000_000, subset_edges: 26, witnesses: 200_000 }
    }
}

impl Budget {
    /// Defaults, with the node budget taken from `PERMLATTICE_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        let mut b = Self::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            b.nodes = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{BUDGET_ENV}={v:?} is not a node count")))?;
        }
        Ok(b)
    }

    fn tick(&self, used: &mut u64) -> Result<()> {
        *used += 1;
        if *used > self.nodes {
            return Err(Error::Capacity(format!("oracle budget of {} nodes exhausted", self.nodes)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Backtracking,
    SubsetScan,
    /// filter by the rectangular admissibility criterion
    CriterionFilter,
    /// certified bounds: periodic restrictions / extensions below, local
    /// conditions with no obstruction above
    Bounds,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Backtracking => "backtracking",
            Method::SubsetScan => "subset-scan",
            Method::CriterionFilter => "criterion-filter",
            Method::Bounds => "bounds",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumerationResult<W> {
    pub count: BigUint,
    pub witnesses: Option<Vec<W>>,
    pub method: Method,
}

/// Pattern counts: exact when `lower == upper`.
#[derive(Clone, Debug)]
pub struct PatternCount {
    pub lower: BigUint,
    pub upper: BigUint,
    pub method: Method,
    /// certified patterns, when requested and the count is exact
    pub witnesses: Option<Vec<Pattern>>,
}

impl PatternCount {
    pub fn exact(&self) -> Option<&BigUint> {
        (self.lower == self.upper).then_some(&self.lower)
    }
}

struct Keeper<W> {
    items: Option<Vec<W>>,
    cap: usize,
}

impl<W> Keeper<W> {
    fn new(keep: bool, cap: usize) -> Self {
        Self { items: keep.then(Vec::new), cap }
    }

    fn push(&mut self, w: impl FnOnce() -> W) -> Result<()> {
        if let Some(v) = self.items.as_mut() {
            if v.len() >= self.cap {
                return Err(Error::Capacity(format!("more than {} witnesses", self.cap)));
            }
            v.push(w());
        }
        Ok(())
    }
}

/// All toral permutations of `shape` over `set` by backtracking with
/// bijectivity pruning.
pub fn brute_toral_permutations(
    set: &RestrictingSet,
    shape: &BoxShape,
    budget: &Budget,
    keep: bool,
) -> Result<EnumerationResult<ToralPermutation>> {
    if set.dim() != shape.dim() {
        return Err(Error::Domain("set and shape dimensions differ".into()));
    }
    let search = FieldSearch::new(set, shape, SearchMode::Torus);
    let mut count = BigUint::zero();
    let mut kept = Keeper::new(keep, budget.witnesses);
    let mut failure = None;
    search.for_each(budget.nodes, |field| {
        count += 1u32;
        if failure.is_none() {
            if let Err(e) = kept.push(|| ToralPermutation::new(set.clone(), shape.clone(), field.to_vec()).unwrap()) {
                failure = Some(e);
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(EnumerationResult { count, witnesses: kept.items, method: Method::Backtracking })
}

/// Perfect matchings, counted with edge multiplicity. Small graphs use the
/// subset scan over all edge sets of the right size.
pub fn brute_matchings(g: &UndirectedGraph, budget: &Budget, keep: bool) -> Result<EnumerationResult<PerfectMatching>> {
    let n = g.vertex_count();
    if n % 2 == 1 {
        return Ok(EnumerationResult { count: BigUint::zero(), witnesses: keep.then(Vec::new), method: Method::Backtracking });
    }
    let edges: Vec<usize> = (0..g.edges.len()).filter(|&e| !g.edges[e].is_loop()).collect();
    if edges.len() <= budget.subset_edges && n <= 64 {
        return subset_scan(g, &edges, budget, keep);
    }
    let all: Vec<usize> = (0..n).collect();
    cover_search(g, &all, budget, keep).map(|r| EnumerationResult {
        count: r.count,
        witnesses: r.witnesses.map(|w| w.into_iter().map(|c| PerfectMatching::new(c.edges)).collect()),
        method: Method::Backtracking,
    })
}

fn subset_scan(g: &UndirectedGraph, edges: &[usize], budget: &Budget, keep: bool) -> Result<EnumerationResult<PerfectMatching>> {
    let n = g.vertex_count();
    let k = n / 2;
    let e = edges.len();
    let mut kept = Keeper::new(keep, budget.witnesses);
    let mut count = BigUint::zero();
    if k == 0 {
        kept.push(|| PerfectMatching::new(Vec::new()))?;
        return Ok(EnumerationResult { count: BigUint::one(), witnesses: kept.items, method: Method::SubsetScan });
    }
    if k > e {
        return Ok(EnumerationResult { count, witnesses: kept.items, method: Method::SubsetScan });
    }
    let masks: Vec<u64> = edges.iter().map(|&i| (1u64 << g.edges[i].a) | (1u64 << g.edges[i].b)).collect();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut used = 0u64;
    // Gosper's hack over all k-subsets of the edge list
    let mut s: u64 = (1u64 << k) - 1;
    let limit: u64 = 1u64 << e;
    while s < limit {
        budget.tick(&mut used)?;
        let mut cover = 0u64;
        let mut ok = true;
        let mut bits = s;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            if cover & masks[i] != 0 {
                ok = false;
                break;
            }
            cover |= masks[i];
            bits &= bits - 1;
        }
        if ok && cover == full {
            let mut w = BigUint::one();
            let mut chosen = Vec::with_capacity(k);
            let mut bits = s;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                w *= g.edges[edges[i]].mult;
                chosen.push(edges[i]);
                bits &= bits - 1;
            }
            count += w;
            kept.push(|| PerfectMatching::new(chosen))?;
        }
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    Ok(EnumerationResult { count, witnesses: kept.items, method: Method::SubsetScan })
}

/// Perfect covers of `target`: every target vertex on exactly one chosen
/// edge, chosen edges pairwise disjoint.
pub fn brute_covers(g: &UndirectedGraph, target: &[usize], budget: &Budget, keep: bool) -> Result<EnumerationResult<PerfectCover>> {
    cover_search(g, target, budget, keep)
}

fn cover_search(g: &UndirectedGraph, target: &[usize], budget: &Budget, keep: bool) -> Result<EnumerationResult<PerfectCover>> {
    let n = g.vertex_count();
    let mut in_target = vec![false; n];
    for &t in target {
        if t >= n {
            return Err(Error::Domain(format!("target vertex {t} out of range")));
        }
        in_target[t] = true;
    }
    let inc = g.incidence();
    let order: Vec<usize> = (0..n).filter(|&v| in_target[v]).collect();
    struct State<'a> {
        g: &'a UndirectedGraph,
        inc: &'a [Vec<usize>],
        order: &'a [usize],
        used: Vec<bool>,
        chosen: Vec<usize>,
        nodes: u64,
        count: BigUint,
        kept: Keeper<PerfectCover>,
        target: Vec<usize>,
    }
    fn go(st: &mut State, pos: usize, weight: &BigUint, budget: &Budget) -> Result<()> {
        let Some(&v) = st.order[pos..].iter().find(|&&v| !st.used[v]) else {
            st.count += weight;
            let (t, c) = (st.target.clone(), st.chosen.clone());
            return st.kept.push(|| PerfectCover::new(t, c));
        };
        let next = st.order.iter().position(|&x| x == v).unwrap() + 1;
        st.used[v] = true;
        for i in 0..st.inc[v].len() {
            let e = st.inc[v][i];
            let edge = &st.g.edges[e];
            if edge.is_loop() {
                continue;
            }
            let u = edge.other(v);
            if st.used[u] {
                continue;
            }
            budget.tick(&mut st.nodes)?;
            st.used[u] = true;
            st.chosen.push(e);
            let w = weight * edge.mult;
            go(st, next, &w, budget)?;
            st.chosen.pop();
            st.used[u] = false;
        }
        st.used[v] = false;
        Ok(())
    }
    let mut st = State {
        g,
        inc: &inc,
        order: &order,
        used: vec![false; n],
        chosen: Vec::new(),
        nodes: 0,
        count: BigUint::zero(),
        kept: Keeper::new(keep, budget.witnesses),
        target: target.to_vec(),
    };
    go(&mut st, 0, &BigUint::one(), budget)?;
    Ok(EnumerationResult { count: st.count, witnesses: st.kept.items, method: Method::Backtracking })
}

/// Visits every displacement field on the box whose images are pairwise
/// distinct (when `injective`), in lexicographic order of indices.
fn for_each_field(
    set: &RestrictingSet,
    shape: &BoxShape,
    injective: bool,
    budget: &Budget,
    mut visit: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let cells: Vec<Point> = shape.cells().collect();
    let space = (set.len() as f64).powi(cells.len() as i32);
    if space > budget.nodes as f64 {
        return Err(Error::Capacity(format!(
            "{}^{} candidate fields exceed the budget of {} nodes",
            set.len(),
            cells.len(),
            budget.nodes
        )));
    }
    let mut field = vec![0usize; cells.len()];
    let mut images: BTreeSet<Point> = BTreeSet::new();
    let mut nodes = 0u64;
    fn go(
        i: usize,
        cells: &[Point],
        set: &RestrictingSet,
        injective: bool,
        field: &mut [usize],
        images: &mut BTreeSet<Point>,
        nodes: &mut u64,
        budget: &Budget,
        visit: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if i == cells.len() {
            return visit(field);
        }
        for k in 0..set.len() {
            budget.tick(nodes)?;
            let t = add(&cells[i], set.get(k));
            if injective && images.contains(&t) {
                continue;
            }
            field[i] = k;
            let fresh = images.insert(t.clone());
            go(i + 1, cells, set, injective, field, images, nodes, budget, visit)?;
            if fresh {
                images.remove(&t);
            }
        }
        Ok(())
    }
    go(0, &cells, set, injective, &mut field, &mut images, &mut nodes, budget, &mut visit)
}

const OBSTRUCTION_RADIUS: usize = 2;

/// |B_shape(Ω(A))|. Exact for A_L and A_⊕ (necessary condition is
/// sufficient on rectangles); certified bounds otherwise.
pub fn brute_patterns(set: &RestrictingSet, shape: &BoxShape, budget: &Budget, keep: bool) -> Result<PatternCount> {
    if shape.dim() != 2 || set.dim() != 2 {
        return Err(Error::Domain("rectangular patterns are planar".into()));
    }
    let exact = *set == RestrictingSet::a_l() || *set == RestrictingSet::a_oplus();
    let mut kept = Keeper::new(keep, budget.witnesses);
    let mut lower = BigUint::zero();
    let mut upper = BigUint::zero();
    for_each_field(set, shape, true, budget, |field| {
        let pat = Pattern::on_box(set.clone(), shape, field)?;
        if !necessary_condition(&pat).ok {
            return Ok(());
        }
        if exact {
            upper += 1u32;
            lower += 1u32;
            return kept.push(|| pat);
        }
        if obstruction_search(&pat, OBSTRUCTION_RADIUS).is_some() {
            return Ok(());
        }
        upper += 1u32;
        if extend_by_matching(&pat, 3).is_some() {
            lower += 1u32;
            kept.push(|| pat)?;
        }
        Ok(())
    })?;
    if *set == RestrictingSet::a_plus() {
        let periodic = a_plus_periodic_lower(shape, budget)?;
        if periodic > lower {
            lower = periodic;
        }
    }
    let method = if exact { Method::CriterionFilter } else { Method::Bounds };
    let witnesses = if lower == upper { kept.items } else { None };
    Ok(PatternCount { lower, upper, method, witnesses })
}

/// Box patterns realized by A_+ periodic points on even tori. A periodic
/// point is a pair of perfect matchings of the square torus, one read from
/// the black cells and one from the white cells, so the realized patterns
/// are a product of the two restricted sets.
fn a_plus_periodic_lower(shape: &BoxShape, budget: &Budget) -> Result<BigUint> {
    let set = RestrictingSet::a_plus();
    let cells: Vec<Point> = shape.cells().collect();
    let big = shape.dims().iter().copied().max().unwrap();
    let mut black: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut white: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut m = (big + 2).max(4);
    m += m % 2;
    for m in [m, m + 2] {
        let torus = BoxShape::square(m)?;
        let g = square_torus(m);
        let all = match brute_matchings(&g, &Budget { subset_edges: 0, ..*budget }, true) {
            Ok(r) => r.witnesses.unwrap(),
            Err(Error::Capacity(_)) if m > 4 => break,
            Err(e) => return Err(e),
        };
        for pm in all {
            let partner = pm.partners(&g);
            let mut b = Vec::new();
            let mut w = Vec::new();
            for c in &cells {
                let v = torus.wrap_index(c);
                let p = partner[v].unwrap();
                let k = (0..set.len())
                    .find(|&k| torus.wrap_index(&add(c, set.get(k))) == p)
                    .unwrap();
                if (c[0] + c[1]) % 2 == 0 {
                    b.push(k);
                } else {
                    w.push(k);
                }
            }
            black.insert(b);
            white.insert(w);
        }
    }
    Ok(BigUint::from(black.len()) * BigUint::from(white.len()))
}

/// Injective-model patterns: fields injective on the box. Exact count of
/// certified ones below, all locally valid ones above.
pub fn brute_injective_patterns(set: &RestrictingSet, shape: &BoxShape, budget: &Budget) -> Result<PatternCount> {
    model_patterns(set, shape, budget, true)
}

/// Surjective-model patterns: fields covering the box interior.
pub fn brute_surjective_patterns(set: &RestrictingSet, shape: &BoxShape, budget: &Budget) -> Result<PatternCount> {
    model_patterns(set, shape, budget, false)
}

fn model_patterns(set: &RestrictingSet, shape: &BoxShape, budget: &Budget, injective: bool) -> Result<PatternCount> {
    if set.dim() != 2 {
        return Err(Error::Domain("model patterns are implemented for planar sets".into()));
    }
    let cells: Vec<Point> = shape.cells().collect();
    let interior = crate::admissibility::interior(&cells.iter().cloned().collect(), set);
    let layouts = Layouts::new(set, shape, injective);
    let mut lower = BigUint::zero();
    let mut upper = BigUint::zero();
    for_each_field(set, shape, injective, budget, |field| {
        let images: BTreeSet<Point> = cells.iter().zip(field).map(|(c, &k)| add(c, set.get(k))).collect();
        if !injective && !interior.is_subset(&images) {
            return Ok(());
        }
        upper += 1u32;
        if layouts.certify(field).is_some_and(|c| c.verify(set, shape, injective)) {
            lower += 1u32;
        }
        Ok(())
    })?;
    Ok(PatternCount { lower, upper, method: Method::Bounds, witnesses: None })
}

/// Extension witness for the injective / surjective models. Outside the box
/// the plane splits into four strips and four quadrants, by whether each
/// coordinate lies below, within or above the box; every cell of a region
/// moves by that region's displacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCertificate {
    /// displacement index per region, row-major over (y class, x class),
    /// the box itself skipped
    pub outside: [usize; 8],
    /// box displacement indices, x fastest
    pub field: Vec<usize>,
}

fn class(v: i64, n: i64) -> usize {
    if v < 0 {
        0
    } else if v < n {
        1
    } else {
        2
    }
}

fn region(x: i64, y: i64, n: i64, m: i64) -> Option<usize> {
    match 3 * class(y, m) + class(x, n) {
        4 => None,
        r if r < 4 => Some(r),
        r => Some(r - 1),
    }
}

fn reach(set: &RestrictingSet) -> i64 {
    set.vectors().iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
}

impl ModelCertificate {
    fn displacement(&self, set: &RestrictingSet, n: i64, m: i64, x: i64, y: i64) -> (i64, i64) {
        let k = match region(x, y, n, m) {
            Some(r) => self.outside[r],
            None => self.field[(y * n + x) as usize],
        };
        let a = set.get(k);
        (a[0], a[1])
    }

    /// Exact check. Each region is invariant under shifts along its
    /// unbounded axes, so any collision or uncovered cell has a copy within
    /// twice the reach of the box.
    pub fn verify(&self, set: &RestrictingSet, shape: &BoxShape, injective: bool) -> bool {
        let d = shape.dims();
        if set.dim() != 2 || self.field.len() != shape.volume() || d.len() != 2 {
            return false;
        }
        if self.outside.iter().chain(&self.field).any(|&k| k >= set.len()) {
            return false;
        }
        let (n, m) = (d[0] as i64, d[1] as i64);
        let r = reach(set);
        if injective {
            let mut seen = BTreeSet::new();
            for x in -2 * r - 1..=n + 2 * r {
                for y in -2 * r - 1..=m + 2 * r {
                    let (dx, dy) = self.displacement(set, n, m, x, y);
                    if !seen.insert((x + dx, y + dy)) {
                        return false;
                    }
                }
            }
            true
        } else {
            (-r - 1..=n + r).all(|x| {
                (-r - 1..=m + r).all(|y| {
                    set.vectors().iter().any(|a| {
                        let (px, py) = (x - a[0], y - a[1]);
                        self.displacement(set, n, m, px, py) == (a[0], a[1])
                    })
                })
            })
        }
    }
}

/// The useful region layouts for one set, shape and model, each with the
/// cells near the box it blocks (injective: already hit from outside;
/// surjective: still uncovered).
struct Layouts {
    n: i64,
    order: Vec<usize>,
    set: RestrictingSet,
    injective: bool,
    found: Vec<([usize; 8], BTreeSet<(i64, i64)>)>,
}

impl Layouts {
    fn new(set: &RestrictingSet, shape: &BoxShape, injective: bool) -> Self {
        let d = shape.dims();
        let (n, m) = (d[0] as i64, d[1] as i64);
        let r = reach(set);
        let vecs: Vec<(i64, i64)> = set.vectors().iter().map(|a| (a[0], a[1])).collect();
        let near = |(x, y): (i64, i64)| x >= -r && y >= -r && x < n + r && y < m + r;
        let k = set.len();
        let mut found: Vec<([usize; 8], BTreeSet<(i64, i64)>)> = Vec::new();
        let mut layout = [0usize; 8];
        'layouts: loop {
            let at = |x: i64, y: i64| region(x, y, n, m).map(|q| vecs[layout[q]]);
            let mut blocked = BTreeSet::new();
            if injective {
                for x in -2 * r - 1..=n + 2 * r {
                    for y in -2 * r - 1..=m + 2 * r {
                        if let Some((dx, dy)) = at(x, y) {
                            if !blocked.insert((x + dx, y + dy)) {
                                if !advance(&mut layout, k) {
                                    break 'layouts;
                                }
                                continue 'layouts;
                            }
                        }
                    }
                }
                blocked.retain(|&c| near(c));
            } else {
                for x in -r - 1..=n + r {
                    for y in -r - 1..=m + r {
                        let covered = vecs.iter().any(|&(ax, ay)| at(x - ax, y - ay) == Some((ax, ay)));
                        if !covered {
                            blocked.insert((x, y));
                        }
                    }
                }
            }
            let usable = blocked.iter().all(|&c| near(c));
            if usable && !found.iter().any(|(_, b)| b.is_subset(&blocked)) {
                found.retain(|(_, b)| !blocked.is_subset(b));
                found.push((layout, blocked));
            }
            if !advance(&mut layout, k) {
                break;
            }
        }
        let order = shape.cells().map(|c| (c[1] * n + c[0]) as usize).collect();
        Self { n, order, set: set.clone(), injective, found }
    }

    /// `field` follows the shape's cell order.
    fn certify(&self, field: &[usize]) -> Option<ModelCertificate> {
        let mut by_xy = vec![0; field.len()];
        for (i, &k) in field.iter().enumerate() {
            by_xy[self.order[i]] = k;
        }
        let images: BTreeSet<(i64, i64)> = by_xy
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let (x, y) = (i as i64 % self.n, i as i64 / self.n);
                let a = self.set.get(k);
                (x + a[0], y + a[1])
            })
            .collect();
        self.found
            .iter()
            .find(|(_, b)| if self.injective { b.is_disjoint(&images) } else { b.is_subset(&images) })
            .map(|(layout, _)| ModelCertificate { outside: *layout, field: by_xy.clone() })
    }
}

fn advance(layout: &mut [usize; 8], k: usize) -> bool {
    for v in layout.iter_mut() {
        *v += 1;
        if *v < k {
            return true;
        }
        *v = 0;
    }
    false
}

/// Region-layout certificate for one box field (in the shape's cell order),
/// re-verified before it is returned.
pub fn model_certificate(set: &RestrictingSet, shape: &BoxShape, field: &[usize], injective: bool) -> Option<ModelCertificate> {
    if set.dim() != 2 || field.len() != shape.volume() {
        return None;
    }
    Layouts::new(set, shape, injective)
        .certify(field)
        .filter(|c| c.verify(set, shape, injective))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::VertexLabel;

    fn cycle(n: usize) -> UndirectedGraph {
        let mut g = UndirectedGraph::new((0..n).map(VertexLabel::Aux).collect());
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, 1, None);
        }
        g
    }

    #[test]
    fn four_cycle() {
        let b = Budget::default();
        assert_eq!(brute_matchings(&cycle(4), &b, false).unwrap().count, 2u32.into());
        let back = brute_matchings(&cycle(4), &Budget { subset_edges: 0, ..b }, false).unwrap();
        assert_eq!(back.count, 2u32.into());
        assert_eq!(brute_matchings(&cycle(5), &b, false).unwrap().count, 0u32.into());
    }

    #[test]
    fn empty_target_has_one_cover() {
        let r = brute_covers(&cycle(4), &[], &Budget::default(), true).unwrap();
        assert_eq!(r.count, 1u32.into());
        assert_eq!(r.witnesses.unwrap().len(), 1);
    }

    #[test]
    fn trivial_toral() {
        let b = Budget::default();
        let zero = RestrictingSet::planar(&[(0, 0)]).unwrap();
        let east = RestrictingSet::planar(&[(1, 0)]).unwrap();
        let s = BoxShape::square(3).unwrap();
        assert_eq!(brute_toral_permutations(&zero, &s, &b, false).unwrap().count, 1u32.into());
        assert_eq!(brute_toral_permutations(&east, &s, &b, false).unwrap().count, 1u32.into());
    }

    #[test]
    fn budget_refuses() {
        let b = Budget { nodes: 10, ..Budget::default() };
        let s = BoxShape::square(3).unwrap();
        assert!(matches!(
            brute_toral_permutations(&RestrictingSet::a_l(), &s, &b, false),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn a_l_single_cell() {
        let s = BoxShape::square(1).unwrap();
        let r = brute_patterns(&RestrictingSet::a_l(), &s, &Budget::default(), true).unwrap();
        assert_eq!(r.exact(), Some(&3u32.into()));
    }

    #[test]
    fn a_plus_single_cell() {
        let s = BoxShape::square(1).unwrap();
        let r = brute_patterns(&RestrictingSet::a_plus(), &s, &Budget::default(), false).unwrap();
        assert_eq!(r.exact(), Some(&4u32.into()));
    }

    #[test]
    fn zero_set_injective() {
        let zero = RestrictingSet::planar(&[(0, 0)]).unwrap();
        for (a, b) in [(1, 1), (2, 3)] {
            let s = BoxShape::planar(a, b).unwrap();
            let r = brute_injective_patterns(&zero, &s, &Budget::default()).unwrap();
            assert_eq!(r.exact(), Some(&1u32.into()));
        }
    }

    #[test]
    fn model_counts_on_small_boxes() {
        let b = Budget::default();
        let s = BoxShape::square(2).unwrap();
        for (set, inj, sur) in [(RestrictingSet::a_l(), 44u32, 57u32), (RestrictingSet::a_plus(), 196, 256)] {
            assert_eq!(brute_injective_patterns(&set, &s, &b).unwrap().exact(), Some(&inj.into()));
            assert_eq!(brute_surjective_patterns(&set, &s, &b).unwrap().exact(), Some(&sur.into()));
        }
    }

    #[test]
    fn tampered_model_certificate_fails() {
        let set = RestrictingSet::a_l();
        let s = BoxShape::planar(2, 1).unwrap();
        // (0,0) moves right onto (1,0), which moves up
        let mut c = model_certificate(&set, &s, &[1, 2], true).unwrap();
        assert!(c.verify(&set, &s, true));
        c.field[1] = 0;
        assert!(!c.verify(&set, &s, true));
        assert!(model_certificate(&set, &s, &[1, 0], true).is_none());
    }
}
