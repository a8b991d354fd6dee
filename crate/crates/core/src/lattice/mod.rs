//! Restricted permutations of Z^d: displacement sets, boxes, patterns and
//! toral permutations.

mod matent;
mod search;
pub mod text;

pub use matent::{matent_compose, matent_decompose, CosetPlan};
pub use search::{FieldSearch, SearchMode};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::linalg;

pub type Point = Vec<i64>;

/// A finite set of allowed displacements. Insertion order is kept because
/// enumeration order follows it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RestrictingSet {
    dim: usize,
    vectors: Vec<Point>,
}

impl RestrictingSet {
    pub fn new(dim: usize, vectors: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if vectors.is_empty() {
            return Err(Error::Domain("restricting set is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::Domain(format!("vector {v:?} has wrong length")));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::Domain(format!("duplicate vector {v:?}")));
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn planar(vectors: &[(i64, i64)]) -> Result<Self> {
        Self::new(2, vectors.iter().map(|&(x, y)| vec![x, y]).collect())
    }

    /// {(0,0), (1,0), (0,1)}
    pub fn a_l() -> Self {
        Self::planar(&[(0, 0), (1, 0), (0, 1)]).unwrap()
    }

    /// The four unit moves.
    pub fn a_plus() -> Self {
        Self::planar(&[(1, 0), (-1, 0), (0, 1), (0, -1)]).unwrap()
    }

    /// Unit moves plus staying put.
    pub fn a_oplus() -> Self {
        Self::planar(&[(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]).unwrap()
    }

    /// The d-dimensional analogue of A_L: zero plus the unit vectors.
    pub fn corner(dim: usize) -> Self {
        let mut v = vec![vec![0; dim]];
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 1;
            v.push(e);
        }
        Self::new(dim, v).unwrap()
    }

    pub fn preset(token: &str) -> Option<Self> {
        match token {
            "AL" | "A_L" => Some(Self::a_l()),
            "A+" | "Aplus" | "A_+" => Some(Self::a_plus()),
            "Aoplus" | "A_oplus" => Some(Self::a_oplus()),
            _ => None,
        }
    }

    /// Short name when this is one of the named presets.
    pub fn preset_name(&self) -> Option<&'static str> {
        if *self == Self::a_l() {
            Some("AL")
        } else if *self == Self::a_plus() {
            Some("A+")
        } else if *self == Self::a_oplus() {
            Some("Aoplus")
        } else {
            None
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Point] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &[i64] {
        &self.vectors[i]
    }

    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.vectors.iter().position(|a| a == v)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.index_of(v).is_some()
    }

    pub fn translate(&self, b: &[i64]) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|a| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Self { dim: self.dim, vectors }
    }

    pub fn negated(&self) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|a| a.iter().map(|x| -x).collect())
            .collect();
        Self { dim: self.dim, vectors }
    }

    /// A = -A as sets.
    pub fn is_symmetric(&self) -> bool {
        self.vectors
            .iter()
            .all(|a| self.contains(&a.iter().map(|x| -x).collect::<Vec<_>>()))
    }

    /// |A mod n| = |A|.
    pub fn distinct_mod(&self, shape: &BoxShape) -> bool {
        let reduced: BTreeSet<Point> = self.vectors.iter().map(|a| shape.reduce(a)).collect();
        reduced.len() == self.vectors.len()
    }
}

impl fmt::Display for RestrictingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.vectors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fmt_point(a))?;
        }
        write!(f, "]")
    }
}

pub fn fmt_point(p: &[i64]) -> String {
    let parts: Vec<String> = p.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

/// The box [n_1] x ... x [n_d], also read as the torus Z^d / Γ_n.
/// Cells are indexed with the first coordinate fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxShape {
    dims: Vec<usize>,
}

impl BoxShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&n| n == 0) {
            return Err(Error::Domain(format!("invalid shape {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn planar(n1: usize, n2: usize) -> Result<Self> {
        Self::new(vec![n1, n2])
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(vec![n, n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dims.len()
            && p.iter().zip(&self.dims).all(|(&x, &n)| x >= 0 && (x as usize) < n)
    }

    /// Index of a cell inside the box.
    pub fn index(&self, p: &[i64]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let mut idx = 0;
        for i in (0..self.dims.len()).rev() {
            idx = idx * self.dims[i] + p[i] as usize;
        }
        Some(idx)
    }

    /// Coordinates reduced into the box, i.e. the torus representative.
    pub fn reduce(&self, p: &[i64]) -> Point {
        p.iter()
            .zip(&self.dims)
            .map(|(&x, &n)| x.rem_euclid(n as i64))
            .collect()
    }

    pub fn wrap_index(&self, p: &[i64]) -> usize {
        self.index(&self.reduce(p)).expect("reduced point lies in the box")
    }

    pub fn coord(&self, mut idx: usize) -> Point {
        let mut p = Vec::with_capacity(self.dims.len());
        for &n in &self.dims {
            p.push((idx % n) as i64);
            idx /= n;
        }
        p
    }

    pub fn cells(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.volume()).map(move |i| self.coord(i))
    }
}

impl fmt::Display for BoxShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A displacement field v: U -> A on a finite domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    set: RestrictingSet,
    values: BTreeMap<Point, usize>,
}

impl Pattern {
    /// Entries are (cell, displacement) pairs.
    pub fn new(set: RestrictingSet, entries: impl IntoIterator<Item = (Point, Point)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (cell, v) in entries {
            if cell.len() != set.dim() {
                return Err(Error::Domain(format!("cell {cell:?} has wrong dimension")));
            }
            let i = set
                .index_of(&v)
                .ok_or_else(|| Error::Domain(format!("value {} not in A", fmt_point(&v))))?;
            if values.insert(cell.clone(), i).is_some() {
                return Err(Error::Domain(format!("cell {} given twice", fmt_point(&cell))));
            }
        }
        if values.is_empty() {
            return Err(Error::Domain("pattern domain is empty".into()));
        }
        Ok(Self { set, values })
    }

    /// Entries give indices into the restricting set.
    pub fn from_indices(set: RestrictingSet, entries: impl IntoIterator<Item = (Point, usize)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (cell, i) in entries {
            if i >= set.len() {
                return Err(Error::Domain(format!("index {i} out of range")));
            }
            values.insert(cell, i);
        }
        if values.is_empty() {
            return Err(Error::Domain("pattern domain is empty".into()));
        }
        Ok(Self { set, values })
    }

    /// Pattern on a box from a field listed in cell-index order.
    pub fn on_box(set: RestrictingSet, shape: &BoxShape, field: &[usize]) -> Result<Self> {
        if field.len() != shape.volume() {
            return Err(Error::Domain("field length does not match the shape".into()));
        }
        Self::from_indices(set, field.iter().enumerate().map(|(i, &a)| (shape.coord(i), a)))
    }

    pub fn set(&self) -> &RestrictingSet {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Point> {
        self.values.keys()
    }

    pub fn domain_set(&self) -> BTreeSet<Point> {
        self.values.keys().cloned().collect()
    }

    pub fn contains(&self, cell: &[i64]) -> bool {
        self.values.contains_key(cell)
    }

    pub fn value_index(&self, cell: &[i64]) -> Option<usize> {
        self.values.get(cell).copied()
    }

    pub fn value(&self, cell: &[i64]) -> Option<&[i64]> {
        self.value_index(cell).map(|i| self.set.get(i))
    }

    /// f_v(m) = m + v(m).
    pub fn image_of(&self, cell: &[i64]) -> Option<Point> {
        self.value(cell).map(|v| add(cell, v))
    }

    /// (cell, displacement index) pairs in domain order.
    pub fn entries(&self) -> impl Iterator<Item = (&Point, usize)> {
        self.values.iter().map(|(c, &i)| (c, i))
    }

    /// Whether the domain is exactly the given box.
    pub fn is_box(&self, shape: &BoxShape) -> bool {
        self.values.len() == shape.volume() && self.values.keys().all(|c| shape.contains(c))
    }

    /// Field in cell-index order when the domain is the box.
    pub fn box_field(&self, shape: &BoxShape) -> Option<Vec<usize>> {
        if !self.is_box(shape) {
            return None;
        }
        Some(shape.cells().map(|c| self.values[&c]).collect())
    }

    /// Smallest box [lo, hi] containing the domain.
    pub fn bounding_box(&self) -> (Point, Point) {
        let d = self.set.dim();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for c in self.values.keys() {
            for i in 0..d {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        (lo, hi)
    }

    pub fn restrict(&self, cells: &BTreeSet<Point>) -> Option<Pattern> {
        let values: BTreeMap<Point, usize> = self
            .values
            .iter()
            .filter(|(c, _)| cells.contains(*c))
            .map(|(c, &i)| (c.clone(), i))
            .collect();
        (!values.is_empty()).then(|| Pattern { set: self.set.clone(), values })
    }
}

/// Result of [`is_toral_permutation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToralCheck {
    pub bijective: bool,
    /// |A mod n| = |A|, the condition under which toral permutations and
    /// periodic points are the same thing.
    pub distinct_mod: bool,
}

pub fn is_toral_permutation(pattern: &Pattern, shape: &BoxShape) -> Result<ToralCheck> {
    let field = pattern
        .box_field(shape)
        .ok_or_else(|| Error::Domain("pattern domain is not the box".into()))?;
    Ok(ToralCheck {
        bijective: field_is_bijective(pattern.set(), shape, &field),
        distinct_mod: pattern.set().distinct_mod(shape),
    })
}

fn field_is_bijective(set: &RestrictingSet, shape: &BoxShape, field: &[usize]) -> bool {
    let mut hit = vec![false; shape.volume()];
    for (i, &a) in field.iter().enumerate() {
        let t = shape.wrap_index(&add(&shape.coord(i), set.get(a)));
        if std::mem::replace(&mut hit[t], true) {
            return false;
        }
    }
    true
}

/// A displacement field on [n] whose induced map mod n is a bijection.
/// Values are indices into the restricting set, so repeated residues mod n
/// stay distinguishable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ToralPermutation {
    set: RestrictingSet,
    shape: BoxShape,
    field: Vec<usize>,
}

impl ToralPermutation {
    pub fn new(set: RestrictingSet, shape: BoxShape, field: Vec<usize>) -> Result<Self> {
        if set.dim() != shape.dim() {
            return Err(Error::Domain("dimension mismatch".into()));
        }
        if field.len() != shape.volume() || field.iter().any(|&a| a >= set.len()) {
            return Err(Error::Domain("field does not fit the shape".into()));
        }
        if !field_is_bijective(&set, &shape, &field) {
            return Err(Error::Domain("field does not induce a bijection of the torus".into()));
        }
        Ok(Self { set, shape, field })
    }

    pub fn from_pattern(pattern: &Pattern, shape: &BoxShape) -> Result<Self> {
        let field = pattern
            .box_field(shape)
            .ok_or_else(|| Error::Domain("pattern domain is not the box".into()))?;
        Self::new(pattern.set().clone(), shape.clone(), field)
    }

    pub fn identity(set: RestrictingSet, shape: BoxShape) -> Result<Self> {
        let zero = vec![0; set.dim()];
        let i = set
            .index_of(&zero)
            .ok_or_else(|| Error::Domain("A does not contain 0".into()))?;
        let field = vec![i; shape.volume()];
        Self::new(set, shape, field)
    }

    pub fn set(&self) -> &RestrictingSet {
        &self.set
    }

    pub fn shape(&self) -> &BoxShape {
        &self.shape
    }

    pub fn field(&self) -> &[usize] {
        &self.field
    }

    pub fn displacement(&self, cell: usize) -> &[i64] {
        self.set.get(self.field[cell])
    }

    /// Index of the image cell on the torus.
    pub fn target(&self, cell: usize) -> usize {
        self.shape
            .wrap_index(&add(&self.shape.coord(cell), self.displacement(cell)))
    }

    pub fn to_pattern(&self) -> Pattern {
        Pattern::on_box(self.set.clone(), &self.shape, &self.field).expect("valid field")
    }

    /// The shifted configuration x ↦ ω(x + m).
    pub fn shift(&self, m: &[i64]) -> Self {
        let field = (0..self.shape.volume())
            .map(|i| self.field[self.shape.wrap_index(&add(&self.shape.coord(i), m))])
            .collect();
        Self { set: self.set.clone(), shape: self.shape.clone(), field }
    }

    /// Displacements of the inverse map, indexed by cell: π⁻¹(x) − x.
    pub fn inverse_displacements(&self) -> Vec<Point> {
        let mut inv = vec![Vec::new(); self.shape.volume()];
        for i in 0..self.shape.volume() {
            let v = self.displacement(i);
            inv[self.target(i)] = v.iter().map(|x| -x).collect();
        }
        inv
    }
}

/// Counts |Π_n(A)|, bijections of the box [n] moving each cell by A.
pub fn count_box_permutations(set: &RestrictingSet, shape: &BoxShape) -> Result<BigUint> {
    let search = FieldSearch::new(set, shape, SearchMode::Box);
    search.count(u64::MAX)
}

/// {Ma + b : a ∈ A} with an injectivity flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineImage {
    pub set: RestrictingSet,
    pub injective: bool,
}

pub fn affine_image(set: &RestrictingSet, m: &[Vec<i64>], b: &[i64]) -> Result<AffineImage> {
    let d = set.dim();
    if m.len() != d || m.iter().any(|r| r.len() != d) || b.len() != d {
        return Err(Error::Domain("matrix or offset has the wrong size".into()));
    }
    let mut out: Vec<Point> = Vec::new();
    for a in set.vectors() {
        let img: Point = (0..d)
            .map(|i| (0..d).map(|j| m[i][j] * a[j]).sum::<i64>() + b[i])
            .collect();
        if !out.contains(&img) {
            out.push(img);
        }
    }
    let injective = out.len() == set.len();
    Ok(AffineImage { set: RestrictingSet::new(d, out)?, injective })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineDimension {
    pub dimension: usize,
    /// dimension + 1 == |A|
    pub full: bool,
}

pub fn affine_dimension(set: &RestrictingSet) -> AffineDimension {
    let a0 = set.get(0);
    let diffs: Vec<Point> = set.vectors()[1..].iter().map(|a| sub(a, a0)).collect();
    let dimension = if diffs.is_empty() { 0 } else { linalg::rank(linalg::to_big(&diffs)) };
    AffineDimension { dimension, full: dimension + 1 == set.len() }
}
