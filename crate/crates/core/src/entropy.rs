//! Mahler measures on a roots-of-unity grid and finite-size entropy tables.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::correspond::a_l_window;
use crate::error::{Error, Result};
use crate::graphkit::{honeycomb_torus, io_double_cover, square_grid, torus_quotient};
use crate::lattice::{affine_dimension, count_box_permutations, BoxShape, RestrictingSet};
use crate::oracle::{brute_patterns, Budget};
use crate::planarcount::{count_perfect_covers, count_planar_unweighted, count_toral_matchings, PlanarEmbedding, DEFAULT_WIDTH_CAP};

/// Finitely supported Σ c_{jk} z^j w^k with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPolynomial2 {
    terms: BTreeMap<(i64, i64), BigRational>,
}

impl LaurentPolynomial2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: BigRational, j: i64, k: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(c, j, k);
        p
    }

    pub fn add_term(&mut self, c: BigRational, j: i64, k: i64) {
        let entry = self.terms.entry((j, k)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(j, k));
        }
    }

    /// 1 + z + w.
    pub fn honeycomb() -> Self {
        let one = BigRational::one();
        let mut p = Self::constant(one.clone());
        p.add_term(one.clone(), 1, 0);
        p.add_term(one, 0, 1);
        p
    }

    /// 4 - z - 1/z - w - 1/w.
    pub fn square_lattice() -> Self {
        let m1 = -BigRational::one();
        let mut p = Self::constant(BigRational::from_integer(4.into()));
        for (j, k) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            p.add_term(m1.clone(), j, k);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigRational)> {
        self.terms.iter()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in &self.terms {
            for ((d, e), f) in &other.terms {
                p.add_term(c * f, a + d, b + e);
            }
        }
        p
    }

    /// z <-> w.
    pub fn swap(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&(j, k), c)| ((k, j), c.clone())).collect() }
    }

    /// z -> 1/z.
    pub fn invert_z(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&(j, k), c)| ((-j, k), c.clone())).collect() }
    }

    /// Parses sums of terms such as `4 - z - 1/z - w - w^-1` or `2/3*z*w^2`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Self::zero();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'+' => (false, &rest[1..]),
                b'-' => (true, &rest[1..]),
                _ => (false, rest),
            };
            let end = body[1.min(body.len())..].find(['+', '-']).map_or(body.len(), |i| i + 1);
            // a '-' right after '^' belongs to the exponent
            let mut end = end;
            while end < body.len() && body.as_bytes()[end] == b'-' && body.as_bytes()[end - 1] == b'^' {
                end = body[end + 1..].find(['+', '-']).map_or(body.len(), |i| i + end + 1);
            }
            let (term, tail) = body.split_at(end);
            let (c, j, k) = parse_term(term)?;
            p.add_term(if neg { -c } else { c }, j, k);
            rest = tail;
        }
        Ok(p)
    }

    fn evaluator(&self) -> Vec<(i64, i64, f64)> {
        self.terms
            .iter()
            .map(|(&(j, k), c)| (j, k, c.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }
}

fn parse_term(term: &str) -> Result<(BigRational, i64, i64)> {
    if term.is_empty() {
        return Err(Error::Parse("dangling sign".into()));
    }
    let mut c = BigRational::one();
    let (mut j, mut k) = (0i64, 0i64);
    let mut divide = false;
    for (i, factor) in term.split(['*', '/']).enumerate() {
        if i > 0 {
            // the separator before this factor
            let pos = term.split(['*', '/']).take(i).map(|f| f.len() + 1).sum::<usize>() - 1;
            divide = term.as_bytes()[pos] == b'/';
        }
        let sign = if divide { -1 } else { 1 };
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?),
            None => (factor, 1),
        };
        match base {
            "z" => j += sign * exp,
            "w" => k += sign * exp,
            num => {
                let v: BigRational = num
                    .parse::<num_bigint::BigInt>()
                    .map(BigRational::from_integer)
                    .map_err(|_| Error::Parse(format!("bad factor {factor:?}")))?;
                let v = num_traits::pow::pow(v, exp.unsigned_abs() as usize);
                if divide == (exp > 0) {
                    if v.is_zero() {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    c /= v;
                } else {
                    c *= v;
                }
            }
        }
    }
    Ok((c, j, k))
}

impl fmt::Display for LaurentPolynomial2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(j, k), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mut parts = Vec::new();
            if !a.is_one() || (j == 0 && k == 0) {
                parts.push(a.to_string());
            }
            for (v, e) in [("z", j), ("w", k)] {
                match e {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    e => parts.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Grid-mean Mahler measure with its grid-halving difference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerEstimate {
    pub value: f64,
    pub error: f64,
    pub grid: usize,
    /// grid points where p vanished, excluded from the mean
    pub zeros: usize,
}

/// Pairwise sum in index order, so results do not depend on scheduling.
fn pairwise(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}

fn grid_mean(p: &LaurentPolynomial2, n: usize) -> (f64, usize) {
    let terms = p.evaluator();
    let scale: f64 = terms.iter().map(|t| t.2.abs()).sum();
    let roots: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(1.0, 2.0 * PI * i as f64 / n as f64)).collect();
    let rows: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut logs = Vec::with_capacity(n);
            let mut zeros = 0;
            for b in 0..n {
                let v: Complex64 = terms
                    .iter()
                    .map(|&(j, k, c)| {
                        let idx = (j * a as i64 + k * b as i64).rem_euclid(n as i64) as usize;
                        roots[idx] * c
                    })
                    .sum();
                let m = v.norm();
                if m <= 1e-10 * scale {
                    zeros += 1;
                } else {
                    logs.push(m.ln());
                }
            }
            (pairwise(&logs), zeros)
        })
        .collect();
    let sums: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let zeros: usize = rows.iter().map(|r| r.1).sum();
    let kept = n * n - zeros;
    (pairwise(&sums) / kept as f64, zeros)
}

/// Mean of log|p| over the N x N roots-of-unity grid; the error estimate is
/// the difference to the N/2 grid.
pub fn mahler_measure(p: &LaurentPolynomial2, grid: usize) -> Result<MahlerEstimate> {
    if p.is_zero() {
        return Err(Error::Domain("Mahler measure of the zero polynomial".into()));
    }
    if grid < 8 || grid % 2 == 1 {
        return Err(Error::Domain("grid must be even and at least 8".into()));
    }
    let (value, zeros) = grid_mean(p, grid);
    let (coarse, _) = grid_mean(p, grid / 2);
    Ok(MahlerEstimate { value, error: (value - coarse).abs(), grid, zeros })
}

pub const DEFAULT_GRID: usize = 2048;

/// Entropy integral for A_L: M(1 + z + w).
pub fn a_l_integral(grid: usize) -> Result<MahlerEstimate> {
    mahler_measure(&LaurentPolynomial2::honeycomb(), grid)
}

/// Entropy integral for A_+: M(4 - z - 1/z - w - 1/w) / 2.
pub fn a_plus_integral(grid: usize) -> Result<MahlerEstimate> {
    let m = mahler_measure(&LaurentPolynomial2::square_lattice(), grid)?;
    Ok(MahlerEstimate { value: m.value / 2.0, error: m.error / 2.0, ..m })
}

/// Catalan's constant from the series
/// G = (π/8) ln(2 + √3) + (3/8) Σ (k!)² / ((2k)! (2k+1)²).
pub fn catalan_constant() -> f64 {
    let mut sum = 0.0;
    let mut ratio = 1.0; // (k!)² / (2k)!
    for k in 0..60 {
        let kf = k as f64;
        sum += ratio / ((2.0 * kf + 1.0) * (2.0 * kf + 1.0));
        ratio *= (kf + 1.0) / (2.0 * (2.0 * kf + 1.0));
    }
    PI / 8.0 * (2.0 + 3f64.sqrt()).ln() + 3.0 / 8.0 * sum
}

/// Lower bound shared by every A not contained in a line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub estimate: MahlerEstimate,
    /// whether the bound holds for the set it was asked about
    pub applies: Option<bool>,
}

pub fn universal_lower_bound(set: Option<&RestrictingSet>, grid: usize) -> Result<LowerBound> {
    let estimate = a_l_integral(grid)?;
    let applies = set.map(|s| s.dim() == 2 && affine_dimension(s).dimension >= 2);
    Ok(LowerBound { estimate, applies })
}

/// Count with its per-site log (−∞ for zero).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountCell {
    pub count: String,
    pub log_per_site: f64,
}

impl CountCell {
    fn new(c: &BigUint, sites: usize) -> Self {
        Self { count: c.to_string(), log_per_site: log_count(c) / sites as f64 }
    }
}

/// Natural log of an exact count; −∞ for zero.
pub fn log_count(c: &BigUint) -> f64 {
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits < 1000 {
        c.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (c >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Pattern column: exact, or a certified interval, or beyond budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternCell {
    pub lower: String,
    pub upper: String,
    pub log_lower: f64,
    pub log_upper: f64,
    /// lower log per site clears the quadrature value minus its error
    pub above_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub fix: CountCell,
    pub box_perm: CountCell,
    pub patterns: Option<PatternCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub set: String,
    pub rows: Vec<ReportRow>,
    pub target: MahlerEstimate,
}

/// Periodic points, box permutations and patterns for n = 1..=n_max.
pub fn entropy_report(set: &RestrictingSet, n_max: usize, grid: usize, budget: &Budget) -> Result<EntropyReport> {
    let is_l = *set == RestrictingSet::a_l();
    if !is_l && *set != RestrictingSet::a_plus() {
        return Err(Error::Domain("entropy reports cover A_L and A_+".into()));
    }
    let target = if is_l { a_l_integral(grid)? } else { a_plus_integral(grid)? };
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let sites = n * n;
        let shape = BoxShape::square(n)?;
        let (fix, box_perm, patterns) = if is_l {
            let fix = count_toral_matchings(&honeycomb_torus(n), DEFAULT_WIDTH_CAP)?;
            let box_perm = count_box_permutations(set, &shape)?;
            let w = a_l_window(n, n)?;
            let emb = PlanarEmbedding::from_positions(&w.graph, &w.positions)?;
            let b = count_perfect_covers(&emb, &w.target)?;
            (fix, box_perm, Some((b.clone(), b)))
        } else {
            let cover = io_double_cover(&torus_quotient(set, &shape));
            let fix = count_toral_matchings(&cover, DEFAULT_WIDTH_CAP)?;
            let grid_graph = square_grid(&shape);
            let pos: Vec<(i64, i64)> = shape.cells().map(|c| (c[0], c[1])).collect();
            let pm = count_planar_unweighted(&PlanarEmbedding::from_positions(&grid_graph, &pos)?)?;
            let patterns = match brute_patterns(set, &shape, budget, false) {
                Ok(p) => Some((p.lower, p.upper)),
                Err(Error::Capacity(_)) => None,
                Err(e) => return Err(e),
            };
            (fix, &pm * &pm, patterns)
        };
        let patterns = patterns.map(|(lo, hi)| {
            let log_lower = log_count(&lo) / sites as f64;
            PatternCell {
                lower: lo.to_string(),
                upper: hi.to_string(),
                log_lower,
                log_upper: log_count(&hi) / sites as f64,
                above_target: log_lower >= target.value - target.error,
            }
        });
        rows.push(ReportRow { n, fix: CountCell::new(&fix, sites), box_perm: CountCell::new(&box_perm, sites), patterns });
    }
    Ok(EntropyReport { set: set.to_string(), rows, target })
}

fn fmt_log(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.6}")
    }
}

impl EntropyReport {
    /// Comma-separated table with a header row and a footer carrying the
    /// quadrature target.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,fix_count,box_perm_count,pattern_count,log_fix,log_box_perm,log_pattern,above_target\n");
        for r in &self.rows {
            let (pc, pl, above) = match &r.patterns {
                Some(p) if p.lower == p.upper => (p.lower.clone(), fmt_log(p.log_lower), p.above_target.to_string()),
                Some(p) => (
                    format!("{}..{}", p.lower, p.upper),
                    format!("{}..{}", fmt_log(p.log_lower), fmt_log(p.log_upper)),
                    p.above_target.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                r.fix.count,
                r.box_perm.count,
                pc,
                fmt_log(r.fix.log_per_site),
                fmt_log(r.box_perm.log_per_site),
                pl,
                above
            ));
        }
        out.push_str(&format!("target,{:.6},error,{:.2e},grid,{},zeros,{}\n", self.target.value, self.target.error, self.target.grid, self.target.zeros));
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("entropy report for A={}\n", self.set);
        out.push_str(&format!("{:>3} {:>24} {:>24} {:>28} {:>10} {:>10} {:>10}\n", "n", "fix", "box_perm", "patterns", "log fix", "log box", "log pat"));
        for r in &self.rows {
            let (pc, pl) = match &r.patterns {
                Some(p) if p.lower == p.upper => (p.lower.clone(), fmt_log(p.log_lower)),
                Some(p) => (format!("{}..{}", p.lower, p.upper), fmt_log(p.log_lower)),
                None => ("-".into(), "-".into()),
            };
            out.push_str(&format!(
                "{:>3} {:>24} {:>24} {:>28} {:>10} {:>10} {:>10}\n",
                r.n,
                r.fix.count,
                r.box_perm.count,
                pc,
                fmt_log(r.fix.log_per_site),
                fmt_log(r.box_perm.log_per_site),
                pl
            ));
        }
        out.push_str(&format!("target {:.6} +- {:.1e} (grid {}, {} zeros excluded)\n", self.target.value, self.target.error, self.target.grid, self.target.zeros));
        out
    }
}
