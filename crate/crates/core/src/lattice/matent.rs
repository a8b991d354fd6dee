//! Splitting a configuration over M·A into |det M| configurations over A,
//! one per coset of MZ^d.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{add, sub, BoxShape, Point, RestrictingSet, ToralPermutation};
use crate::error::{Error, Result};
use crate::linalg;

/// Coset data for a matrix M acting on a torus of shape n.
#[derive(Clone, Debug)]
pub struct CosetPlan {
    matrix: Vec<Vec<i64>>,
    det: BigInt,
    adj: Vec<Vec<BigInt>>,
    /// lexicographically least nonnegative representative of each coset
    pub representatives: Vec<Point>,
    /// shape of each piece
    pub sub_shape: BoxShape,
}

impl CosetPlan {
    pub fn new(matrix: &[Vec<i64>], shape: &BoxShape) -> Result<Self> {
        let d = shape.dim();
        if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::Domain("matrix size does not match the torus".into()));
        }
        let det = linalg::det_i64(matrix);
        if det.is_zero() {
            return Err(Error::Singular("det M = 0".into()));
        }
        let adj = linalg::adjugate(matrix);
        let k = det
            .abs()
            .to_usize()
            .ok_or_else(|| Error::Capacity("index of MZ^d too large".into()))?;
        let mut plan = Self {
            matrix: matrix.to_vec(),
            det,
            adj,
            representatives: Vec::new(),
            sub_shape: shape.clone(),
        };
        for (i, &n) in shape.dims().iter().enumerate() {
            let mut e = vec![0; d];
            e[i] = n as i64;
            if !plan.in_lattice(&e) {
                return Err(Error::Compatibility(format!(
                    "period {n} along axis {i} is not in MZ^d"
                )));
            }
        }
        // lex order with the first coordinate slowest
        let lex_shape = BoxShape::new(vec![k; d])?;
        let mut reps: Vec<Point> = Vec::with_capacity(k);
        let mut all: Vec<Point> = lex_shape.cells().map(|c| c.into_iter().rev().collect()).collect();
        all.sort();
        for c in all {
            if reps.len() == k {
                break;
            }
            if !reps.iter().any(|r| plan.in_lattice(&sub(&c, r))) {
                reps.push(c);
            }
        }
        if reps.len() != k {
            return Err(Error::Internal("coset enumeration came up short".into()));
        }
        plan.representatives = reps;

        let mut sub_dims = Vec::with_capacity(d);
        for i in 0..d {
            let col: Vec<i64> = (0..d).map(|r| matrix[r][i]).collect();
            let period = (1..=shape.volume())
                .find(|&t| {
                    col.iter()
                        .zip(shape.dims())
                        .all(|(&c, &n)| (c * t as i64).rem_euclid(n as i64) == 0)
                })
                .ok_or_else(|| Error::Internal("no period found".into()))?;
            sub_dims.push(period);
        }
        if sub_dims.iter().product::<usize>() * k != shape.volume() {
            return Err(Error::Compatibility(
                "the pulled-back lattice is not rectangular".into(),
            ));
        }
        plan.sub_shape = BoxShape::new(sub_dims)?;
        Ok(plan)
    }

    pub fn index(&self) -> usize {
        self.representatives.len()
    }

    fn adj_apply(&self, x: &[i64]) -> Vec<BigInt> {
        self.adj
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, &v)| a * v).sum())
            .collect()
    }

    pub fn in_lattice(&self, x: &[i64]) -> bool {
        self.adj_apply(x).iter().all(|v| v.is_multiple_of(&self.det))
    }

    /// M⁻¹x for x ∈ MZ^d.
    pub fn pull_back(&self, x: &[i64]) -> Option<Point> {
        self.adj_apply(x)
            .into_iter()
            .map(|v| {
                let (q, r) = v.div_rem(&self.det);
                if r.is_zero() {
                    q.to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn push_forward(&self, x: &[i64]) -> Point {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn coset_of(&self, x: &[i64]) -> usize {
        self.representatives
            .iter()
            .position(|r| self.in_lattice(&sub(x, r)))
            .expect("cosets cover Z^d")
    }
}

/// Splits ω over M·A into pieces ω_i(m) = M⁻¹ ω(Mm + v_i), each over A.
pub fn matent_decompose(omega: &ToralPermutation, matrix: &[Vec<i64>]) -> Result<Vec<ToralPermutation>> {
    let shape = omega.shape();
    let plan = CosetPlan::new(matrix, shape)?;
    let base = pull_back_set(&plan, omega.set())?;
    let sub = plan.sub_shape.clone();
    let mut parts = Vec::with_capacity(plan.index());
    for v in &plan.representatives {
        let field: Vec<usize> = sub
            .cells()
            .map(|m| omega.field()[shape.wrap_index(&add(&plan.push_forward(&m), v))])
            .collect();
        let part = ToralPermutation::new(base.clone(), sub.clone(), field)
            .map_err(|e| Error::Internal(format!("piece is not a toral permutation: {e}")))?;
        parts.push(part);
    }
    Ok(parts)
}

/// Inverse of [`matent_decompose`]: ω(x) = M ω_j(M⁻¹(x − v_j)) for x in coset j.
pub fn matent_compose(parts: &[ToralPermutation], matrix: &[Vec<i64>], shape: &BoxShape) -> Result<ToralPermutation> {
    let plan = CosetPlan::new(matrix, shape)?;
    if parts.len() != plan.index() {
        return Err(Error::Domain(format!("expected {} pieces", plan.index())));
    }
    let base = parts[0].set().clone();
    if parts.iter().any(|p| *p.set() != base || *p.shape() != plan.sub_shape) {
        return Err(Error::Domain("pieces disagree on set or shape".into()));
    }
    let zero = vec![0; shape.dim()];
    let image = super::affine_image(&base, matrix, &zero)?;
    if !image.injective {
        return Err(Error::Domain("M is not injective on A".into()));
    }
    let field: Vec<usize> = shape
        .cells()
        .map(|x| {
            let j = plan.coset_of(&x);
            let m = plan
                .pull_back(&sub(&x, &plan.representatives[j]))
                .expect("x - v_j lies in MZ^d");
            parts[j].field()[plan.sub_shape.wrap_index(&m)]
        })
        .collect();
    ToralPermutation::new(image.set, shape.clone(), field)
}

fn pull_back_set(plan: &CosetPlan, set: &RestrictingSet) -> Result<RestrictingSet> {
    let vectors = set
        .vectors()
        .iter()
        .map(|w| {
            plan.pull_back(w)
                .ok_or_else(|| Error::Domain(format!("{w:?} is not in MZ^d")))
        })
        .collect::<Result<Vec<_>>>()?;
    RestrictingSet::new(set.dim(), vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{affine_image, FieldSearch, SearchMode};

    fn two_i() -> Vec<Vec<i64>> {
        vec![vec![2, 0], vec![0, 2]]
    }

    #[test]
    fn identity_matrix_returns_the_input() {
        let shape = BoxShape::square(2).unwrap();
        let w = ToralPermutation::identity(RestrictingSet::a_l(), shape).unwrap();
        let parts = matent_decompose(&w, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(parts, vec![w]);
    }

    #[test]
    fn zero_field_splits_into_zero_fields() {
        let zero = RestrictingSet::planar(&[(0, 0)]).unwrap();
        let w = ToralPermutation::identity(zero, BoxShape::planar(4, 2).unwrap()).unwrap();
        let parts = matent_decompose(&w, &two_i()).unwrap();
        assert_eq!(parts.len(), 4);
        assert!(parts.iter().all(|p| p.field().iter().all(|&a| a == 0)));
        assert_eq!(parts[0].shape().dims(), &[2, 1]);
    }

    #[test]
    fn representatives_are_lex_least() {
        let plan = CosetPlan::new(&two_i(), &BoxShape::square(4).unwrap()).unwrap();
        assert_eq!(plan.representatives, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn incompatible_and_singular() {
        let shape = BoxShape::square(3).unwrap();
        assert!(matches!(CosetPlan::new(&two_i(), &shape), Err(Error::Compatibility(_))));
        assert!(matches!(
            CosetPlan::new(&[vec![1, 1], vec![1, 1]], &shape),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn round_trip_small() {
        let shape = BoxShape::square(2).unwrap();
        let big = affine_image(&RestrictingSet::a_l(), &two_i(), &[0, 0]).unwrap().set;
        let search = FieldSearch::new(&big, &shape, SearchMode::Torus);
        let mut n = 0;
        search
            .for_each(u64::MAX, |f| {
                let w = ToralPermutation::new(big.clone(), shape.clone(), f.to_vec()).unwrap();
                let parts = matent_decompose(&w, &two_i()).unwrap();
                assert_eq!(matent_compose(&parts, &two_i(), &shape).unwrap(), w);
                n += 1;
            })
            .unwrap();
        assert!(n > 0);
    }
}
