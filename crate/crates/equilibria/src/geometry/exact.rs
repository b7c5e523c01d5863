//! Exact rational linear algebra for the geometric predicates.

use num_rational::BigRational;
use num_traits::Zero;

pub type RatVec = Vec<BigRational>;

pub fn rat_dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rat_sq_dist(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            &d * &d
        })
        .sum()
}

/// Solve the affine system rows·x = rhs over ℚ. Returns a particular solution
/// (free variables set to zero) and a rational nullspace basis, or None when
/// the system is inconsistent.
pub fn solve_affine(rows: &[(RatVec, BigRational)], n: usize) -> Option<(RatVec, Vec<RatVec>)> {
    let mut mat: Vec<RatVec> = rows
        .iter()
        .map(|(a, b)| {
            debug_assert_eq!(a.len(), n);
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let m = mat.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].clone().recip();
        for v in mat[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..=n {
                    let sub = &f * &mat[r][j];
                    mat[i][j] -= sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    // consistency: remaining rows must have zero rhs
    for row in mat.iter().skip(r) {
        if !row[n].is_zero() {
            return None;
        }
    }
    let mut particular = vec![BigRational::zero(); n];
    for (i, &c) in pivot_cols.iter().enumerate() {
        particular[c] = mat[i][n].clone();
    }
    let mut nullspace = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); n];
        v[free] = BigRational::from_integer(1.into());
        for (i, &c) in pivot_cols.iter().enumerate() {
            v[c] = -mat[i][free].clone();
        }
        nullspace.push(v);
    }
    Some((particular, nullspace))
}

/// Rank of the row set.
pub fn rank(rows: &[RatVec], n: usize) -> usize {
    let system: Vec<(RatVec, BigRational)> = rows
        .iter()
        .map(|r| (r.clone(), BigRational::zero()))
        .collect();
    let (_, null) = solve_affine(&system, n).expect("homogeneous system is consistent");
    n - null.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::from_i64;

    #[test]
    fn solve_and_nullspace() {
        // x + y = 2 in Q^2: particular (2,0), nullspace (−1,1)
        let sys = vec![(vec![from_i64(1), from_i64(1)], from_i64(2))];
        let (p, ns) = solve_affine(&sys, 2).unwrap();
        assert_eq!(p, vec![from_i64(2), from_i64(0)]);
        assert_eq!(ns.len(), 1);
        assert_eq!(&ns[0][0] + &ns[0][1], from_i64(0));
        // inconsistent
        let bad = vec![
            (vec![from_i64(1), from_i64(1)], from_i64(2)),
            (vec![from_i64(2), from_i64(2)], from_i64(5)),
        ];
        assert!(solve_affine(&bad, 2).is_none());
    }
}
