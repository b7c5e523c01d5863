//! Exact rational LP: dense two-phase simplex with Bland's rule.
//!
//! Instances here are tiny (≤ ~64 constraints per the diagram limits), so a
//! dense `BigRational` tableau with Bland's anti-cycling rule gives guaranteed
//! termination and exact feasibility certificates.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
}

/// a·x (≤ or =) b over free variables x.
#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub coeffs: Vec<BigRational>,
    pub cmp: Cmp,
    pub rhs: BigRational,
}

impl LpConstraint {
    pub fn le(coeffs: Vec<BigRational>, rhs: BigRational) -> Self {
        LpConstraint { coeffs, cmp: Cmp::Le, rhs }
    }
    pub fn eq(coeffs: Vec<BigRational>, rhs: BigRational) -> Self {
        LpConstraint { coeffs, cmp: Cmp::Eq, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: BigRational, point: Vec<BigRational> },
}

/// Maximize objective·x subject to the constraints; x free.
pub fn maximize(objective: &[BigRational], constraints: &[LpConstraint]) -> LpOutcome {
    let n = objective.len();
    // free variables split: x_i = u_i − v_i with u, v ≥ 0
    let cols = 2 * n;
    let split = |coeffs: &[BigRational]| -> Vec<BigRational> {
        let mut row = Vec::with_capacity(cols);
        row.extend(coeffs.iter().cloned());
        row.extend(coeffs.iter().map(|c| -c));
        row
    };

    let mut tab = Tableau::new(cols);
    for c in constraints {
        assert_eq!(c.coeffs.len(), n, "constraint arity mismatch");
        tab.add_row(split(&c.coeffs), c.cmp, c.rhs.clone());
    }
    match tab.solve(&split(objective)) {
        TabOutcome::Infeasible => LpOutcome::Infeasible,
        TabOutcome::Unbounded => LpOutcome::Unbounded,
        TabOutcome::Optimal { value, point } => {
            let x = (0..n).map(|i| &point[i] - &point[n + i]).collect();
            LpOutcome::Optimal { value, point: x }
        }
    }
}

enum TabOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: BigRational, point: Vec<BigRational> },
}

/// Rows are stored in equality form with rhs ≥ 0; columns are
/// [structural | slack | artificial | rhs].
struct Tableau {
    n_struct: usize,
    rows: Vec<Vec<BigRational>>, // structural part only, pre-normalization
    cmps: Vec<Cmp>,
    rhs: Vec<BigRational>,
}

impl Tableau {
    fn new(n_struct: usize) -> Self {
        Tableau { n_struct, rows: vec![], cmps: vec![], rhs: vec![] }
    }

    fn add_row(&mut self, coeffs: Vec<BigRational>, cmp: Cmp, rhs: BigRational) {
        self.rows.push(coeffs);
        self.cmps.push(cmp);
        self.rhs.push(rhs);
    }

    fn solve(&mut self, objective: &[BigRational]) -> TabOutcome {
        let m = self.rows.len();
        let n = self.n_struct;

        // column layout: structural 0..n, slacks n..n+m (one per row, some unused),
        // artificials n+m..n+2m (some unused)
        let width = n + 2 * m + 1;
        let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
        let mut basis: Vec<usize> = Vec::with_capacity(m);
        let mut artificial_cols: Vec<usize> = vec![];

        for i in 0..m {
            let mut row = vec![BigRational::zero(); width];
            let negate = self.rhs[i].is_negative();
            for (j, c) in self.rows[i].iter().enumerate() {
                row[j] = if negate { -c } else { c.clone() };
            }
            let b = if negate { -&self.rhs[i] } else { self.rhs[i].clone() };
            row[width - 1] = b;
            match (self.cmps[i], negate) {
                (Cmp::Le, false) => {
                    // slack basic
                    row[n + i] = BigRational::one();
                    basis.push(n + i);
                }
                (Cmp::Le, true) => {
                    // became ≥: surplus −1, artificial basic
                    row[n + i] = -BigRational::one();
                    row[n + m + i] = BigRational::one();
                    basis.push(n + m + i);
                    artificial_cols.push(n + m + i);
                }
                (Cmp::Eq, _) => {
                    row[n + m + i] = BigRational::one();
                    basis.push(n + m + i);
                    artificial_cols.push(n + m + i);
                }
            }
            t.push(row);
        }

        let allowed_phase1 = width - 1;
        if !artificial_cols.is_empty() {
            // phase 1: maximize −Σ artificials
            let mut cost = vec![BigRational::zero(); width - 1];
            for &c in &artificial_cols {
                cost[c] = -BigRational::one();
            }
            let outcome = simplex_iterate(&mut t, &mut basis, &cost, allowed_phase1);
            debug_assert!(!matches!(outcome, IterOutcome::Unbounded));
            let val = objective_value(&t, &basis, &cost);
            if !val.is_zero() {
                return TabOutcome::Infeasible;
            }
            // drive artificials out of the basis (degenerate pivots) or drop rows
            let mut drop_rows = vec![];
            for i in 0..t.len() {
                if artificial_cols.contains(&basis[i]) {
                    let mut pivoted = false;
                    for j in 0..n + m {
                        if !t[i][j].is_zero() && !artificial_cols.contains(&j) {
                            pivot(&mut t, &mut basis, i, j);
                            pivoted = true;
                            break;
                        }
                    }
                    if !pivoted {
                        drop_rows.push(i);
                    }
                }
            }
            for &i in drop_rows.iter().rev() {
                t.remove(i);
                basis.remove(i);
            }
        }

        // phase 2: artificial columns are barred from entering
        let mut cost = vec![BigRational::zero(); width - 1];
        cost[..n].clone_from_slice(&objective[..n]);
        match simplex_iterate(&mut t, &mut basis, &cost, n + m) {
            IterOutcome::Unbounded => TabOutcome::Unbounded,
            IterOutcome::Optimal => {
                let mut point = vec![BigRational::zero(); n];
                for (i, &b) in basis.iter().enumerate() {
                    if b < n {
                        point[b] = t[i].last().unwrap().clone();
                    }
                }
                TabOutcome::Optimal { value: objective_value(&t, &basis, &cost), point }
            }
        }
    }
}

enum IterOutcome {
    Optimal,
    Unbounded,
}

fn objective_value(t: &[Vec<BigRational>], basis: &[usize], cost: &[BigRational]) -> BigRational {
    basis
        .iter()
        .enumerate()
        .map(|(i, &b)| &cost[b] * t[i].last().unwrap())
        .sum()
}

/// Bland's rule simplex on rows already in basic feasible form.
/// Columns with index ≥ `allowed` may not enter the basis.
fn simplex_iterate(
    t: &mut Vec<Vec<BigRational>>,
    basis: &mut [usize],
    cost: &[BigRational],
    allowed: usize,
) -> IterOutcome {
    loop {
        // reduced costs: z_j − c_j = Σ_i cost[basis_i]·t[i][j] − cost[j]
        let mut entering = None;
        for j in 0..allowed {
            if basis.contains(&j) {
                continue;
            }
            let mut zj = BigRational::zero();
            for (i, &b) in basis.iter().enumerate() {
                if !cost[b].is_zero() && !t[i][j].is_zero() {
                    zj += &cost[b] * &t[i][j];
                }
            }
            if zj - &cost[j] < BigRational::zero() {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(j) = entering else {
            return IterOutcome::Optimal;
        };
        // ratio test with Bland tie-break on smallest basis index
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..t.len() {
            if t[i][j].is_positive() {
                let ratio = t[i].last().unwrap() / &t[i][j];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return IterOutcome::Unbounded;
        };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v /= &p;
    }
    for i in 0..t.len() {
        if i == row || t[i][col].is_zero() {
            continue;
        }
        let factor = t[i][col].clone();
        for j in 0..t[i].len() {
            let sub = &factor * &t[row][j];
            t[i][j] -= sub;
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_i64, ratio};

    fn q(v: i64) -> BigRational {
        from_i64(v)
    }

    #[test]
    fn simple_maximization() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6 → optimum at (8/5, 6/5), value 14/5
        let out = maximize(
            &[q(1), q(1)],
            &[
                LpConstraint::le(vec![q(1), q(2)], q(4)),
                LpConstraint::le(vec![q(3), q(1)], q(6)),
                LpConstraint::le(vec![q(-1), q(0)], q(0)),
                LpConstraint::le(vec![q(0), q(-1)], q(0)),
            ],
        );
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ratio(14, 5));
                assert_eq!(point, vec![ratio(8, 5), ratio(6, 5)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let inf = maximize(
            &[q(0)],
            &[
                LpConstraint::le(vec![q(1)], q(-1)),
                LpConstraint::le(vec![q(-1)], q(-1)),
            ],
        );
        assert_eq!(inf, LpOutcome::Infeasible);
        let unb = maximize(&[q(1)], &[LpConstraint::le(vec![q(-1)], q(0))]);
        assert_eq!(unb, LpOutcome::Unbounded);
    }

    #[test]
    fn equality_constraints_and_free_vars() {
        // max t s.t. l1+l2 = 1, l1 - l2 = 1/3, t <= l1, t <= l2 → l = (2/3, 1/3), t = 1/3
        let out = maximize(
            &[q(0), q(0), q(1)],
            &[
                LpConstraint::eq(vec![q(1), q(1), q(0)], q(1)),
                LpConstraint::eq(vec![q(1), q(-1), q(0)], ratio(1, 3)),
                LpConstraint::le(vec![q(-1), q(0), q(1)], q(0)),
                LpConstraint::le(vec![q(0), q(-1), q(1)], q(0)),
            ],
        );
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ratio(1, 3));
                assert_eq!(point[0], ratio(2, 3));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
