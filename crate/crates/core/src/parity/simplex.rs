//! Exact phase-one simplex (Bland's rule) for feasibility of `A y >= b, y >= 0`.

use num_traits::{One, Signed, Zero};

use crate::rational::ExactRational;

/// Outcome of a feasibility query.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<ExactRational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether some `y >= 0` satisfies every row `a_i . y >= b_i`, returning
/// a vertex witness when one exists. Exact, no tolerances.
pub fn feasible_nonnegative(a: &[Vec<ExactRational>], b: &[ExactRational]) -> Feasibility {
    assert_eq!(a.len(), b.len(), "one right-hand side per row");
    let m = a.len();
    let nv = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|row| row.len() == nv), "ragged constraint matrix");

    // columns: y (nv) | surplus (m) | artificial (one per row with b_i >= 0) | rhs
    let needs_art: Vec<bool> = b.iter().map(|bi| !bi.is_negative()).collect();
    let art_cols: Vec<usize> = needs_art
        .iter()
        .scan(nv + m, |next, &need| {
            let col = *next;
            if need {
                *next += 1;
            }
            Some(col)
        })
        .collect();
    let total = nv + m + needs_art.iter().filter(|&&x| x).count();
    let rhs = total;

    let mut rows: Vec<Vec<ExactRational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![ExactRational::zero(); total + 1];
        if needs_art[i] {
            row[..nv].clone_from_slice(&a[i]);
            row[nv + i] = -ExactRational::one();
            row[art_cols[i]] = ExactRational::one();
            row[rhs] = b[i].clone();
            basis.push(art_cols[i]);
        } else {
            for (dst, src) in row[..nv].iter_mut().zip(&a[i]) {
                *dst = -src.clone();
            }
            row[nv + i] = ExactRational::one();
            row[rhs] = -b[i].clone();
            basis.push(nv + i);
        }
        rows.push(row);
    }

    // reduced costs of "minimize sum of artificials"
    let mut cost = vec![ExactRational::zero(); total + 1];
    for (i, row) in rows.iter().enumerate() {
        if needs_art[i] {
            for (c, v) in cost.iter_mut().zip(row) {
                *c -= v;
            }
        }
    }
    for i in 0..m {
        if needs_art[i] {
            cost[art_cols[i]] = ExactRational::zero();
        }
    }

    while let Some(enter) = (0..total).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, ExactRational)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // the phase-one objective is bounded below by zero
        let (pivot_row, _) = leave.expect("phase-one simplex cannot be unbounded");
        pivot(&mut rows, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    if !cost[rhs].is_zero() {
        return Feasibility::Infeasible;
    }
    let mut y = vec![ExactRational::zero(); nv];
    for (i, &col) in basis.iter().enumerate() {
        if col < nv {
            y[col] = rows[i][rhs].clone();
        }
    }
    Feasibility::Feasible(y)
}

fn pivot(rows: &mut [Vec<ExactRational>], cost: &mut [ExactRational], r: usize, c: usize) {
    let inv = rows[r][c].recip();
    for v in rows[r].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = rows[r].clone();
    let eliminate = |target: &mut [ExactRational]| {
        let factor = target[c].clone();
        if factor.is_zero() {
            return;
        }
        for (t, p) in target.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *t -= &factor * p;
            }
        }
    };
    for (i, row) in rows.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(cost);
}

/// Free-variable version: some `y` (any sign) with `A y >= b`. Splits `y = y+ - y-`.
pub fn feasible_free(a: &[Vec<ExactRational>], b: &[ExactRational]) -> Feasibility {
    let split: Vec<Vec<ExactRational>> = a
        .iter()
        .map(|row| row.iter().cloned().chain(row.iter().map(|v| -v.clone())).collect())
        .collect();
    match feasible_nonnegative(&split, b) {
        Feasibility::Infeasible => Feasibility::Infeasible,
        Feasibility::Feasible(y) => {
            let half = y.len() / 2;
            Feasibility::Feasible((0..half).map(|j| &y[j] - &y[half + j]).collect())
        }
    }
}
