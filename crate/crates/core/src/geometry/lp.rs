//! Dense two-phase simplex with Bland's rule.
//!
//! Sized for the feasibility problems this crate poses (a few dozen rows,
//! at most a dozen structural variables), not for general LP work.
//! Feasibility is decided to [`FEASIBILITY_TOL`].

use crate::error::{Error, Result};

/// Documented feasibility tolerance of every LP-backed predicate.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LpStatus {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// `maximize cᵀx` subject to `≤` and `=` rows; each variable free or `≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    free: Vec<bool>,
    objective: Vec<f64>,
    le: Vec<(Vec<f64>, f64)>,
    eq: Vec<(Vec<f64>, f64)>,
}

impl LinearProgram {
    /// `vars` free variables and a zero objective.
    pub fn free(vars: usize) -> Self {
        Self {
            free: vec![true; vars],
            objective: vec![0.0; vars],
            le: Vec::new(),
            eq: Vec::new(),
        }
    }

    /// `vars` nonnegative variables and a zero objective.
    pub fn nonnegative(vars: usize) -> Self {
        Self {
            free: vec![false; vars],
            ..Self::free(vars)
        }
    }

    pub fn set_free(&mut self, var: usize, free: bool) -> &mut Self {
        self.free[var] = free;
        self
    }

    pub fn maximize(&mut self, c: Vec<f64>) -> &mut Self {
        debug_assert_eq!(c.len(), self.free.len());
        self.objective = c;
        self
    }

    pub fn le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.free.len());
        self.le.push((row, rhs));
        self
    }

    pub fn eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.free.len());
        self.eq.push((row, rhs));
        self
    }

    pub fn solve(&self) -> Result<LpStatus> {
        // Column layout: for each variable one column, plus a mirrored
        // column for free variables; then one slack per `≤` row.
        let mut col_of = Vec::with_capacity(self.free.len());
        let mut cols = 0;
        for &f in &self.free {
            col_of.push(cols);
            cols += if f { 2 } else { 1 };
        }
        let structural = cols;
        let total = structural + self.le.len();
        let expand = |row: &[f64]| {
            let mut out = vec![0.0; total];
            for (i, &v) in row.iter().enumerate() {
                out[col_of[i]] = v;
                if self.free[i] {
                    out[col_of[i] + 1] = -v;
                }
            }
            out
        };
        let mut a = Vec::with_capacity(self.le.len() + self.eq.len());
        let mut b = Vec::with_capacity(a.capacity());
        for (k, (row, rhs)) in self.le.iter().enumerate() {
            let mut r = expand(row);
            r[structural + k] = 1.0;
            a.push(r);
            b.push(*rhs);
        }
        for (row, rhs) in &self.eq {
            a.push(expand(row));
            b.push(*rhs);
        }
        let c = expand(&self.objective);

        Ok(match solve_standard(&a, &b, &c)? {
            LpStatus::Optimal { x: y, value } => {
                let x = self
                    .free
                    .iter()
                    .enumerate()
                    .map(|(i, &f)| {
                        let v = y[col_of[i]];
                        if f {
                            v - y[col_of[i] + 1]
                        } else {
                            v
                        }
                    })
                    .collect();
                LpStatus::Optimal { x, value }
            }
            other => other,
        })
    }
}

/// `maximize cᵀy` s.t. `Ay = b`, `y ≥ 0`.
pub fn solve_standard(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpStatus> {
    let m = a.len();
    let nvar = c.len();
    let width = nvar + m + 1;
    let rhs = nvar + m;

    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; width];
        for j in 0..nvar {
            r[j] = sign * row[j];
        }
        r[nvar + i] = 1.0;
        r[rhs] = sign * b[i];
        t.push(r);
    }
    let mut basis: Vec<usize> = (nvar..nvar + m).collect();
    let b_scale = b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));

    // Phase 1: maximize -Σ artificials.
    let mut obj = vec![0.0; width];
    for row in &t {
        for j in 0..nvar {
            obj[j] += row[j];
        }
        obj[rhs] += row[rhs];
    }
    if run(&mut t, &mut basis, &mut obj, |j| j < nvar + m)? {
        // Phase 1 is bounded above by zero.
        unreachable!("phase-one objective cannot be unbounded");
    }
    if obj[rhs] > FEASIBILITY_TOL * b_scale {
        return Ok(LpStatus::Infeasible);
    }

    // Drive artificials out of the basis; drop rows that are redundant.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= nvar {
            if let Some(j) = (0..nvar).find(|&j| t[i][j].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut basis, &mut obj, i, j);
            } else {
                t.remove(i);
                basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    // Phase 2.
    let mut obj = vec![0.0; width];
    obj[..nvar].copy_from_slice(c);
    for (row, &bi) in t.iter().zip(&basis) {
        let cb = c[bi];
        if cb != 0.0 {
            for j in 0..nvar {
                obj[j] -= cb * row[j];
            }
            obj[rhs] -= cb * row[rhs];
        }
    }
    if run(&mut t, &mut basis, &mut obj, |j| j < nvar)? {
        return Ok(LpStatus::Unbounded);
    }
    let mut x = vec![0.0; nvar];
    for (row, &bi) in t.iter().zip(&basis) {
        x[bi] = row[rhs];
    }
    Ok(LpStatus::Optimal { x, value: -obj[rhs] })
}

/// Simplex iterations on a tableau whose objective row holds reduced costs
/// (and `-z` in the last column). Returns `true` when unbounded.
fn run(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    obj: &mut [f64],
    allowed: impl Fn(usize) -> bool,
) -> Result<bool> {
    let rhs = obj.len() - 1;
    for _ in 0..MAX_PIVOTS {
        let Some(q) = (0..rhs).find(|&j| allowed(j) && obj[j] > COST_TOL) else {
            return Ok(false);
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[q] > PIVOT_TOL {
                let ratio = row[rhs] / row[q];
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-14 || (ratio <= br + 1e-14 && basis[i] < basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        let Some((p, _)) = best else {
            return Ok(true);
        };
        pivot(t, basis, obj, p, q);
    }
    Err(Error::Convergence {
        what: "simplex",
        iterations: MAX_PIVOTS,
    })
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], obj: &mut [f64], p: usize, q: usize) {
    let piv = t[p][q];
    for v in t[p].iter_mut() {
        *v /= piv;
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != p {
            let f = row[q];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
            }
        }
    }
    let f = obj[q];
    if f != 0.0 {
        for (v, pv) in obj.iter_mut().zip(&prow) {
            *v -= f * pv;
        }
    }
    basis[p] = q;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimum(s: LpStatus) -> (Vec<f64>, f64) {
        match s {
            LpStatus::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36.
        let mut lp = LinearProgram::nonnegative(2);
        lp.maximize(vec![3.0, 5.0])
            .le(vec![1.0, 0.0], 4.0)
            .le(vec![0.0, 2.0], 12.0)
            .le(vec![3.0, 2.0], 18.0);
        let (x, v) = optimum(lp.solve().unwrap());
        assert!((v - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // min x (max -x) s.t. x ≥ -3 (i.e. -x ≤ 3)
        let mut lp = LinearProgram::free(1);
        lp.maximize(vec![-1.0]).le(vec![-1.0], 3.0);
        let (x, _) = optimum(lp.solve().unwrap());
        assert!((x[0] + 3.0).abs() < 1e-9);
        // x ≤ -2 with x free
        let mut lp = LinearProgram::free(1);
        lp.maximize(vec![1.0]).le(vec![1.0], -2.0);
        let (x, _) = optimum(lp.solve().unwrap());
        assert!((x[0] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::free(1);
        lp.le(vec![1.0], 0.0).le(vec![-1.0], -1.0);
        assert_eq!(lp.solve().unwrap(), LpStatus::Infeasible);

        let mut lp = LinearProgram::free(2);
        lp.maximize(vec![1.0, 0.0]).le(vec![0.0, 1.0], 1.0);
        assert_eq!(lp.solve().unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // λ ≥ 0, λ₁ + λ₂ = 1, twice (redundant), maximize λ₂.
        let mut lp = LinearProgram::nonnegative(2);
        lp.maximize(vec![0.0, 1.0])
            .eq(vec![1.0, 1.0], 1.0)
            .eq(vec![2.0, 2.0], 2.0);
        let (x, v) = optimum(lp.solve().unwrap());
        assert!((v - 1.0).abs() < 1e-12 && x[0].abs() < 1e-12);
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // Beale's classic cycling example for the largest-coefficient rule.
        let mut lp = LinearProgram::nonnegative(4);
        lp.maximize(vec![0.75, -150.0, 0.02, -6.0])
            .le(vec![0.25, -60.0, -0.04, 9.0], 0.0)
            .le(vec![0.5, -90.0, -0.02, 3.0], 0.0)
            .le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let (_, v) = optimum(lp.solve().unwrap());
        assert!((v - 0.05).abs() < 1e-9);
    }
}
