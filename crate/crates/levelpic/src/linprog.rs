//! Exact-rational linear programming.
//!
//! Solves `min c.x  s.t.  A x >= b, x >= 0` over arbitrary-precision
//! rationals with a two-phase simplex using Bland's anti-cycling rule, so
//! every run terminates and every reported optimum is exact. Optimal
//! answers carry a dual vector that is verified inside the solver
//! (`y >= 0`, `A^T y <= c`, `b.y` equal to the primal value); by weak
//! duality the pair is a self-contained optimality certificate, and any
//! violation is reported as an internal error rather than returned.
//!
//! For small systems [`enumerate_vertices`] lists every basic feasible
//! point exactly; [`solve_by_enumeration`] minimizes over them and serves
//! as an independent oracle against the simplex path. The callers here
//! only minimize objectives that are bounded below on the feasible set
//! (nonnegative costs over nonnegative variables), where a feasible
//! region that is nonempty has a vertex and the oracle is exhaustive.

use num_traits::Zero;

use crate::{rat_int, Error, Rational};

/// `min c.x  s.t.  a x >= b, x >= 0`; rows of `a` must all have length
/// `c.len()`.
#[derive(Clone, PartialEq, Debug)]
pub struct StandardLp {
    pub c: Vec<Rational>,
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
}

/// An exact optimum with its dual certificate.
#[derive(Clone, PartialEq, Debug)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per constraint row; verified to satisfy `y >= 0`,
    /// `A^T y <= c`, and `b.y = value` before being returned.
    pub dual: Vec<Rational>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Current rows, `ncols` coefficients plus the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced-cost row, same width.
    obj: Vec<Rational>,
    /// Basic column of each row.
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        debug_assert!(!p.is_zero());
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: enter the lowest-index improving column, leave by
    /// the minimum ratio with ties broken by lowest basic index. Returns
    /// false on detecting an improving ray (unbounded objective).
    fn run_simplex(&mut self, col_allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.ncols)
                .find(|&j| col_allowed(j) && self.obj[j] < Rational::zero());
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if r[col] <= Rational::zero() {
                    continue;
                }
                let ratio = &r[self.ncols] / &r[col];
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*best_i])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Solves a square exact linear system by Gaussian elimination; `None`
/// when singular. Matrices here are tiny, so no pivoting strategy beyond
/// "first nonzero" is needed.
fn solve_square(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = rhs.len();
    let mut m: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut full = row.clone();
            full.push(r.clone());
            full
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot_row);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &p;
        }
        let pivot = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot) {
                *v -= &f * pv;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Exact two-phase simplex. `Optimal` results carry a verified dual
/// certificate; verification failure (a solver bug, were it ever to
/// happen) surfaces as [`Error::InternalInconsistency`].
pub fn solve(lp: &StandardLp) -> Result<LpOutcome, Error> {
    let n = lp.c.len();
    let m = lp.b.len();
    assert!(lp.a.len() == m && lp.a.iter().all(|r| r.len() == n));

    // Working equality system: rows with nonpositive rhs are negated so
    // their surplus column can start basic; the rest get an artificial.
    let mut signs = vec![rat_int(1); m];
    let mut artificial_of_row = vec![None; m];
    let mut n_art = 0usize;
    for i in 0..m {
        if lp.b[i] > Rational::zero() {
            artificial_of_row[i] = Some(n_art);
            n_art += 1;
        } else {
            signs[i] = rat_int(-1);
        }
    }
    let art_start = n + m;
    let ncols = n + m + n_art;

    // Original working matrix, kept for dual extraction.
    let mut work: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut work_rhs: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rational::zero(); ncols];
        for j in 0..n {
            row[j] = &signs[i] * &lp.a[i][j];
        }
        row[n + i] = -&signs[i]; // surplus
        if let Some(k) = artificial_of_row[i] {
            row[art_start + k] = rat_int(1);
        }
        work.push(row);
        work_rhs.push(&signs[i] * &lp.b[i]);
    }

    let mut tableau = Tableau {
        rows: work
            .iter()
            .zip(&work_rhs)
            .map(|(r, b)| {
                let mut row = r.clone();
                row.push(b.clone());
                row
            })
            .collect(),
        obj: vec![Rational::zero(); ncols + 1],
        basis: (0..m)
            .map(|i| match artificial_of_row[i] {
                Some(k) => art_start + k,
                None => n + i,
            })
            .collect(),
        ncols,
    };

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        for j in art_start..ncols {
            tableau.obj[j] = rat_int(1);
        }
        for i in 0..m {
            if artificial_of_row[i].is_some() {
                let row = tableau.rows[i].clone();
                for (v, rv) in tableau.obj.iter_mut().zip(&row) {
                    *v -= rv;
                }
            }
        }
        if !tableau.run_simplex(|_| true) {
            return Err(Error::InternalInconsistency(
                "phase-1 objective is bounded by construction".into(),
            ));
        }
        let infeasibility: Rational = (0..m)
            .filter(|&i| tableau.basis[i] >= art_start)
            .map(|i| tableau.rows[i][ncols].clone())
            .sum();
        if infeasibility > Rational::zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot leftover artificials out where possible; rows where it is
        // impossible are redundant and keep a zero-valued artificial that
        // phase 2 never lets back in.
        for i in 0..m {
            if tableau.basis[i] >= art_start {
                if let Some(col) =
                    (0..art_start).find(|&j| !tableau.rows[i][j].is_zero())
                {
                    tableau.pivot(i, col);
                }
            }
        }
    }

    // Phase 2: the real objective, artificial columns barred.
    let mut cost = vec![Rational::zero(); ncols];
    cost[..n].clone_from_slice(&lp.c);
    tableau.obj = cost.clone();
    tableau.obj.push(Rational::zero());
    for i in 0..m {
        let cb = cost[tableau.basis[i]].clone();
        if !cb.is_zero() {
            let row = tableau.rows[i].clone();
            for (v, rv) in tableau.obj.iter_mut().zip(&row) {
                *v -= &cb * rv;
            }
        }
    }
    if !tableau.run_simplex(|j| j < art_start) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![Rational::zero(); n];
    for i in 0..m {
        if tableau.basis[i] < n {
            x[tableau.basis[i]] = tableau.rows[i][ncols].clone();
        }
    }
    let value: Rational = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();

    // Dual from the final basis: solve B^T yhat = c_B against the
    // original working columns, then undo the row negations.
    let basis_matrix: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|k| work[k][tableau.basis[i]].clone()).collect())
        .collect();
    let c_basis: Vec<Rational> = (0..m).map(|i| cost[tableau.basis[i]].clone()).collect();
    let yhat = solve_square(&basis_matrix, &c_basis).ok_or_else(|| {
        Error::InternalInconsistency("singular basis at optimality".into())
    })?;
    let dual: Vec<Rational> = yhat
        .iter()
        .zip(&signs)
        .map(|(y, s)| y * s)
        .collect();

    // Independent optimality check: dual feasibility plus matching
    // objectives. Anything off means a bug in this module.
    let mut ok = dual.iter().all(|y| *y >= Rational::zero());
    for j in 0..n {
        let col_sum: Rational = (0..m).map(|i| &dual[i] * &lp.a[i][j]).sum();
        ok &= col_sum <= lp.c[j];
    }
    let dual_value: Rational = dual.iter().zip(&lp.b).map(|(y, b)| y * b).sum();
    ok &= dual_value == value;
    if !ok {
        return Err(Error::InternalInconsistency(
            "dual certificate failed verification".into(),
        ));
    }

    Ok(LpOutcome::Optimal(LpSolution { x, value, dual }))
}

/// Like [`solve`], but among all optimal points returns the
/// lexicographically smallest one, found by re-minimizing the coordinates
/// in order over the optimal face. The dual certificate is the one from
/// the initial solve (the value does not move).
pub fn solve_lex_min(lp: &StandardLp) -> Result<LpOutcome, Error> {
    let sol = match solve(lp)? {
        LpOutcome::Optimal(sol) => sol,
        other => return Ok(other),
    };
    let n = lp.c.len();
    let mut fixed: Vec<Rational> = Vec::with_capacity(n);
    for k in 0..n {
        let mut a = lp.a.clone();
        let mut b = lp.b.clone();
        let push_eq = |a: &mut Vec<Vec<Rational>>, b: &mut Vec<Rational>, row: Vec<Rational>, v: &Rational| {
            a.push(row.iter().map(|x| -x).collect());
            b.push(-v);
            a.push(row);
            b.push(v.clone());
        };
        push_eq(&mut a, &mut b, lp.c.clone(), &sol.value);
        for (j, v) in fixed.iter().enumerate() {
            let mut e = vec![Rational::zero(); n];
            e[j] = rat_int(1);
            push_eq(&mut a, &mut b, e, v);
        }
        let mut c = vec![Rational::zero(); n];
        c[k] = rat_int(1);
        match solve(&StandardLp { c, a, b })? {
            LpOutcome::Optimal(s) => fixed.push(s.value),
            _ => {
                return Err(Error::InternalInconsistency(
                    "lexicographic refinement lost feasibility".into(),
                ))
            }
        }
    }
    Ok(LpOutcome::Optimal(LpSolution {
        x: fixed,
        value: sol.value,
        dual: sol.dual,
    }))
}

fn for_each_combination(total: usize, take: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, total: usize, left: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=total.saturating_sub(left) {
            acc.push(i);
            rec(i + 1, total, left - 1, acc, f);
            acc.pop();
        }
    }
    rec(0, total, take, &mut Vec::new(), f);
}

/// Every basic feasible point of the region `A x >= b, x >= 0`: solutions
/// of `n` of the `m + n` bounding hyperplanes that satisfy all
/// constraints. Sorted lexicographically, deduplicated.
pub fn enumerate_vertices(lp: &StandardLp) -> Vec<Vec<Rational>> {
    let n = lp.c.len();
    let m = lp.b.len();
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for_each_combination(m + n, n, &mut |pick| {
        let mut mat = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for &idx in pick {
            if idx < m {
                mat.push(lp.a[idx].clone());
                rhs.push(lp.b[idx].clone());
            } else {
                let mut e = vec![Rational::zero(); n];
                e[idx - m] = rat_int(1);
                mat.push(e);
                rhs.push(Rational::zero());
            }
        }
        let Some(x) = solve_square(&mat, &rhs) else {
            return;
        };
        let feasible = x.iter().all(|v| *v >= Rational::zero())
            && lp.a.iter().zip(&lp.b).all(|(row, b)| {
                let lhs: Rational = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                lhs >= *b
            });
        if feasible {
            out.push(x);
        }
    });
    out.sort();
    out.dedup();
    out
}

/// Oracle solve: exhaustive minimum over the vertices, lexicographically
/// smallest optimizer. `None` when no vertex is feasible, which for a
/// pointed region (forced by `x >= 0`) means the region is empty. Only
/// meaningful when the objective attains its minimum at a vertex, which
/// holds whenever [`solve`] reports `Optimal`.
pub fn solve_by_enumeration(lp: &StandardLp) -> Option<(Vec<Rational>, Rational)> {
    let vertices = enumerate_vertices(lp);
    let mut best: Option<(Vec<Rational>, Rational)> = None;
    for x in vertices {
        let value: Rational = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        let better = match &best {
            None => true,
            // The list is lex-sorted, so strict improvement is the only
            // way a later vertex wins.
            Some((_, bv)) => value < *bv,
        };
        if better {
            best = Some((x, value));
        }
    }
    best
}
