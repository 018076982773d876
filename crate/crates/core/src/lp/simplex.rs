//! Exact dense-tableau simplex over big rationals.
//!
//! Two phases, Bland's rule (lowest eligible index for both entering column
//! and tie-broken leaving row), so every run terminates without cycling and
//! the optimum returned is exact. Variables are implicitly nonnegative;
//! constraints are `≤` or `≥` rows.
//!
//! Duals are recovered from the final objective row: the reduced cost of a
//! row's slack column is its dual (negated for surplus columns), then
//! adjusted for rows that were negated to make the right-hand side
//! nonnegative. Sign convention in the reported duals: for a maximization,
//! `≤` rows have nonnegative duals and `≥` rows nonpositive; minimization
//! flips both, so covering programs get the familiar nonnegative duals on
//! their `≥` rows. In all cases `Σ_i y_i b_i` equals the optimal objective.

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Constraint {
        Constraint { coeffs, relation: Relation::Le, rhs }
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Constraint {
        Constraint { coeffs, relation: Relation::Ge, rhs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexSolution {
    pub objective: Rational,
    pub values: Vec<Rational>,
    /// One dual per constraint, in input order.
    pub duals: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplexOutcome {
    Optimal(SimplexSolution),
    Infeasible,
    Unbounded,
}

enum RunEnd {
    Optimal,
    Unbounded,
}

/// Columns are laid out as structurals, then one slack/surplus per row
/// (column `n + i` belongs to row `i`), then artificials from
/// `first_artificial` on.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    z: Vec<Rational>,
    zrhs: Rational,
    basis: Vec<usize>,
    first_artificial: usize,
    /// True for rows negated during right-hand-side normalization.
    flipped: Vec<bool>,
    /// Relation after normalization (`Ge` rows have surplus + artificial).
    norm_relation: Vec<Relation>,
}

impl Tableau {
    fn cols(&self) -> usize {
        self.z.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pv = self.rows[r][c].clone();
        debug_assert!(!pv.is_zero());
        let inv = pv.recip().expect("pivot element is nonzero");
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        for r2 in 0..self.rows.len() {
            if r2 == r || self.rows[r2][c].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut self.rows[r2][c], Rational::zero());
            for j in 0..self.cols() {
                if j != c && !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.rows[r2][j] -= &delta;
                }
            }
            let delta = &f * &self.rhs[r];
            self.rhs[r2] -= &delta;
        }
        if !self.z[c].is_zero() {
            let f = std::mem::replace(&mut self.z[c], Rational::zero());
            for j in 0..self.cols() {
                if j != c && !self.rows[r][j].is_zero() {
                    let delta = &f * &self.rows[r][j];
                    self.z[j] -= &delta;
                }
            }
            let delta = &f * &self.rhs[r];
            self.zrhs -= &delta;
        }
        self.basis[r] = c;
    }

    /// Pivots to optimality. Columns at `ban_from` and beyond never enter.
    fn run(&mut self, ban_from: usize) -> RunEnd {
        loop {
            // Bland: smallest-index column with negative reduced cost.
            let entering = match (0..ban_from).find(|&j| self.z[j].is_negative()) {
                Some(j) => j,
                None => return RunEnd::Optimal,
            };
            // Min-ratio rows, ties broken by smallest basic variable index.
            let mut leave: Option<(Rational, usize, usize)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][entering].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][entering];
                let better = match &leave {
                    None => true,
                    Some((best, var, _)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < *var)
                    }
                };
                if better {
                    leave = Some((ratio, self.basis[r], r));
                }
            }
            match leave {
                Some((_, _, r)) => self.pivot(r, entering),
                None => return RunEnd::Unbounded,
            }
        }
    }
}

/// Solves the program exactly. `Err` is reserved for malformed input; an
/// infeasible or unbounded program is a regular outcome.
pub fn solve(lp: &LinearProgram) -> Result<SimplexOutcome> {
    let n = lp.objective.len();
    if n == 0 {
        return Err(Error::InvalidInput("linear program with no variables".into()));
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::InvalidInput(format!(
                "constraint {i} has {} coefficients, expected {n}",
                c.coeffs.len()
            )));
        }
    }

    let max_objective: Vec<Rational> = match lp.sense {
        Sense::Maximize => lp.objective.clone(),
        Sense::Minimize => lp.objective.iter().map(|c| -c).collect(),
    };

    // Normalize right-hand sides to be nonnegative, tracking flips.
    let r_count = lp.constraints.len();
    let mut flipped = vec![false; r_count];
    let mut norm_relation = vec![Relation::Le; r_count];
    let mut norm_rows: Vec<Vec<Rational>> = Vec::with_capacity(r_count);
    let mut rhs: Vec<Rational> = Vec::with_capacity(r_count);
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.rhs.is_negative() {
            flipped[i] = true;
            norm_relation[i] = match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
            };
            norm_rows.push(c.coeffs.iter().map(|x| -x).collect());
            rhs.push(-&c.rhs);
        } else {
            norm_relation[i] = c.relation;
            norm_rows.push(c.coeffs.clone());
            rhs.push(c.rhs.clone());
        }
    }

    let ge_rows: Vec<usize> = (0..r_count)
        .filter(|&i| matches!(norm_relation[i], Relation::Ge))
        .collect();
    let first_artificial = n + r_count;
    let cols = first_artificial + ge_rows.len();

    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(r_count);
    let mut basis = vec![0usize; r_count];
    for (i, coeffs) in norm_rows.into_iter().enumerate() {
        let mut row = vec![Rational::zero(); cols];
        row[..n].clone_from_slice(&coeffs);
        match norm_relation[i] {
            Relation::Le => {
                row[n + i] = Rational::one();
                basis[i] = n + i;
            }
            Relation::Ge => {
                row[n + i] = -Rational::one();
                let a = first_artificial + ge_rows.iter().position(|&g| g == i).unwrap();
                row[a] = Rational::one();
                basis[i] = a;
            }
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        rhs,
        z: vec![Rational::zero(); cols],
        zrhs: Rational::zero(),
        basis,
        first_artificial,
        flipped,
        norm_relation,
    };

    if !ge_rows.is_empty() {
        // Phase 1: maximize -Σ artificials, i.e. reduced costs start at +1 on
        // artificial columns, then are cleared against the starting basis.
        for a in first_artificial..cols {
            t.z[a] = Rational::one();
        }
        for &i in &ge_rows {
            for j in 0..cols {
                if !t.rows[i][j].is_zero() {
                    let delta = t.rows[i][j].clone();
                    t.z[j] -= &delta;
                }
            }
            let delta = t.rhs[i].clone();
            t.zrhs -= &delta;
        }
        match t.run(cols) {
            RunEnd::Optimal => {}
            RunEnd::Unbounded => unreachable!("phase 1 objective is bounded above by 0"),
        }
        if t.zrhs.is_negative() {
            return Ok(SimplexOutcome::Infeasible);
        }
        // Drive leftover artificials out of the basis. Their rows have zero
        // right-hand side, so any nonzero pivot works; a row with no nonzero
        // non-artificial entry is redundant and stays inert (the artificial
        // is banned from entering, so the row never changes again).
        for r in 0..t.rows.len() {
            if t.basis[r] >= first_artificial {
                if let Some(c) = (0..first_artificial).find(|&c| !t.rows[r][c].is_zero()) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase 2: rebuild the objective row for the real objective and clear the
    // basic columns (each is a unit vector, so one pass suffices).
    for j in 0..t.cols() {
        t.z[j] = if j < n { -&max_objective[j] } else { Rational::zero() };
    }
    t.zrhs = Rational::zero();
    for r in 0..t.rows.len() {
        let b = t.basis[r];
        if !t.z[b].is_zero() {
            let f = std::mem::replace(&mut t.z[b], Rational::zero());
            for j in 0..t.cols() {
                if j != b && !t.rows[r][j].is_zero() {
                    let delta = &f * &t.rows[r][j];
                    t.z[j] -= &delta;
                }
            }
            let delta = &f * &t.rhs[r];
            t.zrhs -= &delta;
        }
    }
    match t.run(t.first_artificial) {
        RunEnd::Optimal => {}
        RunEnd::Unbounded => return Ok(SimplexOutcome::Unbounded),
    }

    let mut values = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] = t.rhs[r].clone();
        }
    }
    let mut duals = Vec::with_capacity(r_count);
    for i in 0..r_count {
        let aux = t.z[n + i].clone();
        let y_norm = match t.norm_relation[i] {
            Relation::Le => aux,
            Relation::Ge => -aux,
        };
        let y = if t.flipped[i] { -y_norm } else { y_norm };
        duals.push(match lp.sense {
            Sense::Maximize => y,
            Sense::Minimize => -y,
        });
    }
    let objective = match lp.sense {
        Sense::Maximize => t.zrhs,
        Sense::Minimize => -t.zrhs,
    };
    Ok(SimplexOutcome::Optimal(SimplexSolution { objective, values, duals }))
}
