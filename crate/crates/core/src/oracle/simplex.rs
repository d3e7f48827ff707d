//! Dense two-phase simplex, sized for the oracle's shape of problem: a
//! handful of constraint rows over thousands of columns. Kept self-contained
//! so the oracle's verdicts do not depend on an external solver.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SimplexError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub objective: f64,
    /// Structural part of the optimal point. The oracle only consumes the
    /// value, but the point is what the solver's own tests inspect.
    #[allow(dead_code)]
    pub x: Vec<f64>,
}

/// Reduced-cost entries larger than this count as improving.
const COST_TOL: f64 = 1e-9;
/// Pivot elements smaller than this are rejected.
const PIVOT_TOL: f64 = 1e-9;
/// Residual phase-1 objective below this counts as feasible.
const FEAS_TOL: f64 = 1e-7;
const MAX_ITERS: usize = 100_000;
/// Dantzig pivoting falls back to Bland's rule after this many pivots
/// without objective progress, which rules out cycling.
const STALL_LIMIT: usize = 200;

/// Minimizes `c . x` over `x >= 0` subject to `rows`.
pub(crate) fn solve(c: &[f64], rows: &[(Vec<f64>, Rel, f64)]) -> Result<Solution, SimplexError> {
    Tableau::build(c, rows).solve()
}

struct Tableau {
    /// Row-major: m constraint rows, then the phase-2 and phase-1
    /// objective rows. Each row has `width` entries, RHS last.
    t: Vec<f64>,
    m: usize,
    n_struct: usize,
    width: usize,
    basis: Vec<usize>,
    first_artificial: usize,
}

impl Tableau {
    fn build(c: &[f64], rows: &[(Vec<f64>, Rel, f64)]) -> Self {
        let m = rows.len();
        let n_struct = c.len();
        let n_slack = rows.iter().filter(|(_, rel, _)| *rel != Rel::Eq).count();
        // Artificials for equalities and (sign-normalized) >= rows.
        let needs_artificial: Vec<bool> = rows
            .iter()
            .map(|(_, rel, rhs)| {
                let flipped = *rhs < 0.0;
                match rel {
                    Rel::Eq => true,
                    Rel::Le => flipped,
                    Rel::Ge => !flipped,
                }
            })
            .collect();
        let n_art = needs_artificial.iter().filter(|b| **b).count();
        let width = n_struct + n_slack + n_art + 1;
        let mut t = vec![0.0; (m + 2) * width];
        let mut basis = vec![usize::MAX; m];
        let first_artificial = n_struct + n_slack;

        let mut slack_col = n_struct;
        let mut art_col = first_artificial;
        for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            assert_eq!(coeffs.len(), n_struct, "row {i} has wrong arity");
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            let row = &mut t[i * width..(i + 1) * width];
            for (j, &a) in coeffs.iter().enumerate() {
                row[j] = sign * a;
            }
            row[width - 1] = sign * rhs;
            if *rel != Rel::Eq {
                // Le becomes a +1 slack, Ge a -1 surplus, after the sign
                // normalization above.
                let slack_sign = match rel {
                    Rel::Le => sign,
                    Rel::Ge => -sign,
                    Rel::Eq => unreachable!(),
                };
                row[slack_col] = slack_sign;
                if slack_sign > 0.0 {
                    basis[i] = slack_col;
                }
                slack_col += 1;
            }
            if needs_artificial[i] {
                row[art_col] = 1.0;
                basis[i] = art_col;
                art_col += 1;
            }
            debug_assert_ne!(basis[i], usize::MAX, "row {i} has no starting basic column");
        }

        // Phase-2 objective row: structural costs.
        let obj2 = m * width;
        t[obj2..obj2 + n_struct].copy_from_slice(c);
        // Phase-1 objective row: unit cost on artificials.
        let obj1 = (m + 1) * width;
        for col in first_artificial..width - 1 {
            t[obj1 + col] = 1.0;
        }

        let mut tab = Self {
            t,
            m,
            n_struct,
            width,
            basis,
            first_artificial,
        };
        // Express both objective rows in terms of the nonbasic columns.
        for i in 0..m {
            let b = tab.basis[i];
            for obj_row in [m, m + 1] {
                let cost = tab.t[obj_row * tab.width + b];
                if cost != 0.0 {
                    tab.axpy_row(obj_row, i, -cost);
                }
            }
        }
        tab
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    /// row[dst] += factor * row[src]
    fn axpy_row(&mut self, dst: usize, src: usize, factor: f64) {
        let (w, s, d) = (self.width, src * self.width, dst * self.width);
        for j in 0..w {
            self.t[d + j] += factor * self.t[s + j];
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(row, col);
        for j in 0..w {
            self.t[row * w + j] *= inv;
        }
        self.t[row * w + col] = 1.0;
        for r in 0..self.m + 2 {
            if r != row {
                let factor = -self.at(r, col);
                if factor != 0.0 {
                    self.axpy_row(r, row, factor);
                    self.t[r * w + col] = 0.0;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs the simplex loop against the objective stored in `obj_row`,
    /// never letting columns at `banned_from` or beyond enter.
    fn iterate(&mut self, obj_row: usize, banned_from: usize) -> Result<(), SimplexError> {
        let mut stalled = 0usize;
        let mut last_obj = self.at(obj_row, self.width - 1);
        for _ in 0..MAX_ITERS {
            let entering = if stalled > STALL_LIMIT {
                (0..banned_from).find(|&j| self.at(obj_row, j) < -COST_TOL)
            } else {
                let mut best = (0usize, -COST_TOL);
                let mut found = None;
                for j in 0..banned_from {
                    let rc = self.at(obj_row, j);
                    if rc < best.1 {
                        best = (j, rc);
                        found = Some(j);
                    }
                }
                found.map(|_| best.0)
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, self.width - 1) / a;
                    let better = match leave {
                        None => true,
                        // Smallest ratio; break ties by basis index to help
                        // termination under degeneracy.
                        Some((bi, br)) => {
                            ratio < br - 1e-12
                                || (ratio < br + 1e-12 && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(SimplexError::Unbounded);
            };
            self.pivot(row, col);
            let obj = self.at(obj_row, self.width - 1);
            if obj < last_obj - 1e-13 {
                stalled = 0;
                last_obj = obj;
            } else {
                stalled += 1;
            }
        }
        Err(SimplexError::IterationLimit)
    }

    fn solve(mut self) -> Result<Solution, SimplexError> {
        let (m, w) = (self.m, self.width);
        if self.first_artificial < w - 1 {
            self.iterate(m + 1, self.first_artificial)?;
            // Phase-1 objective row RHS carries minus the infeasibility.
            if -self.at(m + 1, w - 1) > FEAS_TOL {
                return Err(SimplexError::Infeasible);
            }
            // Pivot lingering zero-level artificials out where possible;
            // a row with no usable pivot is redundant and harmless.
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    if let Some(col) =
                        (0..self.first_artificial).find(|&j| self.at(i, j).abs() > PIVOT_TOL)
                    {
                        self.pivot(i, col);
                    }
                }
            }
        }
        self.iterate(m, self.first_artificial)?;
        let mut x = vec![0.0; self.n_struct];
        for i in 0..m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.at(i, w - 1);
            }
        }
        Ok(Solution {
            objective: -self.at(m, w - 1),
            x,
        })
    }
}
