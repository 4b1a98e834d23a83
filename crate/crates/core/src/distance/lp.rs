//! Dense two-phase primal simplex with Bland's pivoting rule.
//!
//! Problems are stated as
//!
//! ```text
//! maximize    c·x
//! subject to  A_eq x  = b_eq
//!             A_le x <= b_le
//!             l <= x <= u        (bounds may be infinite)
//! ```
//!
//! Bland's rule makes the pivot sequence a deterministic function of the
//! input, and the returned solution is always a basic one. Every claimed
//! optimum is re-checked against the original constraints; a solution that
//! fails the check is reported as [`LpStatus::NumericalFailure`].

const COST_EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-9;
const FEASIBILITY_EPS: f64 = 1e-7;
const CHECK_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap reached or the final solution failed verification.
    NumericalFailure,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    /// Maximized.
    pub objective: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    /// Rows `a·x <= b`.
    pub inequalities: Vec<(Vec<f64>, f64)>,
    /// `(lower, upper)` per variable; use infinities for free sides.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A problem over `n` variables, all with bounds `[0, ∞)`.
    pub fn nonnegative(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            equalities: Vec::new(),
            inequalities: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize, pivots: usize) -> Self {
        Self {
            status,
            x: vec![0.0; n],
            value: f64::NAN,
            pivots,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lower + y`
    Shift { col: usize, lower: f64 },
    /// `x = upper − y`
    Flip { col: usize, upper: f64 },
    /// `x = y⁺ − y⁻`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    /// Current objective value of the basic solution.
    value: f64,
    allowed: Vec<bool>,
    pivots: usize,
    max_pivots: usize,
}

enum Phase {
    Optimal,
    Unbounded,
    Stalled,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let cols = self.width - 1;
        self.cost = costs.to_vec();
        self.cost.resize(cols, 0.0);
        self.value = 0.0;
        for r in 0..self.rows {
            let cb = costs.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                let row = &self.data[r * self.width..(r + 1) * self.width];
                for (c, v) in self.cost.iter_mut().zip(row) {
                    *c -= cb * v;
                }
                self.value += cb * row[self.width - 1];
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f != 0.0 {
                for (v, pv) in self.data[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.data[i * w + c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row[..w - 1]) {
                *v -= f * pv;
            }
            self.cost[c] = 0.0;
            self.value += f * pivot_row[w - 1];
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs Bland-rule pivots until optimality, unboundedness or the cap.
    fn optimize(&mut self) -> Phase {
        loop {
            if self.pivots >= self.max_pivots {
                return Phase::Stalled;
            }
            let entering = (0..self.width - 1).find(|&c| self.allowed[c] && self.cost[c] > COST_EPS);
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, c);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((best, best_ratio)) => {
                            let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                            if ratio < best_ratio && !tie
                                || tie && self.basis[r] < self.basis[best]
                            {
                                Some((r, ratio))
                            } else {
                                Some((best, best_ratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Phase::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.data.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }
}

/// Solves `lp` (maximization). See the module docs for the problem form.
pub fn lp_solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_vars();
    assert_eq!(lp.bounds.len(), n, "one bound pair per variable");
    for (row, _) in lp.equalities.iter().chain(&lp.inequalities) {
        assert_eq!(row.len(), n, "constraint row length must equal variable count");
    }

    // Standard-form columns for the structural variables.
    let mut maps = Vec::with_capacity(n);
    let mut ns = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return LpSolution::failed(LpStatus::Infeasible, n, 0);
        }
        let map = if lo.is_finite() {
            if hi.is_finite() {
                bound_rows.push((ns, hi - lo));
            }
            VarMap::Shift { col: ns, lower: lo }
        } else if hi.is_finite() {
            VarMap::Flip { col: ns, upper: hi }
        } else {
            ns += 1;
            VarMap::Split { pos: ns - 1, neg: ns }
        };
        ns += 1;
        maps.push(map);
    }

    let translate = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; ns];
        let mut b = rhs;
        for (j, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, lower } => {
                    out[col] += a;
                    b -= a * lower;
                }
                VarMap::Flip { col, upper } => {
                    out[col] -= a;
                    b -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, b)
    };

    // (coefficients, rhs, is_inequality)
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (row, b) in &lp.equalities {
        let (r, b) = translate(row, *b);
        rows.push((r, b, false));
    }
    for (row, b) in &lp.inequalities {
        let (r, b) = translate(row, *b);
        rows.push((r, b, true));
    }
    for &(col, ub) in &bound_rows {
        let mut r = vec![0.0; ns];
        r[col] = 1.0;
        rows.push((r, ub, true));
    }

    let m = rows.len();
    let num_slack = rows.iter().filter(|r| r.2).count();
    let needs_art: Vec<bool> = rows.iter().map(|(_, b, ineq)| !*ineq || *b < 0.0).collect();
    let num_art = needs_art.iter().filter(|&&a| a).count();
    let cols = ns + num_slack + num_art;
    let width = cols + 1;
    let mut data = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let mut slack_col = ns;
    let mut art_col = ns + num_slack;
    for (i, (coeffs, b, ineq)) in rows.iter().enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        let row = &mut data[i * width..(i + 1) * width];
        for (dst, &a) in row.iter_mut().zip(coeffs) {
            *dst = sign * a;
        }
        row[cols] = sign * b;
        if *ineq {
            row[slack_col] = sign;
            if !needs_art[i] {
                basis[i] = slack_col;
            }
            slack_col += 1;
        }
        if needs_art[i] {
            row[art_col] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        }
    }

    let max_pivots = 50 * (m + cols) + 10_000;
    let mut t = Tableau {
        rows: m,
        width,
        data,
        basis,
        cost: Vec::new(),
        value: 0.0,
        allowed: vec![true; cols],
        pivots: 0,
        max_pivots,
    };
    let is_art = |c: usize| c >= ns + num_slack;

    if num_art > 0 {
        let mut phase1 = vec![0.0; cols];
        phase1[ns + num_slack..].iter_mut().for_each(|c| *c = -1.0);
        t.set_costs(&phase1);
        match t.optimize() {
            Phase::Optimal => {}
            Phase::Unbounded | Phase::Stalled => {
                return LpSolution::failed(LpStatus::NumericalFailure, n, t.pivots)
            }
        }
        let scale = 1.0 + rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
        if t.value < -FEASIBILITY_EPS * scale {
            return LpSolution::failed(LpStatus::Infeasible, n, t.pivots);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < t.rows {
            if is_art(t.basis[r]) {
                let col = (0..ns + num_slack)
                    .filter(|&c| t.at(r, c).abs() > FEASIBILITY_EPS)
                    .max_by(|&a, &b| t.at(r, a).abs().total_cmp(&t.at(r, b).abs()));
                match col {
                    Some(c) => t.pivot(r, c),
                    None => {
                        t.remove_row(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for c in ns + num_slack..cols {
            t.allowed[c] = false;
        }
    }

    let mut phase2 = vec![0.0; cols];
    for (j, &cj) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shift { col, .. } => phase2[col] += cj,
            VarMap::Flip { col, .. } => phase2[col] -= cj,
            VarMap::Split { pos, neg } => {
                phase2[pos] += cj;
                phase2[neg] -= cj;
            }
        }
    }
    t.set_costs(&phase2);
    match t.optimize() {
        Phase::Optimal => {}
        Phase::Unbounded => return LpSolution::failed(LpStatus::Unbounded, n, t.pivots),
        Phase::Stalled => return LpSolution::failed(LpStatus::NumericalFailure, n, t.pivots),
    }

    let mut y = vec![0.0; cols];
    for r in 0..t.rows {
        y[t.basis[r]] = t.rhs(r).max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, lower } => lower + y[col],
            VarMap::Flip { col, upper } => upper - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();

    if !satisfies(lp, &x) {
        return LpSolution::failed(LpStatus::NumericalFailure, n, t.pivots);
    }
    let value = dot(&lp.objective, &x);
    LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        pivots: t.pivots,
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn satisfies(lp: &LinearProgram, x: &[f64]) -> bool {
    let scale = |row: &[f64], b: f64| {
        1.0 + b.abs() + row.iter().zip(x).map(|(a, v)| (a * v).abs()).fold(0.0, f64::max)
    };
    lp.equalities
        .iter()
        .all(|(row, b)| (dot(row, x) - b).abs() <= CHECK_EPS * scale(row, *b))
        && lp
            .inequalities
            .iter()
            .all(|(row, b)| dot(row, x) - b <= CHECK_EPS * scale(row, *b))
        && lp
            .bounds
            .iter()
            .zip(x)
            .all(|(&(lo, hi), &v)| v >= lo - CHECK_EPS * (1.0 + lo.abs()) && v <= hi + CHECK_EPS * (1.0 + hi.abs()))
}
