//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for problems with a few dozen variables; every pivot recomputes the
//! reduced costs from scratch.

use super::MathError;

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        Self { coeffs, sense, rhs }
    }
}

/// `maximize objective·x` subject to the listed rows; `nonneg[j]` marks `x_j ≥ 0`,
/// otherwise `x_j` is free.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LpProblem {
    /// All variables nonnegative.
    pub fn maximize(objective: Vec<f64>, constraints: Vec<Constraint>) -> Self {
        let n = objective.len();
        Self { objective, constraints, nonneg: vec![true; n] }
    }

    fn validate(&self) -> Result<(), MathError> {
        let n = self.objective.len();
        if self.nonneg.len() != n {
            return Err(MathError::DimensionMismatch(format!("{} bound flags for {} variables", self.nonneg.len(), n)));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(MathError::DimensionMismatch(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(MathError::DimensionMismatch(format!("constraint {i} has non-finite data")));
            }
        }
        Ok(())
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.a[i * w + j] -= f * self.a[r * w + j];
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| cost[j] - (0..self.rows).map(|i| cost[self.basis[i]] * self.at(i, j)).sum::<f64>())
            .collect()
    }

    /// Maximizes `cost·x` over columns flagged in `allowed`.
    fn run(&mut self, cost: &[f64], allowed: &[bool], tol: f64) -> Result<(), MathError> {
        for _ in 0..MAX_PIVOTS {
            let d = self.reduced_costs(cost);
            let Some(enter) = (0..self.cols).find(|&j| allowed[j] && d[j] > tol) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aij = self.at(i, enter);
                if aij > PIVOT_EPS {
                    let ratio = self.rhs(i) / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-15 || (ratio <= best + 1e-15 && self.basis[i] < self.basis[r]) {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(MathError::Unbounded),
            }
        }
        Err(MathError::NoConvergence { sweeps: MAX_PIVOTS, residual: f64::NAN })
    }
}

/// Solves the LP to within `tol` (feasibility and optimality).
pub fn solve_lp(p: &LpProblem, tol: f64) -> Result<LpSolution, MathError> {
    p.validate()?;
    let n = p.objective.len();
    let m = p.constraints.len();

    // Structural columns: x_j (or x_j⁺, x_j⁻ for free variables).
    let mut struct_map: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        struct_map.push((j, 1.0));
        if !p.nonneg[j] {
            struct_map.push((j, -1.0));
        }
    }
    let ns = struct_map.len();

    // Normalize every row to a nonnegative right-hand side.
    let rows: Vec<(Vec<f64>, Sense, f64)> = p
        .constraints
        .iter()
        .map(|c| {
            let coeffs: Vec<f64> = struct_map.iter().map(|&(j, s)| s * c.coeffs[j]).collect();
            if c.rhs < 0.0 {
                let flipped = match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                (coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (coeffs, c.sense, c.rhs)
            }
        })
        .collect();

    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let cols = ns + n_slack + n_art;
    let w = cols + 1;
    let mut t = Tableau { rows: m, cols, a: vec![0.0; m * w], basis: vec![0; m] };
    let mut slack = ns;
    let mut art = ns + n_slack;
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        t.a[i * w..i * w + ns].copy_from_slice(coeffs);
        t.a[i * w + cols] = *rhs;
        match sense {
            Sense::Le => {
                t.a[i * w + slack] = 1.0;
                t.basis[i] = slack;
                slack += 1;
            }
            Sense::Ge => {
                t.a[i * w + slack] = -1.0;
                slack += 1;
                t.a[i * w + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
            Sense::Eq => {
                t.a[i * w + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
        }
    }
    let art_start = ns + n_slack;

    if n_art > 0 {
        let cost: Vec<f64> = (0..cols).map(|j| if j >= art_start { -1.0 } else { 0.0 }).collect();
        t.run(&cost, &vec![true; cols], tol)?;
        let infeas: f64 = (0..m).filter(|&i| t.basis[i] >= art_start).map(|i| t.rhs(i)).sum();
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if infeas > tol * scale {
            return Err(MathError::Infeasible);
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if t.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| t.at(i, j).abs() > 1e-9) {
                    t.pivot(i, j);
                }
            }
        }
    }

    let mut cost = vec![0.0; cols];
    for (k, &(j, s)) in struct_map.iter().enumerate() {
        cost[k] = s * p.objective[j];
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art_start).collect();
    t.run(&cost, &allowed, tol)?;

    let mut xs = vec![0.0; cols];
    for i in 0..m {
        xs[t.basis[i]] = t.rhs(i);
    }
    let mut x = vec![0.0; n];
    for (k, &(j, s)) in struct_map.iter().enumerate() {
        x[j] += s * xs[k];
    }
    let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x })
}
