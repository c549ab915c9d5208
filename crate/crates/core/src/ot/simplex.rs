//! Transportation simplex: Vogel's approximation for the starting basis,
//! MODI potentials for reduced costs, stepping-stone cycles for pivots.

use std::collections::VecDeque;

use crate::error::{DmwError, Result};

use super::{check_marginals, CostMatrix, DualPotentials, TransportPlan};

/// Entering-cell selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest-index cell with negative reduced cost; lowest-index leaving cell
    /// among ties. Never cycles.
    Bland,
    /// Most negative reduced cost, switching to [`PivotRule::Bland`] during
    /// long runs of degenerate pivots.
    #[default]
    DantzigThenBland,
}

/// Consecutive degenerate pivots tolerated before the hybrid rule falls back
/// to Bland's rule.
const DEGENERATE_RUN: usize = 32;

/// Exact balanced optimal transport between weight vectors `a` (rows) and
/// `b` (columns); see [`exact_ot_with_rule`].
pub fn exact_ot(cost: &CostMatrix, a: &[f64], b: &[f64]) -> Result<TransportPlan> {
    exact_ot_with_rule(cost, a, b, PivotRule::default())
}

/// Solves the transportation LP to optimality and returns an optimal basic
/// plan together with dual potentials certifying it.
///
/// Zero-weight atoms are removed before solving; their potentials are then
/// set to the largest values keeping every reduced cost nonnegative.
pub fn exact_ot_with_rule(cost: &CostMatrix, a: &[f64], b: &[f64], rule: PivotRule) -> Result<TransportPlan> {
    check_marginals(cost, a, b)?;
    let rows: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let cols: Vec<usize> = (0..b.len()).filter(|&j| b[j] > 0.0).collect();
    let (m, n) = (rows.len(), cols.len());
    let mut c = Vec::with_capacity(m * n);
    for &i in &rows {
        c.extend(cols.iter().map(|&j| cost.get(i, j)));
    }
    let supply: Vec<f64> = rows.iter().map(|&i| a[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| b[j]).collect();

    let mut problem = Transportation::new(m, n, c, &supply, &demand);
    problem.optimize(rule)?;

    let mut coupling = vec![0.0; cost.rows() * cost.cols()];
    for (k, &(i, j)) in problem.basis.iter().enumerate() {
        coupling[rows[i] * cost.cols() + cols[j]] = problem.flow[k];
    }
    let (pu, pv) = problem.potentials();
    let mut u = vec![f64::NAN; a.len()];
    let mut v = vec![f64::NAN; b.len()];
    for (k, &i) in rows.iter().enumerate() {
        u[i] = pu[k];
    }
    for (k, &j) in cols.iter().enumerate() {
        v[j] = pv[k];
    }
    for (i, ui) in u.iter_mut().enumerate() {
        if ui.is_nan() {
            *ui = cols.iter().map(|&j| cost.get(i, j) - v[j]).fold(f64::INFINITY, f64::min);
        }
    }
    for (j, vj) in v.iter_mut().enumerate() {
        if vj.is_nan() {
            *vj = (0..a.len()).map(|i| cost.get(i, j) - u[i]).fold(f64::INFINITY, f64::min);
        }
    }
    let objective = a.iter().zip(&u).map(|(w, x)| w * x).sum::<f64>() + b.iter().zip(&v).map(|(w, x)| w * x).sum::<f64>();
    Ok(TransportPlan::new(cost, coupling, a, b).with_duals(DualPotentials { u, v, objective }))
}

struct Transportation {
    m: usize,
    n: usize,
    cost: Vec<f64>,
    /// Basic cells, always `m + n − 1` of them, forming a spanning tree of the
    /// bipartite row/column graph.
    basis: Vec<(usize, usize)>,
    flow: Vec<f64>,
    /// `basic_at[i * n + j]` is the basis slot of cell `(i, j)` or `usize::MAX`.
    basic_at: Vec<usize>,
}

/// Active entries of one row or column sorted by cost, with lazily advanced
/// pointers to the cheapest and second-cheapest active entries.
struct LineOrder {
    order: Vec<usize>,
    first: usize,
    second: usize,
}

impl LineOrder {
    fn new(costs: impl Iterator<Item = f64>) -> Self {
        let costs: Vec<f64> = costs.collect();
        let mut order: Vec<usize> = (0..costs.len()).collect();
        order.sort_by(|&x, &y| costs[x].total_cmp(&costs[y]).then(x.cmp(&y)));
        Self { order, first: 0, second: 1 }
    }

    fn advance(&mut self, active: &[bool]) {
        while self.first < self.order.len() && !active[self.order[self.first]] {
            self.first += 1;
        }
        if self.second <= self.first {
            self.second = self.first + 1;
        }
        while self.second < self.order.len() && !active[self.order[self.second]] {
            self.second += 1;
        }
    }

    fn cheapest(&self) -> usize {
        self.order[self.first]
    }

    /// Difference between the two cheapest active costs, or the only cost left.
    fn penalty(&self, cost: impl Fn(usize) -> f64) -> f64 {
        let c1 = cost(self.order[self.first]);
        if self.second < self.order.len() {
            cost(self.order[self.second]) - c1
        } else {
            c1
        }
    }
}

impl Transportation {
    fn new(m: usize, n: usize, cost: Vec<f64>, supply: &[f64], demand: &[f64]) -> Self {
        let mut t = Self { m, n, cost, basis: Vec::new(), flow: Vec::new(), basic_at: vec![usize::MAX; m * n] };
        t.vogel(supply, demand);
        t
    }

    #[inline]
    fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    fn push_basic(&mut self, i: usize, j: usize, x: f64) {
        self.basic_at[i * self.n + j] = self.basis.len();
        self.basis.push((i, j));
        self.flow.push(x);
    }

    /// Vogel's approximation. Each allocation retires exactly one line except
    /// the last, which retires the final row and column together; the
    /// resulting `m + n − 1` cells form a spanning tree.
    fn vogel(&mut self, supply: &[f64], demand: &[f64]) {
        let (m, n) = (self.m, self.n);
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let mut row_active = vec![true; m];
        let mut col_active = vec![true; n];
        let (mut rows_left, mut cols_left) = (m, n);
        let mut row_order: Vec<LineOrder> = (0..m).map(|i| LineOrder::new((0..n).map(|j| self.c(i, j)))).collect();
        let mut col_order: Vec<LineOrder> = (0..n).map(|j| LineOrder::new((0..m).map(|i| self.c(i, j)))).collect();

        loop {
            let mut best: Option<(f64, bool, usize)> = None;
            for i in (0..m).filter(|&i| row_active[i]) {
                row_order[i].advance(&col_active);
                let pen = row_order[i].penalty(|j| self.c(i, j));
                if best.is_none_or(|(bp, _, _)| pen > bp) {
                    best = Some((pen, true, i));
                }
            }
            for j in (0..n).filter(|&j| col_active[j]) {
                col_order[j].advance(&row_active);
                let pen = col_order[j].penalty(|i| self.c(i, j));
                if best.is_none_or(|(bp, _, _)| pen > bp) {
                    best = Some((pen, false, j));
                }
            }
            let Some((_, is_row, line)) = best else { break };
            let (i, j) = if is_row { (line, row_order[line].cheapest()) } else { (col_order[line].cheapest(), line) };

            if rows_left == 1 && cols_left == 1 {
                self.push_basic(i, j, s[i]);
                break;
            }
            let retire_row = if cols_left == 1 {
                true
            } else if rows_left == 1 {
                false
            } else {
                s[i] <= d[j]
            };
            if retire_row {
                let x = s[i];
                self.push_basic(i, j, x);
                d[j] = (d[j] - x).max(0.0);
                row_active[i] = false;
                rows_left -= 1;
            } else {
                let x = d[j];
                self.push_basic(i, j, x);
                s[i] = (s[i] - x).max(0.0);
                col_active[j] = false;
                cols_left -= 1;
            }
        }
        debug_assert_eq!(self.basis.len(), m + n - 1);
    }

    /// Tree adjacency over nodes `0..m` (rows) and `m..m+n` (columns); each
    /// entry is `(neighbour, basis slot)`.
    fn tree(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (k, &(i, j)) in self.basis.iter().enumerate() {
            adj[i].push((self.m + j, k));
            adj[self.m + j].push((i, k));
        }
        adj
    }

    /// Potentials with `u_i + v_j = c_ij` on every basic cell and `u_0 = 0`.
    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let adj = self.tree();
        let mut pot = vec![f64::NAN; self.m + self.n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &(y, k) in &adj[x] {
                if pot[y].is_nan() {
                    let (i, j) = self.basis[k];
                    pot[y] = self.c(i, j) - pot[x];
                    queue.push_back(y);
                }
            }
        }
        let v = pot.split_off(self.m);
        (pot, v)
    }

    /// Basis slots on the tree path from row `i` to column `j`, in order.
    fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let adj = self.tree();
        let target = self.m + j;
        let mut parent = vec![(usize::MAX, usize::MAX); self.m + self.n];
        parent[i] = (i, usize::MAX);
        let mut queue = VecDeque::from([i]);
        while let Some(x) = queue.pop_front() {
            if x == target {
                break;
            }
            for &(y, k) in &adj[x] {
                if parent[y].0 == usize::MAX {
                    parent[y] = (x, k);
                    queue.push_back(y);
                }
            }
        }
        let mut slots = Vec::new();
        let mut x = target;
        while x != i {
            let (px, k) = parent[x];
            slots.push(k);
            x = px;
        }
        slots.reverse();
        slots
    }

    fn optimize(&mut self, rule: PivotRule) -> Result<()> {
        let (m, n) = (self.m, self.n);
        let scale = self.cost.iter().copied().fold(1.0, f64::max);
        let tol = 1e-12 * scale;
        let max_pivots = 50 * m * n + 1000;
        let mut bland = rule == PivotRule::Bland;
        let mut degenerate_run = 0;

        for _ in 0..max_pivots {
            let (u, v) = self.potentials();
            let mut entering: Option<(usize, usize)> = None;
            let mut most_negative = -tol;
            'scan: for (i, &ui) in u.iter().enumerate() {
                for (j, &vj) in v.iter().enumerate() {
                    if self.basic_at[i * n + j] != usize::MAX {
                        continue;
                    }
                    let r = self.c(i, j) - ui - vj;
                    if r < most_negative {
                        entering = Some((i, j));
                        if bland {
                            break 'scan;
                        }
                        most_negative = r;
                    }
                }
            }
            let Some((ei, ej)) = entering else { return Ok(()) };

            // Cycle: entering cell (+), then the tree path from column ej back
            // to row ei with alternating signs starting at (−).
            let path = self.path(ei, ej);
            let minus: Vec<usize> = path.iter().rev().step_by(2).copied().collect();
            let theta = minus.iter().map(|&k| self.flow[k]).fold(f64::INFINITY, f64::min);
            let leaving = minus
                .iter()
                .copied()
                .filter(|&k| self.flow[k] == theta)
                .min_by_key(|&k| {
                    let (i, j) = self.basis[k];
                    i * n + j
                })
                .expect("cycle has at least one decreasing cell");

            for (step, &k) in path.iter().rev().enumerate() {
                if step % 2 == 0 {
                    self.flow[k] = (self.flow[k] - theta).max(0.0);
                } else {
                    self.flow[k] += theta;
                }
            }
            let (li, lj) = self.basis[leaving];
            self.basic_at[li * n + lj] = usize::MAX;
            self.basis[leaving] = (ei, ej);
            self.flow[leaving] = theta;
            self.basic_at[ei * n + ej] = leaving;

            if theta == 0.0 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                // Cycling needs an unbroken degenerate run, and Bland's rule
                // ends every run, so the hybrid may return to Dantzig here.
                degenerate_run = 0;
                bland = rule == PivotRule::Bland;
            }
        }
        Err(DmwError::Numerical(format!("transportation simplex did not terminate within {max_pivots} pivots on a {m}×{n} problem")))
    }
}
