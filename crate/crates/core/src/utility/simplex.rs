//! Transportation simplex (network simplex on the complete bipartite graph).
//!
//! Rows `0..m` and columns `m..m + n` are nodes; cell `i * n + j` is an arc
//! from row `i` to column `j`. An extra root node `m + n` carries one
//! zero-cost arc from every other node. These arcs all point into the root,
//! which has no supply, so they never carry flow; they only let the tree
//! start as a forest. The starting flow is the least-cost allocation, each
//! of whose components hangs from the root.
//!
//! The basis tree is kept strongly feasible: every zero-flow tree arc points
//! towards the root. The leaving arc is the last blocking arc met when the
//! cycle is traversed from its apex in the direction of the entering arc,
//! which keeps that property and rules out cycling under any entering rule.
//! Entering cells are priced in blocks of about `sqrt(m * n)` cells, resuming
//! after the previous block: the most negative reduced cost within the first
//! block that has one enters, ties going to the first cell scanned.

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, Scalar};

use super::{TransportPlan, TransportProblem};

/// Smallest pricing block.
const MIN_BLOCK: usize = 10;

struct Solver<'a, T> {
    problem: &'a TransportProblem<T>,
    m: usize,
    n: usize,
    /// Flow per arc: the `m * n` cells, then one root arc per node.
    flow: Vec<T>,
    basic: Vec<bool>,
    /// Tree arcs incident to each node.
    adjacent: Vec<Vec<usize>>,
    parent: Vec<usize>,
    parent_arc: Vec<usize>,
    depth: Vec<usize>,
    /// Node potentials with `cost + potential[tail] - potential[head] = 0`
    /// on every tree arc and the root at zero.
    potential: Vec<T>,
    block: usize,
    next: usize,
}

impl<'a, T: Scalar> Solver<'a, T> {
    fn new(problem: &'a TransportProblem<T>) -> Self {
        let (m, n) = (problem.n_sources(), problem.n_sinks());
        let nodes = m + n + 1;
        let cells = m * n;
        let mut solver = Solver {
            problem,
            m,
            n,
            flow: vec![T::zero(); cells + m + n],
            basic: vec![false; cells + m + n],
            adjacent: vec![Vec::new(); nodes],
            parent: vec![usize::MAX; nodes],
            parent_arc: vec![usize::MAX; nodes],
            depth: vec![0; nodes],
            potential: vec![T::zero(); nodes],
            block: ((cells as f64).sqrt().ceil() as usize).max(MIN_BLOCK).min(cells),
            next: 0,
        };
        solver.initial_basis();
        solver
    }

    fn root(&self) -> usize {
        self.m + self.n
    }

    fn tail(&self, arc: usize) -> usize {
        if arc < self.m * self.n {
            arc / self.n
        } else {
            arc - self.m * self.n
        }
    }

    fn head(&self, arc: usize) -> usize {
        if arc < self.m * self.n {
            self.m + arc % self.n
        } else {
            self.root()
        }
    }

    fn cost(&self, arc: usize) -> T {
        if arc < self.m * self.n {
            self.problem.costs()[arc].clone()
        } else {
            T::zero()
        }
    }

    fn link(&mut self, arc: usize) {
        self.basic[arc] = true;
        let (t, h) = (self.tail(arc), self.head(arc));
        self.adjacent[t].push(arc);
        self.adjacent[h].push(arc);
    }

    fn unlink(&mut self, arc: usize) {
        self.basic[arc] = false;
        for node in [self.tail(arc), self.head(arc)] {
            let list = &mut self.adjacent[node];
            let at = list.iter().position(|&a| a == arc).expect("tree arc is listed");
            list.swap_remove(at);
        }
    }

    /// Least-cost method. Every allocation exhausts a row or a column, so
    /// the allocated cells form a forest of positive-flow arcs. The smallest
    /// node of each component is joined to the root.
    fn initial_basis(&mut self) {
        let (m, n) = (self.m, self.n);
        let tol = T::pivot_tolerance();
        let mut order: Vec<usize> = (0..m * n).collect();
        let costs = self.problem.costs();
        order.sort_by(|&a, &b| {
            costs[a]
                .partial_cmp(&costs[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });

        let mut supply: Vec<T> = self.problem.supplies().to_vec();
        let mut demand: Vec<T> = self.problem.demands().to_vec();
        let mut components = UnionFind::new(m + n);
        for &c in &order {
            let (i, j) = (c / n, c % n);
            if supply[i] <= tol || demand[j] <= tol {
                continue;
            }
            let amount = if supply[i] <= demand[j] {
                let a = supply[i].clone();
                demand[j] = demand[j].clone() - a.clone();
                supply[i] = T::zero();
                a
            } else {
                let a = demand[j].clone();
                supply[i] = supply[i].clone() - a.clone();
                demand[j] = T::zero();
                a
            };
            self.flow[c] = amount;
            self.link(c);
            let joined = components.union(i, m + j);
            debug_assert!(joined, "least-cost allocation closed a cycle");
        }
        for v in 0..m + n {
            if components.find(v) == v {
                self.link(m * n + v);
            }
        }
        let root = self.root();
        self.depth[root] = 0;
        self.hang(root, usize::MAX);
    }

    /// Recomputes parent, depth and potential for the subtree below `top`,
    /// whose own entries must already be set. `top` reaches its parent
    /// through `via`, which is not descended into.
    fn hang(&mut self, top: usize, via: usize) {
        let mut stack = vec![(top, via)];
        while let Some((v, up)) = stack.pop() {
            for k in 0..self.adjacent[v].len() {
                let arc = self.adjacent[v][k];
                if arc == up {
                    continue;
                }
                let (t, h) = (self.tail(arc), self.head(arc));
                let (child, potential) = if t == v {
                    (h, self.potential[v].clone() + self.cost(arc))
                } else {
                    (t, self.potential[v].clone() - self.cost(arc))
                };
                self.parent[child] = v;
                self.parent_arc[child] = arc;
                self.depth[child] = self.depth[v] + 1;
                self.potential[child] = potential;
                stack.push((child, arc));
            }
        }
    }

    fn reduced_cost(&self, c: usize) -> T {
        let (i, j) = (c / self.n, c % self.n);
        self.problem.costs()[c].clone() + self.potential[i].clone() - self.potential[self.m + j].clone()
    }

    fn entering(&mut self) -> Option<usize> {
        let cells = self.m * self.n;
        let threshold = T::zero() - T::pivot_tolerance();
        let mut best: Option<(usize, T)> = None;
        let mut scanned = 0;
        for step in 0..cells {
            let c = (self.next + step) % cells;
            if !self.basic[c] {
                let reduced = self.reduced_cost(c);
                if reduced < threshold && best.as_ref().is_none_or(|(_, r)| reduced < *r) {
                    best = Some((c, reduced));
                }
            }
            scanned += 1;
            if scanned == self.block && best.is_some() {
                self.next = (c + 1) % cells;
                break;
            }
            if scanned == self.block {
                scanned = 0;
            }
        }
        best.map(|(c, _)| c)
    }

    fn apex(&self, mut a: usize, mut b: usize) -> usize {
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        a
    }

    /// Pushes flow around the cycle closed by `entering` and swaps the
    /// leaving arc out of the tree.
    fn pivot(&mut self, entering: usize) -> Result<()> {
        let (from, to) = (self.tail(entering), self.head(entering));
        let apex = self.apex(from, to);
        // Flow goes down the tree from the apex to `from`, across the
        // entering arc, then up from `to` back to the apex. On the way down
        // an arc loses flow when it points up; on the way up, when it
        // points down.
        let mut theta: Option<T> = None;
        for (start, down) in [(from, true), (to, false)] {
            let mut x = start;
            while x != apex {
                let arc = self.parent_arc[x];
                if (self.tail(arc) == x) == down && theta.as_ref().is_none_or(|t| self.flow[arc] < *t) {
                    theta = Some(self.flow[arc].clone());
                }
                x = self.parent[x];
            }
        }
        let theta = theta.ok_or_else(|| Error::Solver("pivot cycle has no decreasing arc".into()))?;

        // last blocking arc from the apex: nearest the apex on the way up,
        // otherwise nearest `from` on the way down
        let blocking = |s: &Self, x: usize, down: bool| {
            let arc = s.parent_arc[x];
            (s.tail(arc) == x) == down && s.flow[arc] == theta
        };
        let mut leaving = None;
        let mut x = to;
        while x != apex {
            if blocking(self, x, false) {
                leaving = Some((x, false));
            }
            x = self.parent[x];
        }
        if leaving.is_none() {
            let mut x = from;
            while x != apex {
                if blocking(self, x, true) {
                    leaving = Some((x, true));
                    break;
                }
                x = self.parent[x];
            }
        }
        let (cut, down) = leaving.expect("theta is attained on the cycle");

        if !theta.is_zero() {
            for (start, down) in [(from, true), (to, false)] {
                let mut x = start;
                while x != apex {
                    let arc = self.parent_arc[x];
                    let f = self.flow[arc].clone();
                    self.flow[arc] = if (self.tail(arc) == x) == down { f - theta.clone() } else { f + theta.clone() };
                    x = self.parent[x];
                }
            }
            self.flow[entering] = theta;
        }
        let leave = self.parent_arc[cut];
        self.flow[leave] = T::zero();
        self.unlink(leave);
        self.link(entering);

        // the side of the entering arc below the cut is re-hung from the other
        let (inner, outer) = if down { (from, to) } else { (to, from) };
        self.parent[inner] = outer;
        self.parent_arc[inner] = entering;
        self.depth[inner] = self.depth[outer] + 1;
        self.potential[inner] = if inner == from {
            self.potential[outer].clone() - self.cost(entering)
        } else {
            self.potential[outer].clone() + self.cost(entering)
        };
        self.hang(inner, entering);
        Ok(())
    }

    fn run(mut self) -> Result<TransportPlan<T>> {
        let (m, n) = (self.m, self.n);
        let max_pivots = 50 * (m * n + m + n) + 1000;
        let mut pivots = 0;
        while let Some(entering) = self.entering() {
            if pivots == max_pivots {
                return Err(Error::Solver(format!(
                    "no optimality certificate after {pivots} pivots"
                )));
            }
            pivots += 1;
            self.pivot(entering)?;
        }
        self.into_plan(pivots)
    }

    fn into_plan(self, pivots: usize) -> Result<TransportPlan<T>> {
        let (m, n) = (self.m, self.n);
        let mut flows = Vec::new();
        for c in 0..m * n {
            if self.flow[c] > T::zero() {
                flows.push((c / n, c % n, self.flow[c].clone()));
            }
        }
        let plan = TransportPlan {
            objective: self.problem.objective_of(&flows),
            flows,
            pivots,
        };
        let tol = T::feasibility_tolerance();
        let rows = plan.row_sums(m);
        let cols = plan.column_sums(n);
        let balanced = rows
            .iter()
            .zip(self.problem.supplies())
            .chain(cols.iter().zip(self.problem.demands()))
            .all(|(got, want)| approx_eq(got, want, &tol));
        if !balanced {
            return Err(Error::Solver("optimal basis violates the marginals".into()));
        }
        Ok(plan)
    }
}


/// Minimal-cost reallocation for a balanced transport problem.
///
/// Deterministic for a given input. Fails with [`Error::Solver`] rather than
/// returning a plan it cannot certify as optimal and feasible.
pub fn solve<T: Scalar>(problem: &TransportProblem<T>) -> Result<TransportPlan<T>> {
    Solver::new(problem).run()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn ratio(n: u64, d: u64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn single_cell() {
        let p = TransportProblem::new(vec![1.0], vec![1.0], vec![0.3]).unwrap();
        let plan = solve(&p).unwrap();
        assert_eq!(plan.flows, vec![(0, 0, 1.0)]);
        assert_eq!(plan.objective, 0.3);
    }

    #[test]
    fn identity_is_free() {
        let costs = vec![0.0, 1.0, 0.5, 1.0, 0.0, 0.25, 0.5, 0.25, 0.0];
        let third = 1.0 / 3.0;
        let p = TransportProblem::new(vec![third; 3], vec![third; 3], costs).unwrap();
        let plan = solve(&p).unwrap();
        assert_eq!(plan.objective, 0.0);
        assert_eq!(plan.flows.iter().map(|f| (f.0, f.1)).collect::<Vec<_>>(), [(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn least_cost_start_is_improved() {
        // greedy takes the 0 cell first and pays 1.0 for the rest;
        // optimum routes both halves at 0.4 and 0.1
        let costs = vec![
            ratio(0, 1), ratio(2, 5),
            ratio(1, 10), ratio(1, 1),
        ];
        let half = ratio(1, 2);
        let p = TransportProblem::new(vec![half.clone(), half.clone()], vec![half.clone(), half], costs).unwrap();
        let plan = solve(&p).unwrap();
        assert_eq!(plan.objective, ratio(1, 4));
        assert!(plan.flows.len() <= 3);
    }

    #[test]
    fn degenerate_square() {
        // equal masses make every least-cost step exhaust a row and a column
        let n = 6;
        let mass = Exact::from_ratio(1, n as u64);
        let mut costs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                costs.push(Exact::from_ratio(((i + j) % n) as u64, n as u64));
            }
        }
        let p = TransportProblem::new(vec![mass.clone(); n], vec![mass; n], costs).unwrap();
        let plan = solve(&p).unwrap();
        assert_eq!(plan.objective, Exact::from_ratio(0, 1));
        assert!(plan.flows.len() < 2 * n);
    }
}
