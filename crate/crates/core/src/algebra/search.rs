//! Backtracking search for algebra structures.
//!
//! The unknowns are the cells `h(t)`, `t ∈ TX`. Each `c = λs.(σ_s, t_s)` in
//! `TTX` contributes the constraint `h(λs.(σ_s, h(t_s))) = h(μ(c))`; once all
//! `t_s` are assigned, both sides name concrete cells and the constraint
//! becomes an equality between two cells. Equalities between unassigned
//! cells are kept as edges and fire when either end is assigned.

use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::state_monad::StateMonadCtx;

const NONE: u32 = u32::MAX;

enum Trail {
    Assign(usize),
    Edge(usize, usize),
}

struct Solver {
    n: usize,
    carrier: usize,
    /// `(σ_s, t_s)` per state, flattened; `target` is `μ(c)`.
    sigma: Vec<u32>,
    inner: Vec<u32>,
    target: Vec<u32>,
    by_inner: Vec<Vec<u32>>,
    tx_radix: Vec<usize>,
    h: Vec<u32>,
    edges: Vec<Vec<u32>>,
    trail: Vec<Trail>,
    queue: Vec<usize>,
    work: u128,
    ceiling: u64,
}

impl Solver {
    fn charge(&mut self, units: u128) -> Result<()> {
        self.work += units;
        if self.work > self.ceiling as u128 {
            return Err(Error::CeilingExceeded {
                work: self.work,
                ceiling: self.ceiling,
            });
        }
        Ok(())
    }

    /// `Ok(false)` on contradiction.
    fn assign(&mut self, cell: usize, value: u32) -> Result<bool> {
        match self.h[cell] {
            NONE => {
                self.h[cell] = value;
                self.trail.push(Trail::Assign(cell));
                self.queue.push(cell);
                Ok(true)
            }
            v => Ok(v == value),
        }
    }

    fn enforce_eq(&mut self, a: usize, b: usize) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        match (self.h[a], self.h[b]) {
            (NONE, NONE) => {
                self.edges[a].push(b as u32);
                self.edges[b].push(a as u32);
                self.trail.push(Trail::Edge(a, b));
                Ok(true)
            }
            (NONE, v) => self.assign(a, v),
            (v, NONE) => self.assign(b, v),
            (u, v) => Ok(u == v),
        }
    }

    fn propagate(&mut self) -> Result<bool> {
        while let Some(cell) = self.queue.pop() {
            let value = self.h[cell];
            for i in 0..self.edges[cell].len() {
                let other = self.edges[cell][i] as usize;
                if !self.assign(other, value)? {
                    self.queue.clear();
                    return Ok(false);
                }
            }
            let watchers = self.by_inner[cell].len();
            self.charge(watchers as u128 + 1)?;
            for i in 0..watchers {
                let c = self.by_inner[cell][i] as usize;
                let base = c * self.n;
                let mut lhs = 0;
                let mut ready = true;
                for s in 0..self.n {
                    let v = self.h[self.inner[base + s] as usize];
                    if v == NONE {
                        ready = false;
                        break;
                    }
                    lhs += (self.sigma[base + s] as usize * self.carrier + v as usize)
                        * self.tx_radix[s];
                }
                if ready && !self.enforce_eq(lhs, self.target[c] as usize)? {
                    self.queue.clear();
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("nonempty") {
                Trail::Assign(cell) => self.h[cell] = NONE,
                Trail::Edge(a, b) => {
                    self.edges[a].pop();
                    self.edges[b].pop();
                }
            }
        }
    }

    fn search(&mut self, order: &[usize], pos: usize, out: &mut Vec<Vec<usize>>) -> Result<()> {
        let Some(offset) = order[pos..].iter().position(|&c| self.h[c] == NONE) else {
            out.push(self.h.iter().map(|&v| v as usize).collect());
            return Ok(());
        };
        let cell = order[pos + offset];
        for value in 0..self.carrier as u32 {
            self.charge(1)?;
            let mark = self.trail.len();
            if self.assign(cell, value)? && self.propagate()? {
                self.search(order, pos + offset + 1, out)?;
            }
            self.undo_to(mark);
        }
        Ok(())
    }
}

/// Structure tables of every algebra on `x`, found by search. Candidates are
/// re-validated by the caller.
pub(super) fn constrained(ctx: &StateMonadCtx, x: FinSet, ceiling: u64) -> Result<Vec<Vec<usize>>> {
    let tx = ctx.t(x)?;
    let cells = tx.object().size();
    if cells == 0 {
        return Ok(vec![Vec::new()]);
    }
    // One constraint per element of TTX.
    let n = ctx.states().size();
    let constraints = (n as u128 * cells as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    let setup = constraints.saturating_mul(n as u128);
    if setup > ceiling as u128 || cells > u32::MAX as usize - 1 {
        return Err(Error::CeilingExceeded {
            work: setup,
            ceiling,
        });
    }
    let ttx = ctx.t(tx.object())?;
    let total = constraints as usize;
    let mut sigma = Vec::with_capacity(total * n);
    let mut inner = Vec::with_capacity(total * n);
    let mut target = Vec::with_capacity(total);
    let mut by_inner = vec![Vec::new(); cells];
    for c in 0..total {
        for s in 0..n {
            let (st, t) = ttx.at(c, s);
            sigma.push(st as u32);
            inner.push(t as u32);
            // A cell repeated across states only needs one watch entry.
            if by_inner[t].last() != Some(&(c as u32)) {
                by_inner[t].push(c as u32);
            }
        }
        target.push(ctx.mu_at(&ttx, &tx, c) as u32);
    }
    let pair_radix = tx.pair().object().size();
    let tx_radix = (0..n).map(|s| pair_radix.pow(s as u32)).collect();

    let mut solver = Solver {
        n,
        carrier: x.size(),
        sigma,
        inner,
        target,
        by_inner,
        tx_radix,
        h: vec![NONE; cells],
        edges: vec![Vec::new(); cells],
        trail: Vec::new(),
        queue: Vec::new(),
        work: setup,
        ceiling,
    };
    let mut out = Vec::new();
    let mut consistent = true;
    for v in x.elements() {
        consistent &= solver.assign(ctx.eta_at(&tx, v), v as u32)?;
    }
    if consistent && solver.propagate()? {
        // Constant cells λs.(s', x) first.
        let mut order: Vec<usize> = Vec::with_capacity(cells);
        let mut seen = vec![false; cells];
        for st in 0..n {
            for v in x.elements() {
                let g = tx.encode_fn(|_| (st, v));
                if !seen[g] {
                    seen[g] = true;
                    order.push(g);
                }
            }
        }
        // Then the diagonal cells λs.(s, g(s)); associativity forces every
        // other cell from these two families.
        let power = ctx.power(x)?;
        for g in power.object().elements() {
            let d = tx.encode_fn(|s| (s, power.digit(g, s)));
            if !seen[d] {
                seen[d] = true;
                order.push(d);
            }
        }
        order.extend((0..cells).filter(|&c| !seen[c]));
        solver.search(&order, 0, &mut out)?;
    }
    out.sort();
    Ok(out)
}
