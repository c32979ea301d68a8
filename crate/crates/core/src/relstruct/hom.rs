//! Backtracking homomorphism search.
//!
//! Variables are the source elements in canonical order and values are tried
//! in canonical order, so the first solution found is the lexicographically
//! least one. Generalized arc consistency is maintained after every choice;
//! it only removes values that occur in no solution, so it does not change
//! which solution is found first.

use std::collections::VecDeque;

use crate::error::Result;
use crate::limits::Budget;

use super::ops::component_sets;
use super::structure::{Elem, Structure};

/// Result of a budgeted search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    NotFound,
    BudgetExceeded,
}

impl<T> Outcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_found(self) -> Option<T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    /// Turns budget exhaustion into an error and the rest into an option.
    pub fn decided(self, budget: Budget) -> Result<Option<T>> {
        match self {
            Outcome::Found(t) => Ok(Some(t)),
            Outcome::NotFound => Ok(None),
            Outcome::BudgetExceeded => Err(crate::Error::Budget(budget.0)),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Found(t) => Outcome::Found(f(t)),
            Outcome::NotFound => Outcome::NotFound,
            Outcome::BudgetExceeded => Outcome::BudgetExceeded,
        }
    }
}

/// Searches for a homomorphism `a -> b`; returns the lexicographically least
/// witness as a vector indexed by the elements of `a`.
pub fn find_hom(a: &Structure, b: &Structure, budget: Budget) -> Result<Outcome<Vec<Elem>>> {
    a.same_vocabulary(b)?;
    Ok(Search::new(a, b, None, false, budget).solve_by_components(a))
}

/// Like [`find_hom`] but treats budget exhaustion as an error.
pub fn hom_exists(a: &Structure, b: &Structure, budget: Budget) -> Result<bool> {
    Ok(find_hom(a, b, budget)?.decided(budget)?.is_some())
}

/// Searches for a homomorphism whose value on each source element lies in
/// the given candidate list.
pub fn find_hom_within(
    a: &Structure,
    b: &Structure,
    candidates: &[Vec<Elem>],
    injective: bool,
    budget: Budget,
) -> Result<Outcome<Vec<Elem>>> {
    a.same_vocabulary(b)?;
    let mut s = Search::new(a, b, Some(candidates), injective, budget);
    if injective {
        let order: Vec<Elem> = a.elements().collect();
        Ok(s.solve_order(&order))
    } else {
        Ok(s.solve_by_components(a))
    }
}

/// Calls `visit` on every homomorphism `a -> b` in lexicographic order until
/// it returns `false`. Returns `false` if the budget ran out.
pub fn for_each_hom(
    a: &Structure,
    b: &Structure,
    budget: Budget,
    mut visit: impl FnMut(&[Elem]) -> bool,
) -> Result<bool> {
    a.same_vocabulary(b)?;
    let mut s = Search::new(a, b, None, false, budget);
    let order: Vec<Elem> = a.elements().collect();
    let Some(doms) = s.initial() else {
        return Ok(true);
    };
    let mut stop = false;
    s.enumerate(doms, &order, 0, &mut |sol| {
        if !visit(sol) {
            stop = true;
        }
        !stop
    });
    Ok(!s.exhausted)
}

struct Table {
    arity: usize,
    data: Vec<Elem>,
    /// `by_pos[p][v]` lists the tuples with value `v` at position `p`.
    by_pos: Vec<Vec<Vec<u32>>>,
}

struct Constraint {
    table: usize,
    scope: Vec<Elem>,
    eq_pairs: Vec<(usize, usize)>,
}

struct Search {
    n: usize,
    m: usize,
    words: usize,
    tables: Vec<Table>,
    cons: Vec<Constraint>,
    by_var: Vec<Vec<usize>>,
    unary: Vec<(Elem, Vec<u64>)>,
    injective: bool,
    steps: u64,
    budget: u64,
    exhausted: bool,
    empty_image: bool,
}

type Doms = Vec<u64>;

impl Search {
    fn new(
        a: &Structure,
        b: &Structure,
        candidates: Option<&[Vec<Elem>]>,
        injective: bool,
        budget: Budget,
    ) -> Search {
        let n = a.len();
        let m = b.len();
        let words = m.div_ceil(64).max(1);
        let mut tables = Vec::new();
        let mut cons = Vec::new();
        let mut unary = Vec::new();
        for (sym, ra) in a.relations() {
            if ra.is_empty() {
                continue;
            }
            let rb = b.relation(sym).expect("same vocabulary");
            if rb.arity() == 1 {
                let mut bits = vec![0u64; words];
                for t in rb.iter() {
                    bits[t[0] as usize / 64] |= 1 << (t[0] % 64);
                }
                for t in ra.iter() {
                    unary.push((t[0], bits.clone()));
                }
                continue;
            }
            let mut by_pos = vec![vec![Vec::new(); m]; rb.arity()];
            for (i, t) in rb.iter().enumerate() {
                for (p, &v) in t.iter().enumerate() {
                    by_pos[p][v as usize].push(i as u32);
                }
            }
            let table = tables.len();
            tables.push(Table {
                arity: rb.arity(),
                data: rb.iter().flatten().copied().collect(),
                by_pos,
            });
            for t in ra.iter() {
                let mut eq_pairs = Vec::new();
                for i in 0..t.len() {
                    for j in i + 1..t.len() {
                        if t[i] == t[j] {
                            eq_pairs.push((i, j));
                        }
                    }
                }
                cons.push(Constraint {
                    table,
                    scope: t.to_vec(),
                    eq_pairs,
                });
            }
        }
        let mut by_var = vec![Vec::new(); n];
        for (ci, c) in cons.iter().enumerate() {
            let mut vs = c.scope.clone();
            vs.sort_unstable();
            vs.dedup();
            for v in vs {
                by_var[v as usize].push(ci);
            }
        }
        let mut s = Search {
            n,
            m,
            words,
            tables,
            cons,
            by_var,
            unary,
            injective,
            steps: 0,
            budget: budget.0,
            exhausted: false,
            empty_image: false,
        };
        if let Some(c) = candidates {
            for (x, list) in c.iter().enumerate() {
                let mut bits = vec![0u64; words];
                for &v in list {
                    if (v as usize) < m {
                        bits[v as usize / 64] |= 1 << (v % 64);
                    }
                }
                s.unary.push((x as Elem, bits));
            }
        }
        if m == 0 {
            s.empty_image = true;
        }
        s
    }

    fn has(&self, d: &Doms, x: usize, v: usize) -> bool {
        d[x * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    fn remove(&self, d: &mut Doms, x: usize, v: usize) {
        d[x * self.words + v / 64] &= !(1u64 << (v % 64));
    }

    fn values(&self, d: &Doms, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for w in 0..self.words {
            let mut bits = d[x * self.words + w];
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                out.push(w * 64 + t);
                bits &= bits - 1;
            }
        }
        out
    }

    fn is_empty(&self, d: &Doms, x: usize) -> bool {
        d[x * self.words..(x + 1) * self.words].iter().all(|&w| w == 0)
    }

    /// Full domains filtered by unary constraints and made arc consistent.
    fn initial(&mut self) -> Option<Doms> {
        if self.empty_image {
            return if self.n == 0 { Some(Vec::new()) } else { None };
        }
        let mut d = vec![0u64; self.n * self.words];
        for x in 0..self.n {
            for v in 0..self.m {
                d[x * self.words + v / 64] |= 1 << (v % 64);
            }
        }
        for (x, bits) in &self.unary {
            for (w, b) in bits.iter().enumerate() {
                d[*x as usize * self.words + w] &= b;
            }
        }
        if (0..self.n).any(|x| self.is_empty(&d, x)) {
            return None;
        }
        let all: Vec<usize> = (0..self.cons.len()).collect();
        self.propagate(&mut d, all).then_some(d)
    }

    fn supported(&self, d: &Doms, c: &Constraint, pos: usize, v: usize) -> bool {
        let t = &self.tables[c.table];
        'rows: for &row in &t.by_pos[pos][v] {
            let tuple = &t.data[row as usize * t.arity..(row as usize + 1) * t.arity];
            for &(i, j) in &c.eq_pairs {
                if tuple[i] != tuple[j] {
                    continue 'rows;
                }
            }
            for (l, &x) in c.scope.iter().enumerate() {
                if l != pos && !self.has(d, x as usize, tuple[l] as usize) {
                    continue 'rows;
                }
            }
            return true;
        }
        false
    }

    fn propagate(&self, d: &mut Doms, start: Vec<usize>) -> bool {
        let mut queued = vec![false; self.cons.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for c in start {
            if !queued[c] {
                queued[c] = true;
                queue.push_back(c);
            }
        }
        while let Some(ci) = queue.pop_front() {
            queued[ci] = false;
            let c = &self.cons[ci];
            for pos in 0..c.scope.len() {
                let x = c.scope[pos] as usize;
                if c.scope[..pos].contains(&c.scope[pos]) {
                    continue;
                }
                let mut changed = false;
                for v in self.values(d, x) {
                    if !self.supported(d, c, pos, v) {
                        self.remove(d, x, v);
                        changed = true;
                    }
                }
                if changed {
                    if self.is_empty(d, x) {
                        return false;
                    }
                    for &cj in &self.by_var[x] {
                        if !queued[cj] {
                            queued[cj] = true;
                            queue.push_back(cj);
                        }
                    }
                }
            }
        }
        true
    }

    /// Fixes `x := v` and propagates; `None` on a wipeout.
    fn assign(&self, d: &Doms, x: usize, v: usize) -> Option<Doms> {
        let mut d2 = d.clone();
        for w in 0..self.words {
            d2[x * self.words + w] = 0;
        }
        d2[x * self.words + v / 64] |= 1 << (v % 64);
        let mut touched: Vec<usize> = self.by_var[x].clone();
        if self.injective {
            for y in 0..self.n {
                if y != x && self.has(&d2, y, v) {
                    self.remove(&mut d2, y, v);
                    if self.is_empty(&d2, y) {
                        return None;
                    }
                    touched.extend_from_slice(&self.by_var[y]);
                }
            }
        }
        self.propagate(&mut d2, touched).then_some(d2)
    }

    fn tick(&mut self) -> bool {
        self.steps += 1;
        if self.steps > self.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    /// Depth-first search over `order[k..]`; `visit` returns whether to go on.
    fn enumerate(
        &mut self,
        d: Doms,
        order: &[Elem],
        k: usize,
        visit: &mut dyn FnMut(&[Elem]) -> bool,
    ) -> bool {
        if k == order.len() {
            let sol: Vec<Elem> = (0..self.n)
                .map(|x| self.values(&d, x).first().copied().unwrap_or(0) as Elem)
                .collect();
            return visit(&sol);
        }
        let x = order[k] as usize;
        for v in self.values(&d, x) {
            if !self.tick() {
                return false;
            }
            if let Some(d2) = self.assign(&d, x, v) {
                if !self.enumerate(d2, order, k + 1, visit) {
                    return false;
                }
            }
        }
        true
    }

    fn first(&mut self, d: Doms, order: &[Elem]) -> Option<Doms> {
        self.first_rec(d, order, 0)
    }

    fn first_rec(&mut self, d: Doms, order: &[Elem], k: usize) -> Option<Doms> {
        if k == order.len() {
            return Some(d);
        }
        let x = order[k] as usize;
        for v in self.values(&d, x) {
            if !self.tick() {
                return None;
            }
            if let Some(d2) = self.assign(&d, x, v) {
                if let Some(r) = self.first_rec(d2, order, k + 1) {
                    return Some(r);
                }
                if self.exhausted {
                    return None;
                }
            }
        }
        None
    }

    fn solve_order(&mut self, order: &[Elem]) -> Outcome<Vec<Elem>> {
        let Some(d) = self.initial() else {
            return Outcome::NotFound;
        };
        match self.first(d, order) {
            Some(d) => Outcome::Found(self.read(&d)),
            None if self.exhausted => Outcome::BudgetExceeded,
            None => Outcome::NotFound,
        }
    }

    fn solve_by_components(&mut self, a: &Structure) -> Outcome<Vec<Elem>> {
        let Some(mut d) = self.initial() else {
            return Outcome::NotFound;
        };
        for comp in component_sets(a) {
            match self.first(d.clone(), &comp) {
                Some(done) => {
                    for &x in &comp {
                        let x = x as usize;
                        d[x * self.words..(x + 1) * self.words]
                            .copy_from_slice(&done[x * self.words..(x + 1) * self.words]);
                    }
                }
                None if self.exhausted => return Outcome::BudgetExceeded,
                None => return Outcome::NotFound,
            }
        }
        Outcome::Found(self.read(&d))
    }

    fn read(&self, d: &Doms) -> Vec<Elem> {
        (0..self.n)
            .map(|x| self.values(d, x)[0] as Elem)
            .collect()
    }
}
