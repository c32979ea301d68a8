use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{guard, Error, Result};
use crate::limits::{Budget, Limits};
use crate::relstruct::{is_partial_hom, Elem, PartialHom, Relation, Structure};

use super::vector::{subsets_up_to, GameVector};

/// Per-round sets `W_1, ..., W_r` of partial homomorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StrategyTable {
    rounds: Vec<Vec<PartialHom>>,
}

impl StrategyTable {
    /// Sorts and deduplicates each round.
    pub fn new(rounds: Vec<Vec<PartialHom>>) -> Self {
        StrategyTable {
            rounds: rounds
                .into_iter()
                .map(|w| w.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
                .collect(),
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    /// `W_i`, counted from 1.
    pub fn round(&self, i: usize) -> &[PartialHom] {
        &self.rounds[i - 1]
    }

    pub fn len(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The first map in `W_i` with domain exactly `dom` extending `base`.
    pub fn find(&self, i: usize, dom: &[Elem], base: Option<&PartialHom>) -> Option<&PartialHom> {
        self.round(i).iter().find(|g| {
            g.len() == dom.len()
                && g.domain().zip(dom).all(|(x, &y)| x == y)
                && base.map_or(true, |b| g.extends(b))
        })
    }

    pub fn to_named(&self, a: &Structure, b: &Structure) -> NamedStrategy {
        NamedStrategy {
            rounds: self
                .rounds
                .iter()
                .map(|w| w.iter().map(|g| g.named(a, b)).collect())
                .collect(),
        }
    }
}

/// Name-level rendering of a [`StrategyTable`].
#[derive(Debug, Clone, Serialize)]
pub struct NamedStrategy {
    pub rounds: Vec<Vec<BTreeMap<String, String>>>,
}

/// Result of solving a pebble game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The maps reachable when Duplicator always answers with the first
    /// winning extension in canonical order.
    Duplicator(StrategyTable),
    /// Spoiler already wins the game cut after this many rounds.
    Spoiler { round: usize },
}

impl Verdict {
    pub fn duplicator_wins(&self) -> bool {
        matches!(self, Verdict::Duplicator(_))
    }

    pub fn strategy(&self) -> Option<&StrategyTable> {
        match self {
            Verdict::Duplicator(w) => Some(w),
            Verdict::Spoiler { .. } => None,
        }
    }
}

type Dense = Vec<Option<Elem>>;

struct Game<'a> {
    a: &'a Structure,
    b: &'a Structure,
    v: &'a [usize],
    tuples: Vec<(&'a [Elem], &'a Relation)>,
    touching: Vec<Vec<usize>>,
    memo: HashMap<(usize, Dense), bool>,
    steps: u64,
    budget: Budget,
}

impl<'a> Game<'a> {
    fn new(a: &'a Structure, b: &'a Structure, v: &'a [usize], budget: Budget) -> Self {
        let mut tuples = Vec::new();
        let mut touching = vec![Vec::new(); a.len()];
        for (s, r) in a.relations() {
            let rb = b.relation(s).expect("same vocabulary");
            for t in r.iter() {
                for &x in t {
                    if touching[x as usize].last() != Some(&tuples.len()) {
                        touching[x as usize].push(tuples.len());
                    }
                }
                tuples.push((t, rb));
            }
        }
        Game {
            a,
            b,
            v,
            tuples,
            touching,
            memo: HashMap::new(),
            steps: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget.0 {
            Err(Error::Budget(self.budget.0))
        } else {
            Ok(())
        }
    }

    fn consistent(&self, g: &Dense, x: Elem) -> bool {
        let mut buf = Vec::new();
        'tuples: for &ti in &self.touching[x as usize] {
            let (t, rb) = self.tuples[ti];
            buf.clear();
            for &e in t {
                match g[e as usize] {
                    Some(y) => buf.push(y),
                    None => continue 'tuples,
                }
            }
            if !rb.contains(&buf) {
                return false;
            }
        }
        true
    }

    fn free(&self, g: &Dense) -> Vec<Elem> {
        self.a.elements().filter(|&x| g[x as usize].is_none()).collect()
    }

    /// First extension of `g` to `new` (in lexicographic order of images)
    /// that wins from round `round`.
    fn first_winning(&mut self, round: usize, g: &mut Dense, new: &[Elem]) -> Result<Option<Dense>> {
        let Some((&x, rest)) = new.split_first() else {
            return Ok(if self.wins_from(round, g)? { Some(g.clone()) } else { None });
        };
        for y in self.b.elements() {
            self.tick()?;
            g[x as usize] = Some(y);
            if self.consistent(g, x) {
                if let Some(w) = self.first_winning(round, g, rest)? {
                    g[x as usize] = None;
                    return Ok(Some(w));
                }
            }
        }
        g[x as usize] = None;
        Ok(None)
    }

    /// Whether Duplicator, holding `g` as a member of `W_round`, survives the
    /// remaining rounds.
    fn wins_from(&mut self, round: usize, g: &Dense) -> Result<bool> {
        if round == self.v.len() {
            return Ok(true);
        }
        if let Some(&w) = self.memo.get(&(round, g.clone())) {
            return Ok(w);
        }
        let free = self.free(g);
        let mut win = true;
        for new in subsets_up_to(&free, self.v[round]) {
            let mut h = g.clone();
            if self.first_winning(round + 1, &mut h, &new)?.is_none() {
                win = false;
                break;
            }
        }
        self.memo.insert((round, g.clone()), win);
        Ok(win)
    }

    fn opening(&mut self) -> Result<Option<Vec<Dense>>> {
        let all: Vec<Elem> = self.a.elements().collect();
        let mut out = Vec::new();
        for s in subsets_up_to(&all, self.v[0]) {
            let mut g = vec![None; self.a.len()];
            match self.first_winning(1, &mut g, &s)? {
                Some(w) => out.push(w),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    fn table(&mut self, opening: Vec<Dense>) -> Result<StrategyTable> {
        let mut rounds = vec![opening];
        for round in 1..self.v.len() {
            let mut next = BTreeSet::new();
            for g in rounds[round - 1].clone() {
                for new in subsets_up_to(&self.free(&g), self.v[round]) {
                    let mut h = g.clone();
                    let w = self
                        .first_winning(round + 1, &mut h, &new)?
                        .ok_or_else(|| Error::Internal("winning position without a winning answer".into()))?;
                    next.insert(w);
                }
            }
            rounds.push(next.into_iter().collect());
        }
        Ok(StrategyTable::new(
            rounds
                .into_iter()
                .map(|w| w.iter().map(|g| to_partial(g)).collect())
                .collect(),
        ))
    }
}

fn to_partial(g: &Dense) -> PartialHom {
    g.iter()
        .enumerate()
        .filter_map(|(x, y)| y.map(|y| (x as Elem, y)))
        .collect()
}

/// Solves the `v`-game on `(a, b)` by memoized AND-OR search over positions.
pub fn duplicator_wins(a: &Structure, b: &Structure, v: &GameVector, limits: &Limits) -> Result<Verdict> {
    a.same_vocabulary(b)?;
    guard("total pebble count", v.pebbles(), limits.pebbles)?;
    let rounds = v.as_slice();
    let mut game = Game::new(a, b, rounds, limits.hom_budget);
    if let Some(opening) = game.opening()? {
        return Ok(Verdict::Duplicator(game.table(opening)?));
    }
    for len in 1..=rounds.len() {
        let mut g = Game::new(a, b, &rounds[..len], limits.hom_budget);
        if g.opening()?.is_none() {
            return Ok(Verdict::Spoiler { round: len });
        }
    }
    Err(Error::Internal("game lost but every prefix is won".into()))
}

/// Whether `w` is a Duplicator winning strategy for the `v`-game on `(a, b)`.
pub fn is_winning_strategy(a: &Structure, b: &Structure, v: &GameVector, w: &StrategyTable) -> Result<bool> {
    a.same_vocabulary(b)?;
    if w.rounds() != v.rounds() {
        return Ok(false);
    }
    for i in 1..=w.rounds() {
        for g in w.round(i) {
            if !is_partial_hom(a, b, g)? {
                return Ok(false);
            }
        }
    }
    let all: Vec<Elem> = a.elements().collect();
    for s in subsets_up_to(&all, v.p(1)) {
        if w.find(1, &s, None).is_none() {
            return Ok(false);
        }
    }
    for i in 1..w.rounds() {
        for g in w.round(i) {
            let dom: Vec<Elem> = g.domain().collect();
            let free: Vec<Elem> = all.iter().copied().filter(|x| dom.binary_search(x).is_err()).collect();
            for new in subsets_up_to(&free, v.p(i + 1)) {
                let mut s = dom.clone();
                s.extend(new);
                s.sort_unstable();
                if w.find(i + 1, &s, Some(g)).is_none() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
