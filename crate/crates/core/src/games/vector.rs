use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relstruct::{Elem, Structure};

/// Pebbles placed per round, `(p_1, ..., p_r)` with `r >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GameVector(Vec<usize>);

impl GameVector {
    pub fn new(rounds: Vec<usize>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::Argument("a game vector needs at least one round".into()));
        }
        Ok(GameVector(rounds))
    }

    /// `n` rounds of one pebble each.
    pub fn unary(n: usize) -> Result<Self> {
        GameVector::new(vec![1; n])
    }

    pub fn rounds(&self) -> usize {
        self.0.len()
    }

    pub fn pebbles(&self) -> usize {
        self.0.iter().sum()
    }

    /// Pebbles of round `i`, counted from 1.
    pub fn p(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// The first `len` rounds.
    pub fn prefix(&self, len: usize) -> GameVector {
        GameVector(self.0[..len].to_vec())
    }
}

impl TryFrom<Vec<usize>> for GameVector {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        GameVector::new(v)
    }
}

impl From<GameVector> for Vec<usize> {
    fn from(v: GameVector) -> Vec<usize> {
        v.0
    }
}

impl FromStr for GameVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rounds = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad game vector `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        GameVector::new(rounds)
    }
}

impl fmt::Display for GameVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A chain `C_1 ⊆ ... ⊆ C_m` whose growth per step respects a game vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetVector(Vec<Vec<Elem>>);

impl SetVector {
    /// Checks the chain against `v`; sets are sorted on the way in.
    pub fn new(mut chain: Vec<Vec<Elem>>, v: &GameVector) -> Result<Self> {
        if chain.is_empty() || chain.len() > v.rounds() {
            return Err(Error::Argument(format!(
                "a set vector of {} has between 1 and {} entries",
                v,
                v.rounds()
            )));
        }
        for c in &mut chain {
            c.sort_unstable();
            c.dedup();
        }
        if chain[0].len() > v.p(1) {
            return Err(Error::Argument("first set exceeds p_1".into()));
        }
        for i in 1..chain.len() {
            let (prev, next) = (&chain[i - 1], &chain[i]);
            if !prev.iter().all(|x| next.binary_search(x).is_ok()) {
                return Err(Error::Argument("set vector is not a chain".into()));
            }
            if next.len() - prev.len() > v.p(i + 1) {
                return Err(Error::Argument(format!("step {} grows by more than p_{}", i + 1, i + 1)));
            }
        }
        Ok(SetVector(chain))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sets(&self) -> &[Vec<Elem>] {
        &self.0
    }

    pub fn last(&self) -> &[Elem] {
        self.0.last().expect("nonempty")
    }

    /// Length of the shortest prefix whose last set contains `a`.
    pub fn first_index(&self, a: Elem) -> Option<usize> {
        self.0.iter().position(|c| c.binary_search(&a).is_ok()).map(|i| i + 1)
    }

    /// The shortest prefix whose last set contains `a`.
    pub fn prefix_for(&self, a: Elem) -> Option<SetVector> {
        self.first_index(a).map(|i| SetVector(self.0[..i].to_vec()))
    }

    pub fn parent(&self) -> Option<SetVector> {
        (self.0.len() > 1).then(|| SetVector(self.0[..self.0.len() - 1].to_vec()))
    }

    /// Renders as `{a}|{a,b}` using the element names of `a`.
    pub fn render(&self, a: &Structure) -> String {
        self.0
            .iter()
            .map(|c| {
                let names: Vec<&str> = c.iter().map(|&e| a.name(e)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Subsets of `pool` (sorted) of size at most `max`, by size then
/// lexicographically.
pub(crate) fn subsets_up_to(pool: &[Elem], max: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max.min(pool.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| pool[i]).collect());
            let Some(pos) = (0..size).rev().find(|&j| idx[j] < pool.len() - size + j) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Every set vector of `v` over a universe of `n` elements, parents before
/// children; fails once more than `limit` vectors exist.
pub fn set_vectors(n: usize, v: &GameVector, limit: usize) -> Result<Vec<SetVector>> {
    let all: Vec<Elem> = (0..n as Elem).collect();
    let mut out: Vec<SetVector> = subsets_up_to(&all, v.p(1)).into_iter().map(|c| SetVector(vec![c])).collect();
    let mut level_start = 0;
    for round in 2..=v.rounds() {
        let level_end = out.len();
        for i in level_start..level_end {
            let last = out[i].last().to_vec();
            let rest: Vec<Elem> = all.iter().copied().filter(|x| last.binary_search(x).is_err()).collect();
            for add in subsets_up_to(&rest, v.p(round)) {
                let mut next = last.clone();
                next.extend(add);
                next.sort_unstable();
                let mut chain = out[i].0.clone();
                chain.push(next);
                out.push(SetVector(chain));
                crate::error::guard("number of set vectors", out.len(), limit)?;
            }
        }
        level_start = level_end;
    }
    crate::error::guard("number of set vectors", out.len(), limit)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let v: GameVector = "1, 1,2".parse().unwrap();
        assert_eq!(v.as_slice(), &[1, 1, 2]);
        assert_eq!((v.rounds(), v.pebbles()), (3, 4));
        assert_eq!(v.to_string(), "1,1,2");
        assert!("".parse::<GameVector>().is_err());
        assert!("1,x".parse::<GameVector>().is_err());
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1,1,2]");
    }

    #[test]
    fn subset_enumeration() {
        let s = subsets_up_to(&[0, 1, 2], 2);
        assert_eq!(s, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets_up_to(&[], 3), vec![Vec::<Elem>::new()]);
    }

    #[test]
    fn counting_set_vectors() {
        let v = GameVector::new(vec![1]).unwrap();
        assert_eq!(set_vectors(2, &v, 100).unwrap().len(), 3);
        let v = GameVector::new(vec![1, 1]).unwrap();
        // 1 + 2 roots; {} has 3 children, {0} and {1} have 2 each.
        assert_eq!(set_vectors(2, &v, 100).unwrap().len(), 3 + 3 + 2 + 2);
        assert!(set_vectors(6, &GameVector::new(vec![3, 3]).unwrap(), 10).is_err());
    }

    #[test]
    fn set_vector_checks() {
        let v = GameVector::new(vec![1, 1]).unwrap();
        assert!(SetVector::new(vec![vec![0], vec![0, 1]], &v).is_ok());
        assert!(SetVector::new(vec![vec![0, 1]], &v).is_err());
        assert!(SetVector::new(vec![vec![0], vec![1]], &v).is_err());
        let s = SetVector::new(vec![vec![0], vec![0, 1]], &v).unwrap();
        assert_eq!(s.first_index(1), Some(2));
        assert_eq!(s.prefix_for(0).unwrap().len(), 1);
    }
}
