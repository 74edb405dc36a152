use std::collections::HashSet;

use super::{CollapseSequence, CollapseStep, Face, FaceComplex};
use crate::error::{input, Result};

#[derive(Debug, Clone)]
pub enum OracleOutcome<T> {
    /// Some valid collapse onto the target.
    Found(CollapseSequence<T>),
    /// The whole search space was explored without reaching the target.
    Exhausted,
    /// The node budget ran out first; nothing is known.
    Indeterminate,
}

impl<T> OracleOutcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, OracleOutcome::Found(_))
    }
}

struct Search<'a, T> {
    fc: &'a FaceComplex<T>,
    protected: Vec<bool>,
    alive: Vec<bool>,
    cofaces: Vec<usize>,
    remaining: usize,
    goal: usize,
    path: Vec<(usize, usize)>,
    dead: HashSet<Vec<u64>>,
    nodes: usize,
    budget: usize,
}

impl<T: Face> Search<'_, T> {
    fn state(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.alive.len().div_ceil(64)];
        for (i, &a) in self.alive.iter().enumerate() {
            if a {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }

    fn candidates(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for lo in 0..self.fc.len() {
            if !self.alive[lo] || self.protected[lo] || self.cofaces[lo] != 1 {
                continue;
            }
            let hi = *self.fc.cofacets_of(lo).iter().find(|&&c| self.alive[c]).unwrap();
            if !self.protected[hi] && self.cofaces[hi] == 0 {
                out.push((lo, hi));
            }
        }
        out
    }

    fn set(&mut self, lo: usize, hi: usize, present: bool) {
        for idx in [hi, lo] {
            self.alive[idx] = present;
            for &g in self.fc.facets_of(idx) {
                if present {
                    self.cofaces[g] += 1;
                } else {
                    self.cofaces[g] -= 1;
                }
            }
        }
        if present {
            self.remaining += 2;
        } else {
            self.remaining -= 2;
        }
    }

    /// `Some(true)` found, `Some(false)` exhausted below this node, `None` out of budget.
    fn dfs(&mut self) -> Option<bool> {
        if self.remaining == self.goal {
            return Some(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let key = self.state();
        if self.dead.contains(&key) {
            return Some(false);
        }
        for (lo, hi) in self.candidates() {
            self.set(lo, hi, false);
            self.path.push((lo, hi));
            match self.dfs() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.path.pop();
            self.set(lo, hi, true);
        }
        self.dead.insert(key);
        Some(false)
    }
}

/// Depth-first search for any collapse of `start` onto `target`.
///
/// Dead states are memoized, so an exhaustive negative answer is reached
/// quickly on small inputs. `budget` bounds the number of search nodes.
pub fn greedy_oracle<T: Face>(start: &FaceComplex<T>, target: &[T], budget: usize) -> Result<OracleOutcome<T>> {
    let mut protected = vec![false; start.len()];
    for t in target {
        match start.index_of(t) {
            Some(i) => protected[i] = true,
            None => return input(format!("target cell {t} is not in the start complex")),
        }
    }
    for (i, c) in start.cells().iter().enumerate() {
        if protected[i] && start.facets_of(i).iter().any(|&f| !protected[f]) {
            return input(format!("target is not closed under faces at {c}"));
        }
    }
    let goal = protected.iter().filter(|p| **p).count();
    if !(start.len() - goal).is_multiple_of(2) {
        return Ok(OracleOutcome::Exhausted);
    }
    let mut s = Search {
        fc: start,
        protected,
        alive: vec![true; start.len()],
        cofaces: (0..start.len()).map(|i| start.cofacets_of(i).len()).collect(),
        remaining: start.len(),
        goal,
        path: Vec::new(),
        dead: HashSet::new(),
        nodes: 0,
        budget,
    };
    Ok(match s.dfs() {
        Some(true) => OracleOutcome::Found(CollapseSequence {
            start: "oracle-start".into(),
            finish: "oracle-target".into(),
            steps: s
                .path
                .iter()
                .map(|&(lo, hi)| CollapseStep {
                    free_face: start.cells()[lo].clone(),
                    cofacet: start.cells()[hi].clone(),
                })
                .collect(),
        }),
        Some(false) => OracleOutcome::Exhausted,
        None => OracleOutcome::Indeterminate,
    })
}
