//! Elementary-collapse certificates: construction, replay and an
//! independent search oracle.

mod engine;
mod oracle;
mod replay;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::cells::{Cell, CellComplexRQ};
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{input, Error, Result};

pub use engine::{
    collapse_hat, collapse_hat_with_budget, collapse_q, collapse_q_onto, collapse_q_with_budget, filter_to_subcomplex,
    removal_partner, HatCollapse,
};
pub use oracle::{greedy_oracle, OracleOutcome};
pub use replay::{validate_sequence, StepFailure, ValidationReport};

/// Anything that can appear in a face-closed complex: simplexes and cells.
pub trait Face: Clone + Ord + Hash + fmt::Display + FromStr<Err = Error> {
    fn dim(&self) -> usize;
    fn facets(&self) -> Vec<Self>;
}

impl Face for Simplex {
    fn dim(&self) -> usize {
        Simplex::dim(self)
    }
    fn facets(&self) -> Vec<Self> {
        Simplex::facets(self)
    }
}

impl Face for Cell {
    fn dim(&self) -> usize {
        Cell::dim(self)
    }
    fn facets(&self) -> Vec<Self> {
        Cell::facets(self)
    }
}

/// A finite face-closed family with facet/cofacet incidences.
#[derive(Debug, Clone)]
pub struct FaceComplex<T> {
    cells: Vec<T>,
    index: HashMap<T, usize>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
}

impl<T: Face> FaceComplex<T> {
    /// Fails if some facet of a member is missing.
    pub fn new<I: IntoIterator<Item = T>>(cells: I) -> Result<Self> {
        let mut cells: Vec<T> = cells.into_iter().collect();
        cells.sort();
        cells.dedup();
        let index: HashMap<T, usize> = cells.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut facets = Vec::with_capacity(cells.len());
        let mut cofacets = vec![Vec::new(); cells.len()];
        for (i, c) in cells.iter().enumerate() {
            let mut fs = Vec::new();
            for f in c.facets() {
                match index.get(&f) {
                    Some(&j) => {
                        fs.push(j);
                        cofacets[j].push(i);
                    }
                    None => return input(format!("not closed under faces: facet {f} of {c} is missing")),
                }
            }
            facets.push(fs);
        }
        Ok(FaceComplex { cells, index, facets, cofacets })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn index_of(&self, c: &T) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn facets_of(&self, i: usize) -> &[usize] {
        &self.facets[i]
    }

    pub fn cofacets_of(&self, i: usize) -> &[usize] {
        &self.cofacets[i]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if c.dim() % 2 == 0 { 1 } else { -1 }).sum()
    }
}

impl FaceComplex<Simplex> {
    pub fn from_simplicial(k: &SimplicialComplex) -> Self {
        FaceComplex::new(k.simplexes().iter().cloned()).expect("simplicial complexes are closed")
    }
}

impl FaceComplex<Cell> {
    pub fn from_cells(c: &CellComplexRQ) -> Self {
        FaceComplex::new(c.cells.iter().cloned()).expect("enumerated cell complexes are closed")
    }
}

/// One elementary collapse: remove `free_face` together with its only coface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseStep<T> {
    pub free_face: T,
    pub cofacet: T,
}

/// An ordered list of elementary collapses from `start` to `finish`.
///
/// `start` and `finish` are descriptors naming the complexes, such as
/// `Q(1,3)` or `hat(n=2,K=…)`; they carry no structure of their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseSequence<T> {
    pub start: String,
    pub finish: String,
    pub steps: Vec<CollapseStep<T>>,
}

impl<T: Face> CollapseSequence<T> {
    pub fn empty(start: impl Into<String>, finish: impl Into<String>) -> Self {
        CollapseSequence { start: start.into(), finish: finish.into(), steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
