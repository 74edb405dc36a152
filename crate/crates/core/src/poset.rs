//! Finite posets, order complexes and barycentric subdivision.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::complex::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
use crate::error::{input, Result};

/// A finite poset stored as strict up-sets.
///
/// Element `i` becomes vertex `i` of the order complex, so the element order
/// is the relabeling order.
#[derive(Debug, Clone)]
pub struct Poset<T> {
    elements: Vec<T>,
    /// `above[i]`: sorted indices `j` with `i < j`.
    above: Vec<Vec<usize>>,
}

impl<T> Poset<T> {
    /// Builds the poset by evaluating `leq` on every ordered pair.
    pub fn from_relation<F: Fn(&T, &T) -> bool>(elements: Vec<T>, leq: F) -> Self {
        let above = (0..elements.len())
            .map(|i| (0..elements.len()).filter(|&j| j != i && leq(&elements[i], &elements[j])).collect())
            .collect();
        Poset { elements, above }
    }

    pub(crate) fn from_up_sets(elements: Vec<T>, above: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(elements.len(), above.len());
        Poset { elements, above }
    }

    /// The chain `0 < 1 < … < len-1`.
    pub fn chain(len: usize) -> Poset<usize> {
        Poset { elements: (0..len).collect(), above: (0..len).map(|i| (i + 1..len).collect()).collect() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn strictly_above(&self, i: usize) -> &[usize] {
        &self.above[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.above[i].binary_search(&j).is_ok()
    }

    /// Exhaustive check of reflexivity, antisymmetry and transitivity.
    pub fn check_axioms(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for &j in &self.above[i] {
                if j == i || self.leq(j, i) {
                    return false;
                }
                if self.above[j].iter().any(|&k| !self.leq(i, k)) {
                    return false;
                }
            }
        }
        true
    }

    /// Every chain, each listed in increasing order.
    pub fn chains(&self, budget: &Budget) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.len() {
            stack.push(start);
            self.extend_chains(&mut stack, &mut out, budget)?;
            stack.pop();
        }
        Ok(out)
    }

    fn extend_chains(&self, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, budget: &Budget) -> Result<()> {
        out.push(stack.clone());
        budget.tick(out.len(), "chain enumeration")?;
        let last = *stack.last().unwrap();
        for &next in &self.above[last] {
            stack.push(next);
            self.extend_chains(stack, out, budget)?;
            stack.pop();
        }
        Ok(())
    }
}

/// A monotone map between two posets, given by element indices.
#[derive(Debug, Clone)]
pub struct MonotoneMap<'a, S, T> {
    pub source: &'a Poset<S>,
    pub target: &'a Poset<T>,
    pub assignment: Vec<usize>,
}

impl<S, T> MonotoneMap<'_, S, T> {
    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn is_monotone(&self) -> bool {
        (0..self.source.len()).all(|i| {
            self.source.strictly_above(i).iter().all(|&j| self.target.leq(self.assignment[i], self.assignment[j]))
        })
    }

    /// Strict monotonicity along every comparable pair.
    pub fn is_strictly_monotone(&self) -> bool {
        (0..self.source.len()).all(|i| {
            self.source.strictly_above(i).iter().all(|&j| {
                let (a, b) = (self.assignment[i], self.assignment[j]);
                a != b && self.target.leq(a, b)
            })
        })
    }
}

/// The poset of nonempty simplexes ordered by inclusion.
///
/// Element `i` is the `i`-th simplex of `k` in canonical order.
pub fn face_poset(k: &SimplicialComplex) -> Result<Poset<Simplex>> {
    if k.is_empty() {
        return input("the face poset of the empty complex is not defined");
    }
    let mut above: Vec<Vec<usize>> = vec![Vec::new(); k.len()];
    for (i, s) in k.simplexes().iter().enumerate() {
        for f in s.faces() {
            if f.len() < s.len() {
                above[k.index_of(&f).expect("closed complex")].push(i);
            }
        }
    }
    for a in &mut above {
        a.sort_unstable();
    }
    Ok(Poset::from_up_sets(k.simplexes().to_vec(), above))
}

/// Simplicial complex of chains, on vertices `0..P.len()`.
pub fn order_complex<T>(p: &Poset<T>) -> SimplicialComplex {
    order_complex_with_budget(p, &Budget::UNLIMITED).expect("unlimited budget")
}

pub fn order_complex_with_budget<T>(p: &Poset<T>, budget: &Budget) -> Result<SimplicialComplex> {
    let chains = p.chains(budget)?;
    let family = chains
        .into_iter()
        .map(|c| {
            let mut vs: Vec<VertexId> = c.into_iter().map(|i| VertexId(i as u32)).collect();
            vs.sort_unstable();
            Simplex::from_sorted_unchecked(vs)
        })
        .collect();
    Ok(SimplicialComplex::from_closed_family(family))
}

/// The barycentric subdivision together with its label table.
///
/// Vertex `i` of the subdivision is the `i`-th simplex of the base complex.
#[derive(Debug, Clone)]
pub struct Barycentric {
    pub base: Arc<SimplicialComplex>,
    pub complex: Arc<SimplicialComplex>,
}

impl Barycentric {
    pub fn label(&self, v: VertexId) -> &Simplex {
        &self.base.simplexes()[v.0 as usize]
    }

    pub fn vertex_of(&self, s: &Simplex) -> Option<VertexId> {
        self.base.index_of(s).map(|i| VertexId(i as u32))
    }

    /// The chain of base simplexes spanning a simplex of the subdivision.
    pub fn flag(&self, s: &Simplex) -> Vec<&Simplex> {
        s.vertices().iter().map(|v| self.label(*v)).collect()
    }
}

pub fn barycentric(k: &SimplicialComplex) -> Result<Barycentric> {
    barycentric_with_budget(k, &Budget::UNLIMITED)
}

pub fn barycentric_with_budget(k: &SimplicialComplex, budget: &Budget) -> Result<Barycentric> {
    let p = face_poset(k)?;
    let complex = order_complex_with_budget(&p, budget)?;
    Ok(Barycentric { base: Arc::new(k.clone()), complex: Arc::new(complex) })
}

/// The dimension function on the face poset, into the chain `0 < … < dim K`.
pub fn dim_map<'a>(fp: &'a Poset<Simplex>, chain: &'a Poset<usize>) -> Result<MonotoneMap<'a, Simplex, usize>> {
    let top = fp.elements().iter().map(Simplex::dim).max().unwrap_or(0);
    if chain.len() <= top {
        return input(format!("target chain has {} elements, need {}", chain.len(), top + 1));
    }
    Ok(MonotoneMap { source: fp, target: chain, assignment: fp.elements().iter().map(Simplex::dim).collect() })
}

/// The map of barycentric subdivisions sending the vertex `σ` to `f(σ)`.
pub fn induced_bary_map(f: &SimplicialMap) -> Result<SimplicialMap> {
    let src = barycentric(f.source())?;
    let tgt = barycentric(f.target())?;
    Ok(induced_bary_map_between(f, &src, &tgt))
}

pub(crate) fn induced_bary_map_between(f: &SimplicialMap, src: &Barycentric, tgt: &Barycentric) -> SimplicialMap {
    let assignment: BTreeMap<VertexId, VertexId> = src
        .base
        .simplexes()
        .iter()
        .enumerate()
        .map(|(i, s)| (VertexId(i as u32), tgt.vertex_of(&f.image(s)).expect("image is a target simplex")))
        .collect();
    SimplicialMap::new_unchecked(src.complex.clone(), tgt.complex.clone(), assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex;

    #[test]
    fn edge_face_poset() {
        let p = face_poset(&complex(&[&[0, 1]])).unwrap();
        assert_eq!(p.len(), 3);
        // {0} and {1} below {0,1}
        assert_eq!(p.strictly_above(0), &[2]);
        assert_eq!(p.strictly_above(1), &[2]);
        assert!(p.strictly_above(2).is_empty());
        assert!(p.check_axioms());
    }

    #[test]
    fn face_poset_rejects_empty() {
        assert!(face_poset(&SimplicialComplex::empty()).is_err());
        assert_eq!(face_poset(&complex(&[&[5]])).unwrap().len(), 1);
    }

    #[test]
    fn chain_and_antichain_order_complexes() {
        let delta3 = order_complex(&Poset::<usize>::chain(4));
        assert_eq!(delta3, complex(&[&[0, 1, 2, 3]]));
        let anti = Poset::from_relation(vec!['a', 'b', 'c'], |a, b| a == b);
        let k = order_complex(&anti);
        assert_eq!(k.len(), 3);
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn small_barycentric_subdivisions() {
        let e = barycentric(&complex(&[&[0, 1]])).unwrap();
        assert_eq!(e.complex.f_vector(), vec![3, 2]);
        let t = barycentric(&complex(&[&[0, 1, 2]])).unwrap();
        assert_eq!(t.complex.f_vector(), vec![7, 12, 6]);
        let p = barycentric(&complex(&[&[3]])).unwrap();
        assert_eq!(p.complex.f_vector(), vec![1]);
    }

    #[test]
    fn dimension_map_is_strictly_monotone() {
        let k = complex(&[&[0, 1, 2], &[2, 3]]);
        let fp = face_poset(&k).unwrap();
        let chain = Poset::<usize>::chain(3);
        let d = dim_map(&fp, &chain).unwrap();
        assert!(d.is_monotone());
        assert!(d.is_strictly_monotone());
        let top = fp.elements().iter().position(|s| s.len() == 3).unwrap();
        assert_eq!(d.apply(top), 2);
        assert!(dim_map(&fp, &Poset::<usize>::chain(2)).is_err());
    }
}
