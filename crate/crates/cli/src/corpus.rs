//! Complexes and maps used by the acceptance suite.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::sync::Arc;

use nabla_kit::poset::{order_complex, Poset};
use nabla_kit::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn relabel(mask: u32, perm: &[usize]) -> u32 {
    perm.iter().enumerate().filter(|&(i, _)| mask & (1 << i) != 0).fold(0, |acc, (_, &j)| acc | (1 << j))
}

fn canonical(family: &[u32], perms: &[Vec<usize>]) -> Vec<u32> {
    perms
        .iter()
        .map(|p| {
            let mut f: Vec<u32> = family.iter().map(|&m| relabel(m, p)).collect();
            f.sort_unstable();
            f
        })
        .min()
        .expect("at least one permutation")
}

/// One complex per isomorphism class among the nonempty complexes on at most
/// `v` vertices, vertices numbered from 0, sorted by size and then by label.
pub fn small_complexes(v: usize) -> Vec<SimplicialComplex> {
    let perms = permutations(v);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::from([Vec::new()]);
    let mut classes = Vec::new();
    while let Some(fam) = queue.pop_front() {
        let present: HashSet<u32> = fam.iter().copied().collect();
        for mask in 1u32..(1 << v) {
            if present.contains(&mask) {
                continue;
            }
            let closed = (0..v).filter(|i| mask & (1 << i) != 0).all(|i| {
                let f = mask & !(1 << i);
                f == 0 || present.contains(&f)
            });
            if !closed {
                continue;
            }
            let mut next = fam.clone();
            next.push(mask);
            let c = canonical(&next, &perms);
            if seen.insert(c.clone()) {
                classes.push(c.clone());
                queue.push_back(c);
            }
        }
    }
    classes.sort_by_key(|f| (f.len(), f.clone()));
    classes.iter().map(|f| from_masks(f)).collect()
}

fn from_masks(family: &[u32]) -> SimplicialComplex {
    let used: u32 = family.iter().fold(0, |a, m| a | m);
    let index: Vec<u32> = (0..32).map(|i| (used & ((1u32 << i) - 1)).count_ones()).collect();
    SimplicialComplex::from_generators(
        family.iter().map(|&m| Simplex::from_vertex_set((0..32).filter(|i| m & (1 << i) != 0).map(|i| index[i]))),
    )
}

/// Closure of `gens` random simplexes of dimension at most `max_dim` on `verts` vertices.
pub fn random_complex<R: Rng>(rng: &mut R, verts: u32, max_dim: usize, gens: usize) -> SimplicialComplex {
    let all: Vec<u32> = (0..verts).collect();
    let mut out = Vec::new();
    for _ in 0..gens.max(1) {
        let d = rng.gen_range(0..=max_dim.min(verts as usize - 1));
        out.push(Simplex::from_vertex_set(all.choose_multiple(rng, d + 1).copied()));
    }
    SimplicialComplex::from_generators(out)
}

/// Random vertex images into `target`; the source is cut down to the
/// simplexes of `source` whose images are simplexes.
pub fn random_map<R: Rng>(rng: &mut R, source: &SimplicialComplex, target: &Arc<SimplicialComplex>) -> SimplicialMap {
    let tv: Vec<VertexId> = target.vertices().collect();
    let assignment: BTreeMap<VertexId, VertexId> = source.vertices().map(|v| (v, *tv.choose(rng).unwrap())).collect();
    let image = |s: &Simplex| Simplex::from_vertex_set(s.vertices().iter().map(|v| assignment[v]));
    let kept = source.filter(|s| target.contains(&image(s)));
    SimplicialMap::new(Arc::new(kept), target.clone(), assignment).expect("filtered source maps simplicially")
}

pub fn constant_map(source: &Arc<SimplicialComplex>, target: &Arc<SimplicialComplex>) -> SimplicialMap {
    let w = target.vertices().next().expect("nonempty target");
    SimplicialMap::new(source.clone(), target.clone(), source.vertices().map(|v| (v, w)).collect())
        .expect("constant maps are simplicial")
}

/// Closure of a random nonempty set of maximal simplexes of `k`.
pub fn random_subcomplex<R: Rng>(rng: &mut R, k: &SimplicialComplex) -> SimplicialComplex {
    let maxes = k.maximal_simplexes();
    let take = rng.gen_range(1..=maxes.len());
    SimplicialComplex::from_generators(maxes.choose_multiple(rng, take).cloned())
}

/// A triangulated dunce hat: the order complex of a regular cell structure
/// with one vertex-edge loop glued three times around a disk.
pub fn dunce_hat() -> SimplicialComplex {
    // cells 0..=2 vertices, 3..=10 edges, 11..=16 triangles, by facet lists
    let facets: [&[usize]; 17] = [
        &[],
        &[],
        &[],
        &[0, 1],
        &[1, 0],
        &[0, 2],
        &[0, 2],
        &[0, 2],
        &[1, 2],
        &[1, 2],
        &[1, 2],
        &[3, 8, 5],
        &[4, 8, 6],
        &[3, 9, 6],
        &[4, 9, 7],
        &[3, 10, 5],
        &[4, 10, 7],
    ];
    let below = |top: usize| {
        let mut seen = vec![top];
        let mut i = 0;
        while i < seen.len() {
            for &f in facets[seen[i]] {
                if !seen.contains(&f) {
                    seen.push(f);
                }
            }
            i += 1;
        }
        seen
    };
    let closure: Vec<Vec<usize>> = (0..facets.len()).map(below).collect();
    order_complex(&Poset::from_relation((0..facets.len()).collect(), |a: &usize, b: &usize| closure[*b].contains(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_on_few_vertices() {
        // a point; two points or an edge
        assert_eq!(small_complexes(1).len(), 1);
        assert_eq!(small_complexes(2).len(), 3);
        // on three vertices: 1 + 2 + 5 classes by vertex count
        assert_eq!(small_complexes(3).len(), 8);
    }

    #[test]
    fn class_counts_match_monotone_boolean_functions() {
        // monotone Boolean functions of 4 and 5 variables fall into 30 and 210
        // classes under permutation; they match the down-closed set families,
        // two of which ({} and {∅}) have no vertex
        assert_eq!(small_complexes(4).len(), 28);
        assert_eq!(small_complexes(5).len(), 208);
    }

    #[test]
    fn classes_are_pairwise_non_isomorphic() {
        let perms = permutations(4);
        let cs = small_complexes(4);
        let forms: HashSet<Vec<u32>> = cs
            .iter()
            .map(|k| {
                let masks: Vec<u32> =
                    k.simplexes().iter().map(|s| s.vertices().iter().fold(0, |a, v| a | (1 << v.0))).collect();
                canonical(&masks, &perms)
            })
            .collect();
        assert_eq!(forms.len(), cs.len());
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(5).len(), 120);
    }
}
