#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use nabla_kit::complex::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
use nabla_kit::poset::{order_complex, Poset};
use rand::seq::SliceRandom;
use rand::Rng;

/// Closure of `gens` random simplexes of dimension at most `max_dim` on `verts` vertices.
pub fn random_complex<R: Rng>(rng: &mut R, verts: u32, max_dim: usize, gens: usize) -> SimplicialComplex {
    let all: Vec<u32> = (0..verts).collect();
    let mut out = Vec::new();
    for _ in 0..gens.max(1) {
        let d = rng.gen_range(0..=max_dim.min(verts as usize - 1));
        let pick: Vec<u32> = all.choose_multiple(rng, d + 1).copied().collect();
        out.push(Simplex::from_vertex_set(pick));
    }
    SimplicialComplex::from_generators(out)
}

/// A random simplicial map into `target`: random vertex images, with the
/// source cut down to the simplexes whose images land in `target`.
pub fn random_map<R: Rng>(rng: &mut R, source: &SimplicialComplex, target: &Arc<SimplicialComplex>) -> SimplicialMap {
    let tv: Vec<VertexId> = target.vertices().collect();
    let assignment: BTreeMap<VertexId, VertexId> = source.vertices().map(|v| (v, *tv.choose(rng).unwrap())).collect();
    let image = |s: &Simplex| Simplex::from_vertex_set(s.vertices().iter().map(|v| assignment[v]));
    let kept = source.filter(|s| target.contains(&image(s)));
    SimplicialMap::new(Arc::new(kept), target.clone(), assignment).expect("filtered source maps simplicially")
}

pub fn constant_map(source: &Arc<SimplicialComplex>, target: &Arc<SimplicialComplex>) -> SimplicialMap {
    let w = target.vertices().next().unwrap();
    SimplicialMap::new(source.clone(), target.clone(), source.vertices().map(|v| (v, w)).collect()).unwrap()
}

/// Ranks over the two-element field by Gaussian elimination on bit rows.
pub fn rank_mod2(rows: usize, columns: &[Vec<(usize, i64)>]) -> usize {
    let words = rows.div_ceil(64).max(1);
    let mut vecs: Vec<Vec<u64>> = columns
        .iter()
        .map(|col| {
            let mut v = vec![0u64; words];
            for &(r, x) in col {
                if x % 2 != 0 {
                    v[r / 64] ^= 1 << (r % 64);
                }
            }
            v
        })
        .collect();
    let mut rank = 0;
    for bit in 0..rows {
        let (w, b) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..vecs.len()).find(|&i| vecs[i][w] & b != 0) else { continue };
        vecs.swap(rank, p);
        let pivot = vecs[rank].clone();
        for (i, v) in vecs.iter_mut().enumerate() {
            if i != rank && v[w] & b != 0 {
                for (x, y) in v.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers over the two-element field.
pub fn betti_mod2(k: &SimplicialComplex) -> Vec<usize> {
    let ms = nabla_kit::homology::boundary_matrices(k);
    let f = k.f_vector();
    let ranks: Vec<usize> = ms.iter().map(|m| rank_mod2(m.rows, &m.columns)).collect();
    let rank = |d: usize| if d == 0 || d > ranks.len() { 0 } else { ranks[d - 1] };
    (0..f.len()).map(|d| f[d] - rank(d) - rank(d + 1)).collect()
}

/// The 6-vertex projective plane.
pub fn rp2() -> SimplicialComplex {
    let tris: [[u32; 3]; 10] =
        [[1, 2, 4], [1, 2, 6], [1, 3, 5], [1, 3, 6], [1, 4, 5], [2, 3, 4], [2, 3, 5], [2, 5, 6], [3, 4, 6], [4, 5, 6]];
    SimplicialComplex::from_generators(tris.iter().map(|t| Simplex::from_vertex_set(t.iter().copied())))
}

/// A dunce hat: the order complex of the face poset of a regular cell
/// structure on the triangle with boundary word `a a a⁻¹`.
pub fn dunce_hat() -> SimplicialComplex {
    // 0 v, 1 b, 2 c; edges 3..=10; triangles 11..=16 (see facet lists)
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
    let poset = Poset::from_relation((0..facets.len()).collect(), |a: &usize, b: &usize| closure[*b].contains(a));
    order_complex(&poset)
}
