//! The non-degenerate resolution of a simplicial complex.
//!
//! Vertices of `K♭ ⊠ Δⁿ` are pairs `(σ, j)` of a simplex of `K` and a level
//! `j ∈ [0, n]`, ordered componentwise. The resolution `K̂ⁿ` keeps exactly the
//! chains whose levels are pairwise distinct, i.e. the simplexes that project
//! non-degenerately onto `Δⁿ`.
//!
//! Vertex numbering is `index(σ) · (n + 1) + j`, where `index(σ)` is the
//! canonical position of `σ` in `K` (equivalently, its vertex id in `K♭`).
//! Along any chain both coordinates are weakly increasing and at least one
//! strictly, so sorted vertex ids list a chain in poset order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::budget::Budget;
use crate::complex::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
use crate::error::{input, parameter, Result};
use crate::poset::{barycentric_with_budget, face_poset, induced_bary_map_between, Barycentric, Poset};

/// A vertex `(σ, level)` of the product triangulation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResolutionVertex {
    pub base: Simplex,
    pub level: u32,
}

impl fmt::Display for ResolutionVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.base.vertices().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, " @ {})", self.level)
    }
}

fn vertex_id(base_index: usize, level: u32, n: u32) -> VertexId {
    VertexId(base_index as u32 * (n + 1) + level)
}

/// Enumerates chains of `FP(K) × [n]`; `strict` demands strictly increasing levels.
fn product_chains(fp: &Poset<Simplex>, n: u32, strict: bool, budget: &Budget) -> Result<Vec<Simplex>> {
    struct Walk<'a> {
        fp: &'a Poset<Simplex>,
        n: u32,
        strict: bool,
        budget: &'a Budget,
        out: Vec<Simplex>,
        stack: Vec<VertexId>,
    }
    impl Walk<'_> {
        fn go(&mut self, elem: usize, level: u32) -> Result<()> {
            self.stack.push(vertex_id(elem, level, self.n));
            self.out.push(Simplex::from_sorted_unchecked(self.stack.clone()));
            self.budget.tick(self.out.len(), "product chain enumeration")?;
            // same base simplex, higher level
            for l in level + 1..=self.n {
                self.go(elem, l)?;
            }
            let first = if self.strict { level + 1 } else { level };
            for idx in 0..self.fp.strictly_above(elem).len() {
                let next = self.fp.strictly_above(elem)[idx];
                for l in first..=self.n {
                    self.go(next, l)?;
                }
            }
            self.stack.pop();
            Ok(())
        }
    }
    let mut w = Walk { fp, n, strict, budget, out: Vec::new(), stack: Vec::new() };
    for e in 0..fp.len() {
        for l in 0..=n {
            w.go(e, l)?;
        }
    }
    Ok(w.out)
}

/// Order complex of the product poset `FP(K) × [n]`.
pub fn boxtimes(k: &SimplicialComplex, n: u32) -> Result<SimplicialComplex> {
    boxtimes_with_budget(k, n, &Budget::UNLIMITED)
}

pub fn boxtimes_with_budget(k: &SimplicialComplex, n: u32, budget: &Budget) -> Result<SimplicialComplex> {
    let fp = face_poset(k)?;
    Ok(SimplicialComplex::from_closed_family(product_chains(&fp, n, false, budget)?))
}

/// `K̂ⁿ` together with the embedding `e` and projection `p`.
#[derive(Debug)]
pub struct Resolution {
    base: Arc<SimplicialComplex>,
    n: u32,
    bary: Barycentric,
    hat: Arc<SimplicialComplex>,
    embed: SimplicialMap,
    project: SimplicialMap,
    boxtimes: OnceLock<Arc<SimplicialComplex>>,
}

pub fn resolve(k: &SimplicialComplex, n: u32) -> Result<Resolution> {
    resolve_with_budget(k, n, &Budget::UNLIMITED)
}

pub fn resolve_with_budget(k: &SimplicialComplex, n: u32, budget: &Budget) -> Result<Resolution> {
    if k.is_empty() {
        return input("cannot resolve the empty complex");
    }
    if k.dim() > n as isize {
        return parameter(format!("dim K = {} exceeds the resolution parameter n = {n}", k.dim()));
    }
    let fp = face_poset(k)?;
    let bary = barycentric_with_budget(k, budget)?;
    let hat = Arc::new(SimplicialComplex::from_closed_family(product_chains(&fp, n, true, budget)?));
    budget.check(hat.len(), "resolution")?;

    let embed_assign: BTreeMap<VertexId, VertexId> =
        k.simplexes().iter().enumerate().map(|(i, s)| (VertexId(i as u32), vertex_id(i, s.dim() as u32, n))).collect();
    let embed = SimplicialMap::new_unchecked(bary.complex.clone(), hat.clone(), embed_assign);
    let project_assign = hat.vertices().map(|v| (v, VertexId(v.0 / (n + 1)))).collect();
    let project = SimplicialMap::new_unchecked(hat.clone(), bary.complex.clone(), project_assign);

    Ok(Resolution { base: Arc::new(k.clone()), n, bary, hat, embed, project, boxtimes: OnceLock::new() })
}

impl Resolution {
    pub fn base(&self) -> &Arc<SimplicialComplex> {
        &self.base
    }

    pub fn parameter(&self) -> u32 {
        self.n
    }

    pub fn bary(&self) -> &Barycentric {
        &self.bary
    }

    pub fn hat(&self) -> &Arc<SimplicialComplex> {
        &self.hat
    }

    pub fn embed(&self) -> &SimplicialMap {
        &self.embed
    }

    pub fn project(&self) -> &SimplicialMap {
        &self.project
    }

    /// The full product triangulation, built on first use.
    pub fn boxtimes(&self) -> &Arc<SimplicialComplex> {
        self.boxtimes.get_or_init(|| Arc::new(boxtimes(&self.base, self.n).expect("base is nonempty")))
    }

    pub fn vertex_label(&self, v: VertexId) -> ResolutionVertex {
        let np1 = self.n + 1;
        ResolutionVertex { base: self.base.simplexes()[(v.0 / np1) as usize].clone(), level: v.0 % np1 }
    }

    pub fn vertex_of(&self, base: &Simplex, level: u32) -> Option<VertexId> {
        if level > self.n {
            return None;
        }
        self.base.index_of(base).map(|i| vertex_id(i, level, self.n))
    }

    /// The level coordinates of a hat (or boxtimes) simplex, in vertex order.
    pub fn levels(&self, s: &Simplex) -> Vec<u32> {
        s.vertices().iter().map(|v| v.0 % (self.n + 1)).collect()
    }

    /// `e(K♭)` as a subcomplex of the resolution.
    pub fn embed_image(&self) -> SimplicialComplex {
        self.embed.image_subcomplex()
    }

    /// Simplexes of the resolution lying over a subcomplex `L ⊆ K` with levels `≤ max_level`.
    ///
    /// With `max_level = n` this is `L̂ⁿ` inside `K̂ⁿ`, in this resolution's labels.
    pub fn over_subcomplex(&self, l: &SimplicialComplex, max_level: u32) -> Result<SimplicialComplex> {
        if !l.is_subcomplex_of(&self.base) {
            return input("not a subcomplex of the base complex");
        }
        let np1 = self.n + 1;
        let inside: Vec<bool> = self.base.simplexes().iter().map(|s| l.contains(s)).collect();
        Ok(self.hat.filter(|s| s.vertices().iter().all(|v| inside[(v.0 / np1) as usize] && v.0 % np1 <= max_level)))
    }
}

/// The lift `(σ, j) ↦ (f(σ), j)` between two resolutions with the same parameter.
pub fn lift_between(f: &SimplicialMap, src: &Resolution, tgt: &Resolution) -> Result<SimplicialMap> {
    if src.n != tgt.n {
        return parameter("resolutions have different parameters");
    }
    if **f.source() != *src.base || **f.target() != *tgt.base {
        return input("map does not match the resolved complexes");
    }
    let n = src.n;
    let image_index: Vec<usize> =
        src.base.simplexes().iter().map(|s| tgt.base.index_of(&f.image(s)).expect("image simplex")).collect();
    let assignment = src
        .hat
        .vertices()
        .map(|v| {
            let (b, j) = ((v.0 / (n + 1)) as usize, v.0 % (n + 1));
            (v, vertex_id(image_index[b], j, n))
        })
        .collect();
    Ok(SimplicialMap::new_unchecked(src.hat.clone(), tgt.hat.clone(), assignment))
}

/// Resolves source and target at parameter `n` and lifts `f`.
pub fn lift(f: &SimplicialMap, n: u32) -> Result<(Resolution, Resolution, SimplicialMap)> {
    if f.source().dim() > n as isize || f.target().dim() > n as isize {
        return parameter(format!(
            "lift needs dim source ({}) and dim target ({}) at most n = {n}",
            f.source().dim(),
            f.target().dim()
        ));
    }
    let src = resolve(f.source(), n)?;
    let tgt = resolve(f.target(), n)?;
    let lifted = lift_between(f, &src, &tgt)?;
    Ok((src, tgt, lifted))
}

/// `f♭` between the subdivisions carried by two resolutions.
pub fn bary_map_between(f: &SimplicialMap, src: &Resolution, tgt: &Resolution) -> SimplicialMap {
    induced_bary_map_between(f, &src.bary, &tgt.bary)
}
