//! Finite truncations of inverse sequences of simplicial maps.
//!
//! A [`Tower`] holds levels `K_0, …, K_N` and bonds `p_i: K_{i+1} → K_i`.
//! Nothing here forms a limit; every check is per level or per bond.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::budget::Budget;
use crate::complex::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
use crate::error::{input, parameter, Error, Result};
use crate::resolution::{bary_map_between, lift_between, resolve_with_budget, Resolution};

#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    levels: Vec<Arc<SimplicialComplex>>,
    bonds: Vec<SimplicialMap>,
}

impl Tower {
    pub fn new(levels: Vec<Arc<SimplicialComplex>>, bonds: Vec<SimplicialMap>) -> Result<Self> {
        if levels.is_empty() {
            return input("a tower needs at least one level");
        }
        if bonds.len() + 1 != levels.len() {
            return input(format!("{} levels need {} bonds, got {}", levels.len(), levels.len() - 1, bonds.len()));
        }
        for (i, b) in bonds.iter().enumerate() {
            if **b.source() != *levels[i + 1] || **b.target() != *levels[i] {
                return input(format!("bond {i} does not map level {} to level {i}", i + 1));
            }
        }
        Ok(Tower { levels, bonds })
    }

    /// Builds bonds from raw vertex assignments, validating each.
    pub fn from_assignments(
        levels: Vec<SimplicialComplex>,
        assignments: Vec<BTreeMap<VertexId, VertexId>>,
    ) -> Result<Self> {
        let levels: Vec<Arc<SimplicialComplex>> = levels.into_iter().map(Arc::new).collect();
        if assignments.len() + 1 != levels.len() {
            return input("wrong number of bonds");
        }
        let bonds = assignments
            .into_iter()
            .enumerate()
            .map(|(i, a)| SimplicialMap::new(levels[i + 1].clone(), levels[i].clone(), a))
            .collect::<Result<Vec<_>>>()?;
        Tower::new(levels, bonds)
    }

    /// `size` copies of `k` joined by identities.
    pub fn constant(k: SimplicialComplex, size: usize) -> Result<Self> {
        let k = Arc::new(k);
        let size = size.max(1);
        Tower::new(vec![k.clone(); size], (1..size).map(|_| SimplicialMap::identity(k.clone())).collect())
    }

    pub fn levels(&self) -> &[Arc<SimplicialComplex>] {
        &self.levels
    }

    pub fn bonds(&self) -> &[SimplicialMap] {
        &self.bonds
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Indices of bonds that collapse some simplex.
    pub fn degenerate_bonds(&self) -> Vec<usize> {
        (0..self.bonds.len()).filter(|&i| !self.bonds[i].is_nondegenerate()).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.bonds.iter().all(SimplicialMap::is_nondegenerate)
    }

    pub fn is_surjective(&self) -> bool {
        self.bonds.iter().all(|b| b.image_subcomplex() == **b.target())
    }
}

/// One subcomplex per level of a tower.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcomplexFamily {
    pub members: Vec<SimplicialComplex>,
}

impl SubcomplexFamily {
    pub fn full(t: &Tower) -> Self {
        SubcomplexFamily { members: t.levels.iter().map(|k| (**k).clone()).collect() }
    }

    pub fn empty(t: &Tower) -> Self {
        SubcomplexFamily { members: vec![SimplicialComplex::empty(); t.len()] }
    }

    /// Levelwise `n`-skeleta.
    pub fn skeleta(t: &Tower, n: isize) -> Self {
        SubcomplexFamily { members: t.levels.iter().map(|k| k.skeleton(n)).collect() }
    }

    fn check_matches(&self, t: &Tower) -> Result<()> {
        if self.members.len() != t.len() {
            return input(format!("family has {} members, tower has {} levels", self.members.len(), t.len()));
        }
        for (i, (l, k)) in self.members.iter().zip(&t.levels).enumerate() {
            if !l.is_subcomplex_of(k) {
                return input(format!("member {i} is not a subcomplex of level {i}"));
            }
        }
        Ok(())
    }
}

/// Replaces lower levels by iterated images so every bond is onto.
pub fn surjectivize(t: &Tower) -> Tower {
    let n = t.len();
    let mut levels = t.levels.clone();
    let mut bonds = t.bonds.clone();
    for i in (0..n - 1).rev() {
        let restricted = t.bonds[i]
            .restrict(levels[i + 1].clone(), t.levels[i].clone())
            .expect("new levels are subcomplexes of the old ones");
        let image = Arc::new(restricted.image_subcomplex());
        bonds[i] =
            restricted.restrict(levels[i + 1].clone(), image.clone()).expect("image contains every image simplex");
        levels[i] = image;
    }
    Tower { levels, bonds }
}

/// Images of `s` at levels `level−1, …, 0`.
pub fn trace_simplex(t: &Tower, level: usize, s: &Simplex) -> Result<Vec<Simplex>> {
    let Some(k) = t.levels.get(level) else { return input(format!("tower has no level {level}")) };
    if !k.contains(s) {
        return input(format!("{s} is not a simplex of level {level}"));
    }
    let mut out = Vec::with_capacity(level);
    let mut cur = s.clone();
    for i in (0..level).rev() {
        cur = t.bonds[i].image(&cur);
        out.push(cur.clone());
    }
    Ok(out)
}

/// True when the dimensions along `chain`, read upward from level 0, strictly
/// increase. A long such chain is the finite shadow of a Hilbert simplex.
pub fn is_dimension_increasing(chain: &[Simplex]) -> bool {
    chain.windows(2).all(|w| w[0].dim() > w[1].dim())
}

/// Levelwise `n`-skeleta with restricted bonds.
pub fn skeleton_tower(t: &Tower, n: isize) -> Tower {
    let levels: Vec<Arc<SimplicialComplex>> = t.levels.iter().map(|k| Arc::new(k.skeleton(n))).collect();
    let bonds = t
        .bonds
        .iter()
        .enumerate()
        .map(|(i, b)| {
            b.restrict(levels[i + 1].clone(), levels[i].clone()).expect("simplicial maps do not raise dimension")
        })
        .collect();
    Tower { levels, bonds }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    /// `L_{i+1} ⊆ p_i⁻¹(L_i)`.
    Lfd,
    /// `p_i⁻¹(L_i) ⊆ L_{i+1}`.
    Decomposable,
}

impl FromStr for FamilyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lfd" => Ok(FamilyMode::Lfd),
            "decomposable" => Ok(FamilyMode::Decomposable),
            _ => input(format!("unknown mode `{s}` (expected lfd or decomposable)")),
        }
    }
}

impl fmt::Display for FamilyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyMode::Lfd => "lfd",
            FamilyMode::Decomposable => "decomposable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCheck {
    /// First violation as (level, simplex of that level), if any.
    pub failure: Option<(usize, Simplex)>,
}

impl FamilyCheck {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn check_family(t: &Tower, f: &SubcomplexFamily, mode: FamilyMode) -> Result<FamilyCheck> {
    f.check_matches(t)?;
    for (i, p) in t.bonds.iter().enumerate() {
        let (lower, upper) = (&f.members[i], &f.members[i + 1]);
        let bad = t.levels[i + 1].simplexes().iter().find(|s| {
            let in_preimage = lower.contains(&p.image(s));
            match mode {
                FamilyMode::Lfd => upper.contains(s) && !in_preimage,
                FamilyMode::Decomposable => in_preimage && !upper.contains(s),
            }
        });
        if let Some(s) = bad {
            return Ok(FamilyCheck { failure: Some((i + 1, s.clone())) });
        }
    }
    Ok(FamilyCheck { failure: None })
}

/// A surjection `{0..=a} → {0..=b}` given by its values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surjection {
    pub codomain: usize,
    pub values: Vec<usize>,
}

impl Surjection {
    pub fn new(values: Vec<usize>, codomain: usize) -> Result<Self> {
        if values.is_empty() {
            return input("a surjection needs a nonempty domain");
        }
        let mut hit = vec![false; codomain + 1];
        for &v in &values {
            if v > codomain {
                return input(format!("value {v} outside the codomain [{codomain}]"));
            }
            hit[v] = true;
        }
        if let Some(miss) = hit.iter().position(|h| !h) {
            return input(format!("{miss} is not hit; the map is not surjective"));
        }
        Ok(Surjection { codomain, values })
    }

    /// The `a` in `[a] → [b]`.
    pub fn domain(&self) -> usize {
        self.values.len() - 1
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Surjection) -> Surjection {
        Surjection { codomain: self.codomain, values: inner.values.iter().map(|&v| self.values[v]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.codomain == self.domain() && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// Splits a surjection into steps whose domain is one larger than the
/// codomain, merging the lexicographically least colliding pair each time.
/// The returned factors compose, first to last, to `s`.
///
/// Every factor merges exactly one pair. When the input is a bijection other
/// than the identity this is impossible; the result is then `[s]` itself.
pub fn factor_surjection(s: &Surjection) -> Vec<Surjection> {
    let (a, b) = (s.domain(), s.codomain);
    if a == b {
        return if s.is_identity() { Vec::new() } else { vec![s.clone()] };
    }
    let mut g = s.values.clone();
    let mut out = Vec::with_capacity(a - b);
    while g.len() > b + 2 {
        let (x, y) = least_collision(&g);
        let c = g.len() - 1;
        let merge: Vec<usize> = (0..=c)
            .map(|z| match z.cmp(&y) {
                std::cmp::Ordering::Less => z,
                std::cmp::Ordering::Equal => x,
                std::cmp::Ordering::Greater => z - 1,
            })
            .collect();
        out.push(Surjection { codomain: c - 1, values: merge });
        g.remove(y);
    }
    // the remaining map already has exactly one collision
    out.push(Surjection { codomain: b, values: g });
    out
}

fn least_collision(g: &[usize]) -> (usize, usize) {
    for y in 1..g.len() {
        for x in 0..y {
            if g[x] == g[y] {
                return (x, y);
            }
        }
    }
    unreachable!("a non-injective map has a collision")
}

/// Levelwise resolutions of a tower together with its lifted bonds.
#[derive(Debug)]
pub struct ResolvedTower {
    pub tower: Tower,
    pub resolutions: Vec<Resolution>,
}

impl ResolvedTower {
    /// `project_i ∘ lift(p_i) = p_i♭ ∘ project_{i+1}` for every bond, as vertex maps.
    pub fn squares_commute(&self, original: &Tower) -> bool {
        original.bonds.iter().enumerate().all(|(i, p)| {
            let (lo, hi) = (&self.resolutions[i], &self.resolutions[i + 1]);
            let lifted = &self.tower.bonds[i];
            let flat = bary_map_between(p, hi, lo);
            let left = lo.project().after(lifted);
            let right = flat.after(hi.project());
            matches!((left, right), (Ok(l), Ok(r)) if l.assignment() == r.assignment())
        })
    }
}

pub fn resolve_tower(t: &Tower, n: u32) -> Result<ResolvedTower> {
    resolve_tower_with_budget(t, n, &Budget::UNLIMITED)
}

pub fn resolve_tower_with_budget(t: &Tower, n: u32, budget: &Budget) -> Result<ResolvedTower> {
    if let Some(i) = t.levels.iter().position(|k| k.dim() > n as isize) {
        return parameter(format!("level {i} has dimension {} > n = {n}", t.levels[i].dim()));
    }
    let resolutions =
        t.levels.iter().map(|k| resolve_with_budget(k, n, budget)).collect::<Result<Vec<Resolution>>>()?;
    let bonds = t
        .bonds
        .iter()
        .enumerate()
        .map(|(i, p)| lift_between(p, &resolutions[i + 1], &resolutions[i]))
        .collect::<Result<Vec<_>>>()?;
    let levels = resolutions.iter().map(|r| r.hat().clone()).collect();
    Ok(ResolvedTower { tower: Tower::new(levels, bonds)?, resolutions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleName {
    SineCurve,
    CombFlea,
    NestedIntervals,
    Hawaiian,
    Solenoid,
    NullSequence,
}

impl FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sine-curve" | "sine_curve" => ExampleName::SineCurve,
            "comb-flea" | "comb_flea" => ExampleName::CombFlea,
            "nested-intervals" | "nested_intervals" => ExampleName::NestedIntervals,
            "hawaiian" => ExampleName::Hawaiian,
            "solenoid" => ExampleName::Solenoid,
            "null-sequence" | "null_sequence" => ExampleName::NullSequence,
            _ => return input(format!("unknown example tower `{s}`")),
        })
    }
}

/// Extra parameters of the example generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExampleParams {
    /// Sphere dimension for the Hawaiian tower.
    pub sphere_dim: u32,
    /// Covering degree for the solenoid; must be prime.
    pub prime: u32,
    /// Base cycle length for the solenoid.
    pub cycle: u32,
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams { sphere_dim: 1, prime: 2, cycle: 3 }
    }
}

pub fn example_tower(name: ExampleName, size: usize, params: ExampleParams) -> Result<Tower> {
    if size == 0 {
        return input("tower size must be at least 1");
    }
    match name {
        ExampleName::SineCurve => sine_curve(size),
        ExampleName::CombFlea => comb_flea(size),
        ExampleName::NestedIntervals => nested_intervals(size),
        ExampleName::Hawaiian => hawaiian(size, params.sphere_dim),
        ExampleName::Solenoid => solenoid(params.prime, size, params.cycle),
        ExampleName::NullSequence => null_sequence(size),
    }
}

fn path(edges: u32) -> SimplicialComplex {
    if edges == 0 {
        return SimplicialComplex::from_generators([Simplex::vertex(0)]);
    }
    SimplicialComplex::from_generators((0..edges).map(|j| Simplex::from_vertex_set([j, j + 1])))
}

fn assignment(pairs: impl IntoIterator<Item = (u32, u32)>) -> BTreeMap<VertexId, VertexId> {
    pairs.into_iter().map(|(v, w)| (VertexId(v), VertexId(w))).collect()
}

/// Paths with 1, 2, … edges; each bond crushes the leftmost edge onto its
/// right endpoint and shifts the rest down.
pub fn nested_intervals(size: usize) -> Result<Tower> {
    let levels = (0..size as u32).map(|i| path(i + 1)).collect();
    let bonds = (1..size as u32).map(|i| assignment((0..=i + 1).map(|v| (v, v.max(1) - 1)))).collect();
    Tower::from_assignments(levels, bonds)
}

/// `L_i` = the rightmost `i` edges of level `i` of [`nested_intervals`].
pub fn nested_intervals_family(size: usize) -> SubcomplexFamily {
    let members = (0..size as u32)
        .map(|i| SimplicialComplex::from_generators((1..=i).map(|j| Simplex::from_vertex_set([j, j + 1]))))
        .collect();
    SubcomplexFamily { members }
}

/// Paths `J_1, J_2, …`; the bond folds the newest edge back onto the previous one.
pub fn sine_curve(size: usize) -> Result<Tower> {
    let levels = (0..size as u32).map(|i| path(i + 1)).collect();
    let bonds =
        (1..size as u32).map(|i| assignment((0..=i + 1).map(|v| (v, if v == i + 1 { i - 1 } else { v })))).collect();
    Tower::from_assignments(levels, bonds)
}

/// Wedges of 1, 2, … boundaries of `Δ^{d+1}` at vertex 0; the bond retracts
/// the newest sphere onto the wedge point.
pub fn hawaiian(size: usize, d: u32) -> Result<Tower> {
    let per = d + 1;
    let sphere = |j: u32| -> Vec<Simplex> {
        let verts: Vec<u32> = std::iter::once(0).chain((0..per).map(|t| 1 + j * per + t)).collect();
        (0..verts.len())
            .map(|skip| Simplex::from_vertex_set(verts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v)))
            .collect()
    };
    let levels = (0..size as u32).map(|i| SimplicialComplex::from_generators((0..=i).flat_map(sphere))).collect();
    let bonds = (1..size as u32)
        .map(|i| {
            assignment(std::iter::once((0, 0)).chain((1..=(i + 1) * per).map(|v| (v, if v > i * per { 0 } else { v }))))
        })
        .collect();
    Tower::from_assignments(levels, bonds)
}

fn cycle(len: u32) -> SimplicialComplex {
    SimplicialComplex::from_generators((0..len).map(|v| Simplex::from_vertex_set([v, (v + 1) % len])))
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Cycles of length `c·p^i` with the degree-`p` covering `v ↦ v mod c·p^i`.
pub fn solenoid(p: u32, size: usize, c: u32) -> Result<Tower> {
    if !is_prime(p) {
        return input(format!("solenoid degree {p} is not prime"));
    }
    if c < 3 {
        return input("solenoid base cycle needs length at least 3");
    }
    let lens: Vec<u32> = (0..size as u32)
        .map(|i| {
            p.checked_pow(i).and_then(|q| q.checked_mul(c)).ok_or_else(|| Error::Parameter("solenoid too large".into()))
        })
        .collect::<Result<_>>()?;
    let levels = lens.iter().map(|&l| cycle(l)).collect();
    let bonds = (1..size).map(|i| assignment((0..lens[i]).map(|v| (v, v % lens[i - 1])))).collect();
    Tower::from_assignments(levels, bonds)
}

/// Comb graphs. Vertex 0 is the root of the limit tooth, 1 its top; tooth
/// `k ≥ 1` has root `2k` and top `2k+1`. Level `i` carries teeth `1..=i+1`
/// with roots joined `0 – 2(i+1) – 2i – … – 2`; the bond identifies the
/// newest tooth with the limit tooth.
pub fn comb_flea(size: usize) -> Result<Tower> {
    let level = |i: u32| {
        let teeth = i + 1;
        let mut gens = vec![Simplex::from_vertex_set([0, 1]), Simplex::from_vertex_set([0, 2 * teeth])];
        for k in 1..=teeth {
            gens.push(Simplex::from_vertex_set([2 * k, 2 * k + 1]));
            if k < teeth {
                gens.push(Simplex::from_vertex_set([2 * k, 2 * k + 2]));
            }
        }
        SimplicialComplex::from_generators(gens)
    };
    let levels = (0..size as u32).map(level).collect();
    let bonds = (1..size as u32)
        .map(|i| {
            let newest = i + 1;
            assignment((0..=2 * newest + 1).map(|v| (v, if v >= 2 * newest { v - 2 * newest } else { v })))
        })
        .collect();
    Tower::from_assignments(levels, bonds)
}

/// `pt ⊔ Δ^1 ⊔ … ⊔ Δ^i`; the bond sends the newest simplex to the point.
pub fn null_sequence(size: usize) -> Result<Tower> {
    // Δ^j occupies vertices start(j) .. start(j)+j
    let start = |j: u32| 1 + (j - 1) * (j + 2) / 2;
    let level = |i: u32| {
        let gens = std::iter::once(Simplex::vertex(0))
            .chain((1..=i).map(|j| Simplex::from_vertex_set(start(j)..=start(j) + j)));
        SimplicialComplex::from_generators(gens)
    };
    let levels = (0..size as u32).map(level).collect();
    let bonds = (1..size as u32)
        .map(|i| {
            let top = start(i);
            assignment((0..=top + i).map(|v| (v, if v >= top { 0 } else { v })))
        })
        .collect();
    Tower::from_assignments(levels, bonds)
}
