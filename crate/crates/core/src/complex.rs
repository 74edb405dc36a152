//! Abstract simplicial complexes and simplicial maps.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{input, Result};

/// An opaque vertex label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// A nonempty, strictly increasing list of vertices.
///
/// Simplexes order first by dimension and then lexicographically, which is
/// the canonical storage order used throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    vertices: Vec<VertexId>,
}

impl Simplex {
    /// Builds a simplex from an already sorted vertex list.
    pub fn new<I, V>(vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let vertices: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return input("a simplex needs at least one vertex");
        }
        if let Some(w) = vertices.windows(2).find(|w| w[0] >= w[1]) {
            let what = if w[0] == w[1] { "duplicate" } else { "unsorted" };
            return input(format!("{what} vertices {} and {} in simplex", w[0], w[1]));
        }
        Ok(Simplex { vertices })
    }

    /// Sorts and deduplicates; used for images under vertex maps.
    pub fn from_vertex_set<I, V>(vertices: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let set: BTreeSet<VertexId> = vertices.into_iter().map(Into::into).collect();
        assert!(!set.is_empty(), "empty vertex set");
        Simplex { vertices: set.into_iter().collect() }
    }

    pub(crate) fn from_sorted_unchecked(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty() && vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex { vertices }
    }

    pub fn vertex(v: u32) -> Self {
        Simplex { vertices: vec![VertexId(v)] }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.len() <= other.len() && self.vertices.iter().all(|v| other.contains_vertex(*v))
    }

    /// Codimension-one faces; empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.len() == 1 {
            return Vec::new();
        }
        (0..self.len())
            .map(|skip| {
                let vs = self.vertices.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, v)| *v).collect();
                Simplex { vertices: vs }
            })
            .collect()
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let k = self.len();
        assert!(k < 31, "simplex too large to enumerate faces");
        (1u32..(1 << k))
            .map(|mask| Simplex {
                vertices: (0..k).filter(|i| mask & (1 << i) != 0).map(|i| self.vertices[i]).collect(),
            })
            .collect()
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vertices.len().cmp(&other.vertices.len()).then_with(|| self.vertices.cmp(&other.vertices))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl std::str::FromStr for Simplex {
    type Err = crate::error::Error;

    /// Parses the `{0,1,2}` label form.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| crate::error::Error::Input(format!("bad simplex label `{s}`")))?;
        let vs = inner
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| crate::error::Error::Input(format!("bad simplex label `{s}`")))?;
        Simplex::new(vs)
    }
}

/// A finite, downward-closed set of simplexes.
///
/// Every simplex is stored explicitly in canonical `(dimension, lexicographic)`
/// order, so the position of a simplex is a stable index. That index is what
/// the barycentric subdivision uses as a vertex id.
#[derive(Clone, Default)]
pub struct SimplicialComplex {
    simplexes: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    /// `dim_start[k]` is the position of the first k-simplex.
    dim_start: Vec<usize>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex { simplexes: Vec::new(), index: HashMap::new(), dim_start: vec![0] }
    }

    /// Downward closure of the generators.
    pub fn from_generators<I>(generators: I) -> Self
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut all = BTreeSet::new();
        for g in generators {
            if all.contains(&g) {
                continue;
            }
            all.extend(g.faces());
        }
        Self::from_sorted(all.into_iter().collect())
    }

    /// Wraps a family that is already closed under taking faces.
    pub(crate) fn from_closed_family(mut simplexes: Vec<Simplex>) -> Self {
        simplexes.sort_unstable();
        simplexes.dedup();
        let k = Self::from_sorted(simplexes);
        debug_assert!(k.is_closed());
        k
    }

    /// Checked variant of [`SimplicialComplex::from_closed_family`].
    pub fn from_family(simplexes: Vec<Simplex>) -> Result<Self> {
        let mut simplexes = simplexes;
        simplexes.sort_unstable();
        simplexes.dedup();
        let k = Self::from_sorted(simplexes);
        if let Some(s) = k.simplexes.iter().find(|s| s.facets().iter().any(|f| !k.contains(f))) {
            return input(format!("family is not closed under faces: a facet of {s} is missing"));
        }
        Ok(k)
    }

    fn from_sorted(simplexes: Vec<Simplex>) -> Self {
        let index = simplexes.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let top = simplexes.last().map_or(0, |s| s.len());
        let mut dim_start = vec![0; top + 1];
        for (d, slot) in dim_start.iter_mut().enumerate() {
            *slot = simplexes.partition_point(|s| s.len() <= d);
        }
        SimplicialComplex { simplexes, index, dim_start }
    }

    fn is_closed(&self) -> bool {
        self.simplexes.iter().all(|s| s.facets().iter().all(|f| self.contains(f)))
    }

    pub fn len(&self) -> usize {
        self.simplexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplexes.is_empty()
    }

    /// Dimension, with −1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.dim_start.len() as isize - 2
    }

    pub fn simplexes(&self) -> &[Simplex] {
        &self.simplexes
    }

    pub fn simplexes_of_dim(&self, k: usize) -> &[Simplex] {
        if k + 1 >= self.dim_start.len() {
            return &[];
        }
        &self.simplexes[self.dim_start[k]..self.dim_start[k + 1]]
    }

    pub fn count_of_dim(&self, k: usize) -> usize {
        self.simplexes_of_dim(k).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.dim_start.len() - 1).map(|k| self.count_of_dim(k)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.count_of_dim(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.simplexes_of_dim(0).iter().map(|s| s.vertices[0])
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.index.contains_key(&Simplex { vertices: vec![v] })
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Simplexes that are not a proper face of another simplex.
    pub fn maximal_simplexes(&self) -> Vec<Simplex> {
        let mut covered = vec![false; self.len()];
        for s in &self.simplexes {
            for f in s.facets() {
                covered[self.index[&f]] = true;
            }
        }
        self.simplexes.iter().zip(covered).filter(|(_, c)| !c).map(|(s, _)| s.clone()).collect()
    }

    /// All simplexes of dimension at most `n`; `n = -1` gives the empty complex.
    pub fn skeleton(&self, n: isize) -> SimplicialComplex {
        if n < 0 {
            return SimplicialComplex::empty();
        }
        let keep = self.simplexes.iter().take_while(|s| s.dim() as isize <= n).cloned().collect();
        Self::from_sorted(keep)
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplexes.iter().all(|s| other.contains(s))
    }

    /// Simplexes of `self` satisfying `keep`; the predicate must be closed under faces.
    pub fn filter<F: FnMut(&Simplex) -> bool>(&self, mut keep: F) -> SimplicialComplex {
        Self::from_closed_family(self.simplexes.iter().filter(|s| keep(s)).cloned().collect())
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let mut all = self.simplexes.clone();
        all.extend(other.simplexes.iter().cloned());
        Self::from_closed_family(all)
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplexes == other.simplexes
    }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex").field("dim", &self.dim()).field("f_vector", &self.f_vector()).finish()
    }
}

/// A vertex map between complexes carrying simplexes to simplexes.
#[derive(Clone)]
pub struct SimplicialMap {
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    assignment: BTreeMap<VertexId, VertexId>,
}

impl SimplicialMap {
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        assignment: BTreeMap<VertexId, VertexId>,
    ) -> Result<Self> {
        for v in source.vertices() {
            match assignment.get(&v) {
                None => return input(format!("vertex {v} of the source is not assigned")),
                Some(w) if !target.contains_vertex(*w) => {
                    return input(format!("vertex {v} maps to {w}, which is not a target vertex"))
                }
                _ => {}
            }
        }
        if let Some(v) = assignment.keys().find(|v| !source.contains_vertex(**v)) {
            return input(format!("assignment mentions {v}, which is not a source vertex"));
        }
        let map = SimplicialMap { source, target, assignment };
        for s in map.source.maximal_simplexes() {
            let image = map.image(&s);
            if !map.target.contains(&image) {
                return input(format!("image {image} of {s} is not a simplex of the target"));
            }
        }
        Ok(map)
    }

    pub(crate) fn new_unchecked(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        assignment: BTreeMap<VertexId, VertexId>,
    ) -> Self {
        SimplicialMap { source, target, assignment }
    }

    pub fn identity(k: Arc<SimplicialComplex>) -> Self {
        let assignment = k.vertices().map(|v| (v, v)).collect();
        SimplicialMap { source: k.clone(), target: k, assignment }
    }

    pub fn source(&self) -> &Arc<SimplicialComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SimplicialComplex> {
        &self.target
    }

    pub fn assignment(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.assignment
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.assignment[&v]
    }

    pub fn image(&self, s: &Simplex) -> Simplex {
        Simplex::from_vertex_set(s.vertices().iter().map(|v| self.assignment[v]))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SimplicialMap) -> Result<SimplicialMap> {
        if !(Arc::ptr_eq(&inner.target, &self.source) || *inner.target == *self.source) {
            return input("maps are not composable: target and source differ");
        }
        let assignment = inner.assignment.iter().map(|(v, w)| (*v, self.assignment[w])).collect();
        Ok(SimplicialMap { source: inner.source.clone(), target: self.target.clone(), assignment })
    }

    /// True when no simplex drops dimension under the map.
    pub fn is_nondegenerate(&self) -> bool {
        self.first_degenerate_simplex().is_none()
    }

    pub fn first_degenerate_simplex(&self) -> Option<Simplex> {
        self.source.maximal_simplexes().into_iter().find(|s| self.image(s).len() != s.len())
    }

    /// Smallest subcomplex of the target containing every image simplex.
    pub fn image_subcomplex(&self) -> SimplicialComplex {
        SimplicialComplex::from_generators(self.source.maximal_simplexes().iter().map(|s| self.image(s)))
    }

    /// Restriction to subcomplexes of the source and target.
    pub fn restrict(&self, source: Arc<SimplicialComplex>, target: Arc<SimplicialComplex>) -> Result<SimplicialMap> {
        if !source.is_subcomplex_of(&self.source) {
            return input("restriction source is not a subcomplex of the map's source");
        }
        let assignment = source.vertices().map(|v| (v, self.assignment[&v])).collect();
        SimplicialMap::new(source, target, assignment)
    }
}

impl PartialEq for SimplicialMap {
    fn eq(&self, other: &Self) -> bool {
        self.assignment == other.assignment
            && (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
    }
}

impl fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("assignment", &self.assignment)
            .finish()
    }
}

/// Convenience constructor for tests and generators: simplex from raw ids.
pub fn simplex(vs: &[u32]) -> Simplex {
    Simplex::new(vs.iter().copied()).expect("valid simplex")
}

/// Downward closure of raw generator lists.
pub fn complex(generators: &[&[u32]]) -> SimplicialComplex {
    SimplicialComplex::from_generators(generators.iter().map(|g| simplex(g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_triangle() {
        let k = complex(&[&[0, 1, 2]]);
        assert_eq!(k.len(), 7);
        assert_eq!(k.dim(), 2);
        assert_eq!(k.f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn empty_complex_has_dimension_minus_one() {
        let k = SimplicialComplex::from_generators(Vec::new());
        assert!(k.is_empty());
        assert_eq!(k.dim(), -1);
        assert_eq!(k.skeleton(-1), k);
    }

    #[test]
    fn hollow_triangle() {
        let k = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(k.len(), 6);
        assert_eq!(k.dim(), 1);
    }

    #[test]
    fn malformed_simplexes_are_rejected() {
        assert!(Simplex::new([1u32, 0]).is_err());
        assert!(Simplex::new([1u32, 1]).is_err());
        assert!(Simplex::new(Vec::<u32>::new()).is_err());
    }

    #[test]
    fn skeleta() {
        let tri = complex(&[&[0, 1, 2]]);
        assert_eq!(tri.skeleton(1), complex(&[&[0, 1], &[1, 2], &[0, 2]]));
        assert_eq!(tri.skeleton(5), tri);
        let tet = complex(&[&[0, 1, 2, 3]]);
        let v = tet.skeleton(0);
        assert_eq!(v.len(), 4);
        assert_eq!(v.dim(), 0);
    }

    #[test]
    fn simplex_labels_round_trip() {
        let s = simplex(&[0, 4, 7]);
        assert_eq!(s.to_string(), "{0,4,7}");
        assert_eq!("{0,4,7}".parse::<Simplex>().unwrap(), s);
        assert!("{4,0}".parse::<Simplex>().is_err());
    }

    fn map(src: &SimplicialComplex, tgt: &SimplicialComplex, pairs: &[(u32, u32)]) -> Result<SimplicialMap> {
        SimplicialMap::new(
            Arc::new(src.clone()),
            Arc::new(tgt.clone()),
            pairs.iter().map(|&(a, b)| (VertexId(a), VertexId(b))).collect(),
        )
    }

    #[test]
    fn nondegeneracy() {
        let edge = complex(&[&[0, 1]]);
        let point = complex(&[&[0]]);
        assert!(SimplicialMap::identity(Arc::new(edge.clone())).is_nondegenerate());
        assert!(!map(&edge, &point, &[(0, 0), (1, 0)]).unwrap().is_nondegenerate());

        // a 6-cycle wrapping twice around a 3-cycle
        let six: Vec<Vec<u32>> = (0..6)
            .map(|i| {
                let mut e = vec![i, (i + 1) % 6];
                e.sort();
                e
            })
            .collect();
        let six = SimplicialComplex::from_generators(six.iter().map(|e| simplex(e)));
        let three = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
        let cover = map(&six, &three, &[(0, 0), (1, 1), (2, 2), (3, 0), (4, 1), (5, 2)]).unwrap();
        assert!(cover.is_nondegenerate());
    }

    #[test]
    fn non_simplicial_assignments_are_rejected() {
        let edge = complex(&[&[0, 1]]);
        let two_points = complex(&[&[0], &[1]]);
        assert!(map(&edge, &two_points, &[(0, 0), (1, 1)]).is_err());
        assert!(map(&edge, &two_points, &[(0, 0)]).is_err());
    }

    #[test]
    fn image_subcomplexes() {
        let edge = complex(&[&[0, 1]]);
        let tri = complex(&[&[0, 1, 2]]);
        let f = map(&edge, &tri, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(f.image_subcomplex(), edge);
        let c = map(&edge, &tri, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(c.image_subcomplex(), complex(&[&[2]]));
        let id = SimplicialMap::identity(Arc::new(tri.clone()));
        assert_eq!(id.image_subcomplex(), tri);
    }

    #[test]
    fn maximal_simplexes_of_a_mixed_complex() {
        let k = complex(&[&[0, 1, 2], &[2, 3], &[4]]);
        assert_eq!(k.maximal_simplexes(), vec![simplex(&[4]), simplex(&[2, 3]), simplex(&[0, 1, 2])]);
    }
}
