//! Cells `(A₀, …, A_m)` of the product-of-simplexes cellulations `R(σ, n)` and
//! `Q(σ, n)` lying over the barycenter of an `m`-simplex `σ` of `K♭`.
//!
//! Each `Aᵢ` is a nonempty subset of `[0, n]`, stored as a bitmask. A tuple is
//! an `R`-cell when `A₀ ≤ A₁ ≤ … ≤ A_m` elementwise and a `Q`-cell when the
//! inequalities are strict. Faces shrink the sets.

use std::fmt;

use crate::budget::Budget;
use crate::complex::{Simplex, VertexId};
use crate::error::{input, parameter, Error, Result};

/// Largest supported resolution parameter (sets live in a `u64`).
pub const MAX_LEVEL: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    R,
    Q,
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r" | "R" => Ok(Flavor::R),
            "q" | "Q" => Ok(Flavor::Q),
            _ => input(format!("unknown flavor `{s}` (expected r or q)")),
        }
    }
}

/// A tuple of nonempty subsets of `[0, n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    sets: Vec<u64>,
}

fn elements(mask: u64) -> impl Iterator<Item = u32> {
    (0..64u32).filter(move |i| mask & (1u64 << i) != 0)
}

fn min_elem(mask: u64) -> u32 {
    mask.trailing_zeros()
}

fn max_elem(mask: u64) -> u32 {
    63 - mask.leading_zeros()
}

impl Cell {
    pub fn from_masks(sets: Vec<u64>) -> Result<Self> {
        if sets.is_empty() {
            return input("a cell needs at least one set");
        }
        if sets.contains(&0) {
            return input("cell sets must be nonempty");
        }
        if sets.iter().any(|&s| max_elem(s) > MAX_LEVEL) {
            return input(format!("cell elements must be at most {MAX_LEVEL}"));
        }
        Ok(Cell { sets })
    }

    pub fn from_sets(sets: &[&[u32]]) -> Result<Self> {
        let mut masks = Vec::with_capacity(sets.len());
        for s in sets {
            let mut m = 0u64;
            for &e in *s {
                if e > MAX_LEVEL {
                    return input(format!("cell element {e} exceeds {MAX_LEVEL}"));
                }
                m |= 1 << e;
            }
            masks.push(m);
        }
        Cell::from_masks(masks)
    }

    pub fn masks(&self) -> &[u64] {
        &self.sets
    }

    /// The sets as sorted element lists.
    pub fn sets(&self) -> Vec<Vec<u32>> {
        self.sets.iter().map(|&s| elements(s).collect()).collect()
    }

    /// Base dimension `m` (one less than the number of sets).
    pub fn base_dim(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.sets.iter().map(|s| s.count_ones() as usize).sum::<usize>() - self.sets.len()
    }

    pub fn max_element(&self) -> u32 {
        self.sets.iter().map(|&s| max_elem(s)).max().unwrap()
    }

    /// `(|A₀| − 1, …, |A_m| − 1)`: the dimensions of the simplex factors.
    pub fn factor_dims(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.count_ones() as usize - 1).collect()
    }

    pub fn is_r_cell(&self) -> bool {
        self.sets.windows(2).all(|w| max_elem(w[0]) <= min_elem(w[1]))
    }

    pub fn is_q_cell(&self) -> bool {
        self.sets.windows(2).all(|w| max_elem(w[0]) < min_elem(w[1]))
    }

    pub fn is_in(&self, flavor: Flavor) -> bool {
        match flavor {
            Flavor::R => self.is_r_cell(),
            Flavor::Q => self.is_q_cell(),
        }
    }

    pub fn is_face_of(&self, other: &Cell) -> bool {
        self.sets.len() == other.sets.len() && self.sets.iter().zip(&other.sets).all(|(b, a)| b & !a == 0)
    }

    /// Drop one element from one set of size at least two.
    pub fn facets(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (i, &s) in self.sets.iter().enumerate() {
            if s.count_ones() < 2 {
                continue;
            }
            for e in elements(s) {
                let mut sets = self.sets.clone();
                sets[i] &= !(1u64 << e);
                out.push(Cell { sets });
            }
        }
        out.sort();
        out
    }

    /// Every proper face.
    pub fn faces(&self) -> Vec<Cell> {
        let mut acc: Vec<Vec<u64>> = vec![Vec::new()];
        for &s in &self.sets {
            let subs = nonempty_submasks(s);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    subs.iter().map(move |&b| {
                        let mut p = prefix.clone();
                        p.push(b);
                        p
                    })
                })
                .collect();
        }
        let mut out: Vec<Cell> = acc.into_iter().filter(|s| *s != self.sets).map(|sets| Cell { sets }).collect();
        out.sort();
        out
    }

    /// Ordering key: dimension, then the sets as element lists.
    fn key(&self) -> (usize, Vec<Vec<u32>>) {
        (self.dim(), self.sets())
    }
}

fn nonempty_submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sub = mask;
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & mask;
    }
    out.reverse();
    out
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Cell {
    /// `{0}{1,2}` style label, no whitespace.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sets() {
            f.write_str("{")?;
            for (i, e) in s.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Cell {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("bad cell label `{s}`"));
        let body = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')).ok_or_else(bad)?;
        let mut masks = Vec::new();
        for part in body.split("}{") {
            let mut m = 0u64;
            let mut prev: Option<u32> = None;
            for t in part.split(',') {
                let e: u32 = t.trim().parse().map_err(|_| bad())?;
                if e > MAX_LEVEL || prev.is_some_and(|p| p >= e) {
                    return Err(bad());
                }
                prev = Some(e);
                m |= 1 << e;
            }
            masks.push(m);
        }
        Cell::from_masks(masks)
    }
}

/// The kind of a `Q`-cell with respect to the collapse matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Terminal,
    Excessive,
    Deficient,
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellKind::Terminal => "terminal",
            CellKind::Excessive => "excessive",
            CellKind::Deficient => "deficient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellClass {
    pub lambda: usize,
    pub kind: CellKind,
    /// `C⁻` for excessive cells, `C⁺` for deficient ones.
    pub partner: Option<Cell>,
}

/// λ, kind and partner of a `Q`-cell.
///
/// λ is the largest number with `Aᵢ = {i}` for all `i < λ`. The cell is
/// terminal when λ = m + 1; otherwise it is excessive when `λ ∈ A_λ` (partner
/// drops λ from `A_λ`) and deficient when not (partner adds λ to `A_λ`).
pub fn classify_cell(c: &Cell) -> Result<CellClass> {
    if !c.is_q_cell() {
        return input(format!("{c} is not a cell of Q"));
    }
    let lambda = c.sets.iter().enumerate().take_while(|&(i, &s)| s == 1u64 << i).count();
    if lambda == c.sets.len() {
        return Ok(CellClass { lambda, kind: CellKind::Terminal, partner: None });
    }
    let bit = 1u64 << lambda;
    let mut sets = c.sets.clone();
    let kind = if c.sets[lambda] & bit != 0 {
        sets[lambda] &= !bit;
        CellKind::Excessive
    } else {
        sets[lambda] |= bit;
        CellKind::Deficient
    };
    Ok(CellClass { lambda, kind, partner: Some(Cell { sets }) })
}

/// A face-closed family of cells over a fixed `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellComplexRQ {
    pub m: usize,
    pub n: u32,
    pub flavor: Flavor,
    /// Sorted by dimension, then lexicographically.
    pub cells: Vec<Cell>,
}

impl CellComplexRQ {
    pub fn cells_of_dim(&self, k: usize) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.dim() == k)
    }

    pub fn dim(&self) -> isize {
        self.cells.last().map_or(-1, |c| c.dim() as isize)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; (self.dim() + 1).max(0) as usize];
        for c in &self.cells {
            counts[c.dim()] += 1;
        }
        counts
    }

    /// Top-dimensional cells.
    pub fn top_cells(&self) -> Vec<&Cell> {
        let d = self.dim();
        self.cells.iter().filter(|c| c.dim() as isize == d).collect()
    }
}

pub const DEFAULT_MAX_M: usize = 3;
pub const DEFAULT_MAX_N: u32 = 7;

/// All cells of `R(m, n)` or `Q(m, n)`.
pub fn enumerate_cells(m: usize, n: u32, flavor: Flavor) -> Result<CellComplexRQ> {
    enumerate_cells_with_budget(m, n, flavor, &Budget::UNLIMITED)
}

pub fn enumerate_cells_with_budget(m: usize, n: u32, flavor: Flavor, budget: &Budget) -> Result<CellComplexRQ> {
    if n > MAX_LEVEL {
        return parameter(format!("n = {n} exceeds {MAX_LEVEL}"));
    }
    if flavor == Flavor::Q && m as u32 > n {
        return parameter(format!("Q({m}, {n}) has no cells: m must not exceed n"));
    }
    let mut cells = Vec::new();
    let mut prefix = Vec::with_capacity(m + 1);
    enumerate_rec(m, n, flavor, 0, &mut prefix, &mut cells, budget)?;
    cells.sort();
    Ok(CellComplexRQ { m, n, flavor, cells })
}

fn enumerate_rec(
    m: usize,
    n: u32,
    flavor: Flavor,
    lo: u32,
    prefix: &mut Vec<u64>,
    out: &mut Vec<Cell>,
    budget: &Budget,
) -> Result<()> {
    if prefix.len() == m + 1 {
        out.push(Cell { sets: prefix.clone() });
        budget.tick(out.len(), "cell enumeration")?;
        return Ok(());
    }
    // remaining sets after this one need room in Q
    let remaining = (m + 1 - prefix.len() - 1) as u32;
    let hi = if flavor == Flavor::Q { n.saturating_sub(remaining) } else { n };
    if lo > hi || (flavor == Flavor::Q && lo + remaining > n) {
        return Ok(());
    }
    let universe: u64 = ((1u128 << (hi + 1)) - 1) as u64 & !((1u64 << lo) - 1);
    for s in nonempty_submasks(universe) {
        let next = match flavor {
            Flavor::R => max_elem(s),
            Flavor::Q => max_elem(s) + 1,
        };
        prefix.push(s);
        enumerate_rec(m, n, flavor, next, prefix, out, budget)?;
        prefix.pop();
    }
    Ok(())
}

/// The terminal cell `({0}, {1}, …, {m})`.
pub fn terminal_cell(m: usize) -> Cell {
    Cell { sets: (0..=m).map(|i| 1u64 << i).collect() }
}

/// The simplex `{(vᵢ, j) : j ∈ Aᵢ}` of `K♭ ⊠ Δⁿ` over the flag `v₀ < … < v_m`.
///
/// `flag` holds the `K♭` vertex ids (canonical simplex indices of `K`);
/// vertex ids follow the numbering of [`crate::resolution`].
pub fn cell_to_simplex(c: &Cell, flag: &[VertexId], n: u32) -> Result<Simplex> {
    if flag.len() != c.sets.len() {
        return input(format!("cell has {} sets but the flag has {} vertices", c.sets.len(), flag.len()));
    }
    if c.max_element() > n {
        return parameter(format!("cell {c} uses a level above n = {n}"));
    }
    if flag.windows(2).any(|w| w[0] >= w[1]) {
        return input("flag vertices must be strictly increasing");
    }
    let mut vs = Vec::with_capacity(c.dim() + c.sets.len());
    for (v, &s) in flag.iter().zip(&c.sets) {
        for j in elements(s) {
            vs.push(VertexId(v.0 * (n + 1) + j));
        }
    }
    Ok(Simplex::from_sorted_unchecked(vs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(sets: &[&[u32]]) -> Cell {
        Cell::from_sets(sets).unwrap()
    }

    #[test]
    fn top_cells_of_r_1_2() {
        let r = enumerate_cells(1, 2, Flavor::R).unwrap();
        let top: Vec<Cell> = r.top_cells().into_iter().cloned().collect();
        assert_eq!(top, vec![cell(&[&[0], &[0, 1, 2]]), cell(&[&[0, 1], &[1, 2]]), cell(&[&[0, 1, 2], &[2]])]);
        let dims: Vec<Vec<usize>> = top.iter().map(Cell::factor_dims).collect();
        assert_eq!(dims, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn top_cells_of_r_1_3() {
        let r = enumerate_cells(1, 3, Flavor::R).unwrap();
        let top: Vec<Cell> = r.top_cells().into_iter().cloned().collect();
        assert_eq!(
            top,
            vec![
                cell(&[&[0], &[0, 1, 2, 3]]),
                cell(&[&[0, 1], &[1, 2, 3]]),
                cell(&[&[0, 1, 2], &[2, 3]]),
                cell(&[&[0, 1, 2, 3], &[3]]),
            ]
        );
    }

    #[test]
    fn q_with_m_equal_n_is_a_point() {
        for m in 0..5 {
            let q = enumerate_cells(m, m as u32, Flavor::Q).unwrap();
            assert_eq!(q.cells, vec![terminal_cell(m)]);
        }
        assert!(enumerate_cells(3, 2, Flavor::Q).is_err());
    }

    #[test]
    fn faces_and_facets() {
        assert!(cell(&[&[0], &[1]]).faces().is_empty());
        assert_eq!(cell(&[&[0, 1], &[2]]).facets(), vec![cell(&[&[0], &[2]]), cell(&[&[1], &[2]])]);
        assert_eq!(cell(&[&[0], &[0, 1, 2]]).faces().len(), 6);
    }

    #[test]
    fn classification_examples() {
        let t = classify_cell(&cell(&[&[0], &[1]])).unwrap();
        assert_eq!((t.lambda, t.kind, t.partner), (2, CellKind::Terminal, None));

        let e = classify_cell(&cell(&[&[0, 1], &[2]])).unwrap();
        assert_eq!(e.lambda, 0);
        assert_eq!(e.kind, CellKind::Excessive);
        assert_eq!(e.partner, Some(cell(&[&[1], &[2]])));

        let d = classify_cell(&cell(&[&[1, 2]])).unwrap();
        assert_eq!(d.lambda, 0);
        assert_eq!(d.kind, CellKind::Deficient);
        assert_eq!(d.partner, Some(cell(&[&[0, 1, 2]])));

        assert!(classify_cell(&cell(&[&[0, 1], &[1, 2]])).is_err());
    }

    #[test]
    fn cell_to_simplex_examples() {
        let flag = [VertexId(3), VertexId(7)];
        let s = cell_to_simplex(&cell(&[&[0], &[1]]), &flag, 2).unwrap();
        assert_eq!(s.vertices(), &[VertexId(9), VertexId(22)]);
        let s = cell_to_simplex(&cell(&[&[0, 1], &[2]]), &flag, 2).unwrap();
        assert_eq!(s.vertices(), &[VertexId(9), VertexId(10), VertexId(23)]);
        assert!(cell_to_simplex(&cell(&[&[0]]), &flag, 2).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let c = cell(&[&[0, 2], &[3], &[4, 5, 9]]);
        assert_eq!(c.to_string(), "{0,2}{3}{4,5,9}");
        assert_eq!(c.to_string().parse::<Cell>().unwrap(), c);
        assert!("{0}{}".parse::<Cell>().is_err());
        assert!("{2,1}".parse::<Cell>().is_err());
    }
}
