//! Integer simplicial homology through Smith normal form.
//!
//! Boundary matrices are first thinned by sparse elimination on unit pivots,
//! which leaves the invariant factors unchanged; whatever survives is reduced
//! densely. Arithmetic runs in checked `i64` and restarts with big integers
//! on overflow or once an entry grows past the precision threshold
//! (`NABLA_KIT_ARBPREC_THRESHOLD`, default 2^31; `0` forces big integers).

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::cells::{enumerate_cells_with_budget, Flavor};
use crate::complex::SimplicialComplex;
use crate::error::Result;
use crate::poset::{order_complex_with_budget, Poset};

pub const ARBPREC_ENV: &str = "NABLA_KIT_ARBPREC_THRESHOLD";
const DEFAULT_THRESHOLD: u64 = 1 << 31;

/// Sparse signed boundary map from k-simplexes (columns) to (k−1)-simplexes (rows).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainBoundary {
    pub dim: usize,
    pub rows: usize,
    pub cols: usize,
    /// Per column, `(row, entry)` pairs sorted by row.
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl ChainBoundary {
    /// Dense row-major copy, for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }
}

/// `∂_k` for k = 1..=dim K; face `i` of a simplex carries sign `(−1)^i`.
pub fn boundary_matrices(k: &SimplicialComplex) -> Vec<ChainBoundary> {
    let top = k.dim();
    let mut out = Vec::new();
    for d in 1..=top.max(0) as usize {
        let lower = k.simplexes_of_dim(d - 1);
        let base = k.index_of(&lower[0]).unwrap();
        let columns = k
            .simplexes_of_dim(d)
            .iter()
            .map(|s| {
                let mut col: Vec<(usize, i64)> = s
                    .facets()
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (k.index_of(f).unwrap() - base, if i % 2 == 0 { 1 } else { -1 }))
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        out.push(ChainBoundary { dim: d, rows: lower.len(), cols: k.count_of_dim(d), columns });
    }
    out
}

/// `∂_{k−1} ∘ ∂_k = 0` for every consecutive pair.
pub fn boundary_squares_vanish(ms: &[ChainBoundary]) -> bool {
    ms.windows(2).all(|w| {
        let (lo, hi) = (&w[0], &w[1]);
        hi.columns.iter().all(|col| {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(r, v) in col {
                for &(r2, u) in &lo.columns[r] {
                    *acc.entry(r2).or_default() += v * u;
                }
            }
            acc.values().all(|&x| x == 0)
        })
    })
}

trait Coeff: Clone + fmt::Debug + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn mul(&self, b: &Self, limit: u64) -> Option<Self>;
    /// `self − f·b`; `None` on overflow or when the result crosses `limit`.
    fn sub_mul(&self, f: &Self, b: &Self, limit: u64) -> Option<Self>;
    /// Truncating quotient.
    fn quot(&self, b: &Self) -> Self;
    fn rem_is_zero(&self, b: &Self) -> bool;
    fn add(&self, b: &Self, limit: u64) -> Option<Self>;
    fn magnitude_lt(&self, b: &Self) -> bool;
    fn gcd_lcm(&self, b: &Self, limit: u64) -> Option<(Self, Self)>;
    fn to_biguint(&self) -> BigUint;
}

impl Coeff for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn mul(&self, b: &Self, limit: u64) -> Option<Self> {
        let r = self.checked_mul(*b)?;
        (r.unsigned_abs() <= limit).then_some(r)
    }
    fn sub_mul(&self, f: &Self, b: &Self, limit: u64) -> Option<Self> {
        let r = self.checked_sub(f.checked_mul(*b)?)?;
        (r.unsigned_abs() <= limit).then_some(r)
    }
    fn quot(&self, b: &Self) -> Self {
        self / b
    }
    fn rem_is_zero(&self, b: &Self) -> bool {
        self % b == 0
    }
    fn add(&self, b: &Self, limit: u64) -> Option<Self> {
        let r = self.checked_add(*b)?;
        (r.unsigned_abs() <= limit).then_some(r)
    }
    fn magnitude_lt(&self, b: &Self) -> bool {
        self.unsigned_abs() < b.unsigned_abs()
    }
    fn gcd_lcm(&self, b: &Self, limit: u64) -> Option<(Self, Self)> {
        let g = self.gcd(b);
        let l = (self.abs() / g).checked_mul(b.abs())?;
        (l.unsigned_abs() <= limit).then_some((g, l))
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(self.unsigned_abs())
    }
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn mul(&self, b: &Self, _: u64) -> Option<Self> {
        Some(self * b)
    }
    fn sub_mul(&self, f: &Self, b: &Self, _: u64) -> Option<Self> {
        Some(self - f * b)
    }
    fn quot(&self, b: &Self) -> Self {
        self / b
    }
    fn rem_is_zero(&self, b: &Self) -> bool {
        Zero::is_zero(&(self % b))
    }
    fn add(&self, b: &Self, _: u64) -> Option<Self> {
        Some(self + b)
    }
    fn magnitude_lt(&self, b: &Self) -> bool {
        self.magnitude() < b.magnitude()
    }
    fn gcd_lcm(&self, b: &Self, _: u64) -> Option<(Self, Self)> {
        Some((Integer::gcd(self, b), Integer::lcm(self, b)))
    }
    fn to_biguint(&self) -> BigUint {
        self.magnitude().clone()
    }
}

/// Rank and the non-unit invariant factors of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithSummary {
    pub rank: usize,
    /// Invariant factors greater than one, ascending, each dividing the next.
    pub torsion: Vec<BigUint>,
}

fn threshold_from_env() -> u64 {
    std::env::var(ARBPREC_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_THRESHOLD)
}

/// Smith normal form summary of a boundary matrix, with the precision
/// switch read from the environment.
pub fn smith_summary(m: &ChainBoundary) -> SmithSummary {
    smith_summary_with_threshold(m, threshold_from_env())
}

/// As [`smith_summary`] with an explicit threshold. Above it (or on `i64`
/// overflow) the computation restarts in arbitrary precision.
pub fn smith_summary_with_threshold(m: &ChainBoundary, threshold: u64) -> SmithSummary {
    if threshold > 0 {
        if let Some(s) = reduce::<i64>(m, threshold) {
            return s;
        }
    }
    reduce::<BigInt>(m, u64::MAX).expect("arbitrary precision never overflows")
}

fn reduce<T: Coeff>(m: &ChainBoundary, limit: u64) -> Option<SmithSummary> {
    let mut rows: Vec<HashMap<usize, T>> = vec![HashMap::new(); m.rows];
    let mut cols: Vec<HashSet<usize>> = vec![HashSet::new(); m.cols];
    for (j, col) in m.columns.iter().enumerate() {
        for &(i, v) in col {
            rows[i].insert(j, T::from_i64(v));
            cols[j].insert(i);
        }
    }
    let mut rank = 0;

    // sparse phase: eliminate on unit pivots until none are left
    loop {
        let mut progress = false;
        for c in 0..m.cols {
            if cols[c].is_empty() {
                continue;
            }
            let mut pivot: Option<usize> = None;
            for &r in &cols[c] {
                if rows[r][&c].is_unit() {
                    let better = match pivot {
                        None => true,
                        Some(p) => (rows[r].len(), r) < (rows[p].len(), p),
                    };
                    if better {
                        pivot = Some(r);
                    }
                }
            }
            let Some(p) = pivot else { continue };
            let prow = std::mem::take(&mut rows[p]);
            let u = prow[&c].clone();
            let mut others: Vec<usize> = cols[c].iter().copied().filter(|&r| r != p).collect();
            others.sort_unstable();
            for r in others {
                // row_r -= (a_rc / u) * row_p, and 1/u = u for a unit
                let f = rows[r][&c].mul(&u, limit)?;
                for (&j, v) in &prow {
                    let cur = rows[r].get(&j).cloned().unwrap_or_else(|| T::from_i64(0));
                    let new = cur.sub_mul(&f, v, limit)?;
                    if new.is_zero() {
                        rows[r].remove(&j);
                        cols[j].remove(&r);
                    } else {
                        rows[r].insert(j, new);
                        cols[j].insert(r);
                    }
                }
            }
            for &j in prow.keys() {
                cols[j].remove(&p);
            }
            rank += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }

    // dense phase on what is left
    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols).filter(|&c| !cols[c].is_empty()).collect();
    let mut dense: Vec<Vec<T>> = live_rows
        .iter()
        .map(|&r| live_cols.iter().map(|c| rows[r].get(c).cloned().unwrap_or_else(|| T::from_i64(0))).collect())
        .collect();
    let diag = dense_smith(&mut dense, limit)?;
    rank += diag.len();
    let torsion = diag.iter().filter(|d| !d.is_unit()).map(Coeff::to_biguint).collect();
    Some(SmithSummary { rank, torsion })
}

/// Diagonalizes `a` in place and returns the nonzero invariant factors in
/// divisibility order.
#[allow(clippy::needless_range_loop)]
fn dense_smith<T: Coeff>(a: &mut [Vec<T>], limit: u64) -> Option<Vec<T>> {
    let nr = a.len();
    let nc = if nr == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.magnitude_lt(&a[bi][bj])) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..nr {
            if a[i][t].is_zero() {
                continue;
            }
            let q = a[i][t].quot(&a[t][t]);
            for j in t..nc {
                let v = a[i][j].sub_mul(&q, &a[t][j], limit)?;
                a[i][j] = v;
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..nc {
            if a[t][j].is_zero() {
                continue;
            }
            let q = a[t][j].quot(&a[t][t]);
            for row in a.iter_mut().skip(t) {
                let v = row[j].sub_mul(&q, &row[t], limit)?;
                row[j] = v;
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            // a smaller remainder appeared; pick a new pivot
            continue;
        }
        // the pivot must divide the rest of the block
        let mut bad = None;
        'scan: for i in t + 1..nr {
            for j in t + 1..nc {
                if !a[i][j].rem_is_zero(&a[t][t]) {
                    bad = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = bad {
            for j in t..nc {
                let v = a[t][j].add(&a[i][j], limit)?;
                a[t][j] = v;
            }
            continue;
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    // pivots chosen this way already divide each other, but normalize anyway
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let (g, l) = diag[i].gcd_lcm(&diag[j], limit)?;
            diag[i] = g;
            diag[j] = l;
        }
    }
    Some(diag)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<BigUint>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Homology groups in dimensions 0, 1, …, with trailing trivial groups dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HomologyProfile {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyProfile {
    fn trimmed(mut groups: Vec<HomologyGroup>) -> Self {
        while groups.last().is_some_and(HomologyGroup::is_trivial) {
            groups.pop();
        }
        HomologyProfile { groups }
    }

    /// The profile of a point.
    pub fn point() -> Self {
        HomologyProfile { groups: vec![HomologyGroup { betti: 1, torsion: Vec::new() }] }
    }

    pub fn from_betti(betti: &[usize]) -> Self {
        Self::trimmed(betti.iter().map(|&b| HomologyGroup { betti: b, torsion: Vec::new() }).collect())
    }

    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.betti).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups.iter().enumerate().map(|(k, g)| if k % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) }).sum()
    }

    /// Invariants of a well-formed profile.
    pub fn is_well_formed(&self) -> bool {
        self.groups.iter().all(|g| {
            g.torsion.iter().all(|t| *t >= BigUint::from(2u32))
                && g.torsion.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
        })
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.groups.iter().enumerate() {
            let t: Vec<String> = g.torsion.iter().map(ToString::to_string).collect();
            writeln!(f, "H_{k}: betti={} torsion={}", g.betti, t.join(","))?;
        }
        Ok(())
    }
}

pub fn homology(k: &SimplicialComplex) -> HomologyProfile {
    homology_with_threshold(k, threshold_from_env())
}

pub fn homology_with_threshold(k: &SimplicialComplex, threshold: u64) -> HomologyProfile {
    if k.is_empty() {
        return HomologyProfile::default();
    }
    let f = k.f_vector();
    let summaries: Vec<SmithSummary> =
        boundary_matrices(k).iter().map(|m| smith_summary_with_threshold(m, threshold)).collect();
    // summaries[d-1] describes ∂_d
    let rank = |d: usize| if d == 0 || d > summaries.len() { 0 } else { summaries[d - 1].rank };
    let groups = (0..f.len())
        .map(|d| HomologyGroup {
            betti: f[d] - rank(d) - rank(d + 1),
            torsion: summaries.get(d).map(|s| s.torsion.clone()).unwrap_or_default(),
        })
        .collect();
    HomologyProfile::trimmed(groups)
}

/// Homology of Q(m,n), computed on the order complex of its face poset.
pub fn cell_homology_q(m: usize, n: u32, budget: &Budget) -> Result<HomologyProfile> {
    cell_homology(m, n, Flavor::Q, budget)
}

pub fn cell_homology(m: usize, n: u32, flavor: Flavor, budget: &Budget) -> Result<HomologyProfile> {
    let cx = enumerate_cells_with_budget(m, n, flavor, budget)?;
    let poset = Poset::from_relation(cx.cells, |a, b| a.is_face_of(b));
    let sd = order_complex_with_budget(&poset, budget)?;
    budget.check_time("cell homology")?;
    Ok(homology(&sd))
}

/// Euler characteristic of a profile's torsion-free part equals the
/// alternating simplex count; exposed for callers that want the check.
pub fn euler_matches(k: &SimplicialComplex, h: &HomologyProfile) -> bool {
    k.euler_characteristic() == h.euler_characteristic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex;

    #[test]
    fn edge_boundary_column() {
        let ms = boundary_matrices(&complex(&[&[0, 1]]));
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].to_dense(), vec![vec![-1], vec![1]]);
    }

    #[test]
    fn triangle_boundary_squares_to_zero() {
        let ms = boundary_matrices(&complex(&[&[0, 1, 2]]));
        assert!(boundary_squares_vanish(&ms));
    }

    #[test]
    fn hollow_triangle_rank() {
        let ms = boundary_matrices(&complex(&[&[0, 1], &[1, 2], &[0, 2]]));
        assert_eq!(smith_summary(&ms[0]).rank, 2);
        assert_eq!(homology(&complex(&[&[0, 1], &[1, 2], &[0, 2]])).betti(), vec![1, 1]);
    }

    #[test]
    fn two_sphere() {
        let k = complex(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        assert_eq!(homology(&k), HomologyProfile::from_betti(&[1, 0, 1]));
    }

    #[test]
    fn dense_smith_finds_torsion() {
        // diag(2, 6) hidden behind unimodular mixing
        let mut a = vec![vec![2i64, 4], vec![4, 14]];
        let d = dense_smith(&mut a, u64::MAX).unwrap();
        assert_eq!(d.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![2, 6]);
        let mut b = vec![vec![2i64, 0], vec![0, 3]];
        let d = dense_smith(&mut b, u64::MAX).unwrap();
        assert_eq!(d.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 6]);
    }

    #[test]
    fn precision_routes_agree() {
        let k = complex(&[&[0, 1, 2], &[0, 2, 3], &[1, 3, 4], &[2, 4, 5]]);
        assert_eq!(homology_with_threshold(&k, DEFAULT_THRESHOLD), homology_with_threshold(&k, 0));
    }

    #[test]
    fn display_format() {
        let h = HomologyProfile::from_betti(&[1, 2]);
        assert_eq!(h.to_string(), "H_0: betti=1 torsion=\nH_1: betti=2 torsion=\n");
    }
}
