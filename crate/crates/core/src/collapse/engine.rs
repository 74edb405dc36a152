use std::collections::{BTreeSet, HashMap};

use super::{CollapseSequence, CollapseStep, Face, FaceComplex};
use crate::budget::Budget;
use crate::cells::{
    cell_to_simplex, classify_cell, enumerate_cells_with_budget, terminal_cell, Cell, CellKind, Flavor,
};
use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::error::{input, parameter, Error, Result};
use crate::resolution::{resolve_with_budget, Resolution};
use crate::text::complex_digest;

fn q_id(m: usize, n: u32) -> String {
    format!("Q({m},{n})")
}

/// Collapse of `Q(m, n)` onto `Q(m, floor)`.
///
/// With `floor = m` the result collapses `Q` onto its terminal vertex. Pairs
/// are emitted stratum by stratum: for each dimension `k` from the top down
/// and each `l = 0, …, m`, every excessive `k`-cell `C` with `λ_C = l` that
/// is not in `Q(m, floor)` is paired with `C⁻`, in lexicographic order of `C`.
pub fn collapse_q(m: usize, n: u32, floor: u32) -> Result<CollapseSequence<Cell>> {
    collapse_q_with_budget(m, n, floor, &Budget::UNLIMITED)
}

pub fn collapse_q_with_budget(m: usize, n: u32, floor: u32, budget: &Budget) -> Result<CollapseSequence<Cell>> {
    if m as u32 == n && floor == n {
        return Ok(CollapseSequence::empty(q_id(m, n), q_id(m, n)));
    }
    if (floor as usize) < m || floor >= n {
        return parameter(format!("collapse_q needs m <= floor < n, got m={m}, n={n}, floor={floor}"));
    }
    let q = enumerate_cells_with_budget(m, n, Flavor::Q, budget)?;
    let mut strata: HashMap<(usize, usize), Vec<(Cell, Cell)>> = HashMap::new();
    for c in &q.cells {
        if c.max_element() <= floor {
            continue;
        }
        let class = classify_cell(c)?;
        if class.kind == CellKind::Excessive {
            strata.entry((c.dim(), class.lambda)).or_default().push((class.partner.unwrap(), c.clone()));
        }
    }
    let top = q.dim().max(0) as usize;
    let mut steps = Vec::new();
    for k in (1..=top).rev() {
        for l in 0..=m {
            if let Some(pairs) = strata.remove(&(k, l)) {
                // cells are already in lexicographic order within a dimension
                steps.extend(pairs.into_iter().map(|(free_face, cofacet)| CollapseStep { free_face, cofacet }));
            }
        }
        budget.check_time("collapse_q")?;
    }
    Ok(CollapseSequence { start: q_id(m, n), finish: q_id(m, floor), steps })
}

fn bit_max(mask: u64) -> u32 {
    63 - mask.leading_zeros()
}

fn bit_min(mask: u64) -> u32 {
    mask.trailing_zeros()
}

/// Partner of a cell of `Q(m, S)` containing `s` under the matching that
/// removes `s` from the element set `S` (given as the bitmask `universe`).
///
/// With `b` the set holding `s`: toggle the predecessor of `s` in `S` within
/// `A_b` if that is legal, otherwise the successor; if neither is legal then
/// `A_b = {s}` and the rule recurses into the sets before `b` (removing their
/// largest element) or after `b` (removing their smallest). Returns `None`
/// only for the single cell of `Q(m, S)` when `|S| = m + 1`.
pub fn removal_partner(sets: &[u64], s: u32, universe: u64) -> Option<Vec<u64>> {
    let bit = 1u64 << s;
    let b = sets.iter().position(|&a| a & bit != 0)?;
    let below = universe & (bit - 1);
    let above = universe & !(bit | (bit - 1));

    let toggle = |elem: u32| -> Option<Vec<u64>> {
        let eb = 1u64 << elem;
        match sets.iter().position(|&a| a & eb != 0) {
            None => {
                let mut out = sets.to_vec();
                out[b] |= eb;
                Some(out)
            }
            Some(o) if o == b => {
                let mut out = sets.to_vec();
                out[b] &= !eb;
                Some(out)
            }
            Some(_) => None,
        }
    };

    if below != 0 {
        if let Some(p) = toggle(bit_max(below)) {
            return Some(p);
        }
    }
    if above != 0 {
        if let Some(p) = toggle(bit_min(above)) {
            return Some(p);
        }
    }
    if b > 0 {
        if let Some(left) = removal_partner(&sets[..b], bit_max(below), below) {
            let mut out = left;
            out.extend_from_slice(&sets[b..]);
            return Some(out);
        }
    }
    if b + 1 < sets.len() {
        if let Some(right) = removal_partner(&sets[b + 1..], bit_min(above), above) {
            let mut out = sets[..=b].to_vec();
            out.extend(right);
            return Some(out);
        }
    }
    None
}

/// Orders a matching into elementary collapses, consuming cells from `alive`.
///
/// `pairs` are `(lower, upper)` index pairs. A pair is ready once `upper` has
/// no remaining cofaces and `lower` has `upper` as its only one; ready pairs
/// are taken smallest index first. Fails if the matching cannot be ordered.
fn schedule<T: Face>(
    fc: &FaceComplex<T>,
    alive: &mut [bool],
    cofaces: &mut [usize],
    pairs: &[(usize, usize)],
) -> Result<Vec<(usize, usize)>> {
    let mut pair_of: HashMap<usize, usize> = HashMap::with_capacity(2 * pairs.len());
    for (p, &(lo, hi)) in pairs.iter().enumerate() {
        pair_of.insert(lo, p);
        pair_of.insert(hi, p);
    }
    let ready = |p: usize, alive: &[bool], cofaces: &[usize]| {
        let (lo, hi) = pairs[p];
        alive[lo] && alive[hi] && cofaces[hi] == 0 && cofaces[lo] == 1
    };
    let mut queue: BTreeSet<usize> = (0..pairs.len()).filter(|&p| ready(p, alive, cofaces)).collect();
    let mut out = Vec::with_capacity(pairs.len());
    while let Some(p) = queue.pop_first() {
        if !ready(p, alive, cofaces) {
            continue;
        }
        let (lo, hi) = pairs[p];
        for idx in [hi, lo] {
            alive[idx] = false;
            for &g in fc.facets_of(idx) {
                cofaces[g] -= 1;
            }
        }
        out.push((lo, hi));
        for &g in fc.facets_of(hi).iter().chain(fc.facets_of(lo)) {
            if alive[g] {
                if let Some(&q) = pair_of.get(&g) {
                    if ready(q, alive, cofaces) {
                        queue.insert(q);
                    }
                }
            }
        }
    }
    if out.len() != pairs.len() {
        return Err(Error::Input(format!(
            "matching could not be ordered: {} of {} pairs scheduled",
            out.len(),
            pairs.len()
        )));
    }
    Ok(out)
}

/// Collapse of `Q(m, n)` onto an arbitrary vertex `target`.
///
/// For the terminal vertex this is [`collapse_q`]. Otherwise the elements of
/// `[0, n]` outside the target are removed one at a time, largest first; each
/// removal collapses `Q(m, S)` onto `Q(m, S ∖ {s})` along [`removal_partner`].
pub fn collapse_q_onto(m: usize, n: u32, target: &Cell) -> Result<CollapseSequence<Cell>> {
    collapse_q_onto_with_budget(m, n, target, &Budget::UNLIMITED)
}

fn collapse_q_onto_with_budget(m: usize, n: u32, target: &Cell, budget: &Budget) -> Result<CollapseSequence<Cell>> {
    if target.base_dim() != m || target.dim() != 0 || !target.is_q_cell() || target.max_element() > n {
        return input(format!("{target} is not a vertex of Q({m},{n})"));
    }
    if *target == terminal_cell(m) {
        if m as u32 == n {
            return Ok(CollapseSequence::empty(q_id(m, n), target.to_string()));
        }
        let mut seq = collapse_q_with_budget(m, n, m as u32, budget)?;
        seq.finish = target.to_string();
        return Ok(seq);
    }
    let q = enumerate_cells_with_budget(m, n, Flavor::Q, budget)?;
    let fc = FaceComplex::from_cells(&q);
    let mut alive = vec![true; fc.len()];
    let mut cofaces: Vec<usize> = (0..fc.len()).map(|i| fc.cofacets_of(i).len()).collect();
    let keep: u64 = target.masks().iter().fold(0, |a, s| a | s);
    let mut universe: u64 = if n == 63 { u64::MAX } else { (1u64 << (n + 1)) - 1 };
    let mut steps = Vec::new();

    for s in (0..=n).rev().filter(|s| keep & (1u64 << s) == 0) {
        let bit = 1u64 << s;
        let mut pairs = Vec::new();
        for (i, c) in fc.cells().iter().enumerate() {
            if !alive[i] || c.masks().iter().all(|a| a & bit == 0) {
                continue;
            }
            let partner = removal_partner(c.masks(), s, universe)
                .ok_or_else(|| Error::Input(format!("{c} has no partner when removing {s}")))?;
            let j = fc.index_of(&Cell::from_masks(partner)?).ok_or_else(|| Error::Input("partner outside Q".into()))?;
            if c.dim() > fc.cells()[j].dim() {
                pairs.push((j, i));
            }
        }
        pairs.sort_by_key(|&(_, hi)| hi);
        for (lo, hi) in schedule(&fc, &mut alive, &mut cofaces, &pairs)? {
            steps.push(CollapseStep { free_face: fc.cells()[lo].clone(), cofacet: fc.cells()[hi].clone() });
        }
        universe &= !bit;
        budget.check_time("collapse_q_onto")?;
    }
    Ok(CollapseSequence { start: q_id(m, n), finish: target.to_string(), steps })
}

/// A certificate for the resolution together with its declared finish.
#[derive(Debug)]
pub struct HatCollapse {
    pub resolution: Resolution,
    pub sequence: CollapseSequence<Simplex>,
    /// The subcomplex the certificate ends at.
    pub target: SimplicialComplex,
}

/// Collapse of `K̂ⁿ` onto `e(K♭)`, or onto `M̂ⁿ⁻¹ ∪ e(K♭)` when `relative_to` is given.
///
/// Simplexes of `K♭` are processed by decreasing dimension, ties in label
/// order. Over an `m`-simplex `σ = (v₀ < … < v_m)` the resolution simplexes
/// projecting onto `σ` are the cells of `Q(m, n)`; they are collapsed onto the
/// vertex `({dim v₀}, …, {dim v_m})`, which is `e(σ)`, or onto `Q(m, n − 1)`
/// when `σ` lies in `M♭`.
pub fn collapse_hat(k: &SimplicialComplex, n: u32, relative_to: Option<&SimplicialComplex>) -> Result<HatCollapse> {
    collapse_hat_with_budget(k, n, relative_to, &Budget::UNLIMITED)
}

pub fn collapse_hat_with_budget(
    k: &SimplicialComplex,
    n: u32,
    relative_to: Option<&SimplicialComplex>,
    budget: &Budget,
) -> Result<HatCollapse> {
    if let Some(mm) = relative_to {
        if !mm.is_subcomplex_of(k) {
            return input("relative subcomplex M is not a subcomplex of K");
        }
        if n == 0 || mm.dim() > n as isize - 1 {
            return parameter(format!("relative collapse needs dim M ({}) <= n - 1 = {}", mm.dim(), n as isize - 1));
        }
    }
    let res = resolve_with_budget(k, n, budget)?;
    let bary = res.bary().complex.clone();
    let in_m: Vec<bool> = k.simplexes().iter().map(|s| relative_to.is_some_and(|mm| mm.contains(s))).collect();

    let mut cache: HashMap<(usize, Vec<u64>), CollapseSequence<Cell>> = HashMap::new();
    let mut steps = Vec::new();
    for m in (0..=bary.dim().max(0) as usize).rev() {
        for sigma in bary.simplexes_of_dim(m) {
            let flag: Vec<VertexId> = sigma.vertices().to_vec();
            let relative = flag.iter().all(|v| in_m[v.0 as usize]);
            let key_target: Vec<u64> = if relative {
                Vec::new()
            } else {
                flag.iter().map(|v| 1u64 << k.simplexes()[v.0 as usize].dim()).collect()
            };
            let key = (m, key_target.clone());
            if !cache.contains_key(&key) {
                let seq = if relative {
                    collapse_q_with_budget(m, n, n - 1, budget)?
                } else {
                    collapse_q_onto_with_budget(m, n, &Cell::from_masks(key_target)?, budget)?
                };
                cache.insert(key.clone(), seq);
            }
            for st in &cache[&key].steps {
                steps.push(CollapseStep {
                    free_face: cell_to_simplex(&st.free_face, &flag, n)?,
                    cofacet: cell_to_simplex(&st.cofacet, &flag, n)?,
                });
            }
            budget.check(steps.len(), "collapse_hat")?;
        }
    }

    let digest = complex_digest(k);
    let start = format!("hat(n={n},K={digest})");
    let (finish, target) = match relative_to {
        None => (format!("embed(K={digest})"), res.embed_image()),
        Some(mm) => (
            format!("hat(n={},K={})+embed(K={digest})", n - 1, complex_digest(mm)),
            res.over_subcomplex(mm, n - 1)?.union(&res.embed_image()),
        ),
    };
    Ok(HatCollapse { resolution: res, sequence: CollapseSequence { start, finish, steps }, target })
}

/// Steps of a resolution certificate whose cofacet lies over the subcomplex `l`.
pub fn filter_to_subcomplex(
    res: &Resolution,
    seq: &CollapseSequence<Simplex>,
    l: &SimplicialComplex,
) -> Result<CollapseSequence<Simplex>> {
    if !l.is_subcomplex_of(res.base()) {
        return input("not a subcomplex of the base complex");
    }
    let np1 = res.parameter() + 1;
    let inside: Vec<bool> = res.base().simplexes().iter().map(|s| l.contains(s)).collect();
    let over = |s: &Simplex| s.vertices().iter().all(|v| inside[(v.0 / np1) as usize]);
    Ok(CollapseSequence {
        start: format!("{}|L={}", seq.start, complex_digest(l)),
        finish: format!("{}|L={}", seq.finish, complex_digest(l)),
        steps: seq.steps.iter().filter(|st| over(&st.cofacet)).cloned().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::enumerate_cells;
    use crate::collapse::validate_sequence;
    use crate::complex::complex;

    fn q_complex(m: usize, n: u32) -> FaceComplex<Cell> {
        FaceComplex::from_cells(&enumerate_cells(m, n, Flavor::Q).unwrap())
    }

    #[test]
    fn q_0_1_is_a_single_step() {
        let seq = collapse_q(0, 1, 0).unwrap();
        assert_eq!(seq.steps.len(), 1);
        assert_eq!(seq.steps[0].free_face.to_string(), "{1}");
        assert_eq!(seq.steps[0].cofacet.to_string(), "{0,1}");
        let r = validate_sequence(&q_complex(0, 1), &seq).unwrap();
        assert!(r.finishes_at(&[terminal_cell(0)]));
    }

    #[test]
    fn q_is_a_point_when_m_equals_n() {
        let seq = collapse_q(2, 2, 2).unwrap();
        assert!(seq.is_empty());
        assert_eq!(seq.start, seq.finish);
    }

    #[test]
    fn parameter_checks() {
        assert!(collapse_q(1, 3, 0).is_err());
        assert!(collapse_q(1, 3, 3).is_err());
    }

    #[test]
    fn relative_q_collapse_lands_on_the_lower_complex() {
        let seq = collapse_q(1, 3, 2).unwrap();
        let r = validate_sequence(&q_complex(1, 3), &seq).unwrap();
        let lower = enumerate_cells(1, 2, Flavor::Q).unwrap().cells;
        assert!(r.finishes_at(&lower));
    }

    #[test]
    fn removal_matching_is_an_involution() {
        for m in 0..3usize {
            for n in (m as u32 + 1)..6 {
                let q = enumerate_cells(m, n, Flavor::Q).unwrap();
                let universe = (1u64 << (n + 1)) - 1;
                for s in 0..=n {
                    for c in q.cells.iter().filter(|c| c.masks().iter().any(|a| a & (1 << s) != 0)) {
                        let p = removal_partner(c.masks(), s, universe).expect("matched");
                        let pc = Cell::from_masks(p.clone()).unwrap();
                        assert!(pc.is_q_cell(), "{c} -> {pc}");
                        assert_eq!(removal_partner(&p, s, universe).unwrap(), c.masks());
                        assert_eq!(pc.dim().abs_diff(c.dim()), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn collapse_onto_every_vertex() {
        for m in 0..4usize {
            for n in (m as u32)..6 {
                let q = enumerate_cells(m, n, Flavor::Q).unwrap();
                let fc = FaceComplex::from_cells(&q);
                for v in q.cells.iter().filter(|c| c.dim() == 0) {
                    let seq = collapse_q_onto(m, n, v).unwrap();
                    let r = validate_sequence(&fc, &seq).unwrap();
                    assert!(r.finishes_at(std::slice::from_ref(v)), "Q({m},{n}) onto {v}: {:?}", r.failure);
                }
            }
        }
    }

    #[test]
    fn point_resolution_collapses_in_three_steps() {
        let hc = collapse_hat(&complex(&[&[0]]), 2, None).unwrap();
        assert_eq!(hc.sequence.len(), 3);
        let r = validate_sequence(&FaceComplex::from_simplicial(hc.resolution.hat()), &hc.sequence).unwrap();
        assert!(r.finishes_at(hc.target.simplexes()));
        assert_eq!(hc.target.len(), 1);
    }

    #[test]
    fn relative_collapse_of_a_hollow_triangle() {
        let k = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
        let m = complex(&[&[0, 1]]);
        assert!(matches!(collapse_hat(&k, 1, Some(&m)), Err(Error::Parameter(_))));
        let hc = collapse_hat(&k, 2, Some(&m)).unwrap();
        let r = validate_sequence(&FaceComplex::from_simplicial(hc.resolution.hat()), &hc.sequence).unwrap();
        assert!(r.finishes_at(hc.target.simplexes()), "{:?}", r.failure);
    }
}
