mod common;

use std::collections::HashSet;

use common::{dunce_hat, random_complex, rp2};
use nabla_kit::cells::{classify_cell, enumerate_cells, terminal_cell, Cell, CellKind, Flavor};
use nabla_kit::collapse::{
    collapse_hat, collapse_q, filter_to_subcomplex, greedy_oracle, validate_sequence, CollapseSequence, FaceComplex,
    OracleOutcome,
};
use nabla_kit::complex::{complex, Simplex, SimplicialComplex};
use nabla_kit::homology::{homology, HomologyProfile};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counts tuples of nonempty subsets of `[0, n]` by total size, straight from
/// the membership condition, with no shared code.
fn brute_cell_counts(m: usize, n: u32, strict: bool) -> Vec<usize> {
    let subsets: Vec<u32> = (1u32..(1 << (n + 1))).collect();
    let mut counts = vec![0usize; (n as usize + 1) * (m + 1)];
    let mut tuple = vec![0u32; m + 1];
    fn rec(i: usize, m: usize, strict: bool, subsets: &[u32], tuple: &mut Vec<u32>, counts: &mut Vec<usize>) {
        if i == m + 1 {
            let size: u32 = tuple.iter().map(|s| s.count_ones()).sum();
            counts[size as usize - (m + 1)] += 1;
            return;
        }
        for &s in subsets {
            if i > 0 {
                let prev_max = 31 - tuple[i - 1].leading_zeros();
                let min = s.trailing_zeros();
                if (strict && prev_max >= min) || (!strict && prev_max > min) {
                    continue;
                }
            }
            tuple[i] = s;
            rec(i + 1, m, strict, subsets, tuple, counts);
        }
    }
    rec(0, m, strict, &subsets, &mut tuple, &mut counts);
    while counts.last() == Some(&0) {
        counts.pop();
    }
    counts
}

fn q_complex(m: usize, n: u32) -> FaceComplex<Cell> {
    FaceComplex::from_cells(&enumerate_cells(m, n, Flavor::Q).unwrap())
}

#[test]
fn cell_counts_match_brute_force() {
    for m in 0..3usize {
        for n in 0..5u32 {
            assert_eq!(
                enumerate_cells(m, n, Flavor::R).unwrap().count_by_dim(),
                brute_cell_counts(m, n, false),
                "R({m},{n})"
            );
            if m as u32 <= n {
                assert_eq!(
                    enumerate_cells(m, n, Flavor::Q).unwrap().count_by_dim(),
                    brute_cell_counts(m, n, true),
                    "Q({m},{n})"
                );
            }
        }
    }
}

#[test]
fn classification_invariants() {
    for m in 0..4usize {
        for n in (m as u32 + 1)..6 {
            let q = enumerate_cells(m, n, Flavor::Q).unwrap();
            let cells: HashSet<&Cell> = q.cells.iter().collect();
            let euler: i64 = q
                .count_by_dim()
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum();
            assert_eq!(euler, 1, "Q({m},{n})");
            let mut terminal = 0;
            for c in &q.cells {
                let cl = classify_cell(c).unwrap();
                match cl.kind {
                    CellKind::Terminal => {
                        terminal += 1;
                        assert_eq!(*c, terminal_cell(m));
                    }
                    kind => {
                        let p = cl.partner.clone().unwrap();
                        assert!(cells.contains(&p), "partner {p} of {c} leaves Q");
                        let back = classify_cell(&p).unwrap();
                        assert_eq!(back.partner.as_ref(), Some(c));
                        assert_eq!(back.lambda, cl.lambda);
                        assert_ne!(back.kind, kind);
                        if kind == CellKind::Excessive {
                            assert_eq!(p.dim() + 1, c.dim());
                        }
                    }
                }
                if c.dim() as u32 == n - m as u32 {
                    assert_eq!(cl.kind, CellKind::Excessive, "top cell {c}");
                }
                if c.dim() == 0 && cl.kind != CellKind::Terminal {
                    assert_eq!(cl.kind, CellKind::Deficient, "vertex {c}");
                }
            }
            assert_eq!(terminal, 1);
        }
    }
}

#[test]
fn q_certificates_are_complete_pairings() {
    for m in 0..5usize {
        for n in (m as u32 + 1)..=5 {
            let fc = q_complex(m, n);
            for floor in m as u32..n {
                let seq = collapse_q(m, n, floor).unwrap();
                let finish = enumerate_cells(m, floor, Flavor::Q).unwrap().cells;
                let report = validate_sequence(&fc, &seq).unwrap();
                assert!(report.finishes_at(&finish), "Q({m},{n}) floor {floor}: {:?}", report.failure);
                let mut seen: HashSet<Cell> = finish.into_iter().collect();
                for st in &seq.steps {
                    assert!(seen.insert(st.free_face.clone()));
                    assert!(seen.insert(st.cofacet.clone()));
                }
                assert_eq!(seen.len(), fc.len());
            }
        }
    }
}

#[test]
fn swapping_dependent_steps_is_caught() {
    let seq = collapse_q(0, 2, 0).unwrap();
    let fc = q_complex(0, 2);
    // the first step removes the top cell; any later step depends on it
    let mut bad = seq.clone();
    bad.steps.swap(0, 1);
    let report = validate_sequence(&fc, &bad).unwrap();
    assert_eq!(report.failure.map(|f| f.step), Some(0));
}

#[test]
fn oracle_agrees_on_small_q() {
    for m in 0..3usize {
        for n in (m as u32 + 1)..=3 {
            let fc = q_complex(m, n);
            let out = greedy_oracle(&fc, &[terminal_cell(m)], 200_000).unwrap();
            let OracleOutcome::Found(seq) = out else { panic!("Q({m},{n}) not collapsed by the oracle") };
            assert!(validate_sequence(&fc, &seq).unwrap().finishes_at(&[terminal_cell(m)]));
        }
    }
}

#[test]
fn oracle_rejects_non_collapsible_complexes() {
    for k in [dunce_hat(), rp2(), complex(&[&[0, 1], &[1, 2], &[0, 2]])] {
        let fc = FaceComplex::from_simplicial(&k);
        let apex = k.simplexes()[0].clone();
        assert!(matches!(greedy_oracle(&fc, &[apex], 1_000_000).unwrap(), OracleOutcome::Exhausted));
    }
}

fn check_hat(k: &SimplicialComplex, n: u32, l: &SimplicialComplex) -> Result<(), TestCaseError> {
    let hc = collapse_hat(k, n, None).unwrap();
    let res = &hc.resolution;
    let fc = FaceComplex::from_simplicial(res.hat());
    let report = validate_sequence(&fc, &hc.sequence).unwrap();
    prop_assert!(report.finishes_at(hc.target.simplexes()), "{:?}", report.failure);
    prop_assert_eq!(&hc.target, &res.embed_image());
    prop_assert_eq!(homology(res.hat()), homology(&hc.target));

    let local = filter_to_subcomplex(res, &hc.sequence, l).unwrap();
    let over_l = res.over_subcomplex(l, n).unwrap();
    let target_l = res.embed_image().filter(|s| over_l.contains(s));
    let report = validate_sequence(&FaceComplex::from_simplicial(&over_l), &local).unwrap();
    prop_assert!(report.finishes_at(target_l.simplexes()), "locality: {:?}", report.failure);
    Ok(())
}

fn random_subcomplex(rng: &mut ChaCha8Rng, k: &SimplicialComplex) -> SimplicialComplex {
    let maxes = k.maximal_simplexes();
    let take = rng.gen_range(0..=maxes.len());
    SimplicialComplex::from_generators(maxes.choose_multiple(rng, take).cloned())
}

#[test]
fn point_and_edge_resolutions() {
    let pt = complex(&[&[0]]);
    let hc = collapse_hat(&pt, 2, None).unwrap();
    assert_eq!(hc.sequence.len(), 3);
    check_hat(&complex(&[&[0, 1]]), 1, &complex(&[&[1]])).unwrap();
}

#[test]
fn relative_collapse_keeps_the_lower_resolution() {
    let k = complex(&[&[0, 1], &[1, 2], &[0, 2]]);
    let m = complex(&[&[0, 1]]);
    let hc = collapse_hat(&k, 2, Some(&m)).unwrap();
    let fc = FaceComplex::from_simplicial(hc.resolution.hat());
    let report = validate_sequence(&fc, &hc.sequence).unwrap();
    assert!(report.finishes_at(hc.target.simplexes()));
    assert_eq!(homology(&hc.target), HomologyProfile::from_betti(&[1, 1]));
}

#[test]
fn relative_collapse_rejects_bad_subcomplexes() {
    let k = complex(&[&[0, 1, 2]]);
    assert!(collapse_hat(&k, 2, Some(&complex(&[&[0, 1, 2]]))).is_err());
    assert!(collapse_hat(&k, 2, Some(&complex(&[&[0, 5]]))).is_err());
}

#[test]
fn certificate_labels_survive_a_text_round_trip() {
    let hc = collapse_hat(&complex(&[&[0, 1, 2]]), 2, None).unwrap();
    let text = nabla_kit::text::write_certificate(&hc.sequence);
    let back: CollapseSequence<Simplex> = nabla_kit::text::parse_certificate(&text).unwrap();
    assert_eq!(back, hc.sequence);
    assert_eq!(back.steps[0].cofacet.dim(), 2);
    assert!(back.steps.iter().all(|s| s.free_face.is_face_of(&s.cofacet)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hat_collapses_are_sound_and_local(seed in any::<u64>(), verts in 1u32..7, gens in 1usize..6, extra in 0u32..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_complex(&mut rng, verts, 2, gens);
        let l = random_subcomplex(&mut rng, &k);
        check_hat(&k, k.dim() as u32 + extra, &l)?;
    }

    #[test]
    fn relative_hat_collapses_are_sound(seed in any::<u64>(), verts in 2u32..7, gens in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_complex(&mut rng, verts, 2, gens);
        let n = k.dim().max(1) as u32;
        let m = random_subcomplex(&mut rng, &k).skeleton(n as isize - 1);
        let hc = collapse_hat(&k, n, Some(&m)).unwrap();
        let fc = FaceComplex::from_simplicial(hc.resolution.hat());
        let report = validate_sequence(&fc, &hc.sequence).unwrap();
        prop_assert!(report.finishes_at(hc.target.simplexes()), "{:?}", report.failure);
        prop_assert_eq!(homology(&hc.target), homology(&k));
    }
}
