mod common;

use common::{betti_mod2, dunce_hat, random_complex, rp2};
use nabla_kit::cells::Flavor;
use nabla_kit::complex::complex;
use nabla_kit::homology::{
    boundary_matrices, boundary_squares_vanish, cell_homology, cell_homology_q, homology, homology_with_threshold,
    HomologyProfile,
};
use nabla_kit::poset::barycentric;
use nabla_kit::Budget;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn projective_plane_has_two_torsion() {
    let k = rp2();
    // every edge lies in exactly two triangles, so this is a closed surface
    for e in k.simplexes_of_dim(1) {
        let cofaces = k.simplexes_of_dim(2).iter().filter(|t| e.is_face_of(t)).count();
        assert_eq!(cofaces, 2, "edge {e}");
    }
    assert_eq!(k.euler_characteristic(), 1);
    let h = homology(&k);
    assert_eq!(h.betti(), vec![1, 0]);
    assert_eq!(h.groups[1].torsion, vec![BigUint::from(2u32)]);
    // over the two-element field every dimension sees one class
    assert_eq!(betti_mod2(&k), vec![1, 1, 1]);
}

#[test]
fn hollow_tetrahedron_is_a_sphere() {
    let k = complex(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
    assert_eq!(homology(&k), HomologyProfile::from_betti(&[1, 0, 1]));
}

#[test]
fn dunce_hat_is_acyclic() {
    let k = dunce_hat();
    assert_eq!(k.vertex_count(), 17);
    for e in k.simplexes_of_dim(1) {
        let cofaces = k.simplexes_of_dim(2).iter().filter(|t| e.is_face_of(t)).count();
        assert!(cofaces >= 2, "edge {e} is free");
    }
    assert_eq!(homology(&k), HomologyProfile::point());
}

#[test]
fn q_cells_have_point_homology() {
    for (m, n) in [(0, 3), (1, 2), (1, 3), (2, 4), (0, 1)] {
        assert_eq!(cell_homology_q(m, n, &Budget::UNLIMITED).unwrap(), HomologyProfile::point(), "Q({m},{n})");
    }
    assert_eq!(cell_homology(1, 2, Flavor::R, &Budget::UNLIMITED).unwrap(), HomologyProfile::point());
}

#[test]
fn cell_homology_respects_budget() {
    let tiny = Budget::new(Some(10), None);
    assert!(cell_homology_q(2, 5, &tiny).is_err());
}

/// Universal coefficients: the mod-2 Betti number in dimension d is the integral
/// Betti number plus the even torsion factors in dimensions d and d − 1.
fn mod2_from_integral(h: &HomologyProfile, len: usize) -> Vec<usize> {
    let even = |d: usize| h.groups.get(d).map_or(0, |g| g.torsion.iter().filter(|t| !t.bit(0)).count());
    (0..len).map(|d| h.groups.get(d).map_or(0, |g| g.betti) + even(d) + if d > 0 { even(d - 1) } else { 0 }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_squares_vanish_on_random_complexes(seed in any::<u64>(), verts in 1u32..9, gens in 1usize..12) {
        let k = random_complex(&mut ChaCha8Rng::seed_from_u64(seed), verts, 3, gens);
        prop_assert!(boundary_squares_vanish(&boundary_matrices(&k)));
    }

    #[test]
    fn integral_and_mod2_ranks_agree(seed in any::<u64>(), verts in 1u32..9, gens in 1usize..12) {
        let k = random_complex(&mut ChaCha8Rng::seed_from_u64(seed), verts, 3, gens);
        let h = homology(&k);
        let b2 = betti_mod2(&k);
        prop_assert_eq!(mod2_from_integral(&h, b2.len()), b2);
        prop_assert!(h.is_well_formed());
        prop_assert_eq!(h.euler_characteristic(), k.euler_characteristic());
        prop_assert!(h.groups[0].betti >= 1);
    }

    #[test]
    fn subdivision_preserves_homology(seed in any::<u64>(), verts in 1u32..7, gens in 1usize..7) {
        let k = random_complex(&mut ChaCha8Rng::seed_from_u64(seed), verts, 2, gens);
        let sd = barycentric(&k).unwrap();
        prop_assert_eq!(homology(&sd.complex), homology(&k));
    }

    #[test]
    fn precision_routes_agree(seed in any::<u64>(), verts in 1u32..9, gens in 1usize..12) {
        let k = random_complex(&mut ChaCha8Rng::seed_from_u64(seed), verts, 3, gens);
        prop_assert_eq!(homology_with_threshold(&k, 1 << 31), homology_with_threshold(&k, 0));
        prop_assert_eq!(homology_with_threshold(&k, 2), homology_with_threshold(&k, 0));
    }
}
