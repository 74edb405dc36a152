use nabla_kit::complex::{complex, simplex};
use nabla_kit::homology::homology;
use nabla_kit::towers::{
    check_family, example_tower, factor_surjection, hawaiian, nested_intervals, resolve_tower, skeleton_tower,
    solenoid, surjectivize, trace_simplex, ExampleName, ExampleParams, FamilyMode, SubcomplexFamily, Surjection, Tower,
};

const ALL: [ExampleName; 6] = [
    ExampleName::SineCurve,
    ExampleName::CombFlea,
    ExampleName::NestedIntervals,
    ExampleName::Hawaiian,
    ExampleName::Solenoid,
    ExampleName::NullSequence,
];

/// Every map `{0..=a} → {0..=b}` that hits everything.
fn all_surjections(a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; a + 1];
    loop {
        let mut hit = vec![false; b + 1];
        cur.iter().for_each(|&v| hit[v] = true);
        if hit.iter().all(|h| *h) {
            out.push(cur.clone());
        }
        let mut i = 0;
        while i <= a && cur[i] == b {
            cur[i] = 0;
            i += 1;
        }
        if i > a {
            return out;
        }
        cur[i] += 1;
    }
}

#[test]
fn surjectivize_is_idempotent_on_examples() {
    for name in ALL {
        let t = example_tower(name, 4, ExampleParams::default()).unwrap();
        let s = surjectivize(&t);
        assert!(s.is_surjective(), "{name:?}");
        assert_eq!(surjectivize(&s), s);
        assert_eq!(s.levels().last(), t.levels().last());
    }
    let t = nested_intervals(4).unwrap();
    assert_eq!(surjectivize(&t), t);
}

#[test]
fn identity_tower_traces_are_constant() {
    let t = Tower::constant(complex(&[&[0, 1, 2]]), 4).unwrap();
    assert_eq!(trace_simplex(&t, 3, &simplex(&[0, 1])).unwrap(), vec![simplex(&[0, 1]); 3]);
}

#[test]
fn solenoid_edges_wrap_around() {
    // level 2 has 12 vertices; the edge {9,10} lands on {3,4} and then {0,1}
    let t = solenoid(2, 3, 3).unwrap();
    assert_eq!(trace_simplex(&t, 2, &simplex(&[9, 10])).unwrap(), vec![simplex(&[3, 4]), simplex(&[0, 1])]);
}

#[test]
fn skeleton_towers() {
    let t = hawaiian(3, 2).unwrap();
    assert_eq!(skeleton_tower(&t, 2), t);
    let s0 = skeleton_tower(&t, 0);
    assert!(s0.levels().iter().all(|k| k.dim() == 0));
    let s1 = skeleton_tower(&t, 1);
    // each 2-sphere contributes the six edges of a tetrahedron
    for (i, k) in s1.levels().iter().enumerate() {
        assert_eq!(k.count_of_dim(1), 6 * (i + 1));
    }
}

#[test]
fn families_full_and_empty() {
    let t = hawaiian(3, 1).unwrap();
    for mode in [FamilyMode::Lfd, FamilyMode::Decomposable] {
        assert!(check_family(&t, &SubcomplexFamily::full(&t), mode).unwrap().holds());
        assert!(check_family(&t, &SubcomplexFamily::empty(&t), mode).unwrap().holds());
    }
    let short = SubcomplexFamily { members: vec![complex(&[&[0]])] };
    assert!(check_family(&t, &short, FamilyMode::Lfd).is_err());
}

#[test]
fn skeleta_of_degenerate_towers_are_not_decomposable() {
    // the crushed circle's edges map into the 0-skeleton
    let t = hawaiian(2, 1).unwrap();
    let check = check_family(&t, &SubcomplexFamily::skeleta(&t, 0), FamilyMode::Decomposable).unwrap();
    assert_eq!(check.failure.map(|(level, s)| (level, s.dim())), Some((1, 1)));
}

#[test]
fn resolved_towers_are_nondegenerate() {
    for (t, n) in [(nested_intervals(5).unwrap(), 1), (hawaiian(4, 1).unwrap(), 1), (hawaiian(3, 2).unwrap(), 2)] {
        assert!(!t.degenerate_bonds().is_empty());
        let r = resolve_tower(&t, n).unwrap();
        assert!(r.tower.is_nondegenerate());
        assert!(r.squares_commute(&t));
        for (a, b) in t.levels().iter().zip(r.tower.levels()) {
            assert_eq!(homology(a), homology(b));
        }
        for d in 0..=n as isize {
            let f = SubcomplexFamily::skeleta(&r.tower, d);
            assert!(check_family(&r.tower, &f, FamilyMode::Decomposable).unwrap().holds());
        }
    }
    let t = Tower::constant(complex(&[&[0, 1]]), 3).unwrap();
    let r = resolve_tower(&t, 1).unwrap();
    assert!(r.tower.bonds().iter().all(|b| b.assignment().iter().all(|(v, w)| v == w)));
    assert!(resolve_tower(&hawaiian(2, 2).unwrap(), 1).is_err());
}

#[test]
fn factorizations_compose_back() {
    for a in 0..=6usize {
        for b in 0..=a {
            for values in all_surjections(a, b) {
                let s = Surjection::new(values, b).unwrap();
                let fs = factor_surjection(&s);
                let mut acc = Surjection::new((0..=a).collect(), a).unwrap();
                for f in &fs {
                    assert_eq!(f.domain(), acc.codomain);
                    acc = f.after(&acc);
                }
                assert_eq!(acc, s);
                if a > b {
                    assert_eq!(fs.len(), a - b);
                    assert!(fs.iter().all(|f| f.domain() == f.codomain + 1));
                }
            }
        }
    }
    assert!(Surjection::new(vec![0, 0], 1).is_err());
}
