//! The shared oracles agree with known counts and with the library.

mod common;

use corrnet::graph::is_planar;
use corrnet::Network;

use common::{all_partitions, ari_pairs, dmp_is_planar, modularity_direct};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

#[test]
fn planar_graph_counts_on_six_vertices() {
    // labeled planar graphs on 1..=6 vertices (OEIS A066537)
    let expected = [1usize, 2, 8, 64, 1023, 32071];
    for (n, &want) in (1..=6).zip(&expected) {
        let all = pairs(n);
        let mut dmp = 0;
        for mask in 0u32..(1 << all.len()) {
            let edges: Vec<_> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let oracle = dmp_is_planar(n, &edges);
            let lr = is_planar(&Network::from_edges(n, &edges).unwrap());
            assert_eq!(oracle, lr, "n = {n}, edges = {edges:?}");
            dmp += usize::from(oracle);
        }
        assert_eq!(dmp, want, "n = {n}");
    }
}

#[test]
fn dmp_on_named_graphs() {
    let k5 = pairs(5);
    assert!(!dmp_is_planar(5, &k5));
    let k33: Vec<_> = (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect();
    assert!(!dmp_is_planar(6, &k33));

    let mut petersen = Vec::new();
    for i in 0..5 {
        petersen.push((i, (i + 1) % 5));
        petersen.push((i, i + 5));
        petersen.push((5 + i, 5 + (i + 2) % 5));
    }
    assert!(!dmp_is_planar(10, &petersen));

    // icosahedron: maximal planar, 12 vertices, 30 edges
    let mut ico = Vec::new();
    for i in 0..5 {
        let (a, b) = (1 + i, 1 + (i + 1) % 5);
        let (c, d) = (6 + i, 6 + (i + 1) % 5);
        ico.extend([(0, a), (a, b), (a, c), (b, c), (c, d), (c, 11)]);
    }
    assert_eq!(ico.len(), 30);
    assert!(dmp_is_planar(12, &ico));
    ico.push((0, 11));
    assert!(!dmp_is_planar(12, &ico));

    // two K5s sharing a cut vertex
    let mut bowtie = pairs(5);
    bowtie.extend(pairs(5).into_iter().map(|(u, v)| {
        let f = |x: usize| if x == 0 { 0 } else { x + 4 };
        (f(u), f(v))
    }));
    assert!(!dmp_is_planar(9, &bowtie));
}

#[test]
fn ari_oracle_golden_value() {
    let a = [0, 0, 0, 1, 1, 1];
    let b = [0, 0, 1, 0, 1, 1];
    assert!((ari_pairs(&a, &b) + 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(ari_pairs(&a, &a), 1.0);
    assert_eq!(all_partitions(5).len(), 52);
}

#[test]
fn modularity_oracle_on_two_triangles() {
    let mut w = nalgebra::DMatrix::zeros(6, 6);
    for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)] {
        w[(u, v)] = 1.0;
        w[(v, u)] = 1.0;
    }
    let q = modularity_direct(&w, &[0, 0, 0, 1, 1, 1]);
    assert!((q - 5.0 / 14.0).abs() < 1e-15);
}

#[test]
fn dmp_agrees_with_lr_on_random_graphs() {
    use rand::seq::SliceRandom;
    let mut rng = common::rng(11);
    let (mut planar, mut non_planar) = (0, 0);
    for trial in 0..400 {
        let n = 8 + trial % 25;
        let mut all = pairs(n);
        all.shuffle(&mut rng);
        let m = n + trial % (2 * n);
        all.truncate(m.min(3 * n - 6));
        let oracle = dmp_is_planar(n, &all);
        assert_eq!(
            oracle,
            is_planar(&Network::from_edges(n, &all).unwrap()),
            "trial {trial}"
        );
        if oracle {
            planar += 1;
        } else {
            non_planar += 1;
        }
    }
    assert!(planar > 50 && non_planar > 50, "{planar} / {non_planar}");
}
