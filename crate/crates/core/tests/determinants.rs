use std::collections::BTreeSet;

use kfv_core::intersection::{determinant, determinant_label, determinant_labels, is_negative_definite, is_positive_definite, GramMatrix};
use kfv_core::surface::SurfaceGraph;
use num_bigint::BigInt;
use proptest::prelude::*;

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let sub: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * cofactor_det(&sub)
        })
        .sum()
}

fn big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect()
}

/// The four curves `p2, blowfree, blowedge, blowedge`.
fn four_curves() -> SurfaceGraph {
    let mut g = SurfaceGraph::new();
    let l = g.projective_plane().unwrap();
    let a = g.blowup_free(l).unwrap();
    let b = g.blowup_edge(a, l).unwrap();
    g.blowup_edge(b, l).unwrap();
    g
}

fn negated_minor_by_cofactors(g: &SurfaceGraph, skip: usize) -> i64 {
    let gm = GramMatrix::of(g);
    let keep: Vec<usize> = (0..gm.len()).filter(|i| *i != skip).collect();
    let m: Vec<Vec<i64>> = keep.iter().map(|i| keep.iter().map(|j| -gm.entries[*i][*j]).collect()).collect();
    cofactor_det(&m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bareiss_matches_cofactor_expansion(n in 1usize..=8, seed in prop::collection::vec(-6i64..=6, 64)) {
        let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 8 + j]).collect()).collect();
        prop_assert_eq!(determinant(&big(&m)), BigInt::from(cofactor_det(&m)));
    }

    #[test]
    fn sylvester_matches_leading_minors(n in 1usize..=6, seed in prop::collection::vec(-3i64..=3, 36), shift in 0i64..12) {
        let a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 6 + j]).collect()).collect();
        // A^T A + shift*I - 4I: symmetric, sometimes definite
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + if i == j { shift - 4 } else { 0 }).collect())
            .collect();
        let leading = (1..=n).all(|k| {
            let sub: Vec<Vec<i64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            cofactor_det(&sub) > 0
        });
        prop_assert_eq!(is_positive_definite(&big(&m)), leading);
    }
}

#[test]
fn plane_line_has_label_one() {
    let mut g = SurfaceGraph::new();
    let l = g.projective_plane().unwrap();
    assert_eq!(determinant_label(&g, l), BigInt::from(1));
}

#[test]
fn hirzebruch_curve_has_label_zero() {
    let mut g = SurfaceGraph::new();
    let l = g.projective_plane().unwrap();
    let h = g.blowup_free(l).unwrap();
    assert_eq!(determinant_label(&g, h), BigInt::from(0));
}

#[test]
fn four_curve_labels_match_cofactors() {
    let g = four_curves();
    let ids = g.ids();
    let labels = determinant_labels(&g);
    for (i, c) in ids.iter().enumerate() {
        assert_eq!(labels[c], BigInt::from(negated_minor_by_cofactors(&g, i)), "curve {c}");
    }
    let m5 = g.curves().find(|c| c.kbar == -5).unwrap().id;
    assert_eq!(labels[&m5], BigInt::from(6));
}

#[test]
fn chains_of_minus_two_curves_are_negative_definite() {
    let g = four_curves();
    let all: BTreeSet<_> = g.ids().into_iter().collect();
    assert!(!is_negative_definite(&g, &all));
    let m2: BTreeSet<_> = g.curves().filter(|c| c.self_int <= -2).map(|c| c.id).collect();
    assert!(!m2.is_empty());
    assert!(is_negative_definite(&g, &m2));
}
