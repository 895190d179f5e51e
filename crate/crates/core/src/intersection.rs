//! Intersection form of the boundary, determinant labels, parity and
//! definiteness checks.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::surface::{CurveId, SurfaceGraph};

/// Integer Gram matrix of the boundary curves, rows in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    pub ids: Vec<CurveId>,
    pub entries: Vec<Vec<i64>>,
}

impl GramMatrix {
    pub fn of(g: &SurfaceGraph) -> GramMatrix {
        let ids = g.ids();
        let index: BTreeMap<CurveId, usize> = ids.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let n = ids.len();
        let mut entries = vec![vec![0i64; n]; n];
        for c in g.curves() {
            let i = index[&c.id];
            entries[i][i] = c.self_int;
            for nb in g.neighbors(c.id) {
                entries[i][index[&nb]] = 1;
            }
        }
        GramMatrix { ids, entries }
    }

    pub fn index_of(&self, c: CurveId) -> Option<usize> {
        self.ids.binary_search(&c).ok()
    }

    pub fn get(&self, a: CurveId, b: CurveId) -> Option<i64> {
        Some(self.entries[self.index_of(a)?][self.index_of(b)?])
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Fraction-free Gaussian elimination with row pivoting.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Sylvester's criterion: every leading principal minor is positive.
/// A single unpivoted Bareiss pass leaves the k-th leading minor on the
/// k-th diagonal entry.
pub fn is_positive_definite(m: &[Vec<BigInt>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut prev = BigInt::one();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    true
}

/// Bareiss elimination on sparse rows. With rows ordered leaf-first along a
/// forest the elimination creates no fill-in, so each step costs O(n).
fn sparse_determinant(mut rows: Vec<BTreeMap<usize, BigInt>>) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if rows[k].get(&k).is_none_or(|p| p.is_zero()) {
            match (k + 1..n).find(|&r| rows[r].get(&k).is_some_and(|x| !x.is_zero())) {
                Some(r) => {
                    rows.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let (head, tail) = rows.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let p = &pivot_row[&k];
        for row in tail.iter_mut() {
            let lead = row.remove(&k).filter(|l| !l.is_zero());
            let mut next: BTreeMap<usize, BigInt> = row.iter().map(|(j, v)| (*j, p * v)).collect();
            if let Some(l) = lead {
                for (j, x) in pivot_row.range(k + 1..) {
                    *next.entry(*j).or_insert_with(BigInt::zero) -= &l * x;
                }
            }
            *row = next.into_iter().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v / &prev)).collect();
        }
        prev = p.clone();
    }
    sign * rows[n - 1].get(&(n - 1)).cloned().unwrap_or_default()
}

/// `det(-M)` restricted to `keep`. Leaves are eliminated first, so each
/// pivot is the diagonal entry minus the reciprocals of its children's
/// pivots. A zero pivot falls back to sparse Bareiss.
fn subset_determinant(g: &SurfaceGraph, keep: &BTreeSet<CurveId>) -> BigInt {
    let order = leaf_first_order(g, keep);
    let pos: BTreeMap<CurveId, usize> = order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut pivots: Vec<BigRational> = Vec::with_capacity(order.len());
    let mut det = BigRational::one();
    for (i, c) in order.iter().enumerate() {
        let mut p = BigRational::from_integer(BigInt::from(-g.curve(*c).unwrap().self_int));
        for nb in g.neighbors(*c) {
            if let Some(j) = pos.get(&nb).filter(|j| **j < i) {
                p -= pivots[*j].recip();
            }
        }
        if p.is_zero() {
            return sparse_subset_determinant(g, &order, &pos);
        }
        det *= &p;
        pivots.push(p);
    }
    debug_assert!(det.is_integer());
    det.to_integer()
}

fn sparse_subset_determinant(g: &SurfaceGraph, order: &[CurveId], pos: &BTreeMap<CurveId, usize>) -> BigInt {
    let rows = order
        .iter()
        .map(|c| {
            let mut row = BTreeMap::new();
            row.insert(pos[c], BigInt::from(-g.curve(*c).unwrap().self_int));
            for nb in g.neighbors(*c) {
                if let Some(j) = pos.get(&nb) {
                    row.insert(*j, BigInt::from(-1));
                }
            }
            row
        })
        .collect();
    sparse_determinant(rows)
}

/// Post-order of every component of the forest induced on `keep`.
fn leaf_first_order(g: &SurfaceGraph, keep: &BTreeSet<CurveId>) -> Vec<CurveId> {
    let mut order = Vec::with_capacity(keep.len());
    let mut seen = BTreeSet::new();
    for &root in keep {
        if !seen.insert(root) {
            continue;
        }
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
                continue;
            }
            stack.push((v, true));
            for w in g.neighbors(v) {
                if keep.contains(&w) && seen.insert(w) {
                    stack.push((w, false));
                }
            }
        }
    }
    order
}

/// `det(-M)` of the whole boundary.
pub fn full_determinant(g: &SurfaceGraph) -> BigInt {
    subset_determinant(g, &g.ids().into_iter().collect())
}

/// `det(-M)` with the row and column of one curve removed.
pub fn determinant_label(g: &SurfaceGraph, c: CurveId) -> BigInt {
    let mut keep: BTreeSet<CurveId> = g.ids().into_iter().collect();
    keep.remove(&c);
    subset_determinant(g, &keep)
}

/// Determinant labels of every curve.
pub fn determinant_labels(g: &SurfaceGraph) -> BTreeMap<CurveId, BigInt> {
    g.ids().into_iter().map(|c| (c, determinant_label(g, c))).collect()
}

fn negated_gram(g: &SurfaceGraph) -> (Vec<CurveId>, Vec<Vec<BigInt>>) {
    let gram = GramMatrix::of(g);
    let neg = gram.entries.iter().map(|r| r.iter().map(|x| BigInt::from(-x)).collect()).collect();
    (gram.ids, neg)
}

fn minor(m: &[Vec<BigInt>], keep: &[usize]) -> Vec<Vec<BigInt>> {
    keep.iter().map(|i| keep.iter().map(|j| m[*i][*j].clone()).collect()).collect()
}

/// Same values by dense Bareiss in ascending id order, for cross-checking.
pub fn determinant_labels_dense(g: &SurfaceGraph) -> BTreeMap<CurveId, BigInt> {
    let (ids, neg) = negated_gram(g);
    (0..ids.len())
        .map(|skip| {
            let keep: Vec<usize> = (0..ids.len()).filter(|i| *i != skip).collect();
            (ids[skip], determinant(&minor(&neg, &keep)))
        })
        .collect()
}

/// Whether the intersection form restricted to `curves` is negative
/// definite, by Sylvester's criterion on `-M` in ascending id order.
pub fn is_negative_definite(g: &SurfaceGraph, curves: &BTreeSet<CurveId>) -> bool {
    let (ids, neg) = negated_gram(g);
    let keep: Vec<usize> = ids.iter().enumerate().filter(|(_, c)| curves.contains(c)).map(|(i, _)| i).collect();
    is_positive_definite(&minor(&neg, &keep))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityViolation {
    pub curve: CurveId,
    pub kbar: i64,
    pub det_label: String,
}

/// Curves where label plus determinant label is even.
pub fn parity_check(g: &SurfaceGraph, labels: &BTreeMap<CurveId, BigInt>) -> Vec<ParityViolation> {
    g.curves()
        .filter(|c| {
            let s = BigInt::from(c.kbar) + &labels[&c.id];
            (s % 2u32).is_zero()
        })
        .map(|c| ParityViolation { curve: c.id, kbar: c.kbar, det_label: labels[&c.id].to_string() })
        .collect()
}

/// Failures of the conditions every boundary of a target surface meets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    /// Curves with positive label.
    pub positive_kbar: Vec<CurveId>,
    /// Curves with negative determinant label.
    pub negative_det: Vec<CurveId>,
    /// Curves whose determinant label vanishes; flagged, not failed.
    pub zero_det: Vec<CurveId>,
    /// Curves meeting more than three others.
    pub high_valency: Vec<CurveId>,
}

impl AdmissibilityReport {
    pub fn passes(&self) -> bool {
        self.positive_kbar.is_empty() && self.negative_det.is_empty() && self.high_valency.is_empty()
    }
}

pub fn target_admissibility(g: &SurfaceGraph, labels: &BTreeMap<CurveId, BigInt>) -> AdmissibilityReport {
    let mut r = AdmissibilityReport::default();
    for c in g.curves() {
        if c.kbar > 0 {
            r.positive_kbar.push(c.id);
        }
        let d = &labels[&c.id];
        if d.is_negative() {
            r.negative_det.push(c.id);
        } else if d.is_zero() {
            r.zero_det.push(c.id);
        }
        if g.valency(c.id) > 3 {
            r.high_valency.push(c.id);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_one() -> SurfaceGraph {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        let a = g.blowup_free(l).unwrap();
        let b = g.blowup_edge(a, l).unwrap();
        g.blowup_edge(b, l).unwrap();
        g
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m: Vec<Vec<BigInt>> =
            [[0, 2, 1], [3, 1, 4], [5, 9, 2]].iter().map(|r| r.iter().map(|x| BigInt::from(*x)).collect()).collect();
        assert_eq!(determinant(&m), BigInt::from(-2 * (6 - 20) + (27 - 5)));
    }

    #[test]
    fn forest_and_dense_labels_agree() {
        let g = fig_one();
        assert_eq!(determinant_labels(&g), determinant_labels_dense(&g));
    }

    #[test]
    fn smooth_completion_has_unimodular_form() {
        assert_eq!(full_determinant(&fig_one()), BigInt::from(-1));
    }

    #[test]
    fn chain_of_minus_two_curves_is_negative_definite() {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        let a = g.blowup_free(l).unwrap();
        let b = g.blowup_edge(a, l).unwrap();
        let c = g.blowup_edge(b, l).unwrap();
        let set: BTreeSet<CurveId> = [a, b, c].into_iter().collect();
        assert!(is_negative_definite(&g, &set));
        assert!(!is_negative_definite(&g, &g.ids().into_iter().collect()));
    }
}
