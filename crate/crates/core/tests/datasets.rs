use std::collections::BTreeSet;

use kfv_core::belyi::{check_riemann_hurwitz, profile_from_framework};
use kfv_core::format::{parse, read_framework, Framework};
use kfv_core::intersection::{determinant_labels, determinant_labels_dense, parity_check, target_admissibility};
use kfv_core::picard::CurveType;
use kfv_core::report::Status;
use kfv_core::surface::Recovered;
use kfv_core::verify::verify;

const ALL: [&str; 8] = [
    "first",
    "second",
    "isotope_k2",
    "isotope_k3",
    "isotope_k4",
    "isotope_k5",
    "isotope_k6",
    "three_dessin",
];

fn text(name: &str) -> String {
    let path = format!("{}/../../datasets/{name}.kfw", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn load(name: &str) -> Framework {
    read_framework(&text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn notes(fw: &Framework, check: &str) -> Vec<String> {
    verify(fw).check(check).unwrap_or_else(|| panic!("no check {check}")).notes.clone()
}

#[test]
fn every_dataset_verifies() {
    for name in ALL {
        let r = verify(&load(name));
        let failed: Vec<&str> = r.checks.iter().filter(|c| c.failed()).map(|c| c.check.as_str()).collect();
        assert!(failed.is_empty(), "{name}: failed {failed:?}");
        assert_eq!(r.exit_code(), 0, "{name}");
    }
}

#[test]
fn degree_pairs() {
    let want = [
        ("first", (99, 66)),
        ("second", (435, 290)),
        ("isotope_k2", (99, 66)),
        ("isotope_k3", (135, 90)),
        ("isotope_k4", (171, 114)),
        ("isotope_k5", (207, 138)),
        ("isotope_k6", (243, 162)),
        ("three_dessin", (108, 72)),
    ];
    for (name, (a, b)) in want {
        let r = verify(&load(name));
        assert_eq!(r.degrees.as_ref().and_then(|d| d.total), Some((a, b)), "{name}");
    }
}

#[test]
fn isotope_degrees_follow_the_linear_formula() {
    for k in 2..=6i64 {
        let r = verify(&load(&format!("isotope_k{k}")));
        assert_eq!(r.degrees.unwrap().total, Some((36 * k + 27, 24 * k + 18)));
    }
}

#[test]
fn first_separate_degrees() {
    let n = notes(&load("first"), "degree_pair");
    assert!(n.contains(&"separate degrees: (27,72) (18,48)".to_string()), "{n:?}");
    assert!(n.contains(&"step #1: (-72,-48)".to_string()), "{n:?}");
}

#[test]
fn second_intermediate_steps() {
    let n = notes(&load("second"), "degree_pair");
    for s in ["step #1: (-165,-110)", "step #2: (-270,-180)", "step #3: (-435,-290)"] {
        assert!(n.contains(&s.to_string()), "{n:?}");
    }
}

#[test]
fn first_dicritical_curve_meets_only_the_last_zero_curve() {
    let fw = load("first");
    let m = fw.map.as_ref().unwrap();
    let y = fw.surface("Y").unwrap();
    let dic = m.dicritical_vectors();
    assert_eq!(dic.len(), 1);
    let row = dic.values().next().unwrap();
    assert_eq!(row.len(), 1);
    let (f, v) = row.iter().next().unwrap();
    assert_eq!(*v, 1);
    assert_eq!(y.curve(*f).unwrap().kbar, 0);
    assert_eq!(y.name_of(*f), Some("g0"));
}

#[test]
fn fiber_sums_equal_the_degree() {
    for name in ALL {
        let fw = load(name);
        let m = fw.map.as_ref().unwrap();
        let sums = m.fiber_sums();
        assert_eq!(sums.len(), fw.surface("Y").unwrap().len(), "{name}: every target curve is hit");
        assert!(sums.values().all(|s| *s == m.degree as i64), "{name}");
    }
}

#[test]
fn parse_round_trip() {
    for name in ALL {
        let a = parse(&text(name)).unwrap();
        let b = parse(&a.to_string()).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn three_dessin_is_partial_with_coverage_notes() {
    let fw = load("three_dessin");
    let r = verify(&fw);
    assert_eq!(r.exit_code(), 0);
    let c = r.check("coverage").unwrap();
    assert_eq!(c.status, Status::Info);
    assert!(c.notes.iter().any(|n| n.starts_with("partial map")), "{:?}", c.notes);
    assert!(c.notes.iter().any(|n| n.contains("tail")), "{:?}", c.notes);
}

#[test]
fn sources_fail_and_targets_pass_admissibility() {
    for name in ALL {
        let fw = load(name);
        let y = fw.surface("Y").unwrap();
        let z = fw.surface("Z").unwrap();
        assert!(target_admissibility(y, &determinant_labels(y)).passes(), "{name} Y");
        let rz = target_admissibility(z, &determinant_labels(z));
        assert!(!rz.passes(), "{name} Z");
        assert!(z.curves().any(|c| c.kbar > 0), "{name} Z has positive labels");
    }
}

#[test]
fn parity_holds_everywhere() {
    for name in ALL {
        for (s, g) in &load(name).surfaces {
            assert!(parity_check(g, &determinant_labels(g)).is_empty(), "{name} {s}");
        }
    }
}

#[test]
fn sparse_and_dense_labels_agree_on_targets() {
    for name in ALL {
        let fw = load(name);
        let y = fw.surface("Y").unwrap();
        assert_eq!(determinant_labels(y), determinant_labels_dense(y), "{name}");
    }
}

#[test]
fn self_intersections_recovered_from_labels() {
    for name in ALL {
        for (s, g) in &load(name).surfaces {
            for (c, r) in g.selfint_from_labels() {
                let node = g.curve(c).unwrap();
                if node.kbar == 0 {
                    assert_eq!(r, Recovered::Undetermined);
                } else {
                    assert_eq!(r, Recovered::Value(node.self_int), "{name} {s} curve {c}");
                }
            }
        }
    }
}

#[test]
fn isotope_k2_shares_the_first_target() {
    let a = load("first");
    let b = load("isotope_k2");
    assert_eq!(a.surface("Y").unwrap().canonical_form(), b.surface("Y").unwrap().canonical_form());
    assert_eq!(a.surface("Z").unwrap().canonical_form(), b.surface("Z").unwrap().canonical_form());
}

#[test]
fn every_trivalent_target_has_a_valid_profile() {
    for name in ALL {
        let fw = load(name);
        let m = fw.map.as_ref().unwrap();
        let y = fw.surface("Y").unwrap();
        let trivalent: BTreeSet<_> = y.ids().into_iter().filter(|c| y.valency(*c) == 3).collect();
        assert!(!trivalent.is_empty());
        let mut seen = BTreeSet::new();
        for (e, t) in m.types() {
            if let CurveType::OntoBoundaryCurve { target, .. } = t {
                if trivalent.contains(target) {
                    let p = profile_from_framework(m, *e).unwrap_or_else(|err| panic!("{name} {e}: {err}"));
                    assert!(check_riemann_hurwitz(&p).unwrap(), "{name} {e}");
                    seen.insert(*target);
                }
            }
        }
        assert_eq!(seen, trivalent, "{name}");
    }
}

#[test]
fn first_negative_definiteness_is_reported_not_failed() {
    let r = verify(&load("first"));
    let c = r.check("negative_definiteness").unwrap();
    assert_eq!(c.status, Status::Info);
    assert!(c.notes.iter().any(|n| n.starts_with("removed 8 curves")), "{:?}", c.notes);
    assert!(c.notes.iter().any(|n| n.contains("negative definite = false")), "{:?}", c.notes);
    assert!(c.notes.iter().any(|n| n.contains("disagrees")), "{:?}", c.notes);
}

#[test]
fn json_report_is_versioned() {
    let r = verify(&load("first"));
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["report_version"], 1);
    assert!(v["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn first_target_valuations_follow_the_chain_pattern() {
    let fw = load("first");
    let y = fw.surface("Y").unwrap();
    let v = fw.valuations.as_ref().unwrap();
    let at = |n: &str| v[&y.resolve(n).unwrap()];
    let got: Vec<(i64, i64)> = ["hirz", "m3", "m5", "b1", "fork"].iter().map(|n| at(n)).collect();
    assert_eq!(got, [(-1, 0), (-2, -1), (-3, -2), (-6, -4), (-9, -6)]);
}
