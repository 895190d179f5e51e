use kfv_core::format::{parse, read_framework, FileError, LoadError};
use kfv_core::picard::MapError;
use kfv_core::surface::{GraphError, SurfaceGraph};

const SMALL: &str = "\
[surface Y]
p2 as line
blowfree line as hirz

[surface Z]
p2
blowfree 1
blowfree 2

[map]
degree 1
type 1 4
type 2 1 target=line e=1 f=1
type 3 3 e=1
pullback line : 2
";

#[test]
fn plane_and_one_blowup() {
    let fw = read_framework("[surface S]\np2\nblowfree 1\n").unwrap();
    let s = fw.surface("S").unwrap();
    let labels: Vec<i64> = s.curves().map(|c| c.kbar).collect();
    assert_eq!(labels, vec![-2, -1]);
    assert_eq!(s.edges().len(), 1);
}

#[test]
fn small_file_loads() {
    let fw = read_framework(SMALL).unwrap();
    assert_eq!(fw.map.unwrap().degree, 1);
}

#[test]
fn pullback_on_a_dicritical_curve_is_structural() {
    let bad = SMALL.replace("pullback line : 2", "pullback line : 2 + 3");
    match read_framework(&bad) {
        Err(FileError::Load(LoadError::Map(line, MapError::SupportOnNonBoundaryType { code: 3, .. }))) => {
            assert_eq!(line, 15)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let e = parse("[surface Y]\np2\nblowedge 1\n").unwrap_err();
    assert_eq!(e.line, 3);
    assert!(e.col >= 1);
    let e = parse("[map]\ndegree x\n").unwrap_err();
    assert_eq!((e.line, e.col), (2, 8));
    assert!(e.to_string().starts_with("line 2, column 8"));
}

#[test]
fn dangling_reference() {
    match read_framework("[surface Y]\np2\nblowfree 7\n") {
        Err(FileError::Load(LoadError::Graph(3, GraphError::UnknownCurve(c)))) => assert_eq!(c, "7"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_declared_ids() {
    let text = "[surface Y]\ncurve 1 kbar=-2 selfint=1\ncurve 1 kbar=-1 selfint=-1\n";
    assert!(matches!(read_framework(text), Err(FileError::Load(LoadError::Graph(_, GraphError::DuplicateCurve(_))))));
}

#[test]
fn scripts_and_declarations_do_not_mix() {
    assert!(parse("[surface Y]\np2\ncurve 2 kbar=-1 selfint=-1\n").is_err());
}

#[test]
fn map_requires_both_surfaces() {
    let text = "[surface Y]\np2\n[map]\ndegree 1\n";
    assert!(matches!(read_framework(text), Err(FileError::Load(LoadError::Structure(..)))));
}

#[test]
fn comments_and_step_references() {
    let f = parse("# a comment\n[surface Y]\np2 # trailing\n").unwrap();
    assert_eq!(f.surfaces.len(), 1);
}

fn four_curves() -> SurfaceGraph {
    let mut g = SurfaceGraph::new();
    let l = g.projective_plane().unwrap();
    let a = g.blowup_free(l).unwrap();
    let b = g.blowup_edge(a, l).unwrap();
    g.blowup_edge(b, l).unwrap();
    g
}

#[test]
fn dot_of_four_curves() {
    let d = four_curves().to_dot("four");
    assert_eq!(d.matches("[label=").count(), 4);
    assert_eq!(d.matches(" -- ").count(), 3);
    assert!(d.contains("K̄=-5, E²=-1"));
}

#[test]
fn dot_of_the_plane() {
    let mut g = SurfaceGraph::new();
    g.projective_plane().unwrap();
    let d = g.to_dot("plane");
    assert_eq!(d.matches("[label=").count(), 1);
    assert_eq!(d.matches(" -- ").count(), 0);
    assert!(d.contains("K̄=-2, E²=1"));
}

#[test]
fn dot_is_deterministic() {
    assert_eq!(four_curves().to_dot("x"), four_curves().to_dot("x"));
    let path = format!("{}/../../datasets/second.kfw", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    let a = read_framework(&text).unwrap().surface("Z").unwrap().to_dot("Z");
    let b = read_framework(&text).unwrap().surface("Z").unwrap().to_dot("Z");
    assert_eq!(a, b);
}
