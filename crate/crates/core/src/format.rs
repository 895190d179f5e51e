//! The line-oriented framework file format.
//!
//! ```text
//! [surface Y]
//! p2                      # curve 1
//! blowfree 1 as hirz      # curve 2, also reachable as `hirz`
//! blowedge 2 1
//!
//! [surface T]
//! curve 1 kbar=-2 selfint=1
//!
//! [map]
//! degree 16
//! type 8 1 target=4 e=1 f=16
//! type 14 3 e=5
//! pullback 4 : 8 + 13*52
//!
//! [valuations]
//! y1 1=-1 2=-1
//! y2 1=-1 2=0
//!
//! [chain]
//! blowedge 2 10
//! blowedge #1 2
//! expect 99 66
//!
//! [belyi 8]
//! profile deg=16 over0=2^8 over1=3^5,1 overInf=13,1^3
//! points 0=2 1=3 inf=4
//!
//! [candidate]
//! w = (x1*x2^3 - 1)^3/x2
//! y1 = ...
//! ```
//!
//! A `#` followed by anything but a digit starts a comment; `#1`, `#2`, ...
//! name earlier chain results.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::arith::{parse_with, ArithError, Definitions, Poly};
use crate::belyi::{BelyiError, RamificationProfile};
use crate::picard::{ChainRef, CurveType, FrameworkMap, MapError, ValuationVector};
use crate::surface::{CurveId, CurveNode, GraphError, Surface, SurfaceGraph};

/// Source line of an item. Positions never take part in comparisons, so
/// a reparsed serialization compares equal to the original.
#[derive(Clone, Copy, Debug, Default)]
pub struct Loc(pub usize);

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl Eq for Loc {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("line {0}: {1}")]
    Graph(usize, GraphError),
    #[error("line {0}: {1}")]
    Map(usize, MapError),
    #[error("line {0}: {1}")]
    Belyi(usize, BelyiError),
    #[error("line {0}: {1}")]
    Arith(usize, ArithError),
    #[error("line {0}: {1}")]
    Structure(usize, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptOp {
    P2,
    BlowFree(String),
    BlowEdge(String, String),
    Contract(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptLine {
    pub op: ScriptOp,
    pub alias: Option<String>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveLine {
    pub id: u32,
    pub kbar: i64,
    pub self_int: i64,
    pub alias: Option<String>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceBody {
    Script(Vec<ScriptLine>),
    Declared { curves: Vec<CurveLine>, edges: Vec<(String, String, Loc)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceBlock {
    pub name: String,
    pub body: SurfaceBody,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeSpec {
    Onto { target: String, e: u32, f: u32 },
    BoundaryPoint,
    Dicritical { e: u32 },
    AffinePoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeLine {
    pub curve: String,
    pub spec: TypeSpec,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackLine {
    pub target: String,
    pub terms: Vec<(i64, String)>,
    pub loc: Loc,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MapBlock {
    pub degree: Option<u32>,
    pub types: Vec<TypeLine>,
    pub pullbacks: Vec<PullbackLine>,
    pub partial: bool,
    pub notes: Vec<String>,
    pub loc: Loc,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValuationsBlock {
    pub y1: Vec<(String, i64)>,
    pub y2: Vec<(String, i64)>,
    pub loc: Loc,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainBlock {
    pub steps: Vec<(String, String, Loc)>,
    pub expect: Option<(i64, i64)>,
    pub loc: Loc,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BelyiBlock {
    pub curve: String,
    pub profile: Option<String>,
    /// Target curves over 0, 1 and infinity.
    pub points: Option<[String; 3]>,
    pub num: Option<String>,
    pub den: Option<String>,
    pub loc: Loc,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateBlock {
    /// `name = expression` lines in file order.
    pub lines: Vec<(String, String, Loc)>,
    pub loc: Loc,
}

/// A parsed, unresolved framework file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameworkFile {
    pub surfaces: Vec<SurfaceBlock>,
    pub map: Option<MapBlock>,
    pub valuations: Option<ValuationsBlock>,
    pub chain: Option<ChainBlock>,
    pub belyi: Vec<BelyiBlock>,
    pub candidate: Option<CandidateBlock>,
}

enum Section {
    None,
    Surface,
    Map,
    Valuations,
    Chain,
    Belyi,
    Candidate,
}

fn strip_comment(line: &str) -> &str {
    let b = line.as_bytes();
    for i in 0..b.len() {
        if b[i] == b'#' && !b.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
            return &line[..i];
        }
    }
    line
}

struct Cursor<'a> {
    line_no: usize,
    text: &'a str,
}

impl Cursor<'_> {
    fn err<T>(&self, token: &str, msg: impl Into<String>) -> Result<T, ParseError> {
        let col = self.col(token);
        Err(ParseError { line: self.line_no, col, msg: msg.into() })
    }

    /// One-based column of a token that is a subslice of the line.
    fn col(&self, token: &str) -> usize {
        let base = self.text.as_ptr() as usize;
        let p = token.as_ptr() as usize;
        if p >= base && p <= base + self.text.len() {
            self.text[..p - base].chars().count() + 1
        } else {
            1
        }
    }

    fn int<T: std::str::FromStr>(&self, token: &str, what: &str) -> Result<T, ParseError> {
        token.parse().or_else(|_| self.err(token, format!("expected {what}, found '{token}'")))
    }

    fn keyed<'t>(&self, token: &'t str, key: &str) -> Result<&'t str, ParseError> {
        match token.split_once('=') {
            Some((k, v)) if k == key => Ok(v),
            _ => self.err(token, format!("expected {key}=...")),
        }
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || "_.'-".contains(c)) && !s.starts_with('-')
}

fn parse_alias(cur: &Cursor, rest: &[&str]) -> Result<Option<String>, ParseError> {
    match rest {
        [] => Ok(None),
        ["as", name] if is_ident(name) && name.parse::<u32>().is_err() => Ok(Some(name.to_string())),
        ["as", name] => cur.err(name, "an alias must be a name, not a number"),
        [t, ..] => cur.err(t, format!("unexpected '{t}'")),
    }
}

/// Parses framework text into its blocks without resolving references.
pub fn parse(text: &str) -> Result<FrameworkFile, ParseError> {
    let mut file = FrameworkFile::default();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let cur = Cursor { line_no: i + 1, text: raw };
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let loc = Loc(i + 1);
        if body.starts_with('[') {
            let inner = body
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .map(str::trim)
                .map_or_else(|| cur.err(body, "unterminated section header"), Ok)?;
            let words: Vec<&str> = inner.split_whitespace().collect();
            section = match words[..] {
                ["surface", name] if is_ident(name) => {
                    if file.surfaces.iter().any(|s| s.name == name) {
                        return cur.err(name, format!("surface '{name}' defined twice"));
                    }
                    file.surfaces.push(SurfaceBlock { name: name.to_string(), body: SurfaceBody::Script(Vec::new()), loc });
                    Section::Surface
                }
                ["map"] => {
                    if file.map.is_some() {
                        return cur.err(inner, "only one [map] block is allowed");
                    }
                    file.map = Some(MapBlock { loc, ..Default::default() });
                    Section::Map
                }
                ["valuations"] => {
                    if file.valuations.is_some() {
                        return cur.err(inner, "only one [valuations] block is allowed");
                    }
                    file.valuations = Some(ValuationsBlock { loc, ..Default::default() });
                    Section::Valuations
                }
                ["chain"] => {
                    if file.chain.is_some() {
                        return cur.err(inner, "only one [chain] block is allowed");
                    }
                    file.chain = Some(ChainBlock { loc, ..Default::default() });
                    Section::Chain
                }
                ["belyi", curve] if is_ident(curve) => {
                    file.belyi.push(BelyiBlock { curve: curve.to_string(), loc, ..Default::default() });
                    Section::Belyi
                }
                ["candidate"] => {
                    if file.candidate.is_some() {
                        return cur.err(inner, "only one [candidate] block is allowed");
                    }
                    file.candidate = Some(CandidateBlock { loc, ..Default::default() });
                    Section::Candidate
                }
                _ => return cur.err(inner, format!("unknown section '[{inner}]'")),
            };
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match section {
            Section::None => return cur.err(words[0], "content before the first section header"),
            Section::Surface => parse_surface_line(&cur, &words, loc, file.surfaces.last_mut().unwrap())?,
            Section::Map => parse_map_line(&cur, body, &words, loc, file.map.as_mut().unwrap())?,
            Section::Valuations => {
                let v = file.valuations.as_mut().unwrap();
                let slot = match words[0] {
                    "y1" => &mut v.y1,
                    "y2" => &mut v.y2,
                    w => return cur.err(w, "expected y1 or y2"),
                };
                for w in &words[1..] {
                    let Some((c, val)) = w.split_once('=') else {
                        return cur.err(w, "expected <curve>=<int>");
                    };
                    slot.push((c.to_string(), cur.int(val, "an integer valuation")?));
                }
            }
            Section::Chain => {
                let c = file.chain.as_mut().unwrap();
                match words[..] {
                    ["blowedge", a, b] => c.steps.push((a.to_string(), b.to_string(), loc)),
                    ["expect", a, b] => {
                        if c.expect.is_some() {
                            return cur.err(words[0], "duplicate expect line");
                        }
                        c.expect = Some((cur.int(a, "an integer")?, cur.int(b, "an integer")?));
                    }
                    _ => return cur.err(words[0], "expected 'blowedge <ref> <ref>' or 'expect <int> <int>'"),
                }
            }
            Section::Belyi => parse_belyi_line(&cur, body, &words, file.belyi.last_mut().unwrap())?,
            Section::Candidate => {
                let Some((name, expr)) = body.split_once('=') else {
                    return cur.err(body, "expected '<name> = <expression>'");
                };
                let name = name.trim();
                if !is_ident(name) {
                    return cur.err(name, "expected a name before '='");
                }
                let c = file.candidate.as_mut().unwrap();
                if c.lines.iter().any(|(n, _, _)| n == name) {
                    return cur.err(name, format!("'{name}' defined twice"));
                }
                c.lines.push((name.to_string(), expr.trim().to_string(), loc));
            }
        }
    }
    Ok(file)
}

fn parse_surface_line(cur: &Cursor, words: &[&str], loc: Loc, block: &mut SurfaceBlock) -> Result<(), ParseError> {
    let declarative = matches!(words[0], "curve" | "edge");
    let scripted = matches!(words[0], "p2" | "blowfree" | "blowedge" | "contract");
    if !declarative && !scripted {
        return cur.err(words[0], format!("unknown surface instruction '{}'", words[0]));
    }
    let empty = match &block.body {
        SurfaceBody::Script(s) => s.is_empty(),
        SurfaceBody::Declared { .. } => false,
    };
    if declarative && empty {
        block.body = SurfaceBody::Declared { curves: Vec::new(), edges: Vec::new() };
    }
    match (&mut block.body, declarative) {
        (SurfaceBody::Script(lines), false) => {
            let (op, rest) = match words {
                ["p2", rest @ ..] => (ScriptOp::P2, rest),
                ["blowfree", c, rest @ ..] => (ScriptOp::BlowFree(c.to_string()), rest),
                ["blowedge", a, b, rest @ ..] => (ScriptOp::BlowEdge(a.to_string(), b.to_string()), rest),
                ["contract", c] => (ScriptOp::Contract(c.to_string()), &[][..]),
                _ => return cur.err(words[0], format!("wrong arguments for '{}'", words[0])),
            };
            lines.push(ScriptLine { op, alias: parse_alias(cur, rest)?, loc });
        }
        (SurfaceBody::Declared { curves, edges }, true) => match words {
            ["curve", id, k, s, rest @ ..] => {
                let id: u32 = cur.int(id, "a positive curve id")?;
                if id == 0 {
                    return cur.err(words[1], "curve ids start at 1");
                }
                let kbar = cur.int(cur.keyed(k, "kbar")?, "an integer label")?;
                let self_int = cur.int(cur.keyed(s, "selfint")?, "an integer self-intersection")?;
                curves.push(CurveLine { id, kbar, self_int, alias: parse_alias(cur, rest)?, loc });
            }
            ["edge", a, b] => edges.push((a.to_string(), b.to_string(), loc)),
            _ => return cur.err(words[0], format!("wrong arguments for '{}'", words[0])),
        },
        _ => return cur.err(words[0], "a surface is either declared with curve/edge lines or built by a script, not both"),
    }
    Ok(())
}

fn parse_map_line(cur: &Cursor, body: &str, words: &[&str], loc: Loc, m: &mut MapBlock) -> Result<(), ParseError> {
    match words {
        ["degree", d] => {
            if m.degree.is_some() {
                return cur.err(words[0], "degree given twice");
            }
            m.degree = Some(cur.int(d, "a positive degree")?);
        }
        ["partial"] => m.partial = true,
        ["note", ..] => m.notes.push(body["note".len()..].trim().to_string()),
        ["type", z, "1", t, e, f] => {
            let target = cur.keyed(t, "target")?.to_string();
            let e = cur.int(cur.keyed(e, "e")?, "a positive ramification index")?;
            let f = cur.int(cur.keyed(f, "f")?, "a positive restriction degree")?;
            m.types.push(TypeLine { curve: z.to_string(), spec: TypeSpec::Onto { target, e, f }, loc });
        }
        ["type", z, "2"] => m.types.push(TypeLine { curve: z.to_string(), spec: TypeSpec::BoundaryPoint, loc }),
        ["type", z, "4"] => m.types.push(TypeLine { curve: z.to_string(), spec: TypeSpec::AffinePoint, loc }),
        ["type", z, "3", e] => {
            let e = cur.int(cur.keyed(e, "e")?, "a positive ramification index")?;
            m.types.push(TypeLine { curve: z.to_string(), spec: TypeSpec::Dicritical { e }, loc });
        }
        ["type", _, code, ..] => return cur.err(code, "expected 'type <z> 1 target= e= f=', 'type <z> 2|4' or 'type <z> 3 e='"),
        ["pullback", y, ":", ..] => {
            let rhs = &body[body.find(':').unwrap() + 1..];
            let mut terms = Vec::new();
            for term in rhs.split('+') {
                let t = term.trim();
                if t.is_empty() {
                    return cur.err(term, "empty term");
                }
                let (c, id) = match t.split_once('*') {
                    Some((c, id)) => (cur.int(c.trim(), "an integer coefficient")?, id.trim()),
                    None => (1, t),
                };
                if !is_ident(id) {
                    return cur.err(id, format!("expected a curve, found '{id}'"));
                }
                terms.push((c, id.to_string()));
            }
            m.pullbacks.push(PullbackLine { target: y.to_string(), terms, loc });
        }
        _ => return cur.err(words[0], format!("unknown map instruction '{}'", words[0])),
    }
    Ok(())
}

fn parse_belyi_line(cur: &Cursor, body: &str, words: &[&str], b: &mut BelyiBlock) -> Result<(), ParseError> {
    match words[0] {
        "profile" => {
            if b.profile.is_some() {
                return cur.err(words[0], "profile given twice");
            }
            let text = body["profile".len()..].trim().to_string();
            text.parse::<RamificationProfile>().or_else(|e| cur.err(words[0], e.to_string()))?;
            b.profile = Some(text);
        }
        "points" => {
            let mut pts: [Option<String>; 3] = Default::default();
            for w in &words[1..] {
                let (k, v) = w.split_once('=').map_or_else(|| cur.err(w, "expected 0=, 1= or inf="), Ok)?;
                let slot = match k {
                    "0" => 0,
                    "1" => 1,
                    "inf" => 2,
                    _ => return cur.err(w, "expected 0=, 1= or inf="),
                };
                pts[slot] = Some(v.to_string());
            }
            let [Some(a), Some(c), Some(d)] = pts else {
                return cur.err(words[0], "points needs 0=, 1= and inf=");
            };
            b.points = Some([a, c, d]);
        }
        "num" | "den" => {
            let Some((_, expr)) = body.split_once('=') else {
                return cur.err(words[0], "expected 'num = <expression>'");
            };
            let slot = if words[0] == "num" { &mut b.num } else { &mut b.den };
            *slot = Some(expr.trim().to_string());
        }
        w => return cur.err(w, format!("unknown belyi instruction '{w}'")),
    }
    Ok(())
}

fn write_alias(out: &mut String, alias: &Option<String>) {
    if let Some(a) = alias {
        let _ = write!(out, " as {a}");
    }
}

impl fmt::Display for FrameworkFile {
    /// Canonical text that parses back to an equal structure.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for s in &self.surfaces {
            let _ = writeln!(out, "[surface {}]", s.name);
            match &s.body {
                SurfaceBody::Script(lines) => {
                    for l in lines {
                        match &l.op {
                            ScriptOp::P2 => out.push_str("p2"),
                            ScriptOp::BlowFree(c) => {
                                let _ = write!(out, "blowfree {c}");
                            }
                            ScriptOp::BlowEdge(a, b) => {
                                let _ = write!(out, "blowedge {a} {b}");
                            }
                            ScriptOp::Contract(c) => {
                                let _ = write!(out, "contract {c}");
                            }
                        }
                        write_alias(&mut out, &l.alias);
                        out.push('\n');
                    }
                }
                SurfaceBody::Declared { curves, edges } => {
                    for c in curves {
                        let _ = write!(out, "curve {} kbar={} selfint={}", c.id, c.kbar, c.self_int);
                        write_alias(&mut out, &c.alias);
                        out.push('\n');
                    }
                    for (a, b, _) in edges {
                        let _ = writeln!(out, "edge {a} {b}");
                    }
                }
            }
            out.push('\n');
        }
        if let Some(m) = &self.map {
            out.push_str("[map]\n");
            if let Some(d) = m.degree {
                let _ = writeln!(out, "degree {d}");
            }
            if m.partial {
                out.push_str("partial\n");
            }
            for n in &m.notes {
                let _ = writeln!(out, "note {n}");
            }
            for t in &m.types {
                let _ = match &t.spec {
                    TypeSpec::Onto { target, e, f } => writeln!(out, "type {} 1 target={target} e={e} f={f}", t.curve),
                    TypeSpec::BoundaryPoint => writeln!(out, "type {} 2", t.curve),
                    TypeSpec::Dicritical { e } => writeln!(out, "type {} 3 e={e}", t.curve),
                    TypeSpec::AffinePoint => writeln!(out, "type {} 4", t.curve),
                };
            }
            for p in &m.pullbacks {
                let terms: Vec<String> = p.terms.iter().map(|(c, id)| format!("{c}*{id}")).collect();
                let _ = writeln!(out, "pullback {} : {}", p.target, terms.join(" + "));
            }
            out.push('\n');
        }
        if let Some(v) = &self.valuations {
            out.push_str("[valuations]\n");
            for (name, list) in [("y1", &v.y1), ("y2", &v.y2)] {
                if !list.is_empty() {
                    let items: Vec<String> = list.iter().map(|(c, x)| format!("{c}={x}")).collect();
                    let _ = writeln!(out, "{name} {}", items.join(" "));
                }
            }
            out.push('\n');
        }
        if let Some(c) = &self.chain {
            out.push_str("[chain]\n");
            for (a, b, _) in &c.steps {
                let _ = writeln!(out, "blowedge {a} {b}");
            }
            if let Some((a, b)) = c.expect {
                let _ = writeln!(out, "expect {a} {b}");
            }
            out.push('\n');
        }
        for b in &self.belyi {
            let _ = writeln!(out, "[belyi {}]", b.curve);
            if let Some(p) = &b.profile {
                let _ = writeln!(out, "profile {p}");
            }
            if let Some([a, c, d]) = &b.points {
                let _ = writeln!(out, "points 0={a} 1={c} inf={d}");
            }
            if let Some(n) = &b.num {
                let _ = writeln!(out, "num = {n}");
            }
            if let Some(d) = &b.den {
                let _ = writeln!(out, "den = {d}");
            }
            out.push('\n');
        }
        if let Some(c) = &self.candidate {
            out.push_str("[candidate]\n");
            for (n, e, _) in &c.lines {
                let _ = writeln!(out, "{n} = {e}");
            }
        }
        f.write_str(out.trim_end())?;
        f.write_str("\n")
    }
}

/// A Belyi block with references resolved.
#[derive(Clone, Debug)]
pub struct BelyiSpec {
    pub curve: CurveId,
    pub profile: Option<RamificationProfile>,
    pub points: Option<[CurveId; 3]>,
    pub map: Option<(Poly, Poly)>,
    pub loc: Loc,
}

/// The candidate polynomial map.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub y1: Poly,
    pub y2: Poly,
    /// The Jacobian should be a nonzero constant times this.
    pub expect_jacobian: Option<Poly>,
}

/// A fully resolved framework.
#[derive(Clone, Debug)]
pub struct Framework {
    pub surfaces: Vec<(String, Surface)>,
    pub map: Option<FrameworkMap>,
    pub map_notes: Vec<String>,
    pub valuations: Option<ValuationVector>,
    pub chain: Vec<(ChainRef, ChainRef)>,
    pub chain_expect: Option<(i64, i64)>,
    pub belyi: Vec<BelyiSpec>,
    pub candidate: Option<Candidate>,
}

impl Framework {
    pub fn surface(&self, name: &str) -> Option<&Surface> {
        self.surfaces.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

fn graph_err(loc: Loc) -> impl Fn(GraphError) -> LoadError {
    move |e| LoadError::Graph(loc.0, e)
}

fn build_surface(block: &SurfaceBlock) -> Result<Surface, LoadError> {
    let mut g = SurfaceGraph::new();
    match &block.body {
        SurfaceBody::Script(lines) => {
            for l in lines {
                let err = graph_err(l.loc);
                let created = match &l.op {
                    ScriptOp::P2 => Some(g.projective_plane().map_err(&err)?),
                    ScriptOp::BlowFree(c) => Some(g.blowup_free(g.resolve(c).map_err(&err)?).map_err(&err)?),
                    ScriptOp::BlowEdge(a, b) => {
                        let (a, b) = (g.resolve(a).map_err(&err)?, g.resolve(b).map_err(&err)?);
                        Some(g.blowup_edge(a, b).map_err(&err)?)
                    }
                    ScriptOp::Contract(c) => {
                        g.contract(g.resolve(c).map_err(&err)?).map_err(&err)?;
                        None
                    }
                };
                if let (Some(name), Some(c)) = (&l.alias, created) {
                    g.set_name(name, c).map_err(&err)?;
                }
            }
        }
        SurfaceBody::Declared { curves, edges } => {
            let nodes: Vec<CurveNode> =
                curves.iter().map(|c| CurveNode { id: CurveId(c.id), kbar: c.kbar, self_int: c.self_int }).collect();
            let mut names = BTreeMap::new();
            for c in curves {
                if let Some(a) = &c.alias {
                    if names.insert(a.clone(), CurveId(c.id)).is_some() {
                        return Err(LoadError::Graph(c.loc.0, GraphError::DuplicateName(a.clone())));
                    }
                }
            }
            let resolve = |t: &str, loc: Loc| -> Result<CurveId, LoadError> {
                if let Some(c) = names.get(t) {
                    return Ok(*c);
                }
                t.parse::<u32>().map(CurveId).map_err(|_| LoadError::Graph(loc.0, GraphError::UnknownCurve(t.to_string())))
            };
            let mut es = Vec::new();
            for (a, b, loc) in edges {
                es.push((resolve(a, *loc)?, resolve(b, *loc)?));
            }
            let first = curves.first().map_or(block.loc, |c| c.loc);
            g = SurfaceGraph::declare(&nodes, &es).map_err(graph_err(first))?;
            for (n, c) in names {
                g.set_name(&n, c).map_err(graph_err(first))?;
            }
        }
    }
    if g.is_empty() {
        return Err(LoadError::Structure(block.loc.0, format!("surface '{}' has no curves", block.name)));
    }
    Ok(g.freeze())
}

fn resolve_in(s: &Surface, token: &str, loc: Loc) -> Result<CurveId, LoadError> {
    s.resolve(token).map_err(graph_err(loc))
}

/// Resolves every reference and builds the surfaces and the map.
pub fn load(file: &FrameworkFile) -> Result<Framework, LoadError> {
    let mut surfaces = Vec::new();
    for b in &file.surfaces {
        surfaces.push((b.name.clone(), build_surface(b)?));
    }
    let find = |name: &str| surfaces.iter().find(|(n, _)| n == name).map(|(_, s)| s.clone());
    let needs_pair = file.map.is_some() || file.valuations.is_some() || file.chain.is_some() || !file.belyi.is_empty();
    let (z, y) = match (find("Z"), find("Y")) {
        (Some(z), Some(y)) => (Some(z), Some(y)),
        _ if needs_pair => {
            return Err(LoadError::Structure(
                file.map.as_ref().map_or(1, |m| m.loc.0),
                "map, valuations, chain and belyi blocks need surfaces named Z and Y".into(),
            ))
        }
        _ => (None, None),
    };
    if needs_pair && file.surfaces.len() != 2 {
        return Err(LoadError::Structure(1, "a framework with a map has exactly two surfaces, Z and Y".into()));
    }
    let mut map = None;
    let mut map_notes = Vec::new();
    if let Some(mb) = &file.map {
        let (z, y) = (z.clone().unwrap(), y.clone().unwrap());
        let degree = mb.degree.ok_or_else(|| LoadError::Structure(mb.loc.0, "map block needs a degree line".into()))?;
        let mut types = BTreeMap::new();
        for t in &mb.types {
            let c = resolve_in(&z, &t.curve, t.loc)?;
            let ty = match &t.spec {
                TypeSpec::Onto { target, e, f } => {
                    CurveType::OntoBoundaryCurve { target: resolve_in(&y, target, t.loc)?, e: *e, f: *f }
                }
                TypeSpec::BoundaryPoint => CurveType::ToBoundaryPoint,
                TypeSpec::Dicritical { e } => CurveType::Dicritical { e: *e },
                TypeSpec::AffinePoint => CurveType::ToAffinePoint,
            };
            if types.insert(c, ty).is_some() {
                return Err(LoadError::Structure(t.loc.0, format!("curve {} typed twice", t.curve)));
            }
        }
        let mut pull: BTreeMap<CurveId, BTreeMap<CurveId, i64>> = BTreeMap::new();
        for p in &mb.pullbacks {
            let f = resolve_in(&y, &p.target, p.loc)?;
            let row = pull.entry(f).or_default();
            for (c, id) in &p.terms {
                let e = resolve_in(&z, id, p.loc)?;
                if let Some(CurveType::Dicritical { .. } | CurveType::ToAffinePoint) = types.get(&e) {
                    let code = types[&e].code();
                    return Err(LoadError::Map(p.loc.0, MapError::SupportOnNonBoundaryType { curve: e, target: f, code }));
                }
                if row.insert(e, *c).is_some() {
                    return Err(LoadError::Structure(p.loc.0, format!("curve {id} appears twice in the pullback of {}", p.target)));
                }
            }
        }
        map = Some(FrameworkMap::new(z, y, degree, types, pull, mb.partial).map_err(|e| LoadError::Map(mb.loc.0, e))?);
        map_notes = mb.notes.clone();
    }
    let valuations = match &file.valuations {
        None => None,
        Some(vb) => {
            let y = y.clone().unwrap();
            let mut v1 = BTreeMap::new();
            let mut v2 = BTreeMap::new();
            for (list, dest) in [(&vb.y1, &mut v1), (&vb.y2, &mut v2)] {
                for (c, x) in list {
                    let id = resolve_in(&y, c, vb.loc)?;
                    if dest.insert(id, *x).is_some() {
                        return Err(LoadError::Structure(vb.loc.0, format!("valuation of curve {c} given twice")));
                    }
                }
            }
            let mut out = ValuationVector::new();
            for c in y.ids() {
                match (v1.get(&c), v2.get(&c)) {
                    (Some(a), Some(b)) => {
                        out.insert(c, (*a, *b));
                    }
                    _ => return Err(LoadError::Structure(vb.loc.0, format!("valuations missing for target curve {c}"))),
                }
            }
            Some(out)
        }
    };
    let mut chain = Vec::new();
    let mut chain_expect = None;
    if let Some(cb) = &file.chain {
        let z = z.clone().unwrap();
        for (i, (a, b, loc)) in cb.steps.iter().enumerate() {
            let r = |t: &str| -> Result<ChainRef, LoadError> {
                if let Some(k) = t.strip_prefix('#') {
                    let k: usize = k.parse().map_err(|_| LoadError::Structure(loc.0, format!("bad step reference '{t}'")))?;
                    if k == 0 || k > i {
                        return Err(LoadError::Structure(loc.0, format!("step reference '{t}' does not name an earlier step")));
                    }
                    Ok(ChainRef::Step(k))
                } else {
                    Ok(ChainRef::Curve(resolve_in(&z, t, *loc)?))
                }
            };
            chain.push((r(a)?, r(b)?));
        }
        chain_expect = cb.expect;
        if valuations.is_none() {
            return Err(LoadError::Structure(cb.loc.0, "a chain needs a [valuations] block".into()));
        }
    }
    let mut belyi = Vec::new();
    for bb in &file.belyi {
        let z = z.clone().unwrap();
        let y = y.clone().unwrap();
        let curve = resolve_in(&z, &bb.curve, bb.loc)?;
        let profile = match &bb.profile {
            Some(p) => Some(p.parse::<RamificationProfile>().map_err(|e| LoadError::Belyi(bb.loc.0, e))?),
            None => None,
        };
        let points = match &bb.points {
            Some([a, b, c]) => Some([resolve_in(&y, a, bb.loc)?, resolve_in(&y, b, bb.loc)?, resolve_in(&y, c, bb.loc)?]),
            None => None,
        };
        let map = match (&bb.num, &bb.den) {
            (Some(n), Some(d)) => {
                let defs = Definitions::new();
                let n = parse_with(n, &defs).map_err(|e| LoadError::Arith(bb.loc.0, e))?;
                let d = parse_with(d, &defs).map_err(|e| LoadError::Arith(bb.loc.0, e))?;
                Some((n, d))
            }
            (None, None) => None,
            _ => return Err(LoadError::Structure(bb.loc.0, "num and den must be given together".into())),
        };
        belyi.push(BelyiSpec { curve, profile, points, map, loc: bb.loc });
    }
    let candidate = match &file.candidate {
        None => None,
        Some(cb) => {
            let mut defs = Definitions::new();
            let (mut y1, mut y2, mut expect) = (None, None, None);
            for (name, expr, loc) in &cb.lines {
                let p = parse_with(expr, &defs).map_err(|e| LoadError::Arith(loc.0, e))?;
                match name.as_str() {
                    "y1" => y1 = Some(p),
                    "y2" => y2 = Some(p),
                    "expect_jacobian" => expect = Some(p),
                    _ => {
                        defs.insert(name.clone(), p);
                    }
                }
            }
            match (y1, y2) {
                (Some(y1), Some(y2)) => Some(Candidate { y1, y2, expect_jacobian: expect }),
                _ => return Err(LoadError::Structure(cb.loc.0, "candidate block needs y1 and y2".into())),
            }
        }
    };
    Ok(Framework { surfaces, map, map_notes, valuations, chain, chain_expect, belyi, candidate })
}

/// Parse and load in one step.
#[derive(Debug, Error)]
pub enum FileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Load(#[from] LoadError),
}

pub fn read_framework(text: &str) -> Result<Framework, FileError> {
    Ok(load(&parse(text)?)?)
}
