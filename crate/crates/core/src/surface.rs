//! Trees of rational curves at infinity, built by blowups and contractions
//! of the projective plane or declared directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CurveId(pub u32);

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveNode {
    pub id: CurveId,
    /// Coefficient of the curve in the log-canonical divisor.
    pub kbar: i64,
    pub self_int: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ConstructionEvent {
    ProjectivePlane { created: CurveId },
    BlowupFree { on: CurveId, created: CurveId },
    BlowupEdge { a: CurveId, b: CurveId, created: CurveId },
    Contract { curve: CurveId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown curve {0}")]
    UnknownCurve(String),
    #[error("curves {0} and {1} do not meet")]
    NotAdjacent(CurveId, CurveId),
    #[error("curve {0} has self-intersection {1}, only (-1)-curves can be contracted")]
    NotExceptional(CurveId, i64),
    #[error("contracting curve {0} of valency {1} would leave a non-tree boundary")]
    ValencyTooHigh(CurveId, usize),
    #[error("curve {0} is the last boundary curve")]
    LastCurve(CurveId),
    #[error("neighbours {0} and {1} of the contracted curve already meet")]
    NeighboursMeet(CurveId, CurveId),
    #[error("the plane can only start an empty construction")]
    AlreadyStarted,
    #[error("curve {0} declared twice")]
    DuplicateCurve(CurveId),
    #[error("name '{0}' already in use")]
    DuplicateName(String),
    #[error("edge {0} -- {1} is a loop")]
    SelfLoop(CurveId, CurveId),
    #[error("edge {0} -- {1} declared twice")]
    DuplicateEdge(CurveId, CurveId),
    #[error("declared graph is not a tree: {0}")]
    NotATree(String),
}

/// Mutable dual graph of the boundary divisor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurfaceGraph {
    nodes: BTreeMap<CurveId, CurveNode>,
    adj: BTreeMap<CurveId, BTreeSet<CurveId>>,
    next_id: u32,
    log: Vec<ConstructionEvent>,
    names: BTreeMap<String, CurveId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjunctionViolation {
    pub curve: CurveId,
    pub expected: i64,
    pub actual: i64,
}

/// Self-intersection recovered from labels through adjunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recovered {
    Value(i64),
    /// Label 0: adjunction does not involve the self-intersection.
    Undetermined,
    /// The adjunction quotient is not an integer.
    NonIntegral,
}

impl SurfaceGraph {
    pub fn new() -> SurfaceGraph {
        SurfaceGraph { next_id: 1, ..Default::default() }
    }

    /// Builds a graph from explicit curves and edges, checking that it is a tree.
    pub fn declare(curves: &[CurveNode], edges: &[(CurveId, CurveId)]) -> Result<SurfaceGraph, GraphError> {
        let mut g = SurfaceGraph::new();
        for c in curves {
            if g.nodes.insert(c.id, c.clone()).is_some() {
                return Err(GraphError::DuplicateCurve(c.id));
            }
            g.adj.insert(c.id, BTreeSet::new());
            g.next_id = g.next_id.max(c.id.0 + 1);
        }
        for &(a, b) in edges {
            g.require(a)?;
            g.require(b)?;
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            if !g.adj.get_mut(&a).unwrap().insert(b) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            g.adj.get_mut(&b).unwrap().insert(a);
        }
        if !g.nodes.is_empty() {
            if edges.len() + 1 != g.nodes.len() {
                return Err(GraphError::NotATree(format!("{} curves but {} edges", g.nodes.len(), edges.len())));
            }
            if g.components() != 1 {
                return Err(GraphError::NotATree("graph is disconnected".into()));
            }
        }
        Ok(g)
    }

    fn components(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for &start in self.nodes.keys() {
            if !seen.insert(start) {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[&v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Replays a construction log into a fresh graph.
    pub fn replay(log: &[ConstructionEvent]) -> Result<SurfaceGraph, GraphError> {
        let mut g = SurfaceGraph::new();
        for ev in log {
            match *ev {
                ConstructionEvent::ProjectivePlane { .. } => {
                    g.projective_plane()?;
                }
                ConstructionEvent::BlowupFree { on, .. } => {
                    g.blowup_free(on)?;
                }
                ConstructionEvent::BlowupEdge { a, b, .. } => {
                    g.blowup_edge(a, b)?;
                }
                ConstructionEvent::Contract { curve } => g.contract(curve)?,
            }
        }
        Ok(g)
    }

    fn require(&self, c: CurveId) -> Result<&CurveNode, GraphError> {
        self.nodes.get(&c).ok_or_else(|| GraphError::UnknownCurve(c.to_string()))
    }

    fn fresh(&mut self, kbar: i64, self_int: i64) -> CurveId {
        let id = CurveId(self.next_id);
        self.next_id += 1;
        self.nodes.insert(id, CurveNode { id, kbar, self_int });
        self.adj.insert(id, BTreeSet::new());
        id
    }

    fn link(&mut self, a: CurveId, b: CurveId) {
        self.adj.get_mut(&a).unwrap().insert(b);
        self.adj.get_mut(&b).unwrap().insert(a);
    }

    fn unlink(&mut self, a: CurveId, b: CurveId) {
        self.adj.get_mut(&a).unwrap().remove(&b);
        self.adj.get_mut(&b).unwrap().remove(&a);
    }

    /// Starts from the line at infinity of the plane.
    pub fn projective_plane(&mut self) -> Result<CurveId, GraphError> {
        if !self.log.is_empty() || !self.nodes.is_empty() {
            return Err(GraphError::AlreadyStarted);
        }
        let id = self.fresh(-2, 1);
        self.log.push(ConstructionEvent::ProjectivePlane { created: id });
        Ok(id)
    }

    /// Blows up a point of `c` that lies on no other boundary curve.
    pub fn blowup_free(&mut self, c: CurveId) -> Result<CurveId, GraphError> {
        let kbar = self.require(c)?.kbar;
        self.nodes.get_mut(&c).unwrap().self_int -= 1;
        let e = self.fresh(kbar + 1, -1);
        self.link(c, e);
        self.log.push(ConstructionEvent::BlowupFree { on: c, created: e });
        Ok(e)
    }

    /// Blows up the intersection point of two adjacent curves.
    pub fn blowup_edge(&mut self, a: CurveId, b: CurveId) -> Result<CurveId, GraphError> {
        let ka = self.require(a)?.kbar;
        let kb = self.require(b)?.kbar;
        if !self.adj[&a].contains(&b) {
            return Err(GraphError::NotAdjacent(a, b));
        }
        self.nodes.get_mut(&a).unwrap().self_int -= 1;
        self.nodes.get_mut(&b).unwrap().self_int -= 1;
        let e = self.fresh(ka + kb, -1);
        self.unlink(a, b);
        self.link(a, e);
        self.link(b, e);
        self.log.push(ConstructionEvent::BlowupEdge { a, b, created: e });
        Ok(e)
    }

    /// Contracts a (-1)-curve of valency at most two.
    pub fn contract(&mut self, c: CurveId) -> Result<(), GraphError> {
        let node = self.require(c)?;
        if node.self_int != -1 {
            return Err(GraphError::NotExceptional(c, node.self_int));
        }
        let nbrs: Vec<CurveId> = self.adj[&c].iter().copied().collect();
        if nbrs.len() > 2 {
            return Err(GraphError::ValencyTooHigh(c, nbrs.len()));
        }
        if self.nodes.len() == 1 {
            return Err(GraphError::LastCurve(c));
        }
        if let [a, b] = nbrs[..] {
            if self.adjacent(a, b) {
                return Err(GraphError::NeighboursMeet(a, b));
            }
        }
        for n in &nbrs {
            self.nodes.get_mut(n).unwrap().self_int += 1;
            self.adj.get_mut(n).unwrap().remove(&c);
        }
        if let [a, b] = nbrs[..] {
            self.link(a, b);
        }
        self.nodes.remove(&c);
        self.adj.remove(&c);
        self.names.retain(|_, v| *v != c);
        self.log.push(ConstructionEvent::Contract { curve: c });
        Ok(())
    }

    pub fn set_name(&mut self, name: &str, c: CurveId) -> Result<(), GraphError> {
        self.require(c)?;
        if self.names.contains_key(name) {
            return Err(GraphError::DuplicateName(name.to_string()));
        }
        self.names.insert(name.to_string(), c);
        Ok(())
    }

    /// Resolves a numeric id or a name.
    pub fn resolve(&self, token: &str) -> Result<CurveId, GraphError> {
        if let Some(c) = self.names.get(token) {
            return Ok(*c);
        }
        match token.parse::<u32>() {
            Ok(n) if self.nodes.contains_key(&CurveId(n)) => Ok(CurveId(n)),
            _ => Err(GraphError::UnknownCurve(token.to_string())),
        }
    }

    pub fn names(&self) -> &BTreeMap<String, CurveId> {
        &self.names
    }

    pub fn name_of(&self, c: CurveId) -> Option<&str> {
        self.names.iter().find(|(_, v)| **v == c).map(|(k, _)| k.as_str())
    }

    pub fn log(&self) -> &[ConstructionEvent] {
        &self.log
    }

    /// The line at infinity of the starting plane, if it survives.
    pub fn original_line(&self) -> Option<CurveId> {
        match self.log.first() {
            Some(ConstructionEvent::ProjectivePlane { created }) if self.nodes.contains_key(created) => Some(*created),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, c: CurveId) -> bool {
        self.nodes.contains_key(&c)
    }

    pub fn curve(&self, c: CurveId) -> Option<&CurveNode> {
        self.nodes.get(&c)
    }

    /// Curves in ascending id order.
    pub fn curves(&self) -> impl Iterator<Item = &CurveNode> {
        self.nodes.values()
    }

    pub fn ids(&self) -> Vec<CurveId> {
        self.nodes.keys().copied().collect()
    }

    pub fn neighbors(&self, c: CurveId) -> impl Iterator<Item = CurveId> + '_ {
        self.adj.get(&c).into_iter().flatten().copied()
    }

    pub fn valency(&self, c: CurveId) -> usize {
        self.adj.get(&c).map_or(0, |s| s.len())
    }

    pub fn adjacent(&self, a: CurveId, b: CurveId) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Each edge once, smaller id first.
    pub fn edges(&self) -> Vec<(CurveId, CurveId)> {
        let mut out = Vec::new();
        for (a, ns) in &self.adj {
            for b in ns {
                if a < b {
                    out.push((*a, *b));
                }
            }
        }
        out
    }

    /// Curves where `kbar * E^2 + sum(neighbour kbar) - valency != -2`.
    pub fn adjunction_audit(&self) -> Vec<AdjunctionViolation> {
        self.nodes
            .values()
            .filter_map(|c| {
                let s: i64 = self.neighbors(c.id).map(|n| self.nodes[&n].kbar).sum();
                let actual = c.kbar * c.self_int + s - self.valency(c.id) as i64;
                (actual != -2).then_some(AdjunctionViolation { curve: c.id, expected: -2, actual })
            })
            .collect()
    }

    pub fn selfint_from_labels(&self) -> BTreeMap<CurveId, Recovered> {
        self.nodes
            .values()
            .map(|c| {
                let s: i64 = self.neighbors(c.id).map(|n| self.nodes[&n].kbar).sum();
                let num = -2 - s + self.valency(c.id) as i64;
                let r = if c.kbar == 0 {
                    Recovered::Undetermined
                } else if num % c.kbar != 0 {
                    Recovered::NonIntegral
                } else {
                    Recovered::Value(num / c.kbar)
                };
                (c.id, r)
            })
            .collect()
    }

    /// A string that agrees for two graphs exactly when they are isomorphic
    /// as trees coloured by `(kbar, self_int)`.
    pub fn canonical_form(&self) -> String {
        let centers = self.centers();
        match centers[..] {
            [] => String::new(),
            [c] => self.encode(c, None),
            [a, b] => {
                let mut parts = [self.encode(a, Some(b)), self.encode(b, Some(a))];
                parts.sort();
                format!("[{}{}]", parts[0], parts[1])
            }
            _ => unreachable!("a tree has at most two centres"),
        }
    }

    fn centers(&self) -> Vec<CurveId> {
        let mut deg: BTreeMap<CurveId, usize> = self.adj.iter().map(|(k, v)| (*k, v.len())).collect();
        let mut layer: Vec<CurveId> = deg.iter().filter(|(_, d)| **d <= 1).map(|(k, _)| *k).collect();
        let mut remaining = deg.len();
        let mut removed = BTreeSet::new();
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for v in &layer {
                removed.insert(*v);
            }
            for v in &layer {
                for w in &self.adj[v] {
                    if removed.contains(w) {
                        continue;
                    }
                    let d = deg.get_mut(w).unwrap();
                    *d -= 1;
                    if *d == 1 {
                        next.push(*w);
                    }
                }
            }
            layer = next;
        }
        layer.sort();
        layer
    }

    fn encode(&self, v: CurveId, parent: Option<CurveId>) -> String {
        let n = &self.nodes[&v];
        let mut kids: Vec<String> =
            self.adj[&v].iter().filter(|w| Some(**w) != parent).map(|w| self.encode(*w, Some(v))).collect();
        kids.sort();
        format!("({},{}{})", n.kbar, n.self_int, kids.concat())
    }

    /// Graphviz rendering, one node per curve in ascending id order.
    pub fn to_dot(&self, title: &str) -> String {
        let mut s = format!("graph \"{}\" {{\n  node [shape=circle];\n", title.replace('"', "'"));
        for c in self.nodes.values() {
            let name = self.name_of(c.id).map(|n| format!(" {n}")).unwrap_or_default();
            s.push_str(&format!(
                "  c{} [label=\"{}\\nK̄={}, E²={}\", tooltip=\"#{}{}\"];\n",
                c.id, c.id, c.kbar, c.self_int, c.id, name
            ));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("  c{a} -- c{b};\n"));
        }
        s.push_str("}\n");
        s
    }

    /// Seals the graph for verification.
    pub fn freeze(self) -> Surface {
        Surface(Arc::new(self))
    }
}

/// An immutable, cheaply shared surface graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface(Arc<SurfaceGraph>);

impl Deref for Surface {
    type Target = SurfaceGraph;
    fn deref(&self) -> &SurfaceGraph {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_four_curves() {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        let e1 = g.blowup_free(l).unwrap();
        let e2 = g.blowup_edge(e1, l).unwrap();
        let e3 = g.blowup_edge(e2, l).unwrap();
        let row = |c: CurveId| (g.curve(c).unwrap().kbar, g.curve(c).unwrap().self_int);
        assert_eq!(row(e1), (-1, -2));
        assert_eq!(row(e2), (-3, -2));
        assert_eq!(row(e3), (-5, -1));
        assert_eq!(row(l), (-2, -2));
        assert!(g.adjunction_audit().is_empty());
    }

    #[test]
    fn contraction_joins_neighbours() {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        let e = g.blowup_free(l).unwrap();
        let f = g.blowup_free(e).unwrap();
        let m = g.blowup_edge(e, f).unwrap();
        g.contract(m).unwrap();
        assert!(g.adjacent(e, f));
        assert_eq!(g.curve(e).unwrap().self_int, -2);
        assert_eq!(g.curve(f).unwrap().self_int, -1);
        assert!(g.adjunction_audit().is_empty());
    }

    #[test]
    fn contract_rejects_non_exceptional() {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        assert_eq!(g.contract(l), Err(GraphError::NotExceptional(l, 1)));
    }

    #[test]
    fn declared_cycle_is_not_a_tree() {
        let c = |i| CurveNode { id: CurveId(i), kbar: -1, self_int: -1 };
        let r = SurfaceGraph::declare(&[c(1), c(2), c(3)], &[(CurveId(1), CurveId(2)), (CurveId(2), CurveId(3)), (CurveId(3), CurveId(1))]);
        assert!(matches!(r, Err(GraphError::NotATree(_))));
    }

    #[test]
    fn recovered_selfint_on_zero_label_is_undetermined() {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        let e = g.blowup_free(l).unwrap();
        let z = g.blowup_free(e).unwrap();
        let r = g.selfint_from_labels();
        assert_eq!(r[&z], Recovered::Undetermined);
        assert_eq!(r[&e], Recovered::Value(-2));
    }
}
