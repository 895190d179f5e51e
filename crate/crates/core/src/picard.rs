//! Pullback and pushforward between the boundary Picard lattices of a
//! source surface Z and a target surface Y, and the checks a Keller map
//! imposes on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::intersection::GramMatrix;
use crate::report::{CheckResult, Status, Violation};
use crate::surface::{CurveId, Surface};

/// How a boundary curve of Z behaves under the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveType {
    /// Dominates the boundary curve `target` with ramification `e` and
    /// restriction degree `f`.
    OntoBoundaryCurve { target: CurveId, e: u32, f: u32 },
    /// Contracted to a point at infinity.
    ToBoundaryPoint,
    /// Maps onto a curve meeting the affine plane.
    Dicritical { e: u32 },
    /// Contracted to a point of the affine plane.
    ToAffinePoint,
}

impl CurveType {
    /// The classical numbering 1..4.
    pub fn code(&self) -> u8 {
        match self {
            CurveType::OntoBoundaryCurve { .. } => 1,
            CurveType::ToBoundaryPoint => 2,
            CurveType::Dicritical { .. } => 3,
            CurveType::ToAffinePoint => 4,
        }
    }

    /// `(target, e, f)` for curves dominating a boundary curve.
    pub fn onto(&self) -> Option<(CurveId, u32, u32)> {
        match *self {
            CurveType::OntoBoundaryCurve { target, e, f } => Some((target, e, f)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("source curve {0} has no type")]
    MissingType(CurveId),
    #[error("type given for unknown source curve {0}")]
    UnknownSource(CurveId),
    #[error("unknown target curve {0}")]
    UnknownTarget(CurveId),
    #[error("source curve {0}: ramification and restriction degrees must be positive")]
    NonPositiveIndex(CurveId),
    #[error("pullback coefficient of source curve {0} in target curve {1} is negative")]
    NegativeCoefficient(CurveId, CurveId),
    #[error("pullback of target curve {target} is supported on curve {curve} of type {code}")]
    SupportOnNonBoundaryType { curve: CurveId, target: CurveId, code: u8 },
}

/// A candidate framework: surfaces, curve types and the pullback matrix.
/// Pushforward is derived from the types, never stored.
#[derive(Clone, Debug)]
pub struct FrameworkMap {
    pub source: Surface,
    pub target: Surface,
    pub degree: u32,
    types: BTreeMap<CurveId, CurveType>,
    /// `pullback[F][E]` is the coefficient of E in the pullback of F.
    pullback: BTreeMap<CurveId, BTreeMap<CurveId, i64>>,
    /// The pullback rows are known to be incomplete.
    pub partial: bool,
}

pub type ValuationVector = BTreeMap<CurveId, (i64, i64)>;

impl FrameworkMap {
    pub fn new(
        source: Surface,
        target: Surface,
        degree: u32,
        types: BTreeMap<CurveId, CurveType>,
        pullback: BTreeMap<CurveId, BTreeMap<CurveId, i64>>,
        partial: bool,
    ) -> Result<FrameworkMap, MapError> {
        if degree == 0 {
            return Err(MapError::ZeroDegree);
        }
        for c in types.keys() {
            if !source.contains(*c) {
                return Err(MapError::UnknownSource(*c));
            }
        }
        for c in source.ids() {
            match types.get(&c) {
                None => return Err(MapError::MissingType(c)),
                Some(CurveType::OntoBoundaryCurve { target: t, e, f }) => {
                    if !target.contains(*t) {
                        return Err(MapError::UnknownTarget(*t));
                    }
                    if *e == 0 || *f == 0 {
                        return Err(MapError::NonPositiveIndex(c));
                    }
                }
                Some(CurveType::Dicritical { e: 0 }) => return Err(MapError::NonPositiveIndex(c)),
                Some(_) => {}
            }
        }
        let mut cleaned = BTreeMap::new();
        for (f, row) in pullback {
            if !target.contains(f) {
                return Err(MapError::UnknownTarget(f));
            }
            let mut r = BTreeMap::new();
            for (e, c) in row {
                let t = types.get(&e).ok_or(MapError::UnknownSource(e))?;
                if c < 0 {
                    return Err(MapError::NegativeCoefficient(e, f));
                }
                if c == 0 {
                    continue;
                }
                if matches!(t, CurveType::Dicritical { .. } | CurveType::ToAffinePoint) {
                    return Err(MapError::SupportOnNonBoundaryType { curve: e, target: f, code: t.code() });
                }
                r.insert(e, c);
            }
            cleaned.insert(f, r);
        }
        Ok(FrameworkMap { source, target, degree, types, pullback: cleaned, partial })
    }

    pub fn curve_type(&self, e: CurveId) -> CurveType {
        self.types[&e]
    }

    pub fn types(&self) -> &BTreeMap<CurveId, CurveType> {
        &self.types
    }

    pub fn pullback_rows(&self) -> &BTreeMap<CurveId, BTreeMap<CurveId, i64>> {
        &self.pullback
    }

    /// Coefficient of `e` in the pullback of `f`.
    pub fn p(&self, e: CurveId, f: CurveId) -> i64 {
        self.pullback.get(&f).and_then(|r| r.get(&e)).copied().unwrap_or(0)
    }

    /// Whether the pullback of `f` was supplied. Always true on complete maps.
    pub fn has_row(&self, f: CurveId) -> bool {
        !self.partial || self.pullback.contains_key(&f)
    }

    /// `P[e, f]`, falling back to the ramification index of a curve dominating
    /// `f` when the row of `f` was not supplied.
    pub fn p_or_ramification(&self, e: CurveId, f: CurveId) -> i64 {
        if self.has_row(f) {
            return self.p(e, f);
        }
        match self.types[&e].onto() {
            Some((tg, ram, _)) if tg == f => ram as i64,
            _ => 0,
        }
    }

    /// Pushforward coefficient of `e` on `f`; `None` on dicritical curves.
    pub fn q(&self, f: CurveId, e: CurveId) -> Option<i64> {
        match self.types[&e] {
            CurveType::OntoBoundaryCurve { target, f: deg, .. } => Some(if target == f { deg as i64 } else { 0 }),
            CurveType::Dicritical { .. } => None,
            _ => Some(0),
        }
    }

    /// `(G_Z P)[e, f]`, the intersection of `e` with the pullback of `f`.
    pub fn meets_pullback(&self, gz: &GramMatrix, e: CurveId, f: CurveId) -> i64 {
        let Some(row) = self.pullback.get(&f) else { return 0 };
        row.iter().map(|(e2, c)| gz.get(e, *e2).unwrap() * c).sum()
    }

    /// `Q P = d Id` on the target basis.
    pub fn verify_degree_identity(&self) -> CheckResult {
        let d = self.degree as i64;
        let ys = self.target.ids();
        let mut v = Vec::new();
        for &f in &ys {
            for &f2 in ys.iter().filter(|f2| self.has_row(**f2)) {
                let got: i64 = self
                    .types
                    .iter()
                    .filter_map(|(e, t)| t.onto().filter(|(tg, _, _)| *tg == f).map(|(_, _, deg)| deg as i64 * self.p(*e, f2)))
                    .sum();
                let want = if f == f2 { d } else { 0 };
                if got != want {
                    v.push(Violation::new("degree_identity", vec![f, f2], want, got));
                }
            }
        }
        CheckResult::from_violations("degree_identity", v).with_note(format!("d={d}"))
    }

    /// `P^T G_Z P = d G_Y`, and `G_Z P = Q^T G_Y` on rows where pushforward is defined.
    pub fn verify_projection_formula(&self) -> CheckResult {
        let gz = GramMatrix::of(&self.source);
        let gy = GramMatrix::of(&self.target);
        let d = self.degree as i64;
        let ys = self.target.ids();
        let mut v = Vec::new();
        let gzp: BTreeMap<(CurveId, CurveId), i64> = self
            .source
            .ids()
            .into_iter()
            .flat_map(|e| ys.iter().map(move |f| (e, *f)))
            .map(|(e, f)| ((e, f), self.meets_pullback(&gz, e, f)))
            .collect();
        let rows: Vec<CurveId> = ys.iter().copied().filter(|f| self.has_row(*f)).collect();
        for &f in &rows {
            for &f2 in &rows {
                let got: i64 = self.pullback.get(&f).map_or(0, |r| r.iter().map(|(e, c)| c * gzp[&(*e, f2)]).sum());
                let want = d * gy.get(f, f2).unwrap();
                if got != want {
                    v.push(Violation::new("projection_formula.pullback_square", vec![f, f2], want, got));
                }
            }
        }
        for (&e, t) in &self.types {
            if matches!(t, CurveType::Dicritical { .. }) {
                continue;
            }
            for &f in &rows {
                let want: i64 = match t.onto() {
                    Some((tg, _, deg)) => deg as i64 * gy.get(tg, f).unwrap(),
                    None => 0,
                };
                let got = gzp[&(e, f)];
                if got != want {
                    v.push(Violation::new("projection_formula.push_pull", vec![e, f], want, got));
                }
            }
        }
        let mut r = CheckResult::from_violations("projection_formula", v);
        if self.partial {
            r = r.with_note("pullback rows marked partial: identities checked on the rows supplied");
        }
        r
    }

    /// Type-1 curves: label is `e` times the target label, and `P[E, target] = e`.
    pub fn verify_label_compatibility(&self) -> CheckResult {
        let mut v = Vec::new();
        let mut checked = 0;
        for (&e, t) in &self.types {
            let Some((tg, ram, _)) = t.onto() else { continue };
            checked += 1;
            let ke = self.source.curve(e).unwrap().kbar;
            let kf = self.target.curve(tg).unwrap().kbar;
            if ke != ram as i64 * kf {
                v.push(Violation::new("label_compatibility.kbar", vec![e, tg], ram as i64 * kf, ke));
            }
            if !self.has_row(tg) {
                continue;
            }
            let p = self.p(e, tg);
            if p != ram as i64 {
                v.push(Violation::new("label_compatibility.pullback", vec![e, tg], ram, p));
            }
        }
        CheckResult::from_violations("label_compatibility", v).with_note(format!("{checked} curves dominating a boundary curve"))
    }

    /// Sum of `e f` over the curves dominating each hit target curve.
    pub fn fiber_sums(&self) -> BTreeMap<CurveId, i64> {
        let mut out = BTreeMap::new();
        for t in self.types.values() {
            if let Some((tg, e, f)) = t.onto() {
                *out.entry(tg).or_insert(0) += (e * f) as i64;
            }
        }
        out
    }

    pub fn verify_fiber_degrees(&self) -> CheckResult {
        let d = self.degree as i64;
        let sums = self.fiber_sums();
        let v = sums
            .iter()
            .filter(|(_, s)| **s != d)
            .map(|(f, s)| Violation::new("fiber_degrees", vec![*f], d, s))
            .collect();
        let hit: Vec<String> = sums.keys().map(|c| self.target_name(*c)).collect();
        CheckResult::from_violations("fiber_degrees", v).with_note(format!("{} target curves hit: {}", sums.len(), hit.join(" ")))
    }

    /// Rows of `G_Z P` on the dicritical curves.
    pub fn dicritical_vectors(&self) -> BTreeMap<CurveId, BTreeMap<CurveId, i64>> {
        let gz = GramMatrix::of(&self.source);
        self.types
            .iter()
            .filter(|(_, t)| matches!(t, CurveType::Dicritical { .. }))
            .map(|(&e, _)| {
                let row = self
                    .target
                    .ids()
                    .into_iter()
                    .map(|f| (f, self.meets_pullback(&gz, e, f)))
                    .filter(|(_, x)| *x != 0)
                    .collect();
                (e, row)
            })
            .collect()
    }

    /// Dicritical curves may only meet pullbacks of label-0 curves, non-negatively.
    pub fn verify_dicritical_profile(&self) -> CheckResult {
        let mut v = Vec::new();
        let mut notes = Vec::new();
        for (e, row) in self.dicritical_vectors() {
            let shown: Vec<String> = row.iter().map(|(f, x)| format!("{}:{x}", self.target_name(*f))).collect();
            notes.push(format!("curve {}: {}", self.source_name(e), if shown.is_empty() { "0".into() } else { shown.join(" ") }));
            for (f, x) in row {
                let kbar = self.target.curve(f).unwrap().kbar;
                if x < 0 {
                    v.push(Violation::new("dicritical_profile.sign", vec![e, f], ">= 0", x));
                }
                if kbar != 0 {
                    v.push(Violation::new("dicritical_profile.label", vec![e, f], "0 on curves with nonzero label", x));
                }
            }
        }
        let mut r = CheckResult::from_violations("dicritical_profile", v);
        r.notes = notes;
        r
    }

    /// Coefficient of each source curve in the pullback of the target's
    /// log-canonical divisor, compared with its own label. Differences are
    /// expected over contracted points with nonnegative label and on
    /// non-boundary types, and are only listed there.
    pub fn kbar_pullback(&self) -> CheckResult {
        let mut hard = Vec::new();
        let mut soft = Vec::new();
        for (&e, t) in &self.types {
            let coef: i64 = self.target.curves().map(|f| self.p_or_ramification(e, f.id) * f.kbar).sum();
            let kbar = self.source.curve(e).unwrap().kbar;
            if coef == kbar {
                continue;
            }
            let viol = Violation::new("kbar_pullback", vec![e], kbar, coef);
            match t {
                CurveType::OntoBoundaryCurve { .. } => hard.push(viol),
                CurveType::ToBoundaryPoint if kbar < 0 => hard.push(viol),
                _ => soft.push(viol),
            }
        }
        let listed = soft.len();
        let mut r = CheckResult::from_violations("kbar_pullback", hard);
        if r.status == Status::Pass {
            r.status = if listed > 0 { Status::Info } else { Status::Pass };
        }
        r.violations.extend(soft);
        r.violations.sort();
        r = r.with_note(format!("{listed} informational differences on contracted curves with label >= 0 and non-boundary types"));
        if self.partial {
            r = r.with_note("pullback rows marked partial: missing rows contribute only their dominating curves");
        }
        r
    }

    /// Valuations on Z from valuations on Y: `v_Z(E) = sum_F P[E,F] v_Y(F)`.
    pub fn propagate_valuations(&self, vy: &ValuationVector) -> ValuationVector {
        let mut out: ValuationVector = self.source.ids().into_iter().map(|e| (e, (0, 0))).collect();
        for (f, row) in &self.pullback {
            let (a, b) = vy.get(f).copied().unwrap_or((0, 0));
            for (e, c) in row {
                let slot = out.get_mut(e).unwrap();
                slot.0 += c * a;
                slot.1 += c * b;
            }
        }
        out
    }

    fn source_name(&self, c: CurveId) -> String {
        display_name(&self.source, c)
    }

    pub fn target_name(&self, c: CurveId) -> String {
        display_name(&self.target, c)
    }
}

pub(crate) fn display_name(s: &Surface, c: CurveId) -> String {
    match s.name_of(c) {
        Some(n) => format!("{c}({n})"),
        None => c.to_string(),
    }
}

/// A chain step operand: a source curve or the result of an earlier step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainRef {
    Curve(CurveId),
    /// One-based step index.
    Step(usize),
}

impl fmt::Display for ChainRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainRef::Curve(c) => write!(f, "{c}"),
            ChainRef::Step(k) => write!(f, "#{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("chain step {step} refers to unknown curve {curve}")]
    UnknownCurve { step: usize, curve: CurveId },
    #[error("chain step {step} refers to step #{target}, which is not earlier")]
    ForwardReference { step: usize, target: usize },
}

/// Valuations of the re-created curves and the degrees read off the last one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSummary {
    pub steps: Vec<(i64, i64)>,
    /// Negated valuations of the last step: the total degrees.
    pub total: Option<(i64, i64)>,
    /// Per-variable degrees of each component, ascending.
    pub separate: Option<((i64, i64), (i64, i64))>,
}

/// Re-creates the contracted curves between Z and the original line by
/// successive blowups of intersection points; each new valuation is the sum
/// of its parents'.
pub fn degree_pair(vz: &ValuationVector, chain: &[(ChainRef, ChainRef)]) -> Result<DegreeSummary, ChainError> {
    let mut steps: Vec<(i64, i64)> = Vec::new();
    let lookup = |steps: &Vec<(i64, i64)>, r: ChainRef, step: usize| -> Result<(i64, i64), ChainError> {
        match r {
            ChainRef::Curve(c) => vz.get(&c).copied().ok_or(ChainError::UnknownCurve { step, curve: c }),
            ChainRef::Step(k) if k >= 1 && k <= steps.len() => Ok(steps[k - 1]),
            ChainRef::Step(k) => Err(ChainError::ForwardReference { step, target: k }),
        }
    };
    let mut last_parents = None;
    for (i, (a, b)) in chain.iter().enumerate() {
        let va = lookup(&steps, *a, i + 1)?;
        let vb = lookup(&steps, *b, i + 1)?;
        steps.push((va.0 + vb.0, va.1 + vb.1));
        last_parents = Some((va, vb));
    }
    let total = steps.last().map(|(a, b)| (-a, -b));
    let separate = last_parents.map(|(va, vb)| (sorted_pair(-va.0, -vb.0), sorted_pair(-va.1, -vb.1)));
    Ok(DegreeSummary { steps, total, separate })
}

fn sorted_pair(a: i64, b: i64) -> (i64, i64) {
    (a.min(b), a.max(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceGraph;

    fn fig_one() -> Surface {
        let mut g = SurfaceGraph::new();
        let l = g.projective_plane().unwrap();
        let a = g.blowup_free(l).unwrap();
        let b = g.blowup_edge(a, l).unwrap();
        g.blowup_edge(b, l).unwrap();
        g.freeze()
    }

    fn identity(s: &Surface) -> FrameworkMap {
        let types = s.ids().into_iter().map(|c| (c, CurveType::OntoBoundaryCurve { target: c, e: 1, f: 1 })).collect();
        let pull = s.ids().into_iter().map(|c| (c, [(c, 1)].into_iter().collect())).collect();
        FrameworkMap::new(s.clone(), s.clone(), 1, types, pull, false).unwrap()
    }

    #[test]
    fn identity_framework_passes_everything() {
        let m = identity(&fig_one());
        for r in [
            m.verify_degree_identity(),
            m.verify_projection_formula(),
            m.verify_label_compatibility(),
            m.verify_fiber_degrees(),
            m.verify_dicritical_profile(),
            m.kbar_pullback(),
        ] {
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
    }

    #[test]
    fn zero_valuations_stay_zero() {
        let m = identity(&fig_one());
        let vy = m.target.ids().into_iter().map(|c| (c, (0, 0))).collect();
        assert!(m.propagate_valuations(&vy).values().all(|v| *v == (0, 0)));
    }

    #[test]
    fn empty_chain_has_no_degrees() {
        let s = degree_pair(&ValuationVector::new(), &[]).unwrap();
        assert!(s.steps.is_empty() && s.total.is_none());
    }

    #[test]
    fn chain_rejects_forward_reference() {
        let vz: ValuationVector = [(CurveId(1), (-1, -1))].into_iter().collect();
        let r = degree_pair(&vz, &[(ChainRef::Curve(CurveId(1)), ChainRef::Step(1))]);
        assert_eq!(r, Err(ChainError::ForwardReference { step: 1, target: 1 }));
    }

    #[test]
    fn pullback_on_dicritical_curve_is_structural() {
        let s = fig_one();
        let mut types: BTreeMap<CurveId, CurveType> =
            s.ids().into_iter().map(|c| (c, CurveType::OntoBoundaryCurve { target: c, e: 1, f: 1 })).collect();
        types.insert(CurveId(1), CurveType::Dicritical { e: 1 });
        let pull = s.ids().into_iter().map(|c| (c, [(c, 1)].into_iter().collect())).collect();
        let r = FrameworkMap::new(s.clone(), s, 1, types, pull, false);
        assert!(matches!(r, Err(MapError::SupportOnNonBoundaryType { code: 3, .. })));
    }
}
