//! Runs every check a framework file supports and assembles the report.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::{jacobian_in, Poly, Var};
use crate::belyi::{check_riemann_hurwitz, profile_from_framework, verify_rational_belyi, Partition, RamificationProfile};
use crate::format::{BelyiSpec, Candidate, Framework};
use crate::intersection::{determinant_labels, is_negative_definite, parity_check, target_admissibility};
use crate::picard::{degree_pair, display_name, CurveType, DegreeSummary, FrameworkMap};
use crate::report::{CheckResult, Status, Violation};
use crate::surface::{CurveId, Surface};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<DegreeSummary>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(CheckResult::failed)
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            let _ = writeln!(out, "[{status}] {}", c.check);
            for n in &c.notes {
                let _ = writeln!(out, "    {n}");
            }
            for v in &c.violations {
                let curves: Vec<String> = v.curves.iter().map(ToString::to_string).collect();
                let _ = writeln!(
                    out,
                    "    {} at [{}]: expected {}, found {}",
                    v.check,
                    curves.join(", "),
                    v.expected,
                    v.actual
                );
            }
        }
        let failed = self.checks.iter().filter(|c| c.failed()).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        out
    }
}

fn adjunction(name: &str, s: &Surface) -> CheckResult {
    let v = s
        .adjunction_audit()
        .into_iter()
        .map(|a| Violation::new("adjunction", vec![a.curve], a.expected, a.actual))
        .collect();
    CheckResult::from_violations(&format!("adjunction.{name}"), v).with_note(format!("{} curves", s.len()))
}

fn parity(name: &str, s: &Surface) -> CheckResult {
    let labels = determinant_labels(s);
    let v = parity_check(s, &labels)
        .into_iter()
        .map(|p| Violation::new("parity", vec![p.curve], "odd label + determinant label", format!("{} + {}", p.kbar, p.det_label)))
        .collect();
    CheckResult::from_violations(&format!("parity.{name}"), v)
}

fn admissibility(name: &str, s: &Surface) -> CheckResult {
    let labels = determinant_labels(s);
    let a = target_admissibility(s, &labels);
    let mut v = Vec::new();
    for c in &a.positive_kbar {
        v.push(Violation::new("target_admissibility.positive_kbar", vec![*c], "<= 0", s.curve(*c).unwrap().kbar));
    }
    for c in &a.negative_det {
        v.push(Violation::new("target_admissibility.negative_det", vec![*c], ">= 0", &labels[c]));
    }
    for c in &a.high_valency {
        v.push(Violation::new("target_admissibility.valency", vec![*c], "<= 3", s.valency(*c)));
    }
    let mut r = CheckResult::from_violations(&format!("target_admissibility.{name}"), v);
    if !a.zero_det.is_empty() {
        let zs: Vec<String> = a.zero_det.iter().map(|c| display_name(s, *c)).collect();
        r = r.with_note(format!("vanishing determinant label: {}", zs.join(" ")));
    }
    r
}

/// Definiteness of the source boundary once the curves lying over the
/// target's original line are removed. Recorded, never failed.
fn negative_definiteness(m: &FrameworkMap) -> Option<CheckResult> {
    let line = m.target.original_line()?;
    let over_line: BTreeSet<CurveId> = m
        .types()
        .iter()
        .filter(|(_, t)| matches!(t, CurveType::OntoBoundaryCurve { target, .. } if *target == line))
        .map(|(e, _)| *e)
        .collect();
    if over_line.is_empty() {
        return None;
    }
    let rest: BTreeSet<CurveId> = m.source.ids().into_iter().filter(|c| !over_line.contains(c)).collect();
    let definite = is_negative_definite(&m.source, &rest);
    let mut r = CheckResult::info("negative_definiteness", Vec::new())
        .with_note(format!("removed {} curves over target curve {line}", over_line.len()))
        .with_note(format!("remaining {} curves: negative definite = {definite}", rest.len()));
    if !definite {
        r = r.with_note("disagrees with the expected negative definite form");
    }
    Some(r)
}

fn fibres_match(a: &RamificationProfile, b: &RamificationProfile, ordered: bool) -> bool {
    if a.degree != b.degree {
        return false;
    }
    if ordered {
        a.fibres() == b.fibres()
    } else {
        let mut x: Vec<&Partition> = a.fibres().to_vec();
        let mut y: Vec<&Partition> = b.fibres().to_vec();
        x.sort();
        y.sort();
        x == y
    }
}

/// The framework's fibres reordered so they lie over the requested points.
fn arrange(p: &RamificationProfile, points: &[CurveId; 3]) -> Option<RamificationProfile> {
    let tags = p.tags?;
    let fibres = p.fibres();
    let pick = |c: CurveId| tags.iter().position(|t| *t == c).map(|i| fibres[i].clone());
    Some(RamificationProfile {
        degree: p.degree,
        over0: pick(points[0])?,
        over1: pick(points[1])?,
        over_inf: pick(points[2])?,
        tags: Some(*points),
    })
}

fn belyi_check(map: Option<&FrameworkMap>, b: &BelyiSpec) -> CheckResult {
    let name = format!("belyi.{}", b.curve);
    let mut v = Vec::new();
    let mut notes = Vec::new();
    if let Some(p) = &b.profile {
        match check_riemann_hurwitz(p) {
            Ok(true) => notes.push(format!("stated {p}: Riemann-Hurwitz holds")),
            Ok(false) => v.push(Violation::new("belyi.riemann_hurwitz", vec![b.curve], "genus 0", p)),
            Err(e) => v.push(Violation::new("belyi.profile", vec![b.curve], "valid profile", e)),
        }
    }
    let derived = match map.map(|m| profile_from_framework(m, b.curve)) {
        Some(Ok(d)) => {
            let d = match &b.points {
                Some(pts) => match arrange(&d, pts) {
                    Some(a) => a,
                    None => {
                        v.push(Violation::new("belyi.points", vec![b.curve], "neighbours of the target curve", "other curves"));
                        d
                    }
                },
                None => d,
            };
            notes.push(format!("from framework {d}"));
            if let Some(p) = &b.profile {
                if !fibres_match(p, &d, b.points.is_some()) {
                    v.push(Violation::new("belyi.framework_profile", vec![b.curve], p, &d));
                }
            }
            Some(d)
        }
        Some(Err(e)) => {
            v.push(Violation::new("belyi.framework_profile", vec![b.curve], "profile from framework", e));
            None
        }
        None => None,
    };
    if let Some((num, den)) = &b.map {
        match verify_rational_belyi(num, den) {
            Ok(rb) => {
                notes.push(format!(
                    "rational map {}: numerator degree {}, denominator degree {}, difference degree {}",
                    rb.profile,
                    rb.numerator_degree,
                    rb.denominator_degree,
                    rb.difference_degree.map_or("-".to_string(), |d| d.to_string())
                ));
                if let Some(p) = b.profile.as_ref().or(derived.as_ref()) {
                    if !fibres_match(p, &rb.profile, true) {
                        v.push(Violation::new("belyi.rational_map", vec![b.curve], p, &rb.profile));
                    }
                }
            }
            Err(e) => v.push(Violation::new("belyi.rational_map", vec![b.curve], "coprime univariate pair", e)),
        }
    }
    let mut r = CheckResult::from_violations(&name, v);
    r.notes = notes;
    r
}

fn chain_check(fw: &Framework, m: &FrameworkMap) -> (CheckResult, Option<DegreeSummary>) {
    let vy = fw.valuations.as_ref().expect("loader requires valuations with a chain");
    let vz = m.propagate_valuations(vy);
    match degree_pair(&vz, &fw.chain) {
        Ok(s) => {
            let mut v = Vec::new();
            let mut notes: Vec<String> =
                s.steps.iter().enumerate().map(|(i, (a, b))| format!("step #{}: ({a},{b})", i + 1)).collect();
            if let Some((a, b)) = s.total {
                notes.push(format!("degree_pair: ({a},{b})"));
                if let Some(want) = fw.chain_expect {
                    if want != (a, b) {
                        v.push(Violation::new("degree_pair", Vec::new(), format!("{want:?}"), format!("({a},{b})")));
                    }
                }
            }
            if let Some(((a1, a2), (b1, b2))) = s.separate {
                notes.push(format!("separate degrees: ({a1},{a2}) ({b1},{b2})"));
            }
            let mut r = CheckResult::from_violations("degree_pair", v);
            r.notes = notes;
            (r, Some(s))
        }
        Err(e) => (CheckResult::from_violations("degree_pair", vec![Violation::new("degree_pair", Vec::new(), "valid chain", e)]), None),
    }
}

fn candidate_check(c: &Candidate, separate: Option<((i64, i64), (i64, i64))>) -> CheckResult {
    let (u, w) = (Var::new("x1"), Var::new("x2"));
    let mut v = Vec::new();
    let mut notes = Vec::new();
    let degs = |p: &Poly| -> (i64, i64) {
        let a = p.degree_in(&u).unwrap_or(0) as i64;
        let b = p.degree_in(&w).unwrap_or(0) as i64;
        (a.min(b), a.max(b))
    };
    let (d1, d2) = (degs(&c.y1), degs(&c.y2));
    notes.push(format!("per-variable degrees: ({},{}) ({},{})", d1.0, d1.1, d2.0, d2.1));
    if let Some(sep) = separate {
        if (d1, d2) != sep {
            v.push(Violation::new("candidate.degrees", Vec::new(), format!("{sep:?}"), format!("{:?}", (d1, d2))));
        }
    }
    match jacobian_in(&c.y1, &c.y2, &u, &w) {
        Ok(j) => match &c.expect_jacobian {
            Some(shape) => match shape.as_single_term() {
                Some((_, want)) => match j.as_single_term() {
                    Some((coef, got)) if got == want && !coef.is_zero() => {
                        notes.push(format!("jacobian = {j}"));
                        notes.push(format!("constant: {}", Poly::constant(coef)));
                    }
                    _ => v.push(Violation::new("candidate.jacobian", Vec::new(), format!("c*{shape}"), &j)),
                },
                None => v.push(Violation::new("candidate.jacobian", Vec::new(), "a single monomial shape", shape)),
            },
            None => notes.push(format!("jacobian = {j}")),
        },
        Err(e) => v.push(Violation::new("candidate.jacobian", Vec::new(), "polynomial pair", e)),
    }
    let mut r = CheckResult::from_violations("candidate", v);
    r.notes = notes;
    r
}

/// Runs, in order: adjunction, admissibility of the target, parity, the map
/// checks, each Belyi block, the degree chain and the candidate map.
pub fn verify(fw: &Framework) -> Report {
    let mut checks = Vec::new();
    for (name, s) in &fw.surfaces {
        checks.push(adjunction(name, s));
    }
    if let Some(y) = fw.surface("Y") {
        checks.push(admissibility("Y", y));
    }
    for (name, s) in &fw.surfaces {
        checks.push(parity(name, s));
    }
    let mut degrees = None;
    if let Some(m) = &fw.map {
        checks.push(m.verify_degree_identity());
        checks.push(m.verify_projection_formula());
        checks.push(m.verify_label_compatibility());
        checks.push(m.verify_fiber_degrees());
        checks.push(m.verify_dicritical_profile());
        checks.push(m.kbar_pullback());
        if !fw.map_notes.is_empty() || m.partial {
            let mut r = CheckResult::info("coverage", Vec::new());
            if m.partial {
                let listed = m.pullback_rows().values().map(|r| r.len()).sum::<usize>();
                let missing: Vec<String> =
                    m.target.ids().into_iter().filter(|f| !m.has_row(*f)).map(|f| m.target_name(f)).collect();
                r = r.with_note(format!("partial map: {listed} pullback entries listed"));
                r = r.with_note(format!(
                    "target curves without a pullback row: {}",
                    if missing.is_empty() { "none".to_string() } else { missing.join(" ") }
                ));
            }
            r.notes.extend(fw.map_notes.iter().cloned());
            checks.push(r);
        }
        checks.extend(negative_definiteness(m));
    }
    for b in &fw.belyi {
        checks.push(belyi_check(fw.map.as_ref(), b));
    }
    if let (Some(m), false) = (&fw.map, fw.chain.is_empty()) {
        let (r, s) = chain_check(fw, m);
        checks.push(r);
        degrees = s;
    }
    if let Some(c) = &fw.candidate {
        checks.push(candidate_check(c, degrees.as_ref().and_then(|d| d.separate)));
    }
    checks.sort_by(|a, b| a.check.cmp(&b.check));
    Report { report_version: REPORT_VERSION, checks, degrees }
}
