//! Three-point covers of the line: ramification profiles, Riemann-Hurwitz,
//! realisation by permutation triples and exact checks of explicit maps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{gcd, multiplicity_profile, ArithError, Poly, UniPoly, Var};
use crate::picard::{CurveType, FrameworkMap};
use crate::surface::CurveId;

/// A partition of the degree, parts in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Partition {
        parts.sort_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut groups: Vec<(u32, usize)> = Vec::new();
        for &p in &self.0 {
            match groups.last_mut() {
                Some((q, n)) if *q == p => *n += 1,
                _ => groups.push((p, 1)),
            }
        }
        let s: Vec<String> =
            groups.iter().map(|(p, n)| if *n == 1 { p.to_string() } else { format!("{p}^{n}") }).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for Partition {
    type Err = BelyiError;
    /// Reads `13,1^3` style lists.
    fn from_str(s: &str) -> Result<Partition, BelyiError> {
        let bad = || BelyiError::BadPartition(s.to_string());
        let mut parts = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            let (p, n) = match item.split_once('^') {
                Some((p, n)) => (p.trim(), n.trim().parse::<usize>().map_err(|_| bad())?),
                None => (item, 1),
            };
            let p: u32 = p.parse().map_err(|_| bad())?;
            if p == 0 {
                return Err(bad());
            }
            parts.extend(std::iter::repeat_n(p, n));
        }
        if parts.is_empty() {
            return Err(bad());
        }
        Ok(Partition::new(parts))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BelyiError {
    #[error("cannot read partition '{0}'")]
    BadPartition(String),
    #[error("cannot read profile: {0}")]
    BadProfile(String),
    #[error("partition {0} does not sum to the degree {1}")]
    PartitionSum(Partition, u32),
    #[error("curve {0} does not dominate a boundary curve")]
    NotDominating(CurveId),
    #[error("target curve {0} meets {1} curves, a Belyi map needs exactly three")]
    NotTrivalent(CurveId, usize),
    #[error("coefficient {coef} of curve {curve} is not divisible by the ramification index {e}")]
    Divisibility { curve: CurveId, coef: i64, e: u32 },
    #[error("numerator and denominator share a factor")]
    NotCoprime,
    #[error("map has degree 0")]
    ZeroDegree,
    #[error("k = {0} is outside 2..=6")]
    IsotopeRange(u32),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Degree and the fibres over the three branch points 0, 1 and infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationProfile {
    pub degree: u32,
    pub over0: Partition,
    pub over1: Partition,
    pub over_inf: Partition,
    /// Target curves the three fibres sit over, when known.
    pub tags: Option<[CurveId; 3]>,
}

impl RamificationProfile {
    pub fn new(degree: u32, over0: Partition, over1: Partition, over_inf: Partition) -> RamificationProfile {
        RamificationProfile { degree, over0, over1, over_inf, tags: None }
    }

    pub fn fibres(&self) -> [&Partition; 3] {
        [&self.over0, &self.over1, &self.over_inf]
    }

    pub fn validate(&self) -> Result<(), BelyiError> {
        for p in self.fibres() {
            if p.sum() != self.degree {
                return Err(BelyiError::PartitionSum(p.clone(), self.degree));
            }
        }
        Ok(())
    }

    /// The three fibres as a sorted multiset, ignoring which point is which.
    pub fn unordered(&self) -> Vec<Partition> {
        let mut v: Vec<Partition> = self.fibres().into_iter().cloned().collect();
        v.sort();
        v
    }
}

impl fmt::Display for RamificationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "deg={} over0={} over1={} overInf={}", self.degree, self.over0, self.over1, self.over_inf)
    }
}

impl FromStr for RamificationProfile {
    type Err = BelyiError;
    /// Reads `deg=16 over0=2^8 over1=13,1^3 overInf=3^5,1`.
    fn from_str(s: &str) -> Result<RamificationProfile, BelyiError> {
        let mut fields = BTreeMap::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| BelyiError::BadProfile(format!("expected key=value, got '{tok}'")))?;
            if fields.insert(k.to_string(), v.to_string()).is_some() {
                return Err(BelyiError::BadProfile(format!("duplicate key '{k}'")));
            }
        }
        let take = |k: &str| fields.get(k).ok_or_else(|| BelyiError::BadProfile(format!("missing '{k}'")));
        for k in fields.keys() {
            if !["deg", "over0", "over1", "overInf"].contains(&k.as_str()) {
                return Err(BelyiError::BadProfile(format!("unknown key '{k}'")));
            }
        }
        let degree: u32 = take("deg")?.parse().map_err(|_| BelyiError::BadProfile("deg must be a positive integer".into()))?;
        let p = RamificationProfile::new(degree, take("over0")?.parse()?, take("over1")?.parse()?, take("overInf")?.parse()?);
        Ok(p)
    }
}

/// Genus-0 condition `sum (n - #parts) = 2n - 2`.
pub fn check_riemann_hurwitz(p: &RamificationProfile) -> Result<bool, BelyiError> {
    p.validate()?;
    let n = p.degree as i64;
    let total: i64 = p.fibres().iter().map(|q| n - q.len() as i64).sum();
    Ok(total == 2 * n - 2)
}

/// Profile of the map a dominating curve induces onto a trivalent target
/// curve, read from the pullback coefficients of its neighbours. The fibres
/// are listed over the target's neighbours in ascending id order.
pub fn profile_from_framework(m: &FrameworkMap, e: CurveId) -> Result<RamificationProfile, BelyiError> {
    let Some(CurveType::OntoBoundaryCurve { target, e: ram, f }) = m.types().get(&e).copied() else {
        return Err(BelyiError::NotDominating(e));
    };
    let around: Vec<CurveId> = m.target.neighbors(target).collect();
    if around.len() != 3 {
        return Err(BelyiError::NotTrivalent(target, around.len()));
    }
    let mut fibres: [Vec<u32>; 3] = Default::default();
    for nb in m.source.neighbors(e) {
        for (i, fy) in around.iter().enumerate() {
            let c = m.p_or_ramification(nb, *fy);
            if c == 0 {
                continue;
            }
            if c % ram as i64 != 0 {
                return Err(BelyiError::Divisibility { curve: nb, coef: c, e: ram });
            }
            fibres[i].push((c / ram as i64) as u32);
        }
    }
    let [a, b, c] = fibres.map(Partition::new);
    let p = RamificationProfile { degree: f, over0: a, over1: b, over_inf: c, tags: Some([around[0], around[1], around[2]]) };
    p.validate()?;
    Ok(p)
}

/// Profile for the isotope with parameter `k`.
pub fn isotope_profile(k: u32) -> Result<RamificationProfile, BelyiError> {
    if !(2..=6).contains(&k) {
        return Err(BelyiError::IsotopeRange(k));
    }
    let rep = |p: u32, n: u32| std::iter::repeat_n(p, n as usize);
    let over0 = Partition::new(rep(3, 6 - k).chain(rep(1, 3 * k - 5)).collect());
    let over1 = Partition::new(std::iter::once(2 * k + 1).chain(rep(1, 12 - 2 * k)).collect());
    Ok(RamificationProfile::new(13, over0, over1, Partition::new(vec![13])))
}

/// The profile of `num/den` together with the degree of `num - den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalBelyi {
    pub profile: RamificationProfile,
    pub numerator_degree: u32,
    pub denominator_degree: u32,
    pub difference_degree: Option<u32>,
    pub variable: Option<String>,
}

/// Reads off the three fibres of `num/den` over 0, 1 and infinity from
/// square-free decompositions, with any missing degree at the point at
/// infinity of the source.
pub fn verify_rational_belyi(num: &Poly, den: &Poly) -> Result<RationalBelyi, BelyiError> {
    let mut vars = num.support_vars();
    for v in den.support_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    if vars.len() > 1 {
        return Err(ArithError::NotUnivariate(vars[1].0.clone()).into());
    }
    let v = vars.into_iter().next().unwrap_or_else(|| Var::new("t"));
    let a = UniPoly::from_poly(num, &v)?;
    let b = UniPoly::from_poly(den, &v)?;
    if a.is_zero() || b.is_zero() {
        return Err(ArithError::ZeroPolynomial.into());
    }
    if gcd(&a, &b)?.degree().unwrap_or(0) > 0 {
        return Err(BelyiError::NotCoprime);
    }
    let da = a.degree().unwrap() as u32;
    let db = b.degree().unwrap() as u32;
    let n = da.max(db);
    if n == 0 {
        return Err(BelyiError::ZeroDegree);
    }
    let diff = UniPoly::from_poly(&num.sub(den)?, &v)?;
    let fibre = |p: &UniPoly| -> Result<Partition, BelyiError> {
        let mut parts = Vec::new();
        let deg = match p.degree() {
            Some(d) if d > 0 => {
                for (m, share) in multiplicity_profile(p)? {
                    parts.extend(std::iter::repeat_n(m, share as usize));
                }
                d as u32
            }
            _ => 0,
        };
        if n > deg {
            parts.push(n - deg);
        }
        Ok(Partition::new(parts))
    };
    let profile = RamificationProfile::new(n, fibre(&a)?, fibre(&diff)?, fibre(&b)?);
    Ok(RationalBelyi {
        profile,
        numerator_degree: da,
        denominator_degree: db,
        difference_degree: diff.degree().map(|d| d as u32),
        variable: Some(v.0),
    })
}

/// Permutations of `0..n` as image vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub sigma0: Vec<u32>,
    pub sigma1: Vec<u32>,
    /// `sigma1` after `sigma0`.
    pub sigma_inf: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { witness: Witness, nodes: u64 },
    NotFoundExhausted { nodes: u64 },
    BudgetExceeded { nodes: u64 },
}

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Cycle type of a permutation as a partition.
pub fn cycle_type(perm: &[u32]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x] as usize;
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts)
}

/// Whether the group generated by the permutations acts transitively.
pub fn is_transitive(gens: &[&[u32]]) -> bool {
    let n = gens.first().map_or(0, |g| g.len());
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g[x] as usize;
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

/// Re-validates a witness against a profile.
pub fn check_witness(p: &RamificationProfile, w: &Witness) -> bool {
    let n = p.degree as usize;
    let composed: Vec<u32> = (0..n).map(|x| w.sigma1[w.sigma0[x] as usize]).collect();
    composed == w.sigma_inf
        && cycle_type(&w.sigma0) == p.over0
        && cycle_type(&w.sigma1) == p.over1
        && cycle_type(&w.sigma_inf) == p.over_inf
        && is_transitive(&[&w.sigma0, &w.sigma1])
}

struct Search {
    n: usize,
    sigma0: Vec<u32>,
    inv0: Vec<u32>,
    sigma1: Vec<Option<u32>>,
    /// Partial `tau = sigma1 . sigma0` and its inverse.
    tau: Vec<Option<u32>>,
    tau_pre: Vec<Option<u32>>,
    in_cycle: Vec<bool>,
    need1: BTreeMap<u32, u32>,
    need_inf: BTreeMap<u32, u32>,
    nodes: u64,
    budget: u64,
    found: Option<Witness>,
}

fn multiset(p: &Partition) -> BTreeMap<u32, u32> {
    let mut m = BTreeMap::new();
    for &x in p.parts() {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

fn take(m: &mut BTreeMap<u32, u32>, k: u32) {
    let c = m.get_mut(&k).expect("part available");
    *c -= 1;
    if *c == 0 {
        m.remove(&k);
    }
}

fn give(m: &mut BTreeMap<u32, u32>, k: u32) {
    *m.entry(k).or_insert(0) += 1;
}

impl Search {
    fn exhausted(&self) -> bool {
        self.found.is_some() || self.nodes >= self.budget
    }

    /// Sets `sigma1(x) = y`, which fixes one arrow of tau. Rejects when the
    /// tau-cycle this closes has an unavailable length, or an open tau-path
    /// is already longer than any remaining cycle. On success returns the
    /// length of the closed cycle, if any.
    fn push_arrow(&mut self, x: usize, y: usize) -> Option<Option<u32>> {
        let a = self.inv0[x] as usize;
        self.sigma1[x] = Some(y as u32);
        self.tau[a] = Some(y as u32);
        self.tau_pre[y] = Some(a as u32);
        let mut len = 0u32;
        let mut z = y;
        let closed = loop {
            match self.tau[z] {
                Some(nz) => {
                    len += 1;
                    z = nz as usize;
                    if z == y {
                        break true;
                    }
                }
                None => break false,
            }
        };
        let ok = if closed {
            self.need_inf.contains_key(&len)
        } else {
            let mut back = 0u32;
            let mut w = a;
            while let Some(p) = self.tau_pre[w] {
                back += 1;
                w = p as usize;
            }
            let points = len + 1 + back + 1;
            points <= self.need_inf.keys().next_back().copied().unwrap_or(0)
        };
        if !ok {
            self.pop_arrow(x, y, None);
            return None;
        }
        let closed = closed.then_some(len);
        if let Some(c) = closed {
            take(&mut self.need_inf, c);
        }
        Some(closed)
    }

    fn pop_arrow(&mut self, x: usize, y: usize, closed: Option<u32>) {
        let a = self.inv0[x] as usize;
        self.sigma1[x] = None;
        self.tau[a] = None;
        self.tau_pre[y] = None;
        if let Some(c) = closed {
            give(&mut self.need_inf, c);
        }
    }

    fn run(&mut self) {
        if self.exhausted() {
            return;
        }
        let Some(start) = (0..self.n).find(|x| self.sigma1[*x].is_none()) else {
            let s1: Vec<u32> = self.sigma1.iter().map(|x| x.unwrap()).collect();
            if is_transitive(&[&self.sigma0, &s1]) {
                let tau: Vec<u32> = self.tau.iter().map(|x| x.unwrap()).collect();
                self.found = Some(Witness { sigma0: self.sigma0.clone(), sigma1: s1, sigma_inf: tau });
            }
            return;
        };
        let lengths: Vec<u32> = self.need1.keys().copied().collect();
        for len in lengths {
            take(&mut self.need1, len);
            self.in_cycle[start] = true;
            let mut cycle = vec![start];
            self.extend_cycle(&mut cycle, len as usize);
            self.in_cycle[start] = false;
            give(&mut self.need1, len);
            if self.exhausted() {
                return;
            }
        }
    }

    /// Grows the sigma1-cycle starting at `cycle[0]` to `len` points, then
    /// continues with the next cycle.
    fn extend_cycle(&mut self, cycle: &mut Vec<usize>, len: usize) {
        let last = *cycle.last().unwrap();
        if cycle.len() == len {
            self.nodes += 1;
            if let Some(closed) = self.push_arrow(last, cycle[0]) {
                self.run();
                self.pop_arrow(last, cycle[0], closed);
            }
            return;
        }
        for y in cycle[0] + 1..self.n {
            if self.exhausted() {
                return;
            }
            if self.sigma1[y].is_some() || self.in_cycle[y] {
                continue;
            }
            self.nodes += 1;
            if let Some(closed) = self.push_arrow(last, y) {
                cycle.push(y);
                self.in_cycle[y] = true;
                self.extend_cycle(cycle, len);
                self.in_cycle[y] = false;
                cycle.pop();
                self.pop_arrow(last, y, closed);
            }
        }
    }
}

/// Canonical permutation of a cycle type: cycles on consecutive points,
/// shortest first, each `x -> x + 1` closing back to its start. This is the
/// lexicographically smallest permutation of that type.
pub fn canonical_permutation(p: &Partition) -> Vec<u32> {
    let mut parts: Vec<u32> = p.parts().to_vec();
    parts.sort();
    let mut perm = Vec::with_capacity(p.sum() as usize);
    let mut start = 0u32;
    for len in parts {
        for i in 0..len {
            perm.push(if i + 1 == len { start } else { start + i + 1 });
        }
        start += len;
    }
    perm
}

/// Backtracking search for a transitive triple with the given cycle types.
/// `sigma0` is fixed to its canonical representative; the witness is the
/// first found in a fixed depth-first order, so it is deterministic.
pub fn realizable_as_permutation_triple(p: &RamificationProfile, budget: u64) -> Result<SearchOutcome, BelyiError> {
    p.validate()?;
    let n = p.degree as usize;
    let sigma0 = canonical_permutation(&p.over0);
    let mut inv0 = vec![0u32; n];
    for (i, &s) in sigma0.iter().enumerate() {
        inv0[s as usize] = i as u32;
    }
    let mut s = Search {
        n,
        sigma0,
        inv0,
        sigma1: vec![None; n],
        tau: vec![None; n],
        tau_pre: vec![None; n],
        need1: multiset(&p.over1),
        need_inf: multiset(&p.over_inf),
        in_cycle: vec![false; n],
        nodes: 0,
        budget,
        found: None,
    };
    s.run();
    Ok(match s.found {
        Some(w) => {
            debug_assert!(check_witness(p, &w));
            SearchOutcome::Found { witness: w, nodes: s.nodes }
        }
        None if s.nodes >= budget => SearchOutcome::BudgetExceeded { nodes: s.nodes },
        None => SearchOutcome::NotFoundExhausted { nodes: s.nodes },
    })
}

/// Cycle notation with points numbered from 1, fixed points omitted.
pub fn cycles(perm: &[u32]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for s in 0..perm.len() {
        if seen[s] || perm[s] as usize == s {
            seen[s] = true;
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push((x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push_str(&format!("({})", c.join(" ")));
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(s: &str) -> RamificationProfile {
        s.parse().unwrap()
    }

    #[test]
    fn partition_text_round_trip() {
        let p: Partition = "13,1^3".parse().unwrap();
        assert_eq!(p.parts(), &[13, 1, 1, 1]);
        assert_eq!(p.to_string(), "13,1^3");
    }

    #[test]
    fn riemann_hurwitz_parity_obstruction() {
        assert!(!check_riemann_hurwitz(&prof("deg=2 over0=2 over1=2 overInf=2")).unwrap());
    }

    #[test]
    fn canonical_sigma0_is_lexicographically_least() {
        assert_eq!(canonical_permutation(&Partition::new(vec![2, 1])), vec![0, 2, 1]);
        assert_eq!(canonical_permutation(&Partition::new(vec![3])), vec![1, 2, 0]);
    }

    #[test]
    fn degree_five_triple_found() {
        let p = prof("deg=5 over0=3,2 over1=2,1^3 overInf=5");
        match realizable_as_permutation_triple(&p, DEFAULT_BUDGET).unwrap() {
            SearchOutcome::Found { witness, .. } => assert!(check_witness(&p, &witness)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn klein_four_obstruction_exhausts() {
        let p = prof("deg=4 over0=2^2 over1=2^2 overInf=3,1");
        assert!(matches!(realizable_as_permutation_triple(&p, DEFAULT_BUDGET).unwrap(), SearchOutcome::NotFoundExhausted { .. }));
    }

    #[test]
    fn isotope_range() {
        assert_eq!(isotope_profile(7), Err(BelyiError::IsotopeRange(7)));
    }
}
