//! Exact d-cat and d-TC of small images by brute force.
//!
//! Admissible subsets (categorical for cat, section-admitting for TC) are
//! downward closed, so a minimum cover can be taken from maximal admissible
//! sets. These are enumerated by canonical depth-first growth over a memoized
//! admissibility predicate; the cover itself is found by iterative deepening,
//! always branching on the lowest uncovered point.

use std::collections::HashMap;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{Error, Result};
use crate::homotopy::{admits_section, inclusion_nullhomotopic, Decision, DEFAULT_BUDGET};
use crate::image::{is_connected, product, DigitalImage};

pub const DEFAULT_CAT_CAP: usize = 8;
pub const DEFAULT_TC_CAP: usize = 16;
/// Subsets are tracked as `u64` bitmasks.
pub const HARD_CAP: usize = 64;
/// Maximal sets whose one-point-smaller subsets are re-queried.
const DOWNWARD_SAMPLE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub cap: Option<usize>,
    pub budget: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cap: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleValue {
    Exact(usize),
    /// Some admissibility queries were inconclusive; `upper` is `None` when
    /// the conclusively admissible sets do not cover.
    Range { lower: usize, upper: Option<usize> },
    /// Some point is in no admissible set, so no finite cover exists.
    Unbounded,
}

impl OracleValue {
    pub fn exact(&self) -> Option<usize> {
        match self {
            OracleValue::Exact(v) => Some(*v),
            _ => None,
        }
    }

    /// The best known lower bound; `None` when unbounded.
    pub fn lower(&self) -> Option<usize> {
        match self {
            OracleValue::Exact(v) => Some(*v),
            OracleValue::Range { lower, .. } => Some(*lower),
            OracleValue::Unbounded => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            OracleValue::Exact(v) => v.to_string(),
            OracleValue::Range { lower, upper: Some(u) } => format!("range[{lower},{u}]"),
            OracleValue::Range { lower, upper: None } => format!("range[{lower},?]"),
            OracleValue::Unbounded => "unbounded".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub invariant: &'static str,
    pub value: OracleValue,
    pub queries: usize,
    pub inconclusive_queries: usize,
    pub downward_checks: usize,
    pub downward_violations: usize,
}

impl Serialize for OracleResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("invariant", self.invariant)?;
        match self.value {
            OracleValue::Exact(v) => m.serialize_entry("value", &v)?,
            OracleValue::Range { lower, upper } => {
                m.serialize_entry("lower", &lower)?;
                m.serialize_entry("upper", &upper)?;
            }
            OracleValue::Unbounded => m.serialize_entry("value", "unbounded")?,
        }
        m.serialize_entry("inconclusive_queries", &self.inconclusive_queries)?;
        m.serialize_entry("queries", &self.queries)?;
        m.serialize_entry("downward_checks", &self.downward_checks)?;
        m.serialize_entry("downward_violations", &self.downward_violations)?;
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Unknown,
}

type Query<'a> = Box<dyn FnMut(&[usize]) -> Result<Tri> + 'a>;

struct Engine<'a> {
    n: usize,
    query: Query<'a>,
    memo: HashMap<u64, Tri>,
    inconclusive: usize,
}

fn members_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

impl Engine<'_> {
    fn admissible(&mut self, mask: u64) -> Result<Tri> {
        if let Some(&t) = self.memo.get(&mask) {
            return Ok(t);
        }
        let t = (self.query)(&members_of(mask))?;
        if t == Tri::Unknown {
            self.inconclusive += 1;
        }
        self.memo.insert(mask, t);
        Ok(t)
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Maximal sets of the family `{S : admissible(S) ∈ accept}`.
    fn maximal_sets(&mut self, optimistic: bool) -> Result<Vec<u64>> {
        let accept = |t: Tri| t == Tri::Yes || (optimistic && t == Tri::Unknown);
        let mut out = Vec::new();
        let mut stack: Vec<(u64, usize)> = Vec::new();
        for p in 0..self.n {
            if accept(self.admissible(1 << p)?) {
                stack.push((1 << p, p));
            }
        }
        stack.reverse();
        while let Some((set, last)) = stack.pop() {
            let mut grown = Vec::new();
            let mut maximal = true;
            for e in 0..self.n {
                if set >> e & 1 == 1 {
                    continue;
                }
                if accept(self.admissible(set | 1 << e)?) {
                    maximal = false;
                    if e > last {
                        grown.push((set | 1 << e, e));
                    }
                }
            }
            if maximal {
                out.push(set);
            }
            stack.extend(grown.into_iter().rev());
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Least `l` such that `l + 1` of `sets` cover everything.
    fn min_cover(&self, sets: &[u64]) -> Option<usize> {
        let full = self.full();
        if sets.iter().fold(0, |acc, s| acc | s) != full {
            return None;
        }
        fn dfs(covered: u64, full: u64, left: usize, sets: &[u64]) -> bool {
            if covered == full {
                return true;
            }
            if left == 0 {
                return false;
            }
            let p = (!covered).trailing_zeros();
            sets.iter()
                .filter(|s| *s >> p & 1 == 1)
                .any(|&s| dfs(covered | s, full, left - 1, sets))
        }
        (1..=self.n).find(|&d| dfs(0, full, d, sets)).map(|d| d - 1)
    }
}

fn solve(mut engine: Engine<'_>, invariant: &'static str) -> Result<OracleResult> {
    let full = engine.full();
    let done = |engine: &Engine<'_>, value, checks, violations| OracleResult {
        invariant,
        value,
        queries: engine.memo.len(),
        inconclusive_queries: engine.inconclusive,
        downward_checks: checks,
        downward_violations: violations,
    };
    // singletons first: a failing one settles the answer without searching the full set
    for p in 0..engine.n {
        if engine.admissible(1 << p)? == Tri::No {
            return Ok(done(&engine, OracleValue::Unbounded, 0, 0));
        }
    }
    if engine.admissible(full)? == Tri::Yes {
        return Ok(done(&engine, OracleValue::Exact(0), 0, 0));
    }
    let pessimistic = engine.maximal_sets(false)?;
    let optimistic = if engine.inconclusive > 0 {
        engine.maximal_sets(true)?
    } else {
        pessimistic.clone()
    };

    let (mut checks, mut violations) = (0, 0);
    for &m in pessimistic.iter().take(DOWNWARD_SAMPLE) {
        if m.count_ones() < 2 {
            continue;
        }
        for p in members_of(m) {
            checks += 1;
            if engine.admissible(m & !(1 << p))? != Tri::Yes {
                violations += 1;
            }
        }
    }

    let upper = engine.min_cover(&pessimistic);
    let value = if engine.inconclusive == 0 {
        OracleValue::Exact(upper.expect("singletons are admissible"))
    } else {
        let lower = engine.min_cover(&optimistic).unwrap_or(0);
        OracleValue::Range { lower, upper }
    };
    Ok(done(&engine, value, checks, violations))
}

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(Error::CapExceeded { size, cap });
    }
    if size > HARD_CAP {
        return Err(Error::CapExceeded { size, cap: HARD_CAP });
    }
    Ok(())
}

fn tri<T>(d: Decision<T>) -> Tri {
    match d {
        Decision::Yes(_) => Tri::Yes,
        Decision::No => Tri::No,
        Decision::Inconclusive => Tri::Unknown,
    }
}

/// Least `l` such that `l + 1` categorical subsets cover `x`.
pub fn exact_cat(x: &Arc<DigitalImage>, cfg: &OracleConfig) -> Result<OracleResult> {
    if x.is_empty() {
        return Err(Error::EmptyImage);
    }
    check_cap(x.len(), cfg.cap.unwrap_or(DEFAULT_CAT_CAP))?;
    let budget = cfg.budget;
    let engine = Engine {
        n: x.len(),
        query: Box::new(move |members: &[usize]| Ok(tri(inclusion_nullhomotopic(x, members, budget)?))),
        memo: HashMap::new(),
        inconclusive: 0,
    };
    solve(engine, "d-cat")
}

/// Least `l` such that `l + 1` section-admitting subsets cover `x × x`.
pub fn exact_tc(x: &Arc<DigitalImage>, cfg: &OracleConfig) -> Result<OracleResult> {
    if x.is_empty() {
        return Err(Error::EmptyImage);
    }
    check_cap(x.len() * x.len(), cfg.cap.unwrap_or(DEFAULT_TC_CAP))?;
    let xx = product(x, x);
    let budget = cfg.budget;
    let engine = Engine {
        n: xx.len(),
        query: Box::new(move |members: &[usize]| Ok(tri(admits_section(x, &xx, members, budget)?))),
        memo: HashMap::new(),
        inconclusive: 0,
    };
    solve(engine, "d-TC")
}

/// A space to sweep, with the bounds of its verified certificates.
#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub label: String,
    pub image: Arc<DigitalImage>,
    /// `(invariant, bound)` pairs, invariant `"d-cat"` or `"d-TC"`.
    pub certificates: Vec<(String, usize)>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SweepRow {
    pub space: String,
    pub connected: bool,
    pub cat: OracleResult,
    pub tc: OracleResult,
    /// `cat <= tc <= 2 cat`; `None` when it does not apply.
    pub inequality: Option<bool>,
    /// Every oracle value at most every matching certificate bound.
    pub bounds: Option<bool>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub pass: bool,
}

/// Checks `cat <= tc <= 2 cat` on connected spaces and `oracle <= bound` for every certificate.
pub fn consistency_sweep(entries: &[SweepEntry], cfg: &OracleConfig) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        let connected = is_connected(&e.image)?;
        let cat = exact_cat(&e.image, cfg)?;
        let tc = exact_tc(&e.image, cfg)?;
        let mut failures = Vec::new();
        let inequality = match (connected, cat.value.exact(), tc.value.exact()) {
            (true, Some(c), Some(t)) => {
                let ok = c <= t && t <= 2 * c;
                if !ok {
                    failures.push(format!("cat {c}, tc {t} violate cat <= tc <= 2cat"));
                }
                Some(ok)
            }
            _ => None,
        };
        let mut bounds = None;
        for (inv, bound) in &e.certificates {
            let value = if inv == "d-cat" { &cat.value } else { &tc.value };
            let ok = value.lower().is_some_and(|v| v <= *bound);
            if !ok {
                failures.push(format!("{inv} oracle {} exceeds certificate bound {bound}", value.describe()));
            }
            bounds = Some(bounds.unwrap_or(true) && ok);
        }
        rows.push(SweepRow {
            space: e.label.clone(),
            connected,
            cat,
            tc,
            inequality,
            bounds,
            failures,
        });
    }
    let pass = rows.iter().all(|r| r.failures.is_empty());
    Ok(SweepReport { rows, pass })
}
