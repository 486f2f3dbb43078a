//! Independent certificate checks.
//!
//! Everything here is re-derived from raw adjacency predicates on the images
//! recorded in a cover's context: membership, endpoints, continuity of every
//! frame, closeness of neighboring sections, and agreement of every recorded
//! sphere-level lift with the stored quotient-level data.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::image::DigitalImage;
use crate::error::Result;
use crate::planners::{BoundCertificate, CoverDoc, CoverKind, CoverPiece, LiftMode, PlannerCover, Witness};

/// Failures listed per check before truncation.
const FAILURE_LIMIT: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub piece: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub member: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
}

impl CheckResult {
    fn new(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass: true,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, piece: Option<usize>, member: Option<usize>, time: Option<usize>, detail: String) {
        self.pass = false;
        self.failure_count += 1;
        if self.failures.len() < FAILURE_LIMIT {
            self.failures.push(Failure {
                piece,
                member,
                time,
                detail,
            });
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
    pub bound: usize,
    pub verified: bool,
}

impl Report {
    pub fn failed_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn close(x: &DigitalImage, a: usize, b: usize) -> bool {
    a == b || x.is_adjacent(a, b)
}

fn at(path: &[usize], t: usize) -> usize {
    path[t.min(path.len() - 1)]
}

/// Every base point lies in some piece; members are valid and distinct.
pub fn check_cover(cover: &PlannerCover) -> CheckResult {
    let mut r = CheckResult::new("cover");
    let base = &cover.context.base;
    let mut covered = vec![false; base.len()];
    for (i, piece) in cover.pieces.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for (k, &m) in piece.members.iter().enumerate() {
            if m >= base.len() {
                r.fail(Some(i), Some(k), None, format!("member {m} is not a base point"));
                continue;
            }
            if !seen.insert(m) {
                r.fail(Some(i), Some(k), None, format!("member {m} listed twice"));
            }
            covered[m] = true;
        }
        let witness_len = match &piece.witness {
            Witness::Frames(f) => f.first().map_or(0, Vec::len),
            Witness::Sections(s) => s.len(),
        };
        if witness_len != piece.members.len() {
            r.fail(
                Some(i),
                None,
                None,
                format!("{} members but witness covers {witness_len}", piece.members.len()),
            );
        }
    }
    for (p, c) in covered.iter().enumerate() {
        if !c {
            r.fail(None, Some(p), None, format!("base point {p} is uncovered"));
        }
    }
    r
}

/// Position of each base point inside a piece.
fn positions(base_len: usize, members: &[usize]) -> Vec<Option<usize>> {
    let mut pos = vec![None; base_len];
    for (k, &m) in members.iter().enumerate() {
        if m < base_len {
            pos[m] = Some(k);
        }
    }
    pos
}

/// Pairs of member positions that are adjacent in the base.
fn member_edges(base: &DigitalImage, members: &[usize]) -> Vec<(usize, usize)> {
    let pos = positions(base.len(), members);
    let mut out = Vec::new();
    for (k, &m) in members.iter().enumerate() {
        if m >= base.len() {
            continue;
        }
        for &nb in base.neighbors(m) {
            if let Some(l) = pos[nb] {
                if k < l {
                    out.push((k, l));
                }
            }
        }
    }
    out
}

/// Frames form a homotopy from the inclusion to a constant map.
pub fn check_nullhomotopy(cover: &PlannerCover, index: usize) -> CheckResult {
    let mut r = CheckResult::new(format!("nullhomotopy[{index}]"));
    let piece = &cover.pieces[index];
    let x = &cover.context.space;
    let pi = Some(index);
    let Witness::Frames(frames) = &piece.witness else {
        r.fail(pi, None, None, "piece carries sections, expected frames".into());
        return r;
    };
    if piece.members.is_empty() {
        return r;
    }
    if frames.is_empty() {
        r.fail(pi, None, None, "no frames".into());
        return r;
    }
    let n = piece.members.len();
    for (t, f) in frames.iter().enumerate() {
        if f.len() != n {
            r.fail(pi, None, Some(t), format!("frame has {} values for {n} members", f.len()));
            return r;
        }
        if let Some(k) = f.iter().position(|&v| v >= x.len()) {
            r.fail(pi, Some(k), Some(t), format!("value {} is not a point", f[k]));
            return r;
        }
    }
    for (k, (&m, &v)) in piece.members.iter().zip(&frames[0]).enumerate() {
        if m != v {
            r.fail(pi, Some(k), Some(0), format!("frame 0 sends {m} to {v}, not the inclusion"));
        }
    }
    let edges = member_edges(x, &piece.members);
    for (t, f) in frames.iter().enumerate() {
        for &(a, b) in &edges {
            if !close(x, f[a], f[b]) {
                r.fail(pi, Some(a), Some(t), format!("frame breaks the edge to member {b}"));
            }
        }
    }
    for (t, w) in frames.windows(2).enumerate() {
        for k in 0..n {
            if !close(x, w[0][k], w[1][k]) {
                r.fail(pi, Some(k), Some(t + 1), format!("trace jumps from {} to {}", w[0][k], w[1][k]));
            }
        }
    }
    let last = frames.last().expect("nonempty");
    if last.iter().any(|&v| v != last[0]) {
        r.fail(pi, None, Some(frames.len() - 1), "terminal frame is not constant".into());
    }
    r
}

/// Sections start and end correctly, are paths, and neighbors get close paths.
pub fn check_section(cover: &PlannerCover, index: usize) -> CheckResult {
    let mut r = CheckResult::new(format!("sections[{index}]"));
    let piece = &cover.pieces[index];
    let x = &cover.context.space;
    let base = &cover.context.base;
    let pi = Some(index);
    let Witness::Sections(paths) = &piece.witness else {
        r.fail(pi, None, None, "piece carries frames, expected sections".into());
        return r;
    };
    if paths.len() != piece.members.len() {
        r.fail(pi, None, None, "section count differs from member count".into());
        return r;
    }
    let mut usable = vec![true; paths.len()];
    for (k, (&m, path)) in piece.members.iter().zip(paths).enumerate() {
        let Some((u, v)) = base.split(m) else {
            r.fail(pi, Some(k), None, format!("member {m} is not a pair"));
            usable[k] = false;
            continue;
        };
        if path.is_empty() || path.iter().any(|&p| p >= x.len()) {
            r.fail(pi, Some(k), None, "path is empty or leaves the space".into());
            usable[k] = false;
            continue;
        }
        if path[0] != u {
            r.fail(pi, Some(k), Some(0), format!("path starts at {} instead of {u}", path[0]));
        }
        let end = *path.last().expect("nonempty");
        if end != v {
            r.fail(pi, Some(k), Some(path.len() - 1), format!("path ends at {end} instead of {v}"));
        }
        for (t, w) in path.windows(2).enumerate() {
            if !close(x, w[0], w[1]) {
                r.fail(pi, Some(k), Some(t + 1), format!("path jumps from {} to {}", w[0], w[1]));
            }
        }
    }
    for (a, b) in member_edges(base, &piece.members) {
        if !(usable[a] && usable[b]) {
            continue;
        }
        let (f, g) = (&paths[a], &paths[b]);
        let len = f.len().max(g.len());
        if let Some(t) = (0..len).find(|&t| !close(x, at(f, t), at(g, t))) {
            r.fail(
                pi,
                Some(a),
                Some(t),
                format!(
                    "paths of adjacent pairs {} and {} are apart at time {t}",
                    piece.members[a], piece.members[b]
                ),
            );
        }
    }
    r
}

/// Recorded lifts are upstairs paths projecting onto the stored data, and
/// every representative input of every member has one.
pub fn check_lifts(cover: &PlannerCover, index: usize) -> CheckResult {
    let mut r = CheckResult::new(format!("lifts[{index}]"));
    let piece = &cover.pieces[index];
    let pi = Some(index);
    let Some(ctx) = &cover.context.lift else {
        if !piece.lifts.is_empty() {
            r.fail(pi, None, None, "lifts recorded without an upstairs image".into());
        }
        return r;
    };
    let up = &ctx.upstairs;
    let proj = |p: usize| ctx.class_of[p];
    let mut reps: Vec<Vec<usize>> = vec![Vec::new(); cover.context.space.len()];
    for (p, &c) in ctx.class_of.iter().enumerate() {
        if c < reps.len() {
            reps[c].push(p);
        }
    }
    let stored = |k: usize| -> Option<Vec<usize>> {
        match &piece.witness {
            Witness::Frames(f) => f.iter().map(|fr| fr.get(k).copied()).collect(),
            Witness::Sections(s) => s.get(k).cloned(),
        }
    };
    let base = &cover.context.base;
    let mut seen: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); piece.members.len()];
    for lift in &piece.lifts {
        let k = lift.member;
        if k >= piece.members.len() {
            r.fail(pi, Some(k), None, "lift refers to a missing member".into());
            continue;
        }
        let m = piece.members[k];
        let inputs: Vec<usize> = match cover.kind {
            CoverKind::Cat => vec![m],
            CoverKind::Tc => match base.split(m) {
                Some((u, v)) => vec![u, v],
                None => {
                    r.fail(pi, Some(k), None, "member is not a pair".into());
                    continue;
                }
            },
        };
        if lift.pattern.len() != inputs.len()
            || lift
                .pattern
                .iter()
                .zip(&inputs)
                .any(|(&p, &c)| p >= up.len() || proj(p) != c)
        {
            r.fail(pi, Some(k), None, format!("lift input {:?} does not represent the member", lift.pattern));
            continue;
        }
        if lift.steps.is_empty() || lift.steps.iter().any(|&p| p >= up.len()) {
            r.fail(pi, Some(k), None, "lift leaves the upstairs image".into());
            continue;
        }
        if lift.steps[0] != lift.pattern[0] {
            r.fail(pi, Some(k), Some(0), format!("lift for {:?} starts at {}", lift.pattern, lift.steps[0]));
        }
        if let Some(t) = lift.steps.windows(2).position(|w| !close(up, w[0], w[1])) {
            r.fail(pi, Some(k), Some(t + 1), "lift jumps upstairs".into());
        }
        match stored(k) {
            Some(path) if path.len() == lift.steps.len() => {
                if let Some(t) = (0..path.len()).find(|&t| proj(lift.steps[t]) != path[t]) {
                    r.fail(pi, Some(k), Some(t), format!("lift for {:?} projects elsewhere", lift.pattern));
                }
            }
            _ => r.fail(pi, Some(k), None, "lift and stored witness differ in length".into()),
        }
        seen[k].insert(lift.pattern.clone());
    }
    for (k, &m) in piece.members.iter().enumerate() {
        let classes: Vec<usize> = match cover.kind {
            CoverKind::Cat => vec![m],
            CoverKind::Tc => match base.split(m) {
                Some((u, v)) => vec![u, v],
                None => continue,
            },
        };
        let expected: usize = classes
            .iter()
            .map(|&c| reps.get(c).map_or(0, Vec::len))
            .product();
        if seen[k].len() != expected {
            r.fail(
                pi,
                Some(k),
                None,
                format!("{} of {expected} representative inputs have lifts", seen[k].len()),
            );
        }
    }
    r
}

fn lifts_required(cover: &PlannerCover) -> bool {
    cover.lift_mode != LiftMode::None
}

fn piece_checks(cover: &PlannerCover, index: usize, piece: &CoverPiece) -> Vec<CheckResult> {
    let mut out = Vec::new();
    match cover.kind {
        CoverKind::Cat => out.push(check_nullhomotopy(cover, index)),
        CoverKind::Tc => out.push(check_section(cover, index)),
    }
    if lifts_required(cover) || !piece.lifts.is_empty() {
        out.push(check_lifts(cover, index));
    }
    out
}

/// Runs every applicable check.
pub fn verify_cover(cover: &PlannerCover) -> Report {
    let mut checks = vec![check_cover(cover)];
    for (i, piece) in cover.pieces.iter().enumerate() {
        checks.extend(piece_checks(cover, i, piece));
    }
    let verified = !cover.pieces.is_empty() && checks.iter().all(|c| c.pass);
    Report {
        checks,
        bound: cover.bound(),
        verified,
    }
}

/// Verifies a cover read from JSON, including its declared bound.
pub fn verify_document(doc: CoverDoc) -> Result<Report> {
    let declared = doc.bound;
    let cover = doc.into_cover()?;
    let mut report = verify_cover(&cover);
    let mut check = CheckResult::new("declared_bound");
    if declared != cover.bound() {
        check.fail(
            None,
            None,
            None,
            format!("declared bound {declared}, but {} pieces give {}", cover.pieces.len(), cover.bound()),
        );
        report.verified = false;
    }
    report.checks.insert(0, check);
    Ok(report)
}

/// A certificate `invariant(space) <= pieces - 1`, verified iff every check passes.
pub fn certify(cover: &PlannerCover) -> BoundCertificate {
    let report = verify_cover(cover);
    BoundCertificate {
        space: cover.space.clone(),
        invariant: cover.kind.invariant().to_string(),
        bound: cover.bound(),
        verified: report.verified,
        report,
        cover: cover.to_doc(),
    }
}
