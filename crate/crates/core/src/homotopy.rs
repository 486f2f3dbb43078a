//! Continuity of maps and digital homotopy as reachability among continuous maps.
//!
//! Two continuous maps `f, g: X -> Y` are one step apart when `f(x)` and `g(x)`
//! are equal or adjacent for every `x`. A homotopy is a walk in this "map
//! graph". The search below explores that graph depth-first with a visited set,
//! so a negative answer means the whole reachable component was exhausted.
//! Children are produced lazily by a backtracking enumerator that tries, for
//! each source point, the values nearest to a guide map first; this keeps the
//! common positive cases cheap without changing which states are reachable.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::DigitalImage;
use crate::paths::DigitalPath;

/// Default cap on the number of distinct maps visited by one search.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// A total map between the point sets of two images.
#[derive(Clone, Debug)]
pub struct MapBetweenImages {
    source: Arc<DigitalImage>,
    target: Arc<DigitalImage>,
    values: Vec<usize>,
}

impl MapBetweenImages {
    pub fn new(source: Arc<DigitalImage>, target: Arc<DigitalImage>, values: Vec<usize>) -> Result<Self> {
        if values.len() != source.len() {
            return Err(Error::InvalidMap(format!(
                "{} values for a source with {} points",
                values.len(),
                source.len()
            )));
        }
        for &v in &values {
            target.check_index(v)?;
        }
        Ok(MapBetweenImages { source, target, values })
    }

    pub fn identity(x: Arc<DigitalImage>) -> Self {
        let values = (0..x.len()).collect();
        MapBetweenImages {
            source: Arc::clone(&x),
            target: x,
            values,
        }
    }

    pub fn constant(source: Arc<DigitalImage>, target: Arc<DigitalImage>, p: usize) -> Result<Self> {
        target.check_index(p)?;
        let values = vec![p; source.len()];
        Ok(MapBetweenImages { source, target, values })
    }

    pub fn source(&self) -> &Arc<DigitalImage> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        &self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, x: usize) -> usize {
        self.values[x]
    }

    /// Edge criterion: adjacent points go to equal-or-adjacent points.
    pub fn is_continuous(&self) -> bool {
        is_continuous_values(&self.source, &self.target, &self.values)
    }

    fn same_ends(&self, other: &MapBetweenImages) -> bool {
        (Arc::ptr_eq(&self.source, &other.source) || *self.source == *other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || *self.target == *other.target)
    }
}

pub fn is_continuous_values(source: &DigitalImage, target: &DigitalImage, values: &[usize]) -> bool {
    values.len() == source.len()
        && values.iter().all(|&v| v < target.len())
        && source
            .edges()
            .iter()
            .all(|&(a, b)| target.is_close(values[a], values[b]))
}

/// Frames `H_0..H_m` of a homotopy; `frames[t][x]` is `H_t(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyWitness {
    pub frames: Vec<Vec<usize>>,
}

impl HomotopyWitness {
    /// Every frame continuous and every per-point trace a path.
    pub fn validate(&self, source: &DigitalImage, target: &DigitalImage) -> bool {
        !self.frames.is_empty()
            && self
                .frames
                .iter()
                .all(|f| is_continuous_values(source, target, f))
            && self.frames.windows(2).all(|w| {
                w[0].iter().zip(&w[1]).all(|(&a, &b)| target.is_close(a, b))
            })
    }

    /// True iff this is a valid homotopy from `f` to `g`.
    pub fn connects(&self, f: &MapBetweenImages, g: &MapBetweenImages) -> bool {
        f.same_ends(g)
            && self.frames.first().map(Vec::as_slice) == Some(f.values())
            && self.frames.last().map(Vec::as_slice) == Some(g.values())
            && self.validate(f.source(), f.target())
    }

    pub fn reversed(&self) -> HomotopyWitness {
        let mut frames = self.frames.clone();
        frames.reverse();
        HomotopyWitness { frames }
    }

    /// Runs `self` then `next`; the last frame of `self` must be the first of `next`.
    pub fn concat(&self, next: &HomotopyWitness) -> Result<HomotopyWitness> {
        if self.frames.last() != next.frames.first() {
            return Err(Error::InvalidMap("homotopies do not meet".into()));
        }
        let mut frames = self.frames.clone();
        frames.extend(next.frames.iter().skip(1).cloned());
        Ok(HomotopyWitness { frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// The trace `t -> H_t(x)` of every source point.
    pub fn traces(&self, target: &Arc<DigitalImage>) -> Result<Vec<DigitalPath>> {
        let n = self.frames.first().map_or(0, Vec::len);
        (0..n)
            .map(|x| DigitalPath::new(Arc::clone(target), self.frames.iter().map(|f| f[x]).collect()))
            .collect()
    }
}

/// Outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<T> {
    Yes(T),
    No,
    Inconclusive,
}

impl<T> Decision<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Decision<U> {
        match self {
            Decision::Yes(t) => Decision::Yes(f(t)),
            Decision::No => Decision::No,
            Decision::Inconclusive => Decision::Inconclusive,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Decision::Yes(_) => "yes",
            Decision::No => "no",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

/// Searches for a homotopy from `f` to `g`.
pub fn homotopic(f: &MapBetweenImages, g: &MapBetweenImages, budget: usize) -> Result<Decision<HomotopyWitness>> {
    if !f.same_ends(g) {
        return Err(Error::MapMismatch);
    }
    if !f.is_continuous() || !g.is_continuous() {
        return Err(Error::Discontinuous);
    }
    let goal: Vec<u16> = to_state(g.values());
    let out = search(f.source(), f.target(), f.values(), g.values(), |s| s == goal.as_slice(), budget);
    Ok(out)
}

/// Searches for a homotopy from `f` to some constant map; returns the constant value.
pub fn nullhomotopic(f: &MapBetweenImages, budget: usize) -> Result<Decision<(HomotopyWitness, usize)>> {
    if !f.is_continuous() {
        return Err(Error::Discontinuous);
    }
    let target = f.target();
    let center = center_of(target, f.values());
    let guide = vec![center; f.values().len()];
    let out = search(
        f.source(),
        target,
        f.values(),
        &guide,
        |s| s.windows(2).all(|w| w[0] == w[1]),
        budget,
    );
    Ok(out.map(|w| {
        let base = w.frames.last().and_then(|fr| fr.first().copied()).unwrap_or(center);
        (w, base)
    }))
}

/// Nullhomotopy of the identity.
pub fn is_contractible(x: &Arc<DigitalImage>, budget: usize) -> Result<Decision<(HomotopyWitness, usize)>> {
    nullhomotopic(&MapBetweenImages::identity(Arc::clone(x)), budget)
}

/// Nullhomotopy of the inclusion of `members` (induced subimage) into `x`.
pub fn inclusion_nullhomotopic(
    x: &Arc<DigitalImage>,
    members: &[usize],
    budget: usize,
) -> Result<Decision<(HomotopyWitness, usize)>> {
    let sub = Arc::new(x.induced(format!("{} subset", x.label()), members)?);
    let inc = MapBetweenImages::new(sub, Arc::clone(x), members.to_vec())?;
    nullhomotopic(&inc, budget)
}

/// Decides whether `members` of `x × x` admit a continuous section of the
/// endpoint map, by searching for a homotopy between the two projections.
///
/// On success returns one path per member, in member order.
pub fn admits_section(
    x: &Arc<DigitalImage>,
    xx: &DigitalImage,
    members: &[usize],
    budget: usize,
) -> Result<Decision<Vec<DigitalPath>>> {
    if members.is_empty() {
        return Err(Error::EmptySubset);
    }
    match xx.factor_sizes() {
        Some((a, b)) if a == x.len() && b == x.len() => {}
        _ => return Err(Error::InvalidMap("pair image is not a product of the space with itself".into())),
    }
    let sub = Arc::new(xx.induced("pairs", members)?);
    let (first, second): (Vec<usize>, Vec<usize>) = members
        .iter()
        .map(|&p| xx.split(p).expect("checked product"))
        .unzip();
    let p1 = MapBetweenImages::new(Arc::clone(&sub), Arc::clone(x), first)?;
    let p2 = MapBetweenImages::new(sub, Arc::clone(x), second)?;
    match homotopic(&p1, &p2, budget)? {
        Decision::Yes(w) => Ok(Decision::Yes(w.traces(x)?)),
        Decision::No => Ok(Decision::No),
        Decision::Inconclusive => Ok(Decision::Inconclusive),
    }
}

fn to_state(values: &[usize]) -> Vec<u16> {
    values.iter().map(|&v| v as u16).collect()
}

/// Target point minimizing the largest distance to the given values.
fn center_of(target: &DigitalImage, values: &[usize]) -> usize {
    let mut used: Vec<usize> = values.to_vec();
    used.sort_unstable();
    used.dedup();
    let dists: Vec<Vec<usize>> = used.iter().map(|&v| target.distances_from(v)).collect();
    (0..target.len())
        .min_by_key(|&c| (dists.iter().map(|d| d[c]).max().unwrap_or(0), c))
        .unwrap_or(0)
}

/// All-pairs distances, saturating at `u32::MAX` for unreachable pairs.
fn distance_table(target: &DigitalImage) -> Vec<Vec<u32>> {
    (0..target.len())
        .map(|s| {
            target
                .distances_from(s)
                .into_iter()
                .map(|d| u32::try_from(d).unwrap_or(u32::MAX))
                .collect()
        })
        .collect()
}

/// Source points in breadth-first order, with their earlier-placed neighbors.
fn assignment_order(source: &DigitalImage) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = source.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in source.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut pos = vec![0; n];
    for (k, &x) in order.iter().enumerate() {
        pos[x] = k;
    }
    let earlier = order
        .iter()
        .map(|&x| {
            source
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&y| pos[y] < pos[x])
                .collect()
        })
        .collect();
    (order, earlier)
}

struct Context<'a> {
    target: &'a DigitalImage,
    order: Vec<usize>,
    earlier: Vec<Vec<usize>>,
    guide: Vec<usize>,
    dist: Vec<Vec<u32>>,
}

/// Lazy enumeration of the continuous maps one step away from `parent`.
struct Children {
    cands: Vec<Vec<u16>>,
    choice: Vec<usize>,
    assign: Vec<u16>,
    pos: usize,
    done: bool,
}

impl Children {
    fn new(ctx: &Context<'_>, parent: &[u16]) -> Self {
        let cands = ctx
            .order
            .iter()
            .map(|&x| {
                let v = parent[x] as usize;
                let g = ctx.guide[x];
                let mut c: Vec<u16> = std::iter::once(v)
                    .chain(ctx.target.neighbors(v).iter().copied())
                    .map(|c| c as u16)
                    .collect();
                c.sort_unstable_by_key(|&c| (ctx.dist[c as usize][g], c));
                c
            })
            .collect();
        let n = parent.len();
        Children {
            cands,
            choice: vec![0; n],
            assign: vec![0; n],
            pos: 0,
            done: n == 0,
        }
    }

    fn next(&mut self, ctx: &Context<'_>) -> Option<Vec<u16>> {
        if self.done {
            return None;
        }
        let n = self.assign.len();
        if self.pos == n {
            self.pos -= 1;
        }
        loop {
            let pos = self.pos;
            let x = ctx.order[pos];
            let mut placed = false;
            while self.choice[pos] < self.cands[pos].len() {
                let c = self.cands[pos][self.choice[pos]];
                self.choice[pos] += 1;
                if ctx.earlier[pos]
                    .iter()
                    .all(|&y| ctx.target.is_close(c as usize, self.assign[y] as usize))
                {
                    self.assign[x] = c;
                    placed = true;
                    break;
                }
            }
            if placed {
                self.pos += 1;
                if self.pos == n {
                    return Some(self.assign.clone());
                }
                self.choice[self.pos] = 0;
            } else if pos == 0 {
                self.done = true;
                return None;
            } else {
                self.pos -= 1;
            }
        }
    }
}

/// Depth-first reachability from `start` to any state satisfying `goal`.
fn search(
    source: &DigitalImage,
    target: &DigitalImage,
    start: &[usize],
    guide: &[usize],
    goal: impl Fn(&[u16]) -> bool,
    budget: usize,
) -> Decision<HomotopyWitness> {
    assert!(target.len() <= u16::MAX as usize, "target too large for the map search");
    let start = to_state(start);
    if goal(&start) {
        return Decision::Yes(HomotopyWitness {
            frames: vec![start.iter().map(|&v| v as usize).collect()],
        });
    }
    let (order, earlier) = assignment_order(source);
    let ctx = Context {
        target,
        order,
        earlier,
        guide: guide.to_vec(),
        dist: distance_table(target),
    };
    let mut visited: HashSet<Box<[u16]>> = HashSet::new();
    visited.insert(start.clone().into_boxed_slice());
    let mut stack = vec![(start.clone(), Children::new(&ctx, &start))];
    while let Some((_, children)) = stack.last_mut() {
        let Some(child) = children.next(&ctx) else {
            stack.pop();
            continue;
        };
        if visited.contains(child.as_slice()) {
            continue;
        }
        if visited.len() >= budget {
            return Decision::Inconclusive;
        }
        visited.insert(child.clone().into_boxed_slice());
        if goal(&child) {
            let mut frames: Vec<Vec<usize>> = stack
                .iter()
                .map(|(s, _)| s.iter().map(|&v| v as usize).collect())
                .collect();
            frames.push(child.iter().map(|&v| v as usize).collect());
            return Decision::Yes(HomotopyWitness { frames });
        }
        let next = Children::new(&ctx, &child);
        stack.push((child, next));
    }
    Decision::No
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{make_image, product, AdjacencyKind, Point};

    fn img(raw: &[&[i64]], k: usize) -> Arc<DigitalImage> {
        let pts = raw.iter().map(|c| Point::new(c.to_vec())).collect();
        Arc::new(make_image("t", pts, AdjacencyKind::CK(k)).unwrap())
    }

    fn circle() -> Arc<DigitalImage> {
        img(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], 2)
    }

    fn complete(n: usize) -> Arc<DigitalImage> {
        let all: [&[i64]; 4] = [&[0, 0], &[0, 1], &[1, 0], &[1, 1]];
        img(&all[..n], 2)
    }

    #[test]
    fn continuity_examples() {
        let s1 = circle();
        let s0 = img(&[&[-1], &[1]], 1);
        assert!(MapBetweenImages::identity(s1.clone()).is_continuous());
        assert!(MapBetweenImages::constant(s1.clone(), s0.clone(), 1).unwrap().is_continuous());
        // e0, e1 -> first point; -e0, -e1 -> second point
        let values = s1
            .points()
            .iter()
            .map(|p| if p.coords().iter().sum::<i64>() > 0 { 0 } else { 1 })
            .collect();
        let f = MapBetweenImages::new(s1, s0, values).unwrap();
        assert!(!f.is_continuous());
    }

    #[test]
    fn reflexive_single_frame() {
        let x = complete(3);
        let f = MapBetweenImages::identity(x);
        match homotopic(&f, &f, DEFAULT_BUDGET).unwrap() {
            Decision::Yes(w) => assert_eq!(w.frames.len(), 1),
            other => panic!("{}", other.label()),
        }
    }

    #[test]
    fn contractibility_examples() {
        let pt = img(&[&[0]], 1);
        assert!(is_contractible(&pt, DEFAULT_BUDGET).unwrap().is_yes());
        let k4 = complete(4);
        let Decision::Yes((w, _)) = is_contractible(&k4, DEFAULT_BUDGET).unwrap() else {
            panic!("K4 should contract");
        };
        assert!(w.validate(&k4, &k4));
        let s0 = img(&[&[-1], &[1]], 1);
        assert!(is_contractible(&s0, DEFAULT_BUDGET).unwrap().is_no());
    }

    #[test]
    fn circle_identity_versus_constant() {
        let s1 = circle();
        let id = MapBetweenImages::identity(s1.clone());
        let c = MapBetweenImages::constant(s1.clone(), s1.clone(), 0).unwrap();
        let d = homotopic(&id, &c, DEFAULT_BUDGET).unwrap();
        if let Decision::Yes(w) = &d {
            assert!(w.connects(&id, &c));
        }
        assert!(!matches!(d, Decision::Inconclusive));
    }

    #[test]
    fn sections_on_diagonal_and_single_pair() {
        let s1 = circle();
        let xx = product(&s1, &s1);
        let diag: Vec<usize> = (0..4).map(|i| xx.join(i, i).unwrap()).collect();
        let Decision::Yes(paths) = admits_section(&s1, &xx, &diag, DEFAULT_BUDGET).unwrap() else {
            panic!("diagonal admits constant paths");
        };
        for (k, p) in paths.iter().enumerate() {
            assert!(p.steps().iter().all(|&s| s == k));
        }
        let pair = [xx.join(0, 3).unwrap()];
        let Decision::Yes(paths) = admits_section(&s1, &xx, &pair, DEFAULT_BUDGET).unwrap() else {
            panic!("single pair in a connected image");
        };
        assert_eq!((paths[0].start(), paths[0].end()), (0, 3));
        assert_eq!(admits_section(&s1, &xx, &[], DEFAULT_BUDGET).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s1 = circle();
        let s0 = img(&[&[-1], &[1]], 1);
        let id = MapBetweenImages::identity(s1.clone());
        let other = MapBetweenImages::identity(s0.clone());
        assert_eq!(homotopic(&id, &other, 10).unwrap_err(), Error::MapMismatch);
        let jump = MapBetweenImages::new(s1.clone(), s0, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(nullhomotopic(&jump, 10).unwrap_err(), Error::Discontinuous);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let k4 = complete(4);
        let id = MapBetweenImages::identity(k4.clone());
        // swap two points: reachable, but not within one visited state
        let far = MapBetweenImages::new(k4.clone(), k4, vec![1, 0, 3, 2]).unwrap();
        assert_eq!(homotopic(&id, &far, 1).unwrap(), Decision::Inconclusive);
        assert!(homotopic(&id, &far, DEFAULT_BUDGET).unwrap().is_yes());
    }
}
