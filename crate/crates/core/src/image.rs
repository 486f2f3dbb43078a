//! Finite digital images: lattice points with an explicit symmetric adjacency.
//!
//! Every image materializes its edge set at construction time, so all
//! downstream code (paths, homotopies, planners, verifiers) works with plain
//! graph predicates. Points produced by [`make_image`] are sorted
//! lexicographically; [`product`] orders the pair `(i, j)` at index
//! `i * |Y| + j`, which is again lexicographic when both factors are.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Point(coords.into())
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn negated(&self) -> Point {
        Point(self.0.iter().map(|c| -c).collect())
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Concatenation of coordinates, used for product images.
    pub fn concat(&self, other: &Point) -> Point {
        let mut coords = self.0.clone();
        coords.extend_from_slice(&other.0);
        Point(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// How the adjacency of an image was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdjacencyKind {
    /// `c_k`: at most `k` coordinates differ by exactly one, the rest agree.
    CK(usize),
    /// An explicit edge list over point indices.
    Explicit(Vec<(usize, usize)>),
    /// The strong ("maximal") product of two adjacencies.
    Product(Box<AdjacencyKind>, Box<AdjacencyKind>),
    /// Induced adjacency on antipodal classes.
    Quotient(Box<AdjacencyKind>),
}

impl AdjacencyKind {
    pub fn describe(&self) -> String {
        match self {
            AdjacencyKind::CK(k) => format!("c{k}"),
            AdjacencyKind::Explicit(_) => "explicit".to_string(),
            AdjacencyKind::Product(a, b) => format!("({} x {})", a.describe(), b.describe()),
            AdjacencyKind::Quotient(a) => format!("{}/~", a.describe()),
        }
    }
}

/// The `c_k` predicate on two lattice points of equal dimension.
pub fn ck_adjacent(a: &Point, b: &Point, k: usize) -> bool {
    if a == b || a.dimension() != b.dimension() {
        return false;
    }
    let mut differing = 0;
    for (x, y) in a.0.iter().zip(&b.0) {
        match (x - y).abs() {
            0 => {}
            1 => differing += 1,
            _ => return false,
        }
    }
    differing <= k
}

/// A finite digital image `(X, κ)`.
#[derive(Clone)]
pub struct DigitalImage {
    label: String,
    dimension: usize,
    points: Vec<Point>,
    adjacency: AdjacencyKind,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    matrix: Vec<u64>,
    lookup: HashMap<Point, usize>,
    factors: Option<(usize, usize)>,
}

impl fmt::Debug for DigitalImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigitalImage")
            .field("label", &self.label)
            .field("points", &self.points.len())
            .field("edges", &self.edges.len())
            .field("adjacency", &self.adjacency.describe())
            .finish()
    }
}

/// Two images are equal when they have the same points and the same edges.
impl PartialEq for DigitalImage {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.edges == other.edges
    }
}

impl Eq for DigitalImage {}

impl DigitalImage {
    fn from_parts(
        label: String,
        points: Vec<Point>,
        mut edges: Vec<(usize, usize)>,
        adjacency: AdjacencyKind,
        factors: Option<(usize, usize)>,
    ) -> Self {
        let n = points.len();
        let dimension = points.first().map(Point::dimension).unwrap_or(0);
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let words = (n * n).div_ceil(64);
        let mut matrix = vec![0u64; words];
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            debug_assert!(i != j);
            for (a, b) in [(i, j), (j, i)] {
                let bit = a * n + b;
                matrix[bit / 64] |= 1 << (bit % 64);
                neighbors[a].push(b);
            }
        }
        for list in neighbors.iter_mut() {
            list.sort_unstable();
        }
        let lookup = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        DigitalImage {
            label,
            dimension,
            points,
            adjacency,
            edges,
            neighbors,
            matrix,
            lookup,
            factors,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn adjacency(&self) -> &AdjacencyKind {
        &self.adjacency
    }

    /// Sorted edge list with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.points.len();
        if i >= n || j >= n {
            return false;
        }
        let bit = i * n + j;
        self.matrix[bit / 64] & (1 << (bit % 64)) != 0
    }

    /// Equal or adjacent.
    pub fn is_close(&self, i: usize, j: usize) -> bool {
        i == j || self.is_adjacent(i, j)
    }

    /// Factor sizes `(|X|, |Y|)` when this image was built by [`product`].
    pub fn factor_sizes(&self) -> Option<(usize, usize)> {
        self.factors
    }

    /// Splits a product index into its factor indices.
    pub fn split(&self, p: usize) -> Option<(usize, usize)> {
        let (_, right) = self.factors?;
        (p < self.len()).then(|| (p / right, p % right))
    }

    /// Joins factor indices into a product index.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let (left, right) = self.factors?;
        (i < left && j < right).then(|| i * right + j)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }

    /// Breadth-first distances from `start`; `usize::MAX` for unreachable points.
    pub fn distances_from(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for &j in &self.neighbors[i] {
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// A shortest path of indices from `a` to `b`, if one exists.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let dist = self.distances_from(b);
        if dist[a] == usize::MAX {
            return None;
        }
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.neighbors[cur]
                .iter()
                .find(|&&j| dist[j] + 1 == dist[cur])
                .expect("distance labels are consistent");
            path.push(cur);
        }
        Some(path)
    }

    /// Connected component id per point.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut next = 0;
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(i) = stack.pop() {
                for &j in &self.neighbors[i] {
                    if comp[j] == usize::MAX {
                        comp[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// The subimage on `members` with the induced adjacency, keeping the order given.
    pub fn induced(&self, label: impl Into<String>, members: &[usize]) -> Result<DigitalImage> {
        if members.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut position = HashMap::with_capacity(members.len());
        for (k, &m) in members.iter().enumerate() {
            self.check_index(m)?;
            if position.insert(m, k).is_some() {
                return Err(Error::DuplicatePoint(self.points[m].0.clone()));
            }
        }
        let mut edges = Vec::new();
        for (k, &m) in members.iter().enumerate() {
            for &nb in &self.neighbors[m] {
                if let Some(&l) = position.get(&nb) {
                    if k < l {
                        edges.push((k, l));
                    }
                }
            }
        }
        let points = members.iter().map(|&m| self.points[m].clone()).collect();
        Ok(DigitalImage::from_parts(
            label.into(),
            points,
            edges.clone(),
            AdjacencyKind::Explicit(edges),
            None,
        ))
    }

    pub fn to_doc(&self) -> ImageDoc {
        ImageDoc {
            label: self.label.clone(),
            dimension: self.dimension,
            points: self.points.iter().map(|p| p.0.clone()).collect(),
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            quotient: None,
        }
    }
}

/// Builds an image from points and an adjacency rule.
///
/// Points are sorted lexicographically; explicit edges refer to the input order.
pub fn make_image(
    label: impl Into<String>,
    points: Vec<Point>,
    adjacency: AdjacencyKind,
) -> Result<DigitalImage> {
    let first = points.first().ok_or(Error::EmptyImage)?;
    let dimension = first.dimension();
    for p in &points {
        if p.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                point: p.0.clone(),
                expected: dimension,
                found: p.dimension(),
            });
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].cmp(&points[b]));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::DuplicatePoint(points[w[0]].0.clone()));
        }
    }
    let mut rank = vec![0; points.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let sorted: Vec<Point> = order.iter().map(|&i| points[i].clone()).collect();

    let (edges, kind) = match adjacency {
        AdjacencyKind::CK(k) => {
            if k == 0 || k > dimension {
                return Err(Error::AdjacencyOutOfRange { k, dimension });
            }
            let mut edges = Vec::new();
            for i in 0..sorted.len() {
                for j in i + 1..sorted.len() {
                    if ck_adjacent(&sorted[i], &sorted[j], k) {
                        edges.push((i, j));
                    }
                }
            }
            (edges, AdjacencyKind::CK(k))
        }
        AdjacencyKind::Explicit(raw) => {
            let mut edges = Vec::with_capacity(raw.len());
            for (a, b) in raw {
                for idx in [a, b] {
                    if idx >= points.len() {
                        return Err(Error::IndexOutOfRange {
                            index: idx,
                            len: points.len(),
                        });
                    }
                }
                if a == b {
                    return Err(Error::InvalidAdjacency(format!("self-loop at {a}")));
                }
                let (x, y) = (rank[a], rank[b]);
                edges.push((x.min(y), x.max(y)));
            }
            edges.sort_unstable();
            edges.dedup();
            (edges.clone(), AdjacencyKind::Explicit(edges))
        }
        other => {
            return Err(Error::InvalidAdjacency(format!(
                "{} adjacency is produced by product()/antipodal_quotient()",
                other.describe()
            )))
        }
    };
    Ok(DigitalImage::from_parts(label.into(), sorted, edges, kind, None))
}

/// Cartesian product with the three-condition (strong) adjacency.
pub fn product(x: &DigitalImage, y: &DigitalImage) -> DigitalImage {
    let (nx, ny) = (x.len(), y.len());
    let mut points = Vec::with_capacity(nx * ny);
    for px in &x.points {
        for py in &y.points {
            points.push(px.concat(py));
        }
    }
    let mut edges = Vec::new();
    for i in 0..nx {
        let close_i: Vec<usize> = std::iter::once(i).chain(x.neighbors(i).iter().copied()).collect();
        for j in 0..ny {
            let p = i * ny + j;
            let close_j: Vec<usize> =
                std::iter::once(j).chain(y.neighbors(j).iter().copied()).collect();
            for &i2 in &close_i {
                for &j2 in &close_j {
                    let q = i2 * ny + j2;
                    if q > p {
                        edges.push((p, q));
                    }
                }
            }
        }
    }
    let kind = AdjacencyKind::Product(Box::new(x.adjacency.clone()), Box::new(y.adjacency.clone()));
    DigitalImage::from_parts(
        format!("{} x {}", x.label, y.label),
        points,
        edges,
        kind,
        Some((nx, ny)),
    )
}

/// Iterated product `X_1 x ... x X_r`; `None` for an empty list.
pub fn product_all(factors: &[&DigitalImage]) -> Option<DigitalImage> {
    let (first, rest) = factors.split_first()?;
    let mut acc = (*first).clone();
    for f in rest {
        acc = product(&acc, f);
    }
    Some(acc)
}

/// An antipodal quotient `X / (x ~ -x)`.
#[derive(Clone, Debug)]
pub struct QuotientImage {
    base: Arc<DigitalImage>,
    image: Arc<DigitalImage>,
    classes: Vec<[usize; 2]>,
    class_of: Vec<usize>,
}

impl QuotientImage {
    /// The image that was divided out.
    pub fn base(&self) -> &Arc<DigitalImage> {
        &self.base
    }

    /// The quotient as an image on class representatives.
    pub fn image(&self) -> &Arc<DigitalImage> {
        &self.image
    }

    /// Base indices of each class, ascending.
    pub fn classes(&self) -> &[[usize; 2]] {
        &self.classes
    }

    pub fn class_of(&self, base_index: usize) -> usize {
        self.class_of[base_index]
    }

    /// Base index of the lexicographically greater member of the class.
    pub fn representative(&self, class: usize) -> usize {
        let [a, b] = self.classes[class];
        if self.base.point(a) > self.base.point(b) {
            a
        } else {
            b
        }
    }

    pub fn antipode(&self, base_index: usize) -> usize {
        let [a, b] = self.classes[self.class_of[base_index]];
        if a == base_index {
            b
        } else {
            a
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.image = Arc::new((*self.image).clone().with_label(label));
        self
    }

    pub fn to_doc(&self) -> ImageDoc {
        let mut doc = self.image.to_doc();
        doc.quotient = Some(QuotientDoc {
            classes: self.classes.to_vec(),
            base: Box::new(self.base.to_doc()),
        });
        doc
    }
}

/// Divides out `x ~ -x`.
///
/// Classes `[x]`, `[y]` are adjacent iff some members are adjacent in the base.
pub fn antipodal_quotient(x: &Arc<DigitalImage>) -> Result<QuotientImage> {
    let mut pairs = Vec::with_capacity(x.len() / 2);
    for (i, p) in x.points().iter().enumerate() {
        if p.is_origin() {
            return Err(Error::OriginPresent);
        }
        let j = x
            .index_of(&p.negated())
            .ok_or_else(|| Error::NotNegationSymmetric(p.0.clone()))?;
        if i < j {
            pairs.push([i, j]);
        }
    }
    let rep = |pair: &[usize; 2]| -> Point {
        let (a, b) = (x.point(pair[0]), x.point(pair[1]));
        if a > b { a.clone() } else { b.clone() }
    };
    pairs.sort_by_key(rep);
    let mut class_of = vec![0; x.len()];
    for (c, pair) in pairs.iter().enumerate() {
        class_of[pair[0]] = c;
        class_of[pair[1]] = c;
    }
    let mut edges: Vec<(usize, usize)> = x
        .edges()
        .iter()
        .filter_map(|&(a, b)| {
            let (ca, cb) = (class_of[a], class_of[b]);
            (ca != cb).then(|| (ca.min(cb), ca.max(cb)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let points = pairs.iter().map(rep).collect();
    let image = DigitalImage::from_parts(
        format!("{}/~", x.label()),
        points,
        edges,
        AdjacencyKind::Quotient(Box::new(x.adjacency().clone())),
        None,
    );
    Ok(QuotientImage {
        base: Arc::clone(x),
        image: Arc::new(image),
        classes: pairs,
        class_of,
    })
}

/// True iff every pair of points is joined by a chain of adjacent points.
pub fn is_connected(x: &DigitalImage) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::EmptyImage);
    }
    Ok(x.distances_from(0).iter().all(|&d| d != usize::MAX))
}

/// JSON form of an image; `quotient` is present for antipodal quotients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageDoc {
    pub label: String,
    pub dimension: usize,
    pub points: Vec<Vec<i64>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientDoc {
    /// Base point indices of each class, in quotient point order.
    pub classes: Vec<[usize; 2]>,
    pub base: Box<ImageDoc>,
}

impl ImageDoc {
    /// Rebuilds an image from its document, checking the edge list.
    pub fn to_image(&self) -> Result<DigitalImage> {
        let points: Vec<Point> = self.points.iter().cloned().map(Point).collect();
        let edges = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let img = make_image(self.label.clone(), points.clone(), AdjacencyKind::Explicit(edges))?;
        if img.points() != points.as_slice() {
            return Err(Error::Document("points are not sorted lexicographically".into()));
        }
        Ok(img)
    }
}
