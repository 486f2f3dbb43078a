//! Minimal spheres, digital projective (product) spaces and non-singular maps.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{antipodal_quotient, make_image, product_all, AdjacencyKind, DigitalImage, Point, QuotientImage};

/// The vertex `±e_axis` of a minimal sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub axis: usize,
    pub positive: bool,
}

impl Vertex {
    pub fn new(axis: usize, positive: bool) -> Self {
        Vertex { axis, positive }
    }

    pub fn neg(self) -> Self {
        Vertex {
            axis: self.axis,
            positive: !self.positive,
        }
    }

    pub fn sign(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    /// Multiplies by a sign `s ∈ {+1, -1}`.
    pub fn scaled(self, s: i64) -> Self {
        if s < 0 {
            self.neg()
        } else {
            self
        }
    }

    pub fn to_point(self, n: usize) -> Point {
        let mut c = vec![0; n + 1];
        c[self.axis] = self.sign();
        Point(c)
    }

    pub fn coords(self, n: usize) -> Vec<i64> {
        self.to_point(n).0
    }
}

/// Sign of the unique nonzero coordinate of a sphere vertex.
pub fn sign_of(p: &Point) -> Result<i64> {
    let mut nonzero = p.coords().iter().filter(|&&c| c != 0);
    match (nonzero.next(), nonzero.next()) {
        (Some(&c), None) if c.abs() == 1 => Ok(c),
        _ => Err(Error::NotSphereVertex(p.0.clone())),
    }
}

/// `S^n_min`: the points `±e_0..±e_n` of `Z^{n+1}` under `c_{n+1}`.
#[derive(Clone, Debug)]
pub struct SphereModel {
    n: usize,
    image: Arc<DigitalImage>,
    by_vertex: Vec<usize>,
    vertices: Vec<Vertex>,
}

pub fn minimal_sphere(n: usize) -> SphereModel {
    let mut points = Vec::with_capacity(2 * n + 2);
    for axis in 0..=n {
        for positive in [true, false] {
            points.push(Vertex::new(axis, positive).to_point(n));
        }
    }
    let image = make_image(format!("S^{n}_min"), points, AdjacencyKind::CK(n + 1))
        .expect("sphere vertices are distinct and c_{n+1} is in range");
    let mut by_vertex = vec![0; 2 * n + 2];
    let mut vertices = Vec::with_capacity(2 * n + 2);
    for (i, p) in image.points().iter().enumerate() {
        let axis = p.coords().iter().position(|&c| c != 0).expect("no origin");
        let v = Vertex::new(axis, p.coords()[axis] > 0);
        by_vertex[2 * axis + usize::from(v.positive)] = i;
        vertices.push(v);
    }
    SphereModel {
        n,
        image: Arc::new(image),
        by_vertex,
        vertices,
    }
}

impl SphereModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self) -> &Arc<DigitalImage> {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, v: Vertex) -> usize {
        self.by_vertex[2 * v.axis + usize::from(v.positive)]
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn antipode(&self, i: usize) -> usize {
        self.index(self.vertices[i].neg())
    }

    /// Index of the pole `A^±` on the last axis.
    pub fn pole(&self, positive: bool) -> usize {
        self.index(Vertex::new(self.n, positive))
    }

    pub fn is_pole(&self, i: usize) -> bool {
        self.vertices[i].axis == self.n
    }
}

/// `d-P^n`, the antipodal quotient of `S^n_min`.
pub fn projective_space(n: usize) -> Result<QuotientImage> {
    if n < 1 {
        return Err(Error::InvalidSpec("projective space needs n >= 1".into()));
    }
    let sphere = minimal_sphere(n);
    let q = antipodal_quotient(sphere.image())?;
    Ok(relabel_quotient(q, format!("d-P^{n}")))
}

fn relabel_quotient(q: QuotientImage, label: String) -> QuotientImage {
    q.with_label(label)
}

/// Dimensions `n_1 <= ... <= n_r` of a projective product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PpsSpec {
    nbar: Vec<usize>,
}

impl PpsSpec {
    pub fn new(nbar: Vec<usize>) -> Result<Self> {
        if nbar.is_empty() {
            return Err(Error::InvalidSpec("need at least one sphere".into()));
        }
        if nbar.contains(&0) {
            return Err(Error::InvalidSpec("sphere dimensions must be positive".into()));
        }
        if nbar.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSpec(format!("{nbar:?} is not nondecreasing")));
        }
        Ok(PpsSpec { nbar })
    }

    pub fn dims(&self) -> &[usize] {
        &self.nbar
    }

    pub fn r(&self) -> usize {
        self.nbar.len()
    }

    pub fn total_dimension(&self) -> usize {
        self.nbar.iter().sum()
    }

    /// `n_1 + r - 1`.
    pub fn cat_bound(&self) -> usize {
        self.nbar[0] + self.r() - 1
    }
}

impl fmt::Display for PpsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nbar.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `d-P_n̄`: the product of spheres and its quotient by diagonal negation.
#[derive(Clone, Debug)]
pub struct PpsModel {
    spec: PpsSpec,
    spheres: Vec<SphereModel>,
    sphere_product: Arc<DigitalImage>,
    quotient: QuotientImage,
    radices: Vec<usize>,
}

pub fn pps(spec: &PpsSpec) -> Result<PpsModel> {
    let spheres: Vec<SphereModel> = spec.dims().iter().map(|&n| minimal_sphere(n)).collect();
    let factors: Vec<&DigitalImage> = spheres.iter().map(|s| s.image().as_ref()).collect();
    let label = format!("d-S_({spec})");
    let sphere_product = Arc::new(product_all(&factors).expect("r >= 1").with_label(label));
    let quotient = antipodal_quotient(&sphere_product)?;
    let quotient = relabel_quotient(quotient, format!("d-P_({spec})"));
    let expected: usize = spheres.iter().map(SphereModel::len).product::<usize>() / 2;
    if quotient.len() != expected {
        return Err(Error::Construction(format!(
            "quotient has {} classes, expected {expected}",
            quotient.len()
        )));
    }
    let radices = spheres.iter().map(SphereModel::len).collect();
    Ok(PpsModel {
        spec: spec.clone(),
        spheres,
        sphere_product,
        quotient,
        radices,
    })
}

impl PpsModel {
    pub fn spec(&self) -> &PpsSpec {
        &self.spec
    }

    pub fn spheres(&self) -> &[SphereModel] {
        &self.spheres
    }

    pub fn sphere_product(&self) -> &Arc<DigitalImage> {
        &self.sphere_product
    }

    pub fn quotient(&self) -> &QuotientImage {
        &self.quotient
    }

    pub fn r(&self) -> usize {
        self.spheres.len()
    }

    /// Product index of a tuple of per-sphere indices.
    pub fn encode(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = idx % r;
            idx /= r;
        }
        out
    }

    pub fn encode_vertices(&self, vs: &[Vertex]) -> usize {
        let coords: Vec<usize> = vs
            .iter()
            .zip(&self.spheres)
            .map(|(&v, s)| s.index(v))
            .collect();
        self.encode(&coords)
    }

    pub fn decode_vertices(&self, idx: usize) -> Vec<Vertex> {
        self.decode(idx)
            .into_iter()
            .zip(&self.spheres)
            .map(|(c, s)| s.vertex(c))
            .collect()
    }

    /// Quotient class of a vertex tuple.
    pub fn class_of_vertices(&self, vs: &[Vertex]) -> usize {
        self.quotient.class_of(self.encode_vertices(vs))
    }
}

/// A sign-bilinear integer map `Z^{n+1} x Z^{n+1} -> Z^{k+1}`.
///
/// Component `c` is `θ_c(u, v) = Σ_{a,b} m_c[a][b] u_a v_b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonSingularMap {
    pub components: Vec<Vec<Vec<i64>>>,
}

impl NonSingularMap {
    pub fn new(components: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        let d = components
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Theta("no components".into()))?;
        if d == 0 {
            return Err(Error::Theta("empty domain".into()));
        }
        for (c, m) in components.iter().enumerate() {
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(Error::Theta(format!("component {c} is not a {d}x{d} matrix")));
            }
        }
        Ok(NonSingularMap { components })
    }

    /// Ambient dimension `n + 1` of each argument.
    pub fn domain_dimension(&self) -> usize {
        self.components[0].len()
    }

    /// Number of components `k + 1`.
    pub fn codomain_dimension(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize, u: &[i64], v: &[i64]) -> i64 {
        let m = &self.components[c];
        let mut acc = 0;
        for (a, row) in m.iter().enumerate() {
            if u[a] == 0 {
                continue;
            }
            for (b, &x) in row.iter().enumerate() {
                acc += x * u[a] * v[b];
            }
        }
        acc
    }

    pub fn apply(&self, u: &[i64], v: &[i64]) -> Vec<i64> {
        (0..self.components.len()).map(|c| self.component(c, u, v)).collect()
    }

    /// Index and value of the first nonzero component.
    pub fn first_nonzero(&self, u: &[i64], v: &[i64]) -> Option<(usize, i64)> {
        (0..self.components.len())
            .map(|c| (c, self.component(c, u, v)))
            .find(|&(_, x)| x != 0)
    }

    /// `θ(a u, b v) = a b θ(u, v)` over all sphere-vertex pairs and signs.
    pub fn check_sign_bilinear(&self) -> Result<()> {
        let n = self.domain_dimension() - 1;
        let verts: Vec<Vec<i64>> = (0..=n)
            .flat_map(|axis| [true, false].map(|p| Vertex::new(axis, p).coords(n)))
            .collect();
        for u in &verts {
            for v in &verts {
                let base = self.apply(u, v);
                for a in [-1i64, 1] {
                    for b in [-1i64, 1] {
                        let au: Vec<i64> = u.iter().map(|x| a * x).collect();
                        let bv: Vec<i64> = v.iter().map(|x| b * x).collect();
                        let got = self.apply(&au, &bv);
                        if got.iter().zip(&base).any(|(g, x)| *g != a * b * x) {
                            return Err(Error::Theta(format!(
                                "sign-bilinearity fails at u={u:?}, v={v:?}, a={a}, b={b}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `θ(u, v) = 0` only when `u = 0` or `v = 0`, over `[-radius, radius]^{n+1}`.
    pub fn check_nonsingular(&self, radius: i64) -> Result<()> {
        let grid = lattice_grid(self.domain_dimension(), radius);
        for u in grid.iter().filter(|u| u.iter().any(|&x| x != 0)) {
            for v in grid.iter().filter(|v| v.iter().any(|&x| x != 0)) {
                if self.apply(u, v).iter().all(|&x| x == 0) {
                    return Err(Error::Theta(format!("θ({u:?}, {v:?}) = 0")));
                }
            }
        }
        Ok(())
    }

    /// `θ_0(u, u) > 0` for every nonzero `u` in the grid.
    pub fn check_diagonal_positive(&self, radius: i64) -> Result<()> {
        for u in lattice_grid(self.domain_dimension(), radius) {
            if u.iter().any(|&x| x != 0) && self.component(0, &u, &u) <= 0 {
                return Err(Error::Theta(format!("θ_0({u:?}, {u:?}) <= 0")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_sign_bilinear()?;
        self.check_nonsingular(2)?;
        self.check_diagonal_positive(2)
    }
}

/// All integer vectors of length `d` with entries in `[-radius, radius]`.
pub fn lattice_grid(d: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(d)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-radius..=radius).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

fn bilinear(d: usize, terms: &[(i64, usize, usize)]) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; d]; d];
    for &(c, a, b) in terms {
        m[a][b] += c;
    }
    m
}

/// The shipped non-singular maps: complex (n=1), the three-minor map (n=2)
/// and quaternion (n=3) products, each with the inner product first.
pub fn theta_for(n: usize) -> Result<NonSingularMap> {
    let d = n + 1;
    let inner: Vec<(i64, usize, usize)> = (0..d).map(|a| (1, a, a)).collect();
    let components = match n {
        1 => vec![bilinear(2, &inner), bilinear(2, &[(1, 0, 1), (-1, 1, 0)])],
        2 => vec![
            bilinear(3, &inner),
            bilinear(3, &[(-1, 0, 1), (1, 1, 0)]),
            bilinear(3, &[(-1, 0, 2), (1, 2, 0)]),
            bilinear(3, &[(-1, 1, 2), (1, 2, 1)]),
        ],
        3 => vec![
            bilinear(4, &inner),
            bilinear(4, &[(1, 0, 1), (-1, 1, 0), (-1, 2, 3), (1, 3, 2)]),
            bilinear(4, &[(1, 0, 2), (1, 1, 3), (-1, 2, 0), (-1, 3, 1)]),
            bilinear(4, &[(1, 0, 3), (-1, 1, 2), (1, 2, 1), (-1, 3, 0)]),
        ],
        _ => return Err(Error::Theta(format!("no built-in non-singular map for n = {n}"))),
    };
    NonSingularMap::new(components)
}

/// A named space accepted by the command line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Point,
    Complete(usize),
    Sphere(usize),
    Proj(usize),
    Pps(PpsSpec),
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "point" {
            return Ok(Space::Point);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(|| Error::Parse(s.to_string()))?;
        let int = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::Parse(s.to_string()));
        match kind {
            "complete" => match int(arg)? {
                0 => Err(Error::InvalidSpec("complete image needs at least one point".into())),
                n => Ok(Space::Complete(n)),
            },
            "sphere" => Ok(Space::Sphere(int(arg)?)),
            "proj" => match int(arg)? {
                0 => Err(Error::InvalidSpec("projective space needs n >= 1".into())),
                n => Ok(Space::Proj(n)),
            },
            "pps" => {
                let dims = arg.split(',').map(int).collect::<Result<Vec<_>>>()?;
                Ok(Space::Pps(PpsSpec::new(dims)?))
            }
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Point => write!(f, "point"),
            Space::Complete(n) => write!(f, "complete:{n}"),
            Space::Sphere(n) => write!(f, "sphere:{n}"),
            Space::Proj(n) => write!(f, "proj:{n}"),
            Space::Pps(s) => write!(f, "pps:{s}"),
        }
    }
}

/// A constructed space together with its sphere-level models.
#[derive(Clone, Debug)]
pub struct BuiltSpace {
    pub space: Space,
    pub image: Arc<DigitalImage>,
    pub quotient: Option<QuotientImage>,
    pub sphere: Option<SphereModel>,
    pub pps: Option<PpsModel>,
}

/// `K_n` realized as the first `n` points of `{0,1}^d` under `c_d`.
pub fn complete_image(n: usize) -> Result<DigitalImage> {
    if n == 0 {
        return Err(Error::EmptyImage);
    }
    let d = (usize::BITS - (n - 1).leading_zeros()).max(1) as usize;
    let points = (0..n)
        .map(|i| Point((0..d).rev().map(|b| ((i >> b) & 1) as i64).collect()))
        .collect();
    make_image(format!("K_{n}"), points, AdjacencyKind::CK(d))
}

impl Space {
    pub fn build(&self) -> Result<BuiltSpace> {
        let plain = |image: DigitalImage| BuiltSpace {
            space: self.clone(),
            image: Arc::new(image),
            quotient: None,
            sphere: None,
            pps: None,
        };
        match self {
            Space::Point => Ok(plain(make_image("point", vec![Point(vec![0])], AdjacencyKind::CK(1))?)),
            Space::Complete(n) => Ok(plain(complete_image(*n)?)),
            Space::Sphere(n) => {
                let sphere = minimal_sphere(*n);
                Ok(BuiltSpace {
                    space: self.clone(),
                    image: Arc::clone(sphere.image()),
                    quotient: None,
                    sphere: Some(sphere),
                    pps: None,
                })
            }
            Space::Proj(n) => {
                let model = pps(&PpsSpec::new(vec![*n])?)?;
                let quotient = relabel_quotient(model.quotient().clone(), format!("d-P^{n}"));
                Ok(BuiltSpace {
                    space: self.clone(),
                    image: Arc::clone(quotient.image()),
                    quotient: Some(quotient),
                    sphere: None,
                    pps: Some(model),
                })
            }
            Space::Pps(spec) => {
                let model = pps(spec)?;
                Ok(BuiltSpace {
                    space: self.clone(),
                    image: Arc::clone(model.quotient().image()),
                    quotient: Some(model.quotient().clone()),
                    sphere: None,
                    pps: Some(model),
                })
            }
        }
    }
}

impl BuiltSpace {
    pub fn to_doc(&self) -> crate::image::ImageDoc {
        match &self.quotient {
            Some(q) => q.to_doc(),
            None => self.image.to_doc(),
        }
    }
}
