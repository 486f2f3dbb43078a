//! Concrete rotations and meridians on a minimal sphere.
//!
//! All paths are sequences of sphere-vertex indices.

use crate::error::{Error, Result};
use crate::spaces::{minimal_sphere, SphereModel, Vertex};

/// Short paths `ρ`, meridians `σ` and the fixed pole-to-pole meridian `σ_0` on one sphere.
#[derive(Clone, Debug)]
pub struct PathFamily {
    sphere: SphereModel,
    /// Length of the rotation phase.
    pub m1: usize,
    /// Length of the meridian phase.
    pub m2: usize,
}

/// One-step rotations and one-intermediate-vertex meridians on `S^n_min`.
pub fn default_path_family(n: usize) -> Result<PathFamily> {
    if n < 1 {
        return Err(Error::PathFamily("path families need n >= 1".into()));
    }
    let pf = PathFamily {
        sphere: minimal_sphere(n),
        m1: 1,
        m2: 2,
    };
    pf.validate()?;
    Ok(pf)
}

impl PathFamily {
    pub fn sphere(&self) -> &SphereModel {
        &self.sphere
    }

    pub fn n(&self) -> usize {
        self.sphere.n()
    }

    /// `m_1 + m_2`, the common clock of every constructed path.
    pub fn total(&self) -> usize {
        self.m1 + self.m2
    }

    /// The vanishing axis of an even sphere (`a = e_n`); `None` for odd spheres.
    pub fn vanishing_axis(&self) -> Option<usize> {
        (self.n() % 2 == 0).then_some(self.n())
    }

    /// `ρ(A, B)` for `A != -B`: constant if `A = B`, else the single edge.
    pub fn rho(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        if a == b {
            return Ok(vec![a]);
        }
        if self.sphere.antipode(a) == b {
            return Err(Error::PathFamily(format!("ρ is undefined on the antipodal pair ({a}, {b})")));
        }
        Ok(vec![a, b])
    }

    /// `w(u)`: the paired axis, `w(±e_{2j}) = ±e_{2j+1}`, `w(±e_{2j+1}) = ∓e_{2j}`.
    pub fn partner(&self, u: usize) -> Option<usize> {
        let v = self.sphere.vertex(u);
        if Some(v.axis) == self.vanishing_axis() {
            return None;
        }
        let w = if v.axis % 2 == 0 {
            Vertex::new(v.axis + 1, v.positive)
        } else {
            Vertex::new(v.axis - 1, !v.positive)
        };
        Some(self.sphere.index(w))
    }

    /// The meridian `σ(u, -u) = [u, w(u), -u]`.
    pub fn sigma(&self, u: usize) -> Result<Vec<usize>> {
        let w = self
            .partner(u)
            .ok_or_else(|| Error::PathFamily("σ is undefined on the vanishing axis".into()))?;
        Ok(vec![u, w, self.sphere.antipode(u)])
    }

    /// The fixed meridian `σ_0` from `A^-` through `e_0` to `A^+`.
    pub fn sigma0(&self) -> Vec<usize> {
        let mid = self.sphere.index(Vertex::new(0, true));
        vec![self.sphere.pole(false), mid, self.sphere.pole(true)]
    }

    /// Pole-to-antipode meridian: `σ_0(a, -a)` is `σ_0` reversed and `σ_0(-a, a)` its negation.
    pub fn sigma0_from(&self, u: usize) -> Result<Vec<usize>> {
        let mut path = self.sigma0();
        path.reverse();
        if u == self.sphere.pole(true) {
            Ok(path)
        } else if u == self.sphere.pole(false) {
            Ok(path.into_iter().map(|p| self.sphere.antipode(p)).collect())
        } else {
            Err(Error::PathFamily("σ_0 starts only at a pole".into()))
        }
    }

    pub fn negate(&self, path: &[usize]) -> Vec<usize> {
        path.iter().map(|&p| self.sphere.antipode(p)).collect()
    }

    fn walk_ok(&self, path: &[usize]) -> bool {
        let img = self.sphere.image();
        path.windows(2).all(|w| img.is_close(w[0], w[1]))
    }

    /// Checks every family invariant exhaustively over the sphere's vertices.
    pub fn validate(&self) -> Result<()> {
        let s = &self.sphere;
        let fail = |msg: String| Err(Error::PathFamily(msg));
        for a in 0..s.len() {
            let c = self.rho(a, a)?;
            if c.iter().any(|&p| p != a) {
                return fail(format!("ρ({a},{a}) is not constant"));
            }
            for b in 0..s.len() {
                if s.antipode(a) == b {
                    continue;
                }
                let f = self.rho(a, b)?;
                if f[0] != a || *f.last().unwrap() != b || !self.walk_ok(&f) || f.len() > self.m1 + 1 {
                    return fail(format!("ρ({a},{b}) has wrong endpoints, a jump, or is too long"));
                }
                if self.rho(s.antipode(a), s.antipode(b))? != self.negate(&f) {
                    return fail(format!("ρ(-A,-B) != -ρ(A,B) at ({a},{b})"));
                }
            }
            if let Ok(m) = self.sigma(a) {
                if m[0] != a || *m.last().unwrap() != s.antipode(a) || !self.walk_ok(&m) {
                    return fail(format!("σ({a}) is not a meridian"));
                }
                if self.sigma(s.antipode(a))? != self.negate(&m) {
                    return fail(format!("σ(-u,u) != -σ(u,-u) at {a}"));
                }
                if m.len() > self.m2 + 1 {
                    return fail(format!("σ({a}) is longer than m_2"));
                }
            } else if Some(s.vertex(a).axis) != self.vanishing_axis() {
                return fail(format!("σ({a}) missing off the vanishing axis"));
            }
        }
        let z = self.sigma0();
        if z[0] != s.pole(false) || *z.last().unwrap() != s.pole(true) || !self.walk_ok(&z) || z.len() > self.m2 + 1 {
            return fail("σ_0 must run from A^- to A^+ within m_2 steps".into());
        }
        let up = self.sigma0_from(s.pole(true))?;
        let down = self.sigma0_from(s.pole(false))?;
        if down != self.negate(&up) || !self.walk_ok(&up) {
            return fail("σ_0(-a,a) != -σ_0(a,-a)".into());
        }
        Ok(())
    }
}

/// Pads `path` with its terminal point to exactly `len + 1` entries.
pub fn pad(mut path: Vec<usize>, len: usize) -> Vec<usize> {
    let last = *path.last().expect("nonempty path");
    path.resize(len + 1, last);
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pf: &PathFamily, axis: usize, positive: bool) -> usize {
        pf.sphere().index(Vertex::new(axis, positive))
    }

    #[test]
    fn circle_examples() {
        let pf = default_path_family(1).unwrap();
        let (e0, e1) = (v(&pf, 0, true), v(&pf, 1, true));
        let (me0, me1) = (v(&pf, 0, false), v(&pf, 1, false));
        assert_eq!(pf.rho(e0, e1).unwrap(), vec![e0, e1]);
        assert_eq!(pf.rho(me0, me1).unwrap(), vec![me0, me1]);
        assert_eq!(pf.sigma(e0).unwrap(), vec![e0, e1, me0]);
        assert_eq!(pf.sigma(me0).unwrap(), vec![me0, me1, e0]);
        assert!(pf.rho(e0, me0).is_err());
    }

    #[test]
    fn even_spheres_skip_the_vanishing_axis() {
        let pf = default_path_family(2).unwrap();
        let a = v(&pf, 2, true);
        assert!(pf.sigma(a).is_err());
        assert_eq!(pf.sigma0(), vec![v(&pf, 2, false), v(&pf, 0, true), a]);
        assert_eq!(pf.sigma0_from(a).unwrap(), vec![a, v(&pf, 0, true), v(&pf, 2, false)]);
    }

    #[test]
    fn families_validate() {
        for n in 1..=5 {
            default_path_family(n).unwrap().validate().unwrap();
        }
        assert!(default_path_family(0).is_err());
    }

    #[test]
    fn padding() {
        assert_eq!(pad(vec![4, 5], 3), vec![4, 5, 5, 5]);
        assert_eq!(pad(vec![4], 0), vec![4]);
    }
}
