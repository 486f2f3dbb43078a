//! Motion planners for spheres, projective spaces and projective product spaces.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::image::{product, DigitalImage};
use crate::planners::cat::check_families;
use crate::planners::cover::{
    CoverContext, CoverKind, CoverPiece, Lift, LiftContext, LiftMode, PlannerCover, Provenance, Witness,
};
use crate::planners::family::{pad, PathFamily};
use crate::spaces::{NonSingularMap, PpsModel};

/// Sphere planner piece of `(u, v)`: 0 off the antipodal diagonal, 1 on it,
/// 2 on it at the vanishing axis of an even sphere.
pub fn sphere_block(fam: &PathFamily, u: usize, v: usize) -> usize {
    let s = fam.sphere();
    if v != u && v != s.antipode(u) {
        0
    } else if fam.vanishing_axis() == Some(s.vertex(u).axis) {
        2
    } else {
        1
    }
}

/// Number of sphere planner pieces minus one.
pub fn sphere_bound(fam: &PathFamily) -> usize {
    if fam.vanishing_axis().is_some() {
        2
    } else {
        1
    }
}

/// `ρ(u, v)`, or a meridian when `v = -u`.
pub fn sphere_path(fam: &PathFamily, u: usize, v: usize) -> Result<Vec<usize>> {
    if v == fam.sphere().antipode(u) {
        if fam.vanishing_axis() == Some(fam.sphere().vertex(u).axis) {
            fam.sigma0_from(u)
        } else {
            fam.sigma(u)
        }
    } else {
        fam.rho(u, v)
    }
}

fn empty_pieces(prefix: &str, count: usize) -> Vec<CoverPiece> {
    (0..count)
        .map(|i| CoverPiece {
            label: format!("{prefix}_{i}"),
            members: Vec::new(),
            witness: Witness::Sections(Vec::new()),
            lifts: Vec::new(),
        })
        .collect()
}

fn push_section(piece: &mut CoverPiece, p: usize, path: Vec<usize>, lifts: Vec<(Vec<usize>, Vec<usize>)>) {
    let member = piece.members.len();
    piece.members.push(p);
    if let Witness::Sections(s) = &mut piece.witness {
        s.push(path);
    }
    piece.lifts.extend(lifts.into_iter().map(|(pattern, steps)| Lift {
        member,
        pattern,
        steps,
    }));
}

/// The `2` or `3` piece planner on `S^n_min`, at sphere level.
pub fn tc_planner_sphere(fam: &PathFamily) -> Result<PlannerCover> {
    fam.validate()?;
    let x = Arc::clone(fam.sphere().image());
    let base = Arc::new(product(&x, &x));
    let total = fam.total();
    let mut pieces = empty_pieces("V", sphere_bound(fam) + 1);
    for p in 0..base.len() {
        let (u, v) = base.split(p).expect("product image");
        let path = pad(sphere_path(fam, u, v)?, total);
        let lift = vec![(vec![u, v], path.clone())];
        push_section(&mut pieces[sphere_block(fam, u, v)], p, path, lift);
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("n".to_string(), fam.n().to_string());
    if let Some(a) = fam.vanishing_axis() {
        parameters.insert("vanishing_axis".to_string(), a.to_string());
    }
    Ok(PlannerCover {
        space: format!("sphere:{}", fam.n()),
        kind: CoverKind::Tc,
        lift_mode: LiftMode::Identity,
        pieces,
        provenance: Provenance {
            construction: "tc_planner_sphere".to_string(),
            parameters,
        },
        context: CoverContext {
            space: Arc::clone(&x),
            base,
            lift: Some(LiftContext {
                upstairs: x.clone(),
                class_of: (0..x.len()).collect(),
            }),
        },
    })
}

struct PairLift {
    block: usize,
    steps: Vec<usize>,
}

fn vertex_coords(model: &PpsModel, q: usize, idx: usize) -> Vec<i64> {
    let s = &model.spheres()[q];
    s.vertex(idx).coords(s.n())
}

/// Evaluates the combined section on one representative pair `(ū, v̄)`.
fn pair_lift(
    model: &PpsModel,
    theta: &NonSingularMap,
    families: &[PathFamily],
    total: usize,
    a: usize,
    b: usize,
) -> Result<PairLift> {
    let u = model.decode(a);
    let v = model.decode(b);
    let (i, value) = theta
        .first_nonzero(&vertex_coords(model, 0, u[0]), &vertex_coords(model, 0, v[0]))
        .ok_or_else(|| Error::Theta("all components vanish on a pair of sphere vertices".into()))?;
    let spheres = model.spheres();
    let w: Vec<usize> = u
        .iter()
        .zip(spheres)
        .map(|(&c, s)| if value < 0 { s.antipode(c) } else { c })
        .collect();
    let mut block = i;
    let mut paths = vec![families[0]
        .rho(w[0], v[0])
        .map_err(|e| Error::Construction(format!("first factor: {e}")))?];
    for q in 1..w.len() {
        block += sphere_block(&families[q], w[q], v[q]);
        paths.push(sphere_path(&families[q], w[q], v[q])?);
    }
    let padded: Vec<Vec<usize>> = paths.into_iter().map(|p| pad(p, total)).collect();
    let steps = (0..=total)
        .map(|t| model.encode(&padded.iter().map(|p| p[t]).collect::<Vec<_>>()))
        .collect();
    Ok(PairLift { block, steps })
}

fn quotient_planner(
    model: &PpsModel,
    theta: &NonSingularMap,
    families: &[PathFamily],
    prefix: &str,
) -> Result<(Vec<CoverPiece>, CoverContext)> {
    check_families(model, families)?;
    for f in families {
        f.validate()?;
    }
    let n1 = model.spheres()[0].n();
    if theta.domain_dimension() != n1 + 1 {
        return Err(Error::Theta(format!(
            "θ acts on Z^{} but the first sphere lives in Z^{}",
            theta.domain_dimension(),
            n1 + 1
        )));
    }
    theta.validate()?;
    let count = theta.codomain_dimension() + families[1..].iter().map(sphere_bound).sum::<usize>();
    let total = families.iter().map(PathFamily::total).max().unwrap_or(0);
    let q = model.quotient();
    let x = Arc::clone(q.image());
    let base: Arc<DigitalImage> = Arc::new(product(&x, &x));
    let mut pieces = empty_pieces(prefix, count);
    for p in 0..base.len() {
        let (cu, cv) = base.split(p).expect("product image");
        let mut block = None;
        let mut path: Option<Vec<usize>> = None;
        let mut lifts = Vec::with_capacity(4);
        for &a in &q.classes()[cu] {
            for &b in &q.classes()[cv] {
                let mut lift = pair_lift(model, theta, families, total, a, b)?;
                if lift.steps[0] != a {
                    lift.steps = lift.steps.iter().map(|&s| q.antipode(s)).collect();
                }
                let proj: Vec<usize> = lift.steps.iter().map(|&s| q.class_of(s)).collect();
                if block.is_some_and(|k| k != lift.block) {
                    return Err(Error::Construction(format!("pair {p} falls in two pieces")));
                }
                if path.as_ref().is_some_and(|prev| *prev != proj) {
                    return Err(Error::Construction(format!(
                        "representatives of pair {p} give different class paths"
                    )));
                }
                block = Some(lift.block);
                path = Some(proj);
                lifts.push((vec![a, b], lift.steps));
            }
        }
        let block = block.expect("four representative pairs");
        push_section(&mut pieces[block], p, path.expect("four representative pairs"), lifts);
    }
    let upstairs = model.sphere_product();
    let context = CoverContext {
        space: x,
        base,
        lift: Some(LiftContext {
            upstairs: Arc::clone(upstairs),
            class_of: (0..upstairs.len()).map(|i| q.class_of(i)).collect(),
        }),
    };
    Ok((pieces, context))
}

fn theta_parameters(theta: &NonSingularMap, parameters: &mut BTreeMap<String, String>) {
    parameters.insert(
        "theta".to_string(),
        serde_json::to_string(&theta.components).expect("integer matrices serialize"),
    );
}

/// Planner on `d-P^n` from a non-singular map: piece `i` holds the pairs whose
/// first nonzero `θ` component is `θ_i`, with section the class of `ρ(±u, v)`.
pub fn tc_planner_projective(
    model: &PpsModel,
    theta: &NonSingularMap,
    family: &PathFamily,
) -> Result<PlannerCover> {
    if model.r() != 1 {
        return Err(Error::Construction("projective planner needs a single sphere".into()));
    }
    let (pieces, context) = quotient_planner(model, theta, std::slice::from_ref(family), "U")?;
    let n = model.spheres()[0].n();
    let mut parameters = BTreeMap::new();
    parameters.insert("n".to_string(), n.to_string());
    theta_parameters(theta, &mut parameters);
    Ok(PlannerCover {
        space: format!("proj:{n}"),
        kind: CoverKind::Tc,
        lift_mode: LiftMode::Quotient,
        pieces,
        provenance: Provenance {
            construction: "tc_planner_projective".to_string(),
            parameters,
        },
        context,
    })
}

/// Combined planner on `d-P_n̄`: the `θ` planner on the first factor and
/// sphere planners on the rest, grouped into `W_l` by total block index.
pub fn tc_planner_pps(
    model: &PpsModel,
    theta: &NonSingularMap,
    families: &[PathFamily],
) -> Result<PlannerCover> {
    let (pieces, context) = quotient_planner(model, theta, families, "W")?;
    let mut parameters = BTreeMap::new();
    parameters.insert("nbar".to_string(), model.spec().to_string());
    theta_parameters(theta, &mut parameters);
    Ok(PlannerCover {
        space: format!("pps:{}", model.spec()),
        kind: CoverKind::Tc,
        lift_mode: LiftMode::Quotient,
        pieces,
        provenance: Provenance {
            construction: "tc_planner_pps".to_string(),
            parameters,
        },
        context,
    })
}

/// TC cover `W_l = ⋃_{i+j=l} V_i × V_j` built from a cat cover of a
/// path-connected space; `s(u, v)` contracts `u`, crosses between the two
/// basepoints, and runs the contraction of `v` backwards.
pub fn doubled_cat_cover(cat: &PlannerCover) -> Result<PlannerCover> {
    if cat.kind != CoverKind::Cat {
        return Err(Error::Construction("doubling needs a cat cover".into()));
    }
    let x = Arc::clone(&cat.context.space);
    let mut home: Vec<Option<(usize, usize)>> = vec![None; x.len()];
    let mut traces: Vec<Vec<Vec<usize>>> = Vec::with_capacity(cat.pieces.len());
    for (i, piece) in cat.pieces.iter().enumerate() {
        let Witness::Frames(frames) = &piece.witness else {
            return Err(Error::Construction("cat piece without frames".into()));
        };
        let trace: Vec<Vec<usize>> = (0..piece.members.len())
            .map(|k| frames.iter().map(|f| f[k]).collect())
            .collect();
        for (k, &m) in piece.members.iter().enumerate() {
            home[m].get_or_insert((i, k));
        }
        traces.push(trace);
    }
    let base = Arc::new(product(&x, &x));
    let mut pieces = empty_pieces("W", 2 * cat.bound() + 1);
    for p in 0..base.len() {
        let (u, v) = base.split(p).expect("product image");
        let ((i, ku), (j, kv)) = match (home[u], home[v]) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Construction("cat cover misses a point".into())),
        };
        let to_base = &traces[i][ku];
        let from_base = &traces[j][kv];
        let bridge = x
            .shortest_path(*to_base.last().unwrap(), *from_base.last().unwrap())
            .ok_or_else(|| Error::Construction("basepoints lie in different components".into()))?;
        let mut path = to_base.clone();
        path.extend_from_slice(&bridge[1..]);
        path.extend(from_base.iter().rev().skip(1));
        push_section(&mut pieces[i + j], p, path, Vec::new());
    }
    let mut parameters = cat.provenance.parameters.clone();
    parameters.insert("from".to_string(), cat.provenance.construction.clone());
    Ok(PlannerCover {
        space: cat.space.clone(),
        kind: CoverKind::Tc,
        lift_mode: LiftMode::None,
        pieces,
        provenance: Provenance {
            construction: "doubled_cat_cover".to_string(),
            parameters,
        },
        context: CoverContext {
            space: x,
            base,
            lift: None,
        },
    })
}
